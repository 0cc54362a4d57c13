//! Two-population extension: max-entropy Nash equilibrium of a bimatrix
//! game, maximising the summed entropy of both players' strategies.

use super::maxent::{clean, combinations, entropy_lp, feasible, Formulation, Population, CERT_TOL};
use super::piecewise::{segments_for, PiecewiseEntropy};
use super::stats::entropy;
use super::SolverError;
use serde::{Deserialize, Serialize};

/// `row[i][j]` and `col[i][j]` are the payoffs to the row and column
/// player when they play `i` and `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BimatrixGame {
    pub row: Vec<Vec<f64>>,
    pub col: Vec<Vec<f64>>,
}

impl BimatrixGame {
    pub fn new(row: Vec<Vec<f64>>, col: Vec<Vec<f64>>) -> Result<Self, SolverError> {
        let m = row.len();
        let n = row.first().map_or(0, |r| r.len());
        if m == 0 || n == 0 {
            return Err(SolverError::InvalidGame("empty bimatrix game".into()));
        }
        if col.len() != m {
            return Err(SolverError::Dimension { expected: m, got: col.len() });
        }
        for r in row.iter().chain(&col) {
            if r.len() != n {
                return Err(SolverError::Dimension { expected: n, got: r.len() });
            }
            if r.iter().any(|x| !x.is_finite()) {
                return Err(SolverError::InvalidGame("non-finite payoff".into()));
            }
        }
        Ok(BimatrixGame { row, col })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.row.len(), self.row[0].len())
    }

    fn col_transposed(&self) -> Vec<Vec<f64>> {
        let (m, n) = self.shape();
        (0..n).map(|j| (0..m).map(|i| self.col[i][j]).collect()).collect()
    }

    /// Regrets of the row and column player at `(x, y)`.
    pub fn regrets(&self, x: &[f64], y: &[f64]) -> [f64; 2] {
        let (m, n) = self.shape();
        let row_vals: Vec<f64> = (0..m).map(|i| (0..n).map(|j| self.row[i][j] * y[j]).sum()).collect();
        let col_vals: Vec<f64> = (0..n).map(|j| (0..m).map(|i| self.col[i][j] * x[i]).sum()).collect();
        let r = row_vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - row_vals.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let c = col_vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - col_vals.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
        [r.max(0.0), c.max(0.0)]
    }

    fn span(&self) -> f64 {
        let (lo, hi) = self.row.iter().chain(&self.col).flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        hi - lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BimatrixSolveResult {
    pub row_sigma: Vec<f64>,
    pub col_sigma: Vec<f64>,
    /// Summed entropy of both strategies, in nats.
    pub entropy: f64,
    pub entropy_lower_bound: f64,
    pub row_support: Vec<usize>,
    pub col_support: Vec<usize>,
    pub regrets: [f64; 2],
    pub gap: f64,
    pub segments: usize,
    pub relaxed: bool,
}

/// Nash equilibrium of `game` whose summed entropy is within `eps_ent` of the maximum.
pub fn max_entropy_bimatrix_ne(game: &BimatrixGame, eps_ent: f64) -> Result<BimatrixSolveResult, SolverError> {
    if !(eps_ent > 0.0 && eps_ent.is_finite()) {
        return Err(SolverError::Setting(format!("eps_ent must be positive, got {eps_ent}")));
    }
    let (m, n) = game.shape();
    let k = segments_for(m + n, eps_ent);
    let pw = PiecewiseEntropy::new(k);
    let col_t = game.col_transposed();
    let pops = [Population { payoff: &game.row, opp: 1 }, Population { payoff: &col_t, opp: 0 }];
    let rows: Vec<usize> = (0..m).collect();
    let cols: Vec<usize> = (0..n).collect();
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    for a in (1..=m).rev() {
        for b in (1..=n).rev() {
            if best.as_ref().is_some_and(|x| (a as f64).ln() + (b as f64).ln() <= x.0) {
                continue;
            }
            for sr in combinations(&rows, a) {
                for sc in combinations(&cols, b) {
                    let supports = [sr.clone(), sc];
                    if !feasible(&pops, &supports) {
                        continue;
                    }
                    let Some((lb, sig)) = entropy_lp(&pops, &supports, &pw, Formulation::Segment) else {
                        continue;
                    };
                    if best.as_ref().is_none_or(|x| lb > x.0 + 1e-12) {
                        best = Some((lb, sig));
                    }
                }
            }
        }
    }
    let (lb, mut sig) = best.ok_or(SolverError::Numerical)?;
    let col_sigma = clean(sig.pop().expect("two populations"));
    let row_sigma = clean(sig.pop().expect("two populations"));
    let h = entropy(&row_sigma) + entropy(&col_sigma);
    let regrets = game.regrets(&row_sigma, &col_sigma);
    let support = |s: &[f64]| (0..s.len()).filter(|&i| s[i] > super::SUPPORT_TOL).collect();
    Ok(BimatrixSolveResult {
        row_support: support(&row_sigma),
        col_support: support(&col_sigma),
        entropy: h,
        entropy_lower_bound: lb,
        gap: (lb + (m + n) as f64 / (std::f64::consts::E * k as f64) - h).max(0.0),
        relaxed: regrets.iter().any(|&r| r > CERT_TOL * game.span().max(f64::MIN_POSITIVE)),
        regrets,
        segments: k,
        row_sigma,
        col_sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_pennies_is_uniform() {
        let g = BimatrixGame::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]], vec![vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let r = max_entropy_bimatrix_ne(&g, 0.05).unwrap();
        assert!((r.row_sigma[0] - 0.5).abs() < 1e-9 && (r.col_sigma[0] - 0.5).abs() < 1e-9);
        assert!(!r.relaxed);
    }

    #[test]
    fn battle_of_the_sexes_mixes() {
        // mixed NE: row plays (2/3, 1/3), column (1/3, 2/3)
        let g = BimatrixGame::new(vec![vec![2.0, 0.0], vec![0.0, 1.0]], vec![vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let r = max_entropy_bimatrix_ne(&g, 0.05).unwrap();
        assert!((r.row_sigma[0] - 2.0 / 3.0).abs() < 1e-9, "{:?}", r.row_sigma);
        assert!((r.col_sigma[0] - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn non_square_dominance() {
        // the column player's second action is strictly dominant
        let g = BimatrixGame::new(vec![vec![1.0, 0.0, 2.0], vec![0.0, 3.0, 1.0]], vec![vec![0.0, 1.0, 0.5], vec![0.0, 1.0, 0.5]]).unwrap();
        let r = max_entropy_bimatrix_ne(&g, 0.05).unwrap();
        assert_eq!(r.col_support, vec![1]);
        assert_eq!(r.row_support, vec![1]);
        assert!(r.regrets[0] < 1e-12 && r.regrets[1] < 1e-12);
    }

    #[test]
    fn symmetric_game_matches_symmetric_solver_entropy_bound() {
        let m = vec![vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]];
        let t: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| m[j][i]).collect()).collect();
        let r = max_entropy_bimatrix_ne(&BimatrixGame::new(m, t).unwrap(), 0.05).unwrap();
        assert!((r.entropy - 2.0 * 3f64.ln()).abs() < 1e-9);
    }
}
