//! Max-entropy symmetric Nash equilibrium.
//!
//! Entropy is approximated by the chord interpolant of `x ln x` with
//! `K = ⌊n/(e·eps)⌋ + 1` segments, so the best interpolated solution is
//! within `eps` of the true maximum. The binary support indicators are
//! handled by enumerating supports in decreasing size; each support gives an
//! LP with equal payoffs on the support and weakly lower payoffs off it.
//! A support of size `s` cannot beat an incumbent whose entropy lower bound
//! is at least `ln s`, which ends the enumeration early.
//!
//! Sign chain: `f = x ln x ≤ l`, so minimising `Σ l(σ_π)` maximises the
//! lower bound `-Σ l(σ_π)` on the entropy `-Σ f(σ_π)`.

use super::lp::{Lp, LpOutcome, RowKind};
use super::piecewise::{segments_for, xlogx, PiecewiseEntropy};
use super::stats::{entropy, regret};
use super::{SolverError, SymmetricGame};
use serde::{Deserialize, Serialize};

/// Probabilities at or below this count as off-support.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Equilibrium certificate tolerance, relative to the payoff span.
pub const CERT_TOL: f64 = 1e-6;

/// How the interpolated entropy enters the LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formulation {
    /// One bounded variable per segment, `σ = Σ_k λ_k` with `0 ≤ λ_k ≤ 1/K`.
    Segment,
    /// The literal epigraph: `γ_π ≥ l_k(σ_π)` for every segment.
    Epigraph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub sigma: Vec<f64>,
    /// Entropy of `sigma` in nats.
    pub entropy: f64,
    /// Certified lower bound from the interpolated objective.
    pub entropy_lower_bound: f64,
    pub support: Vec<usize>,
    /// `u_π = u(π, σ*)` for every strategy.
    pub payoffs: Vec<f64>,
    pub u_star: f64,
    /// Upper bound on the entropy shortfall against the true maximum.
    pub gap: f64,
    /// `b_π`: true off the support.
    pub off_support: Vec<bool>,
    pub segments: usize,
    /// Set when the equilibrium certificate only holds at a looser tolerance.
    pub relaxed: bool,
}

/// An ε-max-entropy symmetric Nash equilibrium.
pub fn max_entropy_ne(game: &SymmetricGame, eps_ent: f64) -> Result<SolveResult, SolverError> {
    max_entropy_ne_with(game, eps_ent, Formulation::Segment)
}

pub fn max_entropy_ne_with(game: &SymmetricGame, eps_ent: f64, formulation: Formulation) -> Result<SolveResult, SolverError> {
    if !(eps_ent > 0.0 && eps_ent.is_finite()) {
        return Err(SolverError::Setting(format!("eps_ent must be positive, got {eps_ent}")));
    }
    max_entropy_ne_segments(game, segments_for(game.n(), eps_ent), formulation)
}

/// As [`max_entropy_ne_with`], with the segment count given directly.
pub fn max_entropy_ne_segments(game: &SymmetricGame, k: usize, formulation: Formulation) -> Result<SolveResult, SolverError> {
    if k == 0 {
        return Err(SolverError::Setting("need at least one segment".into()));
    }
    let pw = PiecewiseEntropy::new(k);
    let pops = [Population { payoff: &game.payoffs, opp: 0 }];
    let active = undominated(game);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for size in (1..=active.len()).rev() {
        if best.as_ref().is_some_and(|b| (size as f64).ln() <= b.0) {
            break;
        }
        for support in combinations(&active, size) {
            let supports = [support];
            if !feasible(&pops, &supports) {
                continue;
            }
            let Some((lb, sig)) = entropy_lp(&pops, &supports, &pw, formulation) else {
                continue;
            };
            if best.as_ref().is_none_or(|b| lb > b.0 + 1e-12) {
                best = Some((lb, sig.into_iter().next().expect("one population")));
            }
        }
    }
    let (lb, sigma) = best.ok_or(SolverError::Numerical)?;
    Ok(finish(game, sigma, lb, k))
}

fn finish(game: &SymmetricGame, sigma: Vec<f64>, lb: f64, k: usize) -> SolveResult {
    let sigma = clean(sigma);
    let payoffs = game.payoffs_against(&sigma);
    let u_star = payoffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let support: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > SUPPORT_TOL).collect();
    let h = entropy(&sigma);
    let n = game.n() as f64;
    let r = regret(&sigma, &sigma, game).unwrap_or(f64::INFINITY);
    SolveResult {
        off_support: sigma.iter().map(|&p| p <= SUPPORT_TOL).collect(),
        entropy: h,
        entropy_lower_bound: lb,
        gap: (lb + n / (std::f64::consts::E * k as f64) - h).max(0.0),
        support,
        payoffs,
        u_star,
        segments: k,
        relaxed: r > CERT_TOL * game.span().max(f64::MIN_POSITIVE),
        sigma,
    }
}

/// Zeroes round-off negatives and dust, then renormalises.
pub(crate) fn clean(sigma: Vec<f64>) -> Vec<f64> {
    let v: Vec<f64> = sigma.into_iter().map(|p| if p <= SUPPORT_TOL { 0.0 } else { p }).collect();
    let z: f64 = v.iter().sum();
    v.into_iter().map(|p| p / z).collect()
}

/// Strategies surviving iterated elimination of strictly dominated pure
/// strategies. Dominated strategies are never best responses, so no
/// equilibrium plays them.
fn undominated(game: &SymmetricGame) -> Vec<usize> {
    let mut alive: Vec<usize> = (0..game.n()).collect();
    loop {
        let u = &game.payoffs;
        let dominated = alive.iter().position(|&i| {
            alive.iter().any(|&j| j != i && alive.iter().all(|&c| u[j][c] > u[i][c]))
        });
        match dominated {
            Some(p) => {
                alive.remove(p);
            }
            None => return alive,
        }
    }
}

/// All `size`-subsets of `items`, lexicographic in position.
pub(crate) fn combinations(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    let n = items.len();
    if size == 0 || size > n {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let Some(i) = (0..size).rev().find(|&i| idx[i] != i + n - size) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// One population of a two-player game: its payoff matrix against the
/// strategies of population `opp` (itself for symmetric games).
pub(crate) struct Population<'a> {
    pub payoff: &'a [Vec<f64>],
    pub opp: usize,
}

impl Population<'_> {
    fn n(&self) -> usize {
        self.payoff.len()
    }

    fn min_max(&self) -> (f64, f64) {
        self.payoff.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    }
}

/// Builds the equilibrium rows over per-strategy probability expressions.
/// `cols[q][s]` lists `(variable, weight)` terms summing to `σ_q(support_q[s])`;
/// `y[p]` is the shifted value variable `u*_p - min u_p`.
fn equilibrium_rows(lp: &mut Lp, pops: &[Population], supports: &[Vec<usize>], cols: &[Vec<Vec<(usize, f64)>>], y: &[usize]) {
    let width = lp.num_vars();
    for (p, pop) in pops.iter().enumerate() {
        let (lo, _) = pop.min_max();
        let q = pop.opp;
        for i in 0..pop.n() {
            let mut row = vec![0.0; width];
            for (s, &strategy) in supports[q].iter().enumerate() {
                for &(v, w) in &cols[q][s] {
                    row[v] += pop.payoff[i][strategy] * w;
                }
            }
            row[y[p]] = -1.0;
            let kind = if supports[p].contains(&i) { RowKind::Eq } else { RowKind::Le };
            // u_i - u* (= | ≤) 0 with u* = lo + y, and u_i's constant part 0
            lp.add_row(row, kind, lo);
        }
    }
    for (q, support) in supports.iter().enumerate() {
        let mut row = vec![0.0; width];
        for s in 0..support.len() {
            for &(v, w) in &cols[q][s] {
                row[v] += w;
            }
        }
        lp.add_row(row, RowKind::Eq, 1.0);
    }
}

fn value_bounds(pops: &[Population]) -> Vec<f64> {
    pops.iter().map(|p| {
        let (lo, hi) = p.min_max();
        hi - lo
    }).collect()
}

/// Whether some profile with these supports (zeros allowed) is an equilibrium.
pub(crate) fn feasible(pops: &[Population], supports: &[Vec<usize>]) -> bool {
    let n_sigma: usize = supports.iter().map(|s| s.len()).sum();
    let mut lp = Lp::new(n_sigma + pops.len());
    let mut cols = Vec::new();
    let mut v = 0;
    for s in supports {
        cols.push(s.iter().map(|_| {
            v += 1;
            vec![(v - 1, 1.0)]
        }).collect::<Vec<_>>());
    }
    let y: Vec<usize> = (0..pops.len()).map(|p| n_sigma + p).collect();
    for (p, span) in value_bounds(pops).into_iter().enumerate() {
        lp.upper[y[p]] = span;
    }
    for j in 0..n_sigma {
        lp.upper[j] = 1.0;
    }
    equilibrium_rows(&mut lp, pops, supports, &cols, &y);
    matches!(lp.solve(), LpOutcome::Optimal { .. })
}

/// Maximises the interpolated entropy over equilibria with these supports.
/// Returns the entropy lower bound and per-population strategies.
pub(crate) fn entropy_lp(
    pops: &[Population],
    supports: &[Vec<usize>],
    pw: &PiecewiseEntropy,
    formulation: Formulation,
) -> Option<(f64, Vec<Vec<f64>>)> {
    let k = pw.k;
    let n_sup: usize = supports.iter().map(|s| s.len()).sum();
    let per = match formulation {
        Formulation::Segment => k,
        Formulation::Epigraph => 2,
    };
    let n_vars = n_sup * per + pops.len();
    let mut lp = Lp::new(n_vars);
    let mut cols = Vec::new();
    let mut base = 0;
    for s in supports {
        let mut c = Vec::new();
        for _ in s {
            match formulation {
                Formulation::Segment => {
                    c.push((0..k).map(|j| (base + j, 1.0)).collect::<Vec<_>>());
                    for j in 0..k {
                        lp.upper[base + j] = 1.0 / k as f64;
                        lp.cost[base + j] = pw.slope(j);
                    }
                }
                Formulation::Epigraph => {
                    // σ then γ' = γ + 1 ≥ 0, since l ≥ -1/e
                    c.push(vec![(base, 1.0)]);
                    lp.upper[base] = 1.0;
                    lp.cost[base + 1] = 1.0;
                }
            }
            base += per;
        }
        cols.push(c);
    }
    let y: Vec<usize> = (0..pops.len()).map(|p| n_sup * per + p).collect();
    for (p, span) in value_bounds(pops).into_iter().enumerate() {
        lp.upper[y[p]] = span;
    }
    equilibrium_rows(&mut lp, pops, supports, &cols, &y);
    if formulation == Formulation::Epigraph {
        for b in 0..n_sup {
            let (sig, gam) = (b * 2, b * 2 + 1);
            for j in 0..k {
                // slope σ - γ' ≤ -(f(j/K) - slope·j/K) - 1
                let mut row = vec![0.0; n_vars];
                row[sig] = pw.slope(j);
                row[gam] = -1.0;
                let intercept = xlogx(pw.breakpoint(j)) - pw.slope(j) * pw.breakpoint(j);
                lp.add_row(row, RowKind::Le, -intercept - 1.0);
            }
        }
    }
    let LpOutcome::Optimal { x, objective } = lp.solve() else {
        return None;
    };
    let objective = match formulation {
        Formulation::Segment => objective,
        Formulation::Epigraph => objective - n_sup as f64,
    };
    let mut out = Vec::new();
    for (q, s) in supports.iter().enumerate() {
        let mut sigma = vec![0.0; pops[q].n()];
        for (i, &strategy) in s.iter().enumerate() {
            sigma[strategy] = cols[q][i].iter().map(|&(v, w)| x[v] * w).sum();
        }
        out.push(sigma);
    }
    Some((-objective, out))
}
