//! Seed resampling and the symmetric empirical meta-game it induces.

use super::table::PayoffTable;
use super::MetagameError;
use crate::rng::stream;
use crate::solver::SymmetricGame;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

/// Stream tag for bootstrap replicates.
pub(crate) const TAG_RESAMPLE: u64 = 2;

/// Seeds drawn with replacement for each strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResamplePlan {
    pub replicate: u64,
    pub master_seed: u64,
    /// `multisets[m]` lists seed indices of strategy `m`, repeats allowed.
    pub multisets: Vec<Vec<usize>>,
}

impl ResamplePlan {
    /// The plan for `replicate`, reproducible from the master seed alone.
    pub fn draw(seed_counts: &[usize], master_seed: u64, replicate: u64) -> Result<Self, MetagameError> {
        let mut rng = stream(master_seed, &[TAG_RESAMPLE, replicate]);
        Ok(ResamplePlan { replicate, master_seed, multisets: resample_seeds(seed_counts, &mut rng)? })
    }

    /// Every seed once: the full-sample meta-game.
    pub fn identity(seed_counts: &[usize]) -> Self {
        ResamplePlan { replicate: 0, master_seed: 0, multisets: seed_counts.iter().map(|&n| (0..n).collect()).collect() }
    }

    /// Mixture weight of every slot, laid out like the table's slots.
    pub fn slot_weights(&self, seed_counts: &[usize]) -> Vec<f64> {
        let mut w = Vec::with_capacity(seed_counts.iter().sum());
        for (m, &n) in seed_counts.iter().enumerate() {
            let mut c = vec![0.0; n];
            for &s in &self.multisets[m] {
                c[s] += 1.0;
            }
            let size = self.multisets[m].len() as f64;
            w.extend(c.into_iter().map(|x| x / size));
        }
        w
    }
}

/// Draws `|Ω^m|` seeds uniformly with replacement for every strategy.
pub fn resample_seeds(seed_counts: &[usize], rng: &mut dyn RngCore) -> Result<Vec<Vec<usize>>, MetagameError> {
    if let Some(m) = seed_counts.iter().position(|&n| n == 0) {
        return Err(MetagameError::Invalid(format!("strategy {m} has no seeds")));
    }
    Ok(seed_counts.iter().map(|&n| (0..n).map(|_| rng.random_range(0..n)).collect()).collect())
}

/// A sampled meta-game with the plan that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricEmpiricalGame {
    pub game: SymmetricGame,
    pub plan: ResamplePlan,
}

/// Seat-averaged slot payoffs `S[a][b] = ½(u₁(a, b) + u₂(b, a))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizedTable {
    pub names: Vec<String>,
    pub seed_counts: Vec<usize>,
    pub offsets: Vec<usize>,
    pub s: Vec<Vec<f64>>,
}

impl SymmetrizedTable {
    pub fn new(table: &PayoffTable) -> Result<Self, MetagameError> {
        table.check_complete()?;
        let n = table.slots();
        let mean = |a: usize, b: usize| table.entry(a, b).as_ref().expect("table is complete").mean;
        let s = (0..n).map(|a| (0..n).map(|b| 0.5 * (mean(a, b)[0] + mean(b, a)[1])).collect()).collect();
        Ok(SymmetrizedTable {
            names: table.header.strategies.clone(),
            seed_counts: table.header.seeds.iter().map(Vec::len).collect(),
            offsets: table.header.offsets(),
            s,
        })
    }

    /// Smallest and largest seat-averaged slot payoff; every meta-game
    /// payoff lies between them.
    pub fn range(&self) -> (f64, f64) {
        self.s.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    }

    /// Payoff matrix of the uniform seed mixtures selected by `plan`.
    pub fn game(&self, plan: &ResamplePlan) -> Result<SymmetricGame, MetagameError> {
        let m = self.names.len();
        if plan.multisets.len() != m {
            return Err(MetagameError::Invalid(format!("plan covers {} strategies, table {m}", plan.multisets.len())));
        }
        for (k, ms) in plan.multisets.iter().enumerate() {
            if ms.is_empty() || ms.iter().any(|&w| w >= self.seed_counts[k]) {
                return Err(MetagameError::Invalid(format!("plan for {} names unknown seeds", self.names[k])));
            }
        }
        let w = plan.slot_weights(&self.seed_counts);
        let mut u = vec![vec![0.0; m]; m];
        for (r, row) in u.iter_mut().enumerate() {
            let rs = self.offsets[r]..self.offsets[r] + self.seed_counts[r];
            for (c, cell) in row.iter_mut().enumerate() {
                let cs = self.offsets[c]..self.offsets[c] + self.seed_counts[c];
                let mut acc = 0.0;
                for a in rs.clone() {
                    if w[a] == 0.0 {
                        continue;
                    }
                    let inner: f64 = cs.clone().map(|b| w[b] * self.s[a][b]).sum();
                    acc += w[a] * inner;
                }
                *cell = acc;
            }
        }
        SymmetricGame::new(self.names.clone(), u).map_err(MetagameError::Solver)
    }
}

/// The symmetric empirical meta-game for `plan`, computed from memoized
/// entries without further simulation.
pub fn build_meta_game(table: &PayoffTable, plan: &ResamplePlan) -> Result<SymmetricEmpiricalGame, MetagameError> {
    let game = SymmetrizedTable::new(table)?.game(plan)?;
    Ok(SymmetricEmpiricalGame { game, plan: plan.clone() })
}
