//! Normal-form analytics for symmetric two-player meta-games: regret, the
//! max-entropy symmetric Nash equilibrium, and the per-strategy statistics
//! computed on every bootstrap replicate.

mod bimatrix;
mod brgraph;
pub mod lp;
mod maxent;
mod piecewise;
mod stats;

pub use bimatrix::{max_entropy_bimatrix_ne, BimatrixGame, BimatrixSolveResult};
pub use brgraph::BrGraph;
pub use maxent::{max_entropy_ne, max_entropy_ne_segments, max_entropy_ne_with, Formulation, SolveResult, CERT_TOL, SUPPORT_TOL};
pub use piecewise::{piecewise_bound_check, segments_for, xlogx, PiecewiseEntropy};
pub use stats::{
    entropy, ne_nbs, ne_regret_score, regret, sum_regret, uniform_score, uniform_score_excluding_self,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default entropy optimality target.
pub const DEFAULT_EPS_ENT: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),
    #[error("invalid solver setting: {0}")]
    Setting(String),
    #[error("no equilibrium found; numerical trouble in the LP subproblems")]
    Numerical,
}

/// A symmetric two-player game: `payoffs[r][c]` is the row player's payoff
/// when it plays `r` against `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricGame {
    pub names: Vec<String>,
    pub payoffs: Vec<Vec<f64>>,
}

impl SymmetricGame {
    pub fn new(names: Vec<String>, payoffs: Vec<Vec<f64>>) -> Result<Self, SolverError> {
        let n = names.len();
        if n == 0 {
            return Err(SolverError::InvalidGame("no strategies".into()));
        }
        if payoffs.len() != n {
            return Err(SolverError::Dimension { expected: n, got: payoffs.len() });
        }
        for row in &payoffs {
            if row.len() != n {
                return Err(SolverError::Dimension { expected: n, got: row.len() });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(SolverError::InvalidGame("non-finite payoff".into()));
            }
        }
        Ok(SymmetricGame { names, payoffs })
    }

    /// A game with strategies named `s0, s1, ...`.
    pub fn from_matrix(payoffs: Vec<Vec<f64>>) -> Result<Self, SolverError> {
        let names = (0..payoffs.len()).map(|i| format!("s{i}")).collect();
        Self::new(names, payoffs)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    /// Payoff span `U = max u - min u`.
    pub fn span(&self) -> f64 {
        let (lo, hi) = self.payoffs.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        hi - lo
    }

    pub fn min_payoff(&self) -> f64 {
        self.payoffs.iter().flatten().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `u(π, σ)` for every pure `π`.
    pub fn payoffs_against(&self, sigma: &[f64]) -> Vec<f64> {
        self.payoffs.iter().map(|row| row.iter().zip(sigma).map(|(u, s)| u * s).sum()).collect()
    }

    /// `u(σ, π)` for every pure `π`: the mixture's payoff against each strategy.
    pub fn payoffs_of(&self, sigma: &[f64]) -> Vec<f64> {
        (0..self.n()).map(|c| (0..self.n()).map(|r| sigma[r] * self.payoffs[r][c]).sum()).collect()
    }

    /// `u(σ', σ)`.
    pub fn payoff(&self, sigma_prime: &[f64], sigma: &[f64]) -> f64 {
        self.payoffs_against(sigma).iter().zip(sigma_prime).map(|(u, s)| u * s).sum()
    }

    pub fn check_strategy(&self, sigma: &[f64]) -> Result<(), SolverError> {
        check_strategy(sigma, self.n())
    }
}

pub(crate) fn check_strategy(sigma: &[f64], n: usize) -> Result<(), SolverError> {
    if sigma.len() != n {
        return Err(SolverError::Dimension { expected: n, got: sigma.len() });
    }
    if sigma.iter().any(|p| !p.is_finite() || *p < -1e-12) {
        return Err(SolverError::InvalidStrategy("negative or non-finite probability".into()));
    }
    let total: f64 = sigma.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(SolverError::InvalidStrategy(format!("probabilities sum to {total}")));
    }
    Ok(())
}

/// The pure strategy `i` out of `n` as a mixed strategy.
pub fn pure(n: usize, i: usize) -> Vec<f64> {
    (0..n).map(|j| if j == i { 1.0 } else { 0.0 }).collect()
}
