//! Empirical meta-games: payoff tables over seed policies, seat
//! symmetrization, seed resampling and the bootstrap over sampled games.

mod bootstrap;
mod resample;
mod table;
mod welford;

pub use bootstrap::{
    bootstrap_run, statistic_value, BootstrapConfig, BootstrapReport, Histogram, StatSummary, Statistic,
    DEFAULT_REPLICATES, SKETCH_ERROR,
};
pub use resample::{build_meta_game, resample_seeds, ResamplePlan, SymmetricEmpiricalGame, SymmetrizedTable};
pub use table::{
    estimate_entry, estimate_payoff_table, simulation_count, EntryResult, EntryStats, EstimateConfig, PayoffTable,
    Roster, TableHeader, DEFAULT_SIMS_PER_ENTRY,
};
pub use welford::Welford;

use crate::solver::SolverError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetagameError {
    #[error("incomplete payoff table: {missing} missing entries; first: {first}")]
    Incomplete { missing: usize, first: String },
    #[error("{0}")]
    Invalid(String),
    #[error("malformed payoff table: {0}")]
    Format(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Solver(#[from] SolverError),
}
