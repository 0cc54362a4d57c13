//! Experiment configuration, orchestration and report emission for the
//! command-line front end.

mod commands;
mod config;
mod report;
mod roster;

pub use commands::{
    analyze, gen_instances, load_db, play, selfplay_train, simulate, DbSummary, PlayReport, RunOptions, BR_DOT,
    CHECKPOINT_FILE, CURVE_CSV, DB_FILE, DB_SUMMARY_FILE, HISTOGRAM_DIR, POLICY_FILE, REPLICATES_CSV, REPORT_CSV,
    REPORT_JSON, REPORT_TABLE_CSV, TABLE_FILE, VALUE_FILE,
};
pub use config::{
    substitute, AnalyzeConfig, ExperimentConfig, InstancesConfig, PlayConfig, ProviderSpec, SimulateConfig,
    StrategySpec, ValueSpec, SEED_PLACEHOLDER,
};
pub use report::{format_pm, histogram_csvs, replicates_csv, summary_csv, table_csv};
pub use roster::{build_roster, mixtures, seed_agent, LazyExternal};

use thiserror::Error;

/// Failures grouped by the exit code the command line reports for them.
#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("incomplete inputs: {0}")]
    Incomplete(String),
    #[error("provider failure: {0}")]
    Provider(String),
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Incomplete(_) => 3,
            ExperimentError::Provider(_) => 4,
        }
    }
}
