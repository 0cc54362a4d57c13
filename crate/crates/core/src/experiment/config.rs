//! Experiment configuration files.

use super::ExperimentError;
use crate::game::{GameParams, InstanceConstraints};
use crate::metagame::{Statistic, DEFAULT_REPLICATES, DEFAULT_SIMS_PER_ENTRY};
use crate::policy::HEURISTICS;
use crate::search::{SearchConfig, SelfPlayConfig};
use crate::solver::DEFAULT_EPS_ENT;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

/// Placeholder replaced by the seed label in provider paths and arguments.
pub const SEED_PLACEHOLDER: &str = "{seed}";

/// One experiment: game, roster, simulation and analysis settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub game: GameParams,
    #[serde(default)]
    pub instances: InstancesConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub analyze: AnalyzeConfig,
    #[serde(default)]
    pub selfplay: SelfPlayConfig,
    #[serde(default)]
    pub play: PlayConfig,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default, rename = "strategy")]
    pub strategies: Vec<StrategySpec>,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstancesConfig {
    /// Load this database instead of enumerating one.
    pub db: Option<PathBuf>,
    /// Filter for enumeration; defaults apply when absent.
    pub constraints: Option<InstanceConstraints>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub n_sims_per_entry: u64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig { n_sims_per_entry: DEFAULT_SIMS_PER_ENTRY }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub n_replicates: u64,
    pub statistics: Vec<Statistic>,
    pub eps_ent: f64,
    /// Bins per histogram; 0 disables histogram output.
    pub histogram_bins: usize,
    pub per_replicate_csv: bool,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            n_replicates: DEFAULT_REPLICATES,
            statistics: Statistic::ALL.to_vec(),
            eps_ent: DEFAULT_EPS_ENT,
            histogram_bins: 50,
            per_replicate_csv: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlayConfig {
    pub a: Option<String>,
    pub b: Option<String>,
    pub n_games: usize,
}

/// A roster entry. Each seed label yields one policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    pub name: String,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<String>,
    #[serde(flatten)]
    pub provider: ProviderSpec,
}

fn default_seeds() -> Vec<String> {
    vec!["0".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProviderSpec {
    Heuristic {
        policy: String,
    },
    /// Policy file per seed; `{seed}` in the path is replaced by the label.
    Tabular {
        path: String,
    },
    External {
        program: String,
        #[serde(default)]
        args: Vec<String>,
        #[serde(default = "default_timeout_ms")]
        timeout_ms: u64,
    },
    /// Search at every decision, using another roster entry's policy of the
    /// same seed as prior and opponent model.
    Search {
        base: String,
        #[serde(default)]
        search: SearchConfig,
        #[serde(default)]
        value: ValueSpec,
    },
}

fn default_timeout_ms() -> u64 {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValueSpec {
    Zero,
    /// Mean of playouts by the base policy.
    Rollout { rollouts: usize },
    /// Perfect-information backward induction on the sampled world state.
    PerfectInfo,
    /// Tabular value file per seed, `{seed}` substituted.
    Tabular { path: String },
    /// The base provider's own value head; external providers only.
    Base,
}

impl Default for ValueSpec {
    fn default() -> Self {
        ValueSpec::Rollout { rollouts: 1 }
    }
}

#[derive(Serialize)]
struct SimulationIdentity<'a> {
    master_seed: u64,
    game: &'a GameParams,
    instances: &'a InstancesConfig,
    simulate: &'a SimulateConfig,
    strategies: &'a [StrategySpec],
}

impl ExperimentConfig {
    /// Reads a TOML file, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)?
        } else {
            Self::from_toml(&text)?
        };
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    /// Resolves a path from the file against the config's directory.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Hash of everything a payoff table depends on.
    pub fn simulation_hash(&self) -> String {
        let id = SimulationIdentity {
            master_seed: self.master_seed,
            game: &self.game,
            instances: &self.instances,
            simulate: &self.simulate,
            strategies: &self.strategies,
        };
        hex::encode(Sha256::digest(serde_json::to_vec(&id).expect("config serializes")))
    }

    /// Hash of the whole configuration.
    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }

    pub fn strategy(&self, name: &str) -> Option<&StrategySpec> {
        self.strategies.iter().find(|s| s.name == name)
    }

    /// Checks everything that can be checked without launching providers.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        self.game.validate().map_err(|e| ExperimentError::Config(e.to_string()))?;
        if let Some(db) = &self.instances.db {
            if !self.resolve(db).is_file() {
                return bad(format!("instance database {} does not exist", db.display()));
            }
        }
        if self.simulate.n_sims_per_entry == 0 {
            return bad("simulate.n_sims_per_entry must be at least 1".into());
        }
        if self.analyze.n_replicates == 0 {
            return bad("analyze.n_replicates must be at least 1".into());
        }
        if self.analyze.statistics.is_empty() {
            return bad("analyze.statistics is empty".into());
        }
        if !(self.analyze.eps_ent > 0.0 && self.analyze.eps_ent.is_finite()) {
            return bad("analyze.eps_ent must be positive".into());
        }
        self.selfplay.search.validate().map_err(|e| ExperimentError::Config(format!("selfplay.search: {e}")))?;
        if self.strategies.is_empty() {
            return bad("the roster is empty; add [[strategy]] entries".into());
        }
        let mut names = BTreeSet::new();
        for s in &self.strategies {
            if !names.insert(s.name.as_str()) {
                return bad(format!("strategy `{}` is listed twice", s.name));
            }
            if s.seeds.is_empty() {
                return bad(format!("strategy `{}` has no seeds", s.name));
            }
            if s.seeds.iter().collect::<BTreeSet<_>>().len() != s.seeds.len() {
                return bad(format!("strategy `{}` repeats a seed label", s.name));
            }
        }
        for s in &self.strategies {
            self.validate_provider(s)?;
        }
        Ok(())
    }

    fn validate_provider(&self, s: &StrategySpec) -> Result<(), ExperimentError> {
        let err = |m: String| Err(ExperimentError::Config(format!("strategy `{}`: {m}", s.name)));
        match &s.provider {
            ProviderSpec::Heuristic { policy } => {
                if !HEURISTICS.contains(&policy.as_str()) {
                    return err(format!("unknown heuristic `{policy}`; expected one of {HEURISTICS:?}"));
                }
            }
            ProviderSpec::Tabular { path } => self.check_files(s, path)?,
            ProviderSpec::External { program, .. } => {
                if program.is_empty() {
                    return err("empty program".into());
                }
            }
            ProviderSpec::Search { base, search, value } => {
                let Some(b) = self.strategy(base) else {
                    return err(format!("unknown base strategy `{base}`"));
                };
                if matches!(b.provider, ProviderSpec::Search { .. }) {
                    return err("the base of a search strategy cannot itself be a search strategy".into());
                }
                if !s.seeds.iter().all(|w| b.seeds.contains(w)) {
                    return err(format!("every seed must also be a seed of `{base}`"));
                }
                search.validate().map_err(|e| ExperimentError::Config(format!("strategy `{}`: {e}", s.name)))?;
                match value {
                    ValueSpec::Rollout { rollouts: 0 } => return err("rollouts must be at least 1".into()),
                    ValueSpec::Tabular { path } => self.check_files(s, path)?,
                    ValueSpec::Base if !matches!(b.provider, ProviderSpec::External { .. }) => {
                        return err("value `base` needs an external base provider".into())
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    fn check_files(&self, s: &StrategySpec, template: &str) -> Result<(), ExperimentError> {
        for w in &s.seeds {
            let p = self.resolve(Path::new(&substitute(template, w)));
            if !p.is_file() {
                return Err(ExperimentError::Config(format!("strategy `{}`: file {} does not exist", s.name, p.display())));
            }
        }
        Ok(())
    }
}

/// Replaces every `{seed}` with `label`.
pub fn substitute(template: &str, label: &str) -> String {
    template.replace(SEED_PLACEHOLDER, label)
}
