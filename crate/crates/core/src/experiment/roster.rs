//! Turns roster entries into playing agents.

use super::config::{substitute, ExperimentConfig, ProviderSpec, StrategySpec, ValueSpec};
use super::ExperimentError;
use crate::exact::PerfectInfoValue;
use crate::game::{History, InfoState, InstanceDb};
use crate::metagame::Roster;
use crate::policy::{heuristic, Agent, ExternalPolicy, MixtureAgent, Policy, PolicyAgent, PolicyError, ProcessSpec, TabularPolicy, TabularValue, ValueFn};
use crate::search::{RolloutValue, SearchAgent, ZeroValue};
use rand::RngCore;
use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, OnceLock};

/// An external provider launched on first use. A failed launch is reported
/// by every request, so only the entries that use it go missing.
pub struct LazyExternal {
    spec: ProcessSpec,
    conn: OnceLock<Result<ExternalPolicy, String>>,
}

impl LazyExternal {
    pub fn new(spec: ProcessSpec) -> Self {
        LazyExternal { spec, conn: OnceLock::new() }
    }

    fn get(&self) -> Result<&ExternalPolicy, PolicyError> {
        self.conn
            .get_or_init(|| ExternalPolicy::spawn(self.spec.clone()).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| PolicyError::Other(format!("provider `{}` unavailable: {e}", self.spec.name)))
    }
}

impl Policy for LazyExternal {
    fn name(&self) -> &str {
        &self.spec.name
    }

    fn probs(&self, s: &InfoState) -> Result<Vec<f64>, PolicyError> {
        self.get()?.probs(s)
    }
}

impl ValueFn for LazyExternal {
    fn values(&self, s: &InfoState, h: &History, rng: &mut dyn RngCore) -> Result<[f64; 2], PolicyError> {
        self.get()?.values(s, h, rng)
    }
}

/// A seed's policy, plus its value head when the provider has one.
struct Provided {
    policy: Arc<dyn Policy>,
    value: Option<Arc<dyn ValueFn>>,
}

fn provide(cfg: &ExperimentConfig, s: &StrategySpec, seed: &str) -> Result<Provided, ExperimentError> {
    let label = format!("{}/{seed}", s.name);
    match &s.provider {
        ProviderSpec::Heuristic { policy } => {
            let p = heuristic(policy).ok_or_else(|| ExperimentError::Config(format!("unknown heuristic `{policy}`")))?;
            Ok(Provided { policy: p, value: None })
        }
        ProviderSpec::Tabular { path } => {
            let p = cfg.resolve(Path::new(&substitute(path, seed)));
            let t = TabularPolicy::load(&p, label).map_err(|e| ExperimentError::Config(e.to_string()))?;
            if t.params != cfg.game {
                return Err(ExperimentError::Config(format!("{} was built for {}, the experiment plays {}", p.display(), t.params, cfg.game)));
            }
            Ok(Provided { policy: Arc::new(t), value: None })
        }
        ProviderSpec::External { program, args, timeout_ms } => {
            let spec = ProcessSpec {
                name: label,
                program: substitute(program, seed),
                args: args.iter().map(|a| substitute(a, seed)).collect(),
                timeout_ms: *timeout_ms,
            };
            let e = Arc::new(LazyExternal::new(spec));
            Ok(Provided { policy: e.clone(), value: Some(e) })
        }
        ProviderSpec::Search { .. } => Err(ExperimentError::Config(format!("`{}` is a search strategy and has no policy of its own", s.name))),
    }
}

/// The agent playing `seed` of strategy `s`.
pub fn seed_agent(cfg: &ExperimentConfig, s: &StrategySpec, seed: &str, db: &Arc<InstanceDb>) -> Result<Arc<dyn Agent>, ExperimentError> {
    let ProviderSpec::Search { base, search, value } = &s.provider else {
        return Ok(Arc::new(PolicyAgent::new(provide(cfg, s, seed)?.policy)));
    };
    let b = cfg.strategy(base).ok_or_else(|| ExperimentError::Config(format!("unknown base strategy `{base}`")))?;
    let p = provide(cfg, b, seed)?;
    let value: Arc<dyn ValueFn> = match value {
        ValueSpec::Zero => Arc::new(ZeroValue),
        ValueSpec::Rollout { rollouts } => Arc::new(RolloutValue::new(p.policy.clone(), *rollouts)),
        ValueSpec::PerfectInfo => Arc::new(PerfectInfoValue),
        ValueSpec::Tabular { path } => {
            let path = cfg.resolve(Path::new(&substitute(path, seed)));
            Arc::new(TabularValue::load(&path).map_err(|e| ExperimentError::Config(e.to_string()))?)
        }
        ValueSpec::Base => p.value.clone().ok_or_else(|| ExperimentError::Config(format!("`{base}` has no value head")))?,
    };
    Ok(Arc::new(SearchAgent {
        name: format!("{}/{seed}", s.name),
        policy: p.policy,
        value,
        cfg: search.clone(),
        db: db.clone(),
        params: cfg.game,
    }))
}

/// Every strategy's seed agents, in roster order.
pub fn build_roster(cfg: &ExperimentConfig, db: &Arc<InstanceDb>) -> Result<Roster, ExperimentError> {
    let mut agents = Vec::new();
    for s in &cfg.strategies {
        agents.push(s.seeds.iter().map(|w| seed_agent(cfg, s, w, db)).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(Roster {
        names: cfg.strategies.iter().map(|s| s.name.clone()).collect(),
        seeds: cfg.strategies.iter().map(|s| s.seeds.clone()).collect(),
        agents,
    })
}

/// Uniform mixture over a strategy's seeds, keyed by strategy name.
pub fn mixtures(roster: &Roster) -> HashMap<String, Arc<dyn Agent>> {
    roster
        .names
        .iter()
        .zip(&roster.agents)
        .map(|(n, a)| (n.clone(), Arc::new(MixtureAgent::new(n.clone(), a.clone())) as Arc<dyn Agent>))
        .collect()
}
