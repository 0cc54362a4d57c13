//! Self-play training with a tabular learner.
//!
//! Every decision of an episode is made by search guided by delayed copies
//! `(v', p')` of the learner's value and policy. Root visit frequencies become
//! policy targets and realised returns become value targets; the learner
//! keeps running means per infostate. The delayed copies are refreshed every
//! `delay_period` learner updates (one update per episode).

use super::{SearchConfig, SearchError, Searcher};
use crate::belief::posterior_with_fallback;
use crate::exact::sum_regret;
use crate::game::{GameError, GameParams, History, InfoState, InstanceDb, Items};
use crate::policy::{TabularPolicy, TabularValue};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Largest game, in [`tree_size_bound`] nodes, the tabular learner accepts.
pub const SELFPLAY_MAX_NODES: f64 = 1e6;

/// Upper bound on decision nodes summed over the database's distinct pools:
/// `Σ_pools Σ_{t<T} n^t` with `n` the pool's legal action count after an offer.
pub fn tree_size_bound(db: &InstanceDb, params: &GameParams) -> f64 {
    let pools: BTreeSet<Items> = db.instances.iter().map(|i| i.pool).collect();
    pools
        .iter()
        .map(|c| {
            let n = c.iter().map(|&x| x as f64 + 1.0).product::<f64>() + 1.0;
            (0..params.max_rounds).map(|t| n.powi(t as i32)).sum::<f64>()
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelfPlayConfig {
    pub episodes: usize,
    /// Learner updates between refreshes of the delayed providers.
    pub delay_period: usize,
    /// Episodes between SumRegret checkpoints; 0 records only the ends.
    pub checkpoint_every: usize,
    pub search: SearchConfig,
}

impl Default for SelfPlayConfig {
    fn default() -> Self {
        SelfPlayConfig { episodes: 2000, delay_period: 1000, checkpoint_every: 500, search: SearchConfig::default() }
    }
}

/// Running means of value and policy targets per infostate key.
#[derive(Debug, Clone)]
pub struct TabularLearner {
    pub params: GameParams,
    policy: BTreeMap<String, (Vec<f64>, f64)>,
    value: BTreeMap<String, ([f64; 2], f64)>,
    pub updates: usize,
}

impl TabularLearner {
    pub fn new(params: GameParams) -> Self {
        TabularLearner { params, policy: BTreeMap::new(), value: BTreeMap::new(), updates: 0 }
    }

    pub fn update(&mut self, dv: &[(InfoState, [f64; 2])], dp: &[(InfoState, Vec<f64>)]) {
        for (s, r) in dv {
            let e = self.value.entry(s.key()).or_insert(([0.0; 2], 0.0));
            e.0[0] += r[0];
            e.0[1] += r[1];
            e.1 += 1.0;
        }
        for (s, pi) in dp {
            let e = self.policy.entry(s.key()).or_insert_with(|| (vec![0.0; pi.len()], 0.0));
            for (acc, x) in e.0.iter_mut().zip(pi) {
                *acc += x;
            }
            e.1 += 1.0;
        }
        self.updates += 1;
    }

    pub fn policy(&self, name: &str) -> TabularPolicy {
        let mut t = TabularPolicy::new(name, self.params);
        for (k, (sum, n)) in &self.policy {
            let mean: Vec<f64> = sum.iter().map(|x| x / n).collect();
            let z: f64 = mean.iter().sum();
            t.table.insert(k.clone(), mean.into_iter().map(|x| x / z).collect());
        }
        t
    }

    pub fn value(&self) -> TabularValue {
        let mut t = TabularValue::new(self.params);
        for (k, (sum, n)) in &self.value {
            t.table.insert(k.clone(), [sum[0] / n, sum[1] / n]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub episode: usize,
    pub sum_regret: f64,
}

#[derive(Debug, Clone)]
pub struct SelfPlayResult {
    pub policy: TabularPolicy,
    pub value: TabularValue,
    pub checkpoints: Vec<Checkpoint>,
}

/// Trains tabular `(v, p)` by search-guided self-play on instances from `db`.
pub fn self_play_train(
    db: &InstanceDb,
    params: &GameParams,
    cfg: &SelfPlayConfig,
    name: &str,
    rng: &mut dyn RngCore,
) -> Result<SelfPlayResult, SearchError> {
    let size = tree_size_bound(db, params);
    if size > SELFPLAY_MAX_NODES {
        return Err(GameError::TooLarge(format!(
            "{params} on this database has up to {size:.3e} decision nodes; the tabular learner accepts at most {SELFPLAY_MAX_NODES:e}"
        ))
        .into());
    }
    if cfg.delay_period == 0 {
        return Err(SearchError::Config("delay_period must be positive".into()));
    }
    cfg.search.validate().map_err(SearchError::Config)?;
    let mut learner = TabularLearner::new(*params);
    let mut p_target = learner.policy(name);
    let mut v_target = learner.value();
    let checkpoint = |learner: &TabularLearner, episode: usize| -> Result<Checkpoint, SearchError> {
        let p = learner.policy(name);
        let sum_regret = sum_regret(db, params, &p, &p).map_err(|source| SearchError::Provider { prefix: vec![], source })?;
        Ok(Checkpoint { episode, sum_regret })
    };
    let mut checkpoints = vec![checkpoint(&learner, 0)?];
    for episode in 1..=cfg.episodes {
        let inst = *db.sample(rng);
        let mut h = History::new(inst, *params)?;
        let mut dp = Vec::new();
        let mut states = Vec::new();
        while let Some(player) = h.current_player() {
            let s = h.info_state(player);
            let belief = posterior_with_fallback(&s, &p_target, db)?;
            let searcher = Searcher { params: *params, policy: &p_target, value: &v_target, cfg: &cfg.search };
            let out = searcher.run(&s, &belief, rng)?;
            dp.push((s.clone(), out.visit_policy));
            states.push(s);
            h.step(out.action, rng)?;
        }
        let r = h.returns()?.payoffs;
        let dv: Vec<(InfoState, [f64; 2])> = states.into_iter().map(|s| (s, r)).collect();
        learner.update(&dv, &dp);
        if learner.updates % cfg.delay_period == 0 {
            p_target = learner.policy(name);
            v_target = learner.value();
        }
        let at_checkpoint = cfg.checkpoint_every > 0 && episode % cfg.checkpoint_every == 0;
        if at_checkpoint || episode == cfg.episodes {
            if checkpoints.last().map(|c| c.episode) != Some(episode) {
                checkpoints.push(checkpoint(&learner, episode)?);
            }
        }
    }
    Ok(SelfPlayResult { policy: learner.policy(name), value: learner.value(), checkpoints })
}
