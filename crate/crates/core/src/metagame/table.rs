//! Monte Carlo payoff tables over every ordered pair of seed policies.

use super::welford::Welford;
use super::MetagameError;
use crate::game::{GameParams, InstanceDb};
use crate::policy::{play_episode, Agent};
use crate::rng::stream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Stream tag for table entries.
pub(crate) const TAG_TABLE: u64 = 1;

/// Default number of simulated games per entry.
pub const DEFAULT_SIMS_PER_ENTRY: u64 = 20_000;

static SIMULATIONS: AtomicU64 = AtomicU64::new(0);

/// Games simulated by this process so far, across all tables.
pub fn simulation_count() -> u64 {
    SIMULATIONS.load(Ordering::Relaxed)
}

/// Strategies, their seeds and the agents that play them.
#[derive(Clone)]
pub struct Roster {
    pub names: Vec<String>,
    /// Seed labels per strategy.
    pub seeds: Vec<Vec<String>>,
    /// `agents[m][ω]` plays seed `ω` of strategy `m`.
    pub agents: Vec<Vec<Arc<dyn Agent>>>,
}

impl Roster {
    pub fn validate(&self) -> Result<(), MetagameError> {
        if self.names.is_empty() {
            return Err(MetagameError::Invalid("empty roster".into()));
        }
        if self.seeds.len() != self.names.len() || self.agents.len() != self.names.len() {
            return Err(MetagameError::Invalid("roster names, seeds and agents differ in length".into()));
        }
        for (m, (s, a)) in self.seeds.iter().zip(&self.agents).enumerate() {
            if s.is_empty() || s.len() != a.len() {
                return Err(MetagameError::Invalid(format!("strategy {} needs one agent per seed", self.names[m])));
            }
        }
        Ok(())
    }
}

/// Everything an entry's value depends on besides the agents themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableHeader {
    pub strategies: Vec<String>,
    pub seeds: Vec<Vec<String>>,
    pub params: GameParams,
    pub db_hash: String,
    pub n_sims: u64,
    pub master_seed: u64,
    /// Hash of the experiment configuration that produced the table.
    pub config_hash: Option<String>,
}

impl TableHeader {
    /// Number of (strategy, seed) slots.
    pub fn slots(&self) -> usize {
        self.seeds.iter().map(Vec::len).sum()
    }

    /// First slot of each strategy.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.seeds.len());
        let mut acc = 0;
        for s in &self.seeds {
            out.push(acc);
            acc += s.len();
        }
        out
    }

    /// `(strategy, seed)` of every slot.
    pub fn slot_labels(&self) -> Vec<(usize, usize)> {
        self.seeds.iter().enumerate().flat_map(|(m, s)| (0..s.len()).map(move |w| (m, w))).collect()
    }
}

/// Summary of one ordered pair's simulations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryStats {
    pub n: u64,
    pub mean: [f64; 2],
    /// Unbiased sample variances of the two payoffs.
    pub var: [f64; 2],
}

/// `Err` records why an entry could not be estimated.
pub type EntryResult = Result<EntryStats, String>;

/// Estimated payoffs for every ordered pair of slots. Entry `a * slots + b`
/// has slot `a` in the first seat.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTable {
    pub header: TableHeader,
    pub entries: Vec<EntryResult>,
}

#[derive(Serialize, Deserialize)]
struct Columns {
    header: TableHeader,
    p1: Vec<usize>,
    p2: Vec<usize>,
    n: Vec<u64>,
    mean_p1: Vec<f64>,
    mean_p2: Vec<f64>,
    var_p1: Vec<f64>,
    var_p2: Vec<f64>,
    error: Vec<Option<String>>,
}

impl PayoffTable {
    pub fn slots(&self) -> usize {
        self.header.slots()
    }

    pub fn entry(&self, a: usize, b: usize) -> &EntryResult {
        &self.entries[a * self.slots() + b]
    }

    /// Slot pairs whose estimation failed, with the reason.
    pub fn missing(&self) -> Vec<(usize, usize, &str)> {
        let s = self.slots();
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.as_ref().err().map(|msg| (i / s, i % s, msg.as_str())))
            .collect()
    }

    /// Refuses tables with missing entries or too few simulations.
    pub fn check_complete(&self) -> Result<(), MetagameError> {
        let s = self.slots();
        if self.entries.len() != s * s {
            return Err(MetagameError::Invalid(format!("table has {} entries, expected {}", self.entries.len(), s * s)));
        }
        let missing = self.missing();
        if let Some(&(a, b, msg)) = missing.first() {
            return Err(MetagameError::Incomplete {
                missing: missing.len(),
                first: format!("{} vs {}: {msg}", self.slot_name(a), self.slot_name(b)),
            });
        }
        if let Some(e) = self.entries.iter().flatten().find(|e| e.n < self.header.n_sims) {
            return Err(MetagameError::Incomplete { missing: 0, first: format!("entry with {} of {} simulations", e.n, self.header.n_sims) });
        }
        Ok(())
    }

    /// `strategy/seed` label of a slot.
    pub fn slot_name(&self, slot: usize) -> String {
        let (m, w) = self.header.slot_labels()[slot];
        format!("{}/{}", self.header.strategies[m], self.header.seeds[m][w])
    }

    pub fn to_json(&self) -> String {
        let s = self.slots();
        let mut c = Columns {
            header: self.header.clone(),
            p1: Vec::new(),
            p2: Vec::new(),
            n: Vec::new(),
            mean_p1: Vec::new(),
            mean_p2: Vec::new(),
            var_p1: Vec::new(),
            var_p2: Vec::new(),
            error: Vec::new(),
        };
        for (i, e) in self.entries.iter().enumerate() {
            c.p1.push(i / s);
            c.p2.push(i % s);
            let (st, err) = match e {
                Ok(st) => (st.clone(), None),
                Err(msg) => (EntryStats { n: 0, mean: [0.0; 2], var: [0.0; 2] }, Some(msg.clone())),
            };
            c.n.push(st.n);
            c.mean_p1.push(st.mean[0]);
            c.mean_p2.push(st.mean[1]);
            c.var_p1.push(st.var[0]);
            c.var_p2.push(st.var[1]);
            c.error.push(err);
        }
        let mut out = serde_json::to_string(&c).expect("table serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, MetagameError> {
        let c: Columns = serde_json::from_str(text).map_err(|e| MetagameError::Format(e.to_string()))?;
        let s = c.header.slots();
        let len = c.p1.len();
        let lens = [c.p2.len(), c.n.len(), c.mean_p1.len(), c.mean_p2.len(), c.var_p1.len(), c.var_p2.len(), c.error.len()];
        if len != s * s || lens.iter().any(|&l| l != len) {
            return Err(MetagameError::Format(format!("columns must all have {} rows", s * s)));
        }
        let mut entries = vec![Err("not estimated".to_string()); s * s];
        for i in 0..len {
            let (a, b) = (c.p1[i], c.p2[i]);
            if a >= s || b >= s {
                return Err(MetagameError::Format(format!("row {i} names slot outside the roster")));
            }
            entries[a * s + b] = match &c.error[i] {
                Some(msg) => Err(msg.clone()),
                None => Ok(EntryStats { n: c.n[i], mean: [c.mean_p1[i], c.mean_p2[i]], var: [c.var_p1[i], c.var_p2[i]] }),
            };
        }
        Ok(PayoffTable { header: c.header, entries })
    }

    pub fn load(path: &Path) -> Result<Self, MetagameError> {
        let text = std::fs::read_to_string(path).map_err(|e| MetagameError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// SHA-256 of the serialized table.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

/// Settings for [`estimate_payoff_table`].
#[derive(Debug, Clone)]
pub struct EstimateConfig {
    pub n_sims: u64,
    pub master_seed: u64,
    pub config_hash: Option<String>,
}

/// Simulates one ordered pair. The stream depends only on the master seed
/// and the slot indices.
pub fn estimate_entry(
    p1: &dyn Agent,
    p2: &dyn Agent,
    db: &InstanceDb,
    params: GameParams,
    n_sims: u64,
    master_seed: u64,
    slots: (usize, usize),
) -> EntryResult {
    let mut rng = stream(master_seed, &[TAG_TABLE, slots.0 as u64, slots.1 as u64]);
    let mut acc = [Welford::default(), Welford::default()];
    for _ in 0..n_sims {
        let inst = *db.sample(&mut rng);
        SIMULATIONS.fetch_add(1, Ordering::Relaxed);
        let t = play_episode(inst, params, p1, p2, &mut rng).map_err(|e| e.to_string())?;
        acc[0].push(t.outcome.payoffs[0]);
        acc[1].push(t.outcome.payoffs[1]);
    }
    Ok(EntryStats { n: n_sims, mean: [acc[0].mean, acc[1].mean], var: [acc[0].sample_var(), acc[1].sample_var()] })
}

/// Estimates every ordered slot pair. Entries in `done` are reused as is;
/// `on_entry` sees each newly finished entry, from whichever worker ran it.
pub fn estimate_payoff_table(
    roster: &Roster,
    db: &InstanceDb,
    params: GameParams,
    cfg: &EstimateConfig,
    done: &HashMap<(usize, usize), EntryStats>,
    on_entry: &(dyn Fn(usize, usize, &EntryResult) + Sync),
) -> Result<PayoffTable, MetagameError> {
    roster.validate()?;
    if cfg.n_sims == 0 {
        return Err(MetagameError::Invalid("n_sims must be at least 1".into()));
    }
    if db.is_empty() {
        return Err(MetagameError::Invalid("empty instance database".into()));
    }
    let header = TableHeader {
        strategies: roster.names.clone(),
        seeds: roster.seeds.clone(),
        params,
        db_hash: db.content_hash(),
        n_sims: cfg.n_sims,
        master_seed: cfg.master_seed,
        config_hash: cfg.config_hash.clone(),
    };
    let agents: Vec<&Arc<dyn Agent>> = roster.agents.iter().flatten().collect();
    let s = agents.len();
    let entries: Vec<EntryResult> = (0..s * s)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (i / s, i % s);
            if let Some(e) = done.get(&(a, b)) {
                return Ok(e.clone());
            }
            let r = estimate_entry(agents[a].as_ref(), agents[b].as_ref(), db, params, cfg.n_sims, cfg.master_seed, (a, b));
            on_entry(a, b, &r);
            r
        })
        .collect();
    Ok(PayoffTable { header, entries })
}
