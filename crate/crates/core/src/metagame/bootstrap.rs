//! Bootstrap over seed resamples: every replicate builds a meta-game from
//! memoized entries, solves it and feeds per-strategy statistics into
//! streaming summaries.

use super::resample::{ResamplePlan, SymmetrizedTable};
use super::table::PayoffTable;
use super::welford::Welford;
use super::MetagameError;
use crate::solver::{max_entropy_ne, ne_nbs, ne_regret_score, uniform_score, BrGraph, SymmetricGame, DEFAULT_EPS_ENT};
use quantiles::ckms::CKMS;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Rank error of the percentile sketches.
pub const SKETCH_ERROR: f64 = 0.001;

/// Default number of bootstrap replicates.
pub const DEFAULT_REPLICATES: u64 = 1_000_000;

/// Replicates handled by one work unit; fixes the merge order.
const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    NeRegret,
    UniformScore,
    NeNbs,
}

impl Statistic {
    pub const ALL: [Statistic; 3] = [Statistic::NeRegret, Statistic::UniformScore, Statistic::NeNbs];

    pub fn key(self) -> &'static str {
        match self {
            Statistic::NeRegret => "ne_regret",
            Statistic::UniformScore => "uniform_score",
            Statistic::NeNbs => "ne_nbs",
        }
    }

    pub fn parse(s: &str) -> Option<Statistic> {
        Statistic::ALL.into_iter().find(|x| x.key() == s)
    }

    fn needs_equilibrium(self) -> bool {
        !matches!(self, Statistic::UniformScore)
    }

    /// Interval containing every value the statistic can take on a game
    /// whose payoffs lie in `[lo, hi]`.
    fn bounds(self, lo: f64, hi: f64) -> (f64, f64) {
        match self {
            Statistic::NeRegret => (0.0, hi - lo),
            Statistic::UniformScore => (lo, hi),
            Statistic::NeNbs => {
                let c = [lo * lo, lo * hi, hi * hi];
                (c.iter().cloned().fold(f64::INFINITY, f64::min), c.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
            }
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Evaluates `stat` for strategy `pi`; `sigma` is the equilibrium when one was found.
pub fn statistic_value(stat: Statistic, game: &SymmetricGame, pi: usize, sigma: Option<&[f64]>) -> Option<f64> {
    match stat {
        Statistic::UniformScore => uniform_score(game, pi).ok(),
        Statistic::NeRegret => sigma.and_then(|s| ne_regret_score(game, pi, s).ok()),
        Statistic::NeNbs => sigma.and_then(|s| ne_nbs(game, pi, s).ok()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig {
    pub n_replicates: u64,
    pub master_seed: u64,
    pub statistics: Vec<Statistic>,
    pub eps_ent: f64,
    /// Bins of the exact histograms; `None` skips them.
    pub histogram_bins: Option<usize>,
    /// Keep every replicate's values for a per-replicate dump.
    pub keep_values: bool,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            n_replicates: DEFAULT_REPLICATES,
            master_seed: 0,
            statistics: Statistic::ALL.to_vec(),
            eps_ent: DEFAULT_EPS_ENT,
            histogram_bins: None,
            keep_values: false,
        }
    }
}

/// Fixed-range histogram; out-of-range values land in the edge bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        Histogram { lo, hi, counts: vec![0; bins.max(1)] }
    }

    pub fn add(&mut self, x: f64) {
        let n = self.counts.len();
        let width = self.hi - self.lo;
        let i = if width > 0.0 { (((x - self.lo) / width) * n as f64).floor() } else { 0.0 };
        self.counts[(i.max(0.0) as usize).min(n - 1)] += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// Bin edges, one more than the number of bins.
    pub fn edges(&self) -> Vec<f64> {
        let n = self.counts.len();
        (0..=n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / n as f64).collect()
    }
}

/// Streaming summary of one statistic for one strategy.
#[derive(Debug, Clone)]
struct Summary {
    moments: Welford,
    sketch: CKMS<f64>,
    histogram: Option<Histogram>,
    failures: u64,
}

impl Summary {
    fn new(histogram: Option<Histogram>) -> Self {
        Summary { moments: Welford::default(), sketch: CKMS::new(SKETCH_ERROR), histogram, failures: 0 }
    }

    fn push(&mut self, x: Option<f64>) {
        match x {
            Some(x) => {
                self.moments.push(x);
                self.sketch.insert(x);
                if let Some(h) = &mut self.histogram {
                    h.add(x);
                }
            }
            None => self.failures += 1,
        }
    }

    fn merge(&mut self, other: Summary) {
        self.moments.merge(&other.moments);
        self.sketch += other.sketch;
        if let (Some(a), Some(b)) = (&mut self.histogram, &other.histogram) {
            a.merge(b);
        }
        self.failures += other.failures;
    }

    fn quantile(&self, q: f64) -> f64 {
        self.sketch.query(q).map_or(f64::NAN, |(_, v)| v)
    }
}

/// Accumulated state of a block of replicates.
struct Block {
    /// `[statistic][strategy]`
    summaries: Vec<Vec<Summary>>,
    br: BrGraph,
    solver_failures: u64,
    values: Vec<Vec<Option<f64>>>,
}

impl Block {
    fn merge(&mut self, other: Block) -> Result<(), MetagameError> {
        for (a, b) in self.summaries.iter_mut().zip(other.summaries) {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        }
        self.br.merge(&other.br).map_err(MetagameError::Solver)?;
        self.solver_failures += other.solver_failures;
        self.values.extend(other.values);
        Ok(())
    }
}

/// Summary of one statistic for one strategy across replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub mean: f64,
    pub std: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Value on the full-sample meta-game; absent when its solve failed.
    pub full_sample: Option<f64>,
    /// Replicates that produced a value.
    pub n_replicates: u64,
    pub failures: u64,
}

impl StatSummary {
    pub fn halfwidth(&self) -> f64 {
        0.5 * (self.ci_hi - self.ci_lo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub strategies: Vec<String>,
    pub n_replicates: u64,
    pub master_seed: u64,
    pub eps_ent: f64,
    /// Hash of the table the report was computed from.
    pub table_hash: String,
    pub config_hash: Option<String>,
    /// Replicates on which the equilibrium solve failed.
    pub solver_failures: u64,
    /// statistic → strategy → summary
    pub statistics: BTreeMap<String, BTreeMap<String, StatSummary>>,
    pub br_graph: BrGraph,
    /// statistic → strategy → histogram
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub histograms: Option<BTreeMap<String, BTreeMap<String, Histogram>>>,
    /// One row per replicate, columns ordered by statistic then strategy;
    /// `None` marks a failed value.
    #[serde(skip)]
    pub values: Option<Vec<Vec<Option<f64>>>>,
}

impl BootstrapReport {
    pub fn get(&self, stat: Statistic, strategy: &str) -> Option<&StatSummary> {
        self.statistics.get(stat.key())?.get(strategy)
    }
}

/// Runs the bootstrap. Results depend only on the table and `cfg`, never on
/// the number of worker threads.
pub fn bootstrap_run(table: &PayoffTable, cfg: &BootstrapConfig) -> Result<BootstrapReport, MetagameError> {
    if cfg.n_replicates == 0 {
        return Err(MetagameError::Invalid("n_replicates must be at least 1".into()));
    }
    if cfg.statistics.is_empty() {
        return Err(MetagameError::Invalid("no statistics requested".into()));
    }
    let sym = SymmetrizedTable::new(table)?;
    let m = sym.names.len();
    let (lo, hi) = sym.range();
    let stats = &cfg.statistics;
    let need_ne = stats.iter().any(|s| s.needs_equilibrium());

    let fresh = || Block {
        summaries: stats
            .iter()
            .map(|s| {
                let h = cfg.histogram_bins.map(|b| {
                    let (a, z) = s.bounds(lo, hi);
                    Histogram::new(a, z, b)
                });
                (0..m).map(|_| Summary::new(h.clone())).collect()
            })
            .collect(),
        br: BrGraph::new(sym.names.clone()),
        solver_failures: 0,
        values: Vec::new(),
    };

    let run_chunk = |c: u64| -> Result<Block, MetagameError> {
        let mut b = fresh();
        let end = ((c + 1) * CHUNK).min(cfg.n_replicates);
        for r in c * CHUNK..end {
            let plan = ResamplePlan::draw(&sym.seed_counts, cfg.master_seed, r)?;
            let game = sym.game(&plan)?;
            let sigma = if need_ne {
                match max_entropy_ne(&game, cfg.eps_ent) {
                    Ok(res) => Some(res.sigma),
                    Err(_) => {
                        b.solver_failures += 1;
                        None
                    }
                }
            } else {
                None
            };
            b.br.add(&game).map_err(MetagameError::Solver)?;
            let mut row = Vec::new();
            for (k, &s) in stats.iter().enumerate() {
                for pi in 0..m {
                    let v = statistic_value(s, &game, pi, sigma.as_deref());
                    b.summaries[k][pi].push(v);
                    if cfg.keep_values {
                        row.push(v);
                    }
                }
            }
            if cfg.keep_values {
                b.values.push(row);
            }
        }
        Ok(b)
    };

    let n_chunks = cfg.n_replicates.div_ceil(CHUNK);
    // bounded batches keep memory flat; merging in chunk order keeps results exact
    let batch = (rayon::current_num_threads() as u64 * 4).max(1);
    let mut total = fresh();
    let mut start = 0;
    while start < n_chunks {
        let stop = (start + batch).min(n_chunks);
        let blocks: Vec<Result<Block, MetagameError>> = (start..stop).into_par_iter().map(run_chunk).collect();
        for b in blocks {
            total.merge(b?)?;
        }
        start = stop;
    }

    let full = sym.game(&ResamplePlan::identity(&sym.seed_counts))?;
    let full_sigma = if need_ne { max_entropy_ne(&full, cfg.eps_ent).ok().map(|r| r.sigma) } else { None };

    let mut statistics = BTreeMap::new();
    let mut histograms = BTreeMap::new();
    for (k, &s) in stats.iter().enumerate() {
        let mut per = BTreeMap::new();
        let mut hist = BTreeMap::new();
        for (pi, sum) in total.summaries[k].iter().enumerate() {
            let name = sym.names[pi].clone();
            per.insert(
                name.clone(),
                StatSummary {
                    mean: if sum.moments.n > 0 { sum.moments.mean } else { f64::NAN },
                    std: sum.moments.sample_var().sqrt(),
                    ci_lo: sum.quantile(0.025),
                    ci_hi: sum.quantile(0.975),
                    full_sample: statistic_value(s, &full, pi, full_sigma.as_deref()),
                    n_replicates: sum.moments.n,
                    failures: sum.failures,
                },
            );
            if let Some(h) = &sum.histogram {
                hist.insert(name, h.clone());
            }
        }
        statistics.insert(s.key().to_string(), per);
        histograms.insert(s.key().to_string(), hist);
    }
    Ok(BootstrapReport {
        strategies: sym.names.clone(),
        n_replicates: cfg.n_replicates,
        master_seed: cfg.master_seed,
        eps_ent: cfg.eps_ent,
        table_hash: table.content_hash(),
        config_hash: table.header.config_hash.clone(),
        solver_failures: total.solver_failures,
        statistics,
        br_graph: total.br,
        histograms: cfg.histogram_bins.map(|_| histograms),
        values: cfg.keep_values.then_some(total.values),
    })
}
