//! The pipeline stages behind the command-line verbs.

use super::config::ExperimentConfig;
use super::report::{histogram_csvs, replicates_csv, summary_csv, table_csv};
use super::roster::{build_roster, mixtures};
use super::ExperimentError;
use crate::game::{enumerate_instances, InstanceConstraints, InstanceDb};
use crate::metagame::{
    bootstrap_run, estimate_payoff_table, BootstrapConfig, BootstrapReport, EntryResult, EntryStats, EstimateConfig,
    MetagameError, PayoffTable,
};
use crate::policy::{play_episode, Transcript};
use crate::rng::stream;
use crate::search::{self_play_train, Checkpoint, SearchError};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

const TAG_SELFPLAY: u64 = 3;
const TAG_PLAY: u64 = 4;

pub const DB_FILE: &str = "instances.json";
pub const DB_SUMMARY_FILE: &str = "instances_summary.json";
pub const TABLE_FILE: &str = "payoff_table.json";
pub const CHECKPOINT_FILE: &str = "payoff_table.checkpoint.jsonl";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_TABLE_CSV: &str = "report_table.csv";
pub const BR_DOT: &str = "br_graph.dot";
pub const REPLICATES_CSV: &str = "replicates.csv";
pub const HISTOGRAM_DIR: &str = "histograms";
pub const POLICY_FILE: &str = "policy.json";
pub const VALUE_FILE: &str = "value.json";
pub const CURVE_CSV: &str = "training_curve.csv";

/// Where outputs go and whether to continue an interrupted run.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub resume: bool,
}

impl RunOptions {
    /// `--out` wins over the config's `out_dir`, which wins over `out`.
    pub fn new(cfg: &ExperimentConfig, out: Option<PathBuf>, resume: bool) -> Self {
        let out = out.or_else(|| cfg.out_dir.as_ref().map(|p| cfg.resolve(p))).unwrap_or_else(|| PathBuf::from("out"));
        RunOptions { out, resume }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn io_err(path: &Path, e: std::io::Error) -> ExperimentError {
    ExperimentError::Config(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), ExperimentError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializes");
    s.push('\n');
    s
}

/// The configured database: loaded from file, or enumerated.
pub fn load_db(cfg: &ExperimentConfig) -> Result<InstanceDb, ExperimentError> {
    match &cfg.instances.db {
        Some(p) => {
            let path = cfg.resolve(p);
            let db = InstanceDb::load(&path).map_err(|e| io_err(&path, e))?;
            if db.is_empty() {
                return Err(ExperimentError::Config(format!("{} holds no instances", path.display())));
            }
            Ok(db)
        }
        None => {
            let c = cfg.instances.constraints.clone().unwrap_or_default();
            let db = enumerate_instances(&c);
            if db.is_empty() {
                return Err(ExperimentError::Config("the instance constraints admit no instances".into()));
            }
            Ok(db)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbSummary {
    pub count: usize,
    pub reference_count: usize,
    pub distinct_valuations: [usize; 2],
    pub constraint_delta: Option<String>,
    pub constraints: Option<InstanceConstraints>,
    pub db_hash: String,
}

/// Enumerates the instance database and writes it with a summary.
pub fn gen_instances(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<DbSummary, ExperimentError> {
    let db = enumerate_instances(&cfg.instances.constraints.clone().unwrap_or_default());
    let h = &db.header;
    let summary = DbSummary {
        count: h.count,
        reference_count: h.reference_count,
        distinct_valuations: h.distinct_valuations,
        constraint_delta: h.constraint_delta.clone(),
        constraints: h.constraints.clone(),
        db_hash: db.content_hash(),
    };
    write_file(&opts.path(DB_FILE), &db.to_json())?;
    write_file(&opts.path(DB_SUMMARY_FILE), &to_json(&summary))?;
    Ok(summary)
}

#[derive(Serialize, Deserialize)]
struct CheckpointLine {
    hash: String,
    p1: usize,
    p2: usize,
    result: EntryResult,
}

/// Finished entries recorded by an earlier run with the same hash. A torn
/// final line and failed entries are ignored, so those entries rerun.
fn read_checkpoint(path: &Path, hash: &str) -> Result<HashMap<(usize, usize), EntryStats>, ExperimentError> {
    let mut done = HashMap::new();
    let f = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(io_err(path, e)),
    };
    for line in BufReader::new(f).lines() {
        let line = line.map_err(|e| io_err(path, e))?;
        if let Ok(c) = serde_json::from_str::<CheckpointLine>(&line) {
            if c.hash == hash {
                if let Ok(st) = c.result {
                    done.insert((c.p1, c.p2), st);
                }
            }
        }
    }
    Ok(done)
}

/// Estimates the payoff table, checkpointing every entry.
pub fn simulate(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<PayoffTable, ExperimentError> {
    cfg.validate()?;
    let db = Arc::new(load_db(cfg)?);
    let roster = build_roster(cfg, &db)?;
    let hash = cfg.simulation_hash();
    fs::create_dir_all(&opts.out).map_err(|e| io_err(&opts.out, e))?;
    let ck_path = opts.path(CHECKPOINT_FILE);
    let done = if opts.resume { read_checkpoint(&ck_path, &hash)? } else { HashMap::new() };
    let file = OpenOptions::new()
        .create(true)
        .write(true)
        .append(opts.resume)
        .truncate(!opts.resume)
        .open(&ck_path)
        .map_err(|e| io_err(&ck_path, e))?;
    let writer = Mutex::new(file);
    let write_failed = Mutex::new(None);
    let on_entry = |a: usize, b: usize, r: &EntryResult| {
        let line = serde_json::to_string(&CheckpointLine { hash: hash.clone(), p1: a, p2: b, result: r.clone() }).expect("serializes");
        let mut f = writer.lock().unwrap_or_else(|e| e.into_inner());
        if let Err(e) = writeln!(f, "{line}").and_then(|_| f.flush()) {
            write_failed.lock().unwrap_or_else(|e| e.into_inner()).get_or_insert(e.to_string());
        }
    };
    let est = EstimateConfig { n_sims: cfg.simulate.n_sims_per_entry, master_seed: cfg.master_seed, config_hash: Some(hash.clone()) };
    let table = estimate_payoff_table(&roster, &db, cfg.game, &est, &done, &on_entry).map_err(metagame_err)?;
    if let Some(e) = write_failed.into_inner().unwrap_or_else(|e| e.into_inner()) {
        return Err(io_err(&ck_path, std::io::Error::other(e)));
    }
    write_file(&opts.path(TABLE_FILE), &table.to_json())?;
    let missing = table.missing();
    if !missing.is_empty() {
        let lines: Vec<String> = missing
            .iter()
            .take(5)
            .map(|&(a, b, msg)| format!("  {} vs {}: {msg}", table.slot_name(a), table.slot_name(b)))
            .collect();
        return Err(ExperimentError::Provider(format!(
            "{} of {} entries failed and are recorded as missing:\n{}",
            missing.len(),
            table.entries.len(),
            lines.join("\n")
        )));
    }
    Ok(table)
}

fn metagame_err(e: MetagameError) -> ExperimentError {
    match e {
        MetagameError::Incomplete { .. } => ExperimentError::Incomplete(e.to_string()),
        other => ExperimentError::Config(other.to_string()),
    }
}

/// Bootstraps the meta-game from a finished table and writes every report.
pub fn analyze(cfg: &ExperimentConfig, table_path: &Path, opts: &RunOptions) -> Result<BootstrapReport, ExperimentError> {
    cfg.validate()?;
    let table = match PayoffTable::load(table_path) {
        Ok(t) => t,
        Err(MetagameError::Io(msg)) => return Err(ExperimentError::Incomplete(format!("cannot read payoff table: {msg}"))),
        Err(e) => return Err(ExperimentError::Incomplete(e.to_string())),
    };
    let expected = cfg.simulation_hash();
    if let Some(h) = &table.header.config_hash {
        if *h != expected {
            return Err(ExperimentError::Config(format!(
                "{} was produced by a different configuration (hash {h}, expected {expected})",
                table_path.display()
            )));
        }
    }
    table.check_complete().map_err(metagame_err)?;
    let a = &cfg.analyze;
    let bcfg = BootstrapConfig {
        n_replicates: a.n_replicates,
        master_seed: cfg.master_seed,
        statistics: a.statistics.clone(),
        eps_ent: a.eps_ent,
        histogram_bins: (a.histogram_bins > 0).then_some(a.histogram_bins),
        keep_values: a.per_replicate_csv,
    };
    let mut report = bootstrap_run(&table, &bcfg).map_err(metagame_err)?;
    report.config_hash = Some(cfg.config_hash());
    write_file(&opts.path(REPORT_JSON), &to_json(&report))?;
    write_file(&opts.path(REPORT_CSV), &summary_csv(&report))?;
    write_file(&opts.path(REPORT_TABLE_CSV), &table_csv(&report))?;
    write_file(&opts.path(BR_DOT), &report.br_graph.to_dot())?;
    for (stem, csv) in histogram_csvs(&report) {
        write_file(&opts.out.join(HISTOGRAM_DIR).join(format!("{stem}.csv")), &csv)?;
    }
    if let Some(csv) = replicates_csv(&report) {
        write_file(&opts.path(REPLICATES_CSV), &csv)?;
    }
    Ok(report)
}

/// Trains tabular `(v, p)` by search-guided self-play and saves them with
/// the training curve.
pub fn selfplay_train(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<Checkpoint>, ExperimentError> {
    cfg.game.validate().map_err(|e| ExperimentError::Config(e.to_string()))?;
    let db = load_db(cfg)?;
    let mut rng = stream(cfg.master_seed, &[TAG_SELFPLAY]);
    let out = self_play_train(&db, &cfg.game, &cfg.selfplay, "selfplay", &mut rng).map_err(|e| match e {
        SearchError::Provider { .. } => ExperimentError::Provider(e.to_string()),
        other => ExperimentError::Config(other.to_string()),
    })?;
    fs::create_dir_all(&opts.out).map_err(|e| io_err(&opts.out, e))?;
    out.policy.save(&opts.path(POLICY_FILE)).map_err(|e| ExperimentError::Config(e.to_string()))?;
    out.value.save(&opts.path(VALUE_FILE)).map_err(|e| ExperimentError::Config(e.to_string()))?;
    let mut csv = String::from("episode,sum_regret\n");
    for c in &out.checkpoints {
        csv.push_str(&format!("{},{}\n", c.episode, c.sum_regret));
    }
    write_file(&opts.path(CURVE_CSV), &csv)?;
    Ok(out.checkpoints)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayReport {
    pub a: String,
    pub b: String,
    pub games: Vec<Transcript>,
    /// Mean payoffs of the two seats; zeros when no game was played.
    pub mean: [f64; 2],
}

/// Plays `n` games with `a` in the first seat and `b` in the second.
pub fn play(cfg: &ExperimentConfig, a: &str, b: &str, n: usize) -> Result<PlayReport, ExperimentError> {
    cfg.validate()?;
    let db = Arc::new(load_db(cfg)?);
    for name in [a, b] {
        if cfg.strategy(name).is_none() {
            let known: Vec<&str> = cfg.strategies.iter().map(|s| s.name.as_str()).collect();
            return Err(ExperimentError::Config(format!("unknown strategy `{name}`; the roster has {known:?}")));
        }
    }
    let agents = mixtures(&build_roster(cfg, &db)?);
    let (pa, pb) = (&agents[a], &agents[b]);
    let mut games = Vec::with_capacity(n);
    let mut total = [0.0; 2];
    for i in 0..n {
        let mut rng = stream(cfg.master_seed, &[TAG_PLAY, i as u64]);
        let inst = *db.sample(&mut rng);
        let t = play_episode(inst, cfg.game, pa.as_ref(), pb.as_ref(), &mut rng)
            .map_err(|e| ExperimentError::Provider(format!("game {i}: {e}")))?;
        total[0] += t.outcome.payoffs[0];
        total[1] += t.outcome.payoffs[1];
        games.push(t);
    }
    let mean = if n == 0 { [0.0; 2] } else { [total[0] / n as f64, total[1] / n as f64] };
    Ok(PlayReport { a: a.into(), b: b.into(), games, mean })
}
