use clap::{Parser, Subcommand};
use mateval::experiment::{
    analyze, gen_instances, play, selfplay_train, simulate, ExperimentConfig, ExperimentError, RunOptions, TABLE_FILE,
};
use std::path::PathBuf;
use std::process::ExitCode;

/// Meta-game evaluation of multiagent training algorithms on Deal-or-No-Deal.
#[derive(Parser)]
#[command(name = "mateval", version)]
struct Cli {
    /// Experiment configuration (TOML, or JSON by extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory; overrides the configured one.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Continue an interrupted run from its checkpoint.
    #[arg(long, global = true)]
    resume: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the instance database and write it with a summary.
    GenInstances,
    /// Estimate the payoff table over every ordered pair of seed policies.
    Simulate,
    /// Bootstrap the meta-game and write the reports.
    Analyze {
        /// Payoff table; defaults to the one in the output directory.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Train tabular policy and value by search-guided self-play.
    SelfplayTrain,
    /// Play games between two roster strategies and print transcripts.
    Play {
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        games: Option<usize>,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, ExperimentError> {
    let path = cli.config.as_ref().ok_or_else(|| ExperimentError::Config("--config is required for this command".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), ExperimentError> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(ExperimentError::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
    }
    match &cli.cmd {
        Cmd::GenInstances => {
            // the database does not depend on the roster, so a config is optional
            let cfg = match &cli.config {
                Some(_) => load_config(cli)?,
                None => ExperimentConfig::from_toml("master_seed = 0\n[game]\nmax_rounds = 10\nterminate_prob = 0.0\ndiscount = 1.0\n")?,
            };
            let opts = RunOptions::new(&cfg, cli.out.clone(), cli.resume);
            let s = gen_instances(&cfg, &opts)?;
            println!("instances: {} (reference {})", s.count, s.reference_count);
            println!("distinct valuations: player 1 {}, player 2 {}", s.distinct_valuations[0], s.distinct_valuations[1]);
            if let Some(d) = &s.constraint_delta {
                println!("note: {d}");
            }
            println!("wrote {}", opts.out.display());
        }
        Cmd::Simulate => {
            let cfg = load_config(cli)?;
            let opts = RunOptions::new(&cfg, cli.out.clone(), cli.resume);
            let t = simulate(&cfg, &opts)?;
            println!("payoff table: {} entries, {} simulations each", t.entries.len(), t.header.n_sims);
            println!("wrote {}", opts.path(TABLE_FILE).display());
        }
        Cmd::Analyze { table } => {
            let cfg = load_config(cli)?;
            let opts = RunOptions::new(&cfg, cli.out.clone(), cli.resume);
            let path = table.clone().unwrap_or_else(|| opts.path(TABLE_FILE));
            let r = analyze(&cfg, &path, &opts)?;
            print!("{}", mateval::experiment::table_csv(&r));
            if r.solver_failures > 0 {
                println!("solver failures: {} of {} replicates", r.solver_failures, r.n_replicates);
            }
            println!("wrote {}", opts.out.display());
        }
        Cmd::SelfplayTrain => {
            let cfg = load_config(cli)?;
            let opts = RunOptions::new(&cfg, cli.out.clone(), cli.resume);
            for c in selfplay_train(&cfg, &opts)? {
                println!("episode {}: sum regret {:.6}", c.episode, c.sum_regret);
            }
            println!("wrote {}", opts.out.display());
        }
        Cmd::Play { a, b, games } => {
            let cfg = load_config(cli)?;
            let pick = |x: &Option<String>, y: &Option<String>, seat: &str| {
                x.clone().or_else(|| y.clone()).ok_or_else(|| ExperimentError::Config(format!("no strategy for seat {seat}; pass --{seat}")))
            };
            let a = pick(a, &cfg.play.a, "a")?;
            let b = pick(b, &cfg.play.b, "b")?;
            let n = games.unwrap_or(cfg.play.n_games);
            let r = play(&cfg, &a, &b, n)?;
            for (i, t) in r.games.iter().enumerate() {
                let actions: Vec<String> = t.actions.iter().map(|x| x.to_string()).collect();
                let line = serde_json::json!({
                    "game": i,
                    "instance": t.instance,
                    "actions": actions,
                    "chance_terminated": t.chance_terminated,
                    "payoffs": t.outcome.payoffs,
                    "agreement_round": t.outcome.agreement_round,
                });
                println!("{line}");
            }
            println!("mean payoffs over {n} games: {a} {:.4}, {b} {:.4}", r.mean[0], r.mean[1]);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
