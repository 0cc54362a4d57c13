use mateval::game::{Action, Instance, InstanceDb};
use mateval::metagame::PayoffTable;
use mateval::policy::Transcript;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

const MATEVAL: &str = env!("CARGO_BIN_EXE_mateval");
const AGENT: &str = env!("CARGO_BIN_EXE_dond-agent");

fn run(args: &[&str]) -> Output {
    Command::new(MATEVAL).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const HEURISTICS: &str = r#"
[[strategy]]
name = "uniform"
kind = "heuristic"
policy = "uniform"

[[strategy]]
name = "tough"
kind = "heuristic"
policy = "tough"

[[strategy]]
name = "soft"
kind = "heuristic"
policy = "soft"
"#;

fn config(dir: &Path, body: &str) -> PathBuf {
    let text = format!(
        "master_seed = 5\n[game]\nmax_rounds = 10\nterminate_prob = 0.0\ndiscount = 1.0\n[simulate]\nn_sims_per_entry = 100\n[analyze]\nn_replicates = 200\nhistogram_bins = 8\n{body}"
    );
    let p = dir.join("exp.toml");
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_instances_is_deterministic() {
    let d = TempDir::new().unwrap();
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["gen-instances", "--out", s(out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert!(stdout(&o).contains("player 1 142, player 2 142"));
    }
    assert_eq!(fs::read(a.join("instances.json")).unwrap(), fs::read(b.join("instances.json")).unwrap());
    let db = InstanceDb::load(&a.join("instances.json")).unwrap();
    assert_eq!(db.header.distinct_valuations, [142, 142]);
    assert!(db.header.constraint_delta.is_some());
}

#[test]
fn custom_constraints_are_echoed_in_the_header() {
    let d = TempDir::new().unwrap();
    let cfg = config(
        d.path(),
        &format!("[instances.constraints]\nmax_count = 3\nmin_total_items = 5\nmax_total_items = 6\n{HEURISTICS}"),
    );
    let o = run(&["gen-instances", "--config", s(&cfg), "--out", s(d.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let db = InstanceDb::load(&d.path().join("instances.json")).unwrap();
    let c = db.header.constraints.unwrap();
    assert_eq!((c.max_count, c.max_total_items), (3, 6));
}

#[test]
fn simulate_analyze_and_resume() {
    let d = TempDir::new().unwrap();
    let cfg = config(d.path(), HEURISTICS);
    let out = d.path().join("run");
    let o = run(&["simulate", "--config", s(&cfg), "--out", s(&out), "--workers", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table_path = out.join("payoff_table.json");
    let first = fs::read(&table_path).unwrap();
    let t = PayoffTable::from_json(std::str::from_utf8(&first).unwrap()).unwrap();
    assert_eq!(t.entries.len(), 9);
    assert_eq!(t.entry(1, 2).as_ref().unwrap().mean[0], 10.0);

    // interrupt: keep four finished entries and a torn line, then resume
    let ck = out.join("payoff_table.checkpoint.jsonl");
    let text = fs::read_to_string(&ck).unwrap();
    let mut kept: Vec<&str> = text.lines().take(4).collect();
    kept.push("{\"hash\":\"tor");
    fs::write(&ck, kept.join("\n")).unwrap();
    fs::remove_file(&table_path).unwrap();
    let o = run(&["simulate", "--config", s(&cfg), "--out", s(&out), "--resume"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read(&table_path).unwrap(), first);

    let o = run(&["analyze", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("±"));
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        // one seed per strategy: every interval has zero width
        assert_eq!(cols[4], cols[5], "{line}");
        assert!(cols[7].ends_with("±0.000"));
    }
    let dot = fs::read_to_string(out.join("br_graph.dot")).unwrap();
    check_dot(&dot);
    // soft's best response is tough
    assert!(dot.contains("n2 -> n1 [label=\"1.000\"];"));
    assert_eq!(fs::read_dir(out.join("histograms")).unwrap().count(), 9);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["statistics"]["ne_regret"]["uniform"]["n_replicates"], 200);

    // a table from another configuration is refused
    let o = run(&["analyze", "--config", s(&cfg), "--out", s(&out), "--seed", "6"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    // a missing table is an incomplete input
    let o = run(&["analyze", "--config", s(&cfg), "--table", s(&d.path().join("none.json"))]);
    assert_eq!(code(&o), 3);
}

/// Minimal check of the DOT subset we emit: a digraph of node and edge statements.
fn check_dot(dot: &str) {
    let lines: Vec<&str> = dot.lines().collect();
    assert_eq!(lines[0], "digraph best_response {");
    assert_eq!(*lines.last().unwrap(), "}");
    for l in &lines[1..lines.len() - 1] {
        let l = l.trim();
        assert!(l.ends_with("];"), "{l}");
        let head = &l[..l.find(" [").unwrap()];
        let ids: Vec<&str> = head.split(" -> ").collect();
        assert!(ids.len() == 1 || ids.len() == 2, "{l}");
        for id in ids {
            assert!(id.starts_with('n') && id[1..].chars().all(|c| c.is_ascii_digit()), "{l}");
        }
        let label = &l[l.find("label=\"").unwrap() + 7..l.len() - 3];
        assert!(!label.contains('"') || label.contains("\\\""), "{l}");
    }
}

#[test]
fn provider_failures_are_recorded_per_entry() {
    let d = TempDir::new().unwrap();
    let body = format!(
        "{HEURISTICS}\n[[strategy]]\nname = \"ext\"\nkind = \"external\"\nprogram = \"{AGENT}\"\nargs = [\"uniform\"]\n\n[[strategy]]\nname = \"broken\"\nkind = \"external\"\nprogram = \"{AGENT}\"\nargs = [\"{{seed}}\"]\nseeds = [\"malformed\", \"bad-sum\"]\n\n[[strategy]]\nname = \"ghost\"\nkind = \"external\"\nprogram = \"/nonexistent/agent\"\n"
    );
    let cfg = config(d.path(), &body);
    let out = d.path().join("run");
    let o = run(&["simulate", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(stderr(&o).contains("ghost/0"), "{}", stderr(&o));
    let t = PayoffTable::load(&out.join("payoff_table.json")).unwrap();
    // slots: uniform, tough, soft, ext, broken/malformed, broken/bad-sum, ghost
    assert_eq!(t.slots(), 7);
    assert!(t.entry(3, 0).is_ok() && t.entry(0, 3).is_ok());
    for other in 0..7 {
        for bad in [4, 5, 6] {
            assert!(t.entry(bad, other).is_err() && t.entry(other, bad).is_err());
        }
    }
    let malformed = t.entry(4, 0).as_ref().unwrap_err();
    assert!(malformed.contains("protocol"), "{malformed}");
    let bad_sum = t.entry(0, 5).as_ref().unwrap_err();
    assert!(bad_sum.contains("invalid distribution"), "{bad_sum}");
    let o = run(&["analyze", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn play_reports_transcripts() {
    let d = TempDir::new().unwrap();
    let cfg = config(d.path(), HEURISTICS);
    let o = run(&["play", "--config", s(&cfg), "--a", "tough", "--b", "soft", "--games", "10"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let games: Vec<serde_json::Value> = out.lines().filter(|l| l.starts_with('{')).map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(games.len(), 10);
    for g in &games {
        assert_eq!(g["agreement_round"], 1);
        assert_eq!(g["actions"].as_array().unwrap().last().unwrap(), "agree");
        assert_eq!(g["payoffs"][0], 10.0);
        let inst: Instance = serde_json::from_value(g["instance"].clone()).unwrap();
        let actions: Vec<Action> = g["actions"]
            .as_array()
            .unwrap()
            .iter()
            .map(|a| parse_action(a.as_str().unwrap()))
            .collect();
        let t = Transcript {
            instance: inst,
            params: mateval::GameParams::new(10, 0.0, 1.0).unwrap(),
            actions,
            chance_terminated: false,
            outcome: mateval::Outcome { payoffs: [0.0; 2], agreed: false, agreement_round: None },
        };
        assert_eq!(t.replay().unwrap().payoffs[0], 10.0);
    }
    assert!(out.contains("mean payoffs over 10 games: tough 10.0000"));

    let o = run(&["play", "--config", s(&cfg), "--a", "tough", "--b", "soft", "--games", "0"]);
    assert_eq!(code(&o), 0);
    let o = run(&["play", "--config", s(&cfg), "--a", "tough", "--b", "nobody", "--games", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("nobody"));
}

fn parse_action(s: &str) -> Action {
    if s == "agree" {
        return Action::Agree;
    }
    let inner = s.trim_start_matches("offer[").trim_end_matches(']');
    let v: Vec<u8> = inner.split(',').map(|x| x.parse().unwrap()).collect();
    Action::Offer([v[0], v[1], v[2]])
}

#[test]
fn selfplay_train_on_a_toy_game() {
    let d = TempDir::new().unwrap();
    let db = InstanceDb::from_instances(vec![
        Instance::new([1, 2, 3], [1, 3, 1], [2, 1, 2]).unwrap(),
        Instance::new([1, 2, 3], [1, 3, 1], [4, 0, 2]).unwrap(),
    ])
    .unwrap();
    fs::write(d.path().join("toy.json"), db.to_json()).unwrap();
    let text = |episodes: usize| {
        format!(
            "master_seed = 11\n[game]\nmax_rounds = 2\nterminate_prob = 0.0\ndiscount = 1.0\n[instances]\ndb = \"toy.json\"\n[selfplay]\nepisodes = {episodes}\ndelay_period = 100\ncheckpoint_every = 500\n{HEURISTICS}"
        )
    };
    let cfg = d.path().join("sp.toml");
    fs::write(&cfg, text(0)).unwrap();
    let zero = d.path().join("zero");
    let o = run(&["selfplay-train", "--config", s(&cfg), "--out", s(&zero)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let p: serde_json::Value = serde_json::from_str(&fs::read_to_string(zero.join("policy.json")).unwrap()).unwrap();
    assert!(p["table"].as_object().unwrap().is_empty());

    fs::write(&cfg, text(1500)).unwrap();
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["selfplay-train", "--config", s(&cfg), "--out", s(out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let curve = fs::read_to_string(a.join("training_curve.csv")).unwrap();
    assert_eq!(curve, fs::read_to_string(b.join("training_curve.csv")).unwrap());
    assert_eq!(fs::read(a.join("policy.json")).unwrap(), fs::read(b.join("policy.json")).unwrap());
    let regrets: Vec<f64> = curve.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(regrets.last().unwrap() < regrets.first().unwrap(), "{curve}");

    // the full-size game trips the size guard
    fs::write(&cfg, text(1).replace("max_rounds = 2", "max_rounds = 10").replace("db = \"toy.json\"", "")).unwrap();
    let o = run(&["selfplay-train", "--config", s(&cfg), "--out", s(&a)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("decision nodes"), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_with_two() {
    assert_eq!(code(&run(&["simulate"])), 2);
    let d = TempDir::new().unwrap();
    let bad = d.path().join("bad.toml");
    fs::write(&bad, "master_seed = \"x\"").unwrap();
    assert_eq!(code(&run(&["simulate", "--config", s(&bad)])), 2);
    let empty = config(d.path(), "");
    let o = run(&["simulate", "--config", s(&empty)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("roster is empty"));
    assert_eq!(code(&run(&["no-such-verb"])), 2);
}

#[test]
fn shipped_configs_validate() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["barg10.toml", "barg30.toml", "smoke.toml"] {
        let c = mateval::experiment::ExperimentConfig::load(&root.join(name)).unwrap();
        c.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    let c = mateval::experiment::ExperimentConfig::load(&root.join("barg30.toml")).unwrap();
    assert_eq!((c.game.max_rounds, c.game.terminate_prob, c.game.discount), (30, 0.125, 0.935));
}
