use mateval::belief::{posterior, Belief};
use mateval::exact::{perfect_info_values, PerfectInfoValue};
use mateval::game::{Action, GameParams, History, InfoState, Instance, InstanceDb, Player};
use mateval::policy::{Policy, UniformPolicy, ValueFn};
use mateval::rng::stream;
use mateval::search::{
    gumbel_search, non_root_select, softmax, va_search, Node, SearchConfig, SearchOutput,
};
use proptest::prelude::*;
use std::collections::HashMap;

fn toy_db() -> InstanceDb {
    InstanceDb::from_instances(vec![
        Instance::new([1, 2, 3], [1, 3, 1], [2, 1, 2]).unwrap(),
        Instance::new([1, 2, 3], [1, 3, 1], [4, 0, 2]).unwrap(),
    ])
    .unwrap()
}

fn barg2() -> GameParams {
    GameParams::new(2, 0.0, 1.0).unwrap()
}

fn root() -> (InfoState, Belief) {
    let db = toy_db();
    let s = History::new(db.instances[0], barg2()).unwrap().info_state(Player::One);
    let b = posterior(&s, &UniformPolicy, &db).unwrap();
    (s, b)
}

/// Expected subgame-perfect value of each root action under the belief.
fn oracle_q(s: &InfoState, b: &Belief) -> Vec<f64> {
    let mut h0 = Vec::new();
    for e in &b.support {
        h0.push((mateval::belief::world_state(s, e.valuation, &barg2()).unwrap(), e.prob));
    }
    s.legal_actions()
        .unwrap()
        .into_iter()
        .map(|a| {
            h0.iter()
                .map(|(h, p)| {
                    let mut c = h.clone();
                    c.push(a, false).unwrap();
                    p * perfect_info_values(&c).unwrap()[s.player.index()]
                })
                .sum()
        })
        .collect()
}

fn hits(search: impl Fn(u64) -> SearchOutput) -> usize {
    let (s, b) = root();
    let q = oracle_q(&s, &b);
    let best = q.iter().cloned().fold(f64::MIN, f64::max);
    let acts = s.legal_actions().unwrap();
    (0..200u64)
        .filter(|&seed| {
            let out = search(seed);
            let i = acts.iter().position(|a| *a == out.action).unwrap();
            (q[i] - best).abs() < 1e-9
        })
        .count()
}

#[test]
fn gumbel_search_finds_the_best_root_action() {
    let (s, b) = root();
    // K above the 24 root actions so the optimum is always a candidate
    let cfg = SearchConfig { num_sim: 1000, k: 32, ..Default::default() };
    let n = hits(|seed| gumbel_search(&s, &PerfectInfoValue, &UniformPolicy, &cfg, &b, &barg2(), &mut stream(seed, &[1])).unwrap());
    assert!(n >= 190, "{n}/200");
}

#[test]
fn va_search_finds_the_best_root_action() {
    let (s, b) = root();
    // no root noise: the check is about the selection rule, not exploration
    let cfg = SearchConfig { num_sim: 400, epsilon_mix: 0.0, ..SearchConfig::vanilla() };
    let n = hits(|seed| va_search(&s, &PerfectInfoValue, &UniformPolicy, &cfg, &b, &barg2(), &mut stream(seed, &[2])).unwrap());
    assert!(n >= 190, "{n}/200");
}

#[test]
fn single_legal_action_is_returned() {
    // zero pool: the opening player can only propose the empty split
    let inst = Instance { pool: [0, 0, 0], w1: [0, 0, 0], w2: [0, 0, 0] };
    let s = History::new(inst, barg2()).unwrap().info_state(Player::One);
    let b = Belief::point(&s, [0, 0, 0]);
    for cfg in [SearchConfig { num_sim: 4, k: 2, ..Default::default() }, SearchConfig { num_sim: 4, k: 2, ..SearchConfig::vanilla() }] {
        let out = mateval::search::Searcher { params: barg2(), policy: &UniformPolicy, value: &PerfectInfoValue, cfg: &cfg }
            .run(&s, &b, &mut stream(0, &[]))
            .unwrap();
        assert_eq!(out.action, Action::Offer([0, 0, 0]));
        assert_eq!(out.root.counts, vec![4]);
    }
}

/// Root visits add up to the budget, and every node's counts and returns
/// equal what the traced simulations passing through it deposited.
fn check_backup(out: &SearchOutput, num_sim: usize) {
    assert_eq!(out.root.total_visits() as usize, num_sim);
    assert_eq!(out.trace.len(), num_sim);
    let mut counts: HashMap<(String, Action), (u32, f64)> = HashMap::new();
    for sim in &out.trace {
        for (key, a) in &sim.steps {
            let who = InfoState::from_key(key, 2).unwrap().player.index();
            let e = counts.entry((key.clone(), *a)).or_default();
            e.0 += 1;
            e.1 += sim.returns[who];
        }
    }
    for (key, node) in &out.tree.nodes {
        for (i, a) in node.actions.iter().enumerate() {
            let (c, r) = counts.get(&(key.clone(), *a)).copied().unwrap_or_default();
            assert_eq!(node.counts[i], c, "{key} {a}");
            assert!((node.returns[i] - r).abs() < 1e-9, "{key} {a}");
        }
    }
}

struct Skewed(Vec<f64>);

impl Policy for Skewed {
    fn name(&self) -> &str {
        "skewed"
    }

    fn probs(&self, s: &InfoState) -> Result<Vec<f64>, mateval::policy::PolicyError> {
        let n = s.num_legal_actions();
        let w: Vec<f64> = (0..n).map(|i| self.0[i % self.0.len()]).collect();
        let z: f64 = w.iter().sum();
        Ok(w.into_iter().map(|x| x / z).collect())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn budget_and_backup_hold(seed in any::<u64>(), num_sim in 16usize..120, vanilla in any::<bool>(),
                              w in prop::collection::vec(0.1f64..5.0, 1..6)) {
        let (s, _) = root();
        let db = toy_db();
        let pol = Skewed(w);
        let b = posterior(&s, &pol, &db).unwrap();
        let base = if vanilla { SearchConfig::vanilla() } else { SearchConfig::default() };
        let cfg = SearchConfig { num_sim, record_trace: true, ..base };
        let v: &dyn ValueFn = &PerfectInfoValue;
        let out = mateval::search::Searcher { params: barg2(), policy: &pol, value: v, cfg: &cfg }
            .run(&s, &b, &mut stream(seed, &[])).unwrap();
        check_backup(&out, num_sim);
        let vp: f64 = out.visit_policy.iter().sum();
        prop_assert!((vp - 1.0).abs() < 1e-9);
    }

    #[test]
    fn improved_policy_does_not_lower_expected_q(
        logits in prop::collection::vec(-4.0f64..4.0, 2..8),
        qs in prop::collection::vec(-10.0f64..10.0, 8),
        visits in prop::collection::vec(0u32..20, 8),
    ) {
        let n = logits.len();
        let p = softmax(&logits);
        let node = Node {
            actions: (0..n as u8).map(|i| Action::Offer([0, 0, i])).collect(),
            prior: p.clone(),
            counts: visits[..n].iter().map(|&c| c.max(1)).collect(),
            returns: (0..n).map(|i| qs[i] * visits[i].max(1) as f64).collect(),
            value: 0.0,
        };
        let imp = node.improved_policy(50.0, 0.1);
        let ev = |d: &[f64]| d.iter().zip(&qs).map(|(a, b)| a * b).sum::<f64>();
        prop_assert!(ev(&imp) >= ev(&p) - 1e-9);
    }

    #[test]
    fn non_root_select_tracks_the_target(imp in prop::collection::vec(0.01f64..1.0, 2..6), steps in 50usize..300) {
        let z: f64 = imp.iter().sum();
        let imp: Vec<f64> = imp.into_iter().map(|x| x / z).collect();
        let mut counts = vec![0u32; imp.len()];
        for _ in 0..steps {
            let i = non_root_select(&imp, &counts);
            counts[i] += 1;
        }
        for (c, p) in counts.iter().zip(&imp) {
            prop_assert!((*c as f64 / steps as f64 - p).abs() <= 1.0 / steps as f64 * imp.len() as f64 + 1e-9);
        }
    }
}
