use mateval::exact::sum_regret;
use mateval::game::{GameParams, Instance, InstanceDb};
use mateval::policy::UniformPolicy;
use mateval::rng::stream;
use mateval::search::{self_play_train, SelfPlayConfig};

fn toy_db() -> InstanceDb {
    InstanceDb::from_instances(vec![
        Instance::new([1, 2, 3], [1, 3, 1], [2, 1, 2]).unwrap(),
        Instance::new([1, 2, 3], [1, 3, 1], [4, 0, 2]).unwrap(),
    ])
    .unwrap()
}

#[test]
fn self_play_beats_uniform_regret() {
    let db = toy_db();
    let params = GameParams::new(2, 0.0, 1.0).unwrap();
    let cfg = SelfPlayConfig { episodes: 2000, delay_period: 100, checkpoint_every: 500, ..Default::default() };
    let out = self_play_train(&db, &params, &cfg, "trained", &mut stream(11, &[])).unwrap();
    let uniform = sum_regret(&db, &params, &UniformPolicy, &UniformPolicy).unwrap();
    let last = out.checkpoints.last().unwrap();
    println!("{:?} uniform {uniform}", out.checkpoints);
    assert_eq!(last.episode, 2000);
    assert!(last.sum_regret < uniform, "{} vs {uniform}", last.sum_regret);
    assert!(last.sum_regret < out.checkpoints[0].sum_regret);
}
