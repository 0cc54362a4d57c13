use super::{GameParams, History, InstanceDb};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Game-size estimate from uniform-random play.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    /// Mean number of legal actions per decision point.
    pub b: f64,
    pub p1_infostates: f64,
    pub p2_infostates: f64,
    pub n_traj: usize,
}

impl SizeReport {
    /// Closed-form infostate counts for `distinct` opening infostates:
    /// `d (1 + b^2 + b^4 + b^8)` for the first mover and
    /// `d (1 + b + b^3 + b^5 + b^7)` for the second.
    pub fn from_branching(b: f64, distinct: usize, n_traj: usize) -> Self {
        let d = distinct as f64;
        SizeReport {
            b,
            p1_infostates: d * (1.0 + b.powi(2) + b.powi(4) + b.powi(8)),
            p2_infostates: d * (1.0 + b + b.powi(3) + b.powi(5) + b.powi(7)),
            n_traj,
        }
    }
}

/// Plays `n_traj` uniform-random games on instances drawn from `db` and
/// reports the mean branching factor together with the closed-form counts.
pub fn estimate_game_size<R: Rng + ?Sized>(
    db: &InstanceDb,
    params: &GameParams,
    n_traj: usize,
    rng: &mut R,
) -> SizeReport {
    assert!(n_traj >= 1, "n_traj must be positive");
    let mut decisions = 0u64;
    let mut branches = 0u64;
    for _ in 0..n_traj {
        let inst = *db.sample(rng);
        let mut h = History::new(inst, *params).expect("db instances are valid");
        while !h.is_terminal() {
            let acts = h.legal_actions().expect("non-terminal");
            decisions += 1;
            branches += acts.len() as u64;
            let a = acts[rng.random_range(0..acts.len())];
            h.step(a, rng).expect("legal action");
        }
    }
    let b = branches as f64 / decisions as f64;
    SizeReport::from_branching(b, db.header.distinct_valuations[0], n_traj)
}
