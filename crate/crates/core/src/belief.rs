//! Exact posteriors over the opponent's private valuation.
//!
//! The prior is uniform over database instances that match what the player
//! saw at the start of the game (pool and its own valuation). Each observed
//! opponent proposal multiplies in the assumed opponent policy's probability
//! of that proposal under the candidate valuation. Likelihoods are summed in
//! log space.

use crate::game::{Action, GameError, GameParams, History, InfoState, Instance, InstanceDb, Items};
use crate::policy::{sample_index, Policy, PolicyError};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Weight of the uniform component when smoothing a collapsed posterior.
pub const SMOOTHING_WEIGHT: f64 = 1e-3;

/// Relative likelihood below which the posterior counts as collapsed: the
/// total likelihood under the assumed policy, divided by the likelihood the
/// same observations would have under uniform play.
pub const COLLAPSE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum BeliefError {
    #[error("belief collapse at {key}: observed play is (nearly) impossible under policy {policy}")]
    Collapse { key: String, policy: String },
    #[error("no database instance matches infostate {key}")]
    NoSupport { key: String },
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefEntry {
    pub valuation: Items,
    pub prob: f64,
}

/// Distribution over the opponent's valuation at one infostate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Belief {
    pub key: String,
    pub policy: String,
    pub support: Vec<BeliefEntry>,
}

impl Belief {
    pub fn point(s: &InfoState, valuation: Items) -> Self {
        Belief { key: s.key(), policy: String::new(), support: vec![BeliefEntry { valuation, prob: 1.0 }] }
    }

    pub fn probs(&self) -> Vec<f64> {
        self.support.iter().map(|e| e.prob).collect()
    }
}

/// Log-probability of the opponent's observed proposals under `policy`
/// if its valuation were `w_opp`.
fn log_likelihood(s: &InfoState, w_opp: Items, policy: &dyn Policy) -> Result<f64, PolicyError> {
    let opp = s.player.other();
    let mut ll = 0.0;
    for (k, o) in s.offers.iter().enumerate() {
        if crate::game::Player::from_index(k) != opp {
            continue;
        }
        let view = InfoState {
            player: opp,
            pool: s.pool,
            own_valuation: w_opp,
            round: k as u32,
            offers: s.offers[..k].to_vec(),
            max_rounds: s.max_rounds,
        };
        let probs = policy.probs(&view)?;
        let idx = view.action_index(&Action::Offer(*o)).ok_or_else(|| {
            PolicyError::Game(GameError::IllegalAction { action: Action::Offer(*o), key: view.key() })
        })?;
        ll += probs[idx].ln();
    }
    Ok(ll)
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Posterior over the opponent's valuation at `s`, assuming it played `policy`.
pub fn posterior(s: &InfoState, policy: &dyn Policy, db: &InstanceDb) -> Result<Belief, BeliefError> {
    let opp = s.player.other();
    let candidates: Vec<Items> = db.consistent(&s.pool, s.player, &s.own_valuation).map(|i| *i.valuation(opp)).collect();
    if candidates.is_empty() {
        return Err(BeliefError::NoSupport { key: s.key() });
    }
    let lls: Vec<f64> = candidates.iter().map(|w| log_likelihood(s, *w, policy)).collect::<Result<_, _>>()?;
    let total = log_sum_exp(&lls) - (candidates.len() as f64).ln();
    // likelihood of the same observations under uniform play, identical for every valuation
    let uniform_ll: f64 = s
        .offers
        .iter()
        .enumerate()
        .filter(|(k, _)| crate::game::Player::from_index(*k) == opp)
        .map(|(k, _)| -((s.pool.iter().map(|&c| c as f64 + 1.0).product::<f64>() + if k > 0 { 1.0 } else { 0.0 }).ln()))
        .sum();
    if !total.is_finite() || total - uniform_ll < COLLAPSE_THRESHOLD.ln() {
        return Err(BeliefError::Collapse { key: s.key(), policy: policy.name().to_string() });
    }
    let norm = log_sum_exp(&lls);
    let support = candidates
        .into_iter()
        .zip(&lls)
        .map(|(valuation, ll)| BeliefEntry { valuation, prob: (ll - norm).exp() })
        .collect();
    Ok(Belief { key: s.key(), policy: policy.name().to_string(), support })
}

/// `policy` mixed with uniform play at weight `weight`.
pub struct Smoothed<'a> {
    pub inner: &'a dyn Policy,
    pub weight: f64,
}

impl Policy for Smoothed<'_> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn probs(&self, s: &InfoState) -> Result<Vec<f64>, PolicyError> {
        let p = self.inner.probs(s)?;
        let u = 1.0 / p.len() as f64;
        Ok(p.into_iter().map(|x| (1.0 - self.weight) * x + self.weight * u).collect())
    }
}

/// [`posterior`], retrying with a smoothed opponent model on collapse.
pub fn posterior_with_fallback(s: &InfoState, policy: &dyn Policy, db: &InstanceDb) -> Result<Belief, BeliefError> {
    match posterior(s, policy, db) {
        Err(BeliefError::Collapse { .. }) => posterior(s, &Smoothed { inner: policy, weight: SMOOTHING_WEIGHT }, db),
        other => other,
    }
}

/// A full history consistent with `s`, with the hidden valuation drawn from `belief`.
pub fn sample_world_state(
    s: &InfoState,
    belief: &Belief,
    params: &GameParams,
    rng: &mut dyn RngCore,
) -> Result<History, GameError> {
    let i = sample_index(&belief.probs(), rng);
    world_state(s, belief.support[i].valuation, params)
}

/// The history behind `s` if the opponent's valuation is `w_opp`.
pub fn world_state(s: &InfoState, w_opp: Items, params: &GameParams) -> Result<History, GameError> {
    let inst = Instance { pool: s.pool, w1: s.own_valuation, w2: s.own_valuation }.with_valuation(s.player.other(), w_opp);
    let mut h = History::new(inst, *params)?;
    for o in &s.offers {
        h.push(Action::Offer(*o), false)?;
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Player;
    use crate::policy::{ToughPolicy, UniformPolicy};
    use rand::SeedableRng;

    fn toy_db() -> InstanceDb {
        InstanceDb::from_instances(vec![
            Instance::new([1, 2, 3], [1, 3, 1], [2, 1, 2]).unwrap(),
            Instance::new([1, 2, 3], [1, 3, 1], [4, 0, 2]).unwrap(),
        ])
        .unwrap()
    }

    fn view_after(offer: Items) -> InfoState {
        let inst = Instance::new([1, 2, 3], [2, 1, 2], [2, 1, 2]).unwrap();
        let mut h = History::new(inst, GameParams::new(4, 0.0, 1.0).unwrap()).unwrap();
        h.push(Action::Offer(offer), false).unwrap();
        h.info_state(Player::One)
    }

    #[test]
    fn opening_belief_is_the_prior() {
        let db = toy_db();
        let inst = db.instances[0];
        let h = History::new(inst, GameParams::new(4, 0.0, 1.0).unwrap()).unwrap();
        let b = posterior(&h.info_state(Player::Two), &ToughPolicy, &db).unwrap();
        assert_eq!(b.support.len(), 1);
        let b = posterior(&h.info_state(Player::One), &ToughPolicy, &db).unwrap();
        assert_eq!(b.probs(), vec![0.5, 0.5]);
    }

    /// An opponent policy that proposes `[1,2,0]` with probability 2x under
    /// valuation A than under valuation B gives a (2/3, 1/3) posterior.
    struct Skewed;

    impl Policy for Skewed {
        fn name(&self) -> &str {
            "skewed"
        }

        fn probs(&self, s: &InfoState) -> Result<Vec<f64>, PolicyError> {
            let n = s.num_legal_actions();
            let target = s.action_index(&Action::Offer([1, 2, 0])).unwrap();
            let mass = if s.own_valuation == [2, 1, 2] { 0.4 } else { 0.2 };
            let rest = (1.0 - mass) / (n - 1) as f64;
            Ok((0..n).map(|i| if i == target { mass } else { rest }).collect())
        }
    }

    #[test]
    fn golden_two_thirds_posterior() {
        let db = InstanceDb::from_instances(vec![
            Instance::new([1, 2, 3], [2, 1, 2], [1, 3, 1]).unwrap(),
            Instance::new([1, 2, 3], [4, 0, 2], [1, 3, 1]).unwrap(),
        ])
        .unwrap();
        let inst = db.instances[0];
        let mut h = History::new(inst, GameParams::new(4, 0.0, 1.0).unwrap()).unwrap();
        h.push(Action::Offer([1, 2, 0]), false).unwrap();
        let b = posterior(&h.info_state(Player::Two), &Skewed, &db).unwrap();
        let find = |w: Items| b.support.iter().find(|e| e.valuation == w).unwrap().prob;
        assert!((find([2, 1, 2]) - 2.0 / 3.0).abs() < 1e-12);
        assert!((find([4, 0, 2]) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_opponent_leaves_prior_unchanged() {
        let db = toy_db();
        let inst = db.instances[0];
        let mut h = History::new(inst, GameParams::new(4, 0.0, 1.0).unwrap()).unwrap();
        h.push(Action::Offer([1, 0, 0]), false).unwrap();
        h.push(Action::Offer([0, 2, 1]), false).unwrap();
        let b = posterior(&h.info_state(Player::One), &UniformPolicy, &db).unwrap();
        for p in b.probs() {
            assert!((p - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn impossible_play_collapses_and_fallback_recovers() {
        let db = toy_db();
        let inst = db.instances[0];
        let mut h = History::new(inst, GameParams::new(4, 0.0, 1.0).unwrap()).unwrap();
        h.push(Action::Offer([1, 0, 0]), false).unwrap();
        // tough never proposes less than the whole pool here
        h.push(Action::Offer([0, 0, 0]), false).unwrap();
        let s = h.info_state(Player::One);
        assert!(matches!(posterior(&s, &ToughPolicy, &db), Err(BeliefError::Collapse { .. })));
        let b = posterior_with_fallback(&s, &ToughPolicy, &db).unwrap();
        let total: f64 = b.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unmatched_infostate_has_no_support() {
        let s = view_after([0, 0, 0]);
        let db = InstanceDb::from_instances(vec![Instance::new([1, 1, 1], [5, 5, 0], [0, 5, 5]).unwrap()]).unwrap();
        assert!(matches!(posterior(&s, &UniformPolicy, &db), Err(BeliefError::NoSupport { .. })));
    }

    #[test]
    fn sampled_histories_reproduce_the_infostate() {
        let db = toy_db();
        let inst = db.instances[1];
        let mut h = History::new(inst, GameParams::new(4, 0.0, 1.0).unwrap()).unwrap();
        h.push(Action::Offer([1, 0, 0]), false).unwrap();
        let s = h.info_state(Player::Two);
        let b = posterior(&s, &UniformPolicy, &db).unwrap();
        let mut rng = crate::rng::Stream::seed_from_u64(2);
        for _ in 0..20 {
            let w = sample_world_state(&s, &b, &h.params, &mut rng).unwrap();
            assert_eq!(w.info_state(Player::Two), s);
        }
    }
}
