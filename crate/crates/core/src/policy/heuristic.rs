use super::{uniform_probs, Policy, PolicyError};
use crate::game::{dot, offers_for_pool, InfoState};
use std::sync::Arc;

/// Names accepted by [`heuristic`].
pub const HEURISTICS: [&str; 3] = ["uniform", "tough", "soft"];

/// Uniform over all legal actions.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformPolicy;

impl Policy for UniformPolicy {
    fn name(&self) -> &str {
        "uniform"
    }

    fn probs(&self, s: &InfoState) -> Result<Vec<f64>, PolicyError> {
        s.legal_actions()?;
        Ok(uniform_probs(s))
    }
}

/// Never agrees; proposes uniformly among the offers that maximise its own value.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToughPolicy;

impl Policy for ToughPolicy {
    fn name(&self) -> &str {
        "tough"
    }

    fn probs(&self, s: &InfoState) -> Result<Vec<f64>, PolicyError> {
        let n = s.legal_actions()?.len();
        let offers = offers_for_pool(&s.pool);
        let values: Vec<u32> = offers.iter().map(|o| dot(&s.own_valuation, o)).collect();
        let best = *values.iter().max().expect("pool has at least the empty offer");
        let count = values.iter().filter(|&&v| v == best).count() as f64;
        let mut probs = vec![0.0; n];
        for (p, v) in probs.iter_mut().zip(&values) {
            if *v == best {
                *p = 1.0 / count;
            }
        }
        Ok(probs)
    }
}

/// Agrees to any standing offer; opens uniformly over all offers.
#[derive(Debug, Clone, Copy, Default)]
pub struct SoftPolicy;

impl Policy for SoftPolicy {
    fn name(&self) -> &str {
        "soft"
    }

    fn probs(&self, s: &InfoState) -> Result<Vec<f64>, PolicyError> {
        let n = s.legal_actions()?.len();
        if s.offers.is_empty() {
            return Ok(uniform_probs(s));
        }
        let mut probs = vec![0.0; n];
        probs[n - 1] = 1.0;
        Ok(probs)
    }
}

/// Looks up a heuristic by name.
pub fn heuristic(name: &str) -> Option<Arc<dyn Policy>> {
    match name {
        "uniform" => Some(Arc::new(UniformPolicy)),
        "tough" => Some(Arc::new(ToughPolicy)),
        "soft" => Some(Arc::new(SoftPolicy)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Action, GameParams, History, Instance, Player};
    use crate::policy::{play_episode, validate_distribution, PolicyAgent};
    use rand::SeedableRng;

    fn opening(pool: [u8; 3], w: [u8; 3], w2: [u8; 3]) -> InfoState {
        let inst = Instance::new(pool, w, w2).unwrap();
        History::new(inst, GameParams::new(10, 0.0, 1.0).unwrap()).unwrap().info_state(Player::One)
    }

    #[test]
    fn uniform_first_move_over_24_offers() {
        let s = opening([1, 2, 3], [1, 3, 1], [2, 1, 2]);
        let p = UniformPolicy.probs(&s).unwrap();
        assert_eq!(p.len(), 24);
        assert!(p.iter().all(|&x| (x - 1.0 / 24.0).abs() < 1e-15));
        validate_distribution(&s, &p).unwrap();
    }

    #[test]
    fn tough_splits_over_tied_maximisers() {
        let s = opening([1, 1, 1], [5, 5, 0], [0, 5, 5]);
        let p = ToughPolicy.probs(&s).unwrap();
        let acts = s.legal_actions().unwrap();
        let support: Vec<Action> = acts.iter().zip(&p).filter(|(_, &x)| x > 0.0).map(|(a, _)| *a).collect();
        assert_eq!(support, vec![Action::Offer([1, 1, 0]), Action::Offer([1, 1, 1])]);
        assert!(p.iter().all(|&x| x == 0.0 || x == 0.5));
    }

    #[test]
    fn tough_with_positive_values_claims_everything() {
        let s = opening([1, 2, 3], [1, 3, 1], [2, 1, 2]);
        let p = ToughPolicy.probs(&s).unwrap();
        let acts = s.legal_actions().unwrap();
        let i = acts.iter().position(|a| *a == Action::Offer([1, 2, 3])).unwrap();
        assert_eq!(p[i], 1.0);
    }

    #[test]
    fn soft_agrees_to_any_offer() {
        let inst = Instance::new([1, 2, 3], [1, 3, 1], [2, 1, 2]).unwrap();
        let mut h = History::new(inst, GameParams::new(10, 0.0, 1.0).unwrap()).unwrap();
        h.push(Action::Offer([0, 0, 0]), false).unwrap();
        let s = h.info_state(Player::Two);
        let p = SoftPolicy.probs(&s).unwrap();
        assert_eq!(*p.last().unwrap(), 1.0);
        // tough never puts mass on agree, even facing an offer
        assert_eq!(*ToughPolicy.probs(&s).unwrap().last().unwrap(), 0.0);
    }

    #[test]
    fn tough_versus_soft_pays_ten() {
        let db = crate::game::enumerate_instances(&Default::default());
        let params = GameParams::new(10, 0.0, 1.0).unwrap();
        let tough = PolicyAgent::new(heuristic("tough").unwrap());
        let soft = PolicyAgent::new(heuristic("soft").unwrap());
        let mut rng = crate::rng::Stream::seed_from_u64(1);
        for inst in db.instances.iter().step_by(37) {
            let t = play_episode(*inst, params, &tough, &soft, &mut rng).unwrap();
            assert_eq!(t.outcome.payoffs[0], 10.0);
            assert_eq!(t.outcome.agreement_round, Some(1));
        }
    }
}
