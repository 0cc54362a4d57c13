use crate::game::{History, InfoState};
use crate::policy::{sample_index, Policy, PolicyError, ValueFn};
use rand::RngCore;
use std::sync::Arc;

/// Leaf values of zero for both players.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroValue;

impl ValueFn for ZeroValue {
    fn values(&self, _s: &InfoState, _h: &History, _rng: &mut dyn RngCore) -> Result<[f64; 2], PolicyError> {
        Ok([0.0, 0.0])
    }
}

/// Mean return of `rollouts` playouts in which both seats follow `policy`.
#[derive(Clone)]
pub struct RolloutValue {
    pub policy: Arc<dyn Policy>,
    pub rollouts: usize,
}

impl RolloutValue {
    pub fn new(policy: Arc<dyn Policy>, rollouts: usize) -> Self {
        assert!(rollouts >= 1, "need at least one rollout");
        RolloutValue { policy, rollouts }
    }
}

impl ValueFn for RolloutValue {
    fn values(&self, _s: &InfoState, h: &History, rng: &mut dyn RngCore) -> Result<[f64; 2], PolicyError> {
        let mut total = [0.0; 2];
        for _ in 0..self.rollouts {
            let mut g = h.clone();
            while let Some(p) = g.current_player() {
                let s = g.info_state(p);
                let probs = self.policy.probs(&s)?;
                let acts = s.legal_actions()?;
                g.step(acts[sample_index(&probs, rng)], rng)?;
            }
            let r = g.returns()?.payoffs;
            total[0] += r[0];
            total[1] += r[1];
        }
        let n = self.rollouts as f64;
        Ok([total[0] / n, total[1] / n])
    }
}
