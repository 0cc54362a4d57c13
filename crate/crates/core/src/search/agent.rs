use super::{SearchConfig, Searcher};
use crate::belief::posterior_with_fallback;
use crate::game::{Action, GameParams, InfoState, InstanceDb};
use crate::policy::{Agent, Policy, PolicyError, ValueFn};
use rand::RngCore;
use std::sync::Arc;

/// Runs a search at every decision. The prior policy doubles as the model
/// of the opponent's past play when computing beliefs.
pub struct SearchAgent {
    pub name: String,
    pub policy: Arc<dyn Policy>,
    pub value: Arc<dyn ValueFn>,
    pub cfg: SearchConfig,
    pub db: Arc<InstanceDb>,
    pub params: GameParams,
}

impl Agent for SearchAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn episode_agent(&self, _rng: &mut dyn RngCore) -> &dyn Agent {
        self
    }

    fn act(&self, s: &InfoState, rng: &mut dyn RngCore) -> Result<Action, PolicyError> {
        let belief = posterior_with_fallback(s, self.policy.as_ref(), &self.db)
            .map_err(|e| PolicyError::Other(e.to_string()))?;
        let searcher = Searcher { params: self.params, policy: self.policy.as_ref(), value: self.value.as_ref(), cfg: &self.cfg };
        Ok(searcher.run(s, &belief, rng)?.action)
    }
}
