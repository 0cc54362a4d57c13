use super::{Agent, PolicyError};
use crate::game::{Action, InfoState};
use rand::{Rng, RngCore};
use std::sync::Arc;

/// Uniform mixture over seed policies, committed once per episode.
#[derive(Clone)]
pub struct MixtureAgent {
    pub name: String,
    pub components: Vec<Arc<dyn Agent>>,
}

impl MixtureAgent {
    pub fn new(name: impl Into<String>, components: Vec<Arc<dyn Agent>>) -> Self {
        assert!(!components.is_empty(), "a mixture needs at least one component");
        MixtureAgent { name: name.into(), components }
    }
}

impl Agent for MixtureAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn episode_agent(&self, rng: &mut dyn RngCore) -> &dyn Agent {
        let i = rng.random_range(0..self.components.len());
        self.components[i].episode_agent(rng)
    }

    /// Acting without an episode commitment draws a component for this move only.
    fn act(&self, s: &InfoState, rng: &mut dyn RngCore) -> Result<Action, PolicyError> {
        let i = rng.random_range(0..self.components.len());
        self.components[i].act(s, rng)
    }
}
