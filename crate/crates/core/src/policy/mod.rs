//! Policy providers and the episode driver.
//!
//! A [`Policy`] maps an infostate to a distribution over its canonical legal
//! actions. A [`ValueFn`] estimates both players' returns at a history. An
//! [`Agent`] is anything that can pick moves in a game; it may commit to a
//! per-episode component (seed mixtures) or run a search at every move.

mod external;
mod heuristic;
mod mixture;
mod tabular;

pub use external::{ExternalPolicy, ProcessSpec};
pub use heuristic::{heuristic, SoftPolicy, ToughPolicy, UniformPolicy, HEURISTICS};
pub use mixture::MixtureAgent;
pub use tabular::{TableHeader, TabularPolicy, TabularValue};

use crate::game::{Action, GameError, GameParams, History, InfoState, Instance, Outcome, Player};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::Duration;
use thiserror::Error;

/// Tolerance on the total mass of a distribution.
pub const PROB_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("failed to launch policy process `{command}`: {source}")]
    Launch { command: String, source: std::io::Error },
    #[error("protocol violation: {detail}; offending message: {message}")]
    Protocol { detail: String, message: String },
    #[error("no reply within {timeout:?} to request {request}")]
    Timeout { timeout: Duration, request: String },
    #[error("invalid distribution at infostate {key}: {reason}")]
    InvalidDistribution { key: String, reason: String },
    #[error("{0}")]
    Game(#[from] GameError),
    #[error("{0}")]
    Other(String),
}

/// A behavioural strategy over canonical legal actions.
pub trait Policy: Send + Sync {
    fn name(&self) -> &str;

    /// Probabilities aligned with `s.legal_actions()`.
    fn probs(&self, s: &InfoState) -> Result<Vec<f64>, PolicyError>;
}

/// Estimates both players' returns. `s` is the infostate of the player to
/// move at `h`; providers that only see observations ignore `h`.
pub trait ValueFn: Send + Sync {
    fn values(&self, s: &InfoState, h: &History, rng: &mut dyn RngCore) -> Result<[f64; 2], PolicyError>;
}

/// Anything that can play the game.
pub trait Agent: Send + Sync {
    fn name(&self) -> &str;

    /// The agent that plays the coming episode. Mixtures pick a component
    /// here, once per episode; everything else returns itself.
    fn episode_agent(&self, rng: &mut dyn RngCore) -> &dyn Agent;

    fn act(&self, s: &InfoState, rng: &mut dyn RngCore) -> Result<Action, PolicyError>;
}

/// Checks the provider contract: one finite nonnegative entry per legal
/// action, summing to one.
pub fn validate_distribution(s: &InfoState, probs: &[f64]) -> Result<(), PolicyError> {
    let n = s.num_legal_actions();
    let fail = |reason: String| Err(PolicyError::InvalidDistribution { key: s.key(), reason });
    if probs.len() != n {
        return fail(format!("{} entries for {} legal actions", probs.len(), n));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return fail(format!("entry {p} is not a probability"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return fail(format!("mass sums to {total}"));
    }
    Ok(())
}

/// Inverse-CDF draw of an index from a distribution.
pub fn sample_index(probs: &[f64], rng: &mut dyn RngCore) -> usize {
    let total: f64 = probs.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Plays a policy by sampling from it.
#[derive(Clone)]
pub struct PolicyAgent {
    pub policy: Arc<dyn Policy>,
}

impl PolicyAgent {
    pub fn new(policy: Arc<dyn Policy>) -> Self {
        PolicyAgent { policy }
    }
}

impl Agent for PolicyAgent {
    fn name(&self) -> &str {
        self.policy.name()
    }

    fn episode_agent(&self, _rng: &mut dyn RngCore) -> &dyn Agent {
        self
    }

    fn act(&self, s: &InfoState, rng: &mut dyn RngCore) -> Result<Action, PolicyError> {
        let probs = self.policy.probs(s)?;
        validate_distribution(s, &probs)?;
        let acts = s.legal_actions()?;
        Ok(acts[sample_index(&probs, rng)])
    }
}

/// A finished game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub instance: Instance,
    pub params: GameParams,
    pub actions: Vec<Action>,
    pub chance_terminated: bool,
    pub outcome: Outcome,
}

impl Transcript {
    /// Replays the recorded moves through the engine.
    pub fn replay(&self) -> Result<Outcome, GameError> {
        let mut h = History::new(self.instance, self.params)?;
        let n = self.actions.len();
        for (i, a) in self.actions.iter().enumerate() {
            let terminate = self.chance_terminated && i + 1 == n;
            h.push(*a, terminate)?;
        }
        h.returns()
    }
}

/// Plays one episode between `p1` and `p2` on `instance`. Mixture components
/// are fixed before the first move; all randomness comes from `rng`.
pub fn play_episode(
    instance: Instance,
    params: GameParams,
    p1: &dyn Agent,
    p2: &dyn Agent,
    rng: &mut dyn RngCore,
) -> Result<Transcript, PolicyError> {
    let a1 = p1.episode_agent(rng);
    let a2 = p2.episode_agent(rng);
    let mut h = History::new(instance, params)?;
    while let Some(player) = h.current_player() {
        let s = h.info_state(player);
        let a = match player {
            Player::One => a1.act(&s, rng)?,
            Player::Two => a2.act(&s, rng)?,
        };
        h.step(a, rng)?;
    }
    let outcome = h.returns()?;
    Ok(Transcript { instance, params, actions: h.actions.clone(), chance_terminated: h.chance_terminated, outcome })
}

/// Uniform distribution over the legal actions of `s`.
pub(crate) fn uniform_probs(s: &InfoState) -> Vec<f64> {
    let n = s.num_legal_actions();
    vec![1.0 / n as f64; n]
}
