//! Deal-or-No-Deal alternating-offers bargaining.
//!
//! Two players divide a pool of three item types. Each holds a private
//! per-unit valuation; both value the whole pool at 10. Player 1 opens with a
//! proposal, after which the mover may accept the standing offer or counter.
//! A game `Barg(T, ε, γ)` ends on agreement, after the `T`-th proposal, or by
//! chance (probability `ε` after each completed round). An agreement that
//! accepts the `t`-th proposal pays each player `γ^t` times the value of its
//! share.

mod encode;
mod instance;
mod size;
mod state;

pub use encode::{encode_observation, encoding_len, ENCODING_VERSION};
pub use instance::{enumerate_instances, DbHeader, Instance, InstanceConstraints, InstanceDb, REFERENCE_DB_COUNT};
pub use size::{estimate_game_size, SizeReport};
pub use state::{offers_for_pool, Action, History, InfoState, Outcome, AGREE_ACTION_ID};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Item counts or per-unit values for the three item types.
pub type Items = [u8; 3];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid game parameters: {0}")]
    InvalidParams(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("illegal action {action} at infostate {key}")]
    IllegalAction { action: Action, key: String },
    #[error("history is terminal")]
    Terminal,
    #[error("history is not terminal")]
    NotTerminal,
    #[error("game too large for exhaustive enumeration: {0}")]
    TooLarge(String),
}

/// Seat in the bargaining game. Player one always makes the opening proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn from_index(i: usize) -> Player {
        if i % 2 == 0 {
            Player::One
        } else {
            Player::Two
        }
    }

    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.index() + 1)
    }
}

/// Dynamics parameters `Barg(T, ε, γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// Maximum number of proposals `T`.
    pub max_rounds: u32,
    /// Per-round chance termination probability `ε`.
    pub terminate_prob: f64,
    /// Per-round discount `γ`.
    pub discount: f64,
}

impl GameParams {
    pub fn new(max_rounds: u32, terminate_prob: f64, discount: f64) -> Result<Self, GameError> {
        let p = GameParams { max_rounds, terminate_prob, discount };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), GameError> {
        if self.max_rounds < 1 {
            return Err(GameError::InvalidParams("max_rounds must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.terminate_prob) {
            return Err(GameError::InvalidParams(format!(
                "terminate_prob {} outside [0, 1]",
                self.terminate_prob
            )));
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return Err(GameError::InvalidParams(format!("discount {} outside (0, 1]", self.discount)));
        }
        Ok(())
    }
}

impl fmt::Display for GameParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Barg({}, {}, {})", self.max_rounds, self.terminate_prob, self.discount)
    }
}

pub(crate) fn dot(a: &Items, b: &Items) -> u32 {
    a.iter().zip(b).map(|(&x, &y)| x as u32 * y as u32).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(GameParams::new(10, 0.0, 1.0).is_ok());
        assert!(GameParams::new(30, 0.125, 0.935).is_ok());
        assert!(GameParams::new(0, 0.0, 1.0).is_err());
        assert!(GameParams::new(10, 1.5, 1.0).is_err());
        assert!(GameParams::new(10, 0.0, 0.0).is_err());
        assert!(GameParams::new(10, 0.0, 1.01).is_err());
    }
}
