//! Meta-game evaluation of multiagent training algorithms.
//!
//! The crate is organised around the evaluation pipeline:
//!
//! * [`game`]: the Deal-or-No-Deal alternating-offers bargaining game,
//!   parametrised by round cap, chance termination and discount.
//! * [`policy`]: policy providers: heuristics, tabular policies, per-episode
//!   seed mixtures and an adapter for externally trained policies.
//! * [`belief`]: exact Bayesian posteriors over the opponent's private valuation.
//! * [`search`]: Gumbel information-set MCTS, AlphaZero-style IS-MCTS and a
//!   tabular self-play loop.
//! * [`exact`]: enumeration oracles for toy-sized games (best responses,
//!   expected payoffs, backward induction).
//! * [`metagame`]: payoff-table estimation, seed resampling and the bootstrap
//!   over symmetric empirical meta-games.
//! * [`solver`]: regret, a max-entropy symmetric Nash solver built on a small
//!   simplex LP, meta-game statistics and best-response graphs.
//! * [`experiment`]: configuration, orchestration and report emission used by
//!   the command-line front end.

pub mod belief;
pub mod exact;
pub mod experiment;
pub mod game;
pub mod metagame;
pub mod policy;
pub mod rng;
pub mod search;
pub mod solver;

pub use game::{Action, GameParams, History, InfoState, Instance, InstanceDb, Outcome, Player};
pub use policy::{Agent, Policy, ValueFn};
