//! Information-set MCTS.
//!
//! Each simulation samples a world state consistent with the root infostate
//! from a belief, then descends a tree keyed by the acting player's
//! infostate: the root by sequential halving on Gumbel scores (or PUCT with
//! Dirichlet noise), interior nodes by the visit-matching rule (or PUCT),
//! chance by sampling. Unexpanded infostates are added with the policy prior
//! and evaluated by the value function; the 2-vector of returns is backed up
//! along the path, each node accumulating its own mover's component.

mod agent;
mod config;
mod gumbel;
mod halving;
mod selfplay;
mod tree;
mod value;
mod vanilla;

pub use agent::SearchAgent;
pub use config::{SearchConfig, SearchMode};
pub use gumbel::{gumbel_search, gumbel_score, sample_gumbel};
pub use halving::{HalvingSchedule, HalvingState};
pub use selfplay::{self_play_train, tree_size_bound, Checkpoint, SelfPlayConfig, SelfPlayResult, TabularLearner, SELFPLAY_MAX_NODES};
pub use tree::{argmax, non_root_select, softmax, Node, SearchTree, LOGIT_FLOOR};
pub use value::{RolloutValue, ZeroValue};
pub use vanilla::va_search;

use crate::belief::{sample_world_state, Belief, BeliefError};
use crate::game::{Action, GameError, GameParams, History, InfoState};
use crate::policy::{validate_distribution, Policy, PolicyError, ValueFn};
use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error("provider failure after actions {prefix:?}: {source}")]
    Provider {
        prefix: Vec<Action>,
        #[source]
        source: PolicyError,
    },
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Game(#[from] GameError),
}

impl From<SearchError> for PolicyError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Provider { source, .. } => source,
            SearchError::Game(g) => PolicyError::Game(g),
            other => PolicyError::Other(other.to_string()),
        }
    }
}

/// Result of one search call.
#[derive(Debug, Clone)]
pub struct SearchOutput {
    pub action: Action,
    /// Normalised root visit counts, aligned with the root's legal actions.
    pub visit_policy: Vec<f64>,
    pub root: Node,
    /// The whole tree, root included.
    pub tree: SearchTree,
    pub simulations: usize,
    /// Per-simulation trajectories, kept when tracing is enabled.
    pub trace: Vec<TraceSim>,
}

/// One simulation: the tree steps taken and the returns backed up.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TraceSim {
    pub steps: Vec<(String, Action)>,
    pub returns: [f64; 2],
}

/// Providers and parameters shared by both search variants.
pub struct Searcher<'a> {
    pub params: GameParams,
    pub policy: &'a dyn Policy,
    pub value: &'a dyn ValueFn,
    pub cfg: &'a SearchConfig,
}

/// One step on a simulated trajectory: node key, action index, mover.
type Step = (String, usize, usize);

impl Searcher<'_> {
    /// Runs the variant selected by the configuration.
    pub fn run(&self, s: &InfoState, belief: &Belief, rng: &mut dyn RngCore) -> Result<SearchOutput, SearchError> {
        match self.cfg.mode {
            SearchMode::Gumbel => self.gumbel(s, belief, rng),
            SearchMode::Vanilla => self.vanilla(s, belief, rng),
        }
    }

    fn provider<T>(h: &History, r: Result<T, PolicyError>) -> Result<T, SearchError> {
        r.map_err(|source| SearchError::Provider { prefix: h.actions.clone(), source })
    }

    /// Adds the mover's infostate at `h` and returns the leaf evaluation.
    fn expand(&self, tree: &mut SearchTree, s: &InfoState, h: &History, rng: &mut dyn RngCore) -> Result<[f64; 2], SearchError> {
        let probs = Self::provider(h, self.policy.probs(s))?;
        Self::provider(h, validate_distribution(s, &probs))?;
        let r = Self::provider(h, self.value.values(s, h, rng))?;
        tree.nodes.insert(s.key(), Node::new(s, probs, r[s.player.index()]));
        Ok(r)
    }

    /// Samples a root world state and expands the root node.
    fn init(&self, s: &InfoState, belief: &Belief, rng: &mut dyn RngCore) -> Result<SearchTree, SearchError> {
        if s.is_terminal() {
            return Err(GameError::Terminal.into());
        }
        let mut tree = SearchTree::default();
        let h = sample_world_state(s, belief, &self.params, rng)?;
        self.expand(&mut tree, s, &h, rng)?;
        Ok(tree)
    }

    /// Plays root action `a0` from `h` and descends to a leaf, returning
    /// the trajectory and the returns to back up.
    fn descend(
        &self,
        tree: &mut SearchTree,
        mut h: History,
        root_key: &str,
        a0: usize,
        select: &dyn Fn(&Node) -> usize,
        rng: &mut dyn RngCore,
    ) -> Result<(Vec<Step>, [f64; 2]), SearchError> {
        let mover = h.current_player().expect("root is non-terminal").index();
        let action = tree.nodes[root_key].actions[a0];
        let mut path = vec![(root_key.to_string(), a0, mover)];
        h.step(action, rng)?;
        loop {
            let Some(player) = h.current_player() else {
                return Ok((path, h.returns()?.payoffs));
            };
            let s = h.info_state(player);
            let key = s.key();
            let Some(node) = tree.nodes.get(&key) else {
                let r = self.expand(tree, &s, &h, rng)?;
                return Ok((path, r));
            };
            let i = select(node);
            let a = node.actions[i];
            path.push((key, i, player.index()));
            h.step(a, rng)?;
        }
    }

    fn trace_of(tree: &SearchTree, path: &[Step], r: [f64; 2]) -> TraceSim {
        TraceSim { steps: path.iter().map(|(k, i, _)| (k.clone(), tree.nodes[k].actions[*i])).collect(), returns: r }
    }

    fn backup(tree: &mut SearchTree, path: &[Step], r: [f64; 2]) {
        for (key, i, mover) in path {
            let node = tree.nodes.get_mut(key).expect("path nodes are in the tree");
            node.counts[*i] += 1;
            node.returns[*i] += r[*mover];
        }
    }
}
