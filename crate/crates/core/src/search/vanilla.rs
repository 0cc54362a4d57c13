use super::tree::{argmax, Node};
use super::{SearchConfig, SearchError, SearchMode, SearchOutput, Searcher};
use crate::belief::{sample_world_state, Belief};
use crate::game::{GameParams, InfoState};
use crate::policy::{Policy, ValueFn};
use rand::RngCore;
use rand_distr::{Distribution, Gamma};

/// PUCT scores `Q(a) + c_puct P(a) sqrt(max(N, 1)) / (1 + C(a))`, with
/// `Q = 0` for unvisited actions and `N` the node's total visits.
fn puct(node: &Node, prior: &[f64], c_puct: f64) -> usize {
    let sqrt_n = (node.total_visits().max(1) as f64).sqrt();
    let scores: Vec<f64> = (0..node.actions.len())
        .map(|a| {
            let c = node.counts[a];
            let q = if c > 0 { node.returns[a] / c as f64 } else { 0.0 };
            q + c_puct * prior[a] * sqrt_n / (1.0 + c as f64)
        })
        .collect();
    argmax(&scores)
}

/// A Dirichlet(α, …, α) draw via normalised Gamma samples.
fn dirichlet(alpha: f64, n: usize, rng: &mut dyn RngCore) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("alpha is positive");
    let xs: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
    let total: f64 = xs.iter().sum();
    if total > 0.0 {
        xs.into_iter().map(|x| x / total).collect()
    } else {
        // every draw underflowed; all mass on the canonically first action
        (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect()
    }
}

impl Searcher<'_> {
    /// AlphaZero-style IS-MCTS from infostate `s`.
    pub fn vanilla(&self, s: &InfoState, belief: &Belief, rng: &mut dyn RngCore) -> Result<SearchOutput, SearchError> {
        let cfg = self.cfg;
        if cfg.mode != SearchMode::Vanilla {
            return Err(SearchError::Config("va search needs mode = vanilla".into()));
        }
        cfg.validate().map_err(SearchError::Config)?;
        let mut tree = self.init(s, belief, rng)?;
        let root_key = s.key();
        let root_prior = {
            let root = &tree.nodes[&root_key];
            let n = root.actions.len();
            let alpha = cfg.dirichlet_alpha.unwrap_or(1.0 / n as f64);
            let d = dirichlet(alpha, n, rng);
            root.prior.iter().zip(&d).map(|(p, d)| (1.0 - cfg.epsilon_mix) * p + cfg.epsilon_mix * d).collect::<Vec<_>>()
        };
        let select = |node: &Node| puct(node, &node.prior, cfg.c_puct);
        let mut trace = Vec::new();
        for _ in 0..cfg.num_sim {
            let h = sample_world_state(s, belief, &self.params, rng)?;
            let a0 = puct(&tree.nodes[&root_key], &root_prior, cfg.c_puct);
            let (path, r) = self.descend(&mut tree, h, &root_key, a0, &select, rng)?;
            if cfg.record_trace {
                trace.push(Self::trace_of(&tree, &path, r));
            }
            Self::backup(&mut tree, &path, r);
        }
        let root = tree.nodes[&root_key].clone();
        let counts: Vec<f64> = root.counts.iter().map(|&c| c as f64).collect();
        Ok(SearchOutput {
            action: root.actions[argmax(&counts)],
            visit_policy: root.visit_policy(),
            root,
            tree,
            simulations: cfg.num_sim,
            trace,
        })
    }
}

/// AlphaZero-style IS-MCTS with prior `p` and leaf evaluator `v`.
pub fn va_search(
    s: &InfoState,
    v: &dyn ValueFn,
    p: &dyn Policy,
    cfg: &SearchConfig,
    belief: &Belief,
    params: &GameParams,
    rng: &mut dyn RngCore,
) -> Result<SearchOutput, SearchError> {
    Searcher { params: *params, policy: p, value: v, cfg }.vanilla(s, belief, rng)
}
