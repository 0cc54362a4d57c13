use super::halving::HalvingState;
use super::tree::{non_root_select, Node};
use super::{SearchConfig, SearchError, SearchMode, SearchOutput, Searcher};
use crate::belief::{sample_world_state, Belief};
use crate::game::{GameParams, InfoState};
use crate::policy::{Policy, ValueFn};
use rand::distr::Open01;
use rand::{Rng, RngCore};

/// A standard Gumbel draw, `-ln(-ln u)` with `u` uniform on the open unit interval.
pub fn sample_gumbel(rng: &mut dyn RngCore) -> f64 {
    let u: f64 = rng.sample(Open01);
    -(-u.ln()).ln()
}

/// Gumbel score `g(a) + logit p(s, a) + G(q̂(s, a))`.
pub fn gumbel_score(node: &Node, a: usize, g: &[f64], cfg: &SearchConfig) -> f64 {
    g[a] + node.logit(a) + node.g_transform(node.q_hat(a), cfg.c1, cfg.c2)
}

/// Sorts `xs` by `score` descending, lower index first on ties.
fn rank_by(xs: &[usize], score: impl Fn(usize) -> f64) -> Vec<usize> {
    let mut v: Vec<(f64, usize)> = xs.iter().map(|&a| (score(a), a)).collect();
    v.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    v.into_iter().map(|(_, a)| a).collect()
}

impl Searcher<'_> {
    /// Gumbel IS-MCTS from infostate `s`.
    pub fn gumbel(&self, s: &InfoState, belief: &Belief, rng: &mut dyn RngCore) -> Result<SearchOutput, SearchError> {
        let cfg = self.cfg;
        if cfg.mode != SearchMode::Gumbel {
            return Err(SearchError::Config("gumbel search needs mode = gumbel".into()));
        }
        cfg.validate().map_err(SearchError::Config)?;
        let mut tree = self.init(s, belief, rng)?;
        let root_key = s.key();
        let n = tree.nodes[&root_key].actions.len();
        let g: Vec<f64> = (0..n).map(|_| sample_gumbel(rng)).collect();
        let m = cfg.k.min(n);
        let initial = {
            let root = &tree.nodes[&root_key];
            let all: Vec<usize> = (0..n).collect();
            let mut ranked = rank_by(&all, |a| g[a] + root.logit(a));
            ranked.truncate(m);
            ranked
        };
        let mut halving = HalvingState::new(cfg.num_sim, initial);
        let select = |node: &Node| non_root_select(&node.improved_policy(cfg.c1, cfg.c2), &node.counts);
        let mut trace = Vec::new();
        for _ in 0..cfg.num_sim {
            let h = sample_world_state(s, belief, &self.params, rng)?;
            let a0 = {
                let root = &tree.nodes[&root_key];
                halving.next(|xs| rank_by(xs, |a| gumbel_score(root, a, &g, cfg)))
            };
            let (path, r) = self.descend(&mut tree, h, &root_key, a0, &select, rng)?;
            if cfg.record_trace {
                trace.push(Self::trace_of(&tree, &path, r));
            }
            Self::backup(&mut tree, &path, r);
        }
        let root = tree.nodes[&root_key].clone();
        let winner = rank_by(&halving.survivors, |a| gumbel_score(&root, a, &g, cfg))[0];
        Ok(SearchOutput {
            action: root.actions[winner],
            visit_policy: root.visit_policy(),
            root,
            tree,
            simulations: cfg.num_sim,
            trace,
        })
    }
}

/// Gumbel IS-MCTS with prior `p` and leaf evaluator `v`.
pub fn gumbel_search(
    s: &InfoState,
    v: &dyn ValueFn,
    p: &dyn Policy,
    cfg: &SearchConfig,
    belief: &Belief,
    params: &GameParams,
    rng: &mut dyn RngCore,
) -> Result<SearchOutput, SearchError> {
    Searcher { params: *params, policy: p, value: v, cfg }.gumbel(s, belief, rng)
}
