use crate::game::{Action, InfoState};
use std::collections::HashMap;

/// Floor applied to probabilities before taking logits.
pub const LOGIT_FLOOR: f64 = 1e-12;

/// Statistics at one infostate of the player to move.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub actions: Vec<Action>,
    pub prior: Vec<f64>,
    /// Visit counts `C(s, a)`.
    pub counts: Vec<u32>,
    /// Return sums `R(s, a)` for the player to move.
    pub returns: Vec<f64>,
    /// Leaf value for the player to move, recorded at expansion.
    pub value: f64,
}

impl Node {
    pub fn new(s: &InfoState, prior: Vec<f64>, value: f64) -> Self {
        let actions = s.legal_actions().expect("nodes are non-terminal");
        let n = actions.len();
        Node { actions, prior, counts: vec![0; n], returns: vec![0.0; n], value }
    }

    pub fn total_visits(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn max_visits(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn logit(&self, a: usize) -> f64 {
        self.prior[a].max(LOGIT_FLOOR).ln()
    }

    /// Value estimate `q̂(s, a)`: the empirical mean once visited, otherwise
    /// a mixture of the node's own value and the prior-weighted mean of the
    /// visited arms, `(v + N / Σ_{visited} p · Σ_{visited} p q) / (1 + N)`.
    pub fn q_hat(&self, a: usize) -> f64 {
        if self.counts[a] > 0 {
            return self.returns[a] / self.counts[a] as f64;
        }
        let n = self.total_visits() as f64;
        if n == 0.0 {
            return self.value;
        }
        let (mut p_vis, mut pq) = (0.0, 0.0);
        for b in 0..self.counts.len() {
            if self.counts[b] > 0 {
                p_vis += self.prior[b];
                pq += self.prior[b] * self.returns[b] / self.counts[b] as f64;
            }
        }
        // a visited arm with zero prior mass contributes nothing to either sum
        let mixed = if p_vis > 0.0 { n / p_vis * pq } else { 0.0 };
        (self.value + mixed) / (1.0 + n)
    }

    /// Monotone value transform `G(q̂) = c2 (c1 + max_b C(s, b)) q̂`.
    pub fn g_transform(&self, q: f64, c1: f64, c2: f64) -> f64 {
        c2 * (c1 + self.max_visits() as f64) * q
    }

    /// `logit p + G(q̂)` per action, the logits of the improved policy.
    pub fn improved_logits(&self, c1: f64, c2: f64) -> Vec<f64> {
        (0..self.actions.len()).map(|a| self.logit(a) + self.g_transform(self.q_hat(a), c1, c2)).collect()
    }

    /// Improved policy `Imp(p) = softmax(logit p + G(q̂))`.
    pub fn improved_policy(&self, c1: f64, c2: f64) -> Vec<f64> {
        softmax(&self.improved_logits(c1, c2))
    }

    /// Visit frequencies at this node.
    pub fn visit_policy(&self) -> Vec<f64> {
        let n = self.total_visits();
        if n == 0 {
            return vec![1.0 / self.actions.len() as f64; self.actions.len()];
        }
        self.counts.iter().map(|&c| c as f64 / n as f64).collect()
    }
}

pub fn softmax(xs: &[f64]) -> Vec<f64> {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = xs.iter().map(|x| (x - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|x| x / z).collect()
}

/// Index of the largest score, the first one on ties.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Non-root selection: the action whose extra visit brings the visit
/// frequencies closest (in squared distance) to `imp`. Expanding the
/// quadratic shows this is the argmax of `imp(a) - C(a) / (1 + Σ C)`.
pub fn non_root_select(imp: &[f64], counts: &[u32]) -> usize {
    let denom = 1.0 + counts.iter().sum::<u32>() as f64;
    let scores: Vec<f64> = imp.iter().zip(counts).map(|(p, &c)| p - c as f64 / denom).collect();
    argmax(&scores)
}

/// The search tree: one node per acting player's infostate.
#[derive(Debug, Default, Clone)]
pub struct SearchTree {
    pub nodes: HashMap<String, Node>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{GameParams, History, Instance, Player};

    fn node(prior: Vec<f64>, counts: Vec<u32>, returns: Vec<f64>, value: f64) -> Node {
        let inst = Instance::new([0, 1, 0], [0, 10, 0], [0, 10, 0]).unwrap();
        let h = History::new(inst, GameParams::new(4, 0.0, 1.0).unwrap()).unwrap();
        let mut n = Node::new(&h.info_state(Player::One), prior.clone(), value);
        n.counts = counts;
        n.returns = returns;
        n.prior = prior;
        n
    }

    #[test]
    fn visited_arm_uses_its_mean() {
        let n = node(vec![0.5, 0.5], vec![2, 0], vec![4.0, 0.0], 0.0);
        assert_eq!(n.q_hat(0), 2.0);
        // G = 0.1 * (50 + 2) * 2
        assert!((n.g_transform(n.q_hat(0), 50.0, 0.1) - 10.4).abs() < 1e-12);
    }

    #[test]
    fn unvisited_arm_mixture_golden() {
        // one visited arm, mean 1, prior 0.5, three visits, node value 0
        let n = node(vec![0.5, 0.5], vec![3, 0], vec![3.0, 0.0], 0.0);
        assert!((n.q_hat(1) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn nothing_visited_gives_node_value() {
        let n = node(vec![0.5, 0.5], vec![0, 0], vec![0.0, 0.0], 3.5);
        assert_eq!(n.q_hat(0), 3.5);
        assert_eq!(n.q_hat(1), 3.5);
    }

    #[test]
    fn non_root_rule_examples() {
        assert_eq!(non_root_select(&[0.25; 4], &[0; 4]), 0);
        assert_eq!(non_root_select(&[0.8, 0.2], &[0, 0]), 0);
        assert_eq!(non_root_select(&[0.8, 0.2], &[4, 0]), 1);
    }
}
