//! Best-response graphs aggregated over sampled meta-games.

use super::{SolverError, SymmetricGame};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Payoffs within this fraction of the span count as tied.
const TIE_TOL: f64 = 1e-9;

/// Edge `m1 → m2` weighs how often `m2` was a best response to `m1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrGraph {
    pub names: Vec<String>,
    /// Accumulated weights; divide by `replicates` for frequencies.
    pub weights: Vec<Vec<f64>>,
    pub replicates: u64,
}

impl BrGraph {
    pub fn new(names: Vec<String>) -> Self {
        let n = names.len();
        BrGraph { names, weights: vec![vec![0.0; n]; n], replicates: 0 }
    }

    /// Adds one game; tied best responses share the unit weight evenly.
    pub fn add(&mut self, game: &SymmetricGame) -> Result<(), SolverError> {
        let n = self.names.len();
        if game.n() != n {
            return Err(SolverError::Dimension { expected: n, got: game.n() });
        }
        let tol = TIE_TOL * game.span();
        for m1 in 0..n {
            let col: Vec<f64> = (0..n).map(|m| game.payoffs[m][m1]).collect();
            let best = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let winners: Vec<usize> = (0..n).filter(|&m| col[m] >= best - tol).collect();
            let w = 1.0 / winners.len() as f64;
            for m2 in winners {
                self.weights[m1][m2] += w;
            }
        }
        self.replicates += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &BrGraph) -> Result<(), SolverError> {
        if other.names != self.names {
            return Err(SolverError::Dimension { expected: self.names.len(), got: other.names.len() });
        }
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.replicates += other.replicates;
        Ok(())
    }

    pub fn frequency(&self, from: usize, to: usize) -> f64 {
        if self.replicates == 0 {
            0.0
        } else {
            self.weights[from][to] / self.replicates as f64
        }
    }

    /// Graphviz digraph with frequencies rounded to three decimals.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph best_response {\n");
        for (i, name) in self.names.iter().enumerate() {
            writeln!(s, "  n{i} [label={}];", quote(name)).unwrap();
        }
        for i in 0..self.names.len() {
            for j in 0..self.names.len() {
                let f = self.frequency(i, j);
                if f > 0.0 {
                    writeln!(s, "  n{i} -> n{j} [label=\"{f:.3}\"];").unwrap();
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
