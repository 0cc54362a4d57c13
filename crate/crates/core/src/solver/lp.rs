//! Dense two-phase primal simplex with bounded variables.
//!
//! Solves `min cᵀx` subject to rows `aᵢᵀx (= | ≤) bᵢ` and `0 ≤ x ≤ ub`.
//! Nonbasic variables rest at either bound, so box constraints cost no rows.
//! Problems here are small (tens of rows, a few thousand columns).

/// Feasibility and optimality tolerance.
pub const LP_TOL: f64 = 1e-9;

const MAX_ITERS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Eq,
    Le,
}

#[derive(Debug, Clone)]
pub struct Lp {
    pub cost: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<(Vec<f64>, RowKind, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

impl Lp {
    pub fn new(n: usize) -> Self {
        Lp { cost: vec![0.0; n], upper: vec![f64::INFINITY; n], rows: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, kind: RowKind, rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars(), "row width");
        self.rows.push((coeffs, kind, rhs));
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    /// `B⁻¹A` over all columns: structural, slack, artificial.
    t: Vec<Vec<f64>>,
    /// Values of the basic variables.
    beta: Vec<f64>,
    basis: Vec<usize>,
    at_upper: Vec<bool>,
    upper: Vec<f64>,
    n_struct: usize,
    n_art_start: usize,
}

impl Tableau {
    fn build(lp: &Lp) -> Self {
        let m = lp.rows.len();
        let n = lp.num_vars();
        let n_slack = lp.rows.iter().filter(|r| r.1 == RowKind::Le).count();
        let width = n + n_slack + m;
        let mut t = vec![vec![0.0; width]; m];
        let mut beta = vec![0.0; m];
        let mut upper = lp.upper.clone();
        upper.extend(std::iter::repeat_n(f64::INFINITY, n_slack + m));
        let mut slack = n;
        for (i, (coeffs, kind, rhs)) in lp.rows.iter().enumerate() {
            t[i][..n].copy_from_slice(coeffs);
            if *kind == RowKind::Le {
                t[i][slack] = 1.0;
                slack += 1;
            }
            let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
            for x in t[i].iter_mut() {
                *x *= sign;
            }
            t[i][n + n_slack + i] = 1.0;
            beta[i] = rhs * sign;
        }
        Tableau {
            t,
            beta,
            basis: (n + n_slack..width).collect(),
            at_upper: vec![false; width],
            upper,
            n_struct: n,
            n_art_start: n + n_slack,
        }
    }

    fn width(&self) -> usize {
        self.upper.len()
    }

    fn reduced_costs(&self, c: &[f64]) -> Vec<f64> {
        let mut d = c.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = c[b];
            if cb != 0.0 {
                for (dj, tij) in d.iter_mut().zip(&self.t[i]) {
                    *dj -= cb * tij;
                }
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, j: usize, d: &mut [f64]) {
        let p = self.t[r][j];
        for x in self.t[r].iter_mut() {
            *x /= p;
        }
        let row = self.t[r].clone();
        for (i, ti) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = ti[j];
            if f != 0.0 {
                for (x, y) in ti.iter_mut().zip(&row) {
                    *x -= f * y;
                }
            }
        }
        let f = d[j];
        if f != 0.0 {
            for (x, y) in d.iter_mut().zip(&row) {
                *x -= f * y;
            }
        }
        self.basis[r] = j;
    }

    /// Minimises `c` from the current basis. Returns false when unbounded.
    fn optimise(&mut self, c: &[f64]) -> bool {
        let mut d = self.reduced_costs(c);
        let mut in_basis = vec![false; self.width()];
        for &b in &self.basis {
            in_basis[b] = true;
        }
        let mut degenerate_run = 0usize;
        for _ in 0..MAX_ITERS {
            let bland = degenerate_run > 50;
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.width() {
                if in_basis[j] || self.upper[j] == 0.0 {
                    continue;
                }
                let gain = if self.at_upper[j] { d[j] } else { -d[j] };
                if gain > LP_TOL && entering.is_none_or(|(_, g)| !bland && gain > g) {
                    entering = Some((j, gain));
                }
            }
            let Some((j, _)) = entering else {
                return true;
            };
            let dir = if self.at_upper[j] { -1.0 } else { 1.0 };
            let mut step = self.upper[j];
            let mut leave: Option<(usize, bool)> = None;
            for i in 0..self.t.len() {
                let a = dir * self.t[i][j];
                let b = self.basis[i];
                let limit = if a > LP_TOL {
                    (self.beta[i] / a, false)
                } else if a < -LP_TOL && self.upper[b].is_finite() {
                    ((self.upper[b] - self.beta[i]) / -a, true)
                } else {
                    continue;
                };
                let lim = limit.0.max(0.0);
                let better = match leave {
                    None => lim < step,
                    Some((r, _)) => lim < step || (lim == step && self.basis[i] < self.basis[r]),
                };
                if better {
                    step = lim;
                    leave = Some((i, limit.1));
                }
            }
            if step.is_infinite() {
                return false;
            }
            degenerate_run = if step <= LP_TOL { degenerate_run + 1 } else { 0 };
            for i in 0..self.t.len() {
                self.beta[i] -= dir * self.t[i][j] * step;
            }
            match leave {
                None => self.at_upper[j] = !self.at_upper[j],
                Some((r, to_upper)) => {
                    let out = self.basis[r];
                    let entering_value = if self.at_upper[j] { self.upper[j] - step } else { step };
                    self.at_upper[j] = false;
                    self.at_upper[out] = to_upper;
                    in_basis[out] = false;
                    in_basis[j] = true;
                    self.pivot(r, j, &mut d);
                    self.beta[r] = entering_value;
                }
            }
        }
        panic!("simplex iteration limit reached");
    }

    fn value(&self, j: usize) -> f64 {
        if let Some(i) = self.basis.iter().position(|&b| b == j) {
            self.beta[i]
        } else if self.at_upper[j] {
            self.upper[j]
        } else {
            0.0
        }
    }

    fn run(mut self, lp: &Lp) -> LpOutcome {
        let w = self.width();
        let phase1: Vec<f64> = (0..w).map(|j| if j >= self.n_art_start { 1.0 } else { 0.0 }).collect();
        self.optimise(&phase1);
        let infeasibility: f64 = (self.n_art_start..w).map(|j| self.value(j)).sum();
        let scale = 1.0 + lp.rows.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
        if infeasibility > LP_TOL * scale * 10.0 {
            return LpOutcome::Infeasible;
        }
        for j in self.n_art_start..w {
            self.upper[j] = 0.0;
        }
        for i in 0..self.t.len() {
            if self.basis[i] >= self.n_art_start {
                self.beta[i] = 0.0;
            }
        }
        let mut c = lp.cost.clone();
        c.resize(w, 0.0);
        if !self.optimise(&c) {
            return LpOutcome::Unbounded;
        }
        let x: Vec<f64> = (0..self.n_struct).map(|j| self.value(j).clamp(0.0, lp.upper[j])).collect();
        let objective = x.iter().zip(&lp.cost).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, objective }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn optimal(lp: &Lp) -> (Vec<f64>, f64) {
        match lp.solve() {
            LpOutcome::Optimal { x, objective } => (x, objective),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let mut lp = Lp::new(2);
        lp.cost = vec![-3.0, -5.0];
        lp.add_row(vec![1.0, 0.0], RowKind::Le, 4.0);
        lp.add_row(vec![0.0, 2.0], RowKind::Le, 12.0);
        lp.add_row(vec![3.0, 2.0], RowKind::Le, 18.0);
        let (x, obj) = optimal(&lp);
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
        assert!((obj + 36.0).abs() < 1e-9);
    }

    #[test]
    fn upper_bounds_without_rows() {
        let mut lp = Lp::new(3);
        lp.cost = vec![-1.0, -2.0, -3.0];
        lp.upper = vec![1.0, 1.0, 1.0];
        lp.add_row(vec![1.0, 1.0, 1.0], RowKind::Le, 2.0);
        let (x, obj) = optimal(&lp);
        assert_eq!(x, vec![0.0, 1.0, 1.0]);
        assert!((obj + 5.0).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = Lp::new(1);
        lp.add_row(vec![1.0], RowKind::Eq, -1.0);
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
        let mut lp = Lp::new(2);
        lp.cost = vec![-1.0, 0.0];
        lp.add_row(vec![1.0, -1.0], RowKind::Le, 1.0);
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_equality() {
        // x - y = -2, min x + y → (0, 2)
        let mut lp = Lp::new(2);
        lp.cost = vec![1.0, 1.0];
        lp.add_row(vec![1.0, -1.0], RowKind::Eq, -2.0);
        let (x, _) = optimal(&lp);
        assert!((x[0]).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    /// Brute force over vertices of a 2-variable box-and-rows polygon.
    fn vertex_oracle(cost: [f64; 2], ub: [f64; 2], rows: &[([f64; 2], f64)]) -> Option<f64> {
        let mut lines: Vec<([f64; 2], f64)> = rows.to_vec();
        lines.push(([1.0, 0.0], 0.0));
        lines.push(([0.0, 1.0], 0.0));
        lines.push(([1.0, 0.0], ub[0]));
        lines.push(([0.0, 1.0], ub[1]));
        let feasible = |x: [f64; 2]| {
            x[0] >= -1e-9
                && x[1] >= -1e-9
                && x[0] <= ub[0] + 1e-9
                && x[1] <= ub[1] + 1e-9
                && rows.iter().all(|(a, b)| a[0] * x[0] + a[1] * x[1] <= b + 1e-9)
        };
        let mut best: Option<f64> = None;
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (a, b) = (lines[i], lines[j]);
                let det = a.0[0] * b.0[1] - a.0[1] * b.0[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = [(a.1 * b.0[1] - a.0[1] * b.1) / det, (a.0[0] * b.1 - a.1 * b.0[0]) / det];
                if feasible(x) {
                    let v = cost[0] * x[0] + cost[1] * x[1];
                    best = Some(best.map_or(v, |b: f64| b.min(v)));
                }
            }
        }
        best
    }

    proptest! {
        #[test]
        fn matches_vertex_enumeration(
            cost in prop::array::uniform2(-5i32..5),
            ub in prop::array::uniform2(1i32..6),
            rows in prop::collection::vec((prop::array::uniform2(-4i32..5), -3i32..10), 0..4),
        ) {
            let cost = cost.map(f64::from);
            let ub = ub.map(f64::from);
            let rows: Vec<([f64; 2], f64)> = rows.into_iter().map(|(a, b)| (a.map(f64::from), b as f64)).collect();
            let mut lp = Lp::new(2);
            lp.cost = cost.to_vec();
            lp.upper = ub.to_vec();
            for (a, b) in &rows {
                lp.add_row(a.to_vec(), RowKind::Le, *b);
            }
            match (lp.solve(), vertex_oracle(cost, ub, &rows)) {
                (LpOutcome::Optimal { objective, .. }, Some(v)) => prop_assert!((objective - v).abs() < 1e-7),
                (LpOutcome::Infeasible, None) => {}
                (got, want) => prop_assert!(false, "{got:?} vs {want:?}"),
            }
        }
    }
}
