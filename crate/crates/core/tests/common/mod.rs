//! Oracles shared by integration test targets.
#![allow(dead_code)]

/// Grid steps per unit for the brute-force equilibrium search.
pub const GRID: i64 = 1000;

/// Brute-force max entropy over symmetric profiles on the `1/GRID` simplex
/// grid. Entry `i` of the result covers profiles where every played strategy
/// earns within `tols[i]` of the best payoff against the profile; `tol = 0`
/// keeps exact equilibria only. Payoffs must be integers.
pub fn grid_max_entropy(u: &[Vec<i64>], tols: &[f64]) -> Vec<Option<f64>> {
    let h: Vec<f64> = (0..=GRID)
        .map(|c| {
            let p = c as f64 / GRID as f64;
            if c == 0 { 0.0 } else { -p * p.ln() }
        })
        .collect();
    // payoff gaps are compared in units of 1/GRID
    let limits: Vec<i64> = tols.iter().map(|t| (t * GRID as f64 + 1e-9).floor() as i64).collect();
    let mut g = Grid { u, h, limits, best: vec![None; tols.len()] };
    let mut c = vec![0i64; u.len()];
    g.rec(0, GRID, &mut c);
    g.best
}

struct Grid<'a> {
    u: &'a [Vec<i64>],
    h: Vec<f64>,
    limits: Vec<i64>,
    best: Vec<Option<f64>>,
}

impl Grid<'_> {
    fn rec(&mut self, i: usize, left: i64, c: &mut Vec<i64>) {
        let n = self.u.len();
        if i + 1 == n {
            c[i] = left;
            let v: Vec<i64> = (0..n).map(|r| (0..n).map(|j| self.u[r][j] * c[j]).sum()).collect();
            let e: f64 = c.iter().map(|&x| self.h[x as usize]).sum();
            self.record(&v, c, e);
            return;
        }
        if i + 2 < n {
            for x in 0..=left {
                c[i] = x;
                self.rec(i + 1, left - x, c);
            }
            return;
        }
        // last two coordinates: every gap between payoffs is linear in c[i], so
        // the admissible values form an interval and the entropy, concave and
        // symmetric in c[i], peaks at the admissible point nearest left/2
        c[i] = 0;
        c[i + 1] = left;
        let v0: Vec<i64> = (0..n).map(|r| (0..n).map(|j| self.u[r][j] * c[j]).sum()).collect();
        let delta: Vec<i64> = (0..n).map(|r| self.u[r][i] - self.u[r][i + 1]).collect();
        let base: f64 = (0..i).map(|j| self.h[c[j] as usize]).sum();
        for x in [0, left] {
            c[i] = x;
            c[i + 1] = left - x;
            let v: Vec<i64> = (0..n).map(|r| v0[r] + delta[r] * x).collect();
            let e = base + self.h[x as usize] + self.h[(left - x) as usize];
            self.record(&v, c, e);
        }
        if left < 2 {
            return;
        }
        let played: Vec<usize> = (0..n).filter(|&r| r >= i || c[r] > 0).collect();
        for k in 0..self.limits.len() {
            let limit = self.limits[k];
            let (mut lo, mut hi) = (1i64, left - 1);
            for &r in &played {
                for j in 0..n {
                    // v_j(x) - v_r(x) = a + b x <= limit
                    let a = v0[j] - v0[r];
                    let b = delta[j] - delta[r];
                    let rhs = limit - a;
                    match b.cmp(&0) {
                        std::cmp::Ordering::Equal if rhs < 0 => hi = -1,
                        std::cmp::Ordering::Equal => {}
                        std::cmp::Ordering::Greater => hi = hi.min(rhs.div_euclid(b)),
                        std::cmp::Ordering::Less => lo = lo.max(-rhs.div_euclid(-b)),
                    }
                }
            }
            if lo > hi {
                continue;
            }
            let best = [left / 2, (left + 1) / 2]
                .into_iter()
                .map(|x| x.clamp(lo, hi))
                .map(|x| base + self.h[x as usize] + self.h[(left - x) as usize])
                .fold(f64::NEG_INFINITY, f64::max);
            if self.best[k].is_none_or(|b| best > b) {
                self.best[k] = Some(best);
            }
        }
    }

    fn record(&mut self, v: &[i64], c: &[i64], e: f64) {
        let max = *v.iter().max().unwrap();
        let worst = v.iter().zip(c).filter(|(_, k)| **k > 0).map(|(x, _)| max - x).max().unwrap_or(0);
        for (b, &limit) in self.best.iter_mut().zip(&self.limits) {
            if worst <= limit && b.is_none_or(|b| e > b) {
                *b = Some(e);
            }
        }
    }
}

pub fn to_f64(u: &[Vec<i64>]) -> Vec<Vec<f64>> {
    u.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect()
}

/// Checks a max-entropy solution against the grid: no exact grid
/// equilibrium beats it by more than `eps`, and it sits within `eps` of the
/// best profile at grid resolution. Returns a description on failure.
pub fn check_against_grid(u: &[Vec<i64>], entropy: f64, eps: f64) -> Result<(), String> {
    let span = {
        let flat: Vec<i64> = u.iter().flatten().cloned().collect();
        (flat.iter().max().unwrap() - flat.iter().min().unwrap()) as f64
    };
    let r = grid_max_entropy(u, &[0.0, span / GRID as f64]);
    let exact = r[0].unwrap_or(f64::NEG_INFINITY);
    let near = r[1].ok_or("no profile at grid resolution")?;
    if entropy < exact - eps {
        return Err(format!("exact grid equilibrium has entropy {exact}, solver {entropy}"));
    }
    if entropy > near + eps {
        return Err(format!("grid finds at most {near} near equilibrium, solver {entropy}"));
    }
    Ok(())
}

/// Plain walk over every grid point, used to check the interval shortcut.
pub fn grid_max_entropy_naive(u: &[Vec<i64>], tols: &[f64]) -> Vec<Option<f64>> {
    let n = u.len();
    let limits: Vec<i64> = tols.iter().map(|t| (t * GRID as f64 + 1e-9).floor() as i64).collect();
    let h = |c: i64| if c == 0 { 0.0 } else { let p = c as f64 / GRID as f64; -p * p.ln() };
    let mut best = vec![None; tols.len()];
    let mut c = vec![0i64; n];
    fn walk(i: usize, left: i64, c: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
        if i + 1 == c.len() {
            c[i] = left;
            f(c);
            return;
        }
        for x in 0..=left {
            c[i] = x;
            walk(i + 1, left - x, c, f);
        }
    }
    walk(0, GRID, &mut c, &mut |c| {
        let v: Vec<i64> = (0..n).map(|r| (0..n).map(|j| u[r][j] * c[j]).sum()).collect();
        let max = *v.iter().max().unwrap();
        let worst = v.iter().zip(c).filter(|(_, k)| **k > 0).map(|(x, _)| max - x).max().unwrap_or(0);
        let e: f64 = c.iter().map(|&x| h(x)).sum();
        for (b, &limit) in best.iter_mut().zip(&limits) {
            if worst <= limit && b.is_none_or(|b: f64| e > b) {
                *b = Some(e);
            }
        }
    });
    best
}
