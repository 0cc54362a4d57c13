//! Piecewise-linear approximation of `f(x) = x ln x` on `[0, 1]`.
//!
//! Segment `k` is the chord of `f` over `[k/K, (k+1)/K]`. `f` is convex, so
//! each chord lies above `f` on its own interval and below it elsewhere; the
//! pointwise maximum of all chords is the interpolant `l`, with
//! `f ≤ l ≤ f + 1/(eK)`.

use std::f64::consts::E;

/// `x ln x`, continuously extended with `f(0) = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Segment count that makes the summed approximation error over `n`
/// strategies smaller than `eps`: `⌊n / (e·eps)⌋ + 1`.
pub fn segments_for(n: usize, eps: f64) -> usize {
    assert!(eps > 0.0, "eps must be positive");
    (n as f64 / (E * eps)).floor() as usize + 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseEntropy {
    pub k: usize,
}

impl PiecewiseEntropy {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "need at least one segment");
        PiecewiseEntropy { k }
    }

    pub fn breakpoint(&self, k: usize) -> f64 {
        k as f64 / self.k as f64
    }

    /// Slope of segment `k`.
    pub fn slope(&self, k: usize) -> f64 {
        (xlogx(self.breakpoint(k + 1)) - xlogx(self.breakpoint(k))) * self.k as f64
    }

    /// Segment line `l_k(x) = f(k/K) + slope_k (x - k/K)`.
    pub fn line(&self, k: usize, x: f64) -> f64 {
        xlogx(self.breakpoint(k)) + self.slope(k) * (x - self.breakpoint(k))
    }

    /// The interpolant `l(x) = max_k l_k(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        (0..self.k).map(|k| self.line(k, x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Worst-case gap `1/(eK)`, attained on the first segment.
    pub fn bound(&self) -> f64 {
        1.0 / (E * self.k as f64)
    }

    /// Point of largest gap between segment `k ≥ 1` and `f`:
    /// `(k+1)/(eK) · (1 + 1/k)^k`.
    pub fn argmax_gap(&self, k: usize) -> f64 {
        assert!(k >= 1, "segment 0 peaks at 1/(eK)");
        let kf = k as f64;
        (kf + 1.0) / (E * self.k as f64) * (1.0 + 1.0 / kf).powf(kf)
    }

    /// Largest gap on segment `k`, in closed form.
    pub fn segment_gap(&self, k: usize) -> f64 {
        if k == 0 {
            return self.bound();
        }
        let kf = k as f64;
        let kk = self.k as f64;
        (kf + 1.0) / (E * kk) * (1.0 + 1.0 / kf).powf(kf) - kf * (kf + 1.0) / kk * (1.0 + 1.0 / kf).ln()
    }
}

/// Measured `max_k max_{x ∈ I_k} |f(x) - l_k(x)|` by dense sampling.
pub fn piecewise_bound_check(k: usize) -> f64 {
    const SAMPLES: usize = 4096;
    let pw = PiecewiseEntropy::new(k);
    let mut worst = 0.0f64;
    for seg in 0..k {
        let (a, b) = (pw.breakpoint(seg), pw.breakpoint(seg + 1));
        for i in 0..=SAMPLES {
            let x = a + (b - a) * i as f64 / SAMPLES as f64;
            worst = worst.max((xlogx(x) - pw.line(seg, x)).abs());
        }
        // the analytic peak, so sampling cannot miss it
        let x = if seg == 0 { 1.0 / (E * k as f64) } else { pw.argmax_gap(seg) };
        worst = worst.max((xlogx(x) - pw.line(seg, x)).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_strategies_at_five_hundredths() {
        assert_eq!(segments_for(17, 0.05), 126);
    }

    #[test]
    fn deviation_within_bound() {
        for k in [1, 2, 8, 32, 126] {
            let d = piecewise_bound_check(k);
            assert!(d <= 1.0 / (E * k as f64) + 1e-9, "K={k}: {d}");
        }
    }

    #[test]
    fn doubling_halves_deviation() {
        for k in [2, 8, 32] {
            let ratio = piecewise_bound_check(2 * k) / piecewise_bound_check(k);
            assert!(ratio <= 0.5 + 1e-6, "K={k}: {ratio}");
        }
    }

    #[test]
    fn interpolant_sandwiches_f() {
        let pw = PiecewiseEntropy::new(7);
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let l = pw.eval(x);
            assert!(l >= xlogx(x) - 1e-12 && l <= xlogx(x) + pw.bound() + 1e-12);
        }
    }

    #[test]
    fn analytic_argmax_is_a_local_maximum() {
        let pw = PiecewiseEntropy::new(20);
        let gap = |k: usize, x: f64| pw.line(k, x) - xlogx(x);
        for k in 1..20 {
            let x = pw.argmax_gap(k);
            assert!(x > pw.breakpoint(k) && x < pw.breakpoint(k + 1));
            let h = 1e-5;
            assert!(gap(k, x) >= gap(k, x - h) && gap(k, x) >= gap(k, x + h));
            assert!((gap(k, x) - pw.segment_gap(k)).abs() < 1e-12);
        }
    }
}
