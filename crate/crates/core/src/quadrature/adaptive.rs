//! Globally adaptive Gauss–Kronrod integration on one axis.

use num_complex::Complex64;
use std::collections::BinaryHeap;

use super::rule::{kronrod15, POINTS};
use super::{Estimate, Panel};

/// Absolute/relative stopping rule: stop once `error <= max(abs, rel·|value|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }

    fn met(&self, value: Complex64, error: f64) -> bool {
        error <= self.abs.max(self.rel * value.norm())
    }
}

fn apply_rule<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let r = kronrod15();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut k = Complex64::new(0.0, 0.0);
    let mut g = Complex64::new(0.0, 0.0);
    for i in 0..POINTS {
        let v = f(mid + half * r.nodes[i]);
        k += v * r.kronrod[i];
        g += v * r.gauss[i];
    }
    (k * half, ((k - g) * half).norm())
}

/// Integrates `f` over `[points[0], points[last]]`, seeding the subdivision at
/// every entry of `points` (which must be increasing).
pub fn integrate<F>(mut f: F, points: &[f64], tol: Tolerance, max_intervals: usize) -> Estimate
where
    F: FnMut(f64) -> Complex64,
{
    assert!(points.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = apply_rule(&mut f, w[0], w[1]);
        evaluations += POINTS;
        heap.push(Panel { error: e, lo: [w[0], 0.0], hi: [w[1], 0.0], value: v, axis: 0 });
    }
    loop {
        let value: Complex64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        let non_finite = !value.re.is_finite() || !value.im.is_finite();
        if tol.met(value, error) || heap.is_empty() {
            return Estimate { value, error, evaluations, converged: !non_finite };
        }
        if heap.len() >= max_intervals || non_finite {
            return Estimate { value, error, evaluations, converged: false };
        }
        let worst = heap.pop().expect("non-empty");
        let (a, b) = (worst.lo[0], worst.hi[0]);
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            // interval can no longer be split in floating point
            let value: Complex64 = heap.iter().map(|p| p.value).sum::<Complex64>() + worst.value;
            let error = heap.iter().map(|p| p.error).sum::<f64>() + worst.error;
            return Estimate { value, error, evaluations, converged: false };
        }
        for (lo, hi) in [(a, m), (m, b)] {
            let (v, e) = apply_rule(&mut f, lo, hi);
            evaluations += POINTS;
            heap.push(Panel { error: e, lo: [lo, 0.0], hi: [hi, 0.0], value: v, axis: 0 });
        }
    }
}

/// Integrates over the whole real line through `x = center + scale·tan θ`.
/// `features` are physical locations where the subdivision is seeded.
pub fn integrate_line<F>(mut f: F, center: f64, scale: f64, features: &[f64], tol: Tolerance, max_intervals: usize) -> Estimate
where
    F: FnMut(f64) -> Complex64,
{
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut pts = vec![-half_pi, half_pi];
    pts.extend(features.iter().map(|&x| ((x - center) / scale).atan()));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    integrate(
        |t| {
            let c = t.cos();
            f(center + scale * t.tan()) * (scale / (c * c))
        },
        &pts,
        tol,
        max_intervals,
    )
}
