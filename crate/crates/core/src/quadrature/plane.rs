//! Adaptive tensor-product cubature over a rectangle of two mapped axes.
//!
//! Each rectangle is integrated by the 15×15 Kronrod product rule; the two
//! embedded 7×15 and 15×7 products give one error estimate per axis, and the
//! rectangle with the largest error is bisected along its worse axis.

use num_complex::Complex64;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::FRAC_PI_2;
use std::sync::{Arc, OnceLock, RwLock};

use super::filon::{oscillatory_weights, OscillatoryWeights};
use super::rule::{kronrod15, POINTS};
use super::{Estimate, Panel};

/// One integration axis and the map from its parameter to the physical variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    /// `x = center + scale·tan θ` with θ in `(lo, hi)` ⊆ (−π/2, π/2).
    Compact { center: f64, scale: f64, lo: f64, hi: f64 },
    /// `x` itself on `[lo, hi]`, carrying an exact `exp(i·freq·x)` factor.
    Window { lo: f64, hi: f64, freq: f64 },
}

impl Axis {
    pub fn real_line(center: f64, scale: f64) -> Self {
        Axis::Compact { center, scale, lo: -FRAC_PI_2, hi: FRAC_PI_2 }
    }

    /// `(bound, +∞)` through the tangent map centred at `center`.
    pub fn above(bound: f64, center: f64, scale: f64) -> Self {
        Axis::Compact { center, scale, lo: ((bound - center) / scale).atan(), hi: FRAC_PI_2 }
    }

    /// `(−∞, bound)` through the tangent map centred at `center`.
    pub fn below(bound: f64, center: f64, scale: f64) -> Self {
        Axis::Compact { center, scale, lo: -FRAC_PI_2, hi: ((bound - center) / scale).atan() }
    }

    pub fn window(lo: f64, hi: f64, freq: f64) -> Self {
        Axis::Window { lo, hi, freq }
    }

    pub fn frequency(&self) -> f64 {
        match self {
            Axis::Compact { .. } => 0.0,
            Axis::Window { freq, .. } => *freq,
        }
    }

    fn range(&self) -> (f64, f64) {
        match *self {
            Axis::Compact { lo, hi, .. } => (lo, hi),
            Axis::Window { lo, hi, .. } => (lo, hi),
        }
    }

    fn to_param(&self, x: f64) -> f64 {
        match *self {
            Axis::Compact { center, scale, .. } => ((x - center) / scale).atan(),
            Axis::Window { .. } => x,
        }
    }

    fn seeds(&self, cuts: &[f64]) -> Vec<f64> {
        let (lo, hi) = self.range();
        let mut pts = vec![lo, hi];
        pts.extend(cuts.iter().map(|&c| self.to_param(c)).filter(|&p| p > lo && p < hi));
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
        pts
    }

    fn nodes(&self, a: f64, b: f64) -> AxisNodes {
        let r = kronrod15();
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut out = AxisNodes { x: [0.0; POINTS], wk: [Complex64::new(0.0, 0.0); POINTS], wg: [Complex64::new(0.0, 0.0); POINTS] };
        match *self {
            Axis::Compact { center, scale, .. } => {
                for i in 0..POINTS {
                    let t = mid + half * r.nodes[i];
                    let c = t.cos();
                    let jac = half * scale / (c * c);
                    out.x[i] = center + scale * t.tan();
                    out.wk[i] = Complex64::new(r.kronrod[i] * jac, 0.0);
                    out.wg[i] = Complex64::new(r.gauss[i] * jac, 0.0);
                }
            }
            Axis::Window { freq, .. } => {
                let w = cached_weights(freq * half);
                let carrier = Complex64::from_polar(half, freq * mid);
                for i in 0..POINTS {
                    out.x[i] = mid + half * r.nodes[i];
                    out.wk[i] = w.kronrod[i] * carrier;
                    out.wg[i] = w.gauss[i] * carrier;
                }
            }
        }
        out
    }
}

struct AxisNodes {
    x: [f64; POINTS],
    wk: [Complex64; POINTS],
    wg: [Complex64; POINTS],
}

fn cached_weights(omega: f64) -> Arc<OscillatoryWeights> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<OscillatoryWeights>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    let key = omega.to_bits();
    if let Some(w) = cache.read().expect("weight cache poisoned").get(&key) {
        return Arc::clone(w);
    }
    let w = Arc::new(oscillatory_weights(omega));
    let mut guard = cache.write().expect("weight cache poisoned");
    if guard.len() > 8192 {
        guard.clear();
    }
    guard.insert(key, Arc::clone(&w));
    w
}

/// A two-axis integration problem; `cuts` are physical coordinates where the
/// initial subdivision is seeded (resonances, kinks).
#[derive(Debug, Clone)]
pub struct PlaneDomain {
    pub x: Axis,
    pub y: Axis,
    pub x_cuts: Vec<f64>,
    pub y_cuts: Vec<f64>,
}

impl PlaneDomain {
    pub fn new(x: Axis, y: Axis) -> Self {
        PlaneDomain { x, y, x_cuts: Vec::new(), y_cuts: Vec::new() }
    }

    pub fn with_cuts(mut self, x_cuts: Vec<f64>, y_cuts: Vec<f64>) -> Self {
        self.x_cuts = x_cuts;
        self.y_cuts = y_cuts;
        self
    }
}

fn apply_rule<F>(f: &F, x: &Axis, y: &Axis, lo: [f64; 2], hi: [f64; 2]) -> (Complex64, f64, f64)
where
    F: Fn(f64, f64) -> Complex64 + ?Sized,
{
    let nx = x.nodes(lo[0], hi[0]);
    let ny = y.nodes(lo[1], hi[1]);
    let mut kk = Complex64::new(0.0, 0.0);
    let mut gk = Complex64::new(0.0, 0.0);
    let mut kg = Complex64::new(0.0, 0.0);
    for i in 0..POINTS {
        let mut row_k = Complex64::new(0.0, 0.0);
        let mut row_g = Complex64::new(0.0, 0.0);
        for j in 0..POINTS {
            let v = f(nx.x[i], ny.x[j]);
            row_k += ny.wk[j] * v;
            row_g += ny.wg[j] * v;
        }
        kk += nx.wk[i] * row_k;
        gk += nx.wg[i] * row_k;
        kg += nx.wk[i] * row_g;
    }
    (kk, (kk - gk).norm(), (kk - kg).norm())
}

fn make_panel<F>(f: &F, d: &PlaneDomain, lo: [f64; 2], hi: [f64; 2]) -> Panel
where
    F: Fn(f64, f64) -> Complex64 + ?Sized,
{
    let (value, ex, ey) = apply_rule(f, &d.x, &d.y, lo, hi);
    let mut error = ex + ey;
    if !error.is_finite() {
        error = f64::INFINITY;
    }
    Panel { error, lo, hi, value, axis: if ex >= ey { 0 } else { 1 } }
}

/// Integrates `f(x, y)` (times the axes' exact oscillatory factors) over the
/// domain until the summed error estimate drops below `abs_tol` or the number
/// of rectangles reaches `max_rects`.
pub fn integrate_plane<F>(f: &F, domain: &PlaneDomain, abs_tol: f64, max_rects: usize) -> Estimate
where
    F: Fn(f64, f64) -> Complex64 + ?Sized,
{
    let xs = domain.x.seeds(&domain.x_cuts);
    let ys = domain.y.seeds(&domain.y_cuts);
    let per_rect = POINTS * POINTS;
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for wx in xs.windows(2) {
        for wy in ys.windows(2) {
            heap.push(make_panel(f, domain, [wx[0], wy[0]], [wx[1], wy[1]]));
            evaluations += per_rect;
        }
    }
    let mut value: Complex64 = heap.iter().map(|p| p.value).sum();
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    let mut splits = 0usize;
    loop {
        if splits.is_multiple_of(128) {
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
        let finite = value.re.is_finite() && value.im.is_finite() && error.is_finite();
        if finite && error <= abs_tol {
            return Estimate { value, error, evaluations, converged: true };
        }
        if heap.len() >= max_rects || !value.re.is_finite() || !value.im.is_finite() {
            break;
        }
        let worst = heap.pop().expect("non-empty heap");
        let ax = worst.axis;
        let m = 0.5 * (worst.lo[ax] + worst.hi[ax]);
        if m <= worst.lo[ax] || m >= worst.hi[ax] {
            // floating-point resolution exhausted
            heap.push(worst);
            break;
        }
        let mut hi_a = worst.hi;
        hi_a[ax] = m;
        let mut lo_b = worst.lo;
        lo_b[ax] = m;
        let a = make_panel(f, domain, worst.lo, hi_a);
        let b = make_panel(f, domain, lo_b, worst.hi);
        evaluations += 2 * per_rect;
        value += a.value + b.value - worst.value;
        error += a.error + b.error - worst.error;
        heap.push(a);
        heap.push(b);
        splits += 1;
    }
    let value: Complex64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    Estimate { value, error, evaluations, converged: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn product_of_lorentzians_on_the_plane() {
        let f = |x: f64, y: f64| Complex64::new(1.0 / (PI * PI * (1.0 + x * x) * (1.0 + y * y)), 0.0);
        let d = PlaneDomain::new(Axis::real_line(0.0, 1.0), Axis::real_line(0.0, 1.0));
        let est = integrate_plane(&f, &d, 1e-12, 1000);
        assert!(est.converged);
        assert!((est.value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_window_is_exact_beyond_resolution() {
        // ∫∫_{[0,2]²} e^{i(200x − 150y)} e^{−x−2y}; 60 and 45 periods per axis
        let f = |x: f64, y: f64| Complex64::new((-x - 2.0 * y).exp(), 0.0);
        let d = PlaneDomain::new(Axis::window(0.0, 2.0, 200.0), Axis::window(0.0, 2.0, -150.0));
        let est = integrate_plane(&f, &d, 1e-13, 4000);
        let one = |omega: f64, a: f64| {
            let z = Complex64::new(-a, omega);
            ((z * 2.0).exp() - 1.0) / z
        };
        let exact = one(200.0, 1.0) * one(-150.0, 2.0);
        assert!(est.converged, "{est:?}");
        assert!((est.value - exact).norm() < 1e-13, "{est:?} {exact}");
        assert!(est.evaluations < 64 * POINTS * POINTS, "{est:?}");
    }

    #[test]
    fn half_line_axis() {
        let f = |x: f64, _y: f64| Complex64::new((-x).exp(), 0.0);
        let d = PlaneDomain::new(Axis::above(0.0, 1.0, 1.0), Axis::window(0.0, 2.0, 0.0));
        let est = integrate_plane(&f, &d, 1e-11, 2000);
        assert!((est.value.re - 2.0).abs() < 1e-10, "{est:?}");
    }
}
