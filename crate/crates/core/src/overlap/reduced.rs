//! One-dimensional route for the cross-generation overlap under the optimal
//! gate: with `s = κ1 + κ2` the inner integral no longer depends on the
//! parameters, leaving the kernel `F(s)` tabulated once.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{IntegralEstimate, QuadratureSpec};
use crate::levels::CascadeParams;
use crate::quadrature::{integrate_line, Tolerance};

/// `F(s) = ∫ dκ / (sqrt(κ² + 1)·sqrt((s − κ)² + 1))`, by direct quadrature.
pub fn kernel_f(s: f64) -> f64 {
    let s = s.abs();
    let scale = (0.5 * s).max(1.0);
    integrate_line(
        |k| Complex64::new(1.0 / ((k * k + 1.0).sqrt() * ((s - k) * (s - k) + 1.0).sqrt()), 0.0),
        0.5 * s,
        scale,
        &[0.0, s],
        Tolerance { abs: 1e-15, rel: 1e-13 },
        2000,
    )
    .value
    .re
}

/// `dF/ds` for s ≥ 0.
fn kernel_f_slope(s: f64) -> f64 {
    let scale = (0.5 * s).max(1.0);
    -integrate_line(
        |k| {
            let d = s - k;
            Complex64::new(d / ((k * k + 1.0).sqrt() * (d * d + 1.0).powf(1.5)), 0.0)
        },
        0.5 * s,
        scale,
        &[0.0, s],
        Tolerance { abs: 1e-15, rel: 1e-13 },
        2000,
    )
    .value
    .re
}

/// Cubic Hermite table of `F` in `ψ = ln(1 + s)` on `[0, ln(1 + s_max)]`;
/// `F` is even, and evaluated directly beyond `s_max`.
#[derive(Debug, Clone)]
pub struct ReducedKernel {
    step: f64,
    s_max: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl ReducedKernel {
    pub fn build(intervals: usize, s_max: f64) -> Self {
        let psi_max = s_max.ln_1p();
        let step = psi_max / intervals as f64;
        let mut values = Vec::with_capacity(intervals + 1);
        let mut slopes = Vec::with_capacity(intervals + 1);
        for i in 0..=intervals {
            let psi = step * i as f64;
            let s = psi.exp_m1();
            values.push(kernel_f(s));
            // dF/dψ = F'(s)·(1 + s)
            slopes.push(kernel_f_slope(s) * (1.0 + s));
        }
        ReducedKernel { step, s_max, values, slopes }
    }

    /// The process-wide table, built on first use and read-only afterwards.
    pub fn shared() -> &'static ReducedKernel {
        static TABLE: OnceLock<ReducedKernel> = OnceLock::new();
        TABLE.get_or_init(|| ReducedKernel::build(640, 1e6))
    }

    pub fn eval(&self, s: f64) -> f64 {
        let s = s.abs();
        if s >= self.s_max {
            return kernel_f(s);
        }
        let psi = s.ln_1p();
        let x = psi / self.step;
        let i = (x.floor() as usize).min(self.values.len() - 2);
        let t = x - i as f64;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[i] + h10 * self.step * self.slopes[i] + h01 * self.values[i + 1] + h11 * self.step * self.slopes[i + 1]
    }
}

/// `y1` under the optimal gate: `−(2/π²)∫ ds g/((s − S0)² + g²)·F(s)`.
///
/// The sign is the one the two-dimensional integral produces with the
/// optimal gate as defined in [`crate::gates::PhaseGate::Optimal`].
pub fn y1_reduced(params: &CascadeParams, quad: &QuadratureSpec) -> IntegralEstimate {
    let table = ReducedKernel::shared();
    let s0 = params.sum_detuning();
    let g = params.g;
    let est = integrate_line(
        |s| {
            let d = s - s0;
            Complex64::new(g / (d * d + g * g) * table.eval(s), 0.0)
        },
        s0,
        g,
        &[0.0],
        Tolerance::absolute(0.1 * quad.abs_tol * PI * PI / 2.0),
        quad.max_subdivisions.max(50),
    );
    let factor = -2.0 / (PI * PI);
    IntegralEstimate {
        value: est.value * factor,
        error: est.error * factor.abs(),
        evaluations: est.evaluations,
        converged: est.converged,
        truncation_change: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_at_zero_is_pi() {
        assert!((kernel_f(0.0) - PI).abs() < 1e-12);
        assert!((ReducedKernel::shared().eval(0.0) - PI).abs() < 1e-12);
    }

    #[test]
    fn f_is_even_and_decays_logarithmically() {
        for s in [0.3, 2.0, 40.0] {
            assert_eq!(kernel_f(s), kernel_f(-s));
        }
        // 4·ln(s)/s leading behaviour, approached slowly
        let ratio = |s: f64| kernel_f(s) / (4.0 * s.ln() / s);
        assert!((ratio(1e5) - 1.0).abs() < 0.1);
        assert!((ratio(1e8) - 1.0).abs() < (ratio(1e5) - 1.0).abs());
    }

    #[test]
    fn table_tracks_direct_quadrature() {
        let t = ReducedKernel::shared();
        for i in 0..200 {
            let s = 0.037 * (i * i) as f64;
            let (a, b) = (t.eval(s), kernel_f(s));
            assert!((a - b).abs() < 1e-9 * b.max(1e-3), "{s} {a} {b}");
        }
    }

    #[test]
    fn small_g_limit() {
        let p = CascadeParams { delta: 0.0, beta: 0.0, g: 0.01 };
        let y = y1_reduced(&p, &QuadratureSpec::default());
        assert!((y.value.re + 2.0).abs() < 0.02, "{y:?}");
        assert_eq!(y.value.im, 0.0);
    }

    #[test]
    fn pinned_value_at_g_two() {
        // independent Fourier-space evaluation: (8/π²)∫₀^∞ e^{−2t} K0(t)² dt
        let p = CascadeParams { delta: 0.0, beta: 0.0, g: 2.0 };
        let y = y1_reduced(&p, &QuadratureSpec { abs_tol: 1e-9, ..QuadratureSpec::default() });
        assert!((y.value.re + 1.484_907_490_843_088_7).abs() < 1e-8, "{y:?}");
    }
}
