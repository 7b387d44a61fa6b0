//! Closed-form leading-order results.

use num_complex::Complex64;

use crate::levels::CascadeParams;
use crate::overlap::{y1_reduced, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormResult<T> {
    pub value: T,
    pub validity: &'static str,
}

const LEADING: &str = "leading order in Γ";

/// Cross-generation overlap without a gate: zero for every β.
pub fn y1_raw(_beta: f64) -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `−2i/(Δ − i)`.
pub fn y2_raw(delta: f64) -> Complex64 {
    Complex64::new(0.0, -2.0) / Complex64::new(delta, -1.0)
}

/// `1/(2·sqrt(Δ² + 1))`, independent of β.
pub fn gamma_raw(delta: f64) -> f64 {
    0.5 / (delta * delta + 1.0).sqrt()
}

pub fn y2_raw_closed(delta: f64) -> ClosedFormResult<Complex64> {
    ClosedFormResult { value: y2_raw(delta), validity: LEADING }
}

pub fn gamma_raw_closed(delta: f64) -> ClosedFormResult<f64> {
    ClosedFormResult { value: gamma_raw(delta), validity: LEADING }
}

/// `γ(W_opt; β = 0) − 1/2` with `y2` dropped (`|Δ| ≫ 1`), through the
/// one-dimensional reduction. Zero at `g = 0`.
pub fn f_of_g(g: f64, quad: &QuadratureSpec) -> f64 {
    if g == 0.0 {
        return 0.0;
    }
    let p = CascadeParams { delta: 0.0, beta: 0.0, g };
    y1_reduced(&p, quad).value.norm() / 4.0 - 0.5
}
