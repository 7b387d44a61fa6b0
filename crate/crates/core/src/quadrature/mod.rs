//! Numerical integration used by the overlap engine: a one-dimensional
//! adaptive Gauss–Kronrod integrator, Filon-type weights for linear-phase
//! oscillations, and a two-dimensional adaptive tensor cubature.

pub mod adaptive;
pub mod filon;
pub mod plane;
pub mod rule;

use num_complex::Complex64;
use std::cmp::Ordering;

pub use adaptive::{integrate, integrate_line, Tolerance};
pub use plane::{integrate_plane, Axis, PlaneDomain};

/// A quadrature value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    /// False when the refinement budget ran out before the tolerance was met.
    pub converged: bool,
}

impl Estimate {
    pub fn exact(value: Complex64) -> Self {
        Estimate { value, error: 0.0, evaluations: 0, converged: true }
    }

    pub fn scale(self, factor: Complex64) -> Self {
        Estimate { value: self.value * factor, error: self.error * factor.norm(), ..self }
    }

    pub fn combine(self, other: Estimate) -> Self {
        Estimate {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel {
    pub error: f64,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub value: Complex64,
    pub axis: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}
