//! Two-photon emission of a four-level radiative cascade, spectral phase
//! gates acting on the photon pair, and the polarization entanglement of the
//! gated state.

// `!(x > 0.0)` is how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod amplitude;
pub mod analytic;
pub mod cli;
pub mod gates;
pub mod levels;
pub mod negativity;
pub mod overlap;
pub mod quadrature;
pub mod sweeps;
