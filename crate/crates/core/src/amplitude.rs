//! Lorentzian emission amplitudes and the two-photon wave packets of the two
//! decay channels.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::levels::{complex_energies, ComplexEnergy, LevelDiagram};
use crate::overlap::domain::{integrate_pair, PairLayout, Region};
use crate::overlap::QuadratureSpec;

/// Polarization label of a decay channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    X,
    Y,
}

impl Channel {
    pub fn label(self) -> &'static str {
        match self {
            Channel::X => "x",
            Channel::Y => "y",
        }
    }
}

/// How photon energies enter the Lorentzians.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// `|k|` as in the emission amplitude proper.
    Literal,
    /// Absolute values dropped; the leading-order engine works this way.
    #[default]
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavevectorPair {
    pub k1: f64,
    pub k2: f64,
}

impl WavevectorPair {
    pub fn new(k1: f64, k2: f64) -> Self {
        WavevectorPair { k1, k2 }
    }

    pub fn swapped(self) -> Self {
        WavevectorPair { k1: self.k2, k2: self.k1 }
    }
}

/// `A(k, Z) = sqrt(Γ/π) / (k − Z)` with Γ the half-width of `z`.
pub fn lorentzian(k: f64, z: ComplexEnergy) -> Complex64 {
    (z.half_width / PI).sqrt() / (k - z.z())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonAmplitude {
    pub channel: Channel,
    pub diagram: LevelDiagram,
    pub mode: EvalMode,
}

impl TwoPhotonAmplitude {
    pub fn new(channel: Channel, diagram: LevelDiagram) -> Self {
        TwoPhotonAmplitude { channel, diagram, mode: EvalMode::Analytic }
    }

    pub fn literal(channel: Channel, diagram: LevelDiagram) -> Self {
        TwoPhotonAmplitude { channel, diagram, mode: EvalMode::Literal }
    }

    /// `(Z_u, Z_j)` with energies measured from the ground level.
    pub fn poles(&self) -> (ComplexEnergy, ComplexEnergy) {
        let (zu, zx, zy) = complex_energies(&self.diagram);
        let e0 = self.diagram.e_0;
        let zj = match self.channel {
            Channel::X => zx,
            Channel::Y => zy,
        };
        (ComplexEnergy::new(zu.real_part - e0, zu.half_width), ComplexEnergy::new(zj.real_part - e0, zj.half_width))
    }

    /// `|(E_u − E_j) − (E_j − E_0)|`: how far apart the two colors of the channel are.
    pub fn color_separation(&self) -> f64 {
        let (zu, zj) = self.poles();
        (zu.real_part - 2.0 * zj.real_part).abs()
    }

    pub fn eval(&self, kk: WavevectorPair) -> Complex64 {
        let (zu, zj) = self.poles();
        let (k1, k2) = match self.mode {
            EvalMode::Literal => (kk.k1.abs(), kk.k2.abs()),
            EvalMode::Analytic => (kk.k1, kk.k2),
        };
        lorentzian(k1 + k2, zu) * (lorentzian(k1, zj) + lorentzian(k2, zj))
    }

    pub(crate) fn layout(&self) -> PairLayout {
        let (zu, zj) = self.poles();
        PairLayout {
            sum_center: zu.real_part,
            sum_width: zu.half_width,
            photon_features: vec![zj.real_part, zu.real_part - zj.real_part],
            photon_width: zj.half_width,
            unit: zj.half_width,
        }
    }
}

pub fn eval_alpha(a: &TwoPhotonAmplitude, kk: WavevectorPair) -> Complex64 {
    a.eval(kk)
}

/// `⟨α_j|α_j⟩` split into the two direct terms and the cross term between
/// the two summands of the wave packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub error: f64,
    pub direct: f64,
    pub cross: f64,
    pub converged: bool,
}

pub fn norm_squared(a: &TwoPhotonAmplitude, quad: &QuadratureSpec) -> NormEstimate {
    let (zu, zj) = a.poles();
    let literal = a.mode == EvalMode::Literal;
    let region = if literal { Region::PositiveQuadrant } else { Region::Plane };
    let layout = a.layout();
    let q = QuadratureSpec { abs_tol: quad.abs_tol.min(1e-8), max_subdivisions: quad.max_subdivisions.max(100_000), ..*quad };
    let fold = |k: f64| if literal { k.abs() } else { k };
    // both direct terms are the same integral after k1 ↔ k2; integrate the
    // one whose single-photon ridge lies along the k1 axis
    let direct = integrate_pair(
        &|k1: f64, k2: f64| {
            let (k1, k2) = (fold(k1), fold(k2));
            Complex64::new(2.0 * lorentzian(k1 + k2, zu).norm_sqr() * lorentzian(k1, zj).norm_sqr(), 0.0)
        },
        (0.0, 0.0),
        &layout,
        region,
        &q,
    );
    let cross = integrate_pair(
        &|k1: f64, k2: f64| {
            let (k1, k2) = (fold(k1), fold(k2));
            let u = lorentzian(k1 + k2, zu).norm_sqr();
            Complex64::new(2.0 * u * (lorentzian(k1, zj).conj() * lorentzian(k2, zj)).re, 0.0)
        },
        (0.0, 0.0),
        &layout,
        region,
        &q,
    );
    let (d, c) = (direct.estimate, cross.estimate);
    NormEstimate {
        value: d.value.re + c.value.re,
        error: d.error + c.error,
        direct: d.value.re,
        cross: c.value.re,
        converged: d.converged && c.converged,
    }
}
