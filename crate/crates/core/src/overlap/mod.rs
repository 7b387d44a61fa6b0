//! Overlap integrals between the gated channels and the negativity γ.
//!
//! Leading-order integrals work in the dimensionless frame: photon energies
//! in units of Γ, measured from `(E_x + E_y)/2`. There `Z_x = −Δ − i`,
//! `Z_y = Δ − i`, and the top-level Lorentzian is
//! `g/((k1 + k2 − S0)² + g²)` with `S0 = (E_u − E_x − E_y + E_0)/Γ = 2β`.

pub mod domain;
mod reduced;

use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use thiserror::Error;

use crate::amplitude::{lorentzian, norm_squared, Channel, EvalMode, NormEstimate, TwoPhotonAmplitude};
use crate::gates::PhaseGate;
use crate::levels::{CascadeParams, LevelDiagram, LevelError};
use domain::{integrate_pair, PairIntegral, PairLayout, Region};

pub use reduced::{kernel_f, y1_reduced, ReducedKernel};

/// Leading-order norm of the two channels together.
pub const LEADING_DENOMINATOR: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OverlapError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Level(#[from] LevelError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Box half-width K in units of Γ. `None` maps non-oscillatory axes onto
    /// the whole line and sizes oscillatory windows automatically.
    pub truncation_halfwidth: Option<f64>,
    /// Re-run truncated integrals at 2K and report the change.
    pub richardson_check: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-6, max_subdivisions: 20_000, truncation_halfwidth: None, richardson_check: true }
    }
}

impl QuadratureSpec {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadratureSpec { abs_tol, ..QuadratureSpec::default() }
    }

    /// `50·max(1, g, |β|, |Δ|)`.
    pub fn default_halfwidth(params: &CascadeParams) -> f64 {
        50.0 * 1f64.max(params.g).max(params.beta.abs()).max(params.delta.abs())
    }

    /// The explicit `[−K, K]²` box with the default K for `params`.
    pub fn boxed(self, params: &CascadeParams) -> Self {
        QuadratureSpec { truncation_halfwidth: Some(QuadratureSpec::default_halfwidth(params)), ..self }
    }

    pub fn validate(&self) -> Result<(), OverlapError> {
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(OverlapError::InvalidSpec(format!("abs_tol must be > 0, got {}", self.abs_tol)));
        }
        if self.max_subdivisions == 0 {
            return Err(OverlapError::InvalidSpec("max_subdivisions must be positive".into()));
        }
        if let Some(k) = self.truncation_halfwidth {
            if !(k > 0.0) || !k.is_finite() {
                return Err(OverlapError::InvalidSpec(format!("K must be > 0, got {k}")));
            }
        }
        Ok(())
    }
}

/// Which pairing of photon slots the gate sees in the numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Numerator {
    /// `W(k1, k2)` over the whole plane.
    #[default]
    AsWritten,
    /// `(W(k1, k2) + W(k2, k1))/2`.
    Symmetrized,
    /// The gate's first slot is the photon on the `E_x` side of `k1 = k2`.
    ColorOrdered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapMode {
    DimensionlessLeadingOrder,
    FullDiagram,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    Unconverged { integral: &'static str, error: f64 },
    Truncation { integral: &'static str, change: f64 },
    NormDeviation { channel: &'static str, norm: f64 },
    NearDegenerateColors { channel: &'static str, separation: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Unconverged { integral, error } => write!(f, "{integral}: quadrature did not converge (error {error:.3e})"),
            Warning::Truncation { integral, change } => write!(f, "{integral}: doubling K changed the value by {change:.3e}"),
            Warning::NormDeviation { channel, norm } => write!(f, "channel {channel}: norm {norm:.6} deviates from 2 by more than 5%"),
            Warning::NearDegenerateColors { channel, separation } => {
                write!(f, "channel {channel}: colors only {separation:.3} widths apart")
            }
        }
    }
}

/// A quadrature value with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralEstimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub truncation_change: Option<f64>,
}

impl IntegralEstimate {
    fn from_pair(p: PairIntegral) -> Self {
        IntegralEstimate {
            value: p.estimate.value,
            error: p.estimate.error,
            evaluations: p.estimate.evaluations,
            converged: p.estimate.converged,
            truncation_change: p.truncation_change,
        }
    }

    fn scaled(self, c: Complex64) -> Self {
        IntegralEstimate { value: self.value * c, error: self.error * c.norm(), ..self }
    }

    fn plus(self, o: IntegralEstimate) -> Self {
        let truncation_change = match (self.truncation_change, o.truncation_change) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(0.0) + b.unwrap_or(0.0)),
        };
        IntegralEstimate {
            value: self.value + o.value,
            error: self.error + o.error,
            evaluations: self.evaluations + o.evaluations,
            converged: self.converged && o.converged,
            truncation_change,
        }
    }

    fn warnings(&self, integral: &'static str, quad: &QuadratureSpec, out: &mut Vec<Warning>) {
        if !self.converged {
            out.push(Warning::Unconverged { integral, error: self.error });
        }
        if let Some(change) = self.truncation_change {
            if change > 10.0 * quad.abs_tol {
                out.push(Warning::Truncation { integral, change });
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapResult {
    pub y1: Complex64,
    pub y2: Complex64,
    pub norm_denominator: f64,
    pub gamma: f64,
    pub error_estimate: f64,
    pub mode: OverlapMode,
    /// `(⟨α_x|α_x⟩, ⟨α_y|α_y⟩)`.
    pub norms: (f64, f64),
    /// Set when `y2` was dropped; bounds `|y2|`.
    pub y2_bound: Option<f64>,
    pub converged: bool,
    pub warnings: Vec<Warning>,
}

impl OverlapResult {
    /// `⟨α_x|W|α_y⟩`.
    pub fn numerator(&self) -> Complex64 {
        self.y1 + self.y2
    }

    pub fn reliable(&self) -> bool {
        self.converged && !self.warnings.iter().any(|w| matches!(w, Warning::Unconverged { .. } | Warning::Truncation { .. }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kernel {
    /// Photon-1 pole of channel x against photon-2 pole of channel y.
    Cross,
    /// Both poles on photon 1.
    Same,
}

fn leading_layout(params: &CascadeParams) -> PairLayout {
    PairLayout {
        sum_center: params.sum_detuning(),
        sum_width: params.g,
        photon_features: vec![-params.delta, params.delta],
        photon_width: 1.0,
        unit: 1.0,
    }
}

fn leading_kernel(params: &CascadeParams, kind: Kernel) -> impl Fn(f64, f64) -> Complex64 + Sync {
    let (s0, g, d) = (params.sum_detuning(), params.g, params.delta);
    let pref = 2.0 * g / (PI * PI);
    let zxc = Complex64::new(-d, 1.0);
    let zy = Complex64::new(d, -1.0);
    move |k1: f64, k2: f64| {
        let t = k1 + k2 - s0;
        let second = match kind {
            Kernel::Cross => k2 - zy,
            Kernel::Same => k1 - zy,
        };
        pref / ((t * t + g * g) * (k1 - zxc) * second)
    }
}

/// Integrates `W·h` with the gate's linear carrier split off; with `swap`
/// the gate is evaluated with its photon slots exchanged.
fn gated<H>(h: &H, w: &PhaseGate, swap: bool, layout: &PairLayout, region: Region, quad: &QuadratureSpec) -> IntegralEstimate
where
    H: Fn(f64, f64) -> Complex64 + Sync,
{
    let (s1, s2) = w.carrier();
    let integrand = |k1: f64, k2: f64| {
        let e = if swap { w.envelope(k2, k1) } else { w.envelope(k1, k2) };
        e * h(k1, k2)
    };
    let carrier = if swap { (s2, s1) } else { (s1, s2) };
    IntegralEstimate::from_pair(integrate_pair(&integrand, carrier, layout, region, quad))
}

/// `∫∫ W·(h + h∘swap)` under the pairing `num`, with `h∘swap(k1, k2) = h(k2, k1)`.
/// The mirrored term is integrated as `∫∫ W(k2, k1)·h(k1, k2)` so that the
/// single-photon ridges of `h` keep their orientation.
fn pair_sum<H>(h: &H, w: &PhaseGate, num: Numerator, x_first: bool, layout: &PairLayout, quad: &QuadratureSpec) -> IntegralEstimate
where
    H: Fn(f64, f64) -> Complex64 + Sync,
{
    match num {
        // symmetrizing W changes nothing against a symmetric partner
        Numerator::AsWritten | Numerator::Symmetrized => {
            if w.is_exchange_symmetric() {
                return gated(h, w, false, layout, Region::Plane, quad).scaled(Complex64::new(2.0, 0.0));
            }
            gated(h, w, false, layout, Region::Plane, quad).plus(gated(h, w, true, layout, Region::Plane, quad))
        }
        Numerator::ColorOrdered => {
            // over the x-first half plane W sees (k1, k2); over the other half, (k2, k1)
            let (near, far) = if x_first { (Region::LowerFirst, Region::UpperFirst) } else { (Region::UpperFirst, Region::LowerFirst) };
            let a = gated(h, w, false, layout, near, quad).plus(gated(h, w, true, layout, far, quad));
            a.scaled(Complex64::new(2.0, 0.0))
        }
    }
}

/// `∫∫ W·h` for a kernel that already counts both photon pairings.
fn numerator_integral<H>(
    h: &H,
    w: &PhaseGate,
    num: Numerator,
    x_first: bool,
    layout: &PairLayout,
    quad: &QuadratureSpec,
) -> IntegralEstimate
where
    H: Fn(f64, f64) -> Complex64 + Sync,
{
    match num {
        Numerator::AsWritten => gated(h, w, false, layout, Region::Plane, quad),
        _ if w.is_exchange_symmetric() => gated(h, w, false, layout, Region::Plane, quad),
        Numerator::Symmetrized => pair_sum(h, w, num, x_first, layout, quad).scaled(Complex64::new(0.5, 0.0)),
        Numerator::ColorOrdered => pair_sum(h, w, num, x_first, layout, quad).scaled(Complex64::new(0.5, 0.0)),
    }
}

fn leading(params: &CascadeParams, w: &PhaseGate, kind: Kernel, num: Numerator, quad: &QuadratureSpec) -> IntegralEstimate {
    let h = leading_kernel(params, kind);
    numerator_integral(&h, w, num, params.delta >= 0.0, &leading_layout(params), quad)
}

/// Cross-generation overlap `y1` in the dimensionless frame.
pub fn y1_integral(params: &CascadeParams, w: &PhaseGate, quad: &QuadratureSpec) -> IntegralEstimate {
    leading(params, w, Kernel::Cross, Numerator::AsWritten, quad)
}

/// Same-generation overlap `y2` in the dimensionless frame.
pub fn y2_integral(params: &CascadeParams, w: &PhaseGate, quad: &QuadratureSpec) -> IntegralEstimate {
    leading(params, w, Kernel::Same, Numerator::AsWritten, quad)
}

pub fn y1_integral_with(params: &CascadeParams, w: &PhaseGate, num: Numerator, quad: &QuadratureSpec) -> IntegralEstimate {
    leading(params, w, Kernel::Cross, num, quad)
}

pub fn y2_integral_with(params: &CascadeParams, w: &PhaseGate, num: Numerator, quad: &QuadratureSpec) -> IntegralEstimate {
    leading(params, w, Kernel::Same, num, quad)
}

fn physical_layout(d: &LevelDiagram) -> PairLayout {
    let (u, x, y) = (d.e_u - d.e_0, d.e_x - d.e_0, d.e_y - d.e_0);
    PairLayout { sum_center: u, sum_width: d.gamma_u, photon_features: vec![x, y, u - x, u - y], photon_width: d.gamma, unit: d.gamma }
}

fn physical(d: &LevelDiagram, w: &PhaseGate, kind: Kernel, quad: &QuadratureSpec) -> Result<IntegralEstimate, OverlapError> {
    d.validate()?;
    let (gam, gu) = (d.gamma, d.gamma_u);
    let u = d.e_u - d.e_0;
    let zxc = Complex64::new(d.e_x - d.e_0, gam);
    let zy = Complex64::new(d.e_y - d.e_0, -gam);
    let pref = 2.0 * gam * gu / (PI * PI);
    let h = move |k1: f64, k2: f64| {
        let t = k1 + k2 - u;
        let second = match kind {
            Kernel::Cross => k2 - zy,
            Kernel::Same => k1 - zy,
        };
        pref / ((t * t + gu * gu) * (k1 - zxc) * second)
    };
    let layout = physical_layout(d);
    Ok(numerator_integral(&h, w, Numerator::AsWritten, d.e_x <= d.e_y, &layout, quad))
}

/// `y1` evaluated in physical energies (measured from `e_0`) with the
/// `2ΓΓ_u/π²` prefactor; agrees with [`y1_integral`] for the mapped gate.
pub fn y1_physical(d: &LevelDiagram, w: &PhaseGate, quad: &QuadratureSpec) -> Result<IntegralEstimate, OverlapError> {
    physical(d, w, Kernel::Cross, quad)
}

pub fn y2_physical(d: &LevelDiagram, w: &PhaseGate, quad: &QuadratureSpec) -> Result<IntegralEstimate, OverlapError> {
    physical(d, w, Kernel::Same, quad)
}

/// Options for [`gamma_leading_with`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LeadingOptions {
    pub numerator: Numerator,
    /// Drop `y2` (the `|Δ| ≫ 1` regime) and record its bound instead.
    pub drop_y2: bool,
}

fn assemble(y1: IntegralEstimate, y2: Option<IntegralEstimate>, delta: f64, quad: &QuadratureSpec) -> OverlapResult {
    let mut warnings = Vec::new();
    y1.warnings("y1", quad, &mut warnings);
    let (y2v, y2e, conv2, bound) = match y2 {
        Some(e) => {
            e.warnings("y2", quad, &mut warnings);
            (e.value, e.error, e.converged, None)
        }
        None => (Complex64::new(0.0, 0.0), 0.0, true, Some(2.0 / (delta * delta + 1.0).sqrt())),
    };
    let d = LEADING_DENOMINATOR;
    OverlapResult {
        y1: y1.value,
        y2: y2v,
        norm_denominator: d,
        gamma: (y1.value + y2v).norm() / d,
        error_estimate: (y1.error + y2e) / d,
        mode: OverlapMode::DimensionlessLeadingOrder,
        norms: (2.0, 2.0),
        y2_bound: bound,
        converged: y1.converged && conv2,
        warnings,
    }
}

/// γ = |y1 + y2|/4 with both integrals by quadrature.
pub fn gamma_leading(params: &CascadeParams, w: &PhaseGate, quad: &QuadratureSpec) -> OverlapResult {
    gamma_leading_with(params, w, quad, LeadingOptions::default())
}

pub fn gamma_leading_with(params: &CascadeParams, w: &PhaseGate, quad: &QuadratureSpec, opts: LeadingOptions) -> OverlapResult {
    let y1 = leading(params, w, Kernel::Cross, opts.numerator, quad);
    let y2 = (!opts.drop_y2).then(|| leading(params, w, Kernel::Same, opts.numerator, quad));
    assemble(y1, y2, params.delta, quad)
}

/// γ = |y1|/4 for well separated exciton levels; `y2_bound` holds the
/// `2/sqrt(Δ² + 1)` bound on what was dropped.
pub fn gamma_scale_separated(params: &CascadeParams, w: &PhaseGate, quad: &QuadratureSpec) -> OverlapResult {
    gamma_leading_with(params, w, quad, LeadingOptions { drop_y2: true, ..LeadingOptions::default() })
}

/// Options for [`gamma_full_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullOptions {
    pub numerator: Numerator,
    pub mode: EvalMode,
}

impl Default for FullOptions {
    fn default() -> Self {
        FullOptions { numerator: Numerator::ColorOrdered, mode: EvalMode::Analytic }
    }
}

/// Colors closer than this many widths make the two summands of a wave
/// packet overlap.
const DEGENERACY_WIDTHS: f64 = 10.0;

/// γ from the full wave packets of `d` and numerically integrated norms.
/// `w` acts on physical energies measured from `e_0`.
pub fn gamma_full(d: &LevelDiagram, w: &PhaseGate, quad: &QuadratureSpec) -> Result<OverlapResult, OverlapError> {
    gamma_full_with(d, w, quad, FullOptions::default())
}

pub fn gamma_full_with(d: &LevelDiagram, w: &PhaseGate, quad: &QuadratureSpec, opts: FullOptions) -> Result<OverlapResult, OverlapError> {
    d.validate()?;
    quad.validate()?;
    let ax = TwoPhotonAmplitude { channel: Channel::X, diagram: *d, mode: opts.mode };
    let ay = TwoPhotonAmplitude { channel: Channel::Y, diagram: *d, mode: opts.mode };
    let (zu, zx) = ax.poles();
    let (_, zy) = ay.poles();
    let literal = opts.mode == EvalMode::Literal;
    let fold = move |k: f64| if literal { k.abs() } else { k };
    let cross = move |k1: f64, k2: f64| {
        let (k1, k2) = (fold(k1), fold(k2));
        lorentzian(k1 + k2, zu).norm_sqr() * lorentzian(k1, zx).conj() * lorentzian(k2, zy)
    };
    let same = move |k1: f64, k2: f64| {
        let (k1, k2) = (fold(k1), fold(k2));
        lorentzian(k1 + k2, zu).norm_sqr() * lorentzian(k1, zx).conj() * lorentzian(k1, zy)
    };
    // cross(k1,k2) + cross(k2,k1) and same(k1,k2) + same(k2,k1) make up conj(α_x)·α_y
    let layout = physical_layout(d);
    let x_first = d.e_x <= d.e_y;
    let (y1, y2) = if literal {
        let quadrant = |h: &(dyn Fn(f64, f64) -> Complex64 + Sync)| {
            let mask = |k1: f64, k2: f64| match opts.numerator {
                Numerator::ColorOrdered => {
                    let first = if x_first { k1 <= k2 } else { k1 >= k2 };
                    if first {
                        2.0 * w.eval(k1, k2) * (h(k1, k2) + h(k2, k1))
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }
                Numerator::AsWritten => w.eval(k1, k2) * (h(k1, k2) + h(k2, k1)),
                Numerator::Symmetrized => 0.5 * (w.eval(k1, k2) + w.eval(k2, k1)) * (h(k1, k2) + h(k2, k1)),
            };
            IntegralEstimate::from_pair(integrate_pair(&mask, (0.0, 0.0), &layout, Region::PositiveQuadrant, quad))
        };
        (quadrant(&cross), quadrant(&same))
    } else {
        let pair = |h: &(dyn Fn(f64, f64) -> Complex64 + Sync)| pair_sum(&h, w, opts.numerator, x_first, &layout, quad);
        (pair(&cross), pair(&same))
    };
    let nx = norm_squared(&ax, quad);
    let ny = norm_squared(&ay, quad);
    let mut result = assemble_full(y1, y2, nx, ny, quad);
    for (a, label) in [(&ax, "x"), (&ay, "y")] {
        let sep = a.color_separation() / d.gamma;
        if sep < DEGENERACY_WIDTHS {
            result.warnings.push(Warning::NearDegenerateColors { channel: label, separation: sep });
        }
    }
    Ok(result)
}

fn assemble_full(y1: IntegralEstimate, y2: IntegralEstimate, nx: NormEstimate, ny: NormEstimate, quad: &QuadratureSpec) -> OverlapResult {
    let mut warnings = Vec::new();
    y1.warnings("y1", quad, &mut warnings);
    y2.warnings("y2", quad, &mut warnings);
    for (n, label) in [(&nx, "x"), (&ny, "y")] {
        if !n.converged {
            warnings.push(Warning::Unconverged { integral: if label == "x" { "norm x" } else { "norm y" }, error: n.error });
        }
        if (n.value - 2.0).abs() > 0.1 {
            warnings.push(Warning::NormDeviation { channel: label, norm: n.value });
        }
    }
    let den = nx.value + ny.value;
    let num = (y1.value + y2.value).norm();
    OverlapResult {
        y1: y1.value,
        y2: y2.value,
        norm_denominator: den,
        gamma: num / den,
        error_estimate: (y1.error + y2.error) / den + num * (nx.error + ny.error) / (den * den),
        mode: OverlapMode::FullDiagram,
        norms: (nx.value, ny.value),
        y2_bound: None,
        converged: y1.converged && y2.converged && nx.converged && ny.converged,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(delta: f64, beta: f64, g: f64) -> CascadeParams {
        CascadeParams::new(delta, beta, g).unwrap()
    }

    #[test]
    fn cross_term_vanishes_without_gate() {
        let q = QuadratureSpec::default();
        for g in [1.0, 2.0] {
            for delta in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
                for beta in [0.0, 1.0, 2.0, 3.0, 4.0, 5.0] {
                    let y = y1_integral(&p(delta, beta, g), &PhaseGate::Identity, &q);
                    assert!(y.value.norm() < 1e-5, "{delta} {beta} {g} {y:?}");
                }
            }
        }
    }

    #[test]
    fn same_generation_term_without_gate() {
        let q = QuadratureSpec::default();
        let y = y2_integral(&p(0.0, 0.0, 2.0), &PhaseGate::Identity, &q).value;
        assert!((y - Complex64::new(2.0, 0.0)).norm() < 1e-5, "{y}");
        let y = y2_integral(&p(1.0, 0.0, 2.0), &PhaseGate::Identity, &q).value;
        assert!((y - Complex64::new(1.0, -1.0)).norm() < 1e-5, "{y}");
        let ys: Vec<Complex64> = [0.0, 2.0, 5.0].iter().map(|&b| y2_integral(&p(10.0, b, 2.0), &PhaseGate::Identity, &q).value).collect();
        for y in &ys {
            assert!((y - ys[0]).norm() < 1e-5, "{ys:?}");
        }
    }

    #[test]
    fn raw_gamma() {
        let q = QuadratureSpec::default();
        let r = gamma_leading(&p(0.0, 0.0, 2.0), &PhaseGate::Identity, &q);
        assert!((r.gamma - 0.5).abs() < 1e-6, "{r:?}");
        assert_eq!(r.mode, OverlapMode::DimensionlessLeadingOrder);
        let r = gamma_leading(&p(1.0, 0.0, 2.0), &PhaseGate::Identity, &q);
        assert!((r.gamma - 0.353_553_390_6).abs() < 1e-6, "{r:?}");
        assert!(r.reliable());
    }

    #[test]
    fn optimal_gate_narrow_top_level() {
        let pp = p(0.0, 0.0, 0.01);
        let y = y1_integral(&pp, &PhaseGate::optimal(&pp), &QuadratureSpec::default()).value;
        assert!((y.re + 2.0).abs() < 0.02 && y.im.abs() < 1e-4, "{y}");
    }

    #[test]
    fn optimal_gate_pinned_value() {
        let pp = p(0.0, 0.0, 2.0);
        let y = y1_integral(&pp, &PhaseGate::optimal(&pp), &QuadratureSpec::with_tol(1e-8));
        assert!((y.value.re + 1.484_907_490_843_088_7).abs() < 1e-6, "{y:?}");
        assert!(y.value.im.abs() < 1e-6);
    }

    #[test]
    fn reduced_route_matches_plane_quadrature() {
        let q = QuadratureSpec::with_tol(1e-7);
        for beta in [0.0, 1.5, 4.0] {
            for g in [0.5, 2.0, 4.0] {
                let pp = p(0.0, beta, g);
                let a = y1_reduced(&pp, &q).value;
                let b = y1_integral(&pp, &PhaseGate::optimal(&pp), &q).value;
                assert!((a - b).norm() < 1e-4, "{beta} {g} {a} {b}");
            }
        }
    }

    #[test]
    fn drop_y2_records_bound() {
        let pp = p(10.0, 0.0, 2.0);
        let w = PhaseGate::optimal(&pp);
        let q = QuadratureSpec::default();
        let full = gamma_leading(&pp, &w, &q);
        let cut = gamma_scale_separated(&pp, &w, &q);
        let bound = cut.y2_bound.unwrap();
        assert!((bound - 2.0 / 101f64.sqrt()).abs() < 1e-15);
        assert_eq!(cut.y2, Complex64::new(0.0, 0.0));
        assert!((full.gamma - cut.gamma).abs() <= bound / 4.0);
        assert!((full.gamma - 0.368_74).abs() < 1e-4, "{full:?}");
    }

    #[test]
    fn gamma_is_gauge_invariant() {
        let q = QuadratureSpec::default();
        let pp = p(3.0, 0.5, 2.0);
        for w in [PhaseGate::Identity, PhaseGate::optimal(&pp), PhaseGate::delay(1.0, 1.0)] {
            let a = gamma_leading(&pp, &w, &q).gamma;
            let b = gamma_leading(&pp, &w.with_phase(1.234), &q).gamma;
            assert!((a - b).abs() < 1e-10, "{w:?} {a} {b}");
        }
    }

    #[test]
    fn optimal_gamma_is_even_and_peaks_at_zero_beta() {
        let q = QuadratureSpec::default();
        let opts = LeadingOptions { drop_y2: true, ..LeadingOptions::default() };
        let at = |b: f64| {
            let pp = p(0.0, b, 2.0);
            gamma_leading_with(&pp, &PhaseGate::optimal(&pp), &q, opts).gamma
        };
        let mut last = at(0.0);
        for b in [0.5, 1.0, 2.0, 4.0] {
            let (plus, minus) = (at(b), at(-b));
            assert!((plus - minus).abs() < 1e-6, "{b} {plus} {minus}");
            assert!(plus <= last + 1e-9, "{b}");
            last = plus;
        }
    }

    #[test]
    fn optimal_gamma_decreases_with_g() {
        let q = QuadratureSpec::default();
        let gs = [0.25, 0.5, 1.0, 2.0, 4.0];
        let v: Vec<f64> =
            gs.iter().map(|&g| gamma_scale_separated(&p(0.0, 0.0, g), &PhaseGate::optimal(&p(0.0, 0.0, g)), &q).gamma).collect();
        for w in v.windows(2) {
            assert!(w[1] < w[0], "{v:?}");
        }
    }

    #[test]
    fn halving_tolerance_stays_within_reported_error() {
        let pp = p(2.0, 0.5, 1.5);
        let w = PhaseGate::optimal(&pp);
        let a = gamma_leading(&pp, &w, &QuadratureSpec::with_tol(1e-6));
        let b = gamma_leading(&pp, &w, &QuadratureSpec::with_tol(5e-7));
        assert!((a.gamma - b.gamma).abs() < a.error_estimate.max(1e-12), "{} {} {}", a.gamma, b.gamma, a.error_estimate);
    }

    #[test]
    fn symmetrized_numerator_equals_as_written_for_symmetric_gate() {
        let pp = p(1.0, 0.3, 2.0);
        let q = QuadratureSpec::default();
        for kind in [Kernel::Cross, Kernel::Same] {
            let a = leading(&pp, &PhaseGate::Identity, kind, Numerator::AsWritten, &q).value;
            let b = leading(&pp, &PhaseGate::Identity, kind, Numerator::Symmetrized, &q).value;
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn physical_units_match_dimensionless_frame() {
        let d = LevelDiagram::new(2.02, 1.0, 1.02, 1e-3, 2e-3);
        let pp = crate::levels::to_params(&d).unwrap();
        let q = QuadratureSpec::default();
        for w in [PhaseGate::optimal(&pp), PhaseGate::delay(1.0, 1.0)] {
            let a = y1_integral(&pp, &w, &q).value;
            let b = y1_physical(&d, &w.to_physical(&d), &q).unwrap().value;
            assert!((a - b).norm() < 1e-6, "{w:?} {a} {b}");
        }
        let a = y2_integral(&pp, &PhaseGate::Identity, &q).value;
        let b = y2_physical(&d, &PhaseGate::Identity, &q).unwrap().value;
        assert!((a - b).norm() < 1e-6, "{a} {b}");
    }

    #[test]
    fn full_pipeline_raw_state() {
        let d = LevelDiagram::new(2.02, 1.0, 1.02, 1e-3, 2e-3);
        let q = QuadratureSpec::default();
        let r = gamma_full(&d, &PhaseGate::Identity, &q).unwrap();
        assert_eq!(r.mode, OverlapMode::FullDiagram);
        assert!((r.gamma - crate::analytic::gamma_raw(10.0)).abs() < 1e-4, "{r:?}");
        assert!((r.norms.0 - 2.0).abs() < 1e-4 && (r.norms.1 - 2.0).abs() < 1e-4);
        let s = gamma_full_with(&d, &PhaseGate::Identity, &q, FullOptions { numerator: Numerator::Symmetrized, ..FullOptions::default() })
            .unwrap();
        let a = gamma_full_with(&d, &PhaseGate::Identity, &q, FullOptions { numerator: Numerator::AsWritten, ..FullOptions::default() })
            .unwrap();
        assert!((s.gamma - a.gamma).abs() < 1e-10);
    }

    #[test]
    fn degenerate_colors_are_flagged() {
        // E_u − E_x = E_x: both photons of channel x share a color
        let d = LevelDiagram::new(2.0, 1.0, 1.02, 1e-3, 2e-3);
        let r = gamma_full(&d, &PhaseGate::Identity, &QuadratureSpec::default()).unwrap();
        assert!(r.warnings.iter().any(|w| matches!(w, Warning::NearDegenerateColors { channel: "x", .. })), "{:?}", r.warnings);
        let lit = gamma_full_with(
            &d,
            &PhaseGate::Identity,
            &QuadratureSpec::default(),
            FullOptions { mode: EvalMode::Literal, ..FullOptions::default() },
        );
        assert!(lit.is_ok());
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let d = LevelDiagram::new(2.02, 1.0, 1.02, 1e-3, 2e-3);
        let bad = QuadratureSpec { abs_tol: 0.0, ..QuadratureSpec::default() };
        assert!(matches!(gamma_full(&d, &PhaseGate::Identity, &bad), Err(OverlapError::InvalidSpec(_))));
        assert!(QuadratureSpec { truncation_halfwidth: Some(-1.0), ..QuadratureSpec::default() }.validate().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn gamma_never_exceeds_one_half(delta in -6.0..6.0f64, beta in -3.0..3.0f64, g in 0.2..4.0f64, which in 0..3usize) {
            let pp = p(delta, beta, g);
            let w = match which {
                0 => PhaseGate::Identity,
                1 => PhaseGate::optimal(&pp),
                _ => PhaseGate::delay(1.0, 1.0),
            };
            let q = QuadratureSpec::default();
            let r = gamma_leading(&pp, &w, &q);
            prop_assert!(r.gamma <= 0.5 + 1e-6, "{:?}", r);
        }
    }
}
