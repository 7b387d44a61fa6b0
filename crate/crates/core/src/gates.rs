//! Unit-modulus spectral phase gates `W(k1, k2) = U_x*·U_y`.
//!
//! Gates are evaluated in whatever energy frame the caller works in. The
//! leading-order engine uses energies in units of Γ measured from
//! `(E_x + E_y)/2`, where `Z_x = −Δ − i` and `Z_y = Δ − i`; [`PhaseGate::mapped`]
//! carries a gate from one frame to another.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::amplitude::WavevectorPair;
use crate::levels::{CascadeParams, ComplexEnergy, LevelDiagram};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("phase table: {0}")]
    Table(String),
    #[error("unknown gate '{0}' (expected identity, optimal, delay, linear)")]
    UnknownGate(String),
}

/// Sampled phase `φ(k)` with linear interpolation; constant beyond the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTable {
    k: Vec<f64>,
    phase: Vec<f64>,
}

impl PhaseTable {
    pub fn new(k: Vec<f64>, phase: Vec<f64>) -> Result<Self, GateError> {
        if k.len() != phase.len() {
            return Err(GateError::Table(format!("{} nodes but {} phases", k.len(), phase.len())));
        }
        if k.is_empty() {
            return Err(GateError::Table("empty table".into()));
        }
        if k.iter().chain(&phase).any(|v| !v.is_finite()) {
            return Err(GateError::Table("non-finite entry".into()));
        }
        if k.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GateError::Table("nodes must be strictly increasing".into()));
        }
        Ok(PhaseTable { k, phase })
    }

    /// Parses `k phase` pairs, one per line; `#` starts a comment, commas
    /// count as whitespace.
    pub fn parse(text: &str) -> Result<Self, GateError> {
        let mut k = Vec::new();
        let mut phase = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").replace(',', " ");
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                [] => continue,
                [a, b] => {
                    let x: f64 = a.parse().map_err(|_| GateError::Table(format!("line {}: bad number '{a}'", n + 1)))?;
                    let p: f64 = b.parse().map_err(|_| GateError::Table(format!("line {}: bad number '{b}'", n + 1)))?;
                    k.push(x);
                    phase.push(p);
                }
                _ => return Err(GateError::Table(format!("line {}: expected two columns", n + 1))),
            }
        }
        PhaseTable::new(k, phase)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.k
    }

    pub fn phases(&self) -> &[f64] {
        &self.phase
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.k.len();
        if x <= self.k[0] {
            return self.phase[0];
        }
        if x >= self.k[n - 1] {
            return self.phase[n - 1];
        }
        let i = self.k.partition_point(|&v| v <= x) - 1;
        // halved operands keep differences of huge nodes finite
        let span = 0.5 * self.k[i + 1] - 0.5 * self.k[i];
        if span <= 0.0 {
            return self.phase[i];
        }
        let t = ((0.5 * x - 0.5 * self.k[i]) / span).clamp(0.0, 1.0);
        self.phase[i] * (1.0 - t) + self.phase[i + 1] * t
    }

    fn combine(a: &PhaseTable, b: &PhaseTable, sign: f64) -> PhaseTable {
        let mut k: Vec<f64> = a.k.iter().chain(&b.k).copied().collect();
        k.sort_by(f64::total_cmp);
        k.dedup();
        let phase = k.iter().map(|&x| a.eval(x) + sign * b.eval(x)).collect();
        PhaseTable { k, phase }
    }

    fn map(&self, origin: f64, unit: f64) -> PhaseTable {
        PhaseTable { k: self.k.iter().map(|x| origin + unit * x).collect(), phase: self.phase.clone() }
    }
}

/// Phase `slope·k + offset + table(k)` seen by one photon slot.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralPhase {
    pub slope: f64,
    pub offset: f64,
    pub table: Option<PhaseTable>,
}

impl SpectralPhase {
    pub fn linear(slope: f64, offset: f64) -> Self {
        SpectralPhase { slope, offset, table: None }
    }

    pub fn sampled(table: PhaseTable) -> Self {
        SpectralPhase { slope: 0.0, offset: 0.0, table: Some(table) }
    }

    pub fn phase(&self, k: f64) -> f64 {
        self.slope * k + self.offset + self.table.as_ref().map_or(0.0, |t| t.eval(k))
    }

    fn minus(&self, other: &SpectralPhase) -> SpectralPhase {
        let table = match (&self.table, &other.table) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(PhaseTable { k: b.k.clone(), phase: b.phase.iter().map(|p| -p).collect() }),
            (Some(a), Some(b)) => Some(PhaseTable::combine(a, b, -1.0)),
        };
        SpectralPhase { slope: self.slope - other.slope, offset: self.offset - other.offset, table }
    }

    fn is_zero(&self) -> bool {
        self.slope == 0.0 && self.offset == 0.0 && self.table.as_ref().is_none_or(|t| t.phase.iter().all(|&p| p == 0.0))
    }

    /// Table part without its linear pieces, `None` if it is identically zero.
    fn residual(&self) -> Option<&PhaseTable> {
        self.table.as_ref().filter(|t| t.phase.iter().any(|&p| p != 0.0))
    }

    fn map(&self, origin: f64, unit: f64) -> SpectralPhase {
        SpectralPhase {
            slope: self.slope / unit,
            offset: self.offset - self.slope * origin / unit,
            table: self.table.as_ref().map(|t| t.map(origin, unit)),
        }
    }
}

/// A per-channel unitary that factorizes over the two photon slots.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhotonPhases {
    pub photon1: SpectralPhase,
    pub photon2: SpectralPhase,
}

impl PhotonPhases {
    pub fn new(photon1: SpectralPhase, photon2: SpectralPhase) -> Self {
        PhotonPhases { photon1, photon2 }
    }

    pub fn eval(&self, k1: f64, k2: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.photon1.phase(k1) + self.photon2.phase(k2))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseGate {
    Identity,
    /// `−(k1 − Z_x*)(k2 − Z_y) / (|k1 − Z_x*||k2 − Z_y|)`, times `e^{i·phase0}`.
    Optimal {
        z_x: ComplexEnergy,
        z_y: ComplexEnergy,
        phase0: f64,
    },
    /// `e^{i·phase0}·e^{i k1 τ1}·e^{−i k2 τ2}`.
    Delay {
        tau1: f64,
        tau2: f64,
        phase0: f64,
    },
    /// `e^{i(phase0 + slope1·k1 + slope2·k2)}`.
    LinearPhase {
        slope1: f64,
        slope2: f64,
        phase0: f64,
    },
    CustomProfile {
        photon1: SpectralPhase,
        photon2: SpectralPhase,
    },
}

impl PhaseGate {
    /// The optimal gate in the leading-order frame.
    pub fn optimal(params: &CascadeParams) -> Self {
        PhaseGate::Optimal { z_x: ComplexEnergy::new(-params.delta, 1.0), z_y: ComplexEnergy::new(params.delta, 1.0), phase0: 0.0 }
    }

    /// The optimal gate for physical energies measured from the ground level.
    pub fn optimal_for(d: &LevelDiagram) -> Self {
        PhaseGate::Optimal { z_x: ComplexEnergy::new(d.e_x - d.e_0, d.gamma), z_y: ComplexEnergy::new(d.e_y - d.e_0, d.gamma), phase0: 0.0 }
    }

    pub fn delay(tau1: f64, tau2: f64) -> Self {
        PhaseGate::Delay { tau1, tau2, phase0: 0.0 }
    }

    /// Builds a gate from its config name and the `tau1`, `tau2`, `slope1`,
    /// `slope2`, `phase0` parameters (missing ones default to the delay point
    /// `tau = 1` or zero).
    pub fn from_name(name: &str, params: &CascadeParams, get: impl Fn(&str) -> Option<f64>) -> Result<Self, GateError> {
        let phase0 = get("phase0").unwrap_or(0.0);
        match name.trim().to_ascii_lowercase().as_str() {
            "identity" | "none" => Ok(PhaseGate::Identity),
            "optimal" | "wopt" => Ok(PhaseGate::optimal(params)),
            "delay" => Ok(PhaseGate::Delay { tau1: get("tau1").unwrap_or(1.0), tau2: get("tau2").unwrap_or(1.0), phase0 }),
            "linear" => Ok(PhaseGate::LinearPhase { slope1: get("slope1").unwrap_or(0.0), slope2: get("slope2").unwrap_or(0.0), phase0 }),
            other => Err(GateError::UnknownGate(other.to_string())),
        }
    }

    pub fn eval(&self, k1: f64, k2: f64) -> Complex64 {
        match self {
            PhaseGate::Identity => Complex64::new(1.0, 0.0),
            PhaseGate::Optimal { z_x, z_y, phase0 } => {
                let a = k1 - z_x.conj();
                let b = k2 - z_y.z();
                -(a / a.norm()) * (b / b.norm()) * Complex64::from_polar(1.0, *phase0)
            }
            PhaseGate::Delay { tau1, tau2, phase0 } => Complex64::from_polar(1.0, phase0 + tau1 * k1 - tau2 * k2),
            PhaseGate::LinearPhase { slope1, slope2, phase0 } => Complex64::from_polar(1.0, phase0 + slope1 * k1 + slope2 * k2),
            PhaseGate::CustomProfile { photon1, photon2 } => Complex64::from_polar(1.0, photon1.phase(k1) + photon2.phase(k2)),
        }
    }

    pub fn eval_pair(&self, kk: WavevectorPair) -> Complex64 {
        self.eval(kk.k1, kk.k2)
    }

    /// `(σ1, σ2)` of the exact linear carrier `e^{i(σ1k1 + σ2k2)}` that remains
    /// after removing the bounded part, see [`PhaseGate::envelope`].
    pub fn carrier(&self) -> (f64, f64) {
        match self {
            PhaseGate::Identity | PhaseGate::Optimal { .. } => (0.0, 0.0),
            PhaseGate::Delay { tau1, tau2, .. } => (*tau1, -*tau2),
            PhaseGate::LinearPhase { slope1, slope2, .. } => (*slope1, *slope2),
            PhaseGate::CustomProfile { photon1, photon2 } => (photon1.slope, photon2.slope),
        }
    }

    /// `W(k1, k2)·e^{−i(σ1k1 + σ2k2)}`.
    pub fn envelope(&self, k1: f64, k2: f64) -> Complex64 {
        match self {
            PhaseGate::Identity => Complex64::new(1.0, 0.0),
            PhaseGate::Optimal { .. } => self.eval(k1, k2),
            PhaseGate::Delay { phase0, .. } | PhaseGate::LinearPhase { phase0, .. } => Complex64::from_polar(1.0, *phase0),
            PhaseGate::CustomProfile { photon1, photon2 } => {
                let t = |s: &SpectralPhase, k: f64| s.offset + s.table.as_ref().map_or(0.0, |t| t.eval(k));
                Complex64::from_polar(1.0, t(photon1, k1) + t(photon2, k2))
            }
        }
    }

    /// Whether `W(k1, k2) = W(k2, k1)` holds identically.
    pub fn is_exchange_symmetric(&self) -> bool {
        match self {
            PhaseGate::Identity => true,
            PhaseGate::Optimal { .. } => false,
            PhaseGate::Delay { tau1, tau2, .. } => *tau1 == -*tau2,
            PhaseGate::LinearPhase { slope1, slope2, .. } => slope1 == slope2,
            PhaseGate::CustomProfile { photon1, photon2 } => photon1 == photon2,
        }
    }

    /// Re-expresses the gate for the variable `k' = origin + unit·k`:
    /// the result `V` satisfies `V(k') = W(k)`.
    pub fn mapped(&self, origin: f64, unit: f64) -> PhaseGate {
        match self {
            PhaseGate::Identity => PhaseGate::Identity,
            PhaseGate::Optimal { z_x, z_y, phase0 } => PhaseGate::Optimal {
                z_x: ComplexEnergy::new(origin + unit * z_x.real_part, unit * z_x.half_width),
                z_y: ComplexEnergy::new(origin + unit * z_y.real_part, unit * z_y.half_width),
                phase0: *phase0,
            },
            PhaseGate::Delay { tau1, tau2, phase0 } => {
                PhaseGate::Delay { tau1: tau1 / unit, tau2: tau2 / unit, phase0: phase0 - (tau1 - tau2) * origin / unit }
            }
            PhaseGate::LinearPhase { slope1, slope2, phase0 } => {
                PhaseGate::LinearPhase { slope1: slope1 / unit, slope2: slope2 / unit, phase0: phase0 - (slope1 + slope2) * origin / unit }
            }
            PhaseGate::CustomProfile { photon1, photon2 } => {
                PhaseGate::CustomProfile { photon1: photon1.map(origin, unit), photon2: photon2.map(origin, unit) }
            }
        }
    }

    /// Carries a gate written in the leading-order frame of `d` to physical
    /// energies measured from the ground level.
    pub fn to_physical(&self, d: &LevelDiagram) -> PhaseGate {
        self.mapped(0.5 * (d.e_x + d.e_y) - d.e_0, d.gamma)
    }

    /// The same gate times `e^{iφ}`.
    pub fn with_phase(&self, phi: f64) -> PhaseGate {
        let mut w = self.clone();
        match &mut w {
            PhaseGate::Identity => return PhaseGate::LinearPhase { slope1: 0.0, slope2: 0.0, phase0: phi },
            PhaseGate::Optimal { phase0, .. } | PhaseGate::Delay { phase0, .. } | PhaseGate::LinearPhase { phase0, .. } => *phase0 += phi,
            PhaseGate::CustomProfile { photon1, .. } => photon1.offset += phi,
        }
        w
    }
}

/// `W = U_x*·U_y` for per-photon factorized unitaries; collapses to the
/// simplest equivalent variant.
pub fn compose(u_x: &PhotonPhases, u_y: &PhotonPhases) -> PhaseGate {
    let p1 = u_y.photon1.minus(&u_x.photon1);
    let p2 = u_y.photon2.minus(&u_x.photon2);
    if p1.is_zero() && p2.is_zero() {
        return PhaseGate::Identity;
    }
    if p1.residual().is_none() && p2.residual().is_none() {
        return PhaseGate::LinearPhase { slope1: p1.slope, slope2: p2.slope, phase0: p1.offset + p2.offset };
    }
    PhaseGate::CustomProfile { photon1: p1, photon2: p2 }
}

/// Path-delay layout of the reordering setup: photon 1 of both channels
/// travels an extra `ell`, photon 1 of channel y another `1/Γ`, photon 2 of
/// channel x an extra `1/Γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayGeometry {
    pub ell: f64,
    pub gamma: f64,
}

impl DelayGeometry {
    pub fn new(ell: f64, gamma: f64) -> Self {
        debug_assert!(ell >= 0.0 && gamma > 0.0);
        DelayGeometry { ell, gamma }
    }

    /// `(U_x, U_y)` as per-photon phases.
    pub fn unitaries(&self) -> (PhotonPhases, PhotonPhases) {
        let t = 1.0 / self.gamma;
        (
            PhotonPhases::new(SpectralPhase::linear(self.ell, 0.0), SpectralPhase::linear(t, 0.0)),
            PhotonPhases::new(SpectralPhase::linear(self.ell + t, 0.0), SpectralPhase::default()),
        )
    }

    /// Mean arrival-time offset between the two colors.
    pub fn mean_offset(&self) -> f64 {
        2.0 * self.ell
    }
}

/// The delay gate `e^{ik1/Γ}e^{−ik2/Γ}`; `ell` cancels.
pub fn delay_gate_from_geometry(geo: &DelayGeometry) -> PhaseGate {
    PhaseGate::Delay { tau1: 1.0 / geo.gamma, tau2: 1.0 / geo.gamma, phase0: 0.0 }
}

/// `π + atan((k1 − E_x)/Γ) − atan((k2 − E_y)/Γ)`, the continuous branch of
/// `arg W_opt` that equals π at resonance.
pub fn arg_wopt(z_x: ComplexEnergy, z_y: ComplexEnergy, k1: f64, k2: f64) -> f64 {
    PI + ((k1 - z_x.real_part) / z_x.half_width).atan() - ((k2 - z_y.real_part) / z_y.half_width).atan()
}

/// `(k2 − E_y, arg W_opt)` along `k2_grid` at fixed `k1`.
pub fn arg_wopt_profile(z_x: ComplexEnergy, z_y: ComplexEnergy, k1_fixed: f64, k2_grid: &[f64]) -> Vec<(f64, f64)> {
    k2_grid.iter().map(|&k2| (k2 - z_y.real_part, arg_wopt(z_x, z_y, k1_fixed, k2))).collect()
}
