//! Level diagrams of the four-level cascade and their reduction to the
//! dimensionless parameters (Δ, β, g).
//!
//! Energies may be given in any unit; only differences and ratios enter.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevelError {
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
}

/// `Z = E − iΓ`: a level energy with its radiative half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEnergy {
    pub real_part: f64,
    pub half_width: f64,
}

impl ComplexEnergy {
    pub fn new(real_part: f64, half_width: f64) -> Self {
        debug_assert!(half_width >= 0.0, "decaying levels sit in the lower half-plane");
        ComplexEnergy { real_part, half_width }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.real_part, -self.half_width)
    }

    pub fn conj(&self) -> Complex64 {
        self.z().conj()
    }
}

/// Biexciton-type cascade: top level `e_u`, intermediate levels `e_x`, `e_y`
/// (common half-width `gamma`) and ground level `e_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelDiagram {
    pub e_u: f64,
    pub e_x: f64,
    pub e_y: f64,
    pub e_0: f64,
    pub gamma: f64,
    pub gamma_u: f64,
}

impl LevelDiagram {
    /// Diagram with the ground level at zero.
    pub fn new(e_u: f64, e_x: f64, e_y: f64, gamma: f64, gamma_u: f64) -> Self {
        LevelDiagram { e_u, e_x, e_y, e_0: 0.0, gamma, gamma_u }
    }

    pub fn validate(&self) -> Result<(), LevelError> {
        let all = [self.e_u, self.e_x, self.e_y, self.e_0, self.gamma, self.gamma_u];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(LevelError::InvalidDiagram("non-finite entry".into()));
        }
        if self.gamma <= 0.0 {
            return Err(LevelError::InvalidDiagram(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if self.gamma_u <= 0.0 {
            return Err(LevelError::InvalidDiagram(format!("gamma_u must be > 0, got {}", self.gamma_u)));
        }
        for (name, c) in self.colors() {
            if c <= 0.0 {
                return Err(LevelError::InvalidDiagram(format!("emitted color {name} = {c} is not positive")));
            }
        }
        Ok(())
    }

    /// The four emitted photon energies, labelled by transition.
    pub fn colors(&self) -> [(&'static str, f64); 4] {
        [("u->x", self.e_u - self.e_x), ("x->0", self.e_x - self.e_0), ("u->y", self.e_u - self.e_y), ("y->0", self.e_y - self.e_0)]
    }

    /// All energies and widths multiplied by `s` (s > 0).
    pub fn scaled(&self, s: f64) -> Self {
        LevelDiagram {
            e_u: self.e_u * s,
            e_x: self.e_x * s,
            e_y: self.e_y * s,
            e_0: self.e_0 * s,
            gamma: self.gamma * s,
            gamma_u: self.gamma_u * s,
        }
    }

    /// All four level energies shifted by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        LevelDiagram { e_u: self.e_u + c, e_x: self.e_x + c, e_y: self.e_y + c, e_0: self.e_0 + c, ..*self }
    }
}

/// Dimensionless cascade parameters.
///
/// `beta` follows the level-diagram definition (divisor 2Γ). The reduced
/// kernels of the overlap engine are centred at the sum detuning `2·beta`,
/// see [`CascadeParams::sum_detuning`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeParams {
    pub delta: f64,
    pub beta: f64,
    pub g: f64,
}

impl CascadeParams {
    pub fn new(delta: f64, beta: f64, g: f64) -> Result<Self, LevelError> {
        let p = CascadeParams { delta, beta, g };
        p.validate()?;
        Ok(p)
    }

    /// Parameters whose kernel centre (the sum detuning in units of Γ) is `s0`.
    pub fn from_sum_detuning(delta: f64, s0: f64, g: f64) -> Result<Self, LevelError> {
        CascadeParams::new(delta, 0.5 * s0, g)
    }

    pub fn validate(&self) -> Result<(), LevelError> {
        if !(self.g > 0.0) || !self.g.is_finite() {
            return Err(LevelError::InvalidDiagram(format!("g must be finite and > 0, got {}", self.g)));
        }
        if !self.delta.is_finite() || !self.beta.is_finite() {
            return Err(LevelError::InvalidDiagram("delta and beta must be finite".into()));
        }
        Ok(())
    }

    /// `(E_u − E_x − E_y + E_0)/Γ`, the centre of the sum-energy Lorentzian
    /// in the shifted dimensionless variables.
    pub fn sum_detuning(&self) -> f64 {
        2.0 * self.beta
    }
}

pub fn to_params(d: &LevelDiagram) -> Result<CascadeParams, LevelError> {
    d.validate()?;
    Ok(CascadeParams {
        delta: (d.e_y - d.e_x) / (2.0 * d.gamma),
        // (E_u − E_x) − (E_y − E_0): first-generation x color against the
        // second-generation y color
        beta: ((d.e_u - d.e_x) - (d.e_y - d.e_0)) / (2.0 * d.gamma),
        g: d.gamma_u / d.gamma,
    })
}

/// `(Z_u, Z_x, Z_y)` with Γ_x = Γ_y = `gamma` and Γ_u = `gamma_u`.
pub fn complex_energies(d: &LevelDiagram) -> (ComplexEnergy, ComplexEnergy, ComplexEnergy) {
    (ComplexEnergy::new(d.e_u, d.gamma_u), ComplexEnergy::new(d.e_x, d.gamma), ComplexEnergy::new(d.e_y, d.gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: CascadeParams, b: (f64, f64, f64)) -> bool {
        (a.delta - b.0).abs() < 1e-9 && (a.beta - b.1).abs() < 1e-9 && (a.g - b.2).abs() < 1e-12
    }

    #[test]
    fn symmetric_kite() {
        let d = LevelDiagram::new(2.0, 1.0, 1.0, 0.01, 0.02);
        assert!(close(to_params(&d).unwrap(), (0.0, 0.0, 2.0)));
    }

    #[test]
    fn top_level_shift_of_two_widths() {
        let d = LevelDiagram::new(2.02, 1.0, 1.0, 0.01, 0.02);
        assert!(close(to_params(&d).unwrap(), (0.0, 1.0, 2.0)));
    }

    #[test]
    fn split_exciton() {
        let d = LevelDiagram::new(2.0, 0.9, 1.1, 0.01, 0.015);
        assert!(close(to_params(&d).unwrap(), (10.0, 0.0, 1.5)));
    }

    #[test]
    fn rejects_nonpositive_widths() {
        assert!(to_params(&LevelDiagram::new(2.0, 1.0, 1.0, 0.0, 0.02)).is_err());
        assert!(to_params(&LevelDiagram::new(2.0, 1.0, 1.0, 0.01, -1.0)).is_err());
        assert!(to_params(&LevelDiagram::new(1.5, 1.0, 1.6, 0.01, 0.02)).is_err());
    }

    #[test]
    fn complex_energy_accessors() {
        let d = LevelDiagram::new(2.0, 1.0, 1.0, 0.01, 0.02);
        let (zu, zx, _) = complex_energies(&d);
        assert_eq!(zx.z(), Complex64::new(1.0, -0.01));
        assert_eq!(zu.z(), Complex64::new(2.0, -0.02));
        assert_eq!(zx.conj(), Complex64::new(1.0, 0.01));
    }

    proptest! {
        #[test]
        fn params_shift_and_scale_invariant(
            c in -50.0..50.0f64,
            s in 0.01..100.0f64,
            split in -0.2..0.2f64,
            bind in -0.1..0.1f64,
            g in 0.2..5.0f64,
        ) {
            let gamma = 0.01;
            let d = LevelDiagram::new(2.0 + bind, 1.0 - split, 1.0 + split, gamma, g * gamma);
            let p = to_params(&d).unwrap();
            let ps = to_params(&d.shifted(c)).unwrap();
            let pk = to_params(&d.scaled(s)).unwrap();
            for q in [ps, pk] {
                prop_assert!((q.delta - p.delta).abs() < 1e-6 * (1.0 + p.delta.abs()));
                prop_assert!((q.beta - p.beta).abs() < 1e-6 * (1.0 + p.beta.abs()));
                prop_assert!((q.g - p.g).abs() < 1e-9 * p.g);
            }
        }
    }
}
