//! Polarization density matrix of the gated pair and its Peres negativity.
//!
//! Basis order is `xx, xy, yx, yy`; the partial transpose acts on the second
//! photon.

use num_complex::Complex64;
use thiserror::Error;

use crate::overlap::OverlapResult;

pub type Matrix4 = [[Complex64; 4]; 4];

/// Relative slack allowed on `|c| ≤ sqrt(n_x·n_y)` for quadrature noise.
pub const CAUCHY_SCHWARZ_SLACK: f64 = 1e-6;
const MAX_SWEEPS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NegativityError {
    #[error("norms must be positive and finite, got n_x = {n_x}, n_y = {n_y}")]
    InvalidNorm { n_x: f64, n_y: f64 },
    #[error("overlap |c| = {modulus} exceeds sqrt(n_x n_y) = {bound}")]
    CauchySchwarz { modulus: f64, bound: f64 },
    #[error("eigenvalue iteration did not converge (off-diagonal {residual:e})")]
    NoConvergence { residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationDensityMatrix {
    pub m: Matrix4,
}

fn zero() -> Matrix4 {
    [[Complex64::new(0.0, 0.0); 4]; 4]
}

/// `ρ = (n_x|xx⟩⟨xx| + n_y|yy⟩⟨yy| + c|xx⟩⟨yy| + c̄|yy⟩⟨xx|)/(n_x + n_y)`.
pub fn build_rho(n_x: f64, n_y: f64, c: Complex64) -> Result<PolarizationDensityMatrix, NegativityError> {
    if !(n_x > 0.0 && n_y > 0.0 && n_x.is_finite() && n_y.is_finite()) {
        return Err(NegativityError::InvalidNorm { n_x, n_y });
    }
    let bound = (n_x * n_y).sqrt();
    if !c.norm().is_finite() || c.norm() > bound * (1.0 + CAUCHY_SCHWARZ_SLACK) {
        return Err(NegativityError::CauchySchwarz { modulus: c.norm(), bound });
    }
    let t = n_x + n_y;
    let mut m = zero();
    m[0][0] = Complex64::new(n_x / t, 0.0);
    m[3][3] = Complex64::new(n_y / t, 0.0);
    m[0][3] = c / t;
    m[3][0] = c.conj() / t;
    Ok(PolarizationDensityMatrix { m })
}

impl PolarizationDensityMatrix {
    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.m[i][i]).sum()
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut e: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                e = e.max((self.m[i][j] - self.m[j][i].conj()).norm());
            }
        }
        e
    }

    /// `⟨a b|ρ^T2|a' b'⟩ = ⟨a b'|ρ|a' b⟩`.
    pub fn partial_transpose(&self) -> Self {
        let mut out = zero();
        for a in 0..2 {
            for b in 0..2 {
                for a2 in 0..2 {
                    for b2 in 0..2 {
                        out[2 * a + b][2 * a2 + b2] = self.m[2 * a + b2][2 * a2 + b];
                    }
                }
            }
        }
        PolarizationDensityMatrix { m: out }
    }

    pub fn eigenvalues(&self) -> Result<[f64; 4], NegativityError> {
        hermitian_eigenvalues(&self.m)
    }
}

fn off_diagonal(a: &Matrix4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                s += a[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues of a Hermitian 4×4 matrix by cyclic Jacobi rotations, ascending.
pub fn hermitian_eigenvalues(m: &Matrix4) -> Result<[f64; 4], NegativityError> {
    let mut a = *m;
    let scale = a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = 1e-15 * scale.max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        if off_diagonal(&a) <= target {
            break;
        }
        for p in 0..3 {
            for q in p + 1..4 {
                let apq = a[p][q];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let theta = (a[q][q].re - a[p][p].re) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A ← G^H A G with G = diag(1, conj(phase)) on (p, q) times a real rotation
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = Complex64::new(s, 0.0);
                let g_qp = -s * phase.conj();
                let g_qq = c * phase.conj();
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = x * g_pp + y * g_qp;
                    row[q] = x * g_pq + y * g_qq;
                }
                for k in 0..4 {
                    let (x, y) = (a[p][k], a[q][k]);
                    a[p][k] = g_pp.conj() * x + g_qp.conj() * y;
                    a[q][k] = g_pq.conj() * x + g_qq.conj() * y;
                }
                a[p][q] = Complex64::new(0.0, 0.0);
                a[q][p] = Complex64::new(0.0, 0.0);
            }
        }
    }
    let residual = off_diagonal(&a);
    if residual > 1e-12 * scale.max(1.0) {
        return Err(NegativityError::NoConvergence { residual });
    }
    let mut ev = [a[0][0].re, a[1][1].re, a[2][2].re, a[3][3].re];
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Spectrum of the partial transpose of [`build_rho`]'s matrix, ascending:
/// `{−|c|, |c|, n_x, n_y}/(n_x + n_y)`.
pub fn x_state_eigenvalues(n_x: f64, n_y: f64, c: Complex64) -> [f64; 4] {
    let t = n_x + n_y;
    let mut ev = [-c.norm() / t, c.norm() / t, n_x / t, n_y / t];
    ev.sort_by(f64::total_cmp);
    ev
}

/// `|λ_min(ρ^T2)|` when negative, else 0.
pub fn peres_negativity(rho: &PolarizationDensityMatrix) -> Result<f64, NegativityError> {
    let ev = rho.partial_transpose().eigenvalues()?;
    Ok((-ev[0]).max(0.0))
}

/// Negativity of the state described by an overlap result.
pub fn negativity_of(result: &OverlapResult) -> Result<f64, NegativityError> {
    let rho = build_rho(result.norms.0, result.norms.1, result.numerator())?;
    peres_negativity(&rho)
}
