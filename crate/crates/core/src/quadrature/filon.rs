//! Filon-type weights: integrate the Lagrange interpolant through the
//! Kronrod (and embedded Gauss) nodes against `exp(i·Ω·x)` exactly, so an
//! oscillatory factor never has to be resolved by the node spacing.

use num_complex::Complex64;
use std::sync::OnceLock;

use super::rule::{gauss_legendre, kronrod15, KronrodRule, POINTS};

#[derive(Debug, Clone)]
pub struct OscillatoryWeights {
    pub kronrod: [Complex64; POINTS],
    pub gauss: [Complex64; POINTS],
}

struct Barycentric {
    full: [f64; POINTS],
    gauss_idx: [usize; 7],
    gauss: [f64; 7],
}

fn barycentric() -> &'static Barycentric {
    static B: OnceLock<Barycentric> = OnceLock::new();
    B.get_or_init(|| {
        let r = kronrod15();
        let mut full = [0.0; POINTS];
        for j in 0..POINTS {
            let mut p = 1.0;
            for k in 0..POINTS {
                if k != j {
                    p *= r.nodes[j] - r.nodes[k];
                }
            }
            full[j] = 1.0 / p;
        }
        let mut gauss_idx = [0; 7];
        let mut n = 0;
        for i in 0..POINTS {
            if KronrodRule::is_gauss_node(i) {
                gauss_idx[n] = i;
                n += 1;
            }
        }
        let mut gauss = [0.0; 7];
        for a in 0..7 {
            let mut p = 1.0;
            for b in 0..7 {
                if a != b {
                    p *= r.nodes[gauss_idx[a]] - r.nodes[gauss_idx[b]];
                }
            }
            gauss[a] = 1.0 / p;
        }
        Barycentric { full, gauss_idx, gauss }
    })
}

fn sub_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(20))
}

// Lagrange basis values at x, written into `out`.
fn lagrange(x: f64, nodes: &[f64], bary: &[f64], out: &mut [f64]) {
    for (j, &xj) in nodes.iter().enumerate() {
        if (x - xj).abs() < 1e-15 {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[j] = 1.0;
            return;
        }
    }
    let mut denom = 0.0;
    for j in 0..nodes.len() {
        let t = bary[j] / (x - nodes[j]);
        out[j] = t;
        denom += t;
    }
    out.iter_mut().for_each(|v| *v /= denom);
}

/// Weights w_j(Ω) = ∫_{-1}^{1} ℓ_j(x) e^{iΩx} dx for both node sets.
pub fn oscillatory_weights(omega: f64) -> OscillatoryWeights {
    let r = kronrod15();
    let b = barycentric();
    if omega == 0.0 {
        return OscillatoryWeights { kronrod: r.kronrod.map(|w| Complex64::new(w, 0.0)), gauss: r.gauss.map(|w| Complex64::new(w, 0.0)) };
    }
    let (gx, gw) = sub_rule();
    let panels = (omega.abs().ceil() as usize).max(1) + 1;
    let width = 2.0 / panels as f64;
    let gauss_nodes: Vec<f64> = b.gauss_idx.iter().map(|&i| r.nodes[i]).collect();
    let mut kronrod = [Complex64::new(0.0, 0.0); POINTS];
    let mut gsub = [Complex64::new(0.0, 0.0); 7];
    let mut lk = [0.0; POINTS];
    let mut lg = [0.0; 7];
    for p in 0..panels {
        let mid = -1.0 + width * (p as f64 + 0.5);
        for (x, w) in gx.iter().zip(gw) {
            let t = mid + 0.5 * width * x;
            let e = Complex64::from_polar(0.5 * width * w, omega * t);
            lagrange(t, &r.nodes, &b.full, &mut lk);
            lagrange(t, &gauss_nodes, &b.gauss, &mut lg);
            for j in 0..POINTS {
                kronrod[j] += e * lk[j];
            }
            for j in 0..7 {
                gsub[j] += e * lg[j];
            }
        }
    }
    let mut gauss = [Complex64::new(0.0, 0.0); POINTS];
    for (a, &i) in b.gauss_idx.iter().enumerate() {
        gauss[i] = gsub[a];
    }
    OscillatoryWeights { kronrod, gauss }
}
