//! Integration of functions of a photon pair `(k1, k2)` over the plane, a
//! half plane or the positive quadrant.
//!
//! The sum energy `s = k1 + k2` is always one of the two integration axes, so
//! the narrow Lorentzian of the top level is axis-aligned. An exact
//! linear-phase carrier `exp(i(σ1·k1 + σ2·k2))` can be factored out of the
//! integrand; axes that carry a nonzero frequency use a finite window with
//! oscillatory weights, all others are mapped onto the whole line.

use num_complex::Complex64;

use super::QuadratureSpec;
use crate::quadrature::{integrate_plane, Axis, Estimate, PlaneDomain};

/// Below this magnitude a carrier frequency is treated as zero.
const FREQ_EPS: f64 = 1e-12;
/// Window half-width, in units of the layout scale, when no explicit K is set.
const AUTO_WINDOW: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Plane,
    /// `k1 <= k2`.
    LowerFirst,
    /// `k1 >= k2`.
    UpperFirst,
    /// `k1 > 0, k2 > 0`; the carrier is folded into the integrand.
    PositiveQuadrant,
}

/// Where the integrand has structure, in the physical variables.
#[derive(Debug, Clone)]
pub struct PairLayout {
    /// Centre and width of the sum-energy resonance.
    pub sum_center: f64,
    pub sum_width: f64,
    /// Single-photon resonance positions (for either photon).
    pub photon_features: Vec<f64>,
    /// Width of the single-photon resonances.
    pub photon_width: f64,
    /// Unit in which an explicit truncation half-width is expressed.
    pub unit: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct PairIntegral {
    pub estimate: Estimate,
    /// |I(2K) − I(K)| when a truncating window was re-run.
    pub truncation_change: Option<f64>,
}

fn spread(features: &[f64], fallback: f64, width: f64) -> (f64, f64) {
    if features.is_empty() {
        return (fallback, width);
    }
    let lo = features.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = features.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0.5 * (lo + hi), (0.5 * (hi - lo)).max(width))
}

/// Cuts at `f ± scale·4^n` inside `[lo, hi]` so that no initial panel of a
/// wide window is much larger than its distance to the nearest feature.
fn ladder(features: &[f64], scale: f64, axis: &Axis) -> Vec<f64> {
    let Axis::Window { lo, hi, .. } = *axis else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for &f in features {
        let mut step = scale;
        while step < (hi - lo) {
            for c in [f - step, f + step] {
                if c > lo && c < hi {
                    out.push(c);
                }
            }
            step *= 4.0;
        }
    }
    out
}

/// Sum energies where two single-photon resonances meet, plus the sum resonance.
fn crossings(layout: &PairLayout) -> Vec<f64> {
    let f = &layout.photon_features;
    let mut out = vec![layout.sum_center];
    for i in 0..f.len() {
        for j in i..f.len() {
            out.push(f[i] + f[j]);
        }
    }
    out
}

struct Plan {
    domain: PlaneDomain,
    windowed: bool,
}

fn plan(layout: &PairLayout, region: Region, carrier: (f64, f64), quad: &QuadratureSpec, stretch: f64) -> Plan {
    let (s1, s2) = carrier;
    let explicit = quad.truncation_halfwidth.map(|k| k * layout.unit * stretch);
    let mut windowed = false;
    let mut make = |center: f64, scale: f64, freq: f64, bound: Option<(f64, bool)>| -> Axis {
        let freq = if freq.abs() < FREQ_EPS { 0.0 } else { freq };
        let half = if freq != 0.0 { Some(explicit.unwrap_or(AUTO_WINDOW * scale * stretch)) } else { explicit };
        match (half, bound) {
            (Some(k), None) => {
                windowed = true;
                Axis::window(center - k, center + k, freq)
            }
            (Some(k), Some((b, true))) => {
                windowed = true;
                Axis::window(b, b.max(center) + k, freq)
            }
            (Some(k), Some((b, false))) => {
                windowed = true;
                Axis::window(b.min(center) - k, b, freq)
            }
            (None, None) => Axis::real_line(center, scale),
            (None, Some((b, true))) => Axis::above(b, center, scale),
            (None, Some((b, false))) => Axis::below(b, center, scale),
        }
    };
    let sc = layout.sum_center;
    let sw = layout.sum_width;
    match region {
        Region::Plane => {
            // (s, u = k1), k2 = s − u
            let mut feats = layout.photon_features.clone();
            feats.extend(layout.photon_features.iter().map(|f| sc - f));
            let (uc, uw) = spread(&feats, 0.5 * sc, layout.photon_width);
            let x = make(sc, sw, s2, None);
            let y = make(uc, uw, s1 - s2, None);
            let mut xc = crossings(layout);
            xc.extend(ladder(&[sc], sw, &x));
            let mut yc = feats.clone();
            yc.extend(ladder(&feats, layout.photon_width, &y));
            Plan { domain: PlaneDomain::new(x, y).with_cuts(xc, yc), windowed }
        }
        Region::LowerFirst | Region::UpperFirst => {
            // (s, v = (k1 − k2)/2)
            let mut feats: Vec<f64> = layout.photon_features.iter().map(|f| f - 0.5 * sc).collect();
            feats.extend(layout.photon_features.iter().map(|f| 0.5 * sc - f));
            let (vc, vw) = spread(&feats, 0.0, layout.photon_width);
            let x = make(sc, sw, 0.5 * (s1 + s2), None);
            let y = make(vc, vw, s1 - s2, Some((0.0, region == Region::UpperFirst)));
            let mut xc = crossings(layout);
            xc.extend(ladder(&[sc], sw, &x));
            let mut yc = feats.clone();
            yc.push(0.0);
            yc.extend(ladder(&yc.clone(), layout.photon_width, &y));
            Plan { domain: PlaneDomain::new(x, y).with_cuts(xc, yc), windowed }
        }
        Region::PositiveQuadrant => {
            // (s, t = k1/s)
            let x = Axis::above(0.0, sc, sw);
            let y = Axis::window(0.0, 1.0, 0.0);
            // t = 1/2 is the k1 = k2 line
            let mut cuts = vec![0.5];
            if sc > 0.0 {
                cuts.extend(layout.photon_features.iter().flat_map(|f| [f / sc, 1.0 - f / sc]));
            }
            Plan { domain: PlaneDomain::new(x, y).with_cuts(vec![sc], cuts), windowed: false }
        }
    }
}

fn run<H>(h: &H, region: Region, carrier: (f64, f64), domain: &PlaneDomain, quad: &QuadratureSpec) -> Estimate
where
    H: Fn(f64, f64) -> Complex64 + Sync,
{
    let tol = quad.abs_tol;
    let cap = quad.max_subdivisions;
    match region {
        Region::Plane => integrate_plane(&|s: f64, u: f64| h(u, s - u), domain, tol, cap),
        Region::LowerFirst | Region::UpperFirst => integrate_plane(&|s: f64, v: f64| h(0.5 * s + v, 0.5 * s - v), domain, tol, cap),
        Region::PositiveQuadrant => {
            let (s1, s2) = carrier;
            integrate_plane(
                &|s: f64, t: f64| {
                    let (k1, k2) = (s * t, s * (1.0 - t));
                    h(k1, k2) * Complex64::from_polar(s, s1 * k1 + s2 * k2)
                },
                domain,
                tol,
                cap,
            )
        }
    }
}

/// `∫∫ exp(i(σ1k1 + σ2k2))·h(k1, k2) dk1 dk2` over `region`.
pub fn integrate_pair<H>(h: &H, carrier: (f64, f64), layout: &PairLayout, region: Region, quad: &QuadratureSpec) -> PairIntegral
where
    H: Fn(f64, f64) -> Complex64 + Sync,
{
    let first = plan(layout, region, carrier, quad, 1.0);
    let estimate = run(h, region, carrier, &first.domain, quad);
    if !(first.windowed && quad.richardson_check) {
        return PairIntegral { estimate, truncation_change: None };
    }
    let second = plan(layout, region, carrier, quad, 2.0);
    let wide = run(h, region, carrier, &second.domain, quad);
    let change = (wide.value - estimate.value).norm();
    PairIntegral {
        estimate: Estimate {
            value: wide.value,
            error: wide.error.max(change),
            evaluations: estimate.evaluations + wide.evaluations,
            converged: estimate.converged && wide.converged,
        },
        truncation_change: Some(change),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn layout() -> PairLayout {
        PairLayout { sum_center: 0.0, sum_width: 1.0, photon_features: vec![0.0], photon_width: 1.0, unit: 1.0 }
    }

    #[test]
    fn half_planes_add_up_to_the_plane() {
        let h = |k1: f64, k2: f64| Complex64::new((-(k1 - 0.3).powi(2) - (k2 + 0.5).powi(2)).exp() / PI, 0.0);
        let q = QuadratureSpec { abs_tol: 1e-11, ..QuadratureSpec::default() };
        let full = integrate_pair(&h, (0.0, 0.0), &layout(), Region::Plane, &q).estimate.value;
        let lo = integrate_pair(&h, (0.0, 0.0), &layout(), Region::LowerFirst, &q).estimate.value;
        let hi = integrate_pair(&h, (0.0, 0.0), &layout(), Region::UpperFirst, &q).estimate.value;
        assert!((full.re - 1.0).abs() < 1e-10);
        assert!((lo + hi - full).norm() < 1e-10);
    }

    #[test]
    fn carrier_is_applied_exactly() {
        // ∫∫ e^{i(2k1 − k2)} · L(k1) L(k2) = e^{−2} e^{−1}
        let h = |k1: f64, k2: f64| Complex64::new(1.0 / (PI * PI * (1.0 + k1 * k1) * (1.0 + k2 * k2)), 0.0);
        let q = QuadratureSpec { abs_tol: 1e-9, ..QuadratureSpec::default() };
        let exact = (-3.0_f64).exp();
        for region in [Region::Plane, Region::LowerFirst] {
            let r = integrate_pair(&h, (2.0, -1.0), &layout(), region, &q);
            let other = if region == Region::Plane {
                Complex64::new(0.0, 0.0)
            } else {
                integrate_pair(&h, (2.0, -1.0), &layout(), Region::UpperFirst, &q).estimate.value
            };
            assert!((r.estimate.value + other - exact).norm() < 1e-7, "{region:?} {:?}", r);
            assert!(r.truncation_change.is_some());
        }
    }

    #[test]
    fn positive_quadrant() {
        // ∫∫_{k>0} e^{-k1-k2} = 1
        let h = |k1: f64, k2: f64| Complex64::new((-k1 - k2).exp(), 0.0);
        let lay = PairLayout { sum_center: 2.0, sum_width: 1.0, photon_features: vec![1.0], photon_width: 1.0, unit: 1.0 };
        let q = QuadratureSpec { abs_tol: 1e-11, ..QuadratureSpec::default() };
        let r = integrate_pair(&h, (0.0, 0.0), &lay, Region::PositiveQuadrant, &q);
        assert!((r.estimate.value.re - 1.0).abs() < 1e-10);
    }
}
