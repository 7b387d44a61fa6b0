//! The 15-point Gauss–Kronrod pair (with its embedded 7-point Gauss rule) and
//! a small Gauss–Legendre generator used to build oscillatory weights.

use std::sync::OnceLock;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_64, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

pub const POINTS: usize = 15;

/// Nodes on [-1, 1] in increasing order with Kronrod weights and the embedded
/// Gauss weights (zero on the Kronrod-only nodes).
#[derive(Debug, Clone)]
pub struct KronrodRule {
    pub nodes: [f64; POINTS],
    pub kronrod: [f64; POINTS],
    pub gauss: [f64; POINTS],
}

impl KronrodRule {
    fn build() -> Self {
        let mut nodes = [0.0; POINTS];
        let mut kronrod = [0.0; POINTS];
        let mut gauss = [0.0; POINTS];
        for i in 0..7 {
            nodes[i] = -XGK[i];
            nodes[POINTS - 1 - i] = XGK[i];
            kronrod[i] = WGK[i];
            kronrod[POINTS - 1 - i] = WGK[i];
            if i % 2 == 1 {
                gauss[i] = WG[i / 2];
                gauss[POINTS - 1 - i] = WG[i / 2];
            }
        }
        nodes[7] = 0.0;
        kronrod[7] = WGK[7];
        gauss[7] = WG[3];
        KronrodRule { nodes, kronrod, gauss }
    }

    pub fn is_gauss_node(i: usize) -> bool {
        let j = if i > 7 { POINTS - 1 - i } else { i };
        j % 2 == 1 || i == 7
    }
}

pub fn kronrod15() -> &'static KronrodRule {
    static RULE: OnceLock<KronrodRule> = OnceLock::new();
    RULE.get_or_init(KronrodRule::build)
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let r = kronrod15();
        let sk: f64 = r.kronrod.iter().sum();
        let sg: f64 = r.gauss.iter().sum();
        assert!((sk - 2.0).abs() < 1e-14);
        assert!((sg - 2.0).abs() < 1e-14);
        for i in 0..POINTS {
            assert_eq!(r.gauss[i] != 0.0, KronrodRule::is_gauss_node(i));
        }
    }

    #[test]
    fn kronrod_exact_for_degree_22() {
        let r = kronrod15();
        let q: f64 = (0..POINTS).map(|i| r.kronrod[i] * r.nodes[i].powi(22)).sum();
        assert!((q - 2.0 / 23.0).abs() < 1e-14);
        let g: f64 = (0..POINTS).map(|i| r.gauss[i] * r.nodes[i].powi(12)).sum();
        assert!((g - 2.0 / 13.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((q - 2.0 / 31.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }
}
