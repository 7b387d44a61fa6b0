//! Parameter sweeps of γ, the delay-family optimizer and the `arg W_opt`
//! profile table, with CSV and JSON writers.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;
use thiserror::Error;

use crate::gates::{arg_wopt_profile, PhaseGate};
use crate::levels::{CascadeParams, ComplexEnergy, LevelError};
use crate::overlap::{gamma_leading_with, LeadingOptions, Numerator, OverlapResult, QuadratureSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    Invalid(String),
    #[error(transparent)]
    Level(#[from] LevelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    G,
    Beta,
    Delta,
    /// Only tabulated by [`fig2a_table`].
    Kappa2,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::G => "g",
            SweepAxis::Beta => "beta",
            SweepAxis::Delta => "delta",
            SweepAxis::Kappa2 => "kappa2",
        }
    }
}

/// What a value on the β axis means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaConvention {
    /// The centre of the sum-energy kernel in units of Γ (`2·beta`).
    #[default]
    Kernel,
    /// `CascadeParams::beta` itself.
    Levels,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// A gate whose parameter-dependent variants are rebuilt at each grid point.
#[derive(Debug, Clone, PartialEq)]
pub enum GateSpec {
    Identity,
    Optimal,
    Fixed(PhaseGate),
}

impl GateSpec {
    pub fn resolve(&self, params: &CascadeParams) -> PhaseGate {
        match self {
            GateSpec::Identity => PhaseGate::Identity,
            GateSpec::Optimal => PhaseGate::optimal(params),
            GateSpec::Fixed(w) => w.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub range: (f64, f64),
    pub points: usize,
    pub spacing: Spacing,
    pub beta_convention: BetaConvention,
    /// Values of the parameters not on the axis.
    pub fixed: CascadeParams,
    pub gate: GateSpec,
    pub quad: QuadratureSpec,
    pub numerator: Numerator,
    pub drop_y2: bool,
}

impl SweepSpec {
    pub fn new(axis: SweepAxis, range: (f64, f64), points: usize, fixed: CascadeParams, gate: GateSpec) -> Self {
        SweepSpec {
            axis,
            range,
            points,
            spacing: Spacing::Linear,
            beta_convention: BetaConvention::Kernel,
            fixed,
            gate,
            quad: QuadratureSpec::default(),
            numerator: Numerator::AsWritten,
            drop_y2: false,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let (lo, hi) = self.range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(SweepError::Invalid(format!("range must satisfy lo < hi, got [{lo}, {hi}]")));
        }
        if self.points < 2 {
            return Err(SweepError::Invalid(format!("need at least 2 points, got {}", self.points)));
        }
        if self.spacing == Spacing::Log && lo <= 0.0 {
            return Err(SweepError::Invalid("log spacing needs lo > 0".into()));
        }
        if self.axis == SweepAxis::G && lo <= 0.0 {
            return Err(SweepError::Invalid("g must stay positive".into()));
        }
        if self.axis == SweepAxis::Kappa2 {
            return Err(SweepError::Invalid("kappa2 is a gate-profile axis, see wopt-profile".into()));
        }
        self.quad.validate().map_err(|e| SweepError::Invalid(e.to_string()))?;
        self.fixed.validate()?;
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        grid(self.range, self.points, self.spacing)
    }

    fn params_at(&self, x: f64) -> Result<CascadeParams, LevelError> {
        let f = self.fixed;
        match self.axis {
            SweepAxis::G => CascadeParams::new(f.delta, f.beta, x),
            SweepAxis::Delta => CascadeParams::new(x, f.beta, f.g),
            SweepAxis::Beta => match self.beta_convention {
                BetaConvention::Kernel => CascadeParams::from_sum_detuning(f.delta, x, f.g),
                BetaConvention::Levels => CascadeParams::new(f.delta, x, f.g),
            },
            SweepAxis::Kappa2 => Ok(f),
        }
    }
}

/// Inclusive grid of `n` points.
pub fn grid(range: (f64, f64), n: usize, spacing: Spacing) -> Vec<f64> {
    let (lo, hi) = range;
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            if i == n - 1 {
                return hi;
            }
            match spacing {
                Spacing::Linear => lo + t * (hi - lo),
                Spacing::Log => (lo.ln() + t * (hi.ln() - lo.ln())).exp(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis: f64,
    pub gamma: f64,
    #[serde(skip)]
    pub y1: Complex64,
    #[serde(skip)]
    pub y2: Complex64,
    pub err: f64,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y2_bound: Option<f64>,
    pub warnings: Vec<String>,
}

impl SweepRow {
    fn from_result(axis: f64, r: &OverlapResult) -> Self {
        SweepRow {
            axis,
            gamma: r.gamma,
            y1: r.y1,
            y2: r.y2,
            err: r.error_estimate,
            converged: r.reliable(),
            y2_bound: r.y2_bound,
            warnings: r.warnings.iter().map(|w| w.to_string()).collect(),
        }
    }
}

/// One row per grid point, in grid order; points are evaluated in parallel.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    spec.validate()?;
    let xs = spec.grid();
    let params: Vec<CascadeParams> = xs.iter().map(|&x| spec.params_at(x)).collect::<Result<_, _>>()?;
    let opts = LeadingOptions { numerator: spec.numerator, drop_y2: spec.drop_y2 };
    Ok(xs
        .par_iter()
        .zip(params.par_iter())
        .map(|(&x, p)| SweepRow::from_result(x, &gamma_leading_with(p, &spec.gate.resolve(p), &spec.quad, opts)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FreeParam {
    Tau1,
    Tau2,
    Slope1,
    Slope2,
}

impl FreeParam {
    pub fn parse(s: &str) -> Option<FreeParam> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tau1" => Some(FreeParam::Tau1),
            "tau2" => Some(FreeParam::Tau2),
            "slope1" => Some(FreeParam::Slope1),
            "slope2" => Some(FreeParam::Slope2),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FreeParam::Tau1 => "tau1",
            FreeParam::Tau2 => "tau2",
            FreeParam::Slope1 => "slope1",
            FreeParam::Slope2 => "slope2",
        }
    }

    fn is_tau(self) -> bool {
        matches!(self, FreeParam::Tau1 | FreeParam::Tau2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeSpec {
    /// Free parameters with their `[lo, hi]` bounds.
    pub free: Vec<(FreeParam, f64, f64)>,
    /// Values of the gate parameters that are not free.
    pub tau: (f64, f64),
    pub slope: (f64, f64),
    pub params: CascadeParams,
    /// Points per free parameter in the initial scan.
    pub grid_points: usize,
    pub rel_tol: f64,
    pub max_evaluations: usize,
    pub quad: QuadratureSpec,
    pub numerator: Numerator,
    pub drop_y2: bool,
}

impl OptimizeSpec {
    pub fn delays(params: CascadeParams, hi: f64) -> Self {
        OptimizeSpec {
            free: vec![(FreeParam::Tau1, 0.0, hi), (FreeParam::Tau2, 0.0, hi)],
            tau: (1.0, 1.0),
            slope: (1.0, -1.0),
            params,
            grid_points: 7,
            rel_tol: 1e-5,
            max_evaluations: 400,
            quad: QuadratureSpec::default(),
            numerator: Numerator::AsWritten,
            drop_y2: true,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.free.is_empty() {
            return Err(SweepError::Invalid("no free parameters".into()));
        }
        let tau = self.free.iter().any(|f| f.0.is_tau());
        let slope = self.free.iter().any(|f| !f.0.is_tau());
        if tau && slope {
            return Err(SweepError::Invalid("tau and slope parameters cannot be mixed".into()));
        }
        for (i, &(p, lo, hi)) in self.free.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(SweepError::Invalid(format!("bad bounds for {}: [{lo}, {hi}]", p.name())));
            }
            if self.free[..i].iter().any(|f| f.0 == p) {
                return Err(SweepError::Invalid(format!("{} listed twice", p.name())));
            }
        }
        if self.grid_points == 0 || self.max_evaluations == 0 {
            return Err(SweepError::Invalid("grid_points and max_evaluations must be positive".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(SweepError::Invalid("rel_tol must be positive".into()));
        }
        self.quad.validate().map_err(|e| SweepError::Invalid(e.to_string()))?;
        self.params.validate()?;
        Ok(())
    }

    /// The gate at free-parameter values `x` (in the order of `free`).
    pub fn gate_at(&self, x: &[f64]) -> PhaseGate {
        let (mut t1, mut t2) = self.tau;
        let (mut s1, mut s2) = self.slope;
        for (&(p, _, _), &v) in self.free.iter().zip(x) {
            match p {
                FreeParam::Tau1 => t1 = v,
                FreeParam::Tau2 => t2 = v,
                FreeParam::Slope1 => s1 = v,
                FreeParam::Slope2 => s2 = v,
            }
        }
        if self.free[0].0.is_tau() {
            PhaseGate::delay(t1, t2)
        } else {
            PhaseGate::LinearPhase { slope1: s1, slope2: s2, phase0: 0.0 }
        }
    }

    fn objective(&self, x: &[f64]) -> f64 {
        let w = self.gate_at(x);
        let opts = LeadingOptions { numerator: self.numerator, drop_y2: self.drop_y2 };
        // with y2 dropped, a linear phase only turns y1 by a constant under
        // κ1 → κ1 + Δ, κ2 → κ2 − Δ, so |y1| is evaluated at Δ = 0
        let params = if self.drop_y2 { CascadeParams { delta: 0.0, ..self.params } } else { self.params };
        gamma_leading_with(&params, &w, &self.quad, opts).gamma
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePoint {
    pub x: Vec<f64>,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub best: Vec<(FreeParam, f64)>,
    pub gamma: f64,
    pub gate: PhaseGate,
    pub trace: Vec<TracePoint>,
    pub converged: bool,
}

struct Search<'a> {
    spec: &'a OptimizeSpec,
    trace: Vec<TracePoint>,
}

impl Search<'_> {
    /// Evaluates as many of `xs` as the budget allows, in order.
    fn batch(&mut self, xs: Vec<Vec<f64>>) -> Vec<f64> {
        let room = self.spec.max_evaluations - self.trace.len();
        let xs: Vec<Vec<f64>> = xs.into_iter().take(room).collect();
        let vals: Vec<f64> = xs.par_iter().map(|x| self.spec.objective(x)).collect();
        for (x, &gamma) in xs.into_iter().zip(&vals) {
            self.trace.push(TracePoint { x, gamma });
        }
        vals
    }

    fn exhausted(&self) -> bool {
        self.trace.len() >= self.spec.max_evaluations
    }
}

/// Grid scan over the free parameters followed by a compass search from the
/// best grid point. Deterministic for a given spec.
pub fn optimize_delays(spec: &OptimizeSpec) -> Result<OptimizeResult, SweepError> {
    spec.validate()?;
    let n = spec.grid_points;
    let axes: Vec<Vec<f64>> = spec
        .free
        .iter()
        .map(|&(_, lo, hi)| if n == 1 || lo == hi { vec![0.5 * (lo + hi)] } else { grid((lo, hi), n, Spacing::Linear) })
        .collect();
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in &axes {
        points = points.iter().flat_map(|p| axis.iter().map(move |&v| [p.as_slice(), &[v]].concat())).collect();
    }
    let mut search = Search { spec, trace: Vec::new() };
    let vals = search.batch(points.clone());
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for (i, &v) in vals.iter().enumerate() {
        if v > best {
            (best_i, best) = (i, v);
        }
    }
    let mut x = points[best_i].clone();
    let mut step: Vec<f64> = spec.free.iter().map(|&(_, lo, hi)| 0.5 * (hi - lo) / (n.max(2) - 1) as f64).collect();
    let floor: Vec<f64> = spec.free.iter().map(|&(_, lo, hi)| 1e-4 * (hi - lo)).collect();
    let mut converged = true;
    while step.iter().zip(&floor).any(|(s, f)| s > f) {
        if search.exhausted() {
            converged = false;
            break;
        }
        let mut polls = Vec::new();
        for d in 0..x.len() {
            let (_, lo, hi) = spec.free[d];
            for sign in [1.0, -1.0] {
                let mut y = x.clone();
                y[d] = (x[d] + sign * step[d]).clamp(lo, hi);
                if y[d] != x[d] {
                    polls.push(y);
                }
            }
        }
        let full = polls.len();
        let vals = search.batch(polls.clone());
        let mut moved = false;
        if let Some((i, &v)) = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) {
            if v > best + spec.rel_tol * best.abs() {
                (x, best, moved) = (polls[i].clone(), v, true);
            }
        }
        if vals.len() < full && !moved {
            converged = false;
            break;
        }
        if !moved {
            for s in &mut step {
                *s *= 0.5;
            }
        }
    }
    Ok(OptimizeResult {
        best: spec.free.iter().map(|f| f.0).zip(x.iter().copied()).collect(),
        gamma: best,
        gate: spec.gate_at(&x),
        trace: search.trace,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub kappa2: f64,
    pub arg_wopt: f64,
    pub linear: f64,
    pub difference: f64,
}

pub const FIG2A_RANGE: (f64, f64) = (-3.0, 3.0);

/// `arg W_opt` at `k1 = E_x` against `κ2 = (k2 − E_y)/Γ`, next to the
/// delay-line phase `π − κ2` and their difference `linear − arg`.
pub fn fig2a_table(points: usize, range: (f64, f64)) -> Result<Vec<ProfileRow>, SweepError> {
    if points < 2 || !(range.0 < range.1) {
        return Err(SweepError::Invalid("need points >= 2 and lo < hi".into()));
    }
    let z = ComplexEnergy::new(0.0, 1.0);
    let ks = grid(range, points, Spacing::Linear);
    Ok(arg_wopt_profile(z, z, 0.0, &ks)
        .into_iter()
        .map(|(kappa2, arg)| {
            let linear = PI - kappa2;
            ProfileRow { kappa2, arg_wopt: arg, linear, difference: linear - arg }
        })
        .collect())
}

/// `%.12g`-style formatting, independent of locale.
pub fn fmt12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.11e}", v);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, v);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn round12(v: f64) -> f64 {
    fmt12(v).parse().unwrap_or(v)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("axis,gamma,re_y1,im_y1,re_y2,im_y2,err\n");
    for r in rows {
        let cols = [r.axis, r.gamma, r.y1.re, r.y1.im, r.y2.re, r.y2.im, r.err].map(fmt12);
        writeln!(s, "{}", cols.join(",")).unwrap();
    }
    s
}

#[derive(Serialize)]
struct SweepJsonRow<'a> {
    axis: f64,
    gamma: f64,
    re_y1: f64,
    im_y1: f64,
    re_y2: f64,
    im_y2: f64,
    err: f64,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    y2_bound: Option<f64>,
    warnings: &'a [String],
}

pub fn sweep_json(rows: &[SweepRow]) -> String {
    let out: Vec<SweepJsonRow> = rows
        .iter()
        .map(|r| SweepJsonRow {
            axis: round12(r.axis),
            gamma: round12(r.gamma),
            re_y1: round12(r.y1.re),
            im_y1: round12(r.y1.im),
            re_y2: round12(r.y2.re),
            im_y2: round12(r.y2.im),
            err: round12(r.err),
            converged: r.converged,
            y2_bound: r.y2_bound.map(round12),
            warnings: &r.warnings,
        })
        .collect();
    serde_json::to_string_pretty(&out).unwrap() + "\n"
}

pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut s = String::from("kappa2,arg_wopt,linear,difference\n");
    for r in rows {
        writeln!(s, "{}", [r.kappa2, r.arg_wopt, r.linear, r.difference].map(fmt12).join(",")).unwrap();
    }
    s
}

pub fn profile_json(rows: &[ProfileRow]) -> String {
    let out: Vec<ProfileRow> = rows
        .iter()
        .map(|r| ProfileRow {
            kappa2: round12(r.kappa2),
            arg_wopt: round12(r.arg_wopt),
            linear: round12(r.linear),
            difference: round12(r.difference),
        })
        .collect();
    serde_json::to_string_pretty(&out).unwrap() + "\n"
}

/// The evaluation trace, one row per objective call in logical order.
pub fn trace_csv(spec: &OptimizeSpec, res: &OptimizeResult) -> String {
    let names: Vec<&str> = spec.free.iter().map(|f| f.0.name()).collect();
    let mut s = format!("index,{},gamma\n", names.join(","));
    for (i, t) in res.trace.iter().enumerate() {
        let xs: Vec<String> = t.x.iter().map(|&v| fmt12(v)).collect();
        writeln!(s, "{i},{},{}", xs.join(","), fmt12(t.gamma)).unwrap();
    }
    s
}

pub fn optimize_json(res: &OptimizeResult) -> String {
    let best: serde_json::Map<String, serde_json::Value> =
        res.best.iter().map(|&(p, v)| (p.name().to_string(), serde_json::json!(round12(v)))).collect();
    let trace: Vec<TracePoint> =
        res.trace.iter().map(|t| TracePoint { x: t.x.iter().map(|&v| round12(v)).collect(), gamma: round12(t.gamma) }).collect();
    let v = serde_json::json!({
        "best": best,
        "gamma": round12(res.gamma),
        "converged": res.converged,
        "evaluations": res.trace.len(),
        "trace": trace,
    });
    serde_json::to_string_pretty(&v).unwrap() + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::gamma_raw;
    use crate::overlap::gamma_leading;

    fn params(delta: f64, beta: f64, g: f64) -> CascadeParams {
        CascadeParams::new(delta, beta, g).unwrap()
    }

    #[test]
    fn grid_is_inclusive() {
        let g = grid((0.1, 4.0), 40, Spacing::Linear);
        assert_eq!(g.len(), 40);
        assert_eq!((g[0], g[39]), (0.1, 4.0));
        let l = grid((0.01, 1.0), 3, Spacing::Log);
        assert!((l[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn formatting() {
        assert_eq!(fmt12(0.5), "0.5");
        assert_eq!(fmt12(-1.484907490843088), "-1.48490749084");
        assert_eq!(fmt12(1e-7), "1e-07");
        assert_eq!(fmt12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt12(2.0), "2");
        assert_eq!(fmt12(0.0497518595231), "0.0497518595231");
    }

    #[test]
    fn raw_delta_sweep_follows_closed_form() {
        let spec = SweepSpec::new(SweepAxis::Delta, (0.0, 10.0), 6, params(0.0, 0.0, 2.0), GateSpec::Identity);
        for r in sweep(&spec).unwrap() {
            assert!((r.gamma - gamma_raw(r.axis)).abs() < 1e-3, "{r:?}");
        }
    }

    #[test]
    fn rows_do_not_depend_on_grid_order() {
        let spec = SweepSpec::new(SweepAxis::G, (0.5, 2.0), 4, params(0.0, 0.0, 1.0), GateSpec::Optimal);
        let rows = sweep(&spec).unwrap();
        for r in &rows {
            let single = SweepSpec { range: (r.axis, r.axis + 1.0), points: 2, ..spec.clone() };
            let first = &sweep(&single).unwrap()[0];
            assert_eq!(first, r);
        }
        assert_eq!(sweep_csv(&rows), sweep_csv(&sweep(&spec).unwrap()));
    }

    #[test]
    fn beta_axis_conventions() {
        let mut spec = SweepSpec::new(SweepAxis::Beta, (-2.0, 2.0), 3, params(0.0, 0.0, 2.0), GateSpec::Optimal);
        spec.drop_y2 = true;
        let kernel = sweep(&spec).unwrap();
        spec.beta_convention = BetaConvention::Levels;
        spec.range = (-1.0, 1.0);
        let levels = sweep(&spec).unwrap();
        for (a, b) in kernel.iter().zip(&levels) {
            assert!((a.gamma - b.gamma).abs() < 1e-12);
            assert_eq!(a.axis, 2.0 * b.axis);
        }
    }

    #[test]
    fn invalid_specs() {
        let p = params(0.0, 0.0, 1.0);
        let bad = |s: SweepSpec| assert!(sweep(&s).is_err());
        bad(SweepSpec::new(SweepAxis::G, (1.0, 1.0), 5, p, GateSpec::Identity));
        bad(SweepSpec::new(SweepAxis::G, (0.0, 1.0), 5, p, GateSpec::Identity));
        bad(SweepSpec::new(SweepAxis::Delta, (0.0, 1.0), 1, p, GateSpec::Identity));
        bad(SweepSpec::new(SweepAxis::Kappa2, (0.0, 1.0), 5, p, GateSpec::Identity));
        let mut o = OptimizeSpec::delays(p, 3.0);
        o.free.push((FreeParam::Slope1, 0.0, 1.0));
        assert!(optimize_delays(&o).is_err());
        o.free = vec![];
        assert!(optimize_delays(&o).is_err());
    }

    #[test]
    fn profile_table() {
        let rows = fig2a_table(101, FIG2A_RANGE).unwrap();
        let mid = rows[50];
        assert_eq!(mid.kappa2, 0.0);
        assert!((mid.arg_wopt - PI).abs() < 1e-15 && mid.difference.abs() < 1e-15);
        let one = fig2a_table(3, (-1.0, 1.0)).unwrap()[2];
        assert!((one.arg_wopt - 0.75 * PI).abs() < 1e-12);
        assert!((one.difference - (PI / 4.0 - 1.0)).abs() < 1e-12);
        for (a, b) in rows.iter().zip(rows.iter().rev()) {
            assert!((a.difference + b.difference).abs() < 1e-12);
        }
        assert!(profile_csv(&rows).starts_with("kappa2,arg_wopt,linear,difference\n"));
    }

    #[test]
    fn singleton_grid_is_a_single_evaluation() {
        let p = params(0.0, 0.0, 2.0);
        let mut o = OptimizeSpec::delays(p, 3.0);
        o.free = vec![(FreeParam::Tau1, 1.0, 1.0), (FreeParam::Tau2, 1.0, 1.0)];
        let r = optimize_delays(&o).unwrap();
        assert_eq!(r.trace.len(), 1);
        let direct = gamma_leading_with(&p, &PhaseGate::delay(1.0, 1.0), &o.quad, LeadingOptions { drop_y2: true, ..Default::default() });
        assert_eq!(r.gamma, direct.gamma);
    }

    #[test]
    fn optimizer_respects_budget_and_improves_on_start() {
        let p = params(0.0, 0.0, 2.0);
        let mut o = OptimizeSpec::delays(p, 3.0);
        o.max_evaluations = 30;
        o.grid_points = 4;
        let r = optimize_delays(&o).unwrap();
        assert!(r.trace.len() <= 30);
        assert!(!r.converged);
        let again = optimize_delays(&o).unwrap();
        assert_eq!(r, again);
        let start = r.trace[..16].iter().map(|t| t.gamma).fold(f64::NEG_INFINITY, f64::max);
        assert!(r.gamma >= start);
    }

    #[test]
    fn csv_and_json_round_trip() {
        let spec = SweepSpec::new(SweepAxis::Delta, (0.0, 1.0), 2, params(0.0, 0.0, 2.0), GateSpec::Identity);
        let rows = sweep(&spec).unwrap();
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with("axis,gamma,re_y1,im_y1,re_y2,im_y2,err\n"));
        assert_eq!(csv.lines().count(), 3);
        let v: serde_json::Value = serde_json::from_str(&sweep_json(&rows)).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 2);
        assert!((v[0]["gamma"].as_f64().unwrap() - 0.5).abs() < 1e-6);
        let g = gamma_leading(&params(1.0, 0.0, 2.0), &PhaseGate::Identity, &spec.quad).gamma;
        assert!((v[1]["gamma"].as_f64().unwrap() - g).abs() < 1e-11);
    }
}
