//! The `cascade` command line: subcommand dispatch, config merging and
//! table output.
//!
//! Exit codes: 0 on success, 1 on configuration errors (and failed
//! `validate` checks), 2 when results were produced but some quadrature did
//! not converge.

pub mod config;

use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;

use crate::analytic::gamma_raw;
use crate::gates::PhaseGate;
use crate::levels::{to_params, CascadeParams};
use crate::negativity::{build_rho, negativity_of};
use crate::overlap::{
    gamma_full_with, gamma_leading, gamma_leading_with, y1_integral, y1_reduced, FullOptions, LeadingOptions, Numerator, OverlapResult,
    QuadratureSpec,
};
use crate::sweeps::{
    fig2a_table, fmt12, optimize_delays, optimize_json, profile_csv, profile_json, sweep, sweep_csv, sweep_json, trace_csv, BetaConvention,
    FreeParam, GateSpec, OptimizeSpec, Spacing, SweepAxis, SweepRow, SweepSpec, FIG2A_RANGE,
};
use config::{parse_beta_convention, parse_format, parse_free, parse_numerator, parse_params, ConfigError, Format, RunConfig, System};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_UNCONVERGED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "cascade", version, about = "Entanglement of time-reordered cascade photon pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// INI config file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write the table here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "csv|json")]
    format: Option<String>,
    /// Absolute quadrature tolerance.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    #[arg(long, value_name = "N")]
    points: Option<usize>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    range: Option<Vec<f64>>,
    /// identity, optimal, delay, linear or custom.
    #[arg(long, value_name = "NAME")]
    gate: Option<String>,
    /// Dimensionless parameters, e.g. `delta=0 beta=0 g=2`.
    #[arg(long, num_args = 1.., value_name = "K=V")]
    params: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tau1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tau2: Option<f64>,
    /// as_written, symmetrized or color_ordered.
    #[arg(long)]
    numerator: Option<String>,
    /// Drop the same-generation overlap (|Δ| ≫ 1).
    #[arg(long)]
    drop_y2: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// γ at a single point.
    Gamma(Common),
    /// γ against g.
    SweepG {
        #[command(flatten)]
        common: Common,
        /// Logarithmic spacing.
        #[arg(long)]
        log: bool,
    },
    /// γ against the color-matching parameter.
    SweepBeta {
        #[command(flatten)]
        common: Common,
        /// `kernel` (sum-detuning variable, default) or `levels`.
        #[arg(long)]
        beta_convention: Option<String>,
    },
    /// γ against the exciton splitting.
    SweepDelta(Common),
    /// arg W_opt at k1 = E_x against κ2, with its linear approximation.
    WoptProfile(Common),
    /// Searches the delay family for the largest γ.
    OptimizeDelays {
        #[command(flatten)]
        common: Common,
        /// Free parameters, e.g. `tau1,tau2`.
        #[arg(long)]
        free: Option<String>,
        #[arg(long)]
        grid_points: Option<usize>,
        #[arg(long)]
        max_evaluations: Option<usize>,
    },
    /// Runs the oracle cross-checks.
    Validate(Common),
}

#[derive(Debug)]
enum Failure {
    Config(ConfigError),
    Other(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "config error: {e}"),
            Failure::Other(e) => write!(f, "error: {e}"),
        }
    }
}

fn other(e: impl std::fmt::Display) -> Failure {
    Failure::Other(e.to_string())
}

fn read_file(path: &str) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{path}: {e}")))
}

/// Config file merged with command-line flags.
struct Resolved {
    cfg: RunConfig,
    common: Common,
}

impl Resolved {
    fn new(common: &Common) -> Result<Resolved, Failure> {
        let mut cfg = match &common.config {
            Some(p) => RunConfig::parse(&read_file(&p.to_string_lossy())?)?,
            None => RunConfig::default(),
        };
        if let Some(t) = common.tol {
            cfg.quad.abs_tol = t;
        }
        cfg.quad.validate().map_err(|e| ConfigError::Invalid { key: "tol".into(), msg: e.to_string() })?;
        if let Some(g) = &common.gate {
            cfg.gate.name = Some(g.clone());
        }
        if let Some(t) = common.tau1 {
            cfg.gate.values.insert("tau1".into(), t);
        }
        if let Some(t) = common.tau2 {
            cfg.gate.values.insert("tau2".into(), t);
        }
        if let Some(f) = &common.format {
            cfg.output.format = Some(parse_format(f)?);
        }
        if let Some(p) = &common.out {
            cfg.output.path = Some(p.to_string_lossy().into_owned());
        }
        if let Some(n) = &common.numerator {
            cfg.sweep.numerator = Some(parse_numerator(n)?);
        }
        if common.drop_y2 {
            cfg.sweep.drop_y2 = Some(true);
            cfg.optimize.drop_y2 = Some(true);
        }
        Ok(Resolved { cfg, common: common.clone() })
    }

    fn overrides(&self) -> Result<Vec<(String, f64)>, ConfigError> {
        let mut m: Vec<(String, f64)> = parse_params(&self.common.params)?.into_iter().collect();
        for (k, v) in [("delta", self.common.delta), ("beta", self.common.beta), ("g", self.common.g)] {
            if let Some(v) = v {
                m.retain(|e| e.0 != k);
                m.push((k.into(), v));
            }
        }
        Ok(m)
    }

    /// The system with command-line parameters applied; `fallback` fills in
    /// when neither the config nor the flags give one.
    fn system(&self, fallback: Option<CascadeParams>) -> Result<System, ConfigError> {
        let over = self.overrides()?;
        let base = match &self.cfg.system {
            Some(System::Levels(d)) => {
                if !over.is_empty() {
                    return Err(ConfigError::BothSystems);
                }
                return Ok(System::Levels(*d));
            }
            Some(System::Params(p)) => Some(*p),
            None => fallback,
        };
        let mut p = match base {
            Some(p) => p,
            None => {
                let has = |k: &str| over.iter().any(|e| e.0 == k);
                if !(has("delta") && has("beta") && has("g")) {
                    return Err(ConfigError::MissingSection("params".into()));
                }
                CascadeParams { delta: 0.0, beta: 0.0, g: 1.0 }
            }
        };
        for (k, v) in over {
            match k.as_str() {
                "delta" => p.delta = v,
                "beta" => p.beta = v,
                _ => p.g = v,
            }
        }
        p.validate().map_err(|e| ConfigError::Invalid { key: "params".into(), msg: e.to_string() })?;
        Ok(System::Params(p))
    }

    fn params(&self, fallback: CascadeParams) -> Result<CascadeParams, ConfigError> {
        match self.system(Some(fallback))? {
            System::Params(p) => Ok(p),
            System::Levels(d) => to_params(&d).map_err(|e| ConfigError::Invalid { key: "levels".into(), msg: e.to_string() }),
        }
    }

    fn gate_spec(&self, params: &CascadeParams) -> Result<GateSpec, ConfigError> {
        let name = self.cfg.gate.name.as_deref().unwrap_or("identity").trim().to_ascii_lowercase();
        Ok(match name.as_str() {
            "identity" | "none" => GateSpec::Identity,
            "optimal" | "wopt" => GateSpec::Optimal,
            _ => GateSpec::Fixed(self.cfg.gate.build(params, &read_file)?),
        })
    }

    fn range(&self, default: (f64, f64)) -> (f64, f64) {
        match &self.common.range {
            Some(v) => (v[0], v[1]),
            None => self.cfg.sweep.range.unwrap_or(default),
        }
    }

    fn points(&self, default: usize) -> usize {
        self.common.points.or(self.cfg.sweep.points).unwrap_or(default)
    }

    fn format(&self) -> Format {
        self.cfg.output.format.unwrap_or_default()
    }

    fn emit(&self, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
        match &self.cfg.output.path {
            Some(p) => std::fs::write(p, text).map_err(|e| other(format!("{p}: {e}"))),
            None => stdout.write_all(text.as_bytes()).map_err(other),
        }
    }
}

const DEFAULT_PARAMS: CascadeParams = CascadeParams { delta: 0.0, beta: 0.0, g: 2.0 };

fn rows_table(r: &Resolved, rows: &[SweepRow]) -> String {
    match r.format() {
        Format::Csv => sweep_csv(rows),
        Format::Json => sweep_json(rows),
    }
}

fn report_warnings(res: &OverlapResult, stderr: &mut dyn Write) {
    for w in &res.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
}

fn cmd_gamma(common: &Common, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let r = Resolved::new(common)?;
    let system = r.system(None)?;
    let res = match system {
        System::Params(p) => {
            let w = r.gate_spec(&p)?.resolve(&p);
            let opts =
                LeadingOptions { numerator: r.cfg.sweep.numerator.unwrap_or_default(), drop_y2: r.cfg.sweep.drop_y2.unwrap_or(false) };
            gamma_leading_with(&p, &w, &r.cfg.quad, opts)
        }
        System::Levels(d) => {
            let p = to_params(&d).map_err(other)?;
            let w = match r.gate_spec(&p)? {
                GateSpec::Optimal => PhaseGate::optimal_for(&d),
                spec => spec.resolve(&p).to_physical(&d),
            };
            let opts = FullOptions { numerator: r.cfg.sweep.numerator.unwrap_or(Numerator::ColorOrdered), ..FullOptions::default() };
            gamma_full_with(&d, &w, &r.cfg.quad, opts).map_err(other)?
        }
    };
    writeln!(stdout, "gamma = {} +/- {}", fmt12(res.gamma), fmt12(res.error_estimate)).map_err(other)?;
    report_warnings(&res, stderr);
    if r.cfg.output.path.is_some() {
        let row = SweepRow {
            axis: 0.0,
            gamma: res.gamma,
            y1: res.y1,
            y2: res.y2,
            err: res.error_estimate,
            converged: res.reliable(),
            y2_bound: res.y2_bound,
            warnings: res.warnings.iter().map(|w| w.to_string()).collect(),
        };
        r.emit(&rows_table(&r, &[row]), stdout)?;
    }
    Ok(if res.reliable() { EXIT_OK } else { EXIT_UNCONVERGED })
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    common: &Common,
    axis: SweepAxis,
    default_range: (f64, f64),
    default_points: usize,
    log: bool,
    beta_convention: Option<&str>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let r = Resolved::new(common)?;
    let fixed = r.params(DEFAULT_PARAMS)?;
    let mut spec = SweepSpec::new(axis, r.range(default_range), r.points(default_points), fixed, r.gate_spec(&fixed)?);
    spec.quad = r.cfg.quad;
    spec.spacing = if log { Spacing::Log } else { r.cfg.sweep.spacing.unwrap_or_default() };
    spec.beta_convention = match beta_convention {
        Some(v) => parse_beta_convention(v)?,
        None => r.cfg.sweep.beta_convention.unwrap_or(BetaConvention::Kernel),
    };
    spec.numerator = r.cfg.sweep.numerator.unwrap_or_default();
    spec.drop_y2 = r.cfg.sweep.drop_y2.unwrap_or(false);
    let rows = sweep(&spec).map_err(|e| ConfigError::Invalid { key: "sweep".into(), msg: e.to_string() })?;
    r.emit(&rows_table(&r, &rows), stdout)?;
    let bad = rows.iter().filter(|row| !row.converged).count();
    if bad > 0 {
        let _ = writeln!(stderr, "warning: {bad} of {} points did not converge", rows.len());
        return Ok(EXIT_UNCONVERGED);
    }
    Ok(EXIT_OK)
}

fn cmd_profile(common: &Common, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let r = Resolved::new(common)?;
    let rows = fig2a_table(r.points(101), r.range(FIG2A_RANGE))
        .map_err(|e| ConfigError::Invalid { key: "wopt-profile".into(), msg: e.to_string() })?;
    let text = match r.format() {
        Format::Csv => profile_csv(&rows),
        Format::Json => profile_json(&rows),
    };
    r.emit(&text, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_optimize(
    common: &Common,
    free: Option<&str>,
    grid_points: Option<usize>,
    max_evaluations: Option<usize>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let r = Resolved::new(common)?;
    let params = r.params(DEFAULT_PARAMS)?;
    let o = &r.cfg.optimize;
    let names = match free {
        Some(f) => parse_free(f)?,
        None => o.free.clone().unwrap_or(vec![FreeParam::Tau1, FreeParam::Tau2]),
    };
    let mut spec = OptimizeSpec::delays(params, 3.0);
    spec.free = names
        .iter()
        .map(|&p| {
            let (lo, hi) = match &common.range {
                Some(v) => (v[0], v[1]),
                None => o.bounds.get(&p).copied().unwrap_or((0.0, 3.0)),
            };
            (p, lo, hi)
        })
        .collect();
    let v = &r.cfg.gate.values;
    spec.tau = (v.get("tau1").copied().unwrap_or(1.0), v.get("tau2").copied().unwrap_or(1.0));
    spec.slope = (v.get("slope1").copied().unwrap_or(1.0), v.get("slope2").copied().unwrap_or(-1.0));
    spec.grid_points = grid_points.or(o.grid_points).unwrap_or(spec.grid_points);
    spec.max_evaluations = max_evaluations.or(o.max_evaluations).unwrap_or(spec.max_evaluations);
    spec.rel_tol = o.rel_tol.unwrap_or(spec.rel_tol);
    spec.drop_y2 = o.drop_y2.unwrap_or(true);
    spec.quad = r.cfg.quad;
    spec.numerator = r.cfg.sweep.numerator.unwrap_or_default();
    let res = optimize_delays(&spec).map_err(|e| ConfigError::Invalid { key: "optimize".into(), msg: e.to_string() })?;
    let best: Vec<String> = res.best.iter().map(|(p, v)| format!("{} = {}", p.name(), fmt12(*v))).collect();
    writeln!(stdout, "{}, gamma = {}, evaluations = {}", best.join(", "), fmt12(res.gamma), res.trace.len()).map_err(other)?;
    if r.cfg.output.path.is_some() {
        let text = match r.format() {
            Format::Csv => trace_csv(&spec, &res),
            Format::Json => optimize_json(&res),
        };
        r.emit(&text, stdout)?;
    }
    if !res.converged {
        let _ = writeln!(stderr, "warning: evaluation budget exhausted before the search converged");
        return Ok(EXIT_UNCONVERGED);
    }
    Ok(EXIT_OK)
}

/// One oracle cross-check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Closed forms against quadrature against the Peres eigenvalue route.
pub fn validation_suite(quad: &QuadratureSpec) -> Vec<Check> {
    let mut out = Vec::new();
    let mut check = |name: &str, worst: f64, tol: f64| {
        out.push(Check {
            name: name.into(),
            passed: worst < tol,
            detail: format!("max deviation {} (tolerance {})", fmt12(worst), fmt12(tol)),
        });
    };
    let p = |d: f64, b: f64, g: f64| CascadeParams { delta: d, beta: b, g };
    let mut raw: f64 = 0.0;
    let mut y1: f64 = 0.0;
    for d in [0.0, 1.0, 5.0, 10.0] {
        for b in [0.0, 2.0] {
            let r = gamma_leading(&p(d, b, 2.0), &PhaseGate::Identity, quad);
            raw = raw.max((r.gamma - gamma_raw(d)).abs());
            y1 = y1.max(r.y1.norm());
        }
    }
    check("raw gamma closed form", raw, 1e-3);
    check("vanishing cross term", y1, 1e-5);
    let mut routes: f64 = 0.0;
    for (b, g) in [(0.0, 2.0), (1.0, 1.0), (2.0, 0.5)] {
        let pp = p(0.0, b, g);
        routes = routes.max((y1_reduced(&pp, quad).value - y1_integral(&pp, &PhaseGate::optimal(&pp), quad).value).norm());
    }
    check("reduced vs plane y1", routes, 1e-4);
    let mut peres: f64 = 0.0;
    for (d, b, g) in [(0.0, 0.0, 2.0), (1.0, 0.5, 1.0), (3.0, -1.0, 0.5)] {
        let pp = p(d, b, g);
        for w in [PhaseGate::Identity, PhaseGate::optimal(&pp), PhaseGate::delay(1.0, 1.0)] {
            let r = gamma_leading(&pp, &w, quad);
            let n = negativity_of(&r).map(|n| (n - r.gamma).abs()).unwrap_or(f64::INFINITY);
            peres = peres.max(n);
        }
    }
    check("negativity equals gamma", peres, 1e-8);
    let rho = build_rho(1.5, 2.5, num_complex::Complex64::new(0.3, -1.2)).expect("valid state");
    check("partial transpose involution", if rho.partial_transpose().partial_transpose() == rho { 0.0 } else { 1.0 }, 0.5);
    let lim = p(0.0, 0.0, 0.01);
    let g0 = gamma_leading_with(&lim, &PhaseGate::optimal(&lim), quad, LeadingOptions { drop_y2: true, ..Default::default() }).gamma;
    check("narrow top level limit", (g0 - 0.5).abs(), 1e-2);
    out
}

fn cmd_validate(common: &Common, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let r = Resolved::new(common)?;
    let checks = validation_suite(&r.cfg.quad);
    for c in &checks {
        writeln!(stdout, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail).map_err(other)?;
    }
    Ok(if checks.iter().all(|c| c.passed) { EXIT_OK } else { EXIT_CONFIG })
}

/// Runs the command line `args` (including the program name).
pub fn run_with<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let res = match &cli.command {
        Command::Gamma(c) => cmd_gamma(c, stdout, stderr),
        Command::SweepG { common, log } => cmd_sweep(common, SweepAxis::G, (0.1, 4.0), 40, *log, None, stdout, stderr),
        Command::SweepBeta { common, beta_convention } => {
            cmd_sweep(common, SweepAxis::Beta, (-6.0, 6.0), 49, false, beta_convention.as_deref(), stdout, stderr)
        }
        Command::SweepDelta(c) => cmd_sweep(c, SweepAxis::Delta, (0.0, 10.0), 21, false, None, stdout, stderr),
        Command::WoptProfile(c) => cmd_profile(c, stdout),
        Command::OptimizeDelays { common, free, grid_points, max_evaluations } => {
            cmd_optimize(common, free.as_deref(), *grid_points, *max_evaluations, stdout, stderr)
        }
        Command::Validate(c) => cmd_validate(c, stdout),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            EXIT_CONFIG
        }
    }
}

pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
