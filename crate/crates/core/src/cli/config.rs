//! INI-style run configuration.
//!
//! ```text
//! # comment
//! [params]
//! delta = 10
//! beta = 0
//! g = 2
//! ```
//!
//! Sections: `levels`, `params`, `gate`, `quadrature`, `sweep`, `optimize`,
//! `output`. Unknown sections and keys are errors.

use std::collections::BTreeMap;
use thiserror::Error;

use crate::gates::{PhaseGate, PhaseTable, SpectralPhase};
use crate::levels::{CascadeParams, LevelDiagram};
use crate::overlap::{Numerator, QuadratureSpec};
use crate::sweeps::{BetaConvention, FreeParam, Spacing};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown config keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("missing section [{0}]")]
    MissingSection(String),
    #[error("{key}: {msg}")]
    Invalid { key: String, msg: String },
    #[error("both [levels] and [params] given; use one")]
    BothSystems,
    #[error("{0}")]
    Io(String),
}

fn invalid(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), msg: msg.into() }
}

/// Parsed `[section]` blocks in file order, keys in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ini {
    pub sections: Vec<(String, Vec<(String, String)>)>,
}

impl Ini {
    pub fn section(&self, name: &str) -> Option<&[(String, String)]> {
        self.sections.iter().find(|s| s.0 == name).map(|s| s.1.as_slice())
    }
}

pub fn parse_ini(text: &str) -> Result<Ini, ConfigError> {
    let mut ini = Ini::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') || l.starts_with(';') {
            continue;
        }
        if let Some(rest) = l.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax { line, msg: format!("unterminated section header {l:?}") })?
                .trim()
                .to_ascii_lowercase();
            if name.is_empty() {
                return Err(ConfigError::Syntax { line, msg: "empty section name".into() });
            }
            if ini.section(&name).is_some() {
                return Err(ConfigError::Syntax { line, msg: format!("section [{name}] repeated") });
            }
            ini.sections.push((name, Vec::new()));
            continue;
        }
        let (k, v) = l.split_once('=').ok_or_else(|| ConfigError::Syntax { line, msg: format!("expected key = value, got {l:?}") })?;
        let key = k.trim().to_ascii_lowercase();
        if key.is_empty() {
            return Err(ConfigError::Syntax { line, msg: "empty key".into() });
        }
        let Some((_, entries)) = ini.sections.last_mut() else {
            return Err(ConfigError::Syntax { line, msg: format!("key {key:?} outside any section") });
        };
        if entries.iter().any(|e| e.0 == key) {
            return Err(ConfigError::Syntax { line, msg: format!("key {key:?} repeated") });
        }
        entries.push((key, v.trim().to_string()));
    }
    Ok(ini)
}

const KNOWN: &[(&str, &[&str])] = &[
    ("levels", &["e_u", "e_x", "e_y", "e_0", "gamma", "gamma_u"]),
    ("params", &["delta", "beta", "g"]),
    ("gate", &["name", "tau1", "tau2", "slope1", "slope2", "phase0", "profile1", "profile2"]),
    ("quadrature", &["abs_tol", "max_subdivisions", "k", "richardson_check"]),
    ("sweep", &["range", "points", "spacing", "beta_convention", "drop_y2", "numerator"]),
    (
        "optimize",
        &["free", "tau1_range", "tau2_range", "slope1_range", "slope2_range", "grid_points", "rel_tol", "max_evaluations", "drop_y2"],
    ),
    ("output", &["format", "path"]),
];

fn check_known(ini: &Ini) -> Result<(), ConfigError> {
    let mut unknown = Vec::new();
    for (name, entries) in &ini.sections {
        match KNOWN.iter().find(|k| k.0 == name) {
            None => unknown.push(format!("[{name}]")),
            Some((_, keys)) => unknown.extend(entries.iter().filter(|e| !keys.contains(&e.0.as_str())).map(|e| format!("{name}.{}", e.0))),
        }
    }
    if unknown.is_empty() {
        Ok(())
    } else {
        Err(ConfigError::UnknownKeys(unknown))
    }
}

pub fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.trim().parse().map_err(|_| invalid(key, format!("not a number: {v:?}")))?;
    if !x.is_finite() {
        return Err(invalid(key, "must be finite"));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.trim().parse().map_err(|_| invalid(key, format!("not a non-negative integer: {v:?}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(invalid(key, format!("not a boolean: {v:?}"))),
    }
}

/// `"lo hi"` or `"lo, hi"`.
pub fn parse_range(key: &str, v: &str) -> Result<(f64, f64), ConfigError> {
    let parts: Vec<&str> = v.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
    if parts.len() != 2 {
        return Err(invalid(key, format!("expected two numbers, got {v:?}")));
    }
    Ok((parse_f64(key, parts[0])?, parse_f64(key, parts[1])?))
}

fn parse_choice<T: Copy>(key: &str, v: &str, options: &[(&str, T)]) -> Result<T, ConfigError> {
    let l = v.trim().to_ascii_lowercase();
    options.iter().find(|o| o.0 == l).map(|o| o.1).ok_or_else(|| {
        let names: Vec<&str> = options.iter().map(|o| o.0).collect();
        invalid(key, format!("expected one of {}, got {v:?}", names.join("|")))
    })
}

pub fn parse_spacing(v: &str) -> Result<Spacing, ConfigError> {
    parse_choice("spacing", v, &[("linear", Spacing::Linear), ("log", Spacing::Log)])
}

pub fn parse_beta_convention(v: &str) -> Result<BetaConvention, ConfigError> {
    parse_choice("beta_convention", v, &[("kernel", BetaConvention::Kernel), ("levels", BetaConvention::Levels)])
}

pub fn parse_numerator(v: &str) -> Result<Numerator, ConfigError> {
    parse_choice(
        "numerator",
        v,
        &[("as_written", Numerator::AsWritten), ("symmetrized", Numerator::Symmetrized), ("color_ordered", Numerator::ColorOrdered)],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub fn parse_format(v: &str) -> Result<Format, ConfigError> {
    parse_choice("format", v, &[("csv", Format::Csv), ("json", Format::Json)])
}

/// `delta=0 beta=0 g=2`; tokens may also be comma separated.
pub fn parse_params<S: AsRef<str>>(tokens: &[S]) -> Result<BTreeMap<String, f64>, ConfigError> {
    let mut out = BTreeMap::new();
    for t in tokens {
        for item in t.as_ref().split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| invalid("params", format!("expected key=value, got {item:?}")))?;
            let k = k.trim().to_ascii_lowercase();
            if !["delta", "beta", "g"].contains(&k.as_str()) {
                return Err(ConfigError::UnknownKeys(vec![format!("params.{k}")]));
            }
            if out.insert(k.clone(), parse_f64(&k, v)?).is_some() {
                return Err(invalid(&k, "given twice"));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum System {
    Levels(LevelDiagram),
    Params(CascadeParams),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GateConfig {
    pub name: Option<String>,
    pub values: BTreeMap<String, f64>,
    pub profile1: Option<String>,
    pub profile2: Option<String>,
}

impl GateConfig {
    /// Resolves all gate kinds except the parameter-dependent `optimal`,
    /// which the caller rebuilds per point.
    pub fn build(&self, params: &CascadeParams, read: &dyn Fn(&str) -> Result<String, ConfigError>) -> Result<PhaseGate, ConfigError> {
        let name = self.name.as_deref().unwrap_or("identity");
        if name.trim().eq_ignore_ascii_case("custom") {
            let load = |p: &Option<String>, key: &str| -> Result<SpectralPhase, ConfigError> {
                match p {
                    None => Ok(SpectralPhase::default()),
                    Some(path) => {
                        let t = PhaseTable::parse(&read(path)?).map_err(|e| invalid(key, e.to_string()))?;
                        Ok(SpectralPhase::sampled(t))
                    }
                }
            };
            return Ok(PhaseGate::CustomProfile {
                photon1: load(&self.profile1, "gate.profile1")?,
                photon2: load(&self.profile2, "gate.profile2")?,
            });
        }
        PhaseGate::from_name(name, params, |k| self.values.get(k).copied()).map_err(|e| invalid("gate.name", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepConfig {
    pub range: Option<(f64, f64)>,
    pub points: Option<usize>,
    pub spacing: Option<Spacing>,
    pub beta_convention: Option<BetaConvention>,
    pub drop_y2: Option<bool>,
    pub numerator: Option<Numerator>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OptimizeConfig {
    pub free: Option<Vec<FreeParam>>,
    pub bounds: BTreeMap<FreeParam, (f64, f64)>,
    pub grid_points: Option<usize>,
    pub rel_tol: Option<f64>,
    pub max_evaluations: Option<usize>,
    pub drop_y2: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputConfig {
    pub format: Option<Format>,
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub system: Option<System>,
    pub gate: GateConfig,
    pub quad: QuadratureSpec,
    pub sweep: SweepConfig,
    pub optimize: OptimizeConfig,
    pub output: OutputConfig,
}

fn lookup<'a>(entries: &'a [(String, String)], key: &str) -> Option<&'a str> {
    entries.iter().find(|e| e.0 == key).map(|e| e.1.as_str())
}

fn require(section: &str, entries: &[(String, String)], key: &str) -> Result<f64, ConfigError> {
    let v = lookup(entries, key).ok_or_else(|| invalid(&format!("{section}.{key}"), "missing"))?;
    parse_f64(&format!("{section}.{key}"), v)
}

impl RunConfig {
    pub fn from_ini(ini: &Ini) -> Result<RunConfig, ConfigError> {
        check_known(ini)?;
        let mut cfg = RunConfig::default();
        let levels = ini.section("levels");
        let params = ini.section("params");
        cfg.system = match (levels, params) {
            (Some(_), Some(_)) => return Err(ConfigError::BothSystems),
            (Some(s), None) => {
                let d = LevelDiagram {
                    e_u: require("levels", s, "e_u")?,
                    e_x: require("levels", s, "e_x")?,
                    e_y: require("levels", s, "e_y")?,
                    e_0: lookup(s, "e_0").map(|v| parse_f64("levels.e_0", v)).transpose()?.unwrap_or(0.0),
                    gamma: require("levels", s, "gamma")?,
                    gamma_u: require("levels", s, "gamma_u")?,
                };
                d.validate().map_err(|e| invalid("levels", e.to_string()))?;
                Some(System::Levels(d))
            }
            (None, Some(s)) => {
                let p = CascadeParams {
                    delta: require("params", s, "delta")?,
                    beta: require("params", s, "beta")?,
                    g: require("params", s, "g")?,
                };
                p.validate().map_err(|e| invalid("params", e.to_string()))?;
                Some(System::Params(p))
            }
            (None, None) => None,
        };
        if let Some(s) = ini.section("gate") {
            for (k, v) in s {
                match k.as_str() {
                    "name" => cfg.gate.name = Some(v.clone()),
                    "profile1" => cfg.gate.profile1 = Some(v.clone()),
                    "profile2" => cfg.gate.profile2 = Some(v.clone()),
                    _ => {
                        cfg.gate.values.insert(k.clone(), parse_f64(&format!("gate.{k}"), v)?);
                    }
                }
            }
        }
        if let Some(s) = ini.section("quadrature") {
            for (k, v) in s {
                let key = format!("quadrature.{k}");
                match k.as_str() {
                    "abs_tol" => cfg.quad.abs_tol = parse_f64(&key, v)?,
                    "max_subdivisions" => cfg.quad.max_subdivisions = parse_usize(&key, v)?,
                    "k" => cfg.quad.truncation_halfwidth = Some(parse_f64(&key, v)?),
                    _ => cfg.quad.richardson_check = parse_bool(&key, v)?,
                }
            }
            cfg.quad.validate().map_err(|e| invalid("quadrature", e.to_string()))?;
        }
        if let Some(s) = ini.section("sweep") {
            for (k, v) in s {
                let key = format!("sweep.{k}");
                match k.as_str() {
                    "range" => cfg.sweep.range = Some(parse_range(&key, v)?),
                    "points" => cfg.sweep.points = Some(parse_usize(&key, v)?),
                    "spacing" => cfg.sweep.spacing = Some(parse_spacing(v)?),
                    "beta_convention" => cfg.sweep.beta_convention = Some(parse_beta_convention(v)?),
                    "drop_y2" => cfg.sweep.drop_y2 = Some(parse_bool(&key, v)?),
                    _ => cfg.sweep.numerator = Some(parse_numerator(v)?),
                }
            }
        }
        if let Some(s) = ini.section("optimize") {
            for (k, v) in s {
                let key = format!("optimize.{k}");
                match k.as_str() {
                    "free" => cfg.optimize.free = Some(parse_free(v)?),
                    "grid_points" => cfg.optimize.grid_points = Some(parse_usize(&key, v)?),
                    "rel_tol" => cfg.optimize.rel_tol = Some(parse_f64(&key, v)?),
                    "max_evaluations" => cfg.optimize.max_evaluations = Some(parse_usize(&key, v)?),
                    "drop_y2" => cfg.optimize.drop_y2 = Some(parse_bool(&key, v)?),
                    _ => {
                        let p = FreeParam::parse(k.trim_end_matches("_range")).expect("known key");
                        cfg.optimize.bounds.insert(p, parse_range(&key, v)?);
                    }
                }
            }
        }
        if let Some(s) = ini.section("output") {
            for (k, v) in s {
                match k.as_str() {
                    "format" => cfg.output.format = Some(parse_format(v)?),
                    _ => cfg.output.path = Some(v.clone()),
                }
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::from_ini(&parse_ini(text)?)
    }
}

/// `"tau1 tau2"` or `"tau1,tau2"`.
pub fn parse_free(v: &str) -> Result<Vec<FreeParam>, ConfigError> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| FreeParam::parse(s).ok_or_else(|| invalid("optimize.free", format!("unknown parameter {s:?}"))))
        .collect()
}
