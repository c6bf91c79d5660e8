//! `key = value` run configuration.

use std::collections::HashMap;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forcing::{ForcingKind, ForcingSpec};
use crate::stepper::Scheme;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Zero,
    /// `ω = sin x`
    SinX,
    /// `ω = 2 sin x sin y`
    TaylorGreen,
    /// Decay-weighted random field on `kmin <= max(|k|,|l|) <= kmax`,
    /// scaled to L² norm `l2`, drawn from the run seed.
    Random { l2: f64, kmin: usize, kmax: usize },
    Modes(Vec<(i64, i64, Complex64)>),
    Checkpoint(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scheme: Scheme,
    pub n: usize,
    /// Grid points per direction; 0 picks the scheme default.
    pub p: usize,
    pub nu: f64,
    pub dt: f64,
    pub t_final: f64,
    pub forcing: ForcingSpec,
    pub initial: InitialCondition,
    pub output_every: u64,
    /// 0 disables periodic checkpoints.
    pub checkpoint_every: u64,
    pub seed: u64,
    pub cw_override: Option<f64>,
    pub enforce_k0: bool,
}

impl SimConfig {
    /// A config with the given essentials and every optional key at its default.
    pub fn new(scheme: Scheme, n: usize, nu: f64, dt: f64, t_final: f64) -> Self {
        Self {
            scheme,
            n,
            p: 0,
            nu,
            dt,
            t_final,
            forcing: ForcingSpec::none(),
            initial: InitialCondition::Zero,
            output_every: 1,
            checkpoint_every: 0,
            seed: 0,
            cw_override: None,
            enforce_k0: false,
        }
    }

    pub fn points(&self) -> usize {
        if self.p == 0 {
            self.scheme.default_points(self.n)
        } else {
            self.p
        }
    }

    /// Number of steps to reach `t_final`; `t_final` must be a whole
    /// multiple of `dt`.
    pub fn total_steps(&self) -> Result<u64> {
        steps_for(self.t_final, self.dt).ok_or_else(|| Error::Config {
            line: None,
            key: "t_final".into(),
            message: format!("{} is not a whole multiple of dt = {}", self.t_final, self.dt),
        })
    }

    /// Checks the invariants a parsed file must satisfy.
    pub fn validate(&self) -> Result<()> {
        let err = |key: &str, message: String| {
            Err(Error::Config {
                line: None,
                key: key.into(),
                message,
            })
        };
        if self.n < 2 {
            return err("N", format!("must be at least 2, got {}", self.n));
        }
        if self.n > MAX_N {
            return err("N", format!("must be at most {MAX_N}, got {}", self.n));
        }
        if self.p > 4 * MAX_N {
            return err("P", format!("must be at most {}, got {}", 4 * MAX_N, self.p));
        }
        if self.p != 0 && self.p < 2 * self.n + 1 {
            return err("P", format!("must be 0 or at least 2N+1 = {}, got {}", 2 * self.n + 1, self.p));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return err("nu", format!("must be positive, got {}", self.nu));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return err("dt", format!("must be positive, got {}", self.dt));
        }
        if !(self.t_final >= self.dt) {
            return err("t_final", format!("must be at least dt = {}, got {}", self.dt, self.t_final));
        }
        self.total_steps()?;
        if self.output_every == 0 {
            return err("output_every", "must be at least 1".into());
        }
        if let Some(cw) = self.cw_override {
            if !(cw >= 1.0 && cw.is_finite()) {
                return err("cw_override", format!("must be a finite value >= 1, got {cw}"));
            }
        }
        if let InitialCondition::Random { l2, kmin, kmax } = self.initial {
            if !(l2 >= 0.0 && l2.is_finite()) {
                return err("initial_l2", format!("must be nonnegative, got {l2}"));
            }
            if kmin < 1 || kmin > kmax || kmax > self.n {
                return err("initial_kmax", format!("need 1 <= initial_kmin <= initial_kmax <= N, got {kmin}..{kmax}"));
            }
        }
        Ok(())
    }
}

/// Largest accepted mode cutoff.
pub const MAX_N: usize = 2048;

pub(crate) fn steps_for(t_final: f64, dt: f64) -> Option<u64> {
    let steps = (t_final / dt).round();
    if steps < 1.0 || (steps * dt - t_final).abs() > 1e-9 * t_final.abs().max(dt) {
        return None;
    }
    Some(steps as u64)
}

const KEYS: &[&str] = &[
    "scheme",
    "N",
    "P",
    "nu",
    "dt",
    "t_final",
    "forcing",
    "forcing_amplitude",
    "forcing_wavenumber",
    "forcing_modes",
    "forcing_frequency",
    "initial",
    "initial_modes",
    "initial_l2",
    "initial_kmin",
    "initial_kmax",
    "output_every",
    "checkpoint_every",
    "seed",
    "cw_override",
    "enforce_k0",
];

struct Entries {
    values: HashMap<String, (usize, String)>,
}

impl Entries {
    fn err(&self, key: &str, message: impl Into<String>) -> Error {
        Error::Config {
            line: self.values.get(key).map(|(l, _)| *l),
            key: key.into(),
            message: message.into(),
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(_, v)| v.as_str())
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.raw(key).ok_or_else(|| self.err(key, "missing required key"))
    }

    fn parse<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| self.err(key, format!("expected {what}, got '{v}'"))),
        }
    }

    fn parse_required<T: FromStr>(&self, key: &str, what: &str) -> Result<T> {
        self.required(key)?;
        Ok(self.parse(key, what)?.expect("checked present"))
    }

    fn modes(&self, key: &str) -> Result<Vec<(i64, i64, Complex64)>> {
        let text = self.required(key)?;
        parse_modes(text).map_err(|m| self.err(key, m))
    }
}

/// `k l re im` entries separated by `;`.
pub fn parse_modes(text: &str) -> std::result::Result<Vec<(i64, i64, Complex64)>, String> {
    let mut out = Vec::new();
    for entry in text.split(';').map(str::trim).filter(|e| !e.is_empty()) {
        let parts: Vec<&str> = entry.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(format!("mode entry '{entry}' must be 'k l re im'"));
        }
        let k = parts[0].parse::<i64>().map_err(|_| format!("bad wavenumber '{}'", parts[0]))?;
        let l = parts[1].parse::<i64>().map_err(|_| format!("bad wavenumber '{}'", parts[1]))?;
        let re = parts[2].parse::<f64>().map_err(|_| format!("bad amplitude '{}'", parts[2]))?;
        let im = parts[3].parse::<f64>().map_err(|_| format!("bad amplitude '{}'", parts[3]))?;
        out.push((k, l, Complex64::new(re, im)));
    }
    if out.is_empty() {
        return Err("expected at least one mode".into());
    }
    Ok(out)
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut values: HashMap<String, (usize, String)> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Config {
                line: Some(line),
                key: content.to_string(),
                message: "expected 'key = value'".into(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(Error::Config {
                line: Some(line),
                key: key.into(),
                message: "unknown key".into(),
            });
        }
        if let Some((first, _)) = values.get(key) {
            return Err(Error::Config {
                line: Some(line),
                key: key.into(),
                message: format!("duplicate key (first set on line {first})"),
            });
        }
        values.insert(key.to_string(), (line, value.to_string()));
    }
    let e = Entries { values };

    let scheme = e
        .required("scheme")?
        .parse::<Scheme>()
        .map_err(|_| e.err("scheme", "expected 'galerkin' or 'collocation'"))?;
    let n: usize = e.parse_required("N", "a positive integer")?;
    let nu: f64 = e.parse_required("nu", "a number")?;
    let dt: f64 = e.parse_required("dt", "a number")?;
    let t_final: f64 = e.parse_required("t_final", "a number")?;
    let mut cfg = SimConfig::new(scheme, n, nu, dt, t_final);
    cfg.p = e.parse("P", "an integer")?.unwrap_or(0);

    let kind = e
        .required("forcing")?
        .parse::<ForcingKind>()
        .map_err(|_| e.err("forcing", "expected none, steady_modes, kolmogorov or time_harmonic"))?;
    let forcing = match kind {
        ForcingKind::None => Ok(ForcingSpec::none()),
        ForcingKind::Kolmogorov => {
            let a: f64 = e.parse_required("forcing_amplitude", "a number")?;
            let k: i64 = e.parse_required("forcing_wavenumber", "an integer")?;
            ForcingSpec::kolmogorov(a, k)
        }
        ForcingKind::SteadyModes => ForcingSpec::steady(e.modes("forcing_modes")?),
        ForcingKind::TimeHarmonic => {
            let w: f64 = e.parse_required("forcing_frequency", "a number")?;
            ForcingSpec::time_harmonic(e.modes("forcing_modes")?, w)
        }
    };
    cfg.forcing = forcing.map_err(|err| e.err("forcing", err.to_string()))?;
    let grid_n = n as i64;
    if let Some(&(k, l, _)) = cfg.forcing.modes().iter().find(|(k, l, _)| k.abs() > grid_n || l.abs() > grid_n) {
        return Err(e.err("forcing", format!("mode ({k}, {l}) lies outside [-N, N]^2")));
    }

    let initial = e.required("initial")?;
    cfg.initial = match initial {
        "zero" => InitialCondition::Zero,
        "sin_x" => InitialCondition::SinX,
        "taylor_green" => InitialCondition::TaylorGreen,
        "random" => InitialCondition::Random {
            l2: e.parse("initial_l2", "a number")?.unwrap_or(1.0),
            kmin: e.parse("initial_kmin", "an integer")?.unwrap_or(1),
            kmax: e.parse("initial_kmax", "an integer")?.unwrap_or(n),
        },
        "modes" => InitialCondition::Modes(e.modes("initial_modes")?),
        other => match other.strip_prefix("checkpoint:") {
            Some(path) if !path.trim().is_empty() => InitialCondition::Checkpoint(PathBuf::from(path.trim())),
            _ => {
                return Err(e.err(
                    "initial",
                    format!("expected zero, sin_x, taylor_green, random, modes or checkpoint:<path>, got '{other}'"),
                ))
            }
        },
    };

    cfg.output_every = e.parse("output_every", "a positive integer")?.unwrap_or(1);
    cfg.checkpoint_every = e.parse("checkpoint_every", "a nonnegative integer")?.unwrap_or(0);
    cfg.seed = e.parse("seed", "a 64-bit unsigned integer")?.unwrap_or(0);
    cfg.cw_override = e.parse("cw_override", "a number")?;
    cfg.enforce_k0 = match e.raw("enforce_k0") {
        None => false,
        Some(v) => parse_bool(v).ok_or_else(|| e.err("enforce_k0", format!("expected true or false, got '{v}'")))?,
    };

    cfg.validate().map_err(|err| match err {
        Error::Config { line: None, key, message } => e.err(&key, message),
        other => other,
    })?;
    Ok(cfg)
}
