//! Flat `key = value` run configuration.
//!
//! Lines are trimmed; blank lines and text after `#` are ignored. Every key
//! is optional and unknown or repeated keys are errors. Floats are written
//! back with round-trip precision, so `parse(serialize(c)) == c`.
//!
//! | key | default |
//! |-----|---------|
//! | `nx`, `ny` | 64 |
//! | `lx`, `ly` | 16.0 |
//! | `tau` | 0.001 |
//! | `t_final` | 0.2 |
//! | `preset` | `random-smooth(1)` |
//! | `output_dir` | unset (falls back to `TUMOURSIM_OUTPUT_DIR`, then `output`) |
//! | `snapshot_stride` | 50 (0 writes only the final state) |
//! | `study_field` | `phi` |
//! | `proliferation`, `vascular_supply`, `mechanics`, `robin_exchange`, `treatment`, `damage_drive` | `true` |
//!
//! Model constants use the field names of [`ModelParams`] and [`Numerics`],
//! with `f` for a constant treatment or `f_series` (comma separated) plus
//! `f_interval` for a step function, and `indicator = tumour | off`.
//!
//! The coupling toggles switch terms off without touching the constants:
//! `proliferation = false` sets `g ≡ 0`, `vascular_supply = false` sets
//! `Λ_s ≡ 0`, `robin_exchange = false` sets `α = 0`, `treatment = false` sets
//! `f ≡ 0`, `damage_drive = false` sets `c_π = 0` and `mechanics = false` sets
//! `h* = 0` and `ℛ = 0`. With all six off the run has no sources.
//!
//! [`Numerics`]: crate::constitutive::Numerics

use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use crate::constitutive::{Indicator, ModelParams, Treatment};
use crate::grid::Grid;
use crate::presets::Preset;
use crate::stepper::{Field, InitialData};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid `{field}`: {constraint}")]
    Validation { field: String, constraint: String },
}

fn invalid(field: &str, constraint: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.into(),
        constraint: constraint.into(),
    }
}

/// Coupling switches applied on top of [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Couplings {
    pub proliferation: bool,
    pub vascular_supply: bool,
    pub mechanics: bool,
    pub robin_exchange: bool,
    pub treatment: bool,
    pub damage_drive: bool,
}

impl Default for Couplings {
    fn default() -> Self {
        Couplings {
            proliferation: true,
            vascular_supply: true,
            mechanics: true,
            robin_exchange: true,
            treatment: true,
            damage_drive: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub t_final: f64,
    /// Constants as written; see [`RunConfig::effective_params`].
    pub params: ModelParams,
    pub preset: Preset,
    pub output_dir: Option<PathBuf>,
    pub snapshot_stride: usize,
    pub study_field: Field,
    pub couplings: Couplings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            nx: 64,
            ny: 64,
            lx: 16.0,
            ly: 16.0,
            t_final: 0.2,
            params: ModelParams::default(),
            preset: Preset::default(),
            output_dir: None,
            snapshot_stride: 50,
            study_field: Field::Phi,
            couplings: Couplings::default(),
        }
    }
}

impl RunConfig {
    pub fn grid(&self) -> Grid {
        Grid::new(self.nx, self.ny, self.lx, self.ly).expect("validated grid")
    }

    /// Number of steps `K = T/τ`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.params.tau).round() as usize
    }

    /// Parameters with the coupling toggles applied.
    pub fn effective_params(&self) -> ModelParams {
        let mut p = self.params.clone();
        let c = self.couplings;
        if !c.proliferation {
            p.indicator = Indicator::Off;
        }
        if !c.vascular_supply {
            p.lambda_s0 = 0.0;
        }
        if !c.robin_exchange {
            p.alpha = 0.0;
        }
        if !c.treatment {
            p.treatment = Treatment::Constant(0.0);
        }
        if !c.damage_drive {
            p.c_pi = 0.0;
        }
        if !c.mechanics {
            p.h_star = 0.0;
            p.r0 = 0.0;
        }
        p
    }

    pub fn initial_data(&self) -> InitialData {
        self.preset.build(self.grid(), &self.effective_params())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        Grid::new(self.nx, self.ny, self.lx, self.ly)
            .map_err(|e| invalid("grid", e.to_string()))?;
        self.params
            .validate()
            .map_err(|e| invalid(e.field, e.constraint))?;
        let tau = self.params.tau;
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(invalid("t_final", "t_final > 0"));
        }
        let k = self.t_final / tau;
        let integral = (k - k.round()).abs() <= 1e-9 * k.round().max(1.0);
        if !(integral && k.round() >= 1.0 && k <= 1e12) {
            return Err(invalid("t_final", "t_final / tau must be a positive integer"));
        }
        self.preset
            .check(&self.grid())
            .map_err(|e| invalid("preset", e))?;
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(value: &str, line: usize) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Parse {
        line,
        message: format!("cannot parse `{value}`"),
    })
}

fn parse_bool(value: &str, line: usize) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError::Parse {
            line,
            message: format!("expected true or false, found `{value}`"),
        }),
    }
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<String> = Vec::new();
    let mut f_const: Option<f64> = None;
    let mut f_series: Option<Vec<f64>> = None;
    let mut f_interval: Option<f64> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or(ConfigError::Parse {
            line,
            message: "expected `key = value`".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if seen.iter().any(|k| k == key) {
            return Err(ConfigError::Parse {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
        seen.push(key.to_string());

        let p = &mut cfg.params;
        let n = &mut p.numerics;
        let c = &mut cfg.couplings;
        match key {
            "nx" => cfg.nx = parse_num(value, line)?,
            "ny" => cfg.ny = parse_num(value, line)?,
            "lx" => cfg.lx = parse_num(value, line)?,
            "ly" => cfg.ly = parse_num(value, line)?,
            "tau" => p.tau = parse_num(value, line)?,
            "t_final" => cfg.t_final = parse_num(value, line)?,
            "lambda_p" => p.lambda_p = parse_num(value, line)?,
            "lambda_a" => p.lambda_a = parse_num(value, line)?,
            "lambda_c" => p.lambda_c = parse_num(value, line)?,
            "sigma_s" => p.sigma_s = parse_num(value, line)?,
            "sigma_gamma" => p.sigma_gamma = parse_num(value, line)?,
            "alpha" => p.alpha = parse_num(value, line)?,
            "lambda_s0" => p.lambda_s0 = parse_num(value, line)?,
            "lame_lambda" => p.lame_lambda = parse_num(value, line)?,
            "lame_mu" => p.lame_mu = parse_num(value, line)?,
            "omega" => p.omega = parse_num(value, line)?,
            "a_lo" => p.a_lo = parse_num(value, line)?,
            "a_hi" => p.a_hi = parse_num(value, line)?,
            "h_star" => p.h_star = parse_num(value, line)?,
            "r0" => p.r0 = parse_num(value, line)?,
            "p" => p.p = parse_num(value, line)?,
            "c_pi" => p.c_pi = parse_num(value, line)?,
            "f" => f_const = Some(parse_num(value, line)?),
            "f_series" => {
                f_series = Some(
                    value
                        .split(',')
                        .map(|v| parse_num(v.trim(), line))
                        .collect::<Result<_, _>>()?,
                )
            }
            "f_interval" => f_interval = Some(parse_num(value, line)?),
            "indicator" => {
                p.indicator = match value {
                    "tumour" => Indicator::Tumour,
                    "off" => Indicator::Off,
                    _ => {
                        return Err(ConfigError::Parse {
                            line,
                            message: format!("indicator must be tumour or off, found `{value}`"),
                        })
                    }
                }
            }
            "linear_tol" => n.linear_tol = parse_num(value, line)?,
            "nutrient_tol" => n.nutrient_tol = parse_num(value, line)?,
            "displacement_tol" => n.displacement_tol = parse_num(value, line)?,
            "newton_tol" => n.newton_tol = parse_num(value, line)?,
            "damage_tol" => n.damage_tol = parse_num(value, line)?,
            "max_linear_iter" => n.max_linear_iter = parse_num(value, line)?,
            "max_newton_iter" => n.max_newton_iter = parse_num(value, line)?,
            "max_damage_iter" => n.max_damage_iter = parse_num(value, line)?,
            "max_retries" => n.max_retries = parse_num(value, line)?,
            "mu_regularisation" => n.mu_regularisation = parse_bool(value, line)?,
            "preset" => {
                cfg.preset = value
                    .parse()
                    .map_err(|message| ConfigError::Parse { line, message })?
            }
            "output_dir" => {
                if value.is_empty() {
                    return Err(ConfigError::Parse {
                        line,
                        message: "empty output_dir".into(),
                    });
                }
                cfg.output_dir = Some(PathBuf::from(value));
            }
            "snapshot_stride" => cfg.snapshot_stride = parse_num(value, line)?,
            "study_field" => {
                cfg.study_field = value
                    .parse()
                    .map_err(|message| ConfigError::Parse { line, message })?
            }
            "proliferation" => c.proliferation = parse_bool(value, line)?,
            "vascular_supply" => c.vascular_supply = parse_bool(value, line)?,
            "mechanics" => c.mechanics = parse_bool(value, line)?,
            "robin_exchange" => c.robin_exchange = parse_bool(value, line)?,
            "treatment" => c.treatment = parse_bool(value, line)?,
            "damage_drive" => c.damage_drive = parse_bool(value, line)?,
            _ => {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("unknown key `{key}`"),
                })
            }
        }
    }

    cfg.params.treatment = match (f_const, f_series, f_interval) {
        (Some(_), Some(_), _) => return Err(invalid("f", "give either f or f_series, not both")),
        (Some(_), None, Some(_)) => return Err(invalid("f_interval", "only valid with f_series")),
        (None, Some(_), None) => return Err(invalid("f_interval", "required with f_series")),
        (Some(f), None, None) => Treatment::Constant(f),
        (None, Some(values), Some(interval)) => Treatment::Steps { interval, values },
        (None, None, Some(_)) => return Err(invalid("f_interval", "only valid with f_series")),
        (None, None, None) => Treatment::Constant(0.0),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Writes every key, defaults included.
pub fn serialize_config(cfg: &RunConfig) -> String {
    let mut s = String::new();
    let p = &cfg.params;
    let n = &p.numerics;
    let c = &cfg.couplings;
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("nx", cfg.nx.to_string());
    kv("ny", cfg.ny.to_string());
    kv("lx", format!("{:?}", cfg.lx));
    kv("ly", format!("{:?}", cfg.ly));
    kv("tau", format!("{:?}", p.tau));
    kv("t_final", format!("{:?}", cfg.t_final));
    kv("preset", cfg.preset.to_string());
    if let Some(dir) = &cfg.output_dir {
        kv("output_dir", dir.display().to_string());
    }
    kv("snapshot_stride", cfg.snapshot_stride.to_string());
    kv("study_field", cfg.study_field.name().to_string());
    for (k, v) in [
        ("lambda_p", p.lambda_p),
        ("lambda_a", p.lambda_a),
        ("lambda_c", p.lambda_c),
        ("sigma_s", p.sigma_s),
        ("sigma_gamma", p.sigma_gamma),
        ("alpha", p.alpha),
        ("lambda_s0", p.lambda_s0),
        ("lame_lambda", p.lame_lambda),
        ("lame_mu", p.lame_mu),
        ("omega", p.omega),
        ("a_lo", p.a_lo),
        ("a_hi", p.a_hi),
        ("h_star", p.h_star),
        ("r0", p.r0),
        ("p", p.p),
        ("c_pi", p.c_pi),
    ] {
        kv(k, format!("{v:?}"));
    }
    match &p.treatment {
        Treatment::Constant(f) => kv("f", format!("{f:?}")),
        Treatment::Steps { interval, values } => {
            let list: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
            kv("f_series", list.join(", "));
            kv("f_interval", format!("{interval:?}"));
        }
    }
    kv(
        "indicator",
        match p.indicator {
            Indicator::Tumour => "tumour",
            Indicator::Off => "off",
        }
        .to_string(),
    );
    for (k, v) in [
        ("linear_tol", n.linear_tol),
        ("nutrient_tol", n.nutrient_tol),
        ("displacement_tol", n.displacement_tol),
        ("newton_tol", n.newton_tol),
        ("damage_tol", n.damage_tol),
    ] {
        kv(k, format!("{v:?}"));
    }
    for (k, v) in [
        ("max_linear_iter", n.max_linear_iter),
        ("max_newton_iter", n.max_newton_iter),
        ("max_damage_iter", n.max_damage_iter),
        ("max_retries", n.max_retries),
    ] {
        kv(k, v.to_string());
    }
    for (k, v) in [
        ("mu_regularisation", n.mu_regularisation),
        ("proliferation", c.proliferation),
        ("vascular_supply", c.vascular_supply),
        ("mechanics", c.mechanics),
        ("robin_exchange", c.robin_exchange),
        ("treatment", c.treatment),
        ("damage_drive", c.damage_drive),
    ] {
        kv(k, v.to_string());
    }
    s
}
