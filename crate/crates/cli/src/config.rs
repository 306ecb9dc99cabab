//! Run configuration and instance files. The schema is described in CONFIG.md.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable overriding the configured seed.
pub const SEED_ENV: &str = "GSPE_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Gse,
    GspropCommutative,
    GspropGeneral,
    GspropBlock,
    Qlss,
    FourierCheck,
    Rdm,
}

impl Mode {
    fn uses_hamiltonian(self) -> bool {
        !matches!(self, Mode::Qlss | Mode::FourierCheck)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Shots {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_b: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_g: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl Shots {
    pub fn overrides(&self) -> gspe::estimators::ShotOverrides {
        gspe::estimators::ShotOverrides { n_s: self.n_s, n_b: self.n_b, n_g: self.n_g, k: self.k }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub steps: usize,
    pub total_time: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub gamma: Option<Vec<f64>>,
    pub epsilon: Option<Vec<f64>>,
    pub eta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub instance: Option<PathBuf>,
    pub epsilon: f64,
    pub eta: Option<f64>,
    pub nu: Option<f64>,
    pub gamma_override: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub cdf_trace: Option<PathBuf>,
    /// Squared overlap of the initial state with the target state.
    pub overlap: Option<f64>,
    pub observable: Option<Vec<(f64, String)>>,
    pub alpha: Option<f64>,
    #[serde(default)]
    pub generalized_gate: bool,
    pub delta: Option<f64>,
    pub rdm: Option<(usize, usize)>,
    pub degeneracy_tolerance: Option<f64>,
    #[serde(default)]
    pub shots: Shots,
    pub schedule: Option<Schedule>,
    pub sweep: Option<SweepGrid>,
}

/// One point of a parameter grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub gamma: Option<f64>,
    pub epsilon: f64,
    pub eta: Option<f64>,
}

fn parse_err(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("{}: {}", path.display(), msg))
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

impl RunConfig {
    /// Parses and validates a configuration file; relative paths inside it
    /// are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read(path)?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| parse_err(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut Option<PathBuf>| {
            if let Some(q) = p {
                if q.is_relative() {
                    *q = base.join(&*q);
                }
            }
        };
        resolve(&mut cfg.instance);
        resolve(&mut cfg.output);
        resolve(&mut cfg.cdf_trace);
        cfg.validate().map_err(|m| parse_err(path, m))?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        let mode = mode_name(self.mode);
        let need = |ok: bool, field: &str| if ok { Ok(()) } else { Err(format!("field `{}` is required for mode {}", field, mode)) };
        if self.mode != Mode::FourierCheck {
            need(self.instance.is_some(), "instance")?;
            need(self.eta.is_some(), "eta")?;
            need(self.nu.is_some(), "nu")?;
        }
        match self.mode {
            Mode::FourierCheck => need(self.delta.is_some(), "delta")?,
            Mode::GspropCommutative | Mode::GspropGeneral | Mode::GspropBlock | Mode::Qlss => {
                need(self.observable.is_some(), "observable")?
            }
            Mode::Rdm => need(self.rdm.is_some(), "rdm")?,
            Mode::Gse => {}
        }
        if let Some(o) = self.overlap {
            if !(o > 0.0 && o <= 1.0) {
                return Err(format!("field `overlap` = {} not in (0, 1]", o));
            }
        }
        if self.mode == Mode::Qlss && self.gamma_override.is_some() {
            return Err("field `gamma_override` is not used by mode qlss".into());
        }
        if self.schedule.is_some() && self.mode != Mode::Qlss {
            return Err(format!("table `schedule` is only used by mode qlss, not {}", mode));
        }
        if self.cdf_trace.is_some() && !self.mode.uses_hamiltonian() {
            return Err(format!("field `cdf_trace` is not available for mode {}", mode));
        }
        Ok(())
    }

    pub fn base_point(&self) -> Point {
        Point { gamma: self.gamma_override, epsilon: self.epsilon, eta: self.eta }
    }

    /// Cartesian product of the declared sweep axes; undeclared axes keep the base value.
    pub fn grid(&self) -> Result<Vec<Point>, CliError> {
        let empty = || CliError::Parse("sweep grid is empty: declare at least one non-empty axis under [sweep]".into());
        let g = self.sweep.as_ref().ok_or_else(empty)?;
        let axes = [&g.gamma, &g.epsilon, &g.eta];
        if axes.iter().all(|a| a.is_none()) || axes.iter().any(|a| a.as_ref().is_some_and(|v| v.is_empty())) {
            return Err(empty());
        }
        if self.mode == Mode::Qlss && g.gamma.is_some() {
            return Err(CliError::Parse("mode qlss cannot sweep gamma".into()));
        }
        let base = self.base_point();
        let gammas: Vec<Option<f64>> = g.gamma.as_ref().map_or(vec![base.gamma], |v| v.iter().map(|&x| Some(x)).collect());
        let epsilons = g.epsilon.clone().unwrap_or_else(|| vec![base.epsilon]);
        let etas: Vec<Option<f64>> = g.eta.as_ref().map_or(vec![base.eta], |v| v.iter().map(|&x| Some(x)).collect());
        let mut points = Vec::new();
        for &gamma in &gammas {
            for &epsilon in &epsilons {
                for &eta in &etas {
                    points.push(Point { gamma, epsilon, eta });
                }
            }
        }
        Ok(points)
    }
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Gse => "gse",
        Mode::GspropCommutative => "gsprop-commutative",
        Mode::GspropGeneral => "gsprop-general",
        Mode::GspropBlock => "gsprop-block",
        Mode::Qlss => "qlss",
        Mode::FourierCheck => "fourier-check",
        Mode::Rdm => "rdm",
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    pub ground_energy: Option<f64>,
    pub gap: Option<f64>,
}

/// Pauli-sum Hamiltonian with an optional packaged oracle.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianFile {
    pub terms: Vec<(f64, String)>,
    pub reference: Option<Reference>,
}

/// Dense linear system; imaginary parts default to zero.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub kappa: f64,
    pub a: Vec<Vec<f64>>,
    pub a_im: Option<Vec<Vec<f64>>>,
    pub b: Vec<f64>,
    pub b_im: Option<Vec<f64>>,
}

pub fn load_instance<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    toml::from_str(&read(path)?).map_err(|e| parse_err(path, e))
}

/// Seed from [`SEED_ENV`] when set, else the configured one.
pub fn resolve_seed(configured: u64) -> Result<(u64, &'static str), CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(|s| (s, "env"))
            .map_err(|_| CliError::Parse(format!("{} = {:?} is not a 64-bit unsigned integer", SEED_ENV, v))),
        Err(_) => Ok((configured, "config")),
    }
}
