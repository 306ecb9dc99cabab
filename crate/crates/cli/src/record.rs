//! Result records, persisted as TOML.

use std::fs;
use std::path::Path;

use gspe::estimators::{EstimateReport, StageReport};
use nalgebra::Complex;
use serde::Serialize;

use crate::config::{Schedule, Shots};
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_source: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub seed: u64,
    pub seed_source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<Vec<(f64, String)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub generalized_gate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rdm: Option<(usize, usize)>,
    pub shots: Shots,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Outcome {
    pub estimate_re: f64,
    pub estimate_im: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_im: Option<f64>,
    /// `|estimate - exact|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
    pub shots: u64,
    pub max_degree: usize,
    pub max_evolution_time: f64,
    pub total_evolution_time: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Intermediate {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_good: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p0_o0_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p0_o0_im: Option<f64>,
    /// Squared overlap actually achieved by the initial state.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_overlap: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub name: String,
    pub degree: usize,
    pub delta: f64,
    pub fourier_epsilon: f64,
    pub groups: usize,
    pub group_size: usize,
    pub shots: u64,
    pub max_evolution_time: f64,
    pub total_evolution_time: f64,
}

impl StageRecord {
    pub fn from_report(s: &StageReport<f64>, prefix: Option<&str>) -> Self {
        StageRecord {
            name: prefix.map_or_else(|| s.name.to_string(), |p| format!("{}/{}", p, s.name)),
            degree: s.degree,
            delta: s.delta,
            fourier_epsilon: s.fourier_epsilon,
            groups: s.groups,
            group_size: s.group_size,
            shots: s.shots,
            max_evolution_time: s.budget.max_time,
            total_evolution_time: s.budget.total_time,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FourierSummary {
    pub degree: usize,
    /// `max |F - H|` over `delta <= |x| <= pi - delta` on a 20001-point grid.
    pub sup_error: f64,
    pub min_value: f64,
    pub max_value: f64,
    /// `max_j |c_j| |j|`.
    pub max_decay: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub config: ConfigEcho,
    pub result: Outcome,
    pub intermediate: Intermediate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fourier: Option<FourierSummary>,
    pub stages: Vec<StageRecord>,
}

impl Outcome {
    pub fn new(value: Complex<f64>, exact: Option<Complex<f64>>, stages: &[StageRecord]) -> Self {
        Outcome {
            estimate_re: value.re,
            estimate_im: value.im,
            exact_re: exact.map(|e| e.re),
            exact_im: exact.map(|e| e.im),
            error: exact.map(|e| (value - e).norm()),
            shots: stages.iter().map(|s| s.shots).sum(),
            max_degree: stages.iter().map(|s| s.degree).max().unwrap_or(0),
            max_evolution_time: stages.iter().map(|s| s.max_evolution_time).fold(0.0, f64::max),
            total_evolution_time: stages.iter().map(|s| s.total_evolution_time).sum(),
        }
    }
}

impl Intermediate {
    pub fn from_report(r: &EstimateReport<f64>) -> Self {
        let i = &r.intermediate;
        Intermediate {
            x_star: i.x_star,
            x_good: i.x_good,
            p0: i.p0,
            p0_o0_re: i.p0_o0.map(|v| v.re),
            p0_o0_im: i.p0_o0.map(|v| v.im),
            initial_overlap: None,
        }
    }
}

impl ResultRecord {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("result records serialize")
    }
}

/// Writes through a temporary file and a rename so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// `result.toml` -> `result.wall_time`.
pub fn wall_time_path(record: &Path) -> std::path::PathBuf {
    record.with_extension("wall_time")
}
