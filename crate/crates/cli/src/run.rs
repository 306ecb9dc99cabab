//! Pipeline dispatch for a single grid point.
//!
//! Random streams: `stream(seed, i)` is `ChaCha8Rng::seed_from_u64(seed)` on
//! stream `i`. Stream 0 prepares the initial state (shared by all points of a
//! sweep), stream `1 + p` drives the estimator at grid point `p`, and stream
//! `TRACE_STREAM + p` draws the shots of the optional CDF trace.

use std::f64::consts::PI;

use gspe::applications::{
    estimate_1rdm_entry, exact_1rdm_entry, exact_solution_expectation, qlss_estimate, InitialState, LinearSystemInstance,
    QlssConfig,
};
use gspe::estimators::{
    certify_batch_size, certify_batches, estimate_gse, estimate_gsprop_block, estimate_gsprop_commutative,
    estimate_gsprop_general, EstimateReport, EstimationConfig, EvolutionBudget, SamplePool,
};
use gspe::fourier::{build_fourier_approx, heaviside, FourierApprox};
use gspe::hadamard::{embed_block, Circuit, ShotSampler, UnitaryOp};
use gspe::{build_operator, diagonalize, exact_cdf, PauliOperator, SpectralData, StateVector};
use nalgebra::{Complex, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{load_instance, mode_name, HamiltonianFile, Mode, Point, RunConfig, SystemFile};
use crate::error::{CliError, Stage};
use crate::record::{ConfigEcho, FourierSummary, Intermediate, Outcome, ResultRecord, StageRecord};

pub const TRACE_STREAM: u64 = 1 << 32;
/// Points of the CDF trace on `[-pi/3, pi/3]`.
pub const TRACE_POINTS: usize = 201;
const REFERENCE_TOLERANCE: f64 = 1e-6;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub struct Execution {
    pub record: ResultRecord,
    /// CSV body with columns `x,c_exact,c_estimated`.
    pub trace: Option<String>,
}

fn echo(cfg: &RunConfig, point: Point, seed: u64, seed_source: &'static str) -> ConfigEcho {
    ConfigEcho {
        mode: mode_name(cfg.mode).to_string(),
        instance: cfg.instance.as_ref().map(|p| p.file_name().map_or_else(|| p.display().to_string(), |f| f.to_string_lossy().into_owned())),
        epsilon: point.epsilon,
        eta: point.eta,
        nu: cfg.nu,
        gamma: None,
        gamma_source: None,
        tau: None,
        seed,
        seed_source,
        overlap: cfg.overlap,
        observable: cfg.observable.clone(),
        alpha: cfg.alpha,
        generalized_gate: cfg.generalized_gate,
        delta: cfg.delta,
        rdm: cfg.rdm,
        shots: cfg.shots,
        schedule: cfg.schedule,
    }
}

fn operator(terms: &[(f64, String)], what: &str) -> Result<PauliOperator<f64>, CliError> {
    let refs: Vec<(f64, &str)> = terms.iter().map(|(c, s)| (*c, s.as_str())).collect();
    build_operator(&refs).map_err(|e| CliError::Parse(format!("{}: {}", what, e)))
}

pub fn execute(cfg: &RunConfig, point: Point, index: u64, seed: u64, seed_source: &'static str) -> Result<Execution, CliError> {
    let mut config = echo(cfg, point, seed, seed_source);
    match cfg.mode {
        Mode::FourierCheck => {
            let delta = cfg.delta.expect("validated");
            let summary = fourier_check(delta, point.epsilon)?;
            let stages = Vec::new();
            let mut result = Outcome::new(Complex::new(summary.sup_error, 0.0), None, &stages);
            result.max_degree = summary.degree;
            let record = ResultRecord { config, result, intermediate: Intermediate::default(), fourier: Some(summary), stages };
            Ok(Execution { record, trace: None })
        }
        Mode::Qlss => run_qlss(cfg, point, index, seed, config),
        _ => {
            let path = cfg.instance.as_ref().expect("validated");
            let file: HamiltonianFile = load_instance(path)?;
            let h = operator(&file.terms, &path.display().to_string())?;
            let tol = cfg.degeneracy_tolerance.unwrap_or(1e-8);
            let s = diagonalize(&h, tol).stage("diagonalize")?;
            if let Some(r) = file.reference {
                check_reference(path, r.ground_energy, s.ground_energy(), "ground_energy")?;
                check_reference(path, r.gap, s.gap(), "gap")?;
            }
            let gamma = point.gamma.unwrap_or_else(|| s.gap());
            config.gamma = Some(gamma);
            config.gamma_source = Some(if point.gamma.is_some() { "override" } else { "oracle" });
            config.tau = Some(s.tau());
            run_hamiltonian(cfg, point, index, seed, config, &s, gamma)
        }
    }
}

fn check_reference(path: &std::path::Path, packaged: Option<f64>, dense: f64, name: &str) -> Result<(), CliError> {
    match packaged {
        Some(v) if (v - dense).abs() > REFERENCE_TOLERANCE => Err(CliError::Parse(format!(
            "{}: reference {} = {} disagrees with dense diagonalization ({})",
            path.display(),
            name,
            v,
            dense
        ))),
        _ => Ok(()),
    }
}

fn stage_records(r: &EstimateReport<f64>, prefix: Option<&str>) -> Vec<StageRecord> {
    r.intermediate.stages.iter().map(|s| StageRecord::from_report(s, prefix)).collect()
}

fn run_hamiltonian(
    cfg: &RunConfig,
    point: Point,
    index: u64,
    seed: u64,
    config: ConfigEcho,
    s: &SpectralData<f64>,
    gamma: f64,
) -> Result<Execution, CliError> {
    let eta = point.eta.expect("validated");
    let nu = cfg.nu.expect("validated");
    let est = EstimationConfig::new(point.epsilon, eta, gamma, nu, s.tau())
        .stage("configure")?
        .with_shots(cfg.shots.overrides())
        .with_generalized_gate(cfg.generalized_gate);
    let ground = s.ground_state();
    let overlap = cfg.overlap.unwrap_or(eta);
    let phi = StateVector::with_overlap(&ground, overlap, &mut stream(seed, 0)).stage("initial-state")?;
    let mut rng = stream(seed, 1 + index);
    let observable = cfg.observable.as_ref().map(|o| operator(o, "observable")).transpose()?;
    let exact_o = |o: &PauliOperator<f64>| ground.expectation(&o.to_matrix());
    let (value, exact, stages, intermediate) = match cfg.mode {
        Mode::Gse => {
            let r = estimate_gse(s, &phi, &est, &mut rng).stage("gse")?;
            (r.value, Complex::new(s.ground_energy(), 0.0), stage_records(&r, None), Intermediate::from_report(&r))
        }
        Mode::GspropCommutative | Mode::GspropGeneral => {
            let o = observable.expect("validated");
            let u = UnitaryOp::from_pauli(&o).stage("observable")?;
            let r = if cfg.mode == Mode::GspropCommutative {
                estimate_gsprop_commutative(s, &phi, &u, &est, &mut rng).stage("gsprop")?
            } else {
                estimate_gsprop_general(s, &phi, &u, &est, &mut rng).stage("gsprop")?
            };
            (r.value, exact_o(&o), stage_records(&r, None), Intermediate::from_report(&r))
        }
        Mode::GspropBlock => {
            let o = observable.expect("validated");
            let b = embed_block(&o, cfg.alpha.unwrap_or_else(|| o.one_norm())).stage("block-encoding")?;
            let r = estimate_gsprop_block(s, &phi, &b, &est, &mut rng).stage("gsprop")?;
            (r.value, exact_o(&o), stage_records(&r, None), Intermediate::from_report(&r))
        }
        Mode::Rdm => {
            let (p, q) = cfg.rdm.expect("validated");
            let r = estimate_1rdm_entry(s, &phi, p, q, &est, &mut rng).stage("rdm")?;
            let exact = exact_1rdm_entry(&ground, p, q).stage("rdm")?;
            let stages = r.terms.iter().enumerate().flat_map(|(i, t)| stage_records(t, Some(&format!("term{}", i)))).collect();
            (r.value, exact, stages, Intermediate::default())
        }
        Mode::Qlss | Mode::FourierCheck => unreachable!(),
    };
    let trace = match cfg.cdf_trace {
        Some(_) => Some(cdf_trace(s, &phi, &est, &mut stream(seed, TRACE_STREAM + index))?),
        None => None,
    };
    let result = Outcome::new(value, Some(exact), &stages);
    let mut intermediate = intermediate;
    intermediate.initial_overlap = Some(s.overlaps(&phi)[0]);
    Ok(Execution { record: ResultRecord { config, result, intermediate, fourier: None, stages }, trace })
}

fn run_qlss(cfg: &RunConfig, point: Point, index: u64, seed: u64, config: ConfigEcho) -> Result<Execution, CliError> {
    let path = cfg.instance.as_ref().expect("validated");
    let file: SystemFile = load_instance(path)?;
    let inst = system(&file).map_err(|m| CliError::Parse(format!("{}: {}", path.display(), m)))?;
    let m = operator(cfg.observable.as_ref().expect("validated"), "observable")?.to_matrix();
    let floor = point.eta.expect("validated");
    let initial = match cfg.schedule {
        Some(sc) => InitialState::Schedule { steps: sc.steps, total_time: sc.total_time },
        None => InitialState::Oracle { overlap: cfg.overlap.unwrap_or(floor) },
    };
    let mut q = QlssConfig::new(point.epsilon, cfg.nu.expect("validated"), floor, initial);
    q.shots = cfg.shots.overrides();
    q.generalized_gate = cfg.generalized_gate;
    let r = qlss_estimate(&inst, &m, &q, &mut stream(seed, 1 + index)).stage("qlss")?;
    let exact = exact_solution_expectation(&inst, &m).stage("qlss")?;
    let stages = stage_records(&r.estimate, None);
    let mut config = config;
    config.gamma = Some(r.estimate.config.gamma);
    config.gamma_source = Some("oracle");
    config.tau = Some(r.estimate.config.tau);
    let mut intermediate = Intermediate::from_report(&r.estimate);
    intermediate.initial_overlap = Some(r.overlap);
    let result = Outcome::new(r.estimate.value, Some(exact), &stages);
    Ok(Execution { record: ResultRecord { config, result, intermediate, fourier: None, stages }, trace: None })
}

fn system(f: &SystemFile) -> Result<LinearSystemInstance<f64>, String> {
    let n = f.b.len();
    let square = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|r| r.len() == n);
    if !square(&f.a) || f.a_im.as_ref().is_some_and(|m| !square(m)) || f.b_im.as_ref().is_some_and(|v| v.len() != n) {
        return Err(format!("matrix and vector dimensions disagree (b has {} entries)", n));
    }
    let a = DMatrix::from_fn(n, n, |i, j| Complex::new(f.a[i][j], f.a_im.as_ref().map_or(0.0, |m| m[i][j])));
    let b = DVector::from_fn(n, |i, _| Complex::new(f.b[i], f.b_im.as_ref().map_or(0.0, |v| v[i])));
    let norm = b.norm();
    if norm == 0.0 {
        return Err("right-hand side is zero".into());
    }
    LinearSystemInstance::new(a, b / Complex::new(norm, 0.0), f.kappa).map_err(|e| e.to_string())
}

/// Exact CDF against the pooled ACDF estimate of a plain-circuit run at the
/// ground-energy resolution `delta = (2/3) tau epsilon`.
fn cdf_trace(s: &SpectralData<f64>, phi: &StateVector<f64>, est: &EstimationConfig<f64>, rng: &mut ChaCha8Rng) -> Result<String, CliError> {
    let delta = (2.0 / 3.0 * est.tau * est.epsilon).min(0.99 * PI / 6.0);
    let a = FourierApprox::shared(delta, est.eta / 8.0).stage("cdf-trace")?;
    let n_b = est.shots.n_b.unwrap_or_else(|| certify_batches(est.nu, delta));
    let n_s = est.shots.n_s.unwrap_or_else(|| certify_batch_size(a.total_weight(), est.eta));
    let mut sampler = ShotSampler::new(s, phi, Circuit::Plain).stage("cdf-trace")?;
    let mut budget = EvolutionBudget::default();
    let pool = SamplePool::draw(&mut sampler, &a, n_b, n_s, s.tau(), &mut budget, rng).stage("cdf-trace")?;
    let mut out = String::from("x,c_exact,c_estimated\n");
    for k in 0..TRACE_POINTS {
        let x = -PI / 3.0 + 2.0 * PI / 3.0 * k as f64 / (TRACE_POINTS - 1) as f64;
        out.push_str(&format!("{},{},{}\n", x, exact_cdf(s, phi, x), pool.acdf_estimate(&a, x)));
    }
    Ok(out)
}

/// Sup-error of the built approximation on `delta <= |x| <= pi - delta`.
pub fn fourier_check(delta: f64, epsilon: f64) -> Result<FourierSummary, CliError> {
    let a = build_fourier_approx(delta, epsilon).stage("fourier")?;
    let n = 20001;
    let (mut lo, mut hi, mut sup) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for k in 0..n {
        let x = -PI + 2.0 * PI * k as f64 / (n - 1) as f64;
        let f = a.evaluate(x);
        lo = lo.min(f);
        hi = hi.max(f);
        if x.abs() >= delta && x.abs() <= PI - delta {
            sup = sup.max((f - heaviside(x)).abs());
        }
    }
    let d = a.degree() as i64;
    let max_decay = (1..=d).map(|j| a.coefficient(j).norm().max(a.coefficient(-j).norm()) * j as f64).fold(0.0, f64::max);
    Ok(FourierSummary { degree: a.degree(), sup_error: sup, min_value: lo, max_value: hi, max_decay })
}
