//! Overlap estimation and the ground-state property pipelines.

use nalgebra::{Complex, DMatrix};
use rand::Rng;

use super::acdf::{phase_table, JSampler};
use super::config::{mom_group_size, mom_groups, EstimateReport, EstimationConfig, EvolutionBudget, Intermediates, ShotOverrides, StageReport};
use super::gse::{effective_spectrum, good_point, gse_unchecked, stage_rng};
use super::mom::componentwise_median;
use crate::error::{Error, Result};
use crate::fourier::FourierApprox;
use crate::hadamard::{BlockEncoding, Circuit, FirstGate, ShotSampler, UnitaryOp};
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::{SpectralData, StateVector};

/// Where an estimator's phase factor is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window<T: Real = f64> {
    /// `e^{ijx}`: the ACDF at `x`.
    Point(T),
    /// `e^{ij hi} - e^{ij lo}`: the ACDF increment over `(lo, hi]`.
    Interval(T, T),
}

impl<T: Real> Window<T> {
    fn table(&self, a: &FourierApprox<T>) -> Vec<Complex<T>> {
        match *self {
            Window::Point(x) => phase_table(a, x),
            Window::Interval(lo, hi) => phase_table(a, hi).iter().zip(phase_table(a, lo)).map(|(h, l)| h - l).collect(),
        }
    }

    /// Root-mean-square size of the phase factor. `|e^{ij hi} - e^{ij lo}|^2`
    /// averages to 2 over the sampled `j`.
    fn scale(&self) -> T {
        match self {
            Window::Point(_) => T::one(),
            Window::Interval(..) => T::SQRT_2(),
        }
    }
}

/// One median-of-means stage over a circuit family.
pub(crate) struct MomStage<'a, T: Real> {
    pub name: &'static str,
    pub approx: &'a FourierApprox<T>,
    pub x: Window<T>,
    /// Second window for two-time circuits.
    pub y: Option<Window<T>>,
    /// Multiplier on the `F^2` / `F^4` second-moment bound (e.g. `alpha^2`).
    pub weight: T,
    pub accuracy: T,
    pub nu: T,
    pub overrides: ShotOverrides,
}

pub(crate) fn run_mom_stage<T: Real, R: Rng + ?Sized>(
    sampler: &mut ShotSampler<'_, T>,
    stage: MomStage<'_, T>,
    rng: &mut R,
) -> Result<(Complex<T>, StageReport<T>)> {
    let a = stage.approx;
    let f = a.total_weight();
    let two_time = sampler.circuit().is_two_time();
    if two_time != stage.y.is_some() {
        return Err(Error::Precondition("window count does not match the circuit family".into()));
    }
    let mut bound = stage.weight * f * f * stage.x.scale() * stage.x.scale();
    if let Some(y) = stage.y {
        bound *= f * f * y.scale() * y.scale();
    }
    let n_g = stage.overrides.n_g.unwrap_or_else(|| mom_groups(stage.nu));
    let k = stage.overrides.k.unwrap_or_else(|| mom_group_size(bound, stage.accuracy));
    let tx = stage.x.table(a);
    let ty = stage.y.map(|y| y.table(a));
    let js = JSampler::new(a)?;
    let d = a.degree() as i64;
    let tau = sampler.tau();
    let mut budget = EvolutionBudget::default();
    let mut means = Vec::with_capacity(n_g);
    for _ in 0..n_g {
        let mut sum = Complex::new(T::zero(), T::zero());
        for _ in 0..k {
            let j = js.sample(rng);
            let (jp, wy) = match &ty {
                Some(ty) => {
                    let jp = js.sample(rng);
                    (jp, ty[(jp + d) as usize])
                }
                None => (0, Complex::new(T::one(), T::zero())),
            };
            let shot = sampler.sample(j, jp, rng);
            sum += shot.z * tx[(j + d) as usize] * wy;
            budget.record(lit::<T>((j.unsigned_abs() + jp.unsigned_abs()) as f64) * tau, shot.runs.count());
        }
        means.push(sum / lit::<T>(k as f64));
    }
    let report = StageReport {
        name: stage.name,
        degree: a.degree(),
        delta: a.delta(),
        fourier_epsilon: a.epsilon(),
        groups: n_g,
        group_size: k,
        shots: (n_g * k) as u64,
        budget,
    };
    Ok((componentwise_median(&means), report))
}

/// Fourier parameters of the property stages: `delta = min(tau gamma / 4, ...)`
/// and `epsilon = eta epsilon / 8`.
pub(crate) fn property_fourier<T: Real>(cfg: &EstimationConfig<T>) -> Result<std::sync::Arc<FourierApprox<T>>> {
    let cap = lit::<T>(0.99) * T::pi() / lit(6.0);
    let delta = (cfg.tau * cfg.gamma / lit(4.0)).min(cap);
    FourierApprox::shared(delta, cfg.eta * cfg.epsilon / lit(8.0))
}

/// `p_0` estimate from the ACDF at a good point.
pub fn estimate_overlap<T: Real, R: Rng + ?Sized>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    x_good: T,
    cfg: &EstimationConfig<T>,
    rng: &mut R,
) -> Result<EstimateReport<T>> {
    cfg.validate()?;
    let s = effective_spectrum(s, cfg.tau)?;
    let a = property_fourier(cfg)?;
    let mut sampler = ShotSampler::new(&s, phi, Circuit::Plain)?;
    let stage = MomStage {
        name: "p0",
        approx: &a,
        x: Window::Point(x_good),
        y: None,
        weight: T::one(),
        accuracy: cfg.eta * cfg.epsilon / lit(4.0),
        nu: cfg.nu,
        overrides: cfg.shots,
    };
    let (m, report) = run_mom_stage(&mut sampler, stage, &mut stage_rng(rng))?;
    let intermediate = Intermediates { x_good: Some(x_good), p0: Some(m.re), stages: vec![report], ..Default::default() };
    Ok(EstimateReport::from_stages(Complex::new(m.re, T::zero()), *cfg, intermediate))
}

/// Which circuit estimates `p_0 O_0`.
enum PropertyCircuit<'a, T: Real> {
    Commutative(&'a UnitaryOp<T>),
    General(&'a UnitaryOp<T>),
    Block(&'a BlockEncoding<T>),
}

fn ratio_pipeline<T: Real, R: Rng + ?Sized>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    kind: PropertyCircuit<'_, T>,
    cfg: &EstimationConfig<T>,
    rng: &mut R,
) -> Result<EstimateReport<T>> {
    cfg.validate()?;
    let three = lit::<T>(3.0);
    let nu_c = cfg.nu / three;

    let eps_gse = cfg.gamma / lit(8.0);
    let gse_cfg = EstimationConfig { epsilon: eps_gse, nu: nu_c, ..*cfg };
    let gse = gse_unchecked(s, phi, &gse_cfg, rng)?;
    let x_star = gse.intermediate.x_star.expect("gse reports x*");
    let x_good = good_point(x_star, cfg.tau, cfg.gamma, eps_gse)?;

    let s = effective_spectrum(s, cfg.tau)?;
    let a = property_fourier(cfg)?;
    let accuracy = cfg.eta * cfg.epsilon / lit(4.0);

    let mut plain = ShotSampler::new(&s, phi, Circuit::Plain)?;
    let p0_stage = MomStage {
        name: "p0",
        approx: &a,
        x: Window::Point(x_good),
        y: None,
        weight: T::one(),
        accuracy,
        nu: nu_c,
        overrides: cfg.shots,
    };
    let (p0, p0_report) = run_mom_stage(&mut plain, p0_stage, &mut stage_rng(rng))?;

    let gate = if cfg.generalized_gate {
        |b: &BlockEncoding<T>| FirstGate::default_for(b.alpha())
    } else {
        |_: &BlockEncoding<T>| FirstGate::Hadamard
    };
    let (circuit, two_time, weight) = match kind {
        PropertyCircuit::Commutative(o) => (Circuit::Observable(o), false, T::one()),
        PropertyCircuit::General(o) => (Circuit::TwoTime(o), true, T::one()),
        PropertyCircuit::Block(b) => (Circuit::Block(b, gate(b)), true, b.alpha() * b.alpha()),
    };
    let mut sampler = ShotSampler::new(&s, phi, circuit)?;
    let po_stage = MomStage {
        name: "p0o0",
        approx: &a,
        x: Window::Point(x_good),
        y: two_time.then_some(Window::Point(x_good)),
        weight,
        accuracy,
        nu: nu_c,
        overrides: cfg.shots,
    };
    let (p0o0, po_report) = run_mom_stage(&mut sampler, po_stage, &mut stage_rng(rng))?;

    if !(p0.re > T::zero()) {
        return Err(Error::Precondition(format!("overlap estimate {} is not positive", p0.re)));
    }
    let mut stages = gse.intermediate.stages;
    stages.push(p0_report);
    stages.push(po_report);
    let intermediate = Intermediates { x_star: Some(x_star), x_good: Some(x_good), p0: Some(p0.re), p0_o0: Some(p0o0), stages };
    Ok(EstimateReport::from_stages(p0o0 / p0.re, *cfg, intermediate))
}

/// Dense Hamiltonian reconstructed from its eigendecomposition.
fn hamiltonian_matrix<T: Real>(s: &SpectralData<T>) -> DMatrix<Complex<T>> {
    let v = s.eigenvectors();
    let mut scaled = v.clone();
    for (k, &l) in s.eigenvalues().iter().enumerate() {
        scaled.column_mut(k).scale_mut(l);
    }
    scaled * v.adjoint()
}

/// `O_0` for a unitary `O` commuting with `H`.
pub fn estimate_gsprop_commutative<T: Real, R: Rng + ?Sized>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    o: &UnitaryOp<T>,
    cfg: &EstimationConfig<T>,
    rng: &mut R,
) -> Result<EstimateReport<T>> {
    if o.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: o.dim() });
    }
    let h = hamiltonian_matrix(s);
    let comm = (&h * o.matrix() - o.matrix() * &h).norm();
    if comm > T::tolerance(1e-9) {
        return Err(Error::NotCommuting(to_f64(comm)));
    }
    ratio_pipeline(s, phi, PropertyCircuit::Commutative(o), cfg, rng)
}

/// `O_0` for a unitary `O`, via the two-time ACDF.
pub fn estimate_gsprop_general<T: Real, R: Rng + ?Sized>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    o: &UnitaryOp<T>,
    cfg: &EstimationConfig<T>,
    rng: &mut R,
) -> Result<EstimateReport<T>> {
    ratio_pipeline(s, phi, PropertyCircuit::General(o), cfg, rng)
}

/// `O_0` for a block-encoded observable; group sizes scale with `alpha^2`.
pub fn estimate_gsprop_block<T: Real, R: Rng + ?Sized>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    b: &BlockEncoding<T>,
    cfg: &EstimationConfig<T>,
    rng: &mut R,
) -> Result<EstimateReport<T>> {
    ratio_pipeline(s, phi, PropertyCircuit::Block(b), cfg, rng)
}
