//! Estimation configuration, evolution budgets and reports.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::SpectralData;

/// Constant in `N_s = ceil(C1 F^2 / (eta eps_local)^2)`.
pub const CERTIFY_C1: f64 = 2.0;
/// Constant in `N_b = ceil(C2 (ln(1/nu) + ln ln(1/delta)))`.
pub const CERTIFY_C2: f64 = 10.0;
/// Certify separates `C~ > 5/8 eta` from `C~ < 7/8 eta`, so batch means need accuracy `eta / 8`.
pub const CERTIFY_LOCAL_EPSILON: f64 = 0.125;
/// Constant in the group size `K = ceil(C_K V / t^2)`.
pub const GROUP_SIZE_C: f64 = 1.0;

/// Explicit shot-schedule parameters; `None` means derived.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ShotOverrides {
    pub n_s: Option<usize>,
    pub n_b: Option<usize>,
    pub n_g: Option<usize>,
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationConfig<T: Real = f64> {
    pub epsilon: T,
    /// Lower bound on the ground-state overlap.
    pub eta: T,
    /// Spectral gap on the unnormalized axis.
    pub gamma: T,
    pub nu: T,
    pub tau: T,
    pub shots: ShotOverrides,
    /// Use the generalized first gate in block-encoded runs.
    pub generalized_gate: bool,
}

impl<T: Real> EstimationConfig<T> {
    pub fn new(epsilon: T, eta: T, gamma: T, nu: T, tau: T) -> Result<Self> {
        let cfg = EstimationConfig { epsilon, eta, gamma, nu, tau, shots: ShotOverrides::default(), generalized_gate: false };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Takes `gamma` and `tau` from the spectrum.
    pub fn for_spectrum(s: &SpectralData<T>, epsilon: T, eta: T, nu: T) -> Result<Self> {
        Self::new(epsilon, eta, s.gap(), nu, s.tau())
    }

    pub fn with_shots(mut self, shots: ShotOverrides) -> Self {
        self.shots = shots;
        self
    }

    pub fn with_generalized_gate(mut self, on: bool) -> Self {
        self.generalized_gate = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: T| {
            if v > T::zero() && v < T::one() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{} = {} not in (0, 1)", name, v)))
            }
        };
        unit("epsilon", self.epsilon)?;
        unit("eta", self.eta)?;
        unit("nu", self.nu)?;
        if !(self.gamma > T::zero()) {
            return Err(Error::InvalidParameter(format!("gamma = {} must be positive", self.gamma)));
        }
        if !(self.tau > T::zero()) {
            return Err(Error::InvalidParameter(format!("tau = {} must be positive", self.tau)));
        }
        Ok(())
    }
}

/// Evolution time consumed by a run, in the units of the unnormalized Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionBudget<T: Real = f64> {
    pub max_time: T,
    pub total_time: T,
}

impl<T: Real> Default for EvolutionBudget<T> {
    fn default() -> Self {
        EvolutionBudget { max_time: T::zero(), total_time: T::zero() }
    }
}

impl<T: Real> EvolutionBudget<T> {
    /// One shot with evolution time `t` per circuit run, executed `runs` times.
    pub fn record(&mut self, t: T, runs: u64) {
        self.max_time = self.max_time.max(t);
        self.total_time += t * lit::<T>(runs as f64);
    }

    pub fn merge(&mut self, other: &EvolutionBudget<T>) {
        self.max_time = self.max_time.max(other.max_time);
        self.total_time += other.total_time;
    }
}

/// Per-stage accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct StageReport<T: Real = f64> {
    pub name: &'static str,
    pub degree: usize,
    pub delta: T,
    pub fourier_epsilon: T,
    /// Group count and size for median-of-means stages; batch count and size for Certify.
    pub groups: usize,
    pub group_size: usize,
    pub shots: u64,
    pub budget: EvolutionBudget<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Intermediates<T: Real = f64> {
    /// Normalized ground-energy estimate from the inversion stage.
    pub x_star: Option<T>,
    pub x_good: Option<T>,
    pub p0: Option<T>,
    pub p0_o0: Option<Complex<T>>,
    pub stages: Vec<StageReport<T>>,
}

impl<T: Real> Default for Intermediates<T> {
    fn default() -> Self {
        Intermediates { x_star: None, x_good: None, p0: None, p0_o0: None, stages: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport<T: Real = f64> {
    pub value: Complex<T>,
    /// Number of shots drawn from the samplers.
    pub shots_used: u64,
    pub budget: EvolutionBudget<T>,
    pub config: EstimationConfig<T>,
    pub intermediate: Intermediates<T>,
}

impl<T: Real> EstimateReport<T> {
    pub(crate) fn from_stages(value: Complex<T>, config: EstimationConfig<T>, intermediate: Intermediates<T>) -> Self {
        let mut budget = EvolutionBudget::default();
        let mut shots = 0;
        for s in &intermediate.stages {
            budget.merge(&s.budget);
            shots += s.shots;
        }
        EstimateReport { value, shots_used: shots, budget, config, intermediate }
    }

    pub fn stage(&self, name: &str) -> Option<&StageReport<T>> {
        self.intermediate.stages.iter().find(|s| s.name == name)
    }

    pub fn absorb(&mut self, other: &EstimateReport<T>) {
        self.intermediate.stages.extend(other.intermediate.stages.iter().cloned());
        self.budget.merge(&other.budget);
        self.shots_used += other.shots_used;
    }
}

/// `N_b = ceil(C2 (ln(1/nu) + max(0, ln ln(1/delta))))`.
pub fn certify_batches<T: Real>(nu: T, delta: T) -> usize {
    let (nu, delta) = (to_f64(nu), to_f64(delta));
    let loglog = if delta < 1.0 { (1.0 / delta).ln().ln().max(0.0) } else { 0.0 };
    (CERTIFY_C2 * ((1.0 / nu).ln() + loglog)).ceil().max(1.0) as usize
}

/// `N_s = ceil(C1 F^2 / (eta eps_local)^2)`.
pub fn certify_batch_size<T: Real>(total_weight: T, eta: T) -> usize {
    let (f, eta) = (to_f64(total_weight), to_f64(eta));
    (CERTIFY_C1 * f * f / (eta * CERTIFY_LOCAL_EPSILON).powi(2)).ceil().max(1.0) as usize
}

/// Odd group count `>= 2 ln(1/nu)`.
pub fn mom_groups<T: Real>(nu: T) -> usize {
    let g = (2.0 * (1.0 / to_f64(nu)).ln()).ceil().max(1.0) as usize;
    g | 1
}

/// `K = ceil(C_K V / t^2)` for a second-moment bound `V` and accuracy `t`.
pub fn mom_group_size<T: Real>(second_moment: T, accuracy: T) -> usize {
    let (v, t) = (to_f64(second_moment), to_f64(accuracy));
    (GROUP_SIZE_C * v / (t * t)).ceil().max(1.0) as usize
}
