//! Certify, CDF inversion and ground-state energy estimation.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::acdf::{g_estimator, phase_table, JSampler};
use super::config::{certify_batch_size, certify_batches, EstimateReport, EstimationConfig, EvolutionBudget, Intermediates, StageReport};
use crate::error::{Error, Result};
use crate::fourier::FourierApprox;
use crate::hadamard::{Circuit, ShotSampler};
use crate::scalar::{lit, Real};
use crate::spectral::{SpectralData, StateVector};

/// Shared `(J, Z)` samples, split into `n_b` batches of `n_s`.
#[derive(Debug, Clone)]
pub struct SamplePool<T: Real = f64> {
    samples: Vec<(i64, Complex<T>)>,
    n_b: usize,
    n_s: usize,
}

impl<T: Real> SamplePool<T> {
    pub fn new(samples: Vec<(i64, Complex<T>)>, n_b: usize, n_s: usize) -> Self {
        SamplePool { samples, n_b, n_s }
    }

    /// Draws `n_b * n_s` shots of the plain circuit.
    pub fn draw<R: Rng + ?Sized>(
        sampler: &mut ShotSampler<'_, T>,
        a: &FourierApprox<T>,
        n_b: usize,
        n_s: usize,
        tau: T,
        budget: &mut EvolutionBudget<T>,
        rng: &mut R,
    ) -> Result<Self> {
        let js = JSampler::new(a)?;
        let samples = (0..n_b * n_s)
            .map(|_| {
                let j = js.sample(rng);
                let shot = sampler.sample(j, 0, rng);
                budget.record(lit::<T>(j.unsigned_abs() as f64) * tau, shot.runs.count());
                (j, shot.z)
            })
            .collect();
        Ok(SamplePool { samples, n_b, n_s })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of `Re G(x)` over every shot in the pool.
    pub fn acdf_estimate(&self, a: &FourierApprox<T>, x: T) -> T {
        if self.samples.is_empty() {
            return T::zero();
        }
        let sum = self.samples.iter().fold(T::zero(), |acc, &(j, z)| acc + g_estimator(a, x, j, z).re);
        sum / lit(self.samples.len() as f64)
    }
}

/// Returns `1` when at most half of the batch means `Re G(x)` reach `(3/4) eta`
/// (evidence that `C(x - delta) < eta`), else `0` (evidence that `C(x + delta) > eta/2`).
pub fn certify<T: Real>(x: T, eta: T, a: &FourierApprox<T>, pool: &SamplePool<T>) -> Result<u8> {
    let needed = pool.n_b * pool.n_s;
    if pool.n_b == 0 || pool.n_s == 0 || pool.samples.len() < needed {
        return Err(Error::InsufficientSamples { needed: needed.max(1), available: pool.samples.len() });
    }
    let table = phase_table(a, x);
    let d = a.degree() as i64;
    let threshold = lit::<T>(0.75) * eta;
    let mut c = 0usize;
    for batch in pool.samples[..needed].chunks(pool.n_s) {
        let sum = batch.iter().fold(T::zero(), |acc, &(j, z)| acc + (table[(j + d) as usize] * z).re);
        if sum / lit::<T>(pool.n_s as f64) >= threshold {
            c += 1;
        }
    }
    Ok(u8::from(2 * c <= pool.n_b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion<T: Real = f64> {
    pub x_star: T,
    pub iterations: usize,
}

/// `ceil(log2((2π/3) / delta)) + 2`.
pub fn max_inversion_iterations<T: Real>(delta: T) -> usize {
    let r = crate::scalar::to_f64(T::two_pi() / lit::<T>(3.0) / delta);
    r.log2().ceil().max(0.0) as usize + 2
}

/// Binary search on `[-π/3, π/3]` for a point with `C(x* + delta) > eta/2` and
/// `C(x* - delta) < eta`. `a` must resolve steps of `(2/3) delta`.
pub fn invert_cdf<T: Real>(eta: T, delta: T, a: &FourierApprox<T>, pool: &SamplePool<T>) -> Result<Inversion<T>> {
    let shift = lit::<T>(2.0 / 3.0) * delta;
    if a.delta() > shift * (T::one() + T::tolerance(1e-9)) {
        return Err(Error::Precondition(format!("approximation width {} exceeds (2/3) delta = {}", a.delta(), shift)));
    }
    let cap = max_inversion_iterations(delta);
    let (mut lo, mut hi) = (-T::frac_pi_3(), T::frac_pi_3());
    let mut iterations = 0;
    while hi - lo > lit::<T>(2.0) * delta {
        if iterations == cap {
            return Err(Error::BudgetExhausted(cap));
        }
        iterations += 1;
        let mid = (lo + hi) / lit(2.0);
        if certify(mid, eta, a, pool)? == 0 {
            hi = mid + shift;
        } else {
            lo = mid - shift;
        }
    }
    Ok(Inversion { x_star: (lo + hi) / lit(2.0), iterations })
}

pub(crate) fn effective_spectrum<T: Real>(s: &SpectralData<T>, tau: T) -> Result<std::borrow::Cow<'_, SpectralData<T>>> {
    let max_abs = s.eigenvalues().iter().fold(T::zero(), |a, l| a.max(l.abs()));
    if tau * max_abs > T::frac_pi_3() * (T::one() + T::tolerance(1e-12)) {
        return Err(Error::Precondition(format!("tau = {} places the spectrum outside [-π/3, π/3]", tau)));
    }
    Ok(if tau == s.tau() { std::borrow::Cow::Borrowed(s) } else { std::borrow::Cow::Owned(s.with_tau(tau)) })
}

pub(crate) fn stage_rng<R: Rng + ?Sized>(rng: &mut R) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(rng.gen())
}

/// Ground-state energy estimate `x* / tau` with `|x*/tau - lambda_0| <= epsilon`
/// with probability at least `1 - nu` when `p_0 >= eta`.
pub fn estimate_gse<T: Real, R: Rng + ?Sized>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    cfg: &EstimationConfig<T>,
    rng: &mut R,
) -> Result<EstimateReport<T>> {
    cfg.validate()?;
    gse_unchecked(s, phi, cfg, rng)
}

/// As [`estimate_gse`] without the `(0, 1)` range check on `epsilon`, which is
/// an energy accuracy and may exceed one inside pipelines.
pub(crate) fn gse_unchecked<T: Real, R: Rng + ?Sized>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    cfg: &EstimationConfig<T>,
    rng: &mut R,
) -> Result<EstimateReport<T>> {
    let s = effective_spectrum(s, cfg.tau)?;
    let tau = cfg.tau;
    let delta = tau * cfg.epsilon;
    let fourier_eps = cfg.eta / lit(8.0);
    let a = FourierApprox::shared(lit::<T>(2.0 / 3.0) * delta, fourier_eps)?;
    let n_b = cfg.shots.n_b.unwrap_or_else(|| certify_batches(cfg.nu, delta));
    let n_s = cfg.shots.n_s.unwrap_or_else(|| certify_batch_size(a.total_weight(), cfg.eta));
    let mut sampler = ShotSampler::new(&s, phi, Circuit::Plain)?;
    let mut budget = EvolutionBudget::default();
    let mut r = stage_rng(rng);
    let pool = SamplePool::draw(&mut sampler, &a, n_b, n_s, tau, &mut budget, &mut r)?;
    let inv = invert_cdf(cfg.eta, delta, &a, &pool)?;
    let stage = StageReport {
        name: "gse",
        degree: a.degree(),
        delta: a.delta(),
        fourier_epsilon: fourier_eps,
        groups: n_b,
        group_size: n_s,
        shots: pool.len() as u64,
        budget,
    };
    let intermediate = Intermediates { x_star: Some(inv.x_star), stages: vec![stage], ..Default::default() };
    Ok(EstimateReport::from_stages(Complex::new(inv.x_star / tau, T::zero()), *cfg, intermediate))
}

/// `x* + tau gamma / 2`, good for `lambda_0` when `x*` came from an energy
/// estimate with accuracy `epsilon < gamma / 4`.
pub fn good_point<T: Real>(x_star: T, tau: T, gamma: T, epsilon: T) -> Result<T> {
    if !(epsilon > T::zero() && epsilon < gamma / lit(4.0)) {
        return Err(Error::Precondition(format!("epsilon = {} must lie in (0, gamma/4) with gamma = {}", epsilon, gamma)));
    }
    Ok(x_star + tau * gamma / lit(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn good_point_examples() {
        assert!((good_point(0.05f64, 1.0, 1.0, 0.1).unwrap() - 0.55).abs() < 1e-15);
        assert!((good_point(-0.1f64, 1.0, 1.0, 0.1).unwrap() - 0.4).abs() < 1e-15);
        assert!(good_point(0.0, 1.0, 1.0, 0.25).is_err());
    }

    #[test]
    fn certify_needs_samples() {
        let a = FourierApprox::<f64>::with_degree(10, 0.2, 0.1).unwrap();
        let pool = SamplePool::new(vec![(0, Complex::new(1.0, 0.0)); 3], 2, 2);
        assert!(matches!(certify(0.0, 0.5, &a, &pool), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn iteration_cap_formula() {
        assert_eq!(max_inversion_iterations(0.02), 7 + 2);
    }
}
