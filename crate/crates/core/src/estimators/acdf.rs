//! J-sampling, the G and G₂ estimators and exact (A)CDF oracles.

use nalgebra::{Complex, DMatrix};
use rand::distributions::Distribution;
use rand::Rng;
use rand_distr::WeightedAliasIndex;

use crate::error::{Error, Result};
use crate::fourier::FourierApprox;
use crate::scalar::{cis, lit, to_f64, Real};
use crate::spectral::{SpectralData, SpectralMeasure, StateVector};

/// O(1) sampler of `Pr[J = j] = |c_j| / F`.
#[derive(Debug, Clone)]
pub struct JSampler {
    alias: WeightedAliasIndex<f64>,
    d: i64,
}

impl JSampler {
    pub fn new<T: Real>(a: &FourierApprox<T>) -> Result<Self> {
        let weights: Vec<f64> = a.weights().iter().map(|&w| to_f64(w)).collect();
        let alias = WeightedAliasIndex::new(weights).map_err(|e| Error::InvalidParameter(format!("J distribution: {}", e)))?;
        Ok(JSampler { alias, d: a.degree() as i64 })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        self.alias.sample(rng) as i64 - self.d
    }
}

/// Draws one `J`.
pub fn sample_j<T: Real, R: Rng + ?Sized>(a: &FourierApprox<T>, rng: &mut R) -> Result<i64> {
    Ok(JSampler::new(a)?.sample(rng))
}

/// `G(x; j, z) = F z e^{i(theta_j + j x)}`.
pub fn g_estimator<T: Real>(a: &FourierApprox<T>, x: T, j: i64, z: Complex<T>) -> Complex<T> {
    z * cis(a.phase(j) + lit::<T>(j as f64) * x) * a.total_weight()
}

/// `G2(x, y; j, j', z) = F^2 z e^{i(theta_j + j x)} e^{i(theta_j' + j' y)}`.
pub fn g2_estimator<T: Real>(a: &FourierApprox<T>, x: T, y: T, j: i64, jp: i64, z: Complex<T>) -> Complex<T> {
    let f = a.total_weight();
    z * cis(a.phase(j) + lit::<T>(j as f64) * x) * cis(a.phase(jp) + lit::<T>(jp as f64) * y) * (f * f)
}

/// Table of `F e^{i(theta_j + j x)}` for `j = -d..=d`.
pub(crate) fn phase_table<T: Real>(a: &FourierApprox<T>, x: T) -> Vec<Complex<T>> {
    let d = a.degree() as i64;
    (-d..=d).map(|j| cis(a.phase(j) + lit::<T>(j as f64) * x) * a.total_weight()).collect()
}

/// ACDF `sum_k w_k F(x - x_k)` by direct summation over the measure.
pub fn acdf<T: Real>(a: &FourierApprox<T>, measure: &SpectralMeasure<T>, x: T) -> T {
    measure
        .points()
        .iter()
        .zip(measure.weights())
        .fold(T::zero(), |acc, (&p, &w)| acc + w * a.evaluate(x - p))
}

/// ACDF as the Fourier sum `sum_j c_j e^{ijx} <phi|e^{-ij tau H}|phi>`.
pub fn acdf_fourier<T: Real>(a: &FourierApprox<T>, s: &SpectralData<T>, phi: &StateVector<T>, x: T) -> Complex<T> {
    let d = a.degree() as i64;
    let p = s.overlaps(phi);
    let lam = s.scaled_eigenvalues();
    (-d..=d).fold(Complex::new(T::zero(), T::zero()), |acc, j| {
        let jf = lit::<T>(j as f64);
        let m = p.iter().zip(&lam).fold(Complex::new(T::zero(), T::zero()), |m, (&pk, &l)| m + cis(-jf * l) * pk);
        acc + a.coefficient(j) * cis(jf * x) * m
    })
}

/// 2-d O-weighted ACDF `sum_{k,k'} conj(c_k) c_k' O_kk' F(x - tau lambda_k) F(y - tau lambda_k')`.
pub fn acdf_2d<T: Real>(
    a: &FourierApprox<T>,
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    o: &DMatrix<Complex<T>>,
    x: T,
    y: T,
) -> Complex<T> {
    weighted_2d(s, phi, o, |l| a.evaluate(x - l), |l| a.evaluate(y - l))
}

/// 2-d O-weighted CDF `sum_{tau lambda_k <= x, tau lambda_k' <= y} conj(c_k) c_k' O_kk'`.
pub fn cdf_2d<T: Real>(s: &SpectralData<T>, phi: &StateVector<T>, o: &DMatrix<Complex<T>>, x: T, y: T) -> Complex<T> {
    let step = |z: T| move |l: T| if l <= z { T::one() } else { T::zero() };
    weighted_2d(s, phi, o, step(x), step(y))
}

/// 1-d O-weighted CDF `sum_{tau lambda_k <= x} p_k O_kk`.
pub fn cdf_o<T: Real>(s: &SpectralData<T>, phi: &StateVector<T>, o: &DMatrix<Complex<T>>, x: T) -> Complex<T> {
    let c = s.coefficients(phi);
    let ob = s.in_eigenbasis(o);
    let lam = s.scaled_eigenvalues();
    (0..s.dim())
        .filter(|&k| lam[k] <= x)
        .fold(Complex::new(T::zero(), T::zero()), |acc, k| acc + ob[(k, k)] * c[k].norm_sqr())
}

/// 1-d O-weighted ACDF `sum_k p_k O_kk F(x - tau lambda_k)` for `O` commuting with `H`.
pub fn acdf_o<T: Real>(a: &FourierApprox<T>, s: &SpectralData<T>, phi: &StateVector<T>, o: &DMatrix<Complex<T>>, x: T) -> Complex<T> {
    let c = s.coefficients(phi);
    let ob = s.in_eigenbasis(o);
    let lam = s.scaled_eigenvalues();
    (0..s.dim()).fold(Complex::new(T::zero(), T::zero()), |acc, k| acc + ob[(k, k)] * (c[k].norm_sqr() * a.evaluate(x - lam[k])))
}

fn weighted_2d<T: Real>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    o: &DMatrix<Complex<T>>,
    fx: impl Fn(T) -> T,
    fy: impl Fn(T) -> T,
) -> Complex<T> {
    let c = s.coefficients(phi);
    let ob = s.in_eigenbasis(o);
    let lam = s.scaled_eigenvalues();
    let wx: Vec<T> = lam.iter().map(|&l| fx(l)).collect();
    let wy: Vec<T> = lam.iter().map(|&l| fy(l)).collect();
    let mut acc = Complex::new(T::zero(), T::zero());
    for k in 0..s.dim() {
        if wx[k] == T::zero() {
            continue;
        }
        for kp in 0..s.dim() {
            acc += c[k].conj() * c[kp] * ob[(k, kp)] * (wx[k] * wy[kp]);
        }
    }
    acc
}
