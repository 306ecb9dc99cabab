//! Trigonometric approximation of the 2π-periodic Heaviside function.
//!
//! Coefficients are stored for the plain series `F(x) = sum_j c_j e^{ijx}`,
//! the convention under which the ACDF is `sum_k p_k F(x - tau lambda_k)`.
//! Unitary-normalized coefficients (`sqrt(2π) c_j`) are available through
//! [`FourierApprox::unitary_coefficient`].

mod mollifier;

use std::any::Any;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{Complex, ComplexField};

pub use mollifier::{chebyshev_t, max_delta, mollifier, Mollifier, GRID_POINTS};

use crate::error::{Error, Result};
use crate::scalar::{cis, lit, to_f64, Real};

/// Points per interval of the validation grid.
pub const VALIDATION_POINTS: usize = 20001;
/// Bound on `|c_j| |j|` for every `j != 0` (plain normalization).
pub const COEFFICIENT_DECAY: f64 = 0.33;
/// Slack allowed outside `[0, 1]`.
pub const RANGE_SLACK: f64 = 1e-9;
/// Largest degree supported by the default DFT grid.
pub const MAX_DEGREE: usize = GRID_POINTS / 2 - 1;

/// `1` on `[2kπ, (2k+1)π)`, else `0`.
pub fn heaviside<T: Real>(x: T) -> T {
    let r = x - T::two_pi() * (x / T::two_pi()).floor();
    if r < T::pi() {
        T::one()
    } else {
        T::zero()
    }
}

/// Unitary-normalized Heaviside coefficient `(1/sqrt(2π)) ∫ H(x) e^{-ijx} dx`.
pub fn heaviside_coefficient<T: Real>(j: i64) -> Complex<T> {
    heaviside_plain(j) * T::two_pi().sqrt()
}

/// Plain Heaviside coefficient `(1/2π) ∫ H(x) e^{-ijx} dx`.
fn heaviside_plain<T: Real>(j: i64) -> Complex<T> {
    if j == 0 {
        Complex::new(lit(0.5), T::zero())
    } else if j % 2 != 0 {
        Complex::new(T::zero(), -T::one() / (T::pi() * lit::<T>(j as f64)))
    } else {
        Complex::new(T::zero(), T::zero())
    }
}

/// Fourier series `F(x) = sum_{j=-d}^{d} c_j e^{ijx}` approximating `H`.
#[derive(Debug, Clone)]
pub struct FourierApprox<T: Real = f64> {
    d: usize,
    delta: T,
    epsilon: T,
    coefficients: Vec<Complex<T>>,
    weights: Vec<T>,
    phases: Vec<T>,
    total_weight: T,
}

/// Diagnostics from the validation grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validation<T: Real = f64> {
    pub sup_error: T,
    pub min: T,
    pub max: T,
    pub max_decay: T,
}

impl<T: Real> Validation<T> {
    pub fn passes(&self, epsilon: T) -> bool {
        let slack = T::tolerance(RANGE_SLACK);
        self.sup_error <= epsilon && self.min >= -slack && self.max <= T::one() + slack
    }
}

/// Builds the approximation with the smallest validated degree.
pub fn build_fourier_approx<T: Real>(delta: T, epsilon: T) -> Result<FourierApprox<T>> {
    let (_, a) = search(delta, epsilon)?;
    a.check_invariants()?;
    Ok(a)
}

/// Smallest degree whose approximation passes validation.
pub fn degree_for<T: Real>(delta: T, epsilon: T) -> Result<usize> {
    search(delta, epsilon).map(|(d, _)| d)
}

/// `F(x)`.
pub fn evaluate_f<T: Real>(a: &FourierApprox<T>, x: T) -> T {
    a.evaluate(x)
}

fn check_params<T: Real>(delta: T, epsilon: T) -> Result<()> {
    if !(delta > T::zero() && delta < T::pi() / lit(6.0)) {
        return Err(Error::InvalidParameter(format!("delta = {} not in (0, π/6)", delta)));
    }
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::InvalidParameter(format!("epsilon = {} not in (0, 1)", epsilon)));
    }
    Ok(())
}

fn search<T: Real>(delta: T, epsilon: T) -> Result<(usize, FourierApprox<T>)> {
    check_params(delta, epsilon)?;
    let attempt = |d: usize| -> Result<Option<FourierApprox<T>>> {
        match FourierApprox::with_degree(d, delta, epsilon) {
            Ok(a) => Ok(if a.validate_early_exit() { Some(a) } else { None }),
            Err(Error::MollifierUnresolved(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let mut lo = 0usize;
    let mut d = 8usize;
    let mut best = loop {
        if let Some(a) = attempt(d)? {
            break a;
        }
        if d == MAX_DEGREE {
            return Err(Error::DegreeCapExceeded { cap: MAX_DEGREE });
        }
        lo = d;
        d = (2 * d).min(MAX_DEGREE);
    };
    let mut hi = d;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match attempt(mid)? {
            Some(a) => {
                hi = mid;
                best = a;
            }
            None => lo = mid,
        }
    }
    Ok((hi, best))
}

impl<T: Real> FourierApprox<T> {
    /// Mollified construction at a fixed degree, shifted and rescaled into `[0, 1]`.
    pub fn with_degree(d: usize, delta: T, epsilon: T) -> Result<Self> {
        check_params(delta, epsilon)?;
        if d > MAX_DEGREE {
            return Err(Error::DegreeCapExceeded { cap: MAX_DEGREE });
        }
        let m = Mollifier::new(d, delta)?.coefficients(GRID_POINTS);
        let rescale = T::one() + lit::<T>(1.25) * epsilon;
        let di = d as i64;
        let coefficients = (-di..=di)
            .zip(m)
            .map(|(j, mj)| {
                let mut c = mj * heaviside_plain::<T>(j) * T::two_pi();
                if j == 0 {
                    c = Complex::new(c.re + epsilon / lit(4.0), T::zero());
                }
                c / rescale
            })
            .collect();
        Ok(Self::assemble(d, delta, epsilon, coefficients))
    }

    /// Wraps explicit coefficients `c_{-d..=d}`. `delta` and `epsilon` are
    /// recorded but not checked.
    pub fn from_coefficients(delta: T, epsilon: T, coefficients: Vec<Complex<T>>) -> Result<Self> {
        if coefficients.len() % 2 == 0 {
            return Err(Error::InvalidParameter("coefficient list must have odd length".into()));
        }
        let d = coefficients.len() / 2;
        let a = Self::assemble(d, delta, epsilon, coefficients);
        if a.total_weight <= T::zero() {
            return Err(Error::InvalidParameter("all coefficients vanish".into()));
        }
        Ok(a)
    }

    fn assemble(d: usize, delta: T, epsilon: T, coefficients: Vec<Complex<T>>) -> Self {
        let weights: Vec<T> = coefficients.iter().map(|c| c.modulus()).collect();
        let phases = coefficients.iter().map(|c| c.im.atan2(c.re)).collect();
        let total_weight = weights.iter().fold(T::zero(), |a, &w| a + w);
        FourierApprox { d, delta, epsilon, coefficients, weights, phases, total_weight }
    }

    /// Shared, memoized construction for `(delta, epsilon)`.
    pub fn shared(delta: T, epsilon: T) -> Result<Arc<Self>> {
        type Cache = Mutex<HashMap<(std::any::TypeId, u64, u64), Arc<dyn Any + Send + Sync>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let key = (std::any::TypeId::of::<T>(), to_f64(delta).to_bits(), to_f64(epsilon).to_bits());
        let cache = CACHE.get_or_init(Default::default);
        if let Some(hit) = cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone().downcast::<Self>().expect("cache keyed by type"));
        }
        let built = Arc::new(build_fourier_approx(delta, epsilon)?);
        cache.lock().expect("cache lock").insert(key, built.clone());
        Ok(built)
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    fn slot(&self, j: i64) -> Option<usize> {
        let i = j + self.d as i64;
        (i >= 0 && (i as usize) < self.coefficients.len()).then_some(i as usize)
    }

    /// `c_j`, zero outside `[-d, d]`.
    pub fn coefficient(&self, j: i64) -> Complex<T> {
        self.slot(j).map_or(Complex::new(T::zero(), T::zero()), |i| self.coefficients[i])
    }

    /// `sqrt(2π) c_j`.
    pub fn unitary_coefficient(&self, j: i64) -> Complex<T> {
        self.coefficient(j) * T::two_pi().sqrt()
    }

    /// All coefficients, `j = -d..=d`.
    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    /// `|c_j|`, `j = -d..=d`.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `theta_j = arg c_j`.
    pub fn phase(&self, j: i64) -> T {
        self.slot(j).map_or(T::zero(), |i| self.phases[i])
    }

    /// `sum_j |c_j|`.
    pub fn total_weight(&self) -> T {
        self.total_weight
    }

    /// `sum_j c_j e^{ijx}`.
    pub fn evaluate_complex(&self, x: T) -> Complex<T> {
        let w = cis(x);
        let d = self.d as i64;
        // Horner in e^{ix} from the top, then undo the e^{idx} offset.
        let mut acc = Complex::new(T::zero(), T::zero());
        for c in self.coefficients.iter().rev() {
            acc = acc * w + *c;
        }
        acc * cis(-lit::<T>(d as f64) * x)
    }

    /// `F(x)`, real part of the series.
    pub fn evaluate(&self, x: T) -> T {
        let w = cis(x);
        let mut acc = Complex::new(T::zero(), T::zero());
        for c in self.coefficients[self.d + 1..].iter().rev() {
            acc = (acc + *c) * w;
        }
        self.coefficients[self.d].re + lit::<T>(2.0) * acc.re
    }

    /// Runs every validation grid.
    pub fn validate(&self) -> Validation<T> {
        self.validation(false)
    }

    fn validate_early_exit(&self) -> bool {
        self.validation(true).passes(self.epsilon)
    }

    fn validation(&self, early_exit: bool) -> Validation<T> {
        let mut v = Validation {
            sup_error: T::zero(),
            min: T::max_value().unwrap(),
            max: -T::max_value().unwrap(),
            max_decay: self.max_decay(),
        };
        let (delta, pi) = (self.delta, T::pi());
        let last = lit::<T>((VALIDATION_POINTS - 1) as f64);
        let inner = |k: usize| delta + (pi - lit::<T>(2.0) * delta) * lit::<T>(k as f64) / last;
        // Largest errors sit next to the transition, so probe those ends first.
        let order = (0..VALIDATION_POINTS).map(|k| if k % 2 == 0 { k / 2 } else { VALIDATION_POINTS - 1 - k / 2 });
        for k in order {
            let x = inner(k);
            let up = self.evaluate(x);
            let down = self.evaluate(-x);
            v.sup_error = v.sup_error.max((up - T::one()).abs()).max(down.abs());
            if early_exit && v.sup_error > self.epsilon {
                return v;
            }
        }
        for k in 0..VALIDATION_POINTS {
            let x = -pi + lit::<T>(2.0) * pi * lit::<T>(k as f64) / last;
            let f = self.evaluate(x);
            v.min = v.min.min(f);
            v.max = v.max.max(f);
        }
        v
    }

    /// Conjugate symmetry, coefficient decay, range and accuracy.
    pub fn check_invariants(&self) -> Result<()> {
        let d = self.d as i64;
        let asym = (1..=d).map(|j| (self.coefficient(-j) - self.coefficient(j).conj()).modulus()).fold(T::zero(), |a, b| a.max(b));
        if asym > T::tolerance(1e-10) || self.coefficient(0).im.abs() > T::tolerance(1e-10) {
            return Err(Error::FourierInvariant(format!("conjugate symmetry off by {:e}", asym)));
        }
        if self.max_decay() > lit(COEFFICIENT_DECAY) {
            return Err(Error::FourierInvariant(format!("|c_j| |j| reaches {}", self.max_decay())));
        }
        let v = self.validate();
        if !v.passes(self.epsilon) {
            return Err(Error::FourierInvariant(format!(
                "sup error {:e}, range [{:e}, {:e}]",
                v.sup_error, v.min, v.max
            )));
        }
        Ok(())
    }

    /// `max_{j != 0} |c_j| |j|`.
    pub fn max_decay(&self) -> T {
        let d = self.d as i64;
        (-d..=d)
            .filter(|&j| j != 0)
            .map(|j| self.coefficient(j).modulus() * lit::<T>(j.unsigned_abs() as f64))
            .fold(T::zero(), |a, b| a.max(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn heaviside_periodic() {
        assert_eq!(heaviside(0.0), 1.0);
        assert_eq!(heaviside(PI - 1e-9), 1.0);
        assert_eq!(heaviside(PI), 0.0);
        assert_eq!(heaviside(-0.1), 0.0);
        assert_eq!(heaviside(2.0 * PI + 0.1), 1.0);
    }

    #[test]
    fn heaviside_coefficients() {
        // Midpoint-rule oracle for (1/sqrt(2π)) ∫_0^π e^{-ix} dx.
        let n = 200_000;
        let h = PI / n as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for k in 0..n {
            let x = (k as f64 + 0.5) * h;
            re += x.cos() * h;
            im -= x.sin() * h;
        }
        let s = (2.0 * PI).sqrt();
        let c1 = heaviside_coefficient::<f64>(1);
        assert!((c1.re - re / s).abs() < 1e-9 && (c1.im - im / s).abs() < 1e-9);
        assert!((c1.norm() - 0.79788).abs() < 1e-5);
        assert_eq!(heaviside_coefficient::<f64>(2).norm(), 0.0);
    }

    #[test]
    fn evaluate_forms_agree() {
        let a = FourierApprox::<f64>::with_degree(30, 0.2, 0.01).unwrap();
        for x in [-3.0, -0.5, 0.0, 0.7, 2.9] {
            let c = a.evaluate_complex(x);
            assert!((c.re - a.evaluate(x)).abs() < 1e-12);
            assert!(c.im.abs() < 1e-12);
        }
    }

    #[test]
    fn quarter_points() {
        let a = build_fourier_approx(0.2, 0.01).unwrap();
        assert!((a.evaluate(PI / 2.0) - 1.0).abs() <= 0.01);
        assert!(a.evaluate(-PI / 2.0).abs() <= 0.01);
        assert!((a.evaluate(0.4 + 2.0 * PI) - a.evaluate(0.4)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_fourier_approx(0.0, 0.01).is_err());
        assert!(build_fourier_approx(0.2, 1.5).is_err());
        assert!(build_fourier_approx(1.0, 0.1).is_err());
    }

    #[test]
    fn shared_is_memoized() {
        let a = FourierApprox::<f64>::shared(0.21, 0.02).unwrap();
        let b = FourierApprox::<f64>::shared(0.21, 0.02).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn single_precision_build() {
        let a = build_fourier_approx(0.2f32, 0.05).unwrap();
        assert!(a.validate().passes(0.05));
    }
}
