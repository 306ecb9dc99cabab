//! Chebyshev mollifier `M(x) = T_d(1 + 2 (cos x - cos delta) / (1 + cos delta)) / N`.
//!
//! `N` grows like `e^{d * acosh(y0)}`, so the kernel is kept in scaled form:
//! everything is divided by `e^{d A}` with `A = acosh(y0)` and `y0` the
//! argument at `x = 0`.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Default quadrature/FFT grid size.
pub const GRID_POINTS: usize = 1 << 16;

/// Chebyshev polynomial `T_d(y)` by the three-term recurrence, with the
/// `cosh` form for `|y| > 1`.
pub fn chebyshev_t<T: Real>(d: usize, y: T) -> T {
    if y.abs() > T::one() {
        let sign = if y < T::zero() && d % 2 == 1 { -T::one() } else { T::one() };
        return sign * (lit::<T>(d as f64) * y.abs().acosh()).cosh();
    }
    let (mut prev, mut cur) = (T::one(), y);
    if d == 0 {
        return prev;
    }
    for _ in 1..d {
        let next = lit::<T>(2.0) * y * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Largest admissible `delta`: `tan(delta/2) = 1 - 1/sqrt(2)`.
pub fn max_delta() -> f64 {
    2.0 * (1.0 - std::f64::consts::FRAC_1_SQRT_2).atan()
}

#[derive(Debug, Clone)]
pub struct Mollifier<T: Real = f64> {
    d: usize,
    delta: T,
    /// `acosh(y0)`.
    peak: T,
    /// Integral of the scaled kernel over one period.
    scaled_norm: T,
}

impl<T: Real> Mollifier<T> {
    pub fn new(d: usize, delta: T) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("mollifier degree must be positive".into()));
        }
        let two = lit::<T>(2.0);
        if !(delta > T::zero()) || (delta / two).tan() > T::one() - T::FRAC_1_SQRT_2() {
            return Err(Error::MollifierDomain(crate::scalar::to_f64(delta)));
        }
        let s = (delta / two).sin().powi(2);
        let c = (delta / two).cos().powi(2);
        let z = two * s / c;
        let peak = acosh1p(z);
        let mut m = Mollifier { d, delta, peak, scaled_norm: T::one() };
        let coarse = m.trapezoid(GRID_POINTS);
        let fine = m.trapezoid(2 * GRID_POINTS);
        // At low degree the kernel oscillates and its integral nearly cancels.
        let mass = m.abs_trapezoid(2 * GRID_POINTS);
        if !(fine > mass * lit(1e-6)) || (coarse - fine).abs() > mass * T::tolerance(1e-12) {
            return Err(Error::MollifierUnresolved(d));
        }
        m.scaled_norm = fine;
        Ok(m)
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// `ln N_{d,delta}`.
    pub fn ln_normalization(&self) -> T {
        lit::<T>(self.d as f64) * self.peak + self.scaled_norm.ln()
    }

    /// `T_d(y(x)) e^{-d A}`.
    fn scaled_kernel(&self, x: T) -> T {
        let two = lit::<T>(2.0);
        let half = self.delta / two;
        let s = half.sin().powi(2);
        let c = half.cos().powi(2);
        let u = (x / two).sin().powi(2);
        let d = lit::<T>(self.d as f64);
        if u <= s {
            let a = acosh1p(two * (s - u) / c);
            ((d * (a - self.peak)).exp() + (-d * (a + self.peak)).exp()) / two
        } else {
            let r = ((u - s) / c).min(T::one()).sqrt();
            let theta = two * r.asin();
            (d * theta).cos() * (-d * self.peak).exp()
        }
    }

    fn trapezoid(&self, n: usize) -> T {
        let h = T::two_pi() / lit::<T>(n as f64);
        let sum = (0..n).fold(T::zero(), |a, k| a + self.scaled_kernel(lit::<T>(k as f64) * h));
        sum * h
    }

    fn abs_trapezoid(&self, n: usize) -> T {
        let h = T::two_pi() / lit::<T>(n as f64);
        let sum = (0..n).fold(T::zero(), |a, k| a + self.scaled_kernel(lit::<T>(k as f64) * h).abs());
        sum * h
    }

    /// `M_{d,delta}(x)`.
    pub fn value(&self, x: T) -> T {
        self.scaled_kernel(x) / self.scaled_norm
    }

    /// Plain Fourier coefficients `m_j` of `M(x) = sum_j m_j e^{ijx}`, for
    /// `j = -d..=d`, computed by an `n`-point DFT (exact when `n > 2d`).
    pub fn coefficients(&self, n: usize) -> Vec<Complex<T>> {
        let h = T::two_pi() / lit::<T>(n as f64);
        let mut buf: Vec<Complex<T>> =
            (0..n).map(|k| Complex::new(self.value(lit::<T>(k as f64) * h), T::zero())).collect();
        T::forward_fft(&mut buf);
        let scale = lit::<T>(n as f64);
        let d = self.d as isize;
        (-d..=d).map(|j| buf[j.rem_euclid(n as isize) as usize] / scale).collect()
    }
}

/// `acosh(1 + z)` for `z >= 0`, accurate for small `z`.
fn acosh1p<T: Real>(z: T) -> T {
    (z + (z * (lit::<T>(2.0) + z)).sqrt()).ln_1p()
}

/// `M_{d,delta}(x)`.
pub fn mollifier<T: Real>(d: usize, delta: T, x: T) -> Result<T> {
    Ok(Mollifier::new(d, delta)?.value(x))
}
