//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::{Complex, RealField};
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftPlanner;

/// Real scalar used throughout the crate. Implemented for `f32` and `f64`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + FloatConst + Display + LowerExp + Debug + Send + Sync + 'static
{
    /// In-place forward DFT, `X_k = sum_n x_n e^{-2 pi i k n / N}`.
    fn forward_fft(buf: &mut [Complex<Self>]);

    /// Tolerance suited to the precision of `Self`: `tol` for `f64`,
    /// loosened to a multiple of machine epsilon otherwise.
    fn tolerance(tol: f64) -> Self;
}

impl Real for f64 {
    fn forward_fft(buf: &mut [Complex<f64>]) {
        FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
    }

    fn tolerance(tol: f64) -> f64 {
        tol
    }
}

impl Real for f32 {
    fn forward_fft(buf: &mut [Complex<f32>]) {
        FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
    }

    fn tolerance(tol: f64) -> f32 {
        tol.max(1e-4) as f32
    }
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts `x` to `f64`.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("finite scalar")
}

/// `e^{i theta}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}
