use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Splits `values` into `n_g` consecutive groups of `k`, averages each group and
/// returns the component-wise median of the means (lower median for even `n_g`).
pub fn median_of_means<T: Real>(values: &[Complex<T>], n_g: usize, k: usize) -> Result<Complex<T>> {
    if n_g == 0 || k == 0 || values.len() != n_g * k {
        return Err(Error::LengthMismatch { expected: n_g * k, found: values.len() });
    }
    let means: Vec<Complex<T>> = values
        .chunks(k)
        .map(|g| g.iter().fold(Complex::new(T::zero(), T::zero()), |a, &v| a + v) / lit::<T>(k as f64))
        .collect();
    Ok(componentwise_median(&means))
}

/// Component-wise lower median.
pub fn componentwise_median<T: Real>(values: &[Complex<T>]) -> Complex<T> {
    let median = |mut xs: Vec<T>| {
        xs.sort_by(|a, b| a.partial_cmp(b).expect("finite group means"));
        xs[(xs.len() - 1) / 2]
    };
    Complex::new(median(values.iter().map(|v| v.re).collect()), median(values.iter().map(|v| v.im).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases() {
        let v = vec![Complex::new(0.25, -1.0); 12];
        assert_eq!(median_of_means(&v, 3, 4).unwrap(), Complex::new(0.25, -1.0));
        let w: Vec<_> = (0..6).map(|i| Complex::new(i as f64, 0.0)).collect();
        assert_eq!(median_of_means(&w, 1, 6).unwrap(), Complex::new(2.5, 0.0));
        assert!(matches!(median_of_means(&w, 4, 2), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn lower_median_for_even_groups() {
        let w: Vec<_> = [1.0, 4.0, 2.0, 3.0].iter().map(|&x| Complex::new(x, -x)).collect();
        assert_eq!(median_of_means(&w, 4, 1).unwrap(), Complex::new(2.0, -3.0));
    }
}
