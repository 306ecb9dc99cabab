//! Dense diagonalization, state vectors and exact spectral quantities.

use nalgebra::linalg::SymmetricTridiagonal;
use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::pauli::PauliOperator;
use crate::scalar::{cis, lit, to_f64, Real};

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real = f64> {
    amps: DVector<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Wraps `amps`, which must already have unit norm.
    pub fn new(amps: DVector<Complex<T>>) -> Result<Self> {
        let norm = amps.norm();
        if (norm - T::one()).abs() > T::tolerance(1e-10) {
            return Err(Error::NotNormalized(to_f64(norm)));
        }
        Ok(StateVector { amps })
    }

    /// Normalizes `amps`.
    pub fn normalize(amps: DVector<Complex<T>>) -> Result<Self> {
        let norm = amps.norm();
        if norm <= T::zero() || !norm.is_finite() {
            return Err(Error::NotNormalized(to_f64(norm)));
        }
        Ok(StateVector { amps: amps.unscale(norm) })
    }

    pub fn from_real(amps: &[T]) -> Result<Self> {
        Self::normalize(DVector::from_iterator(amps.len(), amps.iter().map(|&a| Complex::new(a, T::zero()))))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = DVector::zeros(dim);
        amps[index] = Complex::new(T::one(), T::zero());
        StateVector { amps }
    }

    /// `|+>^{⊗n}`.
    pub fn plus(n: usize) -> Self {
        let dim = 1usize << n;
        let a = T::one() / lit::<T>(dim as f64).sqrt();
        StateVector { amps: DVector::from_element(dim, Complex::new(a, T::zero())) }
    }

    /// Haar-random state from complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let amps = DVector::from_fn(dim, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(lit(re), lit(im))
        });
        Self::normalize(amps).expect("gaussian vector is nonzero")
    }

    /// `sqrt(p) |target> + sqrt(1-p) |noise>` with the noise direction orthogonal to
    /// `target`, so the squared overlap with `target` is exactly `p`.
    pub fn with_overlap<R: Rng + ?Sized>(target: &StateVector<T>, p: T, rng: &mut R) -> Result<Self> {
        if !(p > T::zero() && p <= T::one()) {
            return Err(Error::InvalidParameter(format!("overlap {} not in (0, 1]", p)));
        }
        let dim = target.dim();
        if dim == 1 || p == T::one() {
            return Ok(target.clone());
        }
        let noise = loop {
            let r = Self::random(dim, rng).amps;
            let proj = target.amps.dotc(&r);
            let orth = r - &target.amps * proj;
            if orth.norm() > lit(1e-6) {
                break orth.unscale(orth.norm());
            }
        };
        let amps = &target.amps * Complex::new(p.sqrt(), T::zero()) + noise * Complex::new((T::one() - p).sqrt(), T::zero());
        Self::normalize(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex<T>> {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector<T>) -> Complex<T> {
        self.amps.dotc(&other.amps)
    }

    /// `<self|M|self>`.
    pub fn expectation(&self, m: &DMatrix<Complex<T>>) -> Complex<T> {
        self.amps.dotc(&(m * &self.amps))
    }

    /// `|self> ⊗ |other>`.
    pub fn kron(&self, other: &StateVector<T>) -> StateVector<T> {
        StateVector { amps: self.amps.kronecker(&other.amps) }
    }
}

/// Eigendecomposition of a Hermitian operator with its normalization.
#[derive(Debug, Clone)]
pub struct SpectralData<T: Real = f64> {
    eigenvalues: Vec<T>,
    eigenvectors: DMatrix<Complex<T>>,
    gap: T,
    tau: T,
}

/// Diagonalizes `h`, rejecting a degenerate ground state.
pub fn diagonalize<T: Real>(h: &PauliOperator<T>, degeneracy_tolerance: T) -> Result<SpectralData<T>> {
    SpectralData::from_hermitian(h.to_matrix(), Some(degeneracy_tolerance))
}

/// Squared overlaps `p_k = |<psi_k|phi>|^2`.
pub fn overlaps<T: Real>(s: &SpectralData<T>, phi: &StateVector<T>) -> Vec<T> {
    s.overlaps(phi)
}

/// `e^{-iHt} |phi>`.
pub fn evolve<T: Real>(s: &SpectralData<T>, phi: &StateVector<T>, t: T) -> StateVector<T> {
    StateVector { amps: s.evolve_vector(phi.amplitudes(), t) }
}

/// Exact CDF `C(x) = sum_{k: tau lambda_k <= x} p_k`.
pub fn exact_cdf<T: Real>(s: &SpectralData<T>, phi: &StateVector<T>, x: T) -> T {
    s.measure(phi).cdf(x)
}

/// Ascending eigenvalues and matching eigenvectors of a Hermitian matrix.
///
/// nalgebra's `symmetric_eigen` can return wrong vectors on exactly
/// degenerate spectra, so only its Householder reduction is reused. The
/// tridiagonal is made real by rephasing the basis and then diagonalized with
/// implicit-shift QL.
pub(crate) fn hermitian_eigen<T: Real>(m: &DMatrix<Complex<T>>) -> (Vec<T>, DMatrix<Complex<T>>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let mut q = SymmetricTridiagonal::new(m.clone()).q();
    let mq = m * &q;
    let mut d: Vec<T> = (0..n).map(|k| q.column(k).dotc(&mq.column(k)).re).collect();
    let mut e = vec![T::zero(); n];
    let mut phase = Complex::new(T::one(), T::zero());
    for k in 0..n - 1 {
        let ek = q.column(k + 1).dotc(&mq.column(k));
        let modulus = ek.re.hypot(ek.im);
        if modulus > T::zero() {
            phase *= ek.unscale(modulus);
        }
        e[k] = modulus;
        let mut col = q.column_mut(k + 1);
        col *= phase;
    }
    tridiagonal_ql(&mut d, &mut e, &mut q);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| q[(r, order[c])]);
    (values, vectors)
}

/// Implicit-shift QL on the real symmetric tridiagonal with diagonal `d` and
/// coupling `e[k]` between `k` and `k + 1`. Rotations are applied to the
/// columns of `z`.
fn tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T], z: &mut DMatrix<Complex<T>>) {
    let n = d.len();
    let eps = T::default_epsilon();
    let two = lit::<T>(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 60, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let signed = if g >= T::zero() { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + signed);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..z.nrows() {
                    let zi = z[(k, i)];
                    let zj = z[(k, i + 1)];
                    z[(k, i + 1)] = zi.scale(s) + zj.scale(c);
                    z[(k, i)] = zi.scale(c) - zj.scale(s);
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
}

impl<T: Real> SpectralData<T> {
    /// Diagonalizes a Hermitian matrix. With `degeneracy_tolerance = None` the
    /// ground-state gap is not checked.
    pub fn from_hermitian(m: DMatrix<Complex<T>>, degeneracy_tolerance: Option<T>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: m.ncols() });
        }
        let scale = m.norm().max(T::one());
        let herm_dev = (&m - m.adjoint()).norm();
        if herm_dev > T::tolerance(1e-12) * scale {
            return Err(Error::NotHermitian(to_f64(herm_dev)));
        }
        let (eigenvalues, eigenvectors) = hermitian_eigen(&m);
        let gap = if dim > 1 { eigenvalues[1] - eigenvalues[0] } else { T::zero() };
        if let Some(tol) = degeneracy_tolerance {
            if dim > 1 && gap <= tol {
                return Err(Error::DegenerateGround { gap: to_f64(gap), tolerance: to_f64(tol) });
            }
        }
        let max_abs = eigenvalues.iter().fold(T::zero(), |a, l| a.max(l.abs()));
        if max_abs <= T::zero() {
            return Err(Error::ZeroSpectrum);
        }
        let tau = T::frac_pi_3() / max_abs;
        Ok(SpectralData { eigenvalues, eigenvectors, gap, tau })
    }

    /// Ascending, unnormalized eigenvalues.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Columns are eigenvectors, ordered like `eigenvalues`.
    pub fn eigenvectors(&self) -> &DMatrix<Complex<T>> {
        &self.eigenvectors
    }

    pub fn gap(&self) -> T {
        self.gap
    }

    /// Normalization with `tau * max|lambda| = pi/3`.
    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn ground_energy(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn eigenstate(&self, k: usize) -> StateVector<T> {
        StateVector { amps: self.eigenvectors.column(k).into_owned() }
    }

    pub fn ground_state(&self) -> StateVector<T> {
        self.eigenstate(0)
    }

    /// `tau * lambda_k`.
    pub fn scaled_eigenvalues(&self) -> Vec<T> {
        self.eigenvalues.iter().map(|&l| l * self.tau).collect()
    }

    /// Amplitudes `c_k = <psi_k|phi>`.
    pub fn coefficients(&self, phi: &StateVector<T>) -> DVector<Complex<T>> {
        self.eigenvectors.ad_mul(phi.amplitudes())
    }

    pub fn overlaps(&self, phi: &StateVector<T>) -> Vec<T> {
        self.coefficients(phi).iter().map(|c| c.norm_sqr()).collect()
    }

    /// `e^{-iHt} v` for an arbitrary vector.
    pub fn evolve_vector(&self, v: &DVector<Complex<T>>, t: T) -> DVector<Complex<T>> {
        let mut c = self.eigenvectors.ad_mul(v);
        for (k, ck) in c.iter_mut().enumerate() {
            *ck *= cis(-t * self.eigenvalues[k]);
        }
        &self.eigenvectors * c
    }

    /// Matrix elements `<psi_k|O|psi_l>` in the eigenbasis.
    pub fn in_eigenbasis(&self, o: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
        self.eigenvectors.ad_mul(&(o * &self.eigenvectors))
    }

    /// Spectral measure of `phi` on the scaled eigenvalues.
    pub fn measure(&self, phi: &StateVector<T>) -> SpectralMeasure<T> {
        SpectralMeasure::new(self.scaled_eigenvalues(), self.overlaps(phi)).expect("valid measure")
    }

    /// Copy with a different normalization constant.
    pub fn with_tau(&self, tau: T) -> Self {
        SpectralData { tau, ..self.clone() }
    }
}

/// Discrete measure `sum_k w_k delta(x - x_k)` on the normalized axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure<T: Real = f64> {
    points: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> SpectralMeasure<T> {
    pub fn new(points: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::LengthMismatch { expected: points.len(), found: weights.len() });
        }
        Ok(SpectralMeasure { points, weights })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn cdf(&self, x: T) -> T {
        self.points
            .iter()
            .zip(&self.weights)
            .filter(|(&p, _)| p <= x)
            .fold(T::zero(), |a, (_, &w)| a + w)
    }
}
