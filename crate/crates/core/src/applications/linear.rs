//! Linear-system observables through a gap-amplified Hamiltonian whose zero
//! eigenspace holds the normalized solution.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::estimators::{
    effective_spectrum, run_mom_stage, stage_rng, EstimateReport, EstimationConfig, Intermediates, MomStage, ShotOverrides,
    Window,
};
use crate::fourier::FourierApprox;
use crate::hadamard::{embed_block_matrix, Circuit, FirstGate, ShotSampler};
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::{SpectralData, StateVector};
use crate::MAX_QUBITS;

type Mat<T> = DMatrix<Complex<T>>;

fn c<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

fn singular_values<T: Real>(a: &Mat<T>) -> (T, T) {
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(T::zero(), |m, &s| m.max(s));
    let min = sv.iter().fold(max, |m, &s| m.min(s));
    (min, max)
}

fn check_system<T: Real>(a: &Mat<T>, b: &DVector<Complex<T>>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.len() });
    }
    if (b.norm() - T::one()).abs() > T::tolerance(1e-10) {
        return Err(Error::NotNormalized(to_f64(b.norm())));
    }
    let (min, max) = singular_values(a);
    if min <= T::tolerance(1e-12) * max.max(T::one()) {
        return Err(Error::Singular);
    }
    Ok(())
}

/// `A x ∝ b` with `sigma_max(A) <= 1`, `sigma_min(A) >= 1/kappa` and `|b| = 1`.
#[derive(Debug, Clone)]
pub struct LinearSystemInstance<T: Real = f64> {
    a: Mat<T>,
    b: DVector<Complex<T>>,
    kappa: T,
}

impl<T: Real> LinearSystemInstance<T> {
    pub fn new(a: Mat<T>, b: DVector<Complex<T>>, kappa: T) -> Result<Self> {
        check_system(&a, &b)?;
        let (min, max) = singular_values(&a);
        let tol = T::tolerance(1e-10);
        if max > T::one() + tol {
            return Err(Error::InvalidParameter(format!("largest singular value {} exceeds 1", max)));
        }
        if min < T::one() / kappa - tol {
            return Err(Error::InvalidParameter(format!("smallest singular value {} below 1/kappa = {}", min, T::one() / kappa)));
        }
        // The gap-amplified operator acts on two extra qubits.
        if a.nrows() * 4 > 1usize << MAX_QUBITS {
            return Err(Error::TooManyQubits(a.nrows()));
        }
        Ok(LinearSystemInstance { a, b, kappa })
    }

    /// Real-valued system.
    pub fn from_real(a: &[&[T]], b: &[T], kappa: T) -> Result<Self> {
        let n = b.len();
        if a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: a.len() });
        }
        let m = DMatrix::from_fn(n, n, |i, j| c(a[i][j]));
        let norm = b.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
        let v = DVector::from_iterator(n, b.iter().map(|&x| c(x / norm)));
        Self::new(m, v, kappa)
    }

    /// `A = U diag(s) V^†` with Haar-like `U`, `V`, singular values spread over
    /// `[1/kappa, 1]` (both endpoints attained when `dim >= 2`) and a random unit `b`.
    pub fn random<R: Rng + ?Sized>(dim: usize, kappa: T, rng: &mut R) -> Result<Self> {
        if dim == 0 || !(kappa >= T::one()) {
            return Err(Error::InvalidParameter(format!("dim = {}, kappa = {}", dim, kappa)));
        }
        let unitary = |rng: &mut R| {
            let g = DMatrix::from_fn(dim, dim, |_, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(lit::<T>(re), lit::<T>(im))
            });
            g.qr().q()
        };
        let u = unitary(rng);
        let v = unitary(rng);
        let lo = T::one() / kappa;
        let s = DVector::from_fn(dim, |i, _| {
            let f = if i == 0 { T::one() } else if i == dim - 1 { T::zero() } else { lit(rng.gen::<f64>()) };
            c(lo + (T::one() - lo) * f)
        });
        let a = u * DMatrix::from_diagonal(&s) * v.adjoint();
        let b = StateVector::<T>::random(dim, rng).amplitudes().clone();
        Self::new(a, b, kappa)
    }

    pub fn a(&self) -> &Mat<T> {
        &self.a
    }

    pub fn b(&self) -> &DVector<Complex<T>> {
        &self.b
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `A^{-1} b / |A^{-1} b|`.
    pub fn solution(&self) -> Result<StateVector<T>> {
        let x = self.a.clone().lu().solve(&self.b).ok_or(Error::Singular)?;
        StateVector::normalize(x)
    }
}

fn projector_out<T: Real>(v: &DVector<Complex<T>>) -> Mat<T> {
    let n = v.len();
    Mat::<T>::identity(n, n) - v * v.adjoint()
}

/// `H_G = A^† (I - |b><b|) A`.
pub fn build_hg<T: Real>(a: &Mat<T>, b: &DVector<Complex<T>>) -> Result<Mat<T>> {
    check_system(a, b)?;
    Ok(a.adjoint() * projector_out(b) * a)
}

/// `Abar(s) = (1 - s) Z ⊗ I + s X ⊗ A` and `|bbar> = |+>|b>`.
pub fn interpolated_system<T: Real>(a: &Mat<T>, b: &DVector<Complex<T>>, s: T) -> (Mat<T>, DVector<Complex<T>>) {
    let n = a.nrows();
    let (o, z) = (c(T::one()), c(T::zero()));
    let pauli_z = Mat::<T>::from_row_slice(2, 2, &[o, z, z, -o]);
    let pauli_x = Mat::<T>::from_row_slice(2, 2, &[z, o, o, z]);
    let abar = pauli_z.kronecker(&Mat::<T>::identity(n, n)) * c(T::one() - s) + pauli_x.kronecker(a) * c(s);
    let r = c(T::FRAC_1_SQRT_2());
    let plus = DVector::from_element(2, r);
    (abar, plus.kronecker(b))
}

/// `H' = sigma+ ⊗ Abar^† P + sigma- ⊗ P Abar` with `P = I - |bbar><bbar|`,
/// `sigma+ = |0><1|`. Its square has `Abar^† P Abar` as the upper block.
pub fn build_gap_amplified<T: Real>(a: &Mat<T>, b: &DVector<Complex<T>>, s: T) -> Result<Mat<T>> {
    check_system(a, b)?;
    if !(s >= T::zero() && s <= T::one()) {
        return Err(Error::InvalidParameter(format!("schedule parameter {} not in [0, 1]", s)));
    }
    let (abar, bbar) = interpolated_system(a, b, s);
    let p = projector_out(&bbar);
    let (o, z) = (c(T::one()), c(T::zero()));
    let up = Mat::<T>::from_row_slice(2, 2, &[z, o, z, z]);
    let down = up.adjoint();
    Ok(up.kronecker(&(abar.adjoint() * &p)) + down.kronecker(&(p * abar)))
}

/// `|0>|+>|x>`: the zero-energy state of `H'(1)` carrying the solution.
pub fn solution_embedding<T: Real>(inst: &LinearSystemInstance<T>) -> Result<StateVector<T>> {
    let r = T::FRAC_1_SQRT_2();
    let head = StateVector::from_real(&[r, r, T::zero(), T::zero()])?;
    Ok(head.kron(&inst.solution()?))
}

/// `Mtilde = |0><0| ⊗ |+><+| ⊗ M`.
pub fn embedded_observable<T: Real>(m: &Mat<T>) -> Mat<T> {
    let (o, z, h) = (c(T::one()), c(T::zero()), c(lit::<T>(0.5)));
    let zero = Mat::<T>::from_row_slice(2, 2, &[o, z, z, z]);
    let plus = Mat::<T>::from_row_slice(2, 2, &[h, h, h, h]);
    zero.kronecker(&plus).kronecker(m)
}

/// How the initial state of the property stages is produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState<T: Real = f64> {
    /// Exact squared overlap with `|0>|+>|x>`, the rest a random orthogonal direction.
    Oracle { overlap: T },
    /// Piecewise-constant evolution under `H'(s_k)`, `s_k = k / steps`, from `|0>|->|b>`.
    Schedule { steps: usize, total_time: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QlssConfig<T: Real = f64> {
    pub epsilon: T,
    pub nu: T,
    /// Required squared overlap of the prepared state with `|0>|+>|x>`.
    pub overlap_floor: T,
    pub initial: InitialState<T>,
    pub shots: ShotOverrides,
    pub generalized_gate: bool,
}

impl<T: Real> QlssConfig<T> {
    pub fn new(epsilon: T, nu: T, overlap_floor: T, initial: InitialState<T>) -> Self {
        QlssConfig { epsilon, nu, overlap_floor, initial, shots: ShotOverrides::default(), generalized_gate: false }
    }
}

#[derive(Debug, Clone)]
pub struct QlssReport<T: Real = f64> {
    pub estimate: EstimateReport<T>,
    /// Squared overlap of the prepared state with `|0>|+>|x>`.
    pub overlap: T,
}

/// Smallest nonzero `|lambda|` of a spectrum with a zero eigenspace.
fn zero_gap<T: Real>(s: &SpectralData<T>) -> Result<T> {
    let cut = T::tolerance(1e-8);
    s.eigenvalues()
        .iter()
        .map(|l| l.abs())
        .filter(|&l| l > cut)
        .fold(None, |m: Option<T>, l| Some(m.map_or(l, |m| m.min(l))))
        .ok_or(Error::ZeroSpectrum)
}

/// Prepares the initial state and returns it with its overlap.
pub fn prepare_initial<T: Real, R: Rng + ?Sized>(
    inst: &LinearSystemInstance<T>,
    initial: InitialState<T>,
    rng: &mut R,
) -> Result<(StateVector<T>, T)> {
    let target = solution_embedding(inst)?;
    let phi = match initial {
        InitialState::Oracle { overlap } => StateVector::with_overlap(&target, overlap, rng)?,
        InitialState::Schedule { steps, total_time } => {
            if steps == 0 || !(total_time > T::zero()) {
                return Err(Error::InvalidParameter(format!("schedule with {} steps over time {}", steps, total_time)));
            }
            let r = T::FRAC_1_SQRT_2();
            let head = StateVector::from_real(&[r, -r, T::zero(), T::zero()])?;
            let b = StateVector::new(inst.b().clone())?;
            let mut v = head.kron(&b).amplitudes().clone();
            let dt = total_time / lit(steps as f64);
            for k in 1..=steps {
                let s = lit::<T>(k as f64) / lit(steps as f64);
                let h = SpectralData::from_hermitian(build_gap_amplified(inst.a(), inst.b(), s)?, None)?;
                v = h.evolve_vector(&v, dt);
            }
            StateVector::normalize(v)?
        }
    };
    let overlap = target.inner(&phi).norm_sqr();
    Ok((phi, overlap))
}

/// `<x|M|x>` for the normalized solution of `A x = b` and Hermitian `M`.
///
/// Both `<phi|Pi Mtilde Pi|phi>` and `<phi|Pi Pi0 Pi|phi>` are estimated over the
/// spectral window `(-tau gamma / 2, tau gamma / 2]` of `H'(1)`, where `Pi` is the
/// projector onto its zero eigenspace and `Pi0 = |0><0| ⊗ I`; their ratio is the
/// result. `Pi0` removes the `|1>|bbar>` zero mode that `Mtilde` annihilates.
pub fn qlss_estimate<T: Real, R: Rng + ?Sized>(
    inst: &LinearSystemInstance<T>,
    m: &Mat<T>,
    cfg: &QlssConfig<T>,
    rng: &mut R,
) -> Result<QlssReport<T>> {
    let n = inst.dim();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.nrows() });
    }
    let h = build_gap_amplified(inst.a(), inst.b(), T::one())?;
    let spectrum = SpectralData::from_hermitian(h, None)?;
    let gamma = zero_gap(&spectrum)?;
    let est_cfg = EstimationConfig::new(cfg.epsilon, cfg.overlap_floor, gamma, cfg.nu, spectrum.tau())?
        .with_shots(cfg.shots)
        .with_generalized_gate(cfg.generalized_gate);

    let mtilde = embedded_observable(m);
    let (_, bbar) = interpolated_system(inst.a(), inst.b(), T::one());
    let mut null = DVector::zeros(4 * n);
    null.rows_mut(2 * n, 2 * n).copy_from(&bbar);
    let leak = (&mtilde * null).norm();
    if leak > T::tolerance(1e-10) {
        return Err(Error::NullVectorLeak(to_f64(leak)));
    }

    let (phi, overlap) = prepare_initial(inst, cfg.initial, rng)?;
    if overlap < cfg.overlap_floor {
        return Err(Error::OverlapBelowFloor { overlap: to_f64(overlap), floor: to_f64(cfg.overlap_floor) });
    }

    let norm = mtilde.clone().symmetric_eigen().eigenvalues.iter().fold(T::zero(), |a, l| a.max(l.abs()));
    let alpha = if norm > T::zero() { norm } else { T::one() };
    let numerator_block = embed_block_matrix(mtilde, alpha)?;
    let pi0 = embed_block_matrix(embedded_observable(&Mat::<T>::identity(n, n)) + ancilla_minus(n), T::one())?;

    let s = effective_spectrum(&spectrum, est_cfg.tau)?;
    let cap = lit::<T>(0.99) * T::pi() / lit(6.0);
    let delta = (est_cfg.tau * gamma / lit(4.0)).min(cap);
    let approx = FourierApprox::shared(delta, cfg.overlap_floor * cfg.epsilon / lit(32.0))?;
    let half = est_cfg.tau * gamma / lit(2.0);
    let window = Window::Interval(-half, half);
    let accuracy = cfg.overlap_floor * cfg.epsilon / lit(4.0);
    let nu = cfg.nu / lit(2.0);
    let gate = |alpha: T| if cfg.generalized_gate { FirstGate::default_for(alpha) } else { FirstGate::Hadamard };

    let mut stages = Vec::new();
    let mut run = |name: &'static str, block: &crate::hadamard::BlockEncoding<T>, rng: &mut R| -> Result<Complex<T>> {
        let mut sampler = ShotSampler::new(&s, &phi, Circuit::Block(block, gate(block.alpha())))?;
        let stage = MomStage {
            name,
            approx: &approx,
            x: window,
            y: Some(window),
            weight: block.alpha() * block.alpha(),
            accuracy,
            nu,
            overrides: cfg.shots,
        };
        let (v, report) = run_mom_stage(&mut sampler, stage, &mut stage_rng(rng))?;
        stages.push(report);
        Ok(v)
    };
    let den = run("p0", &pi0, rng)?;
    let num = run("p0o0", &numerator_block, rng)?;
    if !(den.re > T::zero()) {
        return Err(Error::Precondition(format!("normalization estimate {} is not positive", den.re)));
    }
    let intermediate = Intermediates { x_good: Some(half), p0: Some(den.re), p0_o0: Some(num), stages, ..Default::default() };
    Ok(QlssReport { estimate: EstimateReport::from_stages(num / den.re, est_cfg, intermediate), overlap })
}

/// `|0><0| ⊗ |-><-| ⊗ I`, completing `|0><0| ⊗ |+><+| ⊗ I` to `Pi0`.
fn ancilla_minus<T: Real>(n: usize) -> Mat<T> {
    let (o, z, h) = (c(T::one()), c(T::zero()), c(lit::<T>(0.5)));
    let zero = Mat::<T>::from_row_slice(2, 2, &[o, z, z, z]);
    let minus = Mat::<T>::from_row_slice(2, 2, &[h, -h, -h, h]);
    zero.kronecker(&minus).kronecker(&Mat::<T>::identity(n, n))
}

/// Exact `<x|M|x>`.
pub fn exact_solution_expectation<T: Real>(inst: &LinearSystemInstance<T>, m: &Mat<T>) -> Result<Complex<T>> {
    Ok(inst.solution()?.expectation(m))
}
