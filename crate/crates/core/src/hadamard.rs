//! Exact-probability simulation of Hadamard-test circuits.
//!
//! The control qubit is held as two branches of the target register. Gates on
//! the control mix the branches; controlled operations act on the `|1>`
//! branch; outcome probabilities are squared branch norms.

use std::collections::HashMap;

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{PauliOperator, PhasedPauli};
use crate::scalar::{cis, lit, to_f64, Real};
use crate::spectral::{hermitian_eigen, SpectralData, StateVector};

/// Gate applied to the control before the final basis change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseGate {
    /// Real-part run.
    I,
    /// `diag(1, i)`, imaginary-part run.
    S,
}

/// Which runs a shot bundles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Runs {
    Both,
    Real,
    Imaginary,
}

impl Runs {
    pub fn count(self) -> u64 {
        match self {
            Runs::Both => 2,
            _ => 1,
        }
    }
}

/// Time parameters of a shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShotIndex<T: Real = f64> {
    Single(i64),
    Pair(i64, i64),
    Times(T, T),
}

/// One simulated shot: `z = X + iY`, with `X` and `Y` from separate runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shot<T: Real = f64> {
    pub z: Complex<T>,
    pub index: ShotIndex<T>,
    pub runs: Runs,
}

/// Finite distribution of one run's estimator value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcomes<T: Real = f64> {
    values: [T; 3],
    probs: [T; 3],
    len: usize,
}

impl<T: Real> Outcomes<T> {
    fn new(pairs: &[(T, T)]) -> Self {
        let mut o = Outcomes { values: [T::zero(); 3], probs: [T::zero(); 3], len: pairs.len() };
        for (i, &(v, p)) in pairs.iter().enumerate() {
            o.values[i] = v;
            o.probs[i] = p;
        }
        o
    }

    /// `(value, probability)` pairs.
    pub fn support(&self) -> impl Iterator<Item = (T, T)> + '_ {
        (0..self.len).map(move |i| (self.values[i], self.probs[i]))
    }

    pub fn mean(&self) -> T {
        self.support().fold(T::zero(), |a, (v, p)| a + v * p)
    }

    pub fn second_moment(&self) -> T {
        self.support().fold(T::zero(), |a, (v, p)| a + v * v * p)
    }

    pub fn variance(&self) -> T {
        self.second_moment() - self.mean() * self.mean()
    }

    pub fn total_probability(&self) -> T {
        self.support().fold(T::zero(), |a, (_, p)| a + p)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let u: T = lit(rng.gen::<f64>());
        let mut acc = T::zero();
        for i in 0..self.len - 1 {
            acc += self.probs[i];
            if u < acc {
                return self.values[i];
            }
        }
        self.values[self.len - 1]
    }
}

/// Joint law of the real-part and imaginary-part runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotDistribution<T: Real = f64> {
    pub real: Outcomes<T>,
    pub imag: Outcomes<T>,
}

impl<T: Real> ShotDistribution<T> {
    pub fn expectation(&self) -> Complex<T> {
        Complex::new(self.real.mean(), self.imag.mean())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex<T> {
        Complex::new(self.real.sample(rng), self.imag.sample(rng))
    }
}

type Gate<T> = [[Complex<T>; 2]; 2];

fn c<T: Real>(re: f64) -> Complex<T> {
    Complex::new(lit(re), T::zero())
}

fn hadamard_gate<T: Real>() -> Gate<T> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[c(h), c(h)], [c(h), c(-h)]]
}

fn phase_gate<T: Real>(w: PhaseGate) -> Gate<T> {
    let one = match w {
        PhaseGate::I => c(1.0),
        PhaseGate::S => Complex::new(T::zero(), T::one()),
    };
    [[c(1.0), c(0.0)], [c(0.0), one]]
}

/// `G(a, b, theta) = [[a, b], [-e^{i theta} conj(b), e^{i theta} conj(a)]]`.
pub fn general_gate<T: Real>(a: Complex<T>, b: Complex<T>, theta: T) -> Gate<T> {
    let e = cis(theta);
    [[a, b], [-e * b.conj(), e * a.conj()]]
}

/// Control qubit as two branches of the target register.
struct Register<T: Real> {
    zero: DVector<Complex<T>>,
    one: DVector<Complex<T>>,
    /// Amplitude of `|1>` right after preparation.
    lead: Complex<T>,
}

impl<T: Real> Register<T> {
    /// Control in `|0>`, then `g`.
    fn prepare(g: &Gate<T>, target: &DVector<Complex<T>>) -> Self {
        Register { zero: target * g[0][0], one: target * g[1][0], lead: g[1][0] }
    }

    /// Controlled operation given by the image of the prepared target; valid
    /// only as the first operation after `prepare`.
    fn controlled_image(&mut self, image: &DVector<Complex<T>>) {
        self.one = image * self.lead;
    }

    fn gate(&mut self, g: &Gate<T>) {
        let zero = &self.zero * g[0][0] + &self.one * g[0][1];
        let one = &self.zero * g[1][0] + &self.one * g[1][1];
        self.zero = zero;
        self.one = one;
    }

    /// Probability of control outcome `bit` with the target restricted to its
    /// first `keep` entries (ancilla in `|0^m>`).
    fn probability(&self, bit: usize, keep: usize) -> T {
        let branch = if bit == 0 { &self.zero } else { &self.one };
        branch.rows(0, keep).norm_squared()
    }
}

/// Unitary observable, checked on construction.
#[derive(Debug, Clone)]
pub struct UnitaryOp<T: Real = f64> {
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> UnitaryOp<T> {
    pub fn new(matrix: DMatrix<Complex<T>>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let dev = (matrix.ad_mul(&matrix) - DMatrix::identity(matrix.nrows(), matrix.nrows())).norm();
        if dev > T::tolerance(1e-10) {
            return Err(Error::NotUnitary(to_f64(dev)));
        }
        Ok(UnitaryOp { matrix })
    }

    pub fn from_pauli(o: &PauliOperator<T>) -> Result<Self> {
        Self::new(o.to_matrix())
    }

    pub fn from_phased(p: &PhasedPauli) -> Self {
        UnitaryOp { matrix: p.to_matrix() }
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Unitary `U` on `m` ancillas plus the system with `(<0^m| ⊗ I) U (|0^m> ⊗ I) = O / alpha`.
/// Ancillas are the most significant qubits.
#[derive(Debug, Clone)]
pub struct BlockEncoding<T: Real = f64> {
    unitary: DMatrix<Complex<T>>,
    alpha: T,
    m: usize,
    system_dim: usize,
}

/// One-ancilla encoding `[[B, sqrt(I - B^2)], [sqrt(I - B^2), -B]]` with `B = O/alpha`.
pub fn embed_block<T: Real>(o: &PauliOperator<T>, alpha: T) -> Result<BlockEncoding<T>> {
    embed_block_matrix(o.to_matrix(), alpha)
}

/// [`embed_block`] for a Hermitian matrix.
pub fn embed_block_matrix<T: Real>(o: DMatrix<Complex<T>>, alpha: T) -> Result<BlockEncoding<T>> {
    if !(alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!("alpha = {} must be positive", alpha)));
    }
    let n = o.nrows();
    let dev = (&o - o.adjoint()).norm();
    if dev > T::tolerance(1e-12) * o.norm().max(T::one()) {
        return Err(Error::NotHermitian(to_f64(dev)));
    }
    let (eigenvalues, v) = hermitian_eigen(&o);
    let norm = eigenvalues.iter().fold(T::zero(), |a, l| a.max(l.abs()));
    if norm > alpha * (T::one() + T::tolerance(1e-12)) {
        return Err(Error::NormExceedsAlpha { norm: to_f64(norm), alpha: to_f64(alpha) });
    }
    let b = o.unscale(alpha);
    let root = DVector::from_iterator(
        n,
        eigenvalues.iter().map(|&l| {
            let r = l / alpha;
            Complex::new((T::one() - r * r).max(T::zero()).sqrt(), T::zero())
        }),
    );
    let s = &v * DMatrix::from_diagonal(&root) * v.adjoint();
    let mut u = DMatrix::zeros(2 * n, 2 * n);
    u.view_mut((0, 0), (n, n)).copy_from(&b);
    u.view_mut((0, n), (n, n)).copy_from(&s);
    u.view_mut((n, 0), (n, n)).copy_from(&s);
    u.view_mut((n, n), (n, n)).copy_from(&(-b));
    Ok(BlockEncoding { unitary: u, alpha, m: 1, system_dim: n })
}

impl<T: Real> BlockEncoding<T> {
    pub fn unitary(&self) -> &DMatrix<Complex<T>> {
        &self.unitary
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn ancillas(&self) -> usize {
        self.m
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    /// The encoded block `alpha (<0^m| ⊗ I) U (|0^m> ⊗ I)`.
    pub fn observable(&self) -> DMatrix<Complex<T>> {
        self.unitary.view((0, 0), (self.system_dim, self.system_dim)).scale(self.alpha)
    }
}

/// First control gate of a block-encoded test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FirstGate<T: Real = f64> {
    Hadamard,
    /// `G(a, sqrt(1 - a^2), theta)` with `a` in `(0, 1)`.
    Generalized { a: T },
}

impl<T: Real> FirstGate<T> {
    /// `a = 1 / sqrt(alpha + 1)`.
    pub fn default_for(alpha: T) -> Self {
        FirstGate::Generalized { a: T::one() / (alpha + T::one()).sqrt() }
    }
}

/// Outcome law of a standard Hadamard test of `U` on `|phi>`:
/// `X = +1 / -1` on outcome `0 / 1`, `Y = -1 / +1` on outcome `0 / 1`.
fn hadamard_test<T: Real>(phi: &DVector<Complex<T>>, image: &DVector<Complex<T>>) -> ShotDistribution<T> {
    let run = |w: PhaseGate| {
        let mut reg = Register::prepare(&hadamard_gate(), phi);
        reg.controlled_image(image);
        reg.gate(&phase_gate(w));
        reg.gate(&hadamard_gate());
        (reg.probability(0, phi.len()), reg.probability(1, phi.len()))
    };
    let (p0, p1) = run(PhaseGate::I);
    let (q0, q1) = run(PhaseGate::S);
    ShotDistribution {
        real: Outcomes::new(&[(T::one(), p0), (-T::one(), p1)]),
        imag: Outcomes::new(&[(-T::one(), q0), (T::one(), q1)]),
    }
}

/// Exhaustive law of the block-encoded test for `<phi|e^{-iH t2} O e^{-iH t1}|phi>`.
pub fn block_distribution<T: Real>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    b: &BlockEncoding<T>,
    t1: T,
    t2: T,
    gate: FirstGate<T>,
) -> Result<ShotDistribution<T>> {
    let n = s.dim();
    if b.system_dim != n || phi.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.system_dim.min(phi.dim()) });
    }
    let right = block_right(s, phi, b, t1);
    Ok(block_from_right(s, phi, b, &right, t2, gate))
}

/// `U (|0^m> ⊗ e^{-iH t1} |phi>)`.
fn block_right<T: Real>(s: &SpectralData<T>, phi: &StateVector<T>, b: &BlockEncoding<T>, t1: T) -> DVector<Complex<T>> {
    let n = s.dim();
    let mut v = DVector::zeros(n << b.m);
    v.rows_mut(0, n).copy_from(&s.evolve_vector(phi.amplitudes(), t1));
    &b.unitary * v
}

fn block_from_right<T: Real>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    b: &BlockEncoding<T>,
    right: &DVector<Complex<T>>,
    t2: T,
    gate: FirstGate<T>,
) -> ShotDistribution<T> {
    let n = s.dim();
    let blocks = 1usize << b.m;
    let mut evolved = right.clone();
    for k in 0..blocks {
        let part = s.evolve_vector(&right.rows(k * n, n).into_owned(), t2);
        evolved.rows_mut(k * n, n).copy_from(&part);
    }
    let mut start = DVector::zeros(n * blocks);
    start.rows_mut(0, n).copy_from(phi.amplitudes());
    let run = |first: Gate<T>, w: PhaseGate, last: Gate<T>| {
        let mut reg = Register::prepare(&first, &start);
        reg.controlled_image(&evolved);
        reg.gate(&phase_gate(w));
        reg.gate(&last);
        (reg.probability(0, n), reg.probability(1, n))
    };
    let alpha = b.alpha;
    match gate {
        FirstGate::Hadamard => {
            let h = hadamard_gate();
            let (p0, p1) = run(h, PhaseGate::I, h);
            let (q0, q1) = run(h, PhaseGate::S, h);
            ShotDistribution {
                real: Outcomes::new(&[(alpha, p0), (-alpha, p1), (T::zero(), T::one() - p0 - p1)]),
                imag: Outcomes::new(&[(-alpha, q0), (alpha, q1), (T::zero(), T::one() - q0 - q1)]),
            }
        }
        FirstGate::Generalized { a } => {
            let bb = (T::one() - a * a).sqrt();
            let value = alpha / (lit::<T>(2.0) * a * bb);
            let first = |theta: T| general_gate(Complex::new(a, T::zero()), Complex::new(bb, T::zero()), theta);
            // p = q = 1/sqrt(2), rho = pi: the final gate is the Hadamard.
            let last = hadamard_gate();
            let (p0, p1) = run(first(T::zero()), PhaseGate::I, last);
            let (q0, q1) = run(first(-T::frac_pi_2()), PhaseGate::I, last);
            ShotDistribution {
                real: Outcomes::new(&[(-value, p0), (value, p1), (T::zero(), T::one() - p0 - p1)]),
                imag: Outcomes::new(&[(-value, q0), (value, q1), (T::zero(), T::one() - q0 - q1)]),
            }
        }
    }
}

fn check_dims<T: Real>(s: &SpectralData<T>, phi: &StateVector<T>, o: Option<&UnitaryOp<T>>) -> Result<()> {
    if phi.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: phi.dim() });
    }
    if let Some(o) = o {
        if o.dim() != s.dim() {
            return Err(Error::DimensionMismatch { expected: s.dim(), found: o.dim() });
        }
    }
    Ok(())
}

/// `<phi|e^{-i j tau H}|phi>` by eigen-sum.
pub fn exact_expectation_1d<T: Real>(s: &SpectralData<T>, phi: &StateVector<T>, j: i64) -> Complex<T> {
    let jt = lit::<T>(j as f64) * s.tau();
    s.overlaps(phi)
        .iter()
        .zip(s.eigenvalues())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (&p, &l)| acc + cis(-jt * l) * p)
}

/// Exhaustive law for `<phi|e^{-i j tau H}|phi>`.
pub fn distribution_1d<T: Real>(s: &SpectralData<T>, phi: &StateVector<T>, j: i64) -> ShotDistribution<T> {
    let t = lit::<T>(j as f64) * s.tau();
    hadamard_test(phi.amplitudes(), &s.evolve_vector(phi.amplitudes(), t))
}

/// Exhaustive law for `<phi|O e^{-i j tau H}|phi>`.
pub fn distribution_o<T: Real>(s: &SpectralData<T>, phi: &StateVector<T>, o: &UnitaryOp<T>, j: i64) -> ShotDistribution<T> {
    let t = lit::<T>(j as f64) * s.tau();
    hadamard_test(phi.amplitudes(), &(o.matrix() * s.evolve_vector(phi.amplitudes(), t)))
}

/// Exhaustive law for `<phi|e^{-i j tau H} O e^{-i j' tau H}|phi>`.
pub fn distribution_2d<T: Real>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    o: &UnitaryOp<T>,
    j: i64,
    jp: i64,
) -> ShotDistribution<T> {
    let (t, tp) = (lit::<T>(j as f64) * s.tau(), lit::<T>(jp as f64) * s.tau());
    let v = phi.amplitudes();
    hadamard_test(v, &s.evolve_vector(&(o.matrix() * s.evolve_vector(v, tp)), t))
}

pub fn sample_1d<T: Real, R: Rng + ?Sized>(s: &SpectralData<T>, phi: &StateVector<T>, j: i64, rng: &mut R) -> Result<Shot<T>> {
    check_dims(s, phi, None)?;
    let z = distribution_1d(s, phi, j).sample(rng);
    Ok(Shot { z, index: ShotIndex::Single(j), runs: Runs::Both })
}

/// Hadamard test with the observable applied after the evolution. `O` must
/// commute with `H` for the result to be an O-weighted ACDF sample.
pub fn sample_o<T: Real, R: Rng + ?Sized>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    o: &UnitaryOp<T>,
    j: i64,
    rng: &mut R,
) -> Result<Shot<T>> {
    check_dims(s, phi, Some(o))?;
    let z = distribution_o(s, phi, o, j).sample(rng);
    Ok(Shot { z, index: ShotIndex::Single(j), runs: Runs::Both })
}

pub fn sample_2d<T: Real, R: Rng + ?Sized>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    o: &UnitaryOp<T>,
    j: i64,
    jp: i64,
    rng: &mut R,
) -> Result<Shot<T>> {
    check_dims(s, phi, Some(o))?;
    let z = distribution_2d(s, phi, o, j, jp).sample(rng);
    Ok(Shot { z, index: ShotIndex::Pair(j, jp), runs: Runs::Both })
}

/// One run of the block-encoded test: `w = I` yields `X`, `w = S` yields `i Y`.
pub fn sample_block<T: Real, R: Rng + ?Sized>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    b: &BlockEncoding<T>,
    t1: T,
    t2: T,
    w: PhaseGate,
    rng: &mut R,
) -> Result<Shot<T>> {
    let dist = block_distribution(s, phi, b, t1, t2, FirstGate::Hadamard)?;
    Ok(one_run(dist, t1, t2, w, rng))
}

/// One run of the generalized-gate test with first gate `G(a, sqrt(1-a^2), theta)`.
/// `w = I` uses `theta = 0` (real part); `w = S` uses `theta = -pi/2` (imaginary part).
pub fn sample_generalized<T: Real, R: Rng + ?Sized>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    b: &BlockEncoding<T>,
    t1: T,
    t2: T,
    a: T,
    w: PhaseGate,
    rng: &mut R,
) -> Result<Shot<T>> {
    if !(a > T::zero() && a < T::one()) {
        return Err(Error::InvalidParameter(format!("a = {} not in (0, 1)", a)));
    }
    let dist = block_distribution(s, phi, b, t1, t2, FirstGate::Generalized { a })?;
    Ok(one_run(dist, t1, t2, w, rng))
}

fn one_run<T: Real, R: Rng + ?Sized>(dist: ShotDistribution<T>, t1: T, t2: T, w: PhaseGate, rng: &mut R) -> Shot<T> {
    let (z, runs) = match w {
        PhaseGate::I => (Complex::new(dist.real.sample(rng), T::zero()), Runs::Real),
        PhaseGate::S => (Complex::new(T::zero(), dist.imag.sample(rng)), Runs::Imaginary),
    };
    Shot { z, index: ShotIndex::Times(t1, t2), runs }
}

/// Post-selection success probability `(1 + alpha^{-2} <phi|e^{iHt1} O^2 e^{-iHt1}|phi>) / 2`.
pub fn block_success_probability<T: Real>(s: &SpectralData<T>, phi: &StateVector<T>, b: &BlockEncoding<T>, t1: T) -> T {
    let v = b.observable() * s.evolve_vector(phi.amplitudes(), t1);
    (T::one() + v.norm_squared() / (b.alpha * b.alpha)) / lit(2.0)
}

/// Closed-form variance of the generalized-gate real-part estimator.
pub fn generalized_variance<T: Real>(s: &SpectralData<T>, phi: &StateVector<T>, b: &BlockEncoding<T>, t1: T, t2: T, a: T) -> T {
    let alpha = b.alpha;
    let b2 = T::one() - a * a;
    let v = b.observable() * s.evolve_vector(phi.amplitudes(), t1);
    let target = phi.amplitudes().dotc(&s.evolve_vector(&v, t2)).re;
    alpha * alpha / (lit::<T>(4.0) * a * a * b2) * (a * a + b2 / (alpha * alpha) * v.norm_squared()) - target * target
}

/// Circuit family drawn from by [`ShotSampler`].
#[derive(Debug, Clone, Copy)]
pub enum Circuit<'a, T: Real = f64> {
    /// `<phi|e^{-i j tau H}|phi>`.
    Plain,
    /// `<phi|O e^{-i j tau H}|phi>`.
    Observable(&'a UnitaryOp<T>),
    /// `<phi|e^{-i j tau H} O e^{-i j' tau H}|phi>`.
    TwoTime(&'a UnitaryOp<T>),
    /// Block-encoded two-time test with `t2 = j tau`, `t1 = j' tau`.
    Block(&'a BlockEncoding<T>, FirstGate<T>),
}

impl<'a, T: Real> Circuit<'a, T> {
    pub fn is_two_time(&self) -> bool {
        matches!(self, Circuit::TwoTime(_) | Circuit::Block(..))
    }
}

/// Memoizing sampler: each `(j, j')` law is simulated once, then reused.
pub struct ShotSampler<'a, T: Real = f64> {
    spectral: &'a SpectralData<T>,
    phi: &'a StateVector<T>,
    circuit: Circuit<'a, T>,
    laws: HashMap<(i64, i64), ShotDistribution<T>>,
    right: HashMap<i64, DVector<Complex<T>>>,
}

impl<'a, T: Real> ShotSampler<'a, T> {
    pub fn new(spectral: &'a SpectralData<T>, phi: &'a StateVector<T>, circuit: Circuit<'a, T>) -> Result<Self> {
        let o = match circuit {
            Circuit::Observable(o) | Circuit::TwoTime(o) => Some(o),
            _ => None,
        };
        check_dims(spectral, phi, o)?;
        if let Circuit::Block(b, _) = circuit {
            if b.system_dim != spectral.dim() {
                return Err(Error::DimensionMismatch { expected: spectral.dim(), found: b.system_dim });
            }
        }
        Ok(ShotSampler { spectral, phi, circuit, laws: HashMap::new(), right: HashMap::new() })
    }

    pub fn circuit(&self) -> Circuit<'a, T> {
        self.circuit
    }

    pub fn tau(&self) -> T {
        self.spectral.tau()
    }

    /// Law of the shot at `(j, j')`; `j'` is ignored by one-time circuits.
    pub fn distribution(&mut self, j: i64, jp: i64) -> ShotDistribution<T> {
        let jp = if self.circuit.is_two_time() { jp } else { 0 };
        if let Some(d) = self.laws.get(&(j, jp)) {
            return *d;
        }
        let (s, phi) = (self.spectral, self.phi);
        let tau = s.tau();
        let d = match self.circuit {
            Circuit::Plain => distribution_1d(s, phi, j),
            Circuit::Observable(o) => distribution_o(s, phi, o, j),
            Circuit::TwoTime(o) => {
                let right = self.right.entry(jp).or_insert_with(|| o.matrix() * s.evolve_vector(phi.amplitudes(), lit::<T>(jp as f64) * tau));
                hadamard_test(phi.amplitudes(), &s.evolve_vector(right, lit::<T>(j as f64) * tau))
            }
            Circuit::Block(b, gate) => {
                let right = self.right.entry(jp).or_insert_with(|| block_right(s, phi, b, lit::<T>(jp as f64) * tau)).clone();
                block_from_right(s, phi, b, &right, lit::<T>(j as f64) * tau, gate)
            }
        };
        self.laws.insert((j, jp), d);
        d
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, j: i64, jp: i64, rng: &mut R) -> Shot<T> {
        let z = self.distribution(j, jp).sample(rng);
        let index = if self.circuit.is_two_time() { ShotIndex::Pair(j, jp) } else { ShotIndex::Single(j) };
        Shot { z, index, runs: Runs::Both }
    }
}

/// Exact target `<phi|U(j, j')|phi>` of a circuit, by dense linear algebra.
pub fn circuit_target<T: Real>(s: &SpectralData<T>, phi: &StateVector<T>, circuit: Circuit<'_, T>, j: i64, jp: i64) -> Complex<T> {
    let tau = s.tau();
    let (t, tp) = (lit::<T>(j as f64) * tau, lit::<T>(jp as f64) * tau);
    let v = phi.amplitudes();
    let img = match circuit {
        Circuit::Plain => s.evolve_vector(v, t),
        Circuit::Observable(o) => o.matrix() * s.evolve_vector(v, t),
        Circuit::TwoTime(o) => s.evolve_vector(&(o.matrix() * s.evolve_vector(v, tp)), t),
        Circuit::Block(b, _) => s.evolve_vector(&(b.observable() * s.evolve_vector(v, tp)), t),
    };
    v.dotc(&img)
}
