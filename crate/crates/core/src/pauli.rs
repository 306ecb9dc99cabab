//! Pauli strings and real linear combinations of them.
//!
//! Qubit 0 is the leftmost letter of a word and the most significant bit of a
//! basis index, so `"XI"` is `X ⊗ I`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::MAX_QUBITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// `self * other = i^k * p`, returned as `(k, p)`.
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn signs(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Tensor product of single-qubit Paulis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        PauliString { ops }
    }

    pub fn identity(n: usize) -> Self {
        PauliString { ops: vec![Pauli::I; n] }
    }

    /// Parses a word such as `"ZZI"`.
    pub fn parse(word: &str) -> Result<Self> {
        let ops = word
            .chars()
            .map(|c| Pauli::from_char(c.to_ascii_uppercase()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidPauliWord(word.to_string()))?;
        if ops.is_empty() {
            return Err(Error::InvalidPauliWord(word.to_string()));
        }
        Ok(PauliString { ops })
    }

    /// Single non-identity factor `p` on qubit `q` of `n`.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut ops = vec![Pauli::I; n];
        ops[q] = p;
        PauliString { ops }
    }

    pub fn num_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&p| p == Pauli::I)
    }

    fn masks(&self) -> (usize, usize, u32) {
        let n = self.ops.len();
        let (mut flip, mut sign, mut ys) = (0usize, 0usize, 0u32);
        for (q, &p) in self.ops.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            if p.flips() {
                flip |= bit;
            }
            if p.signs() {
                sign |= bit;
            }
            if p == Pauli::Y {
                ys += 1;
            }
        }
        (flip, sign, ys)
    }

    /// Product `self * other = i^k * s`, returned as `(k, s)`.
    pub fn mul(&self, other: &PauliString) -> (u8, PauliString) {
        assert_eq!(self.num_qubits(), other.num_qubits());
        let mut k = 0u8;
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(&a, &b)| {
                let (kk, p) = a.mul(b);
                k = (k + kk) % 4;
                p
            })
            .collect();
        (k, PauliString { ops })
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Accumulates `coeff * P v` into `out`.
    pub fn apply_add<T: Real>(&self, coeff: Complex<T>, v: &[Complex<T>], out: &mut [Complex<T>]) {
        let (flip, sign, ys) = self.masks();
        let c = coeff * i_power::<T>(ys as u8);
        for (b, &amp) in v.iter().enumerate() {
            let s = if (b & sign).count_ones() % 2 == 0 { c } else { -c };
            out[b ^ flip] += s * amp;
        }
    }

    pub fn apply<T: Real>(&self, v: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        let mut out = DVector::zeros(v.len());
        self.apply_add(Complex::new(T::one(), T::zero()), v.as_slice(), out.as_mut_slice());
        out
    }

    pub fn to_matrix<T: Real>(&self) -> DMatrix<Complex<T>> {
        let dim = 1usize << self.num_qubits();
        let (flip, sign, ys) = self.masks();
        let c = i_power::<T>(ys as u8);
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            m[(b ^ flip, b)] = if (b & sign).count_ones() % 2 == 0 { c } else { -c };
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        for p in &self.ops {
            write!(f, "{}", p)?;
        }
        Ok(())
    }
}

/// `i^k`.
pub fn i_power<T: Real>(k: u8) -> Complex<T> {
    match k % 4 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// A Pauli string times a phase `i^k`; always unitary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasedPauli {
    pub phase: u8,
    pub string: PauliString,
}

impl PhasedPauli {
    pub fn new(phase: u8, string: PauliString) -> Self {
        PhasedPauli { phase: phase % 4, string }
    }

    pub fn mul(&self, other: &PhasedPauli) -> PhasedPauli {
        let (k, s) = self.string.mul(&other.string);
        PhasedPauli::new(self.phase + other.phase + k, s)
    }

    pub fn to_matrix<T: Real>(&self) -> DMatrix<Complex<T>> {
        self.string.to_matrix::<T>() * i_power::<T>(self.phase)
    }
}

impl fmt::Display for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let p = ["", "i", "-", "-i"][self.phase as usize];
        write!(f, "{}{}", p, self.string)
    }
}

/// Real linear combination of Pauli strings on a fixed number of qubits.
/// Duplicate strings are merged; terms are kept in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliOperator<T: Real = f64> {
    n: usize,
    terms: Vec<(T, PauliString)>,
}

/// Builds an operator from `(coefficient, word)` pairs.
pub fn build_operator<T: Real>(terms: &[(T, &str)]) -> Result<PauliOperator<T>> {
    let parsed = terms
        .iter()
        .map(|&(c, w)| PauliString::parse(w).map(|s| (c, s)))
        .collect::<Result<Vec<_>>>()?;
    PauliOperator::from_terms(parsed)
}

impl<T: Real> PauliOperator<T> {
    pub fn from_terms(terms: Vec<(T, PauliString)>) -> Result<Self> {
        let n = terms.first().ok_or(Error::EmptyOperator)?.1.num_qubits();
        let mut merged: BTreeMap<PauliString, T> = BTreeMap::new();
        for (c, s) in terms {
            if s.num_qubits() != n {
                return Err(Error::InconsistentQubits { expected: n, found: s.num_qubits() });
            }
            if !c.is_finite() {
                return Err(Error::NonFiniteCoefficient(s.to_string()));
            }
            *merged.entry(s).or_insert_with(T::zero) += c;
        }
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        Ok(PauliOperator { n, terms: merged.into_iter().map(|(s, c)| (c, s)).collect() })
    }

    pub fn identity(n: usize) -> Self {
        PauliOperator { n, terms: vec![(T::one(), PauliString::identity(n))] }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn terms(&self) -> &[(T, PauliString)] {
        &self.terms
    }

    /// `sum |c|`, an upper bound on the operator norm.
    pub fn one_norm(&self) -> T {
        self.terms.iter().fold(T::zero(), |acc, (c, _)| acc + c.abs())
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &PauliOperator<T>) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, sa) in &self.terms {
            for (b, sb) in &other.terms {
                let mut ops = sa.ops().to_vec();
                ops.extend_from_slice(sb.ops());
                terms.push((*a * *b, PauliString::new(ops)));
            }
        }
        PauliOperator::from_terms(terms)
    }

    pub fn apply(&self, v: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        let mut out = DVector::zeros(v.len());
        for (c, s) in &self.terms {
            s.apply_add(Complex::new(*c, T::zero()), v.as_slice(), out.as_mut_slice());
        }
        out
    }

    pub fn to_matrix(&self) -> DMatrix<Complex<T>> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (c, s) in &self.terms {
            m += s.to_matrix::<T>() * Complex::new(*c, T::zero());
        }
        m
    }

    /// Scales every coefficient by `k`.
    pub fn scaled(&self, k: T) -> Self {
        PauliOperator { n: self.n, terms: self.terms.iter().map(|(c, s)| (*c * k, s.clone())).collect() }
    }

    /// True when the operator is a single string with coefficient ±1.
    pub fn is_signed_string(&self) -> bool {
        self.terms.len() == 1 && (self.terms[0].0.abs() - T::one()).abs() <= lit(1e-12)
    }
}

impl<T: Real> fmt::Display for PauliOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        for (i, (c, s)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{}", c, s)?;
        }
        Ok(())
    }
}
