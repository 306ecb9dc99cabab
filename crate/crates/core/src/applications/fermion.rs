//! Majorana operators under Jordan-Wigner and one-body reduced density matrices.

use nalgebra::{Complex, DMatrix};
use rand::Rng;

use crate::error::{Error, Result};
use crate::estimators::{estimate_gsprop_general, EstimateReport, EstimationConfig};
use crate::hadamard::UnitaryOp;
use crate::pauli::{i_power, Pauli, PauliOperator, PauliString, PhasedPauli};
use crate::scalar::{lit, Real};
use crate::spectral::{SpectralData, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `gamma_{2p}`.
    Even,
    /// `gamma_{2p+1}`.
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MajoranaIndex {
    pub mode: usize,
    pub parity: Parity,
}

impl MajoranaIndex {
    pub fn even(mode: usize) -> Self {
        MajoranaIndex { mode, parity: Parity::Even }
    }

    pub fn odd(mode: usize) -> Self {
        MajoranaIndex { mode, parity: Parity::Odd }
    }

    /// Flat index `2p` or `2p + 1`.
    pub fn flat(&self) -> usize {
        2 * self.mode + usize::from(self.parity == Parity::Odd)
    }

    pub fn from_flat(k: usize) -> Self {
        MajoranaIndex { mode: k / 2, parity: if k % 2 == 0 { Parity::Even } else { Parity::Odd } }
    }
}

/// `gamma_{2p} = Z^p X I...`, `gamma_{2p+1} = Z^p Y I...`.
pub fn majorana_string(idx: MajoranaIndex, n_modes: usize) -> Result<PauliString> {
    if idx.mode >= n_modes {
        return Err(Error::InvalidParameter(format!("mode {} out of range for {} modes", idx.mode, n_modes)));
    }
    let mut ops = vec![Pauli::I; n_modes];
    for op in ops.iter_mut().take(idx.mode) {
        *op = Pauli::Z;
    }
    ops[idx.mode] = match idx.parity {
        Parity::Even => Pauli::X,
        Parity::Odd => Pauli::Y,
    };
    Ok(PauliString::new(ops))
}

/// `gamma_a gamma_b` as one phased Pauli string.
pub fn majorana_product(a: usize, b: usize, n_modes: usize) -> Result<PhasedPauli> {
    let ga = PhasedPauli::new(0, majorana_string(MajoranaIndex::from_flat(a), n_modes)?);
    let gb = PhasedPauli::new(0, majorana_string(MajoranaIndex::from_flat(b), n_modes)?);
    Ok(ga.mul(&gb))
}

/// Terms `(coefficient, a, b)` of `a_p^† a_q = 1/4 sum coefficient gamma_a gamma_b`.
fn one_body_terms<T: Real>(p: usize, q: usize) -> [(Complex<T>, usize, usize); 4] {
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    [(one, 2 * p, 2 * q), (-i, 2 * p + 1, 2 * q), (i, 2 * p, 2 * q + 1), (one, 2 * p + 1, 2 * q + 1)]
}

/// Dense `a_p^† a_q`.
pub fn one_body_matrix<T: Real>(p: usize, q: usize, n_modes: usize) -> Result<DMatrix<Complex<T>>> {
    let dim = 1usize << n_modes;
    let mut m = DMatrix::zeros(dim, dim);
    for (c, a, b) in one_body_terms::<T>(p, q) {
        m += majorana_product(a, b, n_modes)?.to_matrix::<T>() * (c * lit::<T>(0.25));
    }
    Ok(m)
}

/// Hermitian part `(a_p^† a_q + a_q^† a_p) / 2` as a real Pauli sum; for `p = q`
/// this is the number operator.
pub fn one_body_hermitian<T: Real>(p: usize, q: usize, n_modes: usize) -> Result<PauliOperator<T>> {
    let mut acc: Vec<(Complex<T>, PauliString)> = Vec::new();
    for (x, y) in [(p, q), (q, p)] {
        for (c, a, b) in one_body_terms::<T>(x, y) {
            let prod = majorana_product(a, b, n_modes)?;
            acc.push((c * i_power::<T>(prod.phase) * lit::<T>(0.125), prod.string));
        }
    }
    let mut merged: Vec<(Complex<T>, PauliString)> = Vec::new();
    for (c, s) in acc {
        match merged.iter_mut().find(|(_, t)| *t == s) {
            Some(e) => e.0 += c,
            None => merged.push((c, s)),
        }
    }
    if merged.iter().any(|(c, _)| c.im.abs() > T::tolerance(1e-12)) {
        return Err(Error::NotHermitian(0.0));
    }
    PauliOperator::from_terms(merged.into_iter().map(|(c, s)| (c.re, s)).collect())
}

/// Exact `<psi|a_p^† a_q|psi>`.
pub fn exact_1rdm_entry<T: Real>(psi: &StateVector<T>, p: usize, q: usize) -> Result<Complex<T>> {
    let n = psi.dim().trailing_zeros() as usize;
    Ok(psi.expectation(&one_body_matrix::<T>(p, q, n)?))
}

/// Estimated `D_{p,q}` with the reports of its Majorana-product estimates.
#[derive(Debug, Clone)]
pub struct RdmEstimate<T: Real = f64> {
    pub value: Complex<T>,
    pub terms: Vec<EstimateReport<T>>,
}

impl<T: Real> RdmEstimate<T> {
    pub fn shots_used(&self) -> u64 {
        self.terms.iter().map(|t| t.shots_used).sum()
    }
}

/// `D_{p,q} = <psi_0|a_p^† a_q|psi_0>` from the four Majorana products. Each
/// product with `a != b` is estimated to accuracy `epsilon` with failure
/// probability `nu / (number of estimated products)`; `gamma_a^2 = I` is exact.
pub fn estimate_1rdm_entry<T: Real, R: Rng + ?Sized>(
    s: &SpectralData<T>,
    phi: &StateVector<T>,
    p: usize,
    q: usize,
    cfg: &EstimationConfig<T>,
    rng: &mut R,
) -> Result<RdmEstimate<T>> {
    let n = s.dim().trailing_zeros() as usize;
    if 1usize << n != s.dim() || p >= n || q >= n {
        return Err(Error::InvalidParameter(format!("entry ({}, {}) out of range for {} modes", p, q, n)));
    }
    let terms = one_body_terms::<T>(p, q);
    let estimated = terms.iter().filter(|(_, a, b)| a != b).count();
    let term_cfg = EstimationConfig { nu: cfg.nu / lit(estimated.max(1) as f64), ..*cfg };
    let mut value = Complex::new(T::zero(), T::zero());
    let mut reports = Vec::new();
    for (c, a, b) in terms {
        let expectation = if a == b {
            Complex::new(T::one(), T::zero())
        } else {
            let o = UnitaryOp::from_phased(&majorana_product(a, b, n)?);
            let r = estimate_gsprop_general(s, phi, &o, &term_cfg, rng)?;
            let v = r.value;
            reports.push(r);
            v
        };
        value += c * expectation;
    }
    Ok(RdmEstimate { value: value * lit::<T>(0.25), terms: reports })
}
