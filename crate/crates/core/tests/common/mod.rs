//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use gspe::{build_operator, PauliOperator, SpectralData, StateVector};
use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C = Complex<f64>;
pub type Mat = DMatrix<C>;

pub fn c(x: f64) -> C {
    Complex::new(x, 0.0)
}

/// Open-chain transverse-field Ising model `-J sum ZZ - h sum X`.
pub fn tfim(n: usize, j: f64, h: f64) -> PauliOperator<f64> {
    let mut words: Vec<(f64, String)> = Vec::new();
    for q in 0..n - 1 {
        let mut w = vec!['I'; n];
        w[q] = 'Z';
        w[q + 1] = 'Z';
        words.push((-j, w.into_iter().collect()));
    }
    for q in 0..n {
        let mut w = vec!['I'; n];
        w[q] = 'X';
        words.push((-h, w.into_iter().collect()));
    }
    let terms: Vec<(f64, &str)> = words.iter().map(|(c, w)| (*c, w.as_str())).collect();
    build_operator(&terms).unwrap()
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations on its real
/// symmetric embedding `[[Re, -Im], [Im, Re]]` (every eigenvalue appears twice).
pub fn jacobi_eigenvalues(h: &Mat) -> Vec<f64> {
    let n = h.nrows();
    let m = 2 * n;
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..m {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..m).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev.into_iter().step_by(2).collect()
}

/// `e^{-iHt}` by scaling and squaring of a Taylor series.
pub fn expm_i(h: &Mat, t: f64) -> Mat {
    let n = h.nrows();
    let a = h * Complex::new(0.0, -t);
    let norm = a.iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
    let s = (norm.log2().ceil().max(0.0) as i32) + 1;
    let scaled = &a / c(2f64.powi(s));
    let mut term = Mat::identity(n, n);
    let mut sum = Mat::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled / c(k as f64);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

pub fn random_state<R: Rng>(dim: usize, rng: &mut R) -> StateVector<f64> {
    StateVector::random(dim, rng)
}

pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> Mat {
    let g = Mat::from_fn(dim, dim, |_, _| Complex::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)));
    (&g + g.adjoint()) * c(0.5)
}

/// Random Hermitian matrix rescaled to spectral norm `norm`.
pub fn random_hermitian_norm<R: Rng>(dim: usize, norm: f64, rng: &mut R) -> Mat {
    let h = random_hermitian(dim, rng);
    let ev = jacobi_eigenvalues(&h);
    let max = ev.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    h * c(norm / max)
}

/// Random unitary from the QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> Mat {
    let g = Mat::from_fn(dim, dim, |_, _| Complex::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)));
    g.qr().q()
}

pub fn random_spectrum<R: Rng>(dim: usize, rng: &mut R) -> SpectralData<f64> {
    SpectralData::from_hermitian(random_hermitian(dim, rng), Some(1e-8)).unwrap()
}

pub fn dense_h(s: &SpectralData<f64>) -> Mat {
    let v = s.eigenvectors();
    let d = Mat::from_diagonal(&DVector::from_iterator(s.dim(), s.eigenvalues().iter().map(|&l| c(l))));
    v * d * v.adjoint()
}

/// `<phi|A|phi>`-style bilinear form `<u|A|v>`.
pub fn sandwich(u: &DVector<C>, a: &Mat, v: &DVector<C>) -> C {
    u.dotc(&(a * v))
}

/// Fraction of `hits` out of `runs` compared against `1 - nu - 3 sigma`.
pub fn success_floor(nu: f64, runs: usize) -> f64 {
    1.0 - nu - 3.0 * (nu * (1.0 - nu) / runs as f64).sqrt()
}
