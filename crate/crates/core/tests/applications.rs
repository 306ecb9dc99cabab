mod common;

use common::*;
use gspe::applications::*;
use gspe::estimators::EstimationConfig;
use gspe::{build_operator, Error, SpectralData, StateVector};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sorted_eigs(m: &Mat) -> Vec<f64> {
    let mut l: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    l.sort_by(|a, b| a.partial_cmp(b).unwrap());
    l
}

fn smallest_singular(a: &Mat) -> f64 {
    a.clone().svd(false, false).singular_values.iter().fold(f64::INFINITY, |m, &s| m.min(s))
}

fn diag_system(d: &[f64], b: &[f64], kappa: f64) -> LinearSystemInstance<f64> {
    let rows: Vec<Vec<f64>> = (0..d.len()).map(|i| (0..d.len()).map(|j| if i == j { d[i] } else { 0.0 }).collect()).collect();
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    LinearSystemInstance::from_real(&refs, b, kappa).unwrap()
}

#[test]
fn hg_examples() {
    let id = diag_system(&[1.0, 1.0], &[1.0, 0.0], 1.0);
    let h = build_hg(id.a(), id.b()).unwrap();
    assert!((sorted_eigs(&h)[0]).abs() < 1e-12 && (sorted_eigs(&h)[1] - 1.0).abs() < 1e-12);
    let d = diag_system(&[1.0, 0.5], &[1.0, 1.0], 2.0);
    let x = d.solution().unwrap();
    let r = 1.0 / 5f64.sqrt();
    assert!((x.amplitudes() - DVector::from_vec(vec![c(r), c(2.0 * r)])).norm() < 1e-12);
    assert!((build_hg(d.a(), d.b()).unwrap() * x.amplitudes()).norm() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let dim = rng.gen_range(2..7);
        let kappa = rng.gen_range(1.0..3.0);
        let inst = LinearSystemInstance::<f64>::random(dim, kappa, &mut rng).unwrap();
        let h = build_hg(inst.a(), inst.b()).unwrap();
        let l = sorted_eigs(&h);
        assert!(l[0].abs() < 1e-10);
        let x = inst.solution().unwrap();
        assert!((&h * x.amplitudes()).norm() < 1e-10);
        let direct = inst.a().clone().try_inverse().unwrap() * inst.b();
        assert!((x.inner(&StateVector::normalize(direct).unwrap()).norm() - 1.0).abs() < 1e-10);
        assert!(l[1] >= smallest_singular(inst.a()).powi(2) - 1e-9);
    }
}

#[test]
fn gap_amplified_examples() {
    let id = diag_system(&[1.0, 1.0], &[1.0, 0.0], 1.0);
    let h = build_gap_amplified(id.a(), id.b(), 1.0).unwrap();
    let l = sorted_eigs(&h);
    assert_eq!(l.iter().filter(|x| x.abs() < 1e-10).count(), 2);
    let nonzero = l.iter().filter(|x| x.abs() > 1e-10).fold(f64::INFINITY, |m, x| m.min(x.abs()));
    assert!((nonzero - 1.0).abs() < 1e-10);

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let inst = LinearSystemInstance::<f64>::random(rng.gen_range(2..5), rng.gen_range(1.0..4.0), &mut rng).unwrap();
        let s: f64 = rng.gen();
        let h = build_gap_amplified(inst.a(), inst.b(), s).unwrap();
        let n = inst.dim();
        let (abar, bbar) = interpolated_system(inst.a(), inst.b(), s);
        let p = Mat::identity(2 * n, 2 * n) - &bbar * bbar.adjoint();
        let sq = &h * &h;
        assert!((sq.view((0, 0), (2 * n, 2 * n)) - abar.adjoint() * &p * &abar).norm() < 1e-10);
        // Spectrum symmetric about zero.
        let l = sorted_eigs(&h);
        for k in 0..l.len() {
            assert!((l[k] + l[l.len() - 1 - k]).abs() < 1e-9);
        }
        assert!((&h - h.adjoint()).norm() < 1e-12);
    }
}

#[test]
fn instance_validation() {
    assert!(matches!(
        LinearSystemInstance::<f64>::from_real(&[&[1.0, 0.0], &[0.0, 0.0]], &[1.0, 0.0], 2.0),
        Err(Error::Singular)
    ));
    assert!(LinearSystemInstance::<f64>::from_real(&[&[2.0, 0.0], &[0.0, 1.0]], &[1.0, 0.0], 2.0).is_err());
    assert!(LinearSystemInstance::<f64>::from_real(&[&[1.0, 0.0], &[0.0, 0.25]], &[1.0, 0.0], 2.0).is_err());
    assert!(LinearSystemInstance::<f64>::from_real(&[&[1.0, 0.0], &[0.0, 0.5]], &[1.0], 2.0).is_err());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let inst = LinearSystemInstance::<f64>::random(4, 5.0, &mut rng).unwrap();
    assert!((smallest_singular(inst.a()) - 0.2).abs() < 1e-10);
}

#[test]
fn jordan_wigner_examples() {
    let g = |k: usize| majorana_string(MajoranaIndex::from_flat(k), 3).unwrap().to_matrix::<f64>();
    for a in 0..6 {
        for b in 0..6 {
            let anti = &g(a) * &g(b) + &g(b) * &g(a);
            let expect = if a == b { Mat::identity(8, 8) * c(2.0) } else { Mat::zeros(8, 8) };
            assert!((anti - expect).norm() < 1e-12);
        }
    }
    assert_eq!(majorana_string(MajoranaIndex::even(1), 2).unwrap().to_string(), "ZX");
    let n0 = one_body_matrix::<f64>(0, 0, 1).unwrap();
    assert!((n0 - DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.0), c(1.0)]))).norm() < 1e-12);
    let hop = one_body_hermitian::<f64>(0, 1, 2).unwrap().to_matrix();
    let direct = (one_body_matrix::<f64>(0, 1, 2).unwrap() + one_body_matrix::<f64>(1, 0, 2).unwrap()) * c(0.5);
    assert!((hop - direct).norm() < 1e-12);
}

fn random_observable(n: usize, rng: &mut ChaCha8Rng) -> Mat {
    let m = random_hermitian(n, rng);
    let norm = sorted_eigs(&m).iter().fold(0.0f64, |a, l| a.max(l.abs()));
    m / c(norm)
}

#[test]
fn qlss_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = QlssConfig::new(0.05, 0.1, 0.7, InitialState::Oracle { overlap: 0.8 });
    // A = I: the solution is b.
    let id = diag_system(&[1.0, 1.0], &[0.6, 0.8], 1.0);
    let z = build_operator(&[(1.0f64, "Z")]).unwrap().to_matrix();
    let r = qlss_estimate(&id, &z, &cfg, &mut rng).unwrap();
    assert!((r.estimate.value.re - (0.36 - 0.64)).abs() <= 0.05);
    assert!((r.overlap - 0.8).abs() < 1e-12);
    let r = qlss_estimate(&id, &Mat::identity(2, 2), &cfg, &mut rng).unwrap();
    assert!((r.estimate.value.re - 1.0).abs() <= 0.05);

    let low = QlssConfig::new(0.05, 0.1, 0.7, InitialState::Oracle { overlap: 0.5 });
    assert!(matches!(qlss_estimate(&id, &z, &low, &mut rng), Err(Error::OverlapBelowFloor { .. })));
    assert!(matches!(qlss_estimate(&id, &Mat::identity(4, 4), &cfg, &mut rng), Err(Error::DimensionMismatch { .. })));

    let mut hits = 0;
    for k in 0..10 {
        let dim = [2, 4, 8][k % 3];
        let inst = LinearSystemInstance::<f64>::random(dim, rng.gen_range(1.5..5.0), &mut rng).unwrap();
        let m = random_observable(dim, &mut rng);
        let cfg = QlssConfig::new(0.1, 0.1, 0.7, InitialState::Oracle { overlap: 0.8 });
        let r = qlss_estimate(&inst, &m, &cfg, &mut rng).unwrap();
        let exact = exact_solution_expectation(&inst, &m).unwrap();
        hits += usize::from((r.estimate.value - exact).norm() <= 0.1);
    }
    assert!(hits >= 9, "{} / 10", hits);
}

#[test]
fn qlss_schedule_mode() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inst = diag_system(&[1.0, 0.5], &[1.0, 1.0], 2.0);
    let z = build_operator(&[(1.0f64, "Z")]).unwrap().to_matrix();
    let cfg = QlssConfig::new(0.05, 0.1, 0.7, InitialState::Schedule { steps: 200, total_time: 100.0 });
    let r = qlss_estimate(&inst, &z, &cfg, &mut rng).unwrap();
    assert!(r.overlap >= 0.7);
    assert!((r.estimate.value.re - (0.2 - 0.8)).abs() <= 0.05);
    let bad = QlssConfig::new(0.05, 0.1, 0.7, InitialState::Schedule { steps: 0, total_time: 1.0 });
    assert!(qlss_estimate(&inst, &z, &bad, &mut rng).is_err());
}

#[test]
fn rdm_diagonal_entries() {
    let h = build_operator(&[(0.5f64, "ZI"), (-0.5, "IZ")]).unwrap();
    let s = SpectralData::from_hermitian(h.to_matrix(), None).unwrap();
    let g = s.ground_state();
    assert!((exact_1rdm_entry(&g, 0, 0).unwrap() - c(1.0)).norm() < 1e-12);
    let cfg = EstimationConfig::for_spectrum(&s, 0.05, 0.9, 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let d00 = estimate_1rdm_entry(&s, &g, 0, 0, &cfg, &mut rng).unwrap();
    let d11 = estimate_1rdm_entry(&s, &g, 1, 1, &cfg, &mut rng).unwrap();
    assert!((d00.value - c(1.0)).norm() <= 0.05 && (d11.value - c(0.0)).norm() <= 0.05);
    assert!(d00.value.im.abs() <= 0.05);
    assert_eq!(d00.terms.len(), 2);
    assert!(d00.shots_used() > 0);
    assert!(estimate_1rdm_entry(&s, &g, 0, 2, &cfg, &mut rng).is_err());
}

#[test]
fn rdm_hopping_entry() {
    let h = one_body_hermitian::<f64>(0, 1, 2).unwrap().scaled(-2.0).to_matrix() + one_body_hermitian::<f64>(0, 0, 2).unwrap().scaled(0.3).to_matrix();
    let s = SpectralData::from_hermitian(h, Some(1e-6)).unwrap();
    let g = s.ground_state();
    let exact = exact_1rdm_entry(&g, 0, 1).unwrap();
    assert!(exact.norm() > 0.1);
    let cfg = EstimationConfig::for_spectrum(&s, 0.05, 0.6, 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let runs = 30;
    let mut hits = 0;
    for _ in 0..runs {
        let phi = StateVector::with_overlap(&g, 0.7, &mut rng).unwrap();
        hits += usize::from((estimate_1rdm_entry(&s, &phi, 0, 1, &cfg, &mut rng).unwrap().value - exact).norm() <= 0.05);
    }
    assert!(hits as f64 >= success_floor(0.1, runs) * runs as f64, "{} / {}", hits, runs);
    let phi = StateVector::with_overlap(&g, 0.7, &mut rng).unwrap();
    let d01 = estimate_1rdm_entry(&s, &phi, 0, 1, &cfg, &mut rng).unwrap().value;
    let d10 = estimate_1rdm_entry(&s, &phi, 1, 0, &cfg, &mut rng).unwrap().value;
    assert!((d01 - d10.conj()).norm() <= 0.1);
}
