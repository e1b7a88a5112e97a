use std::f64::consts::FRAC_1_SQRT_2;

use envq_core::linalg::{
    c, concurrence, conjugate, hermitian_eigensystem, identity, matrix_exponential, max_abs,
    pade_exponential, partial_trace, pauli, real_matrix, tensor_all, tensor_product, ComplexMatrix,
    QuantumState, C64,
};
use envq_core::models::two_qubit::TwoQubitParams;
use envq_core::random;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Reference partial trace by explicit index summation over a bipartition.
fn trace_out_second(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(da, da, |i, j| {
        (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
    })
}

fn trace_out_first(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(db, db, |i, j| {
        (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
    })
}

#[test]
fn maximally_entangled_marginal_is_mixed() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phi = DVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
    let rho = QuantumState::pure(&phi).unwrap();
    let r = partial_trace(rho.matrix(), &[2, 2], &[0]).unwrap();
    assert!(max_abs(&(r - identity(2).map(|z| z * 0.5))) < 1e-15);
    assert!((concurrence(&rho).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn partial_trace_matches_index_sums() {
    let mut g = rng(1);
    for (da, db) in [(2, 3), (3, 2), (4, 2)] {
        let m = random::hermitian(da * db, 1.0, &mut g);
        let a = partial_trace(&m, &[da, db], &[0]).unwrap();
        let b = partial_trace(&m, &[da, db], &[1]).unwrap();
        assert!(max_abs(&(a - trace_out_second(&m, da, db))) < 1e-13);
        assert!(max_abs(&(b - trace_out_first(&m, da, db))) < 1e-13);
    }
    // middle factor of three
    let m = random::hermitian(12, 1.0, &mut g);
    let mid = partial_trace(&m, &[2, 3, 2], &[1]).unwrap();
    let oracle = ComplexMatrix::from_fn(3, 3, |i, j| {
        let mut s = C64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                s += m[(a * 6 + i * 2 + b, a * 6 + j * 2 + b)];
            }
        }
        s
    });
    assert!(max_abs(&(mid - oracle)) < 1e-13);
}

#[test]
fn partial_trace_rejects_bad_dims() {
    assert!(partial_trace(&identity(4), &[2, 3], &[0]).is_err());
}

#[test]
fn exponential_of_phase_generator() {
    let theta = 0.83;
    let e = matrix_exponential(&pauli::sigma_z().map(|z| z * c(0.0, theta))).unwrap();
    assert!((e[(0, 0)] - c(theta.cos(), theta.sin())).norm() < 1e-15);
    assert!((e[(1, 1)] - c(theta.cos(), -theta.sin())).norm() < 1e-15);
    assert!(matrix_exponential(&ComplexMatrix::zeros(2, 3)).is_err());
}

/// `e^{−iH}` from the eigendecomposition of `H`.
fn spectral_exp(h: &ComplexMatrix, scale: C64) -> ComplexMatrix {
    let spec = hermitian_eigensystem(h).unwrap();
    let mut out = ComplexMatrix::zeros(h.nrows(), h.nrows());
    for (k, &l) in spec.eigenvalues.iter().enumerate() {
        out += spec.projector(k).map(|z| z * (scale * l).exp());
    }
    out
}

#[test]
fn rational_exponential_matches_spectral_route() {
    let mut g = rng(2);
    for dim in [2, 3, 5, 8] {
        for scale in [0.1, 1.0, 10.0] {
            let h = random::hermitian(dim, scale, &mut g);
            let pade = pade_exponential(&h).unwrap();
            let spectral = spectral_exp(&h, c(1.0, 0.0));
            let rel = max_abs(&(&pade - &spectral)) / max_abs(&spectral);
            assert!(rel < 1e-11, "dim {dim} scale {scale}: {rel:e}");
            let pade_u = pade_exponential(&h.map(|z| z * c(0.0, -1.0))).unwrap();
            assert!(max_abs(&(pade_u - spectral_exp(&h, c(0.0, -1.0)))) < 1e-11);
        }
    }
}

#[test]
fn two_qubit_stationary_spectrum() {
    for (gamma, omega) in [(1.0, 1.0), (0.7, 2.3), (2.0, 0.4)] {
        let p = TwoQubitParams::new(gamma, omega).unwrap();
        let big = (gamma * gamma + omega * omega).sqrt();
        let mut expected = [
            omega * omega,
            omega * omega,
            2.0 * gamma * gamma + omega * omega - 2.0 * gamma * big,
            2.0 * gamma * gamma + omega * omega + 2.0 * gamma * big,
        ]
        .map(|x| x / (4.0 * big * big));
        expected.sort_by(f64::total_cmp);
        let spec = hermitian_eigensystem(&p.stationary()).unwrap();
        for (a, b) in spec.eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn thermal_oscillator_top_eigenvalue() {
    let x: f64 = (-1.3f64).exp();
    let n = 80;
    let weights: Vec<f64> = (0..n).map(|k| x.powi(k) * (1.0 - x)).collect();
    let total: f64 = weights.iter().sum();
    let m = ComplexMatrix::from_diagonal(&DVector::from_iterator(
        n as usize,
        weights.iter().map(|w| c(w / total, 0.0)),
    ));
    let spec = hermitian_eigensystem(&m).unwrap();
    assert!((spec.max_eigenvalue() - (1.0 - x)).abs() < 1e-12);
}

#[test]
fn eigensystem_of_sigma_z_and_rejection() {
    let spec = hermitian_eigensystem(&pauli::sigma_z()).unwrap();
    assert_eq!(spec.eigenvalues, vec![-1.0, 1.0]);
    assert!(hermitian_eigensystem(&pauli::lowering()).is_err());
}

#[test]
fn concurrence_of_product_and_pure_states() {
    let mut g = rng(3);
    for _ in 0..20 {
        let a = random::pure_state(2, &mut g);
        let b = random::pure_state(2, &mut g);
        assert!(concurrence(&a.product(&b)).unwrap() < 1e-12);
        // pure-state oracle |⟨ψ|σy⊗σy|ψ*⟩|
        let psi = random::pure_vector(4, &mut g);
        let yy = tensor_product(&pauli::sigma_y(), &pauli::sigma_y());
        let oracle = (psi.adjoint() * &yy * psi.map(|z| z.conj()))[(0, 0)].norm();
        let rho = QuantumState::pure(&psi).unwrap();
        assert!((concurrence(&rho).unwrap() - oracle).abs() < 1e-12);
    }
    assert!(concurrence(&QuantumState::maximally_mixed(2)).is_err());
}

#[test]
fn werner_concurrence() {
    let bell = QuantumState::pure(&DVector::from_vec(vec![
        c(FRAC_1_SQRT_2, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(FRAC_1_SQRT_2, 0.0),
    ]))
    .unwrap();
    for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.9, 1.0] {
        let m = bell.matrix().map(|z| z * p) + identity(4).map(|z| z * ((1.0 - p) / 4.0));
        let expected = ((3.0 * p - 1.0) / 2.0).max(0.0);
        assert!(
            (concurrence(&QuantumState::new(m).unwrap()).unwrap() - expected).abs() < 1e-12,
            "p = {p}"
        );
    }
}

#[test]
fn real_matrix_layout_is_row_major() {
    let m = real_matrix(2, 2, &[1.0, 2.0, 3.0, 4.0]);
    assert_eq!(m[(0, 1)], c(2.0, 0.0));
    assert_eq!(tensor_all(&[identity(2), identity(3)]), identity(6));
}

#[test]
fn state_validation() {
    assert!(QuantumState::new(pauli::sigma_z()).is_err());
    assert!(QuantumState::new(real_matrix(2, 2, &[1.5, 0.0, 0.0, -0.5])).is_err());
    assert!(QuantumState::new(pauli::lowering()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partial_trace_is_linear_and_trace_preserving(seed in any::<u64>(), x in -2.0f64..2.0) {
        let mut g = rng(seed);
        let a = random::ginibre(6, 6, &mut g);
        let b = random::ginibre(6, 6, &mut g);
        let combo = &a + b.map(|z| z * x);
        let lhs = partial_trace(&combo, &[3, 2], &[1]).unwrap();
        let rhs = partial_trace(&a, &[3, 2], &[1]).unwrap() + partial_trace(&b, &[3, 2], &[1]).unwrap().map(|z| z * x);
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-10);
        let kept = partial_trace(&a, &[3, 2], &[0]).unwrap();
        prop_assert!((kept.trace() - a.trace()).norm() < 1e-10);
    }

    #[test]
    fn exponential_inverse(seed in any::<u64>(), scale in 0.01f64..2.5) {
        let mut g = rng(seed);
        let m = random::ginibre(3, 3, &mut g).map(|z| z * scale);
        let (e, inv) = (matrix_exponential(&m).unwrap(), matrix_exponential(&(-&m)).unwrap());
        // rounding in the product scales with ‖e^m‖‖e^{−m}‖
        let tol = 1e-13 * max_abs(&e).max(1.0) * max_abs(&inv).max(1.0);
        prop_assert!(max_abs(&(&e * &inv - identity(3))) < tol);
    }

    #[test]
    fn conjugation_keeps_spectrum(seed in any::<u64>()) {
        let mut g = rng(seed);
        let h = random::hermitian(4, 1.0, &mut g);
        let a = hermitian_eigensystem(&h).unwrap();
        let b = hermitian_eigensystem(&conjugate(&h)).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn concurrence_local_unitary_invariance(seed in any::<u64>()) {
        let mut g = rng(seed);
        let rho = random::mixed_state(4, &mut g);
        let u = tensor_product(&random::unitary(2, &mut g), &random::unitary(2, &mut g));
        let rotated = QuantumState::new(&u * rho.matrix() * u.adjoint()).unwrap();
        prop_assert!((concurrence(&rho).unwrap() - concurrence(&rotated).unwrap()).abs() < 1e-9);
    }
}
