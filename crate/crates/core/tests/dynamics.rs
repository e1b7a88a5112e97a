use envq_core::dynamics::{
    dual_liouvillian, generator_spectrum, liouvillian, propagate, propagate_series, slowest_rate,
    stationary_state, time_reversed_state, LindbladModel,
};
use envq_core::linalg::{
    c, identity, max_abs, pauli, trace_product, vectorize, ComplexMatrix, QuantumState,
};
use envq_core::models::{FluorescenceParams, ThermalTlsParams, TwoQubitParams};
use envq_core::quantumness::q_series;
use envq_core::random;
use envq_core::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_model(seed: u64, d: usize) -> LindbladModel {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    let ops = (0..2).map(|_| random::ginibre(d, d, &mut g)).collect();
    // positive semidefinite rate matrix B B†
    let b = random::ginibre(2, 2, &mut g);
    LindbladModel::new(random::hermitian(d, 1.0, &mut g), ops, &b * b.adjoint()).unwrap()
}

#[test]
fn model_validation() {
    let bad_rates = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(1.0, 0.0),
        c(-0.5, 0.0),
    ]));
    let r = LindbladModel::new(
        pauli::sigma_z(),
        vec![pauli::lowering(), pauli::raising()],
        bad_rates,
    );
    assert!(r.is_err());
    assert!(LindbladModel::diagonal(pauli::lowering(), vec![]).is_err());
}

#[test]
fn commutator_generator_without_rates() {
    let m = LindbladModel::diagonal(pauli::sigma_z().map(|z| z * 0.5), vec![]).unwrap();
    let l = liouvillian(&m).matrix();
    let rho = QuantumState::bloch(1.0, 0.0);
    let x = rho.matrix();
    let h = m.h_bar();
    let expected = (h * x - x * h).map(|z| z * c(0.0, -1.0));
    let got = &l * vectorize(x);
    assert!((got - vectorize(&expected)).norm() < 1e-14);
}

#[test]
fn thermal_stationary_state_and_relaxation() {
    let p = ThermalTlsParams::new(0.8, 1.4).unwrap();
    let (k, z) = (p.kappa(), p.zeta());
    let model = p.model().unwrap();
    let rho = stationary_state(&liouvillian(&model)).unwrap();
    assert!((rho.matrix()[(0, 0)].re - z / (k + z)).abs() < 1e-12);
    assert!((rho.matrix()[(1, 1)].re - k / (k + z)).abs() < 1e-12);
    assert!((rho.expectation(&pauli::sigma_z()).re - (z - k) / (z + k)).abs() < 1e-12);
    // populations relax at κ + ζ
    let rho0 = QuantumState::bloch(0.0, 0.0);
    for &t in &[0.3, 1.0, 2.5] {
        let pop = propagate(&liouvillian(&model), rho0.matrix(), t).unwrap()[(0, 0)].re;
        let expected = z / (k + z) + (1.0 - z / (k + z)) * (-(k + z) * t).exp();
        assert!((pop - expected).abs() < 1e-12);
    }
    let spec = generator_spectrum(&liouvillian(&model)).unwrap();
    assert!(spec
        .iter()
        .any(|l| (l.re + k + z).abs() < 1e-10 && l.im.abs() < 1e-10));
    assert!((slowest_rate(&liouvillian(&model)).unwrap() - (k + z) / 2.0).abs() < 1e-10);
}

#[test]
fn thermal_dual_trace_derivative() {
    let p = ThermalTlsParams::new(1.0, 0.5).unwrap();
    let model = p.model().unwrap();
    let mut g = ChaCha8Rng::seed_from_u64(4);
    let a = random::hermitian(2, 1.0, &mut g);
    let lhs = model.apply_dual(&a).trace();
    let rhs = -(p.kappa() - p.zeta()) * trace_product(&pauli::sigma_z(), &a);
    assert!((lhs - rhs).norm() < 1e-13);
    assert!(max_abs(&model.apply_dual(&identity(2))) < 1e-15);
}

#[test]
fn fluorescence_stationary_values() {
    for &(gamma, omega) in &[(1.0, 0.3), (0.5, 2.0), (2.0, 5.0)] {
        let p = FluorescenceParams::new(gamma, omega).unwrap();
        let rho = stationary_state(&liouvillian(&p.model().unwrap())).unwrap();
        let sat = gamma * gamma + 2.0 * omega * omega;
        assert!((rho.expectation(&pauli::sigma_z()).re + gamma * gamma / sat).abs() < 1e-12);
        assert!((rho.expectation(&pauli::sigma_y()).re - 2.0 * gamma * omega / sat).abs() < 1e-12);
    }
}

#[test]
fn two_qubit_stationary_matches_closed_form() {
    for &(gamma, omega) in &[(1.0, 1.0), (0.4, 2.2)] {
        let p = TwoQubitParams::new(gamma, omega).unwrap();
        let rho = stationary_state(&liouvillian(&p.model().unwrap())).unwrap();
        assert!(max_abs(&(rho.matrix() - p.stationary())) < 1e-12);
        let rev = time_reversed_state(&rho);
        assert!(
            (rev.matrix()[(0, 3)]
                - c(
                    0.0,
                    2.0 * gamma * omega / (4.0 * (gamma * gamma + omega * omega))
                ))
            .norm()
                < 1e-12
        );
    }
}

#[test]
fn degenerate_steady_manifold_is_refused() {
    let m = LindbladModel::diagonal(pauli::sigma_z(), vec![(1.0, pauli::sigma_z())]).unwrap();
    assert!(matches!(
        stationary_state(&liouvillian(&m)),
        Err(Error::DegenerateSteadyState { .. })
    ));
}

#[test]
fn time_reversal_of_real_state() {
    let rho = QuantumState::from_bloch_vector(0.3, 0.0, -0.4).unwrap();
    assert_eq!(time_reversed_state(&rho).matrix(), rho.matrix());
}

#[test]
fn propagation_at_zero_and_semigroup() {
    let m = random_model(3, 3);
    let g = liouvillian(&m);
    let x = random::mixed_state(3, &mut ChaCha8Rng::seed_from_u64(8));
    assert!(max_abs(&(propagate(&g, x.matrix(), 0.0).unwrap() - x.matrix())) < 1e-15);
    let (t1, t2) = (0.37, 0.91);
    let a = propagate(&g, x.matrix(), t1 + t2).unwrap();
    let b = propagate(&g, &propagate(&g, x.matrix(), t1).unwrap(), t2).unwrap();
    assert!(max_abs(&(a - b)) < 1e-10);
}

#[test]
fn large_models_propagate_by_integration() {
    // d = 10 exceeds the dense limit; compare against the dense route on the same generator
    let m = random_model(9, 10);
    let x = random::mixed_state(10, &mut ChaCha8Rng::seed_from_u64(1));
    let times = [0.0, 0.2, 0.7];
    let ode = propagate_series(&liouvillian(&m), x.matrix(), &times).unwrap();
    let l = liouvillian(&m).matrix();
    for (t, y) in times.iter().zip(&ode) {
        let dense = envq_core::linalg::matrix_exponential(&l.map(|z| z * *t)).unwrap()
            * vectorize(x.matrix());
        assert!((vectorize(y) - dense).norm() < 1e-8);
    }
}

#[test]
fn unital_models_have_flat_q() {
    let mut g = ChaCha8Rng::seed_from_u64(21);
    let h = random::hermitian(3, 1.0, &mut g);
    let v1 = random::hermitian(3, 1.0, &mut g);
    let u = random::unitary(3, &mut g);
    let m = LindbladModel::diagonal(h, vec![(0.7, v1), (1.3, u)]).unwrap();
    assert!(m.is_unital(1e-12));
    let rho = random::pure_state(3, &mut g);
    let s = q_series(&m, &rho, &[0.0, 0.5, 1.5, 4.0]).unwrap();
    assert!(s.max_deviation_from_one() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn trace_annihilation_and_adjoint_pairing(seed in any::<u64>()) {
        let m = random_model(seed, 3);
        let mut g = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let rho = random::mixed_state(3, &mut g);
        let a = random::ginibre(3, 3, &mut g);
        prop_assert!(m.apply(rho.matrix()).trace().norm() < 1e-12);
        let lhs = trace_product(&a, &m.apply(rho.matrix()));
        let rhs = trace_product(rho.matrix(), &m.apply_dual(&a));
        prop_assert!((lhs - rhs).norm() < 1e-11);
        // superoperator matrices agree with the direct action
        let fwd = liouvillian(&m).matrix() * vectorize(rho.matrix());
        let dual = dual_liouvillian(&m).matrix() * vectorize(&a);
        prop_assert!((fwd - vectorize(&m.apply(rho.matrix()))).norm() < 1e-12);
        prop_assert!((dual - vectorize(&m.apply_dual(&a))).norm() < 1e-12);
    }

    #[test]
    fn trajectories_stay_physical(seed in any::<u64>(), t in 0.0f64..4.0) {
        let m = random_model(seed, 2);
        let rho = random::mixed_state(2, &mut ChaCha8Rng::seed_from_u64(seed ^ 77));
        let out = propagate(&liouvillian(&m), rho.matrix(), t).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(envq_core::linalg::hermitian_deviation(&out) < 1e-10);
        let spec = envq_core::linalg::hermitian_eigensystem_tol(&out, 1e-8).unwrap();
        prop_assert!(spec.min_eigenvalue() > -1e-8);
    }
}
