use std::f64::consts::PI;

use envq_core::linalg::{concurrence, pauli, QuantumState, C64};
use envq_core::models::fluorescence::{
    fluorescence_dephasing_limit, fluorescence_dq, fluorescence_q, fluorescence_q_stationary,
    fluorescence_q_variant, strong_drive_dq, weak_drive_dq, ZSign,
};
use envq_core::models::nonmarkov::{lorentzian_c, memory_c_numeric, nonmarkov_q, weak_coupling_c};
use envq_core::models::oscillator::{
    oscillator_dqr, oscillator_dqr_numeric, oscillator_q, oscillator_q_numeric,
};
use envq_core::models::thermal::{thermal_dq, thermal_q};
use envq_core::models::two_qubit::{
    optimal_state, twoqubit_concurrence, twoqubit_dq, twoqubit_i_max, twoqubit_q,
    twoqubit_q_printed, twoqubit_reduced,
};
use envq_core::models::{
    FluorescenceParams, Kernel, NonMarkovParams, OscillatorParams, ThermalTlsParams, TwoQubitParams,
};
use envq_core::quantumness::{
    degree_of_quantumness, degree_of_quantumness_with, q_series, q_series_with, q_stationary,
    subsystem_q_series, uniform_grid, Branch, Reversal,
};
use envq_core::{Error, LindbladModel};

fn bloch_components(rho: &QuantumState) -> (f64, f64) {
    (
        rho.expectation(&pauli::sigma_z()).re,
        rho.expectation(&pauli::sigma_y()).re,
    )
}

fn ground() -> QuantumState {
    QuantumState::bloch(PI, 0.0)
}

#[test]
fn thermal_examples() {
    let p = ThermalTlsParams::new(1.0, 2.0).unwrap();
    assert!((thermal_dq(&p) - 0.7615941559557649).abs() < 1e-12);
    assert!((thermal_q(&p, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
    let q_inf = thermal_q(&p, -1.0, 60.0).unwrap();
    assert!((q_inf - 1.0 - thermal_dq(&p)).abs() < 1e-12);
    assert!(thermal_dq(&ThermalTlsParams::new(1.0, 1e-4).unwrap()) < 1e-3);
    assert!((thermal_dq(&ThermalTlsParams::new(1.0, 20.0).unwrap()) - 1.0).abs() < 1e-3);
    assert!(ThermalTlsParams::new(1.0, 0.0).is_err());
}

#[test]
fn undriven_atom_decays_monotonically() {
    let p = FluorescenceParams::new(1.0, 0.0).unwrap();
    let times = uniform_grid(8.0, 80);
    let s = q_series(&p.model().unwrap(), &ground(), &times).unwrap();
    assert!(s.values.windows(2).all(|w| w[1] >= w[0] - 1e-14));
    assert!(s.values.iter().all(|q| *q <= 2.0));
}

#[test]
fn fluorescence_stationary_value() {
    for &(g, w) in &[(1.0, 0.3), (0.5, 2.0), (2.0, 7.0)] {
        let p = FluorescenceParams::new(g, w).unwrap();
        let rho = QuantumState::bloch(1.9, 0.4);
        let (sz, sy) = bloch_components(&rho);
        let numeric = q_stationary(&p.model().unwrap(), &rho).unwrap();
        assert!((numeric - fluorescence_q_stationary(&p, sz, sy)).abs() < 1e-10);
    }
}

#[test]
fn fluorescence_closed_form_tracks_dual_propagation() {
    for &ratio in &[0.5, 1.0, 5.0] {
        let p = FluorescenceParams::new(1.0, ratio).unwrap();
        let rho = QuantumState::bloch(2.4, 4.0);
        let (sz, sy) = bloch_components(&rho);
        let times = uniform_grid(12.0, 60);
        let s = q_series(&p.model().unwrap(), &rho, &times).unwrap();
        for (t, q) in times.iter().zip(&s.values) {
            assert!(
                (fluorescence_q(&p, sz, sy, *t).unwrap() - q).abs() < 1e-8,
                "Ω/γ = {ratio}, t = {t}"
            );
        }
    }
}

#[test]
fn printed_sign_misses_by_a_finite_margin() {
    let p = FluorescenceParams::new(1.0, 1.0).unwrap();
    let rho = ground();
    let (sz, sy) = bloch_components(&rho);
    let times = uniform_grid(10.0, 40);
    let s = q_series(&p.model().unwrap(), &rho, &times).unwrap();
    let worst = times
        .iter()
        .zip(&s.values)
        .map(|(t, q)| (fluorescence_q_variant(&p, sz, sy, *t, ZSign::Printed).unwrap() - q).abs())
        .fold(0.0, f64::max);
    assert!(worst > 0.5, "printed sign deviates by only {worst}");
}

#[test]
fn fluorescence_degree_at_equal_rates() {
    let p = FluorescenceParams::new(1.0, 1.0).unwrap();
    let (dq, angles) = fluorescence_dq(&p);
    assert!((dq - 5f64.sqrt() / 3.0).abs() < 1e-14);
    let r = degree_of_quantumness(&p.model().unwrap()).unwrap();
    assert!((r.dq - dq).abs() < 1e-10);
    let expected = match r.branch {
        Branch::Upper => angles.upper_state(),
        Branch::Lower => angles.lower_state(),
    };
    let fidelity = (expected.matrix() * r.optimal_state.matrix()).trace().re;
    assert!((fidelity - 1.0).abs() < 1e-8, "fidelity {fidelity}");
}

#[test]
fn drive_asymptotes() {
    let weak = FluorescenceParams::new(1.0, 0.1).unwrap();
    let exact = fluorescence_dq(&weak).0;
    assert!(((weak_drive_dq(&weak) - exact) / exact).abs() < 0.01);
    let strong = FluorescenceParams::new(1.0, 50.0).unwrap();
    let exact = fluorescence_dq(&strong).0;
    assert!(((strong_drive_dq(&strong) - exact) / exact).abs() < 0.05);
}

#[test]
fn dephasing_limit_is_unital_and_flat() {
    let p = FluorescenceParams::new(1.0, 50.0).unwrap();
    let limit = fluorescence_dephasing_limit(&p).unwrap();
    assert!(limit.is_unital(1e-12));
    let s = q_series(
        &limit,
        &QuantumState::bloch(0.8, 1.1),
        &uniform_grid(5.0, 25),
    )
    .unwrap();
    assert!(s.max_deviation_from_one() < 1e-10);
    let full = p.model().unwrap();
    let worst = [0.0, 1.0, 2.0, PI]
        .iter()
        .map(|&th| (q_stationary(&full, &QuantumState::bloch(th, 0.5 * PI)).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.03);
}

#[test]
fn strong_drive_oscillates() {
    let p = FluorescenceParams::new(1.0, 3.0).unwrap();
    let times = uniform_grid(6.0, 120);
    let s = q_series(&p.model().unwrap(), &ground(), &times).unwrap();
    let turns = s
        .values
        .windows(3)
        .filter(|w| (w[1] - w[0]) * (w[2] - w[1]) < 0.0)
        .count();
    assert!(turns >= 2);
}

#[test]
fn volterra_reproduces_lorentzian_memory() {
    let gamma = 1.0;
    for &gt in &[0.1, 0.5, 2.0, 5.0] {
        let p = NonMarkovParams::lorentzian(gamma, gt / gamma).unwrap();
        let times = uniform_grid(6.0, 24);
        let numeric = memory_c_numeric(&p, &times).unwrap();
        for (t, ct) in times.iter().zip(&numeric) {
            let exact = lorentzian_c(gamma, p.tau_c, *t);
            assert!(
                (ct - C64::new(exact, 0.0)).norm() < 1e-6,
                "γτc = {gt}, t = {t}"
            );
        }
    }
}

#[test]
fn lorentzian_memory_stays_finite_at_long_times() {
    for &gt in &[0.1, 0.5, 2.0, 5.0] {
        let c = lorentzian_c(1.0, gt, 400.0);
        assert!(c.is_finite() && c.abs() < 1e-12, "γτc = {gt}: {c}");
    }
    let p = NonMarkovParams::lorentzian(1.0, 0.1).unwrap();
    assert!((nonmarkov_q(&p, -1.0, 400.0).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn weak_coupling_is_exponential() {
    let p = NonMarkovParams::lorentzian(1.0, 0.02).unwrap();
    for &t in &[0.5, 1.0, 2.0, 4.0] {
        let exact = lorentzian_c(1.0, 0.02, t);
        let weak = weak_coupling_c(&p, t);
        assert!(((weak - exact) / exact).abs() < 0.02);
    }
}

#[test]
fn strong_coupling_revives() {
    let p = NonMarkovParams::lorentzian(1.0, 2.0).unwrap();
    let cs: Vec<f64> = uniform_grid(30.0, 600)
        .iter()
        .map(|&t| lorentzian_c(1.0, 2.0, t))
        .collect();
    let first_zero = cs
        .iter()
        .position(|c| *c < 0.0)
        .expect("amplitude changes sign");
    let later_peak = cs[first_zero..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    assert!(later_peak > 0.05);
    let qs: Vec<f64> = (0..600)
        .map(|k| nonmarkov_q(&p, -1.0, 0.05 * k as f64).unwrap())
        .collect();
    assert!(qs.iter().all(|q| (0.0..=2.0).contains(q)));
    assert!(qs.windows(2).any(|w| w[1] < w[0] - 1e-6));
}

#[test]
fn nonmarkov_flat_without_population_imbalance() {
    let p = NonMarkovParams::lorentzian(1.0, 0.5).unwrap();
    for &t in &[0.0, 1.0, 5.0] {
        assert_eq!(nonmarkov_q(&p, 0.0, t).unwrap(), 1.0);
    }
    assert!(nonmarkov_q(&p, 1.2, 1.0).is_err());
}

#[test]
fn single_mode_kernel_matches_cosine() {
    let p = NonMarkovParams::new(1.0, 0.5, Kernel::SingleMode).unwrap();
    let times = uniform_grid(4.0, 8);
    let numeric = memory_c_numeric(&p, &times).unwrap();
    for (t, ct) in times.iter().zip(&numeric) {
        assert!((ct.re - t.cos()).abs() < 1e-5 && ct.im.abs() < 1e-8);
    }
}

#[test]
fn two_qubit_limits() {
    let uncoupled = TwoQubitParams::new(1.0, 0.0).unwrap();
    assert!((twoqubit_dq(&uncoupled) - 3.0).abs() < 1e-14);
    assert_eq!(twoqubit_concurrence(&uncoupled), 0.0);
    let strong = TwoQubitParams::new(1.0, 1e8).unwrap();
    assert!(twoqubit_dq(&strong) < 1e-7);
    assert!((twoqubit_concurrence(&strong) - 1.0).abs() < 1e-12);
}

#[test]
fn two_qubit_closed_forms_against_numerics() {
    let p = TwoQubitParams::new(1.0, 1.0).unwrap();
    let m = p.model().unwrap();
    let r = degree_of_quantumness_with(&m, Reversal::Conjugate).unwrap();
    assert!((r.dq - twoqubit_dq(&p)).abs() < 1e-10);
    let v = twoqubit_i_max(&p);
    let overlap = (v.adjoint() * r.optimal_state.matrix() * &v)[(0, 0)].re;
    assert!(overlap > 1.0 - 1e-8);
    let state = optimal_state(&p).unwrap();
    assert!((concurrence(&state).unwrap() - twoqubit_concurrence(&p)).abs() < 1e-10);
    let times = uniform_grid(20.0, 80);
    let s = q_series_with(&m, &state, &times, Reversal::Conjugate).unwrap();
    let mut printed_gap = 0.0f64;
    for (t, q) in times.iter().zip(&s.values) {
        assert!((twoqubit_q(&p, *t) - q).abs() < 1e-8, "t = {t}");
        printed_gap = printed_gap.max((twoqubit_q_printed(&p, *t) - q).abs());
    }
    assert!(printed_gap > 0.05);
    assert!((s.last().unwrap() - 1.0 - twoqubit_dq(&p)).abs() < 1e-4);
}

#[test]
fn reduced_qubit() {
    for &w in &[0.5, 1.0, 3.0] {
        let p = TwoQubitParams::new(1.0, w).unwrap();
        let (dq, q) = twoqubit_reduced(&p);
        assert!((dq - 1.0 / (1.0 + w * w)).abs() < 1e-14);
        assert!(dq < twoqubit_dq(&p));
        let times = uniform_grid(10.0, 40);
        let s = subsystem_q_series(
            &p.model().unwrap(),
            [2, 2],
            0,
            &ground(),
            &ground(),
            &times,
            Reversal::None,
        )
        .unwrap();
        for (t, v) in times.iter().zip(&s.values) {
            assert!((q(*t) - v).abs() < 1e-8, "Ω = {w}, t = {t}");
        }
    }
}

#[test]
fn oscillator_values() {
    let p = OscillatorParams::from_occupation(0.5, 1.0, 60).unwrap();
    assert!((oscillator_q(&p, 2.0 / 0.5) - 7.38905609893065).abs() < 1e-12);
    assert!(
        (oscillator_q(&OscillatorParams::new(0.5, 3.0, 10).unwrap(), 4.0) - 7.38905609893065).abs()
            < 1e-12
    );
}

#[test]
fn truncated_oscillator_matches_exponential_early() {
    let p = OscillatorParams::from_occupation(1.0, 1.0, 60).unwrap();
    let times = uniform_grid(1.2, 12);
    for rho in [
        QuantumState::pure(&basis(61, 0)).unwrap(),
        QuantumState::pure(&basis(61, 1)).unwrap(),
    ] {
        let s = oscillator_q_numeric(&p, &rho, &times).unwrap();
        for (t, q) in times.iter().zip(&s.values) {
            let exact = oscillator_q(&p, *t);
            assert!(((q - exact) / exact).abs() < 1e-4, "t = {t}");
        }
    }
}

#[test]
fn truncation_alarm_fires_before_the_error_grows() {
    // the dual operator spreads over number states roughly geometrically
    // with mean ~ 2(e^{γt} − 1); at γt = 2 about 1% of it sits above 60
    let p = OscillatorParams::from_occupation(1.0, 1.0, 60).unwrap();
    let rho = QuantumState::pure(&basis(61, 0)).unwrap();
    let err = oscillator_q_numeric(&p, &rho, &uniform_grid(2.0, 10)).unwrap_err();
    assert!(matches!(err, Error::TruncationTail { .. }));
    let small = OscillatorParams::from_occupation(1.0, 1.0, 4).unwrap();
    let top = QuantumState::pure(&basis(5, 4)).unwrap();
    assert!(oscillator_q_numeric(&small, &top, &[0.0, 2.0]).is_err());
}

#[test]
fn infinite_temperature_proxy_is_flat() {
    let gamma0 = 1.0;
    let n_th = 1e4;
    let p = OscillatorParams::from_occupation(gamma0 / (2.0 * n_th + 1.0), n_th, 40).unwrap();
    assert!(((p.kappa() + p.zeta()) - gamma0).abs() < 1e-9);
    let t = 1.0 / gamma0;
    assert!((oscillator_q(&p, t) - 1.0).abs() < 2e-4);
    let s = oscillator_q_numeric(&p, &QuantumState::pure(&basis(41, 0)).unwrap(), &[t]).unwrap();
    assert!((s.values[0] - 1.0).abs() < 2e-4);
}

#[test]
fn renormalized_degree_eigen_route() {
    for &beta in &[0.1, 1.0, 3.0] {
        let p = OscillatorParams::with_tail(1.0, beta, 1e-12).unwrap();
        let numeric = oscillator_dqr_numeric(&p).unwrap();
        assert!((numeric - oscillator_dqr(&p)).abs() < 1e-8, "β = {beta}");
    }
}

#[test]
fn dense_stationary_state_agrees_for_small_truncation() {
    let p = OscillatorParams::with_tail(1.0, 3.0, 1e-12).unwrap();
    let model: LindbladModel = p.model().unwrap();
    let r = degree_of_quantumness(&model).unwrap();
    let top = r.stationary.spectrum().max_eigenvalue();
    assert!((top - oscillator_dqr(&p)).abs() < 1e-8);
}

fn basis(dim: usize, k: usize) -> nalgebra::DVector<C64> {
    let mut v = nalgebra::DVector::from_element(dim, C64::new(0.0, 0.0));
    v[k] = C64::new(1.0, 0.0);
    v
}
