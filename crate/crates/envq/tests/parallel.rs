use envq::parallel;
use envq_core::linalg::{pauli, QuantumState};
use envq_core::quantumness::uniform_grid;
use envq_core::stochastic::{
    channels, collisional_q, collisional_states, CollisionalMode, CollisionalModel, WaitingTime,
};

fn model() -> CollisionalModel {
    CollisionalModel::new(
        pauli::sigma_x(),
        channels::amplitude_damping(0.3),
        WaitingTime::gamma(2.0, 3.0).unwrap(),
    )
    .unwrap()
}

#[test]
fn threaded_collisions_match_sequential_bitwise() {
    let m = model();
    let rho = QuantumState::bloch(1.9, 0.2);
    let times = uniform_grid(2.0, 8);
    let mode = CollisionalMode::MonteCarlo {
        n_paths: 700,
        seed: 42,
    };
    let seq = collisional_q(&m, &rho, &times, mode).unwrap();
    let par = parallel::collisional_q(&m, &rho, &times, 700, 42).unwrap();
    assert_eq!(seq, par);
    let seq = collisional_states(&m, &rho, &times, mode).unwrap();
    let par = parallel::collisional_states(&m, &rho, &times, 700, 42).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn inputs_are_checked() {
    let m = model();
    let rho = QuantumState::maximally_mixed(2);
    assert!(parallel::collisional_q(&m, &rho, &[1.0, 0.5], 10, 1).is_err());
    assert!(parallel::collisional_q(&m, &rho, &[0.5], 0, 1).is_err());
    assert!(parallel::collisional_q(&m, &QuantumState::maximally_mixed(3), &[0.5], 10, 1).is_err());
}

#[test]
fn ordered_map_keeps_order() {
    let xs: Vec<u64> = (0..1000).collect();
    assert_eq!(
        parallel::ordered_map(&xs, |x| x * x),
        xs.iter().map(|x| x * x).collect::<Vec<_>>()
    );
}
