//! Qubit collision channels as Kraus lists.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{c, identity, pauli, real_matrix, ComplexMatrix};

/// `Σ T ρ T†`.
pub fn apply(kraus: &[ComplexMatrix], rho: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
    for t in kraus {
        out += t * rho * t.adjoint();
    }
    out
}

/// `Σ T† A T`.
pub fn apply_dual(kraus: &[ComplexMatrix], a: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.nrows(), a.ncols());
    for t in kraus {
        out += t.adjoint() * a * t;
    }
    out
}

fn scaled(m: ComplexMatrix, s: f64) -> ComplexMatrix {
    m.map(|z| z * s)
}

pub fn unitary(u: ComplexMatrix) -> Vec<ComplexMatrix> {
    vec![u]
}

pub fn hadamard() -> ComplexMatrix {
    real_matrix(2, 2, &[1.0, 1.0, 1.0, -1.0]).map(|z| z * core::f64::consts::FRAC_1_SQRT_2)
}

/// `ρ → (1−p) ρ + p σz ρ σz`.
pub fn dephasing(p: f64) -> Vec<ComplexMatrix> {
    vec![
        scaled(identity(2), (1.0 - p).sqrt()),
        scaled(pauli::sigma_z(), p.sqrt()),
    ]
}

/// `ρ → (1−p) ρ + p I/2`.
pub fn depolarizing(p: f64) -> Vec<ComplexMatrix> {
    let q = (p / 4.0).sqrt();
    vec![
        scaled(identity(2), (1.0 - 0.75 * p).sqrt()),
        scaled(pauli::sigma_x(), q),
        scaled(pauli::sigma_y(), q),
        scaled(pauli::sigma_z(), q),
    ]
}

/// Random-unitary channel `Σ pᵢ Uᵢ ρ Uᵢ†`.
pub fn mixture(parts: &[(f64, ComplexMatrix)]) -> Vec<ComplexMatrix> {
    parts
        .iter()
        .map(|(p, u)| scaled(u.clone(), p.sqrt()))
        .collect()
}

/// Decay `|+⟩ → |−⟩` with probability `p`.
pub fn amplitude_damping(p: f64) -> Vec<ComplexMatrix> {
    let mut t0 = ComplexMatrix::zeros(2, 2);
    t0[(0, 0)] = c((1.0 - p).sqrt(), 0.0);
    t0[(1, 1)] = c(1.0, 0.0);
    vec![t0, scaled(pauli::lowering(), p.sqrt())]
}

/// Named qubit channels, unital ones first.
pub fn builtin() -> Vec<(String, Vec<ComplexMatrix>)> {
    let phase =
        ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.6, 0.8)]));
    vec![
        ("sigma-x".into(), unitary(pauli::sigma_x())),
        ("hadamard".into(), unitary(hadamard())),
        ("dephasing".into(), dephasing(0.3)),
        ("depolarizing".into(), depolarizing(0.5)),
        (
            "mixture".into(),
            mixture(&[(0.2, pauli::sigma_y()), (0.5, phase), (0.3, hadamard())]),
        ),
        ("amplitude-damping".into(), amplitude_damping(0.5)),
    ]
}
