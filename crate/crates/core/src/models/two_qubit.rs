//! Two qubits coupled by `σx ⊗ σx`, each decaying at zero temperature.

use alloc::vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::DVector;

use super::{non_negative, positive};
use crate::dynamics::LindbladModel;
use crate::error::Result;
use crate::linalg::{c, identity, pauli, real_matrix, ComplexMatrix, QuantumState, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitParams {
    pub gamma: f64,
    /// Coupling frequency.
    pub omega: f64,
}

impl TwoQubitParams {
    pub fn new(gamma: f64, omega: f64) -> Result<Self> {
        positive("gamma", gamma)?;
        non_negative("omega", omega)?;
        Ok(Self { gamma, omega })
    }

    /// `Γ = √(γ² + Ω²)`.
    pub fn big_gamma2(&self) -> f64 {
        self.gamma.hypot(self.omega)
    }

    /// `dρ/dt = −i(Ω/2)[σx⊗σx, ρ] + γ L_a[ρ] + γ L_b[ρ]`.
    pub fn model(&self) -> Result<LindbladModel> {
        let id = identity(2);
        LindbladModel::diagonal(
            pauli::sigma_x()
                .kronecker(&pauli::sigma_x())
                .map(|z| z * (self.omega / 2.0)),
            vec![
                (self.gamma, pauli::lowering().kronecker(&id)),
                (self.gamma, id.kronecker(&pauli::lowering())),
            ],
        )
    }

    /// Closed-form stationary state in the basis `{++, +−, −+, −−}`.
    pub fn stationary(&self) -> ComplexMatrix {
        let (g, w) = (self.gamma, self.omega);
        let norm = 4.0 * (g * g + w * w);
        let mut m = real_matrix(
            4,
            4,
            &[
                w * w,
                0.0,
                0.0,
                0.0,
                0.0,
                w * w,
                0.0,
                0.0,
                0.0,
                0.0,
                w * w,
                0.0,
                0.0,
                0.0,
                0.0,
                4.0 * g * g + w * w,
            ],
        );
        m[(0, 3)] = c(0.0, -2.0 * g * w);
        m[(3, 0)] = c(0.0, 2.0 * g * w);
        m.map(|z| z / norm)
    }
}

/// Closed-form bipartite results.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitReport {
    pub dq: f64,
    pub i_max: DVector<C64>,
    pub concurrence: f64,
}

/// `D_Q = γ(γ + 2Γ)/Γ²`.
pub fn twoqubit_dq(p: &TwoQubitParams) -> f64 {
    let big = p.big_gamma2();
    p.gamma * (p.gamma + 2.0 * big) / (big * big)
}

/// `|i_max⟩ = [i(Γ − γ)|++⟩ + Ω|−−⟩]/√(2Γ(Γ − γ))`, written in a form that
/// stays finite as `Ω → 0`.
pub fn twoqubit_i_max(p: &TwoQubitParams) -> DVector<C64> {
    let big = p.big_gamma2();
    // Γ − γ = Ω²/(Γ + γ)
    let gap = p.omega * p.omega / (big + p.gamma);
    let a = (gap / (2.0 * big)).sqrt();
    let b = ((big + p.gamma) / (2.0 * big)).sqrt();
    DVector::from_column_slice(&[c(0.0, a), ZERO, ZERO, c(b, 0.0)])
}

/// `C = Ω/√(γ² + Ω²)`.
pub fn twoqubit_concurrence(p: &TwoQubitParams) -> f64 {
    p.omega / p.big_gamma2()
}

pub fn twoqubit_report(p: &TwoQubitParams) -> TwoQubitReport {
    TwoQubitReport {
        dq: twoqubit_dq(p),
        i_max: twoqubit_i_max(p),
        concurrence: twoqubit_concurrence(p),
    }
}

/// Optimal bipartite `Q_t`,
/// `1 + γ²(1 + e^{−2γt})/Γ² + 2(γ/Γ)[1 − λ e^{−γt} cos Ωt]`, `λ = 1 + γ/Γ`.
pub fn twoqubit_q(p: &TwoQubitParams, t: f64) -> f64 {
    twoqubit_q_with_decay(p, t, p.gamma)
}

/// The same expression with the oscillating term decaying as `e^{−2γt}`, as
/// typeset; kept for diagnostics.
pub fn twoqubit_q_printed(p: &TwoQubitParams, t: f64) -> f64 {
    twoqubit_q_with_decay(p, t, 2.0 * p.gamma)
}

fn twoqubit_q_with_decay(p: &TwoQubitParams, t: f64, rate: f64) -> f64 {
    let (g, big) = (p.gamma, p.big_gamma2());
    let lambda = 1.0 + g / big;
    1.0 + g * g * (1.0 + (-2.0 * g * t).exp()) / (big * big)
        + 2.0 * (g / big) * (1.0 - lambda * (-rate * t).exp() * (p.omega * t).cos())
}

/// Single-qubit stationary state `diag(Ω², 2γ² + Ω²)/(2Γ²)`.
pub fn reduced_stationary(p: &TwoQubitParams) -> ComplexMatrix {
    let (g, w) = (p.gamma, p.omega);
    let norm = 2.0 * (g * g + w * w);
    real_matrix(
        2,
        2,
        &[w * w / norm, 0.0, 0.0, (2.0 * g * g + w * w) / norm],
    )
}

/// Reduced-qubit degree `γ²/Γ²` and its closed-form `Q_t` from `|−⟩`,
/// `1 + γ²/Γ² + γe^{−γt}[Ω sin Ωt − γ cos Ωt]/Γ²`.
pub fn twoqubit_reduced(p: &TwoQubitParams) -> (f64, impl Fn(f64) -> f64) {
    let (g, w) = (p.gamma, p.omega);
    let big2 = g * g + w * w;
    let q = move |t: f64| {
        1.0 + g * g / big2 + g * (-g * t).exp() * (w * (w * t).sin() - g * (w * t).cos()) / big2
    };
    (g * g / big2, q)
}

/// `|i_max⟩⟨i_max|` as a state.
pub fn optimal_state(p: &TwoQubitParams) -> Result<QuantumState> {
    QuantumState::with_dims(
        {
            let v = twoqubit_i_max(p);
            &v * v.adjoint()
        },
        vec![2, 2],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::concurrence;

    #[test]
    fn limits_of_the_optimal_state() {
        let weak = twoqubit_i_max(&TwoQubitParams::new(1.0, 0.0).unwrap());
        assert!((weak[3].re - 1.0).abs() < 1e-15 && weak[0].norm() == 0.0);
        let strong = twoqubit_i_max(&TwoQubitParams::new(1.0, 1e7).unwrap());
        let s = 0.5f64.sqrt();
        assert!((strong[0].im - s).abs() < 1e-6 && (strong[3].re - s).abs() < 1e-6);
    }

    #[test]
    fn unit_norm_and_concurrence() {
        let p = TwoQubitParams::new(0.7, 1.9).unwrap();
        let state = optimal_state(&p).unwrap();
        assert!((concurrence(&state).unwrap() - twoqubit_concurrence(&p)).abs() < 1e-10);
    }

    #[test]
    fn q_limits() {
        let p = TwoQubitParams::new(1.0, 1.0).unwrap();
        assert!((twoqubit_q(&p, 0.0) - 1.0).abs() < 1e-15);
        assert!((twoqubit_q(&p, 60.0) - 1.0 - twoqubit_dq(&p)).abs() < 1e-12);
        let (dq, q) = twoqubit_reduced(&p);
        assert!((q(0.0) - 1.0).abs() < 1e-15);
        assert!((q(80.0) - 1.0 - dq).abs() < 1e-12);
    }

    #[test]
    fn stationary_is_a_state() {
        let p = TwoQubitParams::new(1.0, 2.0).unwrap();
        assert!(QuantumState::new(p.stationary()).is_ok());
    }
}
