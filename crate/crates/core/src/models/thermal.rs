//! Two-level system in a thermal bosonic bath.

use alloc::vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{non_negative, positive, thermal_occupation};
use crate::dynamics::LindbladModel;
use crate::error::{Error, Result};
use crate::linalg::pauli;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalTlsParams {
    pub gamma: f64,
    /// `βħω₀`; `f64::INFINITY` is zero temperature.
    pub beta_hw0: f64,
    /// Transition frequency; only enters the Hamiltonian.
    pub omega0: f64,
}

impl ThermalTlsParams {
    pub fn new(gamma: f64, beta_hw0: f64) -> Result<Self> {
        positive("gamma", gamma)?;
        if !(beta_hw0 > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "beta_hw0 must be positive (infinite temperature has no unique Q), got {beta_hw0}"
            )));
        }
        Ok(Self {
            gamma,
            beta_hw0,
            omega0: 1.0,
        })
    }

    pub fn with_omega0(mut self, omega0: f64) -> Result<Self> {
        non_negative("omega0", omega0)?;
        self.omega0 = omega0;
        Ok(self)
    }

    pub fn n_th(&self) -> f64 {
        thermal_occupation(self.beta_hw0)
    }

    /// Emission rate `κ = γ(n_th + 1)`.
    pub fn kappa(&self) -> f64 {
        self.gamma * (self.n_th() + 1.0)
    }

    /// Absorption rate `ζ = γ n_th`.
    pub fn zeta(&self) -> f64 {
        self.gamma * self.n_th()
    }

    /// `⟨σz⟩_∞ = (ζ − κ)/(ζ + κ) = −tanh(βħω₀/2)`.
    pub fn sz_stationary(&self) -> f64 {
        -(self.beta_hw0 / 2.0).tanh()
    }

    /// Total relaxation rate `κ + ζ = γ coth(βħω₀/2)`.
    pub fn relaxation_rate(&self) -> f64 {
        self.gamma / (self.beta_hw0 / 2.0).tanh()
    }

    pub fn model(&self) -> Result<LindbladModel> {
        LindbladModel::diagonal(
            pauli::sigma_z().map(|z| z * (self.omega0 / 2.0)),
            vec![
                (self.kappa(), pauli::lowering()),
                (self.zeta(), pauli::raising()),
            ],
        )
    }
}

/// `Q_t = 1 + ⟨σz⟩_∞ ⟨σz⟩_0 (1 − e^{−t(κ+ζ)})`.
pub fn thermal_q(p: &ThermalTlsParams, sz0: f64, t: f64) -> Result<f64> {
    if sz0.abs() > 1.0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "|sz0| = {} > 1",
            sz0.abs()
        )));
    }
    Ok(1.0 + p.sz_stationary() * sz0 * -(-t * p.relaxation_rate()).exp_m1())
}

/// `D_Q = tanh(βħω₀/2)`.
pub fn thermal_dq(p: &ThermalTlsParams) -> f64 {
    (p.beta_hw0 / 2.0).tanh()
}
