//! Closed-form results for the worked examples, each paired with the
//! Lindblad model it was derived from.

pub mod fluorescence;
pub mod nonmarkov;
pub mod oscillator;
pub mod thermal;
pub mod two_qubit;
pub mod volterra;

pub use fluorescence::FluorescenceParams;
pub use nonmarkov::{Kernel, NonMarkovParams};
pub use oscillator::OscillatorParams;
pub use thermal::ThermalTlsParams;
pub use two_qubit::TwoQubitParams;

use crate::error::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

pub(crate) fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!(
            "{name} must be positive, got {value}"
        )))
    }
}

pub(crate) fn non_negative(name: &str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!(
            "{name} must be non-negative, got {value}"
        )))
    }
}

/// Bose occupation `x/(1−x)` with `x = e^{−βħω₀}`; infinite at `β = 0`.
pub fn thermal_occupation(beta_hw0: f64) -> f64 {
    if beta_hw0 == f64::INFINITY {
        return 0.0;
    }
    1.0 / beta_hw0.exp_m1()
}
