//! Resonantly driven two-level atom decaying at zero temperature.

use alloc::format;
use alloc::vec;
#[allow(unused_imports)]
use num_traits::Float;

use core::f64::consts::{FRAC_PI_2, PI};

use super::{non_negative, positive};
use crate::dynamics::LindbladModel;
use crate::error::{Error, Result};
use crate::laplace::talbot_inverse;
use crate::linalg::{c, pauli, QuantumState, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluorescenceParams {
    pub gamma: f64,
    /// Rabi frequency of the drive.
    pub omega: f64,
}

impl FluorescenceParams {
    pub fn new(gamma: f64, omega: f64) -> Result<Self> {
        positive("gamma", gamma)?;
        non_negative("omega", omega)?;
        Ok(Self { gamma, omega })
    }

    /// `Γ = √(γ² − 16Ω²)`, imaginary above `Ω = γ/4`.
    pub fn big_gamma(&self) -> C64 {
        c(
            self.gamma * self.gamma - 16.0 * self.omega * self.omega,
            0.0,
        )
        .sqrt()
    }

    fn saturation(&self) -> f64 {
        self.gamma * self.gamma + 2.0 * self.omega * self.omega
    }

    /// `⟨σz⟩_∞ = −γ²/(γ² + 2Ω²)`.
    pub fn sz_stationary(&self) -> f64 {
        -self.gamma * self.gamma / self.saturation()
    }

    /// `⟨σy⟩_∞ = 2γΩ/(γ² + 2Ω²)`.
    pub fn sy_stationary(&self) -> f64 {
        2.0 * self.gamma * self.omega / self.saturation()
    }

    /// `dρ/dt = −i(Ω/2)[σx, ρ] + γ(σρσ† − ½{σ†σ, ρ})`.
    pub fn model(&self) -> Result<LindbladModel> {
        LindbladModel::diagonal(
            pauli::sigma_x().map(|z| z * (self.omega / 2.0)),
            vec![(self.gamma, pauli::lowering())],
        )
    }
}

fn check_bloch(sz0: f64, sy0: f64) -> Result<()> {
    if sz0 * sz0 + sy0 * sy0 > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "(sz0, sy0) = ({sz0}, {sy0}) lies outside the Bloch ball"
        )));
    }
    Ok(())
}

/// Sign of the `⟨σz⟩_0 z(t)` term in the time-domain form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZSign {
    /// `−⟨σz⟩_0 z(t)`, the sign forced by the Laplace-domain expression.
    Consistent,
    /// `+⟨σz⟩_0 z(t)`, as typeset; kept for diagnostics.
    Printed,
}

/// `∫₀ᵗ e^{−3γs/4} cosh(sΓ/4) ds` and `∫₀ᵗ e^{−3γs/4} sinh(sΓ/4)/(Γ/4) ds`,
/// continued analytically to imaginary `Γ`.
fn kernel_integrals(p: &FluorescenceParams, t: f64) -> (f64, f64) {
    let a = 0.75 * p.gamma;
    let b2 = (p.gamma * p.gamma - 16.0 * p.omega * p.omega) / 16.0;
    let (cc, s) = if b2 * t * t < 1e-8 && b2 * t * t > -1e-8 {
        let decay = (-a * t).exp();
        (
            decay * (1.0 + b2 * t * t / 2.0),
            decay * t * (1.0 + b2 * t * t / 6.0),
        )
    } else if b2 > 0.0 {
        let b = b2.sqrt();
        let up = ((b - a) * t).exp();
        let down = (-(a + b) * t).exp();
        (0.5 * (up + down), 0.5 * (up - down) / b)
    } else {
        let w = (-b2).sqrt();
        let decay = (-a * t).exp();
        (decay * (w * t).cos(), decay * (w * t).sin() / w)
    };
    let i_s = (cc - 1.0 + a * s) / (b2 - a * a);
    let i_c = s + a * i_s;
    (i_c, i_s)
}

/// `Q_t = 1 + γ∫₀ᵗ e^{−3γt′/4}[∓⟨σz⟩_0 z(t′) + ⟨σy⟩_0 y(t′)] dt′` with
/// `y = (4Ω/Γ) sinh(tΓ/4)` and `z = cosh(tΓ/4) − (γ/Γ) sinh(tΓ/4)`.
pub fn fluorescence_q_variant(
    p: &FluorescenceParams,
    sz0: f64,
    sy0: f64,
    t: f64,
    sign: ZSign,
) -> Result<f64> {
    check_bloch(sz0, sy0)?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t must be non-negative, got {t}"
        )));
    }
    let (i_c, i_s) = kernel_integrals(p, t);
    let z_integral = i_c - p.gamma * i_s / 4.0;
    let y_integral = p.omega * i_s;
    let z_sign = match sign {
        ZSign::Consistent => -1.0,
        ZSign::Printed => 1.0,
    };
    Ok(1.0 + p.gamma * (z_sign * sz0 * z_integral + sy0 * y_integral))
}

pub fn fluorescence_q(p: &FluorescenceParams, sz0: f64, sy0: f64, t: f64) -> Result<f64> {
    fluorescence_q_variant(p, sz0, sy0, t, ZSign::Consistent)
}

/// Laplace transform `Q_u`.
pub fn fluorescence_q_laplace(p: &FluorescenceParams, sz0: f64, sy0: f64, u: C64) -> C64 {
    let (g, w) = (p.gamma, p.omega);
    let denom = u * ((u + g) * (u * 2.0 + g) + 2.0 * w * w);
    c(1.0, 0.0) / u - (u * 2.0 + g) * (sz0 * g) / denom + c(sy0 * 2.0 * g * w, 0.0) / denom
}

/// `Q_t` by numerical inversion of [`fluorescence_q_laplace`].
pub fn fluorescence_q_inverse(p: &FluorescenceParams, sz0: f64, sy0: f64, t: f64) -> Result<f64> {
    check_bloch(sz0, sy0)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    Ok(talbot_inverse(
        |u| fluorescence_q_laplace(p, sz0, sy0, u),
        t,
        32,
    ))
}

/// `Q_∞ = 1 + ⟨σz⟩_∞⟨σz⟩_0 + ⟨σy⟩_∞⟨σy⟩_0`.
pub fn fluorescence_q_stationary(p: &FluorescenceParams, sz0: f64, sy0: f64) -> f64 {
    1.0 + p.sz_stationary() * sz0 + p.sy_stationary() * sy0
}

/// Bloch angles of the two optimal pure initial states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalAngles {
    /// `tan θ₀ = −2Ω/γ`, `φ₀ = π/2`: the state with `Q_∞ = 1 + D_Q`.
    pub theta0: f64,
    pub phi0: f64,
    /// `tan θ̃₀ = 2Ω/γ`, `φ̃₀ = 3π/2`: the orthogonal state, `Q_∞ = 1 − D_Q`.
    pub theta_tilde: f64,
    pub phi_tilde: f64,
}

impl OptimalAngles {
    pub fn upper_state(&self) -> QuantumState {
        QuantumState::bloch(self.theta0, self.phi0)
    }

    pub fn lower_state(&self) -> QuantumState {
        QuantumState::bloch(self.theta_tilde, self.phi_tilde)
    }
}

/// `D_Q = γ√(γ² + 4Ω²)/(γ² + 2Ω²)` and the optimal angles.
pub fn fluorescence_dq(p: &FluorescenceParams) -> (f64, OptimalAngles) {
    let (g, w) = (p.gamma, p.omega);
    let dq = g * (g * g + 4.0 * w * w).sqrt() / p.saturation();
    let tilt = (2.0 * w / g).atan();
    let angles = OptimalAngles {
        theta0: PI - tilt,
        phi0: FRAC_PI_2,
        theta_tilde: tilt,
        phi_tilde: 3.0 * FRAC_PI_2,
    };
    (dq, angles)
}

/// `1 − 2(Ω/γ)⁴`, valid for weak drive.
pub fn weak_drive_dq(p: &FluorescenceParams) -> f64 {
    1.0 - 2.0 * (p.omega / p.gamma).powi(4)
}

/// `γ/Ω`, valid for strong drive.
pub fn strong_drive_dq(p: &FluorescenceParams) -> f64 {
    p.gamma / p.omega
}

/// Strong-drive approximation `−i(Ω/2)[σx, ·] + (3γ/4)(σz · σz − ·)`.
pub fn fluorescence_dephasing_limit(p: &FluorescenceParams) -> Result<LindbladModel> {
    LindbladModel::diagonal(
        pauli::sigma_x().map(|z| z * (p.omega / 2.0)),
        vec![(0.75 * p.gamma, pauli::sigma_z())],
    )
}
