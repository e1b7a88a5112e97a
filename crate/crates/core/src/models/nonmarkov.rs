//! Zero-temperature decay of a two-level system into a bosonic bath with
//! memory.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{positive, volterra};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, C64};

/// Bath correlation function `f(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    /// `f(t) = (γ/2τ_c) e^{−|t|/τ_c}`.
    Lorentzian,
    /// A single resonant mode, `f(t) = g²` with `g² = γ/2τ_c`.
    SingleMode,
    /// Samples `f(k dt)`, linearly interpolated and zero past the table.
    Tabulated { dt: f64, values: Vec<C64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonMarkovParams {
    pub gamma: f64,
    pub tau_c: f64,
    pub kernel: Kernel,
}

impl NonMarkovParams {
    pub fn new(gamma: f64, tau_c: f64, kernel: Kernel) -> Result<Self> {
        positive("gamma", gamma)?;
        positive("tau_c", tau_c)?;
        if let Kernel::Tabulated { dt, values } = &kernel {
            positive("dt", *dt)?;
            if values.len() < 2 {
                return Err(Error::InvalidParameter(
                    "tabulated kernel needs two samples".into(),
                ));
            }
        }
        Ok(Self {
            gamma,
            tau_c,
            kernel,
        })
    }

    pub fn lorentzian(gamma: f64, tau_c: f64) -> Result<Self> {
        Self::new(gamma, tau_c, Kernel::Lorentzian)
    }

    /// `χ = √(1 − 2γτ_c)`, imaginary in the strong-coupling regime.
    pub fn chi(&self) -> C64 {
        c(1.0 - 2.0 * self.gamma * self.tau_c, 0.0).sqrt()
    }

    pub fn kernel_value(&self, t: f64) -> C64 {
        let amplitude = self.gamma / (2.0 * self.tau_c);
        match &self.kernel {
            Kernel::Lorentzian => c(amplitude * (-t.abs() / self.tau_c).exp(), 0.0),
            Kernel::SingleMode => c(amplitude, 0.0),
            Kernel::Tabulated { dt, values } => {
                let x = t.abs() / dt;
                let k = x.floor() as usize;
                if k + 1 >= values.len() {
                    return if k + 1 == values.len() && x == k as f64 {
                        values[k]
                    } else {
                        c(0.0, 0.0)
                    };
                }
                let w = x - k as f64;
                values[k] * (1.0 - w) + values[k + 1] * w
            }
        }
    }

    /// Step used by the numerical route, at most `τ_c/50`.
    pub fn volterra_step(&self) -> f64 {
        let mut h = self.tau_c / 50.0;
        if let Kernel::Tabulated { dt, .. } = &self.kernel {
            h = h.min(*dt);
        }
        if let Kernel::SingleMode = self.kernel {
            h = h.min(0.02 / (self.gamma / (2.0 * self.tau_c)).sqrt());
        }
        h
    }
}

/// Printed Lorentzian amplitude
/// `c_t = e^{−t/2τ_c}[cosh(tχ/2τ_c) + χ⁻¹ sinh(tχ/2τ_c)]`.
pub fn lorentzian_c(gamma: f64, tau_c: f64, t: f64) -> f64 {
    let chi = c(1.0 - 2.0 * gamma * tau_c, 0.0).sqrt();
    let z = t / (2.0 * tau_c);
    let arg = chi * z;
    if chi.norm() < 1e-6 {
        let sinh_over_chi = c(z, 0.0) * (c(1.0, 0.0) + arg * arg / 6.0);
        return ((-z).exp() * (arg.cosh() + sinh_over_chi)).re;
    }
    // e^{−z}cosh(χz) and e^{−z}sinh(χz) without overflow at large z
    let slow = ((chi - 1.0) * z).exp();
    let fast = (-(chi + 1.0) * z).exp();
    ((slow + fast) * 0.5 + (slow - fast) / (chi * 2.0)).re
}

/// `c_t` for the configured kernel: closed forms where known, the Volterra
/// solver otherwise.
pub fn memory_c(p: &NonMarkovParams, t: f64) -> Result<C64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t must be non-negative, got {t}"
        )));
    }
    match p.kernel {
        Kernel::Lorentzian => Ok(c(lorentzian_c(p.gamma, p.tau_c, t), 0.0)),
        Kernel::SingleMode => Ok(c(((p.gamma / (2.0 * p.tau_c)).sqrt() * t).cos(), 0.0)),
        Kernel::Tabulated { .. } => Ok(memory_c_numeric(p, &[t])?[0]),
    }
}

/// `c_t` at each time from the Volterra equation, whatever the kernel.
pub fn memory_c_numeric(p: &NonMarkovParams, times: &[f64]) -> Result<Vec<C64>> {
    volterra::solve(|t| p.kernel_value(t), times, p.volterra_step(), 1e-5)
}

/// `Q_t = 1 − ⟨σz⟩_0 (1 − |c_t|²)`.
pub fn nonmarkov_q(p: &NonMarkovParams, sz0: f64, t: f64) -> Result<f64> {
    if sz0.abs() > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "|sz0| = {} > 1",
            sz0.abs()
        )));
    }
    let ct = memory_c(p, t)?;
    Ok(1.0 - sz0 * (1.0 - ct.norm_sqr()))
}

/// `D_Q = 1` for every memory kernel.
pub fn nonmarkov_dq(_p: &NonMarkovParams) -> f64 {
    1.0
}

/// Weak-coupling amplitude `e^{−γt/2}`.
pub fn weak_coupling_c(p: &NonMarkovParams, t: f64) -> f64 {
    (-p.gamma * t / 2.0).exp()
}

/// Heisenberg-picture map of the exact reduced dynamics:
/// `A_t = [[A⁺⁺|c|² + A⁻⁻(1−|c|²), A⁺⁻ c*], [A⁻⁺ c, A⁻⁻]]`.
pub fn dual_map(a0: &ComplexMatrix, ct: C64) -> Result<ComplexMatrix> {
    crate::linalg::ensure_dim(a0, 2)?;
    let p = ct.norm_sqr();
    Ok(ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            a0[(0, 0)] * p + a0[(1, 1)] * (1.0 - p),
            a0[(0, 1)] * ct.conj(),
            a0[(1, 0)] * ct,
            a0[(1, 1)],
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_starts_flat() {
        for &g in &[0.1, 0.5, 2.0] {
            assert!((lorentzian_c(1.0, g, 0.0) - 1.0).abs() < 1e-15);
            let h = 1e-6;
            let slope = (lorentzian_c(1.0, g, h) - 1.0) / h;
            assert!(slope.abs() < 1e-4);
        }
    }

    #[test]
    fn critical_coupling_is_continuous() {
        let a = lorentzian_c(1.0, 0.5, 1.3);
        let b = lorentzian_c(1.0, 0.5 + 1e-9, 1.3);
        assert!((a - b).abs() < 1e-7);
    }

    #[test]
    fn degree_is_one() {
        let p = NonMarkovParams::lorentzian(1.0, 3.0).unwrap();
        assert_eq!(nonmarkov_dq(&p), 1.0);
        assert!((nonmarkov_q(&p, 0.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tabulated_kernel_matches_lorentzian() {
        let (gamma, tau_c) = (1.0, 0.5);
        let dt = 0.005;
        let values = (0..2_000)
            .map(|k| {
                c(
                    gamma / (2.0 * tau_c) * (-(k as f64) * dt / tau_c).exp(),
                    0.0,
                )
            })
            .collect();
        let p = NonMarkovParams::new(gamma, tau_c, Kernel::Tabulated { dt, values }).unwrap();
        let v = memory_c(&p, 3.0).unwrap();
        assert!((v.re - lorentzian_c(gamma, tau_c, 3.0)).abs() < 1e-4);
    }
}
