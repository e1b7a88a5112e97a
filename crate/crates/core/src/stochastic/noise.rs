//! Stochastic Hamiltonians `H(t) = H₀ + ξ(t) K` driven by classical noise.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::{path_rng, Accumulator, QEstimate, StateEstimate};
use crate::error::{Error, Result};
use crate::linalg::{
    c, ensure_dim, hermitian_deviation, matrix_exponential, max_abs, ComplexMatrix, QuantumState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseFamily {
    /// `⟨ξ(t)ξ(s)⟩ = a² δ(t − s)`.
    GaussianWhite,
    /// Stationary Gauss–Markov noise with `⟨ξ(t)ξ(s)⟩ = a²/(2τ) e^{−|t−s|/τ}`,
    /// which tends to white noise of the same amplitude as `τ → 0`.
    OrnsteinUhlenbeck,
    /// `ξ = ±a`, flipping at rate `1/(2τ)` so that `⟨ξ(t)ξ(s)⟩ = a² e^{−|t−s|/τ}`.
    Telegraph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseProcess {
    pub family: NoiseFamily,
    pub amplitude: f64,
    pub correlation_time: f64,
    pub coupling: ComplexMatrix,
}

impl NoiseProcess {
    pub fn new(
        family: NoiseFamily,
        amplitude: f64,
        correlation_time: f64,
        coupling: ComplexMatrix,
    ) -> Result<Self> {
        let d = coupling.nrows();
        ensure_dim(&coupling, d)?;
        let deviation = hermitian_deviation(&coupling);
        if deviation > 1e-10 {
            return Err(Error::NotHermitian { deviation });
        }
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise amplitude must be non-negative, got {amplitude}"
            )));
        }
        let colored = family != NoiseFamily::GaussianWhite;
        if !(correlation_time >= 0.0 && correlation_time.is_finite())
            || (colored && correlation_time == 0.0)
        {
            return Err(Error::InvalidParameter(format!(
                "bad correlation time {correlation_time} for {family:?} noise"
            )));
        }
        let correlation_time = if colored { correlation_time } else { 0.0 };
        Ok(Self {
            family,
            amplitude,
            correlation_time,
            coupling,
        })
    }

    pub fn white(amplitude: f64, coupling: ComplexMatrix) -> Result<Self> {
        Self::new(NoiseFamily::GaussianWhite, amplitude, 0.0, coupling)
    }

    pub fn dim(&self) -> usize {
        self.coupling.nrows()
    }

    /// Stationary variance of the noise value; infinite for white noise.
    pub fn variance(&self) -> f64 {
        match self.family {
            NoiseFamily::GaussianWhite => f64::INFINITY,
            NoiseFamily::OrnsteinUhlenbeck => {
                self.amplitude * self.amplitude / (2.0 * self.correlation_time)
            }
            NoiseFamily::Telegraph => self.amplitude * self.amplitude,
        }
    }

    /// Largest step allowed when sampling coloured noise.
    pub fn max_step(&self) -> f64 {
        match self.family {
            NoiseFamily::GaussianWhite => f64::INFINITY,
            _ => self.correlation_time / 10.0,
        }
    }

    fn check_step(&self, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) || dt > self.max_step() * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "step {dt} must be positive and at most a tenth of the correlation time"
            )));
        }
        Ok(())
    }
}

/// One realization on a uniform grid of step `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    pub dt: f64,
    /// Process state at `k·dt`, `k = 0..=steps`: the noise value for
    /// coloured noise, the Wiener integral `∫₀ᵗ ξ` for white noise.
    pub nodes: Vec<f64>,
    /// Exact average of `ξ` over `[k·dt, (k+1)·dt)`.
    pub averages: Vec<f64>,
}

/// Exact sampler of `(ξ(t+h), ∫ₜ^{t+h} ξ)` given the present state.
struct Sampler<'a> {
    noise: &'a NoiseProcess,
    state: f64,
}

/// `2r − 3 + 4e^{−r} − e^{−2r}` without cancellation at small `r`.
fn ou_integral_factor(r: f64) -> f64 {
    if r > 0.5 {
        return 2.0 * r - 3.0 + 4.0 * (-r).exp() - (-2.0 * r).exp();
    }
    let mut sum = 0.0;
    let mut fact = 2.0;
    for n in 3..24 {
        fact *= n as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (4.0 - (2.0f64).powi(n)) * r.powi(n) / fact;
    }
    sum
}

impl<'a> Sampler<'a> {
    fn new<R: Rng + ?Sized>(noise: &'a NoiseProcess, rng: &mut R) -> Self {
        let state = match noise.family {
            NoiseFamily::GaussianWhite => 0.0,
            NoiseFamily::OrnsteinUhlenbeck => {
                let z: f64 = StandardNormal.sample(rng);
                z * noise.variance().sqrt()
            }
            NoiseFamily::Telegraph => {
                if rng.random::<bool>() {
                    noise.amplitude
                } else {
                    -noise.amplitude
                }
            }
        };
        Self { noise, state }
    }

    /// Advances by `h` and returns the average of `ξ` over the step.
    fn step<R: Rng + ?Sized>(&mut self, h: f64, rng: &mut R) -> f64 {
        let a = self.noise.amplitude;
        let tau = self.noise.correlation_time;
        match self.noise.family {
            NoiseFamily::GaussianWhite => {
                let z: f64 = StandardNormal.sample(rng);
                let dw = a * h.sqrt() * z;
                self.state += dw;
                dw / h
            }
            NoiseFamily::OrnsteinUhlenbeck => {
                let var = self.noise.variance();
                let r = h / tau;
                let decay = (-r).exp();
                let one_minus = -(-r).exp_m1();
                let v11 = var * -(-2.0 * r).exp_m1();
                let v22 = var * tau * tau * ou_integral_factor(r);
                let v12 = var * tau * one_minus * one_minus;
                let l11 = v11.sqrt();
                let l21 = if l11 > 0.0 { v12 / l11 } else { 0.0 };
                let l22 = (v22 - l21 * l21).max(0.0).sqrt();
                let z1: f64 = StandardNormal.sample(rng);
                let z2: f64 = StandardNormal.sample(rng);
                let integral = self.state * tau * one_minus + l21 * z1 + l22 * z2;
                self.state = self.state * decay + l11 * z1;
                integral / h
            }
            NoiseFamily::Telegraph => {
                let rate = 1.0 / (2.0 * tau);
                let mut left = h;
                let mut integral = 0.0;
                loop {
                    let e: f64 = Exp1.sample(rng);
                    let wait = e / rate;
                    if wait >= left {
                        integral += self.state * left;
                        break;
                    }
                    integral += self.state * wait;
                    left -= wait;
                    self.state = -self.state;
                }
                integral / h
            }
        }
    }
}

/// Samples one path on `[0, t_max]` with step `dt`.
///
/// Telegraph flips come from exponential clocks, so a fresh clock is drawn
/// at each step; this is exact because the clock is memoryless.
pub fn sample_noise_path(n: &NoiseProcess, t_max: f64, dt: f64, seed: u64) -> Result<NoisePath> {
    n.check_step(dt)?;
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t_max must be non-negative, got {t_max}"
        )));
    }
    let steps = (t_max / dt - 1e-9).ceil().max(0.0) as usize;
    let mut rng = path_rng(seed, 0);
    let mut sampler = Sampler::new(n, &mut rng);
    let mut nodes = Vec::with_capacity(steps + 1);
    let mut averages = Vec::with_capacity(steps);
    nodes.push(sampler.state);
    for _ in 0..steps {
        averages.push(sampler.step(dt, &mut rng));
        nodes.push(sampler.state);
    }
    Ok(NoisePath {
        dt,
        nodes,
        averages,
    })
}

fn validate(
    n: &NoiseProcess,
    base_h: &ComplexMatrix,
    rho0: &QuantumState,
    times: &[f64],
) -> Result<()> {
    ensure_dim(base_h, n.dim())?;
    let deviation = hermitian_deviation(base_h);
    if deviation > 1e-10 {
        return Err(Error::NotHermitian { deviation });
    }
    if rho0.dim() != n.dim() {
        return Err(Error::DimensionMismatch {
            expected: n.dim(),
            found: rho0.dim(),
        });
    }
    if times.first().is_some_and(|&t| t < 0.0) || times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidParameter(
            "times must be non-negative and ascending".into(),
        ));
    }
    Ok(())
}

/// Integration step: small against the Hamiltonian and noise scales and
/// within the coloured-noise limit.
fn propagation_step(n: &NoiseProcess, base_h: &ComplexMatrix) -> f64 {
    let d = n.dim() as f64;
    let hk = max_abs(&n.coupling) * d;
    let scale = max_abs(base_h) * d + n.amplitude * n.amplitude * hk * hk;
    let own = if n.family == NoiseFamily::GaussianWhite {
        f64::INFINITY
    } else {
        n.amplitude * hk
    };
    let cap = if scale > 0.0 {
        0.02 / scale
    } else {
        f64::INFINITY
    };
    let cap = cap.min(if own > 0.0 && own.is_finite() {
        0.05 / own
    } else {
        f64::INFINITY
    });
    cap.min(n.max_step())
}

/// Unitaries `U(t_k)` of one noise realization at each requested time.
pub fn path_unitaries(
    n: &NoiseProcess,
    base_h: &ComplexMatrix,
    times: &[f64],
    seed: u64,
    path: u64,
) -> Result<Vec<ComplexMatrix>> {
    let d = n.dim();
    let h_cap = propagation_step(n, base_h);
    let mut rng = path_rng(seed, path);
    let mut sampler = Sampler::new(n, &mut rng);
    let mut u = ComplexMatrix::identity(d, d);
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let steps = if h_cap.is_finite() {
                (span / h_cap).ceil().max(1.0) as usize
            } else {
                1
            };
            let h = span / steps as f64;
            for _ in 0..steps {
                let xi = sampler.step(h, &mut rng);
                let gen = (base_h + n.coupling.map(|z| z * xi)).map(|z| z * c(0.0, -h));
                u = matrix_exponential(&gen)? * u;
                // one Newton-Schulz step back onto the unitary group
                let drift = u.adjoint() * &u;
                u = &u * (ComplexMatrix::identity(d, d).map(|z| z * 1.5) - drift.map(|z| z * 0.5));
            }
            t = target;
        }
        out.push(u.clone());
    }
    Ok(out)
}

/// States `U ρ0 U†` and per-path `Q_t = Tr[U† ρ0 U]` for one realization.
pub fn noise_path_run(
    n: &NoiseProcess,
    base_h: &ComplexMatrix,
    rho0: &QuantumState,
    times: &[f64],
    seed: u64,
    path: u64,
) -> Result<(Vec<ComplexMatrix>, Vec<f64>)> {
    let us = path_unitaries(n, base_h, times, seed, path)?;
    let rho = rho0.matrix();
    let states = us.iter().map(|u| u * rho * u.adjoint()).collect();
    let qs = us
        .iter()
        .map(|u| (u.adjoint() * rho * u).trace().re)
        .collect();
    Ok((states, qs))
}

fn run(
    n: &NoiseProcess,
    base_h: &ComplexMatrix,
    rho0: &QuantumState,
    times: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<Accumulator> {
    validate(n, base_h, rho0, times)?;
    if n_paths == 0 {
        return Err(Error::InvalidParameter(
            "at least one path is needed".into(),
        ));
    }
    let mut acc = Accumulator::new(times.len(), n.dim());
    for path in 0..n_paths as u64 {
        let (states, qs) = noise_path_run(n, base_h, rho0, times, seed, path)?;
        acc.add(&states, &qs);
    }
    Ok(acc)
}

/// Noise-averaged `Q_t`; every path contributes exactly 1 up to rounding.
pub fn stochastic_q(
    n: &NoiseProcess,
    base_h: &ComplexMatrix,
    rho0: &QuantumState,
    times: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<QEstimate> {
    run(n, base_h, rho0, times, n_paths, seed)?.q(times, n.dim())
}

/// Noise-averaged states.
pub fn stochastic_states(
    n: &NoiseProcess,
    base_h: &ComplexMatrix,
    rho0: &QuantumState,
    times: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<StateEstimate> {
    Ok(run(n, base_h, rho0, times, n_paths, seed)?.states(times))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    #[test]
    fn series_factor_matches_direct_form() {
        for &r in &[0.3, 0.5] {
            let direct = 2.0 * r - 3.0 + 4.0 * (-r).exp() - (-2.0 * r).exp();
            assert!((ou_integral_factor(r) - direct).abs() < 1e-14);
        }
        assert!((ou_integral_factor(1e-3) - 2.0 / 3.0 * 1e-9).abs() < 1e-12);
    }

    #[test]
    fn zero_amplitude_is_silent() {
        for family in [
            NoiseFamily::GaussianWhite,
            NoiseFamily::OrnsteinUhlenbeck,
            NoiseFamily::Telegraph,
        ] {
            let n = NoiseProcess::new(family, 0.0, 1.0, pauli::sigma_z()).unwrap();
            let p = sample_noise_path(&n, 2.0, 0.05, 3).unwrap();
            assert!(p.nodes.iter().chain(&p.averages).all(|&x| x == 0.0));
        }
    }

    #[test]
    fn coloured_noise_needs_fine_steps() {
        let n = NoiseProcess::new(NoiseFamily::Telegraph, 1.0, 0.5, pauli::sigma_z()).unwrap();
        assert!(sample_noise_path(&n, 1.0, 0.1, 0).is_err());
        assert!(
            NoiseProcess::new(NoiseFamily::OrnsteinUhlenbeck, 1.0, 0.0, pauli::sigma_z()).is_err()
        );
    }

    #[test]
    fn telegraph_values_are_bounded() {
        let n = NoiseProcess::new(NoiseFamily::Telegraph, 2.0, 0.5, pauli::sigma_x()).unwrap();
        let p = sample_noise_path(&n, 5.0, 0.05, 9).unwrap();
        assert!(p.nodes.iter().all(|&x| x.abs() == 2.0));
        assert!(p.averages.iter().all(|&x| x.abs() <= 2.0 + 1e-12));
    }

    #[test]
    fn single_path_q_is_one() {
        let n =
            NoiseProcess::new(NoiseFamily::OrnsteinUhlenbeck, 1.5, 0.3, pauli::sigma_x()).unwrap();
        let rho = QuantumState::bloch(0.4, 1.1);
        let est = stochastic_q(&n, &pauli::sigma_z(), &rho, &[0.0, 0.5, 1.0], 1, 5).unwrap();
        assert!(est.max_path_deviation < 1e-12);
    }
}
