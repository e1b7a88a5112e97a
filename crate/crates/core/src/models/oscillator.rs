//! Harmonic oscillator in a thermal bath, truncated to a finite number basis.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector};

use super::positive;
use crate::dynamics::{dual_liouvillian, propagate_series, LindbladModel};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, QuantumState};
use crate::microscopic::annihilation;
use crate::quantumness::{renormalized_degree, QuantumnessSeries};

/// Tail probability above the truncation that is tolerated.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Bound on the relative truncation error of a numerically propagated `Q_t`.
pub const Q_TRUNCATION_TOLERANCE: f64 = 1e-4;

const ALARM_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub gamma: f64,
    pub beta_hw0: f64,
    /// Highest number state kept; the basis has `n_max + 1` levels.
    pub n_max: usize,
    /// Oscillator frequency; only enters the Hamiltonian.
    pub omega0: f64,
}

impl OscillatorParams {
    pub fn new(gamma: f64, beta_hw0: f64, n_max: usize) -> Result<Self> {
        positive("gamma", gamma)?;
        positive("beta_hw0", beta_hw0)?;
        if n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        Ok(Self {
            gamma,
            beta_hw0,
            n_max,
            omega0: 1.0,
        })
    }

    /// Parameters with a prescribed mean occupation `n_th`.
    pub fn from_occupation(gamma: f64, n_th: f64, n_max: usize) -> Result<Self> {
        positive("n_th", n_th)?;
        Self::new(gamma, (1.0 + 1.0 / n_th).ln(), n_max)
    }

    /// Smallest truncation whose stationary tail is below `tol`.
    pub fn with_tail(gamma: f64, beta_hw0: f64, tol: f64) -> Result<Self> {
        positive("beta_hw0", beta_hw0)?;
        let n_max = (tol.ln() / -beta_hw0).ceil().max(1.0) as usize;
        Self::new(gamma, beta_hw0, n_max)
    }

    /// Boltzmann ratio `x = e^{−βħω₀}`.
    pub fn boltzmann(&self) -> f64 {
        (-self.beta_hw0).exp()
    }

    pub fn n_th(&self) -> f64 {
        super::thermal_occupation(self.beta_hw0)
    }

    pub fn kappa(&self) -> f64 {
        self.gamma * (self.n_th() + 1.0)
    }

    pub fn zeta(&self) -> f64 {
        self.gamma * self.n_th()
    }

    pub fn levels(&self) -> usize {
        self.n_max + 1
    }

    /// Thermal weight above `n_max`, `x^{n_max+1}`.
    pub fn stationary_tail(&self) -> f64 {
        self.boltzmann().powi(self.levels() as i32)
    }

    pub fn model(&self) -> Result<LindbladModel> {
        let a = annihilation(self.levels());
        let number = a.adjoint() * &a;
        LindbladModel::diagonal(
            number.map(|z| z * self.omega0),
            vec![(self.kappa(), a.clone()), (self.zeta(), a.adjoint())],
        )
    }
}

/// `Q_t = e^{(κ−ζ)t} = e^{γt}`, for any initial state.
pub fn oscillator_q(p: &OscillatorParams, t: f64) -> f64 {
    ((p.kappa() - p.zeta()) * t).exp()
}

/// `Q_t` from dual propagation in the truncated basis.
///
/// Truncation turns `[a, a†]` into `I − (n_max+1)|n_max⟩⟨n_max|`, so
/// `dQ/dt = γQ − γ(n_max+1)A_{n_max n_max}`. The relative error of a
/// normalized state is therefore `γ(n_max+1)∫₀ᵗ e^{−γs} A_{n_max n_max}(s) ds`,
/// estimated by the trapezoid rule on a refined grid; it must stay below
/// [`Q_TRUNCATION_TOLERANCE`].
pub fn oscillator_q_numeric(
    p: &OscillatorParams,
    rho0: &QuantumState,
    times: &[f64],
) -> Result<QuantumnessSeries> {
    if rho0.dim() != p.levels() {
        return Err(Error::DimensionMismatch {
            expected: p.levels(),
            found: rho0.dim(),
        });
    }
    if times.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidParameter(
            "times must be finite and non-negative".into(),
        ));
    }
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let mut grid: Vec<f64> = times.to_vec();
    grid.extend((0..=ALARM_NODES).map(|k| horizon * k as f64 / ALARM_NODES as f64));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let model = p.model()?;
    let ops = propagate_series(&dual_liouvillian(&model), rho0.matrix(), &grid)?;
    let (top, rate) = (p.n_max, p.kappa() - p.zeta());
    let weight = |k: usize| (-rate * grid[k]).exp() * ops[k][(top, top)].re;
    let mut leak = 0.0;
    let mut errors = Vec::with_capacity(grid.len());
    errors.push(0.0);
    for k in 1..grid.len() {
        leak += 0.5 * (grid[k] - grid[k - 1]) * (weight(k) + weight(k - 1));
        errors.push((rate * p.levels() as f64 * leak).abs());
    }
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let k = grid
            .iter()
            .position(|&g| g == t)
            .expect("requested time is on the grid");
        if errors[k] > Q_TRUNCATION_TOLERANCE {
            return Err(Error::TruncationTail {
                tail: errors[k],
                tolerance: Q_TRUNCATION_TOLERANCE,
            });
        }
        values.push(ops[k].trace().re);
    }
    QuantumnessSeries::new(times.to_vec(), values, p.levels())
}

/// `D_{Q_R} = 1 − e^{−βħω₀}`.
pub fn oscillator_dqr(p: &OscillatorParams) -> f64 {
    -(-p.beta_hw0).exp_m1()
}

/// Truncated thermal state `x^n (1 − x)/(1 − x^{n_max+1})`.
pub fn truncated_thermal_state(p: &OscillatorParams) -> QuantumState {
    let x = p.boltzmann();
    let mut weights: Vec<f64> = (0..p.levels()).map(|n| x.powi(n as i32)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let m = ComplexMatrix::from_diagonal(&DVector::from_iterator(
        p.levels(),
        weights.iter().map(|&w| c(w, 0.0)),
    ));
    QuantumState::new(m).expect("normalized diagonal state")
}

/// Stationary populations of a phase-covariant model from its rate equations.
///
/// Coherences decouple from populations, so the stationary state is
/// diagonal with the null vector of the population generator
/// `W_{mn} = Σ_{μν} a_{μν} ⟨m|V_ν|n⟩* ⟨m|V_μ|n⟩`.
pub fn stationary_populations(model: &LindbladModel) -> Result<Vec<f64>> {
    let d = model.dim();
    let ops = model.jump_ops();
    let rates = model.rates();
    let mut w = DMatrix::<f64>::zeros(d, d);
    for (mu, vm) in ops.iter().enumerate() {
        for (nu, vn) in ops.iter().enumerate() {
            let a = rates[(mu, nu)];
            if a.norm() == 0.0 {
                continue;
            }
            for n in 0..d {
                for m in 0..d {
                    if m != n {
                        w[(m, n)] += (a * vn[(m, n)].conj() * vm[(m, n)]).re;
                    }
                }
            }
        }
    }
    for n in 0..d {
        let out: f64 = (0..d).filter(|&m| m != n).map(|m| w[(m, n)]).sum();
        w[(n, n)] = -out;
    }
    // replace one balance equation by the normalization
    for n in 0..d {
        w[(d - 1, n)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(d);
    rhs[d - 1] = 1.0;
    let p = w
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular population generator".into()))?;
    Ok(p.iter().copied().collect())
}

/// `D_{Q_R}` as the largest eigenvalue of the numerically computed
/// stationary state.
pub fn oscillator_dqr_numeric(p: &OscillatorParams) -> Result<f64> {
    let tail = p.stationary_tail();
    if tail > TAIL_TOLERANCE {
        return Err(Error::TruncationTail {
            tail,
            tolerance: TAIL_TOLERANCE,
        });
    }
    let pops = stationary_populations(&p.model()?)?;
    let m = ComplexMatrix::from_diagonal(&DVector::from_iterator(
        pops.len(),
        pops.iter().map(|&w| c(w, 0.0)),
    ));
    let state = QuantumState::with_tolerance(m, vec![p.levels()], 1e-9)
        .map_err(|e| Error::Numerical(format!("stationary populations: {e}")))?;
    Ok(renormalized_degree(&state))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_limits() {
        let cold = OscillatorParams::new(1.0, 40.0, 5).unwrap();
        assert!((oscillator_dqr(&cold) - 1.0).abs() < 1e-15);
        let hot = OscillatorParams::new(1.0, 1e-9, 5).unwrap();
        assert!(oscillator_dqr(&hot) < 1e-8);
        let p = OscillatorParams::new(0.5, 1.0, 10).unwrap();
        assert!((oscillator_q(&p, 4.0) - 2f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn occupation_round_trip() {
        let p = OscillatorParams::from_occupation(1.0, 1.0, 60).unwrap();
        assert!((p.n_th() - 1.0).abs() < 1e-12);
        assert!((p.boltzmann() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tail_sized_truncation() {
        let p = OscillatorParams::with_tail(1.0, 1.0, 1e-10).unwrap();
        assert!(p.stationary_tail() <= 1e-10);
        assert!(oscillator_dqr_numeric(&OscillatorParams::new(1.0, 0.1, 20).unwrap()).is_err());
    }

    #[test]
    fn populations_are_geometric() {
        let p = OscillatorParams::new(1.0, 0.7, 12).unwrap();
        let pops = stationary_populations(&p.model().unwrap()).unwrap();
        let exact = truncated_thermal_state(&p);
        for (n, w) in pops.iter().enumerate() {
            assert!((w - exact.matrix()[(n, n)].re).abs() < 1e-13);
        }
    }
}
