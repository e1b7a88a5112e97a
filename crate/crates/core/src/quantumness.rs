//! `Q_t` series, the degree of environment quantumness and related measures.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::{
    dual_liouvillian, liouvillian, propagate_series, stationary_state, LindbladModel,
};
use crate::error::{Error, Result};
use crate::linalg::{conjugate, identity, max_abs, trace_product, ComplexMatrix, QuantumState};
use crate::tolerance::Tolerances;

/// How the time-reversal tilde enters `Q_t`.
///
/// `None` propagates `A_0 = ρ0` under the dual generator, so that
/// `Q_∞ = d·Tr[ρ_∞ ρ0]`. `Conjugate` starts from `A_0 = ρ0*` instead, which
/// gives `Q_∞ = d·Tr[ρ_∞* ρ0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reversal {
    #[default]
    None,
    Conjugate,
}

impl Reversal {
    pub fn apply(self, m: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Reversal::None => m.clone(),
            Reversal::Conjugate => conjugate(m),
        }
    }
}

/// Sampled `(t, Q_t)` with the dimension that bounds it.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumnessSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub dim_s: usize,
}

impl QuantumnessSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, dim_s: usize) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: values.len(),
            });
        }
        if times.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::InvalidParameter("times must be ascending".into()));
        }
        Ok(Self {
            times,
            values,
            dim_s,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Fails with the first sample outside `[0, dim_s]` beyond `slack`.
    pub fn check_bounds(&self, slack: f64) -> Result<()> {
        let bound = self.dim_s as f64;
        match self
            .values
            .iter()
            .find(|&&q| !(q >= -slack && q <= bound + slack))
        {
            Some(&value) => Err(Error::BoundViolation { value, bound }),
            None => Ok(()),
        }
    }

    pub fn max_deviation_from_one(&self) -> f64 {
        self.values
            .iter()
            .fold(0.0, |acc, q| acc.max((q - 1.0).abs()))
    }

    /// First sample after which `Q` changes by less than `rel_tol` (relative)
    /// over every window of length `period`.
    pub fn stationary_from(&self, period: f64, rel_tol: f64) -> Option<(f64, f64)> {
        let n = self.len();
        let mut candidate: Option<usize> = None;
        for i in 0..n {
            let end = self.times[i] + period;
            if end > *self.times.last()? {
                break;
            }
            let q = self.values[i];
            let settled = (i..n)
                .take_while(|&j| self.times[j] <= end)
                .all(|j| (self.values[j] - q).abs() <= rel_tol * q.abs().max(1.0));
            if settled {
                candidate.get_or_insert(i);
            } else {
                candidate = None;
            }
        }
        candidate.map(|i| (self.times[i], self.values[i]))
    }
}

/// Which eigenvalue branch of the stationary state realizes `D_Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `d·λ_max − 1`.
    Upper,
    /// `1 − d·λ_min`.
    Lower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumnessReport {
    pub dq: f64,
    /// Pure state attaining `|Q_∞ − 1| = D_Q`.
    pub optimal_state: QuantumState,
    pub q_infinity: f64,
    pub stationary: QuantumState,
    pub branch: Branch,
    pub reversal: Reversal,
}

fn check_state(m: &LindbladModel, rho0: &QuantumState) -> Result<()> {
    if rho0.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: rho0.dim(),
        });
    }
    Ok(())
}

/// `Q_t = Tr[A_t]` where `A_t` solves the dual Lindblad equation from
/// `A_0 = ρ0`.
pub fn q_series(
    m: &LindbladModel,
    rho0: &QuantumState,
    times: &[f64],
) -> Result<QuantumnessSeries> {
    q_series_with(m, rho0, times, Reversal::None)
}

pub fn q_series_with(
    m: &LindbladModel,
    rho0: &QuantumState,
    times: &[f64],
    reversal: Reversal,
) -> Result<QuantumnessSeries> {
    check_state(m, rho0)?;
    let a0 = reversal.apply(rho0.matrix());
    let ops = propagate_series(&dual_liouvillian(m), &a0, times)?;
    let values = ops.iter().map(|a| a.trace().re).collect();
    let series = QuantumnessSeries::new(times.to_vec(), values, m.dim())?;
    series.check_bounds(Tolerances::default().bound)?;
    Ok(series)
}

/// The matrix `S` with `Q_∞ = d·Tr[S ρ0]`.
fn effective_stationary(stationary: &QuantumState, reversal: Reversal) -> QuantumState {
    match reversal {
        Reversal::None => stationary.clone(),
        Reversal::Conjugate => crate::dynamics::time_reversed_state(stationary),
    }
}

/// `Q_∞` from the unique stationary state.
pub fn q_stationary(m: &LindbladModel, rho0: &QuantumState) -> Result<f64> {
    q_stationary_with(m, rho0, Reversal::None)
}

pub fn q_stationary_with(
    m: &LindbladModel,
    rho0: &QuantumState,
    reversal: Reversal,
) -> Result<f64> {
    check_state(m, rho0)?;
    let rho_inf = stationary_state(&liouvillian(m))?;
    let s = effective_stationary(&rho_inf, reversal);
    Ok(m.dim() as f64 * trace_product(s.matrix(), rho0.matrix()).re)
}

/// `D_Q` with its optimal initial state.
pub fn degree_of_quantumness(m: &LindbladModel) -> Result<QuantumnessReport> {
    degree_of_quantumness_with(m, Reversal::None)
}

pub fn degree_of_quantumness_with(
    m: &LindbladModel,
    reversal: Reversal,
) -> Result<QuantumnessReport> {
    let stationary = stationary_state(&liouvillian(m))?;
    report_from_stationary(stationary, reversal)
}

/// Builds the report from a known stationary state.
pub fn report_from_stationary(
    stationary: QuantumState,
    reversal: Reversal,
) -> Result<QuantumnessReport> {
    let d = stationary.dim() as f64;
    let s = effective_stationary(&stationary, reversal);
    let spec = s.spectrum();
    let upper = d * spec.max_eigenvalue() - 1.0;
    let lower = 1.0 - d * spec.min_eigenvalue();
    // ties (every qubit) go to the upper branch
    let (branch, index, dq) = if upper >= lower - 1e-12 {
        (Branch::Upper, spec.dim() - 1, upper)
    } else {
        (Branch::Lower, 0, lower)
    };
    let optimal_state = QuantumState::pure(&spec.eigenvector(index))?;
    let q_infinity = d * trace_product(s.matrix(), optimal_state.matrix()).re;
    let bound = d - 1.0;
    let slack = Tolerances::default().bound;
    if dq < -slack || dq > bound + slack {
        return Err(Error::BoundViolation { value: dq, bound });
    }
    Ok(QuantumnessReport {
        dq: dq.max(0.0),
        optimal_state,
        q_infinity,
        stationary,
        branch,
        reversal,
    })
}

/// `|d·Tr[ρ̃_∞ ρ0] − 1|`, where `reversed_stationary` already is `ρ̃_∞`.
pub fn dq_geometric(reversed_stationary: &QuantumState, rho0: &QuantumState) -> Result<f64> {
    if reversed_stationary.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: reversed_stationary.dim(),
            found: rho0.dim(),
        });
    }
    let d = rho0.dim() as f64;
    Ok((d * trace_product(reversed_stationary.matrix(), rho0.matrix()).re - 1.0).abs())
}

/// `max_ρ0 Tr[ρ̃_∞ ρ0]`, the largest eigenvalue of the stationary state.
pub fn renormalized_degree(stationary: &QuantumState) -> f64 {
    stationary.spectrum().max_eigenvalue()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitalityCheck {
    pub unital: bool,
    /// `‖Σ T T† − I‖_max`.
    pub residual: f64,
}

/// `Σ T†T`'s deviation from the identity.
pub fn channel_residual(kraus: &[ComplexMatrix]) -> Result<f64> {
    let d = kraus
        .first()
        .map(|k| k.nrows())
        .ok_or_else(|| Error::InvalidParameter("empty Kraus list".into()))?;
    let mut sum = ComplexMatrix::zeros(d, d);
    for k in kraus {
        crate::linalg::ensure_dim(k, d)?;
        sum += k.adjoint() * k;
    }
    Ok(max_abs(&(sum - identity(d))))
}

/// Whether a channel is unital, `Σ T T† = I`.
pub fn unitality_check(kraus: &[ComplexMatrix]) -> Result<UnitalityCheck> {
    let residual = channel_residual(kraus)?;
    if residual > 1e-8 {
        return Err(Error::InvalidChannel { residual });
    }
    let d = kraus[0].nrows();
    let mut sum = ComplexMatrix::zeros(d, d);
    for k in kraus {
        sum += k * k.adjoint();
    }
    let residual = max_abs(&(sum - identity(d)));
    Ok(UnitalityCheck {
        unital: residual <= Tolerances::default().validity,
        residual,
    })
}

/// `Q_t` of one factor of a bipartite model, treating the other factor as
/// part of the environment with initial state `other`.
///
/// `Q_t = Tr[A_t (I ⊗ ρ_other)]` with `A_0 = ρ_sys ⊗ I` (system first) or the
/// mirrored embedding when `system_factor == 1`.
pub fn subsystem_q_series(
    m: &LindbladModel,
    dims: [usize; 2],
    system_factor: usize,
    rho_sys: &QuantumState,
    other: &QuantumState,
    times: &[f64],
    reversal: Reversal,
) -> Result<QuantumnessSeries> {
    if dims[0] * dims[1] != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: dims[0] * dims[1],
        });
    }
    if system_factor > 1 {
        return Err(Error::InvalidParameter(format!(
            "factor {system_factor} of a bipartite model"
        )));
    }
    let (ds, de) = (dims[system_factor], dims[1 - system_factor]);
    if rho_sys.dim() != ds {
        return Err(Error::DimensionMismatch {
            expected: ds,
            found: rho_sys.dim(),
        });
    }
    if other.dim() != de {
        return Err(Error::DimensionMismatch {
            expected: de,
            found: other.dim(),
        });
    }
    let sys = reversal.apply(rho_sys.matrix());
    let (a0, env) = if system_factor == 0 {
        (
            sys.kronecker(&identity(de)),
            identity(ds).kronecker(other.matrix()),
        )
    } else {
        (
            identity(de).kronecker(&sys),
            other.matrix().kronecker(&identity(ds)),
        )
    };
    let ops = propagate_series(&dual_liouvillian(m), &a0, times)?;
    let values = ops.iter().map(|a| trace_product(a, &env).re).collect();
    let series = QuantumnessSeries::new(times.to_vec(), values, ds)?;
    series.check_bounds(Tolerances::default().bound)?;
    Ok(series)
}

/// Uniform grid `0, t_max/steps, …, t_max`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![0.0];
    }
    (0..=steps)
        .map(|k| t_max * k as f64 / steps as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    fn damping(gamma: f64) -> LindbladModel {
        LindbladModel::diagonal(
            pauli::sigma_z().map(|z| z * 0.5),
            vec![(gamma, pauli::lowering())],
        )
        .unwrap()
    }

    #[test]
    fn starts_at_one() {
        let s = q_series(&damping(1.0), &QuantumState::bloch(0.3, 0.2), &[0.0, 1.0]).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_start_is_flat() {
        let m = damping(0.7);
        let s = q_series(
            &m,
            &QuantumState::maximally_mixed(2),
            &uniform_grid(5.0, 10),
        )
        .unwrap();
        assert!(s.max_deviation_from_one() < 1e-12);
        assert!((q_stationary(&m, &QuantumState::maximally_mixed(2)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_temperature_decay_is_maximal() {
        let r = degree_of_quantumness(&damping(1.0)).unwrap();
        assert!((r.dq - 1.0).abs() < 1e-10);
        assert_eq!(r.branch, Branch::Upper);
        assert!((r.q_infinity - 2.0).abs() < 1e-10);
    }

    #[test]
    fn unitality_examples() {
        let p: f64 = 0.3;
        let deph = [
            identity(2).map(|z| z * (1.0 - p).sqrt()),
            pauli::sigma_z().map(|z| z * p.sqrt()),
        ];
        assert!(unitality_check(&deph).unwrap().unital);
        let t0 = crate::linalg::real_matrix(2, 2, &[(1.0 - p).sqrt(), 0.0, 0.0, 1.0]);
        let t1 = pauli::lowering().map(|z| z * p.sqrt());
        assert!(!unitality_check(&[t0, t1]).unwrap().unital);
        assert!(matches!(
            unitality_check(&[identity(2).map(|z| z * 2.0)]),
            Err(Error::InvalidChannel { .. })
        ));
    }

    #[test]
    fn stationary_detection() {
        let times = uniform_grid(10.0, 100);
        let values = times.iter().map(|t| 1.0 + (-3.0 * t).exp()).collect();
        let s = QuantumnessSeries::new(times, values, 2).unwrap();
        let (t, _) = s.stationary_from(1.0, 1e-9).unwrap();
        assert!(t > 6.0 && t < 7.5);
    }
}
