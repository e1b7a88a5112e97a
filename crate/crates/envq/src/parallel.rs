//! Multi-threaded Monte Carlo. Paths run concurrently but are summed in
//! path order, so results match the sequential library routines bit for bit.

use envq_core::linalg::{ensure_dim, hermitian_deviation, ComplexMatrix, QuantumState};
use envq_core::stochastic::collisional::collision_path_run;
use envq_core::stochastic::noise::noise_path_run;
use envq_core::stochastic::{
    Accumulator, CollisionalModel, NoiseProcess, QEstimate, StateEstimate,
};
use envq_core::{Error, Result};
use rayon::prelude::*;

const CHUNK: usize = 256;

type PathRun = (Vec<ComplexMatrix>, Vec<f64>);

fn accumulate<F>(n_paths: usize, points: usize, dim: usize, run: F) -> Result<Accumulator>
where
    F: Fn(u64) -> Result<PathRun> + Sync,
{
    if n_paths == 0 {
        return Err(Error::InvalidParameter(
            "at least one path is needed".into(),
        ));
    }
    let mut acc = Accumulator::new(points, dim);
    for start in (0..n_paths).step_by(CHUNK) {
        let end = (start + CHUNK).min(n_paths);
        let runs: Vec<Result<PathRun>> = (start..end)
            .into_par_iter()
            .map(|p| run(p as u64))
            .collect();
        for r in runs {
            let (mats, qs) = r?;
            acc.add(&mats, &qs);
        }
    }
    Ok(acc)
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.first().is_some_and(|&t| t < 0.0) || times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidParameter(
            "times must be non-negative and ascending".into(),
        ));
    }
    Ok(())
}

fn check_dim(expected: usize, rho0: &QuantumState) -> Result<()> {
    if rho0.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: rho0.dim(),
        });
    }
    Ok(())
}

fn collisional(
    m: &CollisionalModel,
    rho0: &QuantumState,
    times: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<Accumulator> {
    check_dim(m.dim(), rho0)?;
    check_times(times)?;
    accumulate(n_paths, times.len(), m.dim(), |p| {
        collision_path_run(m, rho0, times, seed, p)
    })
}

pub fn collisional_q(
    m: &CollisionalModel,
    rho0: &QuantumState,
    times: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<QEstimate> {
    let est = collisional(m, rho0, times, n_paths, seed)?.q(times, m.dim())?;
    est.series.check_bounds(1e-8)?;
    Ok(est)
}

pub fn collisional_states(
    m: &CollisionalModel,
    rho0: &QuantumState,
    times: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<StateEstimate> {
    Ok(collisional(m, rho0, times, n_paths, seed)?.states(times))
}

fn stochastic(
    n: &NoiseProcess,
    base_h: &ComplexMatrix,
    rho0: &QuantumState,
    times: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<Accumulator> {
    check_dim(n.dim(), rho0)?;
    check_times(times)?;
    ensure_dim(base_h, n.dim())?;
    let deviation = hermitian_deviation(base_h);
    if deviation > 1e-10 {
        return Err(Error::NotHermitian { deviation });
    }
    accumulate(n_paths, times.len(), n.dim(), |p| {
        noise_path_run(n, base_h, rho0, times, seed, p)
    })
}

pub fn stochastic_q(
    n: &NoiseProcess,
    base_h: &ComplexMatrix,
    rho0: &QuantumState,
    times: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<QEstimate> {
    let est = stochastic(n, base_h, rho0, times, n_paths, seed)?.q(times, n.dim())?;
    est.series.check_bounds(1e-8)?;
    Ok(est)
}

pub fn stochastic_states(
    n: &NoiseProcess,
    base_h: &ComplexMatrix,
    rho0: &QuantumState,
    times: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<StateEstimate> {
    Ok(stochastic(n, base_h, rho0, times, n_paths, seed)?.states(times))
}

/// `f` over `items` concurrently, results in input order.
pub fn ordered_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}
