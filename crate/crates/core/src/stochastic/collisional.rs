//! Free evolution interrupted by a channel at renewal-process times.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::channels::{apply, apply_dual};
use super::{path_rng, Accumulator, QEstimate, StateEstimate, WaitingTime};
use crate::dynamics::LindbladModel;
use crate::error::{Error, Result};
use crate::linalg::{
    c, ensure_dim, hermitian_deviation, matrix_exponential, ComplexMatrix, QuantumState,
};
use crate::quantumness::{channel_residual, QuantumnessSeries, UnitalityCheck};

/// Remaining event probability at which the series stops by itself.
pub const SERIES_STOP: f64 = 1e-12;
/// Largest tolerated event probability beyond an explicit `n_max`.
pub const SERIES_TAIL: f64 = 1e-8;
/// Lattice steps per mean waiting time.
pub const STEPS_PER_MEAN: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionalModel {
    free_h: ComplexMatrix,
    kraus: Vec<ComplexMatrix>,
    waiting: WaitingTime,
}

impl CollisionalModel {
    pub fn new(
        free_h: ComplexMatrix,
        kraus: Vec<ComplexMatrix>,
        waiting: WaitingTime,
    ) -> Result<Self> {
        let d = free_h.nrows();
        ensure_dim(&free_h, d)?;
        let deviation = hermitian_deviation(&free_h);
        if deviation > 1e-10 {
            return Err(Error::NotHermitian { deviation });
        }
        for t in &kraus {
            ensure_dim(t, d)?;
        }
        let residual = channel_residual(&kraus)?;
        if residual > 1e-10 {
            return Err(Error::InvalidChannel { residual });
        }
        waiting.validate()?;
        Ok(Self {
            free_h,
            kraus,
            waiting,
        })
    }

    pub fn dim(&self) -> usize {
        self.free_h.nrows()
    }

    pub fn free_hamiltonian(&self) -> &ComplexMatrix {
        &self.free_h
    }

    pub fn collision(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn waiting(&self) -> WaitingTime {
        self.waiting
    }

    /// `e^{−iHt}`.
    pub fn free_unitary(&self, t: f64) -> Result<ComplexMatrix> {
        matrix_exponential(&self.free_h.map(|z| z * c(0.0, -t)))
    }

    /// Lindblad model `−i[H, ρ] + γ_c (ℰ[ρ] − ρ)` reached with exponential
    /// waiting of rate `γ_c`.
    pub fn poisson_lindblad(&self) -> Result<LindbladModel> {
        match self.waiting {
            WaitingTime::Exponential { rate } => LindbladModel::diagonal(
                self.free_h.clone(),
                self.kraus.iter().map(|t| (rate, t.clone())).collect(),
            ),
            _ => Err(Error::InvalidParameter(
                "a Lindblad counterpart needs exponential waiting".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollisionalMode {
    MonteCarlo {
        n_paths: usize,
        seed: u64,
    },
    /// Deterministic sum over event numbers; `None` sums until the remaining
    /// event probability is negligible.
    Series {
        n_max: Option<usize>,
    },
}

fn conj(u: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    u * x * u.adjoint()
}

fn conj_dual(u: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    u.adjoint() * x * u
}

/// Waiting times on a lattice `jh` chosen so that the evaluation time `t`
/// sits at the midpoint of a cell, `t = (N + ½)h`. Each cell's probability
/// is split between its end points so that the mean inside the cell is
/// kept; with `t` mid-cell this makes the lattice error second order in `h`.
struct Lattice {
    h: f64,
    /// `q_j` for `j = 0..=N`.
    q: Vec<f64>,
    cum: Vec<f64>,
}

impl Lattice {
    fn new(w: &WaitingTime, t: f64) -> Self {
        let h0 = w.mean() / STEPS_PER_MEAN;
        let n = (t / h0 - 0.5).ceil().max(0.0) as usize;
        let h = t / (n as f64 + 0.5);
        let mut q = vec![0.0; n + 2];
        for j in 0..=n {
            let (a, b) = (j as f64 * h, (j + 1) as f64 * h);
            let mass = w.cdf(b) - w.cdf(a);
            let local_mean = (w.partial_mean(b) - w.partial_mean(a)) - a * mass;
            let upper = (local_mean / h).clamp(0.0, mass);
            q[j] += mass - upper;
            q[j + 1] += upper;
        }
        q.truncate(n + 1);
        let mut cum = Vec::with_capacity(q.len());
        let mut acc = 0.0;
        for &m in &q {
            acc += m;
            cum.push(acc);
        }
        Self { h, q, cum }
    }

    fn points(&self) -> usize {
        self.q.len()
    }

    /// Probability of at least one event within `t − ih`.
    fn cdf_from(&self, i: usize) -> f64 {
        self.cum[self.points() - 1 - i]
    }
}

fn validate(m: &CollisionalModel, rho0: &QuantumState, times: &[f64]) -> Result<()> {
    if rho0.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
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

fn unitary_powers(m: &CollisionalModel, h: f64, n: usize) -> Result<Vec<ComplexMatrix>> {
    let step = m.free_unitary(h)?;
    let mut out = Vec::with_capacity(n);
    out.push(ComplexMatrix::identity(m.dim(), m.dim()));
    for k in 1..n {
        let next = &step * &out[k - 1];
        out.push(next);
    }
    Ok(out)
}

fn check_stop(tail: f64, n: usize, n_max: Option<usize>) -> Result<bool> {
    match n_max {
        Some(limit) if n >= limit => {
            if tail > SERIES_TAIL {
                Err(Error::TruncationTail {
                    tail,
                    tolerance: SERIES_TAIL,
                })
            } else {
                Ok(true)
            }
        }
        Some(_) => Ok(tail == 0.0),
        None => {
            if n > 100_000 {
                return Err(Error::TruncationTail {
                    tail,
                    tolerance: SERIES_STOP,
                });
            }
            Ok(tail < SERIES_STOP)
        }
    }
}

/// Number of collisions up to `t` with deterministic spacing.
fn deterministic_count(interval: f64, t: f64, n_max: Option<usize>) -> Result<usize> {
    let k = (t / interval).floor() as usize;
    match n_max {
        Some(limit) if k > limit => Err(Error::TruncationTail {
            tail: 1.0,
            tolerance: SERIES_TAIL,
        }),
        _ => Ok(k),
    }
}

/// Dual operator `Λ*_t[A₀]` summed over event numbers.
///
/// With `Z₀(u) = P₀(u) 𝒢*_u A₀` and
/// `Zₙ(u) = Σ_j q_j 𝒢*_{jh} ℰ* Zₙ₋₁(u − jh)`, the dual map is `Σₙ Zₙ(t)`.
fn series_dual(
    m: &CollisionalModel,
    a0: &ComplexMatrix,
    t: f64,
    n_max: Option<usize>,
) -> Result<ComplexMatrix> {
    if t == 0.0 {
        return Ok(a0.clone());
    }
    if let WaitingTime::Deterministic { interval } = m.waiting {
        let k = deterministic_count(interval, t, n_max)?;
        let step = m.free_unitary(interval)?;
        let mut a = conj_dual(&m.free_unitary(t - k as f64 * interval)?, a0);
        for _ in 0..k {
            a = conj_dual(&step, &apply_dual(&m.kraus, &a));
        }
        return Ok(a);
    }
    let lat = Lattice::new(&m.waiting, t);
    let n_pts = lat.points();
    let powers = unitary_powers(m, lat.h, n_pts)?;
    let u_t = m.free_unitary(t)?;
    let mut z: Vec<ComplexMatrix> = (0..n_pts)
        .map(|i| {
            let u = &u_t * powers[i].adjoint();
            conj_dual(&u, a0).map(|x| x * (1.0 - lat.cdf_from(i)))
        })
        .collect();
    // P(more than n events within t − ih)
    let mut tail: Vec<f64> = (0..n_pts).map(|i| lat.cdf_from(i)).collect();
    let mut total = z[0].clone();
    let mut n = 0;
    while !check_stop(tail[0], n, n_max)? {
        n += 1;
        let b: Vec<ComplexMatrix> = z.iter().map(|x| apply_dual(&m.kraus, x)).collect();
        let mut z_next = Vec::with_capacity(n_pts);
        let mut tail_next = Vec::with_capacity(n_pts);
        for i in 0..n_pts {
            let mut acc = ComplexMatrix::zeros(m.dim(), m.dim());
            let mut p = 0.0;
            for j in 0..n_pts - i {
                let qj = lat.q[j];
                if qj == 0.0 {
                    continue;
                }
                acc += conj_dual(&powers[j], &b[i + j]).map(|x| x * qj);
                p += qj * tail[i + j];
            }
            z_next.push(acc);
            tail_next.push(p);
        }
        total += &z_next[0];
        z = z_next;
        tail = tail_next;
    }
    Ok(total)
}

/// Averaged state at `t`, summed over event numbers.
fn series_state(
    m: &CollisionalModel,
    rho0: &ComplexMatrix,
    t: f64,
    n_max: Option<usize>,
) -> Result<ComplexMatrix> {
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    if let WaitingTime::Deterministic { interval } = m.waiting {
        let k = deterministic_count(interval, t, n_max)?;
        let step = m.free_unitary(interval)?;
        let mut rho = rho0.clone();
        for _ in 0..k {
            rho = apply(&m.kraus, &conj(&step, &rho));
        }
        return Ok(conj(&m.free_unitary(t - k as f64 * interval)?, &rho));
    }
    let lat = Lattice::new(&m.waiting, t);
    let n_pts = lat.points();
    let powers = unitary_powers(m, lat.h, n_pts)?;
    let u_t = m.free_unitary(t)?;
    let to_t: Vec<ComplexMatrix> = (0..n_pts).map(|i| &u_t * powers[i].adjoint()).collect();
    let d = m.dim();
    let mut r = vec![ComplexMatrix::zeros(d, d); n_pts];
    r[0] = rho0.clone();
    let mut mass = vec![0.0; n_pts];
    mass[0] = 1.0;
    let mut out = ComplexMatrix::zeros(d, d);
    let mut n = 0;
    loop {
        for i in 0..n_pts {
            let s = 1.0 - lat.cdf_from(i);
            if mass[i] != 0.0 && s != 0.0 {
                out += conj(&to_t[i], &r[i]).map(|x| x * s);
            }
        }
        let mut r_next = Vec::with_capacity(n_pts);
        let mut mass_next = Vec::with_capacity(n_pts);
        for k in 0..n_pts {
            let mut acc = ComplexMatrix::zeros(d, d);
            let mut p = 0.0;
            for j in 0..=k {
                let qj = lat.q[j];
                if qj == 0.0 || mass[k - j] == 0.0 {
                    continue;
                }
                acc += conj(&powers[j], &r[k - j]).map(|x| x * qj);
                p += qj * mass[k - j];
            }
            r_next.push(apply(&m.kraus, &acc));
            mass_next.push(p);
        }
        let tail: f64 = mass_next.iter().sum();
        r = r_next;
        mass = mass_next;
        if check_stop(tail, n, n_max)? {
            break;
        }
        n += 1;
    }
    Ok(out)
}

/// Collision times of one path in `[0, t_max]`.
fn event_times(m: &CollisionalModel, t_max: f64, seed: u64, path: u64) -> Vec<f64> {
    let mut rng = path_rng(seed, path);
    let mut events = Vec::new();
    let mut t = 0.0;
    loop {
        t += m.waiting.sample(&mut rng);
        if t > t_max {
            return events;
        }
        events.push(t);
    }
}

/// States and `Q_t` of one Monte Carlo path.
pub fn collision_path_run(
    m: &CollisionalModel,
    rho0: &QuantumState,
    times: &[f64],
    seed: u64,
    path: u64,
) -> Result<(Vec<ComplexMatrix>, Vec<f64>)> {
    let t_max = times.last().copied().unwrap_or(0.0);
    let events = event_times(m, t_max, seed, path);
    let a0 = rho0.matrix();
    let mut states = Vec::with_capacity(times.len());
    let mut qs = Vec::with_capacity(times.len());
    let mut rho = a0.clone();
    let mut last = 0.0;
    let mut k = 0;
    for &t in times {
        while k < events.len() && events[k] <= t {
            rho = apply(&m.kraus, &conj(&m.free_unitary(events[k] - last)?, &rho));
            last = events[k];
            k += 1;
        }
        states.push(conj(&m.free_unitary(t - last)?, &rho));
        // dual chain, latest segment first
        let mut a = conj_dual(&m.free_unitary(t - last)?, a0);
        for e in (0..k).rev() {
            let start = if e == 0 { 0.0 } else { events[e - 1] };
            a = conj_dual(
                &m.free_unitary(events[e] - start)?,
                &apply_dual(&m.kraus, &a),
            );
        }
        qs.push(a.trace().re);
    }
    Ok((states, qs))
}

fn monte_carlo(
    m: &CollisionalModel,
    rho0: &QuantumState,
    times: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<Accumulator> {
    if n_paths == 0 {
        return Err(Error::InvalidParameter(
            "at least one path is needed".into(),
        ));
    }
    let mut acc = Accumulator::new(times.len(), m.dim());
    for path in 0..n_paths as u64 {
        let (states, qs) = collision_path_run(m, rho0, times, seed, path)?;
        acc.add(&states, &qs);
    }
    Ok(acc)
}

/// Collision-averaged states.
pub fn collisional_states(
    m: &CollisionalModel,
    rho0: &QuantumState,
    times: &[f64],
    mode: CollisionalMode,
) -> Result<StateEstimate> {
    validate(m, rho0, times)?;
    match mode {
        CollisionalMode::MonteCarlo { n_paths, seed } => {
            Ok(monte_carlo(m, rho0, times, n_paths, seed)?.states(times))
        }
        CollisionalMode::Series { n_max } => Ok(StateEstimate {
            times: times.to_vec(),
            states: times
                .iter()
                .map(|&t| series_state(m, rho0.matrix(), t, n_max))
                .collect::<Result<_>>()?,
            stderr: vec![0.0; times.len()],
        }),
    }
}

pub fn collisional_state(
    m: &CollisionalModel,
    rho0: &QuantumState,
    t: f64,
    mode: CollisionalMode,
) -> Result<QuantumState> {
    collisional_states(m, rho0, &[t], mode)?.state(0)
}

/// `Q_t = Tr[Λ*_t[ρ0]]` through the dual collision chain.
pub fn collisional_q(
    m: &CollisionalModel,
    rho0: &QuantumState,
    times: &[f64],
    mode: CollisionalMode,
) -> Result<QEstimate> {
    validate(m, rho0, times)?;
    let est = match mode {
        CollisionalMode::MonteCarlo { n_paths, seed } => {
            monte_carlo(m, rho0, times, n_paths, seed)?.q(times, m.dim())?
        }
        CollisionalMode::Series { n_max } => {
            let mut values = Vec::with_capacity(times.len());
            for &t in times {
                values.push(series_dual(m, rho0.matrix(), t, n_max)?.trace().re);
            }
            let dev = values.iter().fold(0.0f64, |a, q| a.max((q - 1.0).abs()));
            QEstimate {
                series: QuantumnessSeries::new(times.to_vec(), values, m.dim())?,
                stderr: vec![0.0; times.len()],
                max_path_deviation: dev,
            }
        }
    };
    est.series.check_bounds(1e-8)?;
    Ok(est)
}

/// Whether `Tr[ℰ*[A]] = Tr[A]` on the matrix-unit basis.
pub fn dual_trace_check(kraus: &[ComplexMatrix]) -> Result<UnitalityCheck> {
    let residual = channel_residual(kraus)?;
    if residual > 1e-8 {
        return Err(Error::InvalidChannel { residual });
    }
    let d = kraus[0].nrows();
    let mut worst = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            let mut e = ComplexMatrix::zeros(d, d);
            e[(a, b)] = c(1.0, 0.0);
            let expected = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((apply_dual(kraus, &e).trace() - c(expected, 0.0)).norm());
        }
    }
    Ok(UnitalityCheck {
        unital: worst <= 1e-10,
        residual: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::super::channels;
    use super::*;
    use crate::linalg::pauli;

    fn model(kraus: Vec<ComplexMatrix>, w: WaitingTime) -> CollisionalModel {
        CollisionalModel::new(pauli::sigma_z().map(|z| z * 0.7), kraus, w).unwrap()
    }

    #[test]
    fn lattice_keeps_mass_and_mean() {
        let w = WaitingTime::gamma(2.0, 1.5).unwrap();
        let lat = Lattice::new(&w, 40.0);
        assert!((lat.h * (lat.points() as f64 - 0.5) - 40.0).abs() < 1e-12);
        let mass: f64 = lat.q.iter().sum();
        let mean: f64 = lat
            .q
            .iter()
            .enumerate()
            .map(|(j, q)| j as f64 * lat.h * q)
            .sum();
        assert!((mass - 1.0).abs() < 1e-12);
        assert!((mean - w.mean()).abs() < 1e-10);
    }

    #[test]
    fn zero_time_is_identity() {
        let m = model(
            channels::amplitude_damping(0.5),
            WaitingTime::exponential(1.0).unwrap(),
        );
        let rho = QuantumState::bloch(0.9, 0.3);
        for mode in [
            CollisionalMode::Series { n_max: None },
            CollisionalMode::MonteCarlo {
                n_paths: 10,
                seed: 1,
            },
        ] {
            let s = collisional_state(&m, &rho, 0.0, mode).unwrap();
            assert!(crate::linalg::max_abs(&(s.matrix() - rho.matrix())) < 1e-14);
            assert!(
                (collisional_q(&m, &rho, &[0.0], mode).unwrap().series.values[0] - 1.0).abs()
                    < 1e-14
            );
        }
    }

    #[test]
    fn deterministic_waiting_is_exact() {
        // one flip at t = 1 for t in [1, 2)
        let m = CollisionalModel::new(
            ComplexMatrix::zeros(2, 2),
            channels::unitary(pauli::sigma_x()),
            WaitingTime::deterministic(1.0).unwrap(),
        )
        .unwrap();
        let rho = QuantumState::bloch(0.0, 0.0);
        let s = collisional_states(
            &m,
            &rho,
            &[0.5, 1.5, 2.5],
            CollisionalMode::Series { n_max: None },
        )
        .unwrap();
        assert!((s.states[0][(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((s.states[1][(1, 1)].re - 1.0).abs() < 1e-14);
        assert!((s.states[2][(0, 0)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn explicit_truncation_reports_tail() {
        let m = model(
            channels::dephasing(0.2),
            WaitingTime::exponential(1.0).unwrap(),
        );
        let rho = QuantumState::bloch(0.5, 0.0);
        let err = collisional_q(&m, &rho, &[3.0], CollisionalMode::Series { n_max: Some(2) })
            .unwrap_err();
        assert!(matches!(err, Error::TruncationTail { .. }));
    }

    #[test]
    fn dual_trace_check_flags_non_unital() {
        assert!(
            dual_trace_check(&channels::unitary(pauli::sigma_y()))
                .unwrap()
                .unital
        );
        assert!(
            !dual_trace_check(&channels::amplitude_damping(0.3))
                .unwrap()
                .unital
        );
        assert!(dual_trace_check(&[pauli::sigma_x().map(|z| z * 2.0)]).is_err());
    }
}
