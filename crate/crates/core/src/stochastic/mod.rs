//! Classical noise and random collisions.
//!
//! Every realization here acts on the system by unitaries or by a fixed
//! channel at random times, so ensemble averages are plain means over
//! independent paths. Path `k` draws from stream `k` of a ChaCha generator
//! keyed by the seed, which makes results independent of how paths are
//! scheduled.

pub mod channels;
pub mod collisional;
pub mod noise;
pub mod waiting;

pub use collisional::{
    collisional_q, collisional_state, collisional_states, dual_trace_check, CollisionalMode,
    CollisionalModel,
};
pub use noise::{
    sample_noise_path, stochastic_q, stochastic_states, NoiseFamily, NoisePath, NoiseProcess,
};
pub use waiting::WaitingTime;

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{ComplexMatrix, QuantumState};
use crate::quantumness::QuantumnessSeries;

/// Generator for path `path` of a run seeded with `seed`.
pub fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// Ensemble mean of `Q_t` with its Monte Carlo standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct QEstimate {
    pub series: QuantumnessSeries,
    pub stderr: Vec<f64>,
    /// Largest `|Q − 1|` seen on any single path.
    pub max_path_deviation: f64,
}

/// Ensemble-averaged states with the Frobenius norm of the entrywise
/// standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEstimate {
    pub times: Vec<f64>,
    pub states: Vec<ComplexMatrix>,
    pub stderr: Vec<f64>,
}

impl StateEstimate {
    pub fn state(&self, k: usize) -> Result<QuantumState> {
        QuantumState::with_tolerance(
            self.states[k].clone(),
            alloc::vec![self.states[k].nrows()],
            1e-9,
        )
    }
}

/// Running sums for path averages; paths must be added in a fixed order
/// for bitwise reproducible results.
#[derive(Debug, Clone)]
pub struct Accumulator {
    n: usize,
    sum: Vec<ComplexMatrix>,
    sum_sq: Vec<nalgebra::DMatrix<f64>>,
    q_sum: Vec<f64>,
    q_sum_sq: Vec<f64>,
    max_dev: f64,
}

impl Accumulator {
    pub fn new(points: usize, dim: usize) -> Self {
        Self {
            n: 0,
            sum: (0..points)
                .map(|_| ComplexMatrix::zeros(dim, dim))
                .collect(),
            sum_sq: (0..points)
                .map(|_| nalgebra::DMatrix::zeros(dim, dim))
                .collect(),
            q_sum: alloc::vec![0.0; points],
            q_sum_sq: alloc::vec![0.0; points],
            max_dev: 0.0,
        }
    }

    /// Adds one path's matrices (states or dual operators) and its `Q` values.
    pub fn add(&mut self, mats: &[ComplexMatrix], qs: &[f64]) {
        self.n += 1;
        for (k, m) in mats.iter().enumerate() {
            self.sum[k] += m;
            self.sum_sq[k].zip_apply(m, |s, z| *s += z.norm_sqr());
        }
        for (k, &q) in qs.iter().enumerate() {
            self.q_sum[k] += q;
            self.q_sum_sq[k] += q * q;
            self.max_dev = self.max_dev.max((q - 1.0).abs());
        }
    }

    pub fn paths(&self) -> usize {
        self.n
    }

    fn stderr(&self, sum_sq: f64, mean_sq: f64) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let var = ((sum_sq - n * mean_sq) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }

    pub fn states(&self, times: &[f64]) -> StateEstimate {
        let n = self.n.max(1) as f64;
        let mut states = Vec::with_capacity(self.sum.len());
        let mut stderr = Vec::with_capacity(self.sum.len());
        for (s, sq) in self.sum.iter().zip(&self.sum_sq) {
            let mean = s.map(|z| z / n);
            let mut acc = 0.0;
            for (m, q) in mean.iter().zip(sq.iter()) {
                let e = self.stderr(*q, m.norm_sqr());
                acc += e * e;
            }
            states.push(mean);
            stderr.push(acc.sqrt());
        }
        StateEstimate {
            times: times.to_vec(),
            states,
            stderr,
        }
    }

    pub fn q(&self, times: &[f64], dim_s: usize) -> Result<QEstimate> {
        let n = self.n.max(1) as f64;
        let values: Vec<f64> = self.q_sum.iter().map(|s| s / n).collect();
        let stderr = values
            .iter()
            .zip(&self.q_sum_sq)
            .map(|(m, sq)| self.stderr(*sq, m * m))
            .collect();
        Ok(QEstimate {
            series: QuantumnessSeries::new(times.to_vec(), values, dim_s)?,
            stderr,
            max_path_deviation: self.max_dev,
        })
    }
}
