//! Waiting-time distributions of a renewal process.

use alloc::format;
#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaitingTime {
    /// `w(t) = λ e^{−λt}`; Poisson statistics.
    Exponential { rate: f64 },
    /// `w(t) = λᵏ t^{k−1} e^{−λt} / Γ(k)`.
    Gamma { shape: f64, rate: f64 },
    /// Collisions exactly every `interval`.
    Deterministic { interval: f64 },
}

fn check(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "waiting-time {name} must be positive, got {v}"
        )))
    }
}

impl WaitingTime {
    pub fn exponential(rate: f64) -> Result<Self> {
        check("rate", rate)?;
        Ok(Self::Exponential { rate })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        check("shape", shape)?;
        check("rate", rate)?;
        Ok(Self::Gamma { shape, rate })
    }

    pub fn deterministic(interval: f64) -> Result<Self> {
        check("interval", interval)?;
        Ok(Self::Deterministic { interval })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Exponential { rate } => check("rate", rate),
            Self::Gamma { shape, rate } => check("shape", shape).and(check("rate", rate)),
            Self::Deterministic { interval } => check("interval", interval),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::Gamma { shape, rate } => shape / rate,
            Self::Deterministic { interval } => interval,
        }
    }

    /// Density `w(t)`; zero for the deterministic case away from its atom.
    pub fn density(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match *self {
            Self::Exponential { rate } => rate * (-rate * t).exp(),
            Self::Gamma { shape, rate } => {
                if t == 0.0 {
                    return if shape < 1.0 {
                        f64::INFINITY
                    } else if shape == 1.0 {
                        rate
                    } else {
                        0.0
                    };
                }
                (shape * rate.ln() + (shape - 1.0) * t.ln() - rate * t - libm::lgamma(shape)).exp()
            }
            Self::Deterministic { .. } => 0.0,
        }
    }

    /// `∫₀ᵗ w`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            Self::Exponential { rate } => -(-rate * t).exp_m1(),
            Self::Gamma { shape, rate } => regularized_gamma_p(shape, rate * t),
            Self::Deterministic { interval } => {
                if t >= interval {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `P₀(t) = 1 − ∫₀ᵗ w`, the probability of no event up to `t`.
    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        match *self {
            Self::Exponential { rate } => (-rate * t).exp(),
            Self::Gamma { shape, rate } => regularized_gamma_q(shape, rate * t),
            Self::Deterministic { .. } => 1.0 - self.cdf(t),
        }
    }

    /// Partial first moment `∫₀ᵗ s w(s) ds`.
    pub fn partial_mean(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            Self::Exponential { rate } => {
                let x = rate * t;
                (-(-x).exp_m1() - x * (-x).exp()) / rate
            }
            Self::Gamma { shape, rate } => {
                shape / rate * regularized_gamma_p(shape + 1.0, rate * t)
            }
            Self::Deterministic { interval } => {
                if t >= interval {
                    interval
                } else {
                    0.0
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Exponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                e / rate
            }
            Self::Gamma { shape, rate } => Gamma::new(shape, 1.0 / rate)
                .expect("validated gamma parameters")
                .sample(rng),
            Self::Deterministic { interval } => interval,
        }
    }
}

const EPS: f64 = 1e-16;

/// Regularized lower incomplete gamma function `P(a, x)`.
pub fn regularized_gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_continued_fraction(a, x)
    }
}

/// Regularized upper incomplete gamma function `Q(a, x) = 1 − P(a, x)`.
pub fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_continued_fraction(a, x)
    }
}

fn prefactor(a: f64, x: f64) -> f64 {
    (a * x.ln() - x - libm::lgamma(a)).exp()
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..10_000 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * prefactor(a, x)
}

/// Modified Lentz evaluation of the continued fraction for `Q(a, x)`.
fn gamma_continued_fraction(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut cc = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        cc = b + an / cc;
        if cc.abs() < tiny {
            cc = tiny;
        }
        d = 1.0 / d;
        let delta = d * cc;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    prefactor(a, x) * h
}
