//! Product-integration solver for `ċ(t) = −∫₀ᵗ f(t − s) c(s) ds`, `c(0) = 1`.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{c, C64};

/// Solution on the uniform grid `t_k = k h`, `k = 0..=n`.
///
/// The convolution is integrated with the trapezoidal rule and the ODE with
/// the trapezoidal (Crank–Nicolson) step, which is implicit only through the
/// `f(0) c_{n+1}` endpoint term.
pub fn solve_grid<F>(kernel: F, h: f64, n: usize) -> Vec<C64>
where
    F: Fn(f64) -> C64,
{
    let f: Vec<C64> = (0..=n).map(|k| kernel(k as f64 * h)).collect();
    let mut cs: Vec<C64> = Vec::with_capacity(n + 1);
    cs.push(c(1.0, 0.0));
    let mut deriv = c(0.0, 0.0);
    let denom = c(1.0, 0.0) + f[0] * (h * h / 4.0);
    for step in 0..n {
        let m = step + 1;
        // trapezoid of ∫₀^{t_m} f(t_m − s) c(s) ds without the c_m endpoint
        let mut partial = f[m] * cs[0] * 0.5;
        for (j, cj) in cs.iter().enumerate().skip(1) {
            partial += f[m - j] * cj;
        }
        partial *= h;
        let next = (cs[step] + (deriv - partial) * (h / 2.0)) / denom;
        deriv = -(partial + f[0] * next * (h / 2.0));
        cs.push(next);
    }
    cs
}

/// Grid size beyond which [`solve`] stops refining.
const MAX_STEPS: usize = 1 << 15;

/// `c` at each requested time with step `h ≤ h_max`, Richardson-extrapolated
/// from steps `h` and `h/2`. The step is halved until the extrapolation
/// correction drops below `tol`.
pub fn solve<F>(kernel: F, times: &[f64], h_max: f64, tol: f64) -> Result<Vec<C64>>
where
    F: Fn(f64) -> C64,
{
    if !(h_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {h_max}"
        )));
    }
    if times.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidParameter(
            "times must be finite and non-negative".into(),
        ));
    }
    let t_max = times.iter().copied().fold(0.0, f64::max);
    if t_max == 0.0 {
        return Ok(times.iter().map(|_| c(1.0, 0.0)).collect());
    }
    let mut n = (t_max / h_max).ceil().max(4.0) as usize;
    let mut coarse = solve_grid(&kernel, t_max / n as f64, n);
    loop {
        let h = t_max / n as f64;
        let fine = solve_grid(&kernel, h / 2.0, 2 * n);
        let mut correction = 0.0f64;
        let extrapolated: Vec<C64> = (0..=n)
            .map(|k| {
                let delta = (fine[2 * k] - coarse[k]) / 3.0;
                correction = correction.max(delta.norm());
                fine[2 * k] + delta
            })
            .collect();
        if correction <= tol {
            return Ok(times
                .iter()
                .map(|&t| interpolate(&extrapolated, h, t))
                .collect());
        }
        if n >= MAX_STEPS {
            return Err(Error::Numerical(format!(
                "Volterra solver did not converge (Richardson correction {correction:e})"
            )));
        }
        coarse = fine;
        n *= 2;
    }
}

/// Four-point Lagrange interpolation on a uniform grid.
fn interpolate(values: &[C64], h: f64, t: f64) -> C64 {
    let n = values.len() - 1;
    let x = t / h;
    let k = x.round();
    if (x - k).abs() < 1e-9 {
        return values[(k as usize).min(n)];
    }
    let base = (x.floor() as usize)
        .saturating_sub(1)
        .min(n.saturating_sub(3));
    let mut acc = c(0.0, 0.0);
    for i in 0..4 {
        let xi = (base + i) as f64;
        let mut w = 1.0;
        for j in 0..4 {
            if j != i {
                let xj = (base + j) as f64;
                w *= (x - xj) / (xi - xj);
            }
        }
        acc += values[base + i] * w;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_kernel_gives_cosine() {
        let g: f64 = 1.3;
        let times = [0.0, 0.5, 1.234, 4.0];
        let cs = solve(|_| c(g * g, 0.0), &times, 0.01, 1e-4).unwrap();
        for (t, v) in times.iter().zip(&cs) {
            assert!((v.re - (g * t).cos()).abs() < 1e-8, "t={t}: {v}");
            assert!(v.im.abs() < 1e-14);
        }
    }

    #[test]
    fn zero_kernel_is_constant() {
        let cs = solve_grid(|_| c(0.0, 0.0), 0.1, 10);
        assert!(cs.iter().all(|v| *v == c(1.0, 0.0)));
    }
}
