//! Adaptive Dormand–Prince 5(4) integration of matrix-valued ODEs.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-13,
            max_steps: 1_000_000,
        }
    }
}

const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn combine(y: &ComplexMatrix, h: f64, ks: &[ComplexMatrix], coeffs: &[f64]) -> ComplexMatrix {
    let mut out = y.clone();
    for (k, &a) in ks.iter().zip(coeffs) {
        if a != 0.0 {
            out.zip_apply(k, |o, kv| *o += kv * (h * a));
        }
    }
    out
}

/// Integrates `dy/dt = f(t, y)` and returns `y` at each requested time.
///
/// `times` must be ascending and start at or after `t0`.
pub fn integrate<F>(
    f: F,
    t0: f64,
    y0: &ComplexMatrix,
    times: &[f64],
    opts: OdeOptions,
) -> Result<Vec<ComplexMatrix>>
where
    F: Fn(f64, &ComplexMatrix) -> ComplexMatrix,
{
    let mut out = Vec::with_capacity(times.len());
    let mut t = t0;
    let mut y = y0.clone();
    let mut k1 = f(t, &y);
    let span = times.last().map_or(0.0, |&tl| tl - t0).abs();
    let mut h = if span > 0.0 { span * 1e-3 } else { 1e-3 };
    let mut steps = 0usize;

    for &target in times {
        if target < t {
            return Err(Error::InvalidParameter(
                "output times must be ascending".into(),
            ));
        }
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::Numerical("ODE step budget exhausted".into()));
            }
            let last = t + h >= target;
            let step = if last { target - t } else { h };
            let k2 = f(t + C[0] * step, &combine(&y, step, &[k1.clone()], &A2));
            let k3 = f(
                t + C[1] * step,
                &combine(&y, step, &[k1.clone(), k2.clone()], &A3),
            );
            let k4 = f(
                t + C[2] * step,
                &combine(&y, step, &[k1.clone(), k2.clone(), k3.clone()], &A4),
            );
            let k5 = f(
                t + C[3] * step,
                &combine(
                    &y,
                    step,
                    &[k1.clone(), k2.clone(), k3.clone(), k4.clone()],
                    &A5,
                ),
            );
            let ks6 = [k1.clone(), k2.clone(), k3.clone(), k4.clone(), k5.clone()];
            let k6 = f(t + C[4] * step, &combine(&y, step, &ks6, &A6));
            let ks7 = [k1.clone(), k2, k3, k4, k5, k6];
            let y_new = combine(&y, step, &ks7, &B);
            let k7 = f(t + C[5] * step, &y_new);

            let mut err_acc = 0.0;
            let n = y.len() as f64;
            for idx in 0..y.len() {
                let mut e = ks7[0][idx] * E[0];
                for s in 1..6 {
                    e += ks7[s][idx] * E[s];
                }
                e += k7[idx] * E[6];
                let scale = opts.atol + opts.rtol * y[idx].norm().max(y_new[idx].norm());
                let r = e.norm() * step / scale;
                err_acc += r * r;
            }
            let err = (err_acc / n).sqrt();
            steps += 1;

            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                k1 = k7;
                if !last {
                    h = step * factor;
                } else {
                    h = h.max(step * factor.min(1.0));
                }
            } else {
                h = step * factor;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::Numerical("ODE step size underflow".into()));
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
