//! The acceptance suites behind `envq verify`.
//!
//! Each suite returns a [`Criterion`] made of named parts plus any data files
//! it regenerates. Everything is deterministic for a fixed seed.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use envq_core::dynamics::{dual_liouvillian, liouvillian, propagate_series, stationary_state};
use envq_core::linalg::{
    c, concurrence, matrix_exponential, max_abs, partial_trace, pauli, trace_distance, QuantumState,
};
use envq_core::microscopic::{
    dual_map_apply, hamiltonian_ensemble_reduction, q_derivative, quantumness_direct,
    reduced_state, JointModel,
};
use envq_core::models::fluorescence::{
    fluorescence_dq, fluorescence_q, fluorescence_q_stationary, fluorescence_q_variant,
    strong_drive_dq, weak_drive_dq, ZSign,
};
use envq_core::models::nonmarkov::{lorentzian_c, memory_c_numeric, nonmarkov_q, weak_coupling_c};
use envq_core::models::oscillator::{
    oscillator_dqr, oscillator_dqr_numeric, oscillator_q, oscillator_q_numeric,
};
use envq_core::models::thermal::thermal_q;
use envq_core::models::two_qubit::{
    optimal_state, twoqubit_concurrence, twoqubit_dq, twoqubit_i_max, twoqubit_q,
};
use envq_core::models::{
    FluorescenceParams, Kernel, NonMarkovParams, OscillatorParams, ThermalTlsParams, TwoQubitParams,
};
use envq_core::quantumness::{
    degree_of_quantumness, degree_of_quantumness_with, q_series, q_series_with,
    report_from_stationary, uniform_grid, unitality_check, Reversal,
};
use envq_core::random;
use envq_core::stochastic::{
    channels, collisional_q, noise, CollisionalMode, CollisionalModel, NoiseFamily, NoiseProcess,
    WaitingTime,
};
use envq_core::{ComplexMatrix, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands;
use crate::config::RunConfig;
use crate::csv;
use crate::error::{CliError, CliResult};
use crate::parallel;

pub const ALL: [usize; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, PartialEq)]
pub struct Part {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub parts: Vec<Part>,
    /// Parts known to be out of reach; they are reported but expected to fail.
    pub known_failures: &'static [&'static str],
}

impl Criterion {
    pub fn passed(&self) -> bool {
        self.parts.iter().all(|p| p.passed)
    }

    /// True when every failing part is a documented known failure.
    pub fn as_expected(&self) -> bool {
        self.parts
            .iter()
            .all(|p| p.passed != self.known_failures.contains(&p.name))
    }

    pub fn summary_line(&self) -> String {
        let status = if self.passed() {
            "PASS".to_string()
        } else if self.as_expected() {
            format!("FAIL (known: {})", self.known_failures.join(", "))
        } else {
            "FAIL".to_string()
        };
        format!("criterion {:>2} {status}: {}", self.id, self.title)
    }

    pub fn report(&self) -> String {
        let mut out = self.summary_line();
        out.push('\n');
        for p in &self.parts {
            let mark = if p.passed { "ok  " } else { "FAIL" };
            let _ = writeln!(out, "    {mark} {}: {}", p.name, p.detail);
        }
        out
    }
}

/// A data file regenerated by a suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: &'static str,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub criterion: Criterion,
    pub artifacts: Vec<Artifact>,
}

type Check = CliResult<(bool, String)>;

fn part(name: &'static str, check: impl FnOnce() -> Check) -> Part {
    match check() {
        Ok((passed, detail)) => Part {
            name,
            passed,
            detail,
        },
        Err(e) => Part {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Largest value, NaN-sticky.
fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a: f64, x| {
        if a.is_nan() || x.is_nan() {
            f64::NAN
        } else {
            a.max(x)
        }
    })
}

fn within(err: f64, tol: f64) -> (bool, String) {
    (
        err <= tol,
        format!("max error {err:.3e} (tolerance {tol:.0e})"),
    )
}

fn bloch_zy(rho: &QuantumState) -> (f64, f64) {
    (
        rho.expectation(&pauli::sigma_z()).re,
        rho.expectation(&pauli::sigma_y()).re,
    )
}

fn ground() -> QuantumState {
    QuantumState::bloch(PI, 0.0)
}

fn basis_state(dim: usize, k: usize) -> CliResult<QuantumState> {
    let mut m = ComplexMatrix::zeros(dim, dim);
    m[(k, k)] = c(1.0, 0.0);
    Ok(QuantumState::new(m)?)
}

fn turning_points(values: &[f64]) -> usize {
    values
        .windows(3)
        .filter(|w| (w[1] - w[0]) * (w[2] - w[1]) < 0.0)
        .count()
}

fn monotone(values: &[f64]) -> bool {
    let up = values.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let down = values.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    up || down
}

/// Runs one criterion.
pub fn run(id: usize, seed: u64) -> CliResult<Outcome> {
    let plain = |criterion| Outcome {
        criterion,
        artifacts: Vec::new(),
    };
    Ok(match id {
        1 => plain(oracle_identity(seed)),
        2 => plain(thermal(seed)),
        3 => fluorescence(seed),
        4 => plain(sign_arbitration(seed)),
        5 => two_qubit(),
        6 => plain(nonmarkov()),
        7 => plain(classicality(seed)),
        8 => poisson_limit(seed),
        9 => plain(oscillator()),
        10 => plain(derivatives(seed)),
        11 => determinism(seed),
        _ => {
            return Err(CliError::parse(format!(
                "there is no criterion {id} (1-11)"
            )))
        }
    })
}

/// Runs the chosen criteria and writes `summary.txt` plus every artifact into
/// `dir`. Returns the outcomes in the order given.
pub fn run_into(ids: &[usize], seed: u64, dir: &Path) -> CliResult<Vec<Outcome>> {
    let outcomes = ids
        .iter()
        .map(|&id| run(id, seed))
        .collect::<CliResult<Vec<_>>>()?;
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let write = |name: &str, contents: &str| {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
    };
    let mut summary = format!("seed = {seed}\n");
    for o in &outcomes {
        summary.push_str(&o.criterion.report());
        for a in &o.artifacts {
            write(a.name, &a.contents)?;
        }
    }
    write("summary.txt", &summary)?;
    Ok(outcomes)
}

fn random_joint(rng: &mut ChaCha8Rng) -> CliResult<(JointModel, QuantumState)> {
    let ds = rng.random_range(2..=3);
    let de = rng.random_range(2..=8);
    let m = JointModel::new(
        random::hermitian(ds, 1.0, rng),
        random::hermitian(de, 1.0, rng),
        random::hermitian(ds * de, 0.7, rng),
        random::mixed_state(de, rng),
    )?;
    Ok((m, random::mixed_state(ds, rng)))
}

fn oracle_identity(seed: u64) -> Criterion {
    let p = part("direct vs dual on 50 models x 20 times", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let times = uniform_grid(6.0, 19);
        let mut errs = Vec::new();
        for _ in 0..50 {
            let (m, rho) = random_joint(&mut rng)?;
            for &t in &times {
                let direct = quantumness_direct(&m, &rho, t)?;
                let dual = dual_map_apply(&m, rho.matrix(), -t)?.trace().re;
                errs.push((direct - dual).abs());
            }
        }
        Ok(within(worst(errs), 1e-10))
    });
    Criterion {
        id: 1,
        title: "oracle identity",
        parts: vec![p],
        known_failures: &[],
    }
}

fn thermal(seed: u64) -> Criterion {
    let betas = [0.3, 0.8, 1.5, 3.0, 6.0];
    let series = part("q_series vs closed form", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let mut errs = Vec::new();
        for &beta in &betas {
            let p = ThermalTlsParams::new(1.0, beta)?;
            let model = p.model()?;
            let times = uniform_grid(10.0 / p.relaxation_rate(), 50);
            for _ in 0..20 {
                let rho = random::mixed_state(2, &mut rng);
                let sz = bloch_zy(&rho).0;
                let s = q_series(&model, &rho, &times)?;
                for (t, q) in times.iter().zip(&s.values) {
                    errs.push((thermal_q(&p, sz, *t)? - q).abs());
                }
            }
        }
        Ok(within(worst(errs), 1e-8))
    });
    let degree = part("D_Q vs tanh(beta/2)", || {
        let mut errs = Vec::new();
        for &beta in &betas {
            let r = degree_of_quantumness(&ThermalTlsParams::new(1.0, beta)?.model()?)?;
            errs.push((r.dq - (beta / 2.0).tanh()).abs());
        }
        Ok(within(worst(errs), 1e-10))
    });
    let limits = part("high and low temperature limits", || {
        let hot = degree_of_quantumness(&ThermalTlsParams::new(1.0, 1e-4)?.model()?)?.dq;
        let cold = degree_of_quantumness(&ThermalTlsParams::new(1.0, 20.0)?.model()?)?.dq;
        Ok((
            hot.abs() <= 1e-3 && (cold - 1.0).abs() <= 1e-3,
            format!("D_Q = {hot:.3e} at 1e-4, {cold:.12} at 20"),
        ))
    });
    Criterion {
        id: 2,
        title: "thermal two-level system",
        parts: vec![series, degree, limits],
        known_failures: &[],
    }
}

fn fluorescence(seed: u64) -> Outcome {
    let grid: Vec<(f64, f64)> = (0..10)
        .flat_map(|i| (0..10).map(move |j| (0.5 + 0.25 * i as f64, 0.2 + 0.6 * j as f64)))
        .collect();
    let stationary = part("propagated Q_inf vs closed form, 10x10 grid", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let mut errs = Vec::new();
        for &(g, w) in &grid {
            let p = FluorescenceParams::new(g, w)?;
            let rho = random::pure_state(2, &mut rng);
            let (sz, sy) = bloch_zy(&rho);
            // slowest decay rate of the Bloch equations is at least γ/2
            let t = 40.0 / g;
            let q = q_series(&p.model()?, &rho, &[t])?.values[0];
            errs.push((q - fluorescence_q_stationary(&p, sz, sy)).abs());
        }
        Ok(within(worst(errs), 1e-8))
    });
    let degree = part("D_Q vs closed form, 10x10 grid", || {
        let mut errs = Vec::new();
        for &(g, w) in &grid {
            let p = FluorescenceParams::new(g, w)?;
            errs.push((degree_of_quantumness(&p.model()?)?.dq - fluorescence_dq(&p).0).abs());
        }
        Ok(within(worst(errs), 1e-10))
    });
    let weak = part("weak-drive asymptote at 0.1", || {
        let p = FluorescenceParams::new(1.0, 0.1)?;
        let exact = fluorescence_dq(&p).0;
        let rel = ((weak_drive_dq(&p) - exact) / exact).abs();
        Ok((rel <= 0.01, format!("relative error {rel:.3e}")))
    });
    let strong = part("strong-drive asymptote at 50", || {
        let p = FluorescenceParams::new(1.0, 50.0)?;
        let exact = fluorescence_dq(&p).0;
        let rel = ((strong_drive_dq(&p) - exact) / exact).abs();
        Ok((rel <= 0.05, format!("relative error {rel:.3e}")))
    });

    let ratios = [0.0, 0.5, 1.0, 2.0, 5.0];
    let times = uniform_grid(12.0, 240);
    let mut columns: Vec<Vec<f64>> = vec![times.clone()];
    let mut header = vec!["t".to_string()];
    let curves = part(
        "Fig. 1 shape: monotone undriven, oscillating for ratio >= 1",
        || {
            let mut notes = Vec::new();
            let mut ok = true;
            for &w in &ratios {
                let p = FluorescenceParams::new(1.0, w)?;
                let (_, angles) = fluorescence_dq(&p);
                let model = p.model()?;
                for (tag, state) in [
                    ("upper", angles.upper_state()),
                    ("lower", angles.lower_state()),
                ] {
                    let values = q_series(&model, &state, &times)?.values;
                    let turns = turning_points(&values);
                    ok &= if w == 0.0 {
                        monotone(&values)
                    } else if w >= 1.0 {
                        turns >= 2
                    } else {
                        true
                    };
                    notes.push(format!("{tag}@{w}: {turns} turns"));
                    header.push(format!("q_{tag}_{w}"));
                    columns.push(values);
                }
            }
            Ok((ok, notes.join(", ")))
        },
    );
    let sweep: Vec<f64> = (0..=60).map(|k| 0.1 * k as f64).collect();
    let mut dq_rows = Vec::new();
    let approach = part(
        "Fig. 1 shape: D_Q falls towards 0 as the drive grows",
        || {
            let mut prev = f64::INFINITY;
            let mut decreasing = true;
            for &w in &sweep {
                let p = FluorescenceParams::new(1.0, w)?;
                let dq = degree_of_quantumness(&p.model()?)?.dq;
                decreasing &= dq < prev + 1e-12;
                prev = dq;
                let strong = if w > 0.0 {
                    strong_drive_dq(&p)
                } else {
                    f64::INFINITY
                };
                dq_rows.push(vec![w, dq, weak_drive_dq(&p), strong]);
            }
            let far = degree_of_quantumness(&FluorescenceParams::new(1.0, 50.0)?.model()?)?.dq;
            Ok((
                decreasing && far < 0.03,
                format!("D_Q(6) = {prev:.4}, D_Q(50) = {far:.4}"),
            ))
        },
    );

    let rows: Vec<Vec<f64>> = (0..times.len())
        .map(|k| columns.iter().map(|col| col[k]).collect())
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let artifacts = vec![
        Artifact {
            name: "fig1_q.csv",
            contents: csv::table(&header_refs, &rows),
        },
        Artifact {
            name: "fig1_dq.csv",
            contents: csv::table(
                &["omega_over_gamma", "dq", "weak_drive", "strong_drive"],
                &dq_rows,
            ),
        },
    ];
    Outcome {
        criterion: Criterion {
            id: 3,
            title: "resonance fluorescence",
            parts: vec![stationary, degree, weak, strong, curves, approach],
            known_failures: &[],
        },
        artifacts,
    }
}

fn sign_arbitration(seed: u64) -> Criterion {
    let ratios = [0.1, 0.25, 0.5, 1.0, 3.0];
    let times = uniform_grid(15.0, 150);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
    let states: Vec<QuantumState> = (0..4)
        .map(|_| random::mixed_state(2, &mut rng))
        .chain([ground()])
        .collect();
    let consistent = part("closed form vs dual propagation", || {
        let mut errs = Vec::new();
        for &w in &ratios {
            let p = FluorescenceParams::new(1.0, w)?;
            let model = p.model()?;
            for rho in &states {
                let (sz, sy) = bloch_zy(rho);
                let s = q_series(&model, rho, &times)?;
                for (t, q) in times.iter().zip(&s.values) {
                    errs.push((fluorescence_q(&p, sz, sy, *t)? - q).abs());
                }
            }
        }
        Ok(within(worst(errs), 1e-8))
    });
    let limit = part("closed form at long times vs stationary value", || {
        let mut errs = Vec::new();
        for &w in &ratios {
            let p = FluorescenceParams::new(1.0, w)?;
            for rho in &states {
                let (sz, sy) = bloch_zy(rho);
                errs.push(
                    (fluorescence_q(&p, sz, sy, 400.0)? - fluorescence_q_stationary(&p, sz, sy))
                        .abs(),
                );
            }
        }
        Ok(within(worst(errs), 1e-10))
    });
    let printed = part("typeset sign misses by a finite margin", || {
        let p = FluorescenceParams::new(1.0, 1.0)?;
        let rho = ground();
        let (sz, sy) = bloch_zy(&rho);
        let s = q_series(&p.model()?, &rho, &times)?;
        let mut gaps = Vec::new();
        for (t, q) in times.iter().zip(&s.values) {
            gaps.push((fluorescence_q_variant(&p, sz, sy, *t, ZSign::Printed)? - q).abs());
        }
        let gap = worst(gaps);
        Ok((
            gap > 0.1,
            format!("largest deviation {gap:.4} from the ground state at ratio 1"),
        ))
    });
    Criterion {
        id: 4,
        title: "fluorescence sign arbitration",
        parts: vec![consistent, limit, printed],
        known_failures: &[],
    }
}

fn two_qubit() -> Outcome {
    let ratios = [0.25, 0.5, 1.0, 2.0, 4.0];
    let degree = part("D_Q vs closed form", || {
        let mut errs = Vec::new();
        for &w in &ratios {
            let p = TwoQubitParams::new(1.0, w)?;
            errs.push(
                (degree_of_quantumness_with(&p.model()?, Reversal::Conjugate)?.dq
                    - twoqubit_dq(&p))
                .abs(),
            );
        }
        Ok(within(worst(errs), 1e-10))
    });
    let overlap = part("optimal state overlap", || {
        let mut low = 1.0f64;
        for &w in &ratios {
            let p = TwoQubitParams::new(1.0, w)?;
            let r = degree_of_quantumness_with(&p.model()?, Reversal::Conjugate)?;
            let v = twoqubit_i_max(&p);
            let fidelity = (v.adjoint() * r.optimal_state.matrix() * &v)[(0, 0)].re;
            low = low.min(fidelity.max(0.0).sqrt());
        }
        Ok((
            low >= 1.0 - 1e-8,
            format!("smallest |<numeric|closed>| = {low:.12}"),
        ))
    });
    let conc = part("concurrence vs ratio formula", || {
        let mut errs = Vec::new();
        for &w in &ratios {
            let p = TwoQubitParams::new(1.0, w)?;
            errs.push((concurrence(&optimal_state(&p)?)? - w / (1.0 + w * w).sqrt()).abs());
            errs.push((twoqubit_concurrence(&p) - w / (1.0 + w * w).sqrt()).abs());
        }
        Ok(within(worst(errs), 1e-10))
    });
    let series = part("q_series vs closed form from the optimal state", || {
        let times = uniform_grid(20.0, 80);
        let mut errs = Vec::new();
        for &w in &ratios {
            let p = TwoQubitParams::new(1.0, w)?;
            let s = q_series_with(
                &p.model()?,
                &optimal_state(&p)?,
                &times,
                Reversal::Conjugate,
            )?;
            for (t, q) in times.iter().zip(&s.values) {
                errs.push((twoqubit_q(&p, *t) - q).abs());
            }
        }
        Ok(within(worst(errs), 1e-8))
    });
    let reduced = part("reduced qubit D_Q", || {
        let mut errs = Vec::new();
        for &w in &ratios {
            let p = TwoQubitParams::new(1.0, w)?;
            let full = stationary_state(&liouvillian(&p.model()?))?;
            let single = QuantumState::new(partial_trace(full.matrix(), &[2, 2], &[0])?)?;
            let dq = report_from_stationary(single, Reversal::None)?.dq;
            errs.push((dq - 1.0 / (1.0 + w * w)).abs());
        }
        Ok(within(worst(errs), 1e-10))
    });
    let mut rows = Vec::new();
    let fig2 = part("Fig. 2 sweep over [0, 6]", || {
        let mut errs = Vec::new();
        for k in 0..=60 {
            let w = 0.1 * k as f64;
            let p = TwoQubitParams::new(1.0, w)?;
            let r = degree_of_quantumness_with(&p.model()?, Reversal::Conjugate)?;
            let cn = concurrence(&r.optimal_state)?;
            errs.push((r.dq - twoqubit_dq(&p)).abs());
            errs.push((cn - twoqubit_concurrence(&p)).abs());
            rows.push(vec![w, r.dq, cn]);
        }
        Ok(within(worst(errs), 1e-8))
    });
    Outcome {
        criterion: Criterion {
            id: 5,
            title: "two qubits with collective decay",
            parts: vec![degree, overlap, conc, series, reduced, fig2],
            known_failures: &[],
        },
        artifacts: vec![Artifact {
            name: "fig2.csv",
            contents: csv::table(&["omega_over_gamma", "dq", "concurrence"], &rows),
        }],
    }
}

fn nonmarkov() -> Criterion {
    let products = [0.1, 0.5, 2.0, 5.0];
    let volterra = part("Volterra c_t vs Lorentzian closed form", || {
        let mut notes = Vec::new();
        let mut all = Vec::new();
        for &gt in &products {
            let p = NonMarkovParams::lorentzian(1.0, gt)?;
            let times = uniform_grid(8.0, 80);
            let cs = memory_c_numeric(&p, &times)?;
            let err = worst(
                times
                    .iter()
                    .zip(&cs)
                    .map(|(t, c)| (c.re - lorentzian_c(1.0, gt, *t)).abs() + c.im.abs()),
            );
            notes.push(format!("{gt}: {err:.2e}"));
            all.push(err);
        }
        let err = worst(all);
        Ok((
            err <= 1e-6,
            format!("max error {err:.3e} (tolerance 1e-6); {}", notes.join(", ")),
        ))
    });
    let bounds = part("Q_t stays in [0, 2]", || {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &gt in &products {
            let p = NonMarkovParams::lorentzian(1.0, gt)?;
            for sz in [-1.0, -0.3, 0.4, 1.0] {
                for t in uniform_grid(30.0, 300) {
                    let q = nonmarkov_q(&p, sz, t)?;
                    lo = lo.min(q);
                    hi = hi.max(q);
                }
            }
        }
        Ok((lo >= 0.0 && hi <= 2.0, format!("range [{lo:.6}, {hi:.6}]")))
    });
    let degree = part("D_Q = 1", || {
        let mut errs = Vec::new();
        for &gt in &products {
            let p = NonMarkovParams::lorentzian(1.0, gt)?;
            let reached = worst([-1.0, 1.0].map(|sz| {
                nonmarkov_q(&p, sz, 400.0)
                    .map(|q| (q - 1.0).abs())
                    .unwrap_or(f64::NAN)
            }));
            errs.push((reached - 1.0).abs());
        }
        Ok(within(worst(errs), 1e-9))
    });
    let weak = part("weak coupling at 0.02", || {
        let p = NonMarkovParams::new(1.0, 0.02, Kernel::Lorentzian)?;
        let times = uniform_grid(4.0, 80);
        let mut errs = Vec::new();
        for &t in times.iter().skip(1) {
            let exact = lorentzian_c(1.0, 0.02, t);
            errs.push(((weak_coupling_c(&p, t) - exact) / exact).abs());
        }
        let err = worst(errs);
        Ok((err <= 0.02, format!("relative error {err:.3e}")))
    });
    Criterion {
        id: 6,
        title: "non-Markovian decay",
        parts: vec![volterra, bounds, degree, weak],
        known_failures: &[],
    }
}

fn commuting_ensemble(rng: &mut ChaCha8Rng) -> CliResult<JointModel> {
    let ds = rng.random_range(2..=3);
    let de = rng.random_range(2..=4);
    let v = random::unitary(de, rng);
    let proj = |e: usize| {
        let col = v.column(e).into_owned();
        &col * col.adjoint()
    };
    let diag = |vals: &[f64]| {
        vals.iter()
            .enumerate()
            .fold(ComplexMatrix::zeros(de, de), |acc, (e, x)| {
                acc + proj(e).map(|z| z * *x)
            })
    };
    let sigma0 = QuantumState::new(diag(&random::simplex(de, rng)))?;
    let energies: Vec<f64> = (0..de).map(|_| rng.random_range(-1.0..1.0)).collect();
    let h_e = diag(&energies);
    let mut h_i = ComplexMatrix::zeros(ds * de, ds * de);
    for e in 0..de {
        h_i += random::hermitian(ds, 0.8, rng).kronecker(&proj(e));
    }
    Ok(JointModel::new(
        random::hermitian(ds, 1.0, rng),
        h_e,
        h_i,
        sigma0,
    )?)
}

fn classicality(seed: u64) -> Criterion {
    let times = uniform_grid(5.0, 20);
    let noise_paths = part("(a) per-path Q for white, OU and telegraph noise", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 7);
        let base = random::hermitian(2, 1.0, &mut rng);
        let families = [
            NoiseProcess::white(0.8, pauli::sigma_z())?,
            NoiseProcess::new(NoiseFamily::OrnsteinUhlenbeck, 1.2, 0.5, pauli::sigma_x())?,
            NoiseProcess::new(
                NoiseFamily::Telegraph,
                0.9,
                0.5,
                random::hermitian(2, 1.0, &mut rng),
            )?,
        ];
        let rho = random::pure_state(2, &mut rng);
        let mut devs = Vec::new();
        for n in &families {
            devs.push(
                parallel::stochastic_q(n, &base, &rho, &times, 300, seed)?.max_path_deviation,
            );
        }
        Ok(within(worst(devs), 1e-12))
    });
    let ensembles = part(
        "(b) Hamiltonian ensembles: reconstruction and flat Q",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 8);
            let mut rec = Vec::new();
            let mut flat = Vec::new();
            for _ in 0..10 {
                let m = commuting_ensemble(&mut rng)?;
                let parts = hamiltonian_ensemble_reduction(&m)?;
                let rho = random::mixed_state(m.dim_s(), &mut rng);
                for &t in &times {
                    let mut mix = ComplexMatrix::zeros(m.dim_s(), m.dim_s());
                    for (p, h) in &parts {
                        let u = matrix_exponential(&h.map(|z| z * c(0.0, -t)))?;
                        mix += (&u * rho.matrix() * u.adjoint()).map(|z| z * *p);
                    }
                    rec.push(max_abs(&(mix - reduced_state(&m, &rho, t)?.matrix())));
                    flat.push((quantumness_direct(&m, &rho, t)? - 1.0).abs());
                }
            }
            let (r, f) = (worst(rec), worst(flat));
            Ok((
                r <= 1e-10 && f <= 1e-10,
                format!("reconstruction {r:.3e}, |Q - 1| {f:.3e}"),
            ))
        },
    );
    let waits = || -> CliResult<Vec<WaitingTime>> {
        Ok(vec![
            WaitingTime::exponential(1.0)?,
            WaitingTime::gamma(2.0, 2.0)?,
            WaitingTime::deterministic(0.7)?,
        ])
    };
    let collision_times = uniform_grid(4.0, 8);
    let collisional = part("(c) unital collisions, three waiting-time laws", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 9);
        let h = random::hermitian(2, 1.0, &mut rng);
        let rho = random::pure_state(2, &mut rng);
        let mut devs = Vec::new();
        for (name, kraus) in channels::builtin() {
            if name == "amplitude-damping" {
                continue;
            }
            for w in waits()? {
                let m = CollisionalModel::new(h.clone(), kraus.clone(), w)?;
                let est = collisional_q(
                    &m,
                    &rho,
                    &collision_times,
                    CollisionalMode::Series { n_max: None },
                )?;
                devs.push(est.series.max_deviation_from_one());
            }
        }
        Ok(within(worst(devs), 1e-9))
    });
    let kraus = part("(d) unitality check agrees with flat Q", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 10);
        let mut families: Vec<(String, Vec<ComplexMatrix>)> = channels::builtin();
        for k in 0..4 {
            let parts: Vec<(f64, ComplexMatrix)> = random::simplex(3, &mut rng)
                .into_iter()
                .map(|p| (p, random::unitary(2, &mut rng)))
                .collect();
            families.push((
                format!("random-unitary-mixture-{k}"),
                channels::mixture(&parts),
            ));
            let iso = random::unitary(4, &mut rng);
            let ks = (0..2)
                .map(|j| iso.view((2 * j, 0), (2, 2)).into_owned())
                .collect();
            families.push((format!("random-isometry-{k}"), ks));
        }
        let h = random::hermitian(2, 1.0, &mut rng);
        let states: Vec<QuantumState> = (0..3).map(|_| random::pure_state(2, &mut rng)).collect();
        let mut mismatches = Vec::new();
        let (mut unital, mut other) = (0, 0);
        for (name, ks) in &families {
            let check = unitality_check(ks)?;
            let m = CollisionalModel::new(h.clone(), ks.clone(), WaitingTime::exponential(1.0)?)?;
            let mut dev = 0.0f64;
            for rho in &states {
                let est = collisional_q(
                    &m,
                    rho,
                    &[0.5, 1.5, 3.0],
                    CollisionalMode::Series { n_max: None },
                )?;
                dev = dev.max(est.series.max_deviation_from_one());
            }
            let flat = dev <= 1e-9;
            if flat != check.unital || (!flat && dev < 1e-6) {
                mismatches.push(format!(
                    "{name} (residual {:.2e}, deviation {dev:.2e})",
                    check.residual
                ));
            }
            if check.unital {
                unital += 1;
            } else {
                other += 1;
            }
        }
        let detail = if mismatches.is_empty() {
            format!("{unital} unital and {other} non-unital families classified consistently")
        } else {
            format!("mismatched: {}", mismatches.join("; "))
        };
        Ok((mismatches.is_empty(), detail))
    });
    Criterion {
        id: 7,
        title: "classicality",
        parts: vec![noise_paths, ensembles, collisional, kraus],
        known_failures: &[],
    }
}

fn poisson_limit(seed: u64) -> Outcome {
    let times: Vec<f64> = (1..=10).map(|k| 0.3 * k as f64).collect();
    let mut rows = Vec::new();
    let p = part("10^4 paths vs Lindblad counterpart at 10 times", || {
        let h = pauli::sigma_z().map(|z| z * 0.5) + pauli::sigma_x().map(|z| z * 0.2);
        let m = CollisionalModel::new(
            h,
            channels::unitary(channels::hadamard()),
            WaitingTime::exponential(1.5)?,
        )?;
        let rho = QuantumState::bloch(2.2, 0.7);
        let exact = propagate_series(&liouvillian(&m.poisson_lindblad()?), rho.matrix(), &times)?;
        let mc = parallel::collisional_states(&m, &rho, &times, 10_000, seed)?;
        let mut worst_ratio = 0.0f64;
        for k in 0..times.len() {
            let dist = trace_distance(&mc.states[k], &exact[k])?;
            worst_ratio = worst_ratio.max(dist / mc.stderr[k]);
            rows.push(vec![times[k], dist, mc.stderr[k]]);
        }
        Ok((
            worst_ratio <= 3.0,
            format!("largest distance / stderr = {worst_ratio:.3} (limit 3)"),
        ))
    });
    Outcome {
        criterion: Criterion {
            id: 8,
            title: "collisional Poisson limit",
            parts: vec![p],
            known_failures: &[],
        },
        artifacts: vec![Artifact {
            name: "poisson_limit.csv",
            contents: csv::table(&["t", "trace_distance", "stderr"], &rows),
        }],
    }
}

const TRUNCATED_EXPONENTIAL: &str = "truncated exponential growth up to 2/gamma";

fn oscillator() -> Criterion {
    let truncated =
        part(TRUNCATED_EXPONENTIAL, || {
            let p = OscillatorParams::from_occupation(1.0, 1.0, 60)?;
            let rho = basis_state(61, 0)?;
            let times = uniform_grid(2.0, 20);
            // error actually incurred by the truncation, alarm or not
            let a_t = propagate_series(&dual_liouvillian(&p.model()?), rho.matrix(), &times)?;
            let rel: Vec<f64> = times
                .iter()
                .zip(&a_t)
                .map(|(t, a)| ((a.trace().re - oscillator_q(&p, *t)) / oscillator_q(&p, *t)).abs())
                .collect();
            let reach = times
                .iter()
                .zip(&rel)
                .take_while(|(_, e)| **e <= 1e-4)
                .last()
                .map_or(0.0, |(t, _)| *t);
            let measured = format!(
                "relative error {:.2e} at gamma t = 2, within 1e-4 only up to gamma t = {reach}",
                rel[rel.len() - 1]
            );
            match oscillator_q_numeric(&p, &rho, &times) {
                Ok(s) => {
                    let err =
                        worst(times.iter().zip(&s.values).map(|(t, q)| {
                            ((q - oscillator_q(&p, *t)) / oscillator_q(&p, *t)).abs()
                        }));
                    Ok((
                        err <= 1e-4,
                        format!("max relative error {err:.3e}; {measured}"),
                    ))
                }
                Err(Error::TruncationTail { tail, .. }) => Ok((
                    false,
                    format!("truncation alarm (estimated {tail:.2e}); {measured}"),
                )),
                Err(e) => Err(e.into()),
            }
        });
    let proxy = part("infinite-temperature proxy", || {
        let n_th = 1e4;
        let p = OscillatorParams::from_occupation(1.0 / (2.0 * n_th + 1.0), n_th, 40)?;
        let numeric = oscillator_q_numeric(&p, &basis_state(41, 0)?, &[1.0])?.values[0];
        let closed = oscillator_q(&p, 1.0);
        let err = (numeric - 1.0).abs().max((closed - 1.0).abs());
        Ok((
            err <= 2e-4,
            format!("|Q - 1| = {err:.3e} at t = 1/(kappa + zeta)"),
        ))
    });
    let renormalized = part("D_QR eigen route", || {
        let mut errs = Vec::new();
        for beta in [0.1, 1.0, 3.0] {
            let p = OscillatorParams::with_tail(1.0, beta, 1e-12)?;
            errs.push((oscillator_dqr_numeric(&p)? - (1.0 - (-beta).exp())).abs());
            errs.push((oscillator_dqr(&p) - (1.0 - (-beta).exp())).abs());
        }
        Ok(within(worst(errs), 1e-8))
    });
    Criterion {
        id: 9,
        title: "damped oscillator",
        parts: vec![truncated, proxy, renormalized],
        known_failures: &[TRUNCATED_EXPONENTIAL],
    }
}

fn derivatives(seed: u64) -> Criterion {
    let mut first = Vec::new();
    let mut second = Vec::new();
    let setup = (|| -> CliResult<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 10);
        let h = 2e-3;
        for _ in 0..10 {
            let (m, rho) = random_joint(&mut rng)?;
            let t = rng.random_range(0.2..3.0);
            let q = |s: f64| quantumness_direct(&m, &rho, s);
            let f = [
                q(t - 2.0 * h)?,
                q(t - h)?,
                q(t)?,
                q(t + h)?,
                q(t + 2.0 * h)?,
            ];
            let d1 = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
            let d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
            first.push((q_derivative(&m, &rho, t, 1)? - d1).abs());
            second.push((q_derivative(&m, &rho, t, 2)? - d2).abs());
        }
        Ok(())
    })();
    let failed = setup.as_ref().err().map(|e| format!("error: {e}"));
    let make = |name, errs: &[f64], tol| match &failed {
        Some(msg) => Part {
            name,
            passed: false,
            detail: msg.clone(),
        },
        None => {
            let (passed, detail) = within(worst(errs.iter().copied()), tol);
            Part {
                name,
                passed,
                detail,
            }
        }
    };
    Criterion {
        id: 10,
        title: "derivative identities",
        parts: vec![
            make("first derivative", &first, 1e-6),
            make("second derivative", &second, 1e-4),
        ],
        known_failures: &[],
    }
}

const TELEGRAPH_RUN: &str = "seed = 0
initial_state = \"pure(1.1, 0.4)\"

[times]
t_max = 4.0
steps = 40

[stochastic]
hamiltonian = \"2 2 0.5 0.2 0.2 -0.5\"
family = \"telegraph\"
amplitude = 0.9
correlation_time = 0.4
coupling = \"2 2 0 -1i 1i 0\"
paths = 600
";

const COLLISION_RUN: &str = "seed = 0
mode = \"monte-carlo\"
initial_state = \"basis(1)\"

[times]
t_max = 3.0
steps = 30

[collisional]
hamiltonian = \"2 2 0 0.3 0.3 0\"
channel = \"amplitude-damping\"
waiting = \"gamma\"
shape = 2.0
rate = 3.0
paths = 600
";

fn sampled_csv(text: &str, seed: u64) -> CliResult<String> {
    let mut cfg = RunConfig::parse(text)?;
    cfg.seed = Some(seed);
    let r = commands::qt(&cfg)?;
    let rows: Vec<Vec<f64>> = (0..r.times.len())
        .map(|k| {
            vec![
                r.times[k],
                r.values[k],
                r.stderr.as_ref().map_or(0.0, |s| s[k]),
            ]
        })
        .collect();
    Ok(csv::table(&["t", "Q", "stderr"], &rows))
}

fn determinism(seed: u64) -> Outcome {
    let mut artifacts = Vec::new();
    let repeat = part("repeated sampled runs are identical", || {
        let mut same = true;
        for (name, text) in [
            ("telegraph_q.csv", TELEGRAPH_RUN),
            ("collisional_q.csv", COLLISION_RUN),
        ] {
            let a = sampled_csv(text, seed)?;
            let b = sampled_csv(text, seed)?;
            same &= a == b;
            artifacts.push(Artifact { name, contents: a });
        }
        Ok((
            same,
            if same {
                "byte-identical CSVs".into()
            } else {
                "CSV bytes differ between runs".into()
            },
        ))
    });
    let threads = part("threaded and sequential estimates agree bitwise", || {
        let cfg = RunConfig::parse(TELEGRAPH_RUN)?;
        let crate::model::Model::Stochastic {
            noise: n,
            hamiltonian,
            ..
        } = crate::model::Model::build(&cfg.model)?
        else {
            return Err(CliError::parse("telegraph run is not stochastic"));
        };
        let rho = QuantumState::bloch(1.1, 0.4);
        let times = cfg.times.grid();
        let threaded = parallel::stochastic_q(&n, &hamiltonian, &rho, &times, 600, seed)?;
        let sequential = noise::stochastic_q(&n, &hamiltonian, &rho, &times, 600, seed)?;
        let same = threaded.series.values == sequential.series.values
            && threaded.stderr == sequential.stderr;
        Ok((
            same,
            if same {
                "identical".into()
            } else {
                "estimates differ".into()
            },
        ))
    });
    let sweep = part("threaded sweep keeps input order", || {
        let cfg = RunConfig::parse("[times]\nt_max = 1.0\nsteps = 1\n[model]\nname = \"two-qubit\"\ngamma = 1.0\nomega = 1.0\n")?;
        let values: Vec<f64> = (0..24).map(|k| 6.0 - 0.25 * k as f64).collect();
        let a = commands::sweep(&cfg.model, "omega", &values)?;
        let b = commands::sweep(&cfg.model, "omega", &values)?;
        let ordered = a.lines().skip(1).zip(&values).all(|(line, v)| {
            line.split(',').next().and_then(|x| x.parse::<f64>().ok()) == Some(*v)
        });
        Ok((
            a == b && ordered,
            format!(
                "{} rows, identical and in input order: {}",
                values.len(),
                a == b && ordered
            ),
        ))
    });
    Outcome {
        criterion: Criterion {
            id: 11,
            title: "determinism",
            parts: vec![repeat, threads, sweep],
            known_failures: &[],
        },
        artifacts,
    }
}
