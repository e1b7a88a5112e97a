//! The `qt`, `dq` and `sweep` subcommands as library calls.

use envq_core::linalg::{concurrence, QuantumState};
use envq_core::microscopic::{hamiltonian_ensemble_reduction, quantumness_via_dual};
use envq_core::models::nonmarkov::{memory_c, memory_c_numeric};
use envq_core::models::oscillator::{
    oscillator_dqr, oscillator_dqr_numeric, oscillator_q, oscillator_q_numeric,
};
use envq_core::models::Kernel;
use envq_core::quantumness::{
    degree_of_quantumness_with, q_series_with, unitality_check, Branch, QuantumnessSeries, Reversal,
};
use envq_core::stochastic::{collisional_q, CollisionalMode, WaitingTime};
use envq_core::text::format_complex;
use envq_core::{ComplexMatrix, Error};

use crate::config::{Mode, ModelSpec, RunConfig};
use crate::csv;
use crate::error::{CliError, CliResult};
use crate::model::Model;
use crate::parallel;

/// `Q_t` on the configured grid, with Monte Carlo standard errors when the
/// model is sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct QtResult {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Option<Vec<f64>>,
}

impl QtResult {
    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self
            .times
            .iter()
            .zip(&self.values)
            .map(|(t, q)| vec![*t, *q])
            .collect();
        csv::table(&["t", "Q"], &rows)
    }
}

fn bounded(times: &[f64], values: Vec<f64>, dim: usize) -> CliResult<Vec<f64>> {
    let s = QuantumnessSeries::new(times.to_vec(), values, dim)?;
    s.check_bounds(1e-8)?;
    Ok(s.values)
}

pub fn qt(cfg: &RunConfig) -> CliResult<QtResult> {
    cfg.validate()?;
    let model = Model::build(&cfg.model)?;
    let rho = model.initial_state(&cfg.initial_state)?;
    let times = cfg.times.grid();
    let mut stderr = None;
    let values = match &model {
        Model::Lindblad { model, reversal } => {
            q_series_with(model, &rho, &times, *reversal)?.values
        }
        Model::NonMarkov(p) => {
            let sz0 = (rho.matrix()[(0, 0)] - rho.matrix()[(1, 1)]).re;
            let cs = match p.kernel {
                Kernel::Tabulated { .. } => memory_c_numeric(p, &times)?,
                _ => times
                    .iter()
                    .map(|&t| memory_c(p, t))
                    .collect::<Result<_, _>>()?,
            };
            bounded(
                &times,
                cs.iter()
                    .map(|c| 1.0 - sz0 * (1.0 - c.norm_sqr()))
                    .collect(),
                2,
            )?
        }
        Model::Oscillator {
            params,
            numeric: true,
        } => oscillator_q_numeric(params, &rho, &times)?.values,
        Model::Oscillator {
            params,
            numeric: false,
        } => times.iter().map(|&t| oscillator_q(params, t)).collect(),
        Model::Microscopic(m) => {
            let qs = times
                .iter()
                .map(|&t| quantumness_via_dual(m, &rho, t))
                .collect::<Result<_, _>>()?;
            bounded(&times, qs, m.dim_s())?
        }
        Model::Collisional { model, paths } => match cfg.effective_mode() {
            Mode::Series => {
                collisional_q(model, &rho, &times, CollisionalMode::Series { n_max: None })?
                    .series
                    .values
            }
            Mode::MonteCarlo => {
                let est = parallel::collisional_q(
                    model,
                    &rho,
                    &times,
                    *paths,
                    cfg.seed.expect("validated"),
                )?;
                stderr = Some(est.stderr);
                est.series.values
            }
        },
        Model::Stochastic {
            noise,
            hamiltonian,
            paths,
        } => {
            let est = parallel::stochastic_q(
                noise,
                hamiltonian,
                &rho,
                &times,
                *paths,
                cfg.seed.expect("validated"),
            )?;
            stderr = Some(est.stderr);
            est.series.values
        }
    };
    Ok(QtResult {
        times,
        values,
        stderr,
    })
}

/// Result of the `dq` subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeReport {
    pub model: String,
    /// `D_Q`, or `D_QR` for the oscillator.
    pub measure: &'static str,
    pub dq: f64,
    pub q_infinity: Option<f64>,
    pub branch: Option<Branch>,
    pub reversal: Option<Reversal>,
    pub optimal_state: Option<QuantumState>,
    pub stationary_state: Option<QuantumState>,
    pub concurrence: Option<f64>,
    pub note: Option<&'static str>,
}

impl DegreeReport {
    fn classical(model: String, note: &'static str) -> Self {
        DegreeReport {
            model,
            measure: "D_Q",
            dq: 0.0,
            q_infinity: Some(1.0),
            branch: None,
            reversal: None,
            optimal_state: None,
            stationary_state: None,
            concurrence: None,
            note: Some(note),
        }
    }

    /// Flat `key = value` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        line("model", self.model.clone());
        line("measure", self.measure.into());
        line("dq", csv::number(self.dq));
        if let Some(q) = self.q_infinity {
            line("q_infinity", csv::number(q));
        }
        if let Some(b) = self.branch {
            line(
                "branch",
                if b == Branch::Upper { "upper" } else { "lower" }.into(),
            );
        }
        if let Some(r) = self.reversal {
            line(
                "reversal",
                if r == Reversal::None {
                    "none"
                } else {
                    "conjugate"
                }
                .into(),
            );
        }
        if let Some(c) = self.concurrence {
            line("concurrence", csv::number(c));
        }
        if let Some(n) = self.note {
            line("note", n.into());
        }
        let mut entries = |name: &str, m: &ComplexMatrix, diagonal_only: bool| {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    if !diagonal_only || i == j {
                        let z = m[(i, j)];
                        let z = envq_core::C64::new(csv_round(z.re), csv_round(z.im));
                        out.push_str(&format!("{name}[{i}][{j}] = {}\n", format_complex(z)));
                    }
                }
            }
        };
        if let Some(s) = &self.optimal_state {
            entries("optimal_state", s.matrix(), s.dim() > 8);
        }
        if let Some(s) = &self.stationary_state {
            entries("stationary_state", s.matrix(), s.dim() > 8);
        }
        out
    }
}

fn csv_round(x: f64) -> f64 {
    csv::number(x).parse().expect("formatted number parses")
}

fn label(spec: &ModelSpec) -> String {
    match spec.kind {
        crate::config::ModelKind::Builtin(b) => b.name().into(),
        k => k.section().into(),
    }
}

pub fn dq(spec: &ModelSpec) -> CliResult<DegreeReport> {
    let model = Model::build(spec)?;
    let name = label(spec);
    Ok(match &model {
        Model::Lindblad { model, reversal } => {
            let r = degree_of_quantumness_with(model, *reversal)?;
            let c = if model.dim() == 4 {
                Some(concurrence(&r.optimal_state)?)
            } else {
                None
            };
            DegreeReport {
                model: name,
                measure: "D_Q",
                dq: r.dq,
                q_infinity: Some(r.q_infinity),
                branch: Some(r.branch),
                reversal: Some(r.reversal),
                optimal_state: Some(r.optimal_state),
                stationary_state: Some(r.stationary),
                concurrence: c,
                note: None,
            }
        }
        Model::NonMarkov(p) => {
            let ground = model.initial_state(&crate::config::InitialState::Optimal)?;
            DegreeReport {
                model: name,
                measure: "D_Q",
                dq: envq_core::models::nonmarkov::nonmarkov_dq(p),
                q_infinity: matches!(p.kernel, Kernel::Lorentzian).then_some(2.0),
                branch: Some(Branch::Upper),
                reversal: None,
                optimal_state: Some(ground.clone()),
                stationary_state: matches!(p.kernel, Kernel::Lorentzian).then_some(ground),
                concurrence: None,
                note: Some(
                    "the ground state is reached whenever c_t decays; D_Q = 1 for every kernel",
                ),
            }
        }
        Model::Oscillator { params, .. } => {
            let numeric = oscillator_dqr_numeric(params)?;
            let closed = oscillator_dqr(params);
            if (numeric - closed).abs() > 1e-8 {
                return Err(Error::RouteDisagreement {
                    difference: (numeric - closed).abs(),
                }
                .into());
            }
            DegreeReport {
                model: name,
                measure: "D_QR",
                dq: numeric,
                q_infinity: None,
                branch: Some(Branch::Upper),
                reversal: None,
                optimal_state: Some(model.initial_state(&crate::config::InitialState::Optimal)?),
                stationary_state: Some(envq_core::models::oscillator::truncated_thermal_state(
                    params,
                )),
                concurrence: None,
                note: Some(
                    "renormalized degree, largest eigenvalue of the thermal stationary state",
                ),
            }
        }
        Model::Microscopic(m) => {
            hamiltonian_ensemble_reduction(m)?;
            DegreeReport::classical(name, "Hamiltonian ensemble: [H, I (x) sigma0] = 0")
        }
        Model::Stochastic { .. } => {
            DegreeReport::classical(name, "random unitary evolution on every path")
        }
        Model::Collisional { model, .. } => {
            if unitality_check(model.collision())?.unital {
                DegreeReport::classical(name, "unital collision channel")
            } else if let WaitingTime::Exponential { .. } = model.waiting() {
                let r = degree_of_quantumness_with(&model.poisson_lindblad()?, Reversal::None)?;
                DegreeReport {
                    model: name,
                    measure: "D_Q",
                    dq: r.dq,
                    q_infinity: Some(r.q_infinity),
                    branch: Some(r.branch),
                    reversal: Some(r.reversal),
                    optimal_state: Some(r.optimal_state),
                    stationary_state: Some(r.stationary),
                    concurrence: None,
                    note: Some("Poisson collisions average to a Lindblad semigroup"),
                }
            } else {
                return Err(Error::InvalidParameter(
                    "D_Q of a non-unital collisional model needs exponential waiting times".into(),
                )
                .into());
            }
        }
    })
}

/// `param,dq[,concurrence]` for each value, in input order.
pub fn sweep(spec: &ModelSpec, param: &str, values: &[f64]) -> CliResult<String> {
    spec.with_param(param, 0.0)?;
    let with_concurrence =
        matches!(Model::build(spec)?, Model::Lindblad { ref model, .. } if model.dim() == 4);
    let rows: Vec<CliResult<Vec<f64>>> = parallel::ordered_map(values, |&v| {
        let r = dq(&spec.with_param(param, v)?)?;
        let mut row = vec![v, r.dq];
        if with_concurrence {
            row.push(r.concurrence.unwrap_or(f64::NAN));
        }
        Ok(row)
    });
    let rows = rows.into_iter().collect::<CliResult<Vec<_>>>()?;
    let mut header = vec![param, "dq"];
    if with_concurrence {
        header.push("concurrence");
    }
    Ok(csv::table(&header, &rows))
}

/// Parses `a,b,c` or `start:stop:count`.
pub fn parse_values(text: &str) -> CliResult<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::parse(format!("bad sweep value '{s}'")))
    };
    if let [a, b, n] = text.split(':').collect::<Vec<_>>()[..] {
        let (a, b) = (num(a)?, num(b)?);
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| CliError::parse(format!("bad point count '{n}'")))?;
        return Ok(match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n)
                .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
                .collect(),
        });
    }
    text.split(',').map(num).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("0, 0.5,1").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_values("0:6:4").unwrap(), vec![0.0, 2.0, 4.0, 6.0]);
        assert!(parse_values("").unwrap().is_empty());
        assert!(parse_values("a,b").is_err());
    }
}
