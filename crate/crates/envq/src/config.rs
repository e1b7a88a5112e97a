//! Run configuration, written as TOML.
//!
//! ```toml
//! seed = 7                      # required for stochastic runs
//! mode = "series"               # collisional runs: series | monte-carlo
//! output = "q.csv"
//! initial_state = "pure(1.2, 0.0)"
//!
//! [times]
//! t_max = 10.0
//! steps = 200
//!
//! [model]
//! name = "fluorescence"
//! gamma = 1.0
//! omega = 5.0
//! ```
//!
//! Exactly one model section is allowed: `[model]` for a built-in model, or
//! one of `[lindblad]`, `[microscopic]`, `[collisional]`, `[stochastic]`.
//! Matrices are strings in the matrix text format of [`envq_core::text`].

use std::path::{Path, PathBuf};

use envq_core::text::parse_matrix;
use envq_core::ComplexMatrix;
use serde::de::DeserializeOwned;
use toml::{Table, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Series,
    MonteCarlo,
}

impl std::str::FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "series" => Ok(Mode::Series),
            "monte-carlo" => Ok(Mode::MonteCarlo),
            other => Err(CliError::parse(format!(
                "unknown mode '{other}' (series | monte-carlo)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    ThermalTls,
    NonmarkovDecay,
    Fluorescence,
    TwoQubit,
    Oscillator,
}

impl Builtin {
    pub const ALL: [(&'static str, Builtin); 5] = [
        ("thermal-tls", Builtin::ThermalTls),
        ("nonmarkov-decay", Builtin::NonmarkovDecay),
        ("fluorescence", Builtin::Fluorescence),
        ("two-qubit", Builtin::TwoQubit),
        ("oscillator", Builtin::Oscillator),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL
            .iter()
            .find(|(_, b)| *b == self)
            .map(|(n, _)| *n)
            .expect("listed")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Builtin(Builtin),
    Lindblad,
    Microscopic,
    Collisional,
    Stochastic,
}

impl ModelKind {
    pub fn section(self) -> &'static str {
        match self {
            ModelKind::Builtin(_) => "model",
            ModelKind::Lindblad => "lindblad",
            ModelKind::Microscopic => "microscopic",
            ModelKind::Collisional => "collisional",
            ModelKind::Stochastic => "stochastic",
        }
    }
}

/// A model section: its kind and the remaining key-value parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub params: Table,
}

impl ModelSpec {
    /// Typed view of the parameters; unknown keys are rejected.
    pub fn parse<T: DeserializeOwned>(&self) -> CliResult<T> {
        Value::Table(self.params.clone())
            .try_into()
            .map_err(|e| CliError::parse(format!("[{}]: {e}", self.kind.section())))
    }

    /// Copy with the numeric parameter `name` replaced by `value`.
    pub fn with_param(&self, name: &str, value: f64) -> CliResult<ModelSpec> {
        let mut params = self.params.clone();
        let slot = params.get_mut(name).ok_or_else(|| {
            CliError::parse(format!(
                "no parameter '{name}' in [{}]",
                self.kind.section()
            ))
        })?;
        *slot = match slot {
            Value::Integer(_) if value.fract() == 0.0 && value.abs() < 9e15 => {
                Value::Integer(value as i64)
            }
            Value::Integer(_) | Value::Float(_) => Value::Float(value),
            _ => {
                return Err(CliError::parse(format!(
                    "parameter '{name}' is not numeric"
                )))
            }
        };
        Ok(ModelSpec {
            kind: self.kind,
            params,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Optimal,
    MaximallyMixed,
    /// Qubit Bloch angles.
    Pure {
        theta: f64,
        phi: f64,
    },
    /// Computational basis state `|k⟩`, index 0 first.
    Basis(usize),
    Matrix(ComplexMatrix),
}

impl InitialState {
    fn from_keyword(s: &str) -> CliResult<Self> {
        let s = s.trim();
        let args = |prefix: &str| -> Option<Vec<&str>> {
            let inner = s
                .strip_prefix(prefix)?
                .trim_start()
                .strip_prefix('(')?
                .strip_suffix(')')?;
            Some(inner.split(',').map(str::trim).collect())
        };
        let number = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| CliError::parse(format!("bad number '{x}' in '{s}'")))
        };
        match s {
            "optimal" => return Ok(InitialState::Optimal),
            "maximally-mixed" => return Ok(InitialState::MaximallyMixed),
            _ => {}
        }
        if let Some(a) = args("pure") {
            if let [theta, phi] = a[..] {
                return Ok(InitialState::Pure {
                    theta: number(theta)?,
                    phi: number(phi)?,
                });
            }
        }
        if let Some(a) = args("basis") {
            if let [k] = a[..] {
                return k
                    .parse()
                    .map(InitialState::Basis)
                    .map_err(|_| CliError::parse(format!("bad index in '{s}'")));
            }
        }
        Err(CliError::parse(format!(
            "initial_state '{s}' is not one of optimal, maximally-mixed, pure(θ, φ), basis(k)"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Times {
    pub t_max: f64,
    pub steps: usize,
}

impl Times {
    pub fn grid(&self) -> Vec<f64> {
        envq_core::quantumness::uniform_grid(self.t_max, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub initial_state: InitialState,
    pub times: Times,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub output: Option<PathBuf>,
}

const MODEL_SECTIONS: [(&str, ModelKind); 4] = [
    ("lindblad", ModelKind::Lindblad),
    ("microscopic", ModelKind::Microscopic),
    ("collisional", ModelKind::Collisional),
    ("stochastic", ModelKind::Stochastic),
];

fn take_table(root: &mut Table, key: &str) -> CliResult<Option<Table>> {
    match root.remove(key) {
        None => Ok(None),
        Some(Value::Table(t)) => Ok(Some(t)),
        Some(_) => Err(CliError::parse(format!("'{key}' must be a section"))),
    }
}

fn number(v: &Value, key: &str) -> CliResult<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(n) => Ok(*n as f64),
        _ => Err(CliError::parse(format!("'{key}' must be a number"))),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut root: Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::parse(e.message().to_string()))?;

        let mut models = Vec::new();
        if let Some(mut t) = take_table(&mut root, "model")? {
            let name = match t.remove("name") {
                Some(Value::String(s)) => s,
                _ => return Err(CliError::parse("[model] needs a string 'name'")),
            };
            let builtin = Builtin::ALL
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, b)| *b)
                .ok_or_else(|| CliError::parse(format!("unknown built-in model '{name}'")))?;
            models.push(ModelSpec {
                kind: ModelKind::Builtin(builtin),
                params: t,
            });
        }
        for (section, kind) in MODEL_SECTIONS {
            if let Some(t) = take_table(&mut root, section)? {
                models.push(ModelSpec { kind, params: t });
            }
        }
        let model = match models.len() {
            1 => models.pop().expect("one model"),
            0 => return Err(CliError::parse("no model section")),
            _ => return Err(CliError::parse("more than one model section")),
        };

        let times =
            take_table(&mut root, "times")?.ok_or_else(|| CliError::parse("missing [times]"))?;
        let t_max = number(
            times
                .get("t_max")
                .ok_or_else(|| CliError::parse("[times] needs t_max"))?,
            "t_max",
        )?;
        let steps = match times.get("steps") {
            Some(Value::Integer(n)) if *n >= 1 => *n as usize,
            _ => return Err(CliError::parse("[times] needs a positive integer 'steps'")),
        };
        if let Some(k) = times.keys().find(|k| *k != "t_max" && *k != "steps") {
            return Err(CliError::parse(format!("unknown key '{k}' in [times]")));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(CliError::parse("t_max must be positive"));
        }

        let initial_state = match root.remove("initial_state") {
            None => InitialState::Optimal,
            Some(Value::String(s)) => InitialState::from_keyword(&s)?,
            Some(Value::Table(t)) => match (t.get("matrix"), t.len()) {
                (Some(Value::String(m)), 1) => InitialState::Matrix(
                    parse_matrix(m).map_err(|e| CliError::parse(format!("initial_state: {e}")))?,
                ),
                _ => {
                    return Err(CliError::parse(
                        "[initial_state] takes a single 'matrix' string",
                    ))
                }
            },
            Some(_) => {
                return Err(CliError::parse(
                    "initial_state must be a keyword or a section",
                ))
            }
        };

        let seed = match root.remove("seed") {
            None => None,
            Some(Value::Integer(n)) if n >= 0 => Some(n as u64),
            Some(_) => return Err(CliError::parse("seed must be a non-negative integer")),
        };
        let mode = match root.remove("mode") {
            None => None,
            Some(Value::String(s)) => Some(s.parse()?),
            Some(_) => return Err(CliError::parse("mode must be a string")),
        };
        let output = match root.remove("output") {
            None => None,
            Some(Value::String(s)) => Some(PathBuf::from(s)),
            Some(_) => return Err(CliError::parse("output must be a path string")),
        };
        if let Some(k) = root.keys().next() {
            return Err(CliError::parse(format!("unknown top-level key '{k}'")));
        }

        Ok(RunConfig {
            model,
            initial_state,
            times: Times { t_max, steps },
            seed,
            mode,
            output,
        })
    }

    /// Collisional runs default to the series mode.
    pub fn effective_mode(&self) -> Mode {
        self.mode.unwrap_or(Mode::Series)
    }

    /// Checks that need the command-line overrides applied first.
    pub fn validate(&self) -> CliResult<()> {
        let random = match self.model.kind {
            ModelKind::Stochastic => true,
            ModelKind::Collisional => self.effective_mode() == Mode::MonteCarlo,
            _ => false,
        };
        if random && self.seed.is_none() {
            return Err(CliError::parse(
                "this model samples random paths and needs a seed",
            ));
        }
        Ok(())
    }
}

/// Parses a matrix-valued parameter.
pub fn matrix(text: &str, key: &str) -> CliResult<ComplexMatrix> {
    parse_matrix(text).map_err(|e| CliError::parse(format!("{key}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[times]\nt_max = 2.0\nsteps = 4\n";

    #[test]
    fn builtin_model() {
        let cfg = RunConfig::parse(&format!("initial_state = \"pure(1.0, 0.5)\"\n{BASE}[model]\nname = \"fluorescence\"\ngamma = 1\nomega = 2.5\n")).unwrap();
        assert_eq!(cfg.model.kind, ModelKind::Builtin(Builtin::Fluorescence));
        assert_eq!(
            cfg.initial_state,
            InitialState::Pure {
                theta: 1.0,
                phi: 0.5
            }
        );
        assert_eq!(cfg.times.grid().len(), 5);
        let swept = cfg.model.with_param("omega", 3.0).unwrap();
        assert_eq!(swept.params["omega"], Value::Float(3.0));
        assert_eq!(
            cfg.model.with_param("gamma", 2.0).unwrap().params["gamma"],
            Value::Integer(2)
        );
        assert!(cfg.model.with_param("kappa", 1.0).is_err());
    }

    #[test]
    fn rejects_malformed_configs() {
        let two =
            format!("{BASE}[model]\nname = \"oscillator\"\n[lindblad]\nhamiltonian = \"1 1 0\"\n");
        for text in [
            BASE.to_string(),
            two,
            format!("{BASE}[model]\nname = \"nope\"\n"),
            "[model]\nname = \"oscillator\"\n".to_string(),
            format!("{BASE}colour = 1\n[model]\nname = \"oscillator\"\n"),
            format!("{BASE}initial_state = \"pure(1)\"\n[model]\nname = \"oscillator\"\n"),
            "[times]\nt_max = -1.0\nsteps = 3\n[model]\nname = \"oscillator\"\n".to_string(),
        ] {
            assert!(
                matches!(RunConfig::parse(&text), Err(CliError::Parse(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn matrix_initial_state_and_seed_rule() {
        let text = format!(
            "{BASE}[initial_state]\nmatrix = \"2 2 1 0 0 0\"\n[stochastic]\nhamiltonian = \"2 2 0 0 0 0\"\n"
        );
        let mut cfg = RunConfig::parse(&text).unwrap();
        assert!(matches!(cfg.initial_state, InitialState::Matrix(_)));
        assert!(cfg.validate().is_err());
        cfg.seed = Some(3);
        assert!(cfg.validate().is_ok());
    }
}
