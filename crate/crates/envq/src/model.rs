//! Turns a model section into something that can be evaluated.

use std::f64::consts::PI;

use envq_core::linalg::{QuantumState, C64};
use envq_core::microscopic::JointModel;
use envq_core::models::{
    FluorescenceParams, Kernel, NonMarkovParams, OscillatorParams, ThermalTlsParams, TwoQubitParams,
};
use envq_core::quantumness::{degree_of_quantumness_with, Reversal};
use envq_core::stochastic::{channels, CollisionalModel, NoiseFamily, NoiseProcess, WaitingTime};
use envq_core::{ComplexMatrix, LindbladModel};
use serde::Deserialize;

use crate::config::{matrix, Builtin, InitialState, ModelKind, ModelSpec};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
pub enum Model {
    Lindblad {
        model: LindbladModel,
        reversal: Reversal,
    },
    NonMarkov(NonMarkovParams),
    Oscillator {
        params: OscillatorParams,
        numeric: bool,
    },
    Microscopic(JointModel),
    Collisional {
        model: CollisionalModel,
        paths: usize,
    },
    Stochastic {
        noise: NoiseProcess,
        hamiltonian: ComplexMatrix,
        paths: usize,
    },
}

fn default_gamma() -> f64 {
    1.0
}

fn default_paths() -> usize {
    1000
}

fn reversal(name: Option<&str>, fallback: Reversal) -> CliResult<Reversal> {
    match name {
        None => Ok(fallback),
        Some("none") => Ok(Reversal::None),
        Some("conjugate") => Ok(Reversal::Conjugate),
        Some(other) => Err(CliError::parse(format!(
            "unknown reversal '{other}' (none | conjugate)"
        ))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ThermalBlock {
    #[serde(default = "default_gamma")]
    gamma: f64,
    beta_hw0: f64,
    omega0: Option<f64>,
    reversal: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DrivenBlock {
    #[serde(default = "default_gamma")]
    gamma: f64,
    omega: f64,
    reversal: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NonMarkovBlock {
    #[serde(default = "default_gamma")]
    gamma: f64,
    tau_c: f64,
    kernel: Option<String>,
    dt: Option<f64>,
    values: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OscillatorBlock {
    #[serde(default = "default_gamma")]
    gamma: f64,
    beta_hw0: Option<f64>,
    n_th: Option<f64>,
    n_max: Option<usize>,
    route: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JumpBlock {
    rate: f64,
    operator: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LindbladBlock {
    hamiltonian: String,
    #[serde(default)]
    jump: Vec<JumpBlock>,
    rates: Option<String>,
    #[serde(default)]
    operators: Vec<String>,
    reversal: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MicroscopicBlock {
    h_system: String,
    h_env: String,
    h_int: String,
    env_state: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CollisionalBlock {
    hamiltonian: String,
    channel: Option<String>,
    kraus: Option<Vec<String>>,
    waiting: String,
    rate: Option<f64>,
    shape: Option<f64>,
    interval: Option<f64>,
    #[serde(default = "default_paths")]
    paths: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StochasticBlock {
    hamiltonian: String,
    #[serde(default = "default_family")]
    family: String,
    #[serde(default)]
    amplitude: f64,
    #[serde(default)]
    correlation_time: f64,
    coupling: Option<String>,
    #[serde(default = "default_paths")]
    paths: usize,
}

fn default_family() -> String {
    "white".into()
}

fn required(value: Option<f64>, key: &str, section: &str) -> CliResult<f64> {
    value.ok_or_else(|| CliError::parse(format!("[{section}] needs '{key}'")))
}

impl Model {
    pub fn build(spec: &ModelSpec) -> CliResult<Model> {
        Ok(match spec.kind {
            ModelKind::Builtin(Builtin::ThermalTls) => {
                let b: ThermalBlock = spec.parse()?;
                let mut p = ThermalTlsParams::new(b.gamma, b.beta_hw0)?;
                if let Some(w) = b.omega0 {
                    p = p.with_omega0(w)?;
                }
                Model::Lindblad {
                    model: p.model()?,
                    reversal: reversal(b.reversal.as_deref(), Reversal::None)?,
                }
            }
            ModelKind::Builtin(Builtin::Fluorescence) => {
                let b: DrivenBlock = spec.parse()?;
                let p = FluorescenceParams::new(b.gamma, b.omega)?;
                Model::Lindblad {
                    model: p.model()?,
                    reversal: reversal(b.reversal.as_deref(), Reversal::None)?,
                }
            }
            ModelKind::Builtin(Builtin::TwoQubit) => {
                let b: DrivenBlock = spec.parse()?;
                let p = TwoQubitParams::new(b.gamma, b.omega)?;
                Model::Lindblad {
                    model: p.model()?,
                    reversal: reversal(b.reversal.as_deref(), Reversal::Conjugate)?,
                }
            }
            ModelKind::Builtin(Builtin::NonmarkovDecay) => {
                let b: NonMarkovBlock = spec.parse()?;
                let kernel = match b.kernel.as_deref().unwrap_or("lorentzian") {
                    "lorentzian" => Kernel::Lorentzian,
                    "single-mode" => Kernel::SingleMode,
                    "tabulated" => Kernel::Tabulated {
                        dt: required(b.dt, "dt", "model")?,
                        values: b
                            .values
                            .ok_or_else(|| CliError::parse("tabulated kernel needs 'values'"))?
                            .into_iter()
                            .map(|v| C64::new(v, 0.0))
                            .collect(),
                    },
                    other => return Err(CliError::parse(format!("unknown kernel '{other}'"))),
                };
                Model::NonMarkov(NonMarkovParams::new(b.gamma, b.tau_c, kernel)?)
            }
            ModelKind::Builtin(Builtin::Oscillator) => {
                let b: OscillatorBlock = spec.parse()?;
                let beta = match (b.beta_hw0, b.n_th) {
                    (Some(beta), None) => beta,
                    (None, Some(n)) if n > 0.0 => (1.0 + 1.0 / n).ln(),
                    _ => {
                        return Err(CliError::parse(
                            "[model] oscillator needs exactly one of beta_hw0, n_th (> 0)",
                        ))
                    }
                };
                let params = match b.n_max {
                    Some(n) => OscillatorParams::new(b.gamma, beta, n)?,
                    None => OscillatorParams::with_tail(
                        b.gamma,
                        beta,
                        envq_core::models::oscillator::TAIL_TOLERANCE,
                    )?,
                };
                let numeric = match b.route.as_deref().unwrap_or("analytic") {
                    "analytic" => false,
                    "numeric" => true,
                    other => {
                        return Err(CliError::parse(format!(
                            "unknown route '{other}' (analytic | numeric)"
                        )))
                    }
                };
                Model::Oscillator { params, numeric }
            }
            ModelKind::Lindblad => {
                let b: LindbladBlock = spec.parse()?;
                let h = matrix(&b.hamiltonian, "hamiltonian")?;
                let model = match (&b.rates, b.jump.is_empty()) {
                    (None, _) if b.operators.is_empty() => {
                        let jumps = b
                            .jump
                            .iter()
                            .map(|j| Ok((j.rate, matrix(&j.operator, "jump.operator")?)))
                            .collect::<CliResult<Vec<_>>>()?;
                        LindbladModel::diagonal(h, jumps)?
                    }
                    (Some(rates), true) => {
                        let ops = b
                            .operators
                            .iter()
                            .map(|o| matrix(o, "operators"))
                            .collect::<CliResult<Vec<_>>>()?;
                        LindbladModel::new(h, ops, matrix(rates, "rates")?)?
                    }
                    _ => return Err(CliError::parse(
                        "[lindblad] takes either [[lindblad.jump]] entries or rates + operators",
                    )),
                };
                Model::Lindblad {
                    model,
                    reversal: reversal(b.reversal.as_deref(), Reversal::None)?,
                }
            }
            ModelKind::Microscopic => {
                let b: MicroscopicBlock = spec.parse()?;
                let sigma0 = QuantumState::new(matrix(&b.env_state, "env_state")?)?;
                Model::Microscopic(JointModel::new(
                    matrix(&b.h_system, "h_system")?,
                    matrix(&b.h_env, "h_env")?,
                    matrix(&b.h_int, "h_int")?,
                    sigma0,
                )?)
            }
            ModelKind::Collisional => {
                let b: CollisionalBlock = spec.parse()?;
                let kraus = match (&b.channel, &b.kraus) {
                    (Some(name), None) => channels::builtin()
                        .into_iter()
                        .find(|(n, _)| n == name)
                        .map(|(_, k)| k)
                        .ok_or_else(|| CliError::parse(format!("unknown channel '{name}'")))?,
                    (None, Some(list)) => list
                        .iter()
                        .map(|k| matrix(k, "kraus"))
                        .collect::<CliResult<Vec<_>>>()?,
                    _ => {
                        return Err(CliError::parse(
                            "[collisional] needs exactly one of 'channel', 'kraus'",
                        ))
                    }
                };
                let waiting = match b.waiting.as_str() {
                    "exponential" => {
                        WaitingTime::exponential(required(b.rate, "rate", "collisional")?)?
                    }
                    "gamma" => WaitingTime::gamma(
                        required(b.shape, "shape", "collisional")?,
                        required(b.rate, "rate", "collisional")?,
                    )?,
                    "deterministic" => WaitingTime::deterministic(required(
                        b.interval,
                        "interval",
                        "collisional",
                    )?)?,
                    other => {
                        return Err(CliError::parse(format!("unknown waiting time '{other}'")))
                    }
                };
                let model =
                    CollisionalModel::new(matrix(&b.hamiltonian, "hamiltonian")?, kraus, waiting)?;
                Model::Collisional {
                    model,
                    paths: b.paths,
                }
            }
            ModelKind::Stochastic => {
                let b: StochasticBlock = spec.parse()?;
                let hamiltonian = matrix(&b.hamiltonian, "hamiltonian")?;
                let family = match b.family.as_str() {
                    "white" => NoiseFamily::GaussianWhite,
                    "ornstein-uhlenbeck" => NoiseFamily::OrnsteinUhlenbeck,
                    "telegraph" => NoiseFamily::Telegraph,
                    other => {
                        return Err(CliError::parse(format!("unknown noise family '{other}'")))
                    }
                };
                let coupling = match &b.coupling {
                    Some(k) => matrix(k, "coupling")?,
                    None => ComplexMatrix::zeros(hamiltonian.nrows(), hamiltonian.ncols()),
                };
                let tau = if family == NoiseFamily::GaussianWhite {
                    0.0
                } else {
                    b.correlation_time
                };
                Model::Stochastic {
                    noise: NoiseProcess::new(family, b.amplitude, tau, coupling)?,
                    hamiltonian,
                    paths: b.paths,
                }
            }
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::Lindblad { model, .. } => model.dim(),
            Model::NonMarkov(_) => 2,
            Model::Oscillator { params, .. } => params.levels(),
            Model::Microscopic(m) => m.dim_s(),
            Model::Collisional { model, .. } => model.dim(),
            Model::Stochastic { noise, .. } => noise.dim(),
        }
    }

    /// Initial state named by the configuration.
    pub fn initial_state(&self, spec: &InitialState) -> CliResult<QuantumState> {
        let d = self.dim();
        Ok(match spec {
            InitialState::Optimal => self.optimal_state()?,
            InitialState::MaximallyMixed => QuantumState::maximally_mixed(d),
            InitialState::Pure { theta, phi } => {
                if d != 2 {
                    return Err(CliError::parse(format!(
                        "pure(θ, φ) names a qubit state but the model has dimension {d}"
                    )));
                }
                QuantumState::bloch(*theta, *phi)
            }
            InitialState::Basis(k) => {
                if *k >= d {
                    return Err(CliError::parse(format!(
                        "basis({k}) is outside dimension {d}"
                    )));
                }
                let mut m = ComplexMatrix::zeros(d, d);
                m[(*k, *k)] = C64::new(1.0, 0.0);
                QuantumState::new(m)?
            }
            InitialState::Matrix(m) => QuantumState::new(m.clone())?,
        })
    }

    fn optimal_state(&self) -> CliResult<QuantumState> {
        match self {
            Model::Lindblad { model, reversal } => {
                Ok(degree_of_quantumness_with(model, *reversal)?.optimal_state)
            }
            Model::NonMarkov(_) => Ok(QuantumState::bloch(PI, 0.0)),
            Model::Oscillator { params, .. } => {
                let mut m = ComplexMatrix::zeros(params.levels(), params.levels());
                m[(0, 0)] = C64::new(1.0, 0.0);
                Ok(QuantumState::new(m)?)
            }
            _ => Err(envq_core::Error::InvalidParameter(
                "no optimal initial state is defined for this model; give one explicitly".into(),
            )
            .into()),
        }
    }
}
