use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use envq::config::{Mode, RunConfig};
use envq::{commands, verify, CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "envq",
    version,
    about = "Quantumness of the environment from Q_t = Tr[Λ*_t ρ0]"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file, or directory for `verify`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// series | monte-carlo
    #[arg(long, global = true)]
    mode: Option<Mode>,
}

#[derive(Subcommand)]
enum Command {
    /// Q_t on the configured time grid, as CSV.
    Qt,
    /// Degree of quantumness and the optimal initial state.
    Dq,
    /// D_Q over a list of values of one model parameter, as CSV.
    Sweep {
        #[arg(long)]
        param: String,
        /// `a,b,c` or `start:stop:count`; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Runs the acceptance suites and writes their data files.
    Verify {
        /// Comma-separated criterion numbers; all by default.
        #[arg(long)]
        criteria: Option<String>,
    },
}

fn load(cli: &Cli) -> CliResult<RunConfig> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::parse("--config is required"))?;
    let mut cfg = RunConfig::load(path)?;
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.mode.is_some() {
        cfg.mode = cli.mode;
    }
    Ok(cfg)
}

fn emit(target: Option<&Path>, text: &str) -> CliResult<()> {
    match target {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            say(text);
            Ok(())
        }
    }
}

/// Writes to stdout; a reader that went away is not an error.
fn say(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Qt => {
            let cfg = load(cli)?;
            let r = commands::qt(&cfg)?;
            if let Some(se) = &r.stderr {
                let worst = se.iter().copied().fold(0.0, f64::max);
                eprintln!("Monte Carlo estimate: largest standard error {worst:.3e}");
            }
            emit(cli.out.as_deref().or(cfg.output.as_deref()), &r.to_csv())
        }
        Command::Dq => {
            let cfg = load(cli)?;
            let report = commands::dq(&cfg.model)?;
            emit(
                cli.out.as_deref().or(cfg.output.as_deref()),
                &report.to_text(),
            )
        }
        Command::Sweep { param, values } => {
            let cfg = load(cli)?;
            let values = commands::parse_values(values)?;
            let table = commands::sweep(&cfg.model, param, &values)?;
            emit(cli.out.as_deref().or(cfg.output.as_deref()), &table)
        }
        Command::Verify { criteria } => {
            let ids = match criteria {
                None => verify::ALL.to_vec(),
                Some(list) => list
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|_| CliError::parse(format!("bad criterion '{s}'")))
                    })
                    .collect::<CliResult<Vec<_>>>()?,
            };
            let dir = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("verify-output"));
            let seed = cli.seed.unwrap_or(verify::DEFAULT_SEED);
            let outcomes = verify::run_into(&ids, seed, &dir)?;
            for o in &outcomes {
                say(&format!("{}\n", o.criterion.summary_line()));
            }
            say(&format!("details and data files in {}\n", dir.display()));
            let unexpected = outcomes
                .iter()
                .filter(|o| !o.criterion.as_expected())
                .count();
            if unexpected > 0 {
                return Err(CliError::Verification(unexpected));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("envq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
