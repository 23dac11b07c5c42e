//! `affinity-lab`: verification suite, grid example, famine sweeps,
//! heuristic experiment and single search runs.
//!
//! Exit status: 0 when every check holds, 1 on a violated check, 2 on a
//! usage or configuration error.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Kind, Mode, ScenarioConfig};

const DEFAULT_OUT: &str = "affinity-lab-out";
const THREADS_VAR: &str = "AFFINITY_LAB_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn from_core(e: affinity_lab::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "affinity-lab",
    version,
    about = "Affinity and success-bound verification for transfer between search problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON scenario config (unknown keys are rejected)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; overrides the config
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Success vectors by enumeration or Monte Carlo; overrides the config
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,

    /// Monte Carlo trials and simplex draws; overrides the config
    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Output directory for JSON and CSV reports
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every bound and identity check on random instances
    Verify {
        /// Negative control: corrupt the first row's right-hand side
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// The 16×16 grid example and its dependence bound
    GridExample {
        /// Reveal the target's half to the recipient
        #[arg(long)]
        transfer: bool,
    },
    /// Famine bounds for every target of size k
    Famine,
    /// Source-only transferability heuristic over a ρ sweep
    Heuristic,
    /// A single seeded search run
    Run,
}

impl Command {
    fn kind(&self) -> Kind {
        match self {
            Command::Verify { .. } => Kind::Verify,
            Command::GridExample { .. } => Kind::GridExample,
            Command::Famine => Kind::Famine,
            Command::Heuristic => Kind::Heuristic,
            Command::Run => Kind::Run,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_VAR} must be a positive integer, got {value:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size thread pool: {e}")))
}

fn execute(cli: Cli) -> Result<commands::Outcome, CliError> {
    configure_threads()?;
    let kind = cli.command.kind();
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = cli.mode {
        cfg.mode = mode;
    }
    if let Some(samples) = cli.samples {
        cfg.samples = samples;
    }
    if let Command::GridExample { transfer: true } = cli.command {
        cfg.transfer = true;
    }
    cfg.validate(kind)?;

    let out = cli
        .out
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    std::fs::create_dir_all(&out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;

    match cli.command {
        Command::Verify { corrupt } => commands::verify(&cfg, &out, corrupt),
        Command::GridExample { .. } => commands::grid(cfg.transfer, &out),
        Command::Famine => commands::famine(&cfg, &out),
        Command::Heuristic => commands::heuristic(&cfg, &out),
        Command::Run => commands::run(&cfg, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            if outcome.violated {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
