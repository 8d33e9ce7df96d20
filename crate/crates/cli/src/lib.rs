//! Experiment runner behind the `hyperlab` binary: config parsing, seeding,
//! subcommand dispatch and JSON-Lines/CSV persistence.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

pub use config::{ExperimentConfig, Param, SCHEMA_VERSION, THREADS_ENV};
pub use output::{write_outputs, Curve, RunOutput};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Validation(String),
    #[error("experiment failed: {0}")]
    Experiment(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Experiment(_) | CliError::Io(_) => 3,
        }
    }
}

macro_rules! classify {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                let msg = e.to_string();
                if msg.starts_with("invalid") {
                    CliError::Validation(msg)
                } else {
                    CliError::Experiment(msg)
                }
            }
        }
    )*};
}

classify!(
    hyperlab::MapError,
    hyperlab::OrbitError,
    hyperlab::HyperbolicError,
    hyperlab::BallError,
    hyperlab::ClosingError,
    hyperlab::RecurrenceError
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Subcommand {
    Lyapunov,
    Hyptimes,
    Closing,
    SpecSweep,
    Recurrence,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Lyapunov => "lyapunov",
            Subcommand::Hyptimes => "hyptimes",
            Subcommand::Closing => "closing",
            Subcommand::SpecSweep => "spec-sweep",
            Subcommand::Recurrence => "recurrence",
        }
    }
}

/// Runs one subcommand on a dedicated pool of `threads` workers. The
/// records do not depend on the thread count.
pub fn run(cmd: Subcommand, cfg: &ExperimentConfig, threads: usize) -> Result<RunOutput, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Experiment(e.to_string()))?;
    let start = std::time::Instant::now();
    let mut out = pool.install(|| match cmd {
        Subcommand::Lyapunov => commands::lyapunov(cfg),
        Subcommand::Hyptimes => commands::hyptimes(cfg),
        Subcommand::Closing => commands::closing(cfg),
        Subcommand::SpecSweep => commands::spec_sweep(cfg),
        Subcommand::Recurrence => commands::recurrence(cfg),
    })?;
    out.wall_clock_s = start.elapsed().as_secs_f64();
    out.threads = threads;
    Ok(out)
}
