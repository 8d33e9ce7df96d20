use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand as ClapSubcommand};

use hyperlab_cli::output::{render_table, summarize};
use hyperlab_cli::{run, write_outputs, CliError, ExperimentConfig, Subcommand};

/// Numerical experiments on expanding and nonuniformly expanding maps.
#[derive(Parser)]
#[command(name = "hyperlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Lyapunov spectra of sampled centers.
    Lyapunov(RunArgs),
    /// Hyperbolic times, frequency, gaps and the concatenation audit.
    Hyptimes(RunArgs),
    /// Periodic points shadowing an orbit segment.
    Closing(RunArgs),
    /// Period overshoot K/n across n and η ladders.
    SpecSweep(RunArgs),
    /// First-return times of shrinking balls and the pooled exponent.
    Recurrence(RunArgs),
    /// Merges result files into a summary table.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn execute(cmd: Subcommand, args: &RunArgs) -> Result<(), CliError> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let threads = cfg.thread_count()?;
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let out = run(cmd, &cfg, threads)?;
    for p in write_outputs(&dir, &out)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn report(files: &[PathBuf]) -> Result<(), CliError> {
    let rows = files
        .iter()
        .map(|f| {
            let text = std::fs::read_to_string(f)?;
            summarize(f, &text).map_err(|e| CliError::Validation(format!("{}: {e}", f.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    print!("{}", render_table(&rows));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Lyapunov(a) => execute(Subcommand::Lyapunov, a),
        Command::Hyptimes(a) => execute(Subcommand::Hyptimes, a),
        Command::Closing(a) => execute(Subcommand::Closing, a),
        Command::SpecSweep(a) => execute(Subcommand::SpecSweep, a),
        Command::Recurrence(a) => execute(Subcommand::Recurrence, a),
        Command::Report { files } => report(files),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hyperlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
