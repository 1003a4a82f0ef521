use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nlsemi::config::{ExperimentConfig, Study};
use nlsemi::experiments;

/// Semiclassical NLS toolkit: run a configured study.
#[derive(Parser)]
#[command(name = "nlsemi", version, about)]
struct Cli {
    /// Path to the TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the configured output directory.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Size of the worker thread pool (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Time-step the NLS equation and dump snapshots.
    Evolve,
    /// Tabulate the dispersionless (semiclassical) solution.
    Semiclassical,
    /// Report the first break-up point and the local constants.
    CriticalPoint,
    /// Solve the Painlevé-I tritronquée boundary-value problem.
    Painleve1,
    /// Solve the special P_I² boundary-value problem.
    Painleve12,
    /// Compare NLS, semiclassical and Painlevé descriptions at break-up.
    #[command(name = "match")]
    Match,
    /// Fit scaling exponents of the break-up corrections over an ε sweep.
    Scaling,
    /// Fit the focusing-quintic blow-up-time law over an ε sweep.
    Blowup,
    /// Report the non-generic nonlocal parameter η*.
    NongenericEta,
}

impl Command {
    fn study(self) -> Study {
        match self {
            Command::Evolve => Study::Evolve,
            Command::Semiclassical => Study::Semiclassical,
            Command::CriticalPoint => Study::CriticalPoint,
            Command::Painleve1 => Study::Painleve1,
            Command::Painleve12 => Study::Painleve12,
            Command::Match => Study::Match,
            Command::Scaling => Study::Scaling,
            Command::Blowup => Study::Blowup,
            Command::NongenericEta => Study::NongenericEta,
        }
    }
}

fn run(cli: &Cli) -> nlsemi::Result<()> {
    let config_path = cli.config.as_deref().ok_or_else(|| {
        nlsemi::Error::Config("missing --config <path> (a TOML experiment file)".into())
    })?;
    let mut cfg = ExperimentConfig::load(config_path)?;
    cfg.study = cli.command.study();
    if let Some(out) = &cli.output {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| nlsemi::Error::Config(format!("thread pool: {e}")))?;
    }
    experiments::run(&cfg)?;
    println!(
        "study '{}' finished; results under {}",
        cfg.study.name(),
        experiments::output_root(&cfg).display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
