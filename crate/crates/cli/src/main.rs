use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use rtn_dephase_cli::{config, runner};

/// Coherent dynamics of multi-level systems under random telegraph noise.
///
/// Worker count for the Monte Carlo backend follows RAYON_NUM_THREADS;
/// results are bit-identical for any value.
#[derive(Parser)]
#[command(name = "rtn-dephase", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured backends and write CSV series.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the `[output]` dir from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run >= 2 backends and report pointwise deviations between them.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Gate for deviations between the exact/analytic backends.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        /// Gate for deviations involving the Volterra time stepper.
        #[arg(long, default_value_t = 1e-3)]
        volterra_tolerance: f64,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Parse and validate a config without running anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &PathBuf) -> Result<config::RunConfig> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    config::parse_config(&text).with_context(|| format!("invalid config {}", path.display()))
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, output_dir } => {
            let cfg = load(&config)?;
            let written = runner::run(&cfg, output_dir.as_deref())?;
            for path in written {
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare {
            config,
            tolerance,
            volterra_tolerance,
            output_dir,
        } => {
            let cfg = load(&config)?;
            if cfg.backends.len() < 2 {
                anyhow::bail!("compare needs at least two backends in [output] backends");
            }
            let comparison = runner::compare(&cfg, tolerance, volterra_tolerance)?;
            print!("{}", comparison.report);
            let path = runner::write_report(&cfg, output_dir.as_deref(), &comparison.report)?;
            println!("wrote {}", path.display());
            if comparison.ok {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("error: backend deviation exceeded tolerance");
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            let backends: Vec<&str> = cfg.backends.iter().map(|b| b.label()).collect();
            println!(
                "config ok: {} pair(s), {} point grid to t = {}, backends [{}]",
                cfg.pairs.len(),
                cfg.grid.n_points,
                cfg.grid.t_max,
                backends.join(", ")
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
