use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dispersim::harness::presets::preset_description;
use dispersim::harness::{preset, run_experiment, ExperimentConfig, ExperimentKind, PRESET_NAMES};
use dispersim::Error;

#[derive(Parser)]
#[command(name = "dispersim", version, about = "1D ELBM/FDTD solvers for dispersive slabs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a TOML file or a preset name.
    Run {
        /// Path to a config file, or one of the preset names.
        config: String,
        /// Override the experiment kind.
        #[arg(long)]
        experiment: Option<String>,
        /// Output directory (results go in `<out>/<experiment>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for parallel sweeps.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List presets, or print one as TOML.
    Presets { name: Option<String> },
}

fn load(config: &str) -> Result<ExperimentConfig, Error> {
    if PRESET_NAMES.contains(&config) {
        return preset(config);
    }
    ExperimentConfig::load(Path::new(config))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Presets { name: None } => {
            for name in PRESET_NAMES {
                println!("{name:<18} {}", preset_description(name).unwrap_or(""));
            }
        }
        Command::Presets { name: Some(name) } => print!("{}", preset(&name)?.to_toml()),
        Command::Run { config, experiment, out, threads } => {
            let mut cfg = load(&config)?;
            if let Some(e) = experiment {
                cfg.experiment = ExperimentKind::parse(&e)?;
            }
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| Error::invalid("threads", e.to_string()))?;
            }
            let report = run_experiment(&cfg, out.as_deref())?;
            print!("{}", report.to_text());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::InvalidParameter { .. } => 2,
                e if e.is_numerical() => 3,
                _ => 1,
            })
        }
    }
}
