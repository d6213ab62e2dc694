//! `cdlab`: run convection-diffusion experiments from presets or JSON files
//! and write CSV results.

mod config;
mod csv;
mod descriptor;
mod error;
mod experiment;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};

use config::{ExperimentConfig, MeshValue, OneOrMany, RawConfig, PRESETS};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "cdlab",
    version,
    about = "Finite element experiments for 1D and 2D convection-diffusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment and write CSV files.
    Run {
        /// JSON configuration file.
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Name of a built-in preset (see `cdlab presets`).
        #[arg(long)]
        preset: Option<String>,
        /// Override ε; a number or an expression such as h^2.
        #[arg(long)]
        eps: Option<String>,
        /// Override the number of elements.
        #[arg(long)]
        n: Option<usize>,
        /// Output directory.
        #[arg(long, default_value = "cdlab-out")]
        out: PathBuf,
    },
    /// List the built-in presets.
    Presets,
}

fn load(
    config: Option<PathBuf>,
    preset: Option<String>,
    eps: Option<String>,
    n: Option<usize>,
) -> Result<ExperimentConfig, CliError> {
    let (raw, fallback) = match (config, preset) {
        (Some(path), _) => {
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "config".into());
            (RawConfig::from_file(&path)?, stem)
        }
        (None, Some(name)) => (config::preset(&name)?, name),
        (None, None) => {
            return Err(CliError::Config(
                "one of --config or --preset is required".into(),
            ))
        }
    };
    let overrides = RawConfig {
        eps: eps.map(|s| {
            OneOrMany::One(match s.parse::<f64>() {
                Ok(v) => MeshValue::Number(v),
                Err(_) => MeshValue::Expr(s),
            })
        }),
        n: n.map(OneOrMany::One),
        ..Default::default()
    };
    ExperimentConfig::from_raw(overrides.over(raw.expand()?), &fallback)
}

fn list_presets() -> Result<(), CliError> {
    for (name, _) in PRESETS {
        let raw = config::preset(name)?;
        println!("{name:<16} {}", raw.description.unwrap_or_default());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        None => {
            Cli::command().print_help().ok();
            println!();
            return ExitCode::SUCCESS;
        }
        Some(Command::Presets) => list_presets(),
        Some(Command::Run {
            config,
            preset,
            eps,
            n,
            out,
        }) => load(config, preset, eps, n).and_then(|cfg| {
            let summary = experiment::run(&cfg, &out)?;
            println!(
                "{}: wrote {} files to {}",
                cfg.name,
                summary.files.len(),
                summary.out_dir.display()
            );
            Ok(())
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
