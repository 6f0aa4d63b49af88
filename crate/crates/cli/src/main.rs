use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use scatterlab_cli::artifacts::{read_columns, write_json};
use scatterlab_cli::experiment::{execute, validate_potential, Failure, Outcome, Stages};
use scatterlab_cli::ExperimentConfig;
use scatterlab_core::diagnostics::rate_fit;

/// Pseudo-spectral experiments for the NLS final-state problem.
#[derive(Parser)]
#[command(name = "scatterlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every stage: admissibility, final state, backward extension, probes.
    Run(Target),
    /// Picard solve with contraction report, final-state errors and rate fit.
    FinalState(Target),
    /// Final state followed by the backward extension and f_-.
    Extend(Target),
    /// Seeded inequality probe suite.
    Probe(Target),
    /// Admissibility bound of the configured potential.
    ValidatePotential(Target),
    /// Log-log fit of two CSV columns.
    RateFit {
        csv: PathBuf,
        #[arg(long, default_value = "t")]
        x: String,
        #[arg(long, default_value = "error")]
        y: String,
        /// Writes the fit as JSON here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct Target {
    config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(target: &Target) -> Outcome<(ExperimentConfig, PathBuf)> {
    let cfg = ExperimentConfig::load(&target.config)??;
    let dir = target.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    Ok((cfg, dir))
}

fn stage(name: &str, target: &Target, stages: Stages) -> Outcome<()> {
    let (cfg, dir) = load(target)?;
    execute(name, &cfg, &dir, stages)?;
    println!("{}", serde_json::json!({"status": "ok", "command": name, "output_dir": dir}));
    Ok(())
}

fn validate(target: &Target) -> Outcome<()> {
    let (cfg, dir) = load(target)?;
    let report = validate_potential(&cfg)?;
    std::fs::create_dir_all(&dir).map_err(anyhow::Error::from)?;
    write_json(&dir.join("admissibility.json"), &report)?;
    println!("{}", serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?);
    if !report.admissible {
        return Err(Failure::Validation(scatterlab_cli::ValidationError {
            field: "potential".into(),
            reason: format!("bound grows by {:.3} over the last decade", report.last_decade_growth),
        }));
    }
    Ok(())
}

fn fit(csv: &Path, x: &str, y: &str, out: Option<&Path>) -> Outcome<()> {
    let series = read_columns(csv, x, y)?;
    let fit = rate_fit(&series).map_err(|e| {
        Failure::Validation(scatterlab_cli::ValidationError { field: "series".into(), reason: e.to_string() })
    })?;
    if let Some(out) = out {
        write_json(out, &fit)?;
    }
    println!("{}", serde_json::to_string_pretty(&fit).map_err(anyhow::Error::from)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let none = Stages { admissibility: false, final_state: false, backward: false, probes: false };
    let result = match &cli.command {
        Command::Run(t) => stage("run", t, Stages::ALL),
        Command::FinalState(t) => stage("final-state", t, Stages { final_state: true, ..none }),
        Command::Extend(t) => stage("extend", t, Stages { final_state: true, backward: true, ..none }),
        Command::Probe(t) => stage("probe", t, Stages { probes: true, ..none }),
        Command::ValidatePotential(t) => validate(t),
        Command::RateFit { csv, x, y, out } => fit(csv, x, y, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.to_json());
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
