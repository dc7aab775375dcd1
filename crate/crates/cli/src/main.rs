// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kerrsim_cli::{run, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "kerrsim", version, about = "Run kerrsim experiments and write CSV reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output path; overrides `output_path` from the config.
    #[arg(long)]
    output: Option<PathBuf>,
    /// `key=value` override applied to the config, repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Fidelity and purity of the damped cat against Γ.
    Fig2Sweep(Common),
    /// Cat generation through the beam splitter and Kerr evolution.
    CatGen(Common),
    /// Convergence of the approximation chain along a ratio ladder.
    ChainValidate(Common),
    /// Analytic damped Kerr solution against master-equation integration.
    OracleCheck(Common),
}

fn execute(kind: ExperimentKind, common: Common) -> kerrsim_cli::Result<bool> {
    let cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path, &common.overrides)?,
        None => ExperimentConfig::from_value(serde_json::json!({}), &common.overrides)?,
    };
    let report = run(kind, &cfg)?;
    let path = common
        .output
        .or_else(|| cfg.output_path.clone())
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", kind.name())));
    report.write_csv_file(&path)?;
    // a closed stdout must not abort the run
    let mut out = std::io::stdout().lock();
    for c in &report.checks {
        let _ = writeln!(out, "{}", c.line());
    }
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = match cli.command {
        Command::Fig2Sweep(c) => (ExperimentKind::Fig2Sweep, c),
        Command::CatGen(c) => (ExperimentKind::CatGeneration, c),
        Command::ChainValidate(c) => (ExperimentKind::ChainValidation, c),
        Command::OracleCheck(c) => (ExperimentKind::OracleCheck, c),
    };
    match execute(kind, common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
