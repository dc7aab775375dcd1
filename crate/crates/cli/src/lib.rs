// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! Configuration-driven experiments on top of `kerrsim`: the damped cat
//! fidelity sweep, cat generation, approximation-chain validation and the
//! analytic-versus-numeric oracle check.

pub mod config;
pub mod experiments;
pub mod output;
pub mod workers;

use std::path::PathBuf;

pub use config::{ComplexValue, ExperimentConfig, ExperimentKind, Truncation};
pub use experiments::run;
pub use output::{Cell, Check, Report, Table};

#[derive(Debug, thiserror::Error)]
pub enum ExpError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Sim(#[from] kerrsim::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, ExpError>;
