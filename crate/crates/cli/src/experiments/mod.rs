// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

pub mod cat;
pub mod chain;
pub mod fig2;
pub mod oracle;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::{Report, Result};

/// Run one experiment; the caller writes the report.
pub fn run(kind: ExperimentKind, cfg: &ExperimentConfig) -> Result<Report> {
    cfg.check_kind(kind)?;
    match kind {
        ExperimentKind::Fig2Sweep => fig2::run_fig2_sweep(cfg),
        ExperimentKind::CatGeneration => cat::run_cat_generation(cfg),
        ExperimentKind::ChainValidation => chain::run_chain_validation(cfg),
        ExperimentKind::OracleCheck => oracle::run_oracle_check(cfg),
    }
}

pub(crate) fn fmt_complex(z: kerrsim::C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}
