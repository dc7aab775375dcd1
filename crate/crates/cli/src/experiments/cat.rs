// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! Cat generation: beam splitter into normal modes, then ideal Kerr
//! evolution of the populated normal mode.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use kerrsim::analysis::{fidelity, mean_number, reduce_subsystem, yurke_stoler};
use kerrsim::evolution::SpectralPropagator;
use kerrsim::fock::{coherent_amplitudes, fock_amplitudes, make_space, product_state, qubit_amplitudes, BeamSplitter, QubitBasis};
use kerrsim::fock::{HilbertSpace, QuantumState};
use kerrsim::hamiltonians::{build_kerr_effective_branch, Branch, DispersiveParams};
use kerrsim::C64;

use crate::config::{ExperimentConfig, ExperimentKind, Truncation};
use crate::output::{write_matrix_json, Check, Report, Table};
use crate::Result;

/// `|α⟩|±α⟩|+x⟩` in the physical modes.
fn initial_state(space: &HilbertSpace, alpha: C64, branch: Branch) -> Result<QuantumState> {
    let n = space.mode_dims()[0];
    let b = match branch {
        Branch::Plus => alpha,
        Branch::Minus => -alpha,
    };
    Ok(product_state(space, &[coherent_amplitudes(alpha, n)?, coherent_amplitudes(b, n)?, qubit_amplitudes(QubitBasis::PlusX)])?)
}

/// `|⟨√2α, 0, +x|U|α, ±α, +x⟩|²` (or the mode-2 counterpart) for the
/// beam splitter `U`, plus the leftover occupation of the empty normal mode.
pub fn normal_mode_identity(alpha: C64, branch: Branch, truncation: Truncation) -> Result<(f64, f64)> {
    let n = truncation.resolve(SQRT_2 * alpha.norm());
    let space = make_space(n, n, true)?;
    let mapped = BeamSplitter::new(&space)?.map(&initial_state(&space, alpha, branch)?)?;
    let cat = coherent_amplitudes(alpha * SQRT_2, n)?;
    let vac = fock_amplitudes(0, n)?;
    let plus = qubit_amplitudes(QubitBasis::PlusX);
    let (empty, target) = match branch {
        Branch::Plus => (1, product_state(&space, &[cat, vac, plus])?),
        Branch::Minus => (0, product_state(&space, &[vac, cat, plus])?),
    };
    Ok((fidelity(&mapped, &target)?, mean_number(&mapped, empty)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatRow {
    pub variant: &'static str,
    pub mu_t: f64,
    pub target: &'static str,
    pub overlap: f64,
    pub cat_mode_mean_n: f64,
    pub other_mode_mean_n: f64,
}

/// Normal-mode state after the beam splitter and the Kerr propagator; kept
/// so the caller can evaluate several interaction times.
pub struct CatRun {
    pub branch: Branch,
    pub space: HilbertSpace,
    pub alpha1: C64,
    pub beam_splitter_overlap: f64,
    normal: QuantumState,
    prop: SpectralPropagator,
}

impl CatRun {
    pub fn new(alpha: C64, mu: f64, branch: Branch, truncation: Truncation) -> Result<Self> {
        let alpha1 = alpha * SQRT_2;
        let n = truncation.resolve(alpha1.norm());
        let space = make_space(n, n, true)?;
        let normal = BeamSplitter::new(&space)?.map(&initial_state(&space, alpha, branch)?)?;
        let (beam_splitter_overlap, _) = normal_mode_identity(alpha, branch, truncation)?;
        // any (ζ, Δ) with ζ²/(2Δ) = μ
        let dp = DispersiveParams::normal_mode(-(2.0 * mu).sqrt(), 1.0, branch);
        let h = build_kerr_effective_branch(&dp, &space, branch)?;
        Ok(Self { branch, space, alpha1, beam_splitter_overlap, normal, prop: SpectralPropagator::new(&h)? })
    }

    pub fn cat_mode(&self) -> usize {
        self.branch.mode_index()
    }

    /// Reduced state of the cat mode at `μt`.
    pub fn evolve(&self, mu: f64, mu_t: f64) -> Result<(QuantumState, QuantumState)> {
        let full = self.prop.propagate(&self.normal, mu_t / mu)?;
        let reduced = reduce_subsystem(&full, &[self.cat_mode()])?;
        Ok((full, reduced))
    }

    pub fn row(&self, mu: f64, mu_t: f64) -> Result<CatRow> {
        let n = self.space.mode_dims()[0];
        let (full, reduced) = self.evolve(mu, mu_t)?;
        let (target_name, target) = if (mu_t - FRAC_PI_2).abs() < 1e-12 {
            ("yurke_stoler", yurke_stoler(self.alpha1, n)?)
        } else if (mu_t - PI).abs() < 1e-12 {
            ("coherent_negated", single_coherent(-self.alpha1, n)?)
        } else {
            ("coherent_initial", single_coherent(self.alpha1, n)?)
        };
        Ok(CatRow {
            variant: match self.branch {
                Branch::Plus => "plus",
                Branch::Minus => "minus",
            },
            mu_t,
            target: target_name,
            overlap: fidelity(&reduced, &target)?,
            cat_mode_mean_n: mean_number(&full, self.cat_mode())?,
            other_mode_mean_n: mean_number(&full, 1 - self.cat_mode())?,
        })
    }
}

fn single_coherent(alpha: C64, n: usize) -> Result<QuantumState> {
    Ok(QuantumState::pure(&HilbertSpace::single_mode(n)?, coherent_amplitudes(alpha, n)?)?)
}

pub const MU_T: [f64; 3] = [FRAC_PI_2, PI, 2.0 * PI];

pub fn run_cat_generation(cfg: &ExperimentConfig) -> Result<Report> {
    let kind = ExperimentKind::CatGeneration;
    let alpha = cfg.alpha_for(kind);
    let mut table = Table::new(&[
        "variant",
        "mu_t",
        "target",
        "overlap",
        "cat_mode_mean_n",
        "other_mode_mean_n",
        "beam_splitter_overlap",
    ]);
    let mut checks = Vec::new();
    let mut dim = 0;
    for branch in [Branch::Plus, Branch::Minus] {
        let run = CatRun::new(alpha, cfg.mu, branch, cfg.truncation)?;
        dim = run.space.mode_dims()[0];
        let label = if branch == Branch::Plus { "plus" } else { "minus" };
        checks.push(Check::new(
            &format!("beam_splitter_{label}"),
            (run.beam_splitter_overlap - 1.0).abs() < 1e-6,
            format!("normal-mode overlap {:.12}", run.beam_splitter_overlap),
        ));
        for mu_t in MU_T {
            let row = run.row(cfg.mu, mu_t)?;
            checks.push(Check::new(
                &format!("{label}_{}", row.target),
                (row.overlap - 1.0).abs() < 1e-8,
                format!("overlap {:.12} at μt = {mu_t:.6}", row.overlap),
            ));
            checks.push(Check::new(
                &format!("{label}_empty_mode_mu_t_{mu_t:.4}"),
                row.other_mode_mean_n < 1e-8,
                format!("other normal mode holds {:.3e} quanta", row.other_mode_mean_n),
            ));
            table.push(vec![
                row.variant.into(),
                row.mu_t.into(),
                row.target.into(),
                row.overlap.into(),
                row.cat_mode_mean_n.into(),
                row.other_mode_mean_n.into(),
                run.beam_splitter_overlap.into(),
            ]);
        }
        if branch == Branch::Plus {
            if let Some(path) = &cfg.state_dump_path {
                let (_, reduced) = run.evolve(cfg.mu, FRAC_PI_2)?;
                write_matrix_json(&reduced.density_matrix(), path)?;
            }
        }
    }
    let mut report = Report::new(kind, table);
    report.meta("alpha", super::fmt_complex(alpha));
    report.meta("alpha1", super::fmt_complex(alpha * SQRT_2));
    report.meta("mu", cfg.mu);
    report.meta("fock_dim_per_mode", dim);
    report.meta("initial_state", "|alpha>_a |±alpha>_b |+x>, mapped to normal modes");
    report.meta("hamiltonian", "mu (n_k)^2 sigma_x on the populated normal mode k");
    if let Some(p) = &cfg.state_dump_path {
        report.meta("state_dump", format!("{} (mode-1 density matrix at mu t = pi/2)", p.display()));
    }
    report.checks = checks;
    Ok(report)
}
