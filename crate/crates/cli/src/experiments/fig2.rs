// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! Fidelity and purity of the damped Kerr cat against Γ = κ/μ.

use std::f64::consts::FRAC_PI_2;

use kerrsim::analysis::{fidelity, purity, yurke_stoler};
use kerrsim::evolution::{kerr_lindblad_analytic, AnalyticCutoffs};
use kerrsim::fock::{coherent_state, HilbertSpace};
use kerrsim::C64;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::output::{Check, Report, Table};
use crate::workers::map_ordered;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fig2Point {
    pub gamma: f64,
    pub fidelity: f64,
    pub purity: f64,
    pub k_max: usize,
}

/// Damped Kerr evolution of `|α₁⟩` to `μt = π/2` with `κ = Γμ`, scored
/// against the Yurke–Stoler state.
pub fn fig2_point(alpha1: C64, mu: f64, gamma: f64, dim: usize) -> Result<Fig2Point> {
    let space = HilbertSpace::single_mode(dim)?;
    let rho0 = coherent_state(&space, 0, alpha1)?;
    let kappa = gamma * mu;
    let t = FRAC_PI_2 / mu;
    let cutoffs = AnalyticCutoffs::auto(dim, kappa, t);
    let rho = kerr_lindblad_analytic(&rho0, mu, kappa, t, cutoffs)?;
    let target = yurke_stoler(alpha1, dim)?;
    Ok(Fig2Point { gamma, fidelity: fidelity(&rho, &target)?, purity: purity(&rho)?, k_max: cutoffs.k_max })
}

/// Sorted, de-duplicated grid with a Γ = 0 reference point in front.
pub fn sweep_grid(gammas: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = gammas.to_vec();
    g.push(0.0);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

pub fn sweep(alpha1: C64, mu: f64, gammas: &[f64], dim: usize) -> Result<Vec<Fig2Point>> {
    map_ordered(gammas, |&g| fig2_point(alpha1, mu, g, dim))
}

fn strictly_decreasing(xs: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = xs.collect();
    v.windows(2).all(|w| w[1] < w[0])
}

pub fn run_fig2_sweep(cfg: &ExperimentConfig) -> Result<Report> {
    let kind = ExperimentKind::Fig2Sweep;
    let alpha = cfg.alpha_for(kind);
    let alpha1 = alpha * std::f64::consts::SQRT_2;
    let dim = cfg.truncation.resolve(alpha1.norm());
    let grid = sweep_grid(&cfg.gammas_for(kind));
    let points = sweep(alpha1, cfg.mu, &grid, dim)?;

    let mut table = Table::new(&["gamma", "fidelity", "purity"]);
    for p in &points {
        table.push(vec![p.gamma.into(), p.fidelity.into(), p.purity.into()]);
    }
    let mut report = Report::new(kind, table);
    report.meta("alpha", super::fmt_complex(alpha));
    report.meta("alpha1", super::fmt_complex(alpha1));
    report.meta("mu", cfg.mu);
    report.meta("mu_t", "pi/2");
    report.meta("kappa", "gamma * mu");
    report.meta("fock_dim", dim);
    report.meta("k_max_range", format!(
        "{}..{}",
        points.iter().map(|p| p.k_max).min().unwrap_or(0),
        points.iter().map(|p| p.k_max).max().unwrap_or(0)
    ));
    report.meta("gamma_grid", format!("{} points, Γ = 0 reference row prepended", points.len()));
    report.meta("solver", "closed-form damped Kerr solution");

    let at = |g: f64| points.iter().find(|p| p.gamma == g);
    if let Some(p) = at(0.0) {
        let ok = (p.fidelity - 1.0).abs() < 1e-8 && (p.purity - 1.0).abs() < 1e-8;
        report.checks.push(Check::new("lossless", ok, format!("F = {:.12}, P = {:.12} at Γ = 0", p.fidelity, p.purity)));
    }
    if let Some(p) = at(1e-3) {
        report.checks.push(Check::new("fidelity_gamma_1e-3", p.fidelity > 0.99, format!("F = {:.6} (> 0.99) at Γ = 1e-3", p.fidelity)));
    }
    if let Some(p) = at(1e-2) {
        report.checks.push(Check::new("fidelity_gamma_1e-2", p.fidelity > 0.95, format!("F = {:.6} (> 0.95) at Γ = 1e-2", p.fidelity)));
        report.checks.push(Check::new("purity_gamma_1e-2", p.purity > 0.90, format!("P = {:.6} (> 0.90) at Γ = 1e-2", p.purity)));
    }
    let mono_f = strictly_decreasing(points.iter().map(|p| p.fidelity));
    let mono_p = strictly_decreasing(points.iter().map(|p| p.purity));
    report.checks.push(Check::new("monotonic", mono_f && mono_p, format!(
        "fidelity {} and purity {} over {} points",
        if mono_f { "strictly decreasing" } else { "NOT strictly decreasing" },
        if mono_p { "strictly decreasing" } else { "NOT strictly decreasing" },
        points.len()
    )));

    // truncation stress: doubling the Fock dimension
    let probes: Vec<f64> = [1e-3, 1e-2].into_iter().filter(|g| at(*g).is_some()).collect();
    let mut worst: f64 = 0.0;
    for g in &probes {
        let base = at(*g).expect("probe is on the grid");
        let wide = fig2_point(alpha1, cfg.mu, *g, 2 * dim)?;
        worst = worst.max((wide.fidelity - base.fidelity).abs()).max((wide.purity - base.purity).abs());
    }
    if !probes.is_empty() {
        report.checks.push(Check::new(
            "truncation_doubling",
            worst < 1e-6,
            format!("max |ΔF|, |ΔP| = {worst:.3e} from N = {dim} to N = {}", 2 * dim),
        ));
    }
    Ok(report)
}
