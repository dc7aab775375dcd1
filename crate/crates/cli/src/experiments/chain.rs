// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! Convergence of the approximation chain: resonant RWA model, dispersive
//! Hamiltonian and effective Kerr Hamiltonian, compared at the cat time over
//! a ladder of regime ratios.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use kerrsim::analysis::overlap;
use kerrsim::evolution::{evolve_unitary_timedep, EvolutionOptions, Hamiltonian, SpectralPropagator};
use kerrsim::fock::{
    auto_truncation, coherent_amplitudes, displacement, fock_amplitudes, make_space, number, product_state,
    qubit_amplitudes, qubit_operator, BeamSplitter, HilbertSpace, Operator, QuantumState, QubitBasis, QubitOp,
};
use kerrsim::hamiltonians::{
    build_dispersive, build_kerr_effective, build_rwa, build_rwa_drive_frame, dispersive_qubit_shift,
    dispersive_regime, drive_displacement, kerr_regime, rwa_regime, DispersiveParams, ModelInputs, ModelParams,
};
use kerrsim::C64;
use ndarray::Array1;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::output::{Cell, Check, Report, Table};
use crate::workers::map_ordered;
use crate::Result;

/// Qubit splitting used for every ladder rung; only δ enters the rotating
/// frame, so its value only needs to keep the qubit far from the modes.
const QUBIT_SPLITTING: f64 = 1000.0;

/// Parameter family of the ratio ladder.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// δ/λ = Δ/|ζ| = R, which forces g = 2δ.
    Matched,
    /// δ = 10g with Δ/|ζ| = R, inside the dispersive condition |δ| ≫ g.
    Detuned,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Matched => "ladder",
            Family::Detuned => "ladder_detuned",
        }
    }
}

const DETUNED_FACTOR: f64 = 10.0;

/// Ladder rung with ratio `R` at the charge degeneracy point, λ₁ = λ₂ = 1 and
/// g = 2R, so that Δ/|ζ| = R. `Matched` takes δ = R (Δ = 2, μ = 1/R²);
/// `Detuned` takes δ = 20R (Δ = 1/10, μ = 1/(20R²)).
pub fn ladder_params(ratio: f64, family: Family) -> Result<ModelParams> {
    let g = 2.0 * ratio;
    let delta = match family {
        Family::Matched => ratio,
        Family::Detuned => DETUNED_FACTOR * g,
    };
    Ok(ModelParams::new(ModelInputs {
        omega: QUBIT_SPLITTING + delta,
        omega0: 0.0,
        delta_bar: QUBIT_SPLITTING,
        lambda1: 1.0,
        lambda2: 1.0,
        g,
        omega_e: None,
    })?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainPoint {
    pub family: Family,
    pub ratio: f64,
    pub mu: f64,
    pub t: f64,
    pub rwa_dispersive: f64,
    pub rwa_kerr: f64,
    pub dispersive_kerr: f64,
    pub rwa_dispersive_shifted: f64,
}

fn pure(v: Array1<C64>, s: &HilbertSpace) -> Result<QuantumState> {
    Ok(QuantumState::pure_unchecked(s, v)?)
}

/// `e^{iδ(a†a + b†b)t}` applied to `psi`.
fn undo_free_rotation(mp: &ModelParams, psi: &QuantumState, t: f64) -> Result<QuantumState> {
    let s = psi.space();
    let n_tot = &number(s, 0)? + &number(s, 1)?;
    let phases: Array1<C64> = n_tot.matrix().diag().map(|n| C64::from_polar(1.0, mp.delta * n.re * t));
    let v = psi.vector().expect("pure state");
    pure(&phases * v, s)
}

/// Overlaps between the three levels at `μt = π/2` for one ratio, starting
/// from `|√2α, 0⟩|+x⟩` in the normal modes.
pub fn chain_point(ratio: f64, family: Family, alpha: C64, dim: usize) -> Result<ChainPoint> {
    let mp = ladder_params(ratio, family)?;
    let space = make_space(dim, dim, true)?;
    let bs = BeamSplitter::new(&space)?;
    let plus = qubit_amplitudes(QubitBasis::PlusX);
    let phi0n = product_state(&space, &[coherent_amplitudes(alpha * SQRT_2, dim)?, fock_amplitudes(0, dim)?, plus])?;
    let phi0 = bs.unmap(&phi0n)?;

    let (h12, dp) = build_dispersive(&mp, &space)?;
    let mu = dp.mu.expect("Δ is nonzero on the ladder");
    let t = FRAC_PI_2 / mu;

    let psi12 = bs.map(&SpectralPropagator::new(&h12)?.propagate(&phi0, t)?)?;
    let k = build_rwa_drive_frame(&mp, &space)?;
    let psi11 = bs.map(&undo_free_rotation(&mp, &SpectralPropagator::new(&k)?.propagate(&phi0, t)?, t)?)?;
    let sx = &qubit_operator(&space, QubitOp::SigmaX)? * dp.drive_coupling;
    let hk = &build_kerr_effective(&dp, &space)? + &sx;
    let psik = SpectralPropagator::new(&hk)?.propagate(&phi0n, t)?;
    let shift = &qubit_operator(&space, QubitOp::SigmaZ)? * dispersive_qubit_shift(&mp)?;
    let psi12s = bs.map(&SpectralPropagator::new(&(&h12 + &shift))?.propagate(&phi0, t)?)?;

    Ok(ChainPoint {
        family,
        ratio,
        mu,
        t,
        rwa_dispersive: overlap(&psi11, &psi12)?,
        rwa_kerr: overlap(&psi11, &psik)?,
        dispersive_kerr: overlap(&psi12, &psik)?,
        rwa_dispersive_shifted: overlap(&psi11, &psi12s)?,
    })
}

/// Overlap of the same state evolved twice under one Hamiltonian; guards the
/// overlap bookkeeping.
pub fn sanity_overlap(alpha: C64, dim: usize) -> Result<f64> {
    let mp = ladder_params(10.0, Family::Matched)?;
    let space = make_space(dim, dim, true)?;
    let (h12, dp) = build_dispersive(&mp, &space)?;
    let t = FRAC_PI_2 / dp.mu.expect("Δ is nonzero");
    let phi0 = product_state(&space, &[coherent_amplitudes(alpha, dim)?, coherent_amplitudes(alpha, dim)?, qubit_amplitudes(QubitBasis::PlusX)])?;
    let a = SpectralPropagator::new(&h12)?.propagate(&phi0, t)?;
    let b = SpectralPropagator::new(&h12.clone())?.propagate(&phi0, t)?;
    Ok(overlap(&a, &b)?)
}

/// Short-time check of the static displaced-frame route against direct
/// integration of the interaction-picture RWA Hamiltonian, in the physical
/// modes. Returns the overlap and the integration time.
pub fn frame_check(ratio: f64, alpha: C64, t_end: f64) -> Result<(f64, f64)> {
    let mp = ladder_params(ratio, Family::Matched)?;
    let beta = drive_displacement(&mp)?;
    let amp = alpha.norm() / SQRT_2;
    let space = make_space(auto_truncation(beta.abs() + amp), auto_truncation(amp), true)?;
    let (na, nb) = (space.mode_dims()[0], space.mode_dims()[1]);
    let a0 = alpha / SQRT_2;
    let phi0 = product_state(&space, &[coherent_amplitudes(a0, na)?, coherent_amplitudes(a0, nb)?, qubit_amplitudes(QubitBasis::PlusX)])?;

    let k = build_rwa_drive_frame(&mp, &space)?;
    let via_frame = undo_free_rotation(&mp, &SpectralPropagator::new(&k)?.propagate(&phi0, t_end)?, t_end)?;

    let start = apply(&displacement(&space, 0, C64::from(beta))?, &phi0)?;
    let h = Hamiltonian::from(build_rwa(&mp, &space)?);
    let opts = EvolutionOptions { mean_n: false, ..EvolutionOptions::default() };
    let run = evolve_unitary_timedep(&h, &start, &[0.0, t_end], &opts)?;
    let back = displacement(&space, 0, C64::from_polar(-beta, mp.delta * t_end))?;
    let direct = apply(&back, &run.final_state)?;
    Ok((overlap(&via_frame, &direct)?, t_end))
}

fn apply(op: &Operator, psi: &QuantumState) -> Result<QuantumState> {
    pure(op.apply(psi.vector().expect("pure state")), psi.space())
}

fn non_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] >= w[0])
}

pub fn run_chain_validation(cfg: &ExperimentConfig) -> Result<Report> {
    let kind = ExperimentKind::ChainValidation;
    let alpha = cfg.alpha_for(kind);
    let dim = cfg.truncation.resolve(SQRT_2 * alpha.norm());
    let mut ladder = cfg.ladder();
    ladder.sort_by(f64::total_cmp);
    ladder.dedup();
    let jobs: Vec<(Family, f64)> =
        [Family::Matched, Family::Detuned].into_iter().flat_map(|f| ladder.iter().map(move |&r| (f, r))).collect();
    let all = map_ordered(&jobs, |&(f, r)| chain_point(r, f, alpha, dim))?;
    let (points, detuned): (Vec<ChainPoint>, Vec<ChainPoint>) = all.into_iter().partition(|p| p.family == Family::Matched);

    let mut table = Table::new(&[
        "kind",
        "ratio",
        "overlap_rwa_dispersive",
        "overlap_rwa_kerr",
        "overlap_dispersive_kerr",
        "overlap_rwa_dispersive_shifted",
    ]);
    for p in points.iter().chain(&detuned) {
        table.push(vec![
            p.family.label().into(),
            p.ratio.into(),
            p.rwa_dispersive.into(),
            p.rwa_kerr.into(),
            p.dispersive_kerr.into(),
            p.rwa_dispersive_shifted.into(),
        ]);
    }
    let sanity = sanity_overlap(alpha, dim)?;
    let nan = || Cell::Float(f64::NAN);
    table.push(vec!["sanity".into(), 10.0.into(), nan(), nan(), sanity.into(), nan()]);
    let (frame, frame_t) = frame_check(10.0, alpha, 1.0)?;
    table.push(vec!["frame_check".into(), 10.0.into(), frame.into(), nan(), nan(), nan()]);

    let mut report = Report::new(kind, table);
    report.meta("alpha", super::fmt_complex(alpha));
    report.meta("fock_dim_per_mode", dim);
    report.meta("model", "lambda1 = lambda2 = 1, g = 2R, sin(theta) = 1, Delta/|zeta| = R");
    report.meta("ladder", "delta = R (Delta = 2, mu = 1/R^2)");
    report.meta("ladder_detuned", "delta = 20R = 10g (Delta = 0.1, mu = 1/(20 R^2))");
    report.meta("shifted_column", "dispersive Hamiltonian plus the second-order qubit shift -(lambda1^2 + lambda2^2)/(2 delta) sigma_z");
    report.meta("mu_t", "pi/2");
    report.meta("initial_state", "|sqrt2 alpha, 0>|+x> in the normal modes");
    report.meta("rwa_route", "static displaced frame, free rotation e^{i delta N t} undone");
    report.meta("frame_check_time", frame_t);
    for p in points.iter().chain(&detuned) {
        let mp = ladder_params(p.ratio, p.family)?;
        let dp = DispersiveParams::from_model(&mp)?;
        let warnings: Vec<String> = rwa_regime(&mp)
            .into_iter()
            .chain(dispersive_regime(&mp))
            .chain(kerr_regime(&dp))
            .map(|w| w.to_string())
            .collect();
        if !warnings.is_empty() {
            report.meta(&format!("regime_warnings_{}_{}", p.family.label(), p.ratio), warnings.join("; "));
        }
    }

    let series = |f: fn(&ChainPoint) -> f64| points.iter().map(f).collect::<Vec<_>>();
    for (name, xs) in [
        ("monotonic_rwa_dispersive", series(|p| p.rwa_dispersive)),
        ("monotonic_rwa_kerr", series(|p| p.rwa_kerr)),
        ("monotonic_dispersive_kerr", series(|p| p.dispersive_kerr)),
    ] {
        let shown: Vec<String> = xs.iter().map(|x| format!("{x:.6}")).collect();
        report.checks.push(Check::new(name, non_decreasing(&xs), format!("[{}] over ratios {:?}", shown.join(", "), ladder)));
    }
    let shifted: Vec<f64> = detuned.iter().map(|p| p.rwa_dispersive_shifted).collect();
    let shown: Vec<String> = shifted.iter().map(|x| format!("{x:.6}")).collect();
    report.checks.push(Check::new(
        "detuned_shifted_convergence",
        non_decreasing(&shifted) && shifted.iter().all(|x| *x >= 0.999),
        format!("[{}] (>= 0.999, non-decreasing) with |delta| = 10g", shown.join(", ")),
    ));
    if let Some(p) = points.iter().find(|p| p.ratio == 50.0) {
        report.checks.push(Check::new(
            "dispersive_kerr_ratio_50",
            p.dispersive_kerr >= 0.98,
            format!("overlap {:.6} (>= 0.98) at ratio 50", p.dispersive_kerr),
        ));
    }
    report.checks.push(Check::new("sanity", (sanity - 1.0).abs() < 1e-10, format!("self overlap {sanity:.14}")));
    report.checks.push(Check::new("frame_check", frame >= 1.0 - 1e-6, format!("overlap {frame:.12} at t = {frame_t}")));
    Ok(report)
}
