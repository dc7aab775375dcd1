// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p kerrsim-cli --test acceptance --release`.

use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::Instant;

use kerrsim::hamiltonians::{Branch, DispersiveParams, ModelInputs, ModelParams};
use kerrsim::C64;
use kerrsim_cli::experiments::{cat, fig2, oracle};
use kerrsim_cli::workers::map_ordered;
use kerrsim_cli::{ExperimentConfig, ExperimentKind, Report, Truncation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn failed_checks(r: &Report, names: &[&str]) -> Vec<String> {
    names
        .iter()
        .filter_map(|n| match r.check(n) {
            Some(c) if c.passed => None,
            Some(c) => Some(c.line()),
            None => Some(format!("missing check {n}")),
        })
        .collect()
}

fn fig2_inequalities() -> kerrsim_cli::Result<Outcome> {
    let alpha1 = C64::new(2.0 * SQRT_2, 0.0);
    let dim = Truncation::Auto.resolve(alpha1.norm());
    let pts = fig2::sweep(alpha1, 1.0, &[0.0, 1e-3, 1e-2], dim)?;
    let (p0, p3, p2) = (pts[0], pts[1], pts[2]);
    let lossless = (p0.fidelity - 1.0).abs() < 1e-8 && (p0.purity - 1.0).abs() < 1e-8;
    let ok = dim >= 35 && lossless && p3.fidelity > 0.99 && p2.fidelity > 0.95 && p2.purity > 0.90;
    Ok(outcome(ok, format!(
        "N = {dim}; Γ=0: F = {:.10}, P = {:.10}; Γ=1e-3: F = {:.6} (need > 0.99); Γ=1e-2: F = {:.6} (need > 0.95), P = {:.6} (need > 0.90)",
        p0.fidelity, p0.purity, p3.fidelity, p2.fidelity, p2.purity
    )))
}

fn monotonicity() -> kerrsim_cli::Result<Outcome> {
    let cfg = ExperimentConfig::default();
    let r = kerrsim_cli::run(ExperimentKind::Fig2Sweep, &cfg)?;
    let c = r.check("monotonic").expect("fig2 sweep reports monotonicity");
    Ok(outcome(c.passed, c.detail.clone()))
}

fn oracle_equivalence() -> kerrsim_cli::Result<Outcome> {
    let alpha1 = C64::new(2.0 * SQRT_2, 0.0);
    let cases = [1e-3, 1e-2].map(|gamma| oracle::OracleCase::Kerr { gamma });
    let traces = map_ordered(&cases, |c| oracle::run_case(c, alpha1, 1.0, 40, 10))?;
    let worst = traces.iter().map(|t| t.max_distance()).fold(0.0, f64::max);
    let parts: Vec<String> =
        traces.iter().map(|t| format!("Γ = {:e}: max trace distance {:.3e}", t.gamma, t.max_distance())).collect();
    Ok(outcome(worst < oracle::TOL_ORACLE, format!("N = 40, 10 times to μt = π/2; {}", parts.join("; "))))
}

fn cat_generation() -> kerrsim_cli::Result<Outcome> {
    let r = kerrsim_cli::run(ExperimentKind::CatGeneration, &ExperimentConfig::default())?;
    let fails: Vec<String> = r.checks.iter().filter(|c| !c.passed).map(|c| c.line()).collect();
    let yurke_stoler = r.check("plus_yurke_stoler").map_or(String::new(), |c| c.detail.clone());
    Ok(outcome(fails.is_empty(), if fails.is_empty() {
        format!("{} checks, {yurke_stoler}", r.checks.len())
    } else {
        fails.join("; ")
    }))
}

fn normal_mode_identity() -> kerrsim_cli::Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [0.5, 1.0, 2.0] {
        for branch in [Branch::Plus, Branch::Minus] {
            let (ov, empty) = cat::normal_mode_identity(C64::new(a, 0.0), branch, Truncation::Auto)?;
            ok &= (ov - 1.0).abs() < 1e-6 && empty < 1e-8;
            parts.push(format!("α = {a} {branch:?}: overlap {ov:.10}, empty mode {empty:.1e}"));
        }
    }
    Ok(outcome(ok, parts.join("; ")))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
}

fn parameter_formulas() -> kerrsim_cli::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_101);
    let mut bad = Vec::new();
    for draw in 0..100 {
        let l1 = rng.gen_range(0.1..5.0);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let tied = draw % 2 == 0;
        let l2 = if tied { sign * l1 } else { rng.gen_range(-5.0..5.0) };
        let inputs = ModelInputs {
            omega: rng.gen_range(50.0..200.0),
            omega0: rng.gen_range(-20.0..20.0),
            delta_bar: rng.gen_range(1.0..40.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            lambda1: l1,
            lambda2: l2,
            g: rng.gen_range(0.5..30.0),
            omega_e: Some(rng.gen_range(1.0..45.0)),
        };
        let mp = ModelParams::new(inputs)?;
        let dp = DispersiveParams::from_model(&mp)?;
        let delta = inputs.omega - inputs.omega_e.unwrap();
        let s = inputs.delta_bar.atan2(inputs.omega0).sin();
        let expect = [
            ("Omega", dp.omega, -l1 * l1 * s * s / delta),
            ("chi", dp.chi, -l2 * l2 * s * s / delta),
            ("Delta", dp.drive_coupling, inputs.g * l1 * s / delta),
            ("r", dp.exchange, -l1 * l2 * s * s / delta),
            ("zeta", dp.zeta, -2.0 * l1 * l1 * s * s / delta),
            ("mu", dp.mu.unwrap(), (2.0 * l1 * l1 * s * s / delta).powi(2) / (2.0 * inputs.g * l1 * s / delta)),
        ];
        for (name, got, want) in expect {
            if !close(got, want) {
                bad.push(format!("draw {draw}: {name} = {got:e}, expected {want:e}"));
            }
        }
        if tied {
            let want = if sign > 0.0 { Branch::Plus } else { Branch::Minus };
            if !close(dp.omega, dp.chi) || dp.branch() != Some(want) {
                bad.push(format!("draw {draw}: Ω = {:e}, χ = {:e}, branch {:?}", dp.omega, dp.chi, dp.branch()));
            }
        }
    }
    Ok(outcome(bad.is_empty(), if bad.is_empty() {
        "100 seeded draws, Ω, χ, Δ, r, ζ, μ and Ω = χ for tied couplings within 1e-12".to_string()
    } else {
        bad.join("; ")
    }))
}

fn physicality() -> kerrsim_cli::Result<Outcome> {
    let cfg = ExperimentConfig { truncation: Truncation::Fixed(40), ..ExperimentConfig::default() };
    let r = kerrsim_cli::run(ExperimentKind::OracleCheck, &cfg)?;
    let physical: Vec<_> = r.checks.iter().filter(|c| c.name.ends_with("_physical")).collect();
    let fails: Vec<String> = physical.iter().filter(|c| !c.passed).map(|c| c.line()).collect();
    Ok(outcome(!physical.is_empty() && fails.is_empty(), if fails.is_empty() {
        format!("{} Lindblad runs within trace 1e-6, hermiticity 1e-8, min eigenvalue -1e-6", physical.len())
    } else {
        fails.join("; ")
    }))
}

fn chain_convergence() -> kerrsim_cli::Result<Outcome> {
    let r = kerrsim_cli::run(ExperimentKind::ChainValidation, &ExperimentConfig::default())?;
    let names = [
        "monotonic_rwa_dispersive",
        "monotonic_rwa_kerr",
        "monotonic_dispersive_kerr",
        "dispersive_kerr_ratio_50",
        "sanity",
        "frame_check",
    ];
    let fails = failed_checks(&r, &names);
    let detail = if fails.is_empty() {
        names.iter().filter_map(|n| r.check(n)).map(|c| format!("{}: {}", c.name, c.detail)).collect::<Vec<_>>().join("; ")
    } else {
        fails.join("; ")
    };
    Ok(outcome(fails.is_empty(), detail))
}

fn main() -> ExitCode {
    type Criterion = fn() -> kerrsim_cli::Result<Outcome>;
    let criteria: [(&str, Criterion); 8] = [
        ("fig2_inequalities", fig2_inequalities),
        ("monotonicity", monotonicity),
        ("oracle_equivalence", oracle_equivalence),
        ("cat_generation", cat_generation),
        ("normal_mode_identity", normal_mode_identity),
        ("parameter_formulas", parameter_formulas),
        ("physicality", physicality),
        ("chain_convergence", chain_convergence),
    ];
    let mut all = true;
    for (name, f) in criteria {
        let start = Instant::now();
        let o = f().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        all &= o.passed;
        println!("{} {name}: {} [{:.1} s]", if o.passed { "PASS" } else { "FAIL" }, o.detail, start.elapsed().as_secs_f64());
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
