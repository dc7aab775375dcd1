// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form damped Kerr solution against direct integration of the
//! master equation.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use kerrsim::analysis::{reduce_subsystem, trace_distance};
use kerrsim::evolution::{
    evolve_lindblad, kerr_lindblad_analytic, linear_grid, AnalyticCutoffs, CollapseOp, EvolutionOptions,
    EvolutionResult, LindbladModel,
};
use kerrsim::fock::{
    annihilation, coherent_amplitudes, coherent_state, make_space, number, BeamSplitter,
    HilbertSpace, Operator, QuantumState,
};
use kerrsim::{C64, TOL_TRACE};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::output::{Cell, Check, Report, Table};
use crate::workers::map_ordered;
use crate::Result;

pub const TOL_ORACLE: f64 = 1e-6;
pub const TOL_LOSSLESS: f64 = 1e-10;
pub const TOL_HERMITICITY: f64 = 1e-8;
pub const TOL_MIN_EIGENVALUE: f64 = -1e-6;

/// Absolute damping rate of the pure-damping case.
const PURE_DAMPING_KAPPA: f64 = 0.1;
const RANDOM_DIM: usize = 12;
const RANDOM_GAMMA: f64 = 0.05;
const REDUCTION_ALPHA: f64 = 0.3;
const REDUCTION_DIM: usize = 5;
const REDUCTION_GAMMA: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub enum OracleCase {
    /// `|α₁⟩` under `μn²` with `κ = Γμ`.
    Kerr { gamma: f64 },
    /// `|α₁⟩` with `μ = 0`; both sides are also compared with `|α₁e^{−κt}⟩`.
    PureDamping { kappa: f64 },
    /// Seeded random mixed state on a small space.
    RandomMixed { gamma: f64, dim: usize, seed: u64 },
    /// Two physical modes damped at rate κ each, reduced to normal mode 1.
    TwoModeReduction { gamma: f64, alpha: f64, dim: usize },
}

impl OracleCase {
    pub fn label(&self) -> &'static str {
        match self {
            OracleCase::Kerr { gamma } if *gamma == 0.0 => "lossless",
            OracleCase::Kerr { .. } => "kerr",
            OracleCase::PureDamping { .. } => "pure_damping",
            OracleCase::RandomMixed { .. } => "random_mixed",
            OracleCase::TwoModeReduction { .. } => "two_mode_reduction",
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            OracleCase::Kerr { gamma } if *gamma == 0.0 => TOL_LOSSLESS,
            _ => TOL_ORACLE,
        }
    }
}

/// Per-time comparison for one case.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleTrace {
    pub case: OracleCase,
    pub gamma: f64,
    pub kappa: f64,
    pub times: Vec<f64>,
    pub trace_distance: Vec<f64>,
    /// Distance of the numerical state from the closed form, where one exists.
    pub closed_form_distance: Option<Vec<f64>>,
    pub trace: Vec<f64>,
    pub hermiticity_error: Vec<f64>,
    pub min_eigenvalue: Vec<f64>,
    pub warnings: Vec<String>,
}

impl OracleTrace {
    pub fn max_distance(&self) -> f64 {
        self.trace_distance.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_closed_form_distance(&self) -> Option<f64> {
        self.closed_form_distance.as_ref().map(|d| d.iter().copied().fold(0.0, f64::max))
    }

    pub fn max_trace_drift(&self) -> f64 {
        self.trace.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        self.hermiticity_error.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn physical(&self) -> bool {
        self.max_trace_drift() < TOL_TRACE
            && self.max_hermiticity_error() < TOL_HERMITICITY
            && self.min_eigenvalue() >= TOL_MIN_EIGENVALUE
    }
}

fn kerr_operator(space: &HilbertSpace, mu: f64) -> Result<Operator> {
    let n = number(space, 0)?;
    Ok(&(&n * &n) * mu)
}

/// Step target of the lossless case, tighter to meet [`TOL_LOSSLESS`].
const LOSSLESS_STEP_TARGET: f64 = 0.025;

fn options(kappa: f64) -> EvolutionOptions {
    let mut opts = EvolutionOptions { store_states: true, mean_n: false, ..EvolutionOptions::default() };
    if kappa == 0.0 {
        opts.step_target = LOSSLESS_STEP_TARGET;
    }
    opts
}

fn stored(run: &EvolutionResult) -> &[QuantumState] {
    run.states.as_deref().expect("states are stored")
}

fn series(run: &EvolutionResult, name: &str) -> Vec<f64> {
    run.observable(name).map(<[f64]>::to_vec).unwrap_or_default()
}

/// Random density matrix `GG†/tr(GG†)`, entries of `G` uniform on the
/// square `[−1, 1]²`, seeded.
pub fn random_density_matrix(dim: usize, seed: u64) -> Result<QuantumState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Array2::from_shape_fn((dim, dim), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let gg = g.dot(&g.t().mapv(|z| z.conj()));
    let tr: f64 = gg.diag().iter().map(|z| z.re).sum();
    let rho = gg.mapv(|z| z / tr);
    Ok(QuantumState::mixed(&HilbertSpace::single_mode(dim)?, rho)?)
}

/// Analytic solution and master-equation integration of the same
/// single-mode problem on `times`.
fn single_mode(
    case: OracleCase,
    rho0: &QuantumState,
    mu: f64,
    kappa: f64,
    times: &[f64],
) -> Result<(OracleTrace, Vec<QuantumState>)> {
    let space = rho0.space().clone();
    let dim = space.total_dim();
    let model = LindbladModel::new(kerr_operator(&space, mu)?, vec![CollapseOp { op: annihilation(&space, 0)?, rate: kappa }])?;
    let run = evolve_lindblad(&model, rho0, times, &options(kappa))?;
    let mut distance = Vec::with_capacity(times.len());
    for (t, numeric) in times.iter().zip(stored(&run)) {
        let exact = kerr_lindblad_analytic(rho0, mu, kappa, *t, AnalyticCutoffs::auto(dim, kappa, *t))?;
        distance.push(trace_distance(&exact, numeric)?);
    }
    let gamma = if mu == 0.0 { f64::NAN } else { kappa / mu };
    let trace = OracleTrace {
        case,
        gamma,
        kappa,
        times: times.to_vec(),
        trace_distance: distance,
        closed_form_distance: None,
        trace: series(&run, "trace"),
        hermiticity_error: series(&run, "hermiticity_error"),
        min_eigenvalue: series(&run, "min_eigenvalue"),
        warnings: run.warnings.clone(),
    };
    Ok((trace, run.states.expect("states are stored")))
}

/// Two physical modes under `U†(μ n₁²)U` with collapse operators `a` and `b`
/// at rate κ each, mapped to normal modes and reduced to mode 1, against
/// the analytic single-mode solution from the reduced initial state.
///
/// The initial state is projected onto total number below the cutoff, a
/// subspace on which the truncated dynamics is exact. The qubit stays in
/// `|+x⟩`, an eigenstate of σ_x, and is left out.
fn two_mode_reduction(case: OracleCase, gamma: f64, alpha: f64, dim: usize, mu: f64, times: &[f64]) -> Result<OracleTrace> {
    let kappa = gamma * mu;
    let space = make_space(dim, dim, false)?;
    let bs = BeamSplitter::new(&space)?;
    let a0 = C64::new(alpha, 0.0);
    // amplitudes on a wider basis, cut to the first `dim` levels
    let c = coherent_amplitudes(a0, 2 * dim)?;
    let v: Array1<C64> = (0..dim * dim)
        .map(|i| {
            let (n, m) = (i / dim, i % dim);
            if n + m < dim { c[n] * c[m] } else { C64::new(0.0, 0.0) }
        })
        .collect();
    let psi0 = QuantumState::pure_normalized(&space, v)?;

    let u = bs.to_operator();
    let h = &(&u.dagger() * &kerr_operator(&space, mu)?) * &u;
    let collapse = vec![
        CollapseOp { op: annihilation(&space, 0)?, rate: kappa },
        CollapseOp { op: annihilation(&space, 1)?, rate: kappa },
    ];
    let run = evolve_lindblad(&LindbladModel::new(h, collapse)?, &psi0, times, &options(kappa))?;

    let reduced0 = reduce_subsystem(&bs.map(&psi0)?, &[0])?;
    let mut distance = Vec::with_capacity(times.len());
    for (t, state) in times.iter().zip(stored(&run)) {
        let reduced = reduce_subsystem(&bs.map(state)?, &[0])?;
        let exact = kerr_lindblad_analytic(&reduced0, mu, kappa, *t, AnalyticCutoffs::auto(dim, kappa, *t))?;
        distance.push(trace_distance(&exact, &reduced)?);
    }
    Ok(OracleTrace {
        case,
        gamma,
        kappa,
        times: times.to_vec(),
        trace_distance: distance,
        closed_form_distance: None,
        trace: series(&run, "trace"),
        hermiticity_error: series(&run, "hermiticity_error"),
        min_eigenvalue: series(&run, "min_eigenvalue"),
        warnings: run.warnings.clone(),
    })
}

/// Run one case on a `points`-time grid to `μt = π/2`.
pub fn run_case(case: &OracleCase, alpha1: C64, mu: f64, dim: usize, points: usize) -> Result<OracleTrace> {
    let times = linear_grid(FRAC_PI_2 / mu, points)?;
    let coherent = |dim: usize| -> Result<QuantumState> { Ok(coherent_state(&HilbertSpace::single_mode(dim)?, 0, alpha1)?) };
    match case.clone() {
        OracleCase::Kerr { gamma } => Ok(single_mode(case.clone(), &coherent(dim)?, mu, gamma * mu, &times)?.0),
        OracleCase::PureDamping { kappa } => {
            let (mut trace, states) = single_mode(case.clone(), &coherent(dim)?, 0.0, kappa, &times)?;
            let space = HilbertSpace::single_mode(dim)?;
            let mut closed = Vec::with_capacity(times.len());
            for (t, numeric) in times.iter().zip(&states) {
                let target = coherent_state(&space, 0, alpha1 * (-kappa * t).exp())?;
                closed.push(trace_distance(&target, numeric)?);
            }
            trace.closed_form_distance = Some(closed);
            Ok(trace)
        }
        OracleCase::RandomMixed { gamma, dim, seed } => {
            Ok(single_mode(case.clone(), &random_density_matrix(dim, seed)?, mu, gamma * mu, &times)?.0)
        }
        OracleCase::TwoModeReduction { gamma, alpha, dim } => two_mode_reduction(case.clone(), gamma, alpha, dim, mu, &times),
    }
}

/// Cases run by the oracle experiment: lossless, every configured Γ, pure
/// damping, a random mixed state and the two-mode reduction.
pub fn oracle_cases(cfg: &ExperimentConfig) -> Vec<OracleCase> {
    let mut cases = vec![OracleCase::Kerr { gamma: 0.0 }];
    let mut gammas = cfg.gammas_for(ExperimentKind::OracleCheck);
    gammas.sort_by(f64::total_cmp);
    gammas.dedup();
    cases.extend(gammas.into_iter().filter(|g| *g > 0.0).map(|gamma| OracleCase::Kerr { gamma }));
    cases.push(OracleCase::PureDamping { kappa: PURE_DAMPING_KAPPA });
    cases.push(OracleCase::RandomMixed { gamma: RANDOM_GAMMA, dim: RANDOM_DIM, seed: cfg.seed });
    cases.push(OracleCase::TwoModeReduction { gamma: REDUCTION_GAMMA, alpha: REDUCTION_ALPHA, dim: REDUCTION_DIM });
    cases
}

pub fn run_oracle_check(cfg: &ExperimentConfig) -> Result<Report> {
    let kind = ExperimentKind::OracleCheck;
    let alpha = cfg.alpha_for(kind);
    let alpha1 = alpha * SQRT_2;
    let dim = cfg.truncation.resolve(alpha1.norm());
    let cases = oracle_cases(cfg);
    let traces = map_ordered(&cases, |c| run_case(c, alpha1, cfg.mu, dim, cfg.time_points))?;

    let mut table = Table::new(&[
        "case",
        "gamma",
        "kappa",
        "t",
        "mu_t",
        "trace_distance",
        "closed_form_distance",
        "trace",
        "hermiticity_error",
        "min_eigenvalue",
    ]);
    let mut report_checks = Vec::new();
    for tr in &traces {
        for (i, t) in tr.times.iter().enumerate() {
            let at = |v: &Vec<f64>| v.get(i).copied().unwrap_or(f64::NAN);
            table.push(vec![
                tr.case.label().into(),
                tr.gamma.into(),
                tr.kappa.into(),
                (*t).into(),
                (cfg.mu * t).into(),
                tr.trace_distance[i].into(),
                tr.closed_form_distance.as_ref().map_or(Cell::Float(f64::NAN), |d| d[i].into()),
                at(&tr.trace).into(),
                at(&tr.hermiticity_error).into(),
                at(&tr.min_eigenvalue).into(),
            ]);
        }
        let name = match &tr.case {
            OracleCase::Kerr { gamma } if *gamma > 0.0 => format!("kerr_gamma_{gamma:e}"),
            c => c.label().to_string(),
        };
        let tol = tr.case.tolerance();
        report_checks.push(Check::new(
            &name,
            tr.max_distance() < tol,
            format!("max trace distance {:.3e} (< {tol:e}) over {} times", tr.max_distance(), tr.times.len()),
        ));
        if let Some(d) = tr.max_closed_form_distance() {
            report_checks.push(Check::new(
                &format!("{name}_closed_form"),
                d < TOL_ORACLE,
                format!("max distance from the damped coherent state {d:.3e}"),
            ));
        }
        report_checks.push(Check::new(
            &format!("{name}_physical"),
            tr.physical(),
            format!(
                "trace drift {:.3e}, hermiticity {:.3e}, min eigenvalue {:.3e}",
                tr.max_trace_drift(),
                tr.max_hermiticity_error(),
                tr.min_eigenvalue()
            ),
        ));
    }

    let mut report = Report::new(kind, table);
    report.meta("alpha", super::fmt_complex(alpha));
    report.meta("alpha1", super::fmt_complex(alpha1));
    report.meta("mu", cfg.mu);
    report.meta("fock_dim", dim);
    report.meta("time_grid", format!("{} points to mu t = pi/2", cfg.time_points));
    report.meta("kappa", "gamma * mu; pure_damping uses kappa directly");
    report.meta("dissipator", "kappa (2 a rho a^dag - a^dag a rho - rho a^dag a)");
    report.meta("numerics", "fixed-step rk4");
    report.meta("seed", cfg.seed);
    for tr in &traces {
        if !tr.warnings.is_empty() {
            report.meta(&format!("warnings_{}", tr.case.label()), tr.warnings.join("; "));
        }
    }
    report.checks = report_checks;
    Ok(report)
}
