// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! State propagation: spectral and Runge–Kutta unitary evolution, the
//! Lindblad master equation, and closed-form Kerr solutions.

use std::collections::BTreeMap;

use crate::analysis;
use crate::fock::{HilbertSpace, Operator, QuantumState};
use crate::hamiltonians::PhaseSeries;
use crate::{Error, Result, TOL_TRACE};

mod analytic;
mod lindblad;
mod rk4;
mod timedep;
mod unitary;

pub use analytic::{
    auto_k_max, kerr_analytic_pure, kerr_lindblad_analytic, ln_factorial_table, log_factorial_ratio,
    AnalyticCutoffs, K_TAIL_TOL,
};
pub use lindblad::{evolve_lindblad, CollapseOp, LindbladModel};
pub use timedep::evolve_unitary_timedep;
pub use unitary::{evolve_unitary_grid, evolve_unitary_static, SpectralPropagator};

/// Default bound on `‖generator‖·dt` for the fixed-step integrator.
pub const STEP_TARGET: f64 = 0.05;
/// `‖generator‖·dt` above which a warning is attached.
pub const STEP_GUIDELINE: f64 = 0.1;
/// `‖generator‖·dt` above which a run is refused.
pub const STEP_LIMIT: f64 = 1.0;
/// Most memory stored trajectories may occupy, in bytes.
pub const MAX_STORED_BYTES: usize = 1 << 30;
/// Most negative eigenvalue tolerated before a positivity warning.
pub const POSITIVITY_TOL: f64 = 1e-6;

/// Static or time-dependent Hamiltonian.
#[derive(Clone, Debug)]
pub enum Hamiltonian {
    Static(Operator),
    Series(PhaseSeries),
}

impl From<Operator> for Hamiltonian {
    fn from(op: Operator) -> Self {
        Hamiltonian::Static(op)
    }
}

impl From<PhaseSeries> for Hamiltonian {
    fn from(s: PhaseSeries) -> Self {
        Hamiltonian::Series(s)
    }
}

impl Hamiltonian {
    pub fn space(&self) -> &HilbertSpace {
        match self {
            Hamiltonian::Static(h) => h.space(),
            Hamiltonian::Series(s) => s.space(),
        }
    }

    pub fn at(&self, t: f64) -> Operator {
        match self {
            Hamiltonian::Static(h) => h.clone(),
            Hamiltonian::Series(s) => s.at(t),
        }
    }

    pub fn norm_bound(&self) -> f64 {
        match self {
            Hamiltonian::Static(h) => h.norm_bound(),
            Hamiltonian::Series(s) => s.norm_bound(),
        }
    }

    pub fn max_rate(&self) -> f64 {
        match self {
            Hamiltonian::Static(_) => 0.0,
            Hamiltonian::Series(s) => s.max_rate(),
        }
    }

    /// `(rate, operator)` pairs with `H(t) = Σ O e^{i·rate·t}`.
    pub fn terms(&self) -> Vec<(f64, &Operator)> {
        match self {
            Hamiltonian::Static(h) => vec![(0.0, h)],
            Hamiltonian::Series(s) => s.terms().iter().map(|t| (t.rate, &t.op)).collect(),
        }
    }

    /// Largest Hermiticity defect; a series is Hermitian when the term at
    /// rate ω is the adjoint of the term at −ω.
    pub fn hermiticity_error(&self) -> f64 {
        let terms = self.terms();
        let mut worst: f64 = 0.0;
        for (rate, op) in &terms {
            let partner = terms.iter().find(|(r, _)| *r == -rate);
            let err = match partner {
                Some((_, p)) => (&op.dagger() - p).max_abs(),
                None => op.max_abs(),
            };
            worst = worst.max(err);
        }
        worst
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        let err = self.hermiticity_error();
        if err > 1e-10 * self.norm_bound().max(1.0) {
            return Err(Error::NotHermitian(err));
        }
        Ok(())
    }
}

/// Fidelity reference for [`EvolutionOptions`]: a pure state on the
/// subsystems `subsystems` (all of them when empty).
#[derive(Clone, Debug)]
pub struct FidelityTarget {
    pub state: QuantumState,
    pub subsystems: Vec<usize>,
}

/// Settings shared by the propagators.
#[derive(Clone, Debug)]
pub struct EvolutionOptions {
    /// Fixed-step bound on `‖generator‖·dt`.
    pub step_target: f64,
    /// Explicit step, overriding `step_target`.
    pub step: Option<f64>,
    /// Repeat with half the step and report the difference.
    pub richardson: bool,
    /// Keep the state at every grid time.
    pub store_states: bool,
    /// Trace tolerance; runs abort beyond ten times this.
    pub tol_trace: f64,
    pub fidelity_target: Option<FidelityTarget>,
    /// Record `⟨c†c⟩` for every bosonic mode.
    pub mean_n: bool,
    /// Record the smallest eigenvalue of ρ (Lindblad runs).
    pub min_eigenvalue: bool,
}

impl Default for EvolutionOptions {
    fn default() -> Self {
        Self {
            step_target: STEP_TARGET,
            step: None,
            richardson: false,
            store_states: false,
            tol_trace: TOL_TRACE,
            fidelity_target: None,
            mean_n: true,
            min_eigenvalue: true,
        }
    }
}

/// Trajectory on a time grid.
#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Option<Vec<QuantumState>>,
    pub final_state: QuantumState,
    pub observables: BTreeMap<String, Vec<f64>>,
    pub metadata: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl EvolutionResult {
    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables.get(name).map(Vec::as_slice)
    }
}

/// `points` equally spaced times from 0 to `t_end` inclusive.
pub fn linear_grid(t_end: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::BadTimeGrid);
    }
    Ok((0..points).map(|k| t_end * k as f64 / (points - 1) as f64).collect())
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadTimeGrid);
    }
    Ok(())
}

pub(crate) fn check_same_space(a: &HilbertSpace, b: &HilbertSpace) -> Result<()> {
    if a != b {
        return Err(Error::SpaceMismatch(format!("{:?} vs {:?}", a.dims(), b.dims())));
    }
    Ok(())
}

pub(crate) fn check_storage(times: &[f64], space: &HilbertSpace, mixed: bool, opts: &EvolutionOptions) -> Result<()> {
    if !opts.store_states {
        return Ok(());
    }
    let d = space.total_dim();
    let per_state = if mixed { d * d } else { d } * 16;
    let bytes = per_state.saturating_mul(times.len());
    if bytes > MAX_STORED_BYTES {
        return Err(Error::InvalidParameter(format!(
            "storing {} states needs {bytes} bytes, above the {MAX_STORED_BYTES}-byte limit",
            times.len()
        )));
    }
    Ok(())
}

/// Step size from a generator norm bound, with the guideline checks.
pub(crate) fn choose_step(generator_norm: f64, opts: &EvolutionOptions, warnings: &mut Vec<String>) -> Result<Option<f64>> {
    match opts.step {
        Some(dt) => {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::InvalidParameter(format!("step {dt}")));
            }
            let x = generator_norm * dt;
            if x > STEP_LIMIT {
                return Err(Error::StepTooLarge(x));
            }
            if x > STEP_GUIDELINE {
                warnings.push(format!("generator norm times step is {x:.3}, above {STEP_GUIDELINE}"));
            }
            Ok(Some(dt))
        }
        None => {
            if !(opts.step_target > 0.0 && opts.step_target <= STEP_LIMIT) {
                return Err(Error::InvalidParameter(format!("step target {}", opts.step_target)));
            }
            Ok((generator_norm > 0.0).then(|| opts.step_target / generator_norm))
        }
    }
}

/// Per-time observables common to every propagator.
pub(crate) struct Recorder<'a> {
    opts: &'a EvolutionOptions,
    space: HilbertSpace,
    pub observables: BTreeMap<String, Vec<f64>>,
    pub states: Option<Vec<QuantumState>>,
}

impl<'a> Recorder<'a> {
    pub fn new(space: &HilbertSpace, opts: &'a EvolutionOptions) -> Result<Self> {
        if let Some(target) = &opts.fidelity_target {
            if target.state.vector().is_none() {
                return Err(Error::NotPure);
            }
        }
        Ok(Self {
            opts,
            space: space.clone(),
            observables: BTreeMap::new(),
            states: opts.store_states.then(Vec::new),
        })
    }

    fn push(&mut self, name: &str, v: f64) {
        self.observables.entry(name.to_string()).or_default().push(v);
    }

    pub fn record(&mut self, state: &QuantumState) -> Result<()> {
        let norm = state.norm_sqr();
        self.push(if state.is_pure() { "norm" } else { "trace" }, norm);
        if !state.is_pure() {
            let rho = state.density_matrix();
            self.push("purity", rho.iter().map(|z| z.norm_sqr()).sum::<f64>() / (norm * norm));
            self.push("hermiticity_error", crate::linalg::hermiticity_error(&rho));
            if self.opts.min_eigenvalue {
                let min = crate::linalg::eigvalsh(&rho)?.iter().copied().fold(f64::INFINITY, f64::min);
                self.push("min_eigenvalue", min);
            }
        }
        if let Some(target) = &self.opts.fidelity_target {
            let reduced = if target.subsystems.is_empty() {
                state.clone()
            } else {
                analysis::reduce_subsystem(state, &target.subsystems)?
            };
            let f = analysis::fidelity(&normalized(&reduced), &target.state)?;
            self.push("fidelity", f);
        }
        if self.opts.mean_n {
            for mode in 0..self.space.num_modes() {
                let n = analysis::mean_number(state, mode)? / norm;
                self.push(&format!("mean_n_{mode}"), n);
            }
        }
        if let Some(states) = &mut self.states {
            states.push(state.clone());
        }
        Ok(())
    }
}

/// Rescale to unit norm or trace for figure-of-merit evaluation; drift stays
/// visible in the `norm`/`trace` series.
fn normalized(state: &QuantumState) -> QuantumState {
    let n = state.norm_sqr();
    use crate::fock::StateData;
    match state.data() {
        StateData::Pure(v) => QuantumState::pure_unchecked(state.space(), v.mapv(|z| z / n.sqrt())).unwrap(),
        StateData::Mixed(m) => QuantumState::mixed_unchecked(state.space(), m.mapv(|z| z / n)).unwrap(),
    }
}
