// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use ndarray::{Array2, Ix2};

use super::rk4::{advance, Rhs, Workspace};
use super::{
    check_same_space, check_storage, check_times, choose_step, EvolutionOptions, EvolutionResult, Hamiltonian,
    Recorder, POSITIVITY_TOL,
};
use crate::fock::{Operator, QuantumState};
use crate::linalg::Csr;
use crate::{Error, Result, C64};

/// Collapse operator `L` with rate `κ ≥ 0`, entering as
/// `κ(2LρL† − L†Lρ − ρL†L)`.
#[derive(Clone, Debug)]
pub struct CollapseOp {
    pub op: Operator,
    pub rate: f64,
}

/// Hamiltonian plus collapse channels of a Markovian master equation.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    hamiltonian: Hamiltonian,
    collapse: Vec<CollapseOp>,
}

impl LindbladModel {
    pub fn new(hamiltonian: impl Into<Hamiltonian>, collapse: Vec<CollapseOp>) -> Result<Self> {
        let hamiltonian = hamiltonian.into();
        hamiltonian.require_hermitian()?;
        for c in &collapse {
            if !(c.rate.is_finite() && c.rate >= 0.0) {
                return Err(Error::InvalidParameter(format!("collapse rate {}", c.rate)));
            }
            check_same_space(hamiltonian.space(), c.op.space())?;
        }
        Ok(Self { hamiltonian, collapse })
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn collapse_ops(&self) -> &[CollapseOp] {
        &self.collapse
    }

    /// `2‖H‖ + Σ κ(2‖L‖² + 2‖L†L‖)`, a bound on the superoperator norm.
    pub fn generator_norm(&self) -> f64 {
        let dissipative: f64 = self
            .collapse
            .iter()
            .map(|c| {
                let l = c.op.norm_bound();
                let ldl = (&c.op.dagger() * &c.op).norm_bound();
                c.rate * (2.0 * l * l + 2.0 * ldl)
            })
            .sum();
        2.0 * self.hamiltonian.norm_bound() + dissipative
    }
}

struct LindbladRhs {
    terms: Vec<(f64, Csr, Csr)>,
    damping: Option<Csr>,
    jumps: Vec<(f64, Csr, Csr)>,
}

impl LindbladRhs {
    fn new(model: &LindbladModel) -> Self {
        let terms = model
            .hamiltonian
            .terms()
            .into_iter()
            .map(|(r, op)| {
                let c = Csr::from_dense(op.matrix());
                let cd = c.adjoint();
                (r, c, cd)
            })
            .collect();
        let active: Vec<&CollapseOp> = model.collapse.iter().filter(|c| c.rate > 0.0).collect();
        let damping = (!active.is_empty()).then(|| {
            let d = model.hamiltonian.space().total_dim();
            let mut acc = Array2::<C64>::zeros((d, d));
            for c in &active {
                acc.scaled_add(C64::new(c.rate, 0.0), (&c.op.dagger() * &c.op).matrix());
            }
            Csr::from_dense(&acc)
        });
        let jumps = active
            .iter()
            .map(|c| {
                let l = Csr::from_dense(c.op.matrix());
                let ld = l.adjoint();
                (2.0 * c.rate, l, ld)
            })
            .collect();
        Self { terms, damping, jumps }
    }
}

impl Rhs<Ix2> for LindbladRhs {
    fn eval(&self, t: f64, rho: &Array2<C64>, out: &mut Array2<C64>) {
        let minus_i = C64::new(0.0, -1.0);
        for (rate, op, op_dag) in &self.terms {
            let phase = C64::from_polar(1.0, rate * t);
            op.mul_left_acc(rho, minus_i * phase, out);
            op_dag.mul_right_acc(rho, -minus_i * phase.conj(), out);
        }
        if let Some(d) = &self.damping {
            d.mul_left_acc(rho, C64::new(-1.0, 0.0), out);
            d.mul_right_acc(rho, C64::new(-1.0, 0.0), out);
        }
        for (w, l, ld) in &self.jumps {
            let lr = l.mul_left(rho);
            ld.mul_right_acc(&lr, C64::new(*w, 0.0), out);
        }
    }
}

/// Fixed-step RK4 integration of
/// `dρ/dt = −i[H(t), ρ] + Σⱼ κⱼ(2LⱼρLⱼ† − Lⱼ†Lⱼρ − ρLⱼ†Lⱼ)` from `times[0]`.
///
/// Pure initial states are promoted to projectors. A trace drift beyond
/// `10·tol_trace` at any grid time aborts the run; negative eigenvalues below
/// `−10⁻⁶` are reported as warnings.
pub fn evolve_lindblad(
    model: &LindbladModel,
    rho0: &QuantumState,
    times: &[f64],
    opts: &EvolutionOptions,
) -> Result<EvolutionResult> {
    check_times(times)?;
    let space = model.hamiltonian.space().clone();
    check_same_space(&space, rho0.space())?;
    check_storage(times, &space, true, opts)?;
    let start = rho0.to_mixed();

    let mut warnings = Vec::new();
    let generator_norm = model.generator_norm() + model.hamiltonian.max_rate();
    let dt = choose_step(generator_norm, opts, &mut warnings)?;
    let rhs = LindbladRhs::new(model);
    let mut x = start.density_matrix();
    let mut ws = Workspace::new(&x);
    let mut fine = opts.richardson.then(|| (x.clone(), Workspace::new(&x)));
    let mut richardson: f64 = 0.0;
    let limit = 10.0 * opts.tol_trace;

    let mut rec = Recorder::new(&space, opts)?;
    rec.record(&start)?;
    let mut steps = 0;
    for w in times.windows(2) {
        steps += advance(&rhs, w[0], w[1], dt, &mut x, &mut ws);
        if let Some((xf, wf)) = &mut fine {
            advance(&rhs, w[0], w[1], dt.map(|d| 0.5 * d), xf, wf);
            let err = (&x - &*xf).iter().map(|z| z.norm()).fold(0.0, f64::max);
            richardson = richardson.max(err / 15.0);
        }
        let state = QuantumState::mixed_unchecked(&space, x.clone())?;
        let drift = (state.norm_sqr() - 1.0).abs();
        if drift.is_nan() || drift > limit {
            return Err(Error::TraceDrift { drift, time: w[1], limit });
        }
        rec.record(&state)?;
    }

    if let Some(min) = rec.observables.get("min_eigenvalue") {
        let worst = min.iter().copied().fold(f64::INFINITY, f64::min);
        if worst < -POSITIVITY_TOL {
            warnings.push(format!("density matrix eigenvalue {worst:.3e}"));
        }
    }
    let drift = rec.observables["trace"].iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    if drift > opts.tol_trace {
        warnings.push(format!("trace drift {drift:.3e} above {:.1e}", opts.tol_trace));
    }
    let mut metadata = BTreeMap::new();
    metadata.insert("solver".into(), "rk4-lindblad".into());
    metadata.insert("generator_norm".into(), format!("{generator_norm:.6e}"));
    metadata.insert("dt".into(), dt.map_or("single step".into(), |d| format!("{d:.6e}")));
    metadata.insert("steps".into(), steps.to_string());
    metadata.insert("max_trace_drift".into(), format!("{drift:.3e}"));
    if opts.richardson {
        metadata.insert("richardson_error".into(), format!("{richardson:.3e}"));
    }
    Ok(EvolutionResult {
        times: times.to_vec(),
        states: rec.states,
        final_state: QuantumState::mixed_unchecked(&space, x)?,
        observables: rec.observables,
        metadata,
        warnings,
    })
}
