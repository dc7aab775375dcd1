// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use ndarray::{Array1, Ix1};

use super::rk4::{advance, Rhs, Workspace};
use super::{check_same_space, check_storage, check_times, choose_step, EvolutionOptions, EvolutionResult, Hamiltonian, Recorder};
use crate::fock::QuantumState;
use crate::linalg::Csr;
use crate::{Error, Result, C64};

/// `−i H(t)` as sparse phase terms.
pub(crate) struct SchrodingerRhs {
    terms: Vec<(f64, Csr)>,
}

impl SchrodingerRhs {
    pub fn new(h: &Hamiltonian) -> Self {
        Self { terms: h.terms().into_iter().map(|(r, op)| (r, Csr::from_dense(op.matrix()))).collect() }
    }
}

impl Rhs<Ix1> for SchrodingerRhs {
    fn eval(&self, t: f64, x: &Array1<C64>, out: &mut Array1<C64>) {
        for (rate, op) in &self.terms {
            op.mul_vec_acc(x, C64::from_polar(1.0, rate * t) * C64::new(0.0, -1.0), out);
        }
    }
}

/// Fixed-step RK4 integration of `i dψ/dt = H(t)ψ` from `times[0]`.
///
/// The step satisfies `(‖H‖ + max rate)·dt ≤ step_target` unless an explicit
/// step is given. The norm is never renormalized; its drift is reported in
/// the `norm` series and the `max_norm_drift` metadata entry.
pub fn evolve_unitary_timedep(
    h: &Hamiltonian,
    psi0: &QuantumState,
    times: &[f64],
    opts: &EvolutionOptions,
) -> Result<EvolutionResult> {
    check_times(times)?;
    check_same_space(h.space(), psi0.space())?;
    check_storage(times, psi0.space(), false, opts)?;
    h.require_hermitian()?;
    let mut x = psi0.vector().ok_or(Error::NotPure)?.clone();
    let space = psi0.space().clone();

    let mut warnings = Vec::new();
    let generator_norm = h.norm_bound() + h.max_rate();
    let dt = choose_step(generator_norm, opts, &mut warnings)?;
    let rhs = SchrodingerRhs::new(h);
    let mut ws = Workspace::new(&x);
    let mut fine = opts.richardson.then(|| (x.clone(), Workspace::new(&x)));
    let mut richardson: f64 = 0.0;

    let mut rec = Recorder::new(&space, opts)?;
    rec.record(psi0)?;
    let mut steps = 0;
    for w in times.windows(2) {
        steps += advance(&rhs, w[0], w[1], dt, &mut x, &mut ws);
        if let Some((xf, wf)) = &mut fine {
            advance(&rhs, w[0], w[1], dt.map(|d| 0.5 * d), xf, wf);
            let err = (&x - &*xf).iter().map(|z| z.norm()).fold(0.0, f64::max);
            richardson = richardson.max(err / 15.0);
        }
        rec.record(&QuantumState::pure_unchecked(&space, x.clone())?)?;
    }

    let drift = rec.observables["norm"].iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    if drift > 1e-6 {
        warnings.push(format!("norm drift {drift:.3e}"));
    }
    let mut metadata = BTreeMap::new();
    metadata.insert("solver".into(), "rk4".into());
    metadata.insert("generator_norm".into(), format!("{generator_norm:.6e}"));
    metadata.insert("dt".into(), dt.map_or("single step".into(), |d| format!("{d:.6e}")));
    metadata.insert("steps".into(), steps.to_string());
    metadata.insert("max_norm_drift".into(), format!("{drift:.3e}"));
    if opts.richardson {
        metadata.insert("richardson_error".into(), format!("{richardson:.3e}"));
    }
    Ok(EvolutionResult {
        times: times.to_vec(),
        states: rec.states,
        final_state: QuantumState::pure_unchecked(&space, x)?,
        observables: rec.observables,
        metadata,
        warnings,
    })
}
