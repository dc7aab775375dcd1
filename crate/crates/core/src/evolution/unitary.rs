// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

use ndarray::Array2;

use super::{check_same_space, check_storage, check_times, EvolutionOptions, EvolutionResult, Recorder};
use crate::fock::{HilbertSpace, Operator, QuantumState, StateData};
use crate::linalg::{self, BlockEigen};
use crate::{Error, Result, C64};

/// `e^{−iHt}` through the eigendecomposition of a static Hermitian `H`,
/// computed block by block over the connected components of its sparsity
/// pattern.
#[derive(Clone, Debug)]
pub struct SpectralPropagator {
    space: HilbertSpace,
    eig: BlockEigen,
}

impl SpectralPropagator {
    pub fn new(h: &Operator) -> Result<Self> {
        let err = h.hermiticity_error();
        if err > 1e-10 * h.norm_bound().max(1.0) {
            return Err(Error::NotHermitian(err));
        }
        Ok(Self { space: h.space().clone(), eig: BlockEigen::new(h.matrix())? })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn eigen(&self) -> &BlockEigen {
        &self.eig
    }

    pub fn unitary(&self, t: f64) -> Array2<C64> {
        self.eig.matrix_fn(|e| C64::from_polar(1.0, -e * t))
    }

    /// `e^{−iHt}ψ` or `e^{−iHt} ρ e^{iHt}`.
    pub fn propagate(&self, state: &QuantumState, t: f64) -> Result<QuantumState> {
        check_same_space(&self.space, state.space())?;
        match state.data() {
            StateData::Pure(v) => {
                QuantumState::pure_unchecked(&self.space, self.eig.apply_fn(v, |e| C64::from_polar(1.0, -e * t)))
            }
            StateData::Mixed(rho) => {
                let u = self.unitary(t);
                QuantumState::mixed_unchecked(&self.space, u.dot(rho).dot(&linalg::dagger(&u)))
            }
        }
    }
}

/// `ψ(t) = e^{−iHt}ψ₀` for a static Hermitian `H`.
pub fn evolve_unitary_static(h: &Operator, psi0: &QuantumState, t: f64) -> Result<QuantumState> {
    if !psi0.is_pure() {
        return Err(Error::NotPure);
    }
    SpectralPropagator::new(h)?.propagate(psi0, t)
}

/// Spectral evolution of a pure or mixed state sampled on `times`
/// (measured from the initial state at `t = 0`).
pub fn evolve_unitary_grid(
    h: &Operator,
    state0: &QuantumState,
    times: &[f64],
    opts: &EvolutionOptions,
) -> Result<EvolutionResult> {
    check_times(times)?;
    check_same_space(h.space(), state0.space())?;
    check_storage(times, state0.space(), !state0.is_pure(), opts)?;
    let prop = SpectralPropagator::new(h)?;
    let mut rec = Recorder::new(state0.space(), opts)?;
    let mut last = state0.clone();
    for &t in times {
        last = prop.propagate(state0, t)?;
        rec.record(&last)?;
    }
    let mut metadata = std::collections::BTreeMap::new();
    metadata.insert("solver".into(), "spectral".into());
    metadata.insert("largest_block".into(), prop.eigen().largest_block().to_string());
    Ok(EvolutionResult {
        times: times.to_vec(),
        states: rec.states,
        final_state: last,
        observables: rec.observables,
        metadata,
        warnings: Vec::new(),
    })
}
