// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode dimension {0} is below the minimum of 2")]
    DimensionTooSmall(usize),
    #[error("at most two bosonic modes are supported, got {0}")]
    TooManyModes(usize),
    #[error("a Hilbert space needs at least one subsystem")]
    EmptySpace,
    #[error("subsystem {0} is not a bosonic mode of this space")]
    NotAMode(usize),
    #[error("subsystem index {0} is out of range")]
    BadSubsystem(usize),
    #[error("the space has no qubit")]
    NoQubit,
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: String, actual: String },
    #[error(
        "Fock dimension {dim} leaks {leaked:.3e} of the weight of a coherent state with |α| = {alpha}"
    )]
    TruncationTooSmall { alpha: f64, dim: usize, leaked: f64 },
    #[error("mode dimensions differ ({0} vs {1})")]
    UnequalModes(usize, usize),
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("state is not normalized (|‖ψ‖² − 1| = {0:.3e})")]
    NotNormalized(f64),
    #[error("density matrix is invalid: {0}")]
    InvalidDensityMatrix(String),
    #[error("expected a pure state")]
    NotPure,
    #[error("degenerate qubit: Ω̄ = 0")]
    DegenerateQubit,
    #[error("rotating-frame resonance violated: Ω̄ = {omega_bar}, ω_e = {omega_e}")]
    OffResonance { omega_bar: f64, omega_e: f64 },
    #[error("zero detuning δ = ω − ω_e")]
    ZeroDetuning,
    #[error("normal-mode form needs Ω = χ (got Ω = {omega}, χ = {chi})")]
    UnequalShifts { omega: f64, chi: f64 },
    #[error("the exchange rate r = {r} does not match the requested normal-mode branch")]
    BranchMismatch { r: f64 },
    #[error("the Kerr effective Hamiltonian needs Δ > 0, got Δ = {0}")]
    NonPositiveDelta(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("time grid must be non-empty and strictly increasing")]
    BadTimeGrid,
    #[error("step size violates the accuracy guideline (‖H‖·dt = {0:.3})")]
    StepTooLarge(f64),
    #[error("trace drifted by {drift:.3e} at t = {time} (limit {limit:.1e})")]
    TraceDrift { drift: f64, time: f64, limit: f64 },
    #[error("{quantity} = {value} is outside its physical range")]
    Unphysical { quantity: &'static str, value: f64 },
    #[error("the set of kept subsystems is empty")]
    EmptyKeep,
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, Error>;
