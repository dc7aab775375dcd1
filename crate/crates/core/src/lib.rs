// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense, truncated Fock-space simulation of a driven charge qubit coupled to
//! two resonant mechanical modes.
//!
//! The crate covers the whole approximation chain from the lab-frame
//! Hamiltonian down to the effective single-mode Kerr interaction
//! `μ (a₁†a₁)² σₓ`, the unitary and dissipative propagation of coherent
//! states under it, and the figures of merit (fidelity against the
//! Yurke–Stoler cat state, purity) used to judge the generated states.
//!
//! Conventions used throughout:
//! - ℏ = 1, all frequencies are angular and expressed in units of a
//!   caller-chosen reference frequency.
//! - Subsystems are ordered `(mode a, mode b, qubit)` with row-major tensor
//!   indexing; the qubit basis is `|↑⟩ = (1, 0)`, `|↓⟩ = (0, 1)` with
//!   `σ_z = diag(1, -1)`.
//! - Dissipators are written `κ (2LρL† − L†Lρ − ρL†L)`.

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod hamiltonians;
pub mod linalg;

pub use error::{Error, Result};

/// Complex scalar used for every amplitude and matrix element.
pub type C64 = num_complex::Complex64;

/// Default tolerance on state normalization after preparation.
pub const TOL_NORM: f64 = 1e-9;
/// Default tolerance on negative eigenvalues of a density matrix.
pub const TOL_POS: f64 = 1e-8;
/// Default tolerance on trace drift during dissipative evolution.
pub const TOL_TRACE: f64 = 1e-6;
