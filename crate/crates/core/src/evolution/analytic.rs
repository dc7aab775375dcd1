// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form Kerr evolution, with and without single-mode damping.

use ndarray::Array2;

use crate::fock::{coherent_amplitudes, HilbertSpace, QuantumState};
use crate::{Error, Result, C64};

/// Relative size below which the tail of the k-sum is dropped.
pub const K_TAIL_TOL: f64 = 1e-12;

/// `e^{−iμt(a†a)²}|α₁⟩` on `dim` levels, renormalized after truncation.
pub fn kerr_analytic_pure(alpha1: C64, mu: f64, t: f64, dim: usize) -> Result<QuantumState> {
    if !(mu.is_finite() && t.is_finite()) {
        return Err(Error::InvalidParameter("non-finite μ or t".into()));
    }
    let mut c = coherent_amplitudes(alpha1, dim)?;
    let mt = mu * t;
    for (n, z) in c.iter_mut().enumerate() {
        *z *= C64::from_polar(1.0, -mt * (n * n) as f64);
    }
    QuantumState::pure_normalized(&HilbertSpace::single_mode(dim)?, c)
}

/// `ln k!` for `k = 0..=n`.
pub fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    t.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        t.push(acc);
    }
    t
}

/// `ln[√((n+k)!(m+k)!/(n!m!)) / k!]` from a table covering `max(n, m) + k`.
pub fn log_factorial_ratio(n: usize, m: usize, k: usize, ln_fact: &[f64]) -> f64 {
    0.5 * (ln_fact[n + k] + ln_fact[m + k] - ln_fact[n] - ln_fact[m]) - ln_fact[k]
}

/// Truncation of the number basis and of the k-sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalyticCutoffs {
    pub dim: usize,
    pub k_max: usize,
}

impl AnalyticCutoffs {
    /// `k_max` from [`auto_k_max`].
    pub fn auto(dim: usize, kappa: f64, t: f64) -> Self {
        Self { dim, k_max: auto_k_max(dim, kappa, t) }
    }
}

/// Smallest k at which `(2κt)^k (dim + k)!/(dim! k!) e^{−κtk}` falls below
/// [`K_TAIL_TOL`], capped at `dim − 1` (the sum is finite on a truncated
/// basis).
pub fn auto_k_max(dim: usize, kappa: f64, t: f64) -> usize {
    let kt = kappa * t.abs();
    let cap = dim.saturating_sub(1);
    if kt == 0.0 {
        return 0;
    }
    let ln_tol = K_TAIL_TOL.ln();
    let ln_fact = ln_factorial_table(2 * dim + 1);
    let ln_2kt = (2.0 * kt).ln();
    for k in 1..=cap {
        let bound = k as f64 * ln_2kt + ln_fact[dim + k] - ln_fact[dim] - ln_fact[k] - kt * k as f64;
        if bound < ln_tol {
            return k;
        }
    }
    cap
}

/// Exact solution of `dρ/dt = −iμ[(a†a)², ρ] + κ(2aρa† − a†aρ − ρa†a)`:
///
/// `ρ_{n,m}(t) = Σ_k ρ_{n+k,m+k}(0) e^{−iμt(n²−m²) − κt(n+m)}
///  √((n+k)!(m+k)!/(n!m!)) Bᵏ (2κ)ᵏ/k!`,
/// `B = (1 − e^{−2iμt(n−m) − 2κt}) / (2iμ(n−m) + 2κ)`.
///
/// Factorials and powers are combined in the log domain. At κ = 0 only the
/// k = 0 term is kept, avoiding the removable 0/0 in `B` at n = m.
pub fn kerr_lindblad_analytic(
    rho0: &QuantumState,
    mu: f64,
    kappa: f64,
    t: f64,
    cutoffs: AnalyticCutoffs,
) -> Result<QuantumState> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::InvalidParameter(format!("damping rate {kappa}")));
    }
    if !(mu.is_finite() && t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter("non-finite μ or negative t".into()));
    }
    let space = rho0.space();
    if space.num_modes() != 1 || space.has_qubit() {
        return Err(Error::InvalidParameter("analytic solution acts on a single bosonic mode".into()));
    }
    let dim = space.total_dim();
    if cutoffs.dim != dim {
        return Err(Error::Shape { expected: dim.to_string(), actual: cutoffs.dim.to_string() });
    }
    let r0 = rho0.density_matrix();
    let mut out = Array2::<C64>::zeros((dim, dim));
    let ln_fact = ln_factorial_table(2 * dim);
    let k_max = if kappa == 0.0 { 0 } else { cutoffs.k_max };
    let kt = kappa * t;

    for n in 0..dim {
        for m in 0..dim {
            let nn = n as f64;
            let mm = m as f64;
            let base = C64::new(-kt * (nn + mm), -mu * t * (nn * nn - mm * mm));
            let mut acc = r0[[n, m]];
            if k_max > 0 {
                let d = nn - mm;
                let denom = C64::new(2.0 * kappa, 2.0 * mu * d);
                let numer = C64::new(1.0, 0.0) - C64::new(-2.0 * kt, -2.0 * mu * t * d).exp();
                // z = 2κB
                let z = numer / denom * (2.0 * kappa);
                if z != C64::new(0.0, 0.0) {
                    let ln_z = z.ln();
                    for k in 1..=k_max.min(dim - 1 - n.max(m)) {
                        let src = r0[[n + k, m + k]];
                        if src == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let ln_w = ln_z * k as f64 + log_factorial_ratio(n, m, k, &ln_fact);
                        acc += src * ln_w.exp();
                    }
                }
            }
            out[[n, m]] = acc * base.exp();
        }
    }
    QuantumState::mixed_unchecked(space, out)
}
