// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! Target states and figures of merit.

use std::fmt;

use ndarray::{Array1, Array2};

use crate::fock::{coherent_amplitudes, HilbertSpace, QuantumState, StateData};
use crate::{linalg, Error, Result, C64};

/// Slack allowed outside `[0, 1]` before a figure of merit counts as unphysical.
pub const CLAMP_TOL: f64 = 1e-9;

/// Yurke–Stoler state `(|α⟩ + i|−α⟩)/√2` on a single mode of dimension `dim`.
pub fn yurke_stoler(alpha1: C64, dim: usize) -> Result<QuantumState> {
    let plus = coherent_amplitudes(alpha1, dim)?;
    let minus = coherent_amplitudes(-alpha1, dim)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = Array1::from_shape_fn(dim, |n| (plus[n] + C64::i() * minus[n]) * s);
    QuantumState::pure_normalized(&HilbertSpace::single_mode(dim)?, v)
}

fn clamp_unit(quantity: &'static str, value: f64) -> Result<f64> {
    if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&value) {
        return Err(Error::Unphysical { quantity, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

fn same_space(a: &QuantumState, b: &QuantumState) -> Result<()> {
    if a.space() != b.space() {
        return Err(Error::SpaceMismatch(format!("{:?} vs {:?}", a.space().dims(), b.space().dims())));
    }
    Ok(())
}

fn sandwich(psi: &Array1<C64>, state: &QuantumState) -> C64 {
    match state.data() {
        StateData::Pure(phi) => {
            let amp: C64 = psi.iter().zip(phi).map(|(p, f)| p.conj() * f).sum();
            C64::new(amp.norm_sqr(), 0.0)
        }
        StateData::Mixed(rho) => {
            let rpsi = rho.dot(psi);
            psi.iter().zip(&rpsi).map(|(p, r)| p.conj() * r).sum()
        }
    }
}

/// `F = ⟨ψ|ρ|ψ⟩` for a pure target `ψ`.
pub fn fidelity(rho: &QuantumState, target: &QuantumState) -> Result<f64> {
    same_space(rho, target)?;
    let psi = target.vector().ok_or(Error::NotPure)?;
    let f = sandwich(psi, rho);
    if f.im.abs() > 1e-10_f64.max(1e-10 * f.re.abs()) {
        return Err(Error::Unphysical { quantity: "fidelity imaginary part", value: f.im });
    }
    clamp_unit("fidelity", f.re)
}

/// `|⟨ψ|φ⟩|²` when either argument is pure; otherwise an error.
pub fn overlap(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    match (a.vector(), b.vector()) {
        (_, Some(_)) => fidelity(a, b),
        (Some(_), None) => fidelity(b, a),
        (None, None) => Err(Error::NotPure),
    }
}

/// `P = Tr ρ²`.
pub fn purity(rho: &QuantumState) -> Result<f64> {
    let p = match rho.data() {
        StateData::Pure(v) => v.iter().map(|z| z.norm_sqr()).sum::<f64>().powi(2),
        StateData::Mixed(m) => m.iter().map(|z| z.norm_sqr()).sum(),
    };
    let p = clamp_unit("purity", p)?;
    if p == 0.0 {
        return Err(Error::Unphysical { quantity: "purity", value: p });
    }
    Ok(p)
}

/// `½ ‖ρ − σ‖₁`.
pub fn trace_distance(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    same_space(a, b)?;
    linalg::trace_distance(&a.density_matrix(), &b.density_matrix())
}

/// `⟨c†c⟩` for bosonic subsystem `mode`.
pub fn mean_number(state: &QuantumState, mode: usize) -> Result<f64> {
    let reduced = reduce_subsystem(state, &[mode])?;
    let rho = reduced.density_matrix();
    Ok((0..rho.nrows()).map(|n| n as f64 * rho[[n, n]].re).sum())
}

/// Photon-number distribution of bosonic subsystem `mode`.
pub fn number_distribution(state: &QuantumState, mode: usize) -> Result<Vec<f64>> {
    let reduced = reduce_subsystem(state, &[mode])?;
    let rho = reduced.density_matrix();
    Ok((0..rho.nrows()).map(|n| rho[[n, n]].re).collect())
}

/// Partial trace keeping the subsystems in `keep` (each at most once, in
/// their original order).
pub fn reduce_subsystem(state: &QuantumState, keep: &[usize]) -> Result<QuantumState> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let space = state.space();
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let sub = space.subspace(&keep)?;
    let dims = space.dims();
    if keep.len() == dims.len() {
        return Ok(state.clone());
    }

    // split every full index into (kept, traced) multi-indices
    let n = space.total_dim();
    let mut kept_of = vec![0usize; n];
    let mut traced_of = vec![0usize; n];
    for (idx, (k_slot, t_slot)) in kept_of.iter_mut().zip(traced_of.iter_mut()).enumerate() {
        let mut rem = idx;
        let (mut k, mut kstride, mut t, mut tstride) = (0, 1, 0, 1);
        for s in (0..dims.len()).rev() {
            let digit = rem % dims[s];
            rem /= dims[s];
            if keep.contains(&s) {
                k += digit * kstride;
                kstride *= dims[s];
            } else {
                t += digit * tstride;
                tstride *= dims[s];
            }
        }
        *k_slot = k;
        *t_slot = t;
    }
    let dk = sub.total_dim();
    let dt = n / dk;

    let reduced = match state.data() {
        StateData::Pure(v) => {
            let mut m = Array2::<C64>::zeros((dk, dt));
            for i in 0..n {
                m[[kept_of[i], traced_of[i]]] = v[i];
            }
            m.dot(&linalg::dagger(&m))
        }
        StateData::Mixed(rho) => {
            let mut groups = vec![Vec::new(); dt];
            for i in 0..n {
                groups[traced_of[i]].push(i);
            }
            let mut out = Array2::<C64>::zeros((dk, dk));
            for g in &groups {
                for &i in g {
                    for &j in g {
                        out[[kept_of[i], kept_of[j]]] += rho[[i, j]];
                    }
                }
            }
            out
        }
    };
    QuantumState::mixed_unchecked(&sub, reduced)
}

/// Name of a scalar figure of merit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeritKind {
    Fidelity,
    Purity,
    Trace,
    Overlap,
    MeanN,
}

impl fmt::Display for MeritKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeritKind::Fidelity => "fidelity",
            MeritKind::Purity => "purity",
            MeritKind::Trace => "trace",
            MeritKind::Overlap => "overlap",
            MeritKind::MeanN => "mean_n",
        })
    }
}

/// A validated scalar result tagged with the parameters it was computed at.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureOfMerit {
    kind: MeritKind,
    value: f64,
    context: Vec<(String, f64)>,
}

impl FigureOfMerit {
    pub fn new(kind: MeritKind, value: f64, context: Vec<(String, f64)>) -> Result<Self> {
        let quantity = match kind {
            MeritKind::Fidelity => "fidelity",
            MeritKind::Purity => "purity",
            MeritKind::Overlap => "overlap",
            MeritKind::Trace => "trace",
            MeritKind::MeanN => "mean_n",
        };
        let ok = value.is_finite()
            && match kind {
                MeritKind::Fidelity | MeritKind::Overlap => (0.0..=1.0 + CLAMP_TOL).contains(&value),
                MeritKind::Purity => value > 0.0 && value <= 1.0 + CLAMP_TOL,
                MeritKind::Trace | MeritKind::MeanN => value >= 0.0,
            };
        if !ok {
            return Err(Error::Unphysical { quantity, value });
        }
        Ok(Self { kind, value, context })
    }

    pub fn kind(&self) -> MeritKind {
        self.kind
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn context(&self) -> &[(String, f64)] {
        &self.context
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, fock_amplitudes, make_space, product_state, vacuum};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn yurke_stoler_normalization_and_statistics() {
        let ys = yurke_stoler(C64::new(2.0 * 2f64.sqrt(), 0.0), 35).unwrap();
        let v = ys.vector().unwrap();
        assert_abs_diff_eq!(ys.norm_sqr(), 1.0, epsilon = 1e-14);
        let coh = coherent_amplitudes(C64::new(2.0 * 2f64.sqrt(), 0.0), 35).unwrap();
        for n in 0..35 {
            assert_abs_diff_eq!(v[n].norm(), coh[n].norm(), epsilon = 1e-14);
        }
        let zero = yurke_stoler(C64::new(0.0, 0.0), 4).unwrap();
        let z = zero.vector().unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(z[0].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(z[0].im, s, epsilon = 1e-15);
    }

    #[test]
    fn vacuum_coherent_fidelity() {
        let s = HilbertSpace::single_mode(30).unwrap();
        let target = coherent_state(&s, 0, C64::new(1.0, 0.0)).unwrap();
        let f = fidelity(&vacuum(&s).to_mixed(), &target).unwrap();
        assert_abs_diff_eq!(f, (-1.0f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity(&target, &target).unwrap(), 1.0, epsilon = 1e-14);
        assert!(matches!(fidelity(&target, &target.to_mixed()), Err(Error::NotPure)));
    }

    #[test]
    fn purity_examples() {
        let q = HilbertSpace::qubit();
        let mixed = QuantumState::mixed(&q, Array2::from_diag(&Array1::from_elem(2, C64::new(0.5, 0.0)))).unwrap();
        assert_abs_diff_eq!(purity(&mixed).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(purity(&vacuum(&q)).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(purity(&vacuum(&q).to_mixed()).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn bell_like_reduction() {
        let s = make_space(2, 2, false).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v = Array1::from(vec![C64::new(r, 0.0), C64::default(), C64::default(), C64::new(r, 0.0)]);
        let bell = QuantumState::pure(&s, v).unwrap();
        for st in [bell.clone(), bell.to_mixed()] {
            for keep in [0, 1] {
                let red = reduce_subsystem(&st, &[keep]).unwrap();
                assert_abs_diff_eq!(red.norm_sqr(), 1.0, epsilon = 1e-14);
                assert_abs_diff_eq!(purity(&red).unwrap(), 0.5, epsilon = 1e-14);
            }
        }
        assert!(matches!(reduce_subsystem(&bell, &[]), Err(Error::EmptyKeep)));
    }

    #[test]
    fn product_factor_recovered() {
        let s = make_space(8, 3, true).unwrap();
        let f0 = coherent_amplitudes(C64::new(0.3, -0.2), 8).unwrap();
        let f1 = fock_amplitudes(2, 3).unwrap();
        let q = Array1::from(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let st = product_state(&s, &[f0.clone(), f1, q.clone()]).unwrap();
        for data in [st.clone(), st.to_mixed()] {
            let r0 = reduce_subsystem(&data, &[0]).unwrap().density_matrix();
            let rq = reduce_subsystem(&data, &[2]).unwrap().density_matrix();
            for i in 0..8 {
                for j in 0..8 {
                    assert!((r0[[i, j]] - f0[i] * f0[j].conj()).norm() < 1e-14);
                }
            }
            for i in 0..2 {
                for j in 0..2 {
                    assert!((rq[[i, j]] - q[i] * q[j].conj()).norm() < 1e-14);
                }
            }
            assert_abs_diff_eq!(mean_number(&data, 1).unwrap(), 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn figure_of_merit_validation() {
        assert!(FigureOfMerit::new(MeritKind::Fidelity, 1.0 + 1e-10, vec![]).is_ok());
        assert!(FigureOfMerit::new(MeritKind::Fidelity, 1.1, vec![]).is_err());
        assert!(FigureOfMerit::new(MeritKind::Purity, 0.0, vec![]).is_err());
        let m = FigureOfMerit::new(MeritKind::MeanN, 4.0, vec![("alpha".into(), 2.0)]).unwrap();
        assert_eq!(m.kind().to_string(), "mean_n");
        assert_eq!(m.context()[0].1, 2.0);
    }

    fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> Array2<C64> {
        let h = Array2::from_shape_fn((d, d), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let herm = (&h + &linalg::dagger(&h)).mapv(|z| z * 0.5);
        let be = linalg::BlockEigen::new(&herm).unwrap();
        be.matrix_fn(|e| C64::from_polar(1.0, e))
    }

    fn random_state(d: usize, rng: &mut ChaCha8Rng) -> Array1<C64> {
        let v = Array1::from_shape_fn(d, |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.mapv(|z| z / n)
    }

    proptest! {
        #[test]
        fn merits_invariant_under_unitaries(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = 6;
            let s = HilbertSpace::single_mode(d).unwrap();
            let u = random_unitary(d, &mut rng);
            let psi = random_state(d, &mut rng);
            let w: Vec<f64> = (0..3).map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = w.iter().sum();
            let mut rho = Array2::<C64>::zeros((d, d));
            for wk in &w {
                let phi = random_state(d, &mut rng);
                for i in 0..d { for j in 0..d { rho[[i, j]] += phi[i] * phi[j].conj() * (wk / total); } }
            }
            let rho_s = QuantumState::mixed(&s, rho.clone()).unwrap();
            let psi_s = QuantumState::pure(&s, psi.clone()).unwrap();
            let rho_u = QuantumState::mixed_unchecked(&s, u.dot(&rho).dot(&linalg::dagger(&u))).unwrap();
            let psi_u = QuantumState::pure_unchecked(&s, u.dot(&psi)).unwrap();
            prop_assert!((fidelity(&rho_s, &psi_s).unwrap() - fidelity(&rho_u, &psi_u).unwrap()).abs() < 1e-12);
            prop_assert!((purity(&rho_s).unwrap() - purity(&rho_u).unwrap()).abs() < 1e-12);
        }
    }
}
