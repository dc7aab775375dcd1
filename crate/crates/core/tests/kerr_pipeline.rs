// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end checks across modules: state preparation, beam splitter,
//! Kerr propagation and damped evolution.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use approx::assert_abs_diff_eq;
use kerrsim::analysis::{fidelity, mean_number, purity, reduce_subsystem, trace_distance, yurke_stoler};
use kerrsim::evolution::{
    evolve_lindblad, kerr_analytic_pure, kerr_lindblad_analytic, AnalyticCutoffs, CollapseOp, EvolutionOptions,
    LindbladModel, SpectralPropagator,
};
use kerrsim::fock::{
    annihilation, coherent_amplitudes, coherent_state, fock_amplitudes, make_space, number, product_state, qubit_amplitudes,
    BeamSplitter, HilbertSpace, QuantumState, QubitBasis,
};
use kerrsim::hamiltonians::{build_kerr_effective_branch, Branch, DispersiveParams};
use kerrsim::C64;
use proptest::prelude::*;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[test]
fn two_mode_cat_matches_single_mode_analytic() {
    let alpha = c(1.0);
    let n = 16;
    let space = make_space(n, n, true).unwrap();
    let plus = qubit_amplitudes(QubitBasis::PlusX);
    let phys = product_state(&space, &[coherent_amplitudes(alpha, n).unwrap(), coherent_amplitudes(alpha, n).unwrap(), plus]).unwrap();
    let normal = BeamSplitter::new(&space).unwrap().map(&phys).unwrap();
    let dp = DispersiveParams::normal_mode(-0.2, 0.02, Branch::Plus);
    let mu = dp.mu.unwrap();
    let h = build_kerr_effective_branch(&dp, &space, Branch::Plus).unwrap();
    let prop = SpectralPropagator::new(&h).unwrap();
    for mu_t in [0.3, FRAC_PI_2, 2.0] {
        let full = prop.propagate(&normal, mu_t / mu).unwrap();
        let reduced = reduce_subsystem(&full, &[0]).unwrap();
        let single = kerr_analytic_pure(alpha * SQRT_2, mu, mu_t / mu, n).unwrap();
        assert!((fidelity(&reduced, &single).unwrap() - 1.0).abs() < 1e-9, "μt = {mu_t}");
    }
}

#[test]
fn cat_time_gives_yurke_stoler_and_half_revival() {
    let a1 = c(2.0 * SQRT_2);
    let ys = yurke_stoler(a1, 35).unwrap();
    let at_cat = kerr_analytic_pure(a1, 1.0, FRAC_PI_2, 35).unwrap();
    assert_abs_diff_eq!(fidelity(&at_cat, &ys).unwrap(), 1.0, epsilon = 1e-10);
    let flipped = kerr_analytic_pure(a1, 1.0, PI, 35).unwrap();
    let minus = coherent_state(&HilbertSpace::single_mode(35).unwrap(), 0, -a1).unwrap();
    assert_abs_diff_eq!(fidelity(&flipped, &minus).unwrap(), 1.0, epsilon = 1e-10);
}

#[test]
fn damped_mean_number_decays_at_twice_the_rate() {
    // ⟨n⟩ obeys d⟨n⟩/dt = −2κ⟨n⟩ whatever the Kerr strength
    let space = HilbertSpace::single_mode(30).unwrap();
    let rho0 = coherent_state(&space, 0, c(2.0)).unwrap();
    let n0 = mean_number(&rho0, 0).unwrap();
    for (mu, kappa, t) in [(1.0, 0.05, 1.0), (0.0, 0.2, 2.0), (3.0, 0.01, 0.4)] {
        let rho = kerr_lindblad_analytic(&rho0, mu, kappa, t, AnalyticCutoffs::auto(30, kappa, t)).unwrap();
        assert_abs_diff_eq!(mean_number(&rho, 0).unwrap(), n0 * (-2.0 * kappa * t).exp(), epsilon = 1e-9);
    }
}

#[test]
fn lindblad_two_mode_loss_reduces_to_normal_mode_loss() {
    // a and b damped at κ each: the occupied normal mode loses at κ
    let n = 6;
    let space = make_space(n, n, false).unwrap();
    let bs = BeamSplitter::new(&space).unwrap();
    let normal = product_state(&space, &[fock_amplitudes(1, n).unwrap(), fock_amplitudes(0, n).unwrap()]).unwrap();
    let phys = bs.unmap(&normal).unwrap();
    let kappa = 0.3;
    let zero = &number(&space, 0).unwrap() * 0.0;
    let model = LindbladModel::new(
        zero,
        vec![
            CollapseOp { op: annihilation(&space, 0).unwrap(), rate: kappa },
            CollapseOp { op: annihilation(&space, 1).unwrap(), rate: kappa },
        ],
    )
    .unwrap();
    let run = evolve_lindblad(&model, &phys, &[0.0, 1.0], &EvolutionOptions::default()).unwrap();
    let back = bs.map(&run.final_state).unwrap();
    assert_abs_diff_eq!(mean_number(&back, 0).unwrap(), (-2.0 * kappa).exp(), epsilon = 1e-8);
    assert!(mean_number(&back, 1).unwrap() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn analytic_solution_is_a_state(re in -2.0f64..2.0, im in -2.0f64..2.0, gamma in 0.0f64..0.5, mu_t in 0.0f64..3.2) {
        let dim = 32;
        let space = HilbertSpace::single_mode(dim).unwrap();
        let rho0 = coherent_state(&space, 0, C64::new(re, im)).unwrap();
        let rho = kerr_lindblad_analytic(&rho0, 1.0, gamma, mu_t, AnalyticCutoffs::auto(dim, gamma, mu_t)).unwrap();
        rho.validate(1e-9, 1e-8).unwrap();
        let p = purity(&rho).unwrap();
        prop_assert!(p <= 1.0 + 1e-12);
    }

    #[test]
    fn spectral_and_analytic_kerr_agree(re in -1.5f64..1.5, mu_t in 0.0f64..6.3) {
        let dim = 24;
        let space = HilbertSpace::single_mode(dim).unwrap();
        let psi0 = coherent_state(&space, 0, c(re)).unwrap();
        let n = number(&space, 0).unwrap();
        let prop = SpectralPropagator::new(&(&n * &n)).unwrap();
        let spectral = prop.propagate(&psi0, mu_t).unwrap();
        let analytic = kerr_analytic_pure(c(re), 1.0, mu_t, dim).unwrap();
        prop_assert!(trace_distance(&spectral, &analytic).unwrap() < 1e-9);
        let as_mixed: QuantumState = analytic.to_mixed();
        prop_assert!(trace_distance(&spectral, &as_mixed).unwrap() < 1e-9);
    }
}
