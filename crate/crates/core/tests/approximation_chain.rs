// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! RWA model against its dispersive limit at the cat time.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use kerrsim::analysis::overlap;
use kerrsim::evolution::SpectralPropagator;
use kerrsim::fock::{
    coherent_amplitudes, fock_amplitudes, make_space, number, product_state, qubit_amplitudes, qubit_operator,
    BeamSplitter, QuantumState, QubitBasis, QubitOp,
};
use kerrsim::hamiltonians::{build_dispersive, build_rwa_drive_frame, dispersive_qubit_shift, ModelInputs, ModelParams};
use kerrsim::C64;
use ndarray::Array1;

/// (plain, with qubit shift) overlaps between the RWA and dispersive states
/// at `t = π/(2μ)`.
fn rwa_vs_dispersive(delta: f64, g: f64, alpha: f64) -> (f64, f64) {
    let mp = ModelParams::new(ModelInputs {
        omega: 1000.0 + delta,
        omega0: 0.0,
        delta_bar: 1000.0,
        lambda1: 1.0,
        lambda2: 1.0,
        g,
        omega_e: None,
    })
    .unwrap();
    let n = 15;
    let s = make_space(n, n, true).unwrap();
    let bs = BeamSplitter::new(&s).unwrap();
    let phi0n = product_state(
        &s,
        &[
            coherent_amplitudes(C64::new(alpha * SQRT_2, 0.0), n).unwrap(),
            fock_amplitudes(0, n).unwrap(),
            qubit_amplitudes(QubitBasis::PlusX),
        ],
    )
    .unwrap();
    let phi0 = bs.unmap(&phi0n).unwrap();
    let (h12, dp) = build_dispersive(&mp, &s).unwrap();
    let t = FRAC_PI_2 / dp.mu.unwrap();

    let k = build_rwa_drive_frame(&mp, &s).unwrap();
    let rot = SpectralPropagator::new(&k).unwrap().propagate(&phi0, t).unwrap();
    let n_tot = &number(&s, 0).unwrap() + &number(&s, 1).unwrap();
    let phases: Array1<C64> = n_tot.matrix().diag().map(|x| C64::from_polar(1.0, mp.delta * x.re * t));
    let psi11 = QuantumState::pure_unchecked(&s, &phases * rot.vector().unwrap()).unwrap();

    let psi12 = SpectralPropagator::new(&h12).unwrap().propagate(&phi0, t).unwrap();
    let shift = &qubit_operator(&s, QubitOp::SigmaZ).unwrap() * dispersive_qubit_shift(&mp).unwrap();
    let psi12s = SpectralPropagator::new(&(&h12 + &shift)).unwrap().propagate(&phi0, t).unwrap();
    (overlap(&psi11, &psi12).unwrap(), overlap(&psi11, &psi12s).unwrap())
}

#[test]
fn rwa_against_dispersive_at_ratio_50() {
    let (plain, shifted) = rwa_vs_dispersive(50.0, 50.0, 0.5);
    println!("delta/lambda = g/lambda = 50: overlap {plain:.6}, with qubit shift {shifted:.6}");
    assert!(plain >= 0.95, "{plain}");
}

#[test]
fn qubit_shift_restores_convergence_when_detuning_dominates_drive() {
    let mut prev = 0.0;
    for r in [10.0, 30.0, 50.0, 100.0] {
        let (plain, shifted) = rwa_vs_dispersive(20.0 * r, 2.0 * r, 0.5);
        assert!(shifted >= 0.999 && shifted >= prev, "R = {r}: {shifted}");
        // the shift alone leaves an O(1) phase at the cat time
        assert!(plain < 0.5, "R = {r}: {plain}");
        prev = shifted;
    }
}
