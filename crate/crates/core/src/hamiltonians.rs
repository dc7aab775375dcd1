// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! The Hamiltonian approximation chain, from the lab frame down to the
//! effective Kerr interaction, together with the derived coupling constants.
//!
//! The chain, with ℏ = 1:
//!
//! 1. lab frame: `ω a†a + ω b†b + (ω₀/2)σ̄_z + (Δ̄/2)σ̄_x + Σᵢ λᵢ(·+·†)σ̄_z + g(a e^{iω_e t} + h.c.)`
//! 2. rotated qubit basis with `cos θ = ω₀/Ω̄`, `sin θ = Δ̄/Ω̄`
//! 3. rotating frame at `ω_e = Ω̄` plus rotating-wave approximation
//! 4. dispersive limit `Ω a†aσ_z + χ b†bσ_z + Δσ_x + r(a†b + ab†)σ_z`
//! 5. normal modes `ζ a₁†a₁ σ_z + Δσ_x` (for λ₁ = λ₂)
//! 6. Kerr limit `μ (a₁†a₁)² σ_x` with `μ = ζ²/(2Δ)`
//!
//! Builders return dense [`Operator`]s for static Hamiltonians and
//! [`PhaseSeries`] for time-dependent ones. Regime conditions are never
//! enforced by the builders; the `*_regime` functions report violations as
//! [`RegimeWarning`]s for callers to attach to their results.

use std::fmt;

use ndarray::Array2;

use crate::fock::{lowering_matrix, number_matrix, qubit_matrix, HilbertSpace, Operator, QubitOp};
use crate::{Error, Result, C64};

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge in C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Ratio treated as "much larger than" by the regime checks.
pub const REGIME_FACTOR: f64 = 10.0;

const RESONANCE_TOL: f64 = 1e-9;

/// Circuit and resonator parameters in SI units.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalParams {
    /// E_c in J.
    pub charging_energy: f64,
    /// E_J in J.
    pub josephson_energy: f64,
    /// Dimensionless gate charge n_g.
    pub gate_charge: f64,
    /// Flux ratio φ/φ₀.
    pub flux_ratio: f64,
    /// V_g in V.
    pub gate_voltage: f64,
    /// C_{g,1}, C_{g,2} in F.
    pub gate_capacitances: [f64; 2],
    /// C_Σ in F.
    pub total_capacitance: f64,
    /// d₁, d₂ in m.
    pub gate_distances: [f64; 2],
    /// Resonator mass in kg.
    pub mass: f64,
    /// Resonator angular frequency ω in rad/s.
    pub omega: f64,
    /// Drive amplitude g in rad/s.
    pub drive_amplitude: f64,
    /// Drive angular frequency ω_e in rad/s; `None` puts the drive on
    /// resonance with the qubit, ω_e = Ω̄.
    pub drive_frequency: Option<f64>,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("C_g1", self.gate_capacitances[0]),
            ("C_g2", self.gate_capacitances[1]),
            ("C_sigma", self.total_capacitance),
            ("d_1", self.gate_distances[0]),
            ("d_2", self.gate_distances[1]),
            ("mass", self.mass),
            ("omega", self.omega),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be strictly positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Qubit–resonator coupling `λᵢ = e V_g C_{g,i} / (C_Σ dᵢ) · √(ℏ/(2mω)) / ℏ`.
fn coupling(p: &PhysicalParams, i: usize) -> f64 {
    ELEMENTARY_CHARGE * p.gate_voltage * p.gate_capacitances[i] / (p.total_capacitance * p.gate_distances[i])
        * (HBAR / (2.0 * p.mass * p.omega)).sqrt()
        / HBAR
}

/// Model frequencies (rad/s) from circuit parameters.
pub fn derive_qubit_params(p: &PhysicalParams) -> Result<ModelParams> {
    p.validate()?;
    let omega0 = -4.0 * p.charging_energy * (1.0 - 2.0 * p.gate_charge) / HBAR;
    let mut cos = (std::f64::consts::PI * p.flux_ratio).cos();
    // cos(π/2) evaluates to ~6e-17 rather than 0
    if cos.abs() < 1e-15 {
        cos = 0.0;
    }
    let delta_bar = -2.0 * p.josephson_energy * cos / HBAR;
    ModelParams::new(ModelInputs {
        omega: p.omega,
        omega0,
        delta_bar,
        lambda1: coupling(p, 0),
        lambda2: coupling(p, 1),
        g: p.drive_amplitude,
        omega_e: p.drive_frequency,
    })
}

/// Independent inputs of [`ModelParams`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelInputs {
    pub omega: f64,
    pub omega0: f64,
    pub delta_bar: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub g: f64,
    /// `None` selects the resonant drive ω_e = Ω̄.
    pub omega_e: Option<f64>,
}

impl ModelInputs {
    /// Order-of-magnitude values for suspended nanomechanical resonators and
    /// a charge qubit, in rad/s: ω/2π = 1 GHz, Ω̄/2π = ω_e/2π = 2 GHz at the
    /// charge degeneracy point, λ/2π = 2 MHz, g/2π = 50 MHz.
    pub fn feasible_defaults() -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        Self {
            omega: two_pi * 1.0e9,
            omega0: 0.0,
            delta_bar: two_pi * 2.0e9,
            lambda1: two_pi * 2.0e6,
            lambda2: two_pi * 2.0e6,
            g: two_pi * 50.0e6,
            omega_e: None,
        }
    }
}

/// Model frequencies, ℏ = 1. Derived quantities are filled in by
/// [`ModelParams::new`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub omega: f64,
    pub omega0: f64,
    pub delta_bar: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub g: f64,
    pub omega_e: f64,
    /// Mixing angle, `θ = atan2(Δ̄, ω₀)`.
    pub theta: f64,
    /// `Ω̄ = (ω₀² + Δ̄²)^{1/2}`
    pub omega_bar: f64,
    /// Detuning `δ = ω − ω_e`.
    pub delta: f64,
}

impl ModelParams {
    pub fn new(inputs: ModelInputs) -> Result<Self> {
        let ModelInputs { omega, omega0, delta_bar, lambda1, lambda2, g, omega_e } = inputs;
        for (name, v) in [("omega", omega), ("omega0", omega0), ("delta_bar", delta_bar), ("lambda1", lambda1), ("lambda2", lambda2), ("g", g)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} is not finite")));
            }
        }
        let omega_bar = omega0.hypot(delta_bar);
        if omega_bar == 0.0 {
            return Err(Error::DegenerateQubit);
        }
        let omega_e = omega_e.unwrap_or(omega_bar);
        Ok(Self {
            omega,
            omega0,
            delta_bar,
            lambda1,
            lambda2,
            g,
            omega_e,
            theta: delta_bar.atan2(omega0),
            omega_bar,
            delta: omega - omega_e,
        })
    }

    pub fn inputs(&self) -> ModelInputs {
        ModelInputs {
            omega: self.omega,
            omega0: self.omega0,
            delta_bar: self.delta_bar,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            g: self.g,
            omega_e: Some(self.omega_e),
        }
    }

    pub fn cos_theta(&self) -> f64 {
        self.omega0 / self.omega_bar
    }

    pub fn sin_theta(&self) -> f64 {
        self.delta_bar / self.omega_bar
    }

    /// All frequencies divided by `reference`.
    pub fn in_units_of(&self, reference: f64) -> Result<Self> {
        if !(reference.is_finite() && reference > 0.0) {
            return Err(Error::InvalidParameter(format!("reference frequency {reference}")));
        }
        let i = self.inputs();
        Self::new(ModelInputs {
            omega: i.omega / reference,
            omega0: i.omega0 / reference,
            delta_bar: i.delta_bar / reference,
            lambda1: i.lambda1 / reference,
            lambda2: i.lambda2 / reference,
            g: i.g / reference,
            omega_e: i.omega_e.map(|w| w / reference),
        })
    }

    pub fn is_resonant(&self) -> bool {
        (self.omega_bar - self.omega_e).abs() <= RESONANCE_TOL * self.omega_bar.abs().max(1.0)
    }

    fn require_resonance(&self) -> Result<()> {
        if self.is_resonant() {
            Ok(())
        } else {
            Err(Error::OffResonance { omega_bar: self.omega_bar, omega_e: self.omega_e })
        }
    }
}

/// Which normal mode carries the dispersive coupling: `Plus` for λ₁ = λ₂
/// (mode a₁, subsystem 0), `Minus` for λ₁ = −λ₂ (mode a₂, subsystem 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn mode_index(self) -> usize {
        match self {
            Branch::Plus => 0,
            Branch::Minus => 1,
        }
    }
}

/// Couplings of the dispersive Hamiltonian and the quantities derived from
/// them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersiveParams {
    /// Ω = −(λ₁²/δ) sin²θ
    pub omega: f64,
    /// χ = −(λ₂²/δ) sin²θ
    pub chi: f64,
    /// Δ = (gλ₁/δ) sin θ, coefficient of σ_x.
    pub drive_coupling: f64,
    /// r = −(λ₁λ₂/δ) sin²θ
    pub exchange: f64,
    /// ζ = −(2λ₁²/δ) sin²θ
    pub zeta: f64,
    /// μ = ζ²/(2Δ); `None` when Δ = 0.
    pub mu: Option<f64>,
}

impl DispersiveParams {
    pub fn from_model(mp: &ModelParams) -> Result<Self> {
        if mp.delta == 0.0 {
            return Err(Error::ZeroDetuning);
        }
        let s = mp.sin_theta();
        let d = mp.delta;
        let omega = -(mp.lambda1 * mp.lambda1 / d) * s * s;
        let chi = -(mp.lambda2 * mp.lambda2 / d) * s * s;
        let drive_coupling = (mp.g * mp.lambda1 / d) * s;
        let exchange = -(mp.lambda1 * mp.lambda2 / d) * s * s;
        let zeta = -(2.0 * mp.lambda1 * mp.lambda1 / d) * s * s;
        let mu = (drive_coupling != 0.0).then(|| zeta * zeta / (2.0 * drive_coupling));
        Ok(Self { omega, chi, drive_coupling, exchange, zeta, mu })
    }

    /// Parameters of an ideal normal-mode Hamiltonian `ζ n σ_z + Δσ_x`.
    pub fn normal_mode(zeta: f64, drive_coupling: f64, branch: Branch) -> Self {
        let half = 0.5 * zeta;
        let exchange = match branch {
            Branch::Plus => half,
            Branch::Minus => -half,
        };
        let mu = (drive_coupling != 0.0).then(|| zeta * zeta / (2.0 * drive_coupling));
        Self { omega: half, chi: half, drive_coupling, exchange, zeta, mu }
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    /// Branch implied by the couplings, if Ω = χ.
    pub fn branch(&self) -> Option<Branch> {
        if !Self::close(self.omega, self.chi) {
            return None;
        }
        if Self::close(self.exchange, self.omega) {
            Some(Branch::Plus)
        } else if Self::close(self.exchange, -self.omega) {
            Some(Branch::Minus)
        } else {
            None
        }
    }
}

/// A regime condition of the approximation chain that is not comfortably met.
#[derive(Clone, Debug, PartialEq)]
pub struct RegimeWarning {
    pub condition: String,
    pub ratio: f64,
    pub required: f64,
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ratio {:.4} is below {}", self.condition, self.ratio, self.required)
    }
}

fn require_ratio(out: &mut Vec<RegimeWarning>, condition: &str, big: f64, small: f64) {
    if small == 0.0 {
        return;
    }
    let ratio = big.abs() / small.abs();
    if ratio < REGIME_FACTOR {
        out.push(RegimeWarning { condition: condition.to_string(), ratio, required: REGIME_FACTOR });
    }
}

/// Rotating-wave conditions `λᵢ ≪ ω, Ω̄, g`.
pub fn rwa_regime(mp: &ModelParams) -> Vec<RegimeWarning> {
    let mut w = Vec::new();
    for (name, l) in [("lambda1", mp.lambda1), ("lambda2", mp.lambda2)] {
        require_ratio(&mut w, &format!("rwa omega/{name}"), mp.omega, l);
        require_ratio(&mut w, &format!("rwa omega_bar/{name}"), mp.omega_bar, l);
        require_ratio(&mut w, &format!("rwa g/{name}"), mp.g, l);
    }
    w
}

/// Dispersive conditions `|δ| ≫ λ₁, λ₂, g`.
pub fn dispersive_regime(mp: &ModelParams) -> Vec<RegimeWarning> {
    let mut w = Vec::new();
    require_ratio(&mut w, "dispersive |delta|/lambda1", mp.delta, mp.lambda1);
    require_ratio(&mut w, "dispersive |delta|/lambda2", mp.delta, mp.lambda2);
    require_ratio(&mut w, "dispersive |delta|/g", mp.delta, mp.g);
    w
}

/// Kerr condition `Δ ≫ |ζ|`.
pub fn kerr_regime(dp: &DispersiveParams) -> Vec<RegimeWarning> {
    let mut w = Vec::new();
    require_ratio(&mut w, "kerr Delta/|zeta|", dp.drive_coupling, dp.zeta);
    w
}

/// One term `O · e^{i·rate·t}` of a [`PhaseSeries`].
#[derive(Clone, Debug)]
pub struct PhaseTerm {
    pub rate: f64,
    pub op: Operator,
}

/// Time-dependent operator `H(t) = Σₖ Oₖ e^{i ωₖ t}`.
#[derive(Clone, Debug)]
pub struct PhaseSeries {
    space: HilbertSpace,
    terms: Vec<PhaseTerm>,
}

impl PhaseSeries {
    pub fn new(space: &HilbertSpace) -> Self {
        Self { space: space.clone(), terms: Vec::new() }
    }

    pub fn constant(op: Operator) -> Self {
        let mut s = Self::new(op.space());
        s.terms.push(PhaseTerm { rate: 0.0, op });
        s
    }

    pub fn push(&mut self, rate: f64, op: Operator) -> Result<()> {
        if op.space() != &self.space {
            return Err(Error::SpaceMismatch("phase series term".into()));
        }
        if let Some(t) = self.terms.iter_mut().find(|t| t.rate == rate) {
            t.op = &t.op + &op;
        } else {
            self.terms.push(PhaseTerm { rate, op });
        }
        Ok(())
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn terms(&self) -> &[PhaseTerm] {
        &self.terms
    }

    pub fn at(&self, t: f64) -> Operator {
        let mut acc = Operator::zeros(&self.space);
        for term in &self.terms {
            acc = &acc + &term.op.scaled(C64::from_polar(1.0, term.rate * t));
        }
        acc
    }

    /// `Σₖ ‖Oₖ‖`, an upper bound on `‖H(t)‖` at every t.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.op.norm_bound()).sum()
    }

    /// Largest `|ωₖ|`.
    pub fn max_rate(&self) -> f64 {
        self.terms.iter().map(|t| t.rate.abs()).fold(0.0, f64::max)
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

struct Locals {
    a: Array2<C64>,
    b: Array2<C64>,
    na: Array2<C64>,
    nb: Array2<C64>,
    q: usize,
}

fn two_mode_qubit(s: &HilbertSpace) -> Result<Locals> {
    if s.num_modes() != 2 {
        return Err(Error::InvalidParameter("this Hamiltonian needs two bosonic modes".into()));
    }
    let q = s.qubit_index().ok_or(Error::NoQubit)?;
    let (da, db) = (s.mode_dims()[0], s.mode_dims()[1]);
    Ok(Locals { a: lowering_matrix(da), b: lowering_matrix(db), na: number_matrix(da), nb: number_matrix(db), q })
}

fn adj(m: &Array2<C64>) -> Array2<C64> {
    crate::linalg::dagger(m)
}

fn op(s: &HilbertSpace, factors: &[(usize, &Array2<C64>)]) -> Result<Operator> {
    Operator::from_local_factors(s, factors)
}

/// Lab-frame Hamiltonian in the charge basis σ̄.
pub fn build_full_lab(mp: &ModelParams, s: &HilbertSpace) -> Result<PhaseSeries> {
    let l = two_mode_qubit(s)?;
    let sz = qubit_matrix(QubitOp::SigmaZ);
    let sx = qubit_matrix(QubitOp::SigmaX);
    let xa = &l.a + &adj(&l.a);
    let xb = &l.b + &adj(&l.b);
    let mut stat = &op(s, &[(0, &l.na)])? * mp.omega;
    stat = &stat + &(&op(s, &[(1, &l.nb)])? * mp.omega);
    stat = &stat + &(&op(s, &[(l.q, &sz)])? * (0.5 * mp.omega0));
    stat = &stat + &(&op(s, &[(l.q, &sx)])? * (0.5 * mp.delta_bar));
    stat = &stat + &(&op(s, &[(0, &xa), (l.q, &sz)])? * mp.lambda1);
    stat = &stat + &(&op(s, &[(1, &xb), (l.q, &sz)])? * mp.lambda2);
    let mut h = PhaseSeries::constant(stat);
    h.push(mp.omega_e, &op(s, &[(0, &l.a)])? * mp.g)?;
    h.push(-mp.omega_e, &op(s, &[(0, &adj(&l.a))])? * mp.g)?;
    Ok(h)
}

/// Lab-frame Hamiltonian in the rotated qubit basis, where the bare qubit
/// term is `(Ω̄/2)σ_z` and the couplings read `λᵢ(·+·†)(cos θ σ_z − sin θ σ_x)`.
/// It equals `U H_lab U†` with `U = exp(iθσ_y/2)`.
pub fn build_rotated_lab(mp: &ModelParams, s: &HilbertSpace) -> Result<PhaseSeries> {
    let l = two_mode_qubit(s)?;
    let rotated = qubit_matrix(QubitOp::SigmaZ).mapv(|z| z * mp.cos_theta())
        - qubit_matrix(QubitOp::SigmaX).mapv(|z| z * mp.sin_theta());
    let xa = &l.a + &adj(&l.a);
    let xb = &l.b + &adj(&l.b);
    let mut stat = &op(s, &[(0, &l.na)])? * mp.omega;
    stat = &stat + &(&op(s, &[(1, &l.nb)])? * mp.omega);
    stat = &stat + &(&op(s, &[(l.q, &qubit_matrix(QubitOp::SigmaZ))])? * (0.5 * mp.omega_bar));
    stat = &stat + &(&op(s, &[(0, &xa), (l.q, &rotated)])? * mp.lambda1);
    stat = &stat + &(&op(s, &[(1, &xb), (l.q, &rotated)])? * mp.lambda2);
    let mut h = PhaseSeries::constant(stat);
    h.push(mp.omega_e, &op(s, &[(0, &l.a)])? * mp.g)?;
    h.push(-mp.omega_e, &op(s, &[(0, &adj(&l.a))])? * mp.g)?;
    Ok(h)
}

/// Rotating-wave Hamiltonian in the interaction picture with respect to
/// `δ(a†a + b†b)`:
/// `g(a e^{−iδt} + h.c.) − Σᵢ λᵢ sin θ (cᵢ σ₊ e^{−iδt} + h.c.)`, `c₁ = a`, `c₂ = b`.
pub fn build_rwa(mp: &ModelParams, s: &HilbertSpace) -> Result<PhaseSeries> {
    mp.require_resonance()?;
    let l = two_mode_qubit(s)?;
    let st = mp.sin_theta();
    let sp = qubit_matrix(QubitOp::Raise);
    let lowering = &(&(&op(s, &[(0, &l.a)])? * mp.g) - &(&op(s, &[(0, &l.a), (l.q, &sp)])? * (mp.lambda1 * st)))
        - &(&op(s, &[(1, &l.b), (l.q, &sp)])? * (mp.lambda2 * st));
    let mut h = PhaseSeries::new(s);
    let raising = lowering.dagger();
    h.push(-mp.delta, lowering)?;
    h.push(mp.delta, raising)?;
    Ok(h)
}

fn jc_couplings(mp: &ModelParams, s: &HilbertSpace, l: &Locals) -> Result<Operator> {
    let st = mp.sin_theta();
    let sp = qubit_matrix(QubitOp::Raise);
    let down = &(&op(s, &[(0, &l.a), (l.q, &sp)])? * (mp.lambda1 * st)) + &(&op(s, &[(1, &l.b), (l.q, &sp)])? * (mp.lambda2 * st));
    Ok(&(&down + &down.dagger()) * -1.0)
}

/// Static rotating-frame Hamiltonian after the rotating-wave approximation,
/// `H' = δ(a†a + b†b) + g(a + a†) − Σᵢ λᵢ sin θ (cᵢσ₊ + h.c.)`.
///
/// [`build_rwa`] is its interaction picture: `H(t) = e^{iH₀t}(H' − H₀)e^{−iH₀t}`
/// with `H₀ = δ(a†a + b†b)`.
pub fn build_rwa_rotating(mp: &ModelParams, s: &HilbertSpace) -> Result<Operator> {
    mp.require_resonance()?;
    let l = two_mode_qubit(s)?;
    let xa = &l.a + &adj(&l.a);
    let h0 = &(&op(s, &[(0, &l.na)])? + &op(s, &[(1, &l.nb)])?) * mp.delta;
    Ok(&(&h0 + &(&op(s, &[(0, &xa)])? * mp.g)) + &jc_couplings(mp, s, &l)?)
}

/// Static steady-state drive response `β = −g/δ` of mode a in the rotating frame.
pub fn drive_displacement(mp: &ModelParams) -> Result<f64> {
    if mp.delta == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    Ok(-mp.g / mp.delta)
}

/// [`build_rwa_rotating`] in the frame displaced by the drive response,
/// `a → a + β` with `β` from [`drive_displacement`], constants dropped:
/// `K = δ(a†a + b†b) − Σᵢ λᵢ sin θ (cᵢσ₊ + h.c.) + Δσ_x`.
///
/// The drive term turns exactly into the `Δσ_x` term of the dispersive
/// Hamiltonian; `H' = D(β)† K D(β) − g²/δ` on the untruncated space.
pub fn build_rwa_drive_frame(mp: &ModelParams, s: &HilbertSpace) -> Result<Operator> {
    mp.require_resonance()?;
    let dp = DispersiveParams::from_model(mp)?;
    let l = two_mode_qubit(s)?;
    let h0 = &(&op(s, &[(0, &l.na)])? + &op(s, &[(1, &l.nb)])?) * mp.delta;
    let sx = &op(s, &[(l.q, &qubit_matrix(QubitOp::SigmaX))])? * dp.drive_coupling;
    Ok(&(&h0 + &jc_couplings(mp, s, &l)?) + &sx)
}

/// Dispersive Hamiltonian `Ω a†aσ_z + χ b†bσ_z + Δσ_x + r(a†b + ab†)σ_z`.
pub fn build_dispersive(mp: &ModelParams, s: &HilbertSpace) -> Result<(Operator, DispersiveParams)> {
    let dp = DispersiveParams::from_model(mp)?;
    let l = two_mode_qubit(s)?;
    let sz = qubit_matrix(QubitOp::SigmaZ);
    let sx = qubit_matrix(QubitOp::SigmaX);
    let ad = adj(&l.a);
    let bd = adj(&l.b);
    let mut h = &op(s, &[(0, &l.na), (l.q, &sz)])? * dp.omega;
    h = &h + &(&op(s, &[(1, &l.nb), (l.q, &sz)])? * dp.chi);
    h = &h + &(&op(s, &[(l.q, &sx)])? * dp.drive_coupling);
    let hop = &op(s, &[(0, &ad), (1, &l.b), (l.q, &sz)])? + &op(s, &[(0, &l.a), (1, &bd), (l.q, &sz)])?;
    h = &h + &(&hop * dp.exchange);
    Ok((h, dp))
}

/// Qubit frequency shift `−(λ₁² + λ₂²) sin²θ / (2δ)` (coefficient of σ_z)
/// produced alongside Ω and χ when the couplings are eliminated to second
/// order. The dispersive Hamiltonian above leaves it out; it is exposed for
/// residual diagnostics.
pub fn dispersive_qubit_shift(mp: &ModelParams) -> Result<f64> {
    if mp.delta == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    let s2 = mp.sin_theta().powi(2);
    Ok(-(mp.lambda1.powi(2) + mp.lambda2.powi(2)) * s2 / (2.0 * mp.delta))
}

fn check_branch(dp: &DispersiveParams, branch: Branch) -> Result<()> {
    if !DispersiveParams::close(dp.omega, dp.chi) {
        return Err(Error::UnequalShifts { omega: dp.omega, chi: dp.chi });
    }
    if dp.omega != 0.0 && dp.branch() != Some(branch) {
        return Err(Error::BranchMismatch { r: dp.exchange });
    }
    Ok(())
}

/// Normal-mode Hamiltonian `ζ aₖ†aₖ σ_z + Δσ_x`, where subsystem
/// `branch.mode_index()` holds the normal mode `aₖ`.
pub fn build_normal_mode(dp: &DispersiveParams, s: &HilbertSpace, branch: Branch) -> Result<Operator> {
    check_branch(dp, branch)?;
    let q = s.qubit_index().ok_or(Error::NoQubit)?;
    let mode = branch.mode_index();
    let n = number_matrix(s.mode_dim(mode)?);
    let h = &op(s, &[(mode, &n), (q, &qubit_matrix(QubitOp::SigmaZ))])? * dp.zeta;
    Ok(&h + &(&op(s, &[(q, &qubit_matrix(QubitOp::SigmaX))])? * dp.drive_coupling))
}

/// `μ (a†a)² σ_x` on subsystem `mode`.
pub fn kerr_hamiltonian(s: &HilbertSpace, mode: usize, mu: f64) -> Result<Operator> {
    let q = s.qubit_index().ok_or(Error::NoQubit)?;
    let d = s.mode_dim(mode)?;
    let n2 = Array2::from_diag(&ndarray::Array1::from_shape_fn(d, |n| real((n * n) as f64)));
    Ok(&op(s, &[(mode, &n2), (q, &qubit_matrix(QubitOp::SigmaX))])? * mu)
}

/// Effective Kerr Hamiltonian `μ (a₁†a₁)² σ_x`, `μ = ζ²/(2Δ)`, on subsystem 0.
pub fn build_kerr_effective(dp: &DispersiveParams, s: &HilbertSpace) -> Result<Operator> {
    build_kerr_effective_branch(dp, s, Branch::Plus)
}

/// [`build_kerr_effective`] on the normal mode selected by `branch`.
pub fn build_kerr_effective_branch(dp: &DispersiveParams, s: &HilbertSpace, branch: Branch) -> Result<Operator> {
    if dp.drive_coupling.is_nan() || dp.drive_coupling <= 0.0 {
        return Err(Error::NonPositiveDelta(dp.drive_coupling));
    }
    let mu = dp.zeta * dp.zeta / (2.0 * dp.drive_coupling);
    kerr_hamiltonian(s, branch.mode_index(), mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{
        annihilation, coherent_amplitudes, fock_amplitudes, make_space, number, product_state, qubit_amplitudes,
        qubit_operator, BeamSplitter, QubitBasis,
    };
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn inputs(lambda1: f64, lambda2: f64, delta: f64, g: f64, sin_theta: f64) -> ModelInputs {
        let omega_bar = 37.0;
        let theta = sin_theta.asin();
        ModelInputs {
            omega: omega_bar + delta,
            omega0: omega_bar * theta.cos(),
            delta_bar: omega_bar * theta.sin(),
            lambda1,
            lambda2,
            g,
            omega_e: None,
        }
    }

    fn chip() -> PhysicalParams {
        PhysicalParams {
            charging_energy: 1.0e-24,
            josephson_energy: 2.0e-25,
            gate_charge: 0.3,
            flux_ratio: 0.9,
            gate_voltage: 0.5,
            gate_capacitances: [1.0e-17, 1.0e-17],
            total_capacitance: 1.0e-15,
            gate_distances: [1.0e-7, 1.0e-7],
            mass: 1.0e-17,
            omega: 2.0 * PI * 1.0e9,
            drive_amplitude: 1.0e8,
            drive_frequency: None,
        }
    }

    #[test]
    fn charge_degeneracy_point() {
        let p = PhysicalParams { gate_charge: 0.5, ..chip() };
        let mp = derive_qubit_params(&p).unwrap();
        assert_eq!(mp.omega0, 0.0);
        assert_abs_diff_eq!(mp.theta, PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mp.sin_theta(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn half_flux_quantum_kills_tunnelling() {
        let p = PhysicalParams { flux_ratio: 0.5, ..chip() };
        let mp = derive_qubit_params(&p).unwrap();
        assert!(mp.delta_bar.abs() < 1e-16 * mp.omega0.abs());
        assert!(mp.sin_theta().abs() < 1e-15);
        let degenerate = PhysicalParams { flux_ratio: 0.5, gate_charge: 0.5, ..chip() };
        assert!(matches!(derive_qubit_params(&degenerate), Err(Error::DegenerateQubit)));
    }

    #[test]
    fn coupling_scales_inversely_with_distance() {
        let base = derive_qubit_params(&chip()).unwrap();
        let p = PhysicalParams { gate_distances: [0.5e-7, 1.0e-7], ..chip() };
        let mp = derive_qubit_params(&p).unwrap();
        assert_abs_diff_eq!(mp.lambda1 / base.lambda1, 2.0, epsilon = 1e-14);
        assert_eq!(mp.lambda2, base.lambda2);
        assert_eq!(mp.omega0, base.omega0);
        assert_eq!(mp.delta_bar, base.delta_bar);
    }

    #[test]
    fn physical_params_reject_nonpositive() {
        let p = PhysicalParams { mass: 0.0, ..chip() };
        assert!(matches!(derive_qubit_params(&p), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn mixing_angle_identities() {
        let mp = derive_qubit_params(&chip()).unwrap();
        assert_abs_diff_eq!(mp.cos_theta().powi(2) + mp.sin_theta().powi(2), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mp.theta.cos(), mp.cos_theta(), epsilon = 1e-12);
        assert!(mp.is_resonant());
    }

    #[test]
    fn feasible_defaults_meet_every_regime() {
        let mp = ModelParams::new(ModelInputs::feasible_defaults()).unwrap().in_units_of(2.0 * PI * 1.0e9).unwrap();
        assert_abs_diff_eq!(mp.omega, 1.0, epsilon = 1e-15);
        assert!(rwa_regime(&mp).is_empty());
        assert!(dispersive_regime(&mp).is_empty());
        let dp = DispersiveParams::from_model(&mp).unwrap();
        assert!(kerr_regime(&dp).is_empty());
    }

    #[test]
    fn decoupled_lab_hamiltonian_is_diagonal() {
        let s = make_space(4, 3, true).unwrap();
        let mp = ModelParams::new(ModelInputs {
            omega: 1.3,
            omega0: 0.7,
            delta_bar: 0.0,
            lambda1: 0.0,
            lambda2: 0.0,
            g: 0.0,
            omega_e: None,
        })
        .unwrap();
        let h = build_full_lab(&mp, &s).unwrap().at(0.4);
        assert!(h.is_diagonal());
        for n in 0..4 {
            for m in 0..3 {
                for (q, sign) in [(0, 1.0), (1, -1.0)] {
                    let i = (n * 3 + m) * 2 + q;
                    let e = 1.3 * (n + m) as f64 + sign * 0.35;
                    assert_abs_diff_eq!(h.matrix()[[i, i]].re, e, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn lab_hamiltonian_hermitian_and_periodic() {
        let s = make_space(4, 4, true).unwrap();
        let mp = ModelParams::new(inputs(0.01, 0.02, 0.5, 0.3, 0.8)).unwrap();
        let h = build_full_lab(&mp, &s).unwrap();
        let period = 2.0 * PI / mp.omega_e;
        for t in [0.0, 0.3, 1.7] {
            let ht = h.at(t / mp.omega_e);
            assert!(ht.hermiticity_error() < 1e-12);
            let later = h.at(t / mp.omega_e + period);
            assert!((ht.matrix() - later.matrix()).iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn rotated_lab_is_qubit_rotation_of_lab() {
        let s = make_space(3, 3, true).unwrap();
        let mp = ModelParams::new(ModelInputs {
            omega: 1.0,
            omega0: 0.6,
            delta_bar: -0.45,
            lambda1: 0.02,
            lambda2: 0.03,
            g: 0.1,
            omega_e: None,
        })
        .unwrap();
        let half = 0.5 * mp.theta;
        let u_local = qubit_matrix(QubitOp::Identity).mapv(|z| z * half.cos())
            + qubit_matrix(QubitOp::SigmaY).mapv(|z| z * C64::new(0.0, half.sin()));
        let u = Operator::from_local_factors(&s, &[(2, &u_local)]).unwrap();
        let lab = build_full_lab(&mp, &s).unwrap();
        let rot = build_rotated_lab(&mp, &s).unwrap();
        for t in [0.0, 0.9, 2.5] {
            let lhs = &(&u * &lab.at(t)) * &u.dagger();
            let diff = lhs.matrix() - rot.at(t).matrix();
            assert!(diff.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn rwa_requires_resonance() {
        let s = make_space(3, 3, true).unwrap();
        let mut i = inputs(0.01, 0.01, 0.5, 0.3, 1.0);
        i.omega_e = Some(40.0);
        let mp = ModelParams::new(i).unwrap();
        assert!(matches!(build_rwa(&mp, &s), Err(Error::OffResonance { .. })));
    }

    #[test]
    fn rwa_without_mixing_is_pure_drive() {
        let s = make_space(4, 3, true).unwrap();
        let mp = ModelParams::new(inputs(0.2, 0.1, 0.5, 0.3, 0.0)).unwrap();
        let h = build_rwa(&mp, &s).unwrap();
        let a = annihilation(&s, 0).unwrap();
        for t in [0.0, 0.77, 3.1] {
            let expected = &a.scaled(C64::from_polar(0.3, -0.5 * t)) + &a.dagger().scaled(C64::from_polar(0.3, 0.5 * t));
            assert!((h.at(t).matrix() - expected.matrix()).iter().all(|z| z.norm() < 1e-14));
            assert!(h.at(t).hermiticity_error() < 1e-14);
        }
    }

    #[test]
    fn rwa_couplings_conserve_excitations_on_resonance() {
        let s = make_space(4, 4, true).unwrap();
        let mp = ModelParams::new(inputs(0.2, 0.15, 0.0, 0.0, 0.9)).unwrap();
        let h = build_rwa(&mp, &s).unwrap();
        let sp = qubit_operator(&s, QubitOp::Raise).unwrap();
        let sm = qubit_operator(&s, QubitOp::Lower).unwrap();
        let n_exc = &(&number(&s, 0).unwrap() + &number(&s, 1).unwrap()) + &(&sp * &sm);
        for t in [0.0, 1.3] {
            assert!(h.at(t).commutator(&n_exc).max_abs() < 1e-13);
        }
    }

    #[test]
    fn rwa_is_interaction_picture_of_rotating_frame() {
        let s = make_space(4, 3, true).unwrap();
        let mp = ModelParams::new(inputs(0.2, -0.1, 0.7, 0.3, 0.6)).unwrap();
        let hp = build_rwa_rotating(&mp, &s).unwrap();
        let h0 = &(&number(&s, 0).unwrap() + &number(&s, 1).unwrap()) * mp.delta;
        let v = &hp - &h0;
        let series = build_rwa(&mp, &s).unwrap();
        for t in [0.0, 0.4, 5.0] {
            let ht = series.at(t);
            let d = s.total_dim();
            for i in 0..d {
                for j in 0..d {
                    let phase = C64::from_polar(1.0, (h0.matrix()[[i, i]].re - h0.matrix()[[j, j]].re) * t);
                    assert!((v.matrix()[[i, j]] * phase - ht.matrix()[[i, j]]).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn dispersive_constants_example() {
        let mp = ModelParams::new(inputs(1.0, 1.0, 100.0, 50.0, 1.0)).unwrap();
        let dp = DispersiveParams::from_model(&mp).unwrap();
        assert_abs_diff_eq!(dp.omega, -0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(dp.chi, -0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(dp.drive_coupling, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(dp.exchange, -0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(dp.zeta, -0.02, epsilon = 1e-15);
        assert_abs_diff_eq!(dp.mu.unwrap(), 4e-4, epsilon = 1e-16);
        assert_eq!(dp.branch(), Some(Branch::Plus));
    }

    #[test]
    fn dispersive_limits_and_errors() {
        let mp = ModelParams::new(inputs(0.3, 0.3, 5.0, 0.0, 1.0)).unwrap();
        let s = make_space(3, 3, true).unwrap();
        let (h, dp) = build_dispersive(&mp, &s).unwrap();
        assert_eq!(dp.drive_coupling, 0.0);
        assert_eq!(dp.mu, None);
        let sx = qubit_operator(&s, QubitOp::SigmaX).unwrap();
        // no σ_x term: H commutes with σ_z
        assert!(h.commutator(&qubit_operator(&s, QubitOp::SigmaZ).unwrap()).max_abs() < 1e-15);
        assert!(h.commutator(&sx).max_abs() > 0.0);
        let mp0 = ModelParams::new(inputs(0.3, 0.3, 0.0, 1.0, 1.0)).unwrap();
        assert!(matches!(build_dispersive(&mp0, &s), Err(Error::ZeroDetuning)));
        let minus = ModelParams::new(inputs(0.3, -0.3, 5.0, 1.0, 1.0)).unwrap();
        assert_eq!(DispersiveParams::from_model(&minus).unwrap().branch(), Some(Branch::Minus));
    }

    #[test]
    fn dispersive_matches_normal_mode_form() {
        let n = 6;
        let s = make_space(n, n, true).unwrap();
        let bs = BeamSplitter::new(&s).unwrap().to_operator();
        for (l2, branch) in [(0.4, Branch::Plus), (-0.4, Branch::Minus)] {
            let mp = ModelParams::new(inputs(0.4, l2, 3.0, 2.0, 0.9)).unwrap();
            let (h, dp) = build_dispersive(&mp, &s).unwrap();
            assert_abs_diff_eq!(dp.zeta, 2.0 * dp.omega, epsilon = 1e-15);
            let mapped = &(&bs * &h) * &bs.dagger();
            let nm = build_normal_mode(&dp, &s, branch).unwrap();
            let d = s.total_dim();
            for i in 0..d {
                for j in 0..d {
                    let (na, nb) = ((j / 2) / n, (j / 2) % n);
                    if na + nb < n {
                        assert!((mapped.matrix()[[i, j]] - nm.matrix()[[i, j]]).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn normal_mode_examples() {
        let s = make_space(20, 4, true).unwrap();
        let free = DispersiveParams::normal_mode(0.0, 0.7, Branch::Plus);
        let h = build_normal_mode(&free, &s, Branch::Plus).unwrap();
        let sx = qubit_operator(&s, QubitOp::SigmaX).unwrap();
        assert_eq!(h, &sx * 0.7);

        let dp = DispersiveParams::normal_mode(-0.02, 0.5, Branch::Plus);
        let h = build_normal_mode(&dp, &s, Branch::Plus).unwrap();
        let alpha = 2f64.sqrt() * 0.8;
        let st = product_state(
            &s,
            &[coherent_amplitudes(C64::new(alpha, 0.0), 20).unwrap(), fock_amplitudes(0, 4).unwrap(), qubit_amplitudes(QubitBasis::PlusX)],
        )
        .unwrap();
        assert_abs_diff_eq!(h.expectation(&st).unwrap().re, 0.5, epsilon = 1e-12);
        assert!(h.commutator(&number(&s, 1).unwrap()).max_abs() < 1e-15);

        let unequal = DispersiveParams { chi: -0.03, ..dp };
        assert!(matches!(build_normal_mode(&unequal, &s, Branch::Plus), Err(Error::UnequalShifts { .. })));
        assert!(matches!(build_normal_mode(&dp, &s, Branch::Minus), Err(Error::BranchMismatch { .. })));
    }

    #[test]
    fn kerr_effective_spectrum() {
        let s = make_space(8, 2, true).unwrap();
        let dp = DispersiveParams::normal_mode(-0.02, 0.5, Branch::Plus);
        let h = build_kerr_effective(&dp, &s).unwrap();
        let mu = 4e-4;
        for n in 0..8 {
            for (basis, sign) in [(QubitBasis::PlusX, 1.0), (QubitBasis::MinusX, -1.0)] {
                let v = product_state(&s, &[fock_amplitudes(n, 8).unwrap(), fock_amplitudes(0, 2).unwrap(), qubit_amplitudes(basis)]).unwrap();
                let hv = h.apply(v.vector().unwrap());
                let expected = v.vector().unwrap().mapv(|z| z * sign * mu * (n * n) as f64);
                assert!((hv - expected).iter().all(|z| z.norm() < 1e-15));
            }
        }
        assert!(h.commutator(&number(&s, 0).unwrap()).max_abs() < 1e-15);
        let neg = DispersiveParams::normal_mode(-0.02, -0.5, Branch::Plus);
        assert!(matches!(build_kerr_effective(&neg, &s), Err(Error::NonPositiveDelta(_))));
    }

    fn model_strategy() -> impl Strategy<Value = ModelInputs> {
        (0.1f64..5.0, -2.0f64..2.0, -2.0f64..2.0, -0.3f64..0.3, -0.3f64..0.3, 0.0f64..2.0, -1.0f64..1.0)
            .prop_filter("nonzero qubit splitting", |(_, w0, db, ..)| w0.hypot(*db) > 1e-3)
            .prop_map(|(omega, omega0, delta_bar, lambda1, lambda2, g, detune)| ModelInputs {
                omega: omega0.hypot(delta_bar) + detune + if detune.abs() < 1e-3 { 0.01 } else { 0.0 } + 0.0 * omega,
                omega0,
                delta_bar,
                lambda1,
                lambda2,
                g,
                omega_e: None,
            })
    }

    proptest! {
        #[test]
        fn builders_are_hermitian(inp in model_strategy(), t in -10.0f64..10.0) {
            let s = make_space(3, 3, true).unwrap();
            let mp = ModelParams::new(inp).unwrap();
            prop_assert!(build_full_lab(&mp, &s).unwrap().at(t).hermiticity_error() < 1e-12);
            prop_assert!(build_rotated_lab(&mp, &s).unwrap().at(t).hermiticity_error() < 1e-12);
            prop_assert!(build_rwa(&mp, &s).unwrap().at(t).hermiticity_error() < 1e-12);
            prop_assert!(build_rwa_rotating(&mp, &s).unwrap().hermiticity_error() < 1e-12);
            prop_assert!(build_rwa_drive_frame(&mp, &s).unwrap().hermiticity_error() < 1e-12);
            let (h, _) = build_dispersive(&mp, &s).unwrap();
            prop_assert!(h.hermiticity_error() < 1e-12);
        }
    }
}
