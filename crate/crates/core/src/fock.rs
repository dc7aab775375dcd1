// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! Truncated Fock spaces, embedded operators and canonical states.
//!
//! A [`HilbertSpace`] holds one or two truncated bosonic modes and an optional
//! qubit, always ordered `(modes..., qubit)`. Operators acting on a single
//! subsystem are embedded with identity factors on everything else. The
//! 50/50 normal-mode transformation `a₁ = (a + b)/√2`, `a₂ = (a − b)/√2` is
//! provided by [`BeamSplitter`].

use std::f64::consts::FRAC_PI_4;
use std::ops::{Add, Mul, Sub};

use ndarray::{Array1, Array2};

use crate::linalg::{self, dagger, kron, kron_vec, max_abs};
use crate::{Error, Result, C64, TOL_NORM, TOL_POS};

/// Maximum coherent-state weight allowed above the Fock cutoff.
pub const COHERENT_LEAK_TOL: f64 = 1e-8;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Composite space of up to two truncated bosonic modes and an optional qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    mode_dims: Vec<usize>,
    has_qubit: bool,
}

impl HilbertSpace {
    pub fn new(mode_dims: Vec<usize>, has_qubit: bool) -> Result<Self> {
        if mode_dims.is_empty() && !has_qubit {
            return Err(Error::EmptySpace);
        }
        if mode_dims.len() > 2 {
            return Err(Error::TooManyModes(mode_dims.len()));
        }
        if let Some(&d) = mode_dims.iter().find(|&&d| d < 2) {
            return Err(Error::DimensionTooSmall(d));
        }
        Ok(Self { mode_dims, has_qubit })
    }

    pub fn single_mode(dim: usize) -> Result<Self> {
        Self::new(vec![dim], false)
    }

    pub fn qubit() -> Self {
        Self { mode_dims: Vec::new(), has_qubit: true }
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    pub fn num_modes(&self) -> usize {
        self.mode_dims.len()
    }

    pub fn has_qubit(&self) -> bool {
        self.has_qubit
    }

    /// Index of the qubit subsystem, if any.
    pub fn qubit_index(&self) -> Option<usize> {
        self.has_qubit.then_some(self.mode_dims.len())
    }

    pub fn num_subsystems(&self) -> usize {
        self.mode_dims.len() + usize::from(self.has_qubit)
    }

    /// Subsystem dimensions in tensor order.
    pub fn dims(&self) -> Vec<usize> {
        let mut d = self.mode_dims.clone();
        if self.has_qubit {
            d.push(2);
        }
        d
    }

    pub fn total_dim(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn mode_dim(&self, mode: usize) -> Result<usize> {
        self.mode_dims.get(mode).copied().ok_or(Error::NotAMode(mode))
    }

    /// Space of the subsystems listed in `keep` (any order, duplicates ignored).
    pub fn subspace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        let n = self.num_subsystems();
        if let Some(&bad) = keep.iter().find(|&&k| k >= n) {
            return Err(Error::BadSubsystem(bad));
        }
        let modes = (0..self.num_modes()).filter(|m| keep.contains(m)).map(|m| self.mode_dims[m]).collect();
        let qubit = self.qubit_index().is_some_and(|q| keep.contains(&q));
        Self::new(modes, qubit)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.num_modes() {
            Ok(())
        } else {
            Err(Error::NotAMode(mode))
        }
    }
}

/// Two-mode space with dimensions `n_a`, `n_b`, optionally with a qubit.
pub fn make_space(n_a: usize, n_b: usize, with_qubit: bool) -> Result<HilbertSpace> {
    HilbertSpace::new(vec![n_a, n_b], with_qubit)
}

/// Default Fock dimension for the largest coherent amplitude in play,
/// `⌈|α|² + 6|α| + 10⌉`.
pub fn auto_truncation(alpha_max: f64) -> usize {
    let a = alpha_max.abs();
    ((a * a + 6.0 * a + 10.0).ceil() as usize).max(2)
}

/// Poisson weight `Σ_{n ≥ dim} e^{−|α|²}|α|^{2n}/n!` lost by truncating a
/// coherent state at `dim` levels.
pub fn coherent_leakage(alpha_abs: f64, dim: usize) -> f64 {
    let x = alpha_abs * alpha_abs;
    if x == 0.0 {
        return 0.0;
    }
    let ln_x = x.ln();
    let mut ln_fact: f64 = (1..=dim).map(|k| (k as f64).ln()).sum();
    let mut tail = 0.0;
    let mut n = dim;
    loop {
        let term = (-x + n as f64 * ln_x - ln_fact).exp();
        tail += term;
        if (n as f64) > x && term < 1e-30 * tail.max(1e-300) {
            break;
        }
        if n > dim + 100_000 {
            break;
        }
        n += 1;
        ln_fact += (n as f64).ln();
    }
    tail.min(1.0)
}

/// Coherent-state amplitudes `e^{−|α|²/2} αⁿ/√n!` on `dim` levels,
/// renormalized after truncation.
pub fn coherent_amplitudes(alpha: C64, dim: usize) -> Result<Array1<C64>> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite amplitude {alpha}")));
    }
    let leaked = coherent_leakage(alpha.norm(), dim);
    if leaked >= COHERENT_LEAK_TOL {
        return Err(Error::TruncationTooSmall { alpha: alpha.norm(), dim, leaked });
    }
    let mut c = Array1::zeros(dim);
    c[0] = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 1..dim {
        c[n] = c[n - 1] * alpha / (n as f64).sqrt();
    }
    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(c.mapv(|z| z / norm))
}

/// Fock state `|n⟩` on `dim` levels.
pub fn fock_amplitudes(n: usize, dim: usize) -> Result<Array1<C64>> {
    if n >= dim {
        return Err(Error::InvalidParameter(format!("Fock level {n} outside dimension {dim}")));
    }
    let mut v = Array1::zeros(dim);
    v[n] = ONE;
    Ok(v)
}

/// Single-qubit basis states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitBasis {
    /// σ_z = +1
    Up,
    /// σ_z = −1
    Down,
    /// σ_x = +1
    PlusX,
    /// σ_x = −1
    MinusX,
}

pub fn qubit_amplitudes(which: QubitBasis) -> Array1<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match which {
        QubitBasis::Up => ndarray::arr1(&[ONE, ZERO]),
        QubitBasis::Down => ndarray::arr1(&[ZERO, ONE]),
        QubitBasis::PlusX => ndarray::arr1(&[C64::new(h, 0.0), C64::new(h, 0.0)]),
        QubitBasis::MinusX => ndarray::arr1(&[C64::new(h, 0.0), C64::new(-h, 0.0)]),
    }
}

/// Pauli and ladder operators on the qubit factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitOp {
    SigmaX,
    SigmaY,
    SigmaZ,
    /// σ₊ = (σ_x + iσ_y)/2 = |↑⟩⟨↓|
    Raise,
    /// σ₋ = (σ_x − iσ_y)/2 = |↓⟩⟨↑|
    Lower,
    Identity,
}

pub fn qubit_matrix(which: QubitOp) -> Array2<C64> {
    let i = C64::new(0.0, 1.0);
    let m = match which {
        QubitOp::SigmaX => [[ZERO, ONE], [ONE, ZERO]],
        QubitOp::SigmaY => [[ZERO, -i], [i, ZERO]],
        QubitOp::SigmaZ => [[ONE, ZERO], [ZERO, -ONE]],
        QubitOp::Raise => [[ZERO, ONE], [ZERO, ZERO]],
        QubitOp::Lower => [[ZERO, ZERO], [ONE, ZERO]],
        QubitOp::Identity => [[ONE, ZERO], [ZERO, ONE]],
    };
    ndarray::arr2(&m)
}

/// Truncated single-mode lowering operator, `a|n⟩ = √n|n−1⟩`.
pub fn lowering_matrix(dim: usize) -> Array2<C64> {
    let mut m = Array2::zeros((dim, dim));
    for n in 1..dim {
        m[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    m
}

pub fn number_matrix(dim: usize) -> Array2<C64> {
    Array2::from_diag(&Array1::from_shape_fn(dim, |n| C64::new(n as f64, 0.0)))
}

/// Dense operator on a [`HilbertSpace`].
///
/// Arithmetic through `+`, `-` and `*` panics when the operand spaces
/// differ, in the same way `ndarray` panics on shape mismatch.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    matrix: Array2<C64>,
}

impl Operator {
    pub fn from_matrix(space: &HilbertSpace, matrix: Array2<C64>) -> Result<Self> {
        let d = space.total_dim();
        if matrix.dim() != (d, d) {
            return Err(Error::Shape {
                expected: format!("{d}x{d}"),
                actual: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        Ok(Self { space: space.clone(), matrix })
    }

    pub fn zeros(space: &HilbertSpace) -> Self {
        let d = space.total_dim();
        Self { space: space.clone(), matrix: Array2::zeros((d, d)) }
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let d = space.total_dim();
        Self { space: space.clone(), matrix: Array2::eye(d).mapv(|x: f64| C64::new(x, 0.0)) }
    }

    /// Tensor product of per-subsystem factors; subsystems not listed get
    /// the identity.
    pub fn from_local_factors(space: &HilbertSpace, factors: &[(usize, &Array2<C64>)]) -> Result<Self> {
        let dims = space.dims();
        for &(sub, m) in factors {
            let d = *dims.get(sub).ok_or(Error::BadSubsystem(sub))?;
            if m.dim() != (d, d) {
                return Err(Error::Shape {
                    expected: format!("{d}x{d}"),
                    actual: format!("{}x{}", m.nrows(), m.ncols()),
                });
            }
        }
        let mut acc = Array2::from_elem((1, 1), ONE);
        for (sub, &d) in dims.iter().enumerate() {
            let local: Array2<C64> = match factors.iter().rev().find(|(s, _)| *s == sub) {
                Some((_, m)) => (*m).clone(),
                None => Array2::eye(d).mapv(|x: f64| C64::new(x, 0.0)),
            };
            acc = kron(&acc, &local);
        }
        Ok(Self { space: space.clone(), matrix: acc })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self { space: self.space.clone(), matrix: dagger(&self.matrix) }
    }

    /// `‖H − H†‖_max`
    pub fn hermiticity_error(&self) -> f64 {
        linalg::hermiticity_error(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Upper bound on the spectral norm (max absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        linalg::inf_norm(&self.matrix)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn is_diagonal(&self) -> bool {
        self.matrix.indexed_iter().all(|((i, j), z)| i == j || *z == ZERO)
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { space: self.space.clone(), matrix: self.matrix.mapv(|z| z * s) }
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        self.matrix.dot(v)
    }

    /// `⟨O⟩` in the given state.
    pub fn expectation(&self, state: &QuantumState) -> Result<C64> {
        if state.space() != &self.space {
            return Err(Error::SpaceMismatch("operator and state".into()));
        }
        Ok(match state.data() {
            StateData::Pure(v) => v.iter().zip(self.matrix.dot(v).iter()).map(|(a, b)| a.conj() * b).sum(),
            StateData::Mixed(rho) => linalg::trace(&self.matrix.dot(rho)),
        })
    }

    fn assert_same_space(&self, other: &Operator) {
        assert_eq!(self.space, other.space, "operator space mismatch");
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs);
        Operator { space: self.space.clone(), matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs);
        Operator { space: self.space.clone(), matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs);
        Operator { space: self.space.clone(), matrix: self.matrix.dot(&rhs.matrix) }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scaled(C64::new(rhs, 0.0))
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scaled(rhs)
    }
}

/// Embed a single-subsystem matrix into the full space.
pub fn local_operator(space: &HilbertSpace, subsystem: usize, local: &Array2<C64>) -> Result<Operator> {
    Operator::from_local_factors(space, &[(subsystem, local)])
}

/// Lowering operator of bosonic mode `mode`.
pub fn annihilation(space: &HilbertSpace, mode: usize) -> Result<Operator> {
    let d = space.mode_dim(mode)?;
    local_operator(space, mode, &lowering_matrix(d))
}

pub fn creation(space: &HilbertSpace, mode: usize) -> Result<Operator> {
    Ok(annihilation(space, mode)?.dagger())
}

/// `a†a` of mode `mode`.
pub fn number(space: &HilbertSpace, mode: usize) -> Result<Operator> {
    let d = space.mode_dim(mode)?;
    local_operator(space, mode, &number_matrix(d))
}

pub fn qubit_operator(space: &HilbertSpace, which: QubitOp) -> Result<Operator> {
    let q = space.qubit_index().ok_or(Error::NoQubit)?;
    local_operator(space, q, &qubit_matrix(which))
}

/// Displacement `D(β) = exp(βc† − β*c)` on bosonic subsystem `mode`,
/// exponentiated exactly on the truncated space.
pub fn displacement(space: &HilbertSpace, mode: usize, beta: C64) -> Result<Operator> {
    let d = space.mode_dim(mode)?;
    let a = lowering_matrix(d);
    // D = exp(−iG) with G = i(βa† − β*a)
    let gen = (dagger(&a).mapv(|z| z * beta) - a.mapv(|z| z * beta.conj())).mapv(|z| z * C64::i());
    let local = linalg::BlockEigen::new(&gen)?.matrix_fn(|e| C64::from_polar(1.0, -e));
    local_operator(space, mode, &local)
}

/// Normal modes `a₁ = (a + b)/√2` and `a₂ = (a − b)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalMode {
    One,
    Two,
}

/// Normal-mode lowering operator expressed in the physical-mode basis.
pub fn normal_mode_annihilation(space: &HilbertSpace, which: NormalMode) -> Result<Operator> {
    if space.num_modes() != 2 {
        return Err(Error::InvalidParameter("normal modes need two bosonic modes".into()));
    }
    let a = annihilation(space, 0)?;
    let b = annihilation(space, 1)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(match which {
        NormalMode::One => &(&a + &b) * s,
        NormalMode::Two => &(&a - &b) * s,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateData {
    Pure(Array1<C64>),
    Mixed(Array2<C64>),
}

/// Pure state vector or density matrix over a [`HilbertSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    space: HilbertSpace,
    data: StateData,
}

impl QuantumState {
    /// Pure state; the vector must be normalized within [`TOL_NORM`].
    pub fn pure(space: &HilbertSpace, vector: Array1<C64>) -> Result<Self> {
        let s = Self::pure_unchecked(space, vector)?;
        let dev = (s.norm_sqr() - 1.0).abs();
        if dev >= TOL_NORM {
            return Err(Error::NotNormalized(dev));
        }
        Ok(s)
    }

    /// Pure state from an arbitrary nonzero vector, normalized here.
    pub fn pure_normalized(space: &HilbertSpace, vector: Array1<C64>) -> Result<Self> {
        let mut s = Self::pure_unchecked(space, vector)?;
        let n = s.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(1.0));
        }
        if let StateData::Pure(v) = &mut s.data {
            v.mapv_inplace(|z| z / n);
        }
        Ok(s)
    }

    /// Pure state without the normalization check (shape is still checked).
    pub fn pure_unchecked(space: &HilbertSpace, vector: Array1<C64>) -> Result<Self> {
        let d = space.total_dim();
        if vector.len() != d {
            return Err(Error::Shape { expected: d.to_string(), actual: vector.len().to_string() });
        }
        Ok(Self { space: space.clone(), data: StateData::Pure(vector) })
    }

    /// Density matrix, validated for unit trace, hermiticity and positivity.
    pub fn mixed(space: &HilbertSpace, matrix: Array2<C64>) -> Result<Self> {
        let s = Self::mixed_unchecked(space, matrix)?;
        s.validate(TOL_NORM, TOL_POS)?;
        Ok(s)
    }

    /// Density matrix without physicality checks (shape is still checked).
    pub fn mixed_unchecked(space: &HilbertSpace, matrix: Array2<C64>) -> Result<Self> {
        let d = space.total_dim();
        if matrix.dim() != (d, d) {
            return Err(Error::Shape {
                expected: format!("{d}x{d}"),
                actual: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        Ok(Self { space: space.clone(), data: StateData::Mixed(matrix) })
    }

    /// Check normalization (pure) or trace, hermiticity and positivity (mixed).
    pub fn validate(&self, tol_norm: f64, tol_pos: f64) -> Result<()> {
        match &self.data {
            StateData::Pure(_) => {
                let dev = (self.norm_sqr() - 1.0).abs();
                if dev >= tol_norm {
                    return Err(Error::NotNormalized(dev));
                }
            }
            StateData::Mixed(rho) => {
                let tr = linalg::trace(rho);
                if (tr - ONE).norm() >= tol_norm {
                    return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
                }
                let herm = linalg::hermiticity_error(rho);
                if herm >= tol_norm {
                    return Err(Error::InvalidDensityMatrix(format!("‖ρ − ρ†‖ = {herm:.3e}")));
                }
                let min = linalg::eigvalsh(rho)?.iter().copied().fold(f64::INFINITY, f64::min);
                if min < -tol_pos {
                    return Err(Error::InvalidDensityMatrix(format!("eigenvalue {min:.3e}")));
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn vector(&self) -> Option<&Array1<C64>> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            StateData::Mixed(_) => None,
        }
    }

    /// `‖ψ‖²` for pure states, `Re Tr ρ` for mixed ones.
    pub fn norm_sqr(&self) -> f64 {
        match &self.data {
            StateData::Pure(v) => v.iter().map(|z| z.norm_sqr()).sum(),
            StateData::Mixed(rho) => linalg::trace(rho).re,
        }
    }

    /// Density matrix (the projector `|ψ⟩⟨ψ|` for pure states).
    pub fn density_matrix(&self) -> Array2<C64> {
        match &self.data {
            StateData::Pure(v) => {
                let d = v.len();
                Array2::from_shape_fn((d, d), |(i, j)| v[i] * v[j].conj())
            }
            StateData::Mixed(rho) => rho.clone(),
        }
    }

    pub fn to_mixed(&self) -> Self {
        Self { space: self.space.clone(), data: StateData::Mixed(self.density_matrix()) }
    }

    /// `self ⊗ other`. The left factor may not carry a qubit, since the qubit
    /// is always the last subsystem.
    pub fn tensor(&self, other: &QuantumState) -> Result<Self> {
        if self.space.has_qubit() {
            return Err(Error::SpaceMismatch("left tensor factor carries the qubit".into()));
        }
        let mut modes = self.space.mode_dims.clone();
        modes.extend_from_slice(&other.space.mode_dims);
        let space = HilbertSpace::new(modes, other.space.has_qubit)?;
        let data = match (&self.data, &other.data) {
            (StateData::Pure(a), StateData::Pure(b)) => StateData::Pure(kron_vec(a, b)),
            _ => StateData::Mixed(kron(&self.density_matrix(), &other.density_matrix())),
        };
        Ok(Self { space, data })
    }
}

/// Product state from one amplitude vector per subsystem (tensor order).
pub fn product_state(space: &HilbertSpace, factors: &[Array1<C64>]) -> Result<QuantumState> {
    let dims = space.dims();
    if factors.len() != dims.len() {
        return Err(Error::Shape {
            expected: format!("{} factors", dims.len()),
            actual: factors.len().to_string(),
        });
    }
    let mut acc = Array1::from_elem(1, ONE);
    for (f, &d) in factors.iter().zip(&dims) {
        if f.len() != d {
            return Err(Error::Shape { expected: d.to_string(), actual: f.len().to_string() });
        }
        acc = kron_vec(&acc, f);
    }
    QuantumState::pure(space, acc)
}

fn default_factors(space: &HilbertSpace) -> Vec<Array1<C64>> {
    let mut f: Vec<Array1<C64>> = space.mode_dims().iter().map(|&d| fock_amplitudes(0, d).unwrap()).collect();
    if space.has_qubit() {
        f.push(qubit_amplitudes(QubitBasis::Down));
    }
    f
}

/// All modes in vacuum, qubit in `|↓⟩`.
pub fn vacuum(space: &HilbertSpace) -> QuantumState {
    product_state(space, &default_factors(space)).expect("vacuum factors match the space")
}

/// Coherent state `|α⟩` on one mode; other modes in vacuum, the qubit in `|↓⟩`.
pub fn coherent_state(space: &HilbertSpace, mode: usize, alpha: C64) -> Result<QuantumState> {
    space.check_mode(mode)?;
    let mut f = default_factors(space);
    f[mode] = coherent_amplitudes(alpha, space.mode_dims()[mode])?;
    product_state(space, &f)
}

/// Fock state `|n⟩` on one mode; other modes in vacuum, the qubit in `|↓⟩`.
pub fn fock_state(space: &HilbertSpace, mode: usize, n: usize) -> Result<QuantumState> {
    space.check_mode(mode)?;
    let mut f = default_factors(space);
    f[mode] = fock_amplitudes(n, space.mode_dims()[mode])?;
    product_state(space, &f)
}

/// 50/50 mode-mixing unitary taking the physical-mode Fock basis to the
/// normal-mode Fock basis.
///
/// It is built as `P₂ · exp[(π/4)(a†b − ab†)]` with `P₂ = (−1)^{b†b}`, so that
/// `U† a U = (a + b)/√2 = a₁` and `U† b U = (a − b)/√2 = a₂`. The generator
/// conserves `a†a + b†b`, so the exponential is evaluated exactly on each
/// fixed-total-number block. On blocks with total number below the cutoff the
/// map is the exact infinite-dimensional one.
#[derive(Clone, Debug)]
pub struct BeamSplitter {
    space: HilbertSpace,
    mode_dim: usize,
    blocks: Vec<(Vec<usize>, Array2<C64>)>,
}

impl BeamSplitter {
    pub fn new(space: &HilbertSpace) -> Result<Self> {
        if space.num_modes() != 2 {
            return Err(Error::InvalidParameter("the beam splitter needs two bosonic modes".into()));
        }
        let (na, nb) = (space.mode_dims()[0], space.mode_dims()[1]);
        if na != nb {
            return Err(Error::UnequalModes(na, nb));
        }
        let n = na;
        let mut blocks = Vec::with_capacity(2 * n - 1);
        for total in 0..=(2 * n - 2) {
            // local basis: |k, total − k⟩ with both occupations below n
            let ks: Vec<usize> = (0..n).filter(|&k| total >= k && total - k < n).collect();
            let m = ks.len();
            // K = i(a†b − ab†), Hermitian
            let mut gen = Array2::<C64>::zeros((m, m));
            for (col, &k) in ks.iter().enumerate() {
                let l = total - k;
                // a†b |k, l⟩ = √(k+1)√l |k+1, l−1⟩
                if l > 0 {
                    if let Some(row) = ks.iter().position(|&kk| kk == k + 1) {
                        gen[[row, col]] += C64::new(0.0, ((k + 1) as f64).sqrt() * (l as f64).sqrt());
                    }
                }
                // ab† |k, l⟩ = √k √(l+1) |k−1, l+1⟩
                if k > 0 {
                    if let Some(row) = ks.iter().position(|&kk| kk + 1 == k) {
                        gen[[row, col]] -= C64::new(0.0, (k as f64).sqrt() * ((l + 1) as f64).sqrt());
                    }
                }
            }
            // exp(θ(a†b − ab†)) = exp(−iθK)
            let (vals, vecs) = linalg::eigh(&gen)?;
            let mut u = Array2::<C64>::zeros((m, m));
            for r in 0..m {
                for c in 0..m {
                    let mut acc = ZERO;
                    for j in 0..m {
                        acc += vecs[[r, j]] * C64::from_polar(1.0, -FRAC_PI_4 * vals[j]) * vecs[[c, j]].conj();
                    }
                    u[[r, c]] = acc;
                }
            }
            for (r, &k) in ks.iter().enumerate() {
                if (total - k) % 2 == 1 {
                    u.row_mut(r).mapv_inplace(|z| -z);
                }
            }
            let indices = ks.iter().map(|&k| k * n + (total - k)).collect();
            blocks.push((indices, u));
        }
        Ok(Self { space: space.clone(), mode_dim: n, blocks })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    fn inner(&self) -> usize {
        if self.space.has_qubit() {
            2
        } else {
            1
        }
    }

    fn apply_vec(&self, v: &Array1<C64>, adjoint: bool) -> Array1<C64> {
        let q = self.inner();
        let mut out = Array1::zeros(v.len());
        for (idx, u) in &self.blocks {
            for s in 0..q {
                for (r, &ir) in idx.iter().enumerate() {
                    let mut acc = ZERO;
                    for (c, &ic) in idx.iter().enumerate() {
                        let ur = if adjoint { u[[c, r]].conj() } else { u[[r, c]] };
                        acc += ur * v[ic * q + s];
                    }
                    out[ir * q + s] = acc;
                }
            }
        }
        out
    }

    /// Apply `U` (physical → normal-mode labels).
    pub fn map(&self, state: &QuantumState) -> Result<QuantumState> {
        self.transform(state, false)
    }

    /// Apply `U†` (normal-mode → physical labels).
    pub fn unmap(&self, state: &QuantumState) -> Result<QuantumState> {
        self.transform(state, true)
    }

    fn transform(&self, state: &QuantumState, adjoint: bool) -> Result<QuantumState> {
        if state.space() != &self.space {
            return Err(Error::SpaceMismatch("beam splitter and state".into()));
        }
        match state.data() {
            StateData::Pure(v) => QuantumState::pure_unchecked(&self.space, self.apply_vec(v, adjoint)),
            StateData::Mixed(rho) => {
                let d = rho.nrows();
                // U ρ U† = U (U ρ†)† with ρ Hermitian; apply column-wise twice
                let mut tmp = Array2::zeros((d, d));
                for j in 0..d {
                    tmp.column_mut(j).assign(&self.apply_vec(&rho.column(j).to_owned(), adjoint));
                }
                let tmp_h = dagger(&tmp);
                let mut out = Array2::zeros((d, d));
                for j in 0..d {
                    out.column_mut(j).assign(&self.apply_vec(&tmp_h.column(j).to_owned(), adjoint));
                }
                QuantumState::mixed_unchecked(&self.space, dagger(&out))
            }
        }
    }

    /// Dense unitary on the full space.
    pub fn to_operator(&self) -> Operator {
        let d = self.space.total_dim();
        let mut m = Array2::zeros((d, d));
        for j in 0..d {
            let mut e = Array1::zeros(d);
            e[j] = ONE;
            m.column_mut(j).assign(&self.apply_vec(&e, false));
        }
        Operator { space: self.space.clone(), matrix: m }
    }

    pub fn mode_dim(&self) -> usize {
        self.mode_dim
    }
}

/// Re-express a two-mode state in the normal-mode basis; see [`BeamSplitter`].
pub fn beam_splitter_map(space: &HilbertSpace, state: &QuantumState) -> Result<QuantumState> {
    BeamSplitter::new(space)?.map(state)
}
