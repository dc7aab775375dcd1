// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense and sparse matrix helpers shared by the physics modules.
//!
//! Matrices are stored as `ndarray` arrays. Hermitian eigendecompositions are
//! delegated to `faer`; a block-aware variant splits a Hermitian matrix into
//! the connected components of its sparsity graph first, which makes
//! number-conserving Hamiltonians cheap to diagonalize exactly.

use faer::{Mat, Side};
use ndarray::{Array1, Array2};

use crate::{Error, Result, C64};

/// Conjugate transpose.
pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// Largest entry magnitude, `‖M‖_max`.
pub fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `‖M − M†‖_max`.
pub fn hermiticity_error(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut err: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            err = err.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    err
}

pub fn trace(m: &Array2<C64>) -> C64 {
    m.diag().sum()
}

/// Maximum absolute row sum. For a Hermitian matrix this bounds the spectral
/// norm from above.
pub fn inf_norm(m: &Array2<C64>) -> f64 {
    m.rows()
        .into_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Kronecker product of two dense complex matrices.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    ndarray::linalg::kron(a, b)
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &Array1<C64>, b: &Array1<C64>) -> Array1<C64> {
    let mut out = Array1::zeros(a.len() * b.len());
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// Hermitian eigendecomposition `M = V diag(λ) V†`, eigenvalues ascending.
///
/// Only the lower triangle of `m` is read.
pub fn eigh(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Shape {
            expected: "square matrix".into(),
            actual: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    if n == 0 {
        return Ok((Array1::zeros(0), Array2::zeros((0, 0))));
    }
    let fm = Mat::<C64>::from_fn(n, n, |i, j| m[[i, j]]);
    let evd = fm
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let values = Array1::from_shape_fn(n, |j| s[j].re);
    let vectors = Array2::from_shape_fn((n, n), |(i, j)| u[(i, j)]);
    Ok((values, vectors))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(m: &Array2<C64>) -> Result<Array1<f64>> {
    Ok(eigh(m)?.0)
}

/// One diagonal block of a [`BlockEigen`] decomposition.
#[derive(Clone, Debug)]
pub struct EigenBlock {
    pub indices: Vec<usize>,
    pub values: Array1<f64>,
    pub vectors: Array2<C64>,
}

/// Eigendecomposition of a Hermitian matrix organised by the connected
/// components of its nonzero pattern.
#[derive(Clone, Debug)]
pub struct BlockEigen {
    dim: usize,
    blocks: Vec<EigenBlock>,
}

impl BlockEigen {
    pub fn new(m: &Array2<C64>) -> Result<Self> {
        let n = m.nrows();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for i in 0..n {
            for j in 0..i {
                if m[[i, j]] != C64::new(0.0, 0.0) || m[[j, i]] != C64::new(0.0, 0.0) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        let mut blocks = Vec::with_capacity(groups.len());
        for (_, indices) in groups {
            let k = indices.len();
            let (values, vectors) = if k == 1 {
                let i = indices[0];
                (Array1::from_elem(1, m[[i, i]].re), Array2::from_elem((1, 1), C64::new(1.0, 0.0)))
            } else {
                let sub = Array2::from_shape_fn((k, k), |(a, b)| m[[indices[a], indices[b]]]);
                eigh(&sub)?
            };
            blocks.push(EigenBlock { indices, values, vectors });
        }
        Ok(Self { dim: n, blocks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[EigenBlock] {
        &self.blocks
    }

    pub fn largest_block(&self) -> usize {
        self.blocks.iter().map(|b| b.indices.len()).max().unwrap_or(0)
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.blocks.iter().flat_map(|b| b.values.iter().copied()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `f(M) v` for a scalar function `f` applied to the spectrum.
    pub fn apply_fn(&self, v: &Array1<C64>, f: impl Fn(f64) -> C64) -> Array1<C64> {
        let mut out = Array1::zeros(self.dim);
        for b in &self.blocks {
            let k = b.indices.len();
            // coefficients in the eigenbasis
            let mut c = vec![C64::new(0.0, 0.0); k];
            for (col, cj) in c.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (row, &idx) in b.indices.iter().enumerate() {
                    acc += b.vectors[[row, col]].conj() * v[idx];
                }
                *cj = acc * f(b.values[col]);
            }
            for (row, &idx) in b.indices.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (col, cj) in c.iter().enumerate() {
                    acc += b.vectors[[row, col]] * cj;
                }
                out[idx] = acc;
            }
        }
        out
    }

    /// Dense `f(M)`.
    pub fn matrix_fn(&self, f: impl Fn(f64) -> C64) -> Array2<C64> {
        let mut out = Array2::zeros((self.dim, self.dim));
        for b in &self.blocks {
            let k = b.indices.len();
            let fv: Vec<C64> = b.values.iter().map(|&l| f(l)).collect();
            for r in 0..k {
                for c in 0..k {
                    let mut acc = C64::new(0.0, 0.0);
                    for (j, fj) in fv.iter().enumerate() {
                        acc += b.vectors[[r, j]] * fj * b.vectors[[c, j]].conj();
                    }
                    out[[b.indices[r], b.indices[c]]] = acc;
                }
            }
        }
        out
    }
}

/// Compressed sparse row copy of a dense matrix, used by the time-stepping
/// integrators where operators have a handful of nonzeros per row.
#[derive(Clone, Debug)]
pub struct Csr {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl Csr {
    pub fn from_dense(m: &Array2<C64>) -> Self {
        let (nrows, ncols) = m.dim();
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for i in 0..nrows {
            for j in 0..ncols {
                let z = m[[i, j]];
                if z != C64::new(0.0, 0.0) {
                    indices.push(j);
                    values.push(z);
                }
            }
            indptr.push(indices.len());
        }
        Self { nrows, ncols, indptr, indices, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|z| *z *= s);
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut triplets: Vec<(usize, usize, C64)> = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            for p in self.indptr[i]..self.indptr[i + 1] {
                triplets.push((self.indices[p], i, self.values[p].conj()));
            }
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; self.ncols + 1];
        for &(r, _, _) in &triplets {
            indptr[r + 1] += 1;
        }
        for r in 0..self.ncols {
            indptr[r + 1] += indptr[r];
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            indptr,
            indices: triplets.iter().map(|t| t.1).collect(),
            values: triplets.iter().map(|t| t.2).collect(),
        }
    }

    /// `out += s · A v`
    pub fn mul_vec_acc(&self, v: &Array1<C64>, s: C64, out: &mut Array1<C64>) {
        for i in 0..self.nrows {
            let mut acc = C64::new(0.0, 0.0);
            for p in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[p] * v[self.indices[p]];
            }
            out[i] += s * acc;
        }
    }

    /// `out += s · A B`
    pub fn mul_left_acc(&self, b: &Array2<C64>, s: C64, out: &mut Array2<C64>) {
        let ncols = b.ncols();
        for i in 0..self.nrows {
            for p in self.indptr[i]..self.indptr[i + 1] {
                let a = self.values[p] * s;
                let brow = b.row(self.indices[p]);
                let mut orow = out.row_mut(i);
                for c in 0..ncols {
                    orow[c] += a * brow[c];
                }
            }
        }
    }

    /// `out += s · B A`
    pub fn mul_right_acc(&self, b: &Array2<C64>, s: C64, out: &mut Array2<C64>) {
        // (B A)[r, j] = Σ_k B[r, k] A[k, j]
        let nr = b.nrows();
        for k in 0..self.nrows {
            for p in self.indptr[k]..self.indptr[k + 1] {
                let j = self.indices[p];
                let a = self.values[p] * s;
                for r in 0..nr {
                    out[[r, j]] += b[[r, k]] * a;
                }
            }
        }
    }

    /// `A B`
    pub fn mul_left(&self, b: &Array2<C64>) -> Array2<C64> {
        let mut out = Array2::zeros((self.nrows, b.ncols()));
        self.mul_left_acc(b, C64::new(1.0, 0.0), &mut out);
        out
    }
}

/// Trace distance `½ Σ |λᵢ(ρ − σ)|` between two density matrices.
pub fn trace_distance(rho: &Array2<C64>, sigma: &Array2<C64>) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Shape {
            expected: format!("{:?}", rho.dim()),
            actual: format!("{:?}", sigma.dim()),
        });
    }
    let d = rho - sigma;
    // Hermitian part only; the anti-Hermitian residue is roundoff.
    let h = (&d + &dagger(&d)).mapv(|z| z * 0.5);
    Ok(0.5 * eigvalsh(&h)?.iter().map(|l| l.abs()).sum::<f64>())
}
