//! Small square matrices over a generic scalar, plus the SVD nullspace
//! routine shared by the commutant, fixed-space and equivariant solvers.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};

/// Relative singular value cut used for every rank decision.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseMatrix<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.as_ref().len(), dim, "matrix must be square");
            entries.extend_from_slice(r.as_ref());
        }
        Self { dim, entries }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self { dim, entries }
    }

    /// Integer matrix lifted into `T`.
    pub fn from_int_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| T::from_int(rows[i].as_ref()[j]))
    }

    /// `diag(a, b)` for square blocks.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let n = a.dim + b.dim;
        Self::from_fn(n, |i, j| match (i < a.dim, j < a.dim) {
            (true, true) => a[(i, j)],
            (false, false) => b[(i - a.dim, j - a.dim)],
            _ => T::zero(),
        })
    }

    /// `[[a, b], [c, d]]` from four equal-size blocks.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let h = a.dim;
        Self::from_fn(2 * h, |i, j| match (i < h, j < h) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - h)],
            (false, true) => c[(i - h, j)],
            (false, false) => d[(i - h, j - h)],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-T::one())
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> DenseMatrix<U> {
        DenseMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|&x| f(x)).collect(),
        }
    }
}

impl<T: RealScalar> DenseMatrix<T> {
    /// Max-norm distance.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.max_abs_diff(other) < tol
    }

    /// `‖MᵀM − I‖_max`.
    pub fn orthogonality_defect(&self) -> T {
        (&self.transpose() * self).max_abs_diff(&Self::identity(self.dim))
    }

    /// 2×2 rotation by `angle`.
    pub fn rotation2(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_rows(&[[c, -s], [s, c]])
    }

    pub fn to_f64(&self) -> DenseMatrix<f64> {
        self.map(|x| x.to_f64().expect("finite entry"))
    }
}

impl DenseMatrix<f64> {
    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }

    pub fn determinant(&self) -> f64 {
        self.to_nalgebra().determinant()
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.entries[i * self.dim + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.entries[i * self.dim + j]
    }
}

impl<T: Scalar> Mul for &DenseMatrix<T> {
    type Output = DenseMatrix<T>;
    fn mul(self, rhs: Self) -> DenseMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Scalar> Mul for DenseMatrix<T> {
    type Output = DenseMatrix<T>;
    fn mul(self, rhs: Self) -> DenseMatrix<T> {
        &self * &rhs
    }
}

impl<T: Scalar> Add for &DenseMatrix<T> {
    type Output = DenseMatrix<T>;
    fn add(self, rhs: Self) -> DenseMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        DenseMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &DenseMatrix<T> {
    type Output = DenseMatrix<T>;
    fn sub(self, rhs: Self) -> DenseMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        DenseMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

/// Outcome of a rank decision: the orthonormal nullspace basis (as columns)
/// together with the singular values that produced it.
#[derive(Debug, Clone)]
pub struct Nullspace {
    pub basis: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub cut: f64,
}

impl Nullspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Nullspace of `a` via SVD. Singular values below `rel_tol · scale` are
/// zero, where `scale = max(σ_max, floor)`; values inside
/// `[cut, 10·cut)` are reported as ambiguous.
pub fn nullspace_with_floor(
    a: &DMatrix<f64>,
    rel_tol: f64,
    floor: f64,
    context: &'static str,
) -> Result<Nullspace> {
    let n = a.ncols();
    if n == 0 {
        return Ok(Nullspace {
            basis: DMatrix::zeros(0, 0),
            singular_values: vec![],
            cut: 0.0,
        });
    }
    // The SVD only yields min(m, n) right singular vectors; pad with zero rows.
    let padded;
    let a = if a.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        padded = p;
        &padded
    } else {
        a
    };
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let cut = rel_tol * smax.max(floor);
    if let Some(&bad) = sv.iter().find(|&&s| s >= cut && s < 10.0 * cut) {
        return Err(Error::NumericalAmbiguity {
            context,
            value: bad,
            cut,
        });
    }
    let null: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] < cut).collect();
    let mut basis = DMatrix::zeros(n, null.len());
    for (c, &i) in null.iter().enumerate() {
        basis.set_column(c, &v_t.row(i).transpose());
    }
    Ok(Nullspace {
        basis,
        singular_values: sv,
        cut,
    })
}

pub fn nullspace(a: &DMatrix<f64>, rel_tol: f64, context: &'static str) -> Result<Nullspace> {
    nullspace_with_floor(a, rel_tol, 0.0, context)
}

/// Canonical orthonormal basis of the column span of `basis`: project the
/// standard basis vectors in order, Gram–Schmidt, and make the first nonzero
/// coordinate of each vector positive. Independent of which orthonormal
/// basis of the subspace came in.
pub fn canonical_basis(basis: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let n = basis.nrows();
    let k = basis.ncols();
    let proj = basis * basis.transpose();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(k);
    for i in 0..n {
        if out.len() == k {
            break;
        }
        let mut v: Vec<f64> = proj.column(i).iter().copied().collect();
        for u in &out {
            let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        out.push(v);
    }
    out
}
