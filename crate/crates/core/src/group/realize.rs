//! Matrix realizations of the generators and of normal-form elements.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{Family, GroupElement, GroupParams};
use crate::error::{Error, Result};
use crate::linalg::{nullspace, DenseMatrix};
use crate::scalar::{RealScalar, Scalar};

/// Generators `c, d, q, s` of `H_{a,b}` on ℝ⁴.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorsH<T> {
    pub c: DenseMatrix<T>,
    pub d: DenseMatrix<T>,
    pub q: DenseMatrix<T>,
    pub s: DenseMatrix<T>,
}

impl<T: Scalar> GeneratorsH<T> {
    pub fn to_vec(&self) -> Vec<DenseMatrix<T>> {
        vec![
            self.c.clone(),
            self.d.clone(),
            self.q.clone(),
            self.s.clone(),
        ]
    }
}

/// Generators `C, D, Q, S, V` of `G_{a,b}` on ℝ⁸.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorsG<T> {
    pub c: DenseMatrix<T>,
    pub d: DenseMatrix<T>,
    pub q: DenseMatrix<T>,
    pub s: DenseMatrix<T>,
    pub v: DenseMatrix<T>,
}

impl<T: Scalar> GeneratorsG<T> {
    pub fn to_vec(&self) -> Vec<DenseMatrix<T>> {
        vec![
            self.c.clone(),
            self.d.clone(),
            self.q.clone(),
            self.s.clone(),
            self.v.clone(),
        ]
    }

    /// `C, D, Q, S` without `V`.
    pub fn without_v(&self) -> Vec<DenseMatrix<T>> {
        vec![
            self.c.clone(),
            self.d.clone(),
            self.q.clone(),
            self.s.clone(),
        ]
    }
}

fn q4<T: Scalar>() -> DenseMatrix<T> {
    DenseMatrix::from_int_rows(&[[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
}

fn s4<T: Scalar>() -> DenseMatrix<T> {
    DenseMatrix::from_int_rows(&[[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]])
}

/// `diag(r(φ), r(φ))`.
fn c_block<T: RealScalar>(phi: T) -> DenseMatrix<T> {
    let r = DenseMatrix::rotation2(phi);
    DenseMatrix::block_diag(&r, &r)
}

/// `diag(r(−ψ), r(ψ))`.
fn d_block<T: RealScalar>(psi: T) -> DenseMatrix<T> {
    DenseMatrix::block_diag(&DenseMatrix::rotation2(-psi), &DenseMatrix::rotation2(psi))
}

/// The integer generators `Q, S, V` of the eight-dimensional family, over
/// any scalar (exact arithmetic with `i64` or `Rational64`).
pub fn signed_permutations_g<T: Scalar>() -> [DenseMatrix<T>; 3] {
    let q = q4::<T>();
    let s = s4::<T>();
    let z = DenseMatrix::zeros(4);
    [
        DenseMatrix::block_diag(&q, &q.neg()),
        DenseMatrix::block_diag(&s, &s),
        DenseMatrix::from_blocks(&z, &DenseMatrix::identity(4), &s, &z),
    ]
}

pub fn generator_matrices_h<T: RealScalar>(params: &GroupParams) -> GeneratorsH<T> {
    let pi = T::PI();
    GeneratorsH {
        c: c_block(pi / T::from_int(params.a as i64)),
        d: d_block(pi / T::from_int(params.b as i64)),
        q: q4(),
        s: s4(),
    }
}

pub fn generator_matrices_g<T: RealScalar>(params: &GroupParams) -> Result<GeneratorsG<T>> {
    let rho = params.rho_or_err()?;
    let h = generator_matrices_h::<T>(params);
    let a = T::from_int(params.a as i64);
    // c^ρ evaluated directly as a rotation to avoid ρ rounding-prone products.
    let c_rho = c_block(T::PI() * T::from_int(rho as i64) / a);
    let [q, s, v] = signed_permutations_g();
    Ok(GeneratorsG {
        c: DenseMatrix::block_diag(&h.c, &c_rho),
        d: DenseMatrix::block_diag(&h.d, &h.d),
        q,
        s,
        v,
    })
}

/// `D(ψ) = diag(d(ψ), d(ψ))`; `D(π/b)` is the generator `D`.
pub fn lie_generator_d<T: RealScalar>(psi: T) -> DenseMatrix<T> {
    let d = d_block(psi);
    DenseMatrix::block_diag(&d, &d)
}

/// `C(φ) = diag(c(φ), c(ρφ))`; `C(π/a)` is the generator `C`.
pub fn lie_generator_c<T: RealScalar>(phi: T, rho: u64) -> DenseMatrix<T> {
    DenseMatrix::block_diag(&c_block(phi), &c_block(phi * T::from_int(rho as i64)))
}

/// `C̃(φ, φ') = diag(c(φ), c(φ'))`.
pub fn c_tilde<T: RealScalar>(phi: T, phi2: T) -> DenseMatrix<T> {
    DenseMatrix::block_diag(&c_block(phi), &c_block(phi2))
}

/// Cached generator powers so that element matrices cost four products.
#[derive(Debug, Clone)]
pub struct Realization<T> {
    params: GroupParams,
    c: Vec<DenseMatrix<T>>,
    d: Vec<DenseMatrix<T>>,
    q: Vec<DenseMatrix<T>>,
    s: Vec<DenseMatrix<T>>,
    v: Vec<DenseMatrix<T>>,
}

fn powers<T: Scalar>(g: &DenseMatrix<T>, n: u64) -> Vec<DenseMatrix<T>> {
    let mut out = Vec::with_capacity(n as usize);
    let mut acc = DenseMatrix::identity(g.dim());
    for _ in 0..n {
        let next = &acc * g;
        out.push(acc);
        acc = next;
    }
    out
}

impl<T: RealScalar> Realization<T> {
    pub fn new(params: &GroupParams) -> Result<Self> {
        let (c, d, q, s, v) = match params.family {
            Family::H4 => {
                let g = generator_matrices_h::<T>(params);
                (g.c, g.d, g.q, g.s, DenseMatrix::identity(4))
            }
            Family::G8 => {
                let g = generator_matrices_g::<T>(params)?;
                (g.c, g.d, g.q, g.s, g.v)
            }
        };
        Ok(Self {
            params: *params,
            c: powers(&c, params.a),
            d: powers(&d, params.b),
            q: powers(&q, 4),
            s: powers(&s, 2),
            v: powers(&v, 2),
        })
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn generators(&self) -> Vec<DenseMatrix<T>> {
        let mut g = vec![
            self.c[1].clone(),
            self.d[1].clone(),
            self.q[1].clone(),
            self.s[1].clone(),
        ];
        if self.params.family == Family::G8 {
            g.push(self.v[1].clone());
        }
        g
    }

    /// `C^k1 D^k2 Q^l1 S^l2 V^m`.
    pub fn matrix(&self, e: &GroupElement) -> Result<DenseMatrix<T>> {
        if !self.params.is_valid(e) {
            return Err(Error::Domain(format!(
                "{e} is not a normal form for {}",
                self.params
            )));
        }
        let m = &self.c[e.k1 as usize] * &self.d[e.k2 as usize];
        let m = &m * &self.q[e.l1 as usize];
        let m = &m * &self.s[e.l2 as usize];
        Ok(&m * &self.v[e.m as usize])
    }
}

pub fn element_matrix<T: RealScalar>(
    e: &GroupElement,
    params: &GroupParams,
) -> Result<DenseMatrix<T>> {
    Realization::new(params)?.matrix(e)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationCheck {
    pub relation: &'static str,
    pub residual: f64,
    pub passed: bool,
}

/// Evaluates every defining relation as a matrix identity.
pub fn relation_checks(params: &GroupParams, tol: f64) -> Result<Vec<RelationCheck>> {
    let (a, b) = (params.a, params.b);
    let (c, d, q, s, v) = match params.family {
        Family::H4 => {
            let g = generator_matrices_h::<f64>(params);
            (g.c, g.d, g.q, g.s, None)
        }
        Family::G8 => {
            let g = generator_matrices_g::<f64>(params)?;
            (g.c, g.d, g.q, g.s, Some(g.v))
        }
    };
    let c_inv = c.transpose();
    let d_inv = d.transpose();
    let q2 = q.pow(2);
    let id = DenseMatrix::identity(params.dim());
    let mut rel: Vec<(&'static str, DenseMatrix<f64>, DenseMatrix<f64>)> = vec![
        ("CD = DC", &c * &d, &d * &c),
        ("CQ = QC", &c * &q, &q * &c),
        ("DS = SD", &d * &s, &s * &d),
        ("QS = SQ", &q * &s, &s * &q),
        ("SC = C⁻¹S", &s * &c, &c_inv * &s),
        ("QD = D⁻¹Q", &q * &d, &d_inv * &q),
        ("Cᵃ = Q²", c.pow(a), q2.clone()),
        ("Dᵇ = Q²", d.pow(b), q2.clone()),
        ("S² = Q²", s.pow(2), q2.clone()),
        ("Q² = −1", q2.clone(), id.neg()),
        ("Q⁴ = 1", q.pow(4), id.clone()),
    ];
    if let Some(v) = v {
        let rho = params.rho_or_err()?;
        rel.extend([
            ("VC = C^ρ V", &v * &c, &c.pow(rho) * &v),
            ("VD = DV", &v * &d, &d * &v),
            ("VQ = Q³V", &v * &q, &q.pow(3) * &v),
            ("VS = SV", &v * &s, &s * &v),
            ("V² = S", v.pow(2), s.clone()),
            ("V⁸ = 1", v.pow(8), id.clone()),
        ]);
    }
    Ok(rel
        .into_iter()
        .map(|(relation, lhs, rhs)| {
            let residual = lhs.max_abs_diff(&rhs);
            RelationCheck {
                relation,
                residual,
                passed: residual < tol,
            }
        })
        .collect())
}

/// Dimension of `{L : L g = g L for every generator g}`.
pub fn commutant_dimension(generators: &[DenseMatrix<f64>], tol: f64) -> Result<usize> {
    let Some(first) = generators.first() else {
        return Err(Error::Domain("no generators".into()));
    };
    let n = first.dim();
    if generators.iter().any(|g| g.dim() != n) {
        return Err(Error::Domain("generators of different sizes".into()));
    }
    // Unknown L_{ij} sits at column i·n + j; row (g, i, j) is (Lg − gL)_{ij}.
    let mut sys = DMatrix::zeros(generators.len() * n * n, n * n);
    for (gi, g) in generators.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let row = gi * n * n + i * n + j;
                for k in 0..n {
                    sys[(row, i * n + k)] += g[(k, j)];
                    sys[(row, k * n + j)] -= g[(i, k)];
                }
            }
        }
    }
    Ok(nullspace(&sys, tol, "commutant")?.dim())
}
