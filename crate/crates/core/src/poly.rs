//! Homogeneous polynomial maps `ℝⁿ → ℝⁿ` stored as dense coefficient arrays
//! over a graded-lexicographic monomial basis.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Exponent vector of a monomial.
pub type MonomialIndex = Vec<u32>;

/// All monomials of degree `d` in `n` variables, `x₁`-heaviest first:
/// for `n = 2, d = 2` this is `x₁², x₁x₂, x₂²`.
pub fn monomial_basis(n: usize, d: u32) -> Vec<MonomialIndex> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MonomialIndex>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// Monomial basis with reverse lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialBasis {
    n: usize,
    d: u32,
    monomials: Vec<MonomialIndex>,
    index: HashMap<MonomialIndex, usize>,
}

impl MonomialBasis {
    pub fn new(n: usize, d: u32) -> Self {
        let monomials = monomial_basis(n, d);
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Self {
            n,
            d,
            monomials,
            index,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[MonomialIndex] {
        &self.monomials
    }

    pub fn position(&self, exps: &[u32]) -> Option<usize> {
        self.index.get(exps).copied()
    }
}

fn pow<T: Scalar>(x: T, e: u32) -> T {
    (0..e).fold(T::one(), |acc, _| acc * x)
}

fn monomial_value<T: Scalar>(exps: &[u32], x: &[T]) -> T {
    exps.iter()
        .zip(x)
        .fold(T::one(), |acc, (&e, &xi)| acc * pow(xi, e))
}

/// Expands `∏ᵢ (g x)ᵢ^{eᵢ}` as a sparse polynomial in `x`.
pub(crate) fn expand_substituted<T: Scalar>(
    g: &DenseMatrix<T>,
    exps: &[u32],
) -> BTreeMap<MonomialIndex, T> {
    let n = g.dim();
    let mut poly: BTreeMap<MonomialIndex, T> = BTreeMap::new();
    poly.insert(vec![0; n], T::one());
    for (i, &e) in exps.iter().enumerate() {
        for _ in 0..e {
            let mut next: BTreeMap<MonomialIndex, T> = BTreeMap::new();
            for (m, &c) in &poly {
                for j in 0..n {
                    let gij = g[(i, j)];
                    if gij == T::zero() {
                        continue;
                    }
                    let mut m2 = m.clone();
                    m2[j] += 1;
                    *next.entry(m2).or_insert_with(T::zero) += c * gij;
                }
            }
            poly = next;
        }
    }
    poly
}

/// Homogeneous polynomial map of degree `d` on `ℝⁿ`. Coefficient
/// `(o, m)` multiplies monomial `m` in output coordinate `o`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMap<T> {
    basis: Arc<MonomialBasis>,
    coeffs: Vec<T>,
}

impl<T: Scalar> PolyMap<T> {
    pub fn zeros(n: usize, d: u32) -> Self {
        Self::zeros_on(Arc::new(MonomialBasis::new(n, d)))
    }

    pub fn zeros_on(basis: Arc<MonomialBasis>) -> Self {
        let len = basis.n() * basis.len();
        Self {
            basis,
            coeffs: vec![T::zero(); len],
        }
    }

    /// Coefficient vector laid out output-major.
    pub fn from_coeffs(basis: Arc<MonomialBasis>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != basis.n() * basis.len() {
            return Err(Error::Domain(format!(
                "expected {} coefficients, got {}",
                basis.n() * basis.len(),
                coeffs.len()
            )));
        }
        Ok(Self { basis, coeffs })
    }

    /// The identity map `x ↦ x`.
    pub fn identity(n: usize) -> Self {
        let mut p = Self::zeros(n, 1);
        for o in 0..n {
            let mut e = vec![0; n];
            e[o] = 1;
            p.set(o, &e, T::one()).expect("degree-one monomial");
        }
        p
    }

    /// Builds a map from products of 1-based variable indices: each row is a
    /// list of `(coefficient, [i, j, k, …])` meaning `coefficient · xᵢ xⱼ xₖ …`.
    pub fn from_products(n: usize, d: u32, rows: &[&[(i64, &[usize])]]) -> Result<Self> {
        if rows.len() != n {
            return Err(Error::Domain(format!(
                "expected {n} rows, got {}",
                rows.len()
            )));
        }
        let mut p = Self::zeros(n, d);
        for (o, row) in rows.iter().enumerate() {
            for &(c, vars) in row.iter() {
                if vars.len() != d as usize || vars.iter().any(|&v| v == 0 || v > n) {
                    return Err(Error::Domain(format!(
                        "bad term {c}·{vars:?} in row {}",
                        o + 1
                    )));
                }
                let mut e = vec![0; n];
                vars.iter().for_each(|&v| e[v - 1] += 1);
                p.add(o, &e, T::from_int(c))?;
            }
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn degree(&self) -> u32 {
        self.basis.degree()
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    fn slot(&self, out: usize, exps: &[u32]) -> Result<usize> {
        if out >= self.n() {
            return Err(Error::OutOfRange {
                index: out,
                max: self.n() - 1,
            });
        }
        let m = self
            .basis
            .position(exps)
            .ok_or_else(|| Error::Domain(format!("{exps:?} is not a monomial of this basis")))?;
        Ok(out * self.basis.len() + m)
    }

    pub fn coeff(&self, out: usize, exps: &[u32]) -> Result<T> {
        Ok(self.coeffs[self.slot(out, exps)?])
    }

    pub fn set(&mut self, out: usize, exps: &[u32], v: T) -> Result<()> {
        let s = self.slot(out, exps)?;
        self.coeffs[s] = v;
        Ok(())
    }

    pub fn add(&mut self, out: usize, exps: &[u32], v: T) -> Result<()> {
        let s = self.slot(out, exps)?;
        self.coeffs[s] += v;
        Ok(())
    }

    /// Nonzero terms as `(output, exponents, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &MonomialIndex, T)> + '_ {
        let len = self.basis.len();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != T::zero())
            .map(move |(k, &c)| (k / len, &self.basis.monomials()[k % len], c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == T::zero())
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// `self += s · other`.
    pub fn add_scaled(&mut self, other: &Self, s: T) {
        assert_eq!(*self.basis, *other.basis, "incompatible bases");
        self.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(a, &b)| *a += b * s);
    }

    /// `Σ wᵢ Pᵢ`.
    pub fn combination(weights: &[T], maps: &[Self]) -> Result<Self> {
        let first = maps
            .first()
            .ok_or_else(|| Error::Domain("empty combination".into()))?;
        if weights.len() != maps.len() {
            return Err(Error::Domain(format!(
                "{} weights for {} maps",
                weights.len(),
                maps.len()
            )));
        }
        let mut out = Self::zeros_on(first.basis.clone());
        for (&w, p) in weights.iter().zip(maps) {
            out.add_scaled(p, w);
        }
        Ok(out)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> PolyMap<U> {
        PolyMap {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn evaluate(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n(), "dimension mismatch");
        let vals: Vec<T> = self
            .basis
            .monomials()
            .iter()
            .map(|m| monomial_value(m, x))
            .collect();
        self.coeffs
            .chunks(self.basis.len())
            .map(|row| row.iter().zip(&vals).map(|(&c, &v)| c * v).sum())
            .collect()
    }

    /// `∂Pᵢ/∂xⱼ` at `x`.
    pub fn jacobian(&self, x: &[T]) -> DenseMatrix<T> {
        let n = self.n();
        assert_eq!(x.len(), n, "dimension mismatch");
        let len = self.basis.len();
        // grads[m][j] = ∂(monomial m)/∂x_j
        let grads: Vec<Vec<T>> = self
            .basis
            .monomials()
            .iter()
            .map(|m| {
                (0..n)
                    .map(|j| {
                        if m[j] == 0 {
                            return T::zero();
                        }
                        let mut e = m.clone();
                        e[j] -= 1;
                        T::from_int(m[j] as i64) * monomial_value(&e, x)
                    })
                    .collect()
            })
            .collect();
        DenseMatrix::from_fn(n, |i, j| {
            (0..len)
                .map(|m| self.coeffs[i * len + m] * grads[m][j])
                .sum()
        })
    }

    /// The map `x ↦ P(g x)`.
    pub fn compose_linear(&self, g: &DenseMatrix<T>) -> Self {
        let len = self.basis.len();
        let mut out = Self::zeros_on(self.basis.clone());
        for (m, exps) in self.basis.monomials().iter().enumerate() {
            let column: Vec<T> = (0..self.n()).map(|o| self.coeffs[o * len + m]).collect();
            if column.iter().all(|&c| c == T::zero()) {
                continue;
            }
            for (e2, v) in expand_substituted(g, exps) {
                let m2 = self.basis.position(&e2).expect("homogeneous expansion");
                for (o, &c) in column.iter().enumerate() {
                    out.coeffs[o * len + m2] += c * v;
                }
            }
        }
        out
    }

    /// The map `x ↦ g P(x)`.
    pub fn left_apply(&self, g: &DenseMatrix<T>) -> Self {
        let len = self.basis.len();
        let n = self.n();
        let mut out = Self::zeros_on(self.basis.clone());
        for o in 0..n {
            for k in 0..n {
                let gk = g[(o, k)];
                if gk == T::zero() {
                    continue;
                }
                for m in 0..len {
                    out.coeffs[o * len + m] += gk * self.coeffs[k * len + m];
                }
            }
        }
        out
    }

    /// Substitutes `x = embed(y)` (the listed coordinates carry `y`, the rest
    /// are zero) and keeps only the listed outputs. Returns the restricted map
    /// and the largest coefficient of the dropped outputs on the subspace.
    pub fn restrict(&self, coords: &[usize]) -> Result<(Self, T)>
    where
        T: PartialOrd,
    {
        let n = self.n();
        if coords.iter().any(|&c| c >= n) {
            return Err(Error::Domain(format!(
                "coordinates {coords:?} out of range"
            )));
        }
        let k = coords.len();
        let sub = Arc::new(MonomialBasis::new(k, self.degree()));
        let mut out = Self::zeros_on(sub.clone());
        let mut leak = T::zero();
        let len = self.basis.len();
        for (m, exps) in self.basis.monomials().iter().enumerate() {
            let off: u32 = (0..n)
                .filter(|i| !coords.contains(i))
                .map(|i| exps[i])
                .sum();
            if off > 0 {
                continue;
            }
            let e2: Vec<u32> = coords.iter().map(|&c| exps[c]).collect();
            let m2 = sub.position(&e2).expect("sub-monomial");
            for o in 0..n {
                let c = self.coeffs[o * len + m];
                match coords.iter().position(|&x| x == o) {
                    Some(oi) => out.coeffs[oi * sub.len() + m2] += c,
                    None => {
                        let a = if c < T::zero() { -c } else { c };
                        if a > leak {
                            leak = a;
                        }
                    }
                }
            }
        }
        Ok((out, leak))
    }
}

/// Serialized form `{n, d, coeffs: [[output, exponents, value], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyMapJson {
    pub n: usize,
    pub d: u32,
    pub coeffs: Vec<(usize, Vec<u32>, f64)>,
}

impl PolyMap<f64> {
    pub fn to_json(&self) -> PolyMapJson {
        PolyMapJson {
            n: self.n(),
            d: self.degree(),
            coeffs: self.terms().map(|(o, e, c)| (o, e.clone(), c)).collect(),
        }
    }

    pub fn from_json(j: &PolyMapJson) -> Result<Self> {
        let mut p = Self::zeros(j.n, j.d);
        for (o, e, c) in &j.coeffs {
            if e.len() != j.n || e.iter().sum::<u32>() != j.d {
                return Err(Error::Domain(format!(
                    "exponents {e:?} do not match n = {}, d = {}",
                    j.n, j.d
                )));
            }
            p.add(*o, e, *c)?;
        }
        Ok(p)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}
