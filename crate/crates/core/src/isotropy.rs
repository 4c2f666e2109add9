//! Fixed-point spaces and the conjugacy classes of isotropy subgroups.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{
    conjugate, enumerate_group, nf_inverse, nf_multiply, GroupElement, GroupParams, Realization,
};
use crate::linalg::{canonical_basis, nullspace_with_floor, DenseMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedSpace {
    pub element: GroupElement,
    /// Orthonormal, first nonzero coordinate of each vector positive.
    pub basis: Vec<Vec<f64>>,
    pub dim: usize,
}

/// `ker(M − I)` for an already realized matrix.
pub fn fixed_space_of_matrix(m: &DenseMatrix<f64>, tol: f64) -> Result<Vec<Vec<f64>>> {
    let a = (m - &DenseMatrix::identity(m.dim())).to_nalgebra();
    let ns = nullspace_with_floor(&a, tol, 1.0, "fixed space")?;
    Ok(canonical_basis(&ns.basis))
}

pub fn fixed_space_in(r: &Realization<f64>, e: &GroupElement, tol: f64) -> Result<FixedSpace> {
    let basis = fixed_space_of_matrix(&r.matrix(e)?, tol)?;
    Ok(FixedSpace {
        element: *e,
        dim: basis.len(),
        basis,
    })
}

pub fn fixed_space(e: &GroupElement, params: &GroupParams, tol: f64) -> Result<FixedSpace> {
    fixed_space_in(&Realization::new(params)?, e, tol)
}

/// Closed-form fixed space of `c^k1 d^k2 q^l1 s` in the four-dimensional
/// family: one rotated vector in each coordinate plane.
pub fn fixed_space_formula_h(
    k1: u32,
    k2: u32,
    l1: u8,
    params: &GroupParams,
) -> Result<[Vec<f64>; 2]> {
    let shift = match l1 {
        1 => 0.0,
        3 => 1.0,
        _ => {
            return Err(Error::Domain(format!(
                "l1 = {l1} has no closed-form fixed space"
            )))
        }
    };
    let x = k1 as f64 / params.a as f64;
    let y = k2 as f64 / params.b as f64;
    let pi = std::f64::consts::PI;
    let minus = 0.5 * (x - y + shift) * pi;
    let plus = 0.5 * (x + y + shift) * pi;
    Ok([
        vec![minus.cos(), minus.sin(), 0.0, 0.0],
        vec![0.0, 0.0, plus.cos(), plus.sin()],
    ])
}

/// Largest principal-angle sine between two subspaces given by orthonormal
/// bases (0 when they coincide).
pub fn subspace_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.len() != b.len() {
        return 1.0;
    }
    let residual = |from: &[Vec<f64>], onto: &[Vec<f64>]| {
        from.iter()
            .map(|v| {
                let mut r = v.clone();
                for u in onto {
                    let d: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
                    r.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
                }
                r.iter().map(|x| x * x).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    };
    residual(a, b).max(residual(b, a))
}

/// Elements of the form `C^k1 D^k2 Q^l1 S` with `l1` odd, the only ones with
/// nonzero fixed vectors.
pub fn nontrivial_fixers(params: &GroupParams) -> Vec<GroupElement> {
    enumerate_group(params)
        .into_iter()
        .filter(|e| matches!(e.l1, 1 | 3) && e.l2 == 1 && e.m == 0)
        .collect()
}

/// The same set found by computing every kernel.
pub fn nontrivial_fixers_by_kernel(params: &GroupParams, tol: f64) -> Result<Vec<GroupElement>> {
    let r = Realization::new(params)?;
    let mut out = Vec::new();
    for e in enumerate_group(params)
        .into_iter()
        .filter(|e| !e.is_identity())
    {
        if fixed_space_in(&r, &e, tol)?.dim > 0 {
            out.push(e);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugacyWitness {
    pub member: GroupElement,
    /// `w` with `w · representative · w⁻¹ = member`.
    pub conjugator: GroupElement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotropyClass {
    /// Generator of the representative subgroup (lexicographically smallest
    /// generator in the class).
    pub representative: GroupElement,
    pub members: Vec<GroupElement>,
    pub fixed_dim: usize,
    pub fixed_basis: Vec<Vec<f64>>,
    pub witnesses: Vec<ConjugacyWitness>,
}

/// Elements of `⟨e⟩`.
fn cyclic_subgroup(e: &GroupElement, params: &GroupParams) -> Result<BTreeSet<GroupElement>> {
    let mut out = BTreeSet::from([GroupElement::IDENTITY]);
    let mut acc = *e;
    while out.insert(acc) {
        acc = nf_multiply(&acc, e, params)?;
    }
    Ok(out)
}

/// Groups the cyclic subgroups `⟨e⟩`, `e` a nontrivial fixer, into
/// conjugacy classes by exhaustive conjugation.
pub fn classify_isotropy(params: &GroupParams, tol: f64) -> Result<Vec<IsotropyClass>> {
    let group = enumerate_group(params);
    let inverses: Vec<GroupElement> = group
        .iter()
        .map(|w| nf_inverse(w, params))
        .collect::<Result<_>>()?;
    let realization = Realization::new(params)?;
    let fixers = nontrivial_fixers(params);
    let mut subgroup_of = BTreeMap::new();
    for e in &fixers {
        subgroup_of.insert(*e, cyclic_subgroup(e, params)?);
    }
    let mut assigned: BTreeSet<GroupElement> = BTreeSet::new();
    let mut classes = Vec::new();
    for rep in &fixers {
        if assigned.contains(rep) {
            continue;
        }
        // First conjugator (in group order) reaching each conjugate of rep.
        let mut reached: BTreeMap<GroupElement, GroupElement> = BTreeMap::new();
        for (w, w_inv) in group.iter().zip(&inverses) {
            let c = nf_multiply(&nf_multiply(w, rep, params)?, w_inv, params)?;
            reached.entry(c).or_insert(*w);
        }
        let conj_subgroups: BTreeSet<&BTreeSet<GroupElement>> =
            reached.keys().map(|c| &subgroup_of[c]).collect();
        let mut members = Vec::new();
        let mut witnesses = Vec::new();
        for e in &fixers {
            if assigned.contains(e) || !conj_subgroups.contains(&subgroup_of[e]) {
                continue;
            }
            members.push(*e);
            assigned.insert(*e);
            if let Some(w) = reached.get(e) {
                witnesses.push(ConjugacyWitness {
                    member: *e,
                    conjugator: *w,
                });
            }
        }
        let fs = fixed_space_in(&realization, rep, tol)?;
        classes.push(IsotropyClass {
            representative: *rep,
            members,
            fixed_dim: fs.dim,
            fixed_basis: fs.basis,
            witnesses,
        });
    }
    Ok(classes)
}

/// First `w` in group order with `w · from · w⁻¹ = to`.
pub fn conjugacy_witness(
    from: &GroupElement,
    to: &GroupElement,
    params: &GroupParams,
) -> Result<Option<GroupElement>> {
    for w in enumerate_group(params) {
        if conjugate(&w, from, params)? == *to {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Index set of `Fix(⟨QS⟩)`: coordinates 1, 3, 6, 8 (zero-based 0, 2, 5, 7).
pub const QS_FIXED_COORDS: [usize; 4] = [0, 2, 5, 7];

/// `QS` (`qs = [j, j]` in the four-dimensional family).
pub const QS: GroupElement = GroupElement::new(0, 0, 1, 1, 0);
