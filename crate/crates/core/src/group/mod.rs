//! The groups `H_{a,b} ⊂ SO(4)` and `G_{a,b} ⊂ O(8)`.
//!
//! Elements are exponent tuples of the normal form
//! `C^k1 D^k2 Q^l1 S^l2 V^m` (lower-case generators and `m = 0` for the
//! four-dimensional family). Products are computed exactly by rewriting; the
//! matrix realizations in [`realize`] serve as the oracle.

mod realize;
mod rewrite;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modular::{gcd, is_in_a, rho_for, RhoWitness};

pub use realize::{
    c_tilde, commutant_dimension, element_matrix, generator_matrices_g, generator_matrices_h,
    lie_generator_c, lie_generator_d, relation_checks, signed_permutations_g, GeneratorsG,
    GeneratorsH, Realization, RelationCheck,
};
pub use rewrite::{nf_inverse, nf_multiply, nf_power, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    /// `H_{a,b}` acting on ℝ⁴.
    H4,
    /// `G_{a,b}` acting on ℝ⁸.
    G8,
}

impl Family {
    pub fn dim(self) -> usize {
        match self {
            Family::H4 => 4,
            Family::G8 => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GroupParams {
    pub a: u64,
    pub b: u64,
    /// Only present for [`Family::G8`].
    pub rho: Option<u64>,
    pub family: Family,
}

impl GroupParams {
    pub fn h4(a: u64, b: u64) -> Result<Self> {
        check_ab(a, b)?;
        Ok(Self {
            a,
            b,
            rho: None,
            family: Family::H4,
        })
    }

    /// `G_{a,b}` with the canonical `ρ` from [`rho_for`].
    pub fn g8(a: u64, b: u64) -> Result<Self> {
        check_ab(a, b)?;
        if !is_in_a(a) {
            return Err(Error::NotInA(a));
        }
        let w = rho_for(a)?;
        Ok(Self {
            a,
            b,
            rho: Some(w.rho),
            family: Family::G8,
        })
    }

    /// `G_{a,b}` with an explicitly chosen odd `ρ`.
    pub fn g8_with_rho(a: u64, b: u64, rho: u64) -> Result<Self> {
        check_ab(a, b)?;
        if !is_in_a(a) {
            return Err(Error::NotInA(a));
        }
        let w = RhoWitness::new(a, rho)?;
        Ok(Self {
            a,
            b,
            rho: Some(w.rho),
            family: Family::G8,
        })
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    pub fn order(&self) -> u64 {
        match self.family {
            Family::H4 => 8 * self.a * self.b,
            Family::G8 => 16 * self.a * self.b,
        }
    }

    pub(crate) fn rho_or_err(&self) -> Result<u64> {
        self.rho
            .ok_or_else(|| Error::InvalidParams("the eight-dimensional family needs ρ".into()))
    }

    pub fn is_valid(&self, e: &GroupElement) -> bool {
        (e.k1 as u64) < self.a
            && (e.k2 as u64) < self.b
            && e.l1 < 4
            && e.l2 < 2
            && e.m < 2
            && (self.family == Family::G8 || e.m == 0)
    }
}

fn check_ab(a: u64, b: u64) -> Result<()> {
    if a == 0 || b == 0 || a.is_multiple_of(2) || b.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!(
            "a = {a} and b = {b} must be odd and positive"
        )));
    }
    if gcd(a, b) != 1 {
        return Err(Error::InvalidParams(format!("gcd({a}, {b}) ≠ 1")));
    }
    Ok(())
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::H4 => write!(f, "H_{{{},{}}}", self.a, self.b),
            Family::G8 => write!(f, "G_{{{},{}}}", self.a, self.b),
        }
    }
}

/// Normal-form exponents; `k1 < a`, `k2 < b`, `l1 < 4`, `l2 < 2`, `m < 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Default)]
pub struct GroupElement {
    pub k1: u32,
    pub k2: u32,
    pub l1: u8,
    pub l2: u8,
    pub m: u8,
}

impl GroupElement {
    pub const IDENTITY: Self = Self::new(0, 0, 0, 0, 0);

    pub const fn new(k1: u32, k2: u32, l1: u8, l2: u8, m: u8) -> Self {
        Self { k1, k2, l1, l2, m }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn as_tuple(&self) -> (u32, u32, u8, u8, u8) {
        (self.k1, self.k2, self.l1, self.l2, self.m)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{},{})",
            self.k1, self.k2, self.l1, self.l2, self.m
        )
    }
}

/// All elements in lexicographic tuple order (so the identity comes first
/// and `V` second).
pub fn enumerate_group(params: &GroupParams) -> Vec<GroupElement> {
    let ms: &[u8] = match params.family {
        Family::H4 => &[0],
        Family::G8 => &[0, 1],
    };
    let mut out = Vec::with_capacity(params.order() as usize);
    for k1 in 0..params.a as u32 {
        for k2 in 0..params.b as u32 {
            for l1 in 0..4 {
                for l2 in 0..2 {
                    for &m in ms {
                        out.push(GroupElement::new(k1, k2, l1, l2, m));
                    }
                }
            }
        }
    }
    out
}

/// Order of `e` by repeated multiplication.
pub fn element_order(e: &GroupElement, params: &GroupParams) -> Result<u64> {
    let mut acc = *e;
    let mut n = 1;
    while !acc.is_identity() {
        acc = nf_multiply(&acc, e, params)?;
        n += 1;
        if n > params.order() {
            return Err(Error::Domain(format!("element {e} has no finite order")));
        }
    }
    Ok(n)
}

/// `w e w⁻¹`.
pub fn conjugate(w: &GroupElement, e: &GroupElement, params: &GroupParams) -> Result<GroupElement> {
    let we = nf_multiply(w, e, params)?;
    nf_multiply(&we, &nf_inverse(w, params)?, params)
}
