//! Characters, symmetric-power characters and Molien coefficients.
//!
//! `R_d = |G|⁻¹ Σ χ_(d)(g) χ(g)` counts degree-`d` equivariants and
//! `r_d = |G|⁻¹ Σ χ_(d)(g)` counts invariants, where `χ_(d)` is the character
//! of the `d`-th symmetric power.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{enumerate_group, nf_power, Family, GroupElement, GroupParams, Realization};

/// Rounding residues above this are reported as inconsistent.
pub const ROUNDING_TOL: f64 = 1e-6;

/// Closed-form character. With `η = k1 π/a`, `ν = k2 π/b` and `l1` even,
/// `l2 = m = 0` it is `(−1)^{l1/2} 4 (cos η + cos ρη) cos ν` on ℝ⁸ and
/// `(−1)^{l1/2} 4 cos η cos ν` on ℝ⁴; every other element has trace 0.
pub fn character(e: &GroupElement, params: &GroupParams) -> Result<f64> {
    if !params.is_valid(e) {
        return Err(Error::Domain(format!(
            "{e} is not a normal form for {params}"
        )));
    }
    if e.l1 % 2 == 1 || e.l2 != 0 || e.m != 0 {
        return Ok(0.0);
    }
    let sign = if e.l1 == 2 { -1.0 } else { 1.0 };
    let eta = e.k1 as f64 * PI / params.a as f64;
    let nu = e.k2 as f64 * PI / params.b as f64;
    Ok(match params.family {
        Family::H4 => sign * 4.0 * eta.cos() * nu.cos(),
        Family::G8 => {
            let rho = params.rho_or_err()? as f64;
            sign * 4.0 * (eta.cos() + (rho * eta).cos()) * nu.cos()
        }
    })
}

/// The eight-dimensional closed form; rejects the four-dimensional family.
pub fn character_closed_form(e: &GroupElement, params: &GroupParams) -> Result<f64> {
    if params.family != Family::G8 {
        return Err(Error::Domain(
            "closed form is stated for the eight-dimensional family".into(),
        ));
    }
    character(e, params)
}

/// Trace of the realized matrix.
pub fn character_trace(r: &Realization<f64>, e: &GroupElement) -> Result<f64> {
    Ok(r.matrix(e)?.trace())
}

/// `χ_(2)(g) = ½ (χ(g²) + χ(g)²)`.
pub fn chi_2(e: &GroupElement, params: &GroupParams) -> Result<f64> {
    let chi = character(e, params)?;
    let chi2 = character(&nf_power(e, 2, params)?, params)?;
    Ok(0.5 * (chi2 + chi * chi))
}

/// `χ_(3)(g) = χ(g)³/6 + χ(g) χ(g²)/2 + χ(g³)/3`.
pub fn chi_3(e: &GroupElement, params: &GroupParams) -> Result<f64> {
    let chi = character(e, params)?;
    let chi2 = character(&nf_power(e, 2, params)?, params)?;
    let chi3 = character(&nf_power(e, 3, params)?, params)?;
    Ok(chi.powi(3) / 6.0 + 0.5 * chi * chi2 + chi3 / 3.0)
}

/// Character of the `d`-th symmetric power, `d ≤ 3`.
pub fn chi_sym(d: u32, e: &GroupElement, params: &GroupParams) -> Result<f64> {
    match d {
        0 => Ok(1.0),
        1 => character(e, params),
        2 => chi_2(e, params),
        3 => chi_3(e, params),
        _ => Err(Error::UnsupportedDegree(d)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MolienReport {
    pub params: GroupParams,
    pub degree: u32,
    /// `R_d`, the number of independent degree-`d` equivariants.
    pub equivariant: u64,
    /// `r_d`, the number of independent degree-`d` invariants.
    pub invariant: u64,
    /// Unrounded averages `(R_d, r_d)`.
    pub raw_sums: (f64, f64),
}

fn round_checked(x: f64, context: &'static str) -> Result<u64> {
    let n = x.round();
    let residue = (x - n).abs();
    if residue >= ROUNDING_TOL || n < 0.0 {
        return Err(Error::NumericalInconsistency { context, residue });
    }
    Ok(n as u64)
}

/// Per-element `(χ_(d)(g) χ(g), χ_(d)(g))`, summed in enumeration order so
/// the result does not depend on the thread count.
fn averages(params: &GroupParams, d: u32) -> Result<(f64, f64)> {
    if d > 3 {
        return Err(Error::UnsupportedDegree(d));
    }
    let group = enumerate_group(params);
    let terms: Vec<(f64, f64)> = group
        .par_iter()
        .map(|e| {
            let cd = chi_sym(d, e, params)?;
            Ok((cd * character(e, params)?, cd))
        })
        .collect::<Result<_>>()?;
    let n = group.len() as f64;
    let (eq, inv) = terms
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    Ok((eq / n, inv / n))
}

pub fn molien(params: &GroupParams, d: u32) -> Result<MolienReport> {
    let (eq, inv) = averages(params, d)?;
    Ok(MolienReport {
        params: *params,
        degree: d,
        equivariant: round_checked(eq, "equivariant Molien coefficient")?,
        invariant: round_checked(inv, "invariant Molien coefficient")?,
        raw_sums: (eq, inv),
    })
}

pub fn molien_equivariant(params: &GroupParams, d: u32) -> Result<u64> {
    Ok(molien(params, d)?.equivariant)
}

pub fn molien_invariant(params: &GroupParams, d: u32) -> Result<u64> {
    Ok(molien(params, d)?.invariant)
}

/// Sums of `χ_(2)(g) χ(g)` over the sectors `l1 = 0` and `l1 = 2`
/// (`l2 = m = 0`); multiplying by the central `Q²` flips `χ` and fixes
/// `χ_(2)`, so the two sums cancel.
pub fn degree_two_sector_sums(params: &GroupParams) -> Result<(f64, f64)> {
    let mut sums = (0.0, 0.0);
    for e in enumerate_group(params) {
        if e.l2 != 0 || e.m != 0 {
            continue;
        }
        let t = chi_2(&e, params)? * character(&e, params)?;
        match e.l1 {
            0 => sums.0 += t,
            2 => sums.1 += t,
            _ => {}
        }
    }
    Ok(sums)
}

/// `Σ_{k=0}^{w−1} cos(2 l k π / w)`: `w` when `w | l`, else 0.
pub fn cosine_sum(w: u64, l: i64) -> f64 {
    (0..w)
        .map(|k| (2.0 * l as f64 * k as f64 * PI / w as f64).cos())
        .sum()
}
