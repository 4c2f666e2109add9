//! Exact normal-form arithmetic.
//!
//! A word is a list of syllables `X^n`. Normalization alternates three moves
//! until nothing applies: merge equal neighbours, reduce exponents
//! (`C^a = D^b = S² = Q²`, `V² = S`), and swap the leftmost out-of-order pair
//! using the commutation relations. `Q² = −1` is central, so every power of
//! it is collected in a single sign bit instead of being moved around.

use super::{Family, GroupElement, GroupParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    C,
    D,
    Q,
    S,
    V,
}

#[derive(Debug, Clone)]
pub struct Word<'p> {
    params: &'p GroupParams,
    syllables: Vec<(Letter, i64)>,
    /// Parity of the collected central factor `Q²`.
    central: bool,
}

impl<'p> Word<'p> {
    pub fn new(params: &'p GroupParams) -> Self {
        Self {
            params,
            syllables: Vec::new(),
            central: false,
        }
    }

    pub fn from_element(e: &GroupElement, params: &'p GroupParams) -> Self {
        let mut w = Self::new(params);
        w.push_element(e);
        w
    }

    pub fn push(&mut self, letter: Letter, exp: i64) -> &mut Self {
        if exp != 0 {
            self.syllables.push((letter, exp));
        }
        self
    }

    pub fn push_element(&mut self, e: &GroupElement) -> &mut Self {
        self.push(Letter::C, e.k1 as i64)
            .push(Letter::D, e.k2 as i64)
            .push(Letter::Q, e.l1 as i64)
            .push(Letter::S, e.l2 as i64)
            .push(Letter::V, e.m as i64)
    }

    /// Appends the inverse of `e` (reversed syllables, negated exponents).
    pub fn push_inverse(&mut self, e: &GroupElement) -> &mut Self {
        self.push(Letter::V, -(e.m as i64))
            .push(Letter::S, -(e.l2 as i64))
            .push(Letter::Q, -(e.l1 as i64))
            .push(Letter::D, -(e.k2 as i64))
            .push(Letter::C, -(e.k1 as i64))
    }

    fn modulus(&self, l: Letter) -> i64 {
        match l {
            Letter::C => self.params.a as i64,
            Letter::D => self.params.b as i64,
            Letter::Q | Letter::S | Letter::V => 2,
        }
    }

    /// One merge pass. Returns whether anything changed.
    fn merge(&mut self) -> bool {
        let mut changed = false;
        let mut out: Vec<(Letter, i64)> = Vec::with_capacity(self.syllables.len());
        for &(l, n) in &self.syllables {
            match out.last_mut() {
                Some((last, m)) if *last == l => {
                    *m += n;
                    changed = true;
                }
                _ => out.push((l, n)),
            }
        }
        out.retain(|&(_, n)| n != 0);
        self.syllables = out;
        changed
    }

    /// Brings every exponent into its canonical range.
    fn reduce(&mut self) -> bool {
        let mut changed = false;
        let mut out = Vec::with_capacity(self.syllables.len() + 1);
        for &(l, n) in &self.syllables {
            let m = self.modulus(l);
            let (q, r) = (n.div_euclid(m), n.rem_euclid(m));
            if q != 0 {
                changed = true;
            }
            match l {
                // V² = S
                Letter::V => {
                    if q != 0 {
                        out.push((Letter::S, q));
                    }
                }
                // C^a = D^b = Q² = S² = central
                _ => {
                    if q.rem_euclid(2) == 1 {
                        self.central = !self.central;
                    }
                }
            }
            if r != 0 {
                out.push((l, r));
            }
        }
        self.syllables = out;
        changed
    }

    /// Swaps the leftmost out-of-order pair `X^p Y^q` (`X > Y`) into
    /// `Y^q' X^p`. Assumes exponents are reduced.
    fn swap_first_inversion(&mut self) -> bool {
        let rho = self.params.rho.unwrap_or(1) as i64;
        for i in 0..self.syllables.len().saturating_sub(1) {
            let (x, p) = self.syllables[i];
            let (y, q) = self.syllables[i + 1];
            if x <= y {
                continue;
            }
            let odd = p.rem_euclid(2) == 1;
            let q2 = match (x, y) {
                // c s = s c⁻¹
                (Letter::S, Letter::C) if odd => -q,
                // d q = q d⁻¹
                (Letter::Q, Letter::D) if odd => -q,
                // V C = C^ρ V
                (Letter::V, Letter::C) if odd => q * rho,
                // V Q = Q³ V
                (Letter::V, Letter::Q) if odd => 3 * q,
                _ => q,
            };
            self.syllables[i] = (y, q2);
            self.syllables[i + 1] = (x, p);
            return true;
        }
        false
    }

    pub fn normalize(&mut self) {
        let bound = 64 + 16 * self.syllables.len().pow(2);
        for _ in 0..bound {
            if self.merge() || self.reduce() || self.swap_first_inversion() {
                continue;
            }
            return;
        }
        unreachable!("normal form rewriting did not terminate");
    }

    /// Normalizes and reads off the exponent tuple.
    pub fn into_element(mut self) -> GroupElement {
        self.normalize();
        let mut e = GroupElement::IDENTITY;
        for &(l, n) in &self.syllables {
            match l {
                Letter::C => e.k1 = n as u32,
                Letter::D => e.k2 = n as u32,
                Letter::Q => e.l1 = n as u8,
                Letter::S => e.l2 = n as u8,
                Letter::V => e.m = n as u8,
            }
        }
        if self.central {
            e.l1 = (e.l1 + 2) % 4;
        }
        e
    }
}

fn check(e: &GroupElement, params: &GroupParams) -> Result<()> {
    if !params.is_valid(e) {
        return Err(Error::Domain(format!(
            "{e} is not a normal form for {params}"
        )));
    }
    if params.family == Family::G8 {
        params.rho_or_err()?;
    }
    Ok(())
}

pub fn nf_multiply(
    e1: &GroupElement,
    e2: &GroupElement,
    params: &GroupParams,
) -> Result<GroupElement> {
    check(e1, params)?;
    check(e2, params)?;
    let mut w = Word::from_element(e1, params);
    w.push_element(e2);
    Ok(w.into_element())
}

pub fn nf_inverse(e: &GroupElement, params: &GroupParams) -> Result<GroupElement> {
    check(e, params)?;
    let mut w = Word::new(params);
    w.push_inverse(e);
    Ok(w.into_element())
}

/// `e^n` for any integer `n`.
pub fn nf_power(e: &GroupElement, n: i64, params: &GroupParams) -> Result<GroupElement> {
    check(e, params)?;
    let base = if n < 0 { nf_inverse(e, params)? } else { *e };
    let mut acc = GroupElement::IDENTITY;
    let mut sq = base;
    let mut k = n.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc = nf_multiply(&acc, &sq, params)?;
        }
        sq = nf_multiply(&sq, &sq, params)?;
        k >>= 1;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupParams;

    fn el(k1: u32, k2: u32, l1: u8, l2: u8, m: u8) -> GroupElement {
        GroupElement::new(k1, k2, l1, l2, m)
    }

    fn word_eval(params: &GroupParams, letters: &[(Letter, i64)]) -> GroupElement {
        let mut w = Word::new(params);
        for &(l, n) in letters {
            w.push(l, n);
        }
        w.into_element()
    }

    #[test]
    fn q_times_d_in_h53() {
        let p = GroupParams::h4(5, 3).unwrap();
        assert_eq!(
            nf_multiply(&el(0, 0, 1, 0, 0), &el(0, 1, 0, 0, 0), &p).unwrap(),
            el(0, 2, 3, 0, 0)
        );
    }

    #[test]
    fn inverse_of_c() {
        let p = GroupParams::h4(5, 3).unwrap();
        assert_eq!(
            nf_inverse(&el(1, 0, 0, 0, 0), &p).unwrap(),
            el(4, 0, 2, 0, 0)
        );
        assert_eq!(
            nf_inverse(&GroupElement::IDENTITY, &p).unwrap(),
            GroupElement::IDENTITY
        );
    }

    #[test]
    fn defining_relations_hold_as_words() {
        use Letter::*;
        let p = GroupParams::g8(13, 3).unwrap();
        let rho = p.rho.unwrap() as i64;
        let id = GroupElement::IDENTITY;
        let eq = |lhs: &[(Letter, i64)], rhs: &[(Letter, i64)]| {
            assert_eq!(word_eval(&p, lhs), word_eval(&p, rhs), "{lhs:?} = {rhs:?}");
        };
        eq(&[(C, 1), (D, 1)], &[(D, 1), (C, 1)]);
        eq(&[(C, 1), (Q, 1)], &[(Q, 1), (C, 1)]);
        eq(&[(D, 1), (S, 1)], &[(S, 1), (D, 1)]);
        eq(&[(Q, 1), (S, 1)], &[(S, 1), (Q, 1)]);
        eq(&[(C, 1), (S, 1)], &[(S, 1), (C, 25)]);
        eq(&[(D, 1), (Q, 1)], &[(Q, 1), (D, 5)]);
        eq(&[(C, 13)], &[(Q, 2)]);
        eq(&[(D, 3)], &[(Q, 2)]);
        eq(&[(S, 2)], &[(Q, 2)]);
        eq(&[(V, 1), (C, 1)], &[(C, rho), (V, 1)]);
        eq(&[(C, 1), (V, 1)], &[(V, 1), (C, 26 - rho)]);
        eq(&[(V, 1), (D, 1)], &[(D, 1), (V, 1)]);
        eq(&[(V, 1), (Q, 1)], &[(Q, 3), (V, 1)]);
        eq(&[(V, 1), (S, 1)], &[(S, 1), (V, 1)]);
        eq(&[(V, 2)], &[(S, 1)]);
        assert_eq!(word_eval(&p, &[(V, 8)]), id);
        assert_eq!(word_eval(&p, &[(Q, 4)]), id);
        assert_eq!(word_eval(&p, &[(S, 4)]), id);
    }

    #[test]
    fn conjugating_qs_by_v() {
        let p = GroupParams::g8(5, 3).unwrap();
        let v = el(0, 0, 0, 0, 1);
        let qs = el(0, 0, 1, 1, 0);
        let vqs = nf_multiply(&v, &qs, &p).unwrap();
        let conj = nf_multiply(&vqs, &nf_inverse(&v, &p).unwrap(), &p).unwrap();
        assert_eq!(conj, el(0, 0, 3, 1, 0));
    }

    #[test]
    fn powers() {
        let p = GroupParams::g8(5, 3).unwrap();
        let v = el(0, 0, 0, 0, 1);
        assert_eq!(nf_power(&v, 2, &p).unwrap(), el(0, 0, 0, 1, 0));
        assert_eq!(nf_power(&v, 8, &p).unwrap(), GroupElement::IDENTITY);
        assert_eq!(nf_power(&v, -1, &p).unwrap(), nf_inverse(&v, &p).unwrap());
    }

    #[test]
    fn rejects_out_of_range_tuples() {
        let p = GroupParams::h4(5, 3).unwrap();
        assert!(nf_multiply(&el(5, 0, 0, 0, 0), &GroupElement::IDENTITY, &p).is_err());
        assert!(nf_multiply(&el(0, 0, 0, 0, 1), &GroupElement::IDENTITY, &p).is_err());
    }
}
