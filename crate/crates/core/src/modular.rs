//! Number theory behind the exponent `ρ`: square roots of −1 modulo prime
//! powers, their CRT combination, and the congruence checks used when
//! evaluating the cubic Molien coefficient.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub base: u64,
    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, e)| p.pow(e))
    }
}

/// Trial division.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n < 2 {
        return Err(Error::Domain(format!("cannot factorize {n}")));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { base: n, factors })
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).map(|f| f.factors == [(n, 1)]).unwrap_or(false)
}

/// Membership in 𝔸: every prime factor is 1 mod 4.
pub fn is_in_a(n: u64) -> bool {
    match factorize(n) {
        Ok(f) => f.factors.iter().all(|&(p, _)| p % 4 == 1),
        Err(_) => false,
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Modular inverse via the extended Euclidean algorithm.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Smallest `x` in `(0, p)` with `x² ≡ −1 (mod p)`.
pub fn sqrt_minus_one_prime(p: u64) -> Result<u64> {
    if !is_prime(p) || p % 4 != 1 {
        return Err(Error::Domain(format!(
            "{p} is not a prime congruent to 1 mod 4"
        )));
    }
    (1..p)
        .find(|&x| mul_mod(x, x, p) == p - 1)
        .ok_or_else(|| Error::Domain(format!("no square root of -1 modulo {p}")))
}

/// Wilson's construction `((p − 1)/2)! mod p`, a square root of −1 for
/// primes `p ≡ 1 (mod 4)`.
pub fn wilson_sqrt_minus_one(p: u64) -> Result<u64> {
    if !is_prime(p) || p % 4 != 1 {
        return Err(Error::Domain(format!(
            "{p} is not a prime congruent to 1 mod 4"
        )));
    }
    Ok((1..=(p - 1) / 2).fold(1, |acc, k| mul_mod(acc, k, p)))
}

/// Lifts a root of `x² + 1` modulo `p` to a root modulo `p^s` by Newton
/// steps, one power of `p` at a time.
pub fn hensel_lift(root: u64, p: u64, s: u32) -> Result<u64> {
    if s == 0 {
        return Err(Error::Domain("exponent must be at least 1".into()));
    }
    if p < 3 || p.is_multiple_of(2) {
        return Err(Error::Domain(format!("modulus {p} must be an odd prime")));
    }
    let root = root % p;
    if !(mul_mod(root, root, p) + 1).is_multiple_of(p) {
        return Err(Error::Domain(format!("{root}^2 is not -1 modulo {p}")));
    }
    if (2 * root).is_multiple_of(p) {
        return Err(Error::HenselLift { root, p });
    }
    let mut x = root;
    let mut modulus = p;
    for _ in 1..s {
        modulus = modulus
            .checked_mul(p)
            .ok_or_else(|| Error::Domain(format!("{p}^{s} overflows")))?;
        let fx = (mul_mod(x, x, modulus) + 1) % modulus;
        // f'(x) = 2x is a unit modulo every power of p.
        let inv = inv_mod(mul_mod(2, x, modulus), modulus).ok_or(Error::HenselLift { root, p })?;
        let step = mul_mod(fx, inv, modulus);
        x = (x + modulus - step) % modulus;
    }
    Ok(x)
}

/// Chinese remainder combination. The result lies in `[0, ∏ moduli)`.
pub fn crt_combine(residues: &[u64], moduli: &[u64]) -> Result<u64> {
    if residues.len() != moduli.len() || moduli.is_empty() {
        return Err(Error::Domain(
            "residues and moduli must be non-empty and of equal length".into(),
        ));
    }
    for (i, &m) in moduli.iter().enumerate() {
        if m == 0 {
            return Err(Error::Domain("modulus 0".into()));
        }
        for &n in &moduli[i + 1..] {
            if gcd(m, n) != 1 {
                return Err(Error::NotCoprime(m, n));
            }
        }
    }
    let mut x = 0u64;
    let mut m = 1u64;
    for (&r, &n) in residues.iter().zip(moduli) {
        let r = r % n;
        // x + m t ≡ r (mod n)
        let inv = inv_mod(m % n, n).expect("coprime moduli");
        let diff = (r + n - x % n) % n;
        let t = mul_mod(diff, inv, n);
        let next = m
            .checked_mul(n)
            .ok_or_else(|| Error::Domain("product of moduli overflows".into()))?;
        x = ((x as u128 + m as u128 * t as u128) % next as u128) as u64;
        m = next;
    }
    Ok(x)
}

/// A pair `(a, ρ)` with `ρ` odd, `0 < ρ < 2a` and `ρ² ≡ −1 (mod a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RhoWitness {
    pub a: u64,
    pub rho: u64,
}

impl RhoWitness {
    pub fn new(a: u64, rho: u64) -> Result<Self> {
        if a < 2 || rho == 0 || rho >= 2 * a || rho.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "ρ = {rho} must be odd and in (0, {})",
                2 * a
            )));
        }
        if !(mul_mod(rho, rho, a) + 1).is_multiple_of(a) {
            return Err(Error::Domain(format!("{rho}^2 is not -1 modulo {a}")));
        }
        Ok(Self { a, rho })
    }
}

/// All square roots of −1 modulo `a` in `[0, a)`, assembled from the prime
/// power roots `±x_i` by CRT.
pub fn sqrt_minus_one_all(a: u64) -> Result<Vec<u64>> {
    if !is_in_a(a) {
        return Err(Error::NotInA(a));
    }
    let fact = factorize(a)?;
    let mut lifted = Vec::with_capacity(fact.factors.len());
    for &(p, e) in &fact.factors {
        let base = sqrt_minus_one_prime(p)?;
        lifted.push(hensel_lift(base, p, e)?);
    }
    let moduli: Vec<u64> = fact.prime_powers().collect();
    let mut roots = Vec::with_capacity(1 << moduli.len());
    for signs in 0u32..(1 << moduli.len()) {
        let residues: Vec<u64> = lifted
            .iter()
            .zip(&moduli)
            .enumerate()
            .map(|(i, (&x, &m))| if signs >> i & 1 == 1 { m - x } else { x })
            .collect();
        roots.push(crt_combine(&residues, &moduli)?);
    }
    roots.sort_unstable();
    roots.dedup();
    Ok(roots)
}

/// The smallest odd `ρ ∈ (0, 2a)` with `ρ² ≡ −1 (mod a)`.
pub fn rho_for(a: u64) -> Result<RhoWitness> {
    let rho = sqrt_minus_one_all(a)?
        .into_iter()
        .map(|r| if r % 2 == 1 { r } else { r + a })
        .min()
        .ok_or(Error::NotInA(a))?;
    RhoWitness::new(a, rho)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceItem {
    /// 1-based item number.
    pub item: u8,
    pub expression: &'static str,
    /// The expression reduced modulo `2a`.
    pub residue: u64,
    pub vanishes: bool,
    /// Whether the expected pattern says this item vanishes for `(a, ρ)`.
    pub expected_vanishes: bool,
}

impl CongruenceItem {
    pub fn holds(&self) -> bool {
        self.vanishes == self.expected_vanishes
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub a: u64,
    pub rho: u64,
    pub items: Vec<CongruenceItem>,
}

impl CongruenceReport {
    pub fn all_hold(&self) -> bool {
        self.items.iter().all(CongruenceItem::holds)
    }
}

/// Linear forms `c·ρ + k` checked modulo `2a`.
pub const CONGRUENCE_FORMS: [(&str, i64, i64); 10] = [
    ("ρ − 1", 1, -1),
    ("2(ρ − 1)", 2, -2),
    ("ρ + 1", 1, 1),
    ("2(ρ + 1)", 2, 2),
    ("2ρ", 2, 0),
    ("4ρ", 4, 0),
    ("ρ − 3", 1, -3),
    ("3ρ − 1", 3, -1),
    ("ρ + 3", 1, 3),
    ("3ρ + 1", 3, 1),
];

pub fn congruence_suite(w: &RhoWitness) -> CongruenceReport {
    let modulus = 2 * w.a as i128;
    let special = w.a == 5 && w.rho == 3;
    let items = CONGRUENCE_FORMS
        .iter()
        .enumerate()
        .map(|(i, &(expression, c, k))| {
            let residue = (c as i128 * w.rho as i128 + k as i128).rem_euclid(modulus) as u64;
            let item = i as u8 + 1;
            CongruenceItem {
                item,
                expression,
                residue,
                vanishes: residue == 0,
                expected_vanishes: special && (item == 7 || item == 10),
            }
        })
        .collect();
    CongruenceReport {
        a: w.a,
        rho: w.rho,
        items,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_sqrt_minus_one(m: u64) -> Vec<u64> {
        (0..m).filter(|&x| (x * x + 1) % m == 0).collect()
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(65).unwrap().factors, vec![(5, 1), (13, 1)]);
        assert_eq!(factorize(25).unwrap().factors, vec![(5, 2)]);
        assert_eq!(
            factorize(120).unwrap().factors,
            vec![(2, 3), (3, 1), (5, 1)]
        );
        assert!(factorize(1).is_err());
        assert!(factorize(0).is_err());
    }

    #[test]
    fn membership_in_a() {
        assert!(is_in_a(5));
        assert!(is_in_a(65));
        assert!(!is_in_a(3));
        let listed = [5, 13, 17, 25, 29, 37, 41, 53, 61, 65];
        let found: Vec<u64> = (2..=65).filter(|&n| is_in_a(n)).collect();
        assert_eq!(found, listed);
    }

    #[test]
    fn prime_square_roots() {
        assert!(matches!(sqrt_minus_one_prime(5).unwrap(), 2 | 3));
        assert!(matches!(sqrt_minus_one_prime(13).unwrap(), 5 | 8));
        assert!(matches!(sqrt_minus_one_prime(17).unwrap(), 4 | 13));
        assert!(sqrt_minus_one_prime(7).is_err());
        assert!(sqrt_minus_one_prime(21).is_err());
        for p in (5..2000).filter(|&p| is_prime(p) && p % 4 == 1) {
            let w = wilson_sqrt_minus_one(p).unwrap();
            assert_eq!(mul_mod(w, w, p), p - 1, "p = {p}");
            let x = sqrt_minus_one_prime(p).unwrap();
            assert!(x == w || x == p - w);
        }
    }

    #[test]
    fn hensel_examples() {
        assert_eq!(hensel_lift(2, 5, 2).unwrap(), 7);
        assert_eq!(hensel_lift(2, 5, 1).unwrap(), 2);
        let x = hensel_lift(5, 13, 2).unwrap();
        let brute: Vec<u64> = brute_sqrt_minus_one(169)
            .into_iter()
            .filter(|r| r % 13 == 5)
            .collect();
        assert_eq!(brute, vec![x]);
        assert!(hensel_lift(1, 5, 2).is_err());
    }

    #[test]
    fn hensel_every_intermediate_power() {
        for &(p, s) in &[(5u64, 6u32), (13, 4), (17, 4), (29, 3)] {
            let root = sqrt_minus_one_prime(p).unwrap();
            let mut m = 1;
            for k in 1..=s {
                m *= p;
                let x = hensel_lift(root, p, k).unwrap();
                assert_eq!((mul_mod(x, x, m) + 1) % m, 0);
                assert_eq!(x % p, root);
            }
        }
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_combine(&[2, 5], &[5, 13]).unwrap(), 57);
        assert_eq!(crt_combine(&[0], &[7]).unwrap(), 0);
        assert_eq!(crt_combine(&[1, 1], &[3, 5]).unwrap(), 1);
        assert_eq!(crt_combine(&[1, 1], &[6, 4]), Err(Error::NotCoprime(6, 4)));
        assert_eq!((57 * 57 + 1) % 65, 0);
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho_for(5).unwrap().rho, 3);
        assert_eq!(rho_for(13).unwrap().rho, 5);
        assert_eq!(rho_for(25).unwrap().rho, 7);
        assert_eq!(rho_for(3), Err(Error::NotInA(3)));
    }

    #[test]
    fn all_roots_match_brute_force() {
        for a in (5..=400).filter(|&a| is_in_a(a)) {
            assert_eq!(
                sqrt_minus_one_all(a).unwrap(),
                brute_sqrt_minus_one(a),
                "a = {a}"
            );
        }
    }

    #[test]
    fn congruence_examples() {
        let r = congruence_suite(&rho_for(5).unwrap());
        assert!(r.all_hold());
        let vanishing: Vec<u8> = r
            .items
            .iter()
            .filter(|i| i.vanishes)
            .map(|i| i.item)
            .collect();
        assert_eq!(vanishing, vec![7, 10]);
        for a in [13, 25] {
            let r = congruence_suite(&rho_for(a).unwrap());
            assert!(r.all_hold());
            assert!(r.items.iter().all(|i| !i.vanishes));
        }
    }

    #[test]
    fn witness_validation() {
        assert!(RhoWitness::new(5, 3).is_ok());
        assert!(RhoWitness::new(5, 2).is_err());
        assert!(RhoWitness::new(5, 13).is_err());
        assert!(RhoWitness::new(5, 1).is_err());
    }
}
