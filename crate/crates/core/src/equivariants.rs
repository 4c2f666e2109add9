//! Homogeneous equivariant polynomial maps: the nullspace solver, the
//! canonical cubic basis `E1 … E8`, and equivariance checks.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{canonical_basis, nullspace_with_floor, DenseMatrix};
use crate::poly::{expand_substituted, MonomialBasis, PolyMap};
use crate::scalar::Scalar;
use std::sync::Arc;

/// `S[m', m]` = coefficient of monomial `m'` in `m(g x)`.
fn substitution_matrix(basis: &MonomialBasis, g: &DenseMatrix<f64>) -> DMatrix<f64> {
    let len = basis.len();
    let mut s = DMatrix::zeros(len, len);
    for (m, exps) in basis.monomials().iter().enumerate() {
        for (e2, v) in expand_substituted(g, exps) {
            let m2 = basis.position(&e2).expect("homogeneous expansion");
            s[(m2, m)] = v;
        }
    }
    s
}

/// Intersects the nullspaces of `constraints` one at a time, so each SVD
/// only sees the surviving subspace.
fn common_nullspace(
    dim: usize,
    constraints: impl Iterator<Item = DMatrix<f64>>,
    tol: f64,
    context: &'static str,
) -> Result<DMatrix<f64>> {
    let mut basis = DMatrix::identity(dim, dim);
    for a in constraints {
        if basis.ncols() == 0 {
            break;
        }
        let reduced = &a * &basis;
        let ns = nullspace_with_floor(&reduced, tol, 1.0, context)?;
        basis = &basis * &ns.basis;
    }
    Ok(basis)
}

fn check_generators(generators: &[DenseMatrix<f64>], n: usize) -> Result<()> {
    if generators.is_empty() {
        return Err(Error::Domain("no generators".into()));
    }
    if let Some(g) = generators.iter().find(|g| g.dim() != n) {
        return Err(Error::Domain(format!(
            "generator of size {} on ℝ^{n}",
            g.dim()
        )));
    }
    Ok(())
}

/// Orthonormal basis of the degree-`d` maps `P` with `P(g x) = g P(x)` for
/// every generator. The basis is canonical (independent of SVD details).
pub fn equivariant_basis(
    generators: &[DenseMatrix<f64>],
    n: usize,
    d: u32,
    tol: f64,
) -> Result<Vec<PolyMap<f64>>> {
    check_generators(generators, n)?;
    let basis = Arc::new(MonomialBasis::new(n, d));
    let len = basis.len();
    let constraints = generators.iter().map(|g| {
        // Unknown (o, m) at o·len + m; row (o', m') is the (o', m') coefficient
        // of P(g x) − g P(x).
        let s = substitution_matrix(&basis, g);
        let mut a = DMatrix::zeros(n * len, n * len);
        for o in 0..n {
            a.view_mut((o * len, o * len), (len, len)).copy_from(&s);
        }
        for o2 in 0..n {
            for o in 0..n {
                let gv = g[(o2, o)];
                if gv != 0.0 {
                    for m in 0..len {
                        a[(o2 * len + m, o * len + m)] -= gv;
                    }
                }
            }
        }
        a
    });
    let null = common_nullspace(n * len, constraints, tol, "equivariant basis")?;
    canonical_basis(&null)
        .into_iter()
        .map(|v| PolyMap::from_coeffs(basis.clone(), v))
        .collect()
}

/// Dimension of the degree-`d` invariant polynomials.
pub fn invariant_dimension(
    generators: &[DenseMatrix<f64>],
    n: usize,
    d: u32,
    tol: f64,
) -> Result<usize> {
    check_generators(generators, n)?;
    let basis = MonomialBasis::new(n, d);
    let len = basis.len();
    let constraints = generators
        .iter()
        .map(|g| substitution_matrix(&basis, g) - DMatrix::identity(len, len));
    Ok(common_nullspace(len, constraints, tol, "invariant basis")?.ncols())
}

type Row = &'static [(i64, &'static [usize])];

const E5: [Row; 8] = [
    &[
        (-1, &[3, 5, 7]),
        (-1, &[3, 6, 8]),
        (-1, &[4, 5, 8]),
        (1, &[4, 6, 7]),
    ],
    &[
        (1, &[3, 5, 8]),
        (-1, &[3, 6, 7]),
        (-1, &[4, 5, 7]),
        (-1, &[4, 6, 8]),
    ],
    &[
        (-1, &[1, 5, 7]),
        (-1, &[1, 6, 8]),
        (1, &[2, 5, 8]),
        (-1, &[2, 6, 7]),
    ],
    &[
        (-1, &[1, 5, 8]),
        (1, &[1, 6, 7]),
        (-1, &[2, 5, 7]),
        (-1, &[2, 6, 8]),
    ],
    &[
        (1, &[1, 3, 7]),
        (1, &[1, 4, 8]),
        (-1, &[2, 3, 8]),
        (1, &[2, 4, 7]),
    ],
    &[
        (1, &[1, 3, 8]),
        (-1, &[1, 4, 7]),
        (1, &[2, 3, 7]),
        (1, &[2, 4, 8]),
    ],
    &[
        (1, &[1, 3, 5]),
        (-1, &[1, 4, 6]),
        (1, &[2, 3, 6]),
        (1, &[2, 4, 5]),
    ],
    &[
        (1, &[1, 3, 6]),
        (1, &[1, 4, 5]),
        (-1, &[2, 3, 5]),
        (1, &[2, 4, 6]),
    ],
];

const E6: [Row; 8] = [
    &[
        (-1, &[1, 3, 6]),
        (1, &[1, 4, 5]),
        (1, &[2, 3, 5]),
        (1, &[2, 4, 6]),
    ],
    &[
        (1, &[1, 3, 5]),
        (1, &[1, 4, 6]),
        (1, &[2, 3, 6]),
        (-1, &[2, 4, 5]),
    ],
    &[
        (-1, &[1, 3, 8]),
        (1, &[1, 4, 7]),
        (1, &[2, 3, 7]),
        (1, &[2, 4, 8]),
    ],
    &[
        (1, &[1, 3, 7]),
        (1, &[1, 4, 8]),
        (1, &[2, 3, 8]),
        (-1, &[2, 4, 7]),
    ],
    &[
        (1, &[3, 5, 8]),
        (1, &[3, 6, 7]),
        (1, &[4, 5, 7]),
        (-1, &[4, 6, 8]),
    ],
    &[
        (1, &[3, 5, 7]),
        (-1, &[3, 6, 8]),
        (-1, &[4, 5, 8]),
        (-1, &[4, 6, 7]),
    ],
    &[
        (-1, &[1, 5, 8]),
        (-1, &[1, 6, 7]),
        (-1, &[2, 5, 7]),
        (1, &[2, 6, 8]),
    ],
    &[
        (-1, &[1, 5, 7]),
        (1, &[1, 6, 8]),
        (1, &[2, 5, 8]),
        (1, &[2, 6, 7]),
    ],
];

const E7: [Row; 8] = [
    &[(-2, &[5, 7, 8]), (-1, &[6, 7, 7]), (1, &[6, 8, 8])],
    &[(-1, &[5, 7, 7]), (1, &[5, 8, 8]), (2, &[6, 7, 8])],
    &[(1, &[5, 5, 8]), (2, &[5, 6, 7]), (-1, &[6, 6, 8])],
    &[(1, &[5, 5, 7]), (-2, &[5, 6, 8]), (-1, &[6, 6, 7])],
    &[(1, &[1, 1, 4]), (2, &[1, 2, 3]), (-1, &[2, 2, 4])],
    &[(-1, &[1, 1, 3]), (2, &[1, 2, 4]), (1, &[2, 2, 3])],
    &[(2, &[1, 3, 4]), (1, &[2, 3, 3]), (-1, &[2, 4, 4])],
    &[(-1, &[1, 3, 3]), (1, &[1, 4, 4]), (2, &[2, 3, 4])],
];

const E8: [Row; 8] = [
    &[(1, &[3, 3, 8]), (-2, &[3, 4, 7]), (-1, &[4, 4, 8])],
    &[(-1, &[3, 3, 7]), (-2, &[3, 4, 8]), (1, &[4, 4, 7])],
    &[(1, &[1, 1, 6]), (-2, &[1, 2, 5]), (-1, &[2, 2, 6])],
    &[(-1, &[1, 1, 5]), (-2, &[1, 2, 6]), (1, &[2, 2, 5])],
    &[(2, &[1, 7, 8]), (1, &[2, 7, 7]), (-1, &[2, 8, 8])],
    &[(1, &[1, 7, 7]), (-1, &[1, 8, 8]), (-2, &[2, 7, 8])],
    &[(-2, &[3, 5, 6]), (-1, &[4, 5, 5]), (1, &[4, 6, 6])],
    &[(-1, &[3, 5, 5]), (1, &[3, 6, 6]), (2, &[4, 5, 6])],
];

/// For `E1 … E4`, row block `k` (coordinates `2k+1, 2k+2`) is scaled by the
/// squared norm of block `PAIRING[i][k]`.
const PAIRING: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 1, 0], [3, 2, 0, 1]];

/// Rows whose sign is flipped between the transcribed table and the
/// equivariant maps (`E6`, `E7`: rows 1–4; `E8`: rows 5–8).
const SIGN_FIXES: [(usize, [usize; 4]); 3] =
    [(6, [0, 1, 2, 3]), (7, [0, 1, 2, 3]), (8, [4, 5, 6, 7])];

/// `E_i` exactly as transcribed from the coefficient table, `1 ≤ i ≤ 8`.
/// `E6 … E8` are not `V`-equivariant in this form; see [`canonical_e`].
pub fn table_e<T: Scalar>(i: usize) -> Result<PolyMap<T>> {
    match i {
        1..=4 => {
            let mut p = PolyMap::zeros(8, 3);
            for o in 0..8 {
                let block = PAIRING[i - 1][o / 2];
                for v in [2 * block, 2 * block + 1] {
                    let mut e = vec![0; 8];
                    e[v] += 2;
                    e[o] += 1;
                    p.add(o, &e, T::one())?;
                }
            }
            Ok(p)
        }
        5 => PolyMap::from_products(8, 3, &E5),
        6 => PolyMap::from_products(8, 3, &E6),
        7 => PolyMap::from_products(8, 3, &E7),
        8 => PolyMap::from_products(8, 3, &E8),
        _ => Err(Error::OutOfRange { index: i, max: 8 }),
    }
}

/// The cubic equivariants `E_i` of `G_{5,b}` (`E1 … E5` for every `a`),
/// with integer coefficients.
pub fn canonical_e<T: Scalar>(i: usize) -> Result<PolyMap<T>> {
    let p = table_e::<T>(i)?;
    let Some((_, rows)) = SIGN_FIXES.iter().find(|(j, _)| *j == i) else {
        return Ok(p);
    };
    let len = p.basis().len();
    let mut coeffs = p.coeffs().to_vec();
    for &r in rows {
        coeffs[r * len..(r + 1) * len]
            .iter_mut()
            .for_each(|c| *c = -*c);
    }
    PolyMap::from_coeffs(p.basis().clone(), coeffs)
}

/// `E1 … E_count`.
pub fn canonical_family<T: Scalar>(count: usize) -> Result<Vec<PolyMap<T>>> {
    (1..=count).map(canonical_e).collect()
}

/// Number of canonical cubic equivariants for a given `a`: 8 when `a = 5`,
/// otherwise 5.
pub fn canonical_count(a: u64) -> usize {
    if a == 5 {
        8
    } else {
        5
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// 64 Halton points mapped into the cube `[−1, 1]ⁿ` and scaled into the
/// unit ball.
pub fn sample_points(n: usize) -> Vec<Vec<f64>> {
    assert!(n <= PRIMES.len(), "at most {} dimensions", PRIMES.len());
    let scale = 1.0 / (n as f64).sqrt();
    (1..=64u64)
        .map(|i| {
            (0..n)
                .map(|k| (2.0 * radical_inverse(i, PRIMES[k]) - 1.0) * scale)
                .collect()
        })
        .collect()
}

/// `max_x ‖P(g x) − g P(x)‖` over [`sample_points`].
pub fn equivariance_residual(p: &PolyMap<f64>, g: &DenseMatrix<f64>) -> f64 {
    sample_points(p.n())
        .iter()
        .map(|x| {
            let lhs = p.evaluate(&g.mul_vec(x));
            let rhs = g.mul_vec(&p.evaluate(x));
            lhs.iter()
                .zip(&rhs)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Coefficient-level check `P ∘ g = g ∘ P`, exact for integer or rational
/// scalars.
pub fn is_exactly_equivariant<T: Scalar>(p: &PolyMap<T>, g: &DenseMatrix<T>) -> bool {
    p.compose_linear(g) == p.left_apply(g)
}

/// Orthonormal basis (columns) of the coefficient span.
fn span_basis(maps: &[PolyMap<f64>]) -> DMatrix<f64> {
    let Some(first) = maps.first() else {
        return DMatrix::zeros(0, 0);
    };
    let rows = first.coeffs().len();
    let a = DMatrix::from_fn(rows, maps.len(), |r, c| maps[c].coeffs()[r]);
    let svd = a.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-10 * smax.max(1e-300))
        .collect();
    DMatrix::from_fn(rows, keep.len(), |r, c| u[(r, keep[c])])
}

/// Largest residual when projecting the columns of `from` onto `onto`.
fn projection_residual(from: &DMatrix<f64>, onto: &DMatrix<f64>) -> f64 {
    if from.ncols() == 0 {
        return 0.0;
    }
    let proj = onto * (onto.transpose() * from);
    (from - proj)
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

/// Symmetric distance between two coefficient spans (0 when equal, ≈1 when
/// a direction is missing). Infinite if the ranks differ.
pub fn span_distance(a: &[PolyMap<f64>], b: &[PolyMap<f64>]) -> f64 {
    let (qa, qb) = (span_basis(a), span_basis(b));
    if qa.ncols() != qb.ncols() || (qa.ncols() > 0 && qa.nrows() != qb.nrows()) {
        return f64::INFINITY;
    }
    projection_residual(&qa, &qb).max(projection_residual(&qb, &qa))
}

pub fn span_match(a: &[PolyMap<f64>], b: &[PolyMap<f64>], tol: f64) -> bool {
    span_distance(a, b) < tol
}

/// Whether `span(small) ⊂ span(big)`.
pub fn span_contains(big: &[PolyMap<f64>], small: &[PolyMap<f64>], tol: f64) -> bool {
    projection_residual(&span_basis(small), &span_basis(big)) < tol
}

/// Dimension of the coefficient span.
pub fn span_rank(maps: &[PolyMap<f64>]) -> usize {
    span_basis(maps).ncols()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{generator_matrices_g, signed_permutations_g, GroupParams};
    use crate::linalg::DEFAULT_RANK_TOL;
    use num_rational::Rational64;

    fn gens(a: u64, b: u64) -> Vec<DenseMatrix<f64>> {
        generator_matrices_g::<f64>(&GroupParams::g8(a, b).unwrap())
            .unwrap()
            .to_vec()
    }

    #[test]
    fn table_evaluations() {
        let e1 = canonical_e::<f64>(1).unwrap();
        let mut x = vec![0.0; 8];
        x[0] = 1.0;
        assert_eq!(e1.evaluate(&x)[0], 1.0);
        assert!(canonical_e::<f64>(5)
            .unwrap()
            .evaluate(&x)
            .iter()
            .all(|&v| v == 0.0));
        let mut y = vec![0.0; 8];
        y[7] = 1.0;
        assert!(canonical_e::<f64>(7)
            .unwrap()
            .evaluate(&y)
            .iter()
            .all(|&v| v == 0.0));
        let mut z = vec![0.0; 8];
        z[0] = 1.0;
        z[1] = 1.0;
        assert_eq!(
            e1.evaluate(&z),
            vec![2.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        );
        assert!(matches!(
            canonical_e::<f64>(9),
            Err(Error::OutOfRange { .. })
        ));
        assert!(canonical_e::<f64>(0).is_err());
    }

    #[test]
    fn exact_equivariance_under_signed_permutations() {
        let [q, s, v] = signed_permutations_g::<Rational64>();
        for i in 1..=8 {
            let e = canonical_e::<Rational64>(i).unwrap();
            for g in [&q, &s, &v] {
                assert!(is_exactly_equivariant(&e, g), "E{i}");
            }
        }
        // The transcribed signs of E6..E8 break V (and only V).
        for i in 6..=8 {
            let t = table_e::<Rational64>(i).unwrap();
            assert!(is_exactly_equivariant(&t, &q) && is_exactly_equivariant(&t, &s));
            assert!(!is_exactly_equivariant(&t, &v), "E{i}");
        }
    }

    #[test]
    fn residuals_on_g53() {
        let g = gens(5, 3);
        for i in 1..=8 {
            let e = canonical_e::<f64>(i).unwrap();
            for m in &g {
                assert!(equivariance_residual(&e, m) < 1e-10, "E{i}");
            }
        }
        let v = &g[4];
        assert!(equivariance_residual(&table_e::<f64>(6).unwrap(), v) > 1e-2);
    }

    #[test]
    fn solver_small_degrees() {
        let g = gens(5, 3);
        assert!(equivariant_basis(&g, 8, 2, DEFAULT_RANK_TOL)
            .unwrap()
            .is_empty());
        let lin = equivariant_basis(&g, 8, 1, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(lin.len(), 1);
        assert!(span_match(&lin, &[PolyMap::identity(8)], 1e-9));
        assert_eq!(invariant_dimension(&g, 8, 1, DEFAULT_RANK_TOL).unwrap(), 0);
        assert_eq!(invariant_dimension(&g, 8, 2, DEFAULT_RANK_TOL).unwrap(), 1);
        assert_eq!(invariant_dimension(&g, 8, 3, DEFAULT_RANK_TOL).unwrap(), 0);
    }

    #[test]
    fn span_utilities() {
        let e = canonical_family::<f64>(5).unwrap();
        assert!(span_match(&e, &e, 1e-12));
        assert!(span_contains(
            &canonical_family::<f64>(8).unwrap(),
            &e,
            1e-12
        ));
        assert!(!span_match(&e[..4], &e, 1e-6));
        assert_eq!(span_rank(&canonical_family::<f64>(8).unwrap()), 8);
        let mixed = vec![e[0].clone(), {
            let mut p = e[1].clone();
            p.add_scaled(&e[0], 3.0);
            p
        }];
        assert!(span_match(&mixed, &e[..2], 1e-12));
    }

    #[test]
    fn sample_points_in_unit_ball() {
        let pts = sample_points(8);
        assert_eq!(pts.len(), 64);
        assert!(pts
            .iter()
            .all(|p| p.iter().map(|x| x * x).sum::<f64>() <= 1.0));
        assert_eq!(pts, sample_points(8));
    }
}
