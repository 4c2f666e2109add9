//! Cross-checks against independent computations: brute-force matrix groups,
//! direct traces and dense eigen-solvers.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eqforge::bifurcation::{branch_continuation, branch_spectrum, CubicTruncation};
use eqforge::characters::{chi_2, chi_3, molien};
use eqforge::equivariants::{canonical_family, equivariance_residual};
use eqforge::group::{
    enumerate_group, generator_matrices_g, lie_generator_c, GroupElement, GroupParams, Realization,
};
use eqforge::linalg::DenseMatrix;

fn key(m: &DenseMatrix<f64>) -> Vec<i64> {
    m.entries()
        .iter()
        .map(|v| (v * 1e8).round() as i64)
        .collect()
}

/// Closure of the generators under multiplication, without normal forms.
fn matrix_closure(gens: &[DenseMatrix<f64>]) -> Vec<DenseMatrix<f64>> {
    let n = gens[0].dim();
    let mut seen = BTreeSet::from([key(&DenseMatrix::identity(n))]);
    let mut all = vec![DenseMatrix::identity(n)];
    let mut frontier = all.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for m in &frontier {
            for g in gens {
                let p = m * g;
                if seen.insert(key(&p)) {
                    next.push(p.clone());
                    all.push(p);
                }
            }
        }
        frontier = next;
    }
    all
}

#[test]
fn normal_forms_enumerate_the_matrix_group() {
    for p in [
        GroupParams::h4(5, 3).unwrap(),
        GroupParams::g8(5, 3).unwrap(),
        GroupParams::g8(13, 3).unwrap(),
    ] {
        let r = Realization::<f64>::new(&p).unwrap();
        let closure: BTreeSet<Vec<i64>> = matrix_closure(&r.generators()).iter().map(key).collect();
        let listed: BTreeSet<Vec<i64>> = enumerate_group(&p)
            .iter()
            .map(|e| key(&r.matrix(e).unwrap()))
            .collect();
        assert_eq!(closure.len() as u64, p.order(), "{p}");
        assert_eq!(closure, listed, "{p}");
    }
}

#[test]
fn smaller_group_embeds() {
    // D for b = 3 is the cube of D for b = 9, so H_{5,3} ⊂ H_{5,9}.
    let small = GroupParams::h4(5, 3).unwrap();
    let big = GroupParams::h4(5, 9).unwrap();
    let rb = Realization::<f64>::new(&big).unwrap();
    let big_keys: BTreeSet<Vec<i64>> = enumerate_group(&big)
        .iter()
        .map(|e| key(&rb.matrix(e).unwrap()))
        .collect();
    let rs = Realization::<f64>::new(&small).unwrap();
    for e in enumerate_group(&small) {
        assert!(big_keys.contains(&key(&rs.matrix(&e).unwrap())), "{e}");
    }
    for e in enumerate_group(&small) {
        let (k1, k2, l1, l2, m) = e.as_tuple();
        let image = GroupElement::new(k1, 3 * k2, l1, l2, m);
        assert!(rs
            .matrix(&e)
            .unwrap()
            .approx_eq(&rb.matrix(&image).unwrap(), 1e-12));
    }
}

/// Trace on the symmetric square and cube from power-sum traces `tr(Mᵏ)`.
fn sym_power_trace(m: &DenseMatrix<f64>, d: u32) -> f64 {
    let p1 = m.trace();
    let p2 = m.pow(2).trace();
    let p3 = m.pow(3).trace();
    match d {
        2 => (p1 * p1 + p2) / 2.0,
        3 => (p1.powi(3) + 3.0 * p1 * p2 + 2.0 * p3) / 6.0,
        _ => unreachable!(),
    }
}

#[test]
fn symmetric_power_characters_match_matrix_traces() {
    for p in [
        GroupParams::g8(5, 3).unwrap(),
        GroupParams::h4(13, 3).unwrap(),
    ] {
        let r = Realization::<f64>::new(&p).unwrap();
        for e in enumerate_group(&p) {
            let m = r.matrix(&e).unwrap();
            assert!(
                (chi_2(&e, &p).unwrap() - sym_power_trace(&m, 2)).abs() < 1e-8,
                "{e}"
            );
            assert!(
                (chi_3(&e, &p).unwrap() - sym_power_trace(&m, 3)).abs() < 1e-8,
                "{e}"
            );
        }
    }
}

#[test]
fn molien_for_other_groups() {
    for (a, b, r3) in [(13, 3, 5), (17, 3, 5), (5, 7, 8), (29, 3, 5)] {
        let p = GroupParams::g8(a, b).unwrap();
        let r: Vec<u64> = (1..=3)
            .map(|d| molien(&p, d).unwrap().equivariant)
            .collect();
        assert_eq!(r, vec![1, 0, r3], "{p}");
    }
}

#[test]
fn torus_samples() {
    // The first five maps commute with every C(φ) for the chosen ρ, not only
    // with the generator.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let fam = canonical_family::<f64>(5).unwrap();
    for rho in [3, 5, 13] {
        for _ in 0..20 {
            let c = lie_generator_c(rng.random_range(0.0..2.0 * PI), rho);
            for e in &fam {
                assert!(equivariance_residual(e, &c) < 1e-9);
            }
        }
    }
    let g = generator_matrices_g::<f64>(&GroupParams::g8(5, 3).unwrap()).unwrap();
    for e in canonical_family::<f64>(8).unwrap() {
        assert!(equivariance_residual(&e, &g.c) < 1e-9);
    }
}

#[test]
fn branch_spectrum_matches_dense_solver() {
    let t = CubicTruncation::new(&[0.8, -1.2, 0.4, 1.9, 0.3]).unwrap();
    let b = branch_continuation(&t, 1.0, 10).unwrap();
    let r4 = t.restricted().unwrap();
    for p in &b {
        let y = eqforge::bifurcation::fix_k_extract(&p.x);
        let j = r4.jacobian(&y).to_nalgebra() + nalgebra::DMatrix::identity(4, 4) * p.lambda;
        let mut dense: Vec<f64> = j
            .eigenvalues()
            .expect("real spectrum")
            .iter()
            .copied()
            .collect();
        dense.sort_by(f64::total_cmp);
        let ours = branch_spectrum(&t, p).unwrap();
        for (a, b) in ours.iter().zip(&dense) {
            assert!((a.0 - b).abs() < 1e-10);
        }
        // r² (δ − α, γ − α, β − α, 2α).
        let r2 = p.r * p.r;
        let mut expected = [1.1 * r2, -0.4 * r2, -2.0 * r2, 1.6 * r2];
        expected.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&expected) {
            assert!((a.0 - b).abs() < 1e-12);
        }
    }
}
