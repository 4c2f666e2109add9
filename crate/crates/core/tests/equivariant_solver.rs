use eqforge::characters::molien_equivariant;
use eqforge::equivariants::{
    canonical_count, canonical_family, equivariant_basis, span_contains, span_match,
};
use eqforge::group::{generator_matrices_g, GroupParams};
use eqforge::linalg::DEFAULT_RANK_TOL;

fn cubic_basis(a: u64, b: u64) -> Vec<eqforge::poly::PolyMap<f64>> {
    let p = GroupParams::g8(a, b).unwrap();
    let g = generator_matrices_g::<f64>(&p).unwrap().to_vec();
    equivariant_basis(&g, 8, 3, DEFAULT_RANK_TOL).unwrap()
}

#[test]
fn cubic_space_g53_is_spanned_by_all_eight() {
    let basis = cubic_basis(5, 3);
    assert_eq!(basis.len(), 8);
    let e = canonical_family::<f64>(8).unwrap();
    assert!(span_match(&basis, &e, 1e-8));
}

#[test]
fn cubic_space_for_larger_a_is_spanned_by_five() {
    let basis = cubic_basis(13, 3);
    assert_eq!(basis.len(), 5);
    assert_eq!(canonical_count(13), 5);
    let e5 = canonical_family::<f64>(5).unwrap();
    assert!(span_match(&basis, &e5, 1e-8));
    let e8 = canonical_family::<f64>(8).unwrap();
    assert!(span_contains(&e8, &basis, 1e-8));
    assert!(!span_contains(&basis, &e8, 1e-3));
}

#[test]
fn solver_dimensions_match_molien() {
    for (a, b) in [(5, 7)] {
        let p = GroupParams::g8(a, b).unwrap();
        let g = generator_matrices_g::<f64>(&p).unwrap().to_vec();
        for d in 1..=3 {
            let dim = equivariant_basis(&g, 8, d, DEFAULT_RANK_TOL).unwrap().len() as u64;
            assert_eq!(dim, molien_equivariant(&p, d).unwrap(), "d = {d}");
        }
    }
}
