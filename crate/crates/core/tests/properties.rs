use proptest::prelude::*;

use eqforge::bifurcation::{fix_k_embed, sphere_zero_search, CubicTruncation, PhaseField};
use eqforge::equivariants::canonical_e;
use eqforge::group::{
    element_matrix, element_order, enumerate_group, nf_inverse, nf_multiply, nf_power,
    GroupElement, GroupParams, Realization,
};
use eqforge::modular::hensel_lift;
use eqforge::poly::PolyMap;

fn params() -> impl Strategy<Value = GroupParams> {
    let pairs = [
        (5u64, 3u64),
        (5, 7),
        (13, 3),
        (13, 5),
        (17, 3),
        (25, 3),
        (5, 9),
    ];
    (proptest::sample::select(pairs.to_vec()), any::<bool>()).prop_map(|((a, b), eight)| {
        if eight {
            GroupParams::g8(a, b).unwrap()
        } else {
            GroupParams::h4(a, b).unwrap()
        }
    })
}

fn element(p: GroupParams) -> impl Strategy<Value = GroupElement> {
    let m_max = if p.dim() == 8 { 2u8 } else { 1 };
    (0..p.a as u32, 0..p.b as u32, 0..4u8, 0..2u8, 0..m_max)
        .prop_map(|(k1, k2, l1, l2, m)| GroupElement::new(k1, k2, l1, l2, m))
}

fn triple() -> impl Strategy<Value = (GroupParams, GroupElement, GroupElement, GroupElement)> {
    params().prop_flat_map(|p| (Just(p), element(p), element(p), element(p)))
}

fn unit_vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0..1.0f64, n)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect()
        })
}

fn coefficients() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-3.0..3.0f64, 5)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn product_matches_matrices((p, x, y, _) in triple()) {
        let xy = nf_multiply(&x, &y, &p).unwrap();
        prop_assert!(p.is_valid(&xy));
        let lhs = &element_matrix::<f64>(&x, &p).unwrap() * &element_matrix::<f64>(&y, &p).unwrap();
        prop_assert!(lhs.approx_eq(&element_matrix::<f64>(&xy, &p).unwrap(), 1e-9));
    }

    #[test]
    fn associativity((p, x, y, z) in triple()) {
        let l = nf_multiply(&nf_multiply(&x, &y, &p).unwrap(), &z, &p).unwrap();
        let r = nf_multiply(&x, &nf_multiply(&y, &z, &p).unwrap(), &p).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn inverses((p, x, _, _) in triple()) {
        let inv = nf_inverse(&x, &p).unwrap();
        prop_assert_eq!(nf_inverse(&inv, &p).unwrap(), x);
        prop_assert_eq!(nf_multiply(&x, &inv, &p).unwrap(), GroupElement::IDENTITY);
        prop_assert_eq!(nf_multiply(&inv, &x, &p).unwrap(), GroupElement::IDENTITY);
        let ord = element_order(&x, &p).unwrap();
        prop_assert_eq!(p.order() % ord, 0);
        prop_assert_eq!(nf_power(&x, ord as i64, &p).unwrap(), GroupElement::IDENTITY);
        prop_assert_eq!(nf_power(&x, -1, &p).unwrap(), inv);
    }

    #[test]
    fn cubic_homogeneity(i in 1usize..=8, x in proptest::collection::vec(-1.0..1.0f64, 8), t in -3.0..3.0f64) {
        let e = canonical_e::<f64>(i).unwrap();
        let tx: Vec<f64> = x.iter().map(|v| v * t).collect();
        let lhs = e.evaluate(&tx);
        let rhs = e.evaluate(&x);
        for (a, b) in lhs.iter().zip(&rhs) {
            prop_assert!((a - t.powi(3) * b).abs() < 1e-10);
        }
    }

    #[test]
    fn phase_field_is_tangent(c in coefficients(), y in unit_vector(4)) {
        let pf = PhaseField::new(CubicTruncation::new(&c).unwrap().restricted().unwrap());
        prop_assert!(dot(&pf.eval(&y).unwrap(), &y).abs() < 1e-10);
    }

    #[test]
    fn analytic_jacobian_matches_differences(c in coefficients(), y in unit_vector(4)) {
        let pf = PhaseField::new(CubicTruncation::new(&c).unwrap().restricted().unwrap());
        let dev = pf.jacobian(&y).max_abs_diff(&pf.jacobian_fd(&y, 1e-5));
        prop_assert!(dev < 1e-6, "deviation {dev}");
    }

    #[test]
    fn restriction_agrees_with_embedding(c in coefficients(), y in proptest::collection::vec(-1.0..1.0f64, 4)) {
        let t = CubicTruncation::new(&c).unwrap();
        let full = t.to_polymap().unwrap().evaluate(&fix_k_embed(&y));
        let restricted = t.restricted().unwrap().evaluate(&y);
        let embedded = fix_k_embed(&restricted);
        for (a, b) in full.iter().zip(&embedded) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn integer_json_round_trip(i in 1usize..=8, s in -1000i64..1000) {
        let e = canonical_e::<f64>(i).unwrap().scale(s as f64);
        let text = serde_json::to_string(&e.to_json()).unwrap();
        let back = PolyMap::<f64>::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn hensel_lift_squares_to_minus_one(idx in 0usize..6, s in 1u32..6) {
        let (p, root) = [(5u64, 2u64), (13, 5), (17, 4), (29, 12), (37, 6), (41, 9)][idx];
        for k in 1..=s {
            let x = hensel_lift(root, p, k).unwrap() as u128;
            let m = (p as u128).pow(k);
            prop_assert_eq!((x * x + 1) % m, 0);
        }
    }
}

#[test]
fn eight_dimensional_phase_field_is_equivariant() {
    let p = GroupParams::g8(13, 3).unwrap();
    let r = Realization::<f64>::new(&p).unwrap();
    let t = CubicTruncation::new(&[1.0, -0.4, 0.7, 2.0, -1.3]).unwrap();
    let pf = PhaseField::new(t.to_polymap().unwrap());
    let group = enumerate_group(&p);
    let sample: Vec<&GroupElement> = group.iter().step_by(group.len() / 32).take(32).collect();
    let x: Vec<f64> = {
        let v = [0.3, -0.1, 0.5, 0.2, -0.6, 0.4, 0.1, -0.2];
        let n = dot(&v, &v).sqrt();
        v.iter().map(|a| a / n).collect()
    };
    for g in sample {
        let m = r.matrix(g).unwrap();
        let lhs = pf.eval(&m.mul_vec(&x)).unwrap();
        let rhs = m.mul_vec(&pf.eval(&x).unwrap());
        let dev = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-9, "{g}: {dev}");
    }
}

#[test]
fn e1_zeros_include_the_axes() {
    let t = CubicTruncation::new(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    let zeros = sphere_zero_search(&t.restricted().unwrap(), 64).unwrap();
    for i in 0..4 {
        for s in [1.0, -1.0] {
            assert!(
                zeros.iter().any(|z| (z.y[i] - s).abs() < 1e-9),
                "±e{}",
                i + 1
            );
        }
    }
    for (i, a) in zeros.iter().enumerate() {
        for b in &zeros[i + 1..] {
            let d: f64 =
                a.y.iter()
                    .zip(&b.y)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
            assert!(d > 1e-6);
        }
    }
}
