use std::sync::Arc;

use gcs_core::algebra::AlgebraElement;
use gcs_core::fock::{displacement, DisplacementGenerator, WeylElement};
use gcs_core::groupoid::{action_groupoid, pair_groupoid, units_only, FiniteGroup};
use gcs_core::linalg::max_abs;
use gcs_core::quadrature::GaussLegendre;
use gcs_core::{Complex64, FiniteGroupoid, FockSpace, MorphismId};
use proptest::prelude::*;

/// `Z_{p·m}` acting on `Z_p` by translation.
fn translation_groupoid(p: usize, m: usize) -> FiniteGroupoid {
    let g = FiniteGroup::cyclic(p * m).unwrap();
    action_groupoid(&g, p, |h, x| (x + h) % p).unwrap()
}

fn arb_groupoid() -> impl Strategy<Value = FiniteGroupoid> {
    let piece = prop_oneof![
        (1usize..5).prop_map(|n| pair_groupoid(n).unwrap()),
        (1usize..4).prop_map(|n| units_only(n).unwrap()),
        (1usize..4, 1usize..3).prop_map(|(p, m)| translation_groupoid(p, m)),
    ];
    prop::collection::vec(piece, 1..4).prop_map(|parts| {
        let mut it = parts.into_iter();
        let first = it.next().unwrap();
        it.fold(first, |acc, g| acc.disjoint_union(&g))
    })
}

fn arb_element(g: Arc<FiniteGroupoid>) -> impl Strategy<Value = AlgebraElement> {
    let n = g.morphism_count();
    prop::collection::vec(prop::option::of((-1.0f64..1.0, -1.0f64..1.0)), n).prop_map(move |cs| {
        let coeffs = cs
            .into_iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|(re, im)| (MorphismId(i), Complex64::new(re, im))));
        AlgebraElement::from_coeffs(Arc::clone(&g), coeffs).unwrap()
    })
}

fn arb_triple() -> impl Strategy<Value = (AlgebraElement, AlgebraElement, AlgebraElement)> {
    arb_groupoid().prop_flat_map(|g| {
        let g = Arc::new(g);
        (
            arb_element(Arc::clone(&g)),
            arb_element(Arc::clone(&g)),
            arb_element(g),
        )
    })
}

fn arb_z() -> impl Strategy<Value = Complex64> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(x, y)| Complex64::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unions_satisfy_axioms(g in arb_groupoid()) {
        prop_assert!(g.verify_axioms().all_passed());
        let parts = g.connected_components();
        prop_assert_eq!(parts.len(), g.orbits().len());
        prop_assert_eq!(parts.iter().map(|p| p.morphism_count()).sum::<usize>(), g.morphism_count());
        for x in g.objects() {
            let iso = g.isotropy_group(x).unwrap();
            prop_assert!(iso.iter().any(|m| m.id == g.unit(x).unwrap()));
        }
    }

    #[test]
    fn convolution_is_associative((f, g, h) in arb_triple()) {
        let lhs = f.convolve(&g).unwrap().convolve(&h).unwrap();
        let rhs = f.convolve(&g.convolve(&h).unwrap()).unwrap();
        prop_assert!(lhs.max_difference(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn involution_reverses_products((f, g, _h) in arb_triple()) {
        let lhs = f.convolve(&g).unwrap().involution();
        let rhs = g.involution().convolve(&f.involution()).unwrap();
        prop_assert!(lhs.max_difference(&rhs).unwrap() < 1e-12);
        prop_assert!(f.involution().involution().approx_eq(&f));
    }

    #[test]
    fn representations_are_star_homomorphisms((f, g, _h) in arb_triple()) {
        let fg = f.convolve(&g).unwrap();
        let pf = f.fundamental_rep().into_entries();
        let pg = g.fundamental_rep().into_entries();
        prop_assert!(max_abs(&(fg.fundamental_rep().into_entries() - &pf * &pg)) < 1e-12);
        prop_assert!(max_abs(&(f.involution().fundamental_rep().into_entries() - pf.adjoint())) < 1e-12);
        let lf = f.left_regular_rep().into_entries();
        let lg = g.left_regular_rep().into_entries();
        prop_assert!(max_abs(&(fg.left_regular_rep().into_entries() - lf * lg)) < 1e-12);
        let unit = AlgebraElement::unit(Arc::clone(f.groupoid()));
        prop_assert!(unit.convolve(&f).unwrap().approx_eq(&f));
    }

    #[test]
    fn cstar_identity(f in arb_groupoid().prop_flat_map(|g| arb_element(Arc::new(g)))) {
        let n = f.cstar_norm();
        let ff = f.involution().convolve(&f).unwrap();
        prop_assert!((ff.cstar_norm() - n * n).abs() < 1e-10 * (1.0 + n * n));
    }

    #[test]
    fn weyl_law_is_a_group(a in arb_z(), b in arb_z(), c in arb_z(), nu in -3.0f64..3.0) {
        let g1 = WeylElement::new(nu, a);
        let g2 = WeylElement::new(-nu, b);
        let g3 = WeylElement::new(0.5, c);
        let l = g1.compose(&g2).compose(&g3);
        let r = g1.compose(&g2.compose(&g3));
        prop_assert!((l.nu - r.nu).abs() < 1e-12 && (l.z - r.z).norm() < 1e-12);
        let e = g1.compose(&g1.inverse());
        prop_assert!(e.nu.abs() < 1e-12 && e.z.norm() < 1e-12);
    }

    #[test]
    fn displacement_is_unitary(z in arb_z()) {
        let s = FockSpace::new(24).unwrap();
        let d = displacement(s, z).unwrap();
        prop_assert!(d.unitarity_defect() < 1e-10);
        let gen = DisplacementGenerator::harmonic(s).unwrap();
        let v = s.number_state(3).unwrap();
        let applied = gen.apply(z, v.amplitudes());
        prop_assert!((applied - d.matrix() * v.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn gauss_legendre_is_exact(n in 1usize..20, a in -2.0f64..0.0, b in 0.1f64..3.0) {
        let rule = GaussLegendre::new(n, a, b);
        for k in 0..(2 * n) {
            let exact = (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k as f64 + 1.0);
            let got = rule.integrate(|x| x.powi(k as i32));
            prop_assert!((got - exact).abs() < 1e-11 * (1.0 + exact.abs()), "n={n} k={k}");
        }
    }
}
