use cmdecomp::classgroup::{
    class_number, class_number_formula, compose, compose_classes, enumerate_class_group, inverse, FormClass,
};
use cmdecomp::forms::{QuadraticForm, UnimodularMap};
use cmdecomp::kmodules::{form_to_module, module_product, module_to_class};
use cmdecomp::numtheory::is_fundamental;
use proptest::prelude::*;

fn discriminants(max_abs: i64) -> impl Iterator<Item = i64> {
    (3..=max_abs).map(|d| -d).filter(|d| d.rem_euclid(4) <= 1)
}

#[test]
fn identity_and_inverses_on_every_group() {
    for d in discriminants(2000) {
        let g = enumerate_class_group(&d).unwrap();
        let p = g.principal();
        assert!(p.is_principal());
        for x in g.elements() {
            assert_eq!(&compose_classes(p, x).unwrap(), x, "identity in C({d})");
            assert!(compose_classes(x, &inverse(x)).unwrap().is_principal(), "inverse in C({d})");
            assert!(compose_classes(&inverse(x), x).unwrap().is_principal());
        }
        assert_eq!(g.structure().iter().product::<u64>(), g.order() as u64);
        for w in g.structure().windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn associativity_sampled(k in 3i64..=2000, i in 0usize..1000, j in 0usize..1000, l in 0usize..1000) {
        let d = if k % 4 == 0 || k % 4 == 3 { -k } else { -4 * k };
        let g = enumerate_class_group(&d).unwrap();
        let e = g.elements();
        let (x, y, z) = (&e[i % e.len()], &e[j % e.len()], &e[l % e.len()]);
        let left = compose_classes(&compose_classes(x, y).unwrap(), z).unwrap();
        let right = compose_classes(x, &compose_classes(y, z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    /// Composition does not depend on which representatives are fed in.
    #[test]
    fn representative_independence(k in 3i64..=500, i in 0usize..100, j in 0usize..100,
                                   moves in prop::collection::vec((-3i64..=3, -3i64..=3), 10)) {
        let d = if k % 4 == 0 || k % 4 == 3 { -k } else { -4 * k };
        let g = enumerate_class_group(&d).unwrap();
        let e = g.elements();
        let (x, y) = (&e[i % e.len()], &e[j % e.len()]);
        let expected = compose_classes(x, y).unwrap();
        for (s, t) in moves {
            let m1 = UnimodularMap { p: 1, q: s, r: 0, s: 1 }.compose(&UnimodularMap { p: 1, q: 0, r: t, s: 1 });
            let m2 = UnimodularMap { p: 1, q: 0, r: s, s: 1 }.compose(&UnimodularMap { p: 1, q: t, r: 0, s: 1 });
            let qx = x.repr().act(&m1);
            let qy = y.repr().act(&m2);
            prop_assert_eq!(&compose(&qx, &qy).unwrap(), &expected);
        }
    }
}

#[test]
fn composition_matches_module_products() {
    for d in discriminants(500) {
        let g = enumerate_class_group(&d).unwrap();
        for x in g.elements() {
            let mx = form_to_module(x.repr()).unwrap();
            for y in g.elements() {
                let my = form_to_module(y.repr()).unwrap();
                let (f, via_modules) = module_to_class(&module_product(&mx, &my).unwrap()).unwrap();
                assert_eq!(via_modules.disc(), d);
                assert_eq!(f, cmdecomp::numtheory::split_discriminant(&d).unwrap().f);
                assert_eq!(via_modules, compose_classes(x, y).unwrap(), "{x} * {y}");
            }
        }
    }
}

#[test]
fn formula_matches_enumeration() {
    let fundamentals: Vec<i64> = (3..=200).map(|d| -d).filter(|d| is_fundamental(d)).collect();
    for d_k in fundamentals {
        for f in 1..=40i64 {
            assert_eq!(
                class_number(&(f * f * d_k)).unwrap(),
                class_number_formula(&d_k, &f).unwrap(),
                "d_K = {d_k}, f = {f}"
            );
        }
    }
}

#[test]
fn bigint_instantiation_agrees() {
    use num_bigint::BigInt;
    let d = BigInt::from(-3299);
    let g = enumerate_class_group(&d).unwrap();
    assert_eq!(g.structure(), &[3, 9]);
    let x = FormClass::from_form(&QuadraticForm::<BigInt>::from_i64(3, 1, 275).unwrap()).unwrap();
    assert!(cmdecomp::classgroup::power(&x, 27).unwrap().is_principal());
}
