use cmdecomp::classgroup::{class_number_formula, reduced_forms, FormClass};
use cmdecomp::decomposer::{
    admissible_conductor_pairs, census, classify_via_action, enumerate_decompositions, product_table,
    verify_sum_identity, SumIdentity,
};
use cmdecomp::forms::QuadraticForm;
use cmdecomp::numtheory::divisors;
use proptest::prelude::*;

const FIELDS: [i64; 8] = [-3, -4, -7, -8, -11, -15, -20, -23];

fn h(d_k: i64, f: i64) -> u64 {
    class_number_formula(&d_k, &f).unwrap()
}

#[test]
fn only_admissible_conductors_survive() {
    for d_k in [-3i64, -4, -7, -15] {
        for f0 in 1..=2i64 {
            for n in 1..=6i64 {
                let admissible = admissible_conductor_pairs(&n, &f0).unwrap();
                let top = n * f0;
                for f1 in divisors(&top).unwrap() {
                    for f2 in divisors(&top).unwrap() {
                        for (pair, t) in product_table(&d_k, &f1, &f2).unwrap() {
                            let (content, prim) = t.content();
                            if content == n && prim.discriminant() == f0 * f0 * d_k {
                                assert!(admissible.contains(&(f1, f2)), "{pair:?} reaches {n} * {prim} from ({f1}, {f2})");
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn every_admissible_pair_has_survivors() {
    for d_k in FIELDS {
        for f0 in 1..=3i64 {
            for n in 1..=8i64 {
                let c = census(&d_k, &f0, &n).unwrap();
                for q0 in reduced_forms(&(f0 * f0 * d_k)).unwrap() {
                    let r = c.report(&FormClass::from_form(&q0).unwrap()).unwrap();
                    assert!(r.counts_consistent());
                    let by = r.survivors_by_conductors();
                    for pair in admissible_conductor_pairs(&n, &f0).unwrap() {
                        assert!(by.get(&pair).copied().unwrap_or(0) > 0, "{n} * {q0}: no survivors at {pair:?}");
                    }
                    assert!(by.keys().all(|k| admissible_conductor_pairs(&n, &f0).unwrap().contains(k)));
                }
            }
        }
    }
}

#[test]
fn action_is_contained_in_brute_force() {
    for d_k in FIELDS {
        for f0 in 1..=2i64 {
            for n in 1..=6i64 {
                for q0 in reduced_forms(&(f0 * f0 * d_k)).unwrap() {
                    let brute = enumerate_decompositions(&n, &q0).unwrap();
                    let action = classify_via_action(&n, &q0).unwrap();
                    assert!(action.pairs.iter().all(|p| brute.pairs.contains(p)), "{n} * {q0}");
                    if !action.possibly_incomplete {
                        assert_eq!(action.pairs, brute.pairs, "{n} * {q0}");
                    }
                }
            }
        }
    }
}

#[test]
fn extra_unit_fields_keep_every_product() {
    for d_k in [-3i64, -4] {
        let q0 = reduced_forms(&d_k).unwrap().remove(0);
        for n in 2..=12i64 {
            let r = enumerate_decompositions(&n, &q0).unwrap();
            for ((f1, f2), count) in r.survivors_by_conductors() {
                assert_eq!(count, h(d_k, f1) * h(d_k, f2), "d_K = {d_k}, n = {n}, ({f1}, {f2})");
            }
        }
    }
}

#[test]
fn census_totals_match_the_sum_identity() {
    for d_k in FIELDS {
        for f0 in 1..=3i64 {
            for n in 1..=6i64 {
                let c = census(&d_k, &f0, &n).unwrap();
                assert!(c.off_target.is_empty());
                let total: u64 = c.buckets.values().map(|v| v.len() as u64).sum();
                let rhs: u64 = admissible_conductor_pairs(&n, &f0).unwrap().iter().map(|&(a, b)| h(d_k, a) * h(d_k, b)).sum();
                assert_eq!(total, rhs);
                match verify_sum_identity(&d_k, &f0, &n).unwrap() {
                    SumIdentity::Holds { lhs, .. } => assert_eq!(lhs, total),
                    SumIdentity::Skipped => assert!(f0 == 1 && (d_k == -3 || d_k == -4)),
                    SumIdentity::Fails { lhs, rhs } => panic!("({d_k}, {f0}, {n}): {lhs} != {rhs}"),
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Reports are sorted, free of duplicates, and tally consistently.
    #[test]
    fn reports_are_canonical(i in 0usize..FIELDS.len(), f0 in 1i64..=3, n in 1i64..=10, k in 0usize..16) {
        let d_k = FIELDS[i];
        let forms = reduced_forms(&(f0 * f0 * d_k)).unwrap();
        let q0 = &forms[k % forms.len()];
        let r = enumerate_decompositions(&n, q0).unwrap();
        prop_assert!(r.pairs.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(r.delta_tilde as usize, r.pairs.len());
        prop_assert!(r.counts_consistent());
        prop_assert!(r.matches_prediction());
    }
}

#[test]
fn bigint_report() {
    use num_bigint::BigInt;
    let q0 = QuadraticForm::<BigInt>::from_i64(1, 0, 3).unwrap();
    let r = enumerate_decompositions(&BigInt::from(6), &q0).unwrap();
    assert_eq!((r.delta_tilde, r.delta, r.delta0), (24, 12, 0));
}
