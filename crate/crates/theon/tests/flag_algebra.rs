use proptest::prelude::*;
use theon::flag_algebra::{format_flagvec, parse_flagvec, product, FlagVector};
use theon::logic::{builtin_theory, Theory};
use theon::models::{enumerate_models, Structure};
use theon::rational::{ratio, Rational};

fn graph_theory() -> Theory {
    builtin_theory("Graph").unwrap()
}

/// A combination of the iso classes on `level` vertices with small integer
/// coefficients.
fn arb_vector(level: usize) -> impl Strategy<Value = FlagVector> {
    let classes = enumerate_models(&graph_theory(), level).unwrap();
    prop::collection::vec(-3i64..=3, classes.len()).prop_map(move |cs| {
        let mut v = FlagVector::zero(&graph_theory(), level);
        for (c, k) in classes.iter().zip(cs) {
            if k != 0 {
                v.add_term(&c.canonical, Rational::from_integer(k.into())).unwrap();
            }
        }
        v
    })
}

fn arb_host() -> impl Strategy<Value = Structure> {
    (5usize..=8, any::<u64>()).prop_map(|(n, bits)| {
        let mut s = Structure::empty(n, &[2]);
        let mut i = 0;
        for a in 0..n {
            for b in a + 1..n {
                if bits >> (i % 64) & 1 == 1 {
                    s.set(0, &[a, b], true);
                    s.set(0, &[b, a], true);
                }
                i += 1;
            }
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lift_preserves_evaluation(v in arb_vector(2), host in arb_host()) {
        let l = v.lift(4).unwrap();
        prop_assert_eq!(l.evaluate(&host).unwrap(), v.evaluate(&host).unwrap());
        prop_assert!(l.algebra_eq(&v).unwrap());
    }

    #[test]
    fn product_commutes(u in arb_vector(2), v in arb_vector(2)) {
        let a = product(&u, &v, 4).unwrap();
        let b = product(&v, &u, 4).unwrap();
        prop_assert!(a.algebra_eq(&b).unwrap());
    }

    #[test]
    fn product_is_bilinear(u in arb_vector(2), v in arb_vector(2), w in arb_vector(2)) {
        let left = product(&u.add(&v).unwrap(), &w, 4).unwrap();
        let right = product(&u, &w, 4).unwrap().add(&product(&v, &w, 4).unwrap()).unwrap();
        prop_assert!(left.algebra_eq(&right).unwrap());
    }

    #[test]
    fn text_round_trips(v in arb_vector(3)) {
        let back = parse_flagvec(&format_flagvec(&v), &builtin_theory).unwrap();
        prop_assert!(back.algebra_eq(&v).unwrap());
    }
}

#[test]
fn unit_lifts_to_sum_of_classes() {
    let one = FlagVector::unit(&graph_theory()).lift(3).unwrap();
    assert_eq!(one.terms.len(), 4);
    assert!(one.terms.values().all(|(_, c)| *c == ratio(1, 1)));
}
