use proptest::prelude::*;
use theon::lineons::{
    blowup, format_subset, parse_subset, pattern_density, random_pattern, random_subset, triangle_mono_density,
    Density, LinSubset, Mode, Pattern,
};
use theon::rational::{self, Rational};

fn exact(d: Density) -> Rational {
    match d {
        Density::Exact(v) => v,
        Density::Sampled(e) => panic!("unexpected estimate {e:?}"),
    }
}

fn complement_subset(a: &LinSubset) -> LinSubset {
    LinSubset::from_fn(a.n, |x| !a.contains(x)).unwrap()
}

fn complement_pattern(f: &Pattern) -> Pattern {
    Pattern::new(f.m, (1..1u64 << f.m).map(|v| !f.value(v)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn patterns_partition_probability(m in 1usize..=2, n in 1usize..=5, seed in any::<u64>()) {
        let a = random_subset(n, 0.5, seed).unwrap();
        let total: Rational = (0..1u64 << ((1 << m) - 1))
            .map(|bits| {
                let f = Pattern::new(m, (0..(1 << m) - 1).map(|i| bits >> i & 1 == 1).collect()).unwrap();
                exact(pattern_density(&f, &a, Mode::Exact).unwrap())
            })
            .sum();
        prop_assert_eq!(total, rational::one());
    }

    #[test]
    fn complement_symmetry(m in 1usize..=3, n in 1usize..=5, seed in any::<u64>()) {
        let a = random_subset(n, 0.4, seed).unwrap();
        let f = random_pattern(m, seed ^ 1).unwrap();
        let lhs = exact(pattern_density(&f, &a, Mode::Exact).unwrap());
        let rhs = exact(pattern_density(&complement_pattern(&f), &complement_subset(&a), Mode::Exact).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn triangles_ignore_blowup(n in 1usize..=5, t in 0usize..=3, seed in any::<u64>()) {
        let a = random_subset(n, 0.5, seed).unwrap();
        let base = exact(triangle_mono_density(&a, Mode::Exact).unwrap());
        let big = exact(triangle_mono_density(&blowup(&a, t).unwrap(), Mode::Exact).unwrap());
        prop_assert_eq!(base, big);
    }

    #[test]
    fn subset_text_round_trips(n in 0usize..=8, seed in any::<u64>()) {
        let a = random_subset(n, 0.5, seed).unwrap();
        prop_assert_eq!(parse_subset(&format_subset(&a)).unwrap(), a);
    }
}

#[test]
fn sampling_is_reproducible() {
    let a = random_subset(5, 0.5, 3).unwrap();
    let f = random_pattern(2, 4).unwrap();
    let mode = Mode::Sampled { samples: 5000, seed: 9 };
    assert_eq!(pattern_density(&f, &a, mode).unwrap(), pattern_density(&f, &a, mode).unwrap());
}
