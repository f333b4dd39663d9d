use proptest::prelude::*;
use theon::densities::DensityKind;
use theon::logic::builtin_theory;
use theon::models::enumerate_models;
use theon::rational::{self, Rational};
use theon::theons::{
    bad_pair_measure, exact_density, format_theon, parse_theon, permuton_extract, poseton_extract, poseton_from_w,
    random_permuton_grid, random_poseton_w, random_step_graphon, random_weak_linorder, standard_permuton,
    strengthen_horn, strengthen_linorder, strong_check_sampled, weak_check, HornMode,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn step_graphon_densities_sum_to_one(m in 1usize..=4, seed in any::<u64>()) {
        let t = random_step_graphon(m, seed).unwrap();
        let classes = enumerate_models(&t.theory, 3).unwrap();
        let total: Rational = classes
            .iter()
            .map(|c| exact_density(&t, &c.canonical, DensityKind::P).unwrap())
            .sum();
        prop_assert_eq!(total, rational::one());
    }

    #[test]
    fn step_graphons_are_weak(m in 1usize..=4, seed in any::<u64>()) {
        let t = random_step_graphon(m, seed).unwrap();
        prop_assert!(weak_check(&t, &t.theory).unwrap().iter().all(|r| r.pass()));
    }

    #[test]
    fn horn_strengthening_is_strong(m in 2usize..=4, seed in any::<u64>()) {
        let t = random_step_graphon(m, seed).unwrap();
        let h = strengthen_horn(&t, HornMode::Negative).unwrap();
        prop_assert!(strong_check_sampled(&h, &t.theory, 500, seed).unwrap().is_pass());
    }

    #[test]
    fn weak_linorders_have_no_bad_pairs(m in 2usize..=4, seed in any::<u64>()) {
        let t = random_weak_linorder(m, seed).unwrap();
        prop_assert_eq!(bad_pair_measure(&t).unwrap(), rational::zero());
        let o = strengthen_linorder(&t).unwrap();
        let lo = builtin_theory("LinOrder").unwrap();
        prop_assert!(strong_check_sampled(&o, &lo, 500, seed).unwrap().is_pass());
    }

    #[test]
    fn permuton_round_trip(m in 1usize..=4, seed in any::<u64>()) {
        let mu = random_permuton_grid(m, seed);
        prop_assert_eq!(permuton_extract(&standard_permuton(&mu).unwrap()).unwrap(), mu);
    }

    #[test]
    fn poseton_round_trip(m in 1usize..=3, seed in any::<u64>()) {
        let w = random_poseton_w(m, seed);
        prop_assert_eq!(poseton_extract(&poseton_from_w(&w).unwrap()).unwrap(), w);
    }

    #[test]
    fn steptheon_text_round_trips(m in 1usize..=3, seed in any::<u64>()) {
        let t = random_step_graphon(m, seed).unwrap();
        let back = parse_theon(&format_theon(&t).unwrap()).unwrap();
        for c in enumerate_models(&t.theory, 3).unwrap().iter() {
            prop_assert_eq!(
                exact_density(&back, &c.canonical, DensityKind::Ind).unwrap(),
                exact_density(&t, &c.canonical, DensityKind::Ind).unwrap()
            );
        }
    }
}
