use proptest::prelude::*;
use theon::densities::{density, density_table, multi_density, tind_from_tinj, tinj_from_tind, DensityKind};
use theon::logic::builtin_theory;
use theon::models::{canonical_code, enumerate_models, format_model, isomorphic, parse_model, Structure};
use theon::rational::{self, ratio, Rational};

fn graph(n: usize, bits: &[bool]) -> Structure {
    let mut s = Structure::empty(n, &[2]);
    let mut i = 0;
    for a in 0..n {
        for b in a + 1..n {
            if bits[i % bits.len()] {
                s.set(0, &[a, b], true);
                s.set(0, &[b, a], true);
            }
            i += 1;
        }
    }
    s
}

fn arb_graph(lo: usize, hi: usize) -> impl Strategy<Value = Structure> {
    (lo..=hi, prop::collection::vec(any::<bool>(), 1..=21)).prop_map(|(n, bits)| graph(n, &bits))
}

fn injections(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                (0..n).filter(|v| !t.contains(v)).map(|v| [t.clone(), vec![v]].concat()).collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

fn tind_oracle(m: &Structure, n: &Structure) -> Rational {
    let maps = injections(n.n(), m.n());
    let hits = maps
        .iter()
        .filter(|a| injections(m.n(), 2).iter().all(|t| m.holds(0, t) == n.holds(0, &[a[t[0]], a[t[1]]])))
        .count();
    ratio(hits as i64, maps.len() as i64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn level_densities_sum_to_one(n in arb_graph(4, 7), level in 1usize..=4) {
        let g = builtin_theory("Graph").unwrap();
        let table = density_table(&g, level, DensityKind::P, &n).unwrap();
        let total: Rational = table.values().sum();
        prop_assert_eq!(total, rational::one());
    }

    #[test]
    fn induced_density_matches_brute_force(m in arb_graph(1, 3), n in arb_graph(3, 6)) {
        prop_assume!(m.n() <= n.n());
        prop_assert_eq!(density(DensityKind::Ind, &m, &n).unwrap(), tind_oracle(&m, &n));
    }

    #[test]
    fn complement_preserves_density(m in arb_graph(2, 3), n in arb_graph(3, 6)) {
        prop_assume!(m.n() <= n.n());
        let a = density(DensityKind::P, &m, &n).unwrap();
        let b = density(DensityKind::P, &m.complement(), &n.complement()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn mobius_inverts(m in arb_graph(1, 3), n in arb_graph(4, 6)) {
        let g = builtin_theory("Graph").unwrap();
        let ind = density_table(&g, m.n(), DensityKind::Ind, &n).unwrap();
        let inj = density_table(&g, m.n(), DensityKind::Inj, &n).unwrap();
        prop_assert_eq!(tinj_from_tind(&g, &m, &ind).unwrap(), density(DensityKind::Inj, &m, &n).unwrap());
        prop_assert_eq!(tind_from_tinj(&g, &m, &inj).unwrap(), density(DensityKind::Ind, &m, &n).unwrap());
    }

    #[test]
    fn relabeling_preserves_iso_class(n in arb_graph(2, 6), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..n.n()).collect();
        let len = perm.len();
        for i in (1..len).rev() {
            perm.swap(i, (seed as usize >> (i % 16)) % (i + 1));
        }
        let r = n.relabel(&perm);
        prop_assert!(isomorphic(&n, &r).unwrap());
        prop_assert_eq!(canonical_code(&n).unwrap(), canonical_code(&r).unwrap());
    }

    #[test]
    fn model_text_round_trips(n in arb_graph(1, 6)) {
        let lang = builtin_theory("Graph").unwrap().language;
        let text = format_model(&n, &lang);
        let (_, back) = parse_model(&text, Some(&lang)).unwrap();
        prop_assert_eq!(back, n);
    }
}

#[test]
fn single_part_multi_density_is_p() {
    let p5 = theon::models::named_model("P5").unwrap().1;
    let k2 = theon::models::named_model("K2").unwrap().1;
    assert_eq!(multi_density(std::slice::from_ref(&k2), &p5).unwrap(), density(DensityKind::P, &k2, &p5).unwrap());
}

#[test]
fn enumeration_counts() {
    let counts = |name: &str, n: usize| enumerate_models(&builtin_theory(name).unwrap(), n).unwrap().len();
    assert_eq!(counts("Graph", 4), 11);
    assert_eq!(counts("Graph", 5), 34);
    assert_eq!(counts("Tournament", 4), 4);
    assert_eq!(counts("LinOrder", 4), 1);
    assert_eq!(counts("Perm", 3), 6);
}
