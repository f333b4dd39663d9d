//! Named structures used throughout the examples.
//!
//! Graph-like names use the language `E/2`: `K5`, `I3` (edgeless), `P4`
//! (path), `C5` (cycle), `Turan(6,3)` (complete 3-partite). Tournaments:
//! `Tr3` (transitive), `C3dir`, `W4`, `L4`. Hypergraphs: `K4minus`,
//! `Kh(3,4)` (complete 3-uniform on 4 vertices). Orders: `Lin4` (`L/2`),
//! `S5` (star order, `L/2`). A digit string such as `14235` is a
//! permutation in the language `L1/2, L2/2`.

use super::structure::Structure;
use crate::combin::subsets;
use crate::logic::Language;
use crate::{Error, Result};

fn graph_lang() -> Language {
    Language::from_pairs(&[("E", 2)]).unwrap()
}

fn undirected(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Structure {
    let mut s = Structure::empty(n, &[2]);
    for (a, b) in edges {
        s.set(0, &[a, b], true);
        s.set(0, &[b, a], true);
    }
    s
}

fn directed(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Structure {
    let mut s = Structure::empty(n, &[2]);
    for (a, b) in arcs {
        s.set(0, &[a, b], true);
    }
    s
}

/// Permutation in one-line notation: `L1` is the position order, `i <2 j`
/// iff `σ(i) < σ(j)`.
pub fn permutation(values: &[usize]) -> Result<Structure> {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    if sorted != (1..=n).collect::<Vec<_>>() {
        return Err(Error::Invalid(format!("{values:?} is not a permutation")));
    }
    let mut s = Structure::empty(n, &[2, 2]);
    for i in 0..n {
        for j in 0..n {
            if i < j {
                s.set(0, &[i, j], true);
            }
            if values[i] < values[j] {
                s.set(1, &[i, j], true);
            }
        }
    }
    Ok(s)
}

pub fn perm_language() -> Language {
    Language::from_pairs(&[("L1", 2), ("L2", 2)]).unwrap()
}

/// Every ordering of `k` distinct vertices of every `k`-set in `sets`.
fn hyper(n: usize, k: usize, sets: &[Vec<usize>]) -> Structure {
    let mut s = Structure::empty(n, &[k]);
    for set in sets {
        for p in crate::combin::permutations(k) {
            let t: Vec<usize> = p.iter().map(|&i| set[i]).collect();
            s.set(0, &t, true);
        }
    }
    s
}

fn split_params(s: &str) -> Option<(&str, Vec<usize>)> {
    let open = s.find('(')?;
    let inner = s[open + 1..].strip_suffix(')')?;
    let ps = inner.split(',').map(|x| x.trim().parse().ok()).collect::<Option<Vec<_>>>()?;
    Some((&s[..open], ps))
}

pub fn named_model(name: &str) -> Result<(Language, Structure)> {
    let unknown = || Error::UnknownName(name.to_string());
    if !name.is_empty() && name.chars().all(|c| c.is_ascii_digit()) {
        let vals: Vec<usize> = name.chars().map(|c| c as usize - '0' as usize).collect();
        return Ok((perm_language(), permutation(&vals)?));
    }
    if let Some((base, ps)) = split_params(name) {
        return match (base, ps.as_slice()) {
            ("Turan", [n, l]) if *l > 0 => {
                let s = undirected(
                    *n,
                    (0..*n).flat_map(|a| (0..*n).map(move |b| (a, b))).filter(|(a, b)| a < b && a % l != b % l),
                );
                Ok((graph_lang(), s))
            }
            ("Kh", [k, l]) if *k > 0 => Ok((Language::from_pairs(&[("E", *k)])?, hyper(*l, *k, &subsets(*l, *k)))),
            _ => Err(unknown()),
        };
    }
    let (alpha, digits) = name.split_at(name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len()));
    let num: Option<usize> = digits.parse().ok();
    let s = match (alpha, num, name) {
        (_, _, "C3dir") => directed(3, [(0, 1), (1, 2), (2, 0)]),
        (_, _, "W4") => directed(4, [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (3, 1)]),
        (_, _, "L4") => directed(4, [(0, 3), (1, 3), (2, 3), (0, 1), (1, 2), (2, 0)]),
        (_, _, "K4minus") => {
            let sets: Vec<Vec<usize>> = subsets(4, 3).into_iter().take(3).collect();
            return Ok((Language::from_pairs(&[("E", 3)])?, hyper(4, 3, &sets)));
        }
        ("K", Some(l), _) => undirected(l, (0..l).flat_map(|a| (a + 1..l).map(move |b| (a, b)))),
        ("I", Some(l), _) => Structure::empty(l, &[2]),
        ("P", Some(l), _) => undirected(l, (1..l).map(|a| (a - 1, a))),
        ("C", Some(l), _) if l >= 3 => undirected(l, (0..l).map(|a| (a, (a + 1) % l))),
        ("Tr", Some(l), _) => directed(l, (0..l).flat_map(|a| (a + 1..l).map(move |b| (a, b)))),
        ("Lin", Some(l), _) => {
            let s = directed(l, (0..l).flat_map(|a| (a + 1..l).map(move |b| (a, b))));
            return Ok((Language::from_pairs(&[("L", 2)])?, s));
        }
        ("S", Some(l), _) if l >= 1 => {
            let s = directed(l, (1..l).map(|a| (a, 0)));
            return Ok((Language::from_pairs(&[("L", 2)])?, s));
        }
        _ => return Err(unknown()),
    };
    Ok((graph_lang(), s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outdegrees(s: &Structure) -> Vec<usize> {
        let mut d: Vec<usize> = (0..s.n()).map(|v| (0..s.n()).filter(|&w| s.holds(0, &[v, w])).count()).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    #[test]
    fn tournaments_have_expected_scores() {
        assert_eq!(outdegrees(&named_model("W4").unwrap().1), vec![3, 1, 1, 1]);
        assert_eq!(outdegrees(&named_model("L4").unwrap().1), vec![2, 2, 2, 0]);
    }

    #[test]
    fn permutation_orders() {
        let s = named_model("14235").unwrap().1;
        assert!(s.holds(0, &[0, 4]));
        assert!(s.holds(1, &[2, 1]));
        assert!(!s.holds(1, &[1, 2]));
    }

    #[test]
    fn small_names() {
        assert_eq!(named_model("Tr1").unwrap().1.count(0), 0);
        assert_eq!(named_model("K4minus").unwrap().1.count(0), 18);
        assert_eq!(named_model("Turan(6,3)").unwrap().1.count(0), 24);
        assert!(named_model("Q7").is_err());
    }
}
