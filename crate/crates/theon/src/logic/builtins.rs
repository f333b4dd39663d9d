//! Registry of named theories.
//!
//! A name is a `+`-separated list of components, each of which is one of
//! `Graph`, `Digraph`, `Orgraph`, `Tournament`, `Hypergraph(k)`, `Lin(K)`,
//! `Coloring(c)`, `ColoredGraph(c)`, `ColoredComplete(c)`, `LinOrder`,
//! `Order`, `CycOrder`, `Perm`, `EqRel`, `PreOrder`, `ExtendedOrder`,
//! `EdgeOrderedGraph`, `TFGraph`, `FDF`, `CH`, `Turan`, `ThreshGraph`,
//! `IntervalGraph`, `Empty`. Parameterized names also accept the prefix
//! form (`3Hypergraph`, `kHypergraph(3)`, `3-Coloring`).

use super::diagram;
use super::formula::Formula;
use super::theory::{parse_formula_str, Language, Symbol, Theory};
use crate::combin::permutations;
use crate::models::named_model;
use crate::{Error, Result};

fn f(src: &str) -> Formula {
    parse_formula_str(src).expect("builtin axiom")
}

fn vars(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

/// `¬P(x)` for every way of repeating a variable in two positions.
fn irreflexive(p: &str, k: usize) -> Vec<Formula> {
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let mut xs = vars("x", k);
            xs[j] = xs[i].clone();
            out.push(Formula::not(Formula::atom_owned(p, xs)));
        }
    }
    out
}

fn symmetric(p: &str, k: usize) -> Vec<Formula> {
    let xs = vars("x", k);
    permutations(k)
        .into_iter()
        .skip(1)
        .map(|s| {
            let ys: Vec<String> = s.iter().map(|&i| xs[i].clone()).collect();
            Formula::iff(Formula::atom_owned(p, xs.clone()), Formula::atom_owned(p, ys))
        })
        .collect()
}

fn theory(name: &str, syms: &[(String, usize)], axioms: Vec<Formula>) -> Result<Theory> {
    let lang = Language::new(syms.iter().map(|(n, k)| Symbol::new(n.clone(), *k)).collect())?;
    Theory::new(name, lang, axioms)
}

fn linorder(p: &str) -> Vec<Formula> {
    vec![
        f(&format!("!{p}(x, x)")),
        f(&format!("x != y -> ({p}(x, y) <-> !{p}(y, x))")),
        f(&format!("{p}(x, y) & {p}(y, z) -> {p}(x, z)")),
    ]
}

fn order(p: &str) -> Vec<Formula> {
    vec![
        f(&format!("!{p}(x, x)")),
        f(&format!("{p}(x, y) -> !{p}(y, x)")),
        f(&format!("{p}(x, y) & {p}(y, z) -> {p}(x, z)")),
    ]
}

fn graph_axioms() -> Vec<Formula> {
    vec![f("!E(x, x)"), f("E(x, y) <-> E(y, x)")]
}

fn orgraph_axioms() -> Vec<Formula> {
    vec![f("!E(x, x)"), f("E(x, y) -> !E(y, x)")]
}

fn e2() -> Vec<(String, usize)> {
    vec![("E".into(), 2)]
}

fn hypergraph(k: usize) -> Result<Theory> {
    let mut ax = irreflexive("E", k);
    ax.extend(symmetric("E", k));
    theory(&format!("Hypergraph({k})"), &[("E".into(), k)], ax)
}

/// Symmetric predicates `E1, …, EK` of arities `1, …, K`.
fn lin(k: usize) -> Result<Theory> {
    let syms: Vec<(String, usize)> = (1..=k).map(|i| (format!("E{i}"), i)).collect();
    let mut ax = Vec::new();
    for i in 1..=k {
        ax.extend(irreflexive(&format!("E{i}"), i));
        ax.extend(symmetric(&format!("E{i}"), i));
    }
    theory(&format!("Lin({k})"), &syms, ax)
}

fn colored_graph(c: usize, complete: bool) -> Result<Theory> {
    let syms: Vec<(String, usize)> = (0..c).map(|i| (format!("E{i}"), 2)).collect();
    let mut ax = Vec::new();
    for i in 0..c {
        ax.push(f(&format!("!E{i}(x, x)")));
        ax.push(f(&format!("E{i}(x, y) <-> E{i}(y, x)")));
    }
    for i in 0..c {
        for j in i + 1..c {
            ax.push(f(&format!("!E{i}(x, y) | !E{j}(x, y)")));
        }
    }
    let name = if complete { "ColoredComplete" } else { "ColoredGraph" };
    if complete {
        let any: Vec<String> = (0..c).map(|i| format!("E{i}(x, y)")).collect();
        ax.push(f(&format!("x != y -> ({})", any.join(" | "))));
    }
    theory(&format!("{name}({c})"), &syms, ax)
}

fn coloring(c: usize) -> Result<Theory> {
    let syms: Vec<(String, usize)> = (0..c).map(|i| (format!("X{i}"), 1)).collect();
    let mut ax = Vec::new();
    for i in 0..c {
        for j in i + 1..c {
            ax.push(f(&format!("!X{i}(x) | !X{j}(x)")));
        }
    }
    let any: Vec<String> = (0..c).map(|i| format!("X{i}(x)")).collect();
    ax.push(f(&any.join(" | ")));
    theory(&format!("Coloring({c})"), &syms, ax)
}

fn forbid_named(t: &Theory, name: &str, model: &str, induced: bool) -> Result<Theory> {
    let (lang, m) = named_model(model)?;
    if lang != t.language {
        return Err(Error::LanguageMismatch(model.into()));
    }
    let d = diagram(&m, &t.language, !induced);
    t.with_axioms(name, vec![Formula::not(d)])
}

fn component(name: &str) -> Result<Theory> {
    let (base, param) = split(name);
    let need = |p: Option<usize>| p.ok_or_else(|| Error::UnknownTheory(name.to_string()));
    match base.as_str() {
        "Empty" => theory("Empty", &[], vec![]),
        "Graph" => theory("Graph", &e2(), graph_axioms()),
        "Digraph" => theory("Digraph", &e2(), vec![f("!E(x, x)")]),
        "Orgraph" => theory("Orgraph", &e2(), orgraph_axioms()),
        "Tournament" => theory("Tournament", &e2(), vec![f("!E(x, x)"), f("x != y -> (E(x, y) <-> !E(y, x))")]),
        "Hypergraph" | "kHypergraph" => hypergraph(need(param)?),
        "Lin" => lin(need(param)?),
        "Coloring" | "cColoring" => coloring(need(param)?),
        "ColoredGraph" | "cColoredGraph" => colored_graph(need(param)?, false),
        "ColoredComplete" | "cColoredComplete" => colored_graph(need(param)?, true),
        "LinOrder" => theory("LinOrder", &[("L".into(), 2)], linorder("L")),
        "Order" => theory("Order", &[("L".into(), 2)], order("L")),
        "PreOrder" => {
            theory("PreOrder", &[("L".into(), 2)], vec![f("!L(x, x)"), f("x != z & L(x, y) & L(y, z) -> L(x, z)")])
        }
        "CycOrder" => {
            let mut ax = irreflexive("C", 3);
            ax.push(f("C(x, y, z) -> C(y, z, x)"));
            ax.push(f("x != y & x != z & y != z -> (C(x, y, z) <-> !C(x, z, y))"));
            ax.push(f("C(x, w, y) & C(x, y, z) -> C(x, w, z)"));
            theory("CycOrder", &[("C".into(), 3)], ax)
        }
        "Perm" => {
            let mut ax = linorder("L1");
            ax.extend(linorder("L2"));
            theory("Perm", &[("L1".into(), 2), ("L2".into(), 2)], ax)
        }
        "ExtendedOrder" => {
            let mut ax = linorder("L1");
            ax.extend(order("L2"));
            ax.push(f("L2(x, y) -> L1(x, y)"));
            theory("ExtendedOrder", &[("L1".into(), 2), ("L2".into(), 2)], ax)
        }
        "EqRel" => theory(
            "EqRel",
            &e2(),
            vec![f("!E(x, x)"), f("E(x, y) <-> E(y, x)"), f("x != z & E(x, y) & E(y, z) -> E(x, z)")],
        ),
        "EdgeOrderedGraph" => theory(
            "EdgeOrderedGraph",
            &[("E".into(), 2), ("P".into(), 4)],
            vec![
                f("!E(x, x)"),
                f("E(x, y) -> E(y, x)"),
                f("P(x1, y1, x2, y2) & P(x2, y2, x1, y1) -> (x1 = x2 & y1 = y2) | (x1 = y2 & y1 = x2)"),
                f("P(x1, y1, x2, y2) & P(x2, y2, x3, y3) -> P(x1, y1, x3, y3)"),
                f("E(x1, y1) & E(x2, y2) <-> P(x1, y1, x2, y2) | P(x2, y2, x1, y1)"),
                f("P(x1, y1, x2, y2) -> P(y1, x1, x2, y2) & P(x1, y1, y2, x2)"),
            ],
        ),
        "TFGraph" => {
            let mut ax = graph_axioms();
            ax.push(f("!(E(x, y) & E(y, z) & E(x, z))"));
            theory("TFGraph", &e2(), ax)
        }
        "ThreshGraph" => {
            let mut ax = graph_axioms();
            ax.push(f("E(x, y) & E(u, z) -> (E(x, u) & E(x, z)) | (E(y, u) & E(y, z)) | (E(u, x) & E(u, y)) | (E(z, x) & E(z, y))"));
            theory("ThreshGraph", &e2(), ax)
        }
        "IntervalGraph" => theory("IntervalGraph", &e2(), graph_axioms()),
        "FDF" => {
            let o = theory("Orgraph", &e2(), orgraph_axioms())?;
            forbid_c4(&o)
        }
        "CH" => {
            let o = theory("Orgraph", &e2(), orgraph_axioms())?;
            forbid_named(&o, "CH", "C3dir", false)
        }
        "Turan" => forbid_i4(&hypergraph(3)?),
        _ => Err(Error::UnknownTheory(name.to_string())),
    }
}

fn forbid_c4(o: &Theory) -> Result<Theory> {
    let mut m = crate::models::Structure::empty(4, &[2]);
    for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
        m.set(0, &[a, b], true);
    }
    let d = diagram(&m, &o.language, false);
    o.with_axioms("FDF", vec![Formula::not(d)])
}

fn forbid_i4(h: &Theory) -> Result<Theory> {
    let m = crate::models::Structure::empty(4, &[3]);
    let d = diagram(&m, &h.language, false);
    h.with_axioms("Turan", vec![Formula::not(d)])
}

/// Splits `Name(k)`, `kName`, `k-Name` into the base name and parameter.
fn split(name: &str) -> (String, Option<usize>) {
    let name = name.trim();
    if let Some(open) = name.find('(') {
        if let Some(inner) = name[open + 1..].strip_suffix(')') {
            return (name[..open].to_string(), inner.trim().parse().ok());
        }
    }
    let digits: String = name.chars().take_while(|c| c.is_ascii_digit()).collect();
    if !digits.is_empty() {
        let rest = name[digits.len()..].trim_start_matches('-');
        return (rest.to_string(), digits.parse().ok());
    }
    (name.to_string(), None)
}

/// Looks up a theory by registry name; `A+B` is the disjoint union.
pub fn builtin_theory(spec: &str) -> Result<Theory> {
    let mut parts = spec.split('+');
    let first = parts.next().unwrap_or("");
    let mut t = component(first)?;
    for p in parts {
        t = t.union(&component(p)?)?;
    }
    Ok(t)
}

pub const BUILTIN_NAMES: &[&str] = &[
    "Graph",
    "Digraph",
    "Orgraph",
    "Tournament",
    "Hypergraph(3)",
    "Lin(3)",
    "Coloring(2)",
    "ColoredGraph(2)",
    "ColoredComplete(3)",
    "LinOrder",
    "Order",
    "CycOrder",
    "Perm",
    "EqRel",
    "PreOrder",
    "ExtendedOrder",
    "EdgeOrderedGraph",
    "TFGraph",
    "ThreshGraph",
    "IntervalGraph",
    "FDF",
    "CH",
    "Turan",
    "Empty",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_names_resolve() {
        for n in BUILTIN_NAMES {
            builtin_theory(n).unwrap();
        }
        assert!(builtin_theory("Nope").is_err());
    }

    #[test]
    fn parameter_spellings() {
        let a = builtin_theory("Hypergraph(3)").unwrap();
        assert_eq!(builtin_theory("kHypergraph(3)").unwrap().axioms, a.axioms);
        assert_eq!(builtin_theory("3-Hypergraph").unwrap().axioms, a.axioms);
        assert_eq!(builtin_theory("2Coloring").unwrap().language.len(), 2);
    }

    #[test]
    fn unions() {
        let t = builtin_theory("Graph+LinOrder").unwrap();
        assert_eq!(t.language.to_string(), "E/2, L/2");
        assert!(builtin_theory("Graph+Graph").is_err());
    }
}
