use super::Interpretation;
use crate::logic::{builtin_theory, parse_formula_str, Formula, Theory, Translation};
use crate::{Error, Result};

pub const NAMED_INTERPRETATIONS: &[&str] = &[
    "orientation-erasing",
    "edge-color-erasing(c)",
    "vertex-color-erasing(c)",
    "order-erasing",
    "perm-first-order",
    "feedback-arc",
    "feedback-arc-inverse",
    "triangle",
    "fdf",
    "fdf-thresh",
    "edge-order-erasing",
    "axiom-adding",
];

fn rules(source: &str, target: &str, rules: &[(&str, &[&str], String)]) -> Result<Interpretation> {
    let s = builtin_theory(source)?;
    let t = builtin_theory(target)?;
    let rules = rules
        .iter()
        .map(|(p, xs, f)| Ok((p.to_string(), xs.iter().map(|x| x.to_string()).collect(), parse_formula_str(f)?)))
        .collect::<Result<Vec<_>>>()?;
    let map = Translation::from_rules(s.language.clone(), t.language.clone(), rules)?;
    Interpretation::new(s, t, map)
}

/// Keeps the symbols of `small` unchanged inside the larger language of `big`.
pub fn structure_erasing(small: &Theory, big: &Theory) -> Result<Interpretation> {
    let mut images = Vec::new();
    for s in small.language.symbols() {
        match big.language.get(&s.name) {
            Some(b) if b.arity == s.arity => {}
            _ => return Err(Error::LanguageMismatch(format!("{} is not a symbol of {}", s.name, big.name))),
        }
        let xs: Vec<String> = (1..=s.arity).map(|i| format!("x{i}")).collect();
        images.push((xs.clone(), Formula::Atom(s.name.clone(), xs)));
    }
    let map = Translation::new(small.language.clone(), big.language.clone(), images)?;
    Interpretation::new(small.clone(), big.clone(), map)
}

fn split_param(name: &str) -> (&str, Option<usize>) {
    if let Some(open) = name.find('(') {
        if let Some(inner) = name[open + 1..].strip_suffix(')') {
            if let Ok(c) = inner.trim().parse() {
                return (&name[..open], Some(c));
            }
        }
    }
    (name, None)
}

fn fdf_image() -> String {
    let x = ["x0", "x1", "x2"];
    let mut out = "x0 != x1 & x0 != x2 & x1 != x2 & (".to_string();
    let mut alts = Vec::new();
    for a in 0..3 {
        let (p, n) = (x[(a + 1) % 3], x[(a + 2) % 3]);
        alts.push(format!("(E({}, {p}) & E({}, {n}))", x[a], x[a]));
    }
    for a in 0..3 {
        let (p, n) = (x[(a + 1) % 3], x[(a + 2) % 3]);
        let c = x[a];
        alts.push(format!("(!E({c}, {p}) & !E({c}, {n}) & !E({p}, {c}) & !E({n}, {c}))"));
    }
    out.push_str(&alts.join(" | "));
    out.push(')');
    out
}

fn fdf_thresh_image() -> String {
    let mut alts = Vec::new();
    for a in 0..3 {
        alts.push(format!("(X{a}(x) & X{}(y) & !E(x, y))", (a + 2) % 3));
    }
    for a in 0..3 {
        alts.push(format!("(X{a}(x) & X{}(y) & E(x, y))", (a + 1) % 3));
    }
    alts.join(" | ")
}

/// Looks up a named interpretation; `Graph` erasing maps take an optional
/// color count `(c)`, default 2.
pub fn named_interpretation(name: &str) -> Result<Interpretation> {
    let (base, param) = split_param(name.trim());
    let c = param.unwrap_or(2);
    let xy: &[&str] = &["x", "y"];
    match base {
        "orientation-erasing" => rules("Graph", "Orgraph", &[("E", xy, "E(x, y) | E(y, x)".into())]),
        "edge-color-erasing" => {
            let any: Vec<String> = (0..c).map(|i| format!("E{i}(x, y)")).collect();
            rules("Graph", &format!("ColoredGraph({c})"), &[("E", xy, any.join(" | "))])
        }
        "vertex-color-erasing" => {
            structure_erasing(&builtin_theory("Graph")?, &builtin_theory(&format!("Graph+Coloring({c})"))?)
        }
        "order-erasing" => structure_erasing(&builtin_theory("Graph")?, &builtin_theory("Graph+LinOrder")?),
        "perm-first-order" => rules("LinOrder", "Perm", &[("L", xy, "L1(x, y)".into())]),
        "feedback-arc" => rules(
            "Graph+LinOrder",
            "Tournament+LinOrder",
            &[("E", xy, "(L(x, y) & E(y, x)) | (L(y, x) & E(x, y))".into()), ("L", xy, "L(x, y)".into())],
        ),
        "feedback-arc-inverse" => rules(
            "Tournament+LinOrder",
            "Graph+LinOrder",
            &[("E", xy, "(L(x, y) & !E(x, y)) | (L(y, x) & E(x, y))".into()), ("L", xy, "L(x, y)".into())],
        ),
        "triangle" => rules("Hypergraph(3)", "Graph", &[("E", &["x", "y", "z"], "E(x, y) & E(y, z) & E(x, z)".into())]),
        "fdf" => rules("Turan", "FDF", &[("E", &["x0", "x1", "x2"], fdf_image())]),
        "fdf-thresh" => rules("FDF", "ThreshGraph+Coloring(3)", &[("E", xy, fdf_thresh_image())]),
        "edge-order-erasing" => structure_erasing(&builtin_theory("Graph")?, &builtin_theory("EdgeOrderedGraph")?),
        "axiom-adding" => structure_erasing(&builtin_theory("Graph")?, &builtin_theory("TFGraph")?),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}
