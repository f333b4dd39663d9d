use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// An open (quantifier-free) formula over named variables.
///
/// `And` and `Or` built through [`Formula::and`] / [`Formula::or`] always
/// carry at least two children.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Const(bool),
    Atom(String, Vec<String>),
    Eq(String, String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom<S: Into<String>>(p: S, args: &[&str]) -> Formula {
        Formula::Atom(p.into(), args.iter().map(|s| s.to_string()).collect())
    }

    pub fn atom_owned<S: Into<String>>(p: S, args: Vec<String>) -> Formula {
        Formula::Atom(p.into(), args)
    }

    pub fn eq<S: Into<String>>(a: S, b: S) -> Formula {
        Formula::Eq(a.into(), b.into())
    }

    pub fn neq<S: Into<String>>(a: S, b: S) -> Formula {
        Formula::Not(Box::new(Formula::eq(a, b)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::Const(true),
            1 => fs.pop().unwrap(),
            _ => Formula::And(fs),
        }
    }

    pub fn or(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::Const(false),
            1 => fs.pop().unwrap(),
            _ => Formula::Or(fs),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit_vars(&mut |v| {
            if !out.iter().any(|w| w == v) {
                out.push(v.to_string());
            }
        });
        out
    }

    fn visit_vars(&self, f: &mut impl FnMut(&str)) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(_, args) => args.iter().for_each(|a| f(a)),
            Formula::Eq(a, b) => {
                f(a);
                f(b);
            }
            Formula::Not(g) => g.visit_vars(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_vars(f)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }

    /// Predicate symbols with the arities they are used at, in first-occurrence order.
    pub fn symbols(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        self.visit_atoms(&mut |p, args| {
            if !out.iter().any(|(q, k)| q == p && *k == args.len()) {
                out.push((p.to_string(), args.len()));
            }
        });
        out
    }

    pub fn visit_atoms(&self, f: &mut impl FnMut(&str, &[String])) {
        match self {
            Formula::Atom(p, args) => f(p, args),
            Formula::Const(_) | Formula::Eq(..) => {}
            Formula::Not(g) => g.visit_atoms(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_atoms(f)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }

    /// Simultaneous renaming of variables; unmapped variables are kept.
    pub fn rename(&self, map: &HashMap<String, String>) -> Formula {
        let r = |v: &String| map.get(v).cloned().unwrap_or_else(|| v.clone());
        match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(r).collect()),
            Formula::Eq(a, b) => Formula::Eq(r(a), r(b)),
            Formula::Not(g) => Formula::not(g.rename(map)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.rename(map)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.rename(map)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.rename(map), b.rename(map)),
            Formula::Iff(a, b) => Formula::iff(a.rename(map), b.rename(map)),
        }
    }

    /// Replaces every atom by the formula returned from `f`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&str, &[String]) -> Formula) -> Formula {
        match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Atom(p, args) => f(p, args),
            Formula::Eq(a, b) => Formula::Eq(a.clone(), b.clone()),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_atoms(f), b.map_atoms(f)),
        }
    }

    /// Renames predicate symbols; unmapped symbols are kept.
    pub fn rename_symbols(&self, map: &BTreeMap<String, String>) -> Formula {
        self.map_atoms(&mut |p, args| {
            Formula::Atom(map.get(p).cloned().unwrap_or_else(|| p.to_string()), args.to_vec())
        })
    }

    /// Propositional clean-up: constant folding, flattening of nested
    /// conjunctions/disjunctions, duplicate removal, `x = x`, double negation.
    pub fn simplify(&self) -> Formula {
        match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Atom(..) => self.clone(),
            Formula::Eq(a, b) => {
                if a == b {
                    Formula::Const(true)
                } else {
                    self.clone()
                }
            }
            Formula::Not(g) => match g.simplify() {
                Formula::Const(b) => Formula::Const(!b),
                Formula::Not(h) => *h,
                h => Formula::not(h),
            },
            Formula::And(gs) => {
                let mut out: Vec<Formula> = Vec::new();
                for g in gs {
                    match g.simplify() {
                        Formula::Const(true) => {}
                        Formula::Const(false) => return Formula::Const(false),
                        Formula::And(hs) => {
                            for h in hs {
                                if !out.contains(&h) {
                                    out.push(h);
                                }
                            }
                        }
                        h => {
                            if !out.contains(&h) {
                                out.push(h);
                            }
                        }
                    }
                }
                Formula::and(out)
            }
            Formula::Or(gs) => {
                let mut out: Vec<Formula> = Vec::new();
                for g in gs {
                    match g.simplify() {
                        Formula::Const(false) => {}
                        Formula::Const(true) => return Formula::Const(true),
                        Formula::Or(hs) => {
                            for h in hs {
                                if !out.contains(&h) {
                                    out.push(h);
                                }
                            }
                        }
                        h => {
                            if !out.contains(&h) {
                                out.push(h);
                            }
                        }
                    }
                }
                Formula::or(out)
            }
            Formula::Implies(a, b) => match (a.simplify(), b.simplify()) {
                (Formula::Const(false), _) | (_, Formula::Const(true)) => Formula::Const(true),
                (Formula::Const(true), h) => h,
                (h, Formula::Const(false)) => Formula::not(h).simplify(),
                (x, y) if x == y => Formula::Const(true),
                (x, y) => Formula::implies(x, y),
            },
            Formula::Iff(a, b) => match (a.simplify(), b.simplify()) {
                (Formula::Const(true), h) | (h, Formula::Const(true)) => h,
                (Formula::Const(false), h) | (h, Formula::Const(false)) => Formula::not(h).simplify(),
                (x, y) if x == y => Formula::Const(true),
                (x, y) => Formula::iff(x, y),
            },
        }
    }

    fn is_compound(&self) -> bool {
        matches!(self, Formula::And(_) | Formula::Or(_) | Formula::Implies(..) | Formula::Iff(..))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(g: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if g.is_compound() {
                write!(f, "({g})")
            } else {
                write!(f, "{g}")
            }
        }
        match self {
            Formula::Const(true) => write!(f, "true"),
            Formula::Const(false) => write!(f, "false"),
            Formula::Atom(p, args) => write!(f, "{}({})", p, args.join(", ")),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Not(g) => match g.as_ref() {
                Formula::Eq(a, b) => write!(f, "{a} != {b}"),
                _ => {
                    write!(f, "!")?;
                    child(g, f)
                }
            },
            Formula::And(gs) | Formula::Or(gs) => {
                let sep = if matches!(self, Formula::And(_)) { " & " } else { " | " };
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{sep}")?;
                    }
                    child(g, f)?;
                }
                Ok(())
            }
            Formula::Implies(a, b) => {
                child(a, f)?;
                write!(f, " -> ")?;
                child(b, f)
            }
            Formula::Iff(a, b) => {
                child(a, f)?;
                write!(f, " <-> ")?;
                child(b, f)
            }
        }
    }
}

/// Restricted-growth strings of length `k`: every set partition of `[k]`
/// exactly once, blocks numbered by first occurrence.
pub fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let top = if cur.is_empty() { 0 } else { max + 1 };
        for b in 0..=top {
            cur.push(b);
            rec(k, cur, max.max(b), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, &mut Vec::with_capacity(k), 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203];
        for (k, b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(k).len(), *b);
        }
    }

    #[test]
    fn vars_first_occurrence() {
        let f = Formula::implies(
            Formula::atom("E", &["y", "x"]),
            Formula::and(vec![Formula::atom("E", &["x", "z"]), Formula::eq("y", "w")]),
        );
        assert_eq!(f.vars(), vec!["y", "x", "z", "w"]);
    }

    #[test]
    fn simplify_dedupes_and_folds() {
        let e12 = Formula::atom("E", &["a", "b"]);
        let f = Formula::not(Formula::and(vec![
            e12.clone(),
            Formula::Const(true),
            Formula::and(vec![e12.clone(), Formula::eq("a", "a")]),
        ]));
        assert_eq!(f.simplify(), Formula::not(e12));
    }

    #[test]
    fn display_neq_sugar() {
        assert_eq!(Formula::neq("x", "y").to_string(), "x != y");
    }
}
