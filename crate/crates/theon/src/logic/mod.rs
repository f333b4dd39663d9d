//! Relational languages, open formulas, universal theories and the
//! operations on them: substitution, finite entailment, canonicity and
//! canonicalization, diagrams.

mod builtins;
mod formula;
pub mod sat;
mod theory;
mod translation;

pub use builtins::{builtin_theory, BUILTIN_NAMES};
pub use formula::{set_partitions, Formula};
pub use theory::{parse_formula_str, CFormula, Compiled, Language, Symbol, Theory, MAX_ARITY};
pub use translation::Translation;

pub(crate) use theory::parse_formula;

use crate::guard::Guard;
use crate::models::{distinct, Structure};
use crate::{Error, Result};
use sat::{Cnf, Ground};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Replaces the variables of each class by a fresh `y1..ym`; classes are
/// numbered by first occurrence in `f`.
pub fn substitute(f: &Formula, classes: &[Vec<String>]) -> Result<Formula> {
    let vars = f.vars();
    let mut class_of: HashMap<&str, usize> = HashMap::new();
    for (c, members) in classes.iter().enumerate() {
        for v in members {
            if !vars.contains(v) {
                return Err(Error::Partition(format!("{v} is not a variable of the formula")));
            }
            if class_of.insert(v.as_str(), c).is_some() {
                return Err(Error::Partition(format!("{v} appears in two classes")));
            }
        }
    }
    if let Some(v) = vars.iter().find(|v| !class_of.contains_key(v.as_str())) {
        return Err(Error::Partition(format!("{v} is not covered")));
    }
    let mut fresh: HashMap<usize, String> = HashMap::new();
    let mut map = HashMap::new();
    for v in &vars {
        let c = class_of[v.as_str()];
        let next = fresh.len() + 1;
        let y = fresh.entry(c).or_insert_with(|| format!("y{next}")).clone();
        map.insert(v.clone(), y);
    }
    Ok(f.rename(&map))
}

/// Open diagram of `m` over variables `x1..xn`; the positive diagram omits
/// negated atoms. Only tuples with pairwise distinct entries are listed.
pub fn diagram(m: &Structure, lang: &Language, positive: bool) -> Formula {
    let n = m.n();
    let x = |i: usize| format!("x{}", i + 1);
    let mut parts = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            parts.push(Formula::neq(x(i), x(j)));
        }
    }
    let mut negs = Vec::new();
    for (p, sym) in lang.symbols().iter().enumerate() {
        let k = sym.arity;
        for idx in 0..n.pow(k as u32) {
            let t = m.decode(idx, k);
            if !distinct(&t) {
                continue;
            }
            let atom = Formula::Atom(sym.name.clone(), t.iter().map(|&v| x(v)).collect());
            if m.holds(p, &t) {
                parts.push(atom);
            } else if !positive {
                negs.push(Formula::not(atom));
            }
        }
    }
    parts.extend(negs);
    Formula::and(parts)
}

/// Appends `¬D(M)` (induced) or `¬PD(M)` (not induced) for every `M`.
pub fn forbid(t: &Theory, ms: &[Structure], induced: bool) -> Result<Theory> {
    let extra = ms
        .iter()
        .map(|m| {
            if m.arities() != t.language.arities() {
                return Err(Error::LanguageMismatch("forbidden structure".into()));
            }
            Ok(Formula::not(diagram(m, &t.language, !induced)))
        })
        .collect::<Result<Vec<_>>>()?;
    t.with_axioms(t.name.clone(), extra)
}

/// A model of the theory and an assignment under which a formula fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub model: Structure,
    pub assignment: Vec<(String, usize)>,
}

impl Counterexample {
    pub fn describe(&self, lang: &Language) -> String {
        let asg: Vec<String> = self.assignment.iter().map(|(v, i)| format!("{v}={}", i + 1)).collect();
        format!("{} with {}", crate::models::format_model(&self.model, lang), asg.join(" "))
    }
}

type CnfCache = Mutex<HashMap<(String, usize), Arc<Cnf>>>;

fn axiom_cnf(t: &Theory, s: usize, guard: &Guard) -> Result<Arc<Cnf>> {
    static CACHE: OnceLock<CnfCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (t.to_string(), s);
    if let Some(c) = cache.lock().unwrap().get(&key) {
        return Ok(c.clone());
    }
    let offsets = atom_offsets(&t.language, s);
    let nvars = *offsets.last().unwrap();
    let mut cnf = Cnf::new(nvars);
    for a in t.compiled_axioms() {
        let k = a.nvars();
        let total = s.pow(k as u32);
        guard.tick(total as u64)?;
        let mut asg = vec![0usize; k];
        for idx in 0..total {
            let mut r = idx;
            for i in (0..k).rev() {
                asg[i] = r % s;
                r /= s;
            }
            let prop = sat::ground(&a.body, &asg, &mut |p, tup| {
                Ground::Var((offsets[p] + tup.iter().fold(0, |acc, &v| acc * s + v)) as u32)
            });
            cnf.add_prop(&prop)?;
        }
    }
    let cnf = Arc::new(cnf);
    cache.lock().unwrap().insert(key, cnf.clone());
    Ok(cnf)
}

fn atom_offsets(lang: &Language, s: usize) -> Vec<usize> {
    let mut offsets = vec![0];
    for sym in lang.symbols() {
        offsets.push(offsets.last().unwrap() + s.pow(sym.arity as u32));
    }
    offsets
}

/// Decides whether `f` holds in every finite model of `t` under every
/// assignment; returns a counterexample otherwise.
///
/// Every assignment factors through a partition of the variables, and the
/// image of an assignment spans an induced submodel, so it suffices to
/// search models on exactly as many vertices as the partition has blocks.
pub fn entails_finite(t: &Theory, f: &Formula) -> Result<Option<Counterexample>> {
    t.language.check(f)?;
    let c = Compiled::new(f, &t.language, None)?;
    let guard = Guard::new();
    let k = c.nvars();
    let mut parts = set_partitions(k);
    parts.sort_by_key(|r| std::cmp::Reverse(r.iter().max().map_or(0, |m| m + 1)));
    for rgs in parts {
        let s = rgs.iter().max().map_or(0, |m| m + 1);
        let offsets = atom_offsets(&t.language, s);
        let neg = sat::ground(&CFormula::Not(Box::new(c.body.clone())), &rgs, &mut |p, tup| {
            Ground::Var((offsets[p] + tup.iter().fold(0, |acc, &v| acc * s + v)) as u32)
        });
        if neg == sat::Prop::Const(false) {
            continue;
        }
        let mut cnf = (*axiom_cnf(t, s, &guard)?).clone();
        cnf.add_prop(&neg)?;
        if let Some(sol) = sat::solve(&cnf, &guard)? {
            let mut model = Structure::for_language(s, &t.language);
            for (p, sym) in t.language.symbols().iter().enumerate() {
                for idx in 0..s.pow(sym.arity as u32) {
                    if sol[offsets[p] + idx] {
                        let tup = model.decode(idx, sym.arity);
                        model.set(p, &tup, true);
                    }
                }
            }
            let assignment = c.vars.iter().cloned().zip(rgs.iter().cloned()).collect();
            return Ok(Some(Counterexample { model, assignment }));
        }
    }
    Ok(None)
}

pub fn entails(t: &Theory, f: &Formula) -> Result<bool> {
    Ok(entails_finite(t, f)?.is_none())
}

/// Outcome of one canonicity instance `x_i = x_j → ¬P(x)` (1-based `i < j`).
#[derive(Debug, Clone)]
pub struct CanonicityItem {
    pub symbol: String,
    pub i: usize,
    pub j: usize,
    pub counterexample: Option<Counterexample>,
}

fn canonicity_formula(p: &str, k: usize, i: usize, j: usize, prefix: &str) -> Formula {
    let xs: Vec<String> = (1..=k).map(|v| format!("{prefix}{v}")).collect();
    Formula::implies(Formula::eq(xs[i - 1].clone(), xs[j - 1].clone()), Formula::not(Formula::Atom(p.to_string(), xs)))
}

pub fn check_canonical(t: &Theory) -> Result<Vec<CanonicityItem>> {
    let mut out = Vec::new();
    for sym in t.language.symbols() {
        for i in 1..=sym.arity {
            for j in i + 1..=sym.arity {
                let f = canonicity_formula(&sym.name, sym.arity, i, j, "x");
                out.push(CanonicityItem { symbol: sym.name.clone(), i, j, counterexample: entails_finite(t, &f)? });
            }
        }
    }
    Ok(out)
}

pub fn is_canonical(t: &Theory) -> Result<bool> {
    Ok(check_canonical(t)?.iter().all(|c| c.counterexample.is_none()))
}

/// A canonical theory isomorphic to the input, with the two mutually
/// inverse translations.
#[derive(Debug, Clone)]
pub struct Canonicalization {
    pub theory: Theory,
    /// Source symbols in terms of the canonical ones.
    pub to_canonical: Translation,
    /// Canonical symbols in terms of the source ones.
    pub from_canonical: Translation,
}

/// Symbol name for `P` restricted to the equality pattern `rgs`.
pub fn pattern_symbol(p: &str, rgs: &[usize]) -> String {
    let digits: Vec<String> = rgs.iter().map(|d| d.to_string()).collect();
    format!("{p}_{}", digits.join(""))
}

pub fn canonicalize(t: &Theory) -> Result<Canonicalization> {
    let mut syms = Vec::new();
    let mut j_images = Vec::new();
    let mut i_images = Vec::new();
    for sym in t.language.symbols() {
        let k = sym.arity;
        let xs: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
        let mut disjuncts = Vec::new();
        for rgs in set_partitions(k) {
            let m = rgs.iter().max().unwrap() + 1;
            let name = pattern_symbol(&sym.name, &rgs);
            syms.push(Symbol::new(name.clone(), m));
            let ys: Vec<String> = (1..=m).map(|i| format!("y{i}")).collect();
            let mut conj = Vec::new();
            for a in 0..m {
                for b in a + 1..m {
                    conj.push(Formula::neq(ys[a].clone(), ys[b].clone()));
                }
            }
            conj.push(Formula::Atom(sym.name.clone(), rgs.iter().map(|&c| ys[c].clone()).collect()));
            j_images.push((ys, Formula::and(conj)));
            let mut d = Vec::new();
            for a in 0..k {
                for b in a + 1..k {
                    if rgs[a] == rgs[b] {
                        d.push(Formula::eq(xs[a].clone(), xs[b].clone()));
                    } else {
                        d.push(Formula::neq(xs[a].clone(), xs[b].clone()));
                    }
                }
            }
            let reps: Vec<String> = (0..m).map(|c| xs[rgs.iter().position(|&r| r == c).unwrap()].clone()).collect();
            d.push(Formula::Atom(name, reps));
            disjuncts.push(Formula::and(d));
        }
        i_images.push((xs, Formula::or(disjuncts)));
    }
    let lang = Language::new(syms)?;
    let to_canonical = Translation::new(t.language.clone(), lang.clone(), i_images)?;
    let from_canonical = Translation::new(lang.clone(), t.language.clone(), j_images)?;
    let mut axioms = Vec::new();
    for s in lang.symbols() {
        for i in 1..=s.arity {
            for j in i + 1..=s.arity {
                axioms.push(canonicity_formula(&s.name, s.arity, i, j, "y"));
            }
        }
    }
    for a in &t.axioms {
        axioms.push(to_canonical.translate(a)?);
    }
    let theory = Theory::new(format!("{}Canonical", t.name), lang, axioms)?;
    Ok(Canonicalization { theory, to_canonical, from_canonical })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitute_full_identification() {
        let f = Formula::atom("E", &["x", "y"]);
        let g = substitute(&f, &[vec!["x".into(), "y".into()]]).unwrap();
        assert_eq!(g, Formula::atom("E", &["y1", "y1"]));
    }

    #[test]
    fn substitute_rejects_bad_partitions() {
        let f = Formula::atom("E", &["x", "y"]);
        assert!(substitute(&f, &[vec!["x".into()]]).is_err());
        assert!(substitute(&f, &[vec!["x".into(), "y".into()], vec!["z".into()]]).is_err());
    }

    #[test]
    fn diagram_examples() {
        let lang = Language::from_pairs(&[("E", 2)]).unwrap();
        let (_, k2) = crate::models::named_model("K2").unwrap();
        assert_eq!(diagram(&k2, &lang, true).to_string(), "x1 != x2 & E(x1, x2) & E(x2, x1)");
        let i2 = Structure::empty(2, &[2]);
        assert_eq!(diagram(&i2, &lang, false).to_string(), "x1 != x2 & !E(x1, x2) & !E(x2, x1)");
        assert_eq!(diagram(&Structure::empty(1, &[2]), &lang, false), Formula::Const(true));
    }

    #[test]
    fn entailment_examples() {
        let tour = builtin_theory("Tournament").unwrap();
        assert!(entails(&tour, &parse_formula_str("E(x,y) | E(y,x) | x = y").unwrap()).unwrap());
        let g = builtin_theory("Graph").unwrap();
        assert!(entails(&g, &parse_formula_str("E(x,y) -> E(y,x)").unwrap()).unwrap());
        let cx = entails_finite(&g, &parse_formula_str("E(x,y)").unwrap()).unwrap().unwrap();
        assert_eq!(cx.model.n(), 2);
    }

    #[test]
    fn canonical_symbols_for_graphs() {
        let c = canonicalize(&builtin_theory("Graph").unwrap()).unwrap();
        assert_eq!(c.theory.language.to_string(), "E_00/1, E_01/2");
    }
}
