//! Open interpretations: translating formulas, acting on models, exact
//! verification, composition, equivalence and amalgamated sums.

mod named;
mod text;

pub use named::{named_interpretation, structure_erasing, NAMED_INTERPRETATIONS};
pub use text::{format_interp, parse_interp};

use crate::logic::{entails_finite, Compiled, Counterexample, Formula, Language, Symbol, Theory, Translation};
use crate::models::Structure;
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// A translation together with the theories it is meant to connect:
/// models of `target` are sent to structures of `source`'s language.
#[derive(Debug, Clone)]
pub struct Interpretation {
    pub source: Theory,
    pub target: Theory,
    pub map: Translation,
}

impl Interpretation {
    pub fn new(source: Theory, target: Theory, map: Translation) -> Result<Self> {
        if map.source != source.language || map.target != target.language {
            return Err(Error::LanguageMismatch("translation languages do not match the theories".into()));
        }
        Ok(Interpretation { source, target, map })
    }
}

/// An interpretation whose axiom images were checked to be entailed.
#[derive(Debug, Clone)]
pub struct Verified(Interpretation);

impl Verified {
    pub fn get(&self) -> &Interpretation {
        &self.0
    }
}

impl std::ops::Deref for Verified {
    type Target = Interpretation;
    fn deref(&self) -> &Interpretation {
        &self.0
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Pass(Verified),
    Fail { axiom: Formula, translated: Formula, counterexample: Counterexample },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass(_))
    }

    pub fn verified(self) -> Result<Verified> {
        match self {
            Verdict::Pass(v) => Ok(v),
            Verdict::Fail { axiom, .. } => Err(Error::Unverified(format!("axiom {axiom} fails"))),
        }
    }
}

pub fn translate_formula(map: &Translation, f: &Formula) -> Result<Formula> {
    map.translate(f)
}

/// Checks that the target theory entails the image of every source axiom.
pub fn verify_interpretation(i: &Interpretation) -> Result<Verdict> {
    let results: Vec<Result<Option<(Formula, Formula, Counterexample)>>> = i
        .source
        .axioms
        .par_iter()
        .map(|a| {
            let f = i.map.translate(a)?;
            Ok(entails_finite(&i.target, &f)?.map(|c| (a.clone(), f, c)))
        })
        .collect();
    for r in results {
        if let Some((axiom, translated, counterexample)) = r? {
            return Ok(Verdict::Fail { axiom, translated, counterexample });
        }
    }
    Ok(Verdict::Pass(Verified(i.clone())))
}

pub fn verify(i: Interpretation) -> Result<Verified> {
    verify_interpretation(&i)?.verified()
}

/// The structure of the source language induced on the vertices of `n`.
pub fn apply_model(map: &Translation, n: &Structure) -> Result<Structure> {
    if n.arities() != map.target.arities().as_slice() {
        return Err(Error::LanguageMismatch("model does not match translation target".into()));
    }
    let compiled: Vec<Compiled> = map.compiled();
    let mut out = Structure::for_language(n.n(), &map.source);
    for (p, c) in compiled.iter().enumerate() {
        let k = map.source.symbols()[p].arity;
        for idx in 0..n.n().pow(k as u32) {
            let t = out.decode(idx, k);
            if n.satisfies(c, &t) {
                out.set(p, &t, true);
            }
        }
    }
    Ok(out)
}

/// `J ∘ I` for `I: T1 → T2` and `J: T2 → T3`.
pub fn compose(i: &Interpretation, j: &Interpretation) -> Result<Interpretation> {
    Interpretation::new(i.source.clone(), j.target.clone(), i.map.then(&j.map)?)
}

/// Whether `T2` proves `I1(P) ≡ I2(P)` for every symbol.
pub fn equivalent(i1: &Translation, i2: &Translation, t2: &Theory) -> Result<bool> {
    if i1.source != i2.source {
        return Err(Error::LanguageMismatch("translations have different sources".into()));
    }
    for (p, sym) in i1.source.symbols().iter().enumerate() {
        let xs: Vec<String> = (1..=sym.arity).map(|v| format!("v{v}")).collect();
        let _ = p;
        let a = i1.apply_atom(&sym.name, &xs)?;
        let b = i2.apply_atom(&sym.name, &xs)?;
        if entails_finite(t2, &Formula::iff(a, b))?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Amalgamated sum of `I1: T → T1` and `I2: T → T2`.
#[derive(Debug, Clone)]
pub struct Amalgam {
    pub theory: Theory,
    pub hat1: Verified,
    pub hat2: Verified,
    /// Renaming applied to the symbols of `T2`.
    pub renamed: BTreeMap<String, String>,
}

pub fn amalgamate(i1: &Interpretation, i2: &Interpretation) -> Result<Amalgam> {
    if i1.source.language != i2.source.language {
        return Err(Error::LanguageMismatch("interpretations start from different theories".into()));
    }
    let l1 = &i1.target.language;
    let mut renamed = BTreeMap::new();
    let mut taken: Vec<String> = l1.names();
    let mut syms2 = Vec::new();
    for s in i2.target.language.symbols() {
        let mut name = s.name.clone();
        if taken.contains(&name) {
            let mut k = 2;
            while taken.contains(&format!("{}_{k}", s.name)) {
                k += 1;
            }
            name = format!("{}_{k}", s.name);
        }
        taken.push(name.clone());
        renamed.insert(s.name.clone(), name.clone());
        syms2.push(Symbol::new(name, s.arity));
    }
    let l2 = Language::new(syms2)?;
    let lang = l1.union(&l2)?;
    let mut axioms = i1.target.axioms.clone();
    for a in &i2.target.axioms {
        axioms.push(a.rename_symbols(&renamed));
    }
    for sym in i1.source.language.symbols() {
        let xs: Vec<String> = (1..=sym.arity).map(|v| format!("x{v}")).collect();
        let a = i1.map.apply_atom(&sym.name, &xs)?;
        let b = i2.map.apply_atom(&sym.name, &xs)?.rename_symbols(&renamed);
        axioms.push(Formula::iff(a, b));
    }
    let name = format!("{}+{}", i1.target.name, i2.target.name);
    let theory = Theory::new(name, lang.clone(), axioms)?;
    let embed = |from: &Theory, rename: &BTreeMap<String, String>| -> Result<Interpretation> {
        let images = from
            .language
            .symbols()
            .iter()
            .map(|s| {
                let xs: Vec<String> = (1..=s.arity).map(|v| format!("x{v}")).collect();
                let name = rename.get(&s.name).cloned().unwrap_or_else(|| s.name.clone());
                (xs.clone(), Formula::Atom(name, xs))
            })
            .collect();
        Interpretation::new(
            from.clone(),
            theory.clone(),
            Translation::new(from.language.clone(), lang.clone(), images)?,
        )
    };
    let hat1 = verify(embed(&i1.target, &BTreeMap::new())?)?;
    let hat2 = verify(embed(&i2.target, &renamed)?)?;
    Ok(Amalgam { theory, hat1, hat2, renamed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::builtin_theory;
    use crate::models::{isomorphic, named_model};

    #[test]
    fn orientation_erasing_on_cycle() {
        let v = verify(named_interpretation("orientation-erasing").unwrap()).unwrap();
        let c3 = named_model("C3dir").unwrap().1;
        let img = apply_model(&v.map, &c3).unwrap();
        assert!(isomorphic(&img, &named_model("K3").unwrap().1).unwrap());
    }

    #[test]
    fn named_interpretations_verify() {
        for name in [
            "orientation-erasing",
            "edge-color-erasing(3)",
            "vertex-color-erasing(2)",
            "order-erasing",
            "perm-first-order",
            "feedback-arc",
            "feedback-arc-inverse",
            "triangle",
            "fdf",
            "fdf-thresh",
            "edge-order-erasing",
            "axiom-adding",
        ] {
            let i = named_interpretation(name).unwrap();
            assert!(verify_interpretation(&i).unwrap().is_pass(), "{name}");
        }
    }

    #[test]
    fn feedback_arc_round_trip_is_identity() {
        let f = named_interpretation("feedback-arc").unwrap();
        let g = named_interpretation("feedback-arc-inverse").unwrap();
        let t = builtin_theory("Tournament+LinOrder").unwrap();
        assert!(equivalent(&g.map.then(&f.map).unwrap(), &Translation::identity(&t.language), &t).unwrap());
    }

    #[test]
    fn bogus_translation_fails_on_two_vertices() {
        let g = builtin_theory("Graph").unwrap();
        let o = builtin_theory("Orgraph").unwrap();
        let i = Interpretation::new(g.clone(), o, Translation::identity(&g.language)).unwrap();
        match verify_interpretation(&i).unwrap() {
            Verdict::Fail { counterexample, .. } => assert_eq!(counterexample.model.n(), 2),
            Verdict::Pass(_) => panic!("identity Graph <- Orgraph must fail"),
        }
    }
}
