use super::formula::Formula;
use super::theory::{Compiled, Language};
use crate::{Error, Result};
use std::collections::HashMap;
use std::fmt;

/// Maps every symbol of `source` to an open formula over `target` whose
/// variables are among the declared parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translation {
    pub source: Language,
    pub target: Language,
    images: Vec<(Vec<String>, Formula)>,
}

impl Translation {
    pub fn new(source: Language, target: Language, images: Vec<(Vec<String>, Formula)>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::Invalid(format!(
                "translation has {} images for {} symbols",
                images.len(),
                source.len()
            )));
        }
        for (sym, (params, f)) in source.symbols().iter().zip(&images) {
            if params.len() != sym.arity {
                return Err(Error::Arity { symbol: sym.name.clone(), expected: sym.arity, found: params.len() });
            }
            for (i, p) in params.iter().enumerate() {
                if params[..i].contains(p) {
                    return Err(Error::Invalid(format!("repeated parameter {p} for {}", sym.name)));
                }
            }
            for v in f.vars() {
                if !params.contains(&v) {
                    return Err(Error::Invalid(format!("image of {} uses undeclared variable {v}", sym.name)));
                }
            }
            target.check(f)?;
        }
        Ok(Translation { source, target, images })
    }

    /// Builds a translation from `(symbol, params, formula)` triples given
    /// in any order.
    pub fn from_rules(source: Language, target: Language, rules: Vec<(String, Vec<String>, Formula)>) -> Result<Self> {
        let mut images: Vec<Option<(Vec<String>, Formula)>> = vec![None; source.len()];
        for (name, params, f) in rules {
            let p = source.index(&name).ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
            if images[p].is_some() {
                return Err(Error::DuplicateSymbol(name));
            }
            images[p] = Some((params, f));
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(p, im)| im.ok_or_else(|| Error::Invalid(format!("no image for {}", source.symbols()[p].name))))
            .collect::<Result<Vec<_>>>()?;
        Translation::new(source, target, images)
    }

    pub fn identity(lang: &Language) -> Translation {
        let images = lang
            .symbols()
            .iter()
            .map(|s| {
                let xs: Vec<String> = (1..=s.arity).map(|i| format!("x{i}")).collect();
                (xs.clone(), Formula::Atom(s.name.clone(), xs))
            })
            .collect();
        Translation { source: lang.clone(), target: lang.clone(), images }
    }

    pub fn image(&self, p: usize) -> (&[String], &Formula) {
        let (ps, f) = &self.images[p];
        (ps, f)
    }

    pub fn images(&self) -> &[(Vec<String>, Formula)] {
        &self.images
    }

    /// The image of `P(args)`.
    pub fn apply_atom(&self, p: &str, args: &[String]) -> Result<Formula> {
        let i = self.source.index(p).ok_or_else(|| Error::UnknownSymbol(p.to_string()))?;
        let (params, f) = &self.images[i];
        let map: HashMap<String, String> = params.iter().cloned().zip(args.iter().cloned()).collect();
        Ok(f.rename(&map))
    }

    /// Replaces every atom of a source-language formula by its image;
    /// equality atoms are kept.
    pub fn translate(&self, f: &Formula) -> Result<Formula> {
        self.source.check(f)?;
        Ok(f.map_atoms(&mut |p, args| self.apply_atom(p, args).expect("checked symbol")))
    }

    /// `J ∘ I`: first `self` (into `other.source`), then `other`.
    pub fn then(&self, other: &Translation) -> Result<Translation> {
        if self.target != other.source {
            return Err(Error::LanguageMismatch(format!(
                "cannot compose: target {{{}}} vs source {{{}}}",
                self.target, other.source
            )));
        }
        let images =
            self.images.iter().map(|(ps, f)| Ok((ps.clone(), other.translate(f)?))).collect::<Result<Vec<_>>>()?;
        Translation::new(self.source.clone(), other.target.clone(), images)
    }

    pub fn compiled(&self) -> Vec<Compiled> {
        self.images.iter().map(|(ps, f)| Compiled::new(f, &self.target, Some(ps)).expect("validated image")).collect()
    }
}

impl fmt::Display for Translation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (sym, (ps, g))) in self.source.symbols().iter().zip(&self.images).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}({}) := {}", sym.name, ps.join(", "), g)?;
        }
        Ok(())
    }
}
