//! Rational combinations of isomorphism classes stored in a level basis,
//! with lifting, the disjoint-placement product, evaluation and the
//! homomorphism induced by an interpretation.

use crate::densities::{density, multi_density, DensityKind};
use crate::interpret::{apply_model, Verified};
use crate::logic::Theory;
use crate::models::{canonical_code, canonical_form, enumerate_models, format_model, parse_model, Code, Structure};
use crate::rational::{self, Rational};
use crate::syntax::{Cursor, Tok};
use crate::{Error, Result};
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct FlagVector {
    pub theory: Theory,
    pub level: usize,
    /// Nonzero coefficients keyed by canonical code; the structure is the
    /// canonical representative.
    pub terms: BTreeMap<Code, (Structure, Rational)>,
}

impl FlagVector {
    pub fn zero(theory: &Theory, level: usize) -> FlagVector {
        FlagVector { theory: theory.clone(), level, terms: BTreeMap::new() }
    }

    /// The identity element: the unique model on zero vertices.
    pub fn unit(theory: &Theory) -> FlagVector {
        let mut v = FlagVector::zero(theory, 0);
        let empty = Structure::for_language(0, &theory.language);
        v.add_term(&empty, rational::one()).expect("empty structure");
        v
    }

    pub fn from_model(theory: &Theory, m: &Structure) -> Result<FlagVector> {
        let mut v = FlagVector::zero(theory, m.n());
        v.add_term(m, rational::one())?;
        Ok(v)
    }

    /// Adds `c·[m]`, where `m` must be a model of the theory at this level.
    pub fn add_term(&mut self, m: &Structure, c: Rational) -> Result<()> {
        if m.n() != self.level {
            return Err(Error::Level(format!("model has {} vertices, vector level is {}", m.n(), self.level)));
        }
        if m.arities() != self.theory.language.arities().as_slice() {
            return Err(Error::LanguageMismatch("model does not match the theory language".into()));
        }
        if !m.is_model(&self.theory) {
            return Err(Error::Invalid(format!("structure is not a model of {}", self.theory.name)));
        }
        let class = canonical_form(m)?;
        let entry = self.terms.entry(class.code).or_insert_with(|| (class.canonical, rational::zero()));
        entry.1 += c;
        self.prune();
        Ok(())
    }

    fn prune(&mut self) {
        self.terms.retain(|_, (_, c)| !c.is_zero());
    }

    pub fn coefficient(&self, m: &Structure) -> Result<Rational> {
        let code = canonical_code(m)?;
        Ok(self.terms.get(&code).map(|(_, c)| c.clone()).unwrap_or_else(rational::zero))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> FlagVector {
        let mut out = self.clone();
        for (_, x) in out.terms.values_mut() {
            *x *= c;
        }
        out.prune();
        out
    }

    fn check_theory(&self, other: &FlagVector) -> Result<()> {
        if self.theory.language != other.theory.language || self.theory.axioms != other.theory.axioms {
            return Err(Error::LanguageMismatch(format!(
                "vectors over {} and {}",
                self.theory.name, other.theory.name
            )));
        }
        Ok(())
    }

    /// Sum, expressed at the larger of the two levels.
    pub fn add(&self, other: &FlagVector) -> Result<FlagVector> {
        self.check_theory(other)?;
        let level = self.level.max(other.level);
        let mut out = self.lift(level)?;
        for (code, (m, c)) in other.lift(level)?.terms {
            out.terms.entry(code).or_insert_with(|| (m, rational::zero())).1 += c;
        }
        out.prune();
        Ok(out)
    }

    /// Re-expresses the vector at `level` by the chain rule.
    pub fn lift(&self, level: usize) -> Result<FlagVector> {
        if level < self.level {
            return Err(Error::Level(format!("cannot lift from level {} to {level}", self.level)));
        }
        if level == self.level {
            return Ok(self.clone());
        }
        let classes = enumerate_models(&self.theory, level)?;
        let terms: Vec<(Code, Structure, Rational)> = classes
            .par_iter()
            .map(|cl| {
                let mut sum = rational::zero();
                for (m, c) in self.terms.values() {
                    sum += c * density(DensityKind::P, m, &cl.canonical)?;
                }
                Ok((cl.code.clone(), cl.canonical.clone(), sum))
            })
            .collect::<Result<_>>()?;
        let mut out = FlagVector::zero(&self.theory, level);
        for (code, m, c) in terms {
            if !c.is_zero() {
                out.terms.insert(code, (m, c));
            }
        }
        Ok(out)
    }

    /// `Σ c(M)·p(M, N)`.
    pub fn evaluate(&self, n: &Structure) -> Result<Rational> {
        if n.n() < self.level {
            return Err(Error::Level(format!("model has {} vertices, vector level is {}", n.n(), self.level)));
        }
        let mut sum = rational::zero();
        for (m, c) in self.terms.values() {
            sum += c * density(DensityKind::P, m, n)?;
        }
        Ok(sum)
    }

    /// Equality in the algebra, tested by lifting both sides to a common
    /// level and comparing coefficients.
    pub fn algebra_eq(&self, other: &FlagVector) -> Result<bool> {
        self.check_theory(other)?;
        let level = self.level.max(other.level);
        let a = self.lift(level)?;
        let b = other.lift(level)?;
        Ok(a.terms.len() == b.terms.len()
            && a.terms.iter().all(|(k, (_, c))| b.terms.get(k).is_some_and(|(_, d)| d == c)))
    }
}

/// `u·v` at `level ≥ ℓ_u + ℓ_v`.
pub fn product(u: &FlagVector, v: &FlagVector, level: usize) -> Result<FlagVector> {
    u.check_theory(v)?;
    if level < u.level + v.level {
        return Err(Error::Level(format!(
            "product of levels {} and {} needs level at least {}",
            u.level,
            v.level,
            u.level + v.level
        )));
    }
    let classes = enumerate_models(&u.theory, level)?;
    if classes.is_empty() {
        return Err(Error::Invalid(format!("{} has no models on {level} vertices", u.theory.name)));
    }
    let terms: Vec<(Code, Structure, Rational)> = classes
        .par_iter()
        .map(|cl| {
            let mut sum = rational::zero();
            for (m1, c1) in u.terms.values() {
                for (m2, c2) in v.terms.values() {
                    let p = multi_density(&[m1.clone(), m2.clone()], &cl.canonical)?;
                    sum += c1 * c2 * p;
                }
            }
            Ok((cl.code.clone(), cl.canonical.clone(), sum))
        })
        .collect::<Result<_>>()?;
    let mut out = FlagVector::zero(&u.theory, level);
    for (code, m, c) in terms {
        if !c.is_zero() {
            out.terms.insert(code, (m, c));
        }
    }
    Ok(out)
}

/// `π^I(v)`: every basis class `M` of the source theory is replaced by the
/// sum of target classes `N` of the same size with `I(N) ≅ M`.
pub fn pi_map(i: &Verified, v: &FlagVector) -> Result<FlagVector> {
    if v.theory.language != i.source.language {
        return Err(Error::LanguageMismatch(format!(
            "vector is over {}, interpretation starts from {}",
            v.theory.name, i.source.name
        )));
    }
    let classes = enumerate_models(&i.target, v.level)?;
    let terms: Vec<(Code, Structure, Rational)> = classes
        .par_iter()
        .map(|cl| {
            let image = apply_model(&i.map, &cl.canonical)?;
            let code = canonical_code(&image)?;
            let c = v.terms.get(&code).map(|(_, c)| c.clone()).unwrap_or_else(rational::zero);
            Ok((cl.code.clone(), cl.canonical.clone(), c))
        })
        .collect::<Result<_>>()?;
    let mut out = FlagVector::zero(&i.target, v.level);
    for (code, m, c) in terms {
        if !c.is_zero() {
            out.terms.insert(code, (m, c));
        }
    }
    Ok(out)
}

fn strip_model_block(text: &str) -> &str {
    let t = text.trim();
    t.strip_prefix("model").map(|r| r.trim().trim_start_matches('{').trim_end_matches('}').trim()).unwrap_or(t)
}

/// Parses `flagvec { theory = Graph level = 3 coeff "n = 3 E = (1,2) (2,1)" = 2/3 ... }`.
/// Each key is a model body in the model-file syntax.
pub fn parse_flagvec(src: &str, resolve: &dyn Fn(&str) -> Result<Theory>) -> Result<FlagVector> {
    let mut c = Cursor::new(src)?;
    c.expect_keyword("flagvec")?;
    c.expect_punct("{")?;
    c.expect_keyword("theory")?;
    c.expect_punct("=")?;
    let name = if let Some(Tok::Str(_)) = c.peek() { c.string()? } else { c.theory_spec()? };
    let theory = resolve(&name)?;
    c.expect_keyword("level")?;
    c.expect_punct("=")?;
    let level = c.int()?;
    let mut v = FlagVector::zero(&theory, level);
    while c.eat_ident("coeff") {
        let body = c.string()?;
        c.expect_punct("=")?;
        let q = c.rational()?;
        let text = format!("model {{ {} }}", strip_model_block(&body));
        let (_, m) = parse_model(&text, Some(&theory.language))?;
        v.add_term(&m, q)?;
    }
    c.expect_punct("}")?;
    if !c.at_end() {
        return c.error("trailing input after flagvec block");
    }
    Ok(v)
}

pub fn format_flagvec(v: &FlagVector) -> String {
    let mut out = format!("flagvec {{\n  theory = \"{}\"\n  level = {}\n", v.theory.name, v.level);
    for (m, c) in v.terms.values() {
        let text = format_model(m, &v.theory.language);
        out.push_str(&format!("  coeff \"{}\" = {}\n", strip_model_block(&text), rational::fmt(c)));
    }
    out.push('}');
    out
}
