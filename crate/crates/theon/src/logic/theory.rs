use super::formula::Formula;
use crate::syntax::{Cursor, Tok};
use crate::{Error, Result};
use std::fmt;

/// Largest arity accepted by the evaluators.
pub const MAX_ARITY: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol { name: name.into(), arity }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Language {
    symbols: Vec<Symbol>,
}

impl Language {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        for (i, s) in symbols.iter().enumerate() {
            if s.arity == 0 || s.arity > MAX_ARITY {
                return Err(Error::Invalid(format!("symbol {} has unsupported arity {}", s.name, s.arity)));
            }
            if symbols[..i].iter().any(|t| t.name == s.name) {
                return Err(Error::DuplicateSymbol(s.name.clone()));
            }
        }
        Ok(Language { symbols })
    }

    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<Self> {
        Self::new(pairs.iter().map(|(n, k)| Symbol::new(*n, *k)).collect())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.symbols.iter().find(|s| s.name == name)
    }

    pub fn arities(&self) -> Vec<usize> {
        self.symbols.iter().map(|s| s.arity).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.symbols.iter().map(|s| s.name.clone()).collect()
    }

    pub fn union(&self, other: &Language) -> Result<Language> {
        let mut s = self.symbols.clone();
        s.extend(other.symbols.iter().cloned());
        Language::new(s)
    }

    /// Checks that every atom of `f` uses a declared symbol at its arity.
    pub fn check(&self, f: &Formula) -> Result<()> {
        let mut err = None;
        f.visit_atoms(&mut |p, args| {
            if err.is_some() {
                return;
            }
            match self.get(p) {
                None => err = Some(Error::UnknownSymbol(p.to_string())),
                Some(s) if s.arity != args.len() => {
                    err = Some(Error::Arity { symbol: p.to_string(), expected: s.arity, found: args.len() })
                }
                _ => {}
            }
        });
        err.map_or(Ok(()), Err)
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols.iter().map(|s| format!("{}/{}", s.name, s.arity)).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// A universal theory: a language plus open axioms read under implicit
/// universal closure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Theory {
    pub name: String,
    pub language: Language,
    pub axioms: Vec<Formula>,
}

impl Theory {
    pub fn new(name: impl Into<String>, language: Language, axioms: Vec<Formula>) -> Result<Self> {
        for a in &axioms {
            language.check(a)?;
        }
        Ok(Theory { name: name.into(), language, axioms })
    }

    pub fn parse(src: &str) -> Result<Theory> {
        let mut c = Cursor::new(src)?;
        let t = parse_theory(&mut c)?;
        if !c.at_end() {
            return c.error("trailing input after theory");
        }
        Ok(t)
    }

    /// Disjoint union of two theories.
    pub fn union(&self, other: &Theory) -> Result<Theory> {
        let language = self.language.union(&other.language)?;
        let mut axioms = self.axioms.clone();
        axioms.extend(other.axioms.iter().cloned());
        Theory::new(format!("{}+{}", self.name, other.name), language, axioms)
    }

    pub fn with_axioms(&self, name: impl Into<String>, extra: Vec<Formula>) -> Result<Theory> {
        let mut axioms = self.axioms.clone();
        axioms.extend(extra);
        Theory::new(name, self.language.clone(), axioms)
    }

    pub fn compiled_axioms(&self) -> Vec<Compiled> {
        self.axioms.iter().map(|a| Compiled::new(a, &self.language, None).expect("validated axiom")).collect()
    }
}

fn printable_name(name: &str) -> String {
    let mut s: String = name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) {
        s.insert(0, 'T');
    }
    s
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theory {} {{", printable_name(&self.name))?;
        writeln!(f, "  language {{ {} }}", self.language)?;
        for a in &self.axioms {
            writeln!(f, "  axiom {a};")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn parse_theory(c: &mut Cursor) -> Result<Theory> {
    c.expect_keyword("theory")?;
    let name = c.ident()?;
    c.expect_punct("{")?;
    c.expect_keyword("language")?;
    c.expect_punct("{")?;
    let mut symbols = Vec::new();
    if !c.is_punct("}") {
        loop {
            let n = c.ident()?;
            c.expect_punct("/")?;
            let k = c.int()?;
            if k == 0 {
                return c.error("arity must be positive");
            }
            symbols.push(Symbol::new(n, k));
            if !c.eat_punct(",") {
                break;
            }
        }
    }
    c.expect_punct("}")?;
    let language = Language::new(symbols)?;
    let mut axioms = Vec::new();
    while c.eat_ident("axiom") {
        let f = parse_formula(c)?;
        c.expect_punct(";")?;
        language.check(&f)?;
        axioms.push(f);
    }
    c.expect_punct("}")?;
    Theory::new(name, language, axioms)
}

/// Parses a standalone formula.
pub fn parse_formula_str(src: &str) -> Result<Formula> {
    let mut c = Cursor::new(src)?;
    let f = parse_formula(&mut c)?;
    if !c.at_end() {
        return c.error("trailing input after formula");
    }
    Ok(f)
}

pub(crate) fn parse_formula(c: &mut Cursor) -> Result<Formula> {
    let mut f = parse_imp(c)?;
    while c.eat_punct("<->") {
        let g = parse_imp(c)?;
        f = Formula::iff(f, g);
    }
    Ok(f)
}

fn parse_imp(c: &mut Cursor) -> Result<Formula> {
    let f = parse_or(c)?;
    if c.eat_punct("->") {
        let g = parse_imp(c)?;
        return Ok(Formula::implies(f, g));
    }
    Ok(f)
}

fn parse_or(c: &mut Cursor) -> Result<Formula> {
    let mut fs = vec![parse_and(c)?];
    while c.eat_punct("|") {
        fs.push(parse_and(c)?);
    }
    Ok(Formula::or(fs))
}

fn parse_and(c: &mut Cursor) -> Result<Formula> {
    let mut fs = vec![parse_unary(c)?];
    while c.eat_punct("&") {
        fs.push(parse_unary(c)?);
    }
    Ok(Formula::and(fs))
}

fn parse_unary(c: &mut Cursor) -> Result<Formula> {
    if c.eat_punct("!") {
        return Ok(Formula::not(parse_unary(c)?));
    }
    if c.eat_punct("(") {
        let f = parse_formula(c)?;
        c.expect_punct(")")?;
        return Ok(f);
    }
    if c.eat_ident("true") {
        return Ok(Formula::Const(true));
    }
    if c.eat_ident("false") {
        return Ok(Formula::Const(false));
    }
    let name = c.ident()?;
    if c.eat_punct("(") {
        let mut args = Vec::new();
        loop {
            args.push(c.ident()?);
            if !c.eat_punct(",") {
                break;
            }
        }
        c.expect_punct(")")?;
        return Ok(Formula::Atom(name, args));
    }
    match c.peek() {
        Some(Tok::Punct("=")) => {
            c.next();
            let w = c.ident()?;
            Ok(Formula::Eq(name, w))
        }
        Some(Tok::Punct("!=")) => {
            c.next();
            let w = c.ident()?;
            Ok(Formula::neq(name, w))
        }
        _ => c.error("expected '(', '=' or '!=' after identifier"),
    }
}

/// Formula compiled against a language: symbols and variables become indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CFormula {
    Const(bool),
    Atom(usize, Vec<usize>),
    Eq(usize, usize),
    Not(Box<CFormula>),
    And(Vec<CFormula>),
    Or(Vec<CFormula>),
    Implies(Box<CFormula>, Box<CFormula>),
    Iff(Box<CFormula>, Box<CFormula>),
}

#[derive(Debug, Clone)]
pub struct Compiled {
    pub vars: Vec<String>,
    pub body: CFormula,
}

impl Compiled {
    /// Compiles `f`; variables are numbered by `order` if given (it must
    /// contain every variable of `f`), else by first occurrence.
    pub fn new(f: &Formula, lang: &Language, order: Option<&[String]>) -> Result<Compiled> {
        lang.check(f)?;
        let vars: Vec<String> = match order {
            Some(o) => {
                for v in f.vars() {
                    if !o.contains(&v) {
                        return Err(Error::Invalid(format!("variable {v} not declared")));
                    }
                }
                o.to_vec()
            }
            None => f.vars(),
        };
        let body = compile(f, lang, &vars);
        Ok(Compiled { vars, body })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }
}

fn compile(f: &Formula, lang: &Language, vars: &[String]) -> CFormula {
    let vi = |v: &String| vars.iter().position(|w| w == v).expect("declared variable");
    match f {
        Formula::Const(b) => CFormula::Const(*b),
        Formula::Atom(p, args) => CFormula::Atom(lang.index(p).expect("checked symbol"), args.iter().map(vi).collect()),
        Formula::Eq(a, b) => CFormula::Eq(vi(a), vi(b)),
        Formula::Not(g) => CFormula::Not(Box::new(compile(g, lang, vars))),
        Formula::And(gs) => CFormula::And(gs.iter().map(|g| compile(g, lang, vars)).collect()),
        Formula::Or(gs) => CFormula::Or(gs.iter().map(|g| compile(g, lang, vars)).collect()),
        Formula::Implies(a, b) => CFormula::Implies(Box::new(compile(a, lang, vars)), Box::new(compile(b, lang, vars))),
        Formula::Iff(a, b) => CFormula::Iff(Box::new(compile(a, lang, vars)), Box::new(compile(b, lang, vars))),
    }
}

impl CFormula {
    /// Two-valued evaluation under `asg` (variable index → vertex).
    pub fn eval(&self, asg: &[usize], atom: &mut impl FnMut(usize, &[usize]) -> bool) -> bool {
        match self {
            CFormula::Const(b) => *b,
            CFormula::Atom(p, args) => {
                let mut buf = [0usize; MAX_ARITY];
                for (i, &a) in args.iter().enumerate() {
                    buf[i] = asg[a];
                }
                atom(*p, &buf[..args.len()])
            }
            CFormula::Eq(a, b) => asg[*a] == asg[*b],
            CFormula::Not(g) => !g.eval(asg, atom),
            CFormula::And(gs) => gs.iter().all(|g| g.eval(asg, atom)),
            CFormula::Or(gs) => gs.iter().any(|g| g.eval(asg, atom)),
            CFormula::Implies(a, b) => !a.eval(asg, atom) || b.eval(asg, atom),
            CFormula::Iff(a, b) => a.eval(asg, atom) == b.eval(asg, atom),
        }
    }

    /// Kleene three-valued evaluation; `None` is unknown.
    pub fn eval3(&self, asg: &[usize], atom: &mut impl FnMut(usize, &[usize]) -> Option<bool>) -> Option<bool> {
        match self {
            CFormula::Const(b) => Some(*b),
            CFormula::Atom(p, args) => {
                let mut buf = [0usize; MAX_ARITY];
                for (i, &a) in args.iter().enumerate() {
                    buf[i] = asg[a];
                }
                atom(*p, &buf[..args.len()])
            }
            CFormula::Eq(a, b) => Some(asg[*a] == asg[*b]),
            CFormula::Not(g) => g.eval3(asg, atom).map(|b| !b),
            CFormula::And(gs) => {
                let mut unknown = false;
                for g in gs {
                    match g.eval3(asg, atom) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        _ => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            CFormula::Or(gs) => {
                let mut unknown = false;
                for g in gs {
                    match g.eval3(asg, atom) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        _ => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
            CFormula::Implies(a, b) => match a.eval3(asg, atom) {
                Some(false) => Some(true),
                Some(true) => b.eval3(asg, atom),
                None => match b.eval3(asg, atom) {
                    Some(true) => Some(true),
                    _ => None,
                },
            },
            CFormula::Iff(a, b) => match (a.eval3(asg, atom), b.eval3(asg, atom)) {
                (Some(x), Some(y)) => Some(x == y),
                _ => None,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRAPH: &str = "theory Graph {\n  language { E/2 }\n  axiom !E(x, x);\n  axiom E(x, y) <-> E(y, x);\n}";

    #[test]
    fn parse_graph() {
        let t = Theory::parse(GRAPH).unwrap();
        assert_eq!(t.language.len(), 1);
        assert_eq!(t.axioms.len(), 2);
        assert_eq!(t.to_string(), GRAPH);
    }

    #[test]
    fn empty_theory() {
        let t = Theory::parse("theory T0 { language {} }").unwrap();
        assert!(t.language.is_empty());
        assert!(t.axioms.is_empty());
    }

    #[test]
    fn arity_mismatch() {
        let e = Theory::parse("theory T { language { E/2 } axiom E(x); }").unwrap_err();
        assert!(matches!(e, Error::Arity { expected: 2, found: 1, .. }));
    }

    #[test]
    fn unknown_symbol() {
        let e = Theory::parse("theory T { language { E/2 } axiom F(x,y); }").unwrap_err();
        assert_eq!(e, Error::UnknownSymbol("F".into()));
    }

    #[test]
    fn syntax_error_position() {
        let e = Theory::parse("theory T {\n language { E/2 }\n axiom E(x,y) & ;\n}").unwrap_err();
        assert_eq!(e, Error::Syntax { line: 3, col: 17, msg: "expected identifier".into() });
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse_formula_str("a = b -> b = c -> c = a").unwrap();
        match f {
            Formula::Implies(_, r) => assert!(matches!(*r, Formula::Implies(..))),
            _ => panic!(),
        }
    }

    #[test]
    fn neq_round_trip() {
        let f = parse_formula_str("x != y -> !(x = y) & !!E(x,y)").unwrap();
        assert_eq!(parse_formula_str(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn three_valued() {
        let lang = Language::from_pairs(&[("E", 2)]).unwrap();
        let f = parse_formula_str("E(x,y) -> x = y").unwrap();
        let c = Compiled::new(&f, &lang, None).unwrap();
        assert_eq!(c.body.eval3(&[0, 0], &mut |_, _| None), Some(true));
        assert_eq!(c.body.eval3(&[0, 1], &mut |_, _| None), None);
        assert_eq!(c.body.eval3(&[0, 1], &mut |_, _| Some(true)), Some(false));
    }
}
