//! Model files: `model { n = 3  E = (1,2) (2,1) }`, one block per structure,
//! 1-based tuples. A symbol may be annotated with its arity (`E/2 = ...`),
//! which is required only for an empty relation whose arity cannot be
//! inferred otherwise.

use super::structure::Structure;
use crate::logic::{Language, Symbol};
use crate::syntax::Cursor;
use crate::{Error, Result};

type RawBlock = (usize, Vec<(String, Option<usize>, Vec<Vec<usize>>)>);

fn parse_block(c: &mut Cursor) -> Result<RawBlock> {
    c.expect_keyword("model")?;
    c.expect_punct("{")?;
    c.expect_keyword("n")?;
    c.expect_punct("=")?;
    let n = c.int()?;
    let mut rels = Vec::new();
    while !c.eat_punct("}") {
        let name = c.ident()?;
        let arity = if c.eat_punct("/") { Some(c.int()?) } else { None };
        c.expect_punct("=")?;
        let mut tuples = Vec::new();
        while c.eat_punct("(") {
            let mut t = Vec::new();
            loop {
                let v = c.int()?;
                if v == 0 || v > n {
                    return c.error(format!("vertex {v} out of range 1..{n}"));
                }
                t.push(v - 1);
                if !c.eat_punct(",") {
                    break;
                }
            }
            c.expect_punct(")")?;
            if let Some(k) = arity.or_else(|| tuples.first().map(|u: &Vec<usize>| u.len())) {
                if t.len() != k {
                    return Err(Error::Arity { symbol: name, expected: k, found: t.len() });
                }
            }
            tuples.push(t);
        }
        rels.push((name, arity, tuples));
    }
    Ok((n, rels))
}

/// Parses every `model { ... }` block. With `lang` the structures use that
/// language; otherwise the language is inferred in order of appearance.
pub fn parse_models(src: &str, lang: Option<&Language>) -> Result<(Language, Vec<Structure>)> {
    let mut c = Cursor::new(src)?;
    let mut blocks = Vec::new();
    while !c.at_end() {
        blocks.push(parse_block(&mut c)?);
    }
    let language = match lang {
        Some(l) => l.clone(),
        None => {
            let mut syms: Vec<(String, Option<usize>)> = Vec::new();
            for (_, rels) in &blocks {
                for (name, ar, tuples) in rels {
                    let k = ar.or_else(|| tuples.first().map(|t| t.len()));
                    match syms.iter_mut().find(|(s, _)| s == name) {
                        Some((_, slot)) => {
                            if let (Some(a), Some(b)) = (*slot, k) {
                                if a != b {
                                    return Err(Error::Arity { symbol: name.clone(), expected: a, found: b });
                                }
                            }
                            if slot.is_none() {
                                *slot = k;
                            }
                        }
                        None => syms.push((name.clone(), k)),
                    }
                }
            }
            let mut symbols = Vec::new();
            for (name, k) in syms {
                match k {
                    Some(k) => symbols.push(Symbol::new(name, k)),
                    None => return Err(Error::Invalid(format!("cannot infer the arity of {name}; write {name}/k"))),
                }
            }
            Language::new(symbols)?
        }
    };
    let mut out = Vec::new();
    for (n, rels) in blocks {
        let mut s = Structure::for_language(n, &language);
        for (name, ar, tuples) in rels {
            let p = language.index(&name).ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
            let k = language.symbols()[p].arity;
            if let Some(a) = ar {
                if a != k {
                    return Err(Error::Arity { symbol: name, expected: k, found: a });
                }
            }
            for t in tuples {
                if t.len() != k {
                    return Err(Error::Arity { symbol: name, expected: k, found: t.len() });
                }
                s.set(p, &t, true);
            }
        }
        out.push(s);
    }
    Ok((language, out))
}

pub fn parse_model(src: &str, lang: Option<&Language>) -> Result<(Language, Structure)> {
    let (l, mut ms) = parse_models(src, lang)?;
    if ms.len() != 1 {
        return Err(Error::Invalid(format!("expected one model block, found {}", ms.len())));
    }
    Ok((l, ms.pop().unwrap()))
}

pub fn format_model(s: &Structure, lang: &Language) -> String {
    let mut out = format!("model {{ n = {}", s.n());
    for (p, sym) in lang.symbols().iter().enumerate() {
        let tuples = s.tuples(p);
        if tuples.is_empty() {
            out.push_str(&format!(" {}/{} =", sym.name, sym.arity));
            continue;
        }
        out.push_str(&format!(" {} =", sym.name));
        for t in tuples {
            let items: Vec<String> = t.iter().map(|v| (v + 1).to_string()).collect();
            out.push_str(&format!(" ({})", items.join(",")));
        }
    }
    out.push_str(" }");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let (l, s) = parse_model("model { n = 3 E = (1,2) (2,1) (2,3) (3,2) }", None).unwrap();
        assert_eq!(l.to_string(), "E/2");
        let text = format_model(&s, &l);
        assert_eq!(text, "model { n = 3 E = (1,2) (2,1) (2,3) (3,2) }");
        let (_, t) = parse_model(&text, Some(&l)).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn empty_relation_needs_annotation() {
        assert!(parse_model("model { n = 2 E = }", None).is_err());
        let (l, s) = parse_model("model { n = 2 E/2 = }", None).unwrap();
        assert_eq!(l.symbols()[0].arity, 2);
        assert_eq!(s.count(0), 0);
    }

    #[test]
    fn out_of_range_vertex() {
        assert!(parse_model("model { n = 2 E = (1,3) }", None).is_err());
    }
}
