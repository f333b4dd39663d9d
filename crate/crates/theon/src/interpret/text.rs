use super::Interpretation;
use crate::logic::{parse_formula, Theory, Translation};
use crate::syntax::{Cursor, Tok};
use crate::Result;

fn theory_ref(c: &mut Cursor) -> Result<String> {
    if let Some(Tok::Str(_)) = c.peek() {
        return c.string();
    }
    c.theory_spec()
}

/// Parses `interp { from = T1 to = T2 E(x, y) := formula; ... }`.
///
/// Theory references are registry names or quoted strings, both handed to
/// `resolve`.
pub fn parse_interp(src: &str, resolve: &dyn Fn(&str) -> Result<Theory>) -> Result<Interpretation> {
    let mut c = Cursor::new(src)?;
    c.expect_keyword("interp")?;
    c.expect_punct("{")?;
    c.expect_keyword("from")?;
    c.expect_punct("=")?;
    let source = resolve(&theory_ref(&mut c)?)?;
    c.expect_keyword("to")?;
    c.expect_punct("=")?;
    let target = resolve(&theory_ref(&mut c)?)?;
    let mut rules = Vec::new();
    while !c.is_punct("}") {
        let p = c.ident()?;
        c.expect_punct("(")?;
        let mut params = Vec::new();
        if !c.is_punct(")") {
            loop {
                params.push(c.ident()?);
                if !c.eat_punct(",") {
                    break;
                }
            }
        }
        c.expect_punct(")")?;
        c.expect_punct(":=")?;
        let f = parse_formula(&mut c)?;
        c.eat_punct(";");
        rules.push((p, params, f));
    }
    c.expect_punct("}")?;
    if !c.at_end() {
        return c.error("trailing input after interp block");
    }
    let map = Translation::from_rules(source.language.clone(), target.language.clone(), rules)?;
    Interpretation::new(source, target, map)
}

pub fn format_interp(i: &Interpretation) -> String {
    let mut out = format!("interp {{\n  from = \"{}\"\n  to = \"{}\"\n", i.source.name, i.target.name);
    for line in i.map.to_string().lines() {
        out.push_str(&format!("  {line};\n"));
    }
    out.push('}');
    out
}
