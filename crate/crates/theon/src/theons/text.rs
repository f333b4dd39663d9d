//! Text formats for step and comparison theons, planar step measures and
//! step poseton data.

use super::extract::PlanarMeasure;
use super::grid::GroundGrid;
use super::peon::{parse_cmp, Cmp, Peon, PosetonW, Table, Use};
use super::theon::Theon;
use crate::logic::{builtin_theory, Theory};
use crate::rational::{self, Rational};
use crate::syntax::{Cursor, Tok};
use crate::{Error, Result};
use std::sync::Arc;

fn theory_ref(c: &mut Cursor) -> Result<Theory> {
    let name = if let Some(Tok::Str(_)) = c.peek() { c.string()? } else { c.theory_spec()? };
    builtin_theory(&name)
}

fn key(c: &mut Cursor, k: &str) -> Result<()> {
    c.expect_keyword(k)?;
    c.expect_punct("=")
}

fn rationals(c: &mut Cursor) -> Result<Vec<Rational>> {
    let mut out = vec![c.rational()?];
    loop {
        c.eat_punct(",");
        match c.peek() {
            Some(Tok::Num(_)) => out.push(c.rational()?),
            Some(Tok::Punct("-")) => out.push(c.rational()?),
            _ => return Ok(out),
        }
    }
}

/// Resolves a peon name to a predicate index; unknown names fall back to
/// the declaration position.
fn peon_slot(t: &Theory, name: &str, position: usize, filled: &[bool]) -> Result<usize> {
    let slot = t.language.index(name).unwrap_or(position);
    if slot >= filled.len() {
        return Err(Error::UnknownSymbol(name.to_string()));
    }
    if filled[slot] {
        return Err(Error::DuplicateSymbol(name.to_string()));
    }
    Ok(slot)
}

fn collect_peons(t: &Theory, peons: Vec<Option<Peon>>) -> Result<Vec<Peon>> {
    peons
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| Error::Invalid(format!("no peon for {}", t.language.symbols()[i].name))))
        .collect()
}

fn parse_step(c: &mut Cursor) -> Result<Theon> {
    key(c, "theory")?;
    let t = theory_ref(c)?;
    key(c, "cells")?;
    let cells = c.int()?;
    let grid = if c.eat_ident("weights") {
        c.expect_punct("=")?;
        let w = rationals(c)?;
        if w.len() != cells {
            return c.error(format!("{} weights for {cells} cells", w.len()));
        }
        GroundGrid::line(w)?
    } else {
        GroundGrid::uniform(cells)?
    };
    let mut peons: Vec<Option<Peon>> = vec![None; t.language.len()];
    let mut position = 0;
    while c.eat_ident("peon") {
        let name = c.ident()?;
        let filled: Vec<bool> = peons.iter().map(Option::is_some).collect();
        let slot = peon_slot(&t, &name, position, &filled)?;
        position += 1;
        let k = t.language.symbols()[slot].arity;
        c.expect_punct("{")?;
        let mut entries = Vec::new();
        while c.eat_punct("(") {
            let mut e = Vec::new();
            if !c.is_punct(")") {
                loop {
                    if c.eat_punct("*") {
                        e.push(None);
                    } else {
                        e.push(Some(c.int()?));
                    }
                    if !c.eat_punct(",") {
                        break;
                    }
                }
            }
            c.expect_punct(")")?;
            entries.push(e);
        }
        c.expect_punct("}")?;
        peons[slot] = Some(Peon::Table(Arc::new(Table::from_entries(k, cells, &entries)?)));
    }
    let peons = collect_peons(&t, peons)?;
    Theon::new(t, grid, peons)
}

fn parse_cmp_theon(c: &mut Cursor) -> Result<Theon> {
    key(c, "theory")?;
    let t = theory_ref(c)?;
    key(c, "m")?;
    let m = c.int()?;
    let mut peons: Vec<Option<Peon>> = vec![None; t.language.len()];
    let mut position = 0;
    while c.eat_ident("peon") {
        let name = c.ident()?;
        let filled: Vec<bool> = peons.iter().map(Option::is_some).collect();
        let slot = peon_slot(&t, &name, position, &filled)?;
        position += 1;
        c.expect_punct(":=")?;
        let e = parse_cmp(c)?;
        c.eat_punct(";");
        peons[slot] = Some(Peon::Cmp(Arc::new(Cmp::new(t.language.symbols()[slot].arity, e)?)));
    }
    let peons = collect_peons(&t, peons)?;
    Theon::new(t, GroundGrid::uniform(m)?, peons)
}

/// Parses a `steptheon { ... }` or `cmptheon { ... }` block.
pub fn parse_theon(src: &str) -> Result<Theon> {
    let mut c = Cursor::new(src)?;
    let theon = if c.eat_ident("steptheon") {
        c.expect_punct("{")?;
        parse_step(&mut c)?
    } else if c.eat_ident("cmptheon") {
        c.expect_punct("{")?;
        parse_cmp_theon(&mut c)?
    } else {
        return c.error("expected steptheon or cmptheon");
    };
    c.expect_punct("}")?;
    if !c.at_end() {
        return c.error("trailing input after theon block");
    }
    Ok(theon)
}

fn join(qs: &[Rational]) -> String {
    qs.iter().map(rational::fmt).collect::<Vec<_>>().join(", ")
}

/// Writes a theon in the step or comparison format; other peon kinds have
/// no text form.
pub fn format_theon(theon: &Theon) -> Result<String> {
    let grid = &theon.grid;
    let names = theon.theory.language.names();
    if grid.dims != 1 {
        return Err(Error::Invalid("only line-grid theons have a text form".into()));
    }
    if theon.peons.iter().all(|p| matches!(p, Peon::Table(_))) {
        let mut out = format!("steptheon {{\n  theory = {}\n  cells = {}\n", theon.theory.name, grid.len());
        if !grid.is_uniform() {
            let w: Vec<Rational> = grid.cells.iter().map(|c| c.weight.clone()).collect();
            out.push_str(&format!("  weights = {}\n", join(&w)));
        }
        for (name, peon) in names.iter().zip(&theon.peons) {
            let Peon::Table(t) = peon else { unreachable!() };
            let uses = peon.uses();
            let mut rows: Vec<String> = t
                .entries()
                .into_iter()
                .map(|e| {
                    let slots: Vec<String> = e
                        .iter()
                        .zip(&uses)
                        .map(|(c, u)| if *u == Use::Unused { "*".to_string() } else { c.to_string() })
                        .collect();
                    format!("({})", slots.join(","))
                })
                .collect();
            rows.sort();
            rows.dedup();
            out.push_str(&format!("  peon {name} {{ {} }}\n", rows.join(" ")));
        }
        out.push('}');
        return Ok(out);
    }
    if grid.is_uniform() && theon.peons.iter().all(|p| matches!(p, Peon::Cmp(_))) {
        let mut out = format!("cmptheon {{\n  theory = {}\n  m = {}\n", theon.theory.name, grid.len());
        for (name, peon) in names.iter().zip(&theon.peons) {
            let Peon::Cmp(c) = peon else { unreachable!() };
            out.push_str(&format!("  peon {name} := {}\n", c.expr));
        }
        out.push('}');
        return Ok(out);
    }
    Err(Error::Invalid("theon mixes peon kinds without a text form".into()))
}

fn parse_block(src: &str, head: &str) -> Result<(usize, Vec<Rational>)> {
    let mut c = Cursor::new(src)?;
    c.expect_keyword(head)?;
    c.expect_punct("{")?;
    key(&mut c, "m")?;
    let m = c.int()?;
    key(&mut c, "w")?;
    let w = rationals(&mut c)?;
    c.expect_punct("}")?;
    if !c.at_end() {
        return c.error(format!("trailing input after {head} block"));
    }
    Ok((m, w))
}

/// Parses `planar { m = 2 w = 1/2 0 0 1/2 }` with `w[col * m + row]`.
pub fn parse_planar(src: &str) -> Result<PlanarMeasure> {
    let (m, w) = parse_block(src, "planar")?;
    if w.len() != m * m {
        return Err(Error::Invalid(format!("planar measure needs {} weights, got {}", m * m, w.len())));
    }
    Ok(PlanarMeasure { m, w })
}

pub fn format_planar(mu: &PlanarMeasure) -> String {
    format!("planar {{ m = {} w = {} }}", mu.m, mu.w.iter().map(rational::fmt).collect::<Vec<_>>().join(" "))
}

/// Parses `poseton { m = 2 w = ... }` with the `m⁴` values of `W` on
/// flat cell pairs.
pub fn parse_poseton(src: &str) -> Result<PosetonW> {
    let (m, w) = parse_block(src, "poseton")?;
    PosetonW::new(m, w)
}

pub fn format_poseton(w: &PosetonW) -> String {
    format!("poseton {{ m = {} w = {} }}", w.m, w.w.iter().map(rational::fmt).collect::<Vec<_>>().join(" "))
}
