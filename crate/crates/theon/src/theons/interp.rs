use super::exact::{Event, EventAtom};
use super::grid::{coordinate_index, coordinate_position, image_mask, Coord, GroundGrid};
use super::peon::{Cmp, CmpExpr, Linking, Peon, PeonRule, Table, Use};
use super::theon::Theon;
use crate::interpret::Verified;
use crate::logic::{Formula, Language};
use crate::{Error, Result};
use std::sync::Arc;

/// The truth region of an open formula over a theon's peons, as a rule.
#[derive(Debug)]
struct TruthPeon {
    k: usize,
    atoms: Vec<(Peon, Vec<usize>)>,
    event: Event,
    uses: Vec<Use>,
    linking: Linking,
}

impl PeonRule for TruthPeon {
    fn arity(&self) -> usize {
        self.k
    }

    fn uses(&self) -> Vec<Use> {
        self.uses.clone()
    }

    fn linking(&self) -> Linking {
        self.linking
    }

    fn member(&self, grid: &GroundGrid, x: &[Coord]) -> bool {
        let vals: Vec<Option<bool>> = self
            .atoms
            .iter()
            .map(|(peon, pos)| {
                let y: Vec<Coord> = pos.iter().map(|&i| x[i]).collect();
                Some(peon.member(grid, &y))
            })
            .collect();
        self.event.eval3(&vals) == Some(true)
    }
}

fn compile(f: &Formula, params: &[String], lang: &Language, atoms: &mut Vec<EventAtom>) -> Result<Event> {
    let var =
        |v: &String| params.iter().position(|p| p == v).ok_or_else(|| Error::Invalid(format!("unknown variable {v}")));
    Ok(match f {
        Formula::Const(b) => Event::Const(*b),
        Formula::Eq(a, b) => Event::Const(a == b),
        Formula::Atom(p, args) => {
            let idx = args.iter().map(var).collect::<Result<Vec<_>>>()?;
            if (0..idx.len()).any(|i| idx[..i].contains(&idx[i])) {
                return Ok(Event::Const(false));
            }
            let pred = lang.index(p).ok_or_else(|| Error::UnknownSymbol(p.clone()))?;
            atoms.push(EventAtom { pred, args: idx });
            Event::Atom(atoms.len() - 1)
        }
        Formula::Not(g) => Event::Not(Box::new(compile(g, params, lang, atoms)?)),
        Formula::And(gs) => Event::And(gs.iter().map(|g| compile(g, params, lang, atoms)).collect::<Result<_>>()?),
        Formula::Or(gs) => Event::Or(gs.iter().map(|g| compile(g, params, lang, atoms)).collect::<Result<_>>()?),
        Formula::Implies(a, b) => {
            Event::Or(vec![Event::Not(Box::new(compile(a, params, lang, atoms)?)), compile(b, params, lang, atoms)?])
        }
        Formula::Iff(a, b) => {
            let x = compile(a, params, lang, atoms)?;
            let y = compile(b, params, lang, atoms)?;
            Event::Or(vec![
                Event::And(vec![x.clone(), y.clone()]),
                Event::And(vec![Event::Not(Box::new(x)), Event::Not(Box::new(y))]),
            ])
        }
    })
}

fn to_cmp(e: &Event, parts: &[CmpExpr]) -> CmpExpr {
    match e {
        Event::Const(b) => CmpExpr::Const(*b),
        Event::Atom(i) => parts[*i].clone(),
        Event::Not(g) => CmpExpr::Not(Box::new(to_cmp(g, parts))),
        Event::And(gs) => CmpExpr::And(gs.iter().map(|g| to_cmp(g, parts)).collect()),
        Event::Or(gs) => CmpExpr::Or(gs.iter().map(|g| to_cmp(g, parts)).collect()),
    }
}

/// Positions in `coordinate_index(k)` of the coordinates an atom reads.
fn positions(k: usize, atom: &EventAtom) -> Vec<usize> {
    coordinate_index(atom.args.len()).iter().map(|&m| coordinate_position(k, image_mask(m, &atom.args))).collect()
}

fn image_peon(theon: &Theon, k: usize, params: &[String], f: &Formula) -> Result<Peon> {
    if let Formula::Atom(p, args) = f {
        if args.as_slice() == params {
            let i = theon.theory.language.index(p).ok_or_else(|| Error::UnknownSymbol(p.clone()))?;
            return Ok(theon.peons[i].clone());
        }
    }
    let mut atoms = Vec::new();
    let event = compile(f, params, &theon.theory.language, &mut atoms)?;
    let peons: Vec<&Peon> = atoms.iter().map(|a| &theon.peons[a.pred]).collect();
    let grid = &theon.grid;
    if grid.dims == 1 && peons.iter().all(|p| matches!(p, Peon::Cmp(_))) {
        let parts: Vec<CmpExpr> = atoms
            .iter()
            .zip(&peons)
            .map(|(a, p)| match p {
                Peon::Cmp(c) => c.expr.map_masks(&|m| image_mask(m, &a.args)),
                _ => unreachable!(),
            })
            .collect();
        return Ok(Peon::Cmp(Arc::new(Cmp::new(k, to_cmp(&event, &parts))?)));
    }
    let pos: Vec<Vec<usize>> = atoms.iter().map(|a| positions(k, a)).collect();
    if !atoms.is_empty() && peons.iter().all(|p| matches!(p, Peon::Table(_))) {
        let table = Table::from_fn(k, grid.len(), |t| {
            let vals: Vec<Option<bool>> = peons
                .iter()
                .zip(&pos)
                .map(|(p, ps)| match p {
                    Peon::Table(tb) => Some(tb.contains(&ps.iter().map(|&i| t[i]).collect::<Vec<_>>())),
                    _ => unreachable!(),
                })
                .collect();
            event.eval3(&vals) == Some(true)
        })?;
        return Ok(Peon::Table(Arc::new(table)));
    }
    let mut uses = vec![Use::Unused; (1 << k) - 1];
    for (p, ps) in peons.iter().zip(&pos) {
        for (u, &i) in p.uses().iter().zip(ps) {
            uses[i] = uses[i].max(*u);
        }
    }
    let linking = peons.iter().map(|p| p.linking()).max().unwrap_or(Linking::PerAxis);
    let atoms = peons.into_iter().cloned().zip(pos).collect();
    Ok(Peon::Custom(Arc::new(TruthPeon { k, atoms, event, uses, linking })))
}

/// `I(𝒩)`: the peon of each source predicate is the truth region of its
/// image formula. Comparison and table inputs give peons of the same kind.
pub fn interpret_theon(i: &Verified, theon: &Theon) -> Result<Theon> {
    if i.target.language != theon.theory.language {
        return Err(Error::LanguageMismatch(format!(
            "interpretation targets {}, theon is over {}",
            i.target.name, theon.theory.name
        )));
    }
    let peons = i
        .source
        .language
        .symbols()
        .iter()
        .enumerate()
        .map(|(p, sym)| {
            let (params, f) = i.map.image(p);
            image_peon(theon, sym.arity, params, f)
        })
        .collect::<Result<Vec<_>>>()?;
    Theon::with_grid(i.source.clone(), theon.grid.clone(), peons)
}
