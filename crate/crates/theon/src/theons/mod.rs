//! Theons over finite ground grids: exact densities and truth measures,
//! exchangeable sampling, weak and sampled strong checks, the action of
//! interpretations, strengthenings, and permuton/poseton extraction.

mod builtins;
mod exact;
mod extract;
mod grid;
mod interp;
mod peon;
mod strengthen;
mod text;
mod theon;

pub use builtins::{
    builtin_theon, constant_graphon, hypergraphon_hp, hypergraphon_hprime, increasing_permuton, interval_theon,
    linorder_mod, linorder_std, poseton_from_w, random_permuton_grid, random_poseton_w, random_step_graphon,
    random_weak_linorder, standard_permuton, turan, BUILTIN_THEONS,
};
pub use exact::{arrangements, measure, Event, EventAtom, Query, DEFAULT_OFF, MAX_ORDERED};
pub use extract::{check_poseton_w, permuton_extract, poseton_extract, PlanarMeasure};
pub use grid::{
    coordinate_index, coordinate_position, image_mask, mask_label, off_from_rational, off_to_rational, Cell, Coord,
    GroundGrid, OFF_BITS, OFF_ONE,
};
pub use interp::interpret_theon;
pub use peon::{planar_less, Cmp, CmpExpr, Linking, Peon, PeonRule, PosetonW, Table, Use};
pub use strengthen::{bad_pair_measure, strengthen_horn, strengthen_linorder, HornMode, HornOracle, LinOrderOracle};
pub use text::{format_planar, format_poseton, format_theon, parse_planar, parse_poseton, parse_theon};
pub use theon::{Theon, TheonOracle};

use crate::densities::DensityKind;
use crate::logic::{Formula, Language, Theory};
use crate::models::{canonical_form, isomorphic, Structure};
use crate::rational::{self, Rational};
use crate::{Error, Result};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// All `k`-tuples of distinct elements of `[n]`.
pub(crate) fn injections(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                rec(n, k, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, k, &mut cur, &mut out);
    out
}

fn check_language(theon_lang: &Language, m: &Structure) -> Result<()> {
    if m.arities() != theon_lang.arities().as_slice() {
        return Err(Error::LanguageMismatch("model does not match the theon's language".into()));
    }
    Ok(())
}

/// The event `α ∈ T_ind(M)` (or `T_inj(M)` when `induced` is false).
pub fn density_query(lang: &Language, m: &Structure, induced: bool) -> Result<Query> {
    check_language(lang, m)?;
    let mut atoms = Vec::new();
    let mut lits = Vec::new();
    for (p, sym) in lang.symbols().iter().enumerate() {
        for t in injections(m.n(), sym.arity) {
            let holds = m.holds(p, &t);
            if !holds && !induced {
                continue;
            }
            let i = atoms.len();
            atoms.push(EventAtom { pred: p, args: t });
            lits.push(if holds { Event::Atom(i) } else { Event::Not(Box::new(Event::Atom(i))) });
        }
    }
    if m.has_repeated_tuple() {
        return Ok(Query::new(m.n(), Vec::new(), Event::Const(false)));
    }
    Ok(Query::new(m.n(), atoms, Event::And(lits)))
}

fn aut_factor(m: &Structure) -> Result<Rational> {
    let aut = canonical_form(m)?.aut_count;
    Ok(Rational::new(rational::factorial(m.n()), aut.into()))
}

/// `t_ind`, `t_inj` or `p` of a finite model in a theon, exactly.
pub fn exact_density(theon: &Theon, m: &Structure, kind: DensityKind) -> Result<Rational> {
    let q = density_query(&theon.theory.language, m, kind != DensityKind::Inj)?;
    let t = measure(theon, &q)?;
    match kind {
        DensityKind::P => Ok(t * aut_factor(m)?),
        _ => Ok(t),
    }
}

/// The truth region of an open formula as an event over `E_n`, where the
/// formula's variables (in order of appearance) are the vertices.
pub fn formula_query(lang: &Language, f: &Formula) -> Result<Query> {
    lang.check(f)?;
    let vars = f.vars();
    let mut atoms = Vec::new();
    fn conv(f: &Formula, vars: &[String], lang: &Language, atoms: &mut Vec<EventAtom>) -> Event {
        let var = |v: &String| vars.iter().position(|w| w == v).expect("collected variable");
        match f {
            Formula::Const(b) => Event::Const(*b),
            Formula::Eq(a, b) => Event::Const(a == b),
            Formula::Atom(p, args) => {
                let idx: Vec<usize> = args.iter().map(var).collect();
                if (0..idx.len()).any(|i| idx[..i].contains(&idx[i])) {
                    return Event::Const(false);
                }
                atoms.push(EventAtom { pred: lang.index(p).expect("checked symbol"), args: idx });
                Event::Atom(atoms.len() - 1)
            }
            Formula::Not(g) => Event::Not(Box::new(conv(g, vars, lang, atoms))),
            Formula::And(gs) => Event::And(gs.iter().map(|g| conv(g, vars, lang, atoms)).collect()),
            Formula::Or(gs) => Event::Or(gs.iter().map(|g| conv(g, vars, lang, atoms)).collect()),
            Formula::Implies(a, b) => {
                Event::Or(vec![Event::Not(Box::new(conv(a, vars, lang, atoms))), conv(b, vars, lang, atoms)])
            }
            Formula::Iff(a, b) => {
                let x = conv(a, vars, lang, atoms);
                let y = conv(b, vars, lang, atoms);
                Event::Or(vec![
                    Event::And(vec![x.clone(), y.clone()]),
                    Event::And(vec![Event::Not(Box::new(x)), Event::Not(Box::new(y))]),
                ])
            }
        }
    }
    let event = conv(f, &vars, lang, &mut atoms);
    Ok(Query::new(vars.len(), atoms, event))
}

/// `λ(T(F, 𝒩))`.
pub fn truth_measure(f: &Formula, theon: &Theon) -> Result<Rational> {
    measure(theon, &formula_query(&theon.theory.language, f)?)
}

#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub axiom: Formula,
    pub measure: Rational,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.measure == rational::one()
    }
}

/// The truth measure of every axiom; the theon is a weak model of `t` iff
/// all of them are 1. The axiomatization is assumed substitutionally closed.
pub fn weak_check(theon: &Theon, t: &Theory) -> Result<Vec<AxiomReport>> {
    if t.language != theon.theory.language {
        return Err(Error::LanguageMismatch(format!("theon is over {}, theory is {}", theon.theory.name, t.name)));
    }
    t.axioms.iter().map(|a| Ok(AxiomReport { axiom: a.clone(), measure: truth_measure(a, theon)? })).collect()
}

/// Evaluates a query's event at a point of `E_n` given by coordinate mask.
pub fn eval_at(oracle: &dyn TheonOracle, q: &Query, point: &[Coord]) -> bool {
    let vals: Vec<Option<bool>> = q
        .atoms
        .iter()
        .map(|a| {
            let x: Vec<Coord> =
                coordinate_index(a.args.len()).iter().map(|&m| point[image_mask(m, &a.args) as usize]).collect();
            Some(oracle.member(a.pred, &x))
        })
        .collect();
    q.event.eval3(&vals) == Some(true)
}

/// The coordinates of one random point of `E_n`, indexed by mask (entry 0
/// unused). Randomness depends only on `(seed, stream, mask)`.
pub fn sample_point(grid: &GroundGrid, n: usize, seed: u64, stream: u64) -> Vec<Coord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut point = vec![Coord::new(0, DEFAULT_OFF); 1 << n];
    for (mask, slot) in point.iter_mut().enumerate().skip(1) {
        rng.set_word_pos(mask as u128 * 8);
        let cell = grid.cell_for(rng.next_u64());
        let mut off = [(rng.next_u64() as u128) << (OFF_BITS - 64), (rng.next_u64() as u128) << (OFF_BITS - 64)];
        if grid.cells[cell].tri && off[0] > off[1] {
            off.swap(0, 1);
        }
        *slot = Coord::new(cell, off);
    }
    point
}

/// The model `χ(α*(ξ))` on `n` vertices for the `index`-th sample.
pub fn sample_model(oracle: &dyn TheonOracle, n: usize, seed: u64, index: u64) -> Structure {
    let point = sample_point(oracle.grid(), n, seed, index);
    let lang = oracle.language();
    let mut s = Structure::for_language(n, lang);
    for (p, sym) in lang.symbols().iter().enumerate() {
        let idx = coordinate_index(sym.arity);
        for t in injections(n, sym.arity) {
            let x: Vec<Coord> = idx.iter().map(|&m| point[image_mask(m, &t) as usize]).collect();
            if oracle.member(p, &x) {
                s.set(p, &t, true);
            }
        }
    }
    s
}

/// Number of samples among `samples` whose model hits `m` in the sense of
/// `kind`: equal for `ind`, containing for `inj`, isomorphic for `p`.
pub fn sampled_density(
    oracle: &dyn TheonOracle,
    m: &Structure,
    kind: DensityKind,
    samples: u64,
    seed: u64,
) -> Result<u64> {
    check_language(oracle.language(), m)?;
    let hits = (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = sample_model(oracle, m.n(), seed, i);
            let hit = match kind {
                DensityKind::Ind => s == *m,
                DensityKind::Inj => m.is_subset_of(&s),
                DensityKind::P => isomorphic(&s, m).unwrap_or(false),
            };
            hit as u64
        })
        .sum();
    Ok(hits)
}

#[derive(Debug, Clone)]
pub enum StrongVerdict {
    Pass { points: u64 },
    Fail { axiom: Formula, point: Vec<(u32, Coord)> },
}

impl StrongVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, StrongVerdict::Pass { .. })
    }
}

/// Samples off-diagonal points and evaluates every axiom's truth region
/// pointwise; a failure is returned with its witness. Passing only means
/// no violation was found.
pub fn strong_check_sampled(oracle: &dyn TheonOracle, t: &Theory, trials: u64, seed: u64) -> Result<StrongVerdict> {
    if &t.language != oracle.language() {
        return Err(Error::LanguageMismatch(format!("oracle language differs from {}", t.name)));
    }
    let queries = t.axioms.iter().map(|a| formula_query(&t.language, a)).collect::<Result<Vec<_>>>()?;
    let found = (0..trials).into_par_iter().find_map_first(|i| {
        for (a, q) in t.axioms.iter().zip(&queries) {
            let mut attempt = 0u64;
            let point = loop {
                let p = sample_point(oracle.grid(), q.n, seed, (i << 8) | attempt);
                let singles: Vec<Coord> = (0..q.n).map(|v| p[1 << v]).collect();
                if (0..singles.len()).all(|j| !singles[..j].contains(&singles[j])) || attempt == 255 {
                    break p;
                }
                attempt += 1;
            };
            if !eval_at(oracle, q, &point) {
                let witness = point.iter().enumerate().skip(1).map(|(m, c)| (m as u32, *c)).collect();
                return Some(StrongVerdict::Fail { axiom: a.clone(), point: witness });
            }
        }
        None
    });
    Ok(found.unwrap_or(StrongVerdict::Pass { points: trials * t.axioms.len() as u64 }))
}
