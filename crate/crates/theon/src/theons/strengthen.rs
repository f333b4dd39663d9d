//! Constructive strengthenings of weak theons: Lebesgue density points for
//! (almost) Horn theories on uniform step data, and the witness
//! construction for linear orders.

use super::exact::{measure, Event, EventAtom, Query};
use super::grid::{Coord, GroundGrid, OFF_ONE};
use super::peon::{Peon, Use};
use super::theon::{Theon, TheonOracle};
use super::weak_check;
use crate::logic::{builtin_theory, Language};
use crate::rational::{self, Rational};
use crate::{Error, Result};
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HornMode {
    /// Density points of each peon.
    #[default]
    Negative,
    /// Complements of the density points of each complement, for positive
    /// theories.
    Positive,
}

/// Membership by density points of a union of cells on a uniform grid.
#[derive(Debug, Clone)]
pub struct HornOracle {
    theon: Theon,
    mode: HornMode,
}

impl HornOracle {
    /// Cells whose closure contains the coordinate.
    fn adjacent(&self, x: &Coord) -> Vec<usize> {
        let c = x.cell as usize;
        let off = x.off[0];
        if off == 0 && c > 0 {
            vec![c - 1, c]
        } else if off == OFF_ONE && c + 1 < self.theon.grid.len() {
            vec![c, c + 1]
        } else {
            vec![c]
        }
    }
}

impl TheonOracle for HornOracle {
    fn language(&self) -> &Language {
        &self.theon.theory.language
    }

    fn grid(&self) -> &GroundGrid {
        &self.theon.grid
    }

    fn member(&self, p: usize, x: &[Coord]) -> bool {
        let Peon::Table(t) = &self.theon.peons[p] else { unreachable!("checked at construction") };
        let uses = self.theon.peons[p].uses();
        let choices: Vec<Vec<usize>> = x
            .iter()
            .zip(&uses)
            .map(|(c, u)| if *u == Use::Unused { vec![c.cell as usize] } else { self.adjacent(c) })
            .collect();
        let mut tuples = vec![Vec::with_capacity(x.len())];
        for ch in &choices {
            tuples = tuples
                .into_iter()
                .flat_map(|t: Vec<usize>| {
                    ch.iter().map(move |&c| {
                        let mut t = t.clone();
                        t.push(c);
                        t
                    })
                })
                .collect();
        }
        match self.mode {
            HornMode::Negative => tuples.iter().all(|c| t.contains(c)),
            HornMode::Positive => tuples.iter().any(|c| t.contains(c)),
        }
    }
}

/// The density-point strengthening of a step theon with table peons on a
/// uniform line grid. The owning theory must be (almost) Horn, or positive
/// with [`HornMode::Positive`].
pub fn strengthen_horn(theon: &Theon, mode: HornMode) -> Result<HornOracle> {
    if theon.grid.dims != 1 || !theon.grid.is_uniform() {
        return Err(Error::Invalid("Horn strengthening needs a uniform line grid".into()));
    }
    if theon.peons.iter().any(|p| !matches!(p, Peon::Table(_))) {
        return Err(Error::Invalid("Horn strengthening needs table peons".into()));
    }
    Ok(HornOracle { theon: theon.clone(), mode })
}

/// Index of a cell pair with the order of their offsets.
fn pair_index(m: usize, c1: usize, c2: usize, lt: bool) -> usize {
    (c1 * m + c2) * 2 + lt as usize
}

fn raw_less(c1: usize, c2: usize, lt: bool) -> bool {
    c1 < c2 || (c1 == c2 && lt)
}

fn check_linorder_input(theon: &Theon) -> Result<()> {
    if theon.theory.language != builtin_theory("LinOrder")?.language {
        return Err(Error::LanguageMismatch("linear-order strengthening needs a theon over LinOrder".into()));
    }
    if theon.grid.dims != 1 {
        return Err(Error::Invalid("linear-order strengthening needs a line grid".into()));
    }
    match &theon.peons[0] {
        Peon::Table(_) => {}
        Peon::Cmp(c) if !c.compares_higher_coordinates() => {}
        _ => {
            return Err(Error::Invalid(
                "the order peon must be a table or a comparison formula that compares only singletons".into(),
            ))
        }
    }
    Ok(())
}

/// `λ(A(x₁, x₂))` for the antisymmetrized peon, per cell pair and offset
/// order; within such a class the section measure is constant.
fn section_table(theon: &Theon) -> Result<Vec<Rational>> {
    check_linorder_input(theon)?;
    let m = theon.grid.len();
    let lo = OFF_ONE / 3;
    let hi = 2 * (OFF_ONE / 3);
    let keys: Vec<(usize, usize, bool)> =
        (0..m).flat_map(|a| (0..m).flat_map(move |b| [(a, b, false), (a, b, true)])).collect();
    keys.par_iter()
        .map(|&(c1, c2, lt)| {
            let (o1, o2) = if lt { (lo, hi) } else { (hi, lo) };
            let fwd = Event::Atom(0);
            let back = Event::Not(Box::new(Event::Atom(1)));
            let event = if raw_less(c1, c2, lt) { Event::Or(vec![fwd, back]) } else { Event::And(vec![fwd, back]) };
            let q = Query {
                n: 2,
                atoms: vec![EventAtom { pred: 0, args: vec![0, 1] }, EventAtom { pred: 0, args: vec![1, 0] }],
                event,
                fixed: vec![(0b01, Coord::new(c1, [o1, 0])), (0b10, Coord::new(c2, [o2, 0]))],
                restrict: Vec::new(),
            };
            measure(theon, &q)
        })
        .collect()
}

/// Measure of the pairs whose section under the antisymmetrized peon has
/// measure strictly between 0 and 1.
pub fn bad_pair_measure(theon: &Theon) -> Result<Rational> {
    let a = section_table(theon)?;
    let m = theon.grid.len();
    let half = rational::ratio(1, 2);
    let mut total = rational::zero();
    for c1 in 0..m {
        for c2 in 0..m {
            for lt in [false, true] {
                let v = &a[pair_index(m, c1, c2, lt)];
                if !v.is_zero() && !v.is_one() {
                    total += &theon.grid.cells[c1].weight * &theon.grid.cells[c2].weight * &half;
                }
            }
        }
    }
    Ok(total)
}

/// A strong linear order built from a weak one by the witness rule.
#[derive(Debug, Clone)]
pub struct LinOrderOracle {
    language: Language,
    grid: Arc<GroundGrid>,
    /// The full-section order, antisymmetrized, per cell pair and offset order.
    base: Vec<bool>,
    good: Vec<bool>,
}

impl LinOrderOracle {
    fn base(&self, c1: usize, c2: usize, lt: bool) -> bool {
        self.base[pair_index(self.grid.len(), c1, c2, lt)]
    }

    /// Whether the witness set `W(x₁, x₂)` has positive measure.
    fn witnessed(&self, c1: usize, o1: u128, c2: usize, o2: u128) -> bool {
        let mut bps = vec![0, o1, o2, OFF_ONE];
        bps.sort_unstable();
        bps.dedup();
        let mids: Vec<u128> = bps.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2).collect();
        (0..self.grid.len())
            .filter(|&c| self.good[c])
            .any(|c| mids.iter().any(|&y| self.base(c1, c, o1 < y) && self.base(c, c2, y < o2)))
    }

    pub fn is_good(&self, cell: usize) -> bool {
        self.good[cell]
    }
}

impl TheonOracle for LinOrderOracle {
    fn language(&self) -> &Language {
        &self.language
    }

    fn grid(&self) -> &GroundGrid {
        &self.grid
    }

    fn member(&self, _p: usize, x: &[Coord]) -> bool {
        let (c1, o1) = (x[0].cell as usize, x[0].off[0]);
        let (c2, o2) = (x[1].cell as usize, x[1].off[0]);
        if (c1, o1) == (c2, o2) {
            return false;
        }
        let less = (c1, o1) < (c2, o2);
        match (self.good[c1], self.good[c2]) {
            (true, true) => {
                let w12 = self.witnessed(c1, o1, c2, o2);
                let w21 = self.witnessed(c2, o2, c1, o1);
                if w12 || w21 {
                    w12
                } else {
                    less
                }
            }
            (false, true) => true,
            (true, false) => false,
            (false, false) => less,
        }
    }
}

/// Strengthens a weak linear-order theon on a line grid. Sections are
/// classified exactly; the full pairs give an a.e.-equal antisymmetric
/// order, good cells are those where transitivity holds on every cell and
/// offset configuration, and the final order uses positive-measure
/// witnesses with the fallback tiers for non-excellent pairs.
pub fn strengthen_linorder(theon: &Theon) -> Result<LinOrderOracle> {
    check_linorder_input(theon)?;
    let t = builtin_theory("LinOrder")?;
    if let Some(r) = weak_check(theon, &t)?.into_iter().find(|r| !r.pass()) {
        return Err(Error::Invalid(format!(
            "input is not a weak linear order: {} has measure {}",
            r.axiom,
            rational::fmt(&r.measure)
        )));
    }
    let a = section_table(theon)?;
    let m = theon.grid.len();
    let full = |c1: usize, c2: usize, lt: bool| a[pair_index(m, c1, c2, lt)].is_one();
    let mut base = vec![false; 2 * m * m];
    for c1 in 0..m {
        for c2 in 0..m {
            for lt in [false, true] {
                let f12 = full(c1, c2, lt);
                let f21 = full(c2, c1, !lt);
                base[pair_index(m, c1, c2, lt)] = (f12 && !f21) || (f12 == f21 && raw_less(c1, c2, lt));
            }
        }
    }
    let b = |c1: usize, c2: usize, lt: bool| base[pair_index(m, c1, c2, lt)];
    let ranks: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut good = vec![true; m];
    for cx in 0..m {
        for cy in 0..m {
            for cz in 0..m {
                for r in &ranks {
                    let xy = b(cx, cy, r[0] < r[1]);
                    let yz = b(cy, cz, r[1] < r[2]);
                    let xz = b(cx, cz, r[0] < r[2]);
                    if xy && yz && !xz {
                        good[cx] = false;
                        good[cy] = false;
                        good[cz] = false;
                    }
                }
            }
        }
    }
    Ok(LinOrderOracle { language: t.language, grid: theon.grid.clone(), base, good })
}
