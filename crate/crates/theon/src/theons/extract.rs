use super::exact::{measure, Event, EventAtom, Query};
use super::grid::{off_from_rational, Coord, OFF_ONE};
use super::peon::{Peon, PosetonW};
use super::theon::Theon;
use crate::logic::builtin_theory;
use crate::rational::{self, Rational};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};

/// A step measure on the `m × m` grid of `[0, 1]²`; `w[col * m + row]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarMeasure {
    pub m: usize,
    pub w: Vec<Rational>,
}

impl PlanarMeasure {
    pub fn get(&self, col: usize, row: usize) -> &Rational {
        &self.w[col * self.m + row]
    }

    pub fn check_uniform_marginals(&self) -> Result<()> {
        let m = self.m;
        let target = rational::ratio(1, m as i64);
        for i in 0..m {
            let col: Rational = (0..m).map(|j| self.get(i, j).clone()).sum();
            let row: Rational = (0..m).map(|j| self.get(j, i).clone()).sum();
            if col != target || row != target {
                return Err(Error::Invalid(format!(
                    "marginals are not uniform: column {i} has mass {}, row {i} has mass {}",
                    rational::fmt(&col),
                    rational::fmt(&row)
                )));
            }
        }
        Ok(())
    }
}

/// `s(y)`: the mass of points `x` with `x ≺_p y`.
fn section(theon: &Theon, p: usize, y: Coord) -> Result<Rational> {
    let q = Query {
        n: 2,
        atoms: vec![EventAtom { pred: p, args: vec![0, 1] }],
        event: Event::Atom(0),
        fixed: vec![(0b10, y)],
        restrict: Vec::new(),
    };
    measure(theon, &q)
}

/// The parameter set `{o ∈ [0, 1] : a + b·o ∈ [lo, hi)}` as an interval.
fn preimage(a: &Rational, b: &Rational, lo: &Rational, hi: &Rational, last: bool) -> Option<(Rational, Rational)> {
    let zero = rational::zero();
    let one = rational::one();
    if b.is_zero() {
        let inside = a >= lo && (a < hi || (last && a <= hi));
        return inside.then_some((zero, one));
    }
    let (mut s, mut t) = ((lo - a) / b, (hi - a) / b);
    if b.is_negative() {
        std::mem::swap(&mut s, &mut t);
    }
    let s = s.max(zero);
    let t = t.min(one);
    (s < t).then_some((s, t))
}

fn len(iv: &Option<(Rational, Rational)>) -> Rational {
    iv.as_ref().map(|(s, t)| t - s).unwrap_or_else(rational::zero)
}

fn intersect(a: &Option<(Rational, Rational)>, b: &Option<(Rational, Rational)>) -> Option<(Rational, Rational)> {
    match (a, b) {
        (Some((s1, t1)), Some((s2, t2))) => {
            let s = s1.max(s2).clone();
            let t = t1.min(t2).clone();
            (s < t).then_some((s, t))
        }
        _ => None,
    }
}

/// An affine map `o ↦ a + b·o` on `[0, 1]` given its values at 0, ½, 1.
fn affine(v0: Rational, vh: Rational, v1: Rational) -> Result<(Rational, Rational)> {
    if &(&v0 + &v1) / rational::int(2) != vh {
        return Err(Error::Invalid("section measure is not affine on a cell".into()));
    }
    let b = &v1 - &v0;
    Ok((v0, b))
}

/// Recovers the permuton of a step permutation theon: the pushforward of
/// the ground measure under `y ↦ (s¹(y), s²(y))`, on the grid's resolution.
pub fn permuton_extract(theon: &Theon) -> Result<PlanarMeasure> {
    if theon.theory.language != builtin_theory("Perm")?.language {
        return Err(Error::LanguageMismatch("permuton extraction needs a theon over Perm".into()));
    }
    let grid = &theon.grid;
    let m = grid.side;
    let half = OFF_ONE / 2;
    let mut w = vec![rational::zero(); m * m];
    let bounds: Vec<(Rational, Rational)> =
        (0..m).map(|i| (rational::ratio(i as i64, m as i64), rational::ratio(i as i64 + 1, m as i64))).collect();
    for (ci, cell) in grid.cells.iter().enumerate() {
        let at = |off: [u128; 2], p: usize| section(theon, p, Coord::new(ci, off));
        let (cols, rows): (Vec<Option<(Rational, Rational)>>, Vec<Option<(Rational, Rational)>>);
        if grid.dims == 2 {
            let (a1, b1) = affine(at([0, half], 0)?, at([half, half], 0)?, at([OFF_ONE, half], 0)?)?;
            let (a2, b2) = affine(at([half, 0], 1)?, at([half, half], 1)?, at([half, OFF_ONE], 1)?)?;
            if at([0, 0], 0)? != at([0, OFF_ONE], 0)? || at([0, 0], 1)? != at([OFF_ONE, 0], 1)? {
                return Err(Error::Invalid("section measures mix the two axes".into()));
            }
            cols = bounds.iter().enumerate().map(|(i, (lo, hi))| preimage(&a1, &b1, lo, hi, i + 1 == m)).collect();
            rows = bounds.iter().enumerate().map(|(j, (lo, hi))| preimage(&a2, &b2, lo, hi, j + 1 == m)).collect();
            for i in 0..m {
                for j in 0..m {
                    w[i * m + j] += &cell.weight * len(&cols[i]) * len(&rows[j]);
                }
            }
        } else {
            let (a1, b1) = affine(at([0, 0], 0)?, at([half, 0], 0)?, at([OFF_ONE, 0], 0)?)?;
            let (a2, b2) = affine(at([0, 0], 1)?, at([half, 0], 1)?, at([OFF_ONE, 0], 1)?)?;
            cols = bounds.iter().enumerate().map(|(i, (lo, hi))| preimage(&a1, &b1, lo, hi, i + 1 == m)).collect();
            rows = bounds.iter().enumerate().map(|(j, (lo, hi))| preimage(&a2, &b2, lo, hi, j + 1 == m)).collect();
            for i in 0..m {
                for j in 0..m {
                    w[i * m + j] += &cell.weight * len(&intersect(&cols[i], &rows[j]));
                }
            }
        }
    }
    let mu = PlanarMeasure { m, w };
    mu.check_uniform_marginals()?;
    Ok(mu)
}

/// Checks the poseton laws cellwise: `W` vanishes unless the first cell is
/// weakly left of the second, and positive links compose to 1.
pub fn check_poseton_w(w: &PosetonW) -> Result<()> {
    let m = w.m;
    let cells = m * m;
    let col = |c: usize| c / m;
    for c1 in 0..cells {
        for c2 in 0..cells {
            if col(c1) > col(c2) && !w.get(c1, c2).is_zero() {
                return Err(Error::Invalid(format!("W is positive on cells {c1}, {c2} against the first-axis order")));
            }
        }
    }
    for c1 in 0..cells {
        for c2 in 0..cells {
            if col(c1) > col(c2) || w.get(c1, c2).is_zero() {
                continue;
            }
            for c3 in 0..cells {
                if col(c2) <= col(c3) && !w.get(c2, c3).is_zero() && !w.get(c1, c3).is_one() {
                    return Err(Error::Invalid(format!("W violates transitivity on cells {c1}, {c2}, {c3}")));
                }
            }
        }
    }
    Ok(())
}

/// Recovers `W(x, y) = λ²(A(x, y))` from an extended-order theon whose
/// linear order is the first-axis order.
pub fn poseton_extract(theon: &Theon) -> Result<PosetonW> {
    if theon.theory.language != builtin_theory("ExtendedOrder")?.language {
        return Err(Error::LanguageMismatch("poseton extraction needs a theon over ExtendedOrder".into()));
    }
    let grid = &theon.grid;
    let m = grid.side;
    if grid.dims != 2 || grid.len() != m * m || !grid.is_uniform() {
        return Err(Error::Invalid("poseton extraction needs the uniform planar grid".into()));
    }
    if !matches!(theon.peons[0], Peon::Planar { axis: 0 }) {
        return Err(Error::Invalid("the linear order must be the first-axis order".into()));
    }
    let cells = m * m;
    let mut index = vec![0usize; cells];
    for (i, c) in grid.cells.iter().enumerate() {
        index[c.pos[0] * m + c.pos[1]] = i;
    }
    let r = |num: u128, den: u128| off_from_rational(&rational::ratio(num as i64, den as i64));
    let section = |c1: usize, c2: usize, ox: [u128; 2], oy: [u128; 2]| {
        let q = Query {
            n: 2,
            atoms: vec![EventAtom { pred: 1, args: vec![0, 1] }],
            event: Event::Atom(0),
            fixed: vec![(0b01, Coord::new(index[c1], ox)), (0b10, Coord::new(index[c2], oy))],
            restrict: Vec::new(),
        };
        measure(theon, &q)
    };
    let mut w = vec![rational::zero(); cells * cells];
    for c1 in 0..cells {
        for c2 in 0..cells {
            let (col1, col2) = (c1 / m, c2 / m);
            if col1 > col2 {
                continue;
            }
            let (a, b) = if col1 < col2 {
                (
                    section(c1, c2, [r(1, 2), r(1, 2)], [r(1, 2), r(1, 2)])?,
                    section(c1, c2, [r(1, 4), r(3, 4)], [r(3, 4), r(1, 4)])?,
                )
            } else {
                (
                    section(c1, c2, [r(1, 3), r(1, 2)], [r(2, 3), r(1, 2)])?,
                    section(c1, c2, [r(1, 4), r(2, 3)], [r(3, 4), r(1, 3)])?,
                )
            };
            if a != b {
                return Err(Error::Invalid(format!(
                    "section of the partial order is not constant on cells {c1}, {c2}"
                )));
            }
            w[c1 * cells + c2] = a;
        }
    }
    let w = PosetonW::new(m, w)?;
    check_poseton_w(&w)?;
    Ok(w)
}
