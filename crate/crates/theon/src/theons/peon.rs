use super::grid::{coordinate_index, coordinate_position, mask_label, Coord, GroundGrid};
use crate::rational::{self, Rational};
use crate::syntax::Cursor;
use crate::{Error, Result};
use fixedbitset::FixedBitSet;
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// How a peon depends on one coordinate of its point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Use {
    Unused,
    /// Only through the cell.
    Cell,
    /// Through the cell and the relative order of offsets.
    Offset,
}

/// Which offsets a peon may compare with each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Linking {
    /// Same axis and same cell position on that axis.
    PerAxis,
    /// Same cell position, across axes.
    Line,
    /// Any two offsets.
    All,
}

/// A peon given by a pointwise membership rule over `coordinate_index(k)`.
pub trait PeonRule: Send + Sync + fmt::Debug {
    fn arity(&self) -> usize;
    fn uses(&self) -> Vec<Use>;
    fn linking(&self) -> Linking {
        Linking::PerAxis
    }
    fn member(&self, grid: &GroundGrid, x: &[Coord]) -> bool;
}

/// Membership table over cell tuples indexed by the coordinate order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub k: usize,
    pub cells: usize,
    bits: FixedBitSet,
    uses: Vec<Use>,
}

const TABLE_CAP: usize = 1 << 24;

impl Table {
    pub fn positions(k: usize) -> usize {
        (1 << k) - 1
    }

    /// Builds a table from cell tuples, where `None` is a wildcard.
    pub fn from_entries(k: usize, cells: usize, entries: &[Vec<Option<usize>>]) -> Result<Table> {
        let p = Table::positions(k);
        let size = (cells as u128).checked_pow(p as u32).filter(|&s| s <= TABLE_CAP as u128);
        let size = size.ok_or_else(|| Error::TooLarge(format!("table with {cells}^{p} entries")))? as usize;
        let mut bits = FixedBitSet::with_capacity(size);
        for e in entries {
            if e.len() != p {
                return Err(Error::Invalid(format!("table entry needs {p} cells, got {}", e.len())));
            }
            if e.iter().flatten().any(|&c| c >= cells) {
                return Err(Error::Invalid(format!("cell index out of range 0..{cells}")));
            }
            let mut idx = vec![0usize];
            for slot in e {
                let choices: Vec<usize> = match slot {
                    Some(c) => vec![*c],
                    None => (0..cells).collect(),
                };
                idx = idx.iter().flat_map(|&i| choices.iter().map(move |&c| i * cells + c)).collect();
            }
            for i in idx {
                bits.insert(i);
            }
        }
        Ok(Table::from_bits(k, cells, bits))
    }

    pub fn from_fn(k: usize, cells: usize, mut f: impl FnMut(&[usize]) -> bool) -> Result<Table> {
        let p = Table::positions(k);
        let size = (cells as u128).checked_pow(p as u32).filter(|&s| s <= TABLE_CAP as u128);
        let size = size.ok_or_else(|| Error::TooLarge(format!("table with {cells}^{p} entries")))? as usize;
        let mut bits = FixedBitSet::with_capacity(size);
        let mut t = vec![0usize; p];
        for i in 0..size {
            let mut r = i;
            for slot in t.iter_mut().rev() {
                *slot = r % cells;
                r /= cells;
            }
            if f(&t) {
                bits.insert(i);
            }
        }
        Ok(Table::from_bits(k, cells, bits))
    }

    fn from_bits(k: usize, cells: usize, bits: FixedBitSet) -> Table {
        let p = Table::positions(k);
        let size = bits.len();
        let mut uses = vec![Use::Unused; p];
        let mut stride = 1;
        for pos in (0..p).rev() {
            let depends = (0..size).any(|i| {
                let digit = (i / stride) % cells;
                digit != 0 && bits.contains(i) != bits.contains(i - digit * stride)
            });
            if depends {
                uses[pos] = Use::Cell;
            }
            stride *= cells;
        }
        Table { k, cells, bits, uses }
    }

    pub fn contains(&self, cells: &[usize]) -> bool {
        let mut i = 0;
        for &c in cells {
            i = i * self.cells + c;
        }
        self.bits.contains(i)
    }

    pub fn entries(&self) -> Vec<Vec<usize>> {
        let p = Table::positions(self.k);
        self.bits
            .ones()
            .map(|i| {
                let mut t = vec![0; p];
                let mut r = i;
                for slot in t.iter_mut().rev() {
                    *slot = r % self.cells;
                    r /= self.cells;
                }
                t
            })
            .collect()
    }
}

/// Comparison formula over the coordinates `x{A}` of a point on a line grid.
#[derive(Debug, Clone, PartialEq)]
pub enum CmpExpr {
    Const(bool),
    /// `x{A} < x{B}` (`strict`) or `x{A} <= x{B}`.
    Less {
        a: u32,
        b: u32,
        strict: bool,
    },
    /// `x{A} < q` (`strict`) or `x{A} <= q`; `j` is the boundary index of
    /// `q`, filled in when bound to a grid.
    Below {
        a: u32,
        q: Rational,
        strict: bool,
        j: usize,
    },
    /// `frac(x{A}) < frac(x{B})`: the offsets inside the cells.
    Frac {
        a: u32,
        b: u32,
    },
    Not(Box<CmpExpr>),
    And(Vec<CmpExpr>),
    Or(Vec<CmpExpr>),
}

impl CmpExpr {
    fn visit(&self, f: &mut impl FnMut(&CmpExpr)) {
        f(self);
        match self {
            CmpExpr::Not(e) => e.visit(f),
            CmpExpr::And(es) | CmpExpr::Or(es) => es.iter().for_each(|e| e.visit(f)),
            _ => {}
        }
    }

    fn bind(&mut self, grid: &GroundGrid) -> Result<()> {
        match self {
            CmpExpr::Below { q, j, .. } => *j = grid.boundary(q)?,
            CmpExpr::Not(e) => e.bind(grid)?,
            CmpExpr::And(es) | CmpExpr::Or(es) => {
                for e in es {
                    e.bind(grid)?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Replaces every coordinate mask.
    pub fn map_masks(&self, f: &impl Fn(u32) -> u32) -> CmpExpr {
        match self {
            CmpExpr::Const(b) => CmpExpr::Const(*b),
            CmpExpr::Less { a, b, strict } => CmpExpr::Less { a: f(*a), b: f(*b), strict: *strict },
            CmpExpr::Below { a, q, strict, j } => CmpExpr::Below { a: f(*a), q: q.clone(), strict: *strict, j: *j },
            CmpExpr::Frac { a, b } => CmpExpr::Frac { a: f(*a), b: f(*b) },
            CmpExpr::Not(e) => CmpExpr::Not(Box::new(e.map_masks(f))),
            CmpExpr::And(es) => CmpExpr::And(es.iter().map(|e| e.map_masks(f)).collect()),
            CmpExpr::Or(es) => CmpExpr::Or(es.iter().map(|e| e.map_masks(f)).collect()),
        }
    }

    fn eval(&self, k: usize, grid: &GroundGrid, x: &[Coord]) -> bool {
        let val = |m: u32| {
            let c = &x[coordinate_position(k, m)];
            (grid.cells[c.cell as usize].pos[0], c.off[0])
        };
        match self {
            CmpExpr::Const(b) => *b,
            CmpExpr::Less { a, b, strict } => {
                let o = val(*a).cmp(&val(*b));
                o == Ordering::Less || (!strict && o == Ordering::Equal)
            }
            CmpExpr::Below { a, strict, j, .. } => {
                let (c, off) = val(*a);
                c < *j || (!strict && c == *j && off == 0)
            }
            CmpExpr::Frac { a, b } => val(*a).1 < val(*b).1,
            CmpExpr::Not(e) => !e.eval(k, grid, x),
            CmpExpr::And(es) => es.iter().all(|e| e.eval(k, grid, x)),
            CmpExpr::Or(es) => es.iter().any(|e| e.eval(k, grid, x)),
        }
    }
}

fn fmt_mask(m: u32) -> String {
    format!("x{}", mask_label(m))
}

impl fmt::Display for CmpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &CmpExpr| match e {
            CmpExpr::And(_) | CmpExpr::Or(_) => format!("({e})"),
            _ => e.to_string(),
        };
        match self {
            CmpExpr::Const(b) => write!(f, "{b}"),
            CmpExpr::Less { a, b, strict } => {
                write!(f, "{} {} {}", fmt_mask(*a), if *strict { "<" } else { "<=" }, fmt_mask(*b))
            }
            CmpExpr::Below { a, q, strict, .. } => {
                write!(f, "{} {} {}", fmt_mask(*a), if *strict { "<" } else { "<=" }, rational::fmt(q))
            }
            CmpExpr::Frac { a, b } => write!(f, "frac({}) < frac({})", fmt_mask(*a), fmt_mask(*b)),
            CmpExpr::Not(e) => write!(f, "!{}", wrap(e)),
            CmpExpr::And(es) => write!(f, "{}", es.iter().map(wrap).collect::<Vec<_>>().join(" & ")),
            CmpExpr::Or(es) => write!(f, "{}", es.iter().map(wrap).collect::<Vec<_>>().join(" | ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cmp {
    pub k: usize,
    pub expr: CmpExpr,
}

impl Cmp {
    pub fn new(k: usize, expr: CmpExpr) -> Result<Cmp> {
        let full = (1u32 << k) - 1;
        let mut err = None;
        expr.visit(&mut |e| {
            let masks: Vec<u32> = match e {
                CmpExpr::Less { a, b, .. } => vec![*a, *b],
                CmpExpr::Below { a, .. } => vec![*a],
                CmpExpr::Frac { a, b } => {
                    if a.count_ones() != 1 || b.count_ones() != 1 {
                        err = Some(Error::Invalid("frac atoms take singleton coordinates".into()));
                    }
                    vec![*a, *b]
                }
                _ => vec![],
            };
            for m in masks {
                if m == 0 || m & !full != 0 {
                    err = Some(Error::Invalid(format!("coordinate {} outside [{k}]", mask_label(m))));
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(Cmp { k, expr }),
        }
    }

    pub fn parse(k: usize, src: &str) -> Result<Cmp> {
        let mut c = Cursor::new(src)?;
        let e = parse_cmp(&mut c)?;
        if !c.at_end() {
            return c.error("trailing input after comparison formula");
        }
        Cmp::new(k, e)
    }

    pub fn bind(&mut self, grid: &GroundGrid) -> Result<()> {
        if grid.dims != 1 {
            return Err(Error::Invalid("comparison peons need a line grid".into()));
        }
        self.expr.bind(grid)
    }

    fn uses(&self) -> Vec<Use> {
        let idx = coordinate_index(self.k);
        let mut uses = vec![Use::Unused; idx.len()];
        let mut mark = |m: u32, u: Use| {
            let p = idx.iter().position(|&x| x == m).expect("validated mask");
            uses[p] = uses[p].max(u);
        };
        self.expr.visit(&mut |e| match e {
            CmpExpr::Less { a, b, .. } | CmpExpr::Frac { a, b } => {
                mark(*a, Use::Offset);
                mark(*b, Use::Offset);
            }
            CmpExpr::Below { a, .. } => mark(*a, Use::Cell),
            _ => {}
        });
        uses
    }

    fn has_frac(&self) -> bool {
        let mut found = false;
        self.expr.visit(&mut |e| found |= matches!(e, CmpExpr::Frac { .. }));
        found
    }

    /// Whether the formula compares a non-singleton coordinate with another
    /// coordinate (rather than with a constant).
    pub fn compares_higher_coordinates(&self) -> bool {
        let mut found = false;
        self.expr.visit(&mut |e| {
            if let CmpExpr::Less { a, b, .. } = e {
                found |= a.count_ones() > 1 || b.count_ones() > 1;
            }
        });
        found
    }
}

enum Term {
    Coord(u32),
    Frac(u32),
    Const(Rational),
}

fn parse_coord(c: &mut Cursor) -> Result<u32> {
    c.expect_keyword("x")?;
    c.expect_punct("{")?;
    let mut m = 0u32;
    loop {
        let i = c.int()?;
        if i == 0 || i > 16 {
            return c.error("coordinate indices are 1-based and at most 16");
        }
        m |= 1 << (i - 1);
        if !c.eat_punct(",") {
            break;
        }
    }
    c.expect_punct("}")?;
    Ok(m)
}

fn parse_term(c: &mut Cursor) -> Result<Term> {
    if c.is_ident("x") {
        return Ok(Term::Coord(parse_coord(c)?));
    }
    if c.eat_ident("frac") {
        c.expect_punct("(")?;
        let m = parse_coord(c)?;
        c.expect_punct(")")?;
        return Ok(Term::Frac(m));
    }
    Ok(Term::Const(c.rational()?))
}

pub(crate) fn parse_cmp(c: &mut Cursor) -> Result<CmpExpr> {
    let mut parts = vec![parse_cmp_and(c)?];
    while c.eat_punct("|") {
        parts.push(parse_cmp_and(c)?);
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { CmpExpr::Or(parts) })
}

fn parse_cmp_and(c: &mut Cursor) -> Result<CmpExpr> {
    let mut parts = vec![parse_cmp_unary(c)?];
    while c.eat_punct("&") {
        parts.push(parse_cmp_unary(c)?);
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { CmpExpr::And(parts) })
}

fn parse_cmp_unary(c: &mut Cursor) -> Result<CmpExpr> {
    if c.eat_punct("!") {
        return Ok(CmpExpr::Not(Box::new(parse_cmp_unary(c)?)));
    }
    if c.eat_punct("(") {
        let e = parse_cmp(c)?;
        c.expect_punct(")")?;
        return Ok(e);
    }
    if c.eat_ident("true") {
        return Ok(CmpExpr::Const(true));
    }
    if c.eat_ident("false") {
        return Ok(CmpExpr::Const(false));
    }
    let lhs = parse_term(c)?;
    let op = ["<=", ">=", "<", ">"]
        .into_iter()
        .find(|op| c.eat_punct(op))
        .map(Ok)
        .unwrap_or_else(|| c.error("expected a comparison operator"))?;
    let rhs = parse_term(c)?;
    let (lhs, rhs, strict) = match op {
        "<" => (lhs, rhs, true),
        "<=" => (lhs, rhs, false),
        ">" => (rhs, lhs, true),
        _ => (rhs, lhs, false),
    };
    Ok(match (lhs, rhs) {
        (Term::Coord(a), Term::Coord(b)) => CmpExpr::Less { a, b, strict },
        (Term::Frac(a), Term::Frac(b)) if strict => CmpExpr::Frac { a, b },
        (Term::Frac(_), Term::Frac(_)) => return c.error("frac comparisons must be strict"),
        (Term::Coord(a), Term::Const(q)) => CmpExpr::Below { a, q, strict, j: 0 },
        (Term::Const(q), Term::Coord(a)) => CmpExpr::Not(Box::new(CmpExpr::Below { a, q, strict: !strict, j: 0 })),
        _ => return c.error("unsupported comparison"),
    })
}

/// Step poseton data on a uniform `m × m` grid: `w[c1 * m² + c2]` for flat
/// cell indices `c = col * m + row`, each a multiple of `1/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosetonW {
    pub m: usize,
    pub w: Vec<Rational>,
    thresh: Vec<usize>,
}

impl PosetonW {
    pub fn new(m: usize, w: Vec<Rational>) -> Result<PosetonW> {
        let cells = m * m;
        if w.len() != cells * cells {
            return Err(Error::Invalid(format!("W needs {} entries, got {}", cells * cells, w.len())));
        }
        let mut thresh = Vec::with_capacity(w.len());
        for q in &w {
            let scaled = q * Rational::from_integer((m as i64).into());
            if !scaled.is_integer() || scaled < rational::zero() || scaled > Rational::from_integer((m as i64).into()) {
                return Err(Error::Invalid(format!(
                    "W value {} is not a multiple of 1/{m} in [0, 1]",
                    rational::fmt(q)
                )));
            }
            thresh.push(usize::try_from(scaled.to_integer()).expect("bounded"));
        }
        Ok(PosetonW { m, w, thresh })
    }

    pub fn get(&self, c1: usize, c2: usize) -> &Rational {
        &self.w[c1 * self.m * self.m + c2]
    }
}

/// Strict order by `(π_axis, π_other)` of the two singleton coordinates.
pub fn planar_less(grid: &GroundGrid, a: &Coord, b: &Coord, axis: usize) -> bool {
    let other = 1 - axis;
    let key = |x: &Coord| (grid.axis_value(x, axis), grid.axis_value(x, other));
    key(a) < key(b)
}

#[derive(Debug, Clone)]
pub enum Peon {
    Table(Arc<Table>),
    Cmp(Arc<Cmp>),
    /// `π_axis(x{1}) < π_axis(x{2})` on a planar grid, ties broken by the
    /// other axis.
    Planar {
        axis: usize,
    },
    /// `x{1} ≺ x{2}` in the first-axis order and `π₁(x{1,2}) < W(x{1}, x{2})`.
    Poseton(Arc<PosetonW>),
    /// The intervals `[π₁, π₂]` of the two singletons intersect.
    Interval,
    Custom(Arc<dyn PeonRule>),
}

impl Peon {
    pub fn arity(&self) -> usize {
        match self {
            Peon::Table(t) => t.k,
            Peon::Cmp(c) => c.k,
            Peon::Planar { .. } | Peon::Poseton(_) | Peon::Interval => 2,
            Peon::Custom(r) => r.arity(),
        }
    }

    pub fn uses(&self) -> Vec<Use> {
        match self {
            Peon::Table(t) => t.uses.clone(),
            Peon::Cmp(c) => c.uses(),
            Peon::Planar { .. } | Peon::Interval => vec![Use::Offset, Use::Offset, Use::Unused],
            Peon::Poseton(_) => vec![Use::Offset, Use::Offset, Use::Cell],
            Peon::Custom(r) => r.uses(),
        }
    }

    pub fn linking(&self) -> Linking {
        match self {
            Peon::Table(_) | Peon::Planar { .. } | Peon::Poseton(_) => Linking::PerAxis,
            Peon::Cmp(c) if c.has_frac() => Linking::All,
            Peon::Cmp(_) => Linking::PerAxis,
            Peon::Interval => Linking::Line,
            Peon::Custom(r) => r.linking(),
        }
    }

    pub fn member(&self, grid: &GroundGrid, x: &[Coord]) -> bool {
        match self {
            Peon::Table(t) => {
                let cells: Vec<usize> = x.iter().map(|c| c.cell as usize).collect();
                t.contains(&cells)
            }
            Peon::Cmp(c) => c.expr.eval(c.k, grid, x),
            Peon::Planar { axis } => planar_less(grid, &x[0], &x[1], *axis),
            Peon::Poseton(w) => {
                let flat = |c: &Coord| {
                    let p = grid.cells[c.cell as usize].pos;
                    p[0] * w.m + p[1]
                };
                planar_less(grid, &x[0], &x[1], 0)
                    && grid.cells[x[2].cell as usize].pos[0] < w.thresh[flat(&x[0]) * w.m * w.m + flat(&x[1])]
            }
            Peon::Interval => {
                let lo = |c: &Coord| grid.axis_value(c, 0);
                let hi = |c: &Coord| grid.axis_value(c, 1);
                lo(&x[0]) <= hi(&x[1]) && lo(&x[1]) <= hi(&x[0])
            }
            Peon::Custom(r) => r.member(grid, x),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Peon::Table(_) => "table",
            Peon::Cmp(_) => "comparison",
            Peon::Planar { .. } => "planar",
            Peon::Poseton(_) => "poseton",
            Peon::Interval => "interval",
            Peon::Custom(_) => "derived",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for src in ["x{1} < x{2}", "frac(x{1}) < frac(x{2})", "x{1,2} <= 1/2", "x{1,2} < 1/2 & x{1,3} < 1/2"] {
            let c = Cmp::parse(3, src).unwrap();
            assert_eq!(c.expr.to_string(), src);
        }
        assert!(Cmp::parse(2, "x{3} < x{1}").is_err());
        assert!(Cmp::parse(2, "frac(x{1,2}) < frac(x{1})").is_err());
    }

    #[test]
    fn table_dependencies() {
        let t = Table::from_entries(2, 2, &[vec![Some(0), Some(1), None], vec![Some(1), Some(0), None]]).unwrap();
        assert_eq!(t.uses, vec![Use::Cell, Use::Cell, Use::Unused]);
        assert!(t.contains(&[0, 1, 1]));
        assert!(!t.contains(&[0, 0, 1]));
    }
}
