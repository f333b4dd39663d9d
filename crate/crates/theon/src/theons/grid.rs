use crate::rational::{self, Rational};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Offsets inside a cell are fixed-point numbers `off / OFF_ONE` in `[0, 1]`.
pub const OFF_BITS: u32 = 80;
pub const OFF_ONE: u128 = 1 << OFF_BITS;

/// A point of the ground space: a cell plus its offset vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coord {
    pub cell: u32,
    pub off: [u128; 2],
}

impl Coord {
    pub fn new(cell: usize, off: [u128; 2]) -> Coord {
        Coord { cell: cell as u32, off }
    }
}

pub fn off_to_rational(off: u128) -> Rational {
    Rational::new(BigInt::from(off), BigInt::from(OFF_ONE))
}

/// Rounds a rational in `[0, 1]` down to the offset grid.
pub fn off_from_rational(q: &Rational) -> u128 {
    let scaled = q * Rational::from_integer(BigInt::from(OFF_ONE));
    let v = scaled.floor().to_integer();
    u128::try_from(v).unwrap_or(0).min(OFF_ONE)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub weight: Rational,
    /// Position along each axis: the interval index on a line grid, or
    /// `(column, row)` on a planar grid.
    pub pos: [usize; 2],
    /// On a planar diagonal cell: the measure is uniform on the part above
    /// the diagonal, so the second offset exceeds the first.
    pub tri: bool,
}

/// A finite probability space standing in for the ground space: either
/// consecutive intervals of `[0, 1]` (`dims = 1`) or squares of a uniform
/// `side × side` grid on `[0, 1]²` (`dims = 2`).
#[derive(Debug, Clone, PartialEq)]
pub struct GroundGrid {
    pub dims: usize,
    pub side: usize,
    pub cells: Vec<Cell>,
    thresholds: Vec<u128>,
}

impl GroundGrid {
    fn build(dims: usize, side: usize, cells: Vec<Cell>) -> Result<GroundGrid> {
        if cells.is_empty() {
            return Err(Error::Invalid("grid has no cells".into()));
        }
        let mut total = rational::zero();
        let mut thresholds = Vec::with_capacity(cells.len());
        let scale = Rational::from_integer(BigInt::one() << 64);
        for c in &cells {
            if !c.weight.is_positive() {
                return Err(Error::Invalid("cell weights must be positive".into()));
            }
            total += &c.weight;
            let t = (&total * &scale).floor().to_integer();
            thresholds.push(u128::try_from(t).expect("bounded threshold"));
        }
        if total != rational::one() {
            return Err(Error::Invalid(format!("cell weights sum to {}", rational::fmt(&total))));
        }
        Ok(GroundGrid { dims, side, cells, thresholds })
    }

    /// `[0, 1]` cut into consecutive intervals of the given lengths.
    pub fn line(weights: Vec<Rational>) -> Result<GroundGrid> {
        let side = weights.len();
        let cells =
            weights.into_iter().enumerate().map(|(i, weight)| Cell { weight, pos: [i, 0], tri: false }).collect();
        GroundGrid::build(1, side, cells)
    }

    pub fn uniform(m: usize) -> Result<GroundGrid> {
        if m == 0 {
            return Err(Error::Invalid("grid needs at least one cell".into()));
        }
        GroundGrid::line(vec![rational::ratio(1, m as i64); m])
    }

    /// A step measure on the `m × m` grid of `[0, 1]²`; `w[col * m + row]`
    /// is the mass of the cell. Zero cells are dropped. With `tri`, diagonal
    /// cells carry their mass above the diagonal.
    pub fn planar(m: usize, w: &[Rational], tri: bool) -> Result<GroundGrid> {
        if w.len() != m * m {
            return Err(Error::Invalid(format!("planar grid needs {} weights, got {}", m * m, w.len())));
        }
        let mut cells = Vec::new();
        for col in 0..m {
            for row in 0..m {
                let weight = w[col * m + row].clone();
                if weight.is_negative() {
                    return Err(Error::Invalid("negative cell weight".into()));
                }
                if tri && row < col && !weight.is_zero() {
                    return Err(Error::Invalid("mass below the diagonal".into()));
                }
                if !weight.is_zero() {
                    cells.push(Cell { weight, pos: [col, row], tri: tri && row == col });
                }
            }
        }
        GroundGrid::build(2, m, cells)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.cells.iter().all(|c| c.weight == self.cells[0].weight)
    }

    /// Index of the cell containing the 64-bit uniform draw `u`.
    pub fn cell_for(&self, u: u64) -> usize {
        let u = u as u128;
        self.thresholds.partition_point(|&t| t <= u).min(self.cells.len() - 1)
    }

    /// Boundary index `j` with `q = w_0 + … + w_{j-1}` on a line grid.
    pub fn boundary(&self, q: &Rational) -> Result<usize> {
        let mut acc = rational::zero();
        if q.is_zero() {
            return Ok(0);
        }
        for (j, c) in self.cells.iter().enumerate() {
            acc += &c.weight;
            if &acc == q {
                return Ok(j + 1);
            }
        }
        Err(Error::Invalid(format!("constant {} is not a cell boundary", rational::fmt(q))))
    }

    /// Position along `axis` used for comparisons: `(cell position, offset)`.
    pub fn axis_value(&self, x: &Coord, axis: usize) -> (usize, u128) {
        (self.cells[x.cell as usize].pos[axis], x.off[axis])
    }
}

/// The non-empty subsets of `[k]` in the fixed coordinate order: by size,
/// then lexicographically (`{1},{2},{3},{1,2},{1,3},{2,3},{1,2,3}`), as
/// bit masks.
pub fn coordinate_index(k: usize) -> Vec<u32> {
    let mut out: Vec<u32> = (1..(1u32 << k)).collect();
    out.sort_by_key(|&m| {
        let elems: Vec<u32> = (0..k as u32).filter(|i| m >> i & 1 == 1).collect();
        (elems.len(), elems)
    });
    out
}

/// Position of a mask inside `coordinate_index(k)`.
pub fn coordinate_position(k: usize, mask: u32) -> usize {
    coordinate_index(k).iter().position(|&m| m == mask).expect("mask within [k]")
}

/// `α(A)` for a mask over `[k]` and `α` given as the image list.
pub fn image_mask(mask: u32, alpha: &[usize]) -> u32 {
    let mut out = 0;
    for (i, &a) in alpha.iter().enumerate() {
        if mask >> i & 1 == 1 {
            out |= 1 << a;
        }
    }
    out
}

pub fn mask_label(mask: u32) -> String {
    let elems: Vec<String> = (0..32).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", elems.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_order_for_three() {
        let labels: Vec<String> = coordinate_index(3).into_iter().map(mask_label).collect();
        assert_eq!(labels, ["{1}", "{2}", "{3}", "{1,2}", "{1,3}", "{2,3}", "{1,2,3}"]);
    }

    #[test]
    fn cell_lookup() {
        let g = GroundGrid::line(vec![rational::ratio(1, 4), rational::ratio(3, 4)]).unwrap();
        assert_eq!(g.cell_for(0), 0);
        assert_eq!(g.cell_for(u64::MAX / 4 - 1), 0);
        assert_eq!(g.cell_for(u64::MAX / 4 + 1), 1);
        assert_eq!(g.cell_for(u64::MAX), 1);
        assert_eq!(g.boundary(&rational::ratio(1, 4)).unwrap(), 1);
        assert!(g.boundary(&rational::ratio(1, 2)).is_err());
    }
}
