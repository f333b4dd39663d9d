use super::grid::Coord;
use super::grid::GroundGrid;
use super::peon::{Linking, Peon};
use crate::logic::{Language, Theory};
use crate::{Error, Result};
use std::sync::Arc;

/// Pointwise access to a (possibly strengthened) theon.
pub trait TheonOracle: Send + Sync {
    fn language(&self) -> &Language;
    fn grid(&self) -> &GroundGrid;
    /// Membership of the point `x` (indexed by the coordinate order) in the
    /// peon of predicate `p`.
    fn member(&self, p: usize, x: &[Coord]) -> bool;
}

/// A theon over a ground grid: one peon per predicate of the theory.
#[derive(Debug, Clone)]
pub struct Theon {
    pub theory: Theory,
    pub grid: Arc<GroundGrid>,
    pub peons: Vec<Peon>,
}

impl Theon {
    pub fn new(theory: Theory, grid: GroundGrid, peons: Vec<Peon>) -> Result<Theon> {
        Theon::with_grid(theory, Arc::new(grid), peons)
    }

    pub fn with_grid(theory: Theory, grid: Arc<GroundGrid>, mut peons: Vec<Peon>) -> Result<Theon> {
        if peons.len() != theory.language.len() {
            return Err(Error::Invalid(format!("{} peons for {} predicates", peons.len(), theory.language.len())));
        }
        for (sym, peon) in theory.language.symbols().iter().zip(peons.iter_mut()) {
            if peon.arity() != sym.arity {
                return Err(Error::Arity { symbol: sym.name.clone(), expected: sym.arity, found: peon.arity() });
            }
            match peon {
                Peon::Cmp(c) => {
                    let mut bound = (**c).clone();
                    bound.bind(&grid)?;
                    *c = Arc::new(bound);
                }
                Peon::Table(t) if t.cells != grid.len() => {
                    return Err(Error::Invalid(format!(
                        "table for {} has {} cells, grid has {}",
                        sym.name,
                        t.cells,
                        grid.len()
                    )));
                }
                Peon::Planar { .. } | Peon::Poseton(_) | Peon::Interval if grid.dims != 2 => {
                    return Err(Error::Invalid(format!("{} peon for {} needs a planar grid", peon.kind(), sym.name)));
                }
                _ => {}
            }
        }
        if grid.cells.iter().any(|c| c.tri) && peons.iter().all(|p| p.linking() == Linking::PerAxis) {
            let only_cells = peons.iter().all(|p| p.uses().iter().all(|u| *u != super::peon::Use::Offset));
            if !only_cells {
                return Err(Error::Invalid("triangular cells need peons comparing across axes".into()));
            }
        }
        Ok(Theon { theory, grid, peons })
    }

    pub fn linking(&self) -> Linking {
        self.peons.iter().map(|p| p.linking()).max().unwrap_or(Linking::PerAxis)
    }

    pub fn peon(&self, name: &str) -> Option<&Peon> {
        self.theory.language.index(name).map(|i| &self.peons[i])
    }
}

impl TheonOracle for Theon {
    fn language(&self) -> &Language {
        &self.theory.language
    }

    fn grid(&self) -> &GroundGrid {
        &self.grid
    }

    fn member(&self, p: usize, x: &[Coord]) -> bool {
        self.peons[p].member(&self.grid, x)
    }
}
