use super::extract::{check_poseton_w, PlanarMeasure};
use super::grid::GroundGrid;
use super::peon::{Cmp, CmpExpr, Peon, PosetonW, Table};
use super::text::{parse_planar, parse_poseton};
use super::theon::Theon;
use crate::logic::builtin_theory;
use crate::rational::{self, Rational};
use crate::{Error, Result};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub const BUILTIN_THEONS: &[&str] = &[
    "constant_graphon:p",
    "hypergraphon_Hp:p",
    "hypergraphon_Hprime:p",
    "turan:l",
    "linorder_std",
    "linorder_mod:k",
    "increasing:m",
    "standard_permuton:<grid>",
    "poseton_from_W:<poseton>",
    "interval_theon:<grid>",
];

fn resolution(p: &Rational) -> Result<usize> {
    if p.is_negative() || p > &rational::one() {
        return Err(Error::Invalid(format!("parameter {} outside [0, 1]", rational::fmt(p))));
    }
    p.denom().to_usize().ok_or_else(|| Error::TooLarge("parameter denominator".into()))
}

fn below(mask: u32, q: &Rational) -> CmpExpr {
    CmpExpr::Below { a: mask, q: q.clone(), strict: false, j: 0 }
}

fn cmp_theon(theory: &str, m: usize, peons: Vec<(usize, CmpExpr)>) -> Result<Theon> {
    let t = builtin_theory(theory)?;
    let peons = peons.into_iter().map(|(k, e)| Ok(Peon::Cmp(Arc::new(Cmp::new(k, e)?)))).collect::<Result<Vec<_>>>()?;
    Theon::new(t, GroundGrid::uniform(m)?, peons)
}

/// Edges with `x{1,2} ≤ p`.
pub fn constant_graphon(p: &Rational) -> Result<Theon> {
    cmp_theon("Graph", resolution(p)?, vec![(2, below(0b11, p))])
}

/// Hyperedges with `x{1,2,3} ≤ p`.
pub fn hypergraphon_hp(p: &Rational) -> Result<Theon> {
    cmp_theon("Hypergraph(3)", resolution(p)?, vec![(3, below(0b111, p))])
}

/// Hyperedges with `max(x{1,2}, x{1,3}, x{2,3}) ≤ p`.
pub fn hypergraphon_hprime(p: &Rational) -> Result<Theon> {
    let e = CmpExpr::And(vec![below(0b011, p), below(0b101, p), below(0b110, p)]);
    cmp_theon("Hypergraph(3)", resolution(p)?, vec![(3, e)])
}

/// The complete `l`-partite graphon with equal parts.
pub fn turan(l: usize) -> Result<Theon> {
    let grid = GroundGrid::uniform(l)?;
    let table = Table::from_fn(2, l, |c| c[0] != c[1])?;
    Theon::new(builtin_theory("Graph")?, grid, vec![Peon::Table(Arc::new(table))])
}

/// `x{1} < x{2}`.
pub fn linorder_std() -> Result<Theon> {
    cmp_theon("LinOrder", 1, vec![(2, CmpExpr::Less { a: 0b01, b: 0b10, strict: true })])
}

/// `x{1} mod 1/k < x{2} mod 1/k`.
pub fn linorder_mod(k: usize) -> Result<Theon> {
    cmp_theon("LinOrder", k, vec![(2, CmpExpr::Frac { a: 0b01, b: 0b10 })])
}

/// Both orders of a permutation theon equal `x{1} < x{2}`, on `m` cells.
pub fn increasing_permuton(m: usize) -> Result<Theon> {
    let lt = CmpExpr::Less { a: 0b01, b: 0b10, strict: true };
    cmp_theon("Perm", m, vec![(2, lt.clone()), (2, lt)])
}

/// The standard permutation theon of a step measure with uniform marginals.
pub fn standard_permuton(mu: &PlanarMeasure) -> Result<Theon> {
    mu.check_uniform_marginals()?;
    let grid = GroundGrid::planar(mu.m, &mu.w, false)?;
    Theon::new(builtin_theory("Perm")?, grid, vec![Peon::Planar { axis: 0 }, Peon::Planar { axis: 1 }])
}

/// The extended-order theon of a step poseton on Lebesgue measure.
pub fn poseton_from_w(w: &PosetonW) -> Result<Theon> {
    check_poseton_w(w)?;
    let m = w.m;
    let grid = GroundGrid::planar(m, &vec![rational::ratio(1, (m * m) as i64); m * m], false)?;
    Theon::new(
        builtin_theory("ExtendedOrder")?,
        grid,
        vec![Peon::Planar { axis: 0 }, Peon::Poseton(Arc::new(w.clone()))],
    )
}

/// Random intervals `[π₁, π₂]` drawn from a step measure on the upper
/// triangle; vertices are adjacent when their intervals meet.
pub fn interval_theon(mu: &PlanarMeasure) -> Result<Theon> {
    let grid = GroundGrid::planar(mu.m, &mu.w, true)?;
    Theon::new(builtin_theory("IntervalGraph")?, grid, vec![Peon::Interval])
}

fn param<T: std::str::FromStr>(name: &str, arg: Option<&str>) -> Result<T> {
    arg.and_then(|a| a.trim().parse().ok()).ok_or_else(|| Error::Invalid(format!("{name} needs a parameter")))
}

fn rparam(name: &str, arg: Option<&str>) -> Result<Rational> {
    arg.and_then(|a| rational::parse(a.trim()))
        .ok_or_else(|| Error::Invalid(format!("{name} needs a rational parameter")))
}

/// Looks up a builtin theon; planar measures and poseton data are passed as
/// their text forms.
pub fn builtin_theon(name: &str, arg: Option<&str>) -> Result<Theon> {
    match name {
        "constant_graphon" => constant_graphon(&rparam(name, arg)?),
        "hypergraphon_Hp" => hypergraphon_hp(&rparam(name, arg)?),
        "hypergraphon_Hprime" => hypergraphon_hprime(&rparam(name, arg)?),
        "turan" => turan(param(name, arg)?),
        "linorder_std" => linorder_std(),
        "linorder_mod" => linorder_mod(param(name, arg)?),
        "increasing" => increasing_permuton(param(name, arg)?),
        "standard_permuton" => standard_permuton(&parse_planar(arg.unwrap_or(""))?),
        "poseton_from_W" => poseton_from_w(&parse_poseton(arg.unwrap_or(""))?),
        "interval_theon" => interval_theon(&parse_planar(arg.unwrap_or(""))?),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

/// A random `m × m` step measure with uniform marginals: a positive
/// combination of permutation matrices.
pub fn random_permuton_grid(m: usize, seed: u64) -> PlanarMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=3);
    let mut counts = vec![0i64; m * m];
    let mut total = 0i64;
    for _ in 0..k {
        let mut sigma: Vec<usize> = (0..m).collect();
        sigma.shuffle(&mut rng);
        let a = rng.gen_range(1..=4);
        total += a;
        for (col, &row) in sigma.iter().enumerate() {
            counts[col * m + row] += a;
        }
    }
    let w = counts.iter().map(|&c| rational::ratio(c, total * m as i64)).collect();
    PlanarMeasure { m, w }
}

/// A random step poseton on the `m × m` grid with values in multiples of
/// `1/m`, closed under the transitivity law.
pub fn random_poseton_w(m: usize, seed: u64) -> PosetonW {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = m * m;
    let col = |c: usize| c / m;
    let mut w = vec![rational::zero(); cells * cells];
    for c1 in 0..cells {
        for c2 in 0..cells {
            if col(c1) <= col(c2) && rng.gen_bool(0.4) {
                w[c1 * cells + c2] = rational::ratio(rng.gen_range(1..=m as i64), m as i64);
            }
        }
    }
    loop {
        let mut changed = false;
        for c1 in 0..cells {
            for c2 in 0..cells {
                for c3 in 0..cells {
                    if col(c1) <= col(c2)
                        && col(c2) <= col(c3)
                        && !w[c1 * cells + c2].is_zero()
                        && !w[c2 * cells + c3].is_zero()
                        && !w[c1 * cells + c3].is_one()
                    {
                        w[c1 * cells + c3] = rational::one();
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    PosetonW::new(m, w).expect("aligned values")
}

/// A random symmetric step graphon on `m` equal cells depending only on
/// the cells of the two vertices.
pub fn random_step_graphon(m: usize, seed: u64) -> Result<Theon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = vec![false; m * m];
    for a in 0..m {
        for b in a..m {
            let e = rng.gen_bool(0.5);
            adj[a * m + b] = e;
            adj[b * m + a] = e;
        }
    }
    let table = Table::from_fn(2, m, |c| adj[c[0] * m + c[1]])?;
    Theon::new(builtin_theory("Graph")?, GroundGrid::uniform(m)?, vec![Peon::Table(Arc::new(table))])
}

/// A random weak linear order on `m` equal cells: either the cells in a
/// random order with the usual order inside each cell, or the order of
/// offsets inside cells.
pub fn random_weak_linorder(m: usize, seed: u64) -> Result<Theon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if rng.gen_bool(0.3) {
        return linorder_mod(m);
    }
    let mut pi: Vec<usize> = (0..m).collect();
    pi.shuffle(&mut rng);
    let q = |j: usize| rational::ratio(j as i64, m as i64);
    let inside = |mask: u32, a: usize| {
        CmpExpr::And(vec![
            CmpExpr::Not(Box::new(CmpExpr::Below { a: mask, q: q(a), strict: true, j: 0 })),
            CmpExpr::Below { a: mask, q: q(a + 1), strict: true, j: 0 },
        ])
    };
    let mut alts = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if pi[a] < pi[b] {
                alts.push(CmpExpr::And(vec![inside(0b01, a), inside(0b10, b)]));
            }
        }
        alts.push(CmpExpr::And(vec![
            inside(0b01, a),
            inside(0b10, a),
            CmpExpr::Less { a: 0b01, b: 0b10, strict: true },
        ]));
    }
    cmp_theon("LinOrder", m, vec![(2, CmpExpr::Or(alts))])
}
