//! Exact measures of events over `E_n` by enumerating cells of the involved
//! coordinates and, where peons compare offsets, the relative order of the
//! offsets (each order of `t` free uniform offsets inside one gap of length
//! `ℓ` has probability `ℓ^t / t!`).

use super::grid::{coordinate_index, image_mask, Coord, OFF_ONE};
use super::peon::{Linking, Use};
use super::theon::Theon;
use crate::guard::Guard;
use crate::rational::{self, Rational};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Boolean combination of membership atoms.
#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Const(bool),
    Atom(usize),
    Not(Box<Event>),
    And(Vec<Event>),
    Or(Vec<Event>),
}

impl Event {
    pub fn eval3(&self, vals: &[Option<bool>]) -> Option<bool> {
        match self {
            Event::Const(b) => Some(*b),
            Event::Atom(i) => vals[*i],
            Event::Not(e) => e.eval3(vals).map(|b| !b),
            Event::And(es) => {
                let mut unknown = false;
                for e in es {
                    match e.eval3(vals) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        _ => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            Event::Or(es) => {
                let mut unknown = false;
                for e in es {
                    match e.eval3(vals) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        _ => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
        }
    }
}

/// `P(v_1, …, v_k)` for distinct vertices `v_i` of `[n]` (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventAtom {
    pub pred: usize,
    pub args: Vec<usize>,
}

/// An event over `E_n`, with some coordinates fixed to given points and
/// some restricted to a single cell.
#[derive(Debug, Clone)]
pub struct Query {
    pub n: usize,
    pub atoms: Vec<EventAtom>,
    pub event: Event,
    pub fixed: Vec<(u32, Coord)>,
    pub restrict: Vec<(u32, usize)>,
}

impl Query {
    pub fn new(n: usize, atoms: Vec<EventAtom>, event: Event) -> Query {
        Query { n, atoms, event, fixed: Vec::new(), restrict: Vec::new() }
    }
}

pub const DEFAULT_OFF: [u128; 2] = [OFF_ONE / 3, 2 * (OFF_ONE / 3)];

/// Maximal number of offsets ordered jointly in one group.
pub const MAX_ORDERED: usize = 8;

struct AtomInfo {
    /// Coordinate of `E_n` for every position of the peon's point.
    coords: Vec<u32>,
    uses: Vec<Use>,
    ready: usize,
    deferred: bool,
}

struct Engine<'a> {
    theon: &'a Theon,
    q: &'a Query,
    info: Vec<AtomInfo>,
    free: Vec<u32>,
    choices: Vec<Vec<usize>>,
    by_depth: Vec<Vec<usize>>,
    deferred: Vec<usize>,
    offset_free: Vec<u32>,
    fixed: Vec<Option<Coord>>,
    linking: Linking,
    guard: Guard,
}

impl<'a> Engine<'a> {
    fn new(theon: &'a Theon, q: &'a Query) -> Result<Engine<'a>> {
        let n = q.n;
        if n > 16 {
            return Err(Error::TooLarge(format!("{n} vertices")));
        }
        let mut fixed = vec![None; 1 << n];
        for (m, c) in &q.fixed {
            fixed[*m as usize] = Some(*c);
        }
        let mut free: Vec<u32> = Vec::new();
        let mut offset_free: Vec<u32> = Vec::new();
        let mut info = Vec::with_capacity(q.atoms.len());
        for a in &q.atoms {
            let peon = &theon.peons[a.pred];
            if a.args.len() != peon.arity() || a.args.iter().any(|&v| v >= n) {
                return Err(Error::Invalid("malformed event atom".into()));
            }
            let uses = peon.uses();
            let coords: Vec<u32> = coordinate_index(a.args.len()).iter().map(|&m| image_mask(m, &a.args)).collect();
            for (&c, &u) in coords.iter().zip(&uses) {
                if u != Use::Unused && fixed[c as usize].is_none() {
                    if !free.contains(&c) {
                        free.push(c);
                    }
                    if u == Use::Offset && !offset_free.contains(&c) {
                        offset_free.push(c);
                    }
                }
            }
            info.push(AtomInfo { coords, uses, ready: 0, deferred: false });
        }
        for inf in &mut info {
            for (&c, &u) in inf.coords.iter().zip(&inf.uses) {
                if u == Use::Unused || fixed[c as usize].is_some() {
                    continue;
                }
                let d = free.iter().position(|&f| f == c).expect("free coordinate") + 1;
                inf.ready = inf.ready.max(d);
                if u == Use::Offset {
                    inf.deferred = true;
                }
            }
        }
        let cells = theon.grid.len();
        let choices = free
            .iter()
            .map(|m| match q.restrict.iter().find(|(r, _)| r == m) {
                Some((_, c)) => vec![*c],
                None => (0..cells).collect(),
            })
            .collect();
        let mut by_depth = vec![Vec::new(); free.len() + 1];
        let mut deferred = Vec::new();
        for (i, inf) in info.iter().enumerate() {
            if inf.deferred {
                deferred.push(i);
            } else {
                by_depth[inf.ready].push(i);
            }
        }
        Ok(Engine {
            theon,
            q,
            info,
            free,
            choices,
            by_depth,
            deferred,
            offset_free,
            fixed,
            linking: theon.linking(),
            guard: Guard::new(),
        })
    }

    fn point(&self, atom: usize, cells: &[u32], offs: &BTreeMap<u32, [u128; 2]>) -> Vec<Coord> {
        let inf = &self.info[atom];
        inf.coords
            .iter()
            .map(|&c| {
                if let Some(x) = self.fixed[c as usize] {
                    return x;
                }
                let cell = self.free.iter().position(|&f| f == c).map(|i| cells[i]).unwrap_or(0);
                let off = offs.get(&c).copied().unwrap_or(DEFAULT_OFF);
                Coord { cell, off }
            })
            .collect()
    }

    fn eval_atoms(&self, list: &[usize], cells: &[u32], offs: &BTreeMap<u32, [u128; 2]>, vals: &mut [Option<bool>]) {
        for &a in list {
            let x = self.point(a, cells, offs);
            vals[a] = Some(self.theon.peons[self.q.atoms[a].pred].member(&self.theon.grid, &x));
        }
    }

    fn run(&self) -> Result<Rational> {
        let mut vals = vec![None; self.info.len()];
        self.eval_atoms(&self.by_depth[0], &[], &BTreeMap::new(), &mut vals);
        match self.q.event.eval3(&vals) {
            Some(b) => return Ok(if b { rational::one() } else { rational::zero() }),
            None if self.free.is_empty() => return self.leaf(&[], &vals),
            None => {}
        }
        let parts: Vec<Result<Rational>> = self.choices[0]
            .par_iter()
            .map(|&c| {
                let mut cells = vec![c as u32];
                let mut v = vals.clone();
                let w = self.theon.grid.cells[c].weight.clone();
                self.dfs(1, w, &mut cells, &mut v)
            })
            .collect();
        let mut total = rational::zero();
        for p in parts {
            total += p?;
        }
        Ok(total / self.restricted_mass())
    }

    /// Mass of the cells that restricted coordinates are confined to.
    fn restricted_mass(&self) -> Rational {
        let mut mass = rational::one();
        for (m, c) in &self.q.restrict {
            if self.free.contains(m) {
                mass *= &self.theon.grid.cells[*c].weight;
            }
        }
        mass
    }

    fn dfs(
        &self,
        depth: usize,
        weight: Rational,
        cells: &mut Vec<u32>,
        vals: &mut Vec<Option<bool>>,
    ) -> Result<Rational> {
        self.guard.tick(1)?;
        self.eval_atoms(&self.by_depth[depth], cells, &BTreeMap::new(), vals);
        match self.q.event.eval3(vals) {
            Some(true) => return Ok(weight),
            Some(false) => return Ok(rational::zero()),
            None => {}
        }
        if depth == self.free.len() {
            return Ok(weight * self.leaf(cells, vals)?);
        }
        let mut total = rational::zero();
        for &c in &self.choices[depth] {
            cells.push(c as u32);
            let mut v = vals.clone();
            let w = &weight * &self.theon.grid.cells[c].weight;
            total += self.dfs(depth + 1, w, cells, &mut v)?;
            cells.pop();
        }
        Ok(total)
    }

    fn group_key(&self, cell: u32, axis: usize) -> (usize, usize) {
        let pos = self.theon.grid.cells[cell as usize].pos[axis];
        match self.linking {
            Linking::All => (0, 0),
            Linking::Line => (pos, 0),
            Linking::PerAxis => (pos, axis),
        }
    }

    /// Conditional probability of the event given all cells, by ordering
    /// the free offsets that deferred atoms look at.
    fn leaf(&self, cells: &[u32], vals: &[Option<bool>]) -> Result<Rational> {
        let dims = self.theon.grid.dims;
        let mut groups: BTreeMap<(usize, usize), (Vec<(u32, usize)>, Vec<u128>)> = BTreeMap::new();
        for &m in &self.offset_free {
            let i = self.free.iter().position(|&f| f == m).expect("free");
            for axis in 0..dims {
                groups.entry(self.group_key(cells[i], axis)).or_default().0.push((m, axis));
            }
        }
        for (m, x) in &self.q.fixed {
            let used = self.info.iter().any(|inf| inf.coords.contains(m));
            if !used {
                continue;
            }
            for axis in 0..dims {
                if let Some(g) = groups.get_mut(&self.group_key(x.cell, axis)) {
                    g.1.push(x.off[axis]);
                }
            }
        }
        let mut per_group: Vec<(Vec<(u32, usize)>, Vec<(Vec<u128>, Rational)>)> = Vec::new();
        for (_, (vars, bps)) in groups {
            if vars.len() > MAX_ORDERED {
                return Err(Error::TooLarge(format!("{} offsets ordered jointly", vars.len())));
            }
            per_group.push((vars.clone(), arrangements(vars.len(), bps)));
        }
        let tri: Vec<u32> = self
            .offset_free
            .iter()
            .copied()
            .filter(|m| {
                let i = self.free.iter().position(|f| f == m).expect("free");
                self.theon.grid.cells[cells[i] as usize].tri
            })
            .collect();
        let tri_factor = Rational::from_integer(BigInt::from(1u64 << tri.len()));
        let mut total = rational::zero();
        let mut offs: BTreeMap<u32, [u128; 2]> = BTreeMap::new();
        let mut idx = vec![0usize; per_group.len()];
        loop {
            self.guard.tick(1)?;
            let mut w = rational::one();
            offs.clear();
            for (g, (vars, arr)) in per_group.iter().enumerate() {
                let (values, wg) = &arr[idx[g]];
                w *= wg;
                for (&(m, axis), &v) in vars.iter().zip(values) {
                    offs.entry(m).or_insert(DEFAULT_OFF)[axis] = v;
                }
            }
            let tri_ok = tri.iter().all(|m| {
                let o = offs[m];
                o[0] < o[1]
            });
            if tri_ok && !w.is_zero() {
                let mut v = vals.to_vec();
                self.eval_atoms(&self.deferred, cells, &offs, &mut v);
                if self.q.event.eval3(&v) == Some(true) {
                    total += w;
                }
            }
            let mut g = 0;
            loop {
                if g == per_group.len() {
                    return Ok(total * &tri_factor);
                }
                idx[g] += 1;
                if idx[g] < per_group[g].1.len() {
                    break;
                }
                idx[g] = 0;
                g += 1;
            }
        }
    }
}

/// All ways to place `r` free uniform variables relative to fixed
/// breakpoints, with representative values and probabilities.
pub fn arrangements(r: usize, mut breakpoints: Vec<u128>) -> Vec<(Vec<u128>, Rational)> {
    breakpoints.push(0);
    breakpoints.push(OFF_ONE);
    breakpoints.sort_unstable();
    breakpoints.dedup();
    let gaps: Vec<(u128, u128)> = breakpoints.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect();
    let one = Rational::from_integer(BigInt::from(OFF_ONE));
    let lens: Vec<Rational> = gaps.iter().map(|(a, b)| Rational::from_integer(BigInt::from(b - a)) / &one).collect();
    let mut out = Vec::new();
    let perms = crate::combin::permutations(r);
    let mut seq = vec![0usize; r];
    loop {
        let mut counts = vec![0usize; gaps.len()];
        for &g in &seq {
            counts[g] += 1;
        }
        let mut w = rational::one();
        for (g, &k) in counts.iter().enumerate() {
            if k > 0 {
                w *= num_traits::pow(lens[g].clone(), k);
                w /= Rational::from_integer(rational::factorial(k));
            }
        }
        for perm in &perms {
            let mut values = vec![0u128; r];
            let mut seen = vec![0usize; gaps.len()];
            for (slot, &var) in perm.iter().enumerate() {
                let g = seq[slot];
                seen[g] += 1;
                let (lo, hi) = gaps[g];
                values[var] = lo + (hi - lo) / (counts[g] as u128 + 1) * seen[g] as u128;
            }
            out.push((values, w.clone()));
        }
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if seq[i] + 1 < gaps.len() {
                seq[i] += 1;
                for j in i + 1..r {
                    seq[j] = seq[i];
                }
                break;
            }
        }
    }
}

/// The exact probability of the query's event.
pub fn measure(theon: &Theon, q: &Query) -> Result<Rational> {
    Engine::new(theon, q)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrangement_weights_sum_to_one() {
        for (r, bps) in
            [(0, vec![]), (1, vec![]), (3, vec![]), (2, vec![OFF_ONE / 4]), (3, vec![OFF_ONE / 4, OFF_ONE / 2])]
        {
            let arr = arrangements(r, bps);
            let total: Rational = arr.iter().map(|(_, w)| w.clone()).sum();
            assert_eq!(total, rational::one(), "r = {r}");
        }
        assert_eq!(arrangements(3, vec![]).len(), 6);
    }
}
