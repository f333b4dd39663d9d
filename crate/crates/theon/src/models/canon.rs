//! Canonical forms and automorphism counts.
//!
//! The encoding lists one bit per tuple, ordered by (largest entry,
//! predicate, lexicographic tuple), so a labeling is built one vertex at a
//! time and compared block by block. Vertices are first split into classes
//! by iterated local invariants; only labelings that list classes in
//! invariant order are explored.

use super::structure::Structure;
use crate::{Error, Result};
use std::cmp::Ordering;
use std::collections::BTreeMap;

pub const MAX_CANON_N: usize = 9;

/// Canonical encoding key: equal iff the structures are isomorphic
/// (for a fixed list of arities).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Code {
    pub n: usize,
    pub bits: Vec<u64>,
}

impl Code {
    pub fn hex(&self) -> String {
        let words: Vec<String> = self.bits.iter().map(|w| format!("{w:016x}")).collect();
        format!("{}:{}", self.n, words.join(""))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoClass {
    pub canonical: Structure,
    pub code: Code,
    pub aut_count: u64,
}

/// Tuple blocks: block `v` lists `(predicate, tuple)` with maximum entry `v`.
fn blocks(n: usize, arities: &[usize]) -> Vec<Vec<(usize, Vec<usize>)>> {
    let mut out = vec![Vec::new(); n];
    for (p, &k) in arities.iter().enumerate() {
        let total = super::structure::pow(n, k);
        for idx in 0..total {
            let mut t = vec![0; k];
            let mut r = idx;
            for i in (0..k).rev() {
                t[i] = r % n;
                r /= n;
            }
            let m = *t.iter().max().unwrap();
            out[m].push((p, t));
        }
    }
    for b in &mut out {
        b.sort();
    }
    out
}

/// Iterated invariant refinement; returns a color per vertex where colors
/// are ranks of labeling-independent signatures.
fn refine(s: &Structure) -> Vec<usize> {
    let n = s.n();
    let mut color = vec![0usize; n];
    let tuples: Vec<(usize, Vec<usize>)> =
        (0..s.num_predicates()).flat_map(|p| s.tuples(p).into_iter().map(move |t| (p, t))).collect();
    let mut classes = 1;
    loop {
        let mut sig: Vec<(usize, Vec<(usize, usize, Vec<usize>)>)> = (0..n).map(|v| (color[v], Vec::new())).collect();
        for (p, t) in &tuples {
            let cols: Vec<usize> = t.iter().map(|&v| color[v]).collect();
            let mut seen = 0u64;
            for &v in t {
                if seen >> v & 1 == 1 {
                    continue;
                }
                seen |= 1 << v;
                let mask = t.iter().enumerate().filter(|&(_, &w)| w == v).fold(0usize, |m, (j, _)| m | 1 << j);
                sig[v].1.push((*p, mask, cols.clone()));
            }
        }
        for s in &mut sig {
            s.1.sort();
        }
        let mut ranks: BTreeMap<&(usize, Vec<(usize, usize, Vec<usize>)>), usize> = BTreeMap::new();
        for s in &sig {
            ranks.insert(s, 0);
        }
        for (i, r) in ranks.values_mut().enumerate() {
            *r = i;
        }
        let new: Vec<usize> = sig.iter().map(|s| ranks[s]).collect();
        let nc = ranks.len();
        color = new;
        if nc == classes {
            return color;
        }
        classes = nc;
    }
}

struct Search<'a> {
    s: &'a Structure,
    blocks: Vec<Vec<(usize, Vec<usize>)>>,
    slots: Vec<usize>,
    color: Vec<usize>,
    inv: Vec<usize>,
    used: Vec<bool>,
    cur: Vec<Vec<bool>>,
    best: Option<Vec<Vec<bool>>>,
    best_inv: Vec<usize>,
    count: u64,
    buf: Vec<usize>,
}

impl Search<'_> {
    fn block_bits(&mut self, d: usize) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.blocks[d].len());
        for (p, t) in &self.blocks[d] {
            self.buf.clear();
            self.buf.extend(t.iter().map(|&i| self.inv[i]));
            out.push(self.s.holds(*p, &self.buf));
        }
        out
    }

    fn dfs(&mut self, d: usize, mut less: bool) -> bool {
        let n = self.s.n();
        if d == n {
            if less || self.best.is_none() {
                self.best = Some(self.cur.clone());
                self.best_inv = self.inv.clone();
                self.count = 1;
                return true;
            }
            self.count += 1;
            return false;
        }
        let mut updated = false;
        for old in 0..n {
            if self.used[old] || self.color[old] != self.slots[d] {
                continue;
            }
            self.inv[d] = old;
            let b = self.block_bits(d);
            let ord = match &self.best {
                None => Ordering::Less,
                Some(_) if less => Ordering::Less,
                Some(best) => b.cmp(&best[d]),
            };
            if ord == Ordering::Greater {
                continue;
            }
            self.cur[d] = b;
            self.used[old] = true;
            if self.dfs(d + 1, ord == Ordering::Less) {
                updated = true;
                less = false;
            }
            self.used[old] = false;
        }
        updated
    }
}

/// Returns `(perm, aut_count)` where `perm[old] = new` relabels `s` into
/// canonical form.
pub fn canonical_labeling(s: &Structure) -> Result<(Vec<usize>, u64)> {
    let n = s.n();
    if n > MAX_CANON_N {
        return Err(Error::TooLarge(format!("canonical form limited to {MAX_CANON_N} vertices, got {n}")));
    }
    if n == 0 {
        return Ok((vec![], 1));
    }
    let color = refine(s);
    let mut slots: Vec<usize> = color.clone();
    slots.sort_unstable();
    let mut search = Search {
        s,
        blocks: blocks(n, s.arities()),
        slots,
        color,
        inv: vec![0; n],
        used: vec![false; n],
        cur: vec![Vec::new(); n],
        best: None,
        best_inv: vec![],
        count: 0,
        buf: Vec::new(),
    };
    search.dfs(0, true);
    let mut perm = vec![0; n];
    for (new, &old) in search.best_inv.iter().enumerate() {
        perm[old] = new;
    }
    Ok((perm, search.count))
}

/// Packs the block encoding of `s` (taken as already labeled) into a code.
pub fn encode(s: &Structure) -> Code {
    let n = s.n();
    let mut bits: Vec<u64> = Vec::new();
    let mut len = 0usize;
    for block in blocks(n, s.arities()) {
        for (p, t) in block {
            if len.is_multiple_of(64) {
                bits.push(0);
            }
            if s.holds(p, &t) {
                let w = len / 64;
                bits[w] |= 1u64 << (63 - len % 64);
            }
            len += 1;
        }
    }
    Code { n, bits }
}

pub fn canonical_form(s: &Structure) -> Result<IsoClass> {
    let (perm, aut_count) = canonical_labeling(s)?;
    let canonical = s.relabel(&perm);
    let code = encode(&canonical);
    Ok(IsoClass { canonical, code, aut_count })
}

pub fn canonical_code(s: &Structure) -> Result<Code> {
    Ok(canonical_form(s)?.code)
}

pub fn isomorphic(a: &Structure, b: &Structure) -> Result<bool> {
    Ok(a.n() == b.n() && a.arities() == b.arities() && canonical_code(a)? == canonical_code(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn brute_aut(s: &Structure) -> u64 {
        perms(s.n()).iter().filter(|p| s.relabel(p) == *s).count() as u64
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> Structure {
        let mut s = Structure::empty(n, &[2]);
        for &(a, b) in edges {
            s.set(0, &[a, b], true);
            s.set(0, &[b, a], true);
        }
        s
    }

    #[test]
    fn automorphisms_of_small_structures() {
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(canonical_form(&p3).unwrap().aut_count, 2);
        assert_eq!(brute_aut(&p3), 2);
        let mut c3 = Structure::empty(3, &[2]);
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            c3.set(0, &[a, b], true);
        }
        assert_eq!(canonical_form(&c3).unwrap().aut_count, 3);
        let k2 = graph(2, &[(0, 1)]);
        assert_eq!(canonical_form(&k2).unwrap().aut_count, 2);
    }

    #[test]
    fn invariant_under_relabeling() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 3), (1, 4)]);
        let c = canonical_code(&g).unwrap();
        for p in perms(5).iter().step_by(7) {
            assert_eq!(canonical_code(&g.relabel(p)).unwrap(), c);
        }
        assert_eq!(canonical_form(&g).unwrap().aut_count, brute_aut(&g));
    }

    #[test]
    fn rejects_large() {
        assert!(canonical_form(&Structure::empty(10, &[2])).is_err());
    }
}
