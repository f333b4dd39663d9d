use crate::logic::{Compiled, Language, Theory};
use crate::{Error, Result};
use fixedbitset::FixedBitSet;

/// A finite labeled structure on vertices `0..n` (printed 1-based).
///
/// Relation `p` is a bit set over `[n]^k` indexed by `Σ t_i n^(k-1-i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    n: usize,
    arities: Vec<usize>,
    rels: Vec<FixedBitSet>,
}

pub(crate) fn pow(n: usize, k: usize) -> usize {
    n.checked_pow(k as u32).expect("relation size overflow")
}

impl Structure {
    pub fn empty(n: usize, arities: &[usize]) -> Structure {
        let rels = arities.iter().map(|&k| FixedBitSet::with_capacity(pow(n, k))).collect();
        Structure { n, arities: arities.to_vec(), rels }
    }

    pub fn for_language(n: usize, lang: &Language) -> Structure {
        Structure::empty(n, &lang.arities())
    }

    /// Builds a structure from 0-based tuples per predicate.
    pub fn from_tuples(n: usize, arities: &[usize], tuples: &[Vec<Vec<usize>>]) -> Result<Structure> {
        let mut s = Structure::empty(n, arities);
        for (p, ts) in tuples.iter().enumerate() {
            for t in ts {
                if t.len() != arities[p] {
                    return Err(Error::Arity { symbol: format!("#{p}"), expected: arities[p], found: t.len() });
                }
                if let Some(&v) = t.iter().find(|&&v| v >= n) {
                    return Err(Error::VertexRange { vertex: v + 1, n });
                }
                s.set(p, t, true);
            }
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn num_predicates(&self) -> usize {
        self.arities.len()
    }

    pub fn relation(&self, p: usize) -> &FixedBitSet {
        &self.rels[p]
    }

    pub fn index(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &v| acc * self.n + v)
    }

    pub fn decode(&self, mut idx: usize, k: usize) -> Vec<usize> {
        let mut t = vec![0; k];
        for i in (0..k).rev() {
            t[i] = idx % self.n;
            idx /= self.n;
        }
        t
    }

    pub fn holds(&self, p: usize, t: &[usize]) -> bool {
        self.rels[p].contains(self.index(t))
    }

    pub fn set(&mut self, p: usize, t: &[usize], v: bool) {
        let i = self.index(t);
        self.rels[p].set(i, v);
    }

    /// Tuples of relation `p` in increasing index (lexicographic) order.
    pub fn tuples(&self, p: usize) -> Vec<Vec<usize>> {
        let k = self.arities[p];
        self.rels[p].ones().map(|i| self.decode(i, k)).collect()
    }

    pub fn count(&self, p: usize) -> usize {
        self.rels[p].count_ones(..)
    }

    /// True if some stored tuple repeats an entry.
    pub fn has_repeated_tuple(&self) -> bool {
        (0..self.arities.len()).any(|p| {
            self.tuples(p).iter().any(|t| {
                let mut u = t.clone();
                u.sort_unstable();
                u.windows(2).any(|w| w[0] == w[1])
            })
        })
    }

    /// The induced substructure on `vs`, relabeled order-preservingly.
    pub fn induced(&self, vs: &[usize]) -> Result<Structure> {
        if let Some(&v) = vs.iter().find(|&&v| v >= self.n) {
            return Err(Error::VertexRange { vertex: v + 1, n: self.n });
        }
        let mut sorted = vs.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        Ok(self.pullback(&sorted))
    }

    /// Structure on `map.len()` vertices where vertex `i` stands for `map[i]`.
    pub fn pullback(&self, map: &[usize]) -> Structure {
        let m = map.len();
        let mut out = Structure::empty(m, &self.arities);
        for p in 0..self.arities.len() {
            let k = self.arities[p];
            let total = pow(m, k);
            let mut t = vec![0usize; k];
            let mut img = vec![0usize; k];
            for idx in 0..total {
                let mut r = idx;
                for i in (0..k).rev() {
                    t[i] = r % m;
                    r /= m;
                }
                for i in 0..k {
                    img[i] = map[t[i]];
                }
                if self.holds(p, &img) {
                    out.rels[p].insert(idx);
                }
            }
        }
        out
    }

    /// Renames old vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Structure {
        let mut inv = vec![0; self.n];
        for (v, &w) in perm.iter().enumerate() {
            inv[w] = v;
        }
        self.pullback(&inv)
    }

    /// Adds one isolated vertex (new vertex `n`, no tuples through it).
    pub fn extend_by_one(&self) -> Structure {
        let mut out = Structure::empty(self.n + 1, &self.arities);
        for p in 0..self.arities.len() {
            for t in self.tuples(p) {
                out.set(p, &t, true);
            }
        }
        out
    }

    pub fn satisfies(&self, f: &Compiled, asg: &[usize]) -> bool {
        f.body.eval(asg, &mut |p, t| self.holds(p, t))
    }

    /// Whether every axiom holds under all assignments.
    pub fn is_model(&self, t: &Theory) -> bool {
        if t.language.arities() != self.arities {
            return false;
        }
        t.compiled_axioms().iter().all(|a| self.satisfies_all(a))
    }

    /// First assignment falsifying `f`, if any.
    pub fn find_violation(&self, f: &Compiled) -> Option<Vec<usize>> {
        let k = f.nvars();
        if self.n == 0 {
            return if k == 0 && !self.satisfies(f, &[]) { Some(vec![]) } else { None };
        }
        let mut asg = vec![0usize; k];
        loop {
            if !self.satisfies(f, &asg) {
                return Some(asg);
            }
            let mut i = k;
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                asg[i] += 1;
                if asg[i] < self.n {
                    break;
                }
                asg[i] = 0;
            }
        }
    }

    pub fn satisfies_all(&self, f: &Compiled) -> bool {
        self.find_violation(f).is_none()
    }

    /// Complement of every relation on tuples with pairwise distinct entries.
    pub fn complement(&self) -> Structure {
        let mut out = self.clone();
        for p in 0..self.arities.len() {
            let k = self.arities[p];
            for idx in 0..pow(self.n, k) {
                let t = self.decode(idx, k);
                if distinct(&t) {
                    out.rels[p].toggle(idx);
                }
            }
        }
        out
    }

    /// Disjoint-union-of-languages view: relations of `self` followed by `other`'s.
    pub fn concat(&self, other: &Structure) -> Result<Structure> {
        if self.n != other.n {
            return Err(Error::Invalid("vertex counts differ".into()));
        }
        let mut arities = self.arities.clone();
        arities.extend_from_slice(&other.arities);
        let mut rels = self.rels.clone();
        rels.extend(other.rels.iter().cloned());
        Ok(Structure { n: self.n, arities, rels })
    }

    /// Keeps only the relations listed in `preds`, in that order.
    pub fn project(&self, preds: &[usize]) -> Structure {
        Structure {
            n: self.n,
            arities: preds.iter().map(|&p| self.arities[p]).collect(),
            rels: preds.iter().map(|&p| self.rels[p].clone()).collect(),
        }
    }

    /// Whether every tuple of `self` is a tuple of `other` (same vertex set).
    pub fn is_subset_of(&self, other: &Structure) -> bool {
        self.n == other.n
            && self.arities == other.arities
            && self.rels.iter().zip(&other.rels).all(|(a, b)| a.is_subset(b))
    }

    pub(crate) fn rel_mut(&mut self, p: usize) -> &mut FixedBitSet {
        &mut self.rels[p]
    }
}

pub fn distinct(t: &[usize]) -> bool {
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            if t[i] == t[j] {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Structure {
        Structure::from_tuples(3, &[2], &[vec![vec![0, 1], vec![1, 0], vec![1, 2], vec![2, 1]]]).unwrap()
    }

    #[test]
    fn endpoints_of_path_are_independent() {
        let s = path3().induced(&[0, 2]).unwrap();
        assert_eq!(s.n(), 2);
        assert_eq!(s.count(0), 0);
    }

    #[test]
    fn induced_full_and_empty() {
        let p = path3();
        assert_eq!(p.induced(&[0, 1, 2]).unwrap(), p);
        assert_eq!(p.induced(&[]).unwrap().n(), 0);
        assert!(matches!(p.induced(&[3]), Err(Error::VertexRange { .. })));
    }

    #[test]
    fn relabel_round_trip() {
        let p = path3();
        let q = p.relabel(&[2, 0, 1]);
        assert!(q.holds(0, &[2, 0]));
        assert_eq!(q.relabel(&[1, 2, 0]), p);
    }
}
