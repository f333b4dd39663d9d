//! Exact densities `p`, `t_ind`, `t_inj` between finite structures,
//! multi-densities, and Möbius inversion between induced and non-induced
//! densities.

use crate::combin::{binomial, factorial, falling};
use crate::guard::Guard;
use crate::logic::sat::{self, Cnf, Ground};
use crate::logic::Theory;
use crate::models::{canonical_code, canonical_form, Code, Structure};
use crate::rational::{int, zero};
use crate::{Error, Rational, Result};
use num_bigint::BigInt;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DensityKind {
    P,
    Ind,
    Inj,
}

impl FromStr for DensityKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p" | "P" => Ok(DensityKind::P),
            "ind" | "IND" => Ok(DensityKind::Ind),
            "inj" | "INJ" => Ok(DensityKind::Inj),
            _ => Err(Error::Invalid(format!("unknown density kind {s}"))),
        }
    }
}

impl fmt::Display for DensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DensityKind::P => "p",
            DensityKind::Ind => "ind",
            DensityKind::Inj => "inj",
        })
    }
}

/// Constraints checked when pattern vertex `i` is placed: every
/// `(predicate, pattern tuple, required value)` whose largest entry is `i`.
struct Pattern {
    m: usize,
    checks: Vec<Vec<(usize, Vec<usize>, bool)>>,
}

impl Pattern {
    /// One part per structure, placed on consecutive pattern vertices.
    fn new(parts: &[&Structure], induced: bool) -> Pattern {
        let m: usize = parts.iter().map(|s| s.n()).sum();
        let mut checks = vec![Vec::new(); m];
        let mut offset = 0;
        for s in parts {
            for (p, &k) in s.arities().iter().enumerate() {
                for idx in 0..s.n().pow(k as u32) {
                    let t = s.decode(idx, k);
                    let val = s.holds(p, &t);
                    if !induced && !val {
                        continue;
                    }
                    let shifted: Vec<usize> = t.iter().map(|v| v + offset).collect();
                    let top = *shifted.iter().max().unwrap();
                    checks[top].push((p, shifted, val));
                }
            }
            offset += s.n();
        }
        Pattern { m, checks }
    }

    fn extend(&self, host: &Structure, img: &mut Vec<usize>, used: &mut [bool]) -> u128 {
        let i = img.len();
        if i == self.m {
            return 1;
        }
        let mut total = 0;
        let mut buf = Vec::new();
        for v in 0..host.n() {
            if used[v] {
                continue;
            }
            img.push(v);
            let ok = self.checks[i].iter().all(|(p, t, want)| {
                buf.clear();
                buf.extend(t.iter().map(|&u| img[u]));
                host.holds(*p, &buf) == *want
            });
            if ok {
                used[v] = true;
                total += self.extend(host, img, used);
                used[v] = false;
            }
            img.pop();
        }
        total
    }

    fn count(&self, host: &Structure) -> u128 {
        if self.m == 0 {
            return 1;
        }
        if self.m > host.n() {
            return 0;
        }
        (0..host.n())
            .into_par_iter()
            .map(|v| {
                let mut img = vec![v];
                if !self.checks[0].iter().all(|(p, t, want)| {
                    let u: Vec<usize> = t.iter().map(|&x| img[x]).collect();
                    host.holds(*p, &u) == *want
                }) {
                    return 0;
                }
                let mut used = vec![false; host.n()];
                used[v] = true;
                self.extend(host, &mut img, &mut used)
            })
            .sum()
    }
}

fn same_language(m: &Structure, n: &Structure) -> Result<()> {
    if m.arities() != n.arities() {
        return Err(Error::LanguageMismatch(format!("arities {:?} vs {:?}", m.arities(), n.arities())));
    }
    Ok(())
}

/// Number of injections `V(M) → V(N)` that are induced embeddings.
pub fn count_induced(m: &Structure, n: &Structure) -> Result<u128> {
    same_language(m, n)?;
    Ok(Pattern::new(&[m], true).count(n))
}

/// Number of injections that map every tuple of `M` to a tuple of `N`.
pub fn count_positive(m: &Structure, n: &Structure) -> Result<u128> {
    same_language(m, n)?;
    Ok(Pattern::new(&[m], false).count(n))
}

fn q(num: u128, den: u128) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn density(kind: DensityKind, m: &Structure, n: &Structure) -> Result<Rational> {
    same_language(m, n)?;
    let (a, b) = (m.n(), n.n());
    if a > b {
        return Ok(zero());
    }
    Ok(match kind {
        DensityKind::Ind => q(count_induced(m, n)?, falling(b, a)),
        DensityKind::Inj => q(count_positive(m, n)?, falling(b, a)),
        DensityKind::P => {
            let aut = canonical_form(m)?.aut_count as u128;
            q(count_induced(m, n)?, binomial(b, a) * aut)
        }
    })
}

/// Probability that uniformly random pairwise disjoint vertex sets of sizes
/// `|V(M_i)|` induce copies of the `M_i`.
pub fn multi_density(ms: &[Structure], n: &Structure) -> Result<Rational> {
    for m in ms {
        same_language(m, n)?;
    }
    let total: usize = ms.iter().map(|m| m.n()).sum();
    if total > n.n() {
        return Ok(zero());
    }
    let parts: Vec<&Structure> = ms.iter().collect();
    let count = Pattern::new(&parts, true).count(n);
    let mut den = factorial(n.n()) / factorial(n.n() - total);
    for m in ms {
        den /= factorial(m.n());
    }
    for m in ms {
        den *= canonical_form(m)?.aut_count as u128;
    }
    Ok(q(count, den))
}

/// Labeled models of `t` on `V(lo)` containing `lo` and contained in `hi`
/// (no upper bound when `hi` is `None`).
pub fn interval(t: &Theory, lo: &Structure, hi: Option<&Structure>) -> Result<Vec<Structure>> {
    if let Some(h) = hi {
        if h.n() != lo.n() || h.arities() != lo.arities() {
            return Err(Error::Invalid("structures must share the vertex set".into()));
        }
        if !lo.is_subset_of(h) {
            return Ok(vec![]);
        }
    }
    if lo.arities() != t.language.arities().as_slice() {
        return Err(Error::LanguageMismatch("structure does not match theory".into()));
    }
    let n = lo.n();
    let mut var_of: Vec<Vec<i64>> = Vec::new();
    let mut free = Vec::new();
    for (p, &k) in lo.arities().iter().enumerate() {
        let mut slots = vec![-1i64; n.pow(k as u32)];
        for (idx, slot) in slots.iter_mut().enumerate() {
            let open = !lo.relation(p).contains(idx) && hi.is_none_or(|h| h.relation(p).contains(idx));
            if open {
                *slot = free.len() as i64;
                free.push((p, idx));
            }
        }
        var_of.push(slots);
    }
    let guard = Guard::new();
    let mut cnf = Cnf::new(free.len());
    for a in t.compiled_axioms() {
        let k = a.nvars();
        let total = n.pow(k as u32);
        guard.tick(total as u64)?;
        let mut asg = vec![0usize; k];
        for idx in 0..total {
            let mut r = idx;
            for i in (0..k).rev() {
                asg[i] = r % n;
                r /= n;
            }
            let prop = sat::ground(&a.body, &asg, &mut |p, tup| {
                let i = lo.index(tup);
                match var_of[p][i] {
                    -1 => Ground::Known(lo.relation(p).contains(i)),
                    v => Ground::Var(v as u32),
                }
            });
            cnf.add_prop(&prop)?;
        }
    }
    let mut out = Vec::new();
    sat::for_each_model(&cnf, &guard, &mut |sol| {
        let mut s = lo.clone();
        for (v, &(p, idx)) in free.iter().enumerate() {
            if sol[v] {
                let t = s.decode(idx, s.arities()[p]);
                s.set(p, &t, true);
            }
        }
        out.push(s);
        false
    })?;
    Ok(out)
}

fn size(s: &Structure) -> usize {
    (0..s.num_predicates()).map(|p| s.count(p)).sum()
}

/// Möbius function of the poset of labeled models of `t` on a fixed vertex
/// set ordered by inclusion.
pub fn mobius(t: &Theory, m: &Structure, m2: &Structure) -> Result<Rational> {
    if m.n() != m2.n() {
        return Err(Error::Invalid("vertex sets differ".into()));
    }
    if !m.is_subset_of(m2) {
        return Ok(zero());
    }
    let mut elems = interval(t, m, Some(m2))?;
    elems.sort_by_key(size);
    let mut mu: Vec<i64> = Vec::with_capacity(elems.len());
    for (i, k) in elems.iter().enumerate() {
        let v = if k == m {
            1
        } else {
            -(0..i).filter(|&j| elems[j].is_subset_of(k) && elems[j] != *k).map(|j| mu[j]).sum::<i64>()
        };
        mu.push(v);
    }
    Ok(elems.iter().position(|k| k == m2).map_or(zero(), |i| int(mu[i])))
}

/// Iso-class densities at one level, keyed by canonical code.
pub type DensityTable = BTreeMap<Code, Rational>;

/// `t_inj(M, N) = Σ_{M' ⊇ M} t_ind(M', N)` with `t_ind` read from `table`.
pub fn tinj_from_tind(t: &Theory, m: &Structure, table: &DensityTable) -> Result<Rational> {
    let mut sum = zero();
    for k in interval(t, m, None)? {
        let c = canonical_code(&k)?;
        let v = table.get(&c).ok_or_else(|| Error::IncompleteTable(c.hex()))?;
        sum += v;
    }
    Ok(sum)
}

/// `t_ind(M, N) = Σ_{M' ⊇ M} μ(M, M') t_inj(M', N)` with `t_inj` read from `table`.
pub fn tind_from_tinj(t: &Theory, m: &Structure, table: &DensityTable) -> Result<Rational> {
    let mut elems = interval(t, m, None)?;
    elems.sort_by_key(size);
    let mut mu: Vec<i64> = Vec::with_capacity(elems.len());
    let mut sum = zero();
    for (i, k) in elems.iter().enumerate() {
        let v = if k == m {
            1
        } else {
            -(0..i).filter(|&j| elems[j].is_subset_of(k) && elems[j] != *k).map(|j| mu[j]).sum::<i64>()
        };
        mu.push(v);
        if v != 0 {
            let c = canonical_code(k)?;
            let d = table.get(&c).ok_or_else(|| Error::IncompleteTable(c.hex()))?;
            sum += d * int(v);
        }
    }
    Ok(sum)
}

/// `kind` densities of every model of `t` on `level` vertices in `n`.
pub fn density_table(t: &Theory, level: usize, kind: DensityKind, n: &Structure) -> Result<DensityTable> {
    let classes = crate::models::enumerate_models(t, level)?;
    classes.iter().map(|c| Ok((c.code.clone(), density(kind, &c.canonical, n)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::builtin_theory;
    use crate::models::named_model;
    use crate::rational::ratio;

    fn nm(s: &str) -> Structure {
        named_model(s).unwrap().1
    }

    #[test]
    fn graph_values() {
        assert_eq!(density(DensityKind::P, &nm("K2"), &nm("P3")).unwrap(), ratio(2, 3));
        assert_eq!(density(DensityKind::Ind, &nm("P3"), &nm("P4")).unwrap(), ratio(1, 6));
        assert_eq!(density(DensityKind::Inj, &nm("P3"), &nm("K5")).unwrap(), ratio(1, 1));
        assert_eq!(density(DensityKind::P, &nm("K5"), &nm("K3")).unwrap(), zero());
    }

    #[test]
    fn self_density_is_aut_over_factorial() {
        let p4 = nm("P4");
        assert_eq!(density(DensityKind::Ind, &p4, &p4).unwrap(), ratio(2, 24));
    }

    #[test]
    fn multi_density_path() {
        let k2 = nm("K2");
        assert_eq!(multi_density(&[k2.clone(), k2], &nm("P5")).unwrap(), ratio(1, 5));
    }

    #[test]
    fn mobius_graphs_and_tournaments() {
        let g = builtin_theory("Graph").unwrap();
        let e = Structure::empty(3, &[2]);
        assert_eq!(mobius(&g, &e, &nm("K3")).unwrap(), int(-1));
        assert_eq!(mobius(&g, &e, &nm("P3")).unwrap(), int(1));
        assert_eq!(mobius(&g, &e, &e).unwrap(), int(1));
        let t = builtin_theory("Tournament").unwrap();
        assert_eq!(mobius(&t, &nm("Tr3"), &nm("C3dir")).unwrap(), zero());
    }
}
