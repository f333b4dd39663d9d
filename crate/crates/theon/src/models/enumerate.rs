//! Enumeration of all models of a theory up to isomorphism.
//!
//! Size-`n` models are obtained by extending each size-`n-1` class with one
//! new vertex: the unknowns are the atoms through the new vertex, the
//! constraints are the axiom instances that mention it, and every solution
//! of the resulting clause set is a model.

use super::canon::{canonical_form, Code, IsoClass};
use super::structure::{pow, Structure};
use crate::guard::Guard;
use crate::logic::sat::{self, Cnf, Ground};
use crate::logic::{Compiled, Theory};
use crate::Result;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

type Cache = Mutex<HashMap<(String, usize), Arc<Vec<IsoClass>>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All one-vertex extensions of `parent` that satisfy the axioms.
pub fn extensions(parent: &Structure, axioms: &[Compiled], guard: &Guard) -> Result<Vec<Structure>> {
    let n = parent.n() + 1;
    let new = n - 1;
    let base = parent.extend_by_one();
    let arities = parent.arities().to_vec();
    let mut var_of: Vec<Vec<i64>> = Vec::with_capacity(arities.len());
    let mut atoms: Vec<(usize, usize)> = Vec::new();
    for (p, &k) in arities.iter().enumerate() {
        let mut slots = vec![-1i64; pow(n, k)];
        for (idx, slot) in slots.iter_mut().enumerate() {
            if base.decode(idx, k).contains(&new) {
                *slot = atoms.len() as i64;
                atoms.push((p, idx));
            }
        }
        var_of.push(slots);
    }
    let mut cnf = Cnf::new(atoms.len());
    for a in axioms {
        let k = a.nvars();
        let total = pow(n, k);
        guard.tick(total as u64)?;
        let mut asg = vec![0usize; k];
        for idx in 0..total {
            let mut r = idx;
            for i in (0..k).rev() {
                asg[i] = r % n;
                r /= n;
            }
            if !asg.contains(&new) {
                continue;
            }
            let prop = sat::ground(&a.body, &asg, &mut |p, t| {
                let i = base.index(t);
                match var_of[p][i] {
                    -1 => Ground::Known(base.relation(p).contains(i)),
                    v => Ground::Var(v as u32),
                }
            });
            cnf.add_prop(&prop)?;
            if cnf.is_trivially_unsat() {
                return Ok(vec![]);
            }
        }
    }
    let mut out = Vec::new();
    sat::for_each_model(&cnf, guard, &mut |m| {
        let mut s = base.clone();
        for (v, &(p, idx)) in atoms.iter().enumerate() {
            if m[v] {
                s.rel_mut(p).insert(idx);
            }
        }
        out.push(s);
        false
    })?;
    Ok(out)
}

fn compute(t: &Theory, n: usize, guard: &Guard) -> Result<Vec<IsoClass>> {
    let arities = t.language.arities();
    let axioms = t.compiled_axioms();
    if n == 0 {
        let s = Structure::empty(0, &arities);
        return Ok(if s.is_model(t) { vec![canonical_form(&s)?] } else { vec![] });
    }
    let parents = enumerate_guarded(t, n - 1, guard)?;
    let maps: Vec<BTreeMap<Code, IsoClass>> = parents
        .par_iter()
        .map(|p| -> Result<BTreeMap<Code, IsoClass>> {
            let mut m = BTreeMap::new();
            for s in extensions(&p.canonical, &axioms, guard)? {
                let c = canonical_form(&s)?;
                m.entry(c.code.clone()).or_insert(c);
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let mut all = BTreeMap::new();
    for m in maps {
        all.extend(m);
    }
    Ok(all.into_values().collect())
}

fn enumerate_guarded(t: &Theory, n: usize, guard: &Guard) -> Result<Arc<Vec<IsoClass>>> {
    let key = (t.to_string(), n);
    if let Some(v) = cache().lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let v = Arc::new(compute(t, n, guard)?);
    cache().lock().unwrap().insert(key, v.clone());
    Ok(v)
}

/// Isomorphism classes of models of `t` on `n` vertices, sorted by code.
pub fn enumerate_models(t: &Theory, n: usize) -> Result<Arc<Vec<IsoClass>>> {
    enumerate_guarded(t, n, &Guard::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::builtin_theory;

    #[test]
    fn small_counts() {
        let g = builtin_theory("Graph").unwrap();
        let counts: Vec<usize> = (0..=4).map(|n| enumerate_models(&g, n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 11]);
        let t = builtin_theory("Tournament").unwrap();
        assert_eq!(enumerate_models(&t, 3).unwrap().len(), 2);
        let p = builtin_theory("Perm").unwrap();
        assert_eq!(enumerate_models(&p, 2).unwrap().len(), 2);
    }

    #[test]
    fn members_are_models_and_sorted() {
        let t = builtin_theory("Orgraph").unwrap();
        let ms = enumerate_models(&t, 3).unwrap();
        assert!(ms.iter().all(|m| m.canonical.is_model(&t)));
        assert!(ms.windows(2).all(|w| w[0].code < w[1].code));
    }
}
