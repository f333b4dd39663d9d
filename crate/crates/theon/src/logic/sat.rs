//! Ground propositional formulas, clause normal form and a small DPLL
//! solver that can enumerate all satisfying assignments.

use super::theory::CFormula;
use crate::guard::Guard;
use crate::{Error, Result};

const CNF_CAP: usize = 1 << 16;
const DISTRIBUTE_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn pos(v: u32) -> Lit {
        Lit(v << 1)
    }
    pub fn neg(v: u32) -> Lit {
        Lit((v << 1) | 1)
    }
    pub fn var(self) -> u32 {
        self.0 >> 1
    }
    pub fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }
    pub fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }
    fn code(self) -> usize {
        self.0 as usize
    }
}

/// Value of a ground atom while grounding: already decided, or a solver variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ground {
    Known(bool),
    Var(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prop {
    Const(bool),
    Var(u32),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

impl Prop {
    fn not(p: Prop) -> Prop {
        match p {
            Prop::Const(b) => Prop::Const(!b),
            Prop::Not(q) => *q,
            q => Prop::Not(Box::new(q)),
        }
    }

    fn and(ps: Vec<Prop>) -> Prop {
        let mut out = Vec::with_capacity(ps.len());
        for p in ps {
            match p {
                Prop::Const(true) => {}
                Prop::Const(false) => return Prop::Const(false),
                Prop::And(qs) => out.extend(qs),
                q => out.push(q),
            }
        }
        match out.len() {
            0 => Prop::Const(true),
            1 => out.pop().unwrap(),
            _ => Prop::And(out),
        }
    }

    fn or(ps: Vec<Prop>) -> Prop {
        let mut out = Vec::with_capacity(ps.len());
        for p in ps {
            match p {
                Prop::Const(false) => {}
                Prop::Const(true) => return Prop::Const(true),
                Prop::Or(qs) => out.extend(qs),
                q => out.push(q),
            }
        }
        match out.len() {
            0 => Prop::Const(false),
            1 => out.pop().unwrap(),
            _ => Prop::Or(out),
        }
    }
}

/// Instantiates `f` under `asg`, resolving atoms through `atom`.
pub fn ground(f: &CFormula, asg: &[usize], atom: &mut impl FnMut(usize, &[usize]) -> Ground) -> Prop {
    match f {
        CFormula::Const(b) => Prop::Const(*b),
        CFormula::Atom(p, args) => {
            let mut buf = [0usize; super::theory::MAX_ARITY];
            for (i, &a) in args.iter().enumerate() {
                buf[i] = asg[a];
            }
            match atom(*p, &buf[..args.len()]) {
                Ground::Known(b) => Prop::Const(b),
                Ground::Var(v) => Prop::Var(v),
            }
        }
        CFormula::Eq(a, b) => Prop::Const(asg[*a] == asg[*b]),
        CFormula::Not(g) => Prop::not(ground(g, asg, atom)),
        CFormula::And(gs) => Prop::and(gs.iter().map(|g| ground(g, asg, atom)).collect()),
        CFormula::Or(gs) => Prop::or(gs.iter().map(|g| ground(g, asg, atom)).collect()),
        CFormula::Implies(a, b) => {
            let a = ground(a, asg, atom);
            if a == Prop::Const(false) {
                return Prop::Const(true);
            }
            Prop::or(vec![Prop::not(a), ground(b, asg, atom)])
        }
        CFormula::Iff(a, b) => {
            let a = ground(a, asg, atom);
            let b = ground(b, asg, atom);
            match (&a, &b) {
                (Prop::Const(x), _) => {
                    if *x {
                        b
                    } else {
                        Prop::not(b)
                    }
                }
                (_, Prop::Const(y)) => {
                    if *y {
                        a
                    } else {
                        Prop::not(a)
                    }
                }
                _ => Prop::and(vec![Prop::or(vec![Prop::not(a.clone()), b.clone()]), Prop::or(vec![a, Prop::not(b)])]),
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Cnf {
    pub nvars: usize,
    pub clauses: Vec<Vec<Lit>>,
    unsat: bool,
}

impl Cnf {
    pub fn new(nvars: usize) -> Self {
        Cnf { nvars, clauses: Vec::new(), unsat: false }
    }

    pub fn is_trivially_unsat(&self) -> bool {
        self.unsat
    }

    pub fn add_clause(&mut self, mut c: Vec<Lit>) {
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        if c.is_empty() {
            self.unsat = true;
        }
        self.clauses.push(c);
    }

    /// Adds `p` (which must hold) in clause form.
    pub fn add_prop(&mut self, p: &Prop) -> Result<()> {
        for c in self.to_cnf(p, false)? {
            self.add_clause(c);
        }
        Ok(())
    }

    fn fresh(&mut self) -> u32 {
        self.nvars += 1;
        (self.nvars - 1) as u32
    }

    /// A fresh literal constrained to be equivalent to `p` (negated if `neg`),
    /// so every model of the original clauses extends uniquely.
    fn define(&mut self, p: &Prop, neg: bool) -> Result<Lit> {
        let t = Lit::pos(self.fresh());
        for mut c in self.to_cnf(p, neg)? {
            c.push(t.negate());
            self.add_clause(c);
        }
        for mut c in self.to_cnf(p, !neg)? {
            c.push(t);
            self.add_clause(c);
        }
        Ok(t)
    }

    fn to_cnf(&mut self, p: &Prop, neg: bool) -> Result<Vec<Vec<Lit>>> {
        Ok(match (p, neg) {
            (Prop::Const(b), _) => {
                if *b != neg {
                    vec![]
                } else {
                    vec![vec![]]
                }
            }
            (Prop::Var(v), false) => vec![vec![Lit::pos(*v)]],
            (Prop::Var(v), true) => vec![vec![Lit::neg(*v)]],
            (Prop::Not(q), _) => self.to_cnf(q, !neg)?,
            (Prop::And(qs), false) | (Prop::Or(qs), true) => {
                let mut out = Vec::new();
                for q in qs {
                    out.extend(self.to_cnf(q, neg)?);
                }
                out
            }
            (Prop::Or(qs), false) | (Prop::And(qs), true) => {
                let mut parts = Vec::with_capacity(qs.len());
                for q in qs {
                    parts.push(self.to_cnf(q, neg)?);
                }
                let size = parts.iter().try_fold(1usize, |a, cs| a.checked_mul(cs.len()));
                if size.is_none_or(|s| s > DISTRIBUTE_CAP) {
                    for (q, cs) in qs.iter().zip(parts.iter_mut()) {
                        if cs.len() > 1 {
                            *cs = vec![vec![self.define(q, neg)?]];
                        }
                    }
                }
                let mut acc: Vec<Vec<Lit>> = vec![vec![]];
                for cs in &parts {
                    if acc.len() * cs.len() > CNF_CAP {
                        return Err(Error::TooLarge("clause form of a ground axiom".into()));
                    }
                    let mut next = Vec::with_capacity(acc.len() * cs.len());
                    for a in &acc {
                        for c in cs {
                            let mut d = a.clone();
                            d.extend_from_slice(c);
                            next.push(d);
                        }
                    }
                    acc = next;
                }
                acc
            }
        })
    }
}

struct Solver<'a> {
    cnf: &'a Cnf,
    occ: Vec<Vec<u32>>,
    val: Vec<i8>,
    trail: Vec<Lit>,
}

impl<'a> Solver<'a> {
    fn new(cnf: &'a Cnf) -> Self {
        let mut occ = vec![Vec::new(); 2 * cnf.nvars];
        for (i, c) in cnf.clauses.iter().enumerate() {
            for l in c {
                occ[l.code()].push(i as u32);
            }
        }
        Solver { cnf, occ, val: vec![0; cnf.nvars], trail: Vec::new() }
    }

    fn lit_val(&self, l: Lit) -> i8 {
        let v = self.val[l.var() as usize];
        if l.is_neg() {
            -v
        } else {
            v
        }
    }

    fn assign(&mut self, l: Lit) {
        self.val[l.var() as usize] = if l.is_neg() { -1 } else { 1 };
        self.trail.push(l);
    }

    /// Unit propagation from trail position `from`; false on conflict.
    fn propagate(&mut self, mut from: usize) -> bool {
        while from < self.trail.len() {
            let l = self.trail[from];
            from += 1;
            let falsified = l.negate();
            for k in 0..self.occ[falsified.code()].len() {
                let ci = self.occ[falsified.code()][k] as usize;
                let clause = &self.cnf.clauses[ci];
                let mut unassigned = None;
                let mut n_un = 0;
                let mut sat = false;
                for &m in clause {
                    match self.lit_val(m) {
                        1 => {
                            sat = true;
                            break;
                        }
                        0 => {
                            n_un += 1;
                            unassigned = Some(m);
                        }
                        _ => {}
                    }
                }
                if sat {
                    continue;
                }
                match n_un {
                    0 => return false,
                    1 => self.assign(unassigned.unwrap()),
                    _ => {}
                }
            }
        }
        true
    }

    fn undo(&mut self, to: usize) {
        while self.trail.len() > to {
            let l = self.trail.pop().unwrap();
            self.val[l.var() as usize] = 0;
        }
    }

    fn init(&mut self) -> bool {
        if self.cnf.unsat {
            return false;
        }
        for c in &self.cnf.clauses {
            if c.len() == 1 {
                match self.lit_val(c[0]) {
                    -1 => return false,
                    0 => self.assign(c[0]),
                    _ => {}
                }
            }
        }
        self.propagate(0)
    }

    /// Returns Ok(true) when `emit` asked to stop.
    fn search(&mut self, guard: &Guard, emit: &mut dyn FnMut(&[bool]) -> bool) -> Result<bool> {
        guard.tick(1)?;
        let Some(v) = self.val.iter().position(|&x| x == 0) else {
            let model: Vec<bool> = self.val.iter().map(|&x| x > 0).collect();
            return Ok(emit(&model));
        };
        for l in [Lit::pos(v as u32), Lit::neg(v as u32)] {
            let mark = self.trail.len();
            self.assign(l);
            if self.propagate(mark) && self.search(guard, emit)? {
                self.undo(mark);
                return Ok(true);
            }
            self.undo(mark);
        }
        Ok(false)
    }
}

/// Calls `emit` for every satisfying assignment until it returns true.
pub fn for_each_model(cnf: &Cnf, guard: &Guard, emit: &mut dyn FnMut(&[bool]) -> bool) -> Result<()> {
    let mut s = Solver::new(cnf);
    if !s.init() {
        return Ok(());
    }
    s.search(guard, emit)?;
    Ok(())
}

pub fn solve(cnf: &Cnf, guard: &Guard) -> Result<Option<Vec<bool>>> {
    let mut found = None;
    for_each_model(cnf, guard, &mut |m| {
        found = Some(m.to_vec());
        true
    })?;
    Ok(found)
}
