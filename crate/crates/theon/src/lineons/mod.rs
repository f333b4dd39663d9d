//! Subsets of `F₂ⁿ` observed through random linear maps: the relational
//! model `M_A`, pattern densities, blow-ups and monochromatic affine
//! triangles.
//!
//! Vectors of `F₂ⁿ` are `u64` bit masks. In text form a subset is written
//! `n=<n> <hex>`, where the hex number has bit `x` set iff `x ∈ A`.

use crate::densities::{density, DensityKind};
use crate::logic::{builtin_theory, Theory};
use crate::models::Structure;
use crate::rational::{self, Rational};
use crate::{Error, Result};
use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Largest `mn` for exact pattern densities.
pub const EXACT_MN_CAP: usize = 24;
/// Largest dimension of a stored subset.
pub const DIM_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinSubset {
    pub n: usize,
    bits: FixedBitSet,
}

impl LinSubset {
    pub fn empty(n: usize) -> Result<LinSubset> {
        if n > DIM_CAP {
            return Err(Error::TooLarge(format!("dimension {n}")));
        }
        Ok(LinSubset { n, bits: FixedBitSet::with_capacity(1 << n) })
    }

    pub fn from_fn(n: usize, f: impl Fn(u64) -> bool) -> Result<LinSubset> {
        let mut a = LinSubset::empty(n)?;
        for x in 0..1u64 << n {
            if f(x) {
                a.bits.insert(x as usize);
            }
        }
        Ok(a)
    }

    pub fn from_elements(n: usize, xs: &[u64]) -> Result<LinSubset> {
        let mut a = LinSubset::empty(n)?;
        for &x in xs {
            if x >> n != 0 {
                return Err(Error::Invalid(format!("vector {x} outside F_2^{n}")));
            }
            a.bits.insert(x as usize);
        }
        Ok(a)
    }

    pub fn contains(&self, x: u64) -> bool {
        self.bits.contains(x as usize)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn elements(&self) -> Vec<u64> {
        self.bits.ones().map(|x| x as u64).collect()
    }
}

/// A target function on `F₂ᵐ ∖ {0}`; `values[v - 1]` is `f(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub m: usize,
    pub values: Vec<bool>,
}

impl Pattern {
    pub fn new(m: usize, values: Vec<bool>) -> Result<Pattern> {
        if m == 0 || m > 16 {
            return Err(Error::Invalid(format!("pattern dimension {m} outside 1..=16")));
        }
        if values.len() != (1 << m) - 1 {
            return Err(Error::Invalid(format!("pattern needs {} values, got {}", (1 << m) - 1, values.len())));
        }
        Ok(Pattern { m, values })
    }

    pub fn value(&self, v: u64) -> bool {
        self.values[v as usize - 1]
    }

    /// `f⁻¹(1)` as a subset of `F₂ᵐ`.
    pub fn support(&self) -> LinSubset {
        LinSubset::from_fn(self.m, |v| v != 0 && self.value(v)).expect("small dimension")
    }
}

fn parse_hex_bits(src: &str, key: &str, width: usize) -> Result<(usize, Vec<bool>)> {
    let s = src.trim();
    let rest = s
        .strip_prefix(key)
        .and_then(|r| r.trim_start().strip_prefix('='))
        .ok_or_else(|| Error::Invalid(format!("expected a `{key}=` header")))?;
    let rest = rest.trim_start();
    let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
    let dim: usize = rest[..end].parse().map_err(|_| Error::Invalid(format!("bad `{key}=` header")))?;
    if dim > width {
        return Err(Error::TooLarge(format!("dimension {dim}")));
    }
    let hex: String = rest[end..].chars().filter(|c| !c.is_whitespace()).collect();
    let hex = hex.strip_prefix("0x").unwrap_or(&hex);
    if hex.is_empty() {
        return Err(Error::Invalid("missing hex bitstring".into()));
    }
    let size = 1usize << dim;
    let mut bits = vec![false; size];
    for (i, ch) in hex.chars().rev().enumerate() {
        let d = ch.to_digit(16).ok_or_else(|| Error::Invalid(format!("invalid hex digit {ch:?}")))?;
        for b in 0..4 {
            if d >> b & 1 == 1 {
                let x = 4 * i + b;
                if x >= size {
                    return Err(Error::Invalid(format!("bit {x} outside a set of size {size}")));
                }
                bits[x] = true;
            }
        }
    }
    Ok((dim, bits))
}

fn format_hex_bits(bits: impl Fn(usize) -> bool, size: usize) -> String {
    let digits = size.div_ceil(4).max(1);
    (0..digits)
        .rev()
        .map(|i| {
            let d = (0..4).filter(|&b| 4 * i + b < size && bits(4 * i + b)).fold(0u32, |d, b| d | 1 << b);
            char::from_digit(d, 16).expect("hex digit")
        })
        .collect()
}

/// Parses `n=<n> <hex>`.
pub fn parse_subset(src: &str) -> Result<LinSubset> {
    let (n, bits) = parse_hex_bits(src, "n", DIM_CAP)?;
    LinSubset::from_fn(n, |x| bits[x as usize])
}

pub fn format_subset(a: &LinSubset) -> String {
    format!("n={} {}", a.n, format_hex_bits(|x| a.contains(x as u64), 1 << a.n))
}

/// Parses `m=<m> <hex>`; bit `v` is `f(v)`, bit 0 is ignored.
pub fn parse_pattern(src: &str) -> Result<Pattern> {
    let (m, bits) = parse_hex_bits(src, "m", 16)?;
    Pattern::new(m, bits[1..].to_vec())
}

pub fn format_pattern(f: &Pattern) -> String {
    format!("m={} {}", f.m, format_hex_bits(|v| v > 0 && f.value(v as u64), 1 << f.m))
}

/// The theory of symmetric predicates `E1, …, EK`.
pub fn lin_theory(k: usize) -> Result<Theory> {
    builtin_theory(&format!("Lin({k})"))
}

/// `M_A` truncated to arity `k`: `E_j(x₁, …, x_j)` iff the `x_i` are
/// pairwise distinct and sum into `A`.
pub fn model_from_subset(a: &LinSubset, k: usize) -> Result<Structure> {
    if k == 0 {
        return Err(Error::Invalid("arity bound must be positive".into()));
    }
    if k > a.n.max(1) || a.n * k > EXACT_MN_CAP {
        return Err(Error::TooLarge(format!("M_A with n = {} and arity bound {k}", a.n)));
    }
    let size = 1usize << a.n;
    let arities: Vec<usize> = (1..=k).collect();
    let mut s = Structure::empty(size, &arities);
    for j in 1..=k {
        let mut t = vec![0usize; j];
        rec_tuples(size, j, 0, &mut t, &mut |t| {
            if crate::models::distinct(t) && a.contains(t.iter().fold(0u64, |acc, &x| acc ^ x as u64)) {
                s.set(j - 1, t, true);
            }
        });
    }
    Ok(s)
}

fn rec_tuples(size: usize, j: usize, i: usize, t: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if i == j {
        f(t);
        return;
    }
    for x in 0..size {
        t[i] = x;
        rec_tuples(size, j, i + 1, t, f);
    }
}

/// `N_{f,B}`: the model of `f⁻¹(1)` restricted to the standard basis.
pub fn pattern_model(f: &Pattern) -> Result<Structure> {
    let full = model_from_subset(&f.support(), f.m)?;
    let basis: Vec<usize> = (0..f.m).map(|i| 1 << i).collect();
    full.induced(&basis)
}

/// A Monte-Carlo estimate: `hits` successes in `samples` trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Estimate {
    pub hits: u64,
    pub samples: u64,
}

impl Estimate {
    pub fn value(&self) -> f64 {
        self.hits as f64 / self.samples.max(1) as f64
    }

    /// Whether the estimate lies within `k` binomial standard deviations
    /// of `q`.
    pub fn within(&self, q: f64, k: f64) -> bool {
        let sigma = (q * (1.0 - q) / self.samples.max(1) as f64).sqrt();
        (self.value() - q).abs() <= k * sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Exact(Rational),
    Sampled(Estimate),
}

impl Density {
    pub fn to_f64(&self) -> f64 {
        match self {
            Density::Exact(q) => rational::to_f64(q),
            Density::Sampled(e) => e.value(),
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Density::Exact(q) => Some(q),
            Density::Sampled(_) => None,
        }
    }
}

fn stream_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// Whether `1_A ∘ α` equals `f` on the nonzero vectors, for the map with
/// basis images `images`.
fn matches(f: &Pattern, a: &LinSubset, images: &[u64], buf: &mut [u64]) -> bool {
    buf[0] = 0;
    for v in 1..buf.len() {
        let low = v.trailing_zeros() as usize;
        buf[v] = buf[v & (v - 1)] ^ images[low];
        if a.contains(buf[v]) != f.values[v - 1] {
            return false;
        }
    }
    true
}

/// `p(f, A)`: the probability that a uniform linear map `α: F₂ᵐ → F₂ⁿ`
/// satisfies `1_A ∘ α = f` on `F₂ᵐ ∖ {0}`.
pub fn pattern_density(f: &Pattern, a: &LinSubset, mode: Mode) -> Result<Density> {
    let (m, n) = (f.m, a.n);
    let mask = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    match mode {
        Mode::Exact => {
            if m * n > EXACT_MN_CAP {
                return Err(Error::TooLarge(format!("2^{} linear maps", m * n)));
            }
            let total = 1u64 << (m * n);
            let hits: u64 = (0..total)
                .into_par_iter()
                .map_init(
                    || (vec![0u64; m], vec![0u64; 1 << m]),
                    |(images, buf), idx| {
                        for (i, img) in images.iter_mut().enumerate() {
                            *img = (idx >> (i * n)) & mask;
                        }
                        matches(f, a, images, buf) as u64
                    },
                )
                .sum();
            Ok(Density::Exact(Rational::new(BigInt::from(hits), BigInt::from(total))))
        }
        Mode::Sampled { samples, seed } => {
            let hits = (0..samples)
                .into_par_iter()
                .map_init(
                    || (vec![0u64; m], vec![0u64; 1 << m]),
                    |(images, buf), i| {
                        let mut rng = stream_rng(seed, i);
                        for img in images.iter_mut() {
                            *img = rng.next_u64() & mask;
                        }
                        matches(f, a, images, buf) as u64
                    },
                )
                .sum();
            Ok(Density::Sampled(Estimate { hits, samples }))
        }
    }
}

/// `t_ind(N_{f,B}, M_A)`, through the generic density code.
pub fn pattern_tind(f: &Pattern, a: &LinSubset) -> Result<Rational> {
    let n_model = pattern_model(f)?;
    let m_a = model_from_subset(a, f.m)?;
    density(DensityKind::Ind, &n_model, &m_a)
}

/// `A × F₂ᵗ` in dimension `n + t`; new coordinates are the high bits.
pub fn blowup(a: &LinSubset, t: usize) -> Result<LinSubset> {
    let mask = (1u64 << a.n) - 1;
    LinSubset::from_fn(a.n + t, |x| a.contains(x & mask))
}

/// Probability over independent uniform `x, y` that `c(x) = c(y) = c(x + y)`,
/// where `c` is the indicator of `coloring`.
pub fn triangle_mono_density(coloring: &LinSubset, mode: Mode) -> Result<Density> {
    let n = coloring.n;
    let c = |x: u64| coloring.contains(x);
    let mono = |x: u64, y: u64| c(x) == c(y) && c(y) == c(x ^ y);
    match mode {
        Mode::Exact => {
            if 2 * n > EXACT_MN_CAP {
                return Err(Error::TooLarge(format!("4^{n} pairs")));
            }
            let size = 1u64 << n;
            let hits: u64 = (0..size).into_par_iter().map(|x| (0..size).filter(|&y| mono(x, y)).count() as u64).sum();
            Ok(Density::Exact(Rational::new(BigInt::from(hits), BigInt::from(size * size))))
        }
        Mode::Sampled { samples, seed } => {
            let mask = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
            let hits = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let mut rng = stream_rng(seed, i);
                    mono(rng.next_u64() & mask, rng.next_u64() & mask) as u64
                })
                .sum();
            Ok(Density::Sampled(Estimate { hits, samples }))
        }
    }
}

pub fn random_subset(n: usize, density: f64, seed: u64) -> Result<LinSubset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keep: Vec<bool> = (0..1u64 << n).map(|_| rng.gen_bool(density)).collect();
    LinSubset::from_fn(n, |x| keep[x as usize])
}

pub fn random_pattern(m: usize, seed: u64) -> Result<Pattern> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Pattern::new(m, (1..1usize << m).map(|_| rng.gen_bool(0.5)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn small_models() {
        let zero = LinSubset::from_elements(2, &[0]).unwrap();
        let m = model_from_subset(&zero, 2).unwrap();
        assert_eq!(m.tuples(0), vec![vec![0]]);
        assert_eq!(m.count(1), 0);
        let a = LinSubset::from_elements(2, &[0b00, 0b11]).unwrap();
        assert_eq!(model_from_subset(&a, 2).unwrap().count(1), 4);
        let full = LinSubset::from_fn(2, |_| true).unwrap();
        assert_eq!(model_from_subset(&full, 2).unwrap().count(1), 12);
        assert!(model_from_subset(&full, 2).unwrap().is_model(&lin_theory(2).unwrap()));
    }

    #[test]
    fn one_dimensional_patterns() {
        let a = LinSubset::from_elements(3, &[1, 2, 6]).unwrap();
        let one = Pattern::new(1, vec![true]).unwrap();
        assert_eq!(pattern_density(&one, &a, Mode::Exact).unwrap(), Density::Exact(ratio(3, 8)));
        let full = LinSubset::from_fn(3, |_| true).unwrap();
        let f = Pattern::new(2, vec![true, true, true]).unwrap();
        let g = Pattern::new(2, vec![true, false, true]).unwrap();
        assert_eq!(pattern_density(&f, &full, Mode::Exact).unwrap(), Density::Exact(rational::one()));
        assert_eq!(pattern_density(&g, &full, Mode::Exact).unwrap(), Density::Exact(rational::zero()));
    }

    #[test]
    fn blowups() {
        let z = LinSubset::from_elements(1, &[0]).unwrap();
        assert_eq!(blowup(&z, 1).unwrap().elements(), vec![0b00, 0b10]);
        let a = random_subset(3, 0.5, 2).unwrap();
        assert_eq!(blowup(&a, 2).unwrap().len(), a.len() * 4);
    }

    #[test]
    fn triangles() {
        let zero = LinSubset::empty(3).unwrap();
        assert_eq!(triangle_mono_density(&zero, Mode::Exact).unwrap(), Density::Exact(rational::one()));
        let lin = LinSubset::from_fn(3, |x| (x & 0b101).count_ones() % 2 == 1).unwrap();
        assert_eq!(triangle_mono_density(&lin, Mode::Exact).unwrap(), Density::Exact(ratio(1, 4)));
    }

    #[test]
    fn text_forms() {
        let a = LinSubset::from_elements(2, &[0b00, 0b11]).unwrap();
        assert_eq!(format_subset(&a), "n=2 9");
        assert_eq!(parse_subset("n=2 9").unwrap(), a);
        let b = random_subset(5, 0.3, 1).unwrap();
        assert_eq!(parse_subset(&format_subset(&b)).unwrap(), b);
        let f = random_pattern(3, 4).unwrap();
        assert_eq!(parse_pattern(&format_pattern(&f)).unwrap(), f);
        assert!(parse_subset("n=1 f").is_err());
    }
}
