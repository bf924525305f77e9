//! Finite Grassmann algebra over a coefficient ring `K`.
//!
//! Monomials are stored as bitmasks of generator indices, always read in
//! increasing index order, with the reordering sign folded into the
//! coefficient. Left and right derivatives follow the usual conventions:
//! `d/dx_i (x_i f) = f` and `(f x_i) d<-/dx_i = f` for `f` free of `x_i`.
//! The Berezin integral is the right derivative; in `int f dx_a dx_b` the
//! differential written first is integrated first.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Num;

use crate::cells::Triangle;
use crate::error::{Error, Result};

/// Coefficient ring for Grassmann elements.
pub trait Coefficient: Num + Neg<Output = Self> + Clone + fmt::Debug {}

impl<K: Num + Neg<Output = K> + Clone + fmt::Debug> Coefficient for K {}

/// Largest supported number of generators.
pub const MAX_GENERATORS: usize = 64;

/// Element of the Grassmann algebra on `num_gens` generators.
#[derive(Clone, PartialEq)]
pub struct GrassmannElement<K> {
    num_gens: usize,
    terms: BTreeMap<u64, K>,
}

/// Sign `(-1)^m` where `m` counts pairs `(i in a, j in b)` with `i > j`:
/// the sign of sorting the concatenated word `a b`.
fn reorder_sign(a: u64, b: u64) -> bool {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if j >= 63 { 0 } else { a >> (j + 1) };
        swaps += above.count_ones();
    }
    swaps % 2 == 1
}

fn bit(i: usize) -> u64 {
    1u64 << i
}

impl<K: Coefficient> GrassmannElement<K> {
    pub fn zero(num_gens: usize) -> Self {
        assert!(
            num_gens <= MAX_GENERATORS,
            "at most {MAX_GENERATORS} generators"
        );
        Self {
            num_gens,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(num_gens: usize, k: K) -> Self {
        let mut out = Self::zero(num_gens);
        out.add_term(0, k);
        out
    }

    pub fn one(num_gens: usize) -> Self {
        Self::scalar(num_gens, K::one())
    }

    /// The generator `x_i` (0-based).
    pub fn generator(num_gens: usize, i: usize) -> Self {
        assert!(i < num_gens, "generator {i} out of range");
        let mut out = Self::zero(num_gens);
        out.add_term(bit(i), K::one());
        out
    }

    /// `k * x_{w0} x_{w1} ...` for an arbitrary word; repeated letters give zero.
    pub fn word(num_gens: usize, word: &[usize], k: K) -> Self {
        let mut mask = 0u64;
        let mut negative = false;
        for &i in word {
            assert!(i < num_gens, "generator {i} out of range");
            if mask & bit(i) != 0 {
                return Self::zero(num_gens);
            }
            negative ^= reorder_sign(mask, bit(i));
            mask |= bit(i);
        }
        let mut out = Self::zero(num_gens);
        out.add_term(mask, if negative { -k } else { k });
        out
    }

    /// Basis monomial for a mask (generators in increasing order).
    pub fn monomial(num_gens: usize, mask: u64) -> Self {
        assert!(
            num_gens == 64 || mask >> num_gens == 0,
            "mask references missing generators"
        );
        let mut out = Self::zero(num_gens);
        out.add_term(mask, K::one());
        out
    }

    pub fn num_gens(&self) -> usize {
        self.num_gens
    }

    /// Nonzero terms as `(mask, coefficient)` in mask order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &K)> {
        self.terms.iter().map(|(m, k)| (*m, k))
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mask: u64) -> K {
        self.terms.get(&mask).cloned().unwrap_or_else(K::zero)
    }

    pub fn scalar_part(&self) -> K {
        self.coeff(0)
    }

    /// Every monomial has even degree (zero counts as even).
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 0)
    }

    /// Every monomial has odd degree (zero counts as odd).
    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 1)
    }

    fn add_term(&mut self, mask: u64, k: K) {
        if k.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&mask) {
            Some(old) => old + k,
            None => k,
        };
        if !sum.is_zero() {
            self.terms.insert(mask, sum);
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.num_gens == other.num_gens {
            Ok(())
        } else {
            Err(Error::GeneratorMismatch {
                left: self.num_gens,
                right: other.num_gens,
            })
        }
    }

    pub fn scale(&self, k: &K) -> Self {
        let mut out = Self::zero(self.num_gens);
        for (&m, c) in &self.terms {
            out.add_term(m, c.clone() * k.clone());
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c.clone());
        }
        Ok(out)
    }

    /// Product with anticommuting generators; errors when the generator
    /// counts differ.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.num_gens);
        for (&a, ca) in &self.terms {
            for (&b, cb) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let k = ca.clone() * cb.clone();
                out.add_term(a | b, if reorder_sign(a, b) { -k } else { k });
            }
        }
        Ok(out)
    }

    /// `exp(f) = sum f^k / k!`, defined for even `f` with zero scalar part.
    pub fn exp(&self) -> Result<Self> {
        if !self.scalar_part().is_zero() || !self.is_even() {
            return Err(Error::NotNilpotentSafe);
        }
        let mut result = Self::one(self.num_gens);
        let mut term = Self::one(self.num_gens);
        let mut k = K::zero();
        loop {
            k = k + K::one();
            term = term.try_mul(self)?;
            if term.is_zero() {
                break;
            }
            let inv = K::one() / k.clone();
            term = term.scale(&inv);
            result = result.try_add(&term)?;
        }
        Ok(result)
    }

    /// Left derivative `d/dx_i`.
    pub fn left_deriv(&self, i: usize) -> Self {
        assert!(i < self.num_gens, "generator {i} out of range");
        let mut out = Self::zero(self.num_gens);
        for (&m, c) in &self.terms {
            if m & bit(i) == 0 {
                continue;
            }
            let before = (m & (bit(i) - 1)).count_ones();
            let k = c.clone();
            out.add_term(m & !bit(i), if before % 2 == 1 { -k } else { k });
        }
        out
    }

    /// Right derivative `d<-/dx_i`.
    pub fn right_deriv(&self, i: usize) -> Self {
        assert!(i < self.num_gens, "generator {i} out of range");
        let mut out = Self::zero(self.num_gens);
        for (&m, c) in &self.terms {
            if m & bit(i) == 0 {
                continue;
            }
            let after = if i >= 63 {
                0
            } else {
                (m >> (i + 1)).count_ones()
            };
            let k = c.clone();
            out.add_term(m & !bit(i), if after % 2 == 1 { -k } else { k });
        }
        out
    }

    /// Berezin integral `int f dx_{order[0]} dx_{order[1]} ...`: right
    /// derivative in `order[0]` first, then `order[1]`, and so on.
    pub fn berezin(&self, order: &[usize]) -> Self {
        let mut seen = 0u64;
        for &i in order {
            assert!(seen & bit(i) == 0, "repeated integration variable {i}");
            seen |= bit(i);
        }
        order
            .iter()
            .fold(self.clone(), |acc, &i| acc.right_deriv(i))
    }

    /// Left multiplication by `x_i`.
    pub fn mul_generator(&self, i: usize) -> Self {
        Self::generator(self.num_gens, i) * self
    }

    /// Render with custom generator names; monomials sorted by degree and
    /// then by generator indices.
    pub fn render_with(
        &self,
        name: impl Fn(usize) -> String,
        coeff: impl Fn(&K) -> String,
    ) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut keys: Vec<u64> = self.terms.keys().copied().collect();
        keys.sort_by_key(|&m| (m.count_ones(), indices(m)));
        let parts: Vec<String> = keys
            .iter()
            .map(|&m| {
                let c = coeff(&self.terms[&m]);
                if m == 0 {
                    c
                } else {
                    let word: Vec<String> = indices(m).into_iter().map(&name).collect();
                    format!("{c}*{}", word.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Generator indices in a mask, increasing.
pub fn indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask & bit(i) != 0).collect()
}

impl<K: Coefficient> Add for &GrassmannElement<K> {
    type Output = GrassmannElement<K>;
    fn add(self, rhs: Self) -> GrassmannElement<K> {
        self.try_add(rhs).expect("generator count mismatch")
    }
}

impl<K: Coefficient> Sub for &GrassmannElement<K> {
    type Output = GrassmannElement<K>;
    fn sub(self, rhs: Self) -> GrassmannElement<K> {
        self.try_add(&-rhs).expect("generator count mismatch")
    }
}

impl<K: Coefficient> Neg for &GrassmannElement<K> {
    type Output = GrassmannElement<K>;
    fn neg(self) -> GrassmannElement<K> {
        self.scale(&-K::one())
    }
}

impl<K: Coefficient> Mul for &GrassmannElement<K> {
    type Output = GrassmannElement<K>;
    fn mul(self, rhs: Self) -> GrassmannElement<K> {
        self.try_mul(rhs).expect("generator count mismatch")
    }
}

impl<K: Coefficient> Mul<&GrassmannElement<K>> for GrassmannElement<K> {
    type Output = GrassmannElement<K>;
    fn mul(self, rhs: &GrassmannElement<K>) -> GrassmannElement<K> {
        &self * rhs
    }
}

impl<K: Coefficient> fmt::Debug for GrassmannElement<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            self.render_with(|i| format!("x{i}"), |k| format!("({k:?})"))
        )
    }
}

impl<K: Coefficient + fmt::Display> fmt::Display for GrassmannElement<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            self.render_with(|i| format!("x{i}"), |k| format!("({k})"))
        )
    }
}

/// Name of a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorLabel {
    Face(Triangle),
    Index(usize),
}

impl fmt::Display for GeneratorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorLabel::Face(t) => write!(f, "x{t}"),
            GeneratorLabel::Index(i) => write!(f, "x{i}"),
        }
    }
}

/// Ordered list of generator labels; the position is the generator index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generators {
    labels: Vec<GeneratorLabel>,
}

impl Generators {
    pub fn new(labels: Vec<GeneratorLabel>) -> Self {
        assert!(labels.len() <= MAX_GENERATORS);
        Self { labels }
    }

    /// One generator per face, ordered by vertex sum then lexicographically.
    pub fn faces(mut faces: Vec<Triangle>) -> Self {
        faces.sort_by_key(|t| (t.vertex_sum(), t.vertices()));
        faces.dedup();
        Self::new(faces.into_iter().map(GeneratorLabel::Face).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[GeneratorLabel] {
        &self.labels
    }

    pub fn position(&self, label: GeneratorLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn face(&self, t: Triangle) -> usize {
        self.position(GeneratorLabel::Face(t))
            .unwrap_or_else(|| panic!("no generator for face {t}"))
    }

    pub fn render<K: Coefficient>(
        &self,
        e: &GrassmannElement<K>,
        coeff: impl Fn(&K) -> String,
    ) -> String {
        e.render_with(|i| self.labels[i].to_string(), coeff)
    }
}
