//! The extractor interface `F: (n) × (d) → (m)` and a few generic adapters.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;

/// A map from a source string of `input_len` bits and a seed of `seed_len`
/// bits to `output_len` bits.
pub trait Extractor: Send + Sync {
    fn input_len(&self) -> usize;
    fn seed_len(&self) -> usize;
    fn output_len(&self) -> usize;

    /// Evaluates the map. Lengths are the caller's responsibility; adapters
    /// panic on mismatch.
    fn extract(&self, x: &BitString, y: &BitString) -> BitString;

    /// Integer form for strings of at most 64 bits. The default routes
    /// through [`Extractor::extract`].
    fn extract_index(&self, x: u64, y: u64) -> u64 {
        self.extract(
            &BitString::from_u64(x, self.input_len()),
            &BitString::from_u64(y, self.seed_len()),
        )
        .to_u64()
    }
}

impl<E: Extractor + ?Sized> Extractor for &E {
    fn input_len(&self) -> usize {
        (**self).input_len()
    }
    fn seed_len(&self) -> usize {
        (**self).seed_len()
    }
    fn output_len(&self) -> usize {
        (**self).output_len()
    }
    fn extract(&self, x: &BitString, y: &BitString) -> BitString {
        (**self).extract(x, y)
    }
    fn extract_index(&self, x: u64, y: u64) -> u64 {
        (**self).extract_index(x, y)
    }
}

impl<E: Extractor + ?Sized> Extractor for Box<E> {
    fn input_len(&self) -> usize {
        (**self).input_len()
    }
    fn seed_len(&self) -> usize {
        (**self).seed_len()
    }
    fn output_len(&self) -> usize {
        (**self).output_len()
    }
    fn extract(&self, x: &BitString, y: &BitString) -> BitString {
        (**self).extract(x, y)
    }
    fn extract_index(&self, x: u64, y: u64) -> u64 {
        (**self).extract_index(x, y)
    }
}

impl<E: Extractor + ?Sized> Extractor for Arc<E> {
    fn input_len(&self) -> usize {
        (**self).input_len()
    }
    fn seed_len(&self) -> usize {
        (**self).seed_len()
    }
    fn output_len(&self) -> usize {
        (**self).output_len()
    }
    fn extract(&self, x: &BitString, y: &BitString) -> BitString {
        (**self).extract(x, y)
    }
    fn extract_index(&self, x: u64, y: u64) -> u64 {
        (**self).extract_index(x, y)
    }
}

/// Extractor given by a closure on integer indices.
#[derive(Clone)]
pub struct FnExtractor<F> {
    n: usize,
    d: usize,
    m: usize,
    f: F,
}

impl<F: Fn(u64, u64) -> u64 + Send + Sync> FnExtractor<F> {
    pub fn new(n: usize, d: usize, m: usize, f: F) -> Self {
        assert!(n <= 64 && d <= 64 && m <= 64, "FnExtractor works on at most 64 bits");
        Self { n, d, m, f }
    }
}

impl<F: Fn(u64, u64) -> u64 + Send + Sync> Extractor for FnExtractor<F> {
    fn input_len(&self) -> usize {
        self.n
    }
    fn seed_len(&self) -> usize {
        self.d
    }
    fn output_len(&self) -> usize {
        self.m
    }
    fn extract(&self, x: &BitString, y: &BitString) -> BitString {
        BitString::from_u64((self.f)(x.to_u64(), y.to_u64()), self.m)
    }
    fn extract_index(&self, x: u64, y: u64) -> u64 {
        (self.f)(x, y)
    }
}

/// `F(x, y) = y`.
pub fn seed_pass_through(n: usize, d: usize) -> FnExtractor<impl Fn(u64, u64) -> u64 + Clone> {
    FnExtractor::new(n, d, d, |_x, y| y)
}

/// `F(x, y) = z0`.
pub fn constant(n: usize, d: usize, m: usize, z0: u64) -> FnExtractor<impl Fn(u64, u64) -> u64 + Clone> {
    FnExtractor::new(n, d, m, move |_x, _y| z0)
}

/// Extractor stored as a full table, row `x`, column `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableExtractor {
    n: usize,
    d: usize,
    m: usize,
    table: Vec<u64>,
}

impl TableExtractor {
    pub fn from_fn(n: usize, d: usize, m: usize, mut f: impl FnMut(u64, u64) -> u64) -> Self {
        assert!(n + d <= 30, "table too large");
        let mut table = Vec::with_capacity(1 << (n + d));
        for x in 0..1u64 << n {
            for y in 0..1u64 << d {
                let z = f(x, y);
                assert!(m == 64 || z >> m == 0, "table output out of range");
                table.push(z);
            }
        }
        Self { n, d, m, table }
    }

    /// Uniformly random table from a seeded generator.
    pub fn random(n: usize, d: usize, m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_fn(n, d, m, |_, _| rng.gen_range(0..1u64 << m))
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }
}

impl Extractor for TableExtractor {
    fn input_len(&self) -> usize {
        self.n
    }
    fn seed_len(&self) -> usize {
        self.d
    }
    fn output_len(&self) -> usize {
        self.m
    }
    fn extract(&self, x: &BitString, y: &BitString) -> BitString {
        BitString::from_u64(self.extract_index(x.to_u64(), y.to_u64()), self.m)
    }
    fn extract_index(&self, x: u64, y: u64) -> u64 {
        self.table[((x << self.d) | y) as usize]
    }
}

/// First `len` output bits of an extractor, `F|_len`.
#[derive(Clone, Debug)]
pub struct Prefix<E> {
    inner: E,
    len: usize,
}

impl<E: Extractor> Prefix<E> {
    pub fn new(inner: E, len: usize) -> Self {
        assert!(len <= inner.output_len(), "prefix longer than output");
        Self { inner, len }
    }
}

impl<E: Extractor> Extractor for Prefix<E> {
    fn input_len(&self) -> usize {
        self.inner.input_len()
    }
    fn seed_len(&self) -> usize {
        self.inner.seed_len()
    }
    fn output_len(&self) -> usize {
        self.len
    }
    fn extract(&self, x: &BitString, y: &BitString) -> BitString {
        self.inner.extract(x, y).prefix(self.len)
    }
    fn extract_index(&self, x: u64, y: u64) -> u64 {
        let full = self.inner.output_len();
        if full <= 64 {
            let z = self.inner.extract_index(x, y);
            if self.len == 0 {
                0
            } else {
                z >> (full - self.len)
            }
        } else {
            self.extract(
                &BitString::from_u64(x, self.input_len()),
                &BitString::from_u64(y, self.seed_len()),
            )
            .to_u64()
        }
    }
}

/// Strong form `y ‖ F(x, y)`.
#[derive(Clone, Debug)]
pub struct Strong<E> {
    inner: E,
}

impl<E: Extractor> Strong<E> {
    pub fn new(inner: E) -> Self {
        Self { inner }
    }
}

impl<E: Extractor> Extractor for Strong<E> {
    fn input_len(&self) -> usize {
        self.inner.input_len()
    }
    fn seed_len(&self) -> usize {
        self.inner.seed_len()
    }
    fn output_len(&self) -> usize {
        self.inner.seed_len() + self.inner.output_len()
    }
    fn extract(&self, x: &BitString, y: &BitString) -> BitString {
        y.concat(&self.inner.extract(x, y))
    }
}
