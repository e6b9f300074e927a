//! Distributions over `{0,1}^n`: min-entropy, statistical distance, flat
//! sources and push-forward through an extractor.
//!
//! A [`Dist`] is dense, one weight per string, indexed by the string's
//! integer value (bit 0 most significant). Weights are either `f64` or exact
//! [`BigRational`]s; see [`Weight`].

use std::collections::BTreeSet;
use std::fmt::Debug;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::extractor::Extractor;

/// Largest supported string length for dense distributions.
pub const MAX_DIST_BITS: usize = 24;

/// Default tolerance for float comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Numeric backing of a distribution.
pub trait Weight: Clone + Debug + PartialOrd + Send + Sync {
    fn nil() -> Self;
    fn unit() -> Self;
    fn ratio(num: u64, den: u64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Whether the value should be treated as zero. Exact for rationals.
    fn is_negligible(&self) -> bool;
    fn is_exact() -> bool;
}

impl Weight for f64 {
    fn nil() -> Self {
        0.0
    }
    fn unit() -> Self {
        1.0
    }
    fn ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_negligible(&self) -> bool {
        f64::abs(*self) < 1e-15
    }
    fn is_exact() -> bool {
        false
    }
}

impl Weight for BigRational {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
    fn is_exact() -> bool {
        true
    }
}

/// Explicit distribution over all strings of length `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dist<W = f64> {
    n: usize,
    probs: Vec<W>,
}

/// Exact-rational distribution, used on oracle paths.
pub type ExactDist = Dist<BigRational>;

fn check_n(n: usize) -> Result<()> {
    if n > MAX_DIST_BITS {
        Err(Error::InvalidDistribution(format!(
            "length {n} exceeds the dense limit of {MAX_DIST_BITS} bits"
        )))
    } else {
        Ok(())
    }
}

impl<W: Weight> Dist<W> {
    /// Builds a distribution, checking non-negativity and unit mass
    /// (exactly for rationals, within [`DEFAULT_TOLERANCE`] for floats).
    pub fn new(n: usize, probs: Vec<W>) -> Result<Self> {
        check_n(n)?;
        if probs.len() != 1usize << n {
            return Err(Error::Dimension {
                what: "distribution support",
                expected: 1 << n,
                found: probs.len(),
            });
        }
        let zero = W::nil();
        if let Some(i) = probs.iter().position(|p| *p < zero) {
            return Err(Error::InvalidDistribution(format!("negative weight at index {i}")));
        }
        let total = probs.iter().fold(W::nil(), |acc, p| acc.add(p));
        if total.is_negligible() {
            return Err(Error::InvalidDistribution("all weights are zero".into()));
        }
        let off = total.sub(&W::unit()).abs();
        let ok = if W::is_exact() {
            off.is_negligible()
        } else {
            off.to_f64() <= DEFAULT_TOLERANCE
        };
        if !ok {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {}, not 1",
                total.to_f64()
            )));
        }
        Ok(Self { n, probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_n(n)?;
        let size = 1u64 << n;
        Ok(Self {
            n,
            probs: vec![W::ratio(1, size); size as usize],
        })
    }

    pub fn point(n: usize, at: u64) -> Result<Self> {
        check_n(n)?;
        let mut probs = vec![W::nil(); 1 << n];
        *probs
            .get_mut(at as usize)
            .ok_or(Error::Dimension {
                what: "point mass index",
                expected: 1 << n,
                found: at as usize,
            })? = W::unit();
        Ok(Self { n, probs })
    }

    pub fn len_bits(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[W] {
        &self.probs
    }

    pub fn prob(&self, x: u64) -> &W {
        &self.probs[x as usize]
    }

    pub fn prob_of(&self, x: &BitString) -> &W {
        self.prob(x.to_u64())
    }

    /// Indices with nonzero weight, ascending.
    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_negligible())
            .map(|(i, _)| i as u64)
    }

    pub fn max_weight(&self) -> W {
        self.probs
            .iter()
            .fold(W::nil(), |m, p| if *p > m { p.clone() } else { m })
    }

    pub fn total(&self) -> W {
        self.probs.iter().fold(W::nil(), |acc, p| acc.add(p))
    }

    pub fn to_f64(&self) -> Dist<f64> {
        Dist {
            n: self.n,
            probs: self.probs.iter().map(Weight::to_f64).collect(),
        }
    }
}

impl Dist<f64> {
    /// Rational copy of a float distribution (exact binary expansion).
    pub fn to_exact(&self) -> ExactDist {
        Dist {
            n: self.n,
            probs: self
                .probs
                .iter()
                .map(|&p| BigRational::from_float(p).unwrap_or_else(Zero::zero))
                .collect(),
        }
    }
}

/// `H∞(X) = min_a −log2 X(a)`, in bits.
pub fn min_entropy<W: Weight>(x: &Dist<W>) -> Result<f64> {
    let max = x.max_weight();
    if max.is_negligible() {
        return Err(Error::InvalidDistribution("all weights are zero".into()));
    }
    Ok(-max.to_f64().log2())
}

/// Whether `H∞(X) ≥ log2(support_size)`, i.e. every weight is at most
/// `1/support_size`. Exact for rationals; floats get [`DEFAULT_TOLERANCE`].
pub fn has_min_entropy<W: Weight>(x: &Dist<W>, support_size: usize) -> bool {
    let bound = W::ratio(1, support_size as u64);
    let max = x.max_weight();
    if W::is_exact() {
        max <= bound
    } else {
        max.to_f64() <= bound.to_f64() + DEFAULT_TOLERANCE
    }
}

/// `½ Σ_a |X(a) − Y(a)|`.
pub fn stat_dist<W: Weight>(x: &Dist<W>, y: &Dist<W>) -> Result<W> {
    if x.n != y.n {
        return Err(Error::Dimension {
            what: "statistical distance operands",
            expected: x.n,
            found: y.n,
        });
    }
    let l1 = x
        .probs
        .iter()
        .zip(&y.probs)
        .fold(W::nil(), |acc, (a, b)| acc.add(&a.sub(b).abs()));
    Ok(l1.div(&W::ratio(2, 1)))
}

/// Distance from the uniform distribution on the same length.
pub fn dist_from_uniform<W: Weight>(x: &Dist<W>) -> W {
    let u = W::ratio(1, 1u64 << x.n);
    let l1 = x
        .probs
        .iter()
        .fold(W::nil(), |acc, p| acc.add(&p.sub(&u).abs()));
    l1.div(&W::ratio(2, 1))
}

/// Uniform distribution on a set of strings of common length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatSource {
    n: usize,
    support: Vec<u64>,
}

impl FlatSource {
    pub fn new(n: usize, support: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_n(n)?;
        let set: BTreeSet<u64> = support.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidDistribution("flat source with empty support".into()));
        }
        if let Some(&bad) = set.iter().find(|&&x| x >> n != 0) {
            return Err(Error::Dimension {
                what: "flat source element",
                expected: 1 << n,
                found: bad as usize,
            });
        }
        Ok(Self {
            n,
            support: set.into_iter().collect(),
        })
    }

    pub fn len_bits(&self) -> usize {
        self.n
    }

    /// Sorted support.
    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn size(&self) -> usize {
        self.support.len()
    }

    pub fn to_dist<W: Weight>(&self) -> Dist<W> {
        let mut probs = vec![W::nil(); 1 << self.n];
        let w = W::ratio(1, self.support.len() as u64);
        for &x in &self.support {
            probs[x as usize] = w.clone();
        }
        Dist { n: self.n, probs }
    }
}

/// Writes `X` as a convex combination of flat sources of size `k_size`.
///
/// Repeatedly takes the `k_size` largest remaining weights (ties to the
/// lexicographically smaller string) and lowers them by the largest amount
/// that keeps every weight at most `1/k_size` of the remaining mass. Each
/// step zeroes an entry or pins one at the cap, so there are at most `2^n`
/// components.
pub fn flat_decompose<W: Weight>(x: &Dist<W>, k_size: usize) -> Result<Vec<(W, FlatSource)>> {
    if k_size == 0 {
        return Err(Error::Precondition("flat size must be at least 1".into()));
    }
    if !has_min_entropy(x, k_size) {
        return Err(Error::EntropyDeficit {
            required_support: k_size,
        });
    }
    let kw = W::ratio(k_size as u64, 1);
    let mut rest: Vec<W> = x.probs.clone();
    let mut total = x.total();
    let mut out = Vec::new();
    let limit = x.probs.len() + k_size + 1;

    while !total.is_negligible() && out.len() < limit {
        let mut order: Vec<usize> = (0..rest.len()).filter(|&i| !rest[i].is_negligible()).collect();
        if order.len() < k_size {
            // Float residue only; exact weights always leave >= k_size entries.
            break;
        }
        order.sort_by(|&a, &b| {
            rest[b]
                .partial_cmp(&rest[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let chosen = &order[..k_size];
        let min_chosen = rest[chosen[k_size - 1]].clone();
        let cap = total.div(&kw);
        let step = match order.get(k_size) {
            Some(&next) => {
                let slack = cap.sub(&rest[next]);
                if slack < min_chosen {
                    slack
                } else {
                    min_chosen
                }
            }
            None => min_chosen,
        };
        if step.is_negligible() || step < W::nil() {
            break;
        }
        for &i in chosen {
            rest[i] = rest[i].sub(&step);
            if !W::is_exact() && rest[i].is_negligible() {
                rest[i] = W::nil();
            }
        }
        total = total.sub(&step.mul(&kw));
        let support = chosen.iter().map(|&i| i as u64);
        out.push((step.mul(&kw), FlatSource::new(x.n, support)?));
    }
    Ok(out)
}

/// Recombines a flat decomposition into a distribution.
pub fn recombine<W: Weight>(n: usize, parts: &[(W, FlatSource)]) -> Vec<W> {
    let mut probs = vec![W::nil(); 1 << n];
    for (w, flat) in parts {
        let each = w.div(&W::ratio(flat.size() as u64, 1));
        for &x in flat.support() {
            probs[x as usize] = probs[x as usize].add(&each);
        }
    }
    probs
}

/// Distribution of `F(X, U_d)`.
pub fn push_forward<W: Weight, E: Extractor + ?Sized>(f: &E, x: &Dist<W>) -> Result<Dist<W>> {
    if f.input_len() != x.n {
        return Err(Error::Dimension {
            what: "push-forward source length",
            expected: f.input_len(),
            found: x.n,
        });
    }
    check_n(f.output_len())?;
    let d = f.seed_len();
    if d >= 63 {
        return Err(Error::BudgetExceeded {
            required: 1u128 << d,
            budget: u64::MAX,
        });
    }
    let seeds = 1u64 << d;
    let per_seed = W::ratio(1, seeds);
    let mut out = vec![W::nil(); 1 << f.output_len()];
    for (xi, px) in x.probs.iter().enumerate() {
        if px.is_negligible() {
            continue;
        }
        let share = px.mul(&per_seed);
        let xs = BitString::from_u64(xi as u64, x.n);
        for y in 0..seeds {
            let z = f.extract(&xs, &BitString::from_u64(y, d)).to_u64() as usize;
            out[z] = out[z].add(&share);
        }
    }
    Ok(Dist {
        n: f.output_len(),
        probs: out,
    })
}
