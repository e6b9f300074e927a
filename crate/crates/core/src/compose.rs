//! Serial composition, block sources, somewhere-random sources, mergers,
//! and the two multi-extractor composition algorithms.
//!
//! Short substrings handed to an extractor are zero-padded on the left
//! (prepended zeros) up to its input length.

use crate::bits::BitString;
use crate::dist::{Dist, Weight};
use crate::error::{check_len, Error, Result};
use crate::extractor::Extractor;

/// `F1 ∘ F2 (x1 ‖ x2, y) = F1(x1, F2(x2, y))`.
#[derive(Clone, Debug)]
pub struct SerialComposition<F1, F2> {
    f1: F1,
    f2: F2,
}

/// Builds `F1 ∘ F2`; `F2` must output exactly `F1`'s seed length.
pub fn compose_serial<F1: Extractor, F2: Extractor>(f1: F1, f2: F2) -> Result<SerialComposition<F1, F2>> {
    check_len("inner output vs outer seed", f1.seed_len(), f2.output_len())?;
    Ok(SerialComposition { f1, f2 })
}

impl<F1: Extractor, F2: Extractor> Extractor for SerialComposition<F1, F2> {
    fn input_len(&self) -> usize {
        self.f1.input_len() + self.f2.input_len()
    }
    fn seed_len(&self) -> usize {
        self.f2.seed_len()
    }
    fn output_len(&self) -> usize {
        self.f1.output_len()
    }
    fn extract(&self, x: &BitString, y: &BitString) -> BitString {
        let n1 = self.f1.input_len();
        let x1 = x.slice(0, n1);
        let x2 = x.slice(n1, self.f2.input_len());
        self.f1.extract(&x1, &self.f2.extract(&x2, y))
    }
    fn extract_index(&self, x: u64, y: u64) -> u64 {
        let n2 = self.f2.input_len();
        let x2 = if n2 == 0 { 0 } else { x & (u64::MAX >> (64 - n2)) };
        let x1 = if n2 >= 64 { 0 } else { x >> n2 };
        self.f1.extract_index(x1, self.f2.extract_index(x2, y))
    }
}

/// Joint distribution of `(X1, X2)` on `n1 + n2` bits with claimed
/// entropies `k1`, `k2` (integers, in bits). Index of `x1 ‖ x2` is
/// `x1·2^{n2} + x2`.
#[derive(Clone, Debug)]
pub struct BlockSource<W> {
    pub n1: usize,
    pub n2: usize,
    pub joint: Dist<W>,
    pub k1: u32,
    pub k2: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BlockVerdict {
    Pass,
    /// `H∞(X1) < k1`.
    Marginal,
    /// `H∞(X2 | X1 = x1) < k2` at the least such `x1`.
    Conditional { x1: u64 },
}

impl<W: Weight> BlockSource<W> {
    pub fn new(n1: usize, n2: usize, joint: Dist<W>, k1: u32, k2: u32) -> Result<Self> {
        check_len("block source joint length", n1 + n2, joint.len_bits())?;
        Ok(Self { n1, n2, joint, k1, k2 })
    }

    pub fn marginal(&self) -> Dist<W> {
        let width = 1usize << self.n2;
        let probs = self
            .joint
            .probs()
            .chunks(width)
            .map(|row| row.iter().fold(W::nil(), |a, p| a.add(p)))
            .collect();
        Dist::new(self.n1, probs).expect("marginal of a valid joint")
    }
}

/// Exact check of both block-source conditions (tolerance 1e-9 for floats).
pub fn check_block_source<W: Weight>(s: &BlockSource<W>) -> Result<BlockVerdict> {
    let le = |a: &W, b: &W| {
        if W::is_exact() {
            a <= b
        } else {
            a.to_f64() <= b.to_f64() + crate::dist::DEFAULT_TOLERANCE
        }
    };
    let cap1 = W::ratio(1, 1u64 << s.k1);
    if !le(&s.marginal().max_weight(), &cap1) {
        return Ok(BlockVerdict::Marginal);
    }
    let cap2 = W::ratio(1, 1u64 << s.k2);
    for (x1, row) in s.joint.probs().chunks(1 << s.n2).enumerate() {
        let mass = row.iter().fold(W::nil(), |a, p| a.add(p));
        if mass.is_negligible() {
            continue;
        }
        let top = row.iter().fold(W::nil(), |m, p| if *p > m { p.clone() } else { m });
        if !le(&top, &mass.mul(&cap2)) {
            return Ok(BlockVerdict::Conditional { x1: x1 as u64 });
        }
    }
    Ok(BlockVerdict::Pass)
}

/// Blocks `Z_1 … Z_b` of `k` bits each together with a selector `Y` in
/// `0..=b`, as a list of atoms `(y, z, weight)` where `z` packs the blocks
/// with `Z_1` most significant.
#[derive(Clone, Debug)]
pub struct SomewhereRandomSource<W> {
    b: usize,
    k: usize,
    atoms: Vec<(usize, u64, W)>,
}

impl<W: Weight> SomewhereRandomSource<W> {
    pub fn new(b: usize, k: usize, atoms: Vec<(usize, u64, W)>) -> Result<Self> {
        if b * k > crate::dist::MAX_DIST_BITS {
            return Err(Error::Precondition(format!("{b} blocks of {k} bits exceed the dense limit")));
        }
        let mut total = W::nil();
        for (y, z, w) in &atoms {
            if *y > b || *z >> (b * k) != 0 || *w < W::nil() {
                return Err(Error::InvalidDistribution(format!("bad atom (y = {y}, z = {z})")));
            }
            total = total.add(w);
        }
        let off = total.sub(&W::unit()).abs();
        if !(off.is_negligible() || (!W::is_exact() && off.to_f64() <= 1e-9)) {
            return Err(Error::InvalidDistribution("atoms do not sum to 1".into()));
        }
        Ok(Self { b, k, atoms })
    }

    pub fn blocks(&self) -> usize {
        self.b
    }

    pub fn block_len(&self) -> usize {
        self.k
    }

    pub fn atoms(&self) -> &[(usize, u64, W)] {
        &self.atoms
    }

    /// Block `i` (1-based) of a packed value.
    pub fn block(&self, z: u64, i: usize) -> u64 {
        (z >> ((self.b - i) * self.k)) & ((1u64 << self.k) - 1)
    }

    /// Distribution of `Z = Z_1 … Z_b`, forgetting the selector.
    pub fn blocks_dist(&self) -> Dist<W> {
        let mut probs = vec![W::nil(); 1 << (self.b * self.k)];
        for (_, z, w) in &self.atoms {
            probs[*z as usize] = probs[*z as usize].add(w);
        }
        Dist::new(self.b * self.k, probs).expect("validated atoms")
    }

    pub fn selector_mass(&self, i: usize) -> W {
        self.atoms
            .iter()
            .filter(|a| a.0 == i)
            .fold(W::nil(), |acc, a| acc.add(&a.2))
    }

    /// `dist((Z_i | Y = i), U_k)`, or `None` when `Pr[Y = i] = 0`.
    pub fn block_distance(&self, i: usize) -> Option<W> {
        let mass = self.selector_mass(i);
        if mass.is_negligible() {
            return None;
        }
        let mut probs = vec![W::nil(); 1 << self.k];
        for (y, z, w) in &self.atoms {
            if *y == i {
                let v = self.block(*z, i) as usize;
                probs[v] = probs[v].add(&w.div(&mass));
            }
        }
        let u = W::ratio(1, 1 << self.k);
        let l1 = probs.iter().fold(W::nil(), |a, p| a.add(&p.sub(&u).abs()));
        Some(l1.div(&W::ratio(2, 1)))
    }

    /// Whether `Y` is a `(k, ε, η)`-selector.
    pub fn is_selector(&self, eps: &W, eta: &W) -> bool {
        let le = |a: &W, b: &W| {
            if W::is_exact() {
                a <= b
            } else {
                a.to_f64() <= b.to_f64() + crate::dist::DEFAULT_TOLERANCE
            }
        };
        le(&self.selector_mass(0), eta)
            && (1..=self.b).all(|i| self.block_distance(i).is_none_or(|d| le(&d, eps)))
    }
}

/// A `b`-block merger `(k)^b × (d) → (m)`.
pub trait Merger: Send + Sync {
    fn block_count(&self) -> usize;
    fn block_len(&self) -> usize;
    fn seed_len(&self) -> usize;
    fn output_len(&self) -> usize;
    fn merge(&self, blocks: &[BitString], seed: &BitString) -> BitString;
}

impl<M: Merger + ?Sized> Merger for &M {
    fn block_count(&self) -> usize {
        (**self).block_count()
    }
    fn block_len(&self) -> usize {
        (**self).block_len()
    }
    fn seed_len(&self) -> usize {
        (**self).seed_len()
    }
    fn output_len(&self) -> usize {
        (**self).output_len()
    }
    fn merge(&self, blocks: &[BitString], seed: &BitString) -> BitString {
        (**self).merge(blocks, seed)
    }
}

/// A two-block merger usable at every block length: `(k')² × (d) → (k' − shrink)`.
pub trait PairMerger: Send + Sync {
    fn seed_len(&self) -> usize;
    fn shrink(&self) -> usize;
    fn merge_pair(&self, a: &BitString, b: &BitString, seed: &BitString) -> BitString;
}

impl<P: PairMerger + ?Sized> PairMerger for &P {
    fn seed_len(&self) -> usize {
        (**self).seed_len()
    }
    fn shrink(&self) -> usize {
        (**self).shrink()
    }
    fn merge_pair(&self, a: &BitString, b: &BitString, seed: &BitString) -> BitString {
        (**self).merge_pair(a, b, seed)
    }
}

/// An extractor on `b·k` input bits read as a `b`-block merger.
#[derive(Clone, Debug)]
pub struct ConcatMerger<E> {
    inner: E,
    blocks: usize,
    block_len: usize,
}

impl<E: Extractor> ConcatMerger<E> {
    pub fn new(inner: E, blocks: usize, block_len: usize) -> Result<Self> {
        check_len("merger extractor input", blocks * block_len, inner.input_len())?;
        Ok(Self {
            inner,
            blocks,
            block_len,
        })
    }

    pub fn inner(&self) -> &E {
        &self.inner
    }
}

/// `M(z1, z2, y) = E(z1 ‖ z2, y)` for an extractor with `n = 2k`.
pub fn two_block_merger<E: Extractor>(e: E, k: usize) -> Result<ConcatMerger<E>> {
    if e.input_len() != 2 * k {
        return Err(Error::Dimension {
            what: "two-block merger input (n = 2k)",
            expected: 2 * k,
            found: e.input_len(),
        });
    }
    ConcatMerger::new(e, 2, k)
}

impl<E: Extractor> Merger for ConcatMerger<E> {
    fn block_count(&self) -> usize {
        self.blocks
    }
    fn block_len(&self) -> usize {
        self.block_len
    }
    fn seed_len(&self) -> usize {
        self.inner.seed_len()
    }
    fn output_len(&self) -> usize {
        self.inner.output_len()
    }
    fn merge(&self, blocks: &[BitString], seed: &BitString) -> BitString {
        assert_eq!(blocks.len(), self.blocks, "merger block count");
        self.inner.extract(&BitString::concat_all(blocks), seed)
    }
}

impl<E: Extractor> PairMerger for ConcatMerger<E> {
    fn seed_len(&self) -> usize {
        self.inner.seed_len()
    }
    fn shrink(&self) -> usize {
        self.block_len - self.inner.output_len()
    }
    fn merge_pair(&self, a: &BitString, b: &BitString, seed: &BitString) -> BitString {
        assert!(self.blocks == 2, "pair merging needs a two-block merger");
        self.inner.extract(&a.concat(b), seed)
    }
}

/// Pair merger from a closure `(a, b, seed) → a.len() − shrink` bits.
pub struct FnPairMerger<F> {
    seed_len: usize,
    shrink: usize,
    f: F,
}

impl<F: Fn(&BitString, &BitString, &BitString) -> BitString + Send + Sync> FnPairMerger<F> {
    pub fn new(seed_len: usize, shrink: usize, f: F) -> Self {
        Self { seed_len, shrink, f }
    }
}

impl<F: Fn(&BitString, &BitString, &BitString) -> BitString + Send + Sync> PairMerger for FnPairMerger<F> {
    fn seed_len(&self) -> usize {
        self.seed_len
    }
    fn shrink(&self) -> usize {
        self.shrink
    }
    fn merge_pair(&self, a: &BitString, b: &BitString, seed: &BitString) -> BitString {
        let out = (self.f)(a, b, seed);
        assert_eq!(out.len(), a.len() - self.shrink, "pair merger output length");
        out
    }
}

/// Multi-block merger from a closure.
pub struct FnMerger<F> {
    blocks: usize,
    block_len: usize,
    seed_len: usize,
    output_len: usize,
    f: F,
}

impl<F: Fn(&[BitString], &BitString) -> BitString + Send + Sync> FnMerger<F> {
    pub fn new(blocks: usize, block_len: usize, seed_len: usize, output_len: usize, f: F) -> Self {
        Self {
            blocks,
            block_len,
            seed_len,
            output_len,
            f,
        }
    }
}

impl<F: Fn(&[BitString], &BitString) -> BitString + Send + Sync> Merger for FnMerger<F> {
    fn block_count(&self) -> usize {
        self.blocks
    }
    fn block_len(&self) -> usize {
        self.block_len
    }
    fn seed_len(&self) -> usize {
        self.seed_len
    }
    fn output_len(&self) -> usize {
        self.output_len
    }
    fn merge(&self, blocks: &[BitString], seed: &BitString) -> BitString {
        (self.f)(blocks, seed)
    }
}

/// The recursive merger `(k)^{2^l} × (l·d) → (k − l·shrink)`: level `l`
/// merges neighbouring pairs with the last seed segment `d_l`, then
/// recurses on `d_1 … d_{l−1}`. With fewer than `2^l` blocks the list is
/// completed with zero blocks at the end.
#[derive(Clone, Debug)]
pub struct RecursiveMerger<P> {
    pair: P,
    levels: usize,
    block_len: usize,
    blocks: usize,
}

impl<P: PairMerger> RecursiveMerger<P> {
    pub fn new(pair: P, levels: usize, block_len: usize) -> Result<Self> {
        if levels * pair.shrink() > block_len {
            return Err(Error::Dimension {
                what: "recursive merger shrink budget",
                expected: block_len,
                found: levels * pair.shrink(),
            });
        }
        Ok(Self {
            pair,
            levels,
            block_len,
            blocks: 1 << levels,
        })
    }

    /// Accepts up to `2^l` blocks (missing ones are zero blocks).
    pub fn with_blocks(pair: P, levels: usize, block_len: usize, blocks: usize) -> Result<Self> {
        if blocks > 1 << levels || blocks == 0 {
            return Err(Error::Precondition(format!(
                "{blocks} blocks do not fit {levels} merge levels"
            )));
        }
        let mut m = Self::new(pair, levels, block_len)?;
        m.blocks = blocks;
        Ok(m)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Every intermediate level, from the input (`x^l`) down to `x^0`.
    pub fn merge_levels(&self, blocks: &[BitString], seed: &BitString) -> Result<Vec<Vec<BitString>>> {
        if blocks.len() > 1 << self.levels || blocks.is_empty() {
            return Err(Error::Dimension {
                what: "recursive merger block count",
                expected: 1 << self.levels,
                found: blocks.len(),
            });
        }
        check_len("recursive merger seed", self.levels * self.pair.seed_len(), seed.len())?;
        let mut level: Vec<BitString> = blocks.to_vec();
        for b in &level {
            check_len("recursive merger block", self.block_len, b.len())?;
        }
        level.resize(1 << self.levels, BitString::zeros(self.block_len));
        let d = self.pair.seed_len();
        let mut trace = vec![level.clone()];
        for j in (1..=self.levels).rev() {
            let segment = seed.slice((j - 1) * d, d);
            level = level
                .chunks(2)
                .map(|pair| self.pair.merge_pair(&pair[0], &pair[1], &segment))
                .collect();
            trace.push(level.clone());
        }
        Ok(trace)
    }
}

impl<P: PairMerger> Merger for RecursiveMerger<P> {
    fn block_count(&self) -> usize {
        self.blocks
    }
    fn block_len(&self) -> usize {
        self.block_len
    }
    fn seed_len(&self) -> usize {
        self.levels * self.pair.seed_len()
    }
    fn output_len(&self) -> usize {
        self.block_len - self.levels * self.pair.shrink()
    }
    fn merge(&self, blocks: &[BitString], seed: &BitString) -> BitString {
        let trace = self.merge_levels(blocks, seed).expect("recursive merger dimensions");
        trace.last().expect("at least the input level")[0].clone()
    }
}

/// Zero-pad on the left to `len` bits.
fn pad(s: &BitString, len: usize) -> BitString {
    s.pad_front(len)
}

/// The intermediate values of `E2 ⊙_M E1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergerTrace {
    pub q: Vec<BitString>,
    pub z: Vec<BitString>,
    pub output: BitString,
}

fn check_merger_chain(
    e1: &dyn Extractor,
    e2: &dyn Extractor,
    m: &dyn Merger,
    n: usize,
) -> Result<()> {
    check_len("E1 input", n, e1.input_len())?;
    check_len("E2 input", n, e2.input_len())?;
    check_len("E1 output vs E2 seed", e2.seed_len(), e1.output_len())?;
    check_len("merger block count", n, m.block_count())?;
    check_len("merger block length", e2.output_len(), m.block_len())?;
    Ok(())
}

/// `E2 ⊙_M E1 (a, r1, r2)`: `q_i = E1(a_[i,n], r1)`,
/// `z_i = E2(a_[1,i−1], q_i)`, output `M(z_1 … z_n, r2)`.
pub fn merger_compose(
    e1: &dyn Extractor,
    e2: &dyn Extractor,
    m: &dyn Merger,
    a: &BitString,
    r1: &BitString,
    r2: &BitString,
) -> Result<BitString> {
    Ok(merger_compose_trace(e1, e2, m, a, r1, r2)?.output)
}

/// [`merger_compose`] keeping every `q_i` and `z_i`.
pub fn merger_compose_trace(
    e1: &dyn Extractor,
    e2: &dyn Extractor,
    m: &dyn Merger,
    a: &BitString,
    r1: &BitString,
    r2: &BitString,
) -> Result<MergerTrace> {
    let n = a.len();
    check_merger_chain(e1, e2, m, n)?;
    check_len("E1 seed", e1.seed_len(), r1.len())?;
    check_len("merger seed", m.seed_len(), r2.len())?;
    let mut q = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    for i in 0..n {
        let qi = e1.extract(&pad(&a.slice(i, n - i), n), r1);
        z.push(e2.extract(&pad(&a.slice(0, i), n), &qi));
        q.push(qi);
    }
    let output = m.merge(&z, r2);
    Ok(MergerTrace { q, z, output })
}

/// Rows of the dynamic program; `rows[j][i]` is the `(j+1)`-fold composition
/// evaluated on `x_[i+1, n]` (0-based `i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpTrace {
    pub rows: Vec<Vec<BitString>>,
}

impl DpTrace {
    pub fn output(&self) -> &BitString {
        &self.rows.last().expect("at least one row")[0]
    }
}

/// Evaluates `E_t ⊙_{M_{t−1}} ( … ⊙_{M_1} E_1)` on `(x, y y_1 … y_{t−1})`
/// by filling the matrix row by row.
///
/// Row 1 is `E_1(x_[i,n], y)`. For row `j + 1`, cell `i`, the blocks are
/// `z_l = E_{j+1}(x_[i,l−1], M_{j,l})` for `l = i..n`; the merger takes `n`
/// blocks, and the `i − 1` leading positions of the padded input
/// `0^{i−1} x_[i,n]` all produce `z_i`, so the list is `z_i` repeated `i`
/// times followed by `z_{i+1} … z_n`. This keeps every cell equal to the
/// composition applied to the padded suffix.
pub fn iterated_compose_dp(
    extractors: &[&dyn Extractor],
    mergers: &[&dyn Merger],
    x: &BitString,
    y: &BitString,
    ys: &[BitString],
) -> Result<DpTrace> {
    let t = extractors.len();
    if t == 0 {
        return Err(Error::Precondition("need at least one extractor".into()));
    }
    check_len("merger count", t - 1, mergers.len())?;
    check_len("merger seed count", t - 1, ys.len())?;
    let n = x.len();
    check_len("E_1 input", n, extractors[0].input_len())?;
    check_len("E_1 seed", extractors[0].seed_len(), y.len())?;
    let mut rows: Vec<Vec<BitString>> = Vec::with_capacity(t);
    rows.push(
        (0..n)
            .map(|i| extractors[0].extract(&pad(&x.slice(i, n - i), n), y))
            .collect(),
    );
    for j in 1..t {
        let (e, m) = (extractors[j], mergers[j - 1]);
        check_len("E input", n, e.input_len())?;
        check_len("previous output vs E seed", e.seed_len(), rows[j - 1][0].len())?;
        check_len("merger block count", n, m.block_count())?;
        check_len("merger block length", e.output_len(), m.block_len())?;
        check_len("merger seed", m.seed_len(), ys[j - 1].len())?;
        let prev = &rows[j - 1];
        let row = (0..n)
            .map(|i| {
                let z: Vec<BitString> = (i..n)
                    .map(|l| e.extract(&pad(&x.slice(i, l - i), n), &prev[l]))
                    .collect();
                let mut blocks = vec![z[0].clone(); i];
                blocks.extend(z);
                m.merge(&blocks, &ys[j - 1])
            })
            .collect();
        rows.push(row);
    }
    Ok(DpTrace { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractor::{constant, seed_pass_through, FnExtractor};
    use num::BigRational;

    fn bits(v: u64, len: usize) -> BitString {
        BitString::from_u64(v, len)
    }

    #[test]
    fn serial_with_pass_through_is_outer() {
        let f1 = FnExtractor::new(2, 2, 2, |x, y| x ^ y);
        let c = compose_serial(&f1, seed_pass_through(3, 2)).unwrap();
        for x1 in 0..4 {
            for x2 in 0..8 {
                for y in 0..4 {
                    assert_eq!(c.extract_index((x1 << 3) | x2, y), f1.extract_index(x1, y));
                    let slow = c.extract(&bits((x1 << 3) | x2, 5), &bits(y, 2)).to_u64();
                    assert_eq!(slow, f1.extract_index(x1, y));
                }
            }
        }
        assert!(compose_serial(&f1, seed_pass_through(3, 3)).is_err());
        let k = compose_serial(constant(2, 2, 2, 1), seed_pass_through(1, 2)).unwrap();
        assert!((0..8).all(|x| (0..4).all(|y| k.extract_index(x, y) == 1)));
    }

    #[test]
    fn block_source_checks() {
        let u = BlockSource::new(2, 2, Dist::<BigRational>::uniform(4).unwrap(), 2, 2).unwrap();
        assert_eq!(check_block_source(&u).unwrap(), BlockVerdict::Pass);
        // X2 = X1.
        let mut probs = vec![BigRational::ratio(0, 1); 16];
        for x in 0..4 {
            probs[x * 4 + x] = BigRational::ratio(1, 4);
        }
        let copy = BlockSource::new(2, 2, Dist::new(4, probs).unwrap(), 2, 1).unwrap();
        assert_eq!(check_block_source(&copy).unwrap(), BlockVerdict::Conditional { x1: 0 });
        let strong = BlockSource::new(2, 2, Dist::<BigRational>::uniform(4).unwrap(), 3, 0).unwrap();
        assert_eq!(check_block_source(&strong).unwrap(), BlockVerdict::Marginal);
    }

    #[test]
    fn recursive_merger_base_cases() {
        let xor = FnPairMerger::new(1, 0, |a: &BitString, b: &BitString, s: &BitString| {
            let mut out = a.xor(b);
            if s.get(0) {
                out = out.complement();
            }
            out
        });
        let m0 = RecursiveMerger::new(&xor, 0, 3).unwrap();
        assert_eq!(m0.merge(&[bits(5, 3)], &BitString::zeros(0)), bits(5, 3));
        let m1 = RecursiveMerger::new(&xor, 1, 3).unwrap();
        assert_eq!(m1.merge(&[bits(5, 3), bits(3, 3)], &bits(1, 1)), bits(5, 3).xor(&bits(3, 3)).complement());
        assert_eq!(m1.output_len(), 3);
        assert_eq!(m1.seed_len(), 1);
    }

    #[test]
    fn two_block_merger_needs_even_split() {
        let e = seed_pass_through(4, 2);
        assert!(two_block_merger(&e, 2).is_ok());
        assert!(two_block_merger(&e, 3).is_err());
    }

    #[test]
    fn selector_checks() {
        // b = 2, k = 1: Z_1 uniform, Z_2 = 0, selector always 1.
        let half = BigRational::ratio(1, 2);
        let s = SomewhereRandomSource::new(2, 1, vec![(1, 0b00, half.clone()), (1, 0b10, half)]).unwrap();
        let zero = BigRational::ratio(0, 1);
        assert!(s.is_selector(&zero, &zero));
        assert_eq!(s.block_distance(1), Some(zero.clone()));
        assert_eq!(s.block_distance(2), None);
        assert!(crate::dist::has_min_entropy(&s.blocks_dist(), 2));
    }

    #[test]
    fn dp_single_extractor_is_plain_evaluation() {
        let e = FnExtractor::new(3, 2, 2, |x, y| (x ^ y) & 3);
        let x = bits(0b110, 3);
        let y = bits(0b01, 2);
        let trace = iterated_compose_dp(&[&e], &[], &x, &y, &[]).unwrap();
        assert_eq!(trace.output(), &e.extract(&x, &y));
    }
}
