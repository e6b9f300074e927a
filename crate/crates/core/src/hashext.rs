//! Toeplitz hashing over GF(2), collision measures, and the extractor
//! `F(x, h) = h ‖ h(x)`.

use num::rational::Ratio;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::combin::binomial;
use crate::dist::{Dist, Weight};
use crate::error::{check_len, Error, Result};
use crate::extractor::Extractor;
use crate::graph::VerifyConfig;

/// Largest hash-index length for exhaustive enumeration of a family.
pub const MAX_FAMILY_BITS: usize = 24;

/// A family `H = {h : (n) → (l)}` whose members are named by `index_len`
/// bit strings.
pub trait HashFamily: Send + Sync {
    fn input_len(&self) -> usize;
    fn output_len(&self) -> usize;
    fn index_len(&self) -> usize;
    fn eval(&self, h: &BitString, x: &BitString) -> BitString;

    fn eval_index(&self, h: u64, x: u64) -> u64 {
        self.eval(
            &BitString::from_u64(h, self.index_len()),
            &BitString::from_u64(x, self.input_len()),
        )
        .to_u64()
    }
}

/// `l × n` Toeplitz matrices over GF(2), named by their `n + l − 1`
/// diagonals: entry `(r, c)` is bit `c − r + l − 1` of the index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToeplitzFamily {
    n: usize,
    l: usize,
}

impl ToeplitzFamily {
    pub fn new(n: usize, l: usize) -> Result<Self> {
        if n == 0 || l == 0 {
            return Err(Error::Precondition("Toeplitz family needs n, l >= 1".into()));
        }
        Ok(Self { n, l })
    }

    /// Row `r` of the matrix for index `h`.
    pub fn row(&self, h: &BitString, r: usize) -> BitString {
        h.slice(self.l - 1 - r, self.n)
    }
}

impl HashFamily for ToeplitzFamily {
    fn input_len(&self) -> usize {
        self.n
    }
    fn output_len(&self) -> usize {
        self.l
    }
    fn index_len(&self) -> usize {
        self.n + self.l - 1
    }

    fn eval(&self, h: &BitString, x: &BitString) -> BitString {
        assert_eq!(h.len(), self.index_len(), "hash index length");
        assert_eq!(x.len(), self.n, "hash input length");
        let mut out = BitString::zeros(self.l);
        for r in 0..self.l {
            if self.row(h, r).dot(x) {
                out.set(r, true);
            }
        }
        out
    }

    fn eval_index(&self, h: u64, x: u64) -> u64 {
        if self.index_len() > 64 {
            return self
                .eval(
                    &BitString::from_u64(h, self.index_len()),
                    &BitString::from_u64(x, self.n),
                )
                .to_u64();
        }
        // As an integer, row r is (h >> r) masked to n bits.
        let mask = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        let mut out = 0u64;
        for r in 0..self.l {
            let bit = ((h >> r) & mask & x).count_ones() as u64 & 1;
            out |= bit << (self.l - 1 - r);
        }
        out
    }
}

/// `h(x)` with length checks.
pub fn hash_eval<H: HashFamily + ?Sized>(family: &H, h: &BitString, x: &BitString) -> Result<BitString> {
    check_len("hash index", family.index_len(), h.len())?;
    check_len("hash input", family.input_len(), x.len())?;
    Ok(family.eval(h, x))
}

/// `Pr_h[h(x1) = h(x2)]`, counted over the whole family.
pub fn collision_prob<H: HashFamily + ?Sized>(family: &H, x1: &BitString, x2: &BitString) -> Result<Ratio<u64>> {
    check_len("hash input", family.input_len(), x1.len())?;
    check_len("hash input", family.input_len(), x2.len())?;
    if x1 == x2 {
        return Err(Error::InvalidPair);
    }
    let bits = family.index_len();
    if bits > MAX_FAMILY_BITS {
        return Err(Error::BudgetExceeded {
            required: 1u128 << bits,
            budget: 1 << MAX_FAMILY_BITS,
        });
    }
    let (a, b) = (x1.to_u64(), x2.to_u64());
    let hits = (0..1u64 << bits)
        .filter(|&h| family.eval_index(h, a) == family.eval_index(h, b))
        .count() as u64;
    Ok(Ratio::new(hits, 1 << bits))
}

/// `col(X) = Σ_a X(a)²`.
pub fn collision_measure<W: Weight>(x: &Dist<W>) -> W {
    x.probs().iter().fold(W::nil(), |acc, p| acc.add(&p.mul(p)))
}

/// `F(x, h) = h ‖ h(x)`, seed length `index_len`.
#[derive(Clone, Debug)]
pub struct HashExtractor<H> {
    family: H,
}

impl<H: HashFamily> HashExtractor<H> {
    pub fn new(family: H) -> Self {
        Self { family }
    }

    pub fn family(&self) -> &H {
        &self.family
    }
}

impl<H: HashFamily> Extractor for HashExtractor<H> {
    fn input_len(&self) -> usize {
        self.family.input_len()
    }
    fn seed_len(&self) -> usize {
        self.family.index_len()
    }
    fn output_len(&self) -> usize {
        self.family.index_len() + self.family.output_len()
    }
    fn extract(&self, x: &BitString, y: &BitString) -> BitString {
        y.concat(&self.family.eval(y, x))
    }
    fn extract_index(&self, x: u64, y: u64) -> u64 {
        (y << self.family.output_len()) | self.family.eval_index(y, x)
    }
}

/// Result of sweeping every flat source of one size through the hash
/// extractor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashSweep {
    pub n: usize,
    pub l: usize,
    pub k: usize,
    /// Sets actually enumerated (each stands for its translation class).
    pub sets_checked: u64,
    /// Sets whose distance exceeds `½·√(L/K)`.
    pub violations: u64,
    /// A set of maximal distance, lexicographically least among those
    /// enumerated.
    pub worst_set: Vec<u64>,
    /// The maximal distance is `worst_numerator / denominator`.
    pub worst_numerator: u64,
    pub denominator: u64,
}

impl HashSweep {
    pub fn worst(&self) -> f64 {
        self.worst_numerator as f64 / self.denominator as f64
    }

    /// `½·√(L/K)`.
    pub fn bound(&self) -> f64 {
        0.5 * ((1u64 << self.l) as f64 / self.k as f64).sqrt()
    }
}

/// Exact distance from uniform of the hash extractor's output on the flat
/// source `set`, as `numerator / (K·L·|H|)`.
pub fn hash_flat_distance(family: &ToeplitzFamily, set: &[u64]) -> (u64, u64) {
    let (d, l) = (family.index_len(), family.output_len());
    let (kk, ll) = (set.len() as u64, 1u64 << l);
    let mut sum = 0u64;
    let mut counts = vec![0u64; 1 << l];
    for h in 0..1u64 << d {
        counts.iter_mut().for_each(|c| *c = 0);
        for &x in set {
            counts[family.eval_index(h, x) as usize] += 1;
        }
        sum += counts.iter().map(|&c| (ll * c).saturating_sub(kk)).sum::<u64>();
    }
    (sum, kk * ll * (1 << d))
}

/// Whether `num / den ≤ ½·√(L/K)`, exactly: `4·num²·K ≤ L·den²`.
fn within_bound(num: u64, den: u64, l: usize, k: usize) -> bool {
    let lhs = 4 * (num as u128) * (num as u128) * k as u128;
    let rhs = (1u128 << l) * (den as u128) * (den as u128);
    lhs <= rhs
}

/// Bitsliced state of one partial set. Lanes are hash indices; for each
/// output value `v`, `level[j]` marks lanes whose count at `v` is exactly
/// `j < ⌈K/L⌉` and `full` marks lanes with count at least `⌈K/L⌉`.
#[derive(Clone)]
struct Lanes {
    level: Vec<u64>,
    full: Vec<u64>,
    excess: u64,
}

struct Kernel {
    /// `values * words`, the stride of one level.
    stride: usize,
    /// `eq[x * stride + v * words ..]`: lanes `h` with `h(x) = v`.
    eq: Vec<u64>,
    c_full: usize,
    part_gain: u64,
    full_gain: u64,
}

impl Kernel {
    fn new(family: &ToeplitzFamily, k: usize) -> Self {
        let (n, d, l) = (family.input_len(), family.index_len(), family.output_len());
        let lanes = 1usize << d;
        let words = lanes.div_ceil(64);
        let values = 1usize << l;
        let stride = values * words;
        let mut eq = vec![0u64; (1 << n) * stride];
        for x in 0..1usize << n {
            for h in 0..lanes {
                let v = family.eval_index(h as u64, x as u64) as usize;
                eq[x * stride + v * words + h / 64] |= 1 << (h % 64);
            }
        }
        let (kk, ll) = (k as u64, values as u64);
        let c_full = kk.div_ceil(ll);
        Self {
            stride,
            eq,
            c_full: c_full as usize,
            part_gain: (ll * c_full).saturating_sub(kk),
            full_gain: ll,
        }
    }

    fn empty(&self) -> Lanes {
        let mut level = vec![0u64; self.c_full * self.stride];
        // Every lane starts at count 0 for every value.
        level[..self.stride].fill(u64::MAX);
        Lanes {
            level,
            full: vec![0; self.stride],
            excess: 0,
        }
    }

    /// Excess gained by adding `x`: `Σ_h [L·(c+1) − K]⁺ − [L·c − K]⁺`.
    #[inline]
    fn gain(&self, s: &Lanes, x: usize) -> u64 {
        let e = &self.eq[x * self.stride..(x + 1) * self.stride];
        let mut full = 0u32;
        for (f, e) in s.full.iter().zip(e) {
            full += (f & e).count_ones();
        }
        let mut total = full as u64 * self.full_gain;
        if self.part_gain > 0 {
            let last = &s.level[(self.c_full - 1) * self.stride..];
            let mut part = 0u32;
            for (p, e) in last.iter().zip(e) {
                part += (p & e).count_ones();
            }
            total += part as u64 * self.part_gain;
        }
        total
    }

    fn add(&self, s: &mut Lanes, x: usize) {
        s.excess += self.gain(s, x);
        let e = &self.eq[x * self.stride..(x + 1) * self.stride];
        let top = (self.c_full - 1) * self.stride;
        for (i, &bits) in e.iter().enumerate() {
            s.full[i] |= s.level[top + i] & bits;
            for j in (1..self.c_full).rev() {
                let lo = s.level[(j - 1) * self.stride + i];
                let cur = &mut s.level[j * self.stride + i];
                *cur = (*cur & !bits) | (lo & bits);
            }
            s.level[i] &= !bits;
        }
    }
}

struct Best {
    num: u64,
    set: Vec<u64>,
    checked: u64,
    violations: u64,
}

/// Exhaustive sweep of every flat source of size `k` over `{0,1}^n`.
///
/// The distance is invariant under translating the set by any `a`
/// (`h(x ⊕ a) = h(x) ⊕ h(a)` only relabels outputs), so only sets
/// containing `0` are enumerated: `C(2^n − 1, k − 1)` of them, which is
/// what `cfg.max_subsets` is checked against.
pub fn exhaustive_hash_sweep(family: &ToeplitzFamily, k: usize, cfg: &VerifyConfig) -> Result<HashSweep> {
    let (n, l, d) = (family.input_len(), family.output_len(), family.index_len());
    if n > 10 || d > 16 || l > 8 {
        return Err(Error::Precondition(format!(
            "exhaustive sweep supports n <= 10, n + l - 1 <= 16, l <= 8; got n = {n}, l = {l}"
        )));
    }
    let big_n = 1usize << n;
    if k == 0 || k > big_n {
        return Err(Error::Precondition(format!("need 1 <= K <= 2^n, got {k}")));
    }
    cfg.check_budget(binomial(big_n as u64 - 1, k as u64 - 1))?;
    let kernel = Kernel::new(family, k);
    let den = (k as u64) << (l + d);
    let threshold_ok = |num: u64| within_bound(num, den, l, k);

    let mut root = kernel.empty();
    kernel.add(&mut root, 0);

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        kernel: &Kernel,
        stack: &mut [Lanes],
        set: &mut Vec<u64>,
        next: usize,
        remaining: usize,
        big_n: usize,
        ok: &dyn Fn(u64) -> bool,
        best: &mut Best,
    ) {
        let (state, rest) = stack.split_first_mut().expect("stack depth");
        if remaining == 1 {
            for x in next..big_n {
                let num = state.excess + kernel.gain(state, x);
                best.checked += 1;
                if !ok(num) {
                    best.violations += 1;
                }
                if num > best.num || best.set.is_empty() {
                    best.num = num;
                    best.set = set.clone();
                    best.set.push(x as u64);
                }
            }
            return;
        }
        for x in next..=big_n - remaining {
            rest[0].clone_from(state);
            kernel.add(&mut rest[0], x);
            set.push(x as u64);
            dfs(kernel, rest, set, x + 1, remaining - 1, big_n, ok, best);
            set.pop();
        }
    }

    let fresh = || Best {
        num: 0,
        set: Vec::new(),
        checked: 0,
        violations: 0,
    };
    let best = if k == 1 {
        Best {
            num: root.excess,
            set: vec![0],
            checked: 1,
            violations: u64::from(!threshold_ok(root.excess)),
        }
    } else {
        // One branch per second element, merged in order.
        let branch = |x: usize| {
            let mut b = fresh();
            let mut child = root.clone();
            kernel.add(&mut child, x);
            let mut set = vec![0, x as u64];
            if k == 2 {
                let num = child.excess;
                b.checked = 1;
                b.violations = u64::from(!threshold_ok(num));
                b.num = num;
                b.set = set;
            } else {
                let mut stack = vec![child; k - 1];
                dfs(&kernel, &mut stack, &mut set, x + 1, k - 2, big_n, &threshold_ok, &mut b);
            }
            b
        };
        let last = big_n - (k - 1);
        let parts: Vec<Best> = if cfg.threads == 1 {
            (1..=last).map(branch).collect()
        } else {
            cfg.run(|| (1..=last).into_par_iter().map(branch).collect())
        };
        parts.into_iter().fold(fresh(), |mut acc, b| {
            acc.checked += b.checked;
            acc.violations += b.violations;
            if !b.set.is_empty() && (acc.set.is_empty() || b.num > acc.num) {
                acc.num = b.num;
                acc.set = b.set;
            }
            acc
        })
    };
    Ok(HashSweep {
        n,
        l,
        k,
        sets_checked: best.checked,
        violations: best.violations,
        worst_set: best.set,
        worst_numerator: best.num,
        denominator: den,
    })
}
