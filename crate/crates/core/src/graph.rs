//! Bipartite multigraphs as the graph view of extractors, and exact
//! verifiers for the disperser, extractor and prefix-extractor properties.
//!
//! Left vertex `x` has `D` ordered edges; edge `y` goes to `F(x, y)`. All
//! verifiers compare in integers with `ε = p/q`, so there is no float
//! ambiguity at the pass/fail boundary.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::bits::BitString;
use crate::combin::{binomial, for_each_combination};
use crate::error::{Error, Result};
use crate::extractor::Extractor;
use crate::rational::Eps;

/// Default subset-evaluation budget for the exhaustive verifiers.
pub const DEFAULT_MAX_SUBSETS: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    degree: usize,
    adj: Vec<u32>,
}

impl BipartiteGraph {
    /// `adj` holds the `D` endpoints of left vertex 0, then of vertex 1, ...
    pub fn new(n_left: usize, n_right: usize, degree: usize, adj: Vec<u32>) -> Result<Self> {
        if adj.len() != n_left * degree {
            return Err(Error::Dimension {
                what: "adjacency entries",
                expected: n_left * degree,
                found: adj.len(),
            });
        }
        if n_right > u32::MAX as usize {
            return Err(Error::Construction("right part too large".into()));
        }
        if let Some(pos) = adj.iter().position(|&z| z as usize >= n_right) {
            return Err(Error::Construction(format!(
                "edge {} of left vertex {} points to {} outside [0, {n_right})",
                pos % degree.max(1),
                pos / degree.max(1),
                adj[pos]
            )));
        }
        Ok(Self {
            n_left,
            n_right,
            degree,
            adj,
        })
    }

    pub fn from_lists(n_right: usize, lists: &[Vec<u32>]) -> Result<Self> {
        let degree = lists.first().map_or(0, Vec::len);
        if let Some(bad) = lists.iter().position(|l| l.len() != degree) {
            return Err(Error::Dimension {
                what: "adjacency list length",
                expected: degree,
                found: lists[bad].len(),
            });
        }
        Self::new(lists.len(), n_right, degree, lists.concat())
    }

    /// `N`.
    pub fn left_size(&self) -> usize {
        self.n_left
    }

    /// `M`.
    pub fn right_size(&self) -> usize {
        self.n_right
    }

    /// `D`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn adjacency(&self) -> &[u32] {
        &self.adj
    }

    /// Ordered edge list of left vertex `a`.
    pub fn neighbors(&self, a: usize) -> &[u32] {
        &self.adj[a * self.degree..(a + 1) * self.degree]
    }

    /// `Γ(a)`, deduplicated.
    pub fn neighbor_set(&self, a: usize) -> BTreeSet<u32> {
        self.neighbors(a).iter().copied().collect()
    }

    /// `Γ(A)`.
    pub fn neighborhood(&self, left: &[usize]) -> BTreeSet<u32> {
        left.iter().flat_map(|&a| self.neighbors(a).iter().copied()).collect()
    }

    /// `E(A, B)` with multiplicity.
    pub fn edge_count(&self, left: &[usize], right: &[usize]) -> u64 {
        let mut in_b = vec![false; self.n_right];
        for &z in right {
            in_b[z] = true;
        }
        left.iter()
            .flat_map(|&a| self.neighbors(a))
            .filter(|&&z| in_b[z as usize])
            .count() as u64
    }

    /// Edge counts `E(A, {z})` for every right vertex `z`.
    pub fn right_loads(&self, left: impl IntoIterator<Item = usize>) -> Vec<u64> {
        let mut load = vec![0u64; self.n_right];
        for a in left {
            for &z in self.neighbors(a) {
                load[z as usize] += 1;
            }
        }
        load
    }

    /// Relabels right vertex `z` as `z >> shift`. Needs `M` a power of two;
    /// this is the graph of the prefix map `F|_{m - shift}`.
    pub fn prefix_graph(&self, shift: u32) -> Result<Self> {
        if !self.n_right.is_power_of_two() || (1usize << shift) > self.n_right {
            return Err(Error::Precondition(format!(
                "prefix graph needs M a power of two at least 2^{shift}, got {}",
                self.n_right
            )));
        }
        Ok(Self {
            n_left: self.n_left,
            n_right: self.n_right >> shift,
            degree: self.degree,
            adj: self.adj.iter().map(|&z| z >> shift).collect(),
        })
    }
}

/// The graph of `F`: left `2^n`, right `2^m`, edge `y` of `x` to `F(x, y)`.
pub fn graph_of_function<E: Extractor + ?Sized>(f: &E) -> Result<BipartiteGraph> {
    let (n, d, m) = (f.input_len(), f.seed_len(), f.output_len());
    if n + d > 30 || m > 31 {
        return Err(Error::BudgetExceeded {
            required: 1u128 << (n + d).min(127),
            budget: 1 << 30,
        });
    }
    let (big_n, big_d, big_m) = (1usize << n, 1usize << d, 1u64 << m);
    let mut adj = Vec::with_capacity(big_n * big_d);
    for x in 0..big_n as u64 {
        for y in 0..big_d as u64 {
            let z = f.extract_index(x, y);
            if z >= big_m {
                return Err(Error::Construction(format!(
                    "F({x}, {y}) = {z} is outside [0, {big_m})"
                )));
            }
            adj.push(z as u32);
        }
    }
    BipartiteGraph::new(big_n, big_m as usize, big_d, adj)
}

/// A graph whose sizes are powers of two, seen as an extractor.
#[derive(Clone, Debug)]
pub struct GraphExtractor {
    graph: BipartiteGraph,
    n: usize,
    d: usize,
    m: usize,
}

impl GraphExtractor {
    pub fn new(graph: BipartiteGraph) -> Result<Self> {
        let log = |v: usize, what: &str| {
            if v.is_power_of_two() {
                Ok(v.trailing_zeros() as usize)
            } else {
                Err(Error::Precondition(format!("{what} = {v} is not a power of two")))
            }
        };
        let n = log(graph.left_size(), "N")?;
        let d = log(graph.degree(), "D")?;
        let m = log(graph.right_size(), "M")?;
        Ok(Self { graph, n, d, m })
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }
}

impl Extractor for GraphExtractor {
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
        self.graph.neighbors(x as usize)[y as usize] as u64
    }
}

/// Parameters of a `(k, ε)`-extractor `(n) × (d) → (m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtractorSpec {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub k: usize,
    pub eps: Eps,
}

/// Exhaustive-verifier configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Maximum number of subsets a verifier may enumerate.
    pub max_subsets: u64,
    /// Worker threads; 0 uses the global pool, 1 runs sequentially.
    pub threads: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_subsets: DEFAULT_MAX_SUBSETS,
            threads: 1,
        }
    }
}

impl VerifyConfig {
    pub fn with_budget(max_subsets: u64) -> Self {
        Self {
            max_subsets,
            ..Self::default()
        }
    }

    /// Errors unless `required` subsets fit in the budget.
    pub fn check_budget(&self, required: u128) -> Result<()> {
        if required > self.max_subsets as u128 {
            Err(Error::BudgetExceeded {
                required,
                budget: self.max_subsets,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn run<T: Send>(&self, job: impl FnOnce() -> T + Send) -> T {
        match self.threads {
            0 => job(),
            t => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
                Ok(pool) => pool.install(job),
                Err(_) => job(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<W> {
    Pass,
    Fail(W),
}

impl<W> Verdict<W> {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        }
    }
}

/// `K` left vertices all avoiding the right set `Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisperserWitness {
    pub left: Vec<usize>,
    pub avoided: Vec<usize>,
}

/// A right set `B` and a `K`-set `A` with `E(A,B) ≥ KD(|B|/M + ε)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractorWitness {
    pub right: Vec<usize>,
    pub left: Vec<usize>,
    pub edges: u64,
}

/// The prefix level `i` (output truncated to `m - i` bits, `K = 2^{k-i}`)
/// at which the extractor check failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixWitness {
    pub level: usize,
    pub witness: ExtractorWitness,
}

fn ceil_eps_times(eps: Eps, m: usize) -> usize {
    let num = *eps.numer() as u128 * m as u128;
    let den = *eps.denom() as u128;
    num.div_ceil(den) as usize
}

fn check_k(g: &BipartiteGraph, k: usize) -> Result<()> {
    if k == 0 || k > g.left_size() {
        Err(Error::Precondition(format!(
            "need 1 <= K <= N, got K = {k}, N = {}",
            g.left_size()
        )))
    } else {
        Ok(())
    }
}

/// Disperser check: fails iff some `L = ⌈εM⌉` right vertices are avoided by
/// at least `K` left vertices. Enumerates all `C(M, L)` sets.
pub fn verify_disperser(
    g: &BipartiteGraph,
    k: usize,
    eps: Eps,
    cfg: &VerifyConfig,
) -> Result<Verdict<DisperserWitness>> {
    check_k(g, k)?;
    let m = g.right_size();
    let l = ceil_eps_times(eps, m);
    cfg.check_budget(binomial(m as u64, l as u64))?;
    let words = m.div_ceil(64).max(1);
    let masks: Vec<Vec<u64>> = (0..g.left_size())
        .map(|a| {
            let mut w = vec![0u64; words];
            for &z in g.neighbors(a) {
                w[z as usize / 64] |= 1 << (z % 64);
            }
            w
        })
        .collect();
    let mut witness = None;
    let mut y_mask = vec![0u64; words];
    for_each_combination(m, l, |ys| {
        y_mask.iter_mut().for_each(|w| *w = 0);
        for &z in ys {
            y_mask[z / 64] |= 1 << (z % 64);
        }
        let mut avoiding = Vec::with_capacity(k);
        for (a, mask) in masks.iter().enumerate() {
            if mask.iter().zip(&y_mask).all(|(x, y)| x & y == 0) {
                avoiding.push(a);
                if avoiding.len() == k {
                    witness = Some(DisperserWitness {
                        left: avoiding,
                        avoided: ys.to_vec(),
                    });
                    return false;
                }
            }
        }
        true
    });
    Ok(witness.map_or(Verdict::Pass, Verdict::Fail))
}

/// Incremental state over right sets `B`, enumerated as bit masks.
struct BScan<'g> {
    g: &'g BipartiteGraph,
    /// For each right vertex, the (left vertex, multiplicity) pairs into it.
    incoming: &'g [Vec<(u32, u32)>],
    counts: Vec<u32>,
    hist: Vec<u32>,
}

impl<'g> BScan<'g> {
    fn new(g: &'g BipartiteGraph, incoming: &'g [Vec<(u32, u32)>], mask: u64) -> Self {
        let mut s = Self {
            g,
            incoming,
            counts: vec![0; g.left_size()],
            hist: vec![0; g.degree() + 1],
        };
        s.hist[0] = g.left_size() as u32;
        for z in 0..g.right_size() {
            if mask >> z & 1 == 1 {
                s.toggle(z, true);
            }
        }
        s
    }

    #[inline]
    fn toggle(&mut self, z: usize, on: bool) {
        for &(a, mult) in &self.incoming[z] {
            let c = &mut self.counts[a as usize];
            self.hist[*c as usize] -= 1;
            if on {
                *c += mult;
            } else {
                *c -= mult;
            }
            self.hist[*c as usize] += 1;
        }
    }

    /// Largest `E(A, B)` over `|A| = k`.
    #[inline]
    fn top_k(&self, k: usize) -> u64 {
        let mut need = k as u64;
        let mut total = 0u64;
        for v in (1..self.hist.len()).rev() {
            let take = need.min(self.hist[v] as u64);
            total += take * v as u64;
            need -= take;
            if need == 0 {
                break;
            }
        }
        total
    }

    fn witness(&self, mask: u64, k: usize) -> ExtractorWitness {
        let mut order: Vec<usize> = (0..self.g.left_size()).collect();
        order.sort_by(|&a, &b| self.counts[b].cmp(&self.counts[a]).then(a.cmp(&b)));
        order.truncate(k);
        order.sort_unstable();
        ExtractorWitness {
            right: (0..self.g.right_size()).filter(|z| mask >> z & 1 == 1).collect(),
            edges: order.iter().map(|&a| self.counts[a] as u64).sum(),
            left: order,
        }
    }
}

fn incoming(g: &BipartiteGraph) -> Vec<Vec<(u32, u32)>> {
    let mut inc: Vec<Vec<(u32, u32)>> = vec![Vec::new(); g.right_size()];
    for a in 0..g.left_size() {
        let mut seen: Vec<u32> = g.neighbors(a).to_vec();
        seen.sort_unstable();
        let mut i = 0;
        while i < seen.len() {
            let z = seen[i];
            let mut j = i;
            while j < seen.len() && seen[j] == z {
                j += 1;
            }
            inc[z as usize].push((a as u32, (j - i) as u32));
            i = j;
        }
    }
    inc
}

/// Extractor check through the one-sided reduction: for every `B ⊆ [M]`
/// the `K` left vertices with most edges into `B` must satisfy
/// `E(A,B) < KD(|B|/M + ε)`. Returns the failing `B` with the least bit
/// mask (bit `z` set for vertex `z`), whatever the thread count.
pub fn verify_extractor(
    g: &BipartiteGraph,
    k: usize,
    eps: Eps,
    cfg: &VerifyConfig,
) -> Result<Verdict<ExtractorWitness>> {
    check_k(g, k)?;
    let m = g.right_size();
    if m >= 63 {
        return Err(Error::BudgetExceeded {
            required: 1u128 << m.min(127),
            budget: cfg.max_subsets,
        });
    }
    cfg.check_budget(1u128 << m)?;
    if g.degree() == 0 {
        // E(A, B) = 0 and KD(...) = 0: the strict inequality fails at B = ∅.
        return Ok(Verdict::Fail(ExtractorWitness {
            right: vec![],
            left: (0..k).collect(),
            edges: 0,
        }));
    }
    let inc = incoming(g);
    let (p, q) = (*eps.numer() as u128, *eps.denom() as u128);
    let kd = (k * g.degree()) as u128;
    let bound = |size: u32| kd * (size as u128 * q + p * m as u128);
    let mq = m as u128 * q;
    let total = 1u64 << m;

    let scan = |start: u64, end: u64| -> Option<ExtractorWitness> {
        let mut s = BScan::new(g, &inc, start);
        let mut mask = start;
        loop {
            if s.top_k(k) as u128 * mq >= bound(mask.count_ones()) {
                return Some(s.witness(mask, k));
            }
            let next = mask + 1;
            if next >= end {
                return None;
            }
            // Clear the trailing ones of `mask`, then set the next bit.
            let ones = mask.trailing_ones();
            for z in 0..ones {
                s.toggle(z as usize, false);
            }
            s.toggle(ones as usize, true);
            mask = next;
        }
    };

    let chunk_bits = m.saturating_sub(8).min(16);
    let chunks = total >> chunk_bits;
    let found = if chunks <= 1 || cfg.threads == 1 {
        scan(0, total)
    } else {
        cfg.run(|| {
            (0..chunks).into_par_iter().find_map_first(|c| {
                let start = c << chunk_bits;
                scan(start, start + (1 << chunk_bits))
            })
        })
    };
    Ok(found.map_or(Verdict::Pass, Verdict::Fail))
}

/// Prefix-extractor check on a graph with `M = 2^m`: for `i = 0..=k` the
/// graph with right labels truncated by `i` bits must pass
/// [`verify_extractor`] with `K = 2^{k-i}`.
pub fn verify_prefix_graph(
    g: &BipartiteGraph,
    k: usize,
    eps: Eps,
    cfg: &VerifyConfig,
) -> Result<Verdict<PrefixWitness>> {
    if !g.right_size().is_power_of_two() {
        return Err(Error::Precondition("prefix check needs M a power of two".into()));
    }
    let m = g.right_size().trailing_zeros() as usize;
    if k > m {
        return Err(Error::Precondition(format!("prefix check needs k <= m, got k = {k}, m = {m}")));
    }
    for i in 0..=k {
        let level = g.prefix_graph(i as u32)?;
        if let Verdict::Fail(witness) = verify_extractor(&level, 1 << (k - i), eps, cfg)? {
            return Ok(Verdict::Fail(PrefixWitness { level: i, witness }));
        }
    }
    Ok(Verdict::Pass)
}

/// [`verify_prefix_graph`] on the graph of `F`.
pub fn verify_prefix_extractor<E: Extractor + ?Sized>(
    f: &E,
    spec: &ExtractorSpec,
    cfg: &VerifyConfig,
) -> Result<Verdict<PrefixWitness>> {
    crate::error::check_len("prefix check input length", spec.n, f.input_len())?;
    crate::error::check_len("prefix check seed length", spec.d, f.seed_len())?;
    crate::error::check_len("prefix check output length", spec.m, f.output_len())?;
    if spec.k == 0 || spec.k > spec.n {
        return Err(Error::Precondition(format!("need 0 < k <= n, got k = {}", spec.k)));
    }
    verify_prefix_graph(&graph_of_function(f)?, spec.k, spec.eps, cfg)
}

/// Statistical distance of a flat source from uniform, as the exact
/// fraction `numerator / denominator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatDistance {
    pub left: Vec<usize>,
    pub numerator: u64,
    pub denominator: u64,
}

impl FlatDistance {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Whether the distance is strictly below `ε`.
    pub fn below(&self, eps: Eps) -> bool {
        (self.numerator as u128) * (*eps.denom() as u128)
            < (*eps.numer() as u128) * (self.denominator as u128)
    }
}

/// Distance from uniform of the output on the flat source over `left`:
/// `Σ_z |M·E(A,z) − K·D| / (2KDM)`.
pub fn flat_distance(g: &BipartiteGraph, left: &[usize]) -> FlatDistance {
    let load = g.right_loads(left.iter().copied());
    flat_distance_from_loads(g, left, &load)
}

fn flat_distance_from_loads(g: &BipartiteGraph, left: &[usize], load: &[u64]) -> FlatDistance {
    let kd = (left.len() * g.degree()) as u64;
    let m = g.right_size() as u64;
    FlatDistance {
        left: left.to_vec(),
        numerator: load.iter().map(|&e| (m * e).abs_diff(kd)).sum(),
        denominator: 2 * kd * m,
    }
}

/// The size-`K` left set whose flat source is farthest from uniform (least
/// set in lexicographic order among ties), by full enumeration.
pub fn worst_flat_distance(g: &BipartiteGraph, k: usize, cfg: &VerifyConfig) -> Result<FlatDistance> {
    check_k(g, k)?;
    if g.degree() == 0 {
        return Err(Error::Precondition("distance undefined for D = 0".into()));
    }
    cfg.check_budget(binomial(g.left_size() as u64, k as u64))?;
    let mut best: Option<FlatDistance> = None;
    let mut load = vec![0u64; g.right_size()];
    for_each_combination(g.left_size(), k, |set| {
        load.iter_mut().for_each(|e| *e = 0);
        for &a in set {
            for &z in g.neighbors(a) {
                load[z as usize] += 1;
            }
        }
        let fd = flat_distance_from_loads(g, set, &load);
        if best.as_ref().is_none_or(|b| fd.numerator > b.numerator) {
            best = Some(fd);
        }
        true
    });
    Ok(best.expect("at least one K-subset"))
}
