//! Conditional coding on extractor graphs.
//!
//! An [`EnumerableSet`] stands in for "all words of small conditional
//! complexity": the arguments only use that the set can be listed in a
//! fixed order and that its size is bounded by `K`. Nothing here computes
//! Kolmogorov complexity.
//!
//! A right vertex is bad for `S` when more than `2DK/M` edges from `S`
//! (counted with multiplicity) land on it. A member of `S` is bad under
//! [`Rule::All`] when all `D` of its edges end in bad right vertices, and
//! under [`Rule::Majority`] when at least half of them do.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num::rational::Ratio;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{verify_extractor, BipartiteGraph, Verdict, VerifyConfig};
use crate::rational::Eps;

/// Left vertices in a fixed enumeration order, with a size bound `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerableSet {
    order: Vec<usize>,
    bound: usize,
}

impl EnumerableSet {
    pub fn new(order: Vec<usize>, bound: usize) -> Result<Self> {
        if order.len() > bound {
            return Err(Error::Precondition(format!(
                "set has {} members, bound is {bound}",
                order.len()
            )));
        }
        let mut seen = HashSet::with_capacity(order.len());
        if let Some(dup) = order.iter().find(|a| !seen.insert(**a)) {
            return Err(Error::Precondition(format!("vertex {dup} listed twice")));
        }
        Ok(Self { order, bound })
    }

    /// A set whose bound is its own size.
    pub fn exact(order: Vec<usize>) -> Result<Self> {
        let bound = order.len();
        Self::new(order, bound)
    }

    pub fn empty(bound: usize) -> Self {
        Self {
            order: Vec::new(),
            bound,
        }
    }

    /// `size` distinct vertices of `0..n_left` drawn from `(seed, stream)`,
    /// listed increasingly.
    pub fn random(n_left: usize, size: usize, seed: u64, stream: u64) -> Result<Self> {
        if size > n_left {
            return Err(Error::Precondition(format!("cannot pick {size} of {n_left} vertices")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut order = sample(&mut rng, n_left, size).into_vec();
        order.sort_unstable();
        Self::exact(order)
    }

    pub fn members(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn contains(&self, a: usize) -> bool {
        self.order.contains(&a)
    }

    /// Members that satisfy `keep`, in enumeration order, same bound.
    pub fn filter(&self, keep: impl Fn(usize) -> bool) -> Self {
        Self {
            order: self.order.iter().copied().filter(|&a| keep(a)).collect(),
            bound: self.bound,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    All,
    Majority,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::All => "all",
            Rule::Majority => "majority",
        })
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Rule::All),
            "majority" => Ok(Rule::Majority),
            _ => Err(Error::Precondition(format!("unknown rule `{s}` (all|majority)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadSets {
    pub rule: Rule,
    /// Sorted.
    pub bad_right: Vec<usize>,
    /// In the set's enumeration order.
    pub bad_left: Vec<usize>,
    is_bad_right: Vec<bool>,
}

impl BadSets {
    pub fn right_is_bad(&self, z: usize) -> bool {
        self.is_bad_right[z]
    }
}

/// Whether `load` edges exceed `2DK/M`.
fn over_threshold(g: &BipartiteGraph, k_size: usize, load: u64) -> bool {
    load as u128 * g.right_size() as u128 > 2 * g.degree() as u128 * k_size as u128
}

fn bad_edge_count(g: &BipartiteGraph, is_bad: &[bool], a: usize) -> usize {
    g.neighbors(a).iter().filter(|&&z| is_bad[z as usize]).count()
}

fn left_is_bad(g: &BipartiteGraph, is_bad: &[bool], a: usize, rule: Rule) -> bool {
    let bad = bad_edge_count(g, is_bad, a);
    match rule {
        Rule::All => bad == g.degree(),
        Rule::Majority => 2 * bad >= g.degree(),
    }
}

fn check_set(g: &BipartiteGraph, s: &EnumerableSet, k_size: usize) -> Result<()> {
    if let Some(&a) = s.members().iter().find(|&&a| a >= g.left_size()) {
        return Err(Error::IndexOutOfRange {
            index: a,
            available: g.left_size(),
        });
    }
    if k_size < s.len() {
        return Err(Error::Precondition(format!("K = {k_size} is below |S| = {}", s.len())));
    }
    Ok(())
}

pub fn compute_bad(g: &BipartiteGraph, s: &EnumerableSet, k_size: usize, rule: Rule) -> Result<BadSets> {
    check_set(g, s, k_size)?;
    let loads = g.right_loads(s.members().iter().copied());
    let is_bad_right: Vec<bool> = loads.iter().map(|&l| over_threshold(g, k_size, l)).collect();
    let bad_right = (0..g.right_size()).filter(|&z| is_bad_right[z]).collect();
    let bad_left = s
        .members()
        .iter()
        .copied()
        .filter(|&a| left_is_bad(g, &is_bad_right, a, rule))
        .collect();
    Ok(BadSets {
        rule,
        bad_right,
        bad_left,
        is_bad_right,
    })
}

/// Bad-left counts for one set against the two bounds `2εK` and `4εK`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FortnowSample {
    pub bad_all: usize,
    pub bad_majority: usize,
    pub bad_right: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FortnowReport {
    pub k_size: usize,
    pub eps: Eps,
    pub samples: Vec<FortnowSample>,
}

impl FortnowReport {
    pub fn bound_all(&self) -> Ratio<u64> {
        self.eps * Ratio::from_integer(2 * self.k_size as u64)
    }

    pub fn bound_majority(&self) -> Ratio<u64> {
        self.eps * Ratio::from_integer(4 * self.k_size as u64)
    }

    pub fn max_bad_all(&self) -> usize {
        self.samples.iter().map(|s| s.bad_all).max().unwrap_or(0)
    }

    pub fn max_bad_majority(&self) -> usize {
        self.samples.iter().map(|s| s.bad_majority).max().unwrap_or(0)
    }

    pub fn violations_all(&self) -> usize {
        let b = self.bound_all();
        self.samples
            .iter()
            .filter(|s| Ratio::from_integer(s.bad_all as u64) > b)
            .count()
    }

    pub fn violations_majority(&self) -> usize {
        let b = self.bound_majority();
        self.samples
            .iter()
            .filter(|s| Ratio::from_integer(s.bad_majority as u64) > b)
            .count()
    }
}

pub fn fortnow_sample(g: &BipartiteGraph, s: &EnumerableSet, k_size: usize) -> Result<FortnowSample> {
    let all = compute_bad(g, s, k_size, Rule::All)?;
    let majority = compute_bad(g, s, k_size, Rule::Majority)?;
    Ok(FortnowSample {
        bad_all: all.bad_left.len(),
        bad_majority: majority.bad_left.len(),
        bad_right: all.bad_right.len(),
    })
}

/// Sets of size `K` packed onto few right vertices: for target `z`, the
/// `K` left vertices with most edges to `z` (least index on ties), for
/// `z = 0..count`.
pub fn adversarial_sets(g: &BipartiteGraph, k_size: usize, count: usize) -> Result<Vec<EnumerableSet>> {
    if k_size > g.left_size() {
        return Err(Error::Precondition(format!("K = {k_size} exceeds N = {}", g.left_size())));
    }
    (0..count.min(g.right_size()))
        .map(|z| {
            let mut ranked: Vec<(usize, usize)> = (0..g.left_size())
                .map(|a| (g.neighbors(a).iter().filter(|&&w| w as usize == z).count(), a))
                .collect();
            ranked.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
            let mut order: Vec<usize> = ranked[..k_size].iter().map(|r| r.1).collect();
            order.sort_unstable();
            EnumerableSet::exact(order)
        })
        .collect()
}

/// Checks the bad-set bounds on `trials` random sets of size `K` plus the
/// given extra sets. Refuses unless the graph passes the `(K, ε)` extractor
/// check, which is the hypothesis the bounds rest on.
pub fn verify_fortnow(
    g: &BipartiteGraph,
    k_size: usize,
    eps: Eps,
    trials: usize,
    seed: u64,
    extra: &[EnumerableSet],
    cfg: &VerifyConfig,
) -> Result<FortnowReport> {
    if let Verdict::Fail(w) = verify_extractor(g, k_size, eps, cfg)? {
        return Err(Error::Precondition(format!(
            "graph is not a (K = {k_size}, eps = {eps}) extractor; failing right set {:?}",
            w.right
        )));
    }
    let mut samples = Vec::with_capacity(trials + extra.len());
    for t in 0..trials {
        let s = EnumerableSet::random(g.left_size(), k_size, seed, t as u64)?;
        samples.push(fortnow_sample(g, &s, k_size)?);
    }
    for s in extra {
        samples.push(fortnow_sample(g, s, k_size)?);
    }
    Ok(FortnowReport { k_size, eps, samples })
}

/// A good neighbor of `A`: the right vertex and the edge index reaching it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Code {
    pub x: usize,
    pub edge: usize,
}

/// A graph, a set, its bound and the bad sets under one rule.
#[derive(Clone, Debug)]
pub struct Instance<'g> {
    graph: &'g BipartiteGraph,
    set: EnumerableSet,
    k_size: usize,
    bad: BadSets,
}

impl<'g> Instance<'g> {
    pub fn new(graph: &'g BipartiteGraph, set: EnumerableSet, k_size: usize, rule: Rule) -> Result<Self> {
        let bad = compute_bad(graph, &set, k_size, rule)?;
        Ok(Self {
            graph,
            set,
            k_size,
            bad,
        })
    }

    pub fn graph(&self) -> &BipartiteGraph {
        self.graph
    }

    pub fn set(&self) -> &EnumerableSet {
        &self.set
    }

    pub fn bad(&self) -> &BadSets {
        &self.bad
    }

    pub fn is_good(&self, a: usize) -> bool {
        self.set.contains(a) && !self.bad.bad_left.contains(&a)
    }

    /// Least-index edge of `A` into a right vertex that is not bad.
    pub fn encode(&self, a: usize) -> Result<Code> {
        if !self.set.contains(a) {
            return Err(Error::Precondition(format!("vertex {a} is not in the set")));
        }
        if self.bad.bad_left.contains(&a) {
            return Err(Error::NoGoodNeighbor(a));
        }
        self.graph
            .neighbors(a)
            .iter()
            .position(|&z| !self.bad.right_is_bad(z as usize))
            .map(|edge| Code {
                x: self.graph.neighbors(a)[edge] as usize,
                edge,
            })
            .ok_or(Error::NoGoodNeighbor(a))
    }

    /// Members of the set adjacent to `X`, in enumeration order.
    pub fn candidates(&self, x: usize) -> Vec<usize> {
        self.set
            .members()
            .iter()
            .copied()
            .filter(|&a| self.graph.neighbors(a).contains(&(x as u32)))
            .collect()
    }

    /// Position of `A` among the candidates for `X`.
    pub fn rank(&self, a: usize, x: usize) -> Option<usize> {
        self.candidates(x).iter().position(|&b| b == a)
    }

    pub fn decode(&self, x: usize, idx: usize) -> Result<usize> {
        decode(self.graph, &self.set, x, idx)
    }

    /// Whether `idx < 2DK/M`.
    pub fn index_in_range(&self, idx: usize) -> bool {
        (idx as u128) * (self.graph.right_size() as u128)
            < 2 * self.graph.degree() as u128 * self.k_size as u128
    }
}

pub fn encode(g: &BipartiteGraph, s: &EnumerableSet, k_size: usize, a: usize, rule: Rule) -> Result<Code> {
    Instance::new(g, s.clone(), k_size, rule)?.encode(a)
}

/// The `idx`-th member of `S` (in its order) adjacent to `X`.
pub fn decode(g: &BipartiteGraph, s: &EnumerableSet, x: usize, idx: usize) -> Result<usize> {
    let mut count = 0;
    for &a in s.members() {
        if g.neighbors(a).contains(&(x as u32)) {
            if count == idx {
                return Ok(a);
            }
            count += 1;
        }
    }
    Err(Error::IndexOutOfRange {
        index: idx,
        available: count,
    })
}

/// One condition for [`encode_multi`]: a set and its bit budget `k_i`.
#[derive(Clone, Debug)]
pub struct Condition {
    pub set: EnumerableSet,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiCode {
    /// `k_1` bits.
    pub x: u64,
    pub edge: usize,
    /// For each condition, the rank of `A` among its set's members
    /// adjacent to `X|_{k_i}` in the level-`i` graph.
    pub ranks: Vec<usize>,
}

/// Per-condition levels of a prefix graph with `M = 2^m`: condition `i`
/// uses the graph with right labels cut to `k_i` bits, `K_i = 2^{k_i}`,
/// and the majority rule.
pub struct MultiInstance {
    levels: Vec<BipartiteGraph>,
    conditions: Vec<Condition>,
    bad: Vec<BadSets>,
}

impl MultiInstance {
    pub fn new(g: &BipartiteGraph, conditions: Vec<Condition>) -> Result<Self> {
        if conditions.is_empty() {
            return Err(Error::Precondition("need at least one condition".into()));
        }
        if !g.right_size().is_power_of_two() {
            return Err(Error::Precondition("multi-condition coding needs M a power of two".into()));
        }
        let m = g.right_size().trailing_zeros() as usize;
        if conditions.windows(2).any(|w| w[0].k < w[1].k) || conditions[0].k > m {
            return Err(Error::Precondition(format!(
                "need m >= k_1 >= k_2 >= ..., got m = {m}, k = {:?}",
                conditions.iter().map(|c| c.k).collect::<Vec<_>>()
            )));
        }
        let mut levels = Vec::with_capacity(conditions.len());
        let mut bad = Vec::with_capacity(conditions.len());
        for c in &conditions {
            let level = g.prefix_graph((m - c.k) as u32)?;
            bad.push(compute_bad(&level, &c.set, 1 << c.k, Rule::Majority)?);
            levels.push(level);
        }
        Ok(Self {
            levels,
            conditions,
            bad,
        })
    }

    pub fn level(&self, i: usize) -> &BipartiteGraph {
        &self.levels[i]
    }

    pub fn bad(&self, i: usize) -> &BadSets {
        &self.bad[i]
    }

    /// Least edge of `A` whose endpoint, cut to `k_i` bits, is a good
    /// right vertex at every level.
    pub fn encode(&self, a: usize) -> Result<MultiCode> {
        for (c, bad) in self.conditions.iter().zip(&self.bad) {
            if !c.set.contains(a) || bad.bad_left.contains(&a) {
                return Err(Error::Precondition(format!(
                    "vertex {a} is not a good member of the k = {} condition",
                    c.k
                )));
            }
        }
        let degree = self.levels[0].degree();
        let edge = (0..degree)
            .find(|&y| {
                self.levels
                    .iter()
                    .zip(&self.bad)
                    .all(|(g, bad)| !bad.right_is_bad(g.neighbors(a)[y] as usize))
            })
            .ok_or(Error::NoGoodNeighbor(a))?;
        let x = self.levels[0].neighbors(a)[edge] as u64;
        let ranks = self
            .levels
            .iter()
            .zip(&self.conditions)
            .map(|(g, c)| {
                let xi = g.neighbors(a)[edge] as usize;
                let candidates = c
                    .set
                    .members()
                    .iter()
                    .filter(|&&b| g.neighbors(b).contains(&(xi as u32)))
                    .position(|&b| b == a)
                    .expect("A is adjacent to its own neighbor");
                candidates
            })
            .collect();
        Ok(MultiCode { x, edge, ranks })
    }

    /// Recovers `A` from condition `i`, `X` and the stored rank.
    pub fn decode(&self, i: usize, code: &MultiCode) -> Result<usize> {
        let shift = self.conditions[0].k - self.conditions[i].k;
        decode(
            &self.levels[i],
            &self.conditions[i].set,
            (code.x >> shift) as usize,
            code.ranks[i],
        )
    }
}

pub fn encode_multi(g: &BipartiteGraph, conditions: Vec<Condition>, a: usize) -> Result<MultiCode> {
    MultiInstance::new(g, conditions)?.encode(a)
}

/// One stage of the chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLevel {
    pub size: usize,
    pub good: usize,
    pub bad: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub a: usize,
    pub level: usize,
    pub code: Code,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainReport {
    pub levels: Vec<ChainLevel>,
    pub assignment: Vec<Assignment>,
}

impl ChainReport {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// `|S^i| / |S^{i+1}|` for each consecutive nonempty pair.
    pub fn shrink_factors(&self) -> Vec<f64> {
        self.levels
            .windows(2)
            .filter(|w| w[1].size > 0)
            .map(|w| w[0].size as f64 / w[1].size as f64)
            .collect()
    }
}

/// `⌈k / (2 log2 n)⌉`, with `log2 n` rounded up.
pub fn chain_depth_bound(k: usize, n: usize) -> usize {
    let log = crate::combin::ceil_log2(n.max(2) as u64) as usize;
    k.div_ceil(2 * log)
}

/// `S^0 = S`, `S^{i+1}` = bad members of `S^i` under the all rule in
/// `graphs[i]` with bound `bounds[i]`. Each member is assigned to the first
/// level where it is good. Errors if the graphs run out first.
pub fn iterative_chain(
    graphs: &[BipartiteGraph],
    bounds: &[usize],
    s0: &EnumerableSet,
) -> Result<ChainReport> {
    if graphs.len() != bounds.len() {
        return Err(Error::Dimension {
            what: "chain bounds per graph",
            expected: graphs.len(),
            found: bounds.len(),
        });
    }
    let mut levels = Vec::new();
    let mut assignment = Vec::new();
    let mut current = s0.clone();
    for (i, (g, &k_size)) in graphs.iter().zip(bounds).enumerate() {
        if current.is_empty() {
            break;
        }
        let inst = Instance::new(g, EnumerableSet::new(current.members().to_vec(), k_size)?, k_size, Rule::All)?;
        for &a in current.members() {
            if inst.is_good(a) {
                assignment.push(Assignment {
                    a,
                    level: i,
                    code: inst.encode(a)?,
                });
            }
        }
        let bad = inst.bad().bad_left.clone();
        levels.push(ChainLevel {
            size: current.len(),
            good: current.len() - bad.len(),
            bad: bad.len(),
        });
        current = EnumerableSet::exact(bad)?;
    }
    if !current.is_empty() {
        return Err(Error::Precondition(format!(
            "{} members still bad after {} levels",
            current.len(),
            graphs.len()
        )));
    }
    Ok(ChainReport { levels, assignment })
}
