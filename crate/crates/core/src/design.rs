//! Set families `S_1, …, S_m ⊆ [d]` with `|S_i| = l`: designs, weak designs
//! and uniform weak designs, with a greedy weak-design builder.
//!
//! Sets are indexed from 0 in the API; `S_j` of the usual notation is
//! `sets()[j - 1]`.

use num::rational::Ratio;

use crate::bits::BitString;
use crate::combin::ceil_log2;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DesignFamily {
    d: usize,
    l: usize,
    sets: Vec<Vec<usize>>,
}

impl DesignFamily {
    /// Each set is sorted on construction; duplicates, wrong sizes and
    /// elements outside `[0, d)` are rejected.
    pub fn new(d: usize, l: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut out = Vec::with_capacity(sets.len());
        for (j, mut s) in sets.into_iter().enumerate() {
            s.sort_unstable();
            if s.len() != l {
                return Err(Error::Construction(format!(
                    "set {j} has {} elements, expected {l}",
                    s.len()
                )));
            }
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Construction(format!("set {j} repeats an element")));
            }
            if s.last().is_some_and(|&e| e >= d) {
                return Err(Error::Construction(format!("set {j} leaves the universe [0, {d})")));
            }
            out.push(s);
        }
        Ok(Self { d, l, sets: out })
    }

    pub fn universe(&self) -> usize {
        self.d
    }

    pub fn set_size(&self) -> usize {
        self.l
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    /// The first `count` sets, over the same universe.
    pub fn prefix(&self, count: usize) -> Self {
        Self {
            d: self.d,
            l: self.l,
            sets: self.sets[..count].to_vec(),
        }
    }

    /// `Σ_{i<j} 2^{|S_i ∩ S_j|}` for 0-based `j`.
    pub fn overlap_sum(&self, j: usize) -> u64 {
        (0..j).map(|i| 1u64 << intersection(&self.sets[i], &self.sets[j])).sum()
    }
}

fn intersection(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// `y|_S = y_{s_1} … y_{s_l}` with `s_1 < … < s_l`.
pub fn restrict(y: &BitString, set: &[usize]) -> BitString {
    let mut out = BitString::zeros(set.len());
    for (k, &s) in set.iter().enumerate() {
        if y.get(s) {
            out.set(k, true);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DesignKind {
    /// `|S_i ∩ S_j| ≤ log2 ρ` for all `i ≠ j`.
    Design,
    /// `Σ_{i<j} 2^{|S_i ∩ S_j|} ≤ ρ(m − 1)` for all `j`.
    Weak,
    /// `Σ_{i<j} 2^{|S_i ∩ S_j|} ≤ ρ(j − 1)` for all `j` (1-based `j`).
    UniformWeak,
}

impl std::str::FromStr for DesignKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "design" => Ok(Self::Design),
            "weak" => Ok(Self::Weak),
            "uniform-weak" => Ok(Self::UniformWeak),
            _ => Err(Error::Precondition(format!("unknown design kind `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DesignVerdict {
    Pass,
    /// Set `j` (0-based) violates the condition; for [`DesignKind::Design`]
    /// `other` is the earlier set it overlaps too much. `value` is the
    /// offending `2^{|S_i ∩ S_j|}` or overlap sum.
    Fail {
        j: usize,
        other: Option<usize>,
        value: u64,
    },
}

impl DesignVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, DesignVerdict::Pass)
    }
}

/// Exact check of the chosen kind with `ρ` rational. Returns the first
/// violating set.
pub fn verify_design(family: &DesignFamily, kind: DesignKind, rho: Ratio<u64>) -> DesignVerdict {
    let (p, q) = (*rho.numer() as u128, *rho.denom() as u128);
    let m = family.len() as u128;
    for j in 0..family.len() {
        match kind {
            DesignKind::Design => {
                for i in 0..j {
                    let value = 1u64 << intersection(&family.sets[i], &family.sets[j]);
                    if value as u128 * q > p {
                        return DesignVerdict::Fail {
                            j,
                            other: Some(i),
                            value,
                        };
                    }
                }
            }
            DesignKind::Weak | DesignKind::UniformWeak => {
                let value = family.overlap_sum(j);
                let cap = if kind == DesignKind::Weak {
                    p * (m - 1)
                } else {
                    p * j as u128
                };
                if value as u128 * q > cap {
                    return DesignVerdict::Fail { j, other: None, value };
                }
            }
        }
    }
    DesignVerdict::Pass
}

/// `l²·max(1, ⌈log2 m⌉)`, the starting universe size of the greedy builder.
pub fn initial_universe(l: usize, m: usize) -> usize {
    l * l * (ceil_log2(m.max(1) as u64).max(1) as usize)
}

/// Greedy weak `(l, ρ)`-design.
///
/// Sets are built one element at a time. The next element is the already
/// used element with the smallest potential increment (ties to the smaller
/// element), as long as the running sum `Σ_{i<j} 2^{|S_i ∩ chosen|}` stays
/// within `ρ(m − 1)`; otherwise the smallest unused element of the current
/// universe is taken. Unused elements add nothing, so every set ends within
/// budget. The universe starts at [`initial_universe`] and doubles if it
/// runs out of unused elements; the returned universe is the number of
/// elements actually used.
pub fn greedy_weak_design(l: usize, m: usize, rho: Ratio<u64>) -> Result<DesignFamily> {
    if l == 0 || m == 0 {
        return Err(Error::Precondition("greedy design needs l >= 1 and m >= 1".into()));
    }
    if rho < Ratio::from_integer(1) {
        return Err(Error::Precondition(format!("rho must be at least 1, got {rho}")));
    }
    let mut universe = initial_universe(l, m);
    loop {
        if let Some(f) = greedy_pass(l, m, rho, universe) {
            return Ok(f);
        }
        universe *= 2;
    }
}

fn greedy_pass(l: usize, m: usize, rho: Ratio<u64>, universe: usize) -> Option<DesignFamily> {
    let (p, q) = (*rho.numer() as u128, *rho.denom() as u128);
    let budget = p * (m as u128 - 1);
    // members[e]: earlier sets containing element e.
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); universe];
    let mut used = 0usize;
    let mut sets: Vec<Vec<usize>> = Vec::with_capacity(m);
    for j in 0..m {
        let mut overlap = vec![0u32; j];
        let mut in_set = vec![false; universe];
        let mut chosen = Vec::with_capacity(l);
        let mut potential = j as u128;
        while chosen.len() < l {
            let best = (0..used)
                .filter(|&e| !in_set[e])
                .map(|e| {
                    let inc: u128 = members[e].iter().map(|&i| 1u128 << overlap[i]).sum();
                    (inc, e)
                })
                .min();
            let pick = match best {
                Some((inc, e)) if (potential + inc) * q <= budget => {
                    potential += inc;
                    e
                }
                _ => {
                    if used == universe {
                        return None;
                    }
                    used += 1;
                    used - 1
                }
            };
            for &i in &members[pick] {
                overlap[i] += 1;
            }
            in_set[pick] = true;
            chosen.push(pick);
        }
        for &e in &chosen {
            members[e].push(j);
        }
        sets.push(chosen);
    }
    DesignFamily::new(used, l, sets).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Ratio<u64> {
        Ratio::from_integer(1)
    }

    #[test]
    fn disjoint_sets_are_uniform_weak() {
        let f = DesignFamily::new(9, 3, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]).unwrap();
        for kind in [DesignKind::Design, DesignKind::Weak, DesignKind::UniformWeak] {
            assert!(verify_design(&f, kind, one()).passed());
        }
    }

    #[test]
    fn identical_sets_fail_at_second() {
        let f = DesignFamily::new(3, 3, vec![vec![0, 1, 2]; 3]).unwrap();
        assert_eq!(
            verify_design(&f, DesignKind::Weak, one()),
            DesignVerdict::Fail {
                j: 1,
                other: None,
                value: 8
            }
        );
        assert_eq!(
            verify_design(&f, DesignKind::Design, Ratio::from_integer(4)),
            DesignVerdict::Fail {
                j: 1,
                other: Some(0),
                value: 8
            }
        );
    }

    #[test]
    fn malformed_families_are_rejected() {
        assert!(DesignFamily::new(3, 2, vec![vec![0, 3]]).is_err());
        assert!(DesignFamily::new(3, 2, vec![vec![1, 1]]).is_err());
        assert!(DesignFamily::new(3, 2, vec![vec![1]]).is_err());
    }

    #[test]
    fn greedy_small_cases() {
        let single = greedy_weak_design(5, 1, one()).unwrap();
        assert_eq!(single.universe(), 5);
        assert_eq!(single.sets(), &[vec![0, 1, 2, 3, 4]]);

        let singletons = greedy_weak_design(1, 10, one()).unwrap();
        assert!(singletons.universe() <= 10);
        assert!(verify_design(&singletons, DesignKind::Weak, one()).passed());

        let f = greedy_weak_design(4, 8, one()).unwrap();
        assert!(f.universe() <= 4 * 16 * 3);
        assert!(verify_design(&f, DesignKind::Weak, one()).passed());
        assert_eq!(f, greedy_weak_design(4, 8, one()).unwrap());
    }

    #[test]
    fn restriction_takes_increasing_positions() {
        let y = BitString::from_u64(0b1011_0010, 8);
        assert_eq!(restrict(&y, &[0, 2, 3, 6]).to_u64(), 0b1111);
        assert_eq!(restrict(&y, &[1, 4, 7]).to_u64(), 0b000);
    }
}
