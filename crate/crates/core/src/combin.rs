//! Binomial coefficients and k-subset enumeration in lexicographic order.

/// `C(n, k)` saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        let num = (n - i) as u128;
        acc = match acc.checked_mul(num) {
            Some(v) => v / (i as u128 + 1),
            None => {
                let g = gcd(acc, i as u128 + 1);
                match (acc / g).checked_mul(num / ((i as u128 + 1) / g)) {
                    Some(v) => v,
                    None => return u128::MAX,
                }
            }
        };
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Lexicographic iterator over `k`-subsets of `0..n`, as sorted index lists.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (0..k).collect(),
            done: k > n,
        }
    }

    /// Advances `c` to the next subset in place; false once exhausted.
    pub fn advance(c: &mut [usize], n: usize) -> bool {
        let k = c.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        if !Self::advance(&mut self.current, self.n) {
            self.done = true;
        }
        Some(out)
    }
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order until it
/// returns `false`. Returns whether the enumeration ran to completion.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if k > n {
        return true;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        if !f(&c) {
            return false;
        }
        if !Combinations::advance(&mut c, n) {
            return true;
        }
    }
}

/// `⌈log2 x⌉` for `x ≥ 1`.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1, "ceil_log2 of zero");
    64 - (x - 1).leading_zeros()
}
