//! Concatenated Reed–Solomon (outer, over `GF(2^t)`) and Hadamard (inner)
//! code with a brute-force list decoder.
//!
//! A message of `n` bits is cut into `c = ⌈n/t⌉` chunks of `t` bits, most
//! significant first; a short final chunk fills the low bits of its
//! coefficient. Chunk `i` is the coefficient of `a^i`. The polynomial is
//! evaluated at every field element `e = 0, …, 2^t − 1` and each value `s`
//! is replaced by its Hadamard codeword `⟨s, z⟩`, `z = 0, …, 2^t − 1`. Bit
//! `e·2^t + z` of the codeword is therefore `⟨p(e), z⟩`, and the length is
//! `n̄ = 2^{2t}`.

pub mod field;

use num::rational::Ratio;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{check_len, Error, Result};
pub use field::{Field, PRIMITIVE_POLYS};

/// Largest message length the brute-force decoder will enumerate.
pub const MAX_DECODE_BITS: usize = 14;

#[derive(Clone, Debug)]
pub struct Code {
    n: usize,
    delta: Option<Ratio<u64>>,
    field: Field,
}

/// `2^t · 2δ² ≥ ⌈n/t⌉`, exactly.
fn exponent_suffices(n: usize, t: u32, delta: Ratio<u64>) -> bool {
    let (p, q) = (*delta.numer() as u128, *delta.denom() as u128);
    let chunks = n.div_ceil(t as usize) as u128;
    (1u128 << t) * 2 * p * p >= chunks * q * q
}

/// Least `t ≥ 1` with `2^t ≥ ⌈n/t⌉ / (2δ²)`.
pub fn select_exponent(n: usize, delta: Ratio<u64>) -> Result<u32> {
    if delta.numer() == &0 || delta * 2 >= Ratio::from_integer(1) {
        return Err(Error::Precondition(format!("need 0 < delta < 1/2, got {delta}")));
    }
    (1..=16)
        .find(|&t| exponent_suffices(n, t, delta))
        .ok_or_else(|| Error::Infeasible(format!("no field exponent up to 16 serves n = {n}, delta = {delta}")))
}

impl Code {
    /// The code with the least admissible field exponent for `(n, δ)`.
    pub fn build(n: usize, delta: Ratio<u64>) -> Result<Self> {
        let t = select_exponent(n, delta)?;
        let mut code = Self::with_exponent(n, t)?;
        code.delta = Some(delta);
        Ok(code)
    }

    /// The code over `GF(2^t)` for an explicitly chosen `t`, without a
    /// list-decoding guarantee. Needs `⌈n/t⌉ ≤ 2^t`.
    pub fn with_exponent(n: usize, t: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("message length must be positive".into()));
        }
        let field = Field::new(t)?;
        if n.div_ceil(t as usize) > field.size() {
            return Err(Error::Construction(format!(
                "{} coefficients exceed the {} evaluation points of GF(2^{t})",
                n.div_ceil(t as usize),
                field.size()
            )));
        }
        Ok(Self {
            n,
            delta: None,
            field,
        })
    }

    pub fn message_len(&self) -> usize {
        self.n
    }

    /// `δ` when the code was built by [`Code::build`].
    pub fn delta(&self) -> Option<Ratio<u64>> {
        self.delta
    }

    pub fn exponent(&self) -> u32 {
        self.field.exponent()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Number of outer coefficients `⌈n/t⌉`.
    pub fn coefficients(&self) -> usize {
        self.n.div_ceil(self.exponent() as usize)
    }

    /// `n̄ = 2^{2t}`.
    pub fn codeword_len(&self) -> usize {
        1 << (2 * self.exponent())
    }

    /// `l = log2 n̄ = 2t`.
    pub fn log_len(&self) -> usize {
        2 * self.exponent() as usize
    }

    /// Guaranteed relative distance `(1 − (c − 1)/2^t) / 2`.
    pub fn relative_distance(&self) -> Ratio<u64> {
        let size = self.field.size() as u64;
        Ratio::new(size - (self.coefficients() as u64 - 1), 2 * size)
    }

    /// Outer coefficients of `x`.
    pub fn pack(&self, x: &BitString) -> Vec<u32> {
        let t = self.exponent() as usize;
        (0..self.coefficients())
            .map(|i| {
                let start = i * t;
                let len = t.min(self.n - start);
                x.slice(start, len).to_u64() as u32
            })
            .collect()
    }

    /// Outer Reed–Solomon symbols `p(0), …, p(2^t − 1)`.
    pub fn outer(&self, x: &BitString) -> Vec<u32> {
        let coeffs = self.pack(x);
        (0..self.field.size() as u32)
            .map(|e| self.field.eval_poly(&coeffs, e))
            .collect()
    }

    pub fn encode(&self, x: &BitString) -> Result<BitString> {
        check_len("code message", self.n, x.len())?;
        Ok(self.encode_unchecked(x))
    }

    fn encode_unchecked(&self, x: &BitString) -> BitString {
        let size = self.field.size();
        let mut out = BitString::zeros(size * size);
        for (e, s) in self.outer(x).into_iter().enumerate() {
            for z in 0..size {
                if (s & z as u32).count_ones() & 1 == 1 {
                    out.set(e * size + z, true);
                }
            }
        }
        out
    }

    /// All `2^n` codewords in message order.
    pub fn codebook(&self) -> Result<Vec<BitString>> {
        if self.n > MAX_DECODE_BITS {
            return Err(Error::BudgetExceeded {
                required: 1u128 << self.n,
                budget: 1 << MAX_DECODE_BITS,
            });
        }
        Ok((0..1u64 << self.n)
            .into_par_iter()
            .map(|x| self.encode_unchecked(&BitString::from_u64(x, self.n)))
            .collect())
    }
}

/// Messages whose codewords agree with `center` on at least `(1/2 + δ)·n̄`
/// positions, sorted, by trying every message.
pub fn brute_list_decode(code: &Code, center: &BitString, delta: Ratio<u64>) -> Result<Vec<BitString>> {
    let book = code.codebook()?;
    list_from_codebook(code, &book, center, delta)
}

/// [`brute_list_decode`] against a precomputed [`Code::codebook`].
pub fn list_from_codebook(
    code: &Code,
    book: &[BitString],
    center: &BitString,
    delta: Ratio<u64>,
) -> Result<Vec<BitString>> {
    check_len("list-decoding center", code.codeword_len(), center.len())?;
    let nbar = code.codeword_len() as u128;
    let (p, q) = (*delta.numer() as u128, *delta.denom() as u128);
    // agree ≥ (1/2 + p/q)·n̄  ⇔  2·q·agree ≥ (q + 2p)·n̄
    Ok(book
        .iter()
        .enumerate()
        .filter(|(_, w)| {
            let agree = nbar - w.hamming_distance(center) as u128;
            2 * q * agree >= (q + 2 * p) * nbar
        })
        .map(|(x, _)| BitString::from_u64(x as u64, code.message_len()))
        .collect())
}
