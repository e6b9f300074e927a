//! `GF(2^t)` for `1 ≤ t ≤ 16` with log/antilog tables over pinned
//! primitive polynomials.

use crate::error::{Error, Result};

/// `PRIMITIVE_POLYS[t]`: the modulus for `GF(2^t)`, bit `i` the coefficient
/// of `x^i`. Each is primitive, so `x` generates the multiplicative group.
pub const PRIMITIVE_POLYS: [u32; 17] = [
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B,
];

#[derive(Clone, Debug)]
pub struct Field {
    t: u32,
    poly: u32,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl Field {
    pub fn new(t: u32) -> Result<Self> {
        if !(1..=16).contains(&t) {
            return Err(Error::Precondition(format!("field exponent {t} outside 1..=16")));
        }
        let poly = PRIMITIVE_POLYS[t as usize];
        let size = 1usize << t;
        let order = size - 1;
        let mut exp = vec![0u16; 2 * order.max(1)];
        let mut log = vec![0u16; size];
        let mut v: u32 = 1;
        for (i, slot) in exp.iter_mut().enumerate().take(order) {
            *slot = v as u16;
            if i > 0 && v == 1 {
                return Err(Error::Construction(format!("modulus {poly:#x} is not primitive")));
            }
            log[v as usize] = i as u16;
            v <<= 1;
            if v & (1 << t) != 0 {
                v ^= poly;
            }
        }
        if v != 1 {
            return Err(Error::Construction(format!("modulus {poly:#x} is not primitive")));
        }
        for i in order..exp.len() {
            exp[i] = exp[i - order];
        }
        Ok(Self { t, poly, exp, log })
    }

    pub fn exponent(&self) -> u32 {
        self.t
    }

    pub fn modulus(&self) -> u32 {
        self.poly
    }

    pub fn size(&self) -> usize {
        1 << self.t
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize] as u32
        }
    }

    /// Horner evaluation of `Σ coeffs[i]·a^i`.
    pub fn eval_poly(&self, coeffs: &[u32], a: u32) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| self.mul(acc, a) ^ c)
    }
}

/// Carry-less product reduced modulo `poly`; independent of the tables.
pub fn slow_mul(a: u32, b: u32, t: u32, poly: u32) -> u32 {
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << t) != 0 {
            a ^= poly;
        }
    }
    acc
}
