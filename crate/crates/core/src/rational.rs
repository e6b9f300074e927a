//! Error parameters as exact rationals `p/q`.

use num::rational::Ratio;
use num::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An error bound `ε = p/q`, kept exact so verifier comparisons are exact.
pub type Eps = Ratio<u64>;

pub fn eps(p: u64, q: u64) -> Eps {
    Ratio::new(p, q)
}

/// Parses `p/q` (or a bare integer) and checks `0 < ε < 1`.
pub fn parse_eps(s: &str) -> Result<Eps> {
    let value: Eps = s
        .trim()
        .parse()
        .map_err(|_| Error::Precondition(format!("eps `{s}` is not a rational p/q")))?;
    check_eps(value)?;
    Ok(value)
}

pub fn check_eps(e: Eps) -> Result<()> {
    if e.is_zero() || e >= Ratio::from_integer(1) {
        Err(Error::Precondition(format!("eps must satisfy 0 < eps < 1, got {e}")))
    } else {
        Ok(())
    }
}

pub fn eps_f64(e: Eps) -> f64 {
    e.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_eps("1/4").unwrap(), eps(1, 4));
        assert_eq!(parse_eps(" 2/8 ").unwrap(), eps(1, 4));
        assert!(parse_eps("1").is_err());
        assert!(parse_eps("0/3").is_err());
        assert!(parse_eps("0.25").is_err());
        assert!(parse_eps("5/4").is_err());
    }
}
