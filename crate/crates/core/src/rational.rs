//! Exact rational literals and conversions.
//!
//! Probabilities enter the system as strings, either `"a/b"` fractions or
//! decimals; both convert to [`Ratio`] without rounding. Floating point is
//! only ever produced on the way out (entropies, bound values, report
//! renderings), never fed back into the exact layer.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational, the mass type used throughout.
pub type Ratio = num_rational::BigRational;

/// Builds a ratio from small integers; panics on a zero denominator.
pub fn ratio(numer: i64, denom: i64) -> Ratio {
    Ratio::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"a/b"`, `"a"`, or a decimal such as `"0.125"` into an exact ratio.
pub fn parse_ratio(s: &str) -> Result<Ratio> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::InvalidParameter("empty rational literal".into()));
    }
    if let Some((numer, denom)) = s.split_once('/') {
        let n: BigInt = numer
            .trim()
            .parse()
            .map_err(|_| bad_literal(s))?;
        let d: BigInt = denom
            .trim()
            .parse()
            .map_err(|_| bad_literal(s))?;
        if d.is_zero() {
            return Err(Error::InvalidParameter(format!(
                "zero denominator in {s:?}"
            )));
        }
        return Ok(Ratio::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let w: BigInt = if whole == "-" || whole.is_empty() {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad_literal(s))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad_literal(s));
        }
        let f: BigInt = frac.parse().map_err(|_| bad_literal(s))?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let magnitude = Ratio::from_integer(w.abs()) + Ratio::new(f, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let n: BigInt = s.parse().map_err(|_| bad_literal(s))?;
    Ok(Ratio::from_integer(n))
}

fn bad_literal(s: &str) -> Error {
    Error::InvalidParameter(format!("cannot parse rational literal {s:?}"))
}

/// Decimal rendering of a ratio, for reports. Exact values stay strings.
pub fn to_f64(r: &Ratio) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `1 / 2^exp` as an exact ratio.
pub fn pow2_inverse(exp: usize) -> Ratio {
    Ratio::new(BigInt::one(), BigInt::from(2u32).pow(exp as u32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_ratio("7/16").unwrap(), ratio(7, 16));
        assert_eq!(parse_ratio(" 3 / 4 ").unwrap(), ratio(3, 4));
        assert_eq!(parse_ratio("1").unwrap(), ratio(1, 1));
        assert_eq!(parse_ratio("0").unwrap(), ratio(0, 1));
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_ratio("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_ratio("0.5436").unwrap(), ratio(5436, 10000));
        assert_eq!(parse_ratio("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_ratio("2.0").unwrap(), ratio(2, 1));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_ratio("").is_err());
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("a/b").is_err());
        assert!(parse_ratio("1.2.3").is_err());
        assert!(parse_ratio("0.x1").is_err());
    }
}
