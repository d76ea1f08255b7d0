//! Exact rational scalars.

use alloc::format;
use alloc::string::String;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{bail, Result};

pub type Rational = num_rational::BigRational;

/// Denominator exponent used when rationalizing floating-point values.
pub const GRID_BITS: u32 = 40;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Rounds `x` to the nearest multiple of `2^-GRID_BITS` and returns it
/// exactly.
pub fn from_f64(x: f64) -> Rational {
    let scale = (1u64 << GRID_BITS) as f64;
    let n = libm::round(x * scale);
    let num = BigInt::from(n as i128);
    Rational::new(num, BigInt::from(1u64 << GRID_BITS))
}

/// Like [`from_f64`], but snaps to the nearest integer within `tol`.
pub fn from_f64_snapped(x: f64, tol: f64) -> Rational {
    let r = libm::round(x);
    if libm::fabs(x - r) <= tol {
        Rational::from_integer(BigInt::from(r as i128))
    } else {
        from_f64(x)
    }
}

/// `"p/q"` (always with a denominator).
pub fn format_pq(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `"p/q"` or a bare integer.
pub fn parse_pq(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        match t.trim().parse::<BigInt>() {
            Ok(v) => Ok(v),
            Err(_) => bail!(Parse, "bad rational `{s}`"),
        }
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                bail!(Parse, "zero denominator in `{s}`");
            }
            Ok(Rational::new(parse_int(p)?, q))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// Compact human form: `3`, `-1/2`.
pub fn format_short(r: &Rational) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}
