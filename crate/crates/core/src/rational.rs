//! Exact rational arithmetic for costs and penalty strengths.
//!
//! Every cost, penalty strength and QUBO coefficient in this crate is a
//! [`Rational`]. Files carry them as decimal strings (`"12"`, `"0.25"`); a
//! value whose denominator is not of the form `2^a 5^b` falls back to `"p/q"`.

use std::fmt::Write as _;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Parse `"3"`, `"-1.25"`, `"7/4"` into an exact rational.
pub fn parse_decimal(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("invalid decimal number {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: i128 = num.trim().parse().map_err(|_| bad())?;
        let d: i128 = den.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac_part.len() > 30 {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: i128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    if neg {
        numer = -numer;
    }
    let denom = 10i128.checked_pow(frac_part.len() as u32).ok_or_else(bad)?;
    Ok(Rational::new(numer, denom))
}

/// Format as a terminating decimal when possible, otherwise `p/q`.
pub fn format_decimal(value: &Rational) -> String {
    let numer = *value.numer();
    let denom = *value.denom();
    if denom == 1 {
        return numer.to_string();
    }
    let mut rest = denom;
    let (mut twos, mut fives) = (0u32, 0u32);
    while rest % 2 == 0 {
        rest /= 2;
        twos += 1;
    }
    while rest % 5 == 0 {
        rest /= 5;
        fives += 1;
    }
    if rest != 1 {
        return format!("{numer}/{denom}");
    }
    let places = twos.max(fives);
    let Some(scale) = 10i128.checked_pow(places) else {
        return format!("{numer}/{denom}");
    };
    let Some(scaled) = numer.checked_mul(scale / denom) else {
        return format!("{numer}/{denom}");
    };
    let (int_part, frac_part) = scaled.abs().div_rem(&scale);
    let mut out = String::new();
    if scaled < 0 {
        out.push('-');
    }
    let _ = write!(out, "{int_part}.{frac_part:0width$}", width = places as usize);
    out
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Round a non-negative float onto the micro-unit grid used for tuned
/// penalty strengths.
pub fn from_f64_micro(value: f64) -> Rational {
    let scaled = (value * 1e6).round();
    Rational::new(scaled as i128, 1_000_000)
}

pub fn from_int(value: i64) -> Rational {
    Rational::from_integer(value as i128)
}

pub fn is_nonnegative(value: &Rational) -> bool {
    !value.is_negative()
}

pub fn checked_add(a: &Rational, b: &Rational) -> Result<Rational> {
    num_traits::CheckedAdd::checked_add(a, b).ok_or(Error::Overflow)
}

pub fn checked_mul(a: &Rational, b: &Rational) -> Result<Rational> {
    num_traits::CheckedMul::checked_mul(a, b).ok_or(Error::Overflow)
}

/// Least common multiple of the denominators, used to move a set of
/// coefficients onto a shared integer grid.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Result<i128> {
    let mut lcm: i128 = 1;
    for v in values {
        if v.is_zero() {
            continue;
        }
        let d = *v.denom();
        let g = lcm.gcd(&d);
        lcm = (lcm / g).checked_mul(d).ok_or(Error::Overflow)?;
    }
    Ok(lcm)
}

/// Scale a rational onto the integer grid `1/denominator`.
pub fn scale_to_int(value: &Rational, denominator: i128) -> Result<i128> {
    let factor = denominator / value.denom();
    value.numer().checked_mul(factor).ok_or(Error::Overflow)
}

/// Serde adapter writing a rational as a decimal string.
pub mod serde_decimal {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&format_decimal(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(de)? {
            Raw::Text(s) => parse_decimal(&s).map_err(serde::de::Error::custom),
            Raw::Int(i) => Ok(from_int(i)),
        }
    }
}
