//! Exact rational scalars: parsing, formatting, and serde support.
//!
//! All arithmetic in this crate is exact. Rationals are kept reduced with a
//! positive denominator (guaranteed by `num_rational`), and serialize as
//! strings like `"2/3"` or `"4"` so JSON never loses precision.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational number.
pub type Rational = BigRational;

/// Shorthand constructor from machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"n"`, `"n/d"`, or `"-n/d"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::InvalidRational(text.to_string()));
    }
    trimmed
        .parse::<BigRational>()
        .map_err(|_| Error::InvalidRational(text.to_string()))
}

/// Formats a rational as `"n"` or `"n/d"` (reduced, denominator positive).
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// True iff `0 < p < 1`.
pub fn in_open_unit(p: &Rational) -> bool {
    p.is_positive() && *p < Rational::one()
}

/// Validates that a combination coefficient lies in the open interval (0,1).
pub fn check_coefficient(p: &Rational) -> Result<()> {
    if in_open_unit(p) {
        Ok(())
    } else {
        Err(Error::CoefficientRange(format_rational(p)))
    }
}

/// The complementary coefficient `1 - p`.
pub fn complement(p: &Rational) -> Rational {
    Rational::one() - p
}

/// True iff the rationals sum exactly to one.
pub fn sums_to_one(values: &[Rational]) -> bool {
    let mut acc = Rational::zero();
    for v in values {
        acc += v;
    }
    acc.is_one()
}

/// Serde adapter: rationals as exact strings. Use via `#[serde(with = "rational_string")]`.
pub mod rational_string {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(de)?;
        parse_rational(&text).map_err(de::Error::custom)
    }
}
