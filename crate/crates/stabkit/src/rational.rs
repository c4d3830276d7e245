//! Exact rational scalar type plus canonical parsing and formatting.
//!
//! All geometric coordinates, weights, and LP data in this crate are exact
//! rationals; floats appear only in quadrature and the float LP mode. The
//! canonical text form is `"p/q"` in lowest terms (bare integer when q = 1),
//! and the parser additionally accepts plain decimals like `"0.25"`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{FromPrimitive, One, ToPrimitive, Zero};
use std::error::Error;
use std::fmt;

/// Exact rational number used throughout the crate.
pub type Rat = BigRational;

/// Shorthand for an integer-valued `Rat`.
pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for the fraction `num/den`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Nearest-f64 image of a rational (used for reporting and float-mode LPs).
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational image of a finite f64 (binary expansion preserved).
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_f64(x)
}

/// Errors from [`parse_rat`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseRatError {
    Empty,
    InvalidDigit(String),
    ZeroDenominator(String),
}

impl fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseRatError::Empty => write!(f, "empty rational literal"),
            ParseRatError::InvalidDigit(s) => write!(f, "invalid rational literal {s:?}"),
            ParseRatError::ZeroDenominator(s) => {
                write!(f, "zero denominator in rational literal {s:?}")
            }
        }
    }
}

impl Error for ParseRatError {}

fn parse_bigint(s: &str, whole: &str) -> Result<BigInt, ParseRatError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRatError::InvalidDigit(whole.to_string()));
    }
    s.parse::<BigInt>()
        .map_err(|_| ParseRatError::InvalidDigit(whole.to_string()))
}

/// Parses `"p/q"`, `"-3"`, or a plain decimal such as `"0.25"`/`"1."`.
///
/// No exponents and no embedded whitespace; the sign (if any) leads the
/// literal. `"p/q"` denominators must be nonzero.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let whole = s;
    if s.is_empty() {
        return Err(ParseRatError::Empty);
    }
    let (neg, body) = match s.as_bytes()[0] {
        b'+' => (false, &s[1..]),
        b'-' => (true, &s[1..]),
        _ => (false, s),
    };
    if body.is_empty() {
        return Err(ParseRatError::InvalidDigit(whole.to_string()));
    }
    let value = if let Some((num, den)) = body.split_once('/') {
        let num = parse_bigint(num, whole)?;
        let den = parse_bigint(den, whole)?;
        if den.is_zero() {
            return Err(ParseRatError::ZeroDenominator(whole.to_string()));
        }
        Rat::new(num, den)
    } else if let Some((ip, fp)) = body.split_once('.') {
        if ip.is_empty() && fp.is_empty() {
            return Err(ParseRatError::InvalidDigit(whole.to_string()));
        }
        let ip_val = if ip.is_empty() {
            BigInt::zero()
        } else {
            parse_bigint(ip, whole)?
        };
        let fp_val = if fp.is_empty() {
            BigInt::zero()
        } else {
            parse_bigint(fp, whole)?
        };
        let scale = BigInt::from(10u32).pow(fp.len() as u32);
        Rat::new(ip_val * &scale + fp_val, scale)
    } else {
        Rat::from_integer(parse_bigint(body, whole)?)
    };
    Ok(if neg { -value } else { value })
}

/// Canonical text form: lowest-terms `"p/q"`, or the bare integer when q = 1.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering with up to `sig` significant digits (trailing zeros
/// trimmed). Used for human-facing output next to the exact form.
pub fn format_decimal(r: &Rat, sig: u32) -> String {
    let f = rat_to_f64(r);
    format_f64_sig(f, sig)
}

/// Decimal rendering of an f64 with up to `sig` significant digits.
pub fn format_f64_sig(f: f64, sig: u32) -> String {
    if f == 0.0 {
        return "0".to_string();
    }
    if !f.is_finite() {
        return if f > 0.0 { "inf".to_string() } else { "-inf".to_string() };
    }
    let mag = f.abs().log10().floor() as i32;
    let dec = (sig as i32 - 1 - mag).max(0) as usize;
    let mut out = format!("{:.*}", dec, f);
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    out
}

/// Serde adapter serializing `Rat` fields as canonical strings.
pub mod rat_serde {
    use super::{format_rat, parse_rat, Rat};
    use serde::de::Error as DeError;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_fraction_and_integer_forms() {
        assert_eq!(parse_rat("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rat("-3/4").unwrap(), rat(-3, 4));
        assert_eq!(parse_rat("+7").unwrap(), int(7));
        assert_eq!(parse_rat("0").unwrap(), int(0));
        assert_eq!(parse_rat("6/4").unwrap(), rat(3, 2));
    }

    #[test]
    fn parses_decimals() {
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rat(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("2.").unwrap(), int(2));
        assert_eq!(parse_rat("0.596").unwrap(), rat(596, 1000));
    }

    #[test]
    fn rejects_malformed_literals() {
        assert_eq!(parse_rat(""), Err(ParseRatError::Empty));
        assert!(matches!(parse_rat("1/0"), Err(ParseRatError::ZeroDenominator(_))));
        for bad in ["abc", "1e3", "1/2/3", "--3", "1 /2", ".", "-", "0x10"] {
            assert!(parse_rat(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn canonical_format_is_lowest_terms() {
        assert_eq!(format_rat(&rat(6, 4)), "3/2");
        assert_eq!(format_rat(&rat(-6, 4)), "-3/2");
        assert_eq!(format_rat(&int(5)), "5");
        assert_eq!(format_rat(&int(0)), "0");
        assert_eq!(format_rat(&rat(179, 300)), "179/300");
    }

    #[test]
    fn f64_round_trip_is_exact() {
        for x in [0.5, 0.1, -3.25, 1.0 / 3.0, 0.0] {
            let r = rat_from_f64(x).unwrap();
            assert_eq!(rat_to_f64(&r), x);
        }
        assert_eq!(rat_from_f64(0.5).unwrap(), rat(1, 2));
        assert!(rat_from_f64(f64::NAN).is_none());
    }

    #[test]
    fn decimal_rendering_trims_zeros() {
        assert_eq!(format_decimal(&rat(1, 4), 12), "0.25");
        assert_eq!(format_decimal(&int(0), 12), "0");
        assert_eq!(format_decimal(&rat(19, 12), 12), "1.58333333333");
        assert_eq!(format_decimal(&int(2), 12), "2");
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let r = rat(n, d);
            prop_assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
        }

        #[test]
        fn parse_accepts_two_digit_decimals(n in 0i64..99_999, neg in proptest::bool::ANY) {
            let s = format!("{}{}.{:02}", if neg { "-" } else { "" }, n / 100, n % 100);
            let magnitude = rat(n, 100);
            let oracle = if neg { -magnitude } else { magnitude };
            prop_assert_eq!(parse_rat(&s).unwrap(), oracle);
        }
    }
}
