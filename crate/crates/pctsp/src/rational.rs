//! Exact rational arithmetic helpers.
//!
//! Everything combinatorial in this crate (costs, LP values, split amounts,
//! tree weights) is a [`Rat`] so that feasibility checks and certified
//! inequalities can be asserted with `==`/`<=` instead of tolerances.
//! Floating point appears only in the analysis-constant formulas, which
//! involve the exponent 2.2 and cannot stay rational.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = num_rational::BigRational;

/// Rational from an integer pair, reduced. Panics on q = 0.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// Parses "p/q", "p", or a plain decimal like "0.382" into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = |_| Error::Json(format!("cannot parse rational from {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(bad)?;
        let q: BigInt = q.trim().parse().map_err(bad)?;
        if q.is_zero() {
            return Err(Error::Json(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(bad)?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Json(format!("cannot parse rational from {s:?}")));
        }
        let digits: BigInt = frac.parse().map_err(bad)?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = Rat::new(digits, scale);
        let whole = Rat::from_integer(int_part);
        let neg = s.starts_with('-');
        return Ok(if neg { whole - frac_part } else { whole + frac_part });
    }
    let p: BigInt = s.parse().map_err(bad)?;
    Ok(Rat::from_integer(p))
}

/// Rational from a JSON value: either a "p/q" string or a JSON number.
/// Numbers are converted exactly (every f64 is a dyadic rational).
pub fn rational_from_json(v: &serde_json::Value) -> Result<Rat> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                Ok(rat_int(i))
            } else if let Some(u) = num.as_u64() {
                Ok(Rat::from_integer(BigInt::from(u)))
            } else {
                let f = num
                    .as_f64()
                    .ok_or_else(|| Error::Json(format!("bad number {num}")))?;
                Rat::from_float(f).ok_or_else(|| Error::Json(format!("non-finite number {num}")))
            }
        }
        other => Err(Error::Json(format!("expected rational, found {other}"))),
    }
}

/// Serializes a rational as "p" or "p/q".
pub fn format_rational(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_json(r: &Rat) -> serde_json::Value {
    serde_json::Value::String(format_rational(r))
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a scaled division when numerator/denominator each
        // overflow f64 on their own.
        let num = r.numer().to_f64().unwrap_or(f64::MAX);
        let den = r.denom().to_f64().unwrap_or(f64::MAX);
        num / den
    })
}

/// Floor of sqrt(m) over the integers.
pub fn isqrt_u128(m: u128) -> u128 {
    if m == 0 {
        return 0;
    }
    let mut s = (m as f64).sqrt() as u128;
    while s.saturating_mul(s) > m {
        s -= 1;
    }
    while (s + 1).saturating_mul(s + 1) <= m {
        s += 1;
    }
    s
}

/// Ceiling of sqrt(m) over the integers.
pub fn ceil_sqrt_u128(m: u128) -> u128 {
    let s = isqrt_u128(m);
    if s * s == m {
        s
    } else {
        s + 1
    }
}

/// Dyadic upper bound on sqrt(k): ceil(sqrt(k * 4^bits)) / 2^bits.
pub fn sqrt_upper(k: u32, bits: u32) -> Rat {
    let scaled = BigUint::from(k) << (2 * bits);
    let root = scaled.sqrt();
    let root = if &root * &root == scaled { root } else { root + 1u32 };
    Rat::new(BigInt::from(root), BigInt::from(BigUint::one() << bits))
}

/// Dyadic lower bound on sqrt(k): floor(sqrt(k * 4^bits)) / 2^bits.
pub fn sqrt_lower(k: u32, bits: u32) -> Rat {
    let scaled = BigUint::from(k) << (2 * bits);
    let root = scaled.sqrt();
    Rat::new(BigInt::from(root), BigInt::from(BigUint::one() << bits))
}

/// Exact test for y < (3 - sqrt 5)/2 with rational y.
///
/// For y <= 3/2 the inequality is equivalent to (3 - 2y)^2 > 5, which is a
/// rational comparison; larger y are trivially above the threshold.
pub fn below_golden_delta(y: &Rat) -> bool {
    let three = rat_int(3);
    let lhs = &three - &(y * rat_int(2));
    if !lhs.is_positive() {
        return false;
    }
    &lhs * &lhs > rat_int(5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-7").unwrap(), rat_int(-7));
        assert_eq!(parse_rational("0.382").unwrap(), rat(382, 1000));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let vals = [rat(1, 3), rat(-5, 7), rat_int(42), rat(1, 1 << 20)];
        for v in &vals {
            let j = rational_to_json(v);
            assert_eq!(&rational_from_json(&j).unwrap(), v);
        }
        // f64 JSON numbers are dyadic, so the conversion is exact.
        let j: serde_json::Value = serde_json::from_str("0.25").unwrap();
        assert_eq!(rational_from_json(&j).unwrap(), rat(1, 4));
        let j: serde_json::Value = serde_json::from_str("3").unwrap();
        assert_eq!(rational_from_json(&j).unwrap(), rat_int(3));
    }

    #[test]
    fn integer_sqrt_bounds() {
        for m in 0u128..2000 {
            let s = isqrt_u128(m);
            assert!(s * s <= m && (s + 1) * (s + 1) > m);
            let c = ceil_sqrt_u128(m);
            assert!(c * c >= m && (c == 0 || (c - 1) * (c - 1) < m));
        }
        let big = (1u128 << 41) - 17;
        let s = isqrt_u128(big);
        assert!(s * s <= big && (s + 1) * (s + 1) > big);
    }

    #[test]
    fn sqrt5_brackets() {
        let lo = sqrt_lower(5, 48);
        let hi = sqrt_upper(5, 48);
        assert!(lo <= hi);
        assert!(&lo * &lo <= rat_int(5));
        assert!(&hi * &hi >= rat_int(5));
        let gap = &hi - &lo;
        assert!(gap <= Rat::new(BigInt::from(1), BigInt::from(1u128 << 48)));
    }

    #[test]
    fn golden_delta_comparison() {
        // (3 - sqrt 5)/2 = 0.381966...
        assert!(below_golden_delta(&rat(38, 100)));
        assert!(below_golden_delta(&rat(381966, 1000000)));
        assert!(!below_golden_delta(&rat(381967, 1000000)));
        assert!(!below_golden_delta(&rat(1, 2)));
        assert!(!below_golden_delta(&rat_int(1)));
        assert!(below_golden_delta(&rat_int(0)));
    }
}
