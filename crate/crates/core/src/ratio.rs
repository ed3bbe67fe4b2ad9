//! Exact rational arithmetic helpers and compensated float summation.
//!
//! Every combinatorial quantity (density, mean-square potential, edit budget)
//! is carried as an exact rational; only entropy values live in `f64`.
//! Arbitrary-precision numerators are used because mixed class sizes make
//! common denominators overflow machine words well below the vertex cap.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_u(num: usize, den: usize) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn to_f64(r: &Rat) -> f64 {
    // BigRational::to_f64 handles magnitudes beyond f64 by rounding.
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

/// Parse a decimal or fraction literal ("0.3", "3/10", "2") into an exact rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(rat(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let neg = int_part.trim_start().starts_with('-');
        let i: i64 = if int_part.is_empty() || int_part == "-" { 0 } else { int_part.parse().ok()? };
        if frac_part.is_empty() {
            return Some(rat_int(i));
        }
        let digits = frac_part.len() as u32;
        if digits > 18 {
            return None;
        }
        let f: i64 = frac_part.parse().ok()?;
        let den = 10i64.checked_pow(digits)?;
        let frac = rat(f, den);
        let whole = rat_int(i.abs());
        let mag = whole + frac;
        return Some(if neg || i < 0 { -mag } else { mag });
    }
    let i: i64 = s.parse().ok()?;
    Some(rat_int(i))
}

/// Nearest rational with denominator 2^32; used when a parameter is only
/// available as a float (e.g. log-form epsilon schedules).
pub fn rat_from_f64(x: f64) -> Rat {
    let den: i64 = 1 << 32;
    let num = (x * den as f64).round();
    Rat::new(BigInt::from(num as i128), BigInt::from(den))
}

/// Serialize a rational as its exact "numer/denom" string (reports keep
/// exact values alongside the f64 renderings).
pub fn serialize_rat<S: serde::Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn deserialize_rat<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
    use serde::Deserialize;
    let s = String::deserialize(d)?;
    s.parse::<Rat>().map_err(|e| serde::de::Error::custom(format!("bad rational {s:?}: {e}")))
}

/// Kahan–Babuška compensated summation.
#[derive(Debug, Clone, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum { sum: 0.0, c: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.c
    }
}

/// x ln x with the 0 ln 0 = 0 convention.
#[inline]
pub fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rat("0.3").unwrap(), rat(3, 10));
        assert_eq!(parse_rat("3/10").unwrap(), rat(3, 10));
        assert_eq!(parse_rat("2").unwrap(), rat_int(2));
        assert_eq!(parse_rat("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rat("-0.25").unwrap(), rat(-1, 4));
        assert!(parse_rat("1/0").is_none());
    }

    #[test]
    fn kahan_beats_naive_on_small_terms() {
        let mut k = KahanSum::new();
        k.add(1.0);
        for _ in 0..1_000_000 {
            k.add(1e-16);
        }
        let expect = 1.0 + 1e-10;
        assert!((k.total() - expect).abs() < 1e-12);
    }

    #[test]
    fn xlnx_zero_convention() {
        assert_eq!(xlnx(0.0), 0.0);
        assert_eq!(xlnx(1.0), 0.0);
        assert!((xlnx(0.5) - 0.5 * 0.5f64.ln()).abs() < 1e-15);
    }
}
