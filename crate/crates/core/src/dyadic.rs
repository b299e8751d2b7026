//! Exact dyadic rationals `mantissa * 2^exponent`.
//!
//! Every coordinate that appears in the gasket tower (vertices, midpoints,
//! translations of the rotation isometries) is a dyadic rational, so the
//! geometry never needs floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact dyadic rational.
///
/// Always normalized: the mantissa is odd, or zero with exponent 0. This makes
/// the derived `Eq`/`Hash` agree with numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicScalar {
    mantissa: BigInt,
    exponent: i64,
}

impl DyadicScalar {
    pub fn new(mantissa: impl Into<BigInt>, exponent: i64) -> Self {
        let mut d = DyadicScalar {
            mantissa: mantissa.into(),
            exponent,
        };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        DyadicScalar {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(v, 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        DyadicScalar {
            mantissa: BigInt::one(),
            exponent: k,
        }
    }

    /// Builds `num / den`; fails unless `den` is a positive power of two.
    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den <= 0 || (den & (den - 1)) != 0 {
            return Err(Error::Malformed(format!(
                "denominator {den} is not a positive power of two"
            )));
        }
        Ok(Self::new(num, -(den.trailing_zeros() as i64)))
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        if let Some(tz) = self.mantissa.trailing_zeros() {
            if tz > 0 {
                self.mantissa >>= tz;
                self.exponent += tz as i64;
            }
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// Multiplication by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        DyadicScalar {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    pub fn half(&self) -> Self {
        self.shl(-1)
    }

    pub fn double(&self) -> Self {
        self.shl(1)
    }

    pub fn abs(&self) -> Self {
        DyadicScalar {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// The integer `m` with `self = m * 2^exp`, if one exists.
    pub fn to_integer_at(&self, exp: i64) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        if exp > self.exponent {
            return None;
        }
        Some(&self.mantissa << ((self.exponent - exp) as usize))
    }

    /// Same as [`to_integer_at`](Self::to_integer_at) but narrowed to `i64`.
    pub fn to_i64_at(&self, exp: i64) -> Option<i64> {
        self.to_integer_at(exp).and_then(|m| m.to_i64())
    }

    pub fn to_f64(&self) -> f64 {
        let m = self.mantissa.to_f64().unwrap_or(f64::NAN);
        m * (self.exponent as f64).exp2()
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << ((self.exponent - e) as usize);
        let b = &other.mantissa << ((other.exponent - e) as usize);
        (a, b, e)
    }
}

impl Default for DyadicScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &DyadicScalar {
    type Output = DyadicScalar;
    fn add(self, rhs: &DyadicScalar) -> DyadicScalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(rhs);
        DyadicScalar::new(a + b, e)
    }
}

impl Sub for &DyadicScalar {
    type Output = DyadicScalar;
    fn sub(self, rhs: &DyadicScalar) -> DyadicScalar {
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(rhs);
        DyadicScalar::new(a - b, e)
    }
}

impl Mul for &DyadicScalar {
    type Output = DyadicScalar;
    fn mul(self, rhs: &DyadicScalar) -> DyadicScalar {
        if self.is_zero() || rhs.is_zero() {
            return DyadicScalar::zero();
        }
        // product of odd mantissas is odd: already normalized
        DyadicScalar {
            mantissa: &self.mantissa * &rhs.mantissa,
            exponent: self.exponent + rhs.exponent,
        }
    }
}

impl Neg for &DyadicScalar {
    type Output = DyadicScalar;
    fn neg(self) -> DyadicScalar {
        DyadicScalar {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for DyadicScalar {
            type Output = DyadicScalar;
            fn $m(self, rhs: DyadicScalar) -> DyadicScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for DyadicScalar {
    type Output = DyadicScalar;
    fn neg(self) -> DyadicScalar {
        -&self
    }
}

impl Ord for DyadicScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 {
            write!(f, "{}", &self.mantissa << (self.exponent as usize))
        } else {
            write!(
                f,
                "{}/{}",
                self.mantissa,
                BigInt::one() << ((-self.exponent) as usize)
            )
        }
    }
}

impl fmt::Debug for DyadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for DyadicScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for DyadicScalar {
    type Err = Error;

    /// Accepts `n`, `n/2^k` written as `n/d`, or `m*2^e`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Malformed(format!("not a dyadic rational: {s:?}"));
        if let Some((m, e)) = s.split_once("*2^") {
            let m: BigInt = m.trim().parse().map_err(|_| bad())?;
            let e: i64 = e.trim().parse().map_err(|_| bad())?;
            return Ok(DyadicScalar::new(m, e));
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d <= BigInt::zero() {
                return Err(bad());
            }
            let tz = d.trailing_zeros().unwrap_or(0);
            if d != (BigInt::one() << tz) {
                return Err(Error::Malformed(format!(
                    "denominator of {s:?} is not a power of two"
                )));
            }
            return Ok(DyadicScalar::new(n, -(tz as i64)));
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(DyadicScalar::new(n, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(m: i64, e: i64) -> DyadicScalar {
        DyadicScalar::new(m, e)
    }

    #[test]
    fn normalizes_even_mantissa() {
        let x = d(12, -4);
        assert_eq!(x.mantissa(), &BigInt::from(3));
        assert_eq!(x.exponent(), -2);
        assert_eq!(d(0, 7).exponent(), 0);
        assert_eq!(x, d(3, -2));
    }

    #[test]
    fn parses_fractions() {
        assert_eq!("3/4".parse::<DyadicScalar>().unwrap(), d(3, -2));
        assert_eq!("0/1".parse::<DyadicScalar>().unwrap(), DyadicScalar::zero());
        assert_eq!("-5".parse::<DyadicScalar>().unwrap(), d(-5, 0));
        assert_eq!("7*2^-3".parse::<DyadicScalar>().unwrap(), d(7, -3));
        assert!("1/3".parse::<DyadicScalar>().is_err());
        assert_eq!(d(3, -2).to_string(), "3/4");
        assert_eq!(d(3, 2).to_string(), "12");
    }

    #[test]
    fn integer_view() {
        assert_eq!(d(3, -2).to_i64_at(-4), Some(12));
        assert_eq!(d(3, -2).to_i64_at(-1), None);
    }

    proptest! {
        #[test]
        fn arithmetic_matches_rationals(a in -1000i64..1000, ea in -20i64..20,
                                        b in -1000i64..1000, eb in -20i64..20) {
            let x = d(a, ea);
            let y = d(b, eb);
            let fx = a as f64 * (ea as f64).exp2();
            let fy = b as f64 * (eb as f64).exp2();
            prop_assert_eq!((&x + &y).to_f64(), fx + fy);
            prop_assert_eq!((&x - &y).to_f64(), fx - fy);
            prop_assert_eq!((&x * &y).to_f64(), fx * fy);
            prop_assert_eq!(x.half().double(), x.clone());
            prop_assert_eq!(x.cmp(&y), fx.partial_cmp(&fy).unwrap());
            prop_assert_eq!(&(&x + &y) - &y, x);
        }
    }
}
