use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dyadic::DyadicScalar;
use crate::error::{Error, Result};

/// A point in the triangular lattice basis `(v1 - v0, v2 - v0)`.
///
/// The Euclidean position is `alpha * (1, 0) + beta * (1/2, sqrt(3)/2)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TrianglePoint {
    pub alpha: DyadicScalar,
    pub beta: DyadicScalar,
}

impl TrianglePoint {
    pub fn new(alpha: DyadicScalar, beta: DyadicScalar) -> Self {
        TrianglePoint { alpha, beta }
    }

    pub fn from_ints(alpha: i64, beta: i64) -> Self {
        Self::new(DyadicScalar::from_int(alpha), DyadicScalar::from_int(beta))
    }

    /// `(a_num / a_den, b_num / b_den)` with power-of-two denominators.
    pub fn from_ratios(a_num: i64, a_den: i64, b_num: i64, b_den: i64) -> Result<Self> {
        Ok(Self::new(
            DyadicScalar::from_ratio(a_num, a_den)?,
            DyadicScalar::from_ratio(b_num, b_den)?,
        ))
    }

    pub fn origin() -> Self {
        Self::from_ints(0, 0)
    }

    /// The fixed point `v_i` of the contraction `w_i`.
    pub fn corner(i: u8) -> Self {
        match i {
            0 => Self::from_ints(0, 0),
            1 => Self::from_ints(1, 0),
            2 => Self::from_ints(0, 1),
            _ => panic!("corner index {i} out of range"),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.alpha + &other.alpha, &self.beta + &other.beta)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(&self.alpha - &other.alpha, &self.beta - &other.beta)
    }

    /// Multiplication by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        Self::new(self.alpha.shl(k), self.beta.shl(k))
    }

    /// Exact squared Euclidean distance.
    pub fn squared_distance(&self, other: &Self) -> DyadicScalar {
        let da = &self.alpha - &other.alpha;
        let db = &self.beta - &other.beta;
        &(&(&da * &da) + &(&db * &db)) + &(&da * &db)
    }

    pub fn euclidean(&self) -> (f64, f64) {
        let a = self.alpha.to_f64();
        let b = self.beta.to_f64();
        (a + 0.5 * b, b * 3f64.sqrt() / 2.0)
    }

    /// Smallest exponent among the coordinates (the finest dyadic scale used).
    pub fn finest_exponent(&self) -> i64 {
        let ea = if self.alpha.is_zero() {
            0
        } else {
            self.alpha.exponent()
        };
        let eb = if self.beta.is_zero() {
            0
        } else {
            self.beta.exponent()
        };
        ea.min(eb).min(0)
    }
}

impl fmt::Display for TrianglePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.beta)
    }
}

impl fmt::Debug for TrianglePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for TrianglePoint {
    type Err = Error;

    /// Parses `alpha,beta`, e.g. `1/2,0/1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Malformed(format!("expected `alpha,beta`, got {s:?}")))?;
        Ok(Self::new(a.parse()?, b.parse()?))
    }
}
