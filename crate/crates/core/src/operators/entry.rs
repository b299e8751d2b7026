use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Scalar type of operator entries: exact rationals or complex doubles.
pub trait Entry:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn conj(&self) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    /// Exact for finite doubles in the rational case.
    fn from_f64(x: f64) -> Self;
    fn magnitude(&self) -> f64;
    fn to_complex(&self) -> Complex64;

    fn pow2(k: i32) -> Self {
        let r = if k >= 0 {
            BigRational::from_integer(BigInt::one() << k as usize)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-k) as usize)
        };
        Self::from_rational(&r)
    }

    fn pow3(k: i32) -> Self {
        let p = num_traits::pow(BigInt::from(3), k.unsigned_abs() as usize);
        let r = if k >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(BigInt::one(), p)
        };
        Self::from_rational(&r)
    }

    fn from_i64(x: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(x)))
    }
}

impl Entry for BigRational {
    fn conj(&self) -> Self {
        self.clone()
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite value")
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

impl Entry for Complex64 {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers() {
        assert_eq!(
            <BigRational as Entry>::pow3(-2),
            BigRational::new(1.into(), 9.into())
        );
        assert_eq!(
            <BigRational as Entry>::pow2(3),
            BigRational::from_integer(8.into())
        );
        assert_eq!(<Complex64 as Entry>::pow2(-1), Complex64::new(0.5, 0.0));
        assert_eq!(
            <BigRational as Entry>::from_f64(0.375),
            BigRational::new(3.into(), 8.into())
        );
    }
}
