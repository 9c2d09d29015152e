//! Checked integer arithmetic with an arbitrary-precision fallback.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Integer arithmetic that may refuse to produce a result on overflow.
///
/// `i128` reports overflow with `None`; `BigInt` never does.
pub trait ExactInt: Clone + Ord + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn add(&self, rhs: &Self) -> Option<Self>;
    fn sub(&self, rhs: &Self) -> Option<Self>;
    fn mul(&self, rhs: &Self) -> Option<Self>;
    /// Division that is known to be exact.
    fn div_exact(&self, rhs: &Self) -> Self;
    /// Floor division and the matching nonnegative remainder (for rhs > 0).
    fn div_mod_floor(&self, rhs: &Self) -> (Self, Self);
    fn gcd(&self, rhs: &Self) -> Self;
    fn signum(&self) -> i32;
    fn neg(&self) -> Option<Self>;
    fn abs(&self) -> Option<Self>;

    fn is_zero(&self) -> bool {
        self.signum() == 0
    }
}

impl ExactInt for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn add(&self, rhs: &Self) -> Option<Self> {
        self.checked_add(*rhs)
    }
    fn sub(&self, rhs: &Self) -> Option<Self> {
        self.checked_sub(*rhs)
    }
    fn mul(&self, rhs: &Self) -> Option<Self> {
        self.checked_mul(*rhs)
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self % rhs, 0);
        self / rhs
    }
    fn div_mod_floor(&self, rhs: &Self) -> (Self, Self) {
        Integer::div_mod_floor(self, rhs)
    }
    fn gcd(&self, rhs: &Self) -> Self {
        Integer::gcd(self, rhs)
    }
    fn signum(&self) -> i32 {
        i128::signum(*self) as i32
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn abs(&self) -> Option<Self> {
        self.checked_abs()
    }
}

impl ExactInt for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn add(&self, rhs: &Self) -> Option<Self> {
        Some(self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Option<Self> {
        Some(self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Option<Self> {
        Some(self * rhs)
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn div_mod_floor(&self, rhs: &Self) -> (Self, Self) {
        Integer::div_mod_floor(self, rhs)
    }
    fn gcd(&self, rhs: &Self) -> Self {
        Integer::gcd(self, rhs)
    }
    fn signum(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn abs(&self) -> Option<Self> {
        Some(Signed::abs(self))
    }
}

/// Runs the `i128` path and reruns with `BigInt` if it reported overflow.
pub fn with_fallback<T>(
    fast: impl FnOnce() -> Option<T>,
    slow: impl FnOnce() -> Option<T>,
) -> T {
    match fast() {
        Some(v) => v,
        None => slow().expect("BigInt arithmetic cannot overflow"),
    }
}

