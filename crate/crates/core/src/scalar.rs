//! Scalar backends for the pointwise algebra.
//!
//! Everything that touches states, cones and laminates is generic over a
//! [`Scalar`]. Two backends are provided:
//!
//! * `f64` — for spectral work and didactic large-scale hull runs,
//! * [`Rat`] (arbitrary-precision rationals) — for hull certificates, where
//!   the smallness constants sit around `1e-25` and float verification of
//!   leaf membership would be vacuous.
//!
//! On the rational backend every operation is exact and the effective
//! tolerance of all predicates is zero.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// Exact rational scalar.
pub type Rat = BigRational;

/// Arithmetic interface shared by the float and exact backends.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + Send
    + Sync
    + 'static
{
    /// True for backends where `==` and `<` are exact predicates.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;
    fn ratio(num: i64, den: i64) -> Self;
    /// Exact embedding of a finite float (dyadic rational on the exact backend).
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    /// `Some(sqrt)` when the square root is representable in the backend.
    fn sqrt_exact(&self) -> Option<Self>;
    /// A representable approximation of the square root of a nonnegative
    /// value. Used only where any factorization `b*c = target` with balanced
    /// magnitudes is admissible, never where exactness is claimed.
    fn sqrt_approx(&self) -> Self;
    /// Parse either a plain number or a `p/q` rational literal.
    fn parse(text: &str) -> Option<Self>;

    fn half(&self) -> Self {
        self.clone() / Self::from_int(2)
    }
    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
    fn max_with(&self, other: &Self) -> Self {
        if *self < *other {
            other.clone()
        } else {
            self.clone()
        }
    }
    fn min_with(&self, other: &Self) -> Self {
        if *self > *other {
            other.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt_exact(&self) -> Option<Self> {
        if *self >= 0.0 {
            Some(self.sqrt())
        } else {
            None
        }
    }
    fn sqrt_approx(&self) -> Self {
        self.max(0.0).sqrt()
    }
    fn parse(text: &str) -> Option<Self> {
        if let Some((p, q)) = text.split_once('/') {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            return Some(p / q);
        }
        text.trim().parse().ok()
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
    }
    fn ratio(num: i64, den: i64) -> Self {
        Rat::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(x: f64) -> Self {
        <Rat as FromPrimitive>::from_f64(x).expect("finite float")
    }
    fn to_f64(&self) -> f64 {
        rat_to_f64(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn sqrt_exact(&self) -> Option<Self> {
        if Signed::is_negative(self) {
            return None;
        }
        if Zero::is_zero(self) {
            return Some(<Rat as Zero>::zero());
        }
        let ns = self.numer().sqrt();
        let ds = self.denom().sqrt();
        if &(&ns * &ns) == self.numer() && &(&ds * &ds) == self.denom() {
            Some(Rat::new(ns, ds))
        } else {
            None
        }
    }
    fn sqrt_approx(&self) -> Self {
        if let Some(s) = self.sqrt_exact() {
            return s;
        }
        // Scale into f64 range by an even power of two, take the float root
        // and round to a short dyadic so certificate entries stay small.
        let mut v = self.clone();
        let four = Rat::from_integer(BigInt::from(4));
        let mut shift = 0i64; // value = v * 4^shift
        while rat_to_f64(&v) < 1e-150 && !Zero::is_zero(&v) {
            v = &v * &four;
            shift -= 1;
        }
        while rat_to_f64(&v) > 1e150 {
            v = &v / &four;
            shift += 1;
        }
        let root = dyadic(rat_to_f64(&v).max(0.0).sqrt(), 24);
        let two = Rat::from_integer(BigInt::from(2));
        let scale = if shift >= 0 {
            num::pow::pow(two, shift as usize)
        } else {
            <Rat as One>::one() / num::pow::pow(two, (-shift) as usize)
        };
        root * scale
    }
    fn parse(text: &str) -> Option<Self> {
        let t = text.trim();
        if let Ok(r) = Rat::from_str(t) {
            return Some(r);
        }
        let x: f64 = t.parse().ok()?;
        if x.is_finite() {
            <Rat as FromPrimitive>::from_f64(x)
        } else {
            None
        }
    }
}

/// `to_f64` that survives numerators/denominators far outside float range.
fn rat_to_f64(r: &Rat) -> f64 {
    if let Some(x) = ToPrimitive::to_f64(r) {
        if x.is_finite() && !(x == 0.0 && !Zero::is_zero(r)) {
            return x;
        }
    }
    // Per-part exponent balancing.
    let n = r.numer();
    let d = r.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = nb.max(db) - 500;
    if shift > 0 {
        let nn = n >> shift.min(nb - 1).max(0);
        let dd = d >> shift.min(db - 1).max(0);
        nn.to_f64().unwrap_or(0.0) / dd.to_f64().unwrap_or(1.0)
    } else {
        0.0
    }
}

/// Round a float to a dyadic rational with `bits` mantissa bits.
fn dyadic(x: f64, bits: u32) -> Rat {
    if x == 0.0 {
        return <Rat as Zero>::zero();
    }
    let exp = x.abs().log2().floor() as i32;
    let scale = (bits as i32) - 1 - exp;
    let mant = (x * 2f64.powi(scale)).round() as i64;
    let two = Rat::from_integer(BigInt::from(2));
    if scale >= 0 {
        Rat::new(BigInt::from(mant), BigInt::one() << scale as usize)
    } else {
        Rat::from_integer(BigInt::from(mant)) * num::pow::pow(two, (-scale) as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sqrt_detects_squares() {
        let x = Rat::ratio(9, 16);
        assert_eq!(x.sqrt_exact(), Some(Rat::ratio(3, 4)));
        assert_eq!(Rat::ratio(2, 1).sqrt_exact(), None);
    }

    #[test]
    fn approx_sqrt_is_close() {
        let x = Rat::ratio(2, 1);
        let s = x.sqrt_approx();
        let err = Scalar::to_f64(&(s.clone() * s - x)).abs();
        assert!(err < 1e-5);
    }

    #[test]
    fn approx_sqrt_handles_tiny_values() {
        // Around the hull constants' magnitude and far below it.
        for exp in [25, 60, 200] {
            let x = Rat::ratio(1, 10).powi(exp);
            let s = x.sqrt_approx();
            let rel = Scalar::to_f64(&((s.clone() * s.clone() - x.clone()) / x)).abs();
            assert!(rel < 1e-4, "exp {exp}: rel {rel}");
            assert!(s > Rat::zero());
        }
    }

    #[test]
    fn parse_accepts_rationals_and_decimals() {
        assert_eq!(<Rat as Scalar>::parse("3/7"), Some(Rat::ratio(3, 7)));
        assert_eq!(<Rat as Scalar>::parse("0.5"), Some(Rat::ratio(1, 2)));
        assert_eq!(<f64 as Scalar>::parse("3/4"), Some(0.75));
    }
}

pub use num::traits::{One as ScalarOne, Zero as ScalarZero};
