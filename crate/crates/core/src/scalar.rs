//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All probability and entropy arithmetic is generic over [`Real`], which is
//! implemented for `f32` and `f64`. Tolerances that are quoted as absolute
//! constants (for example the `1e-12` mass tolerance) are widened to a small
//! multiple of machine epsilon when the scalar cannot resolve them.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display, LowerExp};
use std::ops::Add;

use num_bigint::BigUint;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::Serialize;

/// Floating scalar used throughout the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Serialize
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn from_count(v: usize) -> Self {
        Self::from_usize(v).expect("count representable")
    }

    /// Absolute tolerance `tol`, widened to what the scalar can resolve.
    fn tolerance(tol: f64) -> Self {
        Self::lit(tol).max(Self::epsilon() * Self::lit(64.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Relative tolerance used to decide that two log-probabilities are equal.
pub(crate) fn tie_tolerance<T: Real>() -> T {
    T::epsilon().sqrt() * T::lit(0.01)
}

/// Whether two log-probabilities denote the same probability level.
pub(crate) fn log_levels_tie<T: Real>(a: T, b: T) -> bool {
    if a == b {
        return true;
    }
    if a.is_infinite() || b.is_infinite() {
        return false;
    }
    (a - b).abs() <= tie_tolerance::<T>() * (T::one() + a.abs().max(b.abs()))
}

/// Descending order on log-probabilities, `-inf` last.
pub(crate) fn desc<T: Real>(a: &T, b: &T) -> Ordering {
    b.partial_cmp(a).unwrap_or(Ordering::Equal)
}

/// `ln Σ exp(v)`; returns `-inf` for an empty or all-`-inf` input.
pub fn log_sum_exp<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    let values: Vec<T> = values.into_iter().collect();
    let max = values
        .iter()
        .copied()
        .fold(T::neg_infinity(), |m, v| if v > m { v } else { m });
    if max == T::neg_infinity() {
        return T::neg_infinity();
    }
    if max == T::infinity() {
        return T::infinity();
    }
    let mut acc = NeumaierSum::default();
    for v in values {
        acc.add((v - max).exp());
    }
    max + acc.value().ln()
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct NeumaierSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> NeumaierSum<T> {
    pub(crate) fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp = self.comp + ((self.sum - t) + v);
        } else {
            self.comp = self.comp + ((v - t) + self.sum);
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// Pairwise summation; the result depends only on the order of `values`.
pub(crate) fn pairwise_sum<T: Real>(values: &[T]) -> T {
    match values.len() {
        0 => T::zero(),
        1..=8 => values.iter().fold(T::zero(), |a, &b| a + b),
        len => {
            let (lo, hi) = values.split_at(len / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

/// Natural logarithm of an arbitrary-precision count.
pub fn ln_big<T: Real>(v: &BigUint) -> T {
    let bits = v.bits();
    if bits == 0 {
        return T::neg_infinity();
    }
    let ln = if bits <= 1000 {
        v.to_f64().unwrap_or(f64::INFINITY).ln()
    } else {
        let shift = bits - 900;
        (v >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
    };
    T::lit(ln)
}

/// Nearest scalar to an arbitrary-precision count (`inf` if out of range).
pub fn big_to_real<T: Real>(v: &BigUint) -> T {
    T::from_f64(v.to_f64().unwrap_or(f64::INFINITY)).unwrap_or_else(T::infinity)
}

/// A real number or the `+∞` sentinel used by rate functions and exponents.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum ExtendedReal<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> ExtendedReal<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedReal::Infinite)
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinite => None,
        }
    }

    /// Finite value, panicking on the sentinel. Test helper.
    pub fn unwrap(&self) -> T {
        self.finite().expect("rate value is +inf")
    }

    pub fn map(self, f: impl FnOnce(T) -> T) -> Self {
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::Finite(f(v)),
            ExtendedReal::Infinite => ExtendedReal::Infinite,
        }
    }

    /// Multiplies by a nonnegative factor with the convention `0 · ∞ = 0`.
    pub fn scale(self, factor: T) -> Self {
        if factor == T::zero() {
            return ExtendedReal::Finite(T::zero());
        }
        self.map(|v| v * factor)
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl<T: Real> Add for ExtendedReal<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::Infinite,
        }
    }
}

impl<T: Real> Display for ExtendedReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => Display::fmt(v, f),
            ExtendedReal::Infinite => f.write_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_handles_neg_infinity() {
        assert_eq!(log_sum_exp::<f64, _>(vec![]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(vec![f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
        let v = log_sum_exp(vec![0.0f64.ln(), 0.5f64.ln(), 0.25f64.ln()]);
        assert!((v - 0.75f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ln_big_matches_f64_and_survives_huge_values() {
        let v = BigUint::from(1u64 << 40);
        assert!((ln_big::<f64>(&v) - 40.0 * std::f64::consts::LN_2).abs() < 1e-12);
        let huge = BigUint::from(3u32).pow(2000);
        let expect = 2000.0 * 3f64.ln();
        assert!((ln_big::<f64>(&huge) - expect).abs() / expect < 1e-14);
    }

    #[test]
    fn extended_order_and_arithmetic() {
        let a = ExtendedReal::Finite(1.0f64);
        assert!(ExtendedReal::Infinite > a);
        assert!((a + ExtendedReal::Infinite).is_infinite());
        assert_eq!(ExtendedReal::<f64>::Infinite.scale(0.0), ExtendedReal::Finite(0.0));
        assert_eq!(ExtendedReal::<f64>::Infinite.to_string(), "inf");
    }

    #[test]
    fn ties_are_relative() {
        assert!(log_levels_tie(-10.0f64, -10.0 + 1e-12));
        assert!(!log_levels_tie(-10.0f64, -10.0 + 1e-6));
        assert!(log_levels_tie(f64::NEG_INFINITY, f64::NEG_INFINITY));
        assert!(!log_levels_tie(f64::NEG_INFINITY, -1e300));
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 5050.0);
    }
}
