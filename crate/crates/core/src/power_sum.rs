//! Sums of `r^α` over long, contiguous rank ranges.
//!
//! Ranges of at most one million terms are summed term by term. Longer ranges
//! sum a short head exactly and the rest by Euler–Maclaurin through the `B₆`
//! correction; the `B₆` term doubles as the remainder check, and the exact
//! head is lengthened until it is below `1e-13` of the total.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::scalar::{big_to_real, ln_big, NeumaierSum, Real};

pub(crate) const EXACT_TERMS: u64 = 1_000_000;

/// Euler–Maclaurin boundary coefficients `B₂ⱼ/(2j)!`, j = 1..3.
const EM_COEFFS: [f64; 3] = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0];

/// Ten-point Gauss–Legendre nodes and weights on [-1, 1] (positive half).
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_3,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// `ln Σ_{r=start}^{start+count−1} r^α`; `-inf` when `count` is zero.
pub fn log_power_sum<T: Real>(start: &BigUint, count: &BigUint, alpha: T) -> T {
    log_weighted_power_sum(start, count, alpha, &[T::one()])
}

/// `ln Σ_{u=1}^{L} (start−1+u)^α · w(u/L)` for a polynomial weight `w` given by
/// ascending coefficients. The weight must be nonnegative on the summed points.
pub fn log_weighted_power_sum<T: Real>(start: &BigUint, len: &BigUint, alpha: T, weight: &[T]) -> T {
    weighted_sum_with_limit(start, len, alpha, weight, EXACT_TERMS)
}

pub(crate) fn weighted_sum_with_limit<T: Real>(
    start: &BigUint,
    len: &BigUint,
    alpha: T,
    weight: &[T],
    exact_limit: u64,
) -> T {
    if len.is_zero() {
        return T::neg_infinity();
    }
    assert!(!start.is_zero(), "ranks start at 1");
    let end = start + len - BigUint::one();
    let reference = if alpha >= T::zero() { &end } else { start };
    let ln_ref = ln_big::<T>(reference);
    let sum = PowerSum {
        base: big_to_real(&(start - BigUint::one())),
        len: big_to_real(len),
        alpha,
        ln_ref,
        weight,
    };
    let total = match len.to_u64().filter(|&l| l <= exact_limit) {
        Some(l) => sum.exact(1, l),
        None => sum.euler_maclaurin(exact_limit),
    };
    if total > T::zero() {
        alpha * ln_ref + total.ln()
    } else {
        T::neg_infinity()
    }
}

struct PowerSum<'a, T> {
    /// `start − 1`, so that the summed ranks are `base + u`.
    base: T,
    len: T,
    alpha: T,
    ln_ref: T,
    weight: &'a [T],
}

impl<T: Real> PowerSum<'_, T> {
    /// `(t / ref)^α` at rank `t`.
    fn scaled_power(&self, t: T) -> T {
        (self.alpha * (t.ln() - self.ln_ref)).exp()
    }

    fn weight_at(&self, u: T, derivative: usize) -> T {
        let w = u / self.len;
        let mut coeffs: Vec<T> = self.weight.to_vec();
        for _ in 0..derivative {
            coeffs = poly_derivative(&coeffs);
        }
        poly_eval(&coeffs, w) / self.len.powi(derivative as i32)
    }

    fn term(&self, u: T) -> T {
        self.scaled_power(self.base + u) * self.weight_at(u, 0)
    }

    fn exact(&self, from: u64, to: u64) -> T {
        let mut acc = NeumaierSum::default();
        for u in from..=to {
            acc.add(self.term(T::lit(u as f64)));
        }
        acc.value()
    }

    /// k-th derivative in `u` of `(base+u)^α w(u/L)` (scaled by `ref^{-α}`).
    fn derivative(&self, u: T, k: usize) -> T {
        let t = self.base + u;
        let g = self.scaled_power(t);
        let mut falling = T::one();
        let mut binom = T::one();
        let mut total = T::zero();
        for i in 0..=k {
            let gi = falling * g / t.powi(i as i32);
            total = total + binom * gi * self.weight_at(u, k - i);
            falling = falling * (self.alpha - T::from_count(i));
            binom = binom * T::from_count(k - i) / T::from_count(i + 1);
        }
        total
    }

    fn integral(&self, from: T) -> T {
        if self.weight.len() <= 1 {
            let c = self.weight.first().copied().unwrap_or_else(T::zero);
            let t0 = self.base + from;
            let beta = self.alpha + T::one();
            let span = ((self.len - from) / t0).ln_1p();
            let factor = if beta == T::zero() { span } else { (beta * span).exp_m1() / beta };
            return c * self.scaled_power(t0) * t0 * factor;
        }
        // Composite Gauss–Legendre in s = ln u, panels of width at most 1/4.
        let (s0, s1) = (from.ln(), self.len.ln());
        let panels = ((s1 - s0) / T::lit(0.25)).ceil().max(T::one());
        let count = panels.to_usize().unwrap_or(1);
        let width = (s1 - s0) / panels;
        let mut acc = NeumaierSum::default();
        for p in 0..count {
            let mid = s0 + width * (T::from_count(p) + T::lit(0.5));
            let half = width * T::lit(0.5);
            for (&x, &w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
                for sign in [-T::one(), T::one()] {
                    let u = (mid + sign * half * T::lit(x)).exp();
                    acc.add(T::lit(w) * half * u * self.term(u));
                }
            }
        }
        acc.value()
    }

    fn euler_maclaurin(&self, exact_limit: u64) -> T {
        // Start the asymptotic part where ranks are at least 1000.
        let base = self.base.to_f64().unwrap_or(f64::INFINITY);
        let mut head_end: u64 = if base >= 999.0 { 0 } else { (999.0 - base) as u64 };
        loop {
            let head = if head_end > 0 { self.exact(1, head_end) } else { T::zero() };
            let from = T::lit((head_end + 1) as f64);
            let mut tail = self.integral(from) + (self.term(from) + self.term(self.len)) * T::lit(0.5);
            let mut last = T::zero();
            for (j, &c) in EM_COEFFS.iter().enumerate() {
                let k = 2 * j + 1;
                last = T::lit(c) * (self.derivative(self.len, k) - self.derivative(from, k));
                tail = tail + last;
            }
            let total = head + tail;
            let next = (head_end.max(1000)) * 10;
            if last.abs() <= T::lit(1e-13) * total.abs() || next > exact_limit {
                return total;
            }
            head_end = next;
        }
    }
}

pub(crate) fn poly_eval<T: Real>(coeffs: &[T], x: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
}

pub(crate) fn poly_derivative<T: Real>(coeffs: &[T]) -> Vec<T> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * T::from_count(i))
        .collect()
}
