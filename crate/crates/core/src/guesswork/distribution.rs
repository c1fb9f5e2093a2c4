use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{FromPrimitive, One, Zero};
use serde::Serialize;

use crate::power_sum::log_power_sum;
use crate::scalar::{ln_big, log_sum_exp, Real};

/// A run of consecutive ranks sharing one conditional probability level,
/// within one y-type class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankBlock<T> {
    pub start: BigUint,
    pub count: BigUint,
    /// Conditional probability of each sequence in the block.
    pub level: T,
    pub log_level: T,
    /// Total probability of the y-sequences of this block's class.
    pub y_mass: T,
    pub log_y_mass: T,
    pub class: usize,
}

/// Y-sequences sharing a symbol-count vector; all of them induce the same
/// conditional law of the guess rank.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeClass<T> {
    pub y_counts: Vec<usize>,
    pub y_mass: T,
    pub log_y_mass: T,
    /// Index range into [`GuessworkDistribution::blocks`].
    pub first_block: usize,
    pub block_count: usize,
}

/// Exact law of `G(X₁ₙ | Y₁ₙ)` as probability-level blocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuessworkDistribution<T> {
    pub(crate) n: usize,
    pub(crate) x_size: usize,
    pub(crate) classes: Vec<TypeClass<T>>,
    pub(crate) blocks: Vec<RankBlock<T>>,
}

/// Whether an interval endpoint is included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bounds {
    Open,
    Closed,
}

impl<T: Real> GuessworkDistribution<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn classes(&self) -> &[TypeClass<T>] {
        &self.classes
    }

    pub fn blocks(&self) -> &[RankBlock<T>] {
        &self.blocks
    }

    pub fn class_blocks(&self, class: usize) -> &[RankBlock<T>] {
        let c = &self.classes[class];
        &self.blocks[c.first_block..c.first_block + c.block_count]
    }

    /// `|X|ⁿ`, the largest rank.
    pub fn max_rank(&self) -> BigUint {
        BigUint::from(self.x_size).pow(self.n as u32)
    }

    fn log_weight(b: &RankBlock<T>) -> T {
        b.log_y_mass + b.log_level
    }

    pub fn total_mass(&self) -> T {
        log_sum_exp(self.blocks.iter().map(|b| Self::log_weight(b) + ln_big::<T>(&b.count))).exp()
    }

    pub fn log_prob_rank_one(&self) -> T {
        log_sum_exp(self.classes.iter().map(|c| Self::log_weight(&self.blocks[c.first_block])))
    }

    pub fn prob_rank_one(&self) -> T {
        self.log_prob_rank_one().exp()
    }

    /// `ln P(lo ≤ G ≤ hi)` for inclusive rank bounds.
    pub fn log_prob_ranks(&self, lo: &BigUint, hi: &BigUint) -> T {
        log_sum_exp(self.blocks.iter().filter_map(|b| {
            let end = &b.start + &b.count - BigUint::one();
            let from = (&b.start).max(lo);
            let to = (&end).min(hi);
            (from <= to).then(|| Self::log_weight(b) + ln_big::<T>(&(to - from + BigUint::one())))
        }))
    }

    /// `ln P(n⁻¹ ln G ∈ (lo, hi))` or the closed interval, per `bounds`.
    pub fn log_prob_log_rank_in(&self, lo: T, hi: T, bounds: Bounds) -> T {
        let first = self.first_rank_above(lo, bounds);
        let last = match self.first_rank_above(hi, flip(bounds)) {
            r if r.is_zero() => return T::neg_infinity(),
            r => r - BigUint::one(),
        };
        let last = last.min(self.max_rank());
        if first.is_zero() || first > last {
            return T::neg_infinity();
        }
        self.log_prob_ranks(&first, &last)
    }

    /// Smallest rank `r ≥ 1` with `ln(r)/n > v` (open) or `≥ v` (closed).
    fn first_rank_above(&self, v: T, bounds: Bounds) -> BigUint {
        let n = T::from_count(self.n);
        let inside = |r: &BigUint| {
            let s = ln_big::<T>(r) / n;
            match bounds {
                Bounds::Open => s > v,
                Bounds::Closed => s >= v,
            }
        };
        let one = BigUint::one();
        if inside(&one) {
            return one;
        }
        let guess = (v * n).exp().to_f64().unwrap_or(f64::INFINITY);
        let limit = self.max_rank() + BigUint::one();
        let mut r = if guess.is_finite() {
            BigUint::from_f64(guess.floor()).unwrap_or_else(BigUint::one).max(one.clone())
        } else {
            return limit;
        };
        if r > limit {
            return limit;
        }
        while !inside(&r) && r < limit {
            r += 1u32;
        }
        while r > one && inside(&(&r - 1u32)) {
            r -= 1u32;
        }
        r
    }

    /// `ln E G^α`.
    pub fn log_moment(&self, alpha: T) -> T {
        log_sum_exp(
            self.blocks
                .iter()
                .filter(|b| b.log_level > T::neg_infinity())
                .map(|b| Self::log_weight(b) + log_power_sum(&b.start, &b.count, alpha)),
        )
    }

    pub fn moment(&self, alpha: T) -> T {
        self.log_moment(alpha).exp()
    }

    /// Unconditional pmf of the rank as constant steps over `[start, start+len)`.
    pub fn rank_steps(&self) -> Vec<RankStep<T>> {
        let mut cuts: Vec<(&BigUint, usize, usize)> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| (&b.start, b.class, i))
            .collect();
        cuts.sort_by(|a, b| a.0.cmp(b.0).then(a.1.cmp(&b.1)));
        let mut current: Vec<T> = vec![T::neg_infinity(); self.classes.len()];
        let mut steps = Vec::new();
        let end = self.max_rank() + BigUint::one();
        let mut i = 0;
        while i < cuts.len() {
            let start = cuts[i].0.clone();
            while i < cuts.len() && *cuts[i].0 == start {
                let b = &self.blocks[cuts[i].2];
                current[b.class] = Self::log_weight(b);
                i += 1;
            }
            let next = cuts.get(i).map_or(end.clone(), |c| c.0.clone());
            let log_pmf = log_sum_exp(current.iter().copied());
            steps.push(RankStep { len: &next - &start, start, pmf: log_pmf.exp(), log_pmf });
        }
        steps
    }
}

fn flip(b: Bounds) -> Bounds {
    match b {
        Bounds::Open => Bounds::Closed,
        Bounds::Closed => Bounds::Open,
    }
}

/// Constant-pmf run of ranks in the unconditional law of a guess rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankStep<T> {
    pub start: BigUint,
    pub len: BigUint,
    pub pmf: T,
    pub log_pmf: T,
}

pub(crate) fn cmp_desc<T: Real>(a: T, b: T) -> Ordering {
    b.partial_cmp(&a).unwrap_or(Ordering::Equal)
}
