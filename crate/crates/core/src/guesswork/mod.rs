//! Optimal (conditional) guessing and the exact law of the guess rank.
//!
//! Ranks are computed by type-class counting: positions are grouped by their
//! y-symbol and only per-group x-type vectors are enumerated, so the cost is
//! polynomial in `n` for fixed alphabets. Counts are arbitrary precision.
//!
//! Equally likely sequences are ordered lexicographically by symbol label,
//! position 1 first. Zero-probability sequences come after every
//! positive-probability one.

mod distribution;
mod table;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;

pub use distribution::{Bounds, GuessworkDistribution, RankBlock, RankStep, TypeClass};
pub(crate) use table::compositions;

use crate::error::{Error, Result};
use crate::model::{Distribution, PairSource};
use crate::scalar::{ln_big, log_levels_tie, log_sum_exp, Real};
use table::{multinomial, TableCache};

/// Cap on the number of x-type tuples an exact computation may enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_type_tuples: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_type_tuples: 100_000_000 }
    }
}

impl Budget {
    pub fn new(max_type_tuples: u128) -> Self {
        Self { max_type_tuples }
    }

    pub(crate) fn check(&self, required: u128) -> Result<()> {
        if required > self.max_type_tuples {
            return Err(Error::BudgetExceeded { required, cap: self.max_type_tuples });
        }
        Ok(())
    }
}

/// Guessing order over one alphabet: `rank_of[symbol] ∈ 1..=|X|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessOrder {
    rank_of: Vec<usize>,
    by_rank: Vec<usize>,
}

impl GuessOrder {
    pub fn rank(&self, symbol: usize) -> usize {
        self.rank_of[symbol]
    }

    /// Symbol indices in guessing order.
    pub fn sequence(&self) -> &[usize] {
        &self.by_rank
    }
}

/// Guesses in nonincreasing probability, ties by label.
pub fn optimal_order<T: Real>(dist: &Distribution<T>) -> GuessOrder {
    let logs: Vec<T> = dist.pmf().iter().map(|p| p.ln()).collect();
    let mut idx: Vec<usize> = (0..logs.len()).collect();
    idx.sort_by(|&a, &b| distribution::cmp_desc(logs[a], logs[b]));
    // Regroup runs of tied levels and order each run by label.
    let mut by_rank = Vec::with_capacity(idx.len());
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && log_levels_tie(logs[idx[i]], logs[idx[j]]) {
            j += 1;
        }
        let mut run = idx[i..j].to_vec();
        run.sort_by_key(|&s| dist.alphabet().lex_rank(s));
        by_rank.extend(run);
        i = j;
    }
    let mut rank_of = vec![0; by_rank.len()];
    for (r, &s) in by_rank.iter().enumerate() {
        rank_of[s] = r + 1;
    }
    GuessOrder { rank_of, by_rank }
}

/// Reusable exact rank oracle for one source; caches level tables.
#[derive(Debug)]
pub struct RankOracle<T> {
    tables: TableCache<T>,
    x_lex: Vec<usize>,
    x_size: usize,
    y_size: usize,
    budget: Budget,
}

impl<T: Real> RankOracle<T> {
    pub fn new(source: &PairSource<T>, budget: Budget) -> Self {
        Self {
            tables: TableCache::new(source.log_conditionals()),
            x_lex: (0..source.x_size()).map(|i| source.x_alphabet().lex_rank(i)).collect(),
            x_size: source.x_size(),
            y_size: source.y_size(),
            budget,
        }
    }

    /// Rank of x-sequence `xs` given `ys`, both as symbol indices.
    pub fn rank(&self, xs: &[usize], ys: &[usize]) -> Result<BigUint> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch { x: xs.len(), y: ys.len() });
        }
        if xs.is_empty() {
            return Err(Error::InvalidArgument("sequences must be nonempty".into()));
        }
        if let Some(&bad) = xs.iter().find(|&&x| x >= self.x_size) {
            return Err(Error::UnknownSymbol(format!("x index {bad}")));
        }
        if let Some(&bad) = ys.iter().find(|&&y| y >= self.y_size) {
            return Err(Error::UnknownSymbol(format!("y index {bad}")));
        }
        let mut remaining = vec![0usize; self.y_size];
        let mut kx = vec![vec![0usize; self.x_size]; self.y_size];
        for (&x, &y) in xs.iter().zip(ys) {
            remaining[y] += 1;
            kx[y][x] += 1;
        }
        self.budget.check(self.tables.type_tuples(&remaining))?;
        let target = self.tables.log_level(&kx);
        let mut rank = self.tables.class_table(&remaining).count_above(target) + BigUint::one();

        let neg_inf = T::neg_infinity();
        let add = |a: T, b: T| if a == neg_inf || b == neg_inf { neg_inf } else { a + b };
        let mut prefix = T::zero();
        for (&x, &y) in xs.iter().zip(ys) {
            remaining[y] -= 1;
            let tail = self.tables.class_table(&remaining);
            for a in (0..self.x_size).filter(|&a| self.x_lex[a] < self.x_lex[x]) {
                let partial = add(prefix, self.tables.log_cond(y, a));
                rank += tail.count_completing(partial, target);
            }
            prefix = add(prefix, self.tables.log_cond(y, x));
        }
        Ok(rank)
    }
}

/// Rank of `x_seq` under the optimal conditional guessing function given `y_seq`.
pub fn guess_rank<T: Real, S: AsRef<str>>(source: &PairSource<T>, x_seq: &[S], y_seq: &[S]) -> Result<BigUint> {
    if x_seq.len() != y_seq.len() {
        return Err(Error::LengthMismatch { x: x_seq.len(), y: y_seq.len() });
    }
    let xs = source.x_alphabet().indices(x_seq)?;
    let ys = source.y_alphabet().indices(y_seq)?;
    RankOracle::new(source, Budget::default()).rank(&xs, &ys)
}

/// Exact law of the guess rank for length-`n` sequences, default budget.
pub fn guesswork_distribution<T: Real>(source: &PairSource<T>, n: usize) -> Result<GuessworkDistribution<T>> {
    guesswork_distribution_with(source, n, Budget::default())
}

/// Number of x-type tuples enumerated for the length-`n` distribution.
pub fn required_budget<T: Real>(source: &PairSource<T>, n: usize) -> u128 {
    let y_types = table::binomial_saturating((n + source.y_size() - 1) as u128, (source.y_size() - 1) as u128);
    if y_types > 100_000_000 {
        return y_types;
    }
    let tables = TableCache::<T>::new(source.log_conditionals());
    compositions(n, source.y_size())
        .iter()
        .fold(0u128, |acc, c| acc.saturating_add(tables.type_tuples(c)))
}

pub fn guesswork_distribution_with<T: Real>(
    source: &PairSource<T>,
    n: usize,
    budget: Budget,
) -> Result<GuessworkDistribution<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sequence length must be >= 1".into()));
    }
    budget.check(required_budget(source, n))?;
    let tables = TableCache::new(source.log_conditionals());
    let log_py: Vec<T> = source.marginal_y_pmf().iter().map(|p| p.ln()).collect();
    let y_types = compositions(n, source.y_size());
    let per_class: Vec<_> = y_types
        .par_iter()
        .map(|counts| {
            let table = tables.class_table(counts);
            let log_y_mass = counts
                .iter()
                .zip(&log_py)
                .filter(|(&c, _)| c > 0)
                .fold(ln_big::<T>(&multinomial(counts)), |acc, (&c, &lp)| acc + T::from_count(c) * lp);
            (table, log_y_mass)
        })
        .collect();

    let mut classes = Vec::with_capacity(y_types.len());
    let mut blocks = Vec::new();
    for (class, (counts, (table, log_y_mass))) in y_types.into_iter().zip(per_class).enumerate() {
        let first_block = blocks.len();
        let mut start = BigUint::one();
        for e in &table.entries {
            blocks.push(RankBlock {
                start: start.clone(),
                count: e.count.clone(),
                level: e.log_level.exp(),
                log_level: e.log_level,
                y_mass: log_y_mass.exp(),
                log_y_mass,
                class,
            });
            start += &e.count;
        }
        classes.push(TypeClass {
            y_counts: counts,
            y_mass: log_y_mass.exp(),
            log_y_mass,
            first_block,
            block_count: table.entries.len(),
        });
    }
    Ok(GuessworkDistribution { n, x_size: source.x_size(), classes, blocks })
}

/// `E G(X₁ₙ | Y₁ₙ)^α`.
pub fn moment_exact<T: Real>(source: &PairSource<T>, n: usize, alpha: T) -> Result<T> {
    Ok(guesswork_distribution(source, n)?.moment(alpha))
}

/// `ln Σ_y (Σ_x p(x,y)^{1/(1+α)})^{1+α}` for one letter.
pub(crate) fn log_single_letter_bound<T: Real>(source: &PairSource<T>, alpha: T) -> T {
    let rho = T::one() + alpha;
    log_sum_exp((0..source.y_size()).map(|y| {
        let col = source.column(y);
        rho * log_sum_exp(col.iter().filter(|&&p| p > T::zero()).map(|&p| p.ln() / rho))
    }))
}

/// Lower and upper bounds on `E G^α` for `α ∈ (−1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentBounds<T> {
    pub lower: T,
    pub upper: T,
}

/// Bounds for the optimal conditional guesser: the lower bound
/// `[Σ_y(Σ_x p^{1/(1+α)})^{1+α}]ⁿ` and the same value times `(1 + n ln|X|)^{−α}`.
pub fn moment_bounds<T: Real>(source: &PairSource<T>, n: usize, alpha: T) -> Result<MomentBounds<T>> {
    if !(alpha > -T::one() && alpha < T::zero()) {
        return Err(Error::InvalidArgument(format!("moment bounds need alpha in (-1, 0), got {alpha}")));
    }
    let nn = T::from_count(n);
    let log_lower = nn * log_single_letter_bound(source, alpha);
    let log_upper = log_lower - alpha * (T::one() + nn * T::from_count(source.x_size()).ln()).ln();
    Ok(MomentBounds { lower: log_lower.exp(), upper: log_upper.exp() })
}

/// Pre-limit scaled cumulant generating function `n⁻¹ ln E G^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScgfSample<T> {
    pub value: T,
    /// For `α ≤ −1`: `n⁻¹ ln P(G=1)` and `n⁻¹[ln P(G=1) + ln(1 + n ln|X|)]`.
    pub rank_one_sandwich: Option<(T, T)>,
}

pub fn scgf_empirical<T: Real>(source: &PairSource<T>, n: usize, alpha: T) -> Result<ScgfSample<T>> {
    Ok(scgf_from_distribution(&guesswork_distribution(source, n)?, alpha))
}

pub fn scgf_from_distribution<T: Real>(dist: &GuessworkDistribution<T>, alpha: T) -> ScgfSample<T> {
    let nn = T::from_count(dist.n());
    let value = dist.log_moment(alpha) / nn;
    let rank_one_sandwich = (alpha <= -T::one()).then(|| {
        let lo = dist.log_prob_rank_one();
        let width = (T::one() + nn * T::from_count(dist.x_size()).ln()).ln();
        (lo / nn, (lo + width) / nn)
    });
    ScgfSample { value, rank_one_sandwich }
}
