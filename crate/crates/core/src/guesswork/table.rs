//! Level tables: for a multiset of y-symbols, how many x-sequences share each
//! conditional probability level.
//!
//! A sequence's conditional log-probability depends only on its per-y-symbol
//! x-type counts, so the table for a y-type is the convolution of one table per
//! y-symbol, each built from the compositions of that symbol's count.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::scalar::{desc, log_levels_tie, Real};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LevelEntry<T> {
    pub log_level: T,
    pub count: BigUint,
}

/// Levels in strictly decreasing order, `-inf` (zero probability) last.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LevelTable<T> {
    pub entries: Vec<LevelEntry<T>>,
}

impl<T: Real> LevelTable<T> {
    pub fn unit() -> Self {
        Self { entries: vec![LevelEntry { log_level: T::zero(), count: BigUint::one() }] }
    }

    fn from_unsorted(mut entries: Vec<LevelEntry<T>>) -> Self {
        entries.sort_by(|a, b| desc(&a.log_level, &b.log_level));
        let mut merged: Vec<LevelEntry<T>> = Vec::with_capacity(entries.len());
        for e in entries {
            match merged.last_mut() {
                Some(last) if log_levels_tie(last.log_level, e.log_level) => last.count += e.count,
                _ => merged.push(e),
            }
        }
        Self { entries: merged }
    }

    pub fn convolve(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.entries.len() * other.entries.len());
        for a in &self.entries {
            for b in &other.entries {
                out.push(LevelEntry { log_level: a.log_level + b.log_level, count: &a.count * &b.count });
            }
        }
        Self::from_unsorted(out)
    }

    pub fn total(&self) -> BigUint {
        self.entries.iter().map(|e| &e.count).sum()
    }

    /// Number of sequences strictly more likely than `target`.
    pub fn count_above(&self, target: T) -> BigUint {
        self.entries
            .iter()
            .take_while(|e| e.log_level > target && !log_levels_tie(e.log_level, target))
            .map(|e| &e.count)
            .sum()
    }

    /// Number of completions whose level, added to `partial`, ties `target`.
    pub fn count_completing(&self, partial: T, target: T) -> BigUint {
        let neg_inf = T::neg_infinity();
        if target == neg_inf {
            return if partial == neg_inf {
                self.total()
            } else {
                self.entries.iter().filter(|e| e.log_level == neg_inf).map(|e| &e.count).sum()
            };
        }
        if partial == neg_inf {
            return BigUint::zero();
        }
        let needed = target - partial;
        // First entry not above `needed`; ties can only sit next to it.
        let pos = self.entries.partition_point(|e| e.log_level > needed);
        let lo = pos.saturating_sub(1);
        let hi = (pos + 1).min(self.entries.len());
        self.entries[lo..hi]
            .iter()
            .filter(|e| e.log_level != neg_inf && log_levels_tie(partial + e.log_level, target))
            .map(|e| &e.count)
            .sum()
    }
}

/// All compositions of `total` into `parts` nonnegative parts, first part
/// descending.
pub(crate) fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=remaining).rev() {
            prefix.push(first);
            rec(remaining - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

pub(crate) fn multinomial(counts: &[usize]) -> BigUint {
    let ks: Vec<BigUint> = counts.iter().map(|&k| BigUint::from(k)).collect();
    num_integer::multinomial(&ks)
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub(crate) fn binomial_saturating(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        match acc.checked_mul(n - i) {
            Some(v) => acc = v / (i + 1),
            None => return u128::MAX,
        }
    }
    acc
}

type Shared<K, T> = Mutex<HashMap<K, Arc<LevelTable<T>>>>;

/// Builds and caches level tables for one source.
#[derive(Debug)]
pub(crate) struct TableCache<T> {
    /// `ln p(x | y)` indexed `[y][x]`.
    log_cond: Vec<Vec<T>>,
    groups: Shared<(usize, usize), T>,
    classes: Shared<Vec<usize>, T>,
}

impl<T: Real> TableCache<T> {
    pub fn new(log_cond: Vec<Vec<T>>) -> Self {
        Self { log_cond, groups: Mutex::default(), classes: Mutex::default() }
    }

    pub fn log_cond(&self, y: usize, x: usize) -> T {
        self.log_cond[y][x]
    }

    pub fn x_size(&self) -> usize {
        self.log_cond.first().map_or(0, Vec::len)
    }

    /// Number of x-type tuples enumerated for the y-type `counts`.
    pub fn type_tuples(&self, counts: &[usize]) -> u128 {
        let k = self.x_size() as u128 - 1;
        counts.iter().fold(1u128, |acc, &m| {
            acc.saturating_mul(binomial_saturating(m as u128 + k, k))
        })
    }

    /// Log-level of a sequence with per-y-symbol x counts `kx[y][x]`,
    /// accumulated in the same order as the class convolution.
    pub fn log_level(&self, kx: &[Vec<usize>]) -> T {
        kx.iter().enumerate().fold(T::zero(), |acc, (y, row)| acc + self.group_log(y, row))
    }

    fn group_log(&self, y: usize, counts: &[usize]) -> T {
        counts
            .iter()
            .zip(&self.log_cond[y])
            .filter(|(&k, _)| k > 0)
            .fold(T::zero(), |acc, (&k, &lp)| acc + T::from_count(k) * lp)
    }

    fn group_table(&self, y: usize, m: usize) -> Arc<LevelTable<T>> {
        if let Some(t) = self.groups.lock().expect("cache lock").get(&(y, m)) {
            return Arc::clone(t);
        }
        let entries = compositions(m, self.x_size())
            .into_iter()
            .map(|k| LevelEntry { log_level: self.group_log(y, &k), count: multinomial(&k) })
            .collect();
        let table = Arc::new(LevelTable::from_unsorted(entries));
        self.groups.lock().expect("cache lock").insert((y, m), Arc::clone(&table));
        table
    }

    /// Level table of all x-sequences given a y-sequence with type `counts`.
    pub fn class_table(&self, counts: &[usize]) -> Arc<LevelTable<T>> {
        if let Some(t) = self.classes.lock().expect("cache lock").get(counts) {
            return Arc::clone(t);
        }
        let mut acc = LevelTable::unit();
        for (y, &m) in counts.iter().enumerate() {
            if m > 0 {
                acc = acc.convolve(&self.group_table(y, m));
            }
        }
        let table = Arc::new(acc);
        self.classes.lock().expect("cache lock").insert(counts.to_vec(), Arc::clone(&table));
        table
    }
}
