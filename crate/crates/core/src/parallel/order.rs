//! Exact law of the `k`-th smallest of independent guess ranks.
//!
//! Between consecutive rank-step boundaries of all users every user's pmf is
//! constant, so `P(G<u)`, `P(G=u)` and `P(G>u)` are affine in `u` and the law
//! of the order statistic is a polynomial in `u` of degree below `m`. Each
//! segment stores that polynomial in the scaled variable `u/len`.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::guesswork::{GuessworkDistribution, RankStep};
use crate::power_sum::{log_weighted_power_sum, poly_eval};
use crate::scalar::{big_to_real, log_sum_exp, NeumaierSum, Real};

/// Ranks `start..start+len`; the pmf at rank `start−1+u` is `weight(u/len)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KminSegment<T> {
    pub start: BigUint,
    pub len: BigUint,
    /// Ascending polynomial coefficients.
    pub weight: Vec<T>,
}

/// Law of the `k`-th smallest of `m ≥ 2` independent ranks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderStatistic<T> {
    n: usize,
    k: usize,
    m: usize,
    segments: Vec<KminSegment<T>>,
}

impl<T: Real> OrderStatistic<T> {
    pub(crate) fn new(dists: &[GuessworkDistribution<T>], k: usize) -> Self {
        let steps: Vec<Vec<RankStep<T>>> = dists.iter().map(|d| d.rank_steps()).collect();
        let end = dists[0].max_rank() + BigUint::one();
        let mut cuts: Vec<BigUint> = steps.iter().flatten().map(|s| s.start.clone()).collect();
        cuts.sort();
        cuts.dedup();
        let users: Vec<UserSteps<T>> = steps.iter().map(|s| UserSteps::new(s)).collect();
        let mut cursor = vec![0usize; users.len()];
        let segments = cuts
            .iter()
            .enumerate()
            .map(|(ci, start)| {
                let next = cuts.get(ci + 1).unwrap_or(&end);
                let len = next - start;
                let len_r = big_to_real::<T>(&len);
                let polys: Vec<[Vec<T>; 3]> = users
                    .iter()
                    .zip(cursor.iter_mut())
                    .map(|(u, p)| {
                        while *p + 1 < u.steps.len() && u.steps[*p + 1].start <= *start {
                            *p += 1;
                        }
                        let (below, q, at_or_above) = u.split(*p, start);
                        [vec![below - q, q * len_r], vec![q], vec![at_or_above, -q * len_r]]
                    })
                    .collect();
                KminSegment { start: start.clone(), len, weight: kth_smallest(&polys, k) }
            })
            .collect();
        Self { n: dists[0].n(), k, m: dists.len(), segments }
    }

    pub fn segments(&self) -> &[KminSegment<T>] {
        &self.segments
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn log_segment_moment(s: &KminSegment<T>, alpha: T) -> T {
        log_weighted_power_sum(&s.start, &s.len, alpha, &s.weight)
    }

    pub fn log_moment(&self, alpha: T) -> T {
        log_sum_exp(self.segments.iter().map(|s| Self::log_segment_moment(s, alpha)))
    }

    /// `P(G > t)`.
    pub fn survival_at(&self, t: &BigUint) -> T {
        let mut acc = NeumaierSum::default();
        for s in &self.segments {
            let end = &s.start + &s.len;
            if *t < s.start {
                acc.add(Self::log_segment_moment(s, T::zero()).exp());
            } else if t + BigUint::one() < end {
                let skip = t + BigUint::one() - &s.start;
                let rest = &s.len - &skip;
                let len = big_to_real::<T>(&s.len);
                let weight = compose_affine(&s.weight, big_to_real::<T>(&skip) / len, big_to_real::<T>(&rest) / len);
                acc.add(log_weighted_power_sum(&(t + BigUint::one()), &rest, T::zero(), &weight).exp());
            }
        }
        acc.value()
    }

    /// `P(G = r)`.
    pub fn pmf_at(&self, r: &BigUint) -> T {
        let i = self.segments.partition_point(|s| s.start <= *r);
        if i == 0 {
            return T::zero();
        }
        let s = &self.segments[i - 1];
        if *r >= &s.start + &s.len {
            return T::zero();
        }
        let u = big_to_real::<T>(&(r - &s.start + BigUint::one())) / big_to_real::<T>(&s.len);
        poly_eval(&s.weight, u).max(T::zero())
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// One user's rank steps with prefix and suffix masses.
struct UserSteps<'a, T> {
    steps: &'a [RankStep<T>],
    before: Vec<T>,
    after: Vec<T>,
}

impl<'a, T: Real> UserSteps<'a, T> {
    fn new(steps: &'a [RankStep<T>]) -> Self {
        let mass: Vec<T> = steps.iter().map(|s| s.pmf * big_to_real::<T>(&s.len)).collect();
        let running = |it: &mut dyn Iterator<Item = &T>| {
            let mut acc = NeumaierSum::default();
            it.map(|&m| {
                let v = acc.value();
                acc.add(m);
                v
            })
            .collect::<Vec<T>>()
        };
        let before = running(&mut mass.iter());
        let mut after = running(&mut mass.iter().rev());
        after.reverse();
        Self { steps, before, after }
    }

    /// `(P(G < at), P(G = at), P(G ≥ at))` for `at` inside step `i`.
    fn split(&self, i: usize, at: &BigUint) -> (T, T, T) {
        let s = &self.steps[i];
        let offset = big_to_real::<T>(&(at - &s.start));
        let remaining = big_to_real::<T>(&(&s.start + &s.len - at));
        (self.before[i] + s.pmf * offset, s.pmf, self.after[i] + s.pmf * remaining)
    }
}

/// Polynomial law of `{#(G<u) < k ≤ #(G≤u)}` from per-user
/// `[P(G<u), P(G=u), P(G>u)]` polynomials. States count users strictly
/// below and at-or-below `u`, both capped at `k`.
fn kth_smallest<T: Real>(users: &[[Vec<T>; 3]], k: usize) -> Vec<T> {
    let width = k + 1;
    let mut states: Vec<Option<Vec<T>>> = vec![None; width * width];
    states[0] = Some(vec![T::one()]);
    for [lt, eq, gt] in users {
        let mut next: Vec<Option<Vec<T>>> = vec![None; width * width];
        for lo in 0..=k {
            for le in lo..=k {
                let Some(p) = &states[lo * width + le] else { continue };
                let up_le = (le + 1).min(k);
                add_into(&mut next[(lo + 1).min(k) * width + up_le], &poly_mul(p, lt));
                add_into(&mut next[lo * width + up_le], &poly_mul(p, eq));
                add_into(&mut next[lo * width + le], &poly_mul(p, gt));
            }
        }
        states = next;
    }
    let mut out = Vec::new();
    for lo in 0..k {
        if let Some(p) = &states[lo * width + k] {
            add_poly(&mut out, p);
        }
    }
    out
}

fn poly_mul<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

fn add_poly<T: Real>(acc: &mut Vec<T>, p: &[T]) {
    if acc.len() < p.len() {
        acc.resize(p.len(), T::zero());
    }
    for (a, &v) in acc.iter_mut().zip(p) {
        *a = *a + v;
    }
}

fn add_into<T: Real>(slot: &mut Option<Vec<T>>, p: &[T]) {
    match slot {
        Some(acc) => add_poly(acc, p),
        None => *slot = Some(p.to_vec()),
    }
}

/// Coefficients of `s ↦ w(a + b·s)`.
fn compose_affine<T: Real>(w: &[T], a: T, b: T) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for &c in w.iter().rev() {
        let mut shifted = vec![T::zero(); out.len() + 1];
        for (i, &v) in out.iter().enumerate() {
            shifted[i] = shifted[i] + v * a;
            shifted[i + 1] = shifted[i + 1] + v * b;
        }
        shifted[0] = shifted[0] + c;
        out = shifted;
    }
    if out.is_empty() {
        out.push(T::zero());
    }
    out
}
