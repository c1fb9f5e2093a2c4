//! `k`-of-`m` parallel guesswork: `m` independent users are attacked in
//! round robin and the attacker stops after `k` successes, so the cost is
//! the `k`-th smallest of the users' ranks.

mod order;

use itertools::Itertools;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::conditional_shannon_entropy;
use crate::error::{Error, Result};
use crate::guesswork::{guesswork_distribution_with, Budget, GuessworkDistribution};
use crate::ldp::{MemorylessScgf, RateFunction, ScgfCurve};
use crate::model::PairSource;
use crate::scalar::{ExtendedReal, Real};

pub use order::{KminSegment, OrderStatistic};

/// Largest ensemble accepted by the exact order-statistic law.
pub const MAX_USERS: usize = 12;
/// Largest ensemble for the permutation maximum in the rate function.
pub const MAX_PERMUTATION_USERS: usize = 8;

/// Independent users and the number of successes `k` the attacker needs.
#[derive(Debug, Clone)]
pub struct UserEnsemble<T> {
    users: Vec<PairSource<T>>,
    k: usize,
}

impl<T: Real> UserEnsemble<T> {
    pub fn new(users: Vec<PairSource<T>>, k: usize) -> Result<Self> {
        let m = users.len();
        if m == 0 || k == 0 || k > m {
            return Err(Error::InvalidArgument(format!("need 1 <= k <= m with m >= 1, got k={k}, m={m}")));
        }
        if users.iter().any(|u| u.x_size() != users[0].x_size()) {
            return Err(Error::InvalidArgument("all users must share the x-alphabet size".into()));
        }
        Ok(Self { users, k })
    }

    /// `m` copies of one source.
    pub fn iid(source: &PairSource<T>, k: usize, m: usize) -> Result<Self> {
        Self::new(vec![source.clone(); m], k)
    }

    pub fn users(&self) -> &[PairSource<T>] {
        &self.users
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.users.len()
    }

    fn log_x(&self) -> T {
        T::from_count(self.users[0].x_size()).ln()
    }
}

/// Exact law of the `k`-th smallest rank. A lone user keeps its own
/// distribution so every downstream quantity is unchanged.
#[derive(Debug, Clone, PartialEq)]
pub enum KminDistribution<T> {
    Single(GuessworkDistribution<T>),
    Order(OrderStatistic<T>),
}

impl<T: Real> KminDistribution<T> {
    pub fn n(&self) -> usize {
        match self {
            KminDistribution::Single(d) => d.n(),
            KminDistribution::Order(o) => o.n(),
        }
    }

    pub fn log_moment(&self, alpha: T) -> T {
        match self {
            KminDistribution::Single(d) => d.log_moment(alpha),
            KminDistribution::Order(o) => o.log_moment(alpha),
        }
    }

    pub fn moment(&self, alpha: T) -> T {
        self.log_moment(alpha).exp()
    }

    pub fn total_mass(&self) -> T {
        match self {
            KminDistribution::Single(d) => d.total_mass(),
            KminDistribution::Order(o) => o.log_moment(T::zero()).exp(),
        }
    }

    /// `P(G > t)`.
    pub fn survival_at(&self, t: &BigUint) -> T {
        match self {
            KminDistribution::Single(d) => {
                let max = d.max_rank();
                if *t >= max {
                    T::zero()
                } else {
                    d.log_prob_ranks(&(t + 1u32), &max).exp()
                }
            }
            KminDistribution::Order(o) => o.survival_at(t),
        }
    }

    /// `P(G = r)`.
    pub fn pmf_at(&self, r: &BigUint) -> T {
        match self {
            KminDistribution::Single(d) => d.log_prob_ranks(r, r).exp(),
            KminDistribution::Order(o) => o.pmf_at(r),
        }
    }
}

pub fn kmin_distribution<T: Real>(ensemble: &UserEnsemble<T>, n: usize) -> Result<KminDistribution<T>> {
    kmin_distribution_with(ensemble, n, Budget::default())
}

pub fn kmin_distribution_with<T: Real>(
    ensemble: &UserEnsemble<T>,
    n: usize,
    budget: Budget,
) -> Result<KminDistribution<T>> {
    if ensemble.m() > MAX_USERS {
        return Err(Error::InvalidArgument(format!(
            "k-min law supports at most {MAX_USERS} users, got {}",
            ensemble.m()
        )));
    }
    let dists = ensemble
        .users
        .par_iter()
        .map(|u| guesswork_distribution_with(u, n, budget))
        .collect::<Result<Vec<_>>>()?;
    if ensemble.m() == 1 {
        return Ok(KminDistribution::Single(dists.into_iter().next().expect("one user")));
    }
    Ok(KminDistribution::Order(OrderStatistic::new(&dists, ensemble.k)))
}

/// `E G_{k,m}^α`.
pub fn kmin_moment_exact<T: Real>(ensemble: &UserEnsemble<T>, n: usize, alpha: T) -> Result<T> {
    Ok(kmin_distribution(ensemble, n)?.moment(alpha))
}

/// How the index assignment in the parallel rate function ranges over users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum IndexMode {
    /// Each user fills exactly one slot.
    #[default]
    Permutations,
    /// Every slot may name any user.
    Tuples,
}

/// Rate function `I_{k,m}` of `n⁻¹ ln G_{k,m}` for an ensemble:
/// the maximum over index assignments of
/// `Λ*_{i₁}(x) + Σ_{l=2..k} δ_{i_l}(x) + Σ_{l>k} γ_{i_l}(x)`, with
/// `δ_i = Λ*_i·1{x ≤ H_i}` and `γ_i = Λ*_i·1{x ≥ H_i}`.
#[derive(Debug, Clone)]
pub struct ParallelRate<T> {
    rates: Vec<RateFunction<T>>,
    entropies: Vec<T>,
    k: usize,
    mode: IndexMode,
    log_x: T,
}

impl<T: Real> ParallelRate<T> {
    pub fn new(ensemble: &UserEnsemble<T>, mode: IndexMode) -> Result<Self> {
        if mode == IndexMode::Permutations && ensemble.m() > MAX_PERMUTATION_USERS {
            return Err(Error::InvalidArgument(format!(
                "permutation mode supports at most {MAX_PERMUTATION_USERS} users, got {}",
                ensemble.m()
            )));
        }
        Ok(Self {
            rates: ensemble.users.iter().map(|u| RateFunction::new(MemorylessScgf::new(u))).collect(),
            entropies: ensemble.users.iter().map(conditional_shannon_entropy).collect(),
            k: ensemble.k,
            mode,
            log_x: ensemble.log_x(),
        })
    }

    pub fn eval(&self, x: T) -> Result<ExtendedReal<T>> {
        let terms = self
            .rates
            .iter()
            .zip(&self.entropies)
            .map(|(r, &h)| {
                let v = r.eval(x)?;
                let zero = ExtendedReal::Finite(T::zero());
                Ok(UserTerms { lead: v, below: if x <= h { v } else { zero }, above: if x >= h { v } else { zero } })
            })
            .collect::<Result<Vec<_>>>()?;
        let k = self.k;
        Ok(match self.mode {
            IndexMode::Tuples => {
                let best = |f: fn(&UserTerms<T>) -> ExtendedReal<T>| {
                    terms.iter().map(f).fold(ExtendedReal::Finite(T::zero()), ExtendedReal::max)
                };
                let m = terms.len();
                best(|t| t.lead)
                    + best(|t| t.below).scale(T::from_count(k - 1))
                    + best(|t| t.above).scale(T::from_count(m - k))
            }
            IndexMode::Permutations => (0..terms.len())
                .permutations(terms.len())
                .map(|p| {
                    p.iter().enumerate().skip(1).fold(terms[p[0]].lead, |acc, (slot, &i)| {
                        acc + if slot < k { terms[i].below } else { terms[i].above }
                    })
                })
                .fold(ExtendedReal::Finite(T::zero()), ExtendedReal::max),
        })
    }

    /// Tabulates `I_{k,m}` on a grid of step `1e-4·ln|X|` for SCGF queries.
    pub fn scgf(&self) -> Result<ParallelScgf<'_, T>> {
        let points = 10_000;
        let step = self.log_x / T::from_count(points);
        let grid = (0..=points)
            .into_par_iter()
            .map(|i| {
                let x = T::from_count(i) * step;
                Ok((x, self.eval(x)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ParallelScgf { rate: self, grid, step })
    }
}

#[derive(Debug, Clone, Copy)]
struct UserTerms<T> {
    lead: ExtendedReal<T>,
    below: ExtendedReal<T>,
    above: ExtendedReal<T>,
}

/// `Λ_{k,m}(α) = sup_{x ∈ [0, ln|X|]} (αx − I_{k,m}(x))` from a tabulated
/// rate function, refined by golden section around the best grid cell.
#[derive(Debug, Clone)]
pub struct ParallelScgf<'a, T> {
    rate: &'a ParallelRate<T>,
    grid: Vec<(T, ExtendedReal<T>)>,
    step: T,
}

impl<T: Real> ParallelScgf<'_, T> {
    pub fn value(&self, alpha: T) -> T {
        let objective = |x: T, r: ExtendedReal<T>| r.finite().map(|v| alpha * x - v);
        let (best, best_val) = self
            .grid
            .iter()
            .enumerate()
            .filter_map(|(i, &(x, r))| objective(x, r).map(|v| (i, v)))
            .fold((0, T::neg_infinity()), |b, c| if c.1 > b.1 { c } else { b });
        let x0 = self.grid[best].0;
        let lo = (x0 - self.step).max(T::zero());
        let hi = (x0 + self.step).min(self.rate.log_x);
        let f = |x: T| {
            self.rate
                .eval(x)
                .ok()
                .and_then(|r| objective(x, r))
                .unwrap_or_else(T::neg_infinity)
        };
        let (_, refined) = crate::ldp::golden_max(f, lo, hi, T::lit(1e-12).max(T::epsilon() * T::lit(16.0)));
        refined.max(best_val)
    }
}

pub fn rate_parallel<T: Real>(ensemble: &UserEnsemble<T>, x: T) -> Result<ExtendedReal<T>> {
    ParallelRate::new(ensemble, IndexMode::Permutations)?.eval(x)
}

pub fn rate_parallel_with<T: Real>(ensemble: &UserEnsemble<T>, x: T, mode: IndexMode) -> Result<ExtendedReal<T>> {
    ParallelRate::new(ensemble, mode)?.eval(x)
}

/// `I(k,m,x) = kΛ*(x)` for `x ≤ H(X|Y)` and `(m−k+1)Λ*(x)` above.
pub fn rate_parallel_iid<T: Real>(source: &PairSource<T>, k: usize, m: usize, x: T) -> Result<ExtendedReal<T>> {
    check_km(k, m)?;
    let v = RateFunction::new(MemorylessScgf::new(source)).eval(x)?;
    let factor = if x <= conditional_shannon_entropy(source) { k } else { m - k + 1 };
    Ok(v.scale(T::from_count(factor)))
}

/// `Λ_{k,m}(α)`; a lone user returns its own `Λ(α)`.
pub fn scgf_parallel<T: Real>(ensemble: &UserEnsemble<T>, alpha: T) -> Result<T> {
    if ensemble.m() == 1 {
        return Ok(MemorylessScgf::new(&ensemble.users[0]).value(alpha));
    }
    let rate = ParallelRate::new(ensemble, IndexMode::Permutations)?;
    Ok(rate.scgf()?.value(alpha))
}

/// `kΛ(α/k)` for `α ≤ 0` and `(m−k+1)Λ(α/(m−k+1))` for `α > 0`.
pub fn scgf_parallel_iid<T: Real>(source: &PairSource<T>, k: usize, m: usize, alpha: T) -> Result<T> {
    check_km(k, m)?;
    let c = T::from_count(if alpha <= T::zero() { k } else { m - k + 1 });
    Ok(c * MemorylessScgf::new(source).value(alpha / c))
}

fn check_km(k: usize, m: usize) -> Result<()> {
    if k == 0 || k > m {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= m, got k={k}, m={m}")));
    }
    Ok(())
}
