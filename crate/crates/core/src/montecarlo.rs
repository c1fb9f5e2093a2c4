//! Monte Carlo estimates of guesswork statistics at lengths beyond exact
//! enumeration. Each sampled pair sequence is ranked exactly.
//!
//! Sample `i` draws from a ChaCha8 stream keyed by `(seed, i)`, so results do
//! not depend on thread scheduling, and the reduction is a fixed pairwise sum.

use num_bigint::BigUint;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::guesswork::{Budget, RankOracle};
use crate::model::PairSource;
use crate::scalar::{ln_big, pairwise_sum, Real};

pub const MIN_SAMPLES: usize = 100;
/// Heavy tails make plain sampling of `G^α` unreliable beyond this order.
pub const MAX_ABS_ALPHA: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport<T> {
    pub estimate: T,
    pub std_error: T,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
}

/// Estimates `n⁻¹ E ln G(X₁ₙ|Y₁ₙ)`.
pub fn estimate_log_guesswork_rate<T: Real>(
    source: &PairSource<T>,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<SampleReport<T>> {
    estimate_log_guesswork_rate_with(source, n, samples, seed, Budget::default())
}

pub fn estimate_log_guesswork_rate_with<T: Real>(
    source: &PairSource<T>,
    n: usize,
    samples: usize,
    seed: u64,
    budget: Budget,
) -> Result<SampleReport<T>> {
    let nn = T::from_count(n.max(1));
    sample_mean(source, n, samples, seed, budget, |r| ln_big::<T>(r) / nn)
}

/// Estimates `E G(X₁ₙ|Y₁ₙ)^α` for `|α| ≤ 4`.
pub fn estimate_moment<T: Real>(
    source: &PairSource<T>,
    n: usize,
    alpha: T,
    samples: usize,
    seed: u64,
) -> Result<SampleReport<T>> {
    estimate_moment_with(source, n, alpha, samples, seed, Budget::default())
}

pub fn estimate_moment_with<T: Real>(
    source: &PairSource<T>,
    n: usize,
    alpha: T,
    samples: usize,
    seed: u64,
    budget: Budget,
) -> Result<SampleReport<T>> {
    if !(alpha.abs() <= T::lit(MAX_ABS_ALPHA)) {
        return Err(Error::InvalidArgument(format!("|alpha| must be <= {MAX_ABS_ALPHA}, got {alpha}")));
    }
    sample_mean(source, n, samples, seed, budget, |r| (alpha * ln_big::<T>(r)).exp())
}

fn sample_mean<T: Real>(
    source: &PairSource<T>,
    n: usize,
    samples: usize,
    seed: u64,
    budget: Budget,
    statistic: impl Fn(&BigUint) -> T + Sync,
) -> Result<SampleReport<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sequence length must be >= 1".into()));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    let ny = source.y_size();
    let weights: Vec<f64> = source
        .joint_matrix()
        .iter()
        .flatten()
        .map(|p| p.to_f64().unwrap_or(0.0))
        .collect();
    let pairs = WeightedIndex::new(&weights).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let oracle = RankOracle::new(source, budget);
    let values = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (xs, ys): (Vec<usize>, Vec<usize>) = (0..n)
                .map(|_| {
                    let j = pairs.sample(&mut rng);
                    (j / ny, j % ny)
                })
                .unzip();
            Ok(statistic(&oracle.rank(&xs, &ys)?))
        })
        .collect::<Result<Vec<T>>>()?;
    let count = T::from_count(samples);
    let estimate = pairwise_sum(&values) / count;
    let squares: Vec<T> = values.iter().map(|&v| (v - estimate) * (v - estimate)).collect();
    let variance = pairwise_sum(&squares) / T::from_count(samples - 1);
    Ok(SampleReport { estimate, std_error: (variance / count).sqrt(), n, samples, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_is_degenerate() {
        let s = PairSource::from_matrix(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let r = estimate_log_guesswork_rate(&s, 20, 200, 7).unwrap();
        assert_eq!((r.estimate, r.std_error), (0.0, 0.0));
        assert_eq!(estimate_moment(&s, 20, 2.5, 200, 7).unwrap().estimate, 1.0);
    }

    #[test]
    fn argument_checks() {
        let s = PairSource::from_matrix(vec![vec![0.5], vec![0.5]]).unwrap();
        assert!(estimate_moment(&s, 4, 1.0, 99, 0).is_err());
        assert!(estimate_moment(&s, 4, 4.5, 100, 0).is_err());
        assert!(estimate_moment(&s, 0, 1.0, 100, 0).is_err());
    }
}
