//! Rényi entropies and Arimoto's conditional Rényi entropy, in nats.
//!
//! `H_α(X|Y) = α/(1−α) · ln Σ_y (Σ_x p(x,y)^α)^{1/α}`. Orders 0, 1 and ∞ are
//! evaluated by their limits; orders within `1e-6` of 1 use the Shannon branch.

use crate::error::{Error, Result};
use crate::model::{Distribution, PairSource};
use crate::scalar::{log_sum_exp, Real};

/// Orders closer than this to 1 are evaluated as Shannon entropy.
const SHANNON_BAND: f64 = 1e-6;

/// Order of a Rényi entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyOrder<T> {
    /// Log of the support size.
    Zero,
    Shannon,
    Finite(T),
    /// Min-entropy.
    Infinity,
}

impl<T: Real> EntropyOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha.is_nan() || alpha < T::zero() {
            return Err(Error::InvalidArgument(format!("entropy order {alpha} must be >= 0")));
        }
        Ok(if alpha == T::zero() {
            EntropyOrder::Zero
        } else if alpha.is_infinite() {
            EntropyOrder::Infinity
        } else if (alpha - T::one()).abs() < T::lit(SHANNON_BAND) {
            EntropyOrder::Shannon
        } else {
            EntropyOrder::Finite(alpha)
        })
    }
}

/// Rényi entropy of a single distribution.
pub fn renyi_entropy<T: Real>(dist: &Distribution<T>, order: EntropyOrder<T>) -> T {
    arimoto(&[dist.pmf().to_vec()], order)
}

/// Arimoto conditional Rényi entropy `H_α(X|Y)` of one source letter.
pub fn conditional_renyi_arimoto<T: Real>(source: &PairSource<T>, order: EntropyOrder<T>) -> T {
    arimoto(&columns(source), order)
}

/// `H_∞(X|Y) = −ln Σ_y max_x p(x,y)`.
pub fn conditional_min_entropy<T: Real>(source: &PairSource<T>) -> T {
    arimoto(&columns(source), EntropyOrder::Infinity)
}

/// Conditional Shannon entropy `H(X|Y)`.
pub fn conditional_shannon_entropy<T: Real>(source: &PairSource<T>) -> T {
    arimoto(&columns(source), EntropyOrder::Shannon)
}

fn columns<T: Real>(source: &PairSource<T>) -> Vec<Vec<T>> {
    (0..source.y_size()).map(|y| source.column(y)).collect()
}

/// Shared evaluator over the joint columns `p(·, y)`.
fn arimoto<T: Real>(columns: &[Vec<T>], order: EntropyOrder<T>) -> T {
    let h = match order {
        EntropyOrder::Zero => {
            let support = columns
                .iter()
                .map(|c| c.iter().filter(|&&p| p > T::zero()).count())
                .max()
                .unwrap_or(1);
            T::from_count(support).ln()
        }
        EntropyOrder::Infinity => {
            let total = columns
                .iter()
                .map(|c| c.iter().copied().fold(T::zero(), T::max))
                .fold(T::zero(), |a, b| a + b);
            -total.ln()
        }
        EntropyOrder::Shannon => {
            let mut h = T::zero();
            for c in columns {
                let mass = c.iter().fold(T::zero(), |a, &b| a + b);
                for &p in c.iter().filter(|&&p| p > T::zero()) {
                    h = h - p * (p / mass).ln();
                }
            }
            h
        }
        EntropyOrder::Finite(alpha) => {
            let outer = log_sum_exp(columns.iter().map(|c| {
                let inner = log_sum_exp(c.iter().filter(|&&p| p > T::zero()).map(|&p| alpha * p.ln()));
                inner / alpha
            }));
            alpha / (T::one() - alpha) * outer
        }
    };
    h.max(T::zero())
}
