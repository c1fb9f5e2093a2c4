//! Exact and asymptotic analysis of optimal conditional guesswork for
//! memoryless pair sources.
//!
//! * [`model`]: alphabets, distributions and pair sources.
//! * [`entropy`]: Rényi and Arimoto conditional Rényi entropies.
//! * [`guesswork`]: exact ranks, rank laws and moments via type classes.
//! * [`ldp`]: scaled cumulant generating function, rate function, exponents.
//! * [`parallel`]: the `k`-th success among `m` independent users.
//! * [`montecarlo`]: sampled estimates with exact per-sample ranks.
//!
//! Everything is generic over [`scalar::Real`] (`f32`, `f64`). The aliases
//! below fix `f64`; the `*32` aliases fix `f32`. All logarithms are natural.

pub mod entropy;
pub mod error;
pub mod guesswork;
pub mod ldp;
pub mod model;
pub mod montecarlo;
pub mod parallel;
pub mod power_sum;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type PairSource = model::PairSource<f64>;
pub type Distribution = model::Distribution<f64>;
pub type GuessworkDistribution = guesswork::GuessworkDistribution<f64>;
pub type MemorylessScgf = ldp::MemorylessScgf<f64>;
pub type RateFunction = ldp::RateFunction<f64>;
pub type UserEnsemble = parallel::UserEnsemble<f64>;
pub type KminDistribution = parallel::KminDistribution<f64>;
pub type SampleReport = montecarlo::SampleReport<f64>;
pub type ExtendedReal = scalar::ExtendedReal<f64>;

pub type PairSource32 = model::PairSource<f32>;
pub type Distribution32 = model::Distribution<f32>;
pub type GuessworkDistribution32 = guesswork::GuessworkDistribution<f32>;
pub type MemorylessScgf32 = ldp::MemorylessScgf<f32>;
pub type RateFunction32 = ldp::RateFunction<f32>;
pub type UserEnsemble32 = parallel::UserEnsemble<f32>;
pub type KminDistribution32 = parallel::KminDistribution<f32>;
pub type SampleReport32 = montecarlo::SampleReport<f32>;
pub type ExtendedReal32 = scalar::ExtendedReal<f32>;
