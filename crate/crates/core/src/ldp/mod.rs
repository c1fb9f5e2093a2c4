//! Asymptotic layer: the scaled cumulant generating function `Λ(α)`, the
//! slope `γ` at the start of its strictly convex branch, the rate function
//! `Λ*` and exact finite-`n` large-deviation exponents.

mod conjugate;

pub(crate) use conjugate::golden_max;

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{conditional_min_entropy, conditional_shannon_entropy};
use crate::error::{Error, Result};
use crate::guesswork::{
    guesswork_distribution, guesswork_distribution_with, required_budget, scgf_from_distribution, Bounds, Budget,
    GuessworkDistribution,
};
use crate::model::PairSource;
use crate::scalar::{log_sum_exp, ExtendedReal, Real};


/// Initial upper end of the bracket for the conjugate supremum.
const BRACKET: f64 = 64.0;
/// The bracket is widened fourfold up to this bound while the maximizer sits on it.
const BRACKET_LIMIT: f64 = 1_048_576.0;
const ARG_TOL: f64 = 1e-9;
const DIFF_STEP: f64 = 1e-6;
const GAMMA_OFFSETS: [f64; 3] = [1e-3, 1e-4, 1e-5];

/// A limiting scaled cumulant generating function `Λ(α) = lim n⁻¹ ln E G^α`.
///
/// Implementors supply `value` and the alphabet bound. The remaining methods
/// have numerical defaults that closed-form curves may override.
pub trait ScgfCurve<T: Real>: Send + Sync {
    fn value(&self, alpha: T) -> T;

    /// `ln |X|`, the right end of the rate function's effective domain.
    fn log_alphabet_size(&self) -> T;

    /// Plateau height: `Λ(α) = −h_inf` for `α ≤ −1`.
    fn h_inf(&self) -> T {
        -self.value(-T::one())
    }

    /// `Λ'(0)`.
    fn entropy_rate(&self) -> T {
        self.derivative(T::zero()).unwrap_or_else(|_| T::nan())
    }

    /// `lim_{α→∞} Λ'(α)`; the rate function is `+∞` beyond it.
    fn asymptotic_slope(&self) -> T {
        let a = T::lit(BRACKET_LIMIT);
        let half = a / T::lit(2.0);
        (self.value(a) - self.value(half)) / (a - half)
    }

    /// Central difference with one Richardson step. The step is `1e-6`,
    /// scaled with `|α|` and shrunk near the kink at `α = −1`.
    fn derivative(&self, alpha: T) -> Result<T> {
        if !(alpha > -T::one()) {
            return Err(Error::InvalidArgument(format!("scgf derivative needs alpha > -1, got {alpha}")));
        }
        let room = (alpha + T::one()) / T::lit(4.0);
        let h = (T::lit(DIFF_STEP) * alpha.abs().max(T::one())).min(room);
        let central = |h: T| (self.value(alpha + h) - self.value(alpha - h)) / (h + h);
        let two = T::lit(2.0);
        Ok((T::lit(4.0) * central(h / two) - central(h)) / T::lit(3.0))
    }

    /// `γ = lim_{α↓−1} Λ'(α)` from derivatives at `−1 + ε`, extrapolated
    /// linearly to `ε = 0` from `ε ∈ {1e-4, 1e-5}`. The pair `{1e-3, 1e-4}`
    /// gives a second extrapolation used as the stability check.
    fn gamma_estimate(&self) -> GammaEstimate<T> {
        let d: Vec<T> = GAMMA_OFFSETS
            .iter()
            .map(|&e| self.derivative(T::lit(e) - T::one()).expect("alpha > -1"))
            .collect();
        let e: Vec<T> = GAMMA_OFFSETS.iter().map(|&e| T::lit(e)).collect();
        let extrapolate = |i: usize, j: usize| d[j] + (d[j] - d[i]) * e[j] / (e[i] - e[j]);
        let estimate = extrapolate(1, 2);
        let check = extrapolate(0, 1);
        GammaEstimate {
            value: estimate.max(T::zero()).min(self.log_alphabet_size()),
            spread: (estimate - check).abs(),
        }
    }
}

/// `γ` together with the disagreement between the two
/// extrapolations, which serves as an error indicator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaEstimate<T> {
    pub value: T,
    pub spread: T,
}

/// Closed-form `Λ` of a memoryless pair source:
/// `Λ(α) = ln Σ_y (Σ_x p(x,y)^{1/(1+α)})^{1+α} = α H_{1/(1+α)}(X|Y)` for
/// `α > −1` and `−H_∞(X|Y)` otherwise.
#[derive(Debug, Clone)]
pub struct MemorylessScgf<T> {
    log_columns: Vec<Vec<T>>,
    h_inf: T,
    shannon: T,
    log_max_support: T,
    log_x: T,
}

impl<T: Real> MemorylessScgf<T> {
    pub fn new(source: &PairSource<T>) -> Self {
        let log_columns: Vec<Vec<T>> = (0..source.y_size())
            .map(|y| source.column(y).into_iter().map(|p| p.ln()).collect())
            .collect();
        let max_support = (0..source.y_size())
            .map(|y| source.column(y).iter().filter(|&&p| p > T::zero()).count())
            .max()
            .unwrap_or(1);
        Self {
            log_columns,
            h_inf: conditional_min_entropy(source),
            shannon: conditional_shannon_entropy(source),
            log_max_support: T::from_count(max_support).ln(),
            log_x: T::from_count(source.x_size()).ln(),
        }
    }
}

impl<T: Real> ScgfCurve<T> for MemorylessScgf<T> {
    fn value(&self, alpha: T) -> T {
        if alpha == T::zero() {
            return T::zero();
        }
        if alpha <= -T::one() {
            return -self.h_inf;
        }
        let s = T::one() + alpha;
        let beta = s.recip();
        log_sum_exp(
            self.log_columns
                .iter()
                .map(|col| s * log_sum_exp(col.iter().map(|&lp| beta * lp))),
        )
    }

    fn log_alphabet_size(&self) -> T {
        self.log_x
    }

    fn h_inf(&self) -> T {
        self.h_inf
    }

    fn entropy_rate(&self) -> T {
        self.shannon
    }

    fn asymptotic_slope(&self) -> T {
        self.log_max_support
    }
}

/// Legendre transform `Λ*(x) = sup_α (xα − Λ(α))` of an SCGF curve.
///
/// On `[0, γ]` the closed form `h_inf − x` is used. Beyond `γ` the concave
/// map `α ↦ xα − Λ(α)` is maximized by golden section over `[−1, A]`.
#[derive(Debug, Clone)]
pub struct RateFunction<T, C = MemorylessScgf<T>> {
    curve: C,
    gamma: GammaEstimate<T>,
    h_inf: T,
    log_x: T,
    slope_inf: T,
}

/// Numerical supremum of `xα − Λ(α)` and where it was attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conjugate<T> {
    pub value: ExtendedReal<T>,
    /// Maximizing `α`; `None` when the supremum is `+∞`.
    pub argmax: Option<T>,
}

impl<T: Real, C: ScgfCurve<T>> RateFunction<T, C> {
    pub fn new(curve: C) -> Self {
        Self {
            gamma: curve.gamma_estimate(),
            h_inf: curve.h_inf(),
            log_x: curve.log_alphabet_size(),
            slope_inf: curve.asymptotic_slope(),
            curve,
        }
    }

    pub fn curve(&self) -> &C {
        &self.curve
    }

    pub fn gamma(&self) -> T {
        self.gamma.value
    }

    pub fn gamma_estimate(&self) -> GammaEstimate<T> {
        self.gamma
    }

    pub fn h_inf(&self) -> T {
        self.h_inf
    }

    pub fn log_alphabet_size(&self) -> T {
        self.log_x
    }

    fn slack(&self) -> T {
        T::tolerance(1e-12) * (T::one() + self.log_x)
    }

    /// `Λ*(x)` for `x ≥ 0`.
    pub fn eval(&self, x: T) -> Result<ExtendedReal<T>> {
        if x.is_nan() || x < T::zero() {
            return Err(Error::InvalidArgument(format!("rate function needs x >= 0, got {x}")));
        }
        if x > self.log_x + self.slack() {
            return Ok(ExtendedReal::Infinite);
        }
        if x <= self.gamma.value {
            return Ok(ExtendedReal::Finite((self.h_inf - x).max(T::zero())));
        }
        Ok(self.conjugate(x).value.map(|v| v.max(T::zero())))
    }

    /// Numerical supremum over `α ∈ [−1, ∞)` without the closed-form segment.
    pub fn conjugate(&self, x: T) -> Conjugate<T> {
        if x > self.slope_inf + self.slack() {
            return Conjugate { value: ExtendedReal::Infinite, argmax: None };
        }
        let f = |a: T| x * a - self.curve.value(a);
        let tol = T::lit(ARG_TOL);
        let mut hi = T::lit(BRACKET);
        loop {
            let (arg, val) = golden_max(f, -T::one(), hi, tol);
            let at_edge = arg >= hi - T::lit(16.0) * tol * hi.max(T::one());
            if !at_edge || hi >= T::lit(BRACKET_LIMIT) {
                return Conjugate { value: ExtendedReal::Finite(val), argmax: Some(arg) };
            }
            hi = hi * T::lit(4.0);
        }
    }

    /// `inf Λ*` over the closed interval `[lo, hi]` intersected with `[0, ∞)`.
    /// Uses convexity: zero if the interval holds `Λ'(0)`, else the nearer end.
    pub fn ball_inf(&self, lo: T, hi: T) -> Result<ExtendedReal<T>> {
        let lo = lo.max(T::zero());
        if hi < lo {
            return Ok(ExtendedReal::Infinite);
        }
        let zero = self.curve.entropy_rate();
        if lo <= zero && zero <= hi {
            return Ok(ExtendedReal::Finite(T::zero()));
        }
        self.eval(if hi < zero { hi } else { lo })
    }
}

pub fn scgf_limit<T: Real>(source: &PairSource<T>, alpha: T) -> T {
    MemorylessScgf::new(source).value(alpha)
}

pub fn scgf_derivative<T: Real>(source: &PairSource<T>, alpha: T) -> Result<T> {
    MemorylessScgf::new(source).derivative(alpha)
}

pub fn gamma<T: Real>(source: &PairSource<T>) -> T {
    MemorylessScgf::new(source).gamma_estimate().value
}

pub fn rate_function<T: Real>(source: &PairSource<T>, x: T) -> Result<ExtendedReal<T>> {
    RateFunction::new(MemorylessScgf::new(source)).eval(x)
}

/// `−n⁻¹ ln P(n⁻¹ ln G ∈ (x−ε, x+ε))`, exact; `+∞` for an impossible event.
pub fn empirical_exponent<T: Real>(source: &PairSource<T>, x: T, eps: T, n: usize) -> Result<ExtendedReal<T>> {
    check_ball(x, eps)?;
    Ok(exponent_from_distribution(&guesswork_distribution(source, n)?, x, eps))
}

fn check_ball<T: Real>(x: T, eps: T) -> Result<()> {
    if x.is_nan() || x < T::zero() || !(eps > T::zero()) {
        return Err(Error::InvalidArgument(format!("need x >= 0 and eps > 0, got x={x}, eps={eps}")));
    }
    Ok(())
}

pub fn exponent_from_distribution<T: Real>(dist: &GuessworkDistribution<T>, x: T, eps: T) -> ExtendedReal<T> {
    let lp = dist.log_prob_log_rank_in(x - eps, x + eps, Bounds::Open);
    if lp == T::neg_infinity() {
        ExtendedReal::Infinite
    } else {
        ExtendedReal::Finite((-lp / T::from_count(dist.n())).max(T::zero()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScgfRow<T> {
    pub n: usize,
    pub alpha: T,
    pub empirical: T,
    pub limit: T,
    /// `empirical − limit`.
    pub gap: T,
    /// Width of the finite-`n` sandwich: `−α ln(1+n ln|X|)/n` on `(−1, 0)`
    /// and `ln(1+n ln|X|)/n` for `α ≤ −1`.
    pub envelope: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentRow<T> {
    pub n: usize,
    pub x: T,
    pub empirical: ExtendedReal<T>,
    /// `inf Λ*` over the closed ball around `x`.
    pub rate: ExtendedReal<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport<T> {
    pub scgf: Vec<ScgfRow<T>>,
    pub exponents: Vec<ExponentRow<T>>,
}

/// Exact pre-limit quantities for `n = 1..=n_max` next to their limits.
/// Rows are ordered by `n`, then by the order of `alphas` and `x_grid`.
pub fn convergence_report<T: Real>(
    source: &PairSource<T>,
    alphas: &[T],
    x_grid: &[T],
    eps: T,
    n_max: usize,
) -> Result<ConvergenceReport<T>> {
    convergence_report_with(source, alphas, x_grid, eps, n_max, Budget::default())
}

pub fn convergence_report_with<T: Real>(
    source: &PairSource<T>,
    alphas: &[T],
    x_grid: &[T],
    eps: T,
    n_max: usize,
    budget: Budget,
) -> Result<ConvergenceReport<T>> {
    for &x in x_grid {
        check_ball(x, eps)?;
    }
    budget.check(required_budget(source, n_max))?;
    let rate = RateFunction::new(MemorylessScgf::new(source));
    let limits: Vec<T> = alphas.iter().map(|&a| rate.curve().value(a)).collect();
    let balls = x_grid
        .iter()
        .map(|&x| rate.ball_inf(x - eps, x + eps))
        .collect::<Result<Vec<_>>>()?;
    let per_n = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let dist = guesswork_distribution_with(source, n, budget)?;
            let nn = T::from_count(n);
            let width = (T::one() + nn * rate.log_alphabet_size()).ln() / nn;
            let scgf: Vec<ScgfRow<T>> = alphas
                .iter()
                .zip(&limits)
                .map(|(&alpha, &limit)| {
                    let empirical = scgf_from_distribution(&dist, alpha).value;
                    let envelope = if alpha <= -T::one() {
                        Some(width)
                    } else if alpha < T::zero() {
                        Some(-alpha * width)
                    } else {
                        None
                    };
                    ScgfRow { n, alpha, empirical, limit, gap: empirical - limit, envelope }
                })
                .collect();
            let exponents: Vec<ExponentRow<T>> = x_grid
                .iter()
                .zip(&balls)
                .map(|(&x, &rate)| ExponentRow { n, x, empirical: exponent_from_distribution(&dist, x, eps), rate })
                .collect();
            Ok((scgf, exponents))
        })
        .collect::<Result<Vec<_>>>()?;
    let (scgf, exponents): (Vec<_>, Vec<_>) = per_n.into_iter().unzip();
    Ok(ConvergenceReport {
        scgf: scgf.into_iter().flatten().collect(),
        exponents: exponents.into_iter().flatten().collect(),
    })
}
