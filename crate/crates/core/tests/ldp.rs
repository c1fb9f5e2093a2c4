mod common;

use common::*;
use guesslab::entropy::{conditional_min_entropy, conditional_shannon_entropy};
use guesslab::ldp::*;
use guesslab::model::{Alphabet, Distribution, PairSource};
use guesslab::scalar::ExtendedReal;
use proptest::prelude::*;

fn curve(seed: u64) -> RateFunction<f64> {
    RateFunction::new(MemorylessScgf::new(&random_source(seed)))
}

/// Slope of `ln Σ_y m_y c_y^{1+α}` at `α = −1`, where `m_y` is the largest
/// joint probability in column `y` and `c_y` its multiplicity.
fn gamma_oracle(s: &PairSource<f64>) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for y in 0..s.y_size() {
        let col = s.column(y);
        let m = col.iter().cloned().fold(0.0, f64::max);
        let c = col.iter().filter(|&&p| same_level(p, m)).count() as f64;
        num += m * c.ln();
        den += m;
    }
    num / den
}

#[test]
fn gamma_named_sources_stable() {
    for (s, want) in [(bsc(), 0.0), (uniform_binary(), 2f64.ln()), (noiseless(), 0.0)] {
        let g = MemorylessScgf::new(&s).gamma_estimate();
        assert!((g.value - want).abs() < 1e-9 && g.spread < 1e-5, "{g:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn scgf_is_convex_on_grid(seed in 0u64..200) {
        let c = MemorylessScgf::new(&random_source(seed));
        let grid: Vec<f64> = (0..=12).map(|i| -2.0 + 0.5 * f64::from(i)).collect();
        let vals: Vec<f64> = grid.iter().map(|&a| c.value(a)).collect();
        let slopes: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]) / 0.5).collect();
        for s in slopes.windows(2) {
            prop_assert!(s[1] >= s[0] - 1e-12, "{:?}", slopes);
        }
        prop_assert_eq!(c.value(0.0), 0.0);
    }

    #[test]
    fn plateau_is_min_entropy(seed in 0u64..200, a in -50.0f64..=-1.0) {
        let s = random_source(seed);
        let c = MemorylessScgf::new(&s);
        prop_assert!((c.value(a) + conditional_min_entropy(&s)).abs() <= 1e-12);
        prop_assert!((c.value(-1.0 + 1e-9) - c.value(-1.0)).abs() < 1e-6);
    }

    #[test]
    fn closed_segment_matches_numerical_sup(seed in 0u64..200, t in 0.0f64..=1.0) {
        let rf = curve(seed);
        let x = t * rf.gamma();
        let closed = rf.eval(x).unwrap().unwrap();
        let numeric = rf.conjugate(x).value.unwrap();
        prop_assert!((closed - (rf.h_inf() - x)).abs() <= 1e-12);
        prop_assert!((numeric - closed).abs() <= 1e-6, "x={} numeric={} closed={}", x, numeric, closed);
    }

    #[test]
    fn first_order_condition(seed in 0u64..200, t in 0.02f64..0.98) {
        let rf = curve(seed);
        let top = rf.curve().asymptotic_slope();
        let x = rf.gamma() + t * (top - rf.gamma());
        prop_assume!(x - rf.gamma() > 1e-3 && top - x > 1e-3);
        let c = rf.conjugate(x);
        let a = c.argmax.unwrap();
        prop_assume!(a > -1.0 + 1e-6 && a < 60.0);
        let d = rf.curve().derivative(a).unwrap();
        prop_assert!((d - x).abs() <= 1e-5, "x={} argmax={} slope={}", x, a, d);
    }

    #[test]
    fn zero_at_entropy_and_positive_away(seed in 0u64..200, dx in 0.05f64..0.6) {
        let s = random_source(seed);
        let rf = RateFunction::new(MemorylessScgf::new(&s));
        let h = conditional_shannon_entropy(&s);
        prop_assert!(rf.eval(h).unwrap().unwrap() <= 1e-9);
        let d0 = rf.curve().derivative(0.0).unwrap();
        prop_assert!(rf.eval(d0).unwrap().unwrap() <= 1e-9);
        for x in [h - dx, h + dx] {
            if x >= 0.0 {
                prop_assert!(rf.eval(x).unwrap() > ExtendedReal::Finite(0.0), "x={}", x);
            }
        }
    }

    #[test]
    fn gamma_matches_column_maxima(seed in 0u64..200) {
        let s = random_source(seed);
        let rf = RateFunction::new(MemorylessScgf::new(&s));
        prop_assert!(rf.gamma() >= 0.0 && rf.gamma() <= rf.log_alphabet_size());
        prop_assert!((rf.gamma() - gamma_oracle(&s)).abs() <= 1e-5, "{} vs {}", rf.gamma(), gamma_oracle(&s));
    }
}

#[test]
fn past_domain_is_infinite_for_corpus() {
    for s in corpus(20) {
        let rf = RateFunction::new(MemorylessScgf::new(&s));
        assert!(rf.eval((s.x_size() as f64).ln() + 0.01).unwrap().is_infinite());
        assert!(empirical_exponent(&s, (s.x_size() as f64).ln() + 0.06, 0.05, 4).unwrap().is_infinite());
    }
}

#[test]
fn uniform_ldp_convergence() {
    let d = Distribution::new(Alphabet::new(["0", "1"]).unwrap(), vec![0.5, 0.5]).unwrap();
    let src = PairSource::unconditional(&d);
    let ln2 = 2f64.ln();
    for n in [8, 10, 12, 16, 20, 24] {
        for x in [0.1, 0.3, 0.5] {
            let eps = 0.05;
            let emp = empirical_exponent(&src, x, eps, n).unwrap().unwrap();
            let bound = 2.0 * eps + 3.0 * ((n + 1) as f64).ln() / n as f64;
            assert!((emp - (ln2 - x)).abs() <= bound, "n={n} x={x} emp={emp}");
        }
    }
}

#[test]
fn bsc_report_gap_shrinks_within_envelope() {
    let r = convergence_report(&bsc(), &[-0.5], &[], 0.05, 12).unwrap();
    let gaps: Vec<f64> = r.scgf.iter().map(|row| row.gap.abs()).collect();
    for row in &r.scgf {
        assert!(row.gap.abs() <= row.envelope.unwrap(), "{row:?}");
    }
    for w in gaps[1..].windows(2) {
        assert!(w[1] <= w[0], "{gaps:?}");
    }
}

#[test]
fn uniform_report_matches_series() {
    let r = convergence_report(&uniform_binary(), &[1.0], &[], 0.05, 10).unwrap();
    for row in &r.scgf {
        let n = row.n as f64;
        let exact = ((2f64.powf(n) + 1.0) / 2.0).ln() / n - 2f64.ln();
        assert!((row.gap - exact).abs() < 1e-12);
    }
    let r = convergence_report(&noiseless(), &[-2.0, -0.5, 1.0], &[0.0], 0.05, 6).unwrap();
    assert!(r.scgf.iter().all(|row| row.gap.abs() < 1e-12));
    assert!(r.exponents.iter().all(|row| row.empirical == ExtendedReal::Finite(0.0) && row.rate == ExtendedReal::Finite(0.0)));
}

#[test]
fn convergence_report_respects_budget() {
    use guesslab::guesswork::{required_budget, Budget};
    let s = bsc();
    let need = required_budget(&s, 20);
    let err = convergence_report_with(&s, &[1.0], &[0.3], 0.05, 20, Budget::new(need - 1)).unwrap_err();
    assert_eq!(err.code(), "budget_exceeded");
    let capped = convergence_report_with(&s, &[1.0], &[0.3], 0.05, 20, Budget::new(need)).unwrap();
    assert_eq!(capped, convergence_report(&s, &[1.0], &[0.3], 0.05, 20).unwrap());
}
