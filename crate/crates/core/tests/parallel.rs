mod common;

use common::*;
use guesslab::entropy::{conditional_renyi_arimoto, conditional_shannon_entropy, EntropyOrder};
use guesslab::guesswork::moment_exact;
use guesslab::ldp::{rate_function, scgf_limit};
use guesslab::parallel::*;
use guesslab::scalar::ExtendedReal;
use num_bigint::BigUint;
use proptest::prelude::*;

/// Law of the k-th smallest by summing over every tuple of ranks.
fn brute_kmin(pmfs: &[Vec<f64>], k: usize) -> Vec<f64> {
    let size = pmfs[0].len();
    let mut out = vec![0.0; size];
    let m = pmfs.len();
    for mut code in 0..size.pow(m as u32) {
        let mut ranks = Vec::with_capacity(m);
        let mut p = 1.0;
        for pmf in pmfs {
            let r = code % size;
            code /= size;
            p *= pmf[r];
            ranks.push(r);
        }
        ranks.sort_unstable();
        out[ranks[k - 1]] += p;
    }
    out
}

#[test]
fn order_statistic_matches_brute_force() {
    let sources = corpus(20);
    for (i, pair) in sources.chunks(2).enumerate() {
        let size = pair[0].x_size();
        let mut users: Vec<_> = pair.iter().filter(|u| u.x_size() == size).cloned().collect();
        users.push(users[0].clone());
        let n = if users[0].x_size() > 2 { 2 } else { 3 };
        let pmfs: Vec<Vec<f64>> = users.iter().map(|u| naive_rank_pmf(u, n)).collect();
        for k in 1..=users.len() {
            let ens = UserEnsemble::new(users.clone(), k).unwrap();
            let law = kmin_distribution(&ens, n).unwrap();
            let want = brute_kmin(&pmfs, k);
            for (r, w) in want.iter().enumerate() {
                let got = law.pmf_at(&BigUint::from(r + 1));
                assert!((got - w).abs() <= 1e-13, "pair {i} k={k} r={}: {got} vs {w}", r + 1);
            }
            let mean: f64 = want.iter().enumerate().map(|(r, w)| (r + 1) as f64 * w).sum();
            assert!((law.moment(1.0) - mean).abs() <= 1e-12 * mean);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mass_and_dominance(seed in 0u64..100, m in 2usize..=4, n in 1usize..=5) {
        let s = random_source(seed);
        let users: Vec<_> = (0..m).map(|j| if j % 2 == 0 { s.clone() } else { random_source(seed + 1000 * j as u64) })
            .filter(|u| u.x_size() == s.x_size())
            .collect();
        prop_assume!(users.len() >= 2);
        let laws: Vec<KminDistribution<f64>> = (1..=users.len())
            .map(|k| kmin_distribution(&UserEnsemble::new(users.clone(), k).unwrap(), n).unwrap())
            .collect();
        for law in &laws {
            prop_assert!((law.total_mass() - 1.0).abs() <= 1e-10);
        }
        let max = s.x_size().pow(n as u32);
        for t in (0..=max).step_by((max / 64).max(1)) {
            let t = BigUint::from(t);
            for w in laws.windows(2) {
                prop_assert!(w[1].survival_at(&t) >= w[0].survival_at(&t) - 1e-12);
            }
        }
    }
}

#[test]
fn single_user_is_bit_identical() {
    for s in corpus(6).into_iter().chain([bsc(), uniform_binary()]) {
        let ens = UserEnsemble::new(vec![s.clone()], 1).unwrap();
        for n in 1..=5 {
            for a in [-2.0, -0.5, 1.0, 2.5] {
                assert_eq!(kmin_moment_exact(&ens, n, a).unwrap(), moment_exact(&s, n, a).unwrap());
            }
        }
        for i in 0..=50 {
            let x = 0.7 * f64::from(i) / 50.0;
            assert_eq!(rate_parallel(&ens, x).unwrap(), rate_function(&s, x).unwrap());
        }
        for a in [-3.0, -1.0, -0.4, 0.0, 0.6, 2.0] {
            assert_eq!(scgf_parallel(&ens, a).unwrap(), scgf_limit(&s, a));
        }
    }
}

#[test]
fn single_user_biconjugate() {
    for s in [bsc(), uniform_binary(), random_source(3)] {
        let ens = UserEnsemble::new(vec![s.clone()], 1).unwrap();
        let rate = ParallelRate::new(&ens, IndexMode::Permutations).unwrap();
        let curve = rate.scgf().unwrap();
        for a in [-3.0, -1.0, -0.6, -0.2, 0.0, 0.5, 1.0, 2.0, 4.0] {
            let got = curve.value(a);
            assert!((got - scgf_limit(&s, a)).abs() <= 1e-5, "alpha={a}: {got} vs {}", scgf_limit(&s, a));
        }
    }
}

#[test]
fn identical_users_match_iid_forms() {
    for s in [bsc(), uniform_binary(), random_source(5)] {
        for (k, m) in [(1, 2), (2, 3), (3, 3), (2, 4)] {
            let ens = UserEnsemble::iid(&s, k, m).unwrap();
            let rate = ParallelRate::new(&ens, IndexMode::Permutations).unwrap();
            let top = (s.x_size() as f64).ln();
            for i in 0..50 {
                let x = top * f64::from(i) / 49.0;
                let got = rate.eval(x).unwrap();
                let want = rate_parallel_iid(&s, k, m, x).unwrap();
                match (got, want) {
                    (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => assert!((a - b).abs() <= 1e-12, "x={x}"),
                    _ => assert_eq!(got, want),
                }
            }
            let curve = rate.scgf().unwrap();
            for a in [-2.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
                let want = scgf_parallel_iid(&s, k, m, a).unwrap();
                assert!((curve.value(a) - want).abs() <= 1e-6, "k={k} m={m} a={a}: {} vs {want}", curve.value(a));
            }
        }
    }
}

#[test]
fn heterogeneous_pair_takes_best_permutation() {
    let users = vec![uniform_binary(), bsc()];
    let ens = UserEnsemble::new(users.clone(), 1).unwrap();
    let h: Vec<f64> = users.iter().map(conditional_shannon_entropy).collect();
    for i in 0..=40 {
        let x = 0.69 * f64::from(i) / 40.0;
        let star: Vec<ExtendedReal<f64>> = users.iter().map(|u| rate_function(u, x).unwrap()).collect();
        let above = |j: usize| if x >= h[j] { star[j] } else { ExtendedReal::Finite(0.0) };
        let explicit = (star[0] + above(1)).max(star[1] + above(0));
        let got = rate_parallel(&ens, x).unwrap();
        assert_eq!(got, explicit, "x={x}");
        assert!(got >= star[0] && got >= star[1]);
        let tuples = rate_parallel_with(&ens, x, IndexMode::Tuples).unwrap();
        assert!(tuples >= got);
    }
}

#[test]
fn heterogeneous_convexity_probe() {
    let ens = UserEnsemble::new(vec![uniform_binary(), bsc()], 2).unwrap();
    let rate = ParallelRate::new(&ens, IndexMode::Permutations).unwrap();
    let xs: Vec<f64> = (0..=69).map(|i| 0.01 * f64::from(i)).collect();
    let vals: Vec<Option<f64>> = xs.iter().map(|&x| rate.eval(x).unwrap().finite()).collect();
    let violations = vals
        .windows(3)
        .filter(|w| matches!(w, [Some(a), Some(b), Some(c)] if a + c < 2.0 * b - 1e-9))
        .count();
    println!("convexity violations on heterogeneous pair (k=2, m=2): {violations} (absence is inconclusive)");
}

#[test]
fn iid_zero_and_slope() {
    for s in [bsc(), random_source(2), random_source(9)] {
        let h = conditional_shannon_entropy(&s);
        for (k, m) in [(1, 2), (2, 3), (1, 4)] {
            assert!(rate_parallel_iid(&s, k, m, h).unwrap().unwrap() <= 1e-9);
            for dx in [-0.1, 0.1] {
                if h + dx >= 0.0 {
                    assert!(rate_parallel_iid(&s, k, m, h + dx).unwrap() > ExtendedReal::Finite(0.0));
                }
            }
            let d = 1e-6;
            let slope = (scgf_parallel_iid(&s, k, m, d).unwrap() - scgf_parallel_iid(&s, k, m, -d).unwrap()) / (2.0 * d);
            assert!((slope - h).abs() <= 1e-6, "slope {slope} vs {h}");
        }
    }
}

#[test]
fn bsc_min_of_two_converges() {
    let ens = UserEnsemble::iid(&bsc(), 1, 2).unwrap();
    let h23 = conditional_renyi_arimoto(&bsc(), EntropyOrder::new(2.0 / 3.0).unwrap());
    assert!((scgf_parallel_iid(&bsc(), 1, 2, 1.0).unwrap() - h23).abs() < 1e-12);
    for alpha in [-0.5, 1.0] {
        let target = scgf_parallel_iid(&bsc(), 1, 2, alpha).unwrap();
        let gaps: Vec<f64> = (1..=12)
            .map(|n| (kmin_distribution(&ens, n).unwrap().log_moment(alpha) / n as f64 - target).abs())
            .collect();
        for w in gaps[1..].windows(2) {
            assert!(w[1] < w[0], "alpha={alpha} gaps={gaps:?}");
        }
        if alpha > 0.0 {
            let late = (kmin_distribution(&ens, 100).unwrap().log_moment(alpha) / 100.0 - target).abs();
            assert!(late <= 0.05 && late < gaps[11], "alpha={alpha} n=100 gap={late}");
        }
    }
}

/// For α < 0, `max_i G_i^α ≤ Σ_i G_i^α` gives
/// `E G^α ≤ E G_{1,m}^α ≤ m·E G^α`.
#[test]
fn negative_order_min_sandwich() {
    for s in [bsc(), random_source(4)] {
        for m in [2usize, 3] {
            let ens = UserEnsemble::iid(&s, 1, m).unwrap();
            for n in 1..=8 {
                for a in [-0.9, -0.5, -0.1] {
                    let single = moment_exact(&s, n, a).unwrap();
                    let min = kmin_moment_exact(&ens, n, a).unwrap();
                    assert!(min >= single * (1.0 - 1e-12) && min <= m as f64 * single * (1.0 + 1e-12));
                }
            }
        }
    }
}
