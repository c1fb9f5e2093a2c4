#![allow(dead_code)]

use std::cmp::Ordering;

use guesslab::model::PairSource;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn bsc() -> PairSource<f64> {
    PairSource::from_matrix(vec![vec![0.45, 0.05], vec![0.05, 0.45]]).unwrap()
}

pub fn uniform_binary() -> PairSource<f64> {
    PairSource::from_matrix(vec![vec![0.5], vec![0.5]]).unwrap()
}

pub fn noiseless() -> PairSource<f64> {
    PairSource::from_matrix(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap()
}

/// Seeded random sources with |X| in 2..=4 and |Y| in 1..=3. Every fourth
/// source uses small integer weights (ties), every fourth has zero atoms.
pub fn corpus(count: usize) -> Vec<PairSource<f64>> {
    (0..count).map(|i| random_source(i as u64)).collect()
}

pub fn random_source(seed: u64) -> PairSource<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6775_6573_7300 + seed);
    let xs = rng.random_range(2..=4usize);
    let ys = rng.random_range(1..=3usize);
    loop {
        let mut w: Vec<Vec<f64>> = (0..xs)
            .map(|_| {
                (0..ys)
                    .map(|_| match seed % 4 {
                        1 => f64::from(rng.random_range(1..=3u32)),
                        2 if rng.random_bool(0.2) => 0.0,
                        _ => rng.random_range(0.05..1.0),
                    })
                    .collect()
            })
            .collect();
        let total: f64 = w.iter().flatten().sum();
        if (0..ys).any(|y| w.iter().all(|row| row[y] == 0.0)) {
            continue;
        }
        for row in &mut w {
            for p in row.iter_mut() {
                *p /= total;
            }
        }
        return PairSource::from_matrix(w).unwrap();
    }
}

/// All x-sequences for a fixed y-sequence, sorted into optimal guessing
/// order by brute force: `(x indices, conditional probability)`.
pub fn naive_order(source: &PairSource<f64>, ys: &[usize]) -> Vec<(Vec<usize>, f64)> {
    let nx = source.x_size();
    let n = ys.len();
    let total = nx.pow(n as u32);
    let mut seqs: Vec<(Vec<usize>, f64)> = (0..total)
        .map(|mut code| {
            let mut xs = vec![0; n];
            for slot in xs.iter_mut().rev() {
                *slot = code % nx;
                code /= nx;
            }
            let p = xs
                .iter()
                .zip(ys)
                .map(|(&x, &y)| source.joint(x, y) / source.marginal_y_pmf()[y])
                .product();
            (xs, p)
        })
        .collect();
    seqs.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let lex_key = |xs: &Vec<usize>| -> Vec<usize> { xs.iter().map(|&x| source.x_alphabet().lex_rank(x)).collect() };
    let mut out = Vec::with_capacity(total);
    let mut i = 0;
    while i < seqs.len() {
        let mut j = i + 1;
        while j < seqs.len() && same_level(seqs[i].1, seqs[j].1) {
            j += 1;
        }
        let mut run = seqs[i..j].to_vec();
        run.sort_by_key(|a| lex_key(&a.0));
        out.extend(run);
        i = j;
    }
    out
}

pub fn same_level(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// Runs of equal probability in a naively ordered list: `(count, level)`.
pub fn naive_blocks(order: &[(Vec<usize>, f64)]) -> Vec<(u64, f64)> {
    let mut blocks: Vec<(u64, f64)> = Vec::new();
    for (_, p) in order {
        match blocks.last_mut() {
            Some((c, level)) if same_level(*level, *p) => *c += 1,
            _ => blocks.push((1, *p)),
        }
    }
    blocks
}

/// A y-sequence of the given type, symbols in increasing index order.
pub fn sorted_sequence(counts: &[usize]) -> Vec<usize> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(y, &c)| std::iter::repeat_n(y, c))
        .collect()
}

pub fn shuffled(mut v: Vec<usize>, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..v.len()).rev() {
        let j = rng.random_range(0..=i);
        v.swap(i, j);
    }
    v
}

/// All compositions of `n` into `parts` parts.
pub fn y_types(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|first| {
            y_types(n - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    match a.partial_cmp(&b) {
        Some(Ordering::Equal) => true,
        _ => (a - b).abs() <= tol,
    }
}

/// Unconditional pmf of the optimal rank by enumerating every y-sequence;
/// index `r − 1` holds `P(G = r)`.
pub fn naive_rank_pmf(source: &PairSource<f64>, n: usize) -> Vec<f64> {
    let ny = source.y_size();
    let mut pmf = vec![0.0; source.x_size().pow(n as u32)];
    for mut code in 0..ny.pow(n as u32) {
        let mut ys = vec![0; n];
        for slot in ys.iter_mut().rev() {
            *slot = code % ny;
            code /= ny;
        }
        let py: f64 = ys.iter().map(|&y| source.marginal_y_pmf()[y]).product();
        for (r, (_, p)) in naive_order(source, &ys).iter().enumerate() {
            pmf[r] += py * p;
        }
    }
    pmf
}

/// Compares type-class ranks and block laws with enumeration for every
/// y-type of length `n`, using the sorted and one shuffled representative.
pub fn oracle_check(source: &PairSource<f64>, n: usize, seed: u64) -> Result<(), String> {
    use guesslab::guesswork::{guesswork_distribution, Budget, RankOracle};
    use num_bigint::BigUint;

    let dist = guesswork_distribution(source, n).map_err(|e| e.to_string())?;
    let oracle = RankOracle::new(source, Budget::default());
    for (ci, counts) in y_types(n, source.y_size()).iter().enumerate() {
        let class = dist
            .classes()
            .iter()
            .position(|c| &c.y_counts == counts)
            .ok_or_else(|| format!("missing class {counts:?}"))?;
        for ys in [sorted_sequence(counts), shuffled(sorted_sequence(counts), seed + ci as u64)] {
            let order = naive_order(source, &ys);
            let blocks = dist.class_blocks(class);
            let naive = naive_blocks(&order);
            if blocks.len() != naive.len() {
                return Err(format!("n={n} ys={ys:?}: {} blocks vs {}", blocks.len(), naive.len()));
            }
            for (b, (count, level)) in blocks.iter().zip(&naive) {
                if b.count != BigUint::from(*count) || !same_level(b.level, *level) {
                    return Err(format!("n={n} ys={ys:?}: block ({}, {}) vs ({count}, {level})", b.count, b.level));
                }
            }
            for (rank, (xs, _)) in order.iter().enumerate() {
                let got = oracle.rank(xs, &ys).map_err(|e| e.to_string())?;
                if got != BigUint::from(rank + 1) {
                    return Err(format!("n={n} xs={xs:?} ys={ys:?}: rank {got} vs {}", rank + 1));
                }
            }
        }
    }
    Ok(())
}
