use guesslab::entropy::{conditional_renyi_arimoto, renyi_entropy, EntropyOrder};
use guesslab::guesswork::{guesswork_distribution_with, moment_bounds, scgf_from_distribution, Budget};
use guesslab::ldp::{convergence_report_with, scgf_derivative, MemorylessScgf, RateFunction, ScgfCurve};
use guesslab::montecarlo::{estimate_log_guesswork_rate_with, estimate_moment_with};
use guesslab::parallel::{
    kmin_distribution_with, rate_parallel_iid, scgf_parallel_iid, IndexMode, ParallelRate, UserEnsemble,
};
use guesslab::{ExtendedReal, PairSource, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{
    DistArgs, EntropyArgs, LdpArgs, MomentsArgs, ParallelArgs, RateArgs, SampleArgs, ScgfArgs,
};
use crate::output::{ext, num, opt, Output, Table, Units};

pub fn entropy(source: &PairSource, args: &EntropyArgs) -> Result<Output> {
    let units = Units::new(args.common.bits);
    let marginal = source.marginal_x();
    let mut table = Table::new(&["order", "conditional", "unconditional"]);
    for &a in &args.orders {
        let order = EntropyOrder::new(a)?;
        table.push(vec![
            num(a),
            num(units.log(conditional_renyi_arimoto(source, order))),
            num(units.log(renyi_entropy(&marginal, order))),
        ]);
    }
    Ok(Output::Csv(table))
}

pub fn moments(source: &PairSource, args: &MomentsArgs) -> Result<Output> {
    let units = Units::new(args.common.bits);
    let dist = guesswork_distribution_with(source, args.n, args.common.budget())?;
    let nn = args.n as f64;
    let mut table = Table::new(&["n", "alpha", "exact", "lower", "upper", "scgf_empirical"]);
    for &alpha in &args.alphas {
        let sample = scgf_from_distribution(&dist, alpha);
        let (lower, upper) = if alpha > -1.0 && alpha < 0.0 {
            let b = moment_bounds(source, args.n, alpha)?;
            (Some(b.lower), Some(b.upper))
        } else if let Some((lo, hi)) = sample.rank_one_sandwich {
            (Some((nn * lo).exp()), Some((nn * hi).exp()))
        } else {
            (None, None)
        };
        table.push(vec![
            args.n.to_string(),
            num(alpha),
            num(dist.moment(alpha)),
            opt(lower),
            opt(upper),
            num(units.log(sample.value)),
        ]);
    }
    Ok(Output::Csv(table))
}

pub fn dist(source: &PairSource, args: &DistArgs) -> Result<Output> {
    let units = Units::new(args.common.bits);
    let dist = guesswork_distribution_with(source, args.n, args.common.budget())?;
    let mut table = Table::new(&[
        "class", "y_counts", "y_mass", "rank_start", "rank_end", "count", "level", "log_level",
    ]);
    for (c, class) in dist.classes().iter().enumerate() {
        let counts = class.y_counts.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
        for b in dist.class_blocks(c) {
            let end = &b.start + &b.count - 1u32;
            table.push(vec![
                c.to_string(),
                counts.clone(),
                num(class.y_mass),
                b.start.to_string(),
                end.to_string(),
                b.count.to_string(),
                num(b.level),
                num(units.log(b.log_level)),
            ]);
        }
    }
    Ok(Output::Csv(table))
}

pub fn scgf(source: &PairSource, args: &ScgfArgs) -> Result<Output> {
    let units = Units::new(args.common.bits);
    let curve = MemorylessScgf::new(source);
    let mut table = Table::new(&["alpha", "scgf", "derivative"]);
    for &alpha in &args.alphas {
        let d = (alpha > -1.0).then(|| scgf_derivative(source, alpha)).transpose()?;
        table.push(vec![num(alpha), num(units.log(curve.value(alpha))), opt(d.map(|d| units.log(d)))]);
    }
    Ok(Output::Csv(table))
}

pub fn rate(source: &PairSource, args: &RateArgs) -> Result<Output> {
    let units = Units::new(args.common.bits);
    let rate = RateFunction::new(MemorylessScgf::new(source));
    let xs = args.xgrid.points();
    let values = xs.par_iter().map(|&x| rate.eval(x)).collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["x", "rate"]);
    for (x, v) in xs.into_iter().zip(values) {
        table.push(vec![num(units.log(x)), ext(units.ext(v))]);
    }
    Ok(Output::Csv(table))
}

pub fn ldp(source: &PairSource, args: &LdpArgs) -> Result<Output> {
    let units = Units::new(args.common.bits);
    let report = convergence_report_with(source, &args.alphas, &args.x, args.eps, args.nmax, args.common.budget())?;
    let mut table = Table::new(&["kind", "n", "param", "empirical", "limit", "gap", "envelope"]);
    for r in &report.scgf {
        table.push(vec![
            "scgf".into(),
            r.n.to_string(),
            num(r.alpha),
            num(units.log(r.empirical)),
            num(units.log(r.limit)),
            num(units.log(r.gap)),
            opt(r.envelope.map(|e| units.log(e))),
        ]);
    }
    for r in &report.exponents {
        let gap = match (r.empirical, r.rate) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => num(units.log(a - b)),
            (ExtendedReal::Infinite, ExtendedReal::Finite(_)) => "inf".into(),
            (ExtendedReal::Finite(_), ExtendedReal::Infinite) => "-inf".into(),
            (ExtendedReal::Infinite, ExtendedReal::Infinite) => String::new(),
        };
        table.push(vec![
            "exponent".into(),
            r.n.to_string(),
            num(units.log(r.x)),
            ext(units.ext(r.empirical)),
            ext(units.ext(r.rate)),
            gap,
            String::new(),
        ]);
    }
    Ok(Output::Csv(table))
}

pub fn parallel(sources: &[PairSource], args: &ParallelArgs) -> Result<Output> {
    let units = Units::new(args.common.bits);
    let ensemble = match args.m {
        Some(m) if args.iid => UserEnsemble::iid(&sources[0], args.k, m)?,
        _ => UserEnsemble::new(sources.to_vec(), args.k)?,
    };
    let mode = if args.tuples { IndexMode::Tuples } else { IndexMode::Permutations };
    let general = (!args.iid && ensemble.m() > 1).then(|| ParallelRate::new(&ensemble, mode)).transpose()?;
    let table_scgf = match &general {
        Some(rate) if !args.alphas.is_empty() => Some(rate.scgf()?),
        _ => None,
    };
    let law = args.n.map(|n| kmin_distribution_with(&ensemble, n, args.common.budget())).transpose()?;

    let scgf_at = |alpha: f64| -> Result<f64> {
        match &table_scgf {
            Some(t) => Ok(t.value(alpha)),
            None if ensemble.m() == 1 => Ok(MemorylessScgf::new(&sources[0]).value(alpha)),
            None => scgf_parallel_iid(&sources[0], args.k, ensemble.m(), alpha),
        }
    };
    let rate_at = |x: f64| -> Result<ExtendedReal> {
        match &general {
            Some(rate) => rate.eval(x),
            None => rate_parallel_iid(&sources[0], args.k, ensemble.m(), x),
        }
    };

    let mut table = Table::new(&["kind", "arg", "moment_exact", "scgf_empirical", "scgf", "rate"]);
    for &alpha in &args.alphas {
        let (moment, pre) = match &law {
            Some(d) => (Some(d.moment(alpha)), Some(units.log(d.log_moment(alpha) / d.n() as f64))),
            None => (None, None),
        };
        table.push(vec![
            "alpha".into(),
            num(alpha),
            opt(moment),
            opt(pre),
            num(units.log(scgf_at(alpha)?)),
            String::new(),
        ]);
    }
    if let Some(grid) = &args.xgrid {
        let xs = grid.points();
        let values = xs.par_iter().map(|&x| rate_at(x)).collect::<Result<Vec<_>>>()?;
        for (x, v) in xs.into_iter().zip(values) {
            table.push(vec![
                "x".into(),
                num(units.log(x)),
                String::new(),
                String::new(),
                String::new(),
                ext(units.ext(v)),
            ]);
        }
    }
    Ok(Output::Csv(table))
}

#[derive(Serialize)]
struct SampleOutput {
    statistic: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    estimate: f64,
    std_error: f64,
    n: usize,
    samples: usize,
    seed: u64,
}

pub fn sample(source: &PairSource, args: &SampleArgs) -> Result<Output> {
    let budget: Budget = args.common.budget();
    let out = match args.alpha {
        Some(alpha) => {
            let r = estimate_moment_with(source, args.n, alpha, args.samples, args.seed, budget)?;
            SampleOutput {
                statistic: "moment",
                alpha: Some(alpha),
                estimate: r.estimate,
                std_error: r.std_error,
                n: r.n,
                samples: r.samples,
                seed: r.seed,
            }
        }
        None => {
            let units = Units::new(args.common.bits);
            let r = estimate_log_guesswork_rate_with(source, args.n, args.samples, args.seed, budget)?;
            SampleOutput {
                statistic: "log_rate",
                alpha: None,
                estimate: units.log(r.estimate),
                std_error: units.log(r.std_error),
                n: r.n,
                samples: r.samples,
                seed: r.seed,
            }
        }
    };
    Ok(Output::Json(serde_json::to_value(out).expect("sample report serializes")))
}
