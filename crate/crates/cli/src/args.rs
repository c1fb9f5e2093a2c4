use std::path::PathBuf;
use std::str::FromStr;

use clap::{ArgGroup, Args, Parser, Subcommand};
use guesslab::guesswork::Budget;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "guesslab", version, about = "Exact conditional guesswork statistics and their asymptotics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Conditional (Arimoto) and unconditional Rényi entropies.
    Entropy(EntropyArgs),
    /// Exact moments E[G^α] with finite-n bounds.
    Moments(MomentsArgs),
    /// Exact law of the guess rank as probability-level blocks.
    Dist(DistArgs),
    /// Limiting scaled cumulant generating function and its derivative.
    Scgf(ScgfArgs),
    /// Rate function on a grid.
    Rate(RateArgs),
    /// Exact pre-limit exponents next to their limits for n = 1..=nmax.
    Ldp(LdpArgs),
    /// k-th success among m independent users.
    Parallel(ParallelArgs),
    /// Monte Carlo estimate with exact per-sample ranks.
    Sample(SampleArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Entropy(_) => "entropy",
            Command::Moments(_) => "moments",
            Command::Dist(_) => "dist",
            Command::Scgf(_) => "scgf",
            Command::Rate(_) => "rate",
            Command::Ldp(_) => "ldp",
            Command::Parallel(_) => "parallel",
            Command::Sample(_) => "sample",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Report log-domain quantities in bits instead of nats.
    #[arg(long)]
    pub bits: bool,

    /// Cap on (y-type, x-type) tuples enumerated by exact computations.
    #[arg(long, default_value_t = 100_000_000)]
    pub max_type_tuples: u64,

    /// Write the result to this file and a manifest to `<out>.manifest.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn budget(&self) -> Budget {
        Budget::new(u128::from(self.max_type_tuples))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct EntropyArgs {
    /// Source config (JSON).
    #[arg(long)]
    pub source: PathBuf,

    /// Rényi orders; `inf` for min-entropy.
    #[arg(long, value_delimiter = ',', required = true)]
    pub orders: Vec<f64>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct MomentsArgs {
    #[arg(long)]
    pub source: PathBuf,

    /// Block length.
    #[arg(long)]
    pub n: usize,

    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub alphas: Vec<f64>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct DistArgs {
    #[arg(long)]
    pub source: PathBuf,

    #[arg(long)]
    pub n: usize,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct ScgfArgs {
    #[arg(long)]
    pub source: PathBuf,

    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub alphas: Vec<f64>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct RateArgs {
    #[arg(long)]
    pub source: PathBuf,

    /// Grid `lo:hi:step`, in nats.
    #[arg(long)]
    pub xgrid: Grid,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct LdpArgs {
    #[arg(long)]
    pub source: PathBuf,

    /// Ball centres for the exponent rows, in nats.
    #[arg(long, value_delimiter = ',', required = true)]
    pub x: Vec<f64>,

    /// Ball radius.
    #[arg(long)]
    pub eps: f64,

    #[arg(long)]
    pub nmax: usize,

    /// Orders for the SCGF rows.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alphas: Vec<f64>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("queries").args(["alphas", "xgrid"]).required(true).multiple(true)))]
pub struct ParallelArgs {
    /// One source config per user, or a single one with `--iid`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sources: Vec<PathBuf>,

    /// Success index: the k-th user to finish.
    #[arg(long)]
    pub k: usize,

    /// Replicate the single source over `--m` users.
    #[arg(long, requires = "m")]
    pub iid: bool,

    #[arg(long, requires = "iid")]
    pub m: Option<usize>,

    /// Block length for exact moments; omitted means limits only.
    #[arg(long)]
    pub n: Option<usize>,

    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alphas: Vec<f64>,

    #[arg(long)]
    pub xgrid: Option<Grid>,

    /// Maximize the rate over all index tuples instead of permutations.
    #[arg(long, conflicts_with = "iid")]
    pub tuples: bool,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub source: PathBuf,

    #[arg(long)]
    pub n: usize,

    /// Moment order; omitted means the estimate of n⁻¹ E ln G.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,

    #[arg(long)]
    pub samples: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub common: Common,
}

/// Evenly spaced points `lo, lo+step, ...`, `round((hi−lo)/step) + 1` of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Grid {
    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.step).round() as usize + 1
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts[..] else {
            return Err(format!("expected lo:hi:step, got {s:?}"));
        };
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        let grid = Grid { lo: parse(lo)?, hi: parse(hi)?, step: parse(step)? };
        if !(grid.lo.is_finite() && grid.hi.is_finite() && grid.step.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if grid.step <= 0.0 || grid.hi < grid.lo {
            return Err("need step > 0 and hi >= lo".into());
        }
        if (grid.hi - grid.lo) / grid.step > 1e7 {
            return Err("grid has more than 10^7 points".into());
        }
        Ok(grid)
    }
}
