mod args;
mod commands;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use guesslab::model::load_source;
use guesslab::{Error, PairSource};
use serde::Serialize;

use args::{Cli, Command, Common};
use output::{ErrorReport, Output, RunManifest, SourceRecord};

const THREADS_VAR: &str = "GUESSLAB_THREADS";

enum Failure {
    Core(Error),
    Io { path: PathBuf, err: std::io::Error },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn report(&self) -> ErrorReport {
        match self {
            Failure::Core(e) => {
                let (required, cap) = match *e {
                    Error::BudgetExceeded { required, cap } => (Some(required), Some(cap)),
                    _ => (None, None),
                };
                ErrorReport { error: e.code(), message: e.to_string(), required, cap, path: None }
            }
            Failure::Io { path, err } => ErrorReport {
                error: "io",
                message: err.to_string(),
                required: None,
                cap: None,
                path: Some(path.clone()),
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        usage_error(ErrorKind::ValueValidation, msg);
    }
    if let Command::Parallel(a) = &cli.command {
        if a.iid && a.sources.len() != 1 {
            usage_error(ErrorKind::ArgumentConflict, "--iid takes exactly one source".into());
        }
    }
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let json = serde_json::to_string(&f.report()).expect("error report serializes");
            eprintln!("{json}");
            ExitCode::from(1)
        }
    }
}

/// Exits with clap's usage status (2).
fn usage_error(kind: ErrorKind, msg: String) -> ! {
    Cli::command().error(kind, msg).exit()
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads = raw
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn load(path: &Path) -> Result<(PairSource, SourceRecord), Failure> {
    let bytes = fs::read(path).map_err(|err| Failure::Io { path: path.to_path_buf(), err })?;
    let text = String::from_utf8_lossy(&bytes);
    let source = load_source::<f64>(&text)?;
    let config = serde_json::from_str(&text).map_err(|e| Error::Json(e.to_string()))?;
    let record = SourceRecord { path: path.to_path_buf(), digest: output::digest64(&bytes), config };
    Ok((source, record))
}

fn run(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Entropy(a) => single(command, &a.source, &a.common, a, |s| commands::entropy(s, a)),
        Command::Moments(a) => single(command, &a.source, &a.common, a, |s| commands::moments(s, a)),
        Command::Dist(a) => single(command, &a.source, &a.common, a, |s| commands::dist(s, a)),
        Command::Scgf(a) => single(command, &a.source, &a.common, a, |s| commands::scgf(s, a)),
        Command::Rate(a) => single(command, &a.source, &a.common, a, |s| commands::rate(s, a)),
        Command::Ldp(a) => single(command, &a.source, &a.common, a, |s| commands::ldp(s, a)),
        Command::Sample(a) => single(command, &a.source, &a.common, a, |s| commands::sample(s, a)),
        Command::Parallel(a) => {
            let (sources, records): (Vec<_>, Vec<_>) =
                a.sources.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?.into_iter().unzip();
            let out = commands::parallel(&sources, a)?;
            emit(command, &a.common, a, records, &out)
        }
    }
}

fn single<A: Serialize>(
    command: &Command,
    path: &Path,
    common: &Common,
    params: &A,
    f: impl FnOnce(&PairSource) -> guesslab::Result<Output>,
) -> Result<(), Failure> {
    let (source, record) = load(path)?;
    let out = f(&source)?;
    emit(command, common, params, vec![record], &out)
}

fn emit<A: Serialize>(
    command: &Command,
    common: &Common,
    params: &A,
    sources: Vec<SourceRecord>,
    out: &Output,
) -> Result<(), Failure> {
    let text = out.render();
    let Some(path) = &common.out else {
        return output::write_stdout(&text).map_err(|err| Failure::Io { path: "<stdout>".into(), err });
    };
    output::write_file(path, &text).map_err(|err| Failure::Io { path: path.clone(), err })?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand: command.name(),
        parameters: serde_json::to_value(params).expect("parameters serialize"),
        sources,
        outputs: vec![path.clone()],
        threads: rayon::current_num_threads(),
    };
    let mpath = output::manifest_path(path);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    output::write_file(&mpath, &json).map_err(|err| Failure::Io { path: mpath, err })
}
