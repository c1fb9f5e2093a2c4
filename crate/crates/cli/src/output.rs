use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use guesslab::ExtendedReal;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Header row plus string fields. No field ever contains a comma, quote or
/// line break, so nothing needs quoting.
#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits, `inf` for the +∞ sentinel.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn ext(v: ExtendedReal) -> String {
    match v {
        ExtendedReal::Finite(v) => num(v),
        ExtendedReal::Infinite => "inf".to_string(),
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Display scale for log-domain quantities: nats, or bits with `--bits`.
#[derive(Debug, Clone, Copy)]
pub struct Units {
    divisor: f64,
}

impl Units {
    pub fn new(bits: bool) -> Self {
        Self { divisor: if bits { std::f64::consts::LN_2 } else { 1.0 } }
    }

    pub fn log(&self, v: f64) -> f64 {
        v / self.divisor
    }

    pub fn ext(&self, v: ExtendedReal) -> ExtendedReal {
        v.map(|v| v / self.divisor)
    }
}

/// Result of a subcommand before it is written anywhere.
pub enum Output {
    Csv(Table),
    Json(serde_json::Value),
}

impl Output {
    pub fn render(&self) -> String {
        match self {
            Output::Csv(t) => t.render(),
            Output::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
                s.push('\n');
                s
            }
        }
    }
}

/// First 8 bytes of SHA-256, as 16 lowercase hex digits.
pub fn digest64(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let mut s = String::with_capacity(16);
    for b in &hash[..8] {
        let _ = write!(s, "{b:02x}");
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct SourceRecord {
    pub path: PathBuf,
    pub digest: String,
    /// The parsed config, so the run can be replayed without the file.
    pub config: serde_json::Value,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub parameters: serde_json::Value,
    pub sources: Vec<SourceRecord>,
    pub outputs: Vec<PathBuf>,
    pub threads: usize,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = OsString::from(out.as_os_str());
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn write_file(path: &Path, text: &str) -> io::Result<()> {
    fs::write(path, text)
}

pub fn write_stdout(text: &str) -> io::Result<()> {
    let mut lock = io::stdout().lock();
    lock.write_all(text.as_bytes())?;
    lock.flush()
}

/// Machine-readable error written to stderr on exit code 1.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub required: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}
