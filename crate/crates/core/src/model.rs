//! Memoryless pair sources: alphabets, validated pmfs, and config ingestion.
//!
//! A [`PairSource`] is the joint pmf of one `(X, Y)` letter; length-`n`
//! sequences are drawn i.i.d. from it. Probabilities are never renormalized:
//! a matrix whose mass is off by more than `1e-12` is rejected.

use std::collections::HashSet;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

const MASS_TOLERANCE: f64 = 1e-12;

/// Ordered set of distinct symbol labels.
///
/// Storage order is the order given in the config. Ties between equally
/// likely guesses are broken by comparing labels, so each symbol also
/// carries its position in label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    lex_rank: Vec<usize>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::named(symbols, "symbol")
    }

    fn named<S: Into<String>>(symbols: impl IntoIterator<Item = S>, which: &'static str) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet { which });
        }
        let mut seen = HashSet::new();
        for s in &symbols {
            if !seen.insert(s.as_str()) {
                return Err(Error::DuplicateSymbol(s.clone()));
            }
        }
        let mut order: Vec<usize> = (0..symbols.len()).collect();
        order.sort_by(|&a, &b| symbols[a].cmp(&symbols[b]));
        let mut lex_rank = vec![0; symbols.len()];
        for (rank, &i) in order.iter().enumerate() {
            lex_rank[i] = rank;
        }
        Ok(Self { symbols, lex_rank })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn label(&self, index: usize) -> &str {
        &self.symbols[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == label)
    }

    /// Position of symbol `index` when labels are sorted.
    pub fn lex_rank(&self, index: usize) -> usize {
        self.lex_rank[index]
    }

    /// Maps labels to indices, failing on the first unknown label.
    pub fn indices<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| self.index_of(l.as_ref()).ok_or_else(|| Error::UnknownSymbol(l.as_ref().to_owned())))
            .collect()
    }
}

/// A pmf over an [`Alphabet`].
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    alphabet: Alphabet,
    pmf: Vec<T>,
}

impl<T: Real> Distribution<T> {
    pub fn new(alphabet: Alphabet, pmf: Vec<T>) -> Result<Self> {
        if pmf.len() != alphabet.len() {
            return Err(Error::Shape {
                rows: alphabet.len(),
                cols: 1,
                found: format!("{} entries", pmf.len()),
            });
        }
        for (i, &p) in pmf.iter().enumerate() {
            check_entry(p, alphabet.label(i), "")?;
        }
        check_mass(pmf.iter().copied(), pmf.len())?;
        Ok(Self { alphabet, pmf })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn pmf(&self) -> &[T] {
        &self.pmf
    }

    pub fn prob(&self, label: &str) -> Option<T> {
        self.alphabet.index_of(label).map(|i| self.pmf[i])
    }

    pub fn support_size(&self) -> usize {
        self.pmf.iter().filter(|&&p| p > T::zero()).count()
    }
}

/// Joint pmf of one `(X, Y)` letter of a memoryless pair source.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSource<T> {
    x: Alphabet,
    y: Alphabet,
    /// Row per x symbol, column per y symbol.
    joint: Vec<Vec<T>>,
    marginal_y: Vec<T>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceDocument {
    x_symbols: Vec<String>,
    y_symbols: Vec<String>,
    joint: Vec<Vec<f64>>,
}

/// Parses and validates a JSON source document.
pub fn load_source<T: Real>(config_text: &str) -> Result<PairSource<T>> {
    let doc: SourceDocument = serde_json::from_str(config_text).map_err(|e| Error::Json(e.to_string()))?;
    let x = Alphabet::named(doc.x_symbols, "x")?;
    let y = Alphabet::named(doc.y_symbols, "y")?;
    let joint = doc
        .joint
        .into_iter()
        .map(|row| row.into_iter().map(T::lit).collect())
        .collect();
    PairSource::new(x, y, joint)
}

impl<T: Real> PairSource<T> {
    pub fn new(x: Alphabet, y: Alphabet, joint: Vec<Vec<T>>) -> Result<Self> {
        if joint.len() != x.len() || joint.iter().any(|row| row.len() != y.len()) {
            let found = format!(
                "{} rows with lengths {:?}",
                joint.len(),
                joint.iter().map(Vec::len).collect::<Vec<_>>()
            );
            return Err(Error::Shape { rows: x.len(), cols: y.len(), found });
        }
        for (xi, row) in joint.iter().enumerate() {
            for (yi, &p) in row.iter().enumerate() {
                check_entry(p, x.label(xi), y.label(yi))?;
            }
        }
        check_mass(joint.iter().flatten().copied(), x.len() * y.len())?;
        let marginal_y: Vec<T> = (0..y.len())
            .map(|yi| joint.iter().fold(T::zero(), |acc, row| acc + row[yi]))
            .collect();
        if let Some(yi) = marginal_y.iter().position(|&m| m <= T::zero()) {
            return Err(Error::ZeroMassColumn(y.label(yi).to_owned()));
        }
        Ok(Self { x, y, joint, marginal_y })
    }

    /// Source with a single uninformative y symbol, i.e. unconditional guessing.
    pub fn unconditional(dist: &Distribution<T>) -> Self {
        let joint = dist.pmf().iter().map(|&p| vec![p]).collect();
        let y = Alphabet::named(["-"], "y").expect("singleton alphabet");
        Self::new(dist.alphabet().clone(), y, joint).expect("validated distribution")
    }

    /// Builds a source from row-major probabilities with generated labels
    /// `x0, x1, ...` and `y0, y1, ...`.
    pub fn from_matrix(joint: Vec<Vec<T>>) -> Result<Self> {
        let rows = joint.len();
        let cols = joint.first().map_or(0, Vec::len);
        let x = Alphabet::named((0..rows).map(|i| format!("x{i}")), "x")?;
        let y = Alphabet::named((0..cols).map(|i| format!("y{i}")), "y")?;
        Self::new(x, y, joint)
    }

    pub fn x_alphabet(&self) -> &Alphabet {
        &self.x
    }

    pub fn y_alphabet(&self) -> &Alphabet {
        &self.y
    }

    pub fn x_size(&self) -> usize {
        self.x.len()
    }

    pub fn y_size(&self) -> usize {
        self.y.len()
    }

    pub fn joint(&self, x: usize, y: usize) -> T {
        self.joint[x][y]
    }

    pub fn joint_matrix(&self) -> &[Vec<T>] {
        &self.joint
    }

    /// Joint probabilities of column `y`, indexed by x.
    pub fn column(&self, y: usize) -> Vec<T> {
        self.joint.iter().map(|row| row[y]).collect()
    }

    pub fn marginal_y_pmf(&self) -> &[T] {
        &self.marginal_y
    }

    pub fn marginal_y(&self) -> Distribution<T> {
        Distribution { alphabet: self.y.clone(), pmf: self.marginal_y.clone() }
    }

    pub fn marginal_x(&self) -> Distribution<T> {
        let pmf = self
            .joint
            .iter()
            .map(|row| row.iter().fold(T::zero(), |a, &b| a + b))
            .collect();
        Distribution { alphabet: self.x.clone(), pmf }
    }

    /// `p(x | y)` for the y symbol at `y_index`.
    pub fn conditional_pmf(&self, y_index: usize) -> Vec<T> {
        let py = self.marginal_y[y_index];
        self.joint.iter().map(|row| row[y_index] / py).collect()
    }

    pub fn conditional_x_given_y(&self, y: &str) -> Result<Distribution<T>> {
        let yi = self.y.index_of(y).ok_or_else(|| Error::UnknownSymbol(y.to_owned()))?;
        Ok(Distribution { alphabet: self.x.clone(), pmf: self.conditional_pmf(yi) })
    }

    /// `ln p(x | y)` as a `[y][x]` table; zero entries map to `-inf`.
    pub fn log_conditionals(&self) -> Vec<Vec<T>> {
        (0..self.y_size())
            .map(|yi| self.conditional_pmf(yi).into_iter().map(|p| p.ln()).collect())
            .collect()
    }
}

fn check_entry<T: Real>(p: T, x: &str, y: &str) -> Result<()> {
    if !p.is_finite() || p < T::zero() {
        return Err(Error::InvalidProbability {
            x: x.to_owned(),
            y: y.to_owned(),
            value: p.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

fn check_mass<T: Real>(entries: impl Iterator<Item = T>, count: usize) -> Result<()> {
    let mass = entries.fold(T::zero(), |a, b| a + b);
    let tol = T::tolerance(MASS_TOLERANCE).max(T::epsilon() * T::from_count(4 * count));
    if (mass - T::one()).abs() > tol {
        return Err(Error::Mass { mass: mass.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(())
}
