//! Positive samples with provenance, the bundled application data sets and the
//! published competitor AIC/SIC rows that accompany them.
//!
//! Text format: one value per line (or one delimited column, see
//! [`ParseOptions::column`]); blank lines are skipped and lines starting with
//! `#` are provenance comments. A comment of the form `# count: N` makes the
//! parser verify that exactly `N` values were read.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BALL_BEARINGS: &str = include_str!("../../../data/ball_bearings.txt");
const LEUKAEMIA: &str = include_str!("../../../data/leukaemia.txt");
const STRENGTH_10MM: &str = include_str!("../../../data/strength_10mm.txt");
const REFERENCE_COMPETITORS: &str = include_str!("../../../data/reference_competitors.csv");

/// A validated sample: non-empty, finite and strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    values: Vec<f64>,
    pub name: String,
    pub source: String,
}

impl Dataset {
    pub fn new(values: Vec<f64>, name: impl Into<String>, source: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidData("data set is empty".into()));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidData(format!("value #{} is not finite ({v})", i + 1)));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, &v)| v <= 0.0) {
            return Err(Error::InvalidData(format!(
                "value #{} is not positive ({v}); the support lies above α ≥ 0",
                i + 1
            )));
        }
        Ok(Self {
            values,
            name: name.into(),
            source: source.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Parses the text format described in the module docs.
    pub fn parse(text: &str, name: impl Into<String>, opts: &ParseOptions) -> Result<Self> {
        let parsed = parse_values(text, opts)?;
        Self::new(parsed.values, name, parsed.provenance.join("\n"))
    }

    /// Lieblein–Zelen ball-bearing failure times, n = 23.
    pub fn ball_bearings() -> Self {
        bundled(BALL_BEARINGS, "ball_bearings")
    }

    /// Feigl–Zelen leukaemia survival times in weeks, n = 33.
    pub fn leukaemia() -> Self {
        bundled(LEUKAEMIA, "leukaemia")
    }

    /// Bader–Priest single-fibre strengths at 10 mm gauge length, n = 63.
    pub fn strength_10mm() -> Self {
        bundled(STRENGTH_10MM, "strength_10mm")
    }

    /// Looks a bundled data set up by name.
    pub fn bundled(name: &str) -> Option<Self> {
        match name {
            "ball_bearings" => Some(Self::ball_bearings()),
            "leukaemia" => Some(Self::leukaemia()),
            "strength_10mm" => Some(Self::strength_10mm()),
            _ => None,
        }
    }
}

fn bundled(text: &str, name: &str) -> Dataset {
    Dataset::parse(text, name, &ParseOptions::default())
        .unwrap_or_else(|e| panic!("bundled data set {name} is malformed: {e}"))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParseOptions {
    /// Zero-based column to read from delimited rows (`,` `;` tab or spaces).
    /// When set, a non-numeric first row is taken as a header.
    pub column: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedValues {
    pub values: Vec<f64>,
    /// Comment lines with the leading `#` stripped.
    pub provenance: Vec<String>,
}

pub fn parse_values(text: &str, opts: &ParseOptions) -> Result<ParsedValues> {
    let mut values = Vec::new();
    let mut provenance = Vec::new();
    let mut expected = None;
    let mut seen_data_row = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(n) = comment.strip_prefix("count:") {
                expected =
                    Some(n.trim().parse::<usize>().map_err(|_| {
                        Error::InvalidData(format!("line {}: bad count header {comment:?}", lineno + 1))
                    })?);
            }
            provenance.push(comment.to_string());
            continue;
        }

        let field = match opts.column {
            None => line,
            Some(col) => line
                .split([',', ';', '\t', ' '])
                .filter(|f| !f.is_empty())
                .nth(col)
                .ok_or_else(|| Error::InvalidData(format!("line {}: no column {col} in {line:?}", lineno + 1)))?
                .trim_matches('"'),
        };
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if opts.column.is_some() && !seen_data_row => {}
            Err(_) => {
                return Err(Error::InvalidData(format!(
                    "line {}: {field:?} is not a number",
                    lineno + 1
                )))
            }
        }
        seen_data_row = true;
    }

    if let Some(n) = expected {
        if n != values.len() {
            return Err(Error::InvalidData(format!(
                "count header says {n} values but {} were read",
                values.len()
            )));
        }
    }
    Ok(ParsedValues { values, provenance })
}

/// One printed row of a published model-comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub dataset: String,
    pub model: String,
    pub n_p: u32,
    pub aic: f64,
    pub sic: f64,
}

/// All bundled reference rows.
pub fn reference_rows() -> Vec<ReferenceRow> {
    REFERENCE_COMPETITORS
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let num = |s: &str| s.parse::<f64>().expect("reference table: bad number");
            ReferenceRow {
                dataset: f[0].to_string(),
                model: f[1].to_string(),
                n_p: f[2].parse().expect("reference table: bad n_p"),
                aic: num(f[3]),
                sic: num(f[4]),
            }
        })
        .collect()
}

/// Reference rows for one data set.
pub fn reference_rows_for(dataset: &str) -> Vec<ReferenceRow> {
    reference_rows().into_iter().filter(|r| r.dataset == dataset).collect()
}
