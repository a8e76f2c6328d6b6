use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::likelihood::{CensorKind, CensoredDataset, Observation};

/// Leading columns of every dataset file; covariates follow.
pub const FIXED_COLUMNS: [&str; 5] = ["outcome", "censor", "cut1", "cut2", "trials"];

/// Read a dataset file.
pub fn ingest(path: impl AsRef<Path>) -> Result<CensoredDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, path)
}

fn parse_error(path: &Path, line: usize, column: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column: column.to_string(),
        message: message.into(),
    }
}

/// Parse dataset text; `path` only labels error messages. Lines starting
/// with `#` are ignored.
pub fn parse_dataset(text: &str, path: &Path) -> Result<CensoredDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| parse_error(path, 1, "header", e.to_string()))?
        .clone();
    if headers.len() < FIXED_COLUMNS.len() || headers.iter().zip(FIXED_COLUMNS).any(|(h, f)| h != f)
    {
        return Err(parse_error(
            path,
            1,
            "header",
            format!("header must start with {}", FIXED_COLUMNS.join(",")),
        ));
    }
    let covariate_names: Vec<String> = headers
        .iter()
        .skip(FIXED_COLUMNS.len())
        .map(String::from)
        .collect();
    let mut observations = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(path, line, "row", e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let number = |i: usize| -> Result<Option<f64>> {
            let cell = &record[i];
            if cell.is_empty() {
                return Ok(None);
            }
            let v: f64 = cell.parse().map_err(|_| {
                parse_error(path, line, &headers[i], format!("`{cell}` is not a number"))
            })?;
            if !v.is_finite() {
                return Err(parse_error(
                    path,
                    line,
                    &headers[i],
                    format!("`{cell}` is not finite"),
                ));
            }
            Ok(Some(v))
        };
        let outcome = number(0)?;
        let cut1 = number(2)?;
        let cut2 = number(3)?;
        let trials = match &record[4] {
            "" => None,
            cell => Some(cell.parse::<u64>().map_err(|_| {
                parse_error(
                    path,
                    line,
                    "trials",
                    format!("`{cell}` is not a nonnegative integer"),
                )
            })?),
        };
        let invalid = |msg: &str| Error::Validation(format!("{}:{line}: {msg}", path.display()));
        let kind = match &record[1] {
            "none" => match (outcome, cut1, cut2) {
                (Some(y), None, None) => CensorKind::Observed(y),
                (None, _, _) => return Err(invalid("censor=none needs an outcome")),
                _ => return Err(invalid("censor=none rows must leave cut1 and cut2 empty")),
            },
            kind @ ("left" | "right") => {
                if outcome.is_some() {
                    return Err(invalid("censored rows must leave the outcome empty"));
                }
                match (cut1, cut2) {
                    (Some(c), None) if kind == "left" => CensorKind::LeftCensored(c),
                    (Some(c), None) => CensorKind::RightCensored(c),
                    (None, _) => return Err(invalid(&format!("censor={kind} needs cut1"))),
                    (Some(_), Some(_)) => {
                        return Err(invalid(&format!("censor={kind} must leave cut2 empty")))
                    }
                }
            }
            "interval" => {
                if outcome.is_some() {
                    return Err(invalid("censored rows must leave the outcome empty"));
                }
                match (cut1, cut2) {
                    (Some(a), Some(b)) if a < b => CensorKind::IntervalCensored(a, b),
                    (Some(a), Some(b)) => {
                        return Err(invalid(&format!(
                            "interval needs cut1 < cut2, got {a} >= {b}"
                        )))
                    }
                    _ => return Err(invalid("censor=interval needs cut1 and cut2")),
                }
            }
            other => {
                return Err(parse_error(
                    path,
                    line,
                    "censor",
                    format!("`{other}` is not one of none|left|right|interval"),
                ))
            }
        };
        let covariates = (FIXED_COLUMNS.len()..record.len())
            .map(|i| number(i).map(|v| v.unwrap_or(f64::NAN)))
            .collect::<Result<Vec<_>>>()?;
        let mut obs = Observation::new(kind, covariates);
        obs.trials = trials;
        observations.push(obs);
    }
    CensoredDataset::new(covariate_names, observations)
}

fn cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        // shortest representation that parses back to the same value
        format!("{v}")
    }
}

/// Render a dataset in the file format read by [`ingest`].
pub fn serialize_dataset(data: &CensoredDataset) -> String {
    let mut out = FIXED_COLUMNS.join(",");
    for name in data.covariate_names() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for obs in data.observations() {
        let (y, censor, c1, c2) = match obs.outcome {
            CensorKind::Observed(y) => (cell(y), "none", String::new(), String::new()),
            CensorKind::LeftCensored(c) => (String::new(), "left", cell(c), String::new()),
            CensorKind::RightCensored(c) => (String::new(), "right", cell(c), String::new()),
            CensorKind::IntervalCensored(a, b) => (String::new(), "interval", cell(a), cell(b)),
        };
        let trials = obs.trials.map(|t| t.to_string()).unwrap_or_default();
        let _ = write!(out, "{y},{censor},{c1},{c2},{trials}");
        for &x in &obs.covariates {
            out.push(',');
            out.push_str(&cell(x));
        }
        out.push('\n');
    }
    out
}

pub fn write_dataset(path: impl AsRef<Path>, data: &CensoredDataset) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, serialize_dataset(data)).map_err(|e| Error::io(path, e))
}

/// Content hash of a dataset, used to check that reports are comparable.
pub fn dataset_id(data: &CensoredDataset) -> String {
    let digest = Sha256::digest(serialize_dataset(data).as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}
