//! Parsing of numeric flags, distributions and channel files.

use std::fs;
use std::path::Path;

use ldp_contraction::{Channel, Distribution};

use crate::error::{CliError, CliResult};

/// Parses a real number, also accepting `ln(x)` and `lnx` for natural logs.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let log_arg = t
        .strip_prefix("ln(")
        .and_then(|r| r.strip_suffix(')'))
        .or_else(|| t.strip_prefix("ln"));
    let value = match log_arg {
        Some(arg) => arg.trim().parse::<f64>().map(f64::ln),
        None => t.parse::<f64>(),
    };
    match value {
        Ok(v) if !v.is_nan() => Ok(v),
        _ => Err(format!("not a number: {s:?}")),
    }
}

fn parse_values(text: &str) -> CliResult<Vec<f64>> {
    let values: Vec<f64> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|v| !v.is_empty())
        .map(|v| parse_real(v).map_err(CliError::Malformed))
        .collect::<CliResult<_>>()?;
    if values.is_empty() {
        return Err(CliError::Malformed("empty distribution".into()));
    }
    Ok(values)
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// A distribution given inline as `0.7,0.3` or as a path to a file holding
/// one value per line.
pub fn load_distribution(arg: &str) -> CliResult<Distribution> {
    let path = Path::new(arg);
    let values = if path.is_file() {
        parse_values(&read(path)?)?
    } else {
        parse_values(arg)?
    };
    Ok(Distribution::new(values)?)
}

/// A channel stored as a JSON array of rows.
pub fn load_channel(path: &Path) -> CliResult<Channel> {
    parse_channel(&read(path)?)
}

pub fn parse_channel(json: &str) -> CliResult<Channel> {
    serde_json::from_str(json).map_err(|e| CliError::Malformed(e.to_string()))
}
