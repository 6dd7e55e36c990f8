//! Number formatting and the CSV layouts emitted by the subcommands.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ldp_contraction::fdiv_bounds::SweepFamily;
use ldp_contraction::BoundCurve;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Significant digits kept when printing a number.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` with [`SIGNIFICANT_DIGITS`] significant digits, trailing
/// zeros dropped. Plain notation is used for magnitudes in `[1e-5, 1e15)`,
/// scientific otherwise. Infinities print as `inf` and `-inf`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');

    if !(-5..15).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        };
    }
    let mut out = String::from(sign);
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(digits);
    } else {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            out.push_str(digits);
            out.extend(std::iter::repeat_n('0', int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    }
    out
}

/// Parses a number printed by [`fmt_num`].
pub fn parse_num(s: &str) -> CliResult<f64> {
    match s.trim() {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t
            .parse()
            .map_err(|_| CliError::Malformed(format!("not a number: {t:?}"))),
    }
}

/// `x` rounded to the printed precision, as a JSON value. Non-finite values
/// become the strings `inf`, `-inf` and `nan`.
pub fn json_num(x: f64) -> Value {
    if x.is_finite() {
        let rounded: f64 = fmt_num(x).parse().expect("formatted number parses");
        serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
    } else {
        Value::String(fmt_num(x))
    }
}

/// Rewrites every JSON number to the printed precision.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) => n
            .as_f64()
            .filter(|_| n.is_f64())
            .map_or(Value::Number(n), json_num),
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

pub fn curve_json(c: &BoundCurve) -> Value {
    let params: serde_json::Map<String, Value> = c
        .params()
        .iter()
        .map(|(k, v)| (k.clone(), json_num(*v)))
        .collect();
    let points: Vec<Value> = c
        .points()
        .iter()
        .map(|&(x, y)| Value::Array(vec![json_num(x), json_num(y)]))
        .collect();
    serde_json::json!({ "label": c.label(), "params": params, "points": points })
}

/// Writes `header` and `rows` as CSV with Unix newlines.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn csv_rows<'a>(text: &'a str, header: &[&str]) -> CliResult<Vec<Vec<&'a str>>> {
    let mut lines = text.lines();
    let found = lines.next().unwrap_or_default();
    if found != header.join(",") {
        return Err(CliError::Malformed(format!(
            "unexpected CSV header {found:?}"
        )));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            if cells.len() == header.len() {
                Ok(cells)
            } else {
                Err(CliError::Malformed(format!(
                    "CSV row has {} cells: {l:?}",
                    cells.len()
                )))
            }
        })
        .collect()
}

fn curve(label: &str, params: &[(&str, f64)], points: Vec<(f64, f64)>) -> CliResult<BoundCurve> {
    Ok(BoundCurve::new(label, params, points)?)
}

pub const SDPI_HEADER: [&str; 4] = ["t", "dpi", "linear_sdpi", "nonlinear_sdpi"];

/// `t,dpi,linear_sdpi,nonlinear_sdpi` from three curves sharing abscissae.
pub fn sdpi_csv(curves: &[BoundCurve; 3]) -> String {
    let rows = (0..curves[0].points().len()).map(|i| {
        let mut row = vec![fmt_num(curves[0].points()[i].0)];
        row.extend(curves.iter().map(|c| fmt_num(c.points()[i].1)));
        row
    });
    csv(&SDPI_HEADER, rows)
}

/// Reads [`sdpi_csv`] output back into its three curves, without params.
pub fn parse_sdpi_csv(text: &str) -> CliResult<Vec<BoundCurve>> {
    let rows = csv_rows(text, &SDPI_HEADER)?;
    let mut series: Vec<Vec<(f64, f64)>> = (0..3).map(|_| Vec::with_capacity(rows.len())).collect();
    for row in rows {
        let t = parse_num(row[0])?;
        for (s, cell) in series.iter_mut().zip(&row[1..]) {
            s.push((t, parse_num(cell)?));
        }
    }
    SDPI_HEADER[1..]
        .iter()
        .zip(series)
        .map(|(label, pts)| curve(label, &[], pts))
        .collect()
}

pub const KL_COMPARE_HEADER: [&str; 4] = ["x", "series", "ours", "dasgupta"];

/// `x,series,ours,dasgupta`, one block of rows per family.
pub fn kl_compare_csv(families: &[SweepFamily]) -> String {
    let rows = families.iter().flat_map(|(s, ours, theirs)| {
        ours.points()
            .iter()
            .zip(theirs.points())
            .map(move |(a, b)| vec![fmt_num(a.0), fmt_num(*s), fmt_num(a.1), fmt_num(b.1)])
    });
    csv(&KL_COMPARE_HEADER, rows)
}

/// Reads [`kl_compare_csv`] output back into `(series, ours, comparison)`
/// families, in order of first appearance.
pub fn parse_kl_compare_csv(text: &str) -> CliResult<Vec<SweepFamily>> {
    let mut order = Vec::new();
    type Points = Vec<(f64, f64)>;
    let mut by_series: BTreeMap<u64, (Points, Points)> = BTreeMap::new();
    for row in csv_rows(text, &KL_COMPARE_HEADER)? {
        let (x, s) = (parse_num(row[0])?, parse_num(row[1])?);
        let entry = by_series.entry(s.to_bits()).or_insert_with(|| {
            order.push(s);
            Default::default()
        });
        entry.0.push((x, parse_num(row[2])?));
        entry.1.push((x, parse_num(row[3])?));
    }
    order
        .into_iter()
        .map(|s| {
            let (a, b) = by_series.remove(&s.to_bits()).expect("series recorded");
            Ok((s, curve("ours", &[], a)?, curve("dasgupta", &[], b)?))
        })
        .collect()
}

pub const COMPOSE_HEADER: [&str; 3] = ["t", "n", "g_n"];

/// `t,n,g_n`, one block of rows per `n`.
pub fn compose_csv(curves: &[(u32, BoundCurve)]) -> String {
    let rows = curves.iter().flat_map(|(n, c)| {
        c.points()
            .iter()
            .map(move |&(t, g)| vec![fmt_num(t), n.to_string(), fmt_num(g)])
    });
    csv(&COMPOSE_HEADER, rows)
}

/// Reads [`compose_csv`] output back into one curve per `n`.
pub fn parse_compose_csv(text: &str) -> CliResult<Vec<(u32, BoundCurve)>> {
    let mut by_n: BTreeMap<u32, Vec<(f64, f64)>> = BTreeMap::new();
    for row in csv_rows(text, &COMPOSE_HEADER)? {
        let n: u32 = row[1]
            .parse()
            .map_err(|_| CliError::Malformed(format!("bad n: {:?}", row[1])))?;
        by_n.entry(n)
            .or_default()
            .push((parse_num(row[0])?, parse_num(row[2])?));
    }
    by_n.into_iter()
        .map(|(n, pts)| Ok((n, curve(&format!("G_{n}"), &[], pts)?)))
        .collect()
}

/// `key,value` rows for scalar reports.
pub fn key_value_csv(pairs: &[(&str, String)]) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in pairs {
        let _ = writeln!(out, "{k},{v}");
    }
    out
}
