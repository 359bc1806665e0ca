//! Report records and their jsonl/csv encodings.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

pub const FIELDS: [&str; 10] = [
    "suite",
    "params",
    "lhs",
    "rhs",
    "residual",
    "tolerance",
    "exact",
    "pass",
    "runtimeMs",
    "seed",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub suite: String,
    pub params: BTreeMap<String, String>,
    pub lhs: String,
    pub rhs: String,
    pub residual: f64,
    pub tolerance: f64,
    pub exact: Option<bool>,
    pub pass: bool,
    pub runtime_ms: u64,
    pub seed: u64,
}

impl VerificationReport {
    pub fn pass_rule(exact: Option<bool>, residual: f64, tolerance: f64) -> bool {
        exact == Some(true) || residual <= tolerance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Jsonl,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "jsonl" => Ok(Self::Jsonl),
            "csv" => Ok(Self::Csv),
            _ => Err(format!("unknown format {s:?}; expected jsonl or csv")),
        }
    }
}

/// Shortest decimal that reads back to the same double.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        serde_json::Value::from(x).to_string()
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn complex(z: Complex64) -> String {
    let im = if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("-{}", num(-z.im))
    } else {
        format!("+{}", num(z.im))
    };
    format!("{}{im}i", num(z.re))
}

fn residual_json(x: f64) -> serde_json::Value {
    if x.is_finite() {
        x.into()
    } else {
        num(x).into()
    }
}

/// One JSON object per line, fields in the fixed order.
pub fn write_jsonl(out: &mut dyn Write, records: &[VerificationReport]) -> std::io::Result<()> {
    for r in records {
        // non-finite residuals are written as strings
        let mut obj = serde_json::to_value(r).map_err(std::io::Error::other)?;
        obj["residual"] = residual_json(r.residual);
        obj["tolerance"] = residual_json(r.tolerance);
        let mut line = String::from("{");
        for (i, f) in FIELDS.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&serde_json::to_string(f).map_err(std::io::Error::other)?);
            line.push(':');
            line.push_str(&obj[*f].to_string());
        }
        line.push('}');
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Header plus one row per record; params are `key=value` joined by `;`.
pub fn write_csv(out: &mut dyn Write, records: &[VerificationReport]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FIELDS)?;
    for r in records {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let exact = match r.exact {
            Some(b) => b.to_string(),
            None => String::new(),
        };
        w.write_record([
            r.suite.clone(),
            params.join(";"),
            r.lhs.clone(),
            r.rhs.clone(),
            num(r.residual),
            num(r.tolerance),
            exact,
            r.pass.to_string(),
            r.runtime_ms.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write(out: &mut dyn Write, records: &[VerificationReport], format: Format) -> std::io::Result<()> {
    match format {
        Format::Jsonl => write_jsonl(out, records),
        Format::Csv => write_csv(out, records),
    }
}
