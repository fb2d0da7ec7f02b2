//! Parameter-grid sweeps with deterministic CSV/JSON reports.
//!
//! A sweep spec names one identity and a set of axes (parameter name to value
//! list). The Cartesian product is evaluated in lexicographic grid order --
//! axes sorted by name, last axis fastest -- and the report body is
//! byte-reproducible run to run, with or without `parallel`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;

use crate::context::{QError, Result};
use crate::registry::{find, ParamMap};
use crate::report::{fmt_f64, CaseParams, ParamValue, ResidualReport, Status};

/// Hard cap on the grid size unless the spec raises it.
pub const DEFAULT_MAX_CASES: usize = 100_000;

/// Sweep specification (JSON file format of the CLI `sweep` subcommand).
#[derive(Debug, Clone, Deserialize)]
pub struct SweepSpec {
    pub identity: String,
    /// Axis name -> explicit value list. Values are JSON numbers or strings
    /// like "0.3+0.2i". A single-valued axis pins a parameter.
    #[serde(default)]
    pub axes: BTreeMap<String, Vec<serde_json::Value>>,
    /// Residual budget; identity default when absent.
    #[serde(default)]
    pub tol: Option<f64>,
    /// Override for the identity's truncation parameter N, when it has one.
    #[serde(default)]
    pub truncation: Option<i64>,
    /// Default output path (the CLI --out flag wins).
    #[serde(default)]
    pub out: Option<String>,
    /// Grid-size cap override.
    #[serde(default)]
    pub max_cases: Option<usize>,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| QError::InvalidSweep(e.to_string()))
    }
}

/// Parse a parameter literal: integer, real, or complex `re+imi`.
pub fn parse_param_value(text: &str) -> Result<ParamValue> {
    let t = text.trim();
    if let Ok(v) = t.parse::<i64>() {
        return Ok(ParamValue::Int(v));
    }
    if let Ok(v) = t.parse::<f64>() {
        return Ok(ParamValue::Real(v));
    }
    parse_complex(t).map(ParamValue::Complex)
}

/// Complex literal: `0.3+0.2i`, `-1.5i`, `2`, `1-i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t = text.trim().replace(' ', "");
    let bad = || QError::InvalidParameter(format!("cannot parse '{text}' as a number"));
    if !t.ends_with('i') {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    }
    let body = &t[..t.len() - 1];
    // split at the last +/- that is not a leading sign or part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i] as char;
        if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
            split = Some(i);
            break;
        }
    }
    match split {
        Some(i) => {
            let re: f64 = body[..i].parse().map_err(|_| bad())?;
            let im_str = &body[i..];
            let im: f64 = match im_str {
                "+" => 1.0,
                "-" => -1.0,
                _ => im_str.parse().map_err(|_| bad())?,
            };
            Ok(Complex64::new(re, im))
        }
        None => {
            let im: f64 = match body {
                "" => 1.0,
                "-" => -1.0,
                _ => body.parse().map_err(|_| bad())?,
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}

fn json_to_param(value: &serde_json::Value) -> Result<ParamValue> {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(v) = n.as_i64() {
                Ok(ParamValue::Int(v))
            } else {
                Ok(ParamValue::Real(n.as_f64().ok_or_else(|| {
                    QError::InvalidSweep(format!("bad number {n}"))
                })?))
            }
        }
        serde_json::Value::String(s) => parse_param_value(s),
        other => Err(QError::InvalidSweep(format!("unsupported axis value {other}"))),
    }
}

/// Sweep summary: counts, worst residual, and the case attaining it.
#[derive(Debug, Clone)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub max_abs_residual: f64,
    pub argmax_case: CaseParams,
}

/// Result of a sweep: one report per grid point (grid order) plus the summary.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<ResidualReport>,
    pub summary: Summary,
}

impl SweepResult {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }
}

/// Expand the grid and evaluate every case.
pub fn run_sweep(spec: &SweepSpec, parallel: bool) -> Result<SweepResult> {
    let identity = find(&spec.identity)?;
    let mut axes: Vec<(String, Vec<ParamValue>)> = Vec::new();
    for (name, values) in &spec.axes {
        if values.is_empty() {
            return Err(QError::InvalidSweep(format!("axis '{name}' has no values")));
        }
        let parsed: Result<Vec<ParamValue>> = values.iter().map(json_to_param).collect();
        axes.push((name.clone(), parsed?));
    }
    if let Some(n) = spec.truncation {
        let has_axis = axes.iter().any(|(name, _)| name == "N");
        let takes_n = identity.params.iter().any(|p| p.name == "N");
        if takes_n && !has_axis {
            axes.push(("N".to_string(), vec![ParamValue::Int(n)]));
            axes.sort_by(|a, b| a.0.cmp(&b.0));
        } else if !takes_n {
            return Err(QError::InvalidSweep(format!(
                "identity '{}' has no truncation parameter",
                spec.identity
            )));
        }
    }

    let total: usize = axes.iter().map(|(_, v)| v.len()).product();
    let cap = spec.max_cases.unwrap_or(DEFAULT_MAX_CASES);
    if total > cap {
        return Err(QError::InvalidSweep(format!("grid has {total} cases, cap is {cap}")));
    }

    let cases: Vec<ParamMap> = (0..total)
        .map(|flat| {
            let mut index = flat;
            let mut params = ParamMap::new();
            // last axis fastest
            for (name, values) in axes.iter().rev() {
                params.insert(name.clone(), values[index % values.len()]);
                index /= values.len();
            }
            params
        })
        .collect();

    let evaluate = |params: &ParamMap| identity.run(params, spec.tol);
    let rows: Result<Vec<ResidualReport>> = if parallel {
        cases.par_iter().map(evaluate).collect()
    } else {
        cases.iter().map(evaluate).collect()
    };
    let rows = rows?;

    let mut summary = Summary {
        total: rows.len(),
        passed: 0,
        failed: 0,
        max_abs_residual: 0.0,
        argmax_case: CaseParams::new(),
    };
    for row in &rows {
        match row.status {
            Status::Pass => summary.passed += 1,
            Status::Fail => summary.failed += 1,
        }
        if row.abs_residual >= summary.max_abs_residual {
            summary.max_abs_residual = row.abs_residual;
            summary.argmax_case = row.case.clone();
        }
    }
    Ok(SweepResult { rows, summary })
}

fn flatten_case(case: &CaseParams) -> Vec<(String, String)> {
    let mut cols = Vec::new();
    for (name, value) in &case.0 {
        match value {
            ParamValue::Int(v) => cols.push((name.clone(), v.to_string())),
            ParamValue::Real(v) => cols.push((name.clone(), fmt_f64(*v))),
            ParamValue::Complex(v) => {
                cols.push((format!("{name}_re"), fmt_f64(v.re)));
                cols.push((format!("{name}_im"), fmt_f64(v.im)));
            }
        }
    }
    cols
}

/// Render rows as CSV. With `header`, a comment line carrying the generation
/// timestamp precedes the column row; the body below it is deterministic.
pub fn to_csv(rows: &[ResidualReport], header: bool) -> String {
    let mut out = String::new();
    if header {
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        out.push_str(&format!("# generated unix:{stamp}\n"));
    }
    if rows.is_empty() {
        return out;
    }
    let mut columns = vec!["identity".to_string()];
    columns.extend(flatten_case(&rows[0].case).into_iter().map(|(n, _)| n));
    columns.extend(
        ["lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_residual", "rel_residual", "tail_bound", "status"]
            .iter()
            .map(|s| s.to_string()),
    );
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let mut fields = vec![row.identity.clone()];
        fields.extend(flatten_case(&row.case).into_iter().map(|(_, v)| v));
        fields.push(fmt_f64(row.lhs.re));
        fields.push(fmt_f64(row.lhs.im));
        fields.push(fmt_f64(row.rhs.re));
        fields.push(fmt_f64(row.rhs.im));
        fields.push(fmt_f64(row.abs_residual));
        fields.push(fmt_f64(row.rel_residual));
        fields.push(fmt_f64(row.tail_bound()));
        fields.push(row.status.to_string());
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Render rows as a JSON array (deterministic field order).
pub fn to_json(rows: &[ResidualReport]) -> String {
    let mut items = Vec::with_capacity(rows.len());
    for row in rows {
        let mut obj = serde_json::Map::new();
        obj.insert("identity".into(), serde_json::Value::String(row.identity.clone()));
        let mut case = serde_json::Map::new();
        for (name, value) in flatten_case(&row.case) {
            case.insert(name, serde_json::Value::String(value));
        }
        obj.insert("case".into(), serde_json::Value::Object(case));
        for (key, v) in [
            ("lhs_re", row.lhs.re),
            ("lhs_im", row.lhs.im),
            ("rhs_re", row.rhs.re),
            ("rhs_im", row.rhs.im),
            ("abs_residual", row.abs_residual),
            ("rel_residual", row.rel_residual),
            ("tail_bound", row.tail_bound()),
        ] {
            obj.insert(key.into(), serde_json::Value::String(fmt_f64(v)));
        }
        obj.insert("status".into(), serde_json::Value::String(row.status.to_string()));
        if !row.flags.is_empty() {
            obj.insert(
                "flags".into(),
                serde_json::Value::Array(
                    row.flags.iter().map(|f| serde_json::Value::String(f.clone())).collect(),
                ),
            );
        }
        items.push(serde_json::Value::Object(obj));
    }
    serde_json::to_string_pretty(&serde_json::Value::Array(items)).expect("serializable")
}
