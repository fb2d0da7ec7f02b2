//! Residual reports: the crate's fundamental verification record.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::context::SeriesValue;

/// Pass/fail status of a residual check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => write!(f, "pass"),
            Status::Fail => write!(f, "fail"),
        }
    }
}

/// One parameter of a verification case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Complex(Complex64),
}

impl ParamValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Int(v) => Some(*v as f64),
            ParamValue::Real(v) => Some(*v),
            ParamValue::Complex(v) if v.im == 0.0 => Some(v.re),
            ParamValue::Complex(_) => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            ParamValue::Int(v) => Some(*v),
            ParamValue::Real(v) if (v - v.round()).abs() < 1e-9 => Some(v.round() as i64),
            _ => None,
        }
    }

    pub fn as_complex(&self) -> Complex64 {
        match self {
            ParamValue::Int(v) => Complex64::new(*v as f64, 0.0),
            ParamValue::Real(v) => Complex64::new(*v, 0.0),
            ParamValue::Complex(v) => *v,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Real(v) => write!(f, "{v}"),
            ParamValue::Complex(v) => {
                if v.im >= 0.0 {
                    write!(f, "{}+{}i", v.re, v.im)
                } else {
                    write!(f, "{}{}i", v.re, v.im)
                }
            }
        }
    }
}

/// Ordered parameter list of one verification case.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CaseParams(pub Vec<(String, ParamValue)>);

impl CaseParams {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn push(mut self, name: &str, value: ParamValue) -> Self {
        self.0.push((name.to_string(), value));
        self
    }

    pub fn int(self, name: &str, v: i64) -> Self {
        self.push(name, ParamValue::Int(v))
    }

    pub fn real(self, name: &str, v: f64) -> Self {
        self.push(name, ParamValue::Real(v))
    }

    pub fn complex(self, name: &str, v: Complex64) -> Self {
        self.push(name, ParamValue::Complex(v))
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

impl fmt::Display for CaseParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, value) in &self.0 {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{name}={value}")?;
            first = false;
        }
        Ok(())
    }
}

/// The outcome of evaluating one identity at one parameter tuple: both members,
/// the residual, the tolerance in force, and the internal truncation tails.
///
/// `status` is `Pass` iff `abs_residual <= tol_used + tail_lhs + tail_rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub identity: String,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tol_used: f64,
    pub tail_lhs: f64,
    pub tail_rhs: f64,
    pub status: Status,
    /// Domain annotations (e.g. a polynomial parameter outside the unit disc).
    pub flags: Vec<String>,
    pub case: CaseParams,
}

impl ResidualReport {
    pub fn from_members(
        identity: &str,
        lhs: SeriesValue,
        rhs: SeriesValue,
        tol: f64,
        case: CaseParams,
    ) -> Self {
        let abs_residual = (lhs.value - rhs.value).norm();
        let scale = lhs.value.norm().max(rhs.value.norm());
        let rel_residual = if scale > 0.0 { abs_residual / scale } else { 0.0 };
        let status = if abs_residual <= tol + lhs.tail_bound + rhs.tail_bound {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            identity: identity.to_string(),
            lhs: lhs.value,
            rhs: rhs.value,
            abs_residual,
            rel_residual,
            tol_used: tol,
            tail_lhs: lhs.tail_bound,
            tail_rhs: rhs.tail_bound,
            status,
            flags: Vec::new(),
            case,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn with_flag(mut self, flag: impl Into<String>) -> Self {
        self.flags.push(flag.into());
        self
    }

    /// Combined truncation tail of both members.
    pub fn tail_bound(&self) -> f64 {
        self.tail_lhs + self.tail_rhs
    }
}

/// Round-trip-safe float formatting (17 significant digits, scientific).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
