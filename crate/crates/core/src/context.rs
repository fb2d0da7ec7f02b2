//! Evaluation context, series results, and the crate-wide error type.

use std::fmt;

use num_complex::Complex64;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, QError>;

/// Errors raised by series evaluation, quadrature, and the identity checkers.
#[derive(Debug, Clone, PartialEq)]
pub enum QError {
    /// A constructor argument violated its domain (bad `q`, tolerance, cap, ...).
    InvalidParameter(String),
    /// A lower parameter of a basic hypergeometric series equals `q^{-k}` and the
    /// series was not routed through the regularized evaluator.
    PoleInLowerParameter { parameter: Complex64, pole_index: u32 },
    /// The series does not converge for the given parameters and argument.
    NonConvergent(String),
    /// A series or infinite product did not reach its tolerance within the
    /// context's term/factor cap.
    CapExceeded { cap: usize, what: &'static str },
    /// Order doubling hit the maximum quadrature order without the requested
    /// agreement between successive estimates.
    DoublingCapExceeded { max_order: usize, last_change: f64 },
    /// The q-gamma (or gamma) function was evaluated at a nonpositive integer.
    PoleAtNonpositiveInteger(f64),
    /// A prefactor of the form `a^{-n}` (or a division) requires a nonzero parameter.
    ZeroParameter(&'static str),
    /// An input lies outside the range an operation supports.
    DomainError(String),
    /// The square root in the classical addition formula has an ambiguous branch.
    BranchAmbiguity { discriminant: f64 },
    /// An identity name not present in the registry.
    UnknownIdentity(String),
    /// A sweep specification failed validation.
    InvalidSweep(String),
}

impl fmt::Display for QError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            QError::PoleInLowerParameter { parameter, pole_index } => write!(
                f,
                "lower parameter {parameter} equals q^-{pole_index}: series is not defined \
                 (use the regularized evaluator)"
            ),
            QError::NonConvergent(msg) => write!(f, "series does not converge: {msg}"),
            QError::CapExceeded { cap, what } => {
                write!(f, "{what} did not converge within the cap of {cap}")
            }
            QError::DoublingCapExceeded { max_order, last_change } => write!(
                f,
                "quadrature not converged at order {max_order} (last change {last_change:.3e})"
            ),
            QError::PoleAtNonpositiveInteger(x) => {
                write!(f, "pole at nonpositive integer argument {x}")
            }
            QError::ZeroParameter(what) => write!(f, "parameter {what} must be nonzero"),
            QError::DomainError(msg) => write!(f, "domain error: {msg}"),
            QError::BranchAmbiguity { discriminant } => write!(
                f,
                "branch ambiguity: x^2 + y^2 - 2xy cos(psi) = {discriminant:.3e} <= 0"
            ),
            QError::UnknownIdentity(name) => write!(f, "unknown identity '{name}'"),
            QError::InvalidSweep(msg) => write!(f, "invalid sweep spec: {msg}"),
        }
    }
}

impl std::error::Error for QError {}

/// Evaluation context threaded through every series, product, and quadrature.
///
/// Holds the base `q` (strictly inside (0,1)), the target absolute accuracy,
/// and the truncation caps for series and infinite products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QContext {
    q: f64,
    tol: f64,
    max_terms: usize,
    max_product_factors: usize,
}

impl QContext {
    /// Default target absolute accuracy.
    pub const DEFAULT_TOL: f64 = 1e-12;
    /// Default cap on series terms.
    pub const DEFAULT_MAX_TERMS: usize = 10_000;
    /// Default cap on infinite-product factors.
    pub const DEFAULT_MAX_PRODUCT_FACTORS: usize = 20_000;

    /// Create a context for base `q`. Requires `0 < q < 1` strictly.
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(QError::InvalidParameter(format!(
                "q must satisfy 0 < q < 1, got {q}"
            )));
        }
        Ok(Self {
            q,
            tol: Self::DEFAULT_TOL,
            max_terms: Self::DEFAULT_MAX_TERMS,
            max_product_factors: Self::DEFAULT_MAX_PRODUCT_FACTORS,
        })
    }

    /// Replace the target accuracy. Must be positive.
    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(QError::InvalidParameter(format!("tol must be > 0, got {tol}")));
        }
        self.tol = tol;
        Ok(self)
    }

    /// Replace the series-term cap. Must be at least 1.
    pub fn with_max_terms(mut self, cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(QError::InvalidParameter("max_terms must be >= 1".into()));
        }
        self.max_terms = cap;
        Ok(self)
    }

    /// Replace the infinite-product factor cap. Must be at least 1.
    pub fn with_max_product_factors(mut self, cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(QError::InvalidParameter(
                "max_product_factors must be >= 1".into(),
            ));
        }
        self.max_product_factors = cap;
        Ok(self)
    }

    /// The base q.
    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Target absolute accuracy.
    #[inline]
    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Series-term cap.
    #[inline]
    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// Infinite-product factor cap.
    #[inline]
    pub fn max_product_factors(&self) -> usize {
        self.max_product_factors
    }
}

/// Value of a truncated infinite sum or product.
///
/// `tail_bound` is an upper bound on the modulus of the omitted remainder under
/// the truncation rule documented at the computation site; `terms_used` counts
/// the summed terms (or multiplied factors).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms_used: usize,
}

impl SeriesValue {
    /// An exactly known value: zero tail.
    pub fn exact(value: Complex64) -> Self {
        Self { value, tail_bound: 0.0, terms_used: 0 }
    }

    /// Multiply two truncated values, combining tail bounds:
    /// |ab' - a'b'| <= |a| tb + |b| ta + ta tb.
    pub fn mul(&self, other: &SeriesValue) -> SeriesValue {
        SeriesValue {
            value: self.value * other.value,
            tail_bound: self.value.norm() * other.tail_bound
                + other.value.norm() * self.tail_bound
                + self.tail_bound * other.tail_bound,
            terms_used: self.terms_used.max(other.terms_used),
        }
    }

    /// Scale by an exactly known complex factor.
    pub fn scale(&self, factor: Complex64) -> SeriesValue {
        SeriesValue {
            value: self.value * factor,
            tail_bound: self.tail_bound * factor.norm(),
            terms_used: self.terms_used,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_rejects_bad_q() {
        assert!(QContext::new(0.0).is_err());
        assert!(QContext::new(1.0).is_err());
        assert!(QContext::new(-0.5).is_err());
        assert!(QContext::new(f64::NAN).is_err());
        assert!(QContext::new(0.5).is_ok());
    }

    #[test]
    fn context_rejects_bad_tol_and_caps() {
        let ctx = QContext::new(0.5).unwrap();
        assert!(ctx.with_tol(0.0).is_err());
        assert!(ctx.with_tol(-1e-9).is_err());
        assert!(ctx.with_max_terms(0).is_err());
        assert!(ctx.with_max_product_factors(0).is_err());
        let ctx = ctx.with_tol(1e-10).unwrap().with_max_terms(5).unwrap();
        assert_eq!(ctx.tol(), 1e-10);
        assert_eq!(ctx.max_terms(), 5);
    }
}
