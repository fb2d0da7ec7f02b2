//! Numerical basic hypergeometric series, Al-Salam-Chihara / q-Charlier /
//! q-Laguerre polynomials, and a residual-based verification harness for the
//! addition and product formulas that tie them to the classical Bessel world.
//!
//! Layout:
//! - [`context`]: evaluation context ([`QContext`]), truncated results
//!   ([`SeriesValue`]), errors
//! - [`series`]: q-shifted factorials and the general `_r phi_s` evaluator,
//!   including the regularized series for lower parameter `q^{1-n}`
//! - [`gamma`], [`bessel`]: the classical oracles (gamma, q-gamma, J_nu)
//! - [`quad`]: Gauss-Legendre quadrature with order doubling
//! - [`poly`]: orthogonal-polynomial evaluators
//! - [`ortho`]: the Askey-Wilson-type weight and the integral/discrete
//!   orthogonality residuals
//! - [`identity`]: residual checkers for every supported identity, plus
//!   numerical limit experiments
//! - [`report`], [`registry`], [`sweep`]: verification reports, the identity
//!   registry, and the parameter-grid sweep engine behind the CLI

pub mod bessel;
pub mod context;
pub mod gamma;
pub mod identity;
pub mod kahan;
pub mod ortho;
pub mod poly;
pub mod quad;
pub mod registry;
pub mod report;
pub mod series;
pub mod sweep;

pub use bessel::bessel_j;
pub use context::{QContext, QError, Result, SeriesValue};
pub use gamma::qgamma;
pub use poly::{AscParams, CharlierParams, SpectralPoint};
pub use quad::QuadratureGrid;
pub use report::{ResidualReport, Status};

pub use num_complex::Complex64;
