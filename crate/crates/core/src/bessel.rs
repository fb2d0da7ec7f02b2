//! Classical Bessel function of the first kind: the oracle the q-identities
//! are tested against in their q -> 1 limits.
//!
//! For |z| <= 9 the defining series
//!
//! ```text
//! J_nu(z) = sum_k (-1)^k (z/2)^{nu+2k} / (k! Gamma(nu+k+1))
//! ```
//!
//! is summed with the multiplicative term recurrence. Past that point the
//! alternating series cancels too much for an absolute 1e-12 target in f64, so
//! the integral representation
//!
//! ```text
//! J_nu(z) = (1/pi) int_0^pi cos(z sin t - nu t) dt
//!           - sin(nu pi)/pi int_0^inf e^{-z sinh t - nu t} dt,   z > 0,
//! ```
//!
//! is evaluated by Gauss-Legendre quadrature (the second integral vanishes for
//! integer nu). Both routes agree to ~1e-13 in the overlap and are
//! cross-checked in the tests.

use num_complex::Complex64;

use crate::context::{QContext, QError, Result};
use crate::gamma::gamma;
use crate::kahan::KahanSum;
use crate::quad::{integrate_adaptive, QuadratureGrid};

const SERIES_SWITCH: f64 = 9.0;

/// J_nu(z) for real order and real argument.
///
/// For negative non-integer nu the argument must be positive; negative
/// arguments are supported for integer orders via J_n(-z) = (-1)^n J_n(z).
pub fn bessel_j(nu: f64, z: f64, ctx: &QContext) -> Result<f64> {
    let nu_int = integer_order(nu);
    if z < 0.0 {
        return match nu_int {
            Some(n) => Ok(sign_pow(n) * bessel_j(nu, -z, ctx)?),
            None => Err(QError::DomainError(format!(
                "J_nu with non-integer nu = {nu} requires z >= 0, got {z}"
            ))),
        };
    }
    if let Some(n) = nu_int {
        if n < 0 {
            return Ok(sign_pow(n) * bessel_j(-nu, z, ctx)?);
        }
    }
    if z == 0.0 {
        return if nu == 0.0 {
            Ok(1.0)
        } else if nu > 0.0 {
            Ok(0.0)
        } else {
            Err(QError::DomainError(format!("J_nu(0) diverges for nu = {nu} < 0")))
        };
    }
    if nu < 0.0 && nu_int.is_none() && z == 0.0 {
        return Err(QError::DomainError("negative non-integer order needs z > 0".into()));
    }
    if z <= SERIES_SWITCH {
        series(nu, z, ctx.tol())
    } else {
        integral(nu, z, ctx.tol(), nu_int.is_some())
    }
}

fn integer_order(nu: f64) -> Option<i64> {
    if (nu - nu.round()).abs() < 1e-12 {
        Some(nu.round() as i64)
    } else {
        None
    }
}

fn sign_pow(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn series(nu: f64, z: f64, tol: f64) -> Result<f64> {
    let half = 0.5 * z;
    let t0 = half.powf(nu) / gamma(nu + 1.0)?;
    let mut acc = KahanSum::<f64>::new();
    let mut term = t0;
    let w = half * half;
    for k in 0..400 {
        acc.add(term);
        let kf = k as f64;
        let ratio = -w / ((kf + 1.0) * (nu + kf + 1.0));
        term *= ratio;
        if ratio.abs() < 0.5 && term.abs() < 1e-3 * tol {
            acc.add(term);
            return Ok(acc.value());
        }
    }
    Err(QError::CapExceeded { cap: 400, what: "Bessel series" })
}

fn integral(nu: f64, z: f64, tol: f64, integer: bool) -> Result<f64> {
    let pi = std::f64::consts::PI;
    // Oscillation count sets the starting order for the phase integral.
    let start = ((z + nu.abs()) * 2.0).max(64.0) as usize;
    let start = start.next_power_of_two().min(1024);
    let grid = QuadratureGrid::new(start, 4096, (tol * 0.05).max(1e-15))?;
    let osc = integrate_adaptive(
        |t| Complex64::new((z * t.sin() - nu * t).cos(), 0.0),
        0.0,
        pi,
        &grid,
    )?;
    let mut value = osc.value.re / pi;
    if !integer {
        // Truncate where z sinh T - nu T is ~46 below the peak.
        let mut t_max = (46.0f64 / z).asinh();
        for _ in 0..8 {
            t_max = ((46.0 + (nu.abs() + 1.0) * t_max) / z).asinh();
        }
        let decay_grid = QuadratureGrid::new(64, 1024, (tol * 0.05).max(1e-15))?;
        let decay = integrate_adaptive(
            |t| Complex64::new((-z * t.sinh() - nu * t).exp(), 0.0),
            0.0,
            t_max,
            &decay_grid,
        )?;
        value -= (nu * pi).sin() / pi * decay.value.re;
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> QContext {
        QContext::new(0.5).unwrap()
    }

    fn j_half(z: f64) -> f64 {
        (2.0 / (std::f64::consts::PI * z)).sqrt() * z.sin()
    }

    fn j_minus_half(z: f64) -> f64 {
        (2.0 / (std::f64::consts::PI * z)).sqrt() * z.cos()
    }

    fn j_three_half(z: f64) -> f64 {
        (2.0 / (std::f64::consts::PI * z)).sqrt() * (z.sin() / z - z.cos())
    }

    #[test]
    fn at_zero() {
        let ctx = ctx();
        assert_eq!(bessel_j(0.0, 0.0, &ctx).unwrap(), 1.0);
        assert_eq!(bessel_j(2.0, 0.0, &ctx).unwrap(), 0.0);
        assert_eq!(bessel_j(0.5, 0.0, &ctx).unwrap(), 0.0);
        assert_eq!(bessel_j(-3.0, 0.0, &ctx).unwrap(), 0.0);
        assert!(bessel_j(-0.5, 0.0, &ctx).is_err());
    }

    #[test]
    fn half_integer_closed_forms_small() {
        let ctx = ctx();
        let z = 1.3;
        assert!((bessel_j(0.5, z, &ctx).unwrap() - j_half(z)).abs() < 1e-12);
        assert!((bessel_j(-0.5, z, &ctx).unwrap() - j_minus_half(z)).abs() < 1e-12);
        assert!((bessel_j(1.5, z, &ctx).unwrap() - j_three_half(z)).abs() < 1e-12);
    }

    #[test]
    fn half_integer_closed_forms_large() {
        // exercises the quadrature route, including the non-integer decay term
        let ctx = ctx();
        for z in [12.0, 20.0, 31.4, 45.0, 50.0] {
            assert!(
                (bessel_j(0.5, z, &ctx).unwrap() - j_half(z)).abs() < 1e-12,
                "z = {z}"
            );
            assert!(
                (bessel_j(1.5, z, &ctx).unwrap() - j_three_half(z)).abs() < 1e-12,
                "z = {z}"
            );
        }
    }

    #[test]
    fn series_and_integral_agree_in_overlap() {
        for nu in [0.0, 0.7, 2.3, 5.0] {
            for z in [7.5, 8.5, 9.5, 10.5] {
                let s = series(nu, z, 1e-13).unwrap();
                let i = integral(nu, z, 1e-13, integer_order(nu).is_some()).unwrap();
                assert!((s - i).abs() < 5e-13, "nu={nu} z={z}: series {s} vs integral {i}");
            }
        }
    }

    #[test]
    fn negative_integer_order_reflects() {
        let ctx = ctx();
        let a = bessel_j(-3.0, 2.7, &ctx).unwrap();
        let b = bessel_j(3.0, 2.7, &ctx).unwrap();
        assert!((a + b).abs() < 1e-14);
    }

    #[test]
    fn negative_argument_integer_order() {
        let ctx = ctx();
        let a = bessel_j(2.0, -1.9, &ctx).unwrap();
        let b = bessel_j(2.0, 1.9, &ctx).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!(bessel_j(0.3, -1.0, &ctx).is_err());
    }

    #[test]
    fn three_term_recurrence() {
        // J_{nu-1}(z) + J_{nu+1}(z) = (2 nu / z) J_nu(z): independent structure check
        let ctx = ctx();
        for (nu, z) in [(1.7, 3.0), (1.7, 15.0), (4.5, 30.0), (2.0, 12.0)] {
            let lhs = bessel_j(nu - 1.0, z, &ctx).unwrap() + bessel_j(nu + 1.0, z, &ctx).unwrap();
            let rhs = 2.0 * nu / z * bessel_j(nu, z, &ctx).unwrap();
            assert!((lhs - rhs).abs() < 1e-12, "nu={nu} z={z}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn hansen_lommel_normalization() {
        // sum_n J_n(z)^2 = 1
        let ctx = ctx();
        for (z, range) in [(2.0, 40i64), (30.0, 90)] {
            let mut acc = KahanSum::<f64>::new();
            for n in -range..=range {
                let v = bessel_j(n as f64, z, &ctx).unwrap();
                acc.add(v * v);
            }
            assert!((acc.value() - 1.0).abs() < 1e-12, "z = {z}: {}", acc.value());
        }
    }
}
