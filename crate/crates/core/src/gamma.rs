//! Gamma functions: the classical gamma (self-contained, used by the Bessel
//! oracle) and the q-gamma function.

use crate::context::{QContext, QError, Result};

// Bernoulli numbers B_2..B_14 for the Stirling series of ln Gamma.
const STIRLING_COEFFS: [f64; 7] = [
    1.0 / 12.0,               // B_2 / (2*1)
    -1.0 / 360.0,             // B_4 / (4*3)
    1.0 / 1260.0,             // B_6 / (6*5)
    -1.0 / 1680.0,            // B_8 / (8*7)
    1.0 / 1188.0,             // B_10 / (10*9)
    -691.0 / 360_360.0,       // B_12 / (12*11)
    1.0 / 156.0,              // B_14 / (14*13)
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_74;

/// ln Gamma(x) for x > 0.
///
/// Stirling's series at an argument shifted above 12; the shift is undone with
/// exact divisions. Relative accuracy is a few ulp on [0.5, 50].
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(QError::DomainError(format!("ln_gamma requires x > 0, got {x}")));
    }
    let mut shift = 0.0f64;
    let mut y = x;
    while y < 12.0 {
        shift += y.ln();
        y += 1.0;
    }
    let mut series = 0.0;
    let y2 = y * y;
    let mut ypow = y;
    for coeff in STIRLING_COEFFS {
        series += coeff / ypow;
        ypow *= y2;
    }
    Ok((y - 0.5) * y.ln() - y + LN_SQRT_2PI + series - shift)
}

/// Gamma(x) for real x, poles at the nonpositive integers.
///
/// Reflection handles x < 0.5: Gamma(x) Gamma(1-x) = pi / sin(pi x).
pub fn gamma(x: f64) -> Result<f64> {
    if x < 0.5 {
        if is_nonpositive_integer(x) {
            return Err(QError::PoleAtNonpositiveInteger(x));
        }
        let s = sin_pi(x);
        return Ok(std::f64::consts::PI / (s * gamma(1.0 - x)?));
    }
    Ok(ln_gamma(x)?.exp())
}

/// sin(pi x) computed from the reduced argument, accurate for large |x|.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    (std::f64::consts::PI * r).sin()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 1e-12 && (x - x.round()).abs() < 1e-12
}

/// The q-gamma function
///
/// ```text
/// Gamma_q(x) = (q;q)_inf (q^x;q)_inf^{-1} (1-q)^{1-x},
/// ```
///
/// which tends to Gamma(x) as q -> 1. Poles at the nonpositive integers,
/// where (q^x;q)_inf vanishes.
///
/// Both infinite products underflow long before q reaches 1 (they shrink like
/// exp(-pi^2/(6(1-q)))), so the ratio is accumulated as a sum of log
/// differences, factor by factor. For x > 0 every factor is positive; for
/// x < 0 the finitely many negative factors 1 - q^{x+i} are split off first.
pub fn qgamma(x: f64, ctx: &QContext) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(QError::PoleAtNonpositiveInteger(x));
    }
    let q = ctx.q();
    let tol = ctx.tol();
    let mut log_ratio = 0.0f64;
    let mut sign = 1.0f64;
    let mut qi = 1.0f64; // q^i
    let mut i = 0usize;
    loop {
        // tail rule as for the infinite product, driven by the larger factor
        let mag = qi * q.max(q.powf(x));
        if mag / (1.0 - q) < tol && 1.0 - q - mag > 0.0 {
            break;
        }
        if i >= ctx.max_product_factors() {
            return Err(QError::CapExceeded {
                cap: ctx.max_product_factors(),
                what: "q-gamma product",
            });
        }
        let num = 1.0 - qi * q;
        let den = 1.0 - qi * q.powf(x);
        if den == 0.0 {
            return Err(QError::PoleAtNonpositiveInteger(x));
        }
        if den < 0.0 {
            sign = -sign;
        }
        log_ratio += num.ln() - den.abs().ln();
        qi *= q;
        i += 1;
    }
    Ok(sign * (log_ratio + (1.0 - x) * (1.0 - q).ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_matches_factorials() {
        let mut fact = 1.0f64;
        for n in 1..=20u32 {
            // Gamma(n) = (n-1)!
            let g = gamma(n as f64).unwrap();
            assert!(
                (g - fact).abs() <= 1e-13 * fact,
                "Gamma({n}) = {g}, expected {fact}"
            );
            fact *= n as f64;
        }
    }

    #[test]
    fn gamma_at_half_integers() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((gamma(0.5).unwrap() - sqrt_pi).abs() < 1e-14);
        assert!((gamma(1.5).unwrap() - 0.5 * sqrt_pi).abs() < 1e-14);
        assert!((gamma(2.5).unwrap() - 0.75 * sqrt_pi).abs() < 1e-14);
        // Gamma(-0.5) = -2 sqrt(pi)
        assert!((gamma(-0.5).unwrap() + 2.0 * sqrt_pi).abs() < 1e-13 * 2.0 * sqrt_pi);
    }

    #[test]
    fn gamma_functional_equation_on_range() {
        // Gamma(x+1) = x Gamma(x) across [0.5, 50].
        let mut x = 0.5;
        while x < 50.0 {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-13 * lhs.abs(),
                "x = {x}: {lhs} vs {rhs}"
            );
            x += 0.7;
        }
    }

    #[test]
    fn gamma_rejects_poles() {
        for x in [0.0, -1.0, -2.0, -7.0] {
            assert!(matches!(gamma(x), Err(QError::PoleAtNonpositiveInteger(_))));
        }
    }

    #[test]
    fn qgamma_at_one_and_two() {
        let ctx = QContext::new(0.5).unwrap();
        assert!((qgamma(1.0, &ctx).unwrap() - 1.0).abs() < 1e-11);
        assert!((qgamma(2.0, &ctx).unwrap() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn qgamma_functional_equation() {
        // Gamma_q(x+1) = (1-q^x)/(1-q) Gamma_q(x)
        let ctx = QContext::new(0.37).unwrap();
        for x in [0.3, 1.7, 4.2] {
            let lhs = qgamma(x + 1.0, &ctx).unwrap();
            let rhs = (1.0 - ctx.q().powf(x)) / (1.0 - ctx.q()) * qgamma(x, &ctx).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs());
        }
    }

    #[test]
    fn qgamma_classical_limit_at_half() {
        // Gamma_q(1/2) -> sqrt(pi) as q -> 1.
        let ctx = QContext::new(0.999)
            .unwrap()
            .with_tol(1e-9)
            .unwrap()
            .with_max_product_factors(200_000)
            .unwrap();
        let v = qgamma(0.5, &ctx).unwrap();
        let target = gamma(0.5).unwrap();
        assert!((v - target).abs() < 5e-3, "Gamma_q(0.5) = {v}, Gamma(0.5) = {target}");
    }

    #[test]
    fn qgamma_rejects_poles() {
        let ctx = QContext::new(0.5).unwrap();
        for x in [0.0, -1.0, -3.0] {
            assert!(matches!(qgamma(x, &ctx), Err(QError::PoleAtNonpositiveInteger(_))));
        }
    }
}
