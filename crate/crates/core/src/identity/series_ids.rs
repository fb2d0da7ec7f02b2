//! Residual checkers for the pure series identities: the product-of-series
//! expansion lemma, the terminating 3phi2 inversion, the b -> 0 Heine
//! transformation, and the 1phi1 index-shift identity.

use num_complex::Complex64;

use crate::context::{QContext, QError, Result, SeriesValue};
use crate::kahan::KahanSum;
use crate::report::{CaseParams, ResidualReport};
use crate::series::{
    phi, phi_prefactored, qpoch_finite, qpoch_ratio, HypergeometricSpec,
};

/// Residual of the expansion lemma, for |dz| < 1:
///
/// ```text
/// [(q^{mu+1};q)_inf/(q;q)_inf  _1 phi_1 (a; q^{mu+1}; q, bz)]
/// * [(q^{nu+1};q)_inf/(q;q)_inf  _2 phi_1 (c, 0; q^{nu+1}; q, dz)]
/// = (q^{nu+1};q)_inf/(q;q)_inf sum_p (dz)^p (c;q)_p / ((q, q^{nu+1};q)_p)
///   * (q^{mu+1};q)_inf/(q;q)_inf
///     _3 phi_2 (q^{-p}, q^{-p-nu}, a; q^{mu+1}, q^{1-p}/c; q, b q^{nu+p+1}/(dc)).
/// ```
#[allow(clippy::too_many_arguments)]
pub fn lemma2_residual(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    z: Complex64,
    mu: f64,
    nu: f64,
    ctx: &QContext,
) -> Result<ResidualReport> {
    let q = ctx.q();
    if (d * z).norm() >= 1.0 {
        return Err(QError::DomainError(format!(
            "the lemma requires |dz| < 1, got {:.6}",
            (d * z).norm()
        )));
    }
    if c.norm() == 0.0 || d.norm() == 0.0 {
        return Err(QError::ZeroParameter("c and d (the inner argument divides by dc)"));
    }

    let lhs = phi_prefactored(&[a], mu + 1.0, &[], b * z, ctx)?.mul(&phi_prefactored(
        &[c, Complex64::new(0.0, 0.0)],
        nu + 1.0,
        &[],
        d * z,
        ctx,
    )?);

    // Outer sum over p with multiplicative weight update.
    let outer_pre = qpoch_ratio(&[Complex64::new(q.powf(nu + 1.0), 0.0)], &[Complex64::new(q, 0.0)], ctx)?;
    let inner_arg_base = b * q.powf(nu + 1.0) / (d * c);
    let mut acc = KahanSum::<Complex64>::new();
    let mut weight = Complex64::new(1.0, 0.0); // (dz)^p (c;q)_p / ((q, q^{nu+1};q)_p)
    let mut inner_tails = 0.0f64;
    let mut small_run = 0usize;
    let mut term_mag;
    let mut p = 0usize;
    loop {
        let inner = phi_prefactored(
            &[
                Complex64::new(q.powi(-(p as i32)), 0.0),
                Complex64::new(q.powf(-(p as f64) - nu), 0.0),
                a,
            ],
            mu + 1.0,
            &[Complex64::new(q.powi(1 - p as i32), 0.0) / c],
            inner_arg_base * q.powi(p as i32),
            ctx,
        )?;
        let term = weight * inner.value;
        acc.add(term);
        inner_tails += weight.norm() * inner.tail_bound;
        term_mag = term.norm();
        if term_mag < ctx.tol() * acc.value().norm().max(1.0) {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
        if p + 1 >= ctx.max_terms() {
            return Err(QError::CapExceeded { cap: ctx.max_terms(), what: "lemma outer sum" });
        }
        weight *= d * z * (Complex64::new(1.0, 0.0) - c * q.powi(p as i32))
            / ((1.0 - q.powi(p as i32 + 1)) * (1.0 - q.powf(nu + 1.0 + p as f64)));
        p += 1;
    }
    let rho = (d * z).norm();
    let trunc_tail = term_mag * rho / (1.0 - rho);
    let sum = SeriesValue {
        value: acc.value(),
        tail_bound: inner_tails + trunc_tail,
        terms_used: p + 1,
    };
    let rhs = outer_pre.mul(&sum);

    let case = CaseParams::new()
        .complex("a", a)
        .complex("b", b)
        .complex("c", c)
        .complex("d", d)
        .complex("z", z)
        .real("mu", mu)
        .real("nu", nu)
        .real("q", q);
    Ok(ResidualReport::from_members("lemma2", lhs, rhs, ctx.tol().max(1e-11), case))
}

/// Residual of the terminating 3phi2 inversion
///
/// ```text
/// _3 phi_2 (q^{-p}, a, b; c, d; q, z)
/// = (a, b;q)_p / (c, d;q)_p (-z)^p q^{-p(p+1)/2}
///   _3 phi_2 (q^{-p}, q^{1-p}/c, q^{1-p}/d; q^{1-p}/a, q^{1-p}/b; q, c d q^{p+1}/(a b z)).
/// ```
///
/// (The reversal of the finite sum; the denominator pair is (c, d;q)_p.)
#[allow(clippy::too_many_arguments)]
pub fn series_inversion_residual(
    p: usize,
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    z: Complex64,
    ctx: &QContext,
) -> Result<ResidualReport> {
    let q = ctx.q();
    if (a * b * z).norm() == 0.0 {
        return Err(QError::ZeroParameter("a, b, z (the inverted argument divides by abz)"));
    }
    let qp = Complex64::new(q.powi(-(p as i32)), 0.0);
    let lhs = phi(&HypergeometricSpec::new(vec![qp, a, b], vec![c, d], z), ctx)?;

    let q1p = q.powi(1 - p as i32);
    let inverted = phi(
        &HypergeometricSpec::new(
            vec![qp, q1p / c, q1p / d],
            vec![q1p / a, q1p / b],
            c * d * q.powi(p as i32 + 1) / (a * b * z),
        ),
        ctx,
    )?;
    let prefactor = qpoch_finite(a, ctx, p) * qpoch_finite(b, ctx, p)
        / (qpoch_finite(c, ctx, p) * qpoch_finite(d, ctx, p))
        * (-z).powi(p as i32)
        * q.powi(-((p * (p + 1) / 2) as i32));
    let rhs = inverted.scale(prefactor);

    let case = CaseParams::new()
        .int("p", p as i64)
        .complex("a", a)
        .complex("b", b)
        .complex("c", c)
        .complex("d", d)
        .complex("z", z)
        .real("q", q);
    Ok(ResidualReport::from_members("inversion", lhs, rhs, ctx.tol().max(1e-12), case))
}

/// Residual of the b -> 0 limit of Heine's transformation:
///
/// ```text
/// _2 phi_1 (a, 0; c; q, z) = (z;q)_inf^{-1}  _1 phi_1 (c/a; c; q, az).
/// ```
pub fn heine_b0_residual(a: Complex64, c: Complex64, z: Complex64, ctx: &QContext) -> Result<ResidualReport> {
    let q = ctx.q();
    if a.norm() == 0.0 {
        return Err(QError::ZeroParameter("a (the transformed series divides by a)"));
    }
    if z.norm() >= 1.0 {
        return Err(QError::DomainError(format!("requires |z| < 1, got {:.6}", z.norm())));
    }
    let lhs = phi(
        &HypergeometricSpec::new(vec![a, Complex64::new(0.0, 0.0)], vec![c], z),
        ctx,
    )?;
    let inv = qpoch_ratio(&[], &[z], ctx)?;
    let series = phi(&HypergeometricSpec::new(vec![c / a], vec![c], a * z), ctx)?;
    let rhs = inv.mul(&series);
    let case = CaseParams::new()
        .complex("a", a)
        .complex("c", c)
        .complex("z", z)
        .real("q", q);
    Ok(ResidualReport::from_members("heine0", lhs, rhs, ctx.tol().max(1e-12), case))
}

/// Residual of the 1phi1 index-shift identity, valid for every integer n:
///
/// ```text
/// (q^{1-n};q)_inf/(q;q)_inf  _1 phi_1 (a; q^{1-n}; q, z)
/// = z^n (-1)^n q^{n(n-1)/2} (a, q^{1+n};q)_inf / ((a q^n, q;q)_inf)
///   _1 phi_1 (a q^n; q^{1+n}; q, z q^n),
/// ```
///
/// both sides taken in the regularized sense on their singular side.
pub fn one_phi_one_shift_residual(
    a: Complex64,
    z: Complex64,
    n: i64,
    ctx: &QContext,
) -> Result<ResidualReport> {
    let q = ctx.q();
    if z.norm() == 0.0 && n != 0 {
        return Err(QError::ZeroParameter("z (the shifted side carries z^n)"));
    }
    let lhs = phi_prefactored(&[a], 1.0 - n as f64, &[], z, ctx)?;

    let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let scalar = z.powi(n as i32) * sign * q.powi((n * (n - 1) / 2) as i32);
    let products = qpoch_ratio(&[a], &[a * q.powf(n as f64)], ctx)?;
    let series = phi_prefactored(&[a * q.powf(n as f64)], 1.0 + n as f64, &[], z * q.powf(n as f64), ctx)?;
    let rhs = products.mul(&series).scale(scalar);

    let case = CaseParams::new()
        .complex("a", a)
        .complex("z", z)
        .int("n", n)
        .real("q", q);
    Ok(ResidualReport::from_members("one_phi_one_shift", lhs, rhs, ctx.tol().max(1e-11), case))
}
