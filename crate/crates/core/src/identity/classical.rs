//! Classical Bessel-side oracles: the Graf addition formula, its product
//! companion, and the Hansen-Lommel orthogonality. These pin down the targets
//! of the q -> 1 limit experiments.

use num_complex::Complex64;

use crate::bessel::bessel_j;
use crate::context::{QContext, QError, Result, SeriesValue};
use crate::gamma::ln_gamma;
use crate::kahan::KahanSum;
use crate::quad::{integrate_adaptive, QuadratureGrid};
use crate::report::{CaseParams, ResidualReport};

/// One instance of the classical Graf addition formula.
#[derive(Debug, Clone, Copy)]
pub struct GrafInstance {
    pub nu: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
}

impl GrafInstance {
    pub fn new(nu: f64, x: f64, y: f64, psi: f64) -> Self {
        Self { nu, x, y, psi }
    }

    fn is_integer_order(&self) -> bool {
        (self.nu - self.nu.round()).abs() < 1e-12
    }

    fn case_params(&self) -> CaseParams {
        CaseParams::new()
            .real("nu", self.nu)
            .real("x", self.x)
            .real("y", self.y)
            .real("psi", self.psi)
    }
}

/// Left member of the addition formula:
/// `J_nu(sqrt(x^2+y^2-2xy cos psi)) ((x - y e^{-i psi})/(x - y e^{i psi}))^{nu/2}`,
/// principal branch (the condition |y| < |x| keeps the ratio off the cut).
pub fn graf_lhs(inst: &GrafInstance, ctx: &QContext) -> Result<Complex64> {
    let disc = inst.x * inst.x + inst.y * inst.y - 2.0 * inst.x * inst.y * inst.psi.cos();
    if disc <= 0.0 {
        return Err(QError::BranchAmbiguity { discriminant: disc });
    }
    let r = disc.sqrt();
    let e = Complex64::from_polar(1.0, inst.psi);
    let u = Complex64::new(inst.x, 0.0) - inst.y * e.conj();
    let v = Complex64::new(inst.x, 0.0) - inst.y * e;
    let branch = (u / v).powc(Complex64::new(inst.nu / 2.0, 0.0));
    Ok(branch * bessel_j(inst.nu, r, ctx)?)
}

/// Residual of the addition formula against the partial bilateral sum
/// `sum_{|k| <= M} J_{nu+k}(x) J_k(y) e^{i k psi}`.
///
/// For non-integer nu the validity condition |y| < |x| is enforced; for
/// integer nu it is dropped.
pub fn graf_classical_residual(inst: &GrafInstance, m_trunc: usize, ctx: &QContext) -> Result<ResidualReport> {
    if !inst.is_integer_order() && inst.y.abs() >= inst.x.abs() {
        return Err(QError::DomainError(format!(
            "non-integer nu requires |y| < |x| (y = {}, x = {})",
            inst.y, inst.x
        )));
    }
    let lhs = SeriesValue::exact(graf_lhs(inst, ctx)?);

    let mut acc = KahanSum::<Complex64>::new();
    for k in -(m_trunc as i64)..=(m_trunc as i64) {
        let jk = bessel_j(inst.nu + k as f64, inst.x.abs(), ctx)?
            * x_sign_factor(inst.x, inst.nu + k as f64)?;
        let jy = bessel_j(k as f64, inst.y, ctx)?;
        acc.add(jk * jy * Complex64::from_polar(1.0, k as f64 * inst.psi));
    }
    // |J_k(y)| <= (|y|/2)^k / k!; the omitted wings are bounded by a few of
    // the first omitted magnitudes.
    let k1 = m_trunc as f64 + 1.0;
    let tail = 3.0 * ((inst.y.abs() / 2.0).max(1e-300).ln() * k1 - ln_gamma(k1 + 1.0)?).exp();
    let rhs = SeriesValue { value: acc.value(), tail_bound: tail, terms_used: 2 * m_trunc + 1 };

    Ok(ResidualReport::from_members(
        "graf",
        lhs,
        rhs,
        ctx.tol().max(1e-11),
        inst.case_params().int("M", m_trunc as i64),
    ))
}

fn x_sign_factor(x: f64, order: f64) -> Result<f64> {
    if x >= 0.0 {
        return Ok(1.0);
    }
    if (order - order.round()).abs() > 1e-12 {
        return Err(QError::DomainError("negative argument with non-integer order".into()));
    }
    Ok(if (order.round() as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 })
}

/// Residual of the classical product formula
///
/// ```text
/// J_{nu+m}(x) J_m(y) = (1/2pi) int_0^{2pi} J_nu(sqrt(x^2+y^2-2xy cos psi))
///                      ((x-ye^{-i psi})/(x-ye^{i psi}))^{nu/2} e^{-i m psi} d psi.
/// ```
pub fn graf_product_classical_residual(
    inst: &GrafInstance,
    m: i64,
    grid: &QuadratureGrid,
    ctx: &QContext,
) -> Result<ResidualReport> {
    if !inst.is_integer_order() && inst.y.abs() >= inst.x.abs() {
        return Err(QError::DomainError(format!(
            "non-integer nu requires |y| < |x| (y = {}, x = {})",
            inst.y, inst.x
        )));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let integral = integrate_adaptive(
        |psi| {
            let rotated = GrafInstance { psi, ..*inst };
            graf_lhs(&rotated, ctx).expect("integrand is regular on the circle")
                * Complex64::from_polar(1.0, -(m as f64) * psi)
        },
        0.0,
        two_pi,
        grid,
    )?;
    let rhs = SeriesValue {
        value: integral.value / two_pi,
        tail_bound: integral.tail_bound / two_pi,
        terms_used: integral.terms_used,
    };
    let lhs = SeriesValue::exact(Complex64::new(
        bessel_j(inst.nu + m as f64, inst.x, ctx)? * bessel_j(m as f64, inst.y, ctx)?,
        0.0,
    ));
    Ok(ResidualReport::from_members(
        "graf_product",
        lhs,
        rhs,
        ctx.tol().max(1e-10),
        inst.case_params().int("m", m),
    ))
}

/// Residual of the Hansen-Lommel orthogonality
/// `sum_k J_k(z) J_{k+p}(z) = delta_{0,p}` truncated at |k| <= M.
pub fn hansen_lommel_classical_residual(
    p: i64,
    z: f64,
    m_trunc: usize,
    ctx: &QContext,
) -> Result<ResidualReport> {
    let mut acc = KahanSum::<f64>::new();
    for k in -(m_trunc as i64)..=(m_trunc as i64) {
        acc.add(bessel_j(k as f64, z, ctx)? * bessel_j((k + p) as f64, z, ctx)?);
    }
    let lhs = SeriesValue {
        value: Complex64::new(acc.value(), 0.0),
        tail_bound: 1e-15,
        terms_used: 2 * m_trunc + 1,
    };
    let rhs = SeriesValue::exact(Complex64::new(if p == 0 { 1.0 } else { 0.0 }, 0.0));
    let case = CaseParams::new().int("p", p).real("z", z).int("M", m_trunc as i64);
    Ok(ResidualReport::from_members("hansen_lommel", lhs, rhs, ctx.tol().max(1e-12), case))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> QContext {
        QContext::new(0.5).unwrap()
    }

    #[test]
    fn graf_trivial_y_zero() {
        let ctx = ctx();
        let inst = GrafInstance::new(0.7, 1.5, 0.0, 1.0);
        let rep = graf_classical_residual(&inst, 10, &ctx).unwrap();
        assert!(rep.abs_residual < 1e-13, "{rep:?}");
        let j = bessel_j(0.7, 1.5, &ctx).unwrap();
        assert!((rep.lhs - Complex64::new(j, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn graf_reference_case() {
        let ctx = ctx();
        let inst = GrafInstance::new(0.5, 2.0, 0.5, 1.0);
        let rep = graf_classical_residual(&inst, 40, &ctx).unwrap();
        assert!(rep.passed() && rep.abs_residual < 1e-11, "{rep:?}");
    }

    #[test]
    fn graf_integer_order_without_condition() {
        // |y| > |x| is fine for integer nu
        let ctx = ctx();
        let inst = GrafInstance::new(-3.0, 1.0, 2.0, 2.0);
        let rep = graf_classical_residual(&inst, 60, &ctx).unwrap();
        assert!(rep.passed() && rep.abs_residual < 1e-10, "{rep:?}");
        // but rejected for non-integer nu
        let inst = GrafInstance::new(0.5, 1.0, 2.0, 2.0);
        assert!(graf_classical_residual(&inst, 40, &ctx).is_err());
    }

    #[test]
    fn graf_branch_ambiguity_flagged() {
        let ctx = ctx();
        // x = y, psi = 0: discriminant 0 (integer order, so the |y| < |x|
        // gate does not mask the branch check)
        let inst = GrafInstance::new(2.0, 1.0, 1.0, 0.0);
        assert!(matches!(
            graf_classical_residual(&inst, 10, &ctx),
            Err(QError::BranchAmbiguity { .. })
        ));
    }

    #[test]
    fn graf_product_trivial_and_reference() {
        let ctx = ctx();
        let grid = QuadratureGrid::new(32, 1024, 1e-12).unwrap();
        let inst = GrafInstance::new(0.7, 1.5, 0.0, 0.0);
        let rep = graf_product_classical_residual(&inst, 0, &grid, &ctx).unwrap();
        assert!(rep.abs_residual < 1e-11, "y=0: {rep:?}");

        let inst = GrafInstance::new(0.5, 2.0, 0.5, 0.0);
        let rep = graf_product_classical_residual(&inst, 1, &grid, &ctx).unwrap();
        assert!(rep.passed() && rep.abs_residual < 1e-10, "{rep:?}");

        let inst = GrafInstance::new(2.0, 1.5, 0.7, 0.0);
        let rep = graf_product_classical_residual(&inst, -1, &grid, &ctx).unwrap();
        assert!(rep.passed() && rep.abs_residual < 1e-10, "m=-1: {rep:?}");
    }

    #[test]
    fn hansen_lommel_cases() {
        let ctx = ctx();
        for p in 0..=3i64 {
            for z in [0.5, 1.5, 3.0] {
                let rep = hansen_lommel_classical_residual(p, z, 40, &ctx).unwrap();
                assert!(rep.abs_residual < 1e-12, "p={p} z={z}: {rep:?}");
            }
        }
    }
}
