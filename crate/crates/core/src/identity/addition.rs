//! The q-analogue addition formula and its product (Fourier-coefficient)
//! companion.
//!
//! Addition formula, valid for |z| < 1, |a| < 1, |b| < 1:
//!
//! ```text
//! (q^{nu+1};q)_inf/(q;q)_inf  _2 phi_1 (a xi, a/xi; q^{nu+1}; q, z)
//!     * S_m(x; a q^{-nu}, b)
//! = sum_{n=-m}^{inf} (-1)^n a^n z^n q^{n(n-1)/2}
//!     * Phi_1(n) * Phi_2(n) * S_{n+m}(x; a, b)
//! ```
//!
//! with
//!
//! ```text
//! Phi_1(n) = (q^{1+n};q)_inf/(q;q)_inf  _1 phi_1 (q^{-m}; q^{1+n}; q, a^2 q^{m+n-nu} z)
//! Phi_2(n) = (q^{nu+n+1};q)_inf/(q;q)_inf  _2 phi_1 (a b q^{n+m}, 0; q^{nu+n+1}; q, z)
//! ```
//!
//! Negative-index factors always route through the regularized series; the
//! combination z^n Phi_1(n) is assembled so that it stays finite down to z = 0.
//!
//! The product formula divides the n-th expansion coefficient by the squared
//! norm of S_{n+m} and expresses it as the weight integral of the left member
//! against S_{n+m}.

use num_complex::Complex64;

use crate::context::{QContext, QError, Result, SeriesValue};
use crate::kahan::KahanSum;
use crate::ortho::weight_core;
use crate::poly::{asc_sequence, AscParams, SpectralPoint};
use crate::quad::QuadratureGrid;
use crate::report::{CaseParams, ResidualReport};
use crate::series::{phi, phi_prefactored, qpoch_finite, qpoch_infinite, qpoch_ratio, HypergeometricSpec};

/// One instance of the addition/product formula.
#[derive(Debug, Clone, Copy)]
pub struct AdditionCase {
    pub a: Complex64,
    pub b: Complex64,
    pub z: Complex64,
    pub nu: f64,
    pub m: usize,
    pub point: SpectralPoint,
    /// Allow nu <= -1 (poles of q^{nu+n+1} are then screened per evaluation).
    pub extended_nu: bool,
}

impl AdditionCase {
    pub fn new(a: Complex64, b: Complex64, z: Complex64, nu: f64, m: usize, point: SpectralPoint) -> Self {
        Self { a, b, z, nu, m, point, extended_nu: false }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("z", self.z)] {
            if v.norm() >= 1.0 {
                return Err(QError::DomainError(format!(
                    "addition formula requires |{name}| < 1, got {:.6}",
                    v.norm()
                )));
            }
        }
        if !self.extended_nu && self.nu <= -1.0 {
            return Err(QError::DomainError(format!(
                "nu must exceed -1 (got {}); set extended_nu to override",
                self.nu
            )));
        }
        Ok(())
    }

    fn case_params(&self, q: f64) -> CaseParams {
        CaseParams::new()
            .real("q", q)
            .complex("a", self.a)
            .complex("b", self.b)
            .complex("z", self.z)
            .real("nu", self.nu)
            .int("m", self.m as i64)
            .real("theta", self.point.xi.arg())
    }
}

/// Left member: prefactored 2phi1 times the shifted-parameter polynomial.
pub fn addition_lhs(case: &AdditionCase, ctx: &QContext) -> Result<SeriesValue> {
    case.validate()?;
    let par = AscParams::new(case.a, case.b, ctx.q())?;
    let shifted = par.shift_a(case.nu);
    let series = phi_prefactored(
        &[case.a * case.point.xi, case.a / case.point.xi],
        case.nu + 1.0,
        &[],
        case.z,
        ctx,
    )?;
    let s_m = crate::poly::asc_eval_rec(case.m, &case.point, &shifted);
    Ok(series.scale(s_m))
}

/// `z^n Phi_1(n)` for any integer n. For n < 0 the power of z is folded into
/// the regularized coefficients, which keeps the combination finite as z -> 0.
fn phi1_weighted(n: i64, m: usize, u: Complex64, z: Complex64, ctx: &QContext) -> Result<SeriesValue> {
    let q = ctx.q();
    if n >= 0 {
        let v = phi_prefactored(
            &[Complex64::new(q.powi(-(m as i32)), 0.0)],
            1.0 + n as f64,
            &[],
            u * z,
            ctx,
        )?;
        return Ok(v.scale(z.powi(n as i32)));
    }
    let n_reg = (-n) as usize;
    if n_reg > m {
        return Ok(SeriesValue::exact(Complex64::new(0.0, 0.0)));
    }
    if z.norm() == 0.0 {
        // Only the leading regularized coefficient survives:
        // z^n c_{n_reg} = (q^{-m};q)_{n_reg} (-1)^{n_reg} q^{n_reg(n_reg-1)/2} u^{n_reg}.
        let sign = if n_reg % 2 == 0 { 1.0 } else { -1.0 };
        let d0 = sign
            * q.powi((n_reg * (n_reg - 1) / 2) as i32)
            * qpoch_finite(Complex64::new(q.powi(-(m as i32)), 0.0), ctx, n_reg)
            * u.powi(n_reg as i32);
        let pre = qpoch_ratio(
            &[Complex64::new(q.powi(1 + n_reg as i32), 0.0)],
            &[Complex64::new(q, 0.0)],
            ctx,
        )?;
        return Ok(pre.scale(d0));
    }
    let v = phi_prefactored(
        &[Complex64::new(q.powi(-(m as i32)), 0.0)],
        1.0 + n as f64,
        &[],
        u * z,
        ctx,
    )?;
    Ok(v.scale(z.powi(n as i32)))
}

fn phi2(case: &AdditionCase, n: i64, ctx: &QContext) -> Result<SeriesValue> {
    let q = ctx.q();
    phi_prefactored(
        &[case.a * case.b * q.powi((n + case.m as i64) as i32), Complex64::new(0.0, 0.0)],
        case.nu + n as f64 + 1.0,
        &[],
        case.z,
        ctx,
    )
}

/// Uniform majorants from the continuity argument: the Phi_1 factor never
/// exceeds `(-|a^2 z| q^{n-nu};q)_inf / (q;q)_inf`, the Phi_2 factor never
/// exceeds `(-q^{nu+1}, -|ab|;q)_inf / ((q, |z|;q)_inf)`. (The 1/(q;q)_inf
/// normalization on the first is forced by the n -> infinity limit
/// Phi_1 -> 1/(q;q)_inf.) Checked for n >= 0 on every evaluation; violations
/// are reported as flags.
struct BoundChecker {
    phi2_bound: f64,
    qq_inf: f64,
    violations: Vec<String>,
}

impl BoundChecker {
    fn new(case: &AdditionCase, ctx: &QContext) -> Result<Self> {
        let q = ctx.q();
        let phi2_bound = qpoch_ratio(
            &[
                Complex64::new(-q.powf(case.nu + 1.0), 0.0),
                Complex64::new(-(case.a * case.b).norm(), 0.0),
            ],
            &[Complex64::new(q, 0.0), Complex64::new(case.z.norm(), 0.0)],
            ctx,
        )?
        .value
        .norm();
        let qq_inf = qpoch_infinite(Complex64::new(q, 0.0), ctx)?.value.norm();
        Ok(Self { phi2_bound, qq_inf, violations: Vec::new() })
    }

    fn check(&mut self, case: &AdditionCase, n: i64, psi1: &SeriesValue, phi2: &SeriesValue, ctx: &QContext) {
        if n < 0 {
            return;
        }
        let q = ctx.q();
        let zmag = case.z.norm();
        if zmag > 0.0 {
            let phi1_mag = psi1.value.norm() / zmag.powi(n as i32);
            let arg = -(case.a * case.a * case.z).norm() * q.powf(n as f64 - case.nu);
            if let Ok(bound) = qpoch_infinite(Complex64::new(arg, 0.0), ctx) {
                let bound = bound.value.norm() / self.qq_inf;
                if phi1_mag > bound * (1.0 + 1e-8) + 1e-12 {
                    self.violations.push(format!("phi1 bound exceeded at n={n}: {phi1_mag:.3e} > {bound:.3e}"));
                }
            }
        }
        if phi2.value.norm() > self.phi2_bound * (1.0 + 1e-8) + 1e-12 {
            self.violations.push(format!(
                "phi2 bound exceeded at n={n}: {:.3e} > {:.3e}",
                phi2.value.norm(),
                self.phi2_bound
            ));
        }
    }
}

/// Right member truncated at n = N, with the superexponential q^{n(n-1)/2}
/// majorant as the truncation certificate.
pub fn addition_rhs(case: &AdditionCase, n_trunc: usize, ctx: &QContext) -> Result<SeriesValue> {
    let (value, _) = addition_rhs_flagged(case, n_trunc, ctx)?;
    Ok(value)
}

pub(crate) fn addition_rhs_flagged(
    case: &AdditionCase,
    n_trunc: usize,
    ctx: &QContext,
) -> Result<(SeriesValue, Vec<String>)> {
    case.validate()?;
    let q = ctx.q();
    let par = AscParams::new(case.a, case.b, q)?;
    let seq = asc_sequence(case.m + n_trunc, &case.point, &par);
    let mut acc = KahanSum::<Complex64>::new();
    let mut tails = 0.0f64;
    let mut checker = BoundChecker::new(case, ctx)?;
    let mut prev_mag: Option<f64> = None;
    let mut last_mag = 0.0f64;
    for n in -(case.m as i64)..=(n_trunc as i64) {
        let u = case.a * case.a * q.powf(case.m as f64 + n as f64 - case.nu);
        let psi1 = phi1_weighted(n, case.m, u, case.z, ctx)?;
        let p2 = phi2(case, n, ctx)?;
        checker.check(case, n, &psi1, &p2, ctx);
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let scale = sign * case.a.powi(n as i32) * q.powi((n * (n - 1) / 2) as i32);
        let s_nm = seq[(n + case.m as i64) as usize];
        let combined = psi1.mul(&p2).scale(scale * s_nm);
        acc.add(combined.value);
        tails += combined.tail_bound;
        prev_mag = Some(last_mag);
        last_mag = combined.value.norm();
    }
    // Truncation certificate: the observed superexponential decay.
    let trunc_tail = match prev_mag {
        Some(p) if p > 0.0 && last_mag / p < 1.0 => {
            let rho = last_mag / p;
            last_mag * rho / (1.0 - rho)
        }
        _ => last_mag,
    };
    let value = SeriesValue {
        value: acc.value(),
        tail_bound: tails + trunc_tail,
        terms_used: case.m + n_trunc + 1,
    };
    Ok((value, checker.violations))
}

/// Residual of the addition formula at truncation N.
pub fn addition_residual(case: &AdditionCase, n_trunc: usize, ctx: &QContext) -> Result<ResidualReport> {
    let lhs = addition_lhs(case, ctx)?;
    let (rhs, flags) = addition_rhs_flagged(case, n_trunc, ctx)?;
    let mut report = ResidualReport::from_members(
        "addition",
        lhs,
        rhs,
        ctx.tol().max(1e-10),
        case.case_params(ctx.q()),
    );
    for f in flags {
        report = report.with_flag(f);
    }
    Ok(report)
}

/// Closed-form right member of the product formula for expansion index n:
///
/// ```text
/// (-1)^n a^n z^n q^{n(n-1)/2} / (q^{n+m+1}, a b q^{n+m};q)_inf
///     * Phi_1(n) * Phi_2(n).
/// ```
pub fn product_rhs(case: &AdditionCase, n: i64, ctx: &QContext) -> Result<SeriesValue> {
    case.validate()?;
    if n < -(case.m as i64) {
        return Err(QError::DomainError(format!("product formula needs n >= -m, got n = {n}")));
    }
    let q = ctx.q();
    let u = case.a * case.a * q.powf(case.m as f64 + n as f64 - case.nu);
    let psi1 = phi1_weighted(n, case.m, u, case.z, ctx)?;
    let p2 = phi2(case, n, ctx)?;
    let norm = qpoch_ratio(
        &[],
        &[
            Complex64::new(q.powi((n + case.m as i64 + 1) as i32), 0.0),
            case.a * case.b * q.powi((n + case.m as i64) as i32),
        ],
        ctx,
    )?;
    let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let scale = sign * case.a.powi(n as i32) * q.powi((n * (n - 1) / 2) as i32);
    Ok(psi1.mul(&p2).mul(&norm).scale(scale))
}

/// Residual of the product formula at one n.
pub fn product_residual(
    case: &AdditionCase,
    n: i64,
    grid: &QuadratureGrid,
    ctx: &QContext,
) -> Result<ResidualReport> {
    let mut reports = product_block(case, n..=n, grid, ctx)?;
    Ok(reports.remove(0))
}

/// Product-formula residuals for every n in the range, sharing one quadrature.
pub fn product_block(
    case: &AdditionCase,
    n_range: std::ops::RangeInclusive<i64>,
    grid: &QuadratureGrid,
    ctx: &QContext,
) -> Result<Vec<ResidualReport>> {
    case.validate()?;
    let q = ctx.q();
    if case.nu <= -1.0 {
        return Err(QError::DomainError("product formula is implemented for nu > -1".into()));
    }
    let par = AscParams::new(case.a, case.b, q)?;
    if !par.unit_disc() {
        return Err(QError::DomainError("product formula requires |a|, |b| < 1".into()));
    }
    let shifted = par.shift_a(case.nu);
    let ns: Vec<i64> = n_range.filter(|&n| n >= -(case.m as i64)).collect();
    if ns.is_empty() {
        return Err(QError::DomainError("no valid n >= -m in range".into()));
    }
    let deg_max = (ns.iter().max().unwrap() + case.m as i64) as usize;
    let qnu1 = Complex64::new(q.powf(case.nu + 1.0), 0.0);
    // The interior 2phi1 truncation varies from node to node, so its noise is
    // jagged; evaluate the integrand well below the quadrature threshold.
    let inner = ctx.with_tol((ctx.tol() * 1e-2).clamp(1e-14, 1e-13))?;

    let integrals = crate::ortho::integrate_many(
        |theta| {
            let p = SpectralPoint::from_theta(theta);
            let w = weight_core(theta, &par, 0, &inner).expect("weight evaluates on (0,pi)");
            let series = phi(
                &HypergeometricSpec::new(
                    vec![case.a * p.xi, case.a / p.xi],
                    vec![qnu1],
                    case.z,
                ),
                &inner,
            )
            .expect("interior 2phi1 converges for |z| < 1");
            let s_shift = asc_sequence(case.m, &p, &shifted);
            let s_plain = asc_sequence(deg_max, &p, &par);
            let common = series.value * s_shift[case.m] * w.value;
            ns.iter().map(|&n| common * s_plain[(n + case.m as i64) as usize]).collect()
        },
        grid,
        ctx,
    )?;

    let prefactor = qpoch_ratio(&[qnu1], &[Complex64::new(q, 0.0)], ctx)?;
    let mut out = Vec::with_capacity(ns.len());
    for (&n, integral) in ns.iter().zip(integrals) {
        let lhs = prefactor.mul(&integral);
        let rhs = product_rhs(case, n, ctx)?;
        let case_params = case.case_params(q).int("n", n);
        out.push(ResidualReport::from_members("product", lhs, rhs, ctx.tol().max(1e-9), case_params));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn base_case() -> AdditionCase {
        AdditionCase::new(
            c(0.3),
            c(0.2),
            c(0.4),
            1.5,
            2,
            SpectralPoint::from_theta(std::f64::consts::FRAC_PI_3),
        )
    }

    #[test]
    fn lhs_at_z_zero_is_prefactor_times_polynomial() {
        let ctx = QContext::new(0.5).unwrap();
        let mut case = base_case();
        case.z = c(0.0);
        let lhs = addition_lhs(&case, &ctx).unwrap();
        let pre = qpoch_ratio(
            &[c(ctx.q().powf(case.nu + 1.0))],
            &[c(ctx.q())],
            &ctx,
        )
        .unwrap();
        let par = AscParams::new(case.a, case.b, ctx.q()).unwrap().shift_a(case.nu);
        let s = crate::poly::asc_eval_rec(case.m, &case.point, &par);
        assert!((lhs.value - pre.value * s).norm() < 1e-13);
    }

    #[test]
    fn rhs_collapses_for_m_zero_z_zero() {
        let ctx = QContext::new(0.5).unwrap();
        let mut case = base_case();
        case.m = 0;
        case.z = c(0.0);
        let lhs = addition_lhs(&case, &ctx).unwrap();
        let rhs = addition_rhs(&case, 10, &ctx).unwrap();
        assert!((lhs.value - rhs.value).norm() < 1e-13, "{} vs {}", lhs.value, rhs.value);
    }

    #[test]
    fn addition_residual_reference_case() {
        let ctx = QContext::new(0.5).unwrap();
        let rep = addition_residual(&base_case(), 40, &ctx).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.abs_residual < 1e-10, "residual {}", rep.abs_residual);
        assert!(rep.flags.is_empty(), "flags: {:?}", rep.flags);
    }

    #[test]
    fn addition_residual_complex_z() {
        let ctx = QContext::new(0.5).unwrap();
        let mut case = base_case();
        case.z = Complex64::new(0.3, 0.2);
        case.nu = 0.7;
        case.m = 1;
        let rep = addition_residual(&case, 40, &ctx).unwrap();
        assert!(rep.passed() && rep.abs_residual < 1e-10, "{rep:?}");
    }

    #[test]
    fn addition_residual_endpoints() {
        let ctx = QContext::new(0.5).unwrap();
        for theta in [0.0, std::f64::consts::PI] {
            let mut case = base_case();
            case.point = SpectralPoint::from_theta(theta);
            let rep = addition_residual(&case, 40, &ctx).unwrap();
            assert!(rep.abs_residual < 1e-9, "theta={theta}: {rep:?}");
        }
    }

    #[test]
    fn addition_integer_nu_hits_regularized_phi2() {
        // nu = 1, m = 3: the n = -3 term has lower parameter q^{-1}.
        let ctx = QContext::new(0.5).unwrap();
        let case = AdditionCase::new(
            c(0.3),
            c(0.2),
            c(0.4),
            1.0,
            3,
            SpectralPoint::from_theta(0.9),
        );
        let rep = addition_residual(&case, 40, &ctx).unwrap();
        assert!(rep.passed() && rep.abs_residual < 1e-10, "{rep:?}");
    }

    #[test]
    fn rejects_out_of_disc_arguments() {
        let ctx = QContext::new(0.5).unwrap();
        let mut case = base_case();
        case.z = c(1.5);
        assert!(matches!(addition_lhs(&case, &ctx), Err(QError::DomainError(_))));
    }

    #[test]
    fn product_residual_reference_cases() {
        let ctx = QContext::new(0.5).unwrap();
        let grid = QuadratureGrid::default();
        let rep = product_residual(&base_case(), 1, &grid, &ctx).unwrap();
        assert!(rep.passed() && rep.abs_residual < 1e-9, "{rep:?}");
        // lowest index n = -m
        let rep = product_residual(&base_case(), -2, &grid, &ctx).unwrap();
        assert!(rep.passed() && rep.abs_residual < 1e-9, "n=-m: {rep:?}");
    }

    #[test]
    fn resynthesis_recovers_left_member() {
        // Multiplying each product coefficient by the squared norm and summing
        // against S_{n+m} rebuilds the addition left member.
        let ctx = QContext::new(0.5).unwrap();
        let case = base_case();
        let q = ctx.q();
        let par = AscParams::new(case.a, case.b, q).unwrap();
        let seq = asc_sequence(case.m + 30, &case.point, &par);
        let mut acc = Complex64::new(0.0, 0.0);
        for n in -(case.m as i64)..=30 {
            let coeff = product_rhs(&case, n, &ctx).unwrap();
            let norm = qpoch_ratio(
                &[
                    c(q.powi((n + case.m as i64 + 1) as i32)),
                    case.a * case.b * q.powi((n + case.m as i64) as i32),
                ],
                &[],
                &ctx,
            )
            .unwrap();
            acc += coeff.value * norm.value * seq[(n + case.m as i64) as usize];
        }
        let lhs = addition_lhs(&case, &ctx).unwrap();
        assert!((acc - lhs.value).norm() < 1e-9, "{acc} vs {}", lhs.value);
    }
}
