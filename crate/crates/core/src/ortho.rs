//! The Askey-Wilson-type weight on [0, pi] and every integral/discrete
//! orthogonality evaluation: the Al-Salam-Chihara orthogonality relations, the
//! connection-coefficient integral lemma, and the discrete q-Charlier
//! orthogonality.

use num_complex::Complex64;

use crate::context::{QContext, QError, Result, SeriesValue};
use crate::kahan::KahanSum;
use crate::poly::{asc_sequence, AscParams, CharlierParams, SpectralPoint};
use crate::quad::{integrate_adaptive, integrate_adaptive_many, QuadratureGrid};
use crate::report::{CaseParams, ResidualReport};
use crate::series::{phi_prefactored, qpoch_finite, qpoch_ratio};

/// Weight specification: ASC parameters (inside the unit disc) plus the
/// optional finite factor `(a e^{i theta}, a e^{-i theta}; q)_r`.
#[derive(Debug, Clone, Copy)]
pub struct WeightSpec {
    pub par: AscParams,
    pub extra_r: usize,
}

impl WeightSpec {
    pub fn new(par: AscParams, extra_r: usize) -> Result<Self> {
        if !par.unit_disc() {
            return Err(QError::DomainError(
                "weight requires |a| < 1 and |b| < 1".into(),
            ));
        }
        Ok(Self { par, extra_r })
    }
}

/// The weight
///
/// ```text
/// w(theta) = (e^{2i theta}, e^{-2i theta};q)_inf
///            / (a e^{i theta}, a e^{-i theta}, b e^{i theta}, b e^{-i theta};q)_inf
///            * (a e^{i theta}, a e^{-i theta};q)_r,
/// ```
///
/// real on (0, pi) for conjugate-symmetric parameters and vanishing at the
/// endpoints.
pub fn weight_eval(theta: f64, w: &WeightSpec, ctx: &QContext) -> Result<f64> {
    let v = weight_core(theta, &w.par, w.extra_r, ctx)?;
    Ok(v.value.re)
}

/// Complex-valued core of the weight (used directly by the integrands, which
/// keep everything in complex arithmetic).
pub(crate) fn weight_core(
    theta: f64,
    par: &AscParams,
    extra_r: usize,
    ctx: &QContext,
) -> Result<SeriesValue> {
    let e = Complex64::from_polar(1.0, theta);
    let einv = e.conj();
    let ratio = qpoch_ratio(
        &[e * e, einv * einv],
        &[par.a * e, par.a * einv, par.b * e, par.b * einv],
        ctx,
    )?;
    let finite = qpoch_finite(par.a * e, ctx, extra_r) * qpoch_finite(par.a * einv, ctx, extra_r);
    Ok(ratio.scale(finite))
}

/// `(1/2pi) int_0^pi f(theta) d theta` by Gauss-Legendre order doubling.
pub fn integrate<F>(f: F, grid: &QuadratureGrid, _ctx: &QContext) -> Result<SeriesValue>
where
    F: Fn(f64) -> Complex64,
{
    let two_pi = 2.0 * std::f64::consts::PI;
    let v = integrate_adaptive(f, 0.0, std::f64::consts::PI, grid)?;
    Ok(SeriesValue {
        value: v.value / two_pi,
        tail_bound: v.tail_bound / two_pi,
        terms_used: v.terms_used,
    })
}

/// Vector version of [`integrate`]; components share quadrature nodes.
pub fn integrate_many<F>(f: F, grid: &QuadratureGrid, _ctx: &QContext) -> Result<Vec<SeriesValue>>
where
    F: Fn(f64) -> Vec<Complex64>,
{
    let two_pi = 2.0 * std::f64::consts::PI;
    let vs = integrate_adaptive_many(f, 0.0, std::f64::consts::PI, grid)?;
    Ok(vs
        .into_iter()
        .map(|v| SeriesValue {
            value: v.value / two_pi,
            tail_bound: v.tail_bound / two_pi,
            terms_used: v.terms_used,
        })
        .collect())
}

/// Residual of the orthogonality relation
///
/// ```text
/// (1/2pi) int_0^pi (S_k S_l)(cos theta; a,b|q) w(theta) d theta
///     = delta_{k,l} / (q^{k+1}, a b q^k; q)_inf .
/// ```
pub fn asc_orthogonality_residual(
    k: usize,
    l: usize,
    par: &AscParams,
    grid: &QuadratureGrid,
    ctx: &QContext,
) -> Result<ResidualReport> {
    let reports = asc_orthogonality_block(k.max(l), par, grid, ctx)?;
    Ok(reports
        .into_iter()
        .find(|r| {
            r.case.get("k").and_then(|v| v.as_i64()) == Some(k as i64)
                && r.case.get("l").and_then(|v| v.as_i64()) == Some(l as i64)
        })
        .expect("pair present in block"))
}

/// All orthogonality residuals for k <= l <= k_max in one shared quadrature.
pub fn asc_orthogonality_block(
    k_max: usize,
    par: &AscParams,
    grid: &QuadratureGrid,
    ctx: &QContext,
) -> Result<Vec<ResidualReport>> {
    if !par.unit_disc() {
        return Err(QError::DomainError("orthogonality requires |a|, |b| < 1".into()));
    }
    let q = ctx.q();
    let pairs: Vec<(usize, usize)> =
        (0..=k_max).flat_map(|k| (k..=k_max).map(move |l| (k, l))).collect();
    let integrals = integrate_many(
        |theta| {
            let w = weight_core(theta, par, 0, ctx).expect("weight evaluates on (0,pi)");
            let p = SpectralPoint::from_theta(theta);
            let s = asc_sequence(k_max, &p, par);
            pairs.iter().map(|&(k, l)| s[k] * s[l] * w.value).collect()
        },
        grid,
        ctx,
    )?;
    let mut out = Vec::with_capacity(pairs.len());
    for (&(k, l), integral) in pairs.iter().zip(integrals) {
        let rhs = if k == l {
            let norm = qpoch_ratio(
                &[],
                &[
                    Complex64::new(q.powi(k as i32 + 1), 0.0),
                    par.a * par.b * q.powi(k as i32),
                ],
                ctx,
            )?;
            norm
        } else {
            SeriesValue::exact(Complex64::new(0.0, 0.0))
        };
        let case = CaseParams::new()
            .int("k", k as i64)
            .int("l", l as i64)
            .complex("a", par.a)
            .complex("b", par.b)
            .real("q", q);
        out.push(ResidualReport::from_members("asc_ortho", integral, rhs, ctx.tol().max(1e-11), case));
    }
    Ok(out)
}

/// Residual of the connection-coefficient integral lemma: for m, r >= 0 and
/// integer n >= -m,
///
/// ```text
/// (1/2pi) int_0^pi S_m(cos t; a q^{-nu}, b) S_{n+m}(cos t; a, b)
///         (a e^{it}, a e^{-it};q)_r w_0(t) dt
///   = (-a)^{-n} q^{n(nu+1)} q^{n(n-1)/2}
///     (q^{nu+n+r+1};q)_inf / [(q^{m+1}, q^{nu+r+1}, a b q^{n+m+r};q)_inf]
///     * (q^{1-n};q)_inf/(q;q)_inf
///       _3 phi_2 (q^{-r}, q^{-m-n}, q^{-nu-n-r}; q^{1-n}, q^{1-m-n-r}/(ab); q, q^{r+1} a/b),
/// ```
///
/// the last factor taken in the regularized sense. Both sides vanish for
/// n > r. Cases with |a q^{-nu}| >= 1 are evaluated but flagged.
pub fn lemma1_residual(
    m: usize,
    n: i64,
    r: usize,
    nu: f64,
    par: &AscParams,
    grid: &QuadratureGrid,
    ctx: &QContext,
) -> Result<ResidualReport> {
    let reports = lemma1_block(m, n..=n, r, nu, par, grid, ctx)?;
    Ok(reports.into_iter().next().expect("single case"))
}

/// Lemma residuals for a contiguous n-range at fixed (m, r, nu), sharing one
/// quadrature pass.
pub fn lemma1_block(
    m: usize,
    n_range: std::ops::RangeInclusive<i64>,
    r: usize,
    nu: f64,
    par: &AscParams,
    grid: &QuadratureGrid,
    ctx: &QContext,
) -> Result<Vec<ResidualReport>> {
    if !par.unit_disc() {
        return Err(QError::DomainError("the lemma's weight requires |a|, |b| < 1".into()));
    }
    let q = ctx.q();
    let ns: Vec<i64> = n_range.clone().filter(|&n| n >= -(m as i64)).collect();
    if ns.is_empty() {
        return Err(QError::DomainError(format!("no valid n >= -m in range (m = {m})")));
    }
    let shifted = par.shift_a(nu);
    let flagged = shifted.a.norm() >= 1.0;
    let deg_max = (ns.iter().max().unwrap() + m as i64) as usize;

    let integrals = integrate_many(
        |theta| {
            let w = weight_core(theta, par, r, ctx).expect("weight evaluates on (0,pi)");
            let p = SpectralPoint::from_theta(theta);
            let s_shift = asc_sequence(m, &p, &shifted);
            let s_plain = asc_sequence(deg_max, &p, par);
            ns.iter()
                .map(|&n| s_shift[m] * s_plain[(n + m as i64) as usize] * w.value)
                .collect()
        },
        grid,
        ctx,
    )?;

    let mut out = Vec::with_capacity(ns.len());
    for (&n, lhs) in ns.iter().zip(integrals) {
        let rhs = lemma1_rhs(m, n, r, nu, par, ctx)?;
        let case = CaseParams::new()
            .int("m", m as i64)
            .int("n", n)
            .int("r", r as i64)
            .real("nu", nu)
            .complex("a", par.a)
            .complex("b", par.b)
            .real("q", q);
        let mut report =
            ResidualReport::from_members("lemma1", lhs, rhs, ctx.tol().max(1e-11), case);
        if flagged {
            report = report.with_flag(format!(
                "|a q^-nu| = {:.6} >= 1: polynomial parameter outside the unit disc",
                shifted.a.norm()
            ));
        }
        out.push(report);
    }
    Ok(out)
}

fn lemma1_rhs(m: usize, n: i64, r: usize, nu: f64, par: &AscParams, ctx: &QContext) -> Result<SeriesValue> {
    let q = ctx.q();
    let a = par.a;
    let b = par.b;
    if b.norm() == 0.0 {
        return Err(QError::ZeroParameter("b (the lemma's 3phi2 argument divides by b)"));
    }
    if a.norm() == 0.0 {
        return Err(QError::ZeroParameter("a (the lemma's prefactor divides by a)"));
    }
    let ab = a * b;
    let scalar = (-a).powi(-(n as i32))
        * q.powf(n as f64 * (nu + 1.0))
        * q.powi((n * (n - 1) / 2) as i32);
    let products = qpoch_ratio(
        &[Complex64::new(q.powf(nu + n as f64 + r as f64 + 1.0), 0.0)],
        &[
            Complex64::new(q.powi(m as i32 + 1), 0.0),
            Complex64::new(q.powf(nu + r as f64 + 1.0), 0.0),
            ab * q.powi((n + m as i64 + r as i64) as i32),
        ],
        ctx,
    )?;
    let upper = [
        Complex64::new(q.powi(-(r as i32)), 0.0),
        Complex64::new(q.powi(-((m as i64 + n) as i32)), 0.0),
        Complex64::new(q.powf(-nu - n as f64 - r as f64), 0.0),
    ];
    let extra_lower = [Complex64::new(q.powi(1 - (m as i64 + n + r as i64) as i32), 0.0) / ab];
    let z = Complex64::new(q.powi(r as i32 + 1), 0.0) * a / b;
    let series = phi_prefactored(&upper, 1.0 - n as f64, &extra_lower, z, ctx)?;
    Ok(products.mul(&series).scale(scalar))
}

/// Residual of the discrete q-Charlier orthogonality
///
/// ```text
/// sum_{h>=0} a^h q^{h(h-1)/2}/(q;q)_h c_m(q^{-h}) c_r(q^{-h})
///     = delta_{m,r} q^{-m} (-q/a;q)_m (q;q)_m (-a;q)_inf .
/// ```
///
/// The lattice factor q^{h(h-1)/2} decays superexponentially; the sum is cut
/// when a log-space bound on the remaining terms drops below the tolerance.
pub fn qcharlier_orthogonality_residual(
    m: usize,
    r: usize,
    par: &CharlierParams,
    cap: usize,
    ctx: &QContext,
) -> Result<ResidualReport> {
    let q = ctx.q();
    let lhs = charlier_lattice_sum(m, r, par.a, par.a, 0.0, par.a, 0.0, cap, ctx, |_h, cm, cr| cm * cr)?;
    let rhs = if m == r {
        let inf = qpoch_ratio(&[Complex64::new(-par.a, 0.0)], &[], ctx)?;
        let scalar = q.powi(-(m as i32))
            * qpoch_finite(Complex64::new(-q / par.a, 0.0), ctx, m)
            * qpoch_finite(Complex64::new(q, 0.0), ctx, m);
        inf.scale(scalar)
    } else {
        SeriesValue::exact(Complex64::new(0.0, 0.0))
    };
    let case = CaseParams::new()
        .int("m", m as i64)
        .int("r", r as i64)
        .real("a", par.a)
        .real("q", q);
    Ok(ResidualReport::from_members("charlier_ortho", lhs, rhs, ctx.tol().max(1e-11), case))
}

/// Shared engine for the discrete q-Charlier lattice sums: accumulates
///
/// ```text
/// sum_h base^h q^{h(h-1)/2}/(q;q)_h * f(h, c_m(q^{-h}; alpha), c_r(q^{-h-mu}; beta))
/// ```
///
/// with a log-space break once the superexponential lattice factor dominates
/// every possible growth of the remaining factors. `extra_growth` is a per-h
/// log-growth allowance for whatever `f` multiplies in beyond the two
/// q-Charlier values (e.g. an off-spectrum polynomial factor); the q-Charlier
/// growth ~ q^{-h(m+r)} is accounted for automatically. The break test runs
/// before the polynomial values are formed, so no overflowing product is ever
/// touched.
#[allow(clippy::too_many_arguments)]
pub(crate) fn charlier_lattice_sum<F>(
    m: usize,
    r: usize,
    alpha: f64,
    beta: f64,
    mu: f64,
    base: f64,
    extra_growth: f64,
    cap: usize,
    ctx: &QContext,
    f: F,
) -> Result<SeriesValue>
where
    F: Fn(usize, Complex64, Complex64) -> Complex64,
{
    let q = ctx.q();
    let par_m = CharlierParams::new(alpha, q)?;
    let par_r = CharlierParams::new(beta, q)?;
    let mut acc = KahanSum::<Complex64>::new();
    // w_h = base^h q^{h(h-1)/2} / (q;q)_h, advanced multiplicatively.
    let mut w = 1.0f64;
    let ln_q = q.ln();
    let growth = (m + r) as f64 * (-ln_q) + extra_growth;
    let mut tail = f64::NAN;
    let mut h = 0usize;
    while h < cap {
        let xm = Complex64::new(q.powi(-(h as i32)), 0.0);
        let xr = Complex64::new(q.powf(-(h as f64) - mu), 0.0);
        let cm = crate::poly::qcharlier_eval(m, xm, &par_m, ctx)?;
        let cr = crate::poly::qcharlier_eval(r, xr, &par_r, ctx)?;
        acc.add(f(h, cm, cr) * w);
        // advance w and test the remainder bound in log space
        w *= base * q.powi(h as i32) / (1.0 - q.powi(h as i32 + 1));
        h += 1;
        let ln_bound = w.abs().ln() + growth * h as f64 + 40.0;
        if ln_bound < (ctx.tol() * 1e-3).ln() {
            tail = ln_bound.exp();
            break;
        }
    }
    if tail.is_nan() {
        return Err(QError::CapExceeded { cap, what: "q-Charlier lattice sum" });
    }
    Ok(SeriesValue { value: acc.value(), tail_bound: tail, terms_used: h })
}
