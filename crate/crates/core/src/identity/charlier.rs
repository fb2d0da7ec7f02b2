//! Specializations on the q-Charlier side: the q-analogue of the
//! Hansen-Lommel orthogonality, the two extension identities obtained by
//! substituting into the addition formula, and the q-Charlier / q-Laguerre
//! relation.

use num_complex::Complex64;

use crate::context::{QContext, QError, Result, SeriesValue};
use crate::kahan::KahanSum;
use crate::ortho::charlier_lattice_sum;
use crate::poly::{asc_eval_rec, asc_sequence, qcharlier_eval, qlaguerre_eval, AscParams, CharlierParams, SpectralPoint};
use crate::report::{CaseParams, ResidualReport};
use crate::series::{
    phi_prefactored, q_neg_power, qpoch_finite, qpoch_infinite, qpoch_ratio, two_phi_one,
};

/// Residual of the q-Hansen-Lommel orthogonality, for integer p <= m and
/// |z| < 1, z != 0:
///
/// ```text
/// delta_{0,p} (q;q)_m
///   = sum_{n=-m}^{inf} (-z)^n q^{n(n-1)/2} (q;q)_{n+m}
///     * [(q^{n+1};q)_inf/(q;q)_inf  _1 phi_1 (q^{-m}; q^{n+1}; q, q^{1+m+n-p} z)]
///     * [(q^{n+p+1};q)_inf/(q;q)_inf  _2 phi_1 (q^{n+m+1}, 0; q^{n+p+1}; q, z)].
/// ```
pub fn hansen_lommel_q_residual(
    p: i64,
    m: usize,
    z: Complex64,
    n_trunc: usize,
    ctx: &QContext,
) -> Result<ResidualReport> {
    let q = ctx.q();
    if p > m as i64 {
        return Err(QError::DomainError(format!("requires p <= m, got p = {p}, m = {m}")));
    }
    if z.norm() >= 1.0 || z.norm() == 0.0 {
        return Err(QError::DomainError(format!(
            "requires 0 < |z| < 1, got {:.6}",
            z.norm()
        )));
    }

    let mut acc = KahanSum::<Complex64>::new();
    let mut tails = 0.0f64;
    let mut prev_mag = 0.0f64;
    let mut last_mag = 0.0f64;
    for n in -(m as i64)..=(n_trunc as i64) {
        let b1 = phi_prefactored(
            &[Complex64::new(q.powi(-(m as i32)), 0.0)],
            1.0 + n as f64,
            &[],
            q.powi((1 + m as i64 + n - p) as i32) * z,
            ctx,
        )?;
        let b2 = phi_prefactored(
            &[Complex64::new(q.powi((n + m as i64 + 1) as i32), 0.0), Complex64::new(0.0, 0.0)],
            (n + p) as f64 + 1.0,
            &[],
            z,
            ctx,
        )?;
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let scale = sign
            * z.powi(n as i32)
            * q.powi((n * (n - 1) / 2) as i32)
            * qpoch_finite(Complex64::new(q, 0.0), ctx, (n + m as i64) as usize);
        let term = b1.mul(&b2).scale(scale);
        acc.add(term.value);
        tails += term.tail_bound;
        prev_mag = last_mag;
        last_mag = term.value.norm();
    }
    let trunc_tail = if prev_mag > 0.0 && last_mag / prev_mag < 1.0 {
        let rho = last_mag / prev_mag;
        last_mag * rho / (1.0 - rho)
    } else {
        last_mag
    };
    let lhs = SeriesValue { value: acc.value(), tail_bound: tails + trunc_tail, terms_used: m + n_trunc + 1 };
    let rhs = if p == 0 {
        SeriesValue::exact(qpoch_finite(Complex64::new(q, 0.0), ctx, m))
    } else {
        SeriesValue::exact(Complex64::new(0.0, 0.0))
    };
    let case = CaseParams::new()
        .int("p", p)
        .int("m", m as i64)
        .complex("z", z)
        .real("q", q);
    Ok(ResidualReport::from_members("hansen_lommel_q", lhs, rhs, ctx.tol().max(1e-11), case))
}

/// `(q^e;q)_inf/(q;q)_inf * _2 phi_1 (A xi, A/xi; q^e; q, z)` with the
/// continuation rules the extension identities need: the regularized route for
/// nonpositive-integer e (only summable directly, |z| < 1), Heine continuation
/// for |z| >= 1 otherwise.
fn prefactored_2phi1_cont(
    upper1: Complex64,
    upper2: Complex64,
    e: f64,
    z: Complex64,
    ctx: &QContext,
) -> Result<SeriesValue> {
    let q = ctx.q();
    let nonpos_int = (e - e.round()).abs() < 1e-9 && e.round() <= 0.0;
    let terminating = q_neg_power(upper1, q).is_some() || q_neg_power(upper2, q).is_some();
    if nonpos_int || terminating || z.norm() < 1.0 {
        if nonpos_int && z.norm() >= 1.0 && !terminating {
            return Err(QError::DomainError(
                "regularized 2phi1 with |z| >= 1 is outside the implemented range".into(),
            ));
        }
        return phi_prefactored(&[upper1, upper2], e, &[], z, ctx);
    }
    let series = two_phi_one(upper1, upper2, Complex64::new(q.powf(e), 0.0), z, ctx)?;
    let pre = qpoch_ratio(
        &[Complex64::new(q.powf(e), 0.0)],
        &[Complex64::new(q, 0.0)],
        ctx,
    )?;
    Ok(pre.mul(&series))
}

/// Residual of the extension of the q-Charlier orthogonality carrying an
/// Al-Salam-Chihara factor:
///
/// ```text
/// sum_h (alpha beta)^{h/2} q^{h(mu+1)/2} q^{h(h-1)/2}/(q;q)_h
///       * (q^{1+h+mu};q)_inf/(q;q)_inf
///       * c_m(q^{-h}; alpha) c_r(q^{-h-mu}; beta) S_h(x; A, B)
/// = (-1)^{m+r} q^{m(m+mu)/2} q^{r(r-m-mu)} alpha^{-m/2} beta^{m/2-r}
///   * (-beta q^{-r};q)_inf
///   * (q^{1+m-r+mu};q)_inf/(q;q)_inf  _2 phi_1 (A xi, A/xi; q^{1+m-r+mu}; q, -beta q^{-r})
///   * S_m(x; q^{r-m+(1-mu)/2} sqrt(alpha/beta), B)
/// ```
///
/// with A = q^{(mu+1)/2} sqrt(alpha/beta), B = q^{(mu+1)/2} sqrt(beta/alpha).
/// The point may be off-spectrum (real xi in (0,1)); at xi = B the identity
/// collapses to the pure q-Charlier extension.
#[allow(clippy::too_many_arguments)]
pub fn qcharlier_extension_residual(
    m: usize,
    r: usize,
    mu: f64,
    alpha: f64,
    beta: f64,
    point: &SpectralPoint,
    n_trunc: usize,
    ctx: &QContext,
) -> Result<ResidualReport> {
    let q = ctx.q();
    if alpha <= 0.0 || beta <= 0.0 {
        return Err(QError::DomainError("alpha and beta must be positive".into()));
    }
    let half = q.powf(0.5 * (mu + 1.0));
    let a_par = Complex64::new(half * (alpha / beta).sqrt(), 0.0);
    let b_par = Complex64::new(half * (beta / alpha).sqrt(), 0.0);
    let par_ab = AscParams::new(a_par, b_par, q)?;

    // Lattice sum: base sqrt(alpha beta) q^{(mu+1)/2}; off-spectrum growth of
    // S_h enters the break bound through ln(1/xi).
    let s_seq = asc_sequence(n_trunc, point, &par_ab);
    let p_seq = prefactor_sequence(mu, n_trunc, ctx)?;
    let xi_mag = point.xi.norm();
    let extra_growth = if xi_mag < 1.0 && point.xi.im == 0.0 { -xi_mag.ln() } else { 0.0 };
    let lattice_base = (alpha * beta).sqrt() * half;
    let lhs = charlier_lattice_sum(m, r, alpha, beta, mu, lattice_base, extra_growth, n_trunc, ctx, |h, cm, cr| {
        cm * cr * s_seq[h] * p_seq[h]
    })?;

    // Closed-form member.
    let sign = if (m + r) % 2 == 0 { 1.0 } else { -1.0 };
    let scalar = sign
        * q.powf(0.5 * m as f64 * (m as f64 + mu))
        * q.powf(r as f64 * (r as f64 - m as f64 - mu))
        * alpha.powf(-0.5 * m as f64)
        * beta.powf(0.5 * m as f64 - r as f64);
    let z = Complex64::new(-beta * q.powi(-(r as i32)), 0.0);
    let inf = qpoch_infinite(z, ctx)?;
    let series = prefactored_2phi1_cont(
        a_par * point.xi,
        a_par / point.xi,
        1.0 + m as f64 - r as f64 + mu,
        z,
        ctx,
    )?;
    let shifted_a = Complex64::new(
        q.powf(r as f64 - m as f64 + 0.5 * (1.0 - mu)) * (alpha / beta).sqrt(),
        0.0,
    );
    let par_shift = AscParams::new(shifted_a, b_par, q)?;
    let s_m = asc_eval_rec(m, point, &par_shift);
    let rhs = inf.mul(&series).scale(scalar * s_m);

    let case = CaseParams::new()
        .int("m", m as i64)
        .int("r", r as i64)
        .real("mu", mu)
        .real("alpha", alpha)
        .real("beta", beta)
        .real("theta", point.xi.arg())
        .real("q", q);
    Ok(ResidualReport::from_members("charlier_ext", lhs, rhs, ctx.tol().max(1e-10), case))
}

/// `(q^{1+h+mu};q)_inf/(q;q)_inf` for h = 0..=h_max, advanced by exact
/// divisions.
fn prefactor_sequence(mu: f64, h_max: usize, ctx: &QContext) -> Result<Vec<Complex64>> {
    let q = ctx.q();
    let mut out = Vec::with_capacity(h_max + 1);
    let mut cur = qpoch_ratio(
        &[Complex64::new(q.powf(1.0 + mu), 0.0)],
        &[Complex64::new(q, 0.0)],
        ctx,
    )?
    .value;
    out.push(cur);
    for h in 0..h_max {
        cur /= 1.0 - q.powf(1.0 + h as f64 + mu);
        out.push(cur);
    }
    Ok(out)
}

/// Residual of the pure q-Charlier extension (the Al-Salam-Chihara factor
/// evaluated at its reduction point):
///
/// ```text
/// sum_h alpha^h q^{h(h-1)/2}/(q;q)_h c_m(q^{-h}; alpha) c_r(q^{-h-mu}; beta)
/// = (-1)^{m+r} q^{m(m-1)/2} q^{r(r-m-mu)} beta^{-r} (q^{1+r-m};q)_m
///   * (-beta q^{-r};q)_inf (q^{1+m-r+mu};q)_inf/(q^{1+mu};q)_inf
///   * _2 phi_1 (q^{mu+1}, alpha/beta; q^{1+m-r+mu}; q, -beta q^{-r}).
/// ```
///
/// At mu = 0, alpha = beta this reduces to the discrete q-Charlier
/// orthogonality.
#[allow(clippy::too_many_arguments)]
pub fn qcharlier_extension_special_residual(
    m: usize,
    r: usize,
    mu: f64,
    alpha: f64,
    beta: f64,
    n_trunc: usize,
    ctx: &QContext,
) -> Result<ResidualReport> {
    let q = ctx.q();
    if alpha <= 0.0 || beta <= 0.0 {
        return Err(QError::DomainError("alpha and beta must be positive".into()));
    }
    let lhs = charlier_lattice_sum(m, r, alpha, beta, mu, alpha, 0.0, n_trunc, ctx, |_h, cm, cr| cm * cr)?;

    let sign = if (m + r) % 2 == 0 { 1.0 } else { -1.0 };
    let scalar = sign
        * q.powi((m * m.saturating_sub(1) / 2) as i32)
        * q.powf(r as f64 * (r as f64 - m as f64 - mu))
        * beta.powi(-(r as i32))
        * qpoch_finite(Complex64::new(q.powi(1 + r as i32 - m as i32), 0.0), ctx, m);
    let z = Complex64::new(-beta * q.powi(-(r as i32)), 0.0);
    let inf = qpoch_infinite(z, ctx)?;
    // (q^{1+m-r+mu};q)_inf/(q;q)_inf * 2phi1, then renormalize the denominator
    // from (q;q)_inf to (q^{1+mu};q)_inf.
    let series = prefactored_2phi1_cont(
        Complex64::new(q.powf(mu + 1.0), 0.0),
        Complex64::new(alpha / beta, 0.0),
        1.0 + m as f64 - r as f64 + mu,
        z,
        ctx,
    )?;
    let renorm = qpoch_ratio(
        &[Complex64::new(q, 0.0)],
        &[Complex64::new(q.powf(1.0 + mu), 0.0)],
        ctx,
    )?;
    let rhs = inf.mul(&series).mul(&renorm).scale(scalar);

    let case = CaseParams::new()
        .int("m", m as i64)
        .int("r", r as i64)
        .real("mu", mu)
        .real("alpha", alpha)
        .real("beta", beta)
        .real("q", q);
    Ok(ResidualReport::from_members("charlier_ext_special", lhs, rhs, ctx.tol().max(1e-10), case))
}

/// Residual of the q-Charlier / q-Laguerre relation
///
/// ```text
/// c_m(q^{-alpha-m}; a; q) = (-a q^alpha)^{-m} (q;q)_m L_m^{(alpha)}(a q^{-m}; q).
/// ```
///
/// (The Laguerre argument is a q^{-m}: substituting x = q^{-alpha-m} into the
/// inverted q-Charlier form gives the 1phi1 argument -a q^{alpha+1}, which
/// Moak's normalization reaches only at that argument. Expanding both sides at
/// m = 1 confirms it.)
pub fn qlaguerre_relation_residual(m: usize, alpha: f64, a: f64, ctx: &QContext) -> Result<ResidualReport> {
    let q = ctx.q();
    let par = CharlierParams::new(a, q)?;
    let x = Complex64::new(q.powf(-alpha - m as f64), 0.0);
    let lhs = SeriesValue::exact(qcharlier_eval(m, x, &par, ctx)?);
    let lag = qlaguerre_eval(m, alpha, a * q.powi(-(m as i32)), ctx)?;
    let scale = Complex64::new(-a * q.powf(alpha), 0.0).powi(-(m as i32))
        * qpoch_finite(Complex64::new(q, 0.0), ctx, m);
    let rhs = SeriesValue::exact(scale * lag);
    let case = CaseParams::new()
        .int("m", m as i64)
        .real("alpha", alpha)
        .real("a", a)
        .real("q", q);
    Ok(ResidualReport::from_members("qlag_relation", lhs, rhs, ctx.tol().max(1e-11), case))
}
