//! Orthogonal-polynomial evaluators: Al-Salam-Chihara, q-Charlier, and
//! q-Laguerre polynomials, with connection coefficients and the off-spectrum
//! asymptotic amplitude.

use num_complex::Complex64;

use crate::context::{QContext, QError, Result};
use crate::series::{
    phi, phi_regularized, q_neg_power, qpoch_finite, qpoch_infinite, qpoch_ratio,
    HypergeometricSpec,
};

/// Parameter pack (a, b, q) of the Al-Salam-Chihara polynomials
/// S_n(x; a, b | q). The polynomials are symmetric in a and b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscParams {
    pub a: Complex64,
    pub b: Complex64,
    q: f64,
}

impl AscParams {
    pub fn new(a: Complex64, b: Complex64, q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(QError::InvalidParameter(format!("q must be in (0,1), got {q}")));
        }
        Ok(Self { a, b, q })
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Both parameters strictly inside the unit disc (required by the
    /// absolutely continuous orthogonality measure).
    pub fn unit_disc(&self) -> bool {
        self.a.norm() < 1.0 && self.b.norm() < 1.0
    }

    /// Swap a and b.
    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a, q: self.q }
    }

    /// Replace a by `a * q^{-nu}` (the shifted parameter set of the addition
    /// formula's left side).
    pub fn shift_a(&self, nu: f64) -> Self {
        Self { a: self.a * self.q.powf(-nu), b: self.b, q: self.q }
    }
}

/// A point of evaluation x = (xi + 1/xi)/2.
///
/// On the spectrum xi = e^{i theta} and x = cos theta in [-1, 1]; off the
/// spectrum xi is real in (0, 1) and x > 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub x: f64,
    pub xi: Complex64,
}

impl SpectralPoint {
    /// On-spectrum point from the angle theta.
    pub fn from_theta(theta: f64) -> Self {
        Self { x: theta.cos(), xi: Complex64::from_polar(1.0, theta) }
    }

    /// Off-spectrum point from real xi in (0, 1): x = (xi + 1/xi)/2 > 1.
    pub fn off_spectrum(xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi < 1.0) {
            return Err(QError::InvalidParameter(format!(
                "off-spectrum xi must be in (0,1), got {xi}"
            )));
        }
        Ok(Self { x: 0.5 * (xi + 1.0 / xi), xi: Complex64::new(xi, 0.0) })
    }
}

/// S_n(x; a, b | q) by the defining terminating series
///
/// ```text
/// S_n = a^{-n} (ab;q)_n  _3 phi_2 (q^{-n}, a xi, a/xi; ab, 0; q, q).
/// ```
///
/// The raw sum cancels catastrophically in binary64 once q^{n(n-1)/2} dwarfs
/// a^n (its terms grow like q^{-n(n-1)/2} while the value stays O(1)), so the
/// same finite sum is evaluated through the exact factorization
///
/// ```text
/// S_n = xi^{-n} (a xi;q)_n  _2 phi_1 (q^{-n}, b/xi; q^{1-n}/(a xi); q, q xi/a),
/// ```
///
/// whose terms all stay O(1). The two forms are pinned against each other in
/// the tests on the region where direct summation is well conditioned.
///
/// Requires a != 0 (the prefactor a^{-n}); route a = 0 through
/// [`asc_eval_rec`].
pub fn asc_eval_def(n: usize, p: &SpectralPoint, par: &AscParams, ctx: &QContext) -> Result<Complex64> {
    if par.a.norm() == 0.0 {
        return Err(QError::ZeroParameter("a (prefactor a^{-n} of the defining series)"));
    }
    let q = ctx.q();
    let axi = par.a * p.xi;
    let spec = HypergeometricSpec::new(
        vec![Complex64::new(q.powi(-(n as i32)), 0.0), par.b / p.xi],
        vec![Complex64::new(q.powi(1 - n as i32), 0.0) / axi],
        Complex64::new(q, 0.0) * p.xi / par.a,
    );
    match phi(&spec, ctx) {
        Ok(series) => Ok(p.xi.powi(-(n as i32)) * qpoch_finite(axi, ctx, n) * series.value),
        // The factorization has a removable pole when a xi hits a q-power;
        // direct summation takes over there.
        Err(QError::PoleInLowerParameter { .. }) => asc_def_forward(n, p, par, ctx),
        Err(e) => Err(e),
    }
}

/// Verbatim forward summation of the defining series. Well conditioned only
/// while q^{-n(n-1)/2} stays small against |a|^n; the tests use it to anchor
/// the stable factorization in [`asc_eval_def`].
pub(crate) fn asc_def_forward(n: usize, p: &SpectralPoint, par: &AscParams, ctx: &QContext) -> Result<Complex64> {
    let q = ctx.q();
    let ab = par.a * par.b;
    let spec = HypergeometricSpec::new(
        vec![Complex64::new(q.powi(-(n as i32)), 0.0), par.a * p.xi, par.a / p.xi],
        vec![ab, Complex64::new(0.0, 0.0)],
        Complex64::new(q, 0.0),
    );
    let series = phi(&spec, ctx)?;
    Ok(par.a.powi(-(n as i32)) * qpoch_finite(ab, ctx, n) * series.value)
}

/// S_n by the three-term recurrence
///
/// ```text
/// S_{n+1}(x) = (2x - (a+b) q^n) S_n(x) - (1 - q^n)(1 - ab q^{n-1}) S_{n-1}(x),
/// S_{-1} = 0,  S_0 = 1.
/// ```
///
/// The coefficients are cross-validated against [`asc_eval_def`] in the test
/// suite (n <= 12 on a parameter grid) before anything else relies on them.
pub fn asc_eval_rec(n: usize, p: &SpectralPoint, par: &AscParams) -> Complex64 {
    asc_sequence(n, p, par)[n]
}

/// All of S_0 .. S_{n_max} at one point, by the same recurrence.
pub fn asc_sequence(n_max: usize, p: &SpectralPoint, par: &AscParams) -> Vec<Complex64> {
    let q = par.q;
    let two_x = Complex64::new(2.0 * p.x, 0.0);
    let apb = par.a + par.b;
    let ab = par.a * par.b;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1.0, 0.0);
    out.push(cur);
    let mut qn = 1.0;
    for _ in 0..n_max {
        let next = (two_x - apb * qn) * cur - (1.0 - qn) * (Complex64::new(1.0, 0.0) - ab * qn / q) * prev;
        prev = cur;
        cur = next;
        out.push(cur);
        qn *= q;
    }
    out
}

/// Connection coefficients between two Al-Salam-Chihara families sharing b:
///
/// ```text
/// S_n(x; alpha, b) = sum_{k=0}^n c_{k,n}(alpha; a) S_k(x; a, b),
/// c_{k,n}(alpha; a) = (q^{-n};q)_k/(q;q)_k a^{n-k} (-1)^k q^{nk - k(k-1)/2}
///                     (alpha/a;q)_{n-k}.
/// ```
pub fn asc_connection_coeffs(
    alpha: Complex64,
    par: &AscParams,
    n: usize,
    ctx: &QContext,
) -> Result<Vec<Complex64>> {
    if par.a.norm() == 0.0 {
        return Err(QError::ZeroParameter("a (connection coefficients divide by a)"));
    }
    let q = ctx.q();
    let ratio = alpha / par.a;
    let mut out = Vec::with_capacity(n + 1);
    // (q^{-n};q)_k/(q;q)_k advanced multiplicatively
    let mut front = Complex64::new(1.0, 0.0);
    for k in 0..=n {
        let ki = k as i32;
        let c = front
            * par.a.powi((n - k) as i32)
            * sign(k)
            * q.powi(n as i32 * ki - ki * (ki - 1) / 2)
            * qpoch_finite(ratio, ctx, n - k);
        out.push(c);
        if k < n {
            front *= (1.0 - q.powi(k as i32 - n as i32)) / (1.0 - q.powi(k as i32 + 1));
        }
    }
    Ok(out)
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Asymptotic amplitude A(xi) = (a xi, b xi; q)_inf / (xi^2; q)_inf:
/// xi^n S_n((xi + 1/xi)/2; a, b) -> A(xi) as n -> infinity for |xi| < 1. On
/// the unit circle (|xi| = 1, xi^2 != 1) the same A enters the oscillatory
/// on-spectrum form 2 |A| cos(n theta - arg A).
pub fn asc_asymptotic_amplitude(xi: Complex64, par: &AscParams, ctx: &QContext) -> Result<Complex64> {
    if xi.norm() > 1.0 + 1e-14 {
        return Err(QError::DomainError(format!("amplitude needs |xi| <= 1, got {}", xi.norm())));
    }
    if (xi * xi - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
        return Err(QError::DomainError("amplitude diverges at xi^2 = 1".into()));
    }
    Ok(qpoch_ratio(&[par.a * xi, par.b * xi], &[xi * xi], ctx)?.value)
}

/// Parameters of the q-Charlier polynomials c_m(x; a; q); a > 0 keeps the
/// discrete orthogonality measure positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharlierParams {
    pub a: f64,
    q: f64,
}

impl CharlierParams {
    pub fn new(a: f64, q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(QError::InvalidParameter(format!("q must be in (0,1), got {q}")));
        }
        if !(a > 0.0) {
            return Err(QError::InvalidParameter(format!("q-Charlier parameter a must be > 0, got {a}")));
        }
        Ok(Self { a, q })
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }
}

/// c_m(x; a; q) = _2 phi_1 (q^{-m}, x; 0; q, -q^{m+1}/a), a terminating sum.
pub fn qcharlier_eval(m: usize, x: Complex64, par: &CharlierParams, ctx: &QContext) -> Result<Complex64> {
    let q = ctx.q();
    let spec = HypergeometricSpec::new(
        vec![Complex64::new(q.powi(-(m as i32)), 0.0), x],
        vec![Complex64::new(0.0, 0.0)],
        Complex64::new(-q.powi(m as i32 + 1) / par.a, 0.0),
    );
    Ok(phi(&spec, ctx)?.value)
}

/// The alternative form of the q-Charlier polynomial obtained by series
/// inversion:
///
/// ```text
/// c_m(x;a;q) = (-a)^{-m} q^{m^2} x^m (x^{-1} q^{1-m};q)_m
///              _1 phi_1 (q^{-m}; x^{-1} q^{1-m}; q, -a q^{1-m}/x).
/// ```
///
/// On the lattice x = q^{-h} with h <= m-1 the lower parameter degenerates to
/// q^{1-n0}; the combination is then taken in the regularized sense, using
/// `(L;q)_m phi = [(L;q)_inf phi] / (L q^m;q)_inf`.
pub fn qcharlier_eval_alt(m: usize, x: Complex64, par: &CharlierParams, ctx: &QContext) -> Result<Complex64> {
    if x.norm() == 0.0 {
        return Err(QError::ZeroParameter("x (alternative q-Charlier form divides by x)"));
    }
    let q = ctx.q();
    let lower = q.powi(1 - m as i32) / x;
    let w = -par.a * q.powi(1 - m as i32) / x;
    let upper = [Complex64::new(q.powi(-(m as i32)), 0.0)];
    let prefactor = Complex64::new(-par.a, 0.0).powi(-(m as i32))
        * q.powi((m * m) as i32)
        * x.powi(m as i32);
    // Degenerate lattice case: lower = q^{1-n0} with n0 >= 1.
    if let Some(j) = q_neg_power(lower, q) {
        let n0 = (j + 1) as i64;
        if n0 as usize <= m {
            let reg = phi_regularized(&upper, n0, &[], w, ctx)?;
            let den = qpoch_infinite(Complex64::new(q.powi(1 - n0 as i32 + m as i32), 0.0), ctx)?;
            return Ok(prefactor * reg.value / den.value);
        }
    }
    let series = phi(&HypergeometricSpec::new(upper.to_vec(), vec![lower], w), ctx)?;
    Ok(prefactor * qpoch_finite(lower, ctx, m) * series.value)
}

/// Moak's q-Laguerre polynomial
///
/// ```text
/// L_n^{(alpha)}(x; q) = ((q^{alpha+1};q)_n/(q;q)_n)
///                       _1 phi_1 (q^{-n}; q^{alpha+1}; q, -x q^{alpha+n+1}),
/// ```
///
/// for alpha > -1.
pub fn qlaguerre_eval(n: usize, alpha: f64, x: f64, ctx: &QContext) -> Result<f64> {
    if alpha <= -1.0 {
        return Err(QError::DomainError(format!("q-Laguerre needs alpha > -1, got {alpha}")));
    }
    let q = ctx.q();
    let qa = Complex64::new(q.powf(alpha + 1.0), 0.0);
    let spec = HypergeometricSpec::new(
        vec![Complex64::new(q.powi(-(n as i32)), 0.0)],
        vec![qa],
        Complex64::new(-x * q.powf(alpha + n as f64 + 1.0), 0.0),
    );
    let series = phi(&spec, ctx)?;
    let norm = qpoch_finite(qa, ctx, n) / qpoch_finite(Complex64::new(q, 0.0), ctx, n);
    Ok((norm * series.value).re)
}
