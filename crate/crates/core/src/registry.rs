//! Registry of verifiable identities: names, parameters with defaults, and
//! runners. The CLI `verify` and `sweep` commands dispatch through here.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::context::{QContext, QError, Result};
use crate::identity::{
    addition_residual, hansen_lommel_q_residual, heine_b0_residual, ks_addition_residual,
    lemma2_residual, one_phi_one_shift_residual, product_residual, qcharlier_extension_residual,
    qcharlier_extension_special_residual, qlaguerre_relation_residual, series_inversion_residual,
    AdditionCase, GrafInstance,
};
use crate::ortho::{asc_orthogonality_residual, lemma1_residual, qcharlier_orthogonality_residual};
use crate::poly::{AscParams, CharlierParams, SpectralPoint};
use crate::quad::QuadratureGrid;
use crate::report::{ParamValue, ResidualReport};

/// Parameter map for one verification case.
pub type ParamMap = BTreeMap<String, ParamValue>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Int,
    Real,
    Complex,
}

/// One parameter an identity accepts.
#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: ParamValue,
}

const fn int(name: &'static str, default: i64) -> ParamSpec {
    ParamSpec { name, kind: ParamKind::Int, default: ParamValue::Int(default) }
}

const fn real(name: &'static str, default: f64) -> ParamSpec {
    ParamSpec { name, kind: ParamKind::Real, default: ParamValue::Real(default) }
}

const fn complex(name: &'static str, re: f64, im: f64) -> ParamSpec {
    ParamSpec { name, kind: ParamKind::Complex, default: ParamValue::Complex(Complex64::new(re, im)) }
}

/// A registered identity.
pub struct IdentitySpec {
    pub name: &'static str,
    pub description: &'static str,
    pub params: &'static [ParamSpec],
    /// Residual budget in force when no --tol override is given.
    pub default_tol: f64,
    run: fn(&Resolved, &QContext) -> Result<ResidualReport>,
}

impl IdentitySpec {
    /// Run the identity on `params` (axis values merged over the defaults).
    ///
    /// Evaluation always runs at a tight internal tolerance so reported tail
    /// bounds stay far below the pass budget; `tol` (or the identity default)
    /// is the budget the status is judged against.
    pub fn run(&self, params: &ParamMap, tol: Option<f64>) -> Result<ResidualReport> {
        for name in params.keys() {
            if name != "q" && !self.params.iter().any(|p| p.name == name) {
                return Err(QError::InvalidParameter(format!(
                    "'{name}' is not a parameter of identity '{}'",
                    self.name
                )));
            }
        }
        let resolved = Resolved::new(self, params)?;
        let ctx = QContext::new(resolved.real("q")?)?.with_tol(1e-13)?;
        let mut report = (self.run)(&resolved, &ctx)?;
        report.tol_used = tol.unwrap_or(self.default_tol);
        let abs = report.abs_residual;
        report.status = if abs <= report.tol_used + report.tail_bound() {
            crate::report::Status::Pass
        } else {
            crate::report::Status::Fail
        };
        Ok(report)
    }
}

/// Defaults overlaid with user parameters.
struct Resolved<'a> {
    spec: &'a IdentitySpec,
    params: &'a ParamMap,
}

impl<'a> Resolved<'a> {
    fn new(spec: &'a IdentitySpec, params: &'a ParamMap) -> Result<Self> {
        Ok(Self { spec, params })
    }

    fn value(&self, name: &str) -> ParamValue {
        if let Some(v) = self.params.get(name) {
            return *v;
        }
        if name == "q" {
            return ParamValue::Real(0.5);
        }
        self.spec
            .params
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.default)
            .expect("registry names are consistent")
    }

    fn real(&self, name: &str) -> Result<f64> {
        self.value(name)
            .as_f64()
            .ok_or_else(|| QError::InvalidParameter(format!("parameter '{name}' must be real")))
    }

    fn integer(&self, name: &str) -> Result<i64> {
        self.value(name)
            .as_i64()
            .ok_or_else(|| QError::InvalidParameter(format!("parameter '{name}' must be an integer")))
    }

    fn nonneg(&self, name: &str) -> Result<usize> {
        let v = self.integer(name)?;
        if v < 0 {
            return Err(QError::InvalidParameter(format!("parameter '{name}' must be >= 0")));
        }
        Ok(v as usize)
    }

    fn cplx(&self, name: &str) -> Complex64 {
        self.value(name).as_complex()
    }
}

fn grid_default() -> QuadratureGrid {
    QuadratureGrid::default()
}

fn run_addition(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    let case = AdditionCase::new(
        r.cplx("a"),
        r.cplx("b"),
        r.cplx("z"),
        r.real("nu")?,
        r.nonneg("m")?,
        SpectralPoint::from_theta(r.real("theta")?),
    );
    addition_residual(&case, r.nonneg("N")?, ctx)
}

fn run_product(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    let case = AdditionCase::new(
        r.cplx("a"),
        r.cplx("b"),
        r.cplx("z"),
        r.real("nu")?,
        r.nonneg("m")?,
        SpectralPoint::from_theta(r.real("theta")?),
    );
    product_residual(&case, r.integer("n")?, &grid_default(), ctx)
}

fn run_lemma1(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    let par = AscParams::new(r.cplx("a"), r.cplx("b"), ctx.q())?;
    lemma1_residual(
        r.nonneg("m")?,
        r.integer("n")?,
        r.nonneg("r")?,
        r.real("nu")?,
        &par,
        &grid_default(),
        ctx,
    )
}

fn run_lemma2(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    lemma2_residual(
        r.cplx("a"),
        r.cplx("b"),
        r.cplx("c"),
        r.cplx("d"),
        r.cplx("z"),
        r.real("mu")?,
        r.real("nu")?,
        ctx,
    )
}

fn run_inversion(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    series_inversion_residual(
        r.nonneg("p")?,
        r.cplx("a"),
        r.cplx("b"),
        r.cplx("c"),
        r.cplx("d"),
        r.cplx("z"),
        ctx,
    )
}

fn run_heine0(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    heine_b0_residual(r.cplx("a"), r.cplx("c"), r.cplx("z"), ctx)
}

fn run_ks(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    let nu = r.integer("nu")?;
    if nu < 0 {
        return Err(QError::DomainError("ks is implemented for integer nu >= 0".into()));
    }
    ks_addition_residual(nu as u32, r.real("x")?, r.real("y")?, r.cplx("s"), r.nonneg("N")?, ctx)
}

fn run_hansen_lommel_q(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    hansen_lommel_q_residual(r.integer("p")?, r.nonneg("m")?, r.cplx("z"), r.nonneg("N")?, ctx)
}

fn run_charlier_ortho(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    let par = CharlierParams::new(r.real("a")?, ctx.q())?;
    qcharlier_orthogonality_residual(r.nonneg("m")?, r.nonneg("r")?, &par, r.nonneg("cap")?, ctx)
}

fn run_charlier_ext(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    qcharlier_extension_residual(
        r.nonneg("m")?,
        r.nonneg("r")?,
        r.real("mu")?,
        r.real("alpha")?,
        r.real("beta")?,
        &SpectralPoint::from_theta(r.real("theta")?),
        r.nonneg("N")?,
        ctx,
    )
}

fn run_charlier_ext_special(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    qcharlier_extension_special_residual(
        r.nonneg("m")?,
        r.nonneg("r")?,
        r.real("mu")?,
        r.real("alpha")?,
        r.real("beta")?,
        r.nonneg("N")?,
        ctx,
    )
}

fn run_asc_ortho(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    let par = AscParams::new(r.cplx("a"), r.cplx("b"), ctx.q())?;
    asc_orthogonality_residual(r.nonneg("k")?, r.nonneg("l")?, &par, &grid_default(), ctx)
}

fn run_graf(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    let inst = GrafInstance::new(r.real("nu")?, r.real("x")?, r.real("y")?, r.real("psi")?);
    crate::identity::graf_classical_residual(&inst, r.nonneg("M")?, ctx)
}

fn run_graf_product(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    let inst = GrafInstance::new(r.real("nu")?, r.real("x")?, r.real("y")?, 0.0);
    // the integrand carries the Bessel oracle's own noise floor (~tol/1000),
    // so the doubling threshold must sit above it
    let threshold = (ctx.tol() * 1e-2).max(1e-12);
    crate::identity::graf_product_classical_residual(
        &inst,
        r.integer("m")?,
        &QuadratureGrid::new(32, 1024, threshold)?,
        ctx,
    )
}

fn run_qlag_relation(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    qlaguerre_relation_residual(r.nonneg("m")?, r.real("alpha")?, r.real("a")?, ctx)
}

fn run_one_phi_one_shift(r: &Resolved, ctx: &QContext) -> Result<ResidualReport> {
    one_phi_one_shift_residual(r.cplx("a"), r.cplx("z"), r.integer("n")?, ctx)
}

static REGISTRY: &[IdentitySpec] = &[
    IdentitySpec {
        name: "addition",
        description: "addition formula: prefactored 2phi1 times a shifted ASC polynomial as an ASC expansion",
        params: &[
            complex("a", 0.3, 0.0),
            complex("b", 0.2, 0.0),
            complex("z", 0.4, 0.0),
            real("nu", 1.5),
            int("m", 2),
            real("theta", 1.0471975511965976),
            int("N", 40),
        ],
        default_tol: 1e-9,
        run: run_addition,
    },
    IdentitySpec {
        name: "product",
        description: "product formula: weight integral of the addition left member against S_{n+m}",
        params: &[
            complex("a", 0.3, 0.0),
            complex("b", 0.2, 0.0),
            complex("z", 0.4, 0.0),
            real("nu", 1.5),
            int("m", 2),
            int("n", 1),
            real("theta", 0.0),
        ],
        default_tol: 1e-8,
        run: run_product,
    },
    IdentitySpec {
        name: "lemma1",
        description: "connection-coefficient integral lemma (weight with finite extra factor)",
        params: &[
            complex("a", 0.3, 0.0),
            complex("b", 0.2, 0.0),
            real("nu", 1.0),
            int("m", 1),
            int("n", 0),
            int("r", 0),
        ],
        default_tol: 1e-9,
        run: run_lemma1,
    },
    IdentitySpec {
        name: "lemma2",
        description: "expansion of a product of prefactored series into terminating 3phi2s",
        params: &[
            complex("a", 0.2, 0.0),
            complex("b", 0.3, 0.0),
            complex("c", 0.4, 0.0),
            complex("d", 0.5, 0.0),
            complex("z", 0.6, 0.0),
            real("mu", 0.5),
            real("nu", 1.0),
        ],
        default_tol: 1e-10,
        run: run_lemma2,
    },
    IdentitySpec {
        name: "inversion",
        description: "terminating 3phi2 series inversion (sum reversal)",
        params: &[
            int("p", 3),
            complex("a", 0.3, 0.0),
            complex("b", 0.4, 0.0),
            complex("c", 0.5, 0.0),
            complex("d", 0.6, 0.0),
            complex("z", 0.7, 0.0),
        ],
        default_tol: 1e-11,
        run: run_inversion,
    },
    IdentitySpec {
        name: "heine0",
        description: "b -> 0 Heine transformation: 2phi1(a,0;c) to 1phi1(c/a;c)",
        params: &[complex("a", 0.5, 0.0), complex("c", 0.3, 0.0), complex("z", 0.6, 0.0)],
        default_tol: 1e-11,
        run: run_heine0,
    },
    IdentitySpec {
        name: "ks",
        description: "bilateral q-Bessel addition formula (integer nu)",
        params: &[int("nu", 0), real("x", 0.3), real("y", 0.2), complex("s", 0.8, 0.0), int("N", 30)],
        default_tol: 1e-9,
        run: run_ks,
    },
    IdentitySpec {
        name: "hansen_lommel_q",
        description: "q-analogue of the Hansen-Lommel orthogonality from the addition formula",
        params: &[int("p", 0), int("m", 2), complex("z", 0.4, 0.0), int("N", 40)],
        default_tol: 1e-10,
        run: run_hansen_lommel_q,
    },
    IdentitySpec {
        name: "charlier_ortho",
        description: "discrete q-Charlier orthogonality on the lattice q^{-h}",
        params: &[int("m", 0), int("r", 0), real("a", 0.7), int("cap", 64)],
        default_tol: 1e-10,
        run: run_charlier_ortho,
    },
    IdentitySpec {
        name: "charlier_ext",
        description: "extension of the q-Charlier orthogonality carrying an ASC factor",
        params: &[
            int("m", 1),
            int("r", 2),
            real("mu", 0.5),
            real("alpha", 0.6),
            real("beta", 0.8),
            real("theta", 1.0),
            int("N", 60),
        ],
        default_tol: 1e-9,
        run: run_charlier_ext,
    },
    IdentitySpec {
        name: "charlier_ext_special",
        description: "pure q-Charlier extension (ASC factor at its reduction point)",
        params: &[
            int("m", 2),
            int("r", 1),
            real("mu", 1.0),
            real("alpha", 0.5),
            real("beta", 0.7),
            int("N", 64),
        ],
        default_tol: 1e-9,
        run: run_charlier_ext_special,
    },
    IdentitySpec {
        name: "asc_ortho",
        description: "Al-Salam-Chihara orthogonality under the Askey-Wilson-type weight",
        params: &[int("k", 3), int("l", 5), complex("a", 0.4, 0.0), complex("b", 0.3, 0.0)],
        default_tol: 1e-9,
        run: run_asc_ortho,
    },
    IdentitySpec {
        name: "graf",
        description: "classical Graf addition formula for Bessel functions",
        params: &[real("nu", 0.5), real("x", 2.0), real("y", 0.5), real("psi", 1.0), int("M", 40)],
        default_tol: 1e-10,
        run: run_graf,
    },
    IdentitySpec {
        name: "graf_product",
        description: "classical Graf product formula (full-period quadrature)",
        params: &[real("nu", 0.5), int("m", 1), real("x", 2.0), real("y", 0.5)],
        default_tol: 1e-9,
        run: run_graf_product,
    },
    IdentitySpec {
        name: "qlag_relation",
        description: "q-Charlier / q-Laguerre relation on the shifted lattice",
        params: &[int("m", 4), real("alpha", 0.5), real("a", 0.6)],
        default_tol: 1e-10,
        run: run_qlag_relation,
    },
    IdentitySpec {
        name: "one_phi_one_shift",
        description: "1phi1 index-shift identity (regularized on its singular side)",
        params: &[complex("a", 0.3, 0.0), complex("z", 0.7, 0.0), int("n", 3)],
        default_tol: 1e-10,
        run: run_one_phi_one_shift,
    },
];

/// Every registered identity, in registry order.
pub fn registry() -> &'static [IdentitySpec] {
    REGISTRY
}

/// Find an identity by name.
pub fn find(name: &str) -> Result<&'static IdentitySpec> {
    REGISTRY
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| QError::UnknownIdentity(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_identities_pass_on_defaults() {
        for spec in registry() {
            let report = spec.run(&ParamMap::new(), None).unwrap();
            assert!(
                report.passed(),
                "{} failed on defaults: residual {:.3e}",
                spec.name,
                report.abs_residual
            );
        }
    }

    #[test]
    fn unknown_identity_and_parameter_rejected() {
        assert!(matches!(find("nope"), Err(QError::UnknownIdentity(_))));
        let spec = find("addition").unwrap();
        let mut params = ParamMap::new();
        params.insert("bogus".into(), ParamValue::Real(1.0));
        assert!(spec.run(&params, None).is_err());
    }

    #[test]
    fn parameter_overrides_apply() {
        let spec = find("graf").unwrap();
        let mut params = ParamMap::new();
        params.insert("nu".into(), ParamValue::Real(-3.0));
        params.insert("x".into(), ParamValue::Real(1.0));
        params.insert("y".into(), ParamValue::Real(2.0));
        params.insert("psi".into(), ParamValue::Real(2.0));
        params.insert("M".into(), ParamValue::Int(60));
        let report = spec.run(&params, None).unwrap();
        assert!(report.passed(), "{report:?}");
    }
}
