//! `qsf` -- evaluate q-special functions, verify identities, and sweep
//! parameter grids with CSV/JSON residual reports.
//!
//! Exit codes: 0 success (all checks pass), 1 residual failure, 2 domain or
//! usage error. CI can rely on them.

use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use qsf::registry::{self, ParamMap};
use qsf::report::{fmt_f64, ParamValue};
use qsf::sweep::{parse_param_value, run_sweep, to_csv, to_json, SweepSpec};
use qsf::{QContext, SpectralPoint};

#[derive(Parser)]
#[command(name = "qsf", version, about = "q-series special functions and identity verification")]
struct Cli {
    /// Base q (strictly between 0 and 1)
    #[arg(long, global = true, default_value_t = 0.5)]
    q: f64,
    /// Target absolute accuracy for series and products
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Cap on series terms
    #[arg(long, global = true)]
    max_terms: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a primitive function at key=value parameters
    Eval {
        /// One of: qpoch, phi, qgamma, asc, qcharlier, qlaguerre, weight, bessel_j
        function: String,
        /// Parameters as key=value (complex literals like z=0.3+0.2i)
        params: Vec<String>,
        /// Emit JSON (eval always prints JSON; the flag is accepted for symmetry)
        #[arg(long)]
        json: bool,
    },
    /// Verify one identity at key=value parameters
    Verify {
        /// Identity name (see list-identities)
        identity: String,
        params: Vec<String>,
        /// Residual budget (identity default when omitted)
        #[arg(long)]
        tol: Option<f64>,
        /// Print the full report as JSON instead of a summary line
        #[arg(long)]
        json: bool,
    },
    /// Run a parameter-grid sweep from a JSON spec file
    Sweep {
        /// Path to the sweep spec (JSON)
        spec: String,
        /// Output path (defaults to the spec's `out`, else stdout)
        #[arg(long)]
        out: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Evaluate grid points in parallel (output order is unchanged)
        #[arg(long)]
        parallel: bool,
        /// Suppress the timestamp header line (report bodies are deterministic)
        #[arg(long)]
        no_header: bool,
    },
    /// List the registered identities and their parameters
    ListIdentities,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let mut ctx = QContext::new(cli.q).map_err(|e| e.to_string())?;
    if let Some(tol) = cli.tol {
        ctx = ctx.with_tol(tol).map_err(|e| e.to_string())?;
    }
    if let Some(cap) = cli.max_terms {
        ctx = ctx.with_max_terms(cap).map_err(|e| e.to_string())?;
    }

    match cli.command {
        Command::Eval { function, params, json: _ } => {
            let map = parse_raw_params(&params)?;
            let out = eval_function(&function, &map, &ctx).map_err(|e| e.to_string())?;
            println!("{out}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { identity, params, tol, json } => {
            let spec = registry::find(&identity).map_err(|e| e.to_string())?;
            let mut map = parse_params(&params)?;
            map.entry("q".to_string()).or_insert(ParamValue::Real(cli.q));
            let report = spec.run(&map, tol.or(cli.tol)).map_err(|e| e.to_string())?;
            if json {
                println!("{}", to_json(std::slice::from_ref(&report)));
            } else {
                println!(
                    "{}: {} abs_residual={:.3e} rel_residual={:.3e} tol={:.1e} tail={:.1e} [{}]",
                    report.identity,
                    report.status,
                    report.abs_residual,
                    report.rel_residual,
                    report.tol_used,
                    report.tail_bound(),
                    report.case
                );
                for flag in &report.flags {
                    println!("  flag: {flag}");
                }
            }
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Sweep { spec, out, format, parallel, no_header } => {
            let text = std::fs::read_to_string(&spec).map_err(|e| format!("{spec}: {e}"))?;
            let sweep_spec = SweepSpec::from_json(&text).map_err(|e| e.to_string())?;
            let result = run_sweep(&sweep_spec, parallel).map_err(|e| e.to_string())?;
            let body = match format {
                Format::Csv => to_csv(&result.rows, !no_header),
                Format::Json => to_json(&result.rows),
            };
            let target = out.or(sweep_spec.out.clone());
            match target {
                Some(path) => {
                    let mut file = std::fs::File::create(&path).map_err(|e| format!("{path}: {e}"))?;
                    file.write_all(body.as_bytes()).map_err(|e| e.to_string())?;
                }
                None => print!("{body}"),
            }
            let s = &result.summary;
            eprintln!(
                "{} cases: {} passed, {} failed; max abs residual {:.3e} at [{}]",
                s.total, s.passed, s.failed, s.max_abs_residual, s.argmax_case
            );
            Ok(if result.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::ListIdentities => {
            for spec in registry::registry() {
                let params: Vec<&str> = spec.params.iter().map(|p| p.name).collect();
                println!("{:<22} tol={:<8.0e} params: {}", spec.name, spec.default_tol, params.join(", "));
                println!("{:<22} {}", "", spec.description);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_params(pairs: &[String]) -> Result<ParamMap, String> {
    let mut map = BTreeMap::new();
    for pair in pairs {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got '{pair}'"))?;
        let parsed = parse_param_value(value).map_err(|e| e.to_string())?;
        map.insert(key.trim().to_string(), parsed);
    }
    Ok(map)
}

/// Raw key=value map for `eval`, where list-valued parameters
/// (upper=0.3,0.2) stay unsplit until the function decides.
type RawParams = BTreeMap<String, String>;

fn parse_raw_params(pairs: &[String]) -> Result<RawParams, String> {
    let mut map = BTreeMap::new();
    for pair in pairs {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got '{pair}'"))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn get<'a>(map: &'a RawParams, key: &str) -> qsf::Result<&'a str> {
    map.get(key)
        .map(|s| s.as_str())
        .ok_or_else(|| qsf::QError::InvalidParameter(format!("missing parameter '{key}'")))
}

fn get_value(map: &RawParams, key: &str) -> qsf::Result<ParamValue> {
    parse_param_value(get(map, key)?)
}

fn get_real(map: &RawParams, key: &str) -> qsf::Result<f64> {
    get_value(map, key)?
        .as_f64()
        .ok_or_else(|| qsf::QError::InvalidParameter(format!("parameter '{key}' must be real")))
}

fn get_usize(map: &RawParams, key: &str) -> qsf::Result<usize> {
    let v = get_value(map, key)?
        .as_i64()
        .ok_or_else(|| qsf::QError::InvalidParameter(format!("parameter '{key}' must be an integer")))?;
    if v < 0 {
        return Err(qsf::QError::InvalidParameter(format!("parameter '{key}' must be >= 0")));
    }
    Ok(v as usize)
}

fn get_complex(map: &RawParams, key: &str) -> qsf::Result<Complex64> {
    Ok(get_value(map, key)?.as_complex())
}

fn json_value(value: Complex64, tail: Option<f64>, terms: Option<usize>) -> String {
    let mut obj = serde_json::Map::new();
    obj.insert("value".into(), serde_json::Value::String(fmt_f64(value.re)));
    if value.im != 0.0 {
        obj.insert("value_im".into(), serde_json::Value::String(fmt_f64(value.im)));
    }
    if let Some(t) = tail {
        obj.insert("tail_bound".into(), serde_json::Value::String(fmt_f64(t)));
    }
    if let Some(n) = terms {
        obj.insert("terms_used".into(), serde_json::Value::Number(n.into()));
    }
    serde_json::to_string(&obj).expect("serializable")
}

fn eval_function(function: &str, map: &RawParams, ctx: &QContext) -> qsf::Result<String> {
    match function {
        "qpoch" => {
            let a = get_complex(map, "a")?;
            match map.get("k") {
                Some(_) => {
                    let k = get_usize(map, "k")?;
                    Ok(json_value(qsf::series::qpoch_finite(a, ctx, k), None, None))
                }
                None => {
                    let v = qsf::series::qpoch_infinite(a, ctx)?;
                    Ok(json_value(v.value, Some(v.tail_bound), Some(v.terms_used)))
                }
            }
        }
        "phi" => {
            let upper = parse_list(map, "upper")?;
            let lower = parse_list(map, "lower")?;
            let z = get_complex(map, "z")?;
            let spec = qsf::series::HypergeometricSpec::new(upper, lower, z);
            let v = qsf::series::phi(&spec, ctx)?;
            Ok(json_value(v.value, Some(v.tail_bound), Some(v.terms_used)))
        }
        "qgamma" => {
            let x = get_real(map, "x")?;
            Ok(json_value(Complex64::new(qsf::qgamma(x, ctx)?, 0.0), None, None))
        }
        "asc" => {
            let n = get_usize(map, "n")?;
            let par = qsf::AscParams::new(get_complex(map, "a")?, get_complex(map, "b")?, ctx.q())?;
            let p = SpectralPoint::from_theta(get_real(map, "theta")?);
            Ok(json_value(qsf::poly::asc_eval_rec(n, &p, &par), None, None))
        }
        "qcharlier" => {
            let m = get_usize(map, "m")?;
            let par = qsf::CharlierParams::new(get_real(map, "a")?, ctx.q())?;
            Ok(json_value(qsf::poly::qcharlier_eval(m, get_complex(map, "x")?, &par, ctx)?, None, None))
        }
        "qlaguerre" => {
            let n = get_usize(map, "n")?;
            let v = qsf::poly::qlaguerre_eval(n, get_real(map, "alpha")?, get_real(map, "x")?, ctx)?;
            Ok(json_value(Complex64::new(v, 0.0), None, None))
        }
        "weight" => {
            let par = qsf::AscParams::new(get_complex(map, "a")?, get_complex(map, "b")?, ctx.q())?;
            let r = match map.get("r") {
                Some(_) => get_usize(map, "r")?,
                None => 0,
            };
            let w = qsf::ortho::WeightSpec::new(par, r)?;
            let v = qsf::ortho::weight_eval(get_real(map, "theta")?, &w, ctx)?;
            Ok(json_value(Complex64::new(v, 0.0), None, None))
        }
        "bessel_j" => {
            let v = qsf::bessel_j(get_real(map, "nu")?, get_real(map, "z")?, ctx)?;
            Ok(json_value(Complex64::new(v, 0.0), None, None))
        }
        other => Err(qsf::QError::InvalidParameter(format!(
            "unknown function '{other}' (expected qpoch, phi, qgamma, asc, qcharlier, qlaguerre, weight, bessel_j)"
        ))),
    }
}

fn parse_list(map: &RawParams, key: &str) -> qsf::Result<Vec<Complex64>> {
    match map.get(key) {
        None => Ok(Vec::new()),
        Some(raw) => raw
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_param_value(s).map(|v| v.as_complex()))
            .collect(),
    }
}
