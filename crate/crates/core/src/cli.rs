//! Command-line runs and their reports.
//!
//! Every run produces one [`ReportRecord`]:
//! `{"config": .., "result": .., "duration_ms": .., "version": ..}`.
//! Tabular results keep their table under `result.rows`, which is what the
//! CSV writer prints.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cech::{TruncatedComplex, W_STAR};
use crate::cohomology::{
    class_divisibility_index, class_in_image, colimit_rank, cohomology_of, death_level,
    default_h6j_weights, divisibility_trace, h6j_comparison, sweep, universal_coefficients_check,
};
use crate::error::{Error, Result};
use crate::polyring::CoefficientDomain;
use crate::residue::{
    analytic_period_magnitude, homotopy_invariance_check, integrate, GridSpec, IntegrandSelector, Integral, Method,
    DEFAULT_GRID, DEFAULT_MC_SAMPLES, DEFAULT_SEED, INVARIANCE_TOLERANCE, VANISHING_RATIO,
};
use crate::weights::Weight;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const THREADS_ENV: &str = "DETCOH_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Cohomology of one truncated complex
    Compute,
    /// Cohomology across a range of levels
    Sweep,
    /// Whether the class of 1/(f1 f2 f3) is a boundary
    Class,
    /// Death level of the class in characteristic p
    Death,
    /// Ranks of the transition maps on cohomology
    Colim,
    /// Universal-coefficient check between Z and F_p builds
    Ucheck,
    /// Comparison table against H^6_J weight dimensions
    H6j,
    /// Residue-cycle integrals and homotopy checks
    Residue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "detcoh", version, about = "Weight-graded local cohomology of 2x2 minors", args_override_self = true)]
struct Cli {
    command: Command,
    /// Weight "r1,r2,c1,c2,c3"
    #[arg(long, allow_hyphen_values = true)]
    weight: Option<String>,
    /// Truncation level
    #[arg(long)]
    level: Option<u32>,
    /// Level range "lo..hi" (inclusive)
    #[arg(long)]
    levels: Option<String>,
    /// Highest level probed by `death`
    #[arg(long)]
    max_level: Option<u32>,
    /// Cohomological degree for `colim`
    #[arg(long)]
    degree: Option<usize>,
    /// Coefficients: q, z or fp (with --p)
    #[arg(long)]
    coeff: Option<String>,
    #[arg(long)]
    p: Option<u64>,
    /// Comma-separated primes
    #[arg(long)]
    primes: Option<String>,
    /// Integrand: inv_f123, inv_f12, inv_f13, inv_f23, poly_over_f23_sq, all, or custom:<num>:<e1>,<e2>,<e3>
    #[arg(long)]
    phi: Option<String>,
    /// Nodes per dimension
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Run the homotopy check over --lambdas
    #[arg(long)]
    homotopy: bool,
    /// Comma-separated deformation parameters
    #[arg(long)]
    lambdas: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Shorthand for --format json
    #[arg(long)]
    json: bool,
    #[arg(long)]
    threads: Option<usize>,
    /// File of "key = value" lines; flags on the command line win
    #[arg(long)]
    config: Option<String>,
    /// Include the differentials as "row col value" triple lists
    #[arg(long)]
    dump: bool,
    /// Report duration_ms as 0 so reruns are byte-identical
    #[arg(long)]
    no_timing: bool,
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Weight>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Weight>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<CoefficientDomain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default)]
    pub dump: bool,
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub config: RunConfig,
    pub result: Value,
    pub duration_ms: u64,
    pub version: String,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_range(s: &str) -> Result<[u32; 2]> {
    let bad = || usage(format!("level range must look like lo..hi, got {s:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo == 0 || lo > hi {
        return Err(Error::InvalidRange(format!("level range {lo}..{hi} is empty or starts below 1")));
    }
    Ok([lo, hi])
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| usage(format!("bad {what} {x:?}"))))
        .collect::<Result<Vec<T>>>()?;
    if v.is_empty() {
        return Err(Error::InvalidRange(format!("empty {what} list")));
    }
    Ok(v)
}

fn parse_domain(coeff: Option<&str>, p: Option<u64>) -> Result<CoefficientDomain> {
    let coeff = coeff.map(|c| c.trim().to_ascii_lowercase());
    match (coeff.as_deref(), p) {
        (None, None) => Ok(CoefficientDomain::Rational),
        (None | Some("fp"), Some(p)) => CoefficientDomain::prime_field(p),
        (Some("fp"), None) => Err(usage("--coeff fp needs --p")),
        (Some(c), Some(_)) => Err(usage(format!("--p only applies to --coeff fp, got --coeff {c}"))),
        (Some(c), None) => c.parse(),
    }
}

/// Turns a config file into argv-style flags, placed before the real flags.
fn config_args(path: &str) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {path:?}: {e}")))?;
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{path}:{}: expected key = value", no + 1)))?;
        let key = k.trim().replace('_', "-");
        let val = v.trim().trim_matches('"');
        if key == "config" || key == "command" {
            return Err(usage(format!("{path}:{}: {key} cannot be set from a config file", no + 1)));
        }
        match val {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            _ => out.push(format!("--{key}={val}").into()),
        }
    }
    Ok(out)
}

fn with_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--config" {
            path = it.next().map(|p| p.to_string_lossy().into_owned());
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    // program name, then the command, then file flags, then the real flags
    let mut out = vec![argv[0].clone()];
    let cmd_pos = argv.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-'));
    let file = config_args(&path)?;
    match cmd_pos {
        Some(0) => {
            out.push(argv[1].clone());
            out.extend(file);
            out.extend(argv[2..].iter().cloned());
        }
        _ => {
            out.extend(file);
            out.extend(argv[1..].iter().cloned());
        }
    }
    Ok(out)
}

fn resolve(cli: Cli) -> Result<RunConfig> {
    let weight = cli.weight.as_deref().map(str::parse::<Weight>).transpose()?;
    let levels = cli.levels.as_deref().map(parse_range).transpose()?;
    if cli.level == Some(0) {
        return Err(Error::InvalidRange("truncation level must be at least 1".into()));
    }
    let domain = parse_domain(cli.coeff.as_deref(), cli.p)?;
    let primes = cli.primes.as_deref().map(|s| parse_list::<u64>(s, "prime")).transpose()?;
    if let Some(ps) = &primes {
        for &p in ps {
            CoefficientDomain::prime_field(p)?;
        }
    }
    let format = if cli.json { Format::Json } else { cli.format.unwrap_or_default() };
    let threads = cli.threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    if threads == Some(0) {
        return Err(Error::InvalidRange("thread count must be positive".into()));
    }
    let mut cfg = RunConfig {
        command: cli.command,
        weight: None,
        weights: None,
        level: None,
        levels: None,
        degree: None,
        domain: None,
        primes: None,
        phi: None,
        grid: None,
        lambdas: None,
        dump: cli.dump,
        format,
        threads,
        timing: !cli.no_timing,
    };
    let single_level = |default: u32| cli.level.or(levels.map(|r| r[0])).unwrap_or(default);
    match cli.command {
        Command::Compute => {
            cfg.weight = Some(weight.unwrap_or(W_STAR));
            cfg.level = Some(single_level(1));
            cfg.domain = Some(domain);
        }
        Command::Sweep => {
            cfg.weight = Some(weight.unwrap_or(W_STAR));
            cfg.levels = Some(levels.unwrap_or([1, cli.level.unwrap_or(6)]));
            cfg.domain = Some(domain);
        }
        Command::Class => {
            cfg.domain = Some(domain);
            match (cli.level, levels) {
                (Some(n), None) => cfg.level = Some(n),
                (None, Some(r)) => cfg.levels = Some(r),
                (None, None) => cfg.level = Some(1),
                (Some(_), Some(_)) => return Err(usage("give either --level or --levels")),
            }
        }
        Command::Death => {
            cfg.primes = Some(primes.unwrap_or_else(|| vec![2, 3, 5]));
            cfg.level = Some(cli.max_level.or(cli.level).unwrap_or(10));
        }
        Command::Colim => {
            cfg.weight = Some(weight.unwrap_or(W_STAR));
            cfg.degree = Some(cli.degree.unwrap_or(3));
            if cfg.degree > Some(3) {
                return Err(Error::InvalidRange("degree must be in 0..=3".into()));
            }
            cfg.levels = Some(levels.unwrap_or([1, 6]));
            cfg.domain = Some(domain);
        }
        Command::Ucheck => {
            cfg.weight = Some(weight.unwrap_or(W_STAR));
            cfg.levels = Some(match (cli.level, levels) {
                (Some(n), None) => [n, n],
                (_, Some(r)) => r,
                (None, None) => [1, 4],
            });
            cfg.primes = Some(match (primes, cli.p) {
                (Some(ps), _) => ps,
                (None, Some(p)) => vec![p],
                (None, None) => vec![2, 3],
            });
        }
        Command::H6j => {
            cfg.weights = Some(weight.map_or_else(default_h6j_weights, |w| vec![w]));
            cfg.levels = Some(levels.unwrap_or([1, 8]));
            cfg.domain = Some(domain);
        }
        Command::Residue => {
            let phi = cli.phi.unwrap_or_else(|| "inv_f123".into());
            if phi != "all" {
                IntegrandSelector::parse(&phi)?;
            }
            cfg.phi = Some(phi);
            let method: Method = cli.method.as_deref().unwrap_or("quad").parse()?;
            cfg.grid = Some(GridSpec {
                method,
                nodes: cli.grid.unwrap_or(DEFAULT_GRID),
                samples: cli.samples.unwrap_or(DEFAULT_MC_SAMPLES),
                seed: cli.seed.unwrap_or(DEFAULT_SEED),
            });
            let lambdas = match (cli.homotopy, cli.lambdas.as_deref()) {
                (true, Some(s)) => parse_list::<f64>(s, "lambda")?,
                (true, None) => vec![0.0, 0.25, 0.5, 0.75, 1.0],
                (false, _) => vec![cli.lambda.unwrap_or(0.0)],
            };
            if lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
                return Err(Error::InvalidRange("lambda must lie in [0, 1]".into()));
            }
            cfg.lambdas = Some(lambdas);
        }
    }
    Ok(cfg)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn integral_value(i: &Integral<f64>) -> Value {
    json!({
        "re": i.value.re,
        "im": i.value.im,
        "abs": i.value.norm(),
        "error_estimate": i.error_estimate,
        "evaluations": i.evaluations,
    })
}

fn residue_result(cfg: &RunConfig) -> Result<Value> {
    let grid = cfg.grid.expect("resolved");
    let lambdas = cfg.lambdas.clone().expect("resolved");
    let phi = cfg.phi.clone().expect("resolved");
    if lambdas.len() > 1 {
        let phi = IntegrandSelector::parse(&phi)?;
        let r = homotopy_invariance_check(&phi, &lambdas, &grid, INVARIANCE_TOLERANCE)?;
        let rows: Vec<Value> = r
            .points
            .iter()
            .map(|p| {
                let mut v = integral_value(&p.integral);
                v["lambda"] = json!(p.lambda);
                v
            })
            .collect();
        return Ok(json!({
            "phi": r.integrand,
            "rows": rows,
            "max_abs_deviation": r.max_abs_deviation,
            "max_rel_deviation": r.max_rel_deviation,
            "tolerance": r.tolerance,
            "passes": r.passes,
        }));
    }
    let lambda = lambdas[0];
    if phi == "all" {
        let reference = integrate::<f64>(&IntegrandSelector::InvF123, lambda, &grid)?;
        let mut rows = vec![];
        let mut worst: f64 = 0.0;
        for name in IntegrandSelector::NAMED {
            let sel = IntegrandSelector::parse(name)?;
            let i = if sel == IntegrandSelector::InvF123 { reference } else { integrate::<f64>(&sel, lambda, &grid)? };
            let ratio = i.value.norm() / reference.value.norm();
            if sel != IntegrandSelector::InvF123 {
                worst = worst.max(ratio);
            }
            let mut v = integral_value(&i);
            v["phi"] = json!(name);
            v["localization"] = json!(sel.localization());
            v["ratio_to_inv_f123"] = json!(ratio);
            v["vanishes"] = json!(ratio < VANISHING_RATIO);
            rows.push(v);
        }
        // a separation of exactly 0/0 cannot occur: the reference is nonzero
        let separation = if worst == 0.0 { None } else { Some(1.0 / worst) };
        return Ok(json!({
            "lambda": lambda,
            "rows": rows,
            "separation": separation,
            "dichotomy": rows.iter().skip(1).all(|r| r["vanishes"] == json!(true)),
        }));
    }
    let sel = IntegrandSelector::parse(&phi)?;
    let i = integrate::<f64>(&sel, lambda, &grid)?;
    let mut v = integral_value(&i);
    v["phi"] = json!(sel.name());
    v["lambda"] = json!(lambda);
    v["localization"] = json!(sel.localization());
    v["relative_to_period"] = json!(i.value.norm() / analytic_period_magnitude::<f64>());
    Ok(v)
}

/// Computes the result payload for a resolved configuration.
pub fn execute(cfg: &RunConfig) -> Result<Value> {
    let domain = cfg.domain.unwrap_or(CoefficientDomain::Rational);
    match cfg.command {
        Command::Compute => {
            let w = cfg.weight.expect("resolved");
            let n = cfg.level.expect("resolved");
            let x = TruncatedComplex::build(w, n, domain);
            let r = cohomology_of(&x)?;
            let mut v = to_value(&r);
            v["h"] = json!(r.h());
            if cfg.dump {
                v["matrices"] = json!((0..3).map(|j| x.dump_differential(j)).collect::<Vec<_>>());
            }
            Ok(v)
        }
        Command::Sweep => {
            let w = cfg.weight.expect("resolved");
            let [lo, hi] = cfg.levels.expect("resolved");
            let rows: Vec<Value> = sweep(w, lo, hi, domain)?
                .iter()
                .map(|r| {
                    json!({
                        "level": r.level,
                        "dims": r.dims,
                        "h": r.h(),
                        "cohomology": r.cohomology,
                    })
                })
                .collect();
            Ok(json!({ "weight": w, "domain": domain, "rows": rows }))
        }
        Command::Class => {
            let row = |n: u32| -> Result<Value> {
                if domain == CoefficientDomain::Integer {
                    let idx = class_divisibility_index(n)?;
                    Ok(json!({
                        "level": n,
                        "in_image": idx.as_ref().is_some_and(num_traits::One::is_one),
                        "divisibility_index": idx.map(|m| m.to_string()),
                    }))
                } else {
                    Ok(json!({ "level": n, "in_image": class_in_image(n, domain)? }))
                }
            };
            if let Some([lo, hi]) = cfg.levels {
                let mut rows = (lo..=hi).map(row).collect::<Result<Vec<_>>>()?;
                if domain == CoefficientDomain::Integer {
                    for (r, t) in rows.iter_mut().zip(divisibility_trace(lo, hi)?) {
                        r["prime_factors"] = json!(t.prime_factors);
                    }
                }
                Ok(json!({ "weight": W_STAR, "domain": domain, "rows": rows }))
            } else {
                let mut v = row(cfg.level.expect("resolved"))?;
                v["weight"] = json!(W_STAR);
                v["domain"] = json!(domain);
                Ok(v)
            }
        }
        Command::Death => {
            let n_max = cfg.level.expect("resolved");
            let rows = cfg
                .primes
                .as_ref()
                .expect("resolved")
                .iter()
                .map(|&p| {
                    let r = death_level(p, n_max)?;
                    let mut v = to_value(&r);
                    v["monotone"] = json!(r.is_monotone());
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(json!({ "n_max": n_max, "rows": rows }))
        }
        Command::Colim => {
            let [lo, hi] = cfg.levels.expect("resolved");
            Ok(to_value(&colimit_rank(cfg.weight.expect("resolved"), cfg.degree.expect("resolved"), lo, hi, domain)?))
        }
        Command::Ucheck => {
            let w = cfg.weight.expect("resolved");
            let [lo, hi] = cfg.levels.expect("resolved");
            let mut rows = vec![];
            for n in lo..=hi {
                for &p in cfg.primes.as_ref().expect("resolved") {
                    let r = universal_coefficients_check(w, n, p)?;
                    let mut v = to_value(&r);
                    v["level"] = json!(n);
                    rows.push(v);
                }
            }
            let holds = rows.iter().all(|r| r["holds"] == json!(true));
            Ok(json!({ "weight": w, "rows": rows, "holds": holds }))
        }
        Command::H6j => {
            let [lo, hi] = cfg.levels.expect("resolved");
            let rows = h6j_comparison(cfg.weights.as_ref().expect("resolved"), lo, hi, domain)?;
            Ok(json!({ "domain": domain, "levels": [lo, hi], "rows": rows }))
        }
        Command::Residue => residue_result(cfg),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => {
            a.iter().map(cell).collect::<Vec<_>>().join(";")
        }
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        _ => v.to_string(),
    }
}

fn emit_csv(result: &Value) -> Result<String> {
    let rows = result
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| usage("csv output is only available for tabular commands"))?;
    let headers: Vec<String> = rows
        .first()
        .and_then(Value::as_object)
        .map(|o| o.keys().cloned().collect())
        .unwrap_or_default();
    let mut w = csv::Writer::from_writer(vec![]);
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(&headers).map_err(io)?;
    for r in rows {
        w.write_record(headers.iter().map(|h| cell(&r[h]))).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn flatten_text(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_text(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_array() || x.is_object()) => {
            for (i, x) in a.iter().enumerate() {
                flatten_text(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.as_str().is_some_and(|s| s.contains('\n'))) => {
            for (i, x) in a.iter().enumerate() {
                flatten_text(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Array(a) => out.push((
            prefix.to_string(),
            format!("[{}]", a.iter().map(cell).collect::<Vec<_>>().join(", ")),
        )),
        Value::String(s) if s.contains('\n') => {
            for (i, line) in s.lines().enumerate() {
                out.push((format!("{prefix}:{i}"), line.to_string()));
            }
        }
        _ => out.push((prefix.to_string(), cell(v))),
    }
}

/// Renders a report in the requested format.
pub fn emit_report(r: &ReportRecord, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => emit_csv(&r.result),
        Format::Text => {
            let mut lines = vec![];
            flatten_text("config", &to_value(&r.config), &mut lines);
            flatten_text("result", &r.result, &mut lines);
            lines.push(("duration_ms".into(), r.duration_ms.to_string()));
            lines.push(("version".into(), r.version.clone()));
            let width = lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            Ok(lines.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect())
        }
    }
}

/// Resolves, runs and timestamps one configuration.
pub fn run_config(cfg: &RunConfig) -> Result<ReportRecord> {
    let start = Instant::now();
    let work = || execute(cfg);
    let result = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidRange(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let duration_ms = if cfg.timing { start.elapsed().as_millis() as u64 } else { 0 };
    Ok(ReportRecord { config: cfg.clone(), result, duration_ms, version: VERSION.to_string() })
}

fn is_usage_error(e: &Error) -> bool {
    matches!(e, Error::Parse(_) | Error::NotPrime(_) | Error::InvalidRange(_) | Error::NotAField(_))
}

/// Parses a command line into a resolved configuration.
pub fn parse_config<I, T>(argv: I) -> std::result::Result<RunConfig, (i32, String)>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = with_config(argv).map_err(|e| (EXIT_USAGE, format!("error: {e}\n")))?;
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        (code, e.render().to_string())
    })?;
    resolve(cli).map_err(|e| (EXIT_USAGE, format!("error: {e}\n")))
}

/// Runs a command line, writing the report to `out` and diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let cfg = match parse_config(argv) {
        Ok(c) => c,
        Err((code, msg)) => {
            let sink: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = sink.write_all(msg.as_bytes());
            return code;
        }
    };
    let report = match run_config(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return if is_usage_error(&e) { EXIT_USAGE } else { EXIT_COMPUTATION };
        }
    };
    match emit_report(&report, cfg.format) {
        Ok(s) => {
            let _ = out.write_all(s.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
