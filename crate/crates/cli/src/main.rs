//! `sl1d`: census tables, orbit reports, element arithmetic, zeta evaluation
//! and the verification suites.
//!
//! Exit codes: 0 success; 1 a failed identity or check; 2 invalid
//! configuration or input; 3 a guard refused the computation.  For `verify`,
//! a failing suite exits with 10 plus its position in the registry
//! (arith 10, orbits 11, duality 12, construction 13, zeta 14).

mod config;
mod expr;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};
use sl1d_core::algebra::{Algebra, Jump};
use sl1d_core::construction::{self, CaseRegistry, ConstructionError};
use sl1d_core::gf::FieldTower;
use sl1d_core::groups::ActingGroup;
use sl1d_core::orbits::{self, OrbitError};
use sl1d_core::verify::{SuiteRegistry, VerifyError, DEFAULT_PARAMETER_SETS};
use sl1d_core::zeta::{self, CensusFormulas};

use config::{ConfigError, Format, RunConfig, Shared};

#[derive(Parser)]
#[command(name = "sl1d", version, about = "Arithmetic and characters of SL_1 over a division algebra of prime degree")]
struct Cli {
    /// TOML file with the same keys as the shared flags; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Table of a_m, d_m and the telescoping identity for m = 0..=max-level.
    Census {
        #[arg(long, default_value_t = 4)]
        max_level: u64,
        /// Also build each G_{m+1} within the guard and count its classes.
        #[arg(long)]
        classes: bool,
    },
    /// Closed-form similarity class sizes, optionally checked by brute force.
    Orbits {
        /// Element literal, see `elem --help`.
        #[arg(long)]
        y: String,
        #[arg(long)]
        m: i32,
        /// One of O, G, G1 or all.
        #[arg(long, default_value = "all")]
        acting: String,
        #[arg(long)]
        brute_force: bool,
    },
    /// Evaluates an element literal such as "1+n*t3+p^2".
    ///
    /// Grammar: sums and products of integers (in F_p), t or tK (powers of the
    /// generator of F_{q^ell}), n (nu), p (pi = nu^ell), parentheses, and
    /// powers `^k` with k negative only on n and p.  A term `O(n^k)` sets the
    /// precision; otherwise --prec is used.
    Elem {
        expr: String,
        #[arg(long, default_value_t = 4)]
        prec: i32,
        /// Multiply by a second literal.
        #[arg(long)]
        times: Option<String>,
    },
    /// Closed form and partial sum of the zeta function at s.
    Zeta {
        /// RE or RE,IM.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, default_value_t = 200)]
        terms: u64,
        /// Exact rational evaluation; needs an integer s.
        #[arg(long)]
        exact: bool,
    },
    /// Runs a verification suite: arith, orbits, duality, construction, zeta or all.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Depth or level bound passed to the suites.
        #[arg(long)]
        m: Option<i32>,
        /// Include per-check timings, which makes the output nondeterministic.
        #[arg(long)]
        timings: bool,
    },
    /// Builds and checks every character of level m in G_{m+1}.
    VerifyConstruction {
        #[arg(long)]
        m: i32,
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Guard(String),
    Check(u8, String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<OrbitError> for Failure {
    fn from(e: OrbitError) -> Self {
        match e {
            OrbitError::TooLarge(_) => Failure::Guard(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::TooLarge { .. } => Failure::Guard(e.to_string()),
            ConstructionError::VerificationFailed(_) => Failure::Check(1, e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn algebra(cfg: &RunConfig) -> Result<Algebra, Failure> {
    let p = cfg.params()?;
    let t = FieldTower::with_moduli(p, cfg.modulus_q.clone(), cfg.modulus_qell.clone()).map_err(|e| Failure::Config(e.to_string()))?;
    Ok(Algebra::new(Arc::new(t)))
}

fn emit(cfg: &RunConfig, value: &Value, tsv: impl FnOnce() -> String) {
    match cfg.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("serializable")),
        Format::Tsv => print!("{}", tsv()),
    }
}

fn tsv_rows(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join("\t");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join("\t"));
        out.push('\n');
    }
    out
}

fn cmd_census(cfg: &RunConfig, max_level: u64, classes: bool) -> Result<(), Failure> {
    let p = cfg.params()?;
    let alg = if classes { Some(algebra(cfg)?) } else { None };
    let rows = construction::census_rows(p.q, p.ell, max_level, alg.as_ref(), cfg.max_group_order);
    let failed = rows.iter().any(|r| !r.telescoping_ok || r.class_count_ok == Some(false));
    emit(cfg, &json!({"q": p.q, "ell": p.ell, "rows": rows}), || {
        let body: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                let check = if r.telescoping_ok && r.class_count_ok != Some(false) { "pass" } else { "FAIL" };
                let cls = r.class_count.map(|c| c.to_string()).unwrap_or_else(|| "-".into());
                vec![r.m.to_string(), r.a.clone(), r.d.clone(), r.sum_a.clone(), r.sum_a_d2.clone(), r.group_order.clone(), cls, check.into()]
            })
            .collect();
        tsv_rows(&["m", "a_m", "d_m", "sum_a", "sum_a_d2", "group_order", "classes", "check"], &body)
    });
    if failed {
        return Err(Failure::Check(1, "census identity failed".into()));
    }
    Ok(())
}

fn cmd_orbits(cfg: &RunConfig, y: &str, m: i32, acting: &str, brute_force: bool) -> Result<(), Failure> {
    let alg = algebra(cfg)?;
    let y = expr::parse_elem(&alg, y, m).map_err(|e| Failure::Config(e.to_string()))?;
    let groups: Vec<ActingGroup> = if acting.eq_ignore_ascii_case("all") {
        vec![ActingGroup::Ounits, ActingGroup::G, ActingGroup::G1]
    } else {
        vec![ActingGroup::parse(acting).ok_or_else(|| Failure::Config(format!("unknown acting group {acting:?}")))?]
    };
    let mut reports = Vec::new();
    for g in groups {
        reports.push(orbits::orbit_report(&alg, &y, m, g, brute_force, cfg.max_orbit_set)?);
    }
    let failed = reports.iter().any(|r| !orbits::agrees(r));
    let value = json!({"y": alg.display(&y), "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>()});
    emit(cfg, &value, || {
        let body: Vec<Vec<String>> = reports
            .iter()
            .map(|r| {
                vec![
                    r.acting_group.name().into(),
                    r.m.to_string(),
                    r.jump.to_string(),
                    format!("{:?}", r.element_type),
                    r.formula_size.to_string(),
                    r.bruteforce_size.map(|b| b.to_string()).unwrap_or_else(|| "-".into()),
                    r.splitting_count.map(|b| b.to_string()).unwrap_or_else(|| "-".into()),
                ]
            })
            .collect();
        tsv_rows(&["acting", "m", "jump", "type", "formula", "brute_force", "splitting"], &body)
    });
    if failed {
        return Err(Failure::Check(1, "closed form disagrees with brute force".into()));
    }
    Ok(())
}

fn cmd_elem(cfg: &RunConfig, src: &str, prec: i32, times: Option<&str>) -> Result<(), Failure> {
    let alg = algebra(cfg)?;
    let parse = |s: &str| expr::parse_elem(&alg, s, prec).map_err(|e| Failure::Config(e.to_string()));
    let mut x = parse(src)?;
    if let Some(s) = times {
        x = alg.times(&x, &parse(s)?);
    }
    let jump = match alg.jump(&x) {
        Jump::Finite(j) => json!(j),
        Jump::Central => json!("central"),
    };
    let val = alg.val(&x).map(|v| v.to_string());
    let inverse = if x.is_zero() { None } else { alg.inv_nonzero(&x).ok().map(|i| alg.display(&i)) };
    let value = json!({
        "value": alg.display(&x),
        "coeffs": alg.to_json(&x),
        "valuation": val,
        "jump": jump,
        "type": format!("{:?}", alg.classify(&x)),
        "trd": alg.display(&alg.trd(&x)),
        "nrd": alg.display(&alg.nrd(&x)),
        "norm_one": alg.is_norm_one(&x),
        "inverse": inverse,
    });
    emit(cfg, &value, || {
        let obj = value.as_object().expect("object");
        obj.iter().map(|(k, v)| format!("{k}\t{}\n", v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string()))).collect()
    });
    Ok(())
}

fn parse_s(s: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| -> Result<f64, Failure> {
        if let Some((a, b)) = t.split_once('/') {
            let (a, b): (f64, f64) = (a.parse().map_err(|_| Failure::Config(format!("bad s {s:?}")))?, b.parse().map_err(|_| Failure::Config(format!("bad s {s:?}")))?);
            Ok(a / b)
        } else {
            t.parse().map_err(|_| Failure::Config(format!("bad s {s:?}")))
        }
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Failure::Config(format!("bad s {s:?}"))),
    }
}

fn cmd_zeta(cfg: &RunConfig, s: &str, terms: u64, exact: bool) -> Result<(), Failure> {
    let p = cfg.params()?;
    let f = CensusFormulas::new(p.q, p.ell);
    let sv = parse_s(s)?;
    if !exact {
        let ev = zeta::evaluate(&f, sv, terms);
        let value = serde_json::to_value(&ev).expect("serializable");
        emit(cfg, &value, || {
            let cf = ev.closed_form.map(|c| format!("{}{:+}i", c[0], c[1])).unwrap_or_else(|| "pole".into());
            format!(
                "s\tterms\tclosed_form\tpartial_sum\tabs_error\tpole\n{}{:+}i\t{}\t{}\t{}{:+}i\t{}\t{}\n",
                ev.s[0],
                ev.s[1],
                ev.terms,
                cf,
                ev.partial_sum[0],
                ev.partial_sum[1],
                ev.abs_error.map(|e| e.to_string()).unwrap_or_else(|| "-".into()),
                ev.pole
            )
        });
        return Ok(());
    }
    if sv.im != 0.0 || sv.re.fract() != 0.0 {
        return Err(Failure::Config("--exact needs an integer s".into()));
    }
    let si = sv.re as i64;
    let (cf, ps) = zeta::evaluate_exact(&f, si, terms);
    let pole = f.pole();
    let mut value = json!({
        "s": si,
        "terms": terms,
        "closed_form": cf.as_ref().map(|c| c.to_string()),
        "partial_sum": ps.to_string(),
        "difference": cf.as_ref().map(|c| (c - &ps).to_string()),
        "pole": format!("{}/{}", pole.numer(), pole.denom()),
        "pole_hit": cf.is_none() && f.closed_form_exact(si).is_err(),
    });
    let mut table = Vec::new();
    if si == -2 {
        for m in 0..=terms {
            let sum = f.partial_sum_exact(-2, m);
            let order = f.group_order(m + 1);
            let ok = sum == num_rational::BigRational::from_integer(order.clone().into());
            table.push(vec![m.to_string(), sum.to_string(), order.to_string(), if ok { "pass".into() } else { "FAIL".into() }]);
        }
        value["telescoping"] = json!(table.iter().map(|r| json!({"m": r[0], "partial_sum": r[1], "group_order": r[2], "check": r[3]})).collect::<Vec<_>>());
    }
    emit(cfg, &value, || {
        if table.is_empty() {
            format!("s\tclosed_form\tpartial_sum\n{si}\t{}\t{ps}\n", cf.as_ref().map(|c| c.to_string()).unwrap_or_else(|| "pole".into()))
        } else {
            tsv_rows(&["m", "partial_sum", "group_order", "check"], &table)
        }
    });
    if table.iter().any(|r| r[3] != "pass") {
        return Err(Failure::Check(1, "telescoping failed".into()));
    }
    Ok(())
}

fn cmd_verify(cfg: &RunConfig, suite: &str, m: Option<i32>, timings: bool) -> Result<(), Failure> {
    let registry = SuiteRegistry::default();
    let sets: Vec<(u64, u32)> = match cfg.params {
        Some(p) => vec![(p.q, p.ell)],
        None => DEFAULT_PARAMETER_SETS.to_vec(),
    };
    let mut reports = Vec::new();
    for (q, ell) in sets {
        let sc = cfg.suite_config(q, ell, m);
        for mut r in registry.run(suite, &sc)? {
            if !timings {
                r.strip_timings();
            }
            reports.push(r);
        }
    }
    let failing = reports.iter().find(|r| !r.passed()).map(|r| r.suite.clone());
    let value = json!({"passed": failing.is_none(), "reports": reports});
    emit(cfg, &value, || {
        let body: Vec<Vec<String>> = reports
            .iter()
            .flat_map(|r| {
                r.checks.iter().map(move |c| {
                    let mut row = vec![r.suite.clone(), r.q.to_string(), r.ell.to_string(), c.name.clone(), if c.passed { "pass".into() } else { "FAIL".into() }, c.detail.clone()];
                    if timings {
                        row.push(c.millis.map(|t| t.to_string()).unwrap_or_default());
                    }
                    row
                })
            })
            .collect();
        let mut header = vec!["suite", "q", "ell", "check", "result", "detail"];
        if timings {
            header.push("millis");
        }
        tsv_rows(&header, &body)
    });
    if let Some(name) = failing {
        let pos = registry.names().iter().position(|n| *n == name).unwrap_or(0) as u8;
        return Err(Failure::Check(10 + pos, format!("suite {name} failed")));
    }
    Ok(())
}

fn cmd_verify_construction(cfg: &RunConfig, m: i32, timings: bool) -> Result<(), Failure> {
    let alg = algebra(cfg)?;
    let start = Instant::now();
    let group = construction::build_quotient_group(&alg, m + 1, cfg.max_group_order)?;
    let built = start.elapsed();
    let registry = CaseRegistry::default();
    let report = construction::induce_and_verify(&registry, &group)?;
    let datum = construction::construct_inducing_datum(&registry, &alg, m, &construction::default_representative(&alg, m, 1))?;
    let mut value = json!({"report": report, "datum": datum.to_json(&alg), "passed": report.passed()});
    if timings {
        value["timings_ms"] = json!({"group": built.as_millis() as u64, "total": start.elapsed().as_millis() as u64});
    }
    emit(cfg, &value, || {
        tsv_rows(
            &["level", "case", "group_order", "orbits", "characters", "expected", "degree", "norm_one", "degree_ok", "level_ok", "monomial"],
            &[vec![
                report.level.to_string(),
                format!("{:?}", report.case),
                report.group_order.to_string(),
                report.orbit_count.to_string(),
                report.distinct_characters.to_string(),
                report.expected_count.clone(),
                report.expected_degree.clone(),
                report.all_norm_one.to_string(),
                report.all_degree_ok.to_string(),
                report.all_level_ok.to_string(),
                report.monomial.to_string(),
            ]],
        )
    });
    match report.first_failure() {
        Some(f) => Err(Failure::Check(1, format!("check failed: {f}"))),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let shared = match &cli.config {
        Some(path) => cli.shared.or(Shared::from_file(path)?),
        None => cli.shared,
    };
    let cfg = RunConfig::resolve(shared)?;
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global().map_err(|e| Failure::Config(e.to_string()))?;
    }
    match &cli.command {
        Command::Census { max_level, classes } => cmd_census(&cfg, *max_level, *classes),
        Command::Orbits { y, m, acting, brute_force } => cmd_orbits(&cfg, y, *m, acting, *brute_force),
        Command::Elem { expr, prec, times } => cmd_elem(&cfg, expr, *prec, times.as_deref()),
        Command::Zeta { s, terms, exact } => cmd_zeta(&cfg, s, *terms, *exact),
        Command::Verify { suite, m, timings } => cmd_verify(&cfg, suite, *m, *timings),
        Command::VerifyConstruction { m, timings } => cmd_verify_construction(&cfg, *m, *timings),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("guard: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Check(code, msg)) => {
            eprintln!("failed: {msg}");
            ExitCode::from(code)
        }
    }
}
