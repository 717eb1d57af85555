use std::fmt;

use serde_json::{json, Value};

use betaexp::bernoulli::{local_dimension, measure_interval, measure_monte_carlo, LocalDimMethod, Method};
use betaexp::bounds::bound_report;
use betaexp::generators::{check_run, run_generator, GeneratorOptions, GeneratorRun};
use betaexp::numeric::{
    format_fixed, format_real, lambda, omega_with_family, parse_real, real, to_f64, Family, DEFAULT_PRECISION_BITS,
    DEFAULT_TOLERANCE, MIN_PRECISION_BITS, TIGHT_ROOT_TOL,
};
use betaexp::prefix::{count_prefixes, enumerate_prefixes_branching, enumerate_prefixes_direct, growth_estimate};
use betaexp::{BetaContext, Error, PolynomialSpec, Real};

use crate::output::{Report, Section};
use crate::{Command, GlobalArgs};

/// Digits printed for high-precision values.
const VALUE_DIGITS: usize = 20;

/// Decimals in the reproduced threshold tables.
const TABLE_DECIMALS: usize = 5;

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    /// The two prefix enumerations disagree.
    OracleMismatch {
        report: Report,
        only_branching: usize,
        only_direct: usize,
    },
    /// A generator run failed one of its post-hoc checks.
    ChecksFailed {
        report: Report,
        failures: Vec<&'static str>,
    },
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::OracleMismatch {
                only_branching,
                only_direct,
                ..
            } => write!(
                f,
                "enumerations disagree: {only_branching} words only from branching, {only_direct} only from direct"
            ),
            CliError::ChecksFailed { failures, .. } => write!(f, "generator checks failed: {}", failures.join(", ")),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if !e.is_invariant_violation() => 2,
            _ => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Lib(e) => e.kind(),
            CliError::OracleMismatch { .. } => "oracle_mismatch",
            CliError::ChecksFailed { .. } => "generator_check_failed",
        }
    }

    /// One-line JSON record for standard error.
    pub fn diagnostic(&self) -> String {
        json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
        .to_string()
    }

    /// Output produced before the failure was detected.
    pub fn partial_report(&self) -> Option<&Report> {
        match self {
            CliError::Lib(_) => None,
            CliError::OracleMismatch { report, .. } | CliError::ChecksFailed { report, .. } => Some(report),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// A decimal string, or `omega:m` / `lambda:m` for the threshold roots.
pub fn parse_value(input: &str) -> betaexp::Result<Real> {
    let symbolic = |name: &str| -> Option<betaexp::Result<u32>> {
        let rest = input.trim().strip_prefix(name)?.strip_prefix(':')?;
        Some(rest.parse::<u32>().map_err(|e| Error::Parse {
            input: input.to_string(),
            reason: e.to_string(),
        }))
    };
    if let Some(m) = symbolic("omega") {
        return Ok(omega_with_family(m?, TIGHT_ROOT_TOL)?.0);
    }
    if let Some(m) = symbolic("lambda") {
        return lambda(m?, TIGHT_ROOT_TOL);
    }
    parse_real(input)
}

fn context(global: &GlobalArgs, beta: &str) -> CliResult<BetaContext> {
    let beta = parse_value(beta)?;
    let tolerance = match &global.tolerance {
        Some(t) => parse_real(t)?,
        None => real(DEFAULT_TOLERANCE),
    };
    Ok(BetaContext::with_precision(beta, global.precision_bits, tolerance)?)
}

fn point(ctx: &BetaContext, x: &str) -> CliResult<Real> {
    let x = parse_value(x)?;
    ctx.check_point(x)?;
    Ok(x)
}

fn digits_for(ctx: &BetaContext) -> usize {
    // decimal digits carried by the working precision
    ((ctx.precision_bits() as f64) * std::f64::consts::LOG10_2).floor() as usize
}

fn show(ctx: &BetaContext, x: Real) -> Value {
    Value::from(format_real(x, digits_for(ctx).min(VALUE_DIGITS)))
}

fn parse_range(input: &str) -> CliResult<(String, String)> {
    let (a, b) = input
        .split_once(':')
        .ok_or_else(|| Error::InvalidArgument(format!("expected A:B, got {input:?}")))?;
    Ok((a.trim().to_string(), b.trim().to_string()))
}

pub fn run(global: &GlobalArgs, command: Command) -> CliResult<Report> {
    let bits = global.precision_bits;
    if !(MIN_PRECISION_BITS..=DEFAULT_PRECISION_BITS).contains(&bits) {
        return Err(Error::InvalidPrecision {
            bits,
            min: MIN_PRECISION_BITS,
            max: DEFAULT_PRECISION_BITS,
        }
        .into());
    }
    match command {
        Command::Roots { m, reproduce_tables } => {
            if reproduce_tables {
                reproduce_tables_report()
            } else {
                roots(&m)
            }
        }
        Command::Count {
            beta,
            x,
            k,
            oracle,
            list,
        } => {
            let ctx = context(global, &beta)?;
            let x = point(&ctx, &x)?;
            count(&ctx, x, k, oracle, list)
        }
        Command::Generate {
            beta,
            x,
            mode,
            m,
            blocks,
            unchecked,
            words,
        } => {
            let ctx = context(global, &beta)?;
            let x = point(&ctx, &x)?;
            let opts = GeneratorOptions {
                check_threshold: !unchecked,
                ..Default::default()
            };
            let run = run_generator(&ctx, mode, m, x, blocks, opts)?;
            generate(&ctx, &run, words)
        }
        Command::Bounds { beta, m_max } => {
            let ctx = context(global, &beta)?;
            bounds(&ctx, m_max)
        }
        Command::Growth { beta, x, k_max, k_min } => {
            let ctx = context(global, &beta)?;
            let x = point(&ctx, &x)?;
            growth(&ctx, x, k_min, k_max)
        }
        Command::Bernoulli {
            beta,
            x,
            radii,
            method,
            samples,
            seed,
            interval,
            depth,
        } => {
            let ctx = context(global, &beta)?;
            if method == Method::MonteCarlo && seed.is_none() {
                return Err(Error::InvalidArgument("--seed is required with --method montecarlo".into()).into());
            }
            if let Some(iv) = interval {
                let (lo, hi) = parse_range(&iv)?;
                return measure(&ctx, parse_value(&lo)?, parse_value(&hi)?, method, depth, samples, seed);
            }
            let x = x.ok_or_else(|| Error::InvalidArgument("--x is required unless --interval is given".into()))?;
            let x = point(&ctx, &x)?;
            let (k_min, k_max) = parse_range(&radii)?;
            let parse_k = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    input: s.to_string(),
                    reason: e.to_string(),
                })
            };
            let lm = match method {
                Method::Recursion => LocalDimMethod::Recursion,
                Method::MonteCarlo => LocalDimMethod::MonteCarlo {
                    samples,
                    seed: seed.expect("checked above"),
                },
            };
            bernoulli(&ctx, x, parse_k(&k_min)?, parse_k(&k_max)?, lm)
        }
    }
}

fn roots(ms: &[u32]) -> CliResult<Report> {
    let mut s = Section::new(
        "root",
        &[
            "m",
            "omega_m",
            "attained_by",
            "omega_polynomial",
            "lambda_m",
            "lambda_polynomial",
        ],
    );
    for &m in ms {
        let (w, fam) = omega_with_family(m, TIGHT_ROOT_TOL)?;
        let l = lambda(m, TIGHT_ROOT_TOL)?;
        s.push(vec![
            json!(m),
            json!(format_fixed(w, VALUE_DIGITS)),
            json!(fam.name()),
            json!(PolynomialSpec::new(fam, m).to_string()),
            json!(format_fixed(l, VALUE_DIGITS)),
            json!(PolynomialSpec::new(Family::Lambda, m).to_string()),
        ]);
    }
    Ok(Report {
        sections: vec![s],
        notes: vec![],
    })
}

/// Rows of the reproduced tables.
pub const TABLE_ROWS: [u32; 5] = [1, 2, 3, 10, 100];

fn reproduce_tables_report() -> CliResult<Report> {
    let mut first = Section::new("omega_table", &["m", "omega_m", "polynomial"])
        .titled("omega_m to five decimals, with the polynomials P1, P2, P3")
        .collapsing(2);
    let mut second = Section::new("lambda_table", &["m", "lambda_m", "polynomial"])
        .titled("lambda_m to five decimals")
        .collapsing(2);
    for m in TABLE_ROWS {
        let (w, _) = omega_with_family(m, TIGHT_ROOT_TOL)?;
        let rounded = format_fixed(w, TABLE_DECIMALS);
        for fam in Family::DENSE {
            let p = PolynomialSpec::new(fam, m);
            first.push(vec![
                json!(m.to_string()),
                json!(rounded),
                json!(format!("{}_{}(x) = {}", fam.name(), m, p)),
            ]);
        }
        let l = lambda(m, TIGHT_ROOT_TOL)?;
        second.push(vec![
            json!(m.to_string()),
            json!(format_fixed(l, TABLE_DECIMALS)),
            json!(PolynomialSpec::new(Family::Lambda, m).to_string()),
        ]);
    }
    Ok(Report {
        sections: vec![first, second],
        notes: vec![],
    })
}

fn count(ctx: &BetaContext, x: Real, k: usize, oracle: bool, list: bool) -> CliResult<Report> {
    let n = count_prefixes(ctx, x, k)?;
    let mut summary = Section::new("count", &["beta", "x", "k", "count", "method"]);
    summary.push(vec![
        json!(ctx.beta_string()),
        show(ctx, x),
        json!(k),
        json!(n),
        json!("depth-first"),
    ]);
    let mut report = Report::default();
    let mut mismatch = None;
    if oracle {
        let branching = enumerate_prefixes_branching(ctx, x, k)?;
        let direct = enumerate_prefixes_direct(ctx, x, k)?;
        for (set, method) in [(&branching, "branching"), (&direct, "direct")] {
            summary.push(vec![
                json!(ctx.beta_string()),
                show(ctx, x),
                json!(k),
                json!(set.len()),
                json!(method),
            ]);
        }
        let diff = branching.symmetric_difference(&direct);
        let only_branching = diff.iter().filter(|w| branching.contains(w)).count();
        if !diff.is_empty() || branching.len() as u64 != n {
            mismatch = Some((only_branching, diff.len() - only_branching));
        }
        report
            .notes
            .push(format!("oracle: {} words differ between the enumerations", diff.len()));
    }
    report.sections.push(summary);
    if list {
        let set = enumerate_prefixes_branching(ctx, x, k)?;
        let mut words = Section::new("prefix", &["word", "orbit_value"]);
        for (w, v) in set.iter() {
            words.push(vec![json!(w.to_string()), show(ctx, v)]);
        }
        report.sections.push(words);
    }
    match mismatch {
        Some((only_branching, only_direct)) => Err(CliError::OracleMismatch {
            report,
            only_branching,
            only_direct,
        }),
        None => Ok(report),
    }
}

fn generate(ctx: &BetaContext, run: &GeneratorRun, with_words: bool) -> CliResult<Report> {
    let mut header = Section::new(
        "run",
        &[
            "mode",
            "m",
            "beta",
            "x",
            "entry_word",
            "entry_steps",
            "block_length",
            "branching",
            "steering_lo",
            "steering_hi",
        ],
    );
    header.push(vec![
        json!(run.mode.name()),
        json!(run.m),
        json!(ctx.beta_string()),
        show(ctx, run.x),
        json!(run.entry_word.to_string()),
        json!(run.entry_steps()),
        json!(run.block_length()),
        json!(run.branching()),
        show(ctx, run.steering.lo()),
        show(ctx, run.steering.hi()),
    ]);
    let columns: &[&'static str] = if with_words {
        &[
            "stage",
            "length",
            "count",
            "expected",
            "orbit_min",
            "orbit_max",
            "words",
        ]
    } else {
        &["stage", "length", "count", "expected", "orbit_min", "orbit_max"]
    };
    let mut stages = Section::new("stage", columns);
    for (s, st) in run.stages.iter().enumerate() {
        let (lo, hi) = st.orbit_range();
        let mut row = vec![
            json!(s),
            json!(st.word_length()),
            json!(st.len()),
            json!(run.branching().pow(s as u32)),
            show(ctx, lo),
            show(ctx, hi),
        ];
        if with_words {
            row.push(Value::from(st.words.iter().map(|w| w.to_string()).collect::<Vec<_>>()));
        }
        stages.push(row);
    }
    let checks = check_run(ctx, run)?;
    let mut check_rows = Section::new("check", &["check", "passed"]);
    let mut push = |name: &str, ok: Option<bool>| check_rows.push(vec![json!(name), json!(ok)]);
    push("count_law", Some(checks.count_law));
    push("containment", Some(checks.containment));
    push("bridge", Some(checks.bridge));
    push("monotone", Some(checks.monotone));
    push("lower_growth", Some(checks.lower_growth));
    push("local_cap", Some(checks.local_cap));
    push("soundness", Some(checks.soundness));
    push("enumeration_subset", checks.enumeration_subset);
    let report = Report {
        sections: vec![stages, header, check_rows],
        notes: vec![format!(
            "{} words after {} blocks; all checks {}",
            run.final_stage().len(),
            run.num_blocks(),
            if checks.all_pass() { "passed" } else { "FAILED" }
        )],
    };
    if checks.all_pass() {
        Ok(report)
    } else {
        Err(CliError::ChecksFailed {
            report,
            failures: checks.failures(),
        })
    }
}

fn opt_f64(v: Option<f64>) -> Value {
    v.map_or(Value::Null, Value::from)
}

fn bounds(ctx: &BetaContext, m_max: u32) -> CliResult<Report> {
    let rep = bound_report(ctx, m_max)?;
    let mut s = Section::new("bound", &["quantity", "m", "value", "applicable"]);
    for r in rep.records() {
        s.push(vec![
            json!(r.quantity),
            json!(r.m),
            opt_f64(r.value),
            json!(r.applicable),
        ]);
    }
    Ok(Report {
        sections: vec![s.titled(format!("beta = {}", rep.beta))],
        notes: vec![],
    })
}

fn growth(ctx: &BetaContext, x: Real, k_min: usize, k_max: usize) -> CliResult<Report> {
    let est = growth_estimate(ctx, x, k_min, k_max)?;
    let mut rows = Section::new("growth", &["k", "count", "log2_count", "slope"]);
    for ((&k, &n), &l) in est.k_values.iter().zip(&est.counts).zip(&est.log2_counts) {
        rows.push(vec![json!(k), json!(n), json!(l), json!(l / k as f64)]);
    }
    let rep = bound_report(ctx, betaexp::bounds::DEFAULT_M_MAX)?;
    let mut cmp = Section::new("comparison", &["quantity", "value"]);
    cmp.push(vec![json!("window_start"), json!(est.window_start)]);
    cmp.push(vec![json!("lower_slope"), json!(est.lower_slope)]);
    cmp.push(vec![json!("upper_slope"), json!(est.upper_slope)]);
    cmp.push(vec![json!("best_lower_bound"), json!(rep.best_lower)]);
    cmp.push(vec![json!("min_upper_bound"), json!(rep.min_upper)]);
    if ctx.beta_f64() < std::f64::consts::SQRT_2 {
        let expected = (2.0 / ctx.beta_f64()).log2();
        cmp.push(vec![json!("expected_typical_rate"), json!(expected)]);
    }
    let notes = vec![
        format!(
            "lower slope {:.6} vs best lower bound {:.6}",
            est.lower_slope, rep.best_lower
        ),
        format!(
            "upper slope {:.6} vs smallest upper bound {:.6}",
            est.upper_slope, rep.min_upper
        ),
    ];
    Ok(Report {
        sections: vec![rows, cmp],
        notes,
    })
}

fn measure(
    ctx: &BetaContext,
    lo: Real,
    hi: Real,
    method: Method,
    depth: usize,
    samples: u64,
    seed: Option<u64>,
) -> CliResult<Report> {
    let est = match method {
        Method::Recursion => measure_interval(ctx, lo, hi, depth)?,
        Method::MonteCarlo => measure_monte_carlo(ctx, lo, hi, samples, depth, seed.expect("checked by caller"))?,
    };
    let mut s = Section::new(
        "measure",
        &["lo", "hi", "value", "half_width", "depth", "method", "samples", "seed"],
    );
    s.push(vec![
        json!(est.lo),
        json!(est.hi),
        json!(est.value),
        json!(est.half_width),
        json!(est.depth),
        json!(est.method),
        json!(est.samples),
        json!(est.seed),
    ]);
    Ok(Report {
        sections: vec![s],
        notes: vec![],
    })
}

fn bernoulli(ctx: &BetaContext, x: Real, k_min: usize, k_max: usize, method: LocalDimMethod) -> CliResult<Report> {
    let est = local_dimension(ctx, x, k_min, k_max, method)?;
    let mut rows = Section::new("radius", &["k", "radius", "measure", "half_width", "ratio"]);
    for (i, &k) in est.k_values.iter().enumerate() {
        rows.push(vec![
            json!(k),
            json!(est.radii[i]),
            json!(est.measures[i].value),
            json!(est.measures[i].half_width),
            json!(est.ratios[i]),
        ]);
    }
    let bounds = bound_report(ctx, betaexp::bounds::DEFAULT_M_MAX)?;
    let bound = bounds.min_local_dim_upper;
    let mut summary = Section::new("local_dimension", &["x", "slope_lower", "slope_upper", "upper_bound"]);
    summary.push(vec![
        json!(to_f64(x)),
        json!(est.slope_lower),
        json!(est.slope_upper),
        opt_f64(bound),
    ]);
    let note = match bound {
        Some(b) => format!("upper estimate {:.6} vs bound {:.6}", est.slope_upper, b),
        None => format!("upper estimate {:.6}; no bound applies at this base", est.slope_upper),
    };
    Ok(Report {
        sections: vec![rows, summary],
        notes: vec![note],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use betaexp::numeric::omega;

    #[test]
    fn symbolic_values() {
        assert_eq!(parse_value("omega:1").unwrap(), omega(1, TIGHT_ROOT_TOL).unwrap());
        assert_eq!(parse_value("lambda:2").unwrap(), lambda(2, TIGHT_ROOT_TOL).unwrap());
        assert_eq!(parse_value("1.5").unwrap(), real(1.5));
        assert!(parse_value("omega:x").is_err());
        assert!(parse_value("pi").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Lib(Error::InvalidArgument("x".into())).exit_code(), 2);
        let violation = Error::ContainmentViolation {
            word: "0".into(),
            value: "1".into(),
            lo: "0".into(),
            hi: "0.5".into(),
        };
        let err = CliError::Lib(violation);
        assert_eq!(err.exit_code(), 3);
        let diag: Value = serde_json::from_str(&err.diagnostic()).unwrap();
        assert_eq!(diag["error"], "containment_violation");
        assert_eq!(diag["exit_code"], 3);
    }

    #[test]
    fn rounded_tables_are_stable() {
        let a = reproduce_tables_report().unwrap().render(crate::output::Format::Table);
        let b = reproduce_tables_report().unwrap().render(crate::output::Format::Table);
        assert_eq!(a, b);
        assert!(a.contains("1.07445"));
        assert!(a.contains("1.53416"));
        assert!(a.contains("x⁵−x⁴−x²+1"));
    }
}
