//! The `tmellin` command line: argument parsing, settings resolution and
//! rendering. [`run`] is the whole program minus process I/O, so tests can
//! drive it in-process.

pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tmellin_core::asymptotics::{expansion, n_expansion_terms, n_twisted};
use tmellin_core::polyseq::{f_poly_recurrence, normalized_coeffs, stirling_row};
use tmellin_core::transform::{closed_form, invert, twisted_mellin_with};
use tmellin_core::verify::{run_suite, Suite, VerifyConfig};
use tmellin_core::{Error, FunctionSpec};

use config::{CliConfig, Format, Layer};

pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Largest number of rows `table` will produce.
pub const MAX_TABLE_ROWS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: String) -> Self {
        CliError {
            code: EXIT_USAGE,
            message,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Divergence(_) => EXIT_DIVERGENCE,
            Error::EigenNoConvergence { .. } | Error::Evaluation { .. } | Error::FitFailure { .. } => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// What the process should print and return.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

#[derive(Debug, Parser)]
#[command(name = "tmellin", version, about = "Twisted Mellin transform E[f(X)], X ~ Gamma(s+1)")]
pub struct Cli {
    /// Quadrature tolerance, in [1e-13, 1e-2] [env: TMELLIN_TOL]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Node cap of adaptive Gauss-Laguerre [env: TMELLIN_MAX_NODES]
    #[arg(long, global = true)]
    pub max_nodes: Option<usize>,
    /// Monte Carlo seed [env: TMELLIN_SEED]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output format [env: TMELLIN_FORMAT]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// TOML settings file [env: TMELLIN_CONFIG]
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the transform at one point
    Eval {
        #[command(flatten)]
        func: FnArg,
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
    },
    /// Evaluate on an arithmetic grid of s
    Table {
        #[command(flatten)]
        func: FnArg,
        #[arg(long, allow_negative_numbers = true)]
        s_start: f64,
        #[arg(long, allow_negative_numbers = true)]
        s_end: f64,
        #[arg(long)]
        step: f64,
    },
    /// Print exact integer tables
    Poly {
        #[arg(value_enum)]
        kind: PolyKind,
        n: usize,
    },
    /// Run a verification suite
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
    },
    /// Asymptotic expansion in 1/s, or in 1/N with --N
    Expand {
        #[command(flatten)]
        func: FnArg,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        order: u32,
        /// Add the quadrature value and the error of each partial sum
        #[arg(long)]
        compare: bool,
        /// Expand A_N(f)(s) = M[f(x/N)](Ns) in powers of 1/N instead
        #[arg(long = "N")]
        n: Option<f64>,
    },
    /// Recover f(x) from its transform by contour integration
    Invert {
        #[command(flatten)]
        func: FnArg,
        #[arg(long)]
        x: f64,
        /// Real part of the contour [env: TMELLIN_CONTOUR_C]
        #[arg(long)]
        c: Option<f64>,
        /// Contour half-height [env: TMELLIN_CONTOUR_HEIGHT]
        #[arg(long)]
        height: Option<f64>,
        /// Trapezoid panels [env: TMELLIN_CONTOUR_STEPS]
        #[arg(long)]
        steps: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct FnArg {
    /// Function descriptor, name(params): "power(2.5)", "sin(1)", "todd", "poly(1,0,3)"
    #[arg(long = "fn")]
    pub descriptor: String,
}

impl FnArg {
    fn parse(&self) -> Result<FunctionSpec, CliError> {
        Ok(self.descriptor.parse::<FunctionSpec>()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolyKind {
    /// Expansion polynomial f_r, ascending coefficients
    F,
    /// Unsigned Stirling numbers of the first kind c(n,1..n)
    Stirling,
    /// Normalized coefficients of f_r(s)/r! as exact fractions
    Coeffs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Identities,
    Catalog,
    Polyseq,
    Asymptotics,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Identities => Suite::Identities,
            SuiteArg::Catalog => Suite::Catalog,
            SuiteArg::Polyseq => Suite::Polyseq,
            SuiteArg::Asymptotics => Suite::Asymptotics,
            SuiteArg::All => Suite::All,
        }
    }
}

/// Parses `args` (program name first), resolves settings and runs the
/// command. `env` stands in for the process environment.
pub fn run<I, T>(args: I, env: &dyn Fn(&str) -> Option<String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    stderr: text,
                    code: EXIT_USAGE,
                    ..Default::default()
                }
            } else {
                Outcome {
                    stdout: text,
                    ..Default::default()
                }
            };
        }
    };
    match execute(cli, env) {
        Ok(out) => out,
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {}\n", e.message),
            code: e.code,
        },
    }
}

fn execute(cli: Cli, env: &dyn Fn(&str) -> Option<String>) -> Result<Outcome, CliError> {
    let mut flags = Layer {
        tol: cli.tol,
        max_nodes: cli.max_nodes,
        seed: cli.seed,
        format: cli.format,
        ..Default::default()
    };
    if let Command::Invert { c, height, steps, .. } = &cli.command {
        flags.contour_c = *c;
        flags.contour_height = *height;
        flags.contour_steps = *steps;
    }
    let env_layer = Layer::from_env(env)?;
    let config_path = cli.config.clone().or_else(|| env("TMELLIN_CONFIG").map(PathBuf::from));
    let file_layer = match config_path {
        Some(p) => Layer::from_file(&p)?,
        None => Layer::default(),
    };
    let config = CliConfig::resolve(flags, env_layer, file_layer)?;

    match cli.command {
        Command::Eval { func, s } => cmd_eval(&func.parse()?, s, &config),
        Command::Table {
            func,
            s_start,
            s_end,
            step,
        } => cmd_table(&func.parse()?, s_start, s_end, step, &config),
        Command::Poly { kind, n } => cmd_poly(kind, n, &config),
        Command::Verify { suite } => cmd_verify(suite.into(), cli.tol, &config),
        Command::Expand {
            func,
            s,
            order,
            compare,
            n,
        } => cmd_expand(&func.parse()?, s, order, compare, n, &config),
        Command::Invert { func, x, .. } => cmd_invert(&func.parse()?, x, &config),
    }
}

/// 17 significant digits: enough to round-trip any double.
pub fn sig17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "nan".into()
    }
}

fn ok(stdout: String) -> Result<Outcome, CliError> {
    Ok(Outcome {
        stdout,
        ..Default::default()
    })
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

#[derive(Debug, Serialize)]
struct EvalJson {
    value: f64,
    error_estimate: f64,
    method: &'static str,
    nodes_used: usize,
    closed_form_available: bool,
}

fn cmd_eval(f: &FunctionSpec, s: f64, config: &CliConfig) -> Result<Outcome, CliError> {
    let v = twisted_mellin_with(f, s, &config.quadrature())?;
    let closed = matches!(closed_form(f, s), Ok(Some(_)));
    let mut stderr = String::new();
    if !v.converged {
        stderr = format!("warning: quadrature stopped at {} nodes before reaching tol\n", v.nodes_used);
    }
    let stdout = match config.format.unwrap_or(Format::Text) {
        Format::Json => json_line(&EvalJson {
            value: v.value,
            error_estimate: v.error_estimate,
            method: v.method.as_str(),
            nodes_used: v.nodes_used,
            closed_form_available: closed,
        }),
        Format::Csv => csv_text(
            &["s", "value", "error_estimate", "method"],
            &[vec![sig17(s), sig17(v.value), sig17(v.error_estimate), v.method.to_string()]],
        ),
        Format::Text => format!(
            "value: {}\nerror_estimate: {:e}\nmethod: {}\nnodes_used: {}\nclosed_form_available: {closed}\n",
            v.value, v.error_estimate, v.method, v.nodes_used
        ),
    };
    Ok(Outcome {
        stdout,
        stderr,
        code: 0,
    })
}

/// `start, start + step, …` up to `end` (inclusive, with rounding slack).
pub fn grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(start.is_finite() && end.is_finite()) || start > end {
        return Err(CliError::usage(format!("need s_start <= s_end, got {start} and {end}")));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(CliError::usage(format!("step must be positive, got {step}")));
    }
    let count = ((end - start) / step + 1e-9).floor() + 1.0;
    if count > MAX_TABLE_ROWS as f64 {
        return Err(CliError::usage(format!("grid has {count} points; at most {MAX_TABLE_ROWS} allowed")));
    }
    Ok((0..count as usize).map(|i| start + i as f64 * step).collect())
}

#[derive(Debug, Serialize)]
struct TableRow {
    s: f64,
    value: Option<f64>,
    error_estimate: Option<f64>,
    method: String,
    nodes_used: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn cmd_table(f: &FunctionSpec, start: f64, end: f64, step: f64, config: &CliConfig) -> Result<Outcome, CliError> {
    let points = grid(start, end, step)?;
    let quad = config.quadrature();
    let mut rows = Vec::with_capacity(points.len());
    let mut first_failure: Option<CliError> = None;
    let mut stderr = String::new();
    for &s in &points {
        match twisted_mellin_with(f, s, &quad) {
            Ok(v) => rows.push(TableRow {
                s,
                value: Some(v.value),
                error_estimate: Some(v.error_estimate),
                method: v.method.to_string(),
                nodes_used: Some(v.nodes_used),
                error: None,
            }),
            Err(e) => {
                let _ = writeln!(stderr, "error at s = {s}: {e}");
                rows.push(TableRow {
                    s,
                    value: None,
                    error_estimate: None,
                    method: "error".into(),
                    nodes_used: None,
                    error: Some(e.to_string()),
                });
                first_failure.get_or_insert(e.into());
            }
        }
    }
    let stdout = match config.format.unwrap_or(Format::Csv) {
        Format::Json => json_line(&rows),
        Format::Csv => csv_text(
            &["s", "value", "error_estimate", "method"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        sig17(r.s),
                        r.value.map_or("nan".into(), sig17),
                        r.error_estimate.map_or("nan".into(), sig17),
                        r.method.clone(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Text => {
            let mut out = format!("{:>10}  {:>24}  {:>10}  method\n", "s", "value", "error");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{:>10}  {:>24}  {:>10}  {}",
                    r.s,
                    r.value.map_or("nan".into(), |v| v.to_string()),
                    r.error_estimate.map_or("nan".into(), |v| format!("{v:.1e}")),
                    r.method
                );
            }
            out
        }
    };
    Ok(Outcome {
        stdout,
        stderr,
        code: first_failure.map_or(0, |e| e.code),
    })
}

fn cmd_poly(kind: PolyKind, n: usize, config: &CliConfig) -> Result<Outcome, CliError> {
    let (label, entries): (&str, Vec<String>) = match kind {
        PolyKind::F => ("f", f_poly_recurrence(n)?.coeffs().iter().map(|c| c.to_string()).collect()),
        PolyKind::Stirling => ("stirling", stirling_row(n)?.iter().map(|c| c.to_string()).collect()),
        PolyKind::Coeffs => ("coeffs", normalized_coeffs(n)?.iter().map(|c| c.to_string()).collect()),
    };
    let stdout = match config.format.unwrap_or(Format::Text) {
        Format::Json => {
            #[derive(Serialize)]
            struct PolyJson<'a> {
                kind: &'a str,
                n: usize,
                /// Decimal strings: the integers outgrow any JSON number.
                coefficients: &'a [String],
            }
            json_line(&PolyJson {
                kind: label,
                n,
                coefficients: &entries,
            })
        }
        Format::Csv => {
            let first = if kind == PolyKind::Stirling { 1 } else { 0 };
            csv_text(
                &["index", "coefficient"],
                &entries
                    .iter()
                    .enumerate()
                    .map(|(i, c)| vec![(i + first).to_string(), c.clone()])
                    .collect::<Vec<_>>(),
            )
        }
        Format::Text => format!("{}\n", entries.join(" ")),
    };
    ok(stdout)
}

fn cmd_verify(suite: Suite, tol_flag: Option<f64>, config: &CliConfig) -> Result<Outcome, CliError> {
    let verify = VerifyConfig {
        identity_tol: tol_flag,
        seed: config.seed,
        ..VerifyConfig::default()
    };
    let checks = run_suite(suite, &verify);
    let failed = checks.iter().filter(|c| !c.pass).count();
    let stdout = match config.format.unwrap_or(Format::Text) {
        Format::Json => {
            #[derive(Serialize)]
            struct CheckJson<'a> {
                name: &'a str,
                max_residual: f64,
                budget: f64,
                exact: bool,
                pass: bool,
            }
            json_line(
                &checks
                    .iter()
                    .map(|c| CheckJson {
                        name: &c.name,
                        max_residual: c.max_residual,
                        budget: c.budget,
                        exact: c.exact,
                        pass: c.pass,
                    })
                    .collect::<Vec<_>>(),
            )
        }
        Format::Csv => csv_text(
            &["name", "max_residual", "budget", "status"],
            &checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        c.residual_text(),
                        c.budget_text(),
                        if c.pass { "PASS" } else { "FAIL" }.into(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Text => {
            let mut out: String = checks.iter().map(|c| format!("{c}\n")).collect();
            let _ = writeln!(out, "{} checks, {} failed", checks.len(), failed);
            out
        }
    };
    Ok(Outcome {
        stdout,
        stderr: String::new(),
        code: if failed == 0 { 0 } else { EXIT_VERIFY_FAILED },
    })
}

#[derive(Debug, Serialize)]
struct ExpandRow {
    order: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    derivative: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    poly_value: Option<f64>,
    term: f64,
    partial_sum: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    abs_error: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ExpandJson {
    s: f64,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    n: Option<f64>,
    rows: Vec<ExpandRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quadrature: Option<f64>,
}

fn cmd_expand(
    f: &FunctionSpec,
    s: f64,
    order: u32,
    compare: bool,
    n: Option<f64>,
    config: &CliConfig,
) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    let quadrature = match n {
        None => {
            let e = expansion(f, s, order)?;
            for (t, &partial) in e.orders.iter().zip(&e.partial_sums) {
                rows.push(ExpandRow {
                    order: t.r,
                    derivative: Some(t.derivative_value),
                    poly_value: Some(t.poly_value),
                    term: t.term,
                    partial_sum: partial,
                    abs_error: None,
                });
            }
            if compare {
                Some(twisted_mellin_with(f, s, &config.quadrature())?.value)
            } else {
                None
            }
        }
        Some(big_n) => {
            if !(big_n > 0.0) || !big_n.is_finite() {
                return Err(CliError::usage(format!("N must be positive, got {big_n}")));
            }
            let mut partial = 0.0;
            for (j, c) in n_expansion_terms(f, s, order)?.into_iter().enumerate() {
                let term = c * big_n.powi(-(j as i32));
                partial += term;
                rows.push(ExpandRow {
                    order: j as u32,
                    derivative: None,
                    poly_value: None,
                    term,
                    partial_sum: partial,
                    abs_error: None,
                });
            }
            if compare {
                Some(n_twisted(f, s, big_n, config.tol)?.value)
            } else {
                None
            }
        }
    };
    if let Some(q) = quadrature {
        for r in &mut rows {
            r.abs_error = Some((r.partial_sum - q).abs());
        }
    }
    let stdout = match config.format.unwrap_or(Format::Text) {
        Format::Json => json_line(&ExpandJson { s, n, rows, quadrature }),
        Format::Csv => {
            let mut header = vec!["order", "term", "partial_sum"];
            if quadrature.is_some() {
                header.extend(["quadrature", "abs_error"]);
            }
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut row = vec![r.order.to_string(), sig17(r.term), sig17(r.partial_sum)];
                    if let (Some(q), Some(e)) = (quadrature, r.abs_error) {
                        row.extend([sig17(q), sig17(e)]);
                    }
                    row
                })
                .collect();
            csv_text(&header, &body)
        }
        Format::Text => {
            let mut out = match n {
                Some(big_n) => format!("A_N expansion in 1/N at s = {s}, N = {big_n}\n"),
                None => format!("expansion in 1/s at s = {s}\n"),
            };
            let _ = writeln!(out, "{:>5}  {:>24}  {:>24}  {:>10}", "order", "term", "partial_sum", "abs_error");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{:>5}  {:>24}  {:>24}  {:>10}",
                    r.order,
                    r.term,
                    r.partial_sum,
                    r.abs_error.map_or("-".into(), |e| format!("{e:.3e}"))
                );
            }
            if let Some(q) = quadrature {
                let _ = writeln!(out, "quadrature: {q}");
            }
            out
        }
    };
    ok(stdout)
}

#[derive(Debug, Serialize)]
struct InvertJson {
    x: f64,
    value: f64,
    exact: Option<f64>,
    abs_error: Option<f64>,
    tail_ratio: f64,
    truncation_warning: bool,
}

fn cmd_invert(f: &FunctionSpec, x: f64, config: &CliConfig) -> Result<Outcome, CliError> {
    let inv = invert(f, x, &config.contour)?;
    let exact = f.evaluate(x).ok();
    let abs_error = exact.map(|e| (inv.value - e).abs());
    let stderr = if inv.truncation_warning {
        format!(
            "warning: contour truncation visible (tail ratio {:.1e}); raise --height\n",
            inv.tail_ratio
        )
    } else {
        String::new()
    };
    let stdout = match config.format.unwrap_or(Format::Text) {
        Format::Json => json_line(&InvertJson {
            x,
            value: inv.value,
            exact,
            abs_error,
            tail_ratio: inv.tail_ratio,
            truncation_warning: inv.truncation_warning,
        }),
        Format::Csv => csv_text(
            &["x", "value", "exact", "abs_error"],
            &[vec![
                sig17(x),
                sig17(inv.value),
                exact.map_or("nan".into(), sig17),
                abs_error.map_or("nan".into(), sig17),
            ]],
        ),
        Format::Text => {
            let mut out = format!("value: {}\n", inv.value);
            if let (Some(e), Some(err)) = (exact, abs_error) {
                let _ = writeln!(out, "exact: {e}\nabs_error: {err:.3e}");
            }
            out
        }
    };
    Ok(Outcome {
        stdout,
        stderr,
        code: 0,
    })
}
