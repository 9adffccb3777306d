//! Command-line front end.
//!
//! Reports are JSON on standard output (or `--out`); errors are one JSON
//! line on standard error. Exit codes: 0 positive verdict, 3 negative,
//! 4 inconclusive, 1 usage error, 2 internal error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::certificate::{CertificateJson, CircuitJson};
use crate::circuit::{circuit_number, classify_circuit, CircuitClass, CircuitPolynomial, Verdict};
use crate::geometry::{enumerate_covers, Simplex};
use crate::mediated::{is_mediated_set, maximal_mediated_set, LatticeSet};
use crate::poly::{
    infer_nvars, parse_polynomial, support_partition, Exponent, PolynomialJson, SparsePolynomial,
};
use crate::rep::{decide_sonc_with, BudgetMode, Decision};
use crate::samesupport::same_support_transform;
use crate::sosb::{circuit_to_sosb, sonc_to_sosb, BinomialSquare, MonomialSquare};
use crate::{SoncError, DEFAULT_TOL};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "sonc", version, about = "Same-support SONC certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Solver tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Re-check every emitted certificate from its serialized form.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Human-readable summary on standard error.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Number of variables (inferred from the input when omitted).
    #[arg(long, global = true)]
    pub nvars: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Decide SONC membership and emit a certificate.
    Decide {
        input: String,
        /// Require vertex shares to use the whole coefficient.
        #[arg(long)]
        equality: bool,
    },
    /// Classify a circuit polynomial and compute its circuit number.
    Circuit { input: String },
    /// List the cover simplices of every inner term.
    Covers { input: String },
    /// Maximal mediated set and H-trellis test of a trellis.
    Mediated {
        /// Trellis as `(0,0),(4,2),(2,4)`, a JSON point list, or a circuit polynomial.
        input: String,
        /// Candidate mediated set to check.
        #[arg(long)]
        points: Option<String>,
        /// Scale the trellis by this factor first.
        #[arg(long, default_value_t = 1)]
        scale: u32,
    },
    /// Binomial-square decomposition of a nonnegative circuit.
    Sosb {
        input: String,
        /// Substitute `x -> x^k` first.
        #[arg(long)]
        k: Option<u32>,
    },
    /// Turn a list of circuits into a same-support certificate.
    Transform { input: String },
    /// Re-check a certificate against a polynomial.
    Verify {
        input: String,
        #[arg(long)]
        certificate: PathBuf,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub common: Common,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            common: Common {
                tol: DEFAULT_TOL,
                exact: false,
                out: None,
                verbose: 0,
                nvars: None,
            },
        }
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&RunConfig {
            command: cli.command,
            common: cli.common,
        }),
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            EXIT_POSITIVE
        }
        Err(e) => {
            emit_error(&mut std::io::stderr(), "usage", &e.to_string());
            EXIT_USAGE
        }
    }
}

pub fn run(config: &RunConfig) -> i32 {
    let mut stdout = std::io::stdout();
    let mut stderr = std::io::stderr();
    run_with(config, &mut stdout, &mut stderr)
}

/// Runs with explicit output streams.
pub fn run_with(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if !(config.common.tol > 0.0) {
        emit_error(err, "usage", "--tol must be positive");
        return EXIT_USAGE;
    }
    match dispatch(config, err) {
        Ok(report) => {
            let text =
                serde_json::to_string_pretty(&report.body).expect("report serializes") + "\n";
            let written = match &config.common.out {
                Some(path) => std::fs::write(path, &text),
                None => out.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                emit_error(err, "io", &e.to_string());
                return EXIT_USAGE;
            }
            if config.common.verbose > 0 {
                let _ = writeln!(err, "{}", report.summary);
            }
            report.code
        }
        Err(e) => {
            let code = exit_code(&e);
            emit_error(err, error_kind(&e), &e.to_string());
            code
        }
    }
}

fn emit_error(err: &mut dyn Write, kind: &str, message: &str) {
    let line = json!({ "error": kind, "message": message.lines().next().unwrap_or("") });
    let _ = writeln!(err, "{line}");
}

fn error_kind(e: &SoncError) -> &'static str {
    match e {
        SoncError::Parse { .. }
        | SoncError::NegativeExponent { .. }
        | SoncError::VariableIndex { .. } => "parse",
        SoncError::ZeroPolynomial => "zero_polynomial",
        SoncError::DimensionMismatch { .. } => "dimension_mismatch",
        SoncError::InvalidSimplex(_) => "invalid_simplex",
        SoncError::InvalidCircuit(_) => "invalid_circuit",
        SoncError::NotNonnegative => "not_nonnegative",
        SoncError::NoMediatedWitness { .. } => "no_mediated_witness",
        SoncError::TriviallyNonnegative => "trivially_nonnegative",
        SoncError::NecessaryConditions { .. } => "necessary_conditions",
        SoncError::Uncovered { .. } => "uncovered",
        SoncError::NonConvergence { .. } => "non_convergence",
        SoncError::DeskScaleLimit(_) => "desk_scale_limit",
        SoncError::Sosb(_) => "sosb",
        SoncError::Internal(_) => "internal",
        SoncError::Json(_) => "json",
        SoncError::Io(_) => "io",
    }
}

fn exit_code(e: &SoncError) -> i32 {
    match e {
        SoncError::Parse { .. }
        | SoncError::NegativeExponent { .. }
        | SoncError::VariableIndex { .. }
        | SoncError::ZeroPolynomial
        | SoncError::DimensionMismatch { .. }
        | SoncError::InvalidSimplex(_)
        | SoncError::InvalidCircuit(_)
        | SoncError::DeskScaleLimit(_)
        | SoncError::Json(_)
        | SoncError::Io(_) => EXIT_USAGE,
        SoncError::NotNonnegative | SoncError::NoMediatedWitness { .. } => EXIT_NEGATIVE,
        SoncError::NonConvergence { .. } => EXIT_INCONCLUSIVE,
        _ => EXIT_INTERNAL,
    }
}

struct Report {
    body: serde_json::Value,
    code: i32,
    summary: String,
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report serializes")
}

/// Reads `input` as a JSON file, a text file, or inline text.
pub fn load_polynomial(input: &str, nvars: Option<usize>) -> Result<SparsePolynomial, SoncError> {
    let path = Path::new(input);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        if input.ends_with(".json") {
            let j: PolynomialJson = serde_json::from_str(&text)?;
            let f = SparsePolynomial::from_json(&j)?;
            if let Some(n) = nvars {
                if n != f.nvars() {
                    return Err(SoncError::DimensionMismatch {
                        expected: n,
                        found: f.nvars(),
                    });
                }
            }
            return Ok(f);
        }
        return parse_polynomial(text.trim(), nvars.unwrap_or_else(|| infer_nvars(&text)));
    }
    parse_polynomial(input, nvars.unwrap_or_else(|| infer_nvars(input)))
}

fn read_input(input: &str) -> Result<String, SoncError> {
    let path = Path::new(input);
    if path.is_file() {
        Ok(std::fs::read_to_string(path)?)
    } else {
        Ok(input.to_string())
    }
}

/// `(0,0),(4,2)` or `[[0,0],[4,2]]`.
pub fn parse_points(text: &str) -> Result<Vec<Exponent>, SoncError> {
    let t = text.trim();
    if t.starts_with('[') {
        let pts: Vec<Vec<u32>> = serde_json::from_str(t)?;
        return Ok(pts.into_iter().map(Exponent).collect());
    }
    let mut pts = Vec::new();
    let mut rest = t;
    while let Some(open) = rest.find('(') {
        let close = rest[open..].find(')').ok_or_else(|| SoncError::Parse {
            position: t.len() - rest.len() + open,
            message: "unclosed point".into(),
        })? + open;
        let coords = rest[open + 1..close]
            .split(',')
            .map(|s| {
                s.trim().parse::<u32>().map_err(|e| SoncError::Parse {
                    position: t.len() - rest.len() + open,
                    message: format!("bad coordinate {s:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        pts.push(Exponent(coords));
        rest = &rest[close + 1..];
    }
    if pts.is_empty() {
        return Err(SoncError::Parse {
            position: 0,
            message: "expected a point list".into(),
        });
    }
    Ok(pts)
}

fn as_circuit(f: &SparsePolynomial) -> Result<CircuitPolynomial, SoncError> {
    match classify_circuit(f)? {
        CircuitClass::Circuit(c) => Ok(c),
        CircuitClass::MonomialSquares => Err(SoncError::InvalidCircuit(
            "input is a sum of monomial squares".into(),
        )),
        CircuitClass::NotCircuit(reason) => Err(SoncError::InvalidCircuit(reason)),
    }
}

fn dispatch(config: &RunConfig, err: &mut dyn Write) -> Result<Report, SoncError> {
    let c = &config.common;
    match &config.command {
        Command::Decide { input, equality } => {
            let f = load_polynomial(input, c.nvars)?;
            let mode = if *equality {
                BudgetMode::Exact
            } else {
                BudgetMode::AtMost
            };
            decide_report(&f, c, mode)
        }
        Command::Circuit { input } => circuit_report(&load_polynomial(input, c.nvars)?),
        Command::Covers { input } => covers_report(&load_polynomial(input, c.nvars)?),
        Command::Mediated {
            input,
            points,
            scale,
        } => mediated_report(input, points.as_deref(), *scale, c),
        Command::Sosb { input, k } => sosb_report(&load_polynomial(input, c.nvars)?, *k, err),
        Command::Transform { input } => transform_report(input, c),
        Command::Verify { input, certificate } => {
            verify_report(&load_polynomial(input, c.nvars)?, certificate)
        }
    }
}

fn decide_report(f: &SparsePolynomial, c: &Common, mode: BudgetMode) -> Result<Report, SoncError> {
    let decision = decide_sonc_with(f, c.tol, mode)?;
    let status = decision.status();
    let mut body = match decision.certificate() {
        Some(cert) => cert.to_json(status, decision.slack()),
        None => CertificateJson {
            status: status.to_string(),
            slack: decision.slack(),
            reason: None,
            circuits: Vec::new(),
            monomial_squares: Vec::new(),
            squares: Vec::new(),
            exact: false,
            residual_norm: 0.0,
        },
    };
    let (code, summary) = match &decision {
        Decision::Sonc { certificate, .. } => {
            if c.exact {
                let back: CertificateJson = serde_json::from_str(&serde_json::to_string(&body)?)?;
                if !back.recheck(f)?.exact {
                    return Err(SoncError::Internal(
                        "emitted certificate failed its re-check".into(),
                    ));
                }
            }
            (
                EXIT_POSITIVE,
                format!(
                    "SONC: {} circuits, {} monomial squares",
                    certificate.circuits.len(),
                    certificate.monomial_squares.len()
                ),
            )
        }
        Decision::NotSonc { reason, .. } => {
            body.reason = Some(reason.clone());
            (EXIT_NEGATIVE, format!("NOT SONC: {reason}"))
        }
        Decision::Inconclusive { slack, .. } => {
            body.reason = Some(format!("slack {slack:.3e} within tolerance"));
            (
                EXIT_INCONCLUSIVE,
                format!("INCONCLUSIVE: slack {slack:.3e}"),
            )
        }
    };
    Ok(Report {
        body: to_value(&body),
        code,
        summary,
    })
}

fn circuit_report(f: &SparsePolynomial) -> Result<Report, SoncError> {
    Ok(match classify_circuit(f)? {
        CircuitClass::Circuit(circ) => {
            let theta = circuit_number(&circ, 64);
            let verdict = circ.verdict();
            let body = json!({
                "class": "circuit",
                "vertices": circ.trellis().vertices().iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
                "coeffs": circ.coeffs().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "beta": circ.beta().0,
                "d": circ.d().to_string(),
                "lambdas": circ.lambdas().weights.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "theta": theta.exact.as_ref().map_or_else(|| format!("{}", theta.value), ToString::to_string),
                "theta_exact": theta.exact.is_some(),
                "theta_power": { "root_degree": theta.root_degree, "value": theta.power.to_string() },
                "theta_lower": theta.lower.to_string(),
                "theta_upper": theta.upper.to_string(),
                "verdict": verdict.as_str(),
            });
            let code = if verdict == Verdict::No {
                EXIT_NEGATIVE
            } else {
                EXIT_POSITIVE
            };
            Report {
                body,
                code,
                summary: format!(
                    "circuit: theta = {}, verdict {}",
                    theta.value,
                    verdict.as_str()
                ),
            }
        }
        CircuitClass::MonomialSquares => Report {
            body: json!({ "class": "monomial_squares", "verdict": "yes" }),
            code: EXIT_POSITIVE,
            summary: "sum of monomial squares".into(),
        },
        CircuitClass::NotCircuit(reason) => Report {
            body: json!({ "class": "not_circuit", "reason": reason }),
            code: EXIT_NEGATIVE,
            summary: format!("not a circuit: {reason}"),
        },
    })
}

fn covers_report(f: &SparsePolynomial) -> Result<Report, SoncError> {
    let part = support_partition(f)?;
    let lambda: Vec<Exponent> = part.lambda.keys().cloned().collect();
    let mut covers = Vec::new();
    let mut uncovered = 0;
    for beta in part.gamma.keys() {
        let cover = enumerate_covers(&lambda, beta);
        if cover.is_empty() {
            uncovered += 1;
        }
        covers.push(json!({
            "beta": beta.0,
            "simplices": cover.simplices.iter().map(|(s, b)| json!({
                "vertices": s.vertices().iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
                "lambdas": b.weights.iter().map(ToString::to_string).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }));
    }
    Ok(Report {
        body: json!({
            "lambda": lambda.iter().map(|e| e.0.clone()).collect::<Vec<_>>(),
            "covers": covers,
        }),
        code: if uncovered == 0 {
            EXIT_POSITIVE
        } else {
            EXIT_NEGATIVE
        },
        summary: format!("{} inner terms, {uncovered} uncovered", part.gamma.len()),
    })
}

fn trellis_from_input(input: &str, c: &Common) -> Result<Simplex, SoncError> {
    let text = read_input(input)?;
    let t = text.trim();
    if t.starts_with('(') || t.starts_with('[') {
        return Simplex::new(parse_points(t)?);
    }
    if t.starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(t)?;
        let pts: Vec<Vec<u32>> =
            serde_json::from_value(v.get("trellis").cloned().unwrap_or_default())?;
        return Simplex::new(pts.into_iter().map(Exponent).collect());
    }
    let f = parse_polynomial(t, c.nvars.unwrap_or_else(|| infer_nvars(t)))?;
    Ok(as_circuit(&f)?.trellis().clone())
}

fn mediated_report(
    input: &str,
    points: Option<&str>,
    scale: u32,
    c: &Common,
) -> Result<Report, SoncError> {
    if scale == 0 {
        return Err(SoncError::InvalidSimplex("scale must be positive".into()));
    }
    let trellis = trellis_from_input(input, c)?.scaled(scale);
    let star = maximal_mediated_set(&trellis)?;
    let lattice = trellis.lattice_points();
    let h = star.len() == lattice.len();
    let mut body = json!({
        "trellis": trellis.vertices().iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
        "maximal_mediated_set": star.points().iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
        "h_trellis": h,
        "lattice_points": lattice.len(),
    });
    let mut code = EXIT_POSITIVE;
    let mut summary = format!(
        "A* has {} of {} lattice points; H-trellis: {h}",
        star.len(),
        lattice.len()
    );
    if let Some(p) = points {
        let m: LatticeSet = parse_points(&read_input(p)?)?.into_iter().collect();
        let ok = is_mediated_set(&m, &trellis);
        body["is_mediated"] = json!(ok);
        if !ok {
            code = EXIT_NEGATIVE;
        }
        summary.push_str(&format!("; candidate mediated: {ok}"));
    }
    Ok(Report {
        body,
        code,
        summary,
    })
}

fn squares_body(squares: &[BinomialSquare], monos: &[MonomialSquare], k: u32) -> serde_json::Value {
    json!({
        "status": "SOSB",
        "k": k,
        "squares": squares.iter().map(BinomialSquare::to_json).collect::<Vec<_>>(),
        "monomial_squares": monos.iter().map(|m| json!({ "coef": m.c.to_string(), "exp": m.w.0 })).collect::<Vec<_>>(),
        "exact": true,
    })
}

fn sosb_report(
    f: &SparsePolynomial,
    k: Option<u32>,
    err: &mut dyn Write,
) -> Result<Report, SoncError> {
    let circ = as_circuit(f)?;
    let (squares, monos, k) = match k {
        Some(k) => {
            let (s, m) = sonc_to_sosb(&[circ], k)?;
            (s, m, k)
        }
        None => {
            let m = maximal_mediated_set(circ.trellis())?;
            match circuit_to_sosb(&circ, &m) {
                Ok((s, mo)) => (s, mo, 1),
                Err(e @ SoncError::NoMediatedWitness { .. }) => {
                    let hint = json!({ "hint": format!("retry with --k {}", circ.nvars()) });
                    let _ = writeln!(err, "{hint}");
                    return Err(e);
                }
                Err(e) => return Err(e),
            }
        }
    };
    let summary = format!(
        "{} binomial squares, {} monomial squares (k = {k})",
        squares.len(),
        monos.len()
    );
    Ok(Report {
        body: squares_body(&squares, &monos, k),
        code: EXIT_POSITIVE,
        summary,
    })
}

fn load_circuits(input: &str) -> Result<Vec<CircuitPolynomial>, SoncError> {
    let text = read_input(input)?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    let list = match v.get("circuits") {
        Some(list) => list.clone(),
        None => v,
    };
    let circuits: Vec<CircuitJson> = serde_json::from_value(list)?;
    circuits.iter().map(CircuitJson::to_circuit).collect()
}

fn transform_report(input: &str, c: &Common) -> Result<Report, SoncError> {
    let circuits = load_circuits(input)?;
    let cert = same_support_transform(&circuits, c.tol)?;
    let status = if cert.exact { "SONC" } else { "INCONCLUSIVE" };
    let body = cert.to_json(status, None);
    if c.exact {
        let f = circuits
            .iter()
            .fold(SparsePolynomial::zero(circuits[0].nvars()), |a, b| {
                &a + &b.to_polynomial()
            });
        if !body.recheck(&f)?.exact {
            return Err(SoncError::Internal(
                "emitted certificate failed its re-check".into(),
            ));
        }
    }
    Ok(Report {
        body: to_value(&body),
        code: if cert.exact {
            EXIT_POSITIVE
        } else {
            EXIT_INCONCLUSIVE
        },
        summary: format!(
            "same-support certificate: {} circuits, {} monomial squares",
            cert.circuits.len(),
            cert.monomial_squares.len()
        ),
    })
}

fn verify_report(f: &SparsePolynomial, certificate: &Path) -> Result<Report, SoncError> {
    let json: CertificateJson = serde_json::from_str(&std::fs::read_to_string(certificate)?)?;
    let cert = json.recheck(f)?;
    let failing: Vec<usize> = cert
        .circuits
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.verdict.is_nonnegative())
        .map(|(i, _)| i)
        .collect();
    let body = json!({
        "verified": cert.exact,
        "same_support": cert.is_same_support(f),
        "failing_circuits": failing,
        "residual": cert.residual.to_string(),
        "residual_norm": crate::rational_to_f64(&cert.residual.l1_norm()),
    });
    Ok(Report {
        body,
        code: if cert.exact {
            EXIT_POSITIVE
        } else {
            EXIT_NEGATIVE
        },
        summary: if cert.exact {
            "certificate verified".into()
        } else {
            format!("certificate rejected: residual {}", cert.residual)
        },
    })
}
