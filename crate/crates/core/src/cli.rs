//! Command-line front end: `trop`, `analyze` and `faithful`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::curve::{curve_of, CurveError};
use crate::faithful::{certify, certify_family, default_precision, sample_check, Certification, FaithfulError};
use crate::literal::ParseError;
use crate::puiseux::PuiseuxSeries;
use crate::rational::{fmt_q, parse_q, Q};
use crate::svg;
use crate::tropical::LaurentPolynomial;
use crate::weierstrass::{analyze, WeierstrassError, WeierstrassModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SINGULAR: i32 = 3;
pub const EXIT_NOT_FAITHFUL: i32 = 4;
pub const EXIT_NOT_MULTIPLICATIVE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "tropell", version, about = "Tropical plane curves and faithful tropicalizations of elliptic curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tropicalize a bivariate Laurent polynomial and describe its plane curve.
    Trop {
        /// e.g. "x^2*y + x*y + x*y^2 + t^3"
        poly: String,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Invariants, minimal model and reduction type of `[a1,a2,a3,a4,a6]`.
    Analyze {
        model: String,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Certify a faithful tropicalization for a model or for `y^2 = x^3 + a(x - b)^2`.
    Faithful {
        model: Option<String>,
        /// `a=A b=B`
        #[arg(long, num_args = 2, value_names = ["a=A", "b=B"], conflicts_with = "model")]
        family: Option<Vec<String>>,
        /// Working precision `p/q`.
        #[arg(long, value_parser = parse_precision)]
        precision: Option<Q>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// `k=LO..HI`; the token `k` in the inputs is replaced by each value.
        #[arg(long, value_parser = parse_sweep)]
        sweep: Option<(i64, i64)>,
    },
}

fn parse_precision(s: &str) -> Result<Q, String> {
    match parse_q(s) {
        Some(p) if p > Q::from_integer(0.into()) => Ok(p),
        Some(_) => Err("precision must be positive".into()),
        None => Err(format!("not a rational number: {s}")),
    }
}

fn parse_sweep(s: &str) -> Result<(i64, i64), String> {
    let range = s.strip_prefix("k=").ok_or("expected k=LO..HI")?;
    let (lo, hi) = range.split_once("..").ok_or("expected k=LO..HI")?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad bound {lo}"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad bound {hi}"))?;
    if lo < 1 || hi < lo {
        return Err(format!("empty or non-positive range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    fn parse(what: &str, src: &str, e: &ParseError) -> Self {
        let caret = " ".repeat(e.pos.min(src.len()));
        Failure::new(EXIT_PARSE, format!("{what}: {e}\n  {src}\n  {caret}^"))
    }
}

type Outcome = Result<i32, Failure>;
type ModeRuns = Vec<(String, Result<Certification, Failure>)>;

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Trop { poly, svg, json } => cmd_trop(&poly, svg.as_deref(), json.as_deref(), out),
        Command::Analyze { model, json } => cmd_analyze(&model, json.as_deref(), out),
        Command::Faithful { model, family, precision, seed, samples, svg, json, sweep } => {
            let input = Input::from_args(model, family)?;
            let cfg = Config { precision: precision.unwrap_or_else(default_precision), seed, samples, svg, json };
            match sweep {
                Some((lo, hi)) => cmd_sweep(&input, lo, hi, &cfg, out, err),
                None => cmd_faithful(&input, &cfg, out, err),
            }
        }
    }
}

fn emit(value: &serde_json::Value, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("json");
    if let Some(p) = path {
        write_file(p, &format!("{text}\n"))?;
    }
    writeln!(out, "{text}").map_err(|e| Failure::new(EXIT_ERROR, e.to_string()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::new(EXIT_ERROR, format!("writing {}: {e}", path.display())))
}

pub fn cmd_trop(poly: &str, svg_path: Option<&Path>, json_path: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let f = LaurentPolynomial::parse(poly).map_err(|e| Failure::parse("polynomial", poly, &e))?;
    let trop = f.tropicalize().map_err(|e| Failure::new(EXIT_PARSE, format!("tropicalize: {e}")))?;
    let curve = curve_of(&trop).map_err(|e| match e {
        CurveError::NotBivariate(_) | CurveError::DegenerateInput => Failure::new(EXIT_PARSE, format!("curve: {e}")),
        e => Failure::new(EXIT_ERROR, format!("curve: {e}")),
    })?;
    let cycle = curve.find_cycle().map_err(|e| Failure::new(EXIT_ERROR, format!("cycle: {e}")))?;
    if let Some(p) = svg_path {
        write_file(p, &svg::render(&curve, cycle.as_ref()))?;
    }
    let cycle_json = cycle
        .as_ref()
        .map(|c| json!({"edges": c.edges, "vertices": c.vertices, "length": fmt_q(&c.total_lattice_length)}));
    let value = json!({
        "polynomial": f.to_string(),
        "tropical": trop.to_json(),
        "tropical_text": trop.to_string(),
        "curve": curve.to_json(),
        "unimodular": curve.subdivision.is_unimodular(),
        "cycle": cycle_json,
    });
    emit(&value, json_path, out)?;
    Ok(EXIT_OK)
}

fn weierstrass_failure(stage: &str, e: &WeierstrassError) -> Failure {
    let code = if matches!(e, WeierstrassError::SingularModel) { EXIT_SINGULAR } else { EXIT_ERROR };
    Failure::new(code, format!("{stage}: {e}"))
}

fn parse_model(src: &str) -> Result<WeierstrassModel, Failure> {
    WeierstrassModel::parse(src).map_err(|e| Failure::parse("model", src, &e))
}

pub fn cmd_analyze(model: &str, json_path: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let w = parse_model(model)?;
    let a = analyze(&w).map_err(|e| weierstrass_failure("analyze", &e))?;
    emit(&a.to_json(), json_path, out)?;
    Ok(EXIT_OK)
}

/// Settings of a `faithful` run.
#[derive(Debug, Clone)]
pub struct Config {
    pub precision: Q,
    pub seed: u64,
    pub samples: usize,
    pub svg: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

/// What `faithful` certifies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Model(String),
    Family {
        a: String,
        b: String,
    },
    /// The canonical family `y² = x³ + (x − t^k)²`, in both modes.
    Canonical,
}

impl Input {
    fn from_args(model: Option<String>, family: Option<Vec<String>>) -> Result<Self, Failure> {
        match (model, family) {
            (Some(m), None) => Ok(Input::Model(m)),
            (None, Some(kv)) => {
                let (mut a, mut b) = (None, None);
                for item in kv {
                    match item.split_once('=') {
                        Some(("a", v)) => a = Some(v.to_string()),
                        Some(("b", v)) => b = Some(v.to_string()),
                        _ => {
                            return Err(Failure::new(EXIT_PARSE, format!("family: expected a=.. or b=.., got {item}")))
                        }
                    }
                }
                match (a, b) {
                    (Some(a), Some(b)) => Ok(Input::Family { a, b }),
                    _ => Err(Failure::new(EXIT_PARSE, "family: both a=.. and b=.. are required")),
                }
            }
            (None, None) => Ok(Input::Canonical),
            (Some(_), Some(_)) => Err(Failure::new(EXIT_PARSE, "give either a model or --family, not both")),
        }
    }
}

/// Replaces the standalone identifier `k` by `value`.
pub fn substitute_k(src: &str, value: i64) -> String {
    let chars: Vec<char> = src.chars().collect();
    let mut s = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let ident = |j: Option<usize>| j.and_then(|j| chars.get(j)).is_some_and(|c| c.is_alphanumeric() || *c == '_');
        if c == 'k' && !ident(i.checked_sub(1)) && !ident(Some(i + 1)) {
            s.push_str(&format!("({value})"));
        } else {
            s.push(c);
        }
    }
    s
}

fn faithful_failure(e: &FaithfulError) -> Failure {
    let code = match e {
        FaithfulError::Weierstrass { source: WeierstrassError::SingularModel, .. } => EXIT_SINGULAR,
        FaithfulError::InvalidFamily(_) => EXIT_PARSE,
        _ => EXIT_ERROR,
    };
    Failure::new(code, e.to_string())
}

fn parse_series(what: &str, src: &str) -> Result<PuiseuxSeries, Failure> {
    PuiseuxSeries::parse(src).map_err(|e| Failure::parse(what, src, &e))
}

fn run_model(src: &str, precision: &Q) -> Result<Certification, Failure> {
    let w = parse_model(src)?;
    certify(&w, precision).map_err(|e| faithful_failure(&e))
}

fn run_family(a: &str, b: &str, precision: &Q) -> Result<Certification, Failure> {
    let a = parse_series("a", a)?;
    let b = parse_series("b", b)?;
    certify_family(&a, &b, precision).map_err(|e| faithful_failure(&e))
}

/// Certification plus sampling; returns the JSON document, the SVG and the exit code.
fn faithful_document(cert: &Certification, cfg: &Config) -> (serde_json::Value, Option<String>, i32, Vec<String>) {
    let mut notes = Vec::new();
    let mut doc = cert.to_json();
    match cert.report() {
        None => {
            notes.push("minimal model does not have multiplicative reduction".into());
            (doc, None, EXIT_NOT_MULTIPLICATIVE, notes)
        }
        Some(r) => {
            let stats = sample_check(r, cfg.samples, cfg.seed);
            let mut code = if r.verdict { EXIT_OK } else { EXIT_NOT_FAITHFUL };
            if !r.verdict {
                notes.push(format!(
                    "cycle length {} differs from -v(j) = {}",
                    r.cycle_length.as_ref().map(fmt_q).unwrap_or_else(|| "none".into()),
                    fmt_q(&r.minus_v_j)
                ));
            }
            if !stats.passed() {
                code = EXIT_NOT_FAITHFUL;
                notes.push(format!("sampling: {} sampled points off the tropical curve", stats.failures));
            }
            doc["seed"] = json!(cfg.seed);
            doc["sampling"] = stats.to_json();
            (doc, Some(svg::render(&r.curve, r.cycle.as_ref())), code, notes)
        }
    }
}

pub fn cmd_faithful(input: &Input, cfg: &Config, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let cert = match input {
        Input::Model(m) => run_model(m, &cfg.precision)?,
        Input::Family { a, b } => run_family(a, b, &cfg.precision)?,
        Input::Canonical => run_family("1", "t", &cfg.precision)?,
    };
    let (doc, svg_text, code, notes) = faithful_document(&cert, cfg);
    if let (Some(p), Some(s)) = (&cfg.svg, &svg_text) {
        write_file(p, s)?;
    }
    emit(&doc, cfg.json.as_deref(), out)?;
    for n in notes {
        let _ = writeln!(err, "faithful: {n}");
    }
    Ok(code)
}

fn sweep_one(input: &Input, k: i64, cfg: &Config) -> ModeRuns {
    match input {
        Input::Model(m) => vec![("general".into(), run_model(&substitute_k(m, k), &cfg.precision))],
        Input::Family { a, b } => {
            vec![("family".into(), run_family(&substitute_k(a, k), &substitute_k(b, k), &cfg.precision))]
        }
        Input::Canonical => vec![
            ("general".into(), run_model(&format!("[0,1,0,-2*t^{k},t^{}]", 2 * k), &cfg.precision)),
            ("family".into(), run_family("1", &format!("t^{k}"), &cfg.precision)),
        ],
    }
}

fn summary(cert: &Certification, cfg: &Config) -> (serde_json::Value, i32) {
    match cert.report() {
        None => (cert.to_json(), EXIT_NOT_MULTIPLICATIVE),
        Some(r) => {
            let stats = sample_check(r, cfg.samples, cfg.seed);
            let ok = r.verdict && stats.passed();
            let value = json!({
                "input": r.input.to_string(),
                "cycle_length": r.cycle_length.as_ref().map(fmt_q),
                "minus_v_j": fmt_q(&r.minus_v_j),
                "three_v_b": fmt_q(&r.three_v_b),
                "verdict": r.verdict,
                "sampling": {
                    "samples": stats.samples,
                    "resolved": stats.resolved,
                    "unresolved": stats.unresolved,
                    "failures": stats.failures,
                },
            });
            (value, if ok { EXIT_OK } else { EXIT_NOT_FAITHFUL })
        }
    }
}

pub fn cmd_sweep(input: &Input, lo: i64, hi: i64, cfg: &Config, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let results: Vec<(i64, ModeRuns)> = std::thread::scope(|s| {
        let handles: Vec<_> = (lo..=hi).map(|k| (k, s.spawn(move || sweep_one(input, k, cfg)))).collect();
        handles.into_iter().map(|(k, h)| (k, h.join().expect("sweep worker"))).collect()
    });
    let mut code = EXIT_OK;
    let mut rows = Vec::new();
    for (k, runs) in results {
        let mut row = serde_json::Map::new();
        row.insert("k".into(), json!(k));
        for (mode, res) in runs {
            match res {
                Ok(cert) => {
                    let (v, c) = summary(&cert, cfg);
                    if c != EXIT_OK {
                        let _ = writeln!(err, "sweep: k={k} {mode}: not certified");
                        code = code.max(c);
                    }
                    row.insert(mode, v);
                }
                Err(f) => {
                    let _ = writeln!(err, "sweep: k={k} {mode}: {}", f.message);
                    code = code.max(f.code);
                    row.insert(mode, json!({"error": f.message}));
                }
            }
        }
        rows.push(serde_json::Value::Object(row));
    }
    emit(&json!(rows), cfg.json.as_deref(), out)?;
    Ok(code)
}
