//! Command-line front end: parses flags and JSON documents, dispatches to the
//! library and renders deterministic JSON reports.

use std::ffi::OsString;
use std::fs;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use oper_slope::acceptance::{run_all, unexpected_failures};
use oper_slope::gauge::{slope_from_reduced, word_to_json, ConnectionJson};
use oper_slope::kac_moody::{uelement_from_json, Level, UElementJson};
use oper_slope::lie::resolve_algebra;
use oper_slope::moy_prasad::{jumps, lattice, ApartmentPoint};
use oper_slope::oper::{
    canonicalize, reduced_form_via_oper, slope_of_oper, type_a_newton_slope, OperCanonical, OperGeneral, OperJson,
    ReducedJson,
};
use oper_slope::rational::{format_q, parse_q};
use oper_slope::series::DEFAULT_TERMS;
use oper_slope::sugawara::{annihilation_check_at, quadratic_sugawara, report_to_json, VertexElement};
use oper_slope::{Error, Result, SimpleLieAlgebra, Q};

#[derive(Parser, Debug)]
#[command(name = "oper-slope", version, about = "Exact slopes of opers and Segal-Sugawara annihilation checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Io {
    /// Input document; standard input when absent.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Algebra `A1`..`A8` or a structure-constant file, overriding the document.
    #[arg(long)]
    pub algebra: Option<String>,
    /// Terms past the valuation for series given without `prec`.
    #[arg(long, default_value_t = DEFAULT_TERMS)]
    pub prec: i64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Slope of an oper, or of a connection already in reduced form.
    Slope(Io),
    /// Drinfeld-Sokolov canonical form of an oper-shaped connection.
    Canonicalize(Io),
    /// Reduced form of an oper, with its slope.
    Reduce(Io),
    /// Slope of a type A oper from the Newton polygon of its scalar equation.
    NewtonSlope(Io),
    /// Moy-Prasad powers and filtration jumps at a point of the apartment.
    Mp {
        #[arg(long)]
        algebra: String,
        /// Comma-separated simple-root values, e.g. `1/3,1/3`.
        #[arg(long)]
        x: String,
        #[arg(long)]
        r: String,
        #[arg(long)]
        plus: bool,
        /// Depth window `lo:hi` for the jump set.
        #[arg(long)]
        jumps: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks that Sugawara modes annihilate the generating vector of an induced module.
    SugawaraCheck {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        r: String,
        /// Mode window `a:b`, inclusive.
        #[arg(long, default_value = "0:8")]
        modes: String,
        /// Multiple of the Killing form; critical is `-1/2`.
        #[arg(long, default_value = "-1/2")]
        level: String,
        /// Vertex element as UElement JSON; the quadratic vector when absent.
        #[arg(long)]
        vector: Option<PathBuf>,
        /// Index of the exponent the vector belongs to.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the acceptance suite.
    Selftest {
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit code and report for a parsed command. `input` is the document read
/// from `--in` or standard input, when the command takes one.
pub fn execute(cmd: &Command, input: Option<&str>) -> (i32, Value) {
    match dispatch(cmd, input) {
        Ok(out) => out,
        Err(e) => (e.exit_code(), json!({ "error": e.to_string() })),
    }
}

fn dispatch(cmd: &Command, input: Option<&str>) -> Result<(i32, Value)> {
    match cmd {
        Command::Slope(io) => {
            let doc = parse_doc(input)?;
            if doc.get("components").is_some() {
                let (alg, cj) = connection_doc(io, doc)?;
                let c = cj.to_connection(&alg, Some(io.prec))?;
                return Ok((0, json!({ "slope": format_q(&slope_from_reduced(&alg, &c)?) })));
            }
            let (alg, chi) = oper_doc(io, doc)?;
            Ok((0, json!({ "slope": format_q(&slope_of_oper(&alg, &chi)?) })))
        }
        Command::NewtonSlope(io) => {
            let (alg, chi) = oper_doc(io, parse_doc(input)?)?;
            Ok((0, json!({ "slope": format_q(&type_a_newton_slope(&alg, &chi)?) })))
        }
        Command::Canonicalize(io) => {
            let (alg, cj) = connection_doc(io, parse_doc(input)?)?;
            let c = cj.to_connection(&alg, Some(io.prec))?;
            let general = OperGeneral::from_connection(&alg, &c)?;
            let (chi, word) = canonicalize(&alg, &general)?;
            Ok((0, json!({ "oper": OperJson::from_oper(&alg, &chi), "word": word_to_json(&alg, &word) })))
        }
        Command::Reduce(io) => {
            let (alg, chi) = oper_doc(io, parse_doc(input)?)?;
            let red = reduced_form_via_oper(&alg, &chi)?;
            let slope = slope_from_reduced(&alg, &red.connection)?;
            Ok((
                0,
                json!({
                    "reduced": ReducedJson::from_reduced(&alg, &red),
                    "connection": ConnectionJson::from_connection(&alg, &red.connection),
                    "slope": format_q(&slope),
                }),
            ))
        }
        Command::Mp { algebra, x, r, plus, jumps: window, .. } => {
            let alg = resolve_algebra(algebra)?;
            let point = parse_point(&alg, x)?;
            let r = parse_q(r)?;
            let lat = lattice(&alg, &point, &r, *plus)?;
            let powers: serde_json::Map<String, Value> =
                (0..alg.dim()).map(|b| (alg.label(b).to_string(), json!(lat.powers[b]))).collect();
            let mut report = json!({
                "algebra": alg.name(),
                "x": point.values.iter().map(format_q).collect::<Vec<_>>(),
                "r": format_q(&r),
                "plus": plus,
                "powers": powers,
            });
            if let Some(w) = window {
                let (lo, hi) = parse_window(w, parse_q)?;
                let js = jumps(&alg, &point, &lo, &hi)?;
                report["jumps"] = json!(js.iter().map(format_q).collect::<Vec<_>>());
            }
            Ok((0, report))
        }
        Command::SugawaraCheck { algebra, x, r, modes, level, vector, index, .. } => {
            let alg = resolve_algebra(algebra)?;
            let point = parse_point(&alg, x)?;
            let r = parse_q(r)?;
            let (a, b) = parse_window(modes, |s| s.parse::<i64>().map_err(|e| Error::Schema(format!("mode {s:?}: {e}"))))?;
            let lvl = Level::new(parse_q(level)?);
            let s = match vector {
                Some(path) => {
                    let text = read_path(path)?;
                    let uj: UElementJson = from_json(&text)?;
                    VertexElement::new(uelement_from_json(&alg, &uj)?)?
                }
                None => quadratic_sugawara(&alg),
            };
            if *index >= alg.rank() {
                return Err(Error::Schema(format!("index {index} out of range for rank {}", alg.rank())));
            }
            let report = annihilation_check_at(&alg, &s, *index, &point, &r, a..=b, &lvl)?;
            let mut doc = report_to_json(&report, &r);
            doc["algebra"] = json!(alg.name());
            doc["x"] = json!(point.values.iter().map(format_q).collect::<Vec<_>>());
            doc["level"] = json!(format_q(&lvl.c_factor));
            Ok((if report.passed() { 0 } else { 1 }, doc))
        }
        Command::Selftest { seed, .. } => {
            let results = run_all(*seed);
            for r in &results {
                eprintln!("{}", r.line());
            }
            let unexpected = unexpected_failures(&results);
            let doc = json!({
                "seed": seed,
                "criteria": results.iter().map(|r| json!({
                    "id": r.id,
                    "name": r.name,
                    "passed": r.passed,
                    "detail": r.detail,
                })).collect::<Vec<_>>(),
                "unexpected_failures": unexpected,
            });
            Ok((if unexpected.is_empty() { 0 } else { 1 }, doc))
        }
    }
}

fn parse_doc(input: Option<&str>) -> Result<Value> {
    from_json(input.ok_or_else(|| Error::Schema("missing input document".into()))?)
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}

fn from_value<T: serde::de::DeserializeOwned>(doc: Value) -> Result<T> {
    serde_json::from_value(doc).map_err(|e| Error::Schema(e.to_string()))
}

fn algebra_for(io: &Io, named: &str) -> Result<SimpleLieAlgebra> {
    resolve_algebra(io.algebra.as_deref().unwrap_or(named))
}

fn oper_doc(io: &Io, doc: Value) -> Result<(SimpleLieAlgebra, OperCanonical)> {
    let oj: OperJson = from_value(doc)?;
    let alg = algebra_for(io, &oj.algebra)?;
    let chi = oj.to_oper(&alg, Some(io.prec))?;
    Ok((alg, chi))
}

fn connection_doc(io: &Io, doc: Value) -> Result<(SimpleLieAlgebra, ConnectionJson)> {
    let cj: ConnectionJson = from_value(doc)?;
    let alg = algebra_for(io, &cj.algebra)?;
    Ok((alg, cj))
}

fn parse_point(alg: &SimpleLieAlgebra, x: &str) -> Result<ApartmentPoint> {
    let values = match x {
        "0" => vec![Q::from_integer(0.into()); alg.rank()],
        "barycentre" | "barycenter" => return Ok(ApartmentPoint::barycentre(alg)),
        _ => x.split(',').map(|v| parse_q(v.trim())).collect::<Result<Vec<_>>>()?,
    };
    if values.len() != alg.rank() {
        return Err(Error::Schema(format!("point has {} coordinates, rank is {}", values.len(), alg.rank())));
    }
    Ok(ApartmentPoint::new(values))
}

fn parse_window<T: PartialOrd>(s: &str, parse: impl Fn(&str) -> Result<T>) -> Result<(T, T)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::Schema(format!("expected lo:hi, got {s:?}")))?;
    let (lo, hi) = (parse(lo.trim())?, parse(hi.trim())?);
    if lo > hi {
        return Err(Error::Schema(format!("empty window {s:?}")));
    }
    Ok((lo, hi))
}

fn read_path(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))
}

fn io_of(cmd: &Command) -> (Option<&PathBuf>, Option<&PathBuf>, bool) {
    match cmd {
        Command::Slope(io) | Command::Canonicalize(io) | Command::Reduce(io) | Command::NewtonSlope(io) => {
            (io.input.as_ref(), io.out.as_ref(), true)
        }
        Command::Mp { out, .. } | Command::SugawaraCheck { out, .. } | Command::Selftest { out, .. } => {
            (None, out.as_ref(), false)
        }
    }
}

/// Full process behaviour: parse arguments, read input, execute, write output.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (input_path, out_path, wants_input) = io_of(&cli.command);
    let input = if wants_input {
        let text = match input_path {
            Some(p) => read_path(p),
            None => {
                let mut s = String::new();
                std::io::stdin()
                    .read_to_string(&mut s)
                    .map(|_| s)
                    .map_err(|e| Error::Schema(format!("cannot read standard input: {e}")))
            }
        };
        match text {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("error: {e}");
                return e.exit_code();
            }
        }
    } else {
        None
    };
    let (code, report) = execute(&cli.command, input.as_deref());
    let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
    text.push('\n');
    if let Some(msg) = report.get("error").and_then(Value::as_str) {
        eprintln!("error: {msg}");
    }
    match out_path {
        Some(p) => {
            if let Err(e) = fs::write(p, &text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return 3;
            }
        }
        None => print!("{text}"),
    }
    code
}
