//! The `solenoid` command line: argument parsing, dispatch, and JSON/CSV output.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::distance::{connes_distance, resolution_table, DistanceQuery};
use crate::error::{Error, Result};
use crate::function::{integrate, FunctionFamily, SampledFunction};
use crate::geometry::{enumerate_edges, write_edges_csv, CellAddress, TrianglePoint};
use crate::groupoid::{
    covering_branches, format_word, morphism_between, morphism_word, normal_form, parse_word,
    word_isometry, LocalIsometry,
};
use crate::operators::{projection, EdgeWindow, Projection};
use crate::verify;
use crate::zeta::{nc_integral, residue_estimate, zeta};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "solenoid",
    version,
    about = "Spectral triple on the Sierpinski gasket solenoid"
)]
pub struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "SOLENOID_THREADS")]
    pub threads: Option<usize>,

    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// List the edges of K_n with lengths 2^min-exp ..= 2^max-exp
    Edges(EdgesArgs),
    /// Groupoid elements: normal forms, maps between cells, the covering map
    #[command(subcommand)]
    Groupoid(GroupoidCommand),
    /// Renormalized trace of a projection, or the trace recursion
    Trace(TraceArgs),
    /// Truncated zeta function, or a CSV curve over s
    Zeta(ZetaArgs),
    /// Residue of the zeta function at the metric dimension
    Residue(ResidueArgs),
    /// Integral or noncommutative integral of a built-in function
    Integral(IntegralArgs),
    /// Geodesic and Connes distance between two vertices
    Distance(DistanceArgs),
    /// Run the acceptance checks
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
pub struct EdgesArgs {
    #[arg(long)]
    pub level: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub min_exp: i32,
    #[arg(long, allow_hyphen_values = true)]
    pub max_exp: i32,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupoidCommand {
    /// Reduce a word such as R0_02,R0_21 to descending generators
    NormalForm {
        #[arg(long)]
        word: String,
    },
    /// The groupoid element between two cells such as 2:01 and 2:12
    Between {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Branches of the covering map p_n at a point
    Cover {
        #[arg(long)]
        point: String,
        #[arg(long)]
        scale: u32,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct TraceArgs {
    /// Projection such as "P^0", "P^-1,2", "P^-p,inf"
    #[arg(long, default_value = "P^0", allow_hyphen_values = true)]
    pub projection: String,
    /// Value substituted for a literal `p` in the projection
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<i32>,
    /// Window level
    #[arg(long, default_value_t = 4)]
    pub level: u32,
    /// Shortest window edge exponent (default: what the projection needs)
    #[arg(long, allow_hyphen_values = true)]
    pub min_exp: Option<i32>,
    /// Check tr(P_{m+1} T) = 3 tr(P_m T) + tr(P^{m+1}_{m+1} T) instead
    #[arg(long)]
    pub check_recursion: bool,
    #[arg(long, default_value_t = 0)]
    pub m: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct ZetaArgs {
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    #[arg(long, default_value_t = 80)]
    pub cutoff: u32,
    /// `start,stop,step` for a curve of values
    #[arg(long)]
    pub curve: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug, Serialize)]
pub struct ResidueArgs {
    #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3")]
    pub eps: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Quadrature,
    Residue,
}

#[derive(Args, Debug, Serialize)]
pub struct IntegralArgs {
    /// `1`, `alpha`, `beta`, `alpha2`, `affine:c0,ca,cb` or a constant
    #[arg(long, default_value = "1")]
    pub function: String,
    #[arg(long, default_value_t = 0)]
    pub level: u32,
    #[arg(long, default_value_t = 10)]
    pub resolution: i32,
    #[arg(long, value_enum, default_value = "quadrature")]
    pub method: Method,
    #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3")]
    pub eps: Vec<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct DistanceArgs {
    /// Point `alpha,beta`, e.g. `0/1,0/1`
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    #[arg(long, default_value_t = 0)]
    pub level: u32,
    #[arg(long, default_value_t = 8)]
    pub resolution: i32,
    /// Build and verify the dual witness
    #[arg(long)]
    pub certificate: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Counting identities, cocycle and closed-form traces only
    #[arg(long)]
    pub quick: bool,
    /// Run a single criterion (1-10)
    #[arg(long, conflicts_with = "quick")]
    pub criterion: Option<usize>,
}

/// Reproducibility record embedded in every JSON result.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub parameters: Value,
    pub library_version: &'static str,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub deterministic_order: bool,
    pub threads: Option<usize>,
    pub wall_time_seconds: f64,
}

/// Exact rational as decimal numerator and denominator strings.
fn rational_json(q: &BigRational) -> Value {
    json!({
        "value_num": q.numer().to_string(),
        "value_den": q.denom().to_string(),
        "value": num_traits::ToPrimitive::to_f64(q),
    })
}

fn isometry_json(g: &LocalIsometry, word: &[crate::groupoid::GeneratorSymbol]) -> Value {
    json!({
        "rotation": g.rotation.degrees(),
        "translation": g.translation.to_string(),
        "source": g.source.to_string(),
        "target": g.target.to_string(),
        "descending_word": format_word(word),
    })
}

/// Result of a subcommand before serialization.
enum Output {
    Json { result: Value, ok: bool },
    Csv(Vec<u8>),
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

fn default_min_exp(kind: &Projection, level: u32) -> i32 {
    let low = match *kind {
        Projection::Scale(k) | Projection::ScaleLevel(k, _) => k,
        Projection::ScaleRange(k, _) | Projection::ScaleRangeLevel(k, _, _) => k,
        Projection::From(p) => -p,
        Projection::Level(_) | Projection::Cell(_) => 0,
    };
    low.min(level as i32)
}

fn run_edges(a: &EdgesArgs) -> Result<Output> {
    let edges = enumerate_edges(a.level, a.min_exp, a.max_exp)?;
    match a.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_edges_csv(&edges, &mut buf)?;
            Ok(Output::Csv(buf))
        }
        Format::Json => {
            let rows: Vec<Value> = edges
                .iter()
                .map(|e| {
                    let (s, t) = e.endpoints();
                    json!({
                        "edge": e.to_string(),
                        "len_exp": e.len_exp(),
                        "source": s.to_string(),
                        "target": t.to_string(),
                    })
                })
                .collect();
            Ok(Output::Json {
                result: json!({ "count": edges.len(), "edges": rows }),
                ok: true,
            })
        }
    }
}

fn run_groupoid(c: &GroupoidCommand) -> Result<Output> {
    let result = match c {
        GroupoidCommand::NormalForm { word } => {
            let w = parse_word(word)?;
            let g = word_isometry(&w)?;
            let nf = normal_form(&w)?;
            let mut v = isometry_json(&g, &nf);
            v["input_word"] = json!(format_word(&w));
            v
        }
        GroupoidCommand::Between { from, to } => {
            let c1: CellAddress = from.parse()?;
            let c2: CellAddress = to.parse()?;
            let g = morphism_between(&c1, &c2)?;
            isometry_json(&g, &morphism_word(&c1, &c2)?)
        }
        GroupoidCommand::Cover { point, scale } => {
            let x: TrianglePoint = point.parse()?;
            let b = covering_branches(&x, *scale)?;
            json!({
                "point": x.to_string(),
                "scale": scale,
                "value": b[0].to_string(),
                "branches": b.iter().map(ToString::to_string).collect::<Vec<_>>(),
            })
        }
    };
    Ok(Output::Json { result, ok: true })
}

fn run_trace(a: &TraceArgs) -> Result<Output> {
    let text = match a.p {
        Some(p) => a.projection.replace('p', &p.to_string()),
        None => a.projection.clone(),
    };
    let kind: Projection = text.parse()?;
    let min_exp = a.min_exp.unwrap_or_else(|| default_min_exp(&kind, a.level));
    let w = Arc::new(EdgeWindow::new(a.level, min_exp, a.level as i32)?);
    let t = projection::<BigRational>(&kind, &w)?;
    let window =
        json!({ "level": a.level, "min_exp": min_exp, "max_exp": a.level, "dim": w.dim() });
    if a.check_recursion {
        let (lhs, rhs) = t.trace_recursion_check(a.m)?;
        let ok = lhs == rhs;
        return Ok(Output::Json {
            result: json!({
                "projection": kind.to_string(),
                "window": window,
                "m": a.m,
                "lhs": rational_json(&lhs),
                "rhs": rational_json(&rhs),
                "holds": ok,
            }),
            ok,
        });
    }
    let tau = t.renormalized_trace()?;
    let mut result = rational_json(&tau);
    result["projection"] = json!(kind.to_string());
    result["window"] = window;
    Ok(Output::Json { result, ok: true })
}

fn parse_curve(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad curve {s:?}")))
        })
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(usage("curve must be start,stop,step"));
    };
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(usage("curve needs step > 0 and stop >= start"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

fn run_zeta(a: &ZetaArgs) -> Result<Output> {
    let grid = match &a.curve {
        Some(c) => parse_curve(c)?,
        None => vec![a.s],
    };
    let rows = grid
        .iter()
        .map(|&s| zeta(s, a.cutoff))
        .collect::<Result<Vec<_>>>()?;
    match a.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| usage(format!("csv output: {e}"));
            w.write_record(["s", "cutoff", "zeta", "tail_bound"])
                .map_err(io)?;
            for z in &rows {
                w.write_record([
                    z.s.to_string(),
                    z.cutoff.to_string(),
                    z.value.to_string(),
                    z.tail_bound.to_string(),
                ])
                .map_err(io)?;
            }
            let buf = w
                .into_inner()
                .map_err(|e| usage(format!("csv output: {e}")))?;
            Ok(Output::Csv(buf))
        }
        Format::Json => {
            let result = if a.curve.is_some() {
                json!({ "curve": rows })
            } else {
                serde_json::to_value(&rows[0]).expect("serializable")
            };
            Ok(Output::Json { result, ok: true })
        }
    }
}

fn run_residue(a: &ResidueArgs) -> Result<Output> {
    let r = residue_estimate(&a.eps)?;
    let expected = 6.0 / 2f64.ln();
    Ok(Output::Json {
        result: json!({
            "residue": r.residue,
            "expected": expected,
            "abs_error": (r.residue - expected).abs(),
            "samples": r.samples,
        }),
        ok: true,
    })
}

fn run_integral(a: &IntegralArgs) -> Result<Output> {
    let family: FunctionFamily = a.function.parse()?;
    let f = SampledFunction::from_family(family, a.level, a.resolution)?;
    let result = match a.method {
        Method::Quadrature => serde_json::to_value(integrate(&f, a.level, a.resolution)?),
        Method::Residue => serde_json::to_value(nc_integral(&f, a.level, &a.eps, a.resolution)?),
    }
    .expect("serializable");
    Ok(Output::Json { result, ok: true })
}

fn run_distance(a: &DistanceArgs) -> Result<Output> {
    let x: TrianglePoint = a.from.parse()?;
    let y: TrianglePoint = a.to.parse()?;
    let coarsest = (-x.finest_exponent()).max(-y.finest_exponent()).max(0) as i32;
    let first = coarsest.max(-(a.level as i32));
    if first > a.resolution {
        return Err(Error::NotSampled(format!(
            "{x} and {y} need resolution at least {first}"
        )));
    }
    let table = resolution_table(&x, &y, a.level, first..=a.resolution)?;
    let value = table.last().expect("nonempty").value;
    let mut result = json!({
        "value": value,
        "level": a.level,
        "resolution": a.resolution,
        "resolution_table": table,
    });
    if a.certificate {
        let q = DistanceQuery {
            x,
            y,
            level: a.level,
            resolution: a.resolution,
        };
        let c = connes_distance(&q)?;
        result["certificate_ok"] = json!(c.value == value);
        result["path"] = json!(c.path.iter().map(ToString::to_string).collect::<Vec<_>>());
        result["constraints_checked"] = json!(c.constraints);
    }
    Ok(Output::Json { result, ok: true })
}

fn run_verify(a: &VerifyArgs, err: &mut dyn Write) -> Result<Output> {
    let reports = match a.criterion {
        Some(id) => vec![verify::criterion(id)?],
        None => verify::run(a.quick),
    };
    for r in &reports {
        let _ = writeln!(err, "{}", r.line());
    }
    let ok = reports.iter().all(|r| r.ok());
    Ok(Output::Json {
        result: json!({ "passed": ok, "criteria": reports }),
        ok,
    })
}

fn write_to(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> io::Result<()> {
    match path {
        Some(p) => File::create(p)?.write_all(bytes),
        None => out.write_all(bytes),
    }
}

fn configure_threads(n: Option<usize>) {
    if let Some(n) = n {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Parses `args` (including the program name) and runs the command.
///
/// Returns the process exit code: 0 on success, 1 when a verification fails,
/// 2 on usage or input errors.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    if cli.threads == Some(0) {
        let _ = writeln!(err, "error: --threads must be positive");
        return EXIT_USAGE;
    }
    configure_threads(cli.threads);
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Edges(a) => run_edges(a),
        Command::Groupoid(c) => run_groupoid(c),
        Command::Trace(a) => run_trace(a),
        Command::Zeta(a) => run_zeta(a),
        Command::Residue(a) => run_residue(a),
        Command::Integral(a) => run_integral(a),
        Command::Distance(a) => run_distance(a),
        Command::Verify(a) => run_verify(a, err),
    };
    let output = match outcome {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return if e.is_verification_failure() {
                EXIT_FAILED
            } else {
                EXIT_USAGE
            };
        }
    };
    let manifest = RunManifest {
        command_line: argv
            .iter()
            .map(|a| a.to_string_lossy().into_owned())
            .collect(),
        parameters: serde_json::to_value(&cli).expect("serializable"),
        library_version: env!("CARGO_PKG_VERSION"),
        tolerances: verify::TOLERANCES.iter().copied().collect(),
        deterministic_order: true,
        threads: cli.threads,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let (bytes, ok) = match output {
        Output::Json { result, ok } => {
            let doc = json!({ "manifest": manifest, "result": result });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            (s.into_bytes(), ok)
        }
        Output::Csv(buf) => {
            let m = serde_json::to_string_pretty(&manifest).expect("serializable");
            match &cli.out {
                Some(p) => {
                    let mut side = p.clone().into_os_string();
                    side.push(".manifest.json");
                    if let Err(e) = std::fs::write(&side, m + "\n") {
                        let _ = writeln!(err, "error: {e}");
                        return EXIT_USAGE;
                    }
                }
                None => {
                    let _ = writeln!(err, "{m}");
                }
            }
            (buf, true)
        }
    };
    if let Err(e) = write_to(cli.out.as_deref(), &bytes, out) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}
