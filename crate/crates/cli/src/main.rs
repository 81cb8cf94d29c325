mod plot;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use torus_locus::blaschke::{self, BlaschkeError, CircleMap, CircleMapCheck, Verification};
use torus_locus::density::{self, DecideConfig, DensityProbe, DensityVerdict, Reason, Verdict, VarietySpec};
use torus_locus::parser::{collect_identifiers, format_poly_with, validate_variables, ExprSource, RationalExpr};
use torus_locus::torus::{self, SolutionKind, TorusSolutionSet};
use torus_locus::{parse_with, LaurentPoly, ParseError};

use report::{fmt_c, fmt_f, to_json, Body, ConfigEcho, InputEcho, Report, TOOL};

const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_NO_INPUT: u8 = 66;
const EXIT_IO: u8 = 74;
const EXIT_REPLAY_FAILED: u8 = 3;
const FAMILY_SAMPLES: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "torus-locus", version, about = "Decide and solve Laurent polynomial equations on the unit torus")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Distance from the unit circle that still counts as on it.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive_f64)]
    tol: f64,
    /// Samples on the base circle.
    #[arg(long, global = true, default_value_t = density::DEFAULT_GRID, value_parser = grid_size)]
    grid: usize,
    /// Base windows scanned when no arc spans the full grid.
    #[arg(long, global = true, default_value_t = density::DEFAULT_WINDOWS)]
    probes: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Comma-separated variable names, e.g. `z,w`. Inferred when omitted.
    #[arg(long, global = true)]
    vars: Option<String>,
    /// Record wall-clock time in the report (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Svg,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Is the torus part of the curve Zariski dense? Exit 0 dense, 1 not dense, 2 unknown.
    Decide { expr: String },
    /// All torus solutions of a bivariate polynomial with at most three terms.
    Solve { expr: String },
    /// SVG of the tracked fibers over the base circle.
    Plot { expr: String },
    /// Rational maps sending the torus to the unit circle.
    #[command(subcommand)]
    CircleMap(CircleMapCmd),
    /// Re-check a JSON report produced by this tool.
    VerifyCertificate { report: PathBuf },
}

#[derive(Subcommand, Debug)]
enum CircleMapCmd {
    /// Build `p / (z^t p*)` from `p`.
    Make { expr: String },
    /// Decide whether `num / den` maps the torus to the circle. Exit 0 proven, 1 refuted, 2 unknown.
    Verify { numerator: String, denominator: String },
    /// Blaschke factors of a proven univariate map, given as `p` or as `num den`.
    Factor {
        numerator: String,
        denominator: Option<String>,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn grid_size(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 16 => Ok(n),
        _ => Err(format!("`{s}` is not an integer >= 16")),
    }
}

/// A failure with its exit code, already formatted for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

struct Output {
    text: String,
    code: u8,
    note: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    configure_threads();
    match run(&cli) {
        Ok(out) => {
            if let Some(note) = &out.note {
                eprintln!("note: {note}");
            }
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                eprintln!("error: could not write output");
                return ExitCode::from(EXIT_IO);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() {
    let Ok(raw) = std::env::var("TORUS_LOCUS_THREADS") else { return };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("warning: ignoring TORUS_LOCUS_THREADS={raw:?}"),
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    let start = Instant::now();
    let (format, allowed): (Format, &[Format]) = match &cli.command {
        Command::Plot { .. } => (g.format.unwrap_or(Format::Svg), &[Format::Svg]),
        Command::Solve { .. } => (g.format.unwrap_or(Format::Json), &[Format::Json, Format::Csv, Format::Text]),
        _ => (g.format.unwrap_or(Format::Json), &[Format::Json, Format::Text]),
    };
    if !allowed.contains(&format) {
        return Err(Failure::new(EXIT_USAGE, format!("--format {format:?} is not available for this command").to_lowercase()));
    }
    let timing = || g.timing.then(|| start.elapsed().as_secs_f64());
    match &cli.command {
        Command::Decide { expr } => {
            let vars = curve_vars(g, expr)?;
            let verdict = run_decide(g, expr, &vars)?;
            let code = match verdict.verdict {
                Verdict::Dense => 0,
                Verdict::NotDense => 1,
                Verdict::Unknown => 2,
            };
            let report = decide_report(g, expr, vars, verdict, timing());
            Ok(Output { text: render(&report, format), code, note: None })
        }
        Command::Solve { expr } => {
            let vars = curve_vars(g, expr)?;
            let (p, solutions) = run_solve(expr, &vars)?;
            let text = match format {
                Format::Csv => solve_csv(&p, &solutions),
                _ => {
                    let report = make_report(g, vec![expr.clone()], vars, Body::Solve { solutions }, timing());
                    render(&report, format)
                }
            };
            Ok(Output { text, code: 0, note: None })
        }
        Command::Plot { expr } => run_plot(g, expr),
        Command::CircleMap(sub) => {
            let exprs: Vec<String> = match sub {
                CircleMapCmd::Make { expr } => vec![expr.clone()],
                CircleMapCmd::Verify { numerator, denominator } => vec![numerator.clone(), denominator.clone()],
                CircleMapCmd::Factor { numerator, denominator } => {
                    std::iter::once(numerator.clone()).chain(denominator.clone()).collect()
                }
            };
            let vars = map_vars(g, &exprs)?;
            let (body, code) = match sub {
                CircleMapCmd::Make { .. } => (map_make(&exprs, &vars)?, 0),
                CircleMapCmd::Verify { .. } => map_verify(&exprs, &vars, g.seed)?,
                CircleMapCmd::Factor { .. } => (map_factor(&exprs, &vars, g.seed)?, 0),
            };
            let report = make_report(g, exprs, vars, body, timing());
            Ok(Output { text: render(&report, format), code, note: None })
        }
        Command::VerifyCertificate { report } => verify_certificate(report, format),
    }
}

// ---------------------------------------------------------------------------
// Inputs

fn explicit_vars(g: &Global) -> Result<Option<Vec<String>>, Failure> {
    let Some(raw) = &g.vars else { return Ok(None) };
    let vars: Vec<String> = raw.split(',').map(|s| s.trim().to_string()).collect();
    validate_variables(&vars).map_err(|e| Failure::new(EXIT_USAGE, format!("--vars: {}", e.kind)))?;
    Ok(Some(vars))
}

/// `[z, w]` unless the expression uses other names, in which case all names
/// in natural order.
fn curve_vars(g: &Global, expr: &str) -> Result<Vec<String>, Failure> {
    if let Some(v) = explicit_vars(g)? {
        return Ok(v);
    }
    let ids = collect_identifiers([expr]);
    if ids.iter().all(|s| s == "z" || s == "w") {
        return Ok(vec!["z".into(), "w".into()]);
    }
    Ok(ids)
}

fn map_vars(g: &Global, exprs: &[String]) -> Result<Vec<String>, Failure> {
    if let Some(v) = explicit_vars(g)? {
        return Ok(v);
    }
    let ids = collect_identifiers(exprs.iter().map(String::as_str));
    Ok(if ids.is_empty() { vec!["z".into()] } else { ids })
}

fn parse_error(text: &str, e: &ParseError) -> Failure {
    let caret = format!("{}^", " ".repeat(e.position));
    Failure::new(EXIT_USAGE, format!("parse error: {} at position {}\n  {text}\n  {caret}", e.kind, e.position))
}

fn parse(text: &str, vars: &[String]) -> Result<LaurentPoly, Failure> {
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    ExprSource::new(text, &names).map_err(|e| parse_error(text, &e))?;
    parse_with(text, &names).map_err(|e| parse_error(text, &e))
}

// ---------------------------------------------------------------------------
// Commands

fn decide_config(g: &Global) -> DecideConfig {
    DecideConfig { probe: DensityProbe::full_circle(g.grid, g.tol), windows: g.probes, seed: g.seed }
}

fn run_decide(g: &Global, expr: &str, vars: &[String]) -> Result<DensityVerdict, Failure> {
    let p = parse(expr, vars)?;
    let v = VarietySpec::hypersurface(p).map_err(|e| Failure::new(EXIT_DATA, e.to_string()))?;
    density::decide_with(&v, &decide_config(g)).map_err(|e| Failure::new(EXIT_DATA, e.to_string()))
}

fn summary(v: &DensityVerdict) -> String {
    match v.reason {
        Reason::NotSelfStar => "the variety differs from its star image, so its torus points are not dense".into(),
        Reason::ExactPointSet => match &v.certificate.detail {
            density::CertificateDetail::PointSet { solutions, .. } => {
                format!("exactly {} torus point(s)", solutions.points.len())
            }
            _ => "finite torus point set".into(),
        },
        Reason::OddDegree => match &v.certificate.detail {
            density::CertificateDetail::OddDegree { fiber_var, degree, arc } => {
                let extra = arc.as_ref().map(|a| format!("; sampled arc of {} points", a.points.len())).unwrap_or_default();
                format!("self-star with odd degree {degree} in variable {fiber_var}{extra}")
            }
            _ => "odd degree".into(),
        },
        Reason::BranchWitness => match v.arc() {
            Some(a) => format!("branch of {} consecutive on-circle samples", a.points.len()),
            None => "branch witness".into(),
        },
        Reason::NoBranchFound => "self-star, but no on-circle branch was found by sampling".into(),
        Reason::Inconclusive => "the self-star check was inconclusive".into(),
    }
}

fn decide_report(g: &Global, expr: &str, vars: Vec<String>, v: DensityVerdict, timing: Option<f64>) -> Report {
    let body = Body::Decide { verdict: v.verdict, reason: v.reason, self_star: v.self_star(), summary: summary(&v), result: v };
    make_report(g, vec![expr.to_string()], vars, body, timing)
}

fn make_report(g: &Global, expressions: Vec<String>, variables: Vec<String>, body: Body, timing: Option<f64>) -> Report {
    Report {
        tool: TOOL.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        input: InputEcho { expressions, variables },
        config: ConfigEcho { tol: g.tol, grid: g.grid, probes: g.probes, seed: g.seed },
        body,
        timing,
    }
}

fn run_solve(expr: &str, vars: &[String]) -> Result<(LaurentPoly, TorusSolutionSet), Failure> {
    let p = parse(expr, vars)?;
    if p.len() > 3 {
        return Err(Failure::new(
            EXIT_DATA,
            format!("{} terms; `solve` handles at most 3, use `torus-locus decide` for larger curves", p.len()),
        ));
    }
    let s = torus::solve_trinomial(&p).map_err(|e| Failure::new(EXIT_DATA, e.to_string()))?;
    Ok((p, s))
}

fn csv_row(out: &mut String, coords: &[Complex64], residual: f64) {
    let cells: Vec<String> = coords.iter().flat_map(|c| [fmt_f(c.re), fmt_f(c.im)]).chain([fmt_f(residual)]).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn solve_csv(p: &LaurentPoly, s: &TorusSolutionSet) -> String {
    let mut out = String::from("re_z,im_z,re_w,im_w,residual\n");
    if let Some(note) = &s.note {
        out.push_str(&format!("# note: {note}\n"));
    }
    match s.kind {
        SolutionKind::Empty => out.push_str("# kind: empty\n"),
        SolutionKind::Finite => {
            out.push_str(&format!("# kind: finite, {} points\n", s.points.len()));
            for pt in &s.points {
                csv_row(&mut out, &pt.coords, pt.residual);
            }
        }
        SolutionKind::CosetFamily => {
            for f in &s.families {
                let dirs: Vec<String> = f.directions.iter().map(|d| format!("{d:?}")).collect();
                out.push_str(&format!(
                    "# kind: coset_family, components: {}, directions: {}\n",
                    f.base_points.len(),
                    dirs.join(" ")
                ));
                for pt in f.samples(FAMILY_SAMPLES) {
                    let r = p.eval(&pt.coords).map(|v| v.norm()).unwrap_or(f64::INFINITY);
                    csv_row(&mut out, &pt.coords, r);
                }
            }
        }
    }
    out
}

fn run_plot(g: &Global, expr: &str) -> Result<Output, Failure> {
    let vars = curve_vars(g, expr)?;
    let verdict = run_decide(g, expr, &vars)?;
    let title = format!("{expr}: {:?} ({})", verdict.verdict, summary(&verdict));
    if let (Verdict::Dense, Some(w)) = (verdict.verdict, &verdict.witness) {
        return Ok(Output { text: plot::branch_plot(&title, w, verdict.arc()), code: 0, note: None });
    }
    let p = parse(expr, &vars)?;
    let v = VarietySpec::hypersurface(p).map_err(|e| Failure::new(EXIT_DATA, e.to_string()))?;
    let profile = density::fiber_deviation_profile(&v, &DensityProbe::full_circle(g.grid, g.tol))
        .map_err(|e| Failure::new(EXIT_DATA, e.to_string()))?;
    Ok(Output {
        text: plot::heat_plot(&title, &profile, g.tol),
        code: 0,
        note: Some("no branch witness; plotted the smallest fiber deviation from the circle instead".into()),
    })
}

fn blaschke_failure(e: BlaschkeError) -> Failure {
    Failure::new(EXIT_DATA, e.to_string())
}

fn map_make(exprs: &[String], vars: &[String]) -> Result<Body, Failure> {
    let p = parse(&exprs[0], vars)?;
    let map = blaschke::make_circle_map(&p).map_err(blaschke_failure)?;
    Ok(Body::CircleMapMake {
        numerator: format_poly_with(&map.numerator, vars),
        denominator: format_poly_with(&map.denominator, vars),
        verified: verification_name(map.verified).into(),
    })
}

fn verification_name(v: Verification) -> &'static str {
    match v {
        Verification::Proven => "proven",
        Verification::Sampled => "sampled",
        Verification::Unverified => "unverified",
    }
}

fn rational(exprs: &[String], vars: &[String]) -> Result<RationalExpr, Failure> {
    let num = parse(&exprs[0], vars)?;
    let den = parse(&exprs[1], vars)?;
    RationalExpr::new(num, den).ok_or_else(|| Failure::new(EXIT_DATA, "denominator is identically zero"))
}

fn check_status(c: &CircleMapCheck) -> (&'static str, u8) {
    match c {
        CircleMapCheck::Proven { .. } => ("proven", 0),
        CircleMapCheck::Refuted { .. } => ("refuted", 1),
        CircleMapCheck::Unknown { .. } => ("unknown", 2),
    }
}

fn map_verify(exprs: &[String], vars: &[String], seed: u64) -> Result<(Body, u8), Failure> {
    let r = rational(exprs, vars)?;
    let detail = blaschke::verify_circle_map_seeded(&r, seed).map_err(blaschke_failure)?;
    let (status, code) = check_status(&detail);
    Ok((Body::CircleMapVerify { status: status.into(), detail }, code))
}

fn map_factor(exprs: &[String], vars: &[String], seed: u64) -> Result<Body, Failure> {
    let map = if exprs.len() == 1 {
        blaschke::make_circle_map(&parse(&exprs[0], vars)?).map_err(blaschke_failure)?
    } else {
        let r = rational(exprs, vars)?;
        match blaschke::verify_circle_map_seeded(&r, seed).map_err(blaschke_failure)? {
            CircleMapCheck::Proven { reduced, .. } => CircleMap {
                numerator: reduced.numerator,
                denominator: reduced.denominator,
                verified: Verification::Proven,
            },
            other => {
                let (status, _) = check_status(&other);
                return Err(Failure::new(EXIT_DATA, format!("cannot factor: the map is {status}, not proven")));
            }
        }
    };
    let factors = blaschke::blaschke_factor(&map).map_err(blaschke_failure)?;
    Ok(Body::CircleMapFactor { factors })
}

// ---------------------------------------------------------------------------
// Rendering

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => render_text(report),
        _ => {
            let mut s = to_json(report);
            s.push('\n');
            s
        }
    }
}

fn render_text(r: &Report) -> String {
    let mut out = String::new();
    match &r.body {
        Body::Decide { verdict, reason, self_star, summary, result } => {
            out.push_str(&format!("verdict: {verdict:?}\nreason: {}\nself-star: {}\n", to_json(reason).trim_matches('"'), to_json(self_star).trim_matches('"')));
            out.push_str(&format!("summary: {summary}\n"));
            if let Some(d) = result.real_dimension {
                out.push_str(&format!("real dimension: {d}\n"));
            }
        }
        Body::Solve { solutions } => {
            out.push_str(&format!("kind: {}\n", to_json(&solutions.kind).trim_matches('"')));
            if let Some(note) = &solutions.note {
                out.push_str(&format!("note: {note}\n"));
            }
            for pt in &solutions.points {
                let coords: Vec<String> = pt.coords.iter().map(|c| fmt_c(*c)).collect();
                out.push_str(&format!("({})  residual {}\n", coords.join(", "), fmt_f(pt.residual)));
            }
            for f in &solutions.families {
                out.push_str(&format!("family: {} component(s), directions {:?}\n", f.base_points.len(), f.directions));
            }
        }
        Body::CircleMapMake { numerator, denominator, verified } => {
            out.push_str(&format!("numerator: {numerator}\ndenominator: {denominator}\nverified: {verified}\n"));
        }
        Body::CircleMapVerify { status, detail } => {
            out.push_str(&format!("status: {status}\n"));
            match detail {
                CircleMapCheck::Refuted { modulus, .. } => out.push_str(&format!("modulus at counterexample: {}\n", fmt_f(*modulus))),
                CircleMapCheck::Unknown { reason } => out.push_str(&format!("reason: {reason}\n")),
                CircleMapCheck::Proven { .. } => {}
            }
        }
        Body::CircleMapFactor { factors } => {
            out.push_str(&format!("prefactor: {}\npower: {}\n", fmt_c(factors.prefactor), factors.power));
            for a in &factors.alphas {
                out.push_str(&format!("alpha: {}\n", fmt_c(*a)));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Certificate replay

fn verify_certificate(path: &Path, format: Format) -> Result<Output, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_NO_INPUT, format!("cannot read {}: {e}", path.display())))?;
    let report: Report =
        serde_json::from_str(&text).map_err(|e| Failure::new(EXIT_DATA, format!("malformed report: {e}")))?;
    if report.tool != TOOL {
        return Err(Failure::new(EXIT_DATA, format!("report was written by `{}`", report.tool)));
    }
    let outcome = replay_report(&report);
    let (line, code) = match &outcome {
        Ok(what) => (format!("ok: {what}"), 0),
        Err(why) => (format!("failed: {why}"), EXIT_REPLAY_FAILED),
    };
    let text = match format {
        Format::Text => format!("{line}\n"),
        _ => format!("{}\n", serde_json::json!({ "valid": outcome.is_ok(), "detail": line })),
    };
    Ok(Output { text, code, note: None })
}

fn replay_report(r: &Report) -> Result<String, String> {
    let vars = &r.input.variables;
    let exprs = &r.input.expressions;
    let reparse = |k: usize| -> Result<LaurentPoly, String> {
        let text = exprs.get(k).ok_or("missing input expression")?;
        parse(text, vars).map_err(|f| f.message)
    };
    let global = Global {
        tol: r.config.tol,
        grid: r.config.grid,
        probes: r.config.probes,
        seed: r.config.seed,
        format: None,
        vars: None,
        timing: false,
    };
    match &r.body {
        Body::Decide { verdict, reason, self_star, result, .. } => {
            if *verdict != result.verdict || *reason != result.reason || *self_star != result.self_star() {
                return Err("summary fields disagree with the certificate".into());
            }
            let p = reparse(0)?;
            let recorded = result.certificate.self_star.entries.first().map(|e| &e.generator);
            if recorded != Some(&p) {
                return Err("certificate is for a different polynomial".into());
            }
            density::replay(result).map_err(|e| e.to_string())?;
            Ok(format!("{verdict:?} certificate replays"))
        }
        Body::Solve { solutions } => {
            let text = exprs.first().ok_or("missing input expression")?;
            let (_, again) = run_solve(text, vars).map_err(|f| f.message)?;
            if again.kind != solutions.kind
                || again.points.len() != solutions.points.len()
                || again.families.len() != solutions.families.len()
            {
                return Err("re-solving gives a different solution set".into());
            }
            for (a, b) in again.points.iter().zip(&solutions.points) {
                if a.distance(b) > global.tol {
                    return Err("a recorded point moved".into());
                }
            }
            Ok(format!("{} point(s), {} family(ies) reproduced", again.points.len(), again.families.len()))
        }
        Body::CircleMapMake { .. } => {
            let again = map_make(exprs, vars).map_err(|f| f.message)?;
            (again == r.body).then(|| "circle map reproduced".to_string()).ok_or_else(|| "circle map differs".into())
        }
        Body::CircleMapVerify { status, detail } => {
            let (again, _) = map_verify(exprs, vars, global.seed).map_err(|f| f.message)?;
            let Body::CircleMapVerify { status: s2, detail: d2 } = &again else { unreachable!() };
            if s2 != status || check_status(d2).0 != check_status(detail).0 {
                return Err("verification status differs".into());
            }
            if let CircleMapCheck::Refuted { point, .. } = detail {
                let r = rational(exprs, vars).map_err(|f| f.message)?;
                let map = CircleMap { numerator: r.numerator, denominator: r.denominator, verified: Verification::Unverified };
                let m = map.eval(point).ok_or("counterexample is a pole")?.norm();
                if (m - 1.0).abs() <= blaschke::REFUTE_GAP {
                    return Err("counterexample does not violate |r| = 1".into());
                }
            }
            Ok(format!("status {status} reproduced"))
        }
        Body::CircleMapFactor { factors } => {
            let again = map_factor(exprs, vars, global.seed).map_err(|f| f.message)?;
            let Body::CircleMapFactor { factors: f2 } = &again else { unreachable!() };
            let dist = blaschke::multiset_distance(&factors.alphas, &f2.alphas);
            if dist > 1e-9 || f2.power != factors.power || (f2.prefactor - factors.prefactor).norm() > 1e-9 {
                return Err(format!("factors differ (alpha distance {dist:e})"));
            }
            Ok(format!("{} factor(s) reproduced", factors.alphas.len()))
        }
    }
}
