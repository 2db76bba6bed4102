//! `quatree`: quotient graphs of Bruhat-Tits trees by quaternion unit groups.

mod dot;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;

use quatree::bttree::Vertex;
use quatree::gfpoly::{parse_poly, Field};
use quatree::invariants::{eichler_count, sweep, wp, RamProfile, Report};
use quatree::order::{StandardOrder, TorsionJson};
use quatree::quat::{find_algebra_with_degrees, QuatAlgebra, FIND_ALGEBRA_BOUND};
use quatree::quotient::{build_quotient, HomLog, QuotientGraph, SplitEmbedding};
use quatree::Error;

#[derive(Parser)]
#[command(name = "quatree", version, about = "Quotients of the Bruhat-Tits tree by quaternion unit groups over F_q[T]")]
struct Cli {
    /// Cap on worker threads for the parallel searches.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the main output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form invariants for ramification profiles.
    Formulas(FormulaArgs),
    /// Ramified places, discriminant and maximality of the standard order.
    Ramification(AlgebraArgs),
    /// Torsion units of the standard order and their conjugacy classes.
    Torsion(TorsionArgs),
    /// Quotient graph with stabilizers, report and run log.
    Quotient(QuotientArgs),
    /// Formula report checked against the computed quotient.
    Report(QuotientArgs),
    /// Quotient graph in DOT.
    Dot(QuotientArgs),
}

#[derive(Args)]
struct FormulaArgs {
    /// Field sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    q: Vec<u64>,
    /// Degrees of the ramified places; omit to sweep all realizable profiles.
    #[arg(long = "R", value_delimiter = ',')]
    ram: Option<Vec<usize>>,
    /// Numbers of ramified places in a sweep.
    #[arg(long, value_delimiter = ',', default_value = "2,4")]
    sizes: Vec<usize>,
    /// Largest place degree in a sweep.
    #[arg(long, default_value_t = 4)]
    max_degree: usize,
}

#[derive(Args)]
#[command(group(ArgGroup::new("base").required(true).args(["q", "field"])))]
#[command(group(ArgGroup::new("algebra_spec").required(true).args(["r", "algebra", "r_degrees"])))]
struct AlgebraArgs {
    /// Size of the constant field.
    #[arg(long)]
    q: Option<u32>,
    /// Constant field as "q=9" or "p=3,e=2".
    #[arg(long)]
    field: Option<String>,
    /// Shorthand for H(xi, r) with xi the canonical constant.
    #[arg(long)]
    r: Option<String>,
    /// Explicit algebra "H(a, b)".
    #[arg(long)]
    algebra: Option<String>,
    /// Search an algebra ramified at places of these degrees.
    #[arg(long = "R-degrees", value_delimiter = ',')]
    r_degrees: Option<Vec<usize>>,
    /// Degree bound for the algebra search.
    #[arg(long, default_value_t = FIND_ALGEBRA_BOUND)]
    search_bound: usize,
}

#[derive(Args)]
struct TorsionArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    /// Degree bound for torsion units (default: deg r).
    #[arg(long)]
    bound: Option<usize>,
    /// Degree bound for conjugating elements (default: the torsion bound).
    #[arg(long)]
    conj_bound: Option<usize>,
}

#[derive(Args)]
struct QuotientArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    /// Working precision of the Laurent series.
    #[arg(long)]
    prec: Option<usize>,
    /// Abort after discovering this many quotient vertices.
    #[arg(long, default_value_t = 10_000)]
    limit: usize,
    /// Also write the graph in DOT to this file.
    #[arg(long)]
    dot: Option<PathBuf>,
}

enum Failure {
    Lib(Error),
    Io(io::Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<bool, Failure>;

impl AlgebraArgs {
    fn field(&self) -> Result<Field, Failure> {
        Ok(match (&self.field, self.q) {
            (Some(spec), _) => Field::parse_spec(spec)?,
            (None, Some(q)) => Field::from_order(q)?,
            (None, None) => return Err(Failure::Usage("one of --q or --field is required".into())),
        })
    }

    fn resolve(&self) -> Result<QuatAlgebra, Failure> {
        let f = self.field()?;
        if let Some(r) = &self.r {
            Ok(QuatAlgebra::xi_shape(&f, parse_poly(&f, r)?)?)
        } else if let Some(spec) = &self.algebra {
            Ok(QuatAlgebra::parse(&f, spec)?)
        } else if let Some(d) = &self.r_degrees {
            let (a, b) = find_algebra_with_degrees(&f, d, self.search_bound)?;
            Ok(QuatAlgebra::from_polys(f, a, b)?)
        } else {
            Err(Failure::Usage("one of --r, --algebra or --R-degrees is required".into()))
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> io::Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    s.push('\n');
    emit(out, &s)
}

fn formulas(args: &FormulaArgs, out: Option<&Path>) -> Outcome {
    let mut reports = Vec::new();
    match &args.ram {
        Some(degrees) => {
            for &q in &args.q {
                reports.push(Report::formulas(&RamProfile::new(q, degrees.clone())?)?);
            }
        }
        None => {
            for (_, rep) in sweep(&args.q, &args.sizes, args.max_degree) {
                reports.push(rep?);
            }
        }
    }
    emit_json(out, &reports)?;
    Ok(reports.iter().all(Report::all_passed))
}

#[derive(Serialize)]
struct RamificationJson {
    algebra: String,
    q: u32,
    ramified_at_infinity: bool,
    #[serde(rename = "R")]
    places: Vec<String>,
    degrees: Vec<usize>,
    wp: Option<u8>,
    gram_disc: String,
    maximal: Option<bool>,
}

fn ramification(args: &AlgebraArgs, out: Option<&Path>) -> Outcome {
    let alg = args.resolve()?;
    let f = alg.field.clone();
    let (fin, inf) = alg.ramification()?;
    let order = StandardOrder::new(&alg)?;
    let mut places = Vec::new();
    for p in &fin {
        places.push(p.label(&f));
    }
    let degrees: Vec<usize> = fin.iter().map(|p| p.degree()).collect();
    let (weight, maximal) = if inf {
        (None, None)
    } else {
        let ram = alg.ramified_set()?;
        let profile = RamProfile::new(f.q() as u64, ram.degrees())?;
        (Some(wp(&profile)), Some(order.certify_maximal(&ram)?))
    };
    let json = RamificationJson {
        algebra: alg.label(),
        q: f.q(),
        ramified_at_infinity: inf,
        places,
        degrees,
        wp: weight,
        gram_disc: order.gram_disc().display(&f).to_string(),
        maximal,
    };
    emit_json(out, &json)?;
    Ok(true)
}

#[derive(Serialize)]
struct ClassJson {
    rep: TorsionJson,
    size: usize,
    partner: usize,
}

#[derive(Serialize)]
struct TorsionReport {
    algebra: String,
    q: u32,
    bound: usize,
    conj_bound: usize,
    units: Vec<TorsionJson>,
    classes: Vec<ClassJson>,
    eichler: i64,
    checks: BTreeMap<String, bool>,
}

fn torsion(args: &TorsionArgs, out: Option<&Path>) -> Outcome {
    let alg = args.algebra.resolve()?;
    let f = alg.field.clone();
    let order = StandardOrder::new(&alg)?;
    let (_, r) = order.xi_shape()?;
    let bound = args.bound.unwrap_or(r.deg_or_neg().max(0) as usize);
    let conj_bound = args.conj_bound.unwrap_or(bound);
    let units = order.solve_torsion(bound)?;
    let classes = order.torsion_classes(&units, conj_bound)?;
    let ram = alg.ramified_set()?;
    let eichler = eichler_count(&RamProfile::new(f.q() as u64, ram.degrees())?);

    let q = f.q() as u64;
    let mut checks = BTreeMap::new();
    let orders_ok = units.iter().all(|u| (q * q - 1) % u.order == 0 && u.order % f.p() as u64 != 0);
    checks.insert("unit_orders".to_string(), orders_ok);
    checks.insert("class_count_is_eichler".to_string(), classes.len() as i64 == eichler);

    let report = TorsionReport {
        algebra: alg.label(),
        q: f.q(),
        bound,
        conj_bound,
        units: units.iter().map(|u| u.to_json(&f)).collect(),
        classes: classes
            .iter()
            .map(|c| ClassJson { rep: c.rep.to_json(&f), size: c.size, partner: c.partner })
            .collect(),
        eichler,
        checks,
    };
    emit_json(out, &report)?;
    Ok(report.checks.values().all(|&b| b))
}

struct Computed {
    alg: QuatAlgebra,
    emb: SplitEmbedding,
    graph: QuotientGraph,
    report: Report,
}

fn compute(args: &QuotientArgs) -> Result<Computed, Failure> {
    let alg = args.algebra.resolve()?;
    let emb = match args.prec {
        Some(p) => SplitEmbedding::with_precision(&alg, p)?,
        None => SplitEmbedding::new(&alg)?,
    };
    let graph = build_quotient(&emb, &Vertex::base(), args.limit)?;
    let ram = alg.ramified_set()?;
    let report = Report::with_graph(&RamProfile::new(alg.field.q() as u64, ram.degrees())?, &graph)?;
    Ok(Computed { alg, emb, graph, report })
}

fn title(c: &Computed) -> String {
    format!("{} over F_{}", c.alg.label(), c.alg.field.q())
}

#[derive(Serialize)]
struct QuotientJson<'a> {
    algebra: String,
    q: u32,
    #[serde(rename = "R")]
    places: Vec<String>,
    precision: usize,
    graph: &'a QuotientGraph,
    report: &'a Report,
    run_log: Vec<HomLog>,
}

fn quotient(args: &QuotientArgs, out: Option<&Path>) -> Outcome {
    let c = compute(args)?;
    let f = &c.alg.field;
    let mut run_log = c.emb.run_log();
    run_log.sort_by(|x, y| {
        (&x.source, &x.target, x.shift, x.bound, x.precision, x.found)
            .cmp(&(&y.source, &y.target, y.shift, y.bound, y.precision, y.found))
    });
    let json = QuotientJson {
        algebra: c.alg.label(),
        q: f.q(),
        places: c.alg.ramified_set()?.labels(f),
        precision: c.emb.prec,
        graph: &c.graph,
        report: &c.report,
        run_log,
    };
    emit_json(out, &json)?;
    if let Some(p) = &args.dot {
        fs::write(p, dot::render(&c.graph, &title(&c)))?;
    }
    Ok(c.report.all_passed())
}

fn report(args: &QuotientArgs, out: Option<&Path>) -> Outcome {
    let c = compute(args)?;
    emit_json(out, &c.report)?;
    Ok(c.report.all_passed())
}

fn dot_cmd(args: &QuotientArgs, out: Option<&Path>) -> Outcome {
    let c = compute(args)?;
    let text = dot::render(&c.graph, &title(&c));
    emit(out, &text)?;
    if let Some(p) = &args.dot {
        fs::write(p, &text)?;
    }
    Ok(c.report.all_passed())
}

fn hint(e: &Error) -> Option<&'static str> {
    match e {
        Error::Unsupported(_) => Some("quotient construction is available for odd q only; formulas, and ramification and torsion for H(xi, r), accept even q"),
        Error::NotASquare(_) => Some("pass H(a, b) with b of even degree and square leading coefficient, or use --r"),
        Error::SearchExhausted(_) => Some("raise --search-bound, or check that the profile is realizable over F_q"),
        Error::NonterminationGuard { .. } => Some("raise --limit"),
        Error::RamifiedAtInfinity => Some("the algebra must split at infinity"),
        _ => None,
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Unsupported(_) => 3,
        Error::NonterminationGuard { .. } | Error::SearchExhausted(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let out = cli.out.as_deref();
    let outcome = match &cli.command {
        Command::Formulas(a) => formulas(a, out),
        Command::Ramification(a) => ramification(a, out),
        Command::Torsion(a) => torsion(a, out),
        Command::Quotient(a) => quotient(a, out),
        Command::Report(a) => report(a, out),
        Command::Dot(a) => dot_cmd(a, out),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: some checks failed");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            if let Some(h) = hint(&e) {
                eprintln!("hint: {h}");
            }
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
