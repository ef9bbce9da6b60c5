mod render;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::Value;

use k3_curves::bn::{bn_general, BnError};
use k3_curves::existence::{
    bn_curve_exists, k3_curve_exists, mukai_model, mukai_models, quadric_generation, ClauseReading,
    QuadricGeneration,
};
use k3_curves::families::{
    derived_admissible_with, family, node_rows, registry, rigid_curve_count, theorem_result,
};
use k3_curves::lattice::{DivisorClass, IntersectionLattice};
use k3_curves::oracle::OracleContext;
use k3_curves::verify::{run_suite, Suite, SweepOptions};

use render::{Format, Record};

#[derive(Debug, Parser)]
#[command(
    name = "k3curves",
    version,
    about = "Curves on K3 surfaces and rigid curves on Calabi-Yau threefolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a single point.
    Query {
        #[command(subcommand)]
        target: QueryTarget,
    },
    /// Stream a (d, g) box as CSV or JSON lines.
    Enumerate(EnumerateArgs),
    /// Run a cross-check sweep; exits 1 on unexpected discrepancies.
    Verify(VerifyArgs),
    /// Print the compiled-in tables.
    Tables {
        #[arg(value_enum)]
        which: Table,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Literal,
    Corrected,
}

impl From<Mode> for ClauseReading {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Literal => ClauseReading::Literal,
            Mode::Corrected => ClauseReading::Corrected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Via {
    Literal,
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleOp {
    Effective,
    Nef,
    H0,
    MinusTwo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Table {
    Models,
    Families,
    Nodes,
}

#[derive(Debug, Args)]
struct Triple {
    /// Half the degree of the polarization, H² = 2n.
    #[arg(long, allow_negative_numbers = true)]
    n: i64,
    #[arg(long, allow_negative_numbers = true)]
    d: i64,
    #[arg(long, allow_negative_numbers = true)]
    g: i64,
}

#[derive(Debug, Subcommand)]
enum QueryTarget {
    /// Existence of a smooth curve on a K3 surface with H² = 2n.
    Surface {
        #[command(flatten)]
        triple: Triple,
        /// Also decide Brill-Noether generality of S(n, d, g).
        #[arg(long)]
        bn: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Existence of a smooth curve on a BN general K3 surface of genus mu.
    Model {
        #[arg(long, allow_negative_numbers = true)]
        mu: i64,
        #[arg(long, allow_negative_numbers = true)]
        d: i64,
        #[arg(long, allow_negative_numbers = true)]
        g: i64,
        #[arg(long, value_enum, default_value_t = Mode::Corrected)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Rigid curves of degree d and genus g on a threefold family a..k.
    Family {
        #[arg(long)]
        family: char,
        #[arg(long, allow_negative_numbers = true)]
        d: i64,
        #[arg(long, allow_negative_numbers = true)]
        g: i64,
        #[arg(long, value_enum, default_value_t = Via::Literal)]
        via: Via,
        #[arg(long, value_enum, default_value_t = Mode::Corrected)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Lattice oracle on S(n, d, g) for the class aH + bC.
    Oracle {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, value_enum)]
        op: OracleOp,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        a: i64,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        b: i64,
        /// Degree bound for minus-two; defaults to 2n.
        #[arg(long)]
        degree_max: Option<i64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["family", "n"])))]
struct EnumerateArgs {
    #[arg(long)]
    family: Option<char>,
    /// Enumerate K3 surfaces with H² = 2n instead of a family.
    #[arg(long)]
    n: Option<i64>,
    #[arg(long)]
    d_max: u32,
    #[arg(long)]
    g_max: u32,
    #[arg(long, default_value_t = 1)]
    g_min: u32,
    #[arg(long, value_enum, default_value_t = Via::Literal)]
    via: Via,
    #[arg(long, value_enum, default_value_t = Mode::Corrected)]
    mode: Mode,
    /// `csv` or `json` (one object per line).
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads; 0 picks one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Write to a file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(value_parser = parse_suite)]
    suite: Suite,
    /// Box side for the sweeps that have one.
    #[arg(long = "box")]
    box_bound: Option<i64>,
    #[arg(long, value_enum, default_value_t = Mode::Corrected)]
    mode: Mode,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: k3_curves::verify::UnknownSuite| {
        let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("{e}; expected one of {}", names.join(", "))
    })
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Io(io::Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out).and_then(|code| {
        out.flush()?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Query { target } => {
            let (record, format) = query(target)?;
            record.write(out, format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate(args) => {
            enumerate(args, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => verify(args, out),
        Command::Tables { which, format } => {
            tables(which, format, out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn surface_record(n: i64, d: i64, g: i64, with_bn: bool) -> Result<Record, CliError> {
    let v = k3_curve_exists(n, d, g).map_err(input)?;
    let mut r = Record::new()
        .with("n", n)
        .with("d", d)
        .with("g", g)
        .with("exists", v.exists)
        .with("case", v.case_label)
        .with("picard", v.picard.to_string());
    r.push_opt("certificate", v.certificate.map(|c| c.to_string()));
    if v.exists {
        match quadric_generation(n, d, g) {
            QuadricGeneration::NotApplicable => {}
            q => r.push("generation", q.to_string()),
        }
    }
    if with_bn {
        match bn_general(n, d, g) {
            Ok(bn) => {
                r.push("bn_general", bn.bn_general);
                r.push("route", bn.route_label());
                if let Some(w) = bn.witness {
                    r.push("witness", format!("({}, {})", w.m, w.n));
                    r.push("witness_h0", format!("{}*{}", w.h0_m, w.h0_n));
                }
            }
            Err(e @ BnError::Undecided { .. }) => r.push("bn_undecided", e.to_string()),
            Err(BnError::Lattice(_)) | Err(BnError::NoRankOneSurface { .. }) => {}
            Err(e) => return Err(input(e)),
        }
    }
    Ok(r)
}

fn family_record(label: char, d: i64, g: i64, via: Via, mode: Mode) -> Result<Record, CliError> {
    let r = Record::new()
        .with("family", label.to_string())
        .with("d", d)
        .with("g", g);
    Ok(match via {
        Via::Literal => {
            let v = theorem_result(label, d, g).map_err(input)?;
            r.with("admissible", v.admissible)
                .with("case", v.clause)
                .with("via", "literal")
        }
        Via::Derived => {
            let v = derived_admissible_with(label, d, g, mode.into()).map_err(input)?;
            let mut r = r.with("admissible", v.admissible).with("case", v.clause);
            r.push("via", "derived");
            if let Some(c) = v.construction_used {
                r.push("construction", c.k3_descriptor);
                r.push("nodes", c.m);
                let index = family(label)
                    .map_err(input)?
                    .constructions
                    .iter()
                    .position(|x| *x == c)
                    .expect("construction comes from the registry");
                let count = rigid_curve_count(label, index, g).map_err(input)?;
                r.push("rigid_curves", count.to_string());
            }
            r
        }
    })
}

fn query(target: QueryTarget) -> Result<(Record, Format), CliError> {
    match target {
        QueryTarget::Surface {
            triple: Triple { n, d, g },
            bn,
            format,
        } => Ok((surface_record(n, d, g, bn)?, format)),
        QueryTarget::Model {
            mu,
            d,
            g,
            mode,
            format,
        } => {
            let v = bn_curve_exists(mu, d, g, mode.into()).map_err(input)?;
            let model = mukai_model(mu).map_err(input)?;
            let mut r = Record::new()
                .with("mu", mu)
                .with("d", d)
                .with("g", g)
                .with("exists", v.exists)
                .with("case", v.case_label)
                .with("model", model.model);
            r.push_opt("certificate", v.certificate.map(|c| c.to_string()));
            Ok((r, format))
        }
        QueryTarget::Family {
            family,
            d,
            g,
            via,
            mode,
            format,
        } => Ok((family_record(family, d, g, via, mode)?, format)),
        QueryTarget::Oracle {
            triple: Triple { n, d, g },
            op,
            a,
            b,
            degree_max,
            format,
        } => {
            let lattice = IntersectionLattice::new(n, d, g).map_err(input)?;
            let ctx = OracleContext::new(lattice);
            let x = DivisorClass::new(a, b);
            let mut r = Record::new().with("lattice", lattice.to_string());
            match op {
                OracleOp::Effective => {
                    let v = ctx.is_effective(x).map_err(input)?;
                    r.push("class", x.to_string());
                    r.push("effective", v.status.effective_or_zero() && !x.is_zero());
                    r.push("certificate", v.certificate.to_string());
                }
                OracleOp::Nef => {
                    r.push("class", x.to_string());
                    r.push("nef", ctx.is_nef(x).map_err(input)?);
                    let negative = ctx.negative_curves(x).map_err(input)?;
                    if !negative.is_empty() {
                        r.push("negative_curves", strings(&negative));
                    }
                }
                OracleOp::H0 => {
                    let v = ctx.h0(x).map_err(input)?;
                    r.push("class", x.to_string());
                    r.push("h0", v.h0);
                    if v.h0 > 0 {
                        r.push("nef_model", v.nef_model.to_string());
                        r.push("stripped", strings(&v.stripped));
                    }
                }
                OracleOp::MinusTwo => {
                    let bound = degree_max.unwrap_or(2 * n);
                    let classes = ctx.minus_two_classes(bound).map_err(input)?;
                    r.push("degree_max", bound);
                    r.push("minus_two", strings(&classes));
                }
            }
            Ok((r, format))
        }
    }
}

fn strings(classes: &[DivisorClass]) -> Value {
    Value::Array(
        classes
            .iter()
            .map(|c| Value::String(c.to_string()))
            .collect(),
    )
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(input)
}

fn enumerate(args: EnumerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !matches!(args.format, Format::Csv | Format::Json) {
        return Err(input("enumerate writes csv or json"));
    }
    if let Some(label) = args.family {
        family(label).map_err(input)?;
    }
    if let Some(n) = args.n {
        if n < 2 {
            return Err(input(format!("n must be at least 2, got {n}")));
        }
    }
    let points: Vec<(i64, i64)> = (1..=args.d_max as i64)
        .flat_map(|d| (args.g_min as i64..=args.g_max as i64).map(move |g| (d, g)))
        .collect();
    let pool = thread_pool(args.threads)?;
    let rows: Vec<Result<Record, CliError>> = pool.install(|| {
        points
            .par_iter()
            .map(|&(d, g)| match (args.family, args.n) {
                (Some(label), _) => family_record(label, d, g, args.via, args.mode),
                (None, Some(n)) => surface_record(n, d, g, true),
                (None, None) => unreachable!("clap requires a target"),
            })
            .collect()
    });

    let mut file;
    let sink: &mut dyn Write = match &args.output {
        Some(path) => {
            file = BufWriter::new(File::create(path)?);
            &mut file
        }
        None => out,
    };
    match args.format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().from_writer(sink);
            if args.family.is_some() {
                w.write_record(["family", "d", "g", "admissible", "case_label"])?;
            } else {
                w.write_record(["n", "d", "g", "exists", "bn_general", "case_label"])?;
            }
            for row in rows {
                let json = row?.to_json();
                let field = |k: &str| json.get(k).map(render::plain).unwrap_or_default();
                if args.family.is_some() {
                    w.write_record([
                        field("family"),
                        field("d"),
                        field("g"),
                        field("admissible"),
                        field("case"),
                    ])?;
                } else {
                    let bn = if json.get("bn_undecided").is_some() {
                        "undecided".to_string()
                    } else {
                        field("bn_general")
                    };
                    w.write_record([
                        field("n"),
                        field("d"),
                        field("g"),
                        field("exists"),
                        bn,
                        field("case"),
                    ])?;
                }
            }
            w.flush()?;
        }
        _ => {
            for row in rows {
                writeln!(sink, "{}", row?.to_json())?;
            }
            sink.flush()?;
        }
    }
    Ok(())
}

fn verify(args: VerifyArgs, out: &mut dyn Write) -> Result<ExitCode, CliError> {
    if let Some(b) = args.box_bound {
        if b < 0 {
            return Err(input(format!("box must be nonnegative, got {b}")));
        }
    }
    let opts = SweepOptions {
        box_bound: args.box_bound,
        reading: args.mode.into(),
    };
    let report = thread_pool(args.threads)?.install(|| run_suite(args.suite, opts));
    match args.format {
        Format::Text => writeln!(out, "{report}")?,
        Format::Json | Format::Csv => {
            let discrepancies: Vec<Value> = report
                .discrepancies
                .iter()
                .map(|d| {
                    Record::new()
                        .with("point", d.point.clone())
                        .with("detail", d.detail.clone())
                        .with("expected", d.expected)
                        .to_json()
                })
                .collect();
            let r = Record::new()
                .with("suite", report.suite.name())
                .with("bounds", report.bounds.clone())
                .with("checked", report.cardinality)
                .with("admissible", report.admissible)
                .with("excluded", report.excluded)
                .with("errors", report.errors)
                .with("unexpected", report.unexpected())
                .with("discrepancies", discrepancies)
                .with("notes", report.notes.clone())
                .with("wall_time_s", report.wall_time.as_secs_f64());
            r.write(out, args.format)?;
        }
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn tables(which: Table, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match which {
        Table::Models => (
            vec!["genus", "model"],
            mukai_models()
                .into_iter()
                .map(|m| vec![m.genus.to_string(), m.model.to_string()])
                .collect(),
        ),
        Table::Families => (
            vec!["family", "r", "threefold", "conditions"],
            registry()
                .iter()
                .map(|f| {
                    vec![
                        f.label.to_string(),
                        f.r.to_string(),
                        f.cy_descriptor.to_string(),
                        f.conditions.to_string(),
                    ]
                })
                .collect(),
        ),
        Table::Nodes => (
            vec!["threefold", "k3", "m"],
            node_rows()
                .into_iter()
                .map(|row| row.split(" | ").map(str::to_string).collect())
                .collect(),
        ),
    };
    match format {
        Format::Text => {
            writeln!(out, "{}", header.join(" | "))?;
            for row in rows {
                writeln!(out, "{}", row.join(" | "))?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&header)?;
            for row in rows {
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            for row in rows {
                let obj: serde_json::Map<String, Value> = header
                    .iter()
                    .zip(row)
                    .map(|(k, v)| (k.to_string(), Value::String(v)))
                    .collect();
                writeln!(out, "{}", Value::Object(obj))?;
            }
        }
    }
    Ok(())
}
