use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hh_bounds::bounds::Settings;
use hh_bounds::coefficients::crosscheck;
use hh_bounds::means::{proposition_check, Proposition};
use hh_bounds::report::{write_csv, write_json, write_text, ReportRow, RowStatus, Summary};
use hh_bounds::sweep::{run_parallel, tightness, SweepSpec, TightnessTable};
use hh_bounds::{Error, Params, Theorem};

const EXIT_HOLDS: u8 = 0;
const EXIT_VIOLATED: u8 = 1;
const EXIT_GATE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "hh-verify", version, about = "Check trapezoid-type bounds numerically")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one bound at one configuration.
    Verify(VerifyArgs),
    /// Run a cross product of configurations from a spec file.
    Sweep(SweepArgs),
    /// Compare several bounds at one configuration.
    Tightness(TightnessArgs),
    /// Evaluate one of the special-mean inequalities.
    Means(MeansArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Point {
    /// Corpus function id.
    #[arg(long = "fn")]
    function: String,
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    /// Quadrature tolerance for the left-hand side.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Grid steps per axis for the convexity screen.
    #[arg(long, default_value_t = 32)]
    grid_n: usize,
}

impl Point {
    fn params(&self) -> Params {
        Params { alpha: self.alpha, m: self.m, lambda: self.lambda, mu: self.mu, q: self.q }
    }

    fn settings(&self) -> Settings {
        Settings { quad_tol: self.tol, grid_n: self.grid_n, ..Settings::default() }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    point: Point,
    #[arg(long)]
    theorem: Theorem,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Also compare the closed-form coefficients with quadrature.
    #[arg(long)]
    crosscheck: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Spec file; the bundled acceptance spec when omitted.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Row output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, env = "HH_VERIFY_JOBS")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct TightnessArgs {
    #[command(flatten)]
    point: Point,
    /// Comma-separated theorem ids, at least two.
    #[arg(long, value_delimiter = ',', required = true)]
    theorems: Vec<Theorem>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct MeansArgs {
    #[arg(long)]
    prop: u8,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, allow_hyphen_values = true)]
    n: Option<i32>,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_HOLDS });
        }
    };
    let code = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Tightness(args) => cmd_tightness(args),
        Command::Means(args) => cmd_means(args),
    };
    match code {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn write_rows(rows: &[ReportRow], format: Format, out: impl Write) -> hh_bounds::Result<()> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => write_json(rows, out),
        Format::Text => write_text(rows, out),
    }
}

fn status_code(status: RowStatus) -> u8 {
    match status {
        RowStatus::Holds => EXIT_HOLDS,
        RowStatus::Violated => EXIT_VIOLATED,
        RowStatus::GateFailed => EXIT_GATE,
        RowStatus::NotApplicable | RowStatus::InputError => EXIT_INPUT,
    }
}

fn cmd_verify(args: VerifyArgs) -> hh_bounds::Result<u8> {
    let p = &args.point;
    let spec = SweepSpec::single(&p.function, (p.a, p.b), p.params(), args.theorem, p.settings());
    let rows = run_parallel(&spec, 1)?;
    let row = &rows[0];
    write_rows(&rows, args.format, io::stdout().lock())?;
    if row.status == RowStatus::InputError || row.status == RowStatus::NotApplicable {
        eprintln!("error: {}", row.message);
    }
    if args.crosscheck {
        let checks = crosscheck(p.alpha, p.lambda, p.mu, 1e-13)?;
        let worst = checks.iter().map(|c| c.abs_diff).fold(0.0, f64::max);
        for c in &checks {
            eprintln!(
                "crosscheck {:<7} closed={:?} quadrature={:?} diff={:e}",
                c.name, c.closed_form, c.quadrature, c.abs_diff
            );
        }
        eprintln!("crosscheck worst diff {worst:e}");
    }
    Ok(status_code(row.status))
}

fn cmd_sweep(args: SweepArgs) -> hh_bounds::Result<u8> {
    let spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Param(format!("cannot read {}: {e}", path.display())))?;
            SweepSpec::parse(&text)?
        }
        None => SweepSpec::default_acceptance(),
    };
    eprintln!("sweep: {} rows", spec.size());
    let jobs = args.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let rows = run_parallel(&spec, jobs)?;
    match &args.out {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| Error::Param(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write_rows(&rows, args.format, &mut w)?;
            w.flush().map_err(|e| Error::Unknown(e.to_string()))?;
        }
        None => write_rows(&rows, args.format, io::stdout().lock())?,
    }
    let summary = Summary::of(&rows);
    summary.write_text(io::stderr().lock())?;
    Ok(if summary.violated > 0 { EXIT_VIOLATED } else { EXIT_HOLDS })
}

fn cmd_tightness(args: TightnessArgs) -> hh_bounds::Result<u8> {
    let p = &args.point;
    let table = tightness(&p.function, (p.a, p.b), p.params(), &args.theorems, p.settings())?;
    let rows: Vec<ReportRow> = table.entries.iter().map(|e| e.row.clone()).collect();
    match args.format {
        Format::Text => print_tightness(&table),
        f => write_rows(&rows, f, io::stdout().lock())?,
    }
    let code = if rows.iter().any(|r| r.status == RowStatus::Violated) {
        EXIT_VIOLATED
    } else if rows.iter().all(|r| r.status == RowStatus::InputError || r.status == RowStatus::NotApplicable) {
        EXIT_INPUT
    } else if rows.iter().all(|r| r.status != RowStatus::Holds) {
        EXIT_GATE
    } else {
        EXIT_HOLDS
    };
    Ok(code)
}

fn print_tightness(table: &TightnessTable) {
    let show = |v: Option<f64>| v.map_or_else(|| "-".to_owned(), |x| format!("{x:.10}"));
    println!("{:<8} {:>14} {:>14} {:>14} {:>5}  status", "theorem", "lhs", "rhs", "slack", "rank");
    for e in &table.entries {
        let r = &e.row;
        let mark = if e.rank == Some(1) { "  (tightest)" } else { "" };
        println!(
            "{:<8} {:>14} {:>14} {:>14} {:>5}  {}{mark}",
            r.theorem.id(),
            show(r.lhs),
            show(r.rhs),
            show(r.slack),
            e.rank.map_or_else(|| "-".to_owned(), |k| k.to_string()),
            r.status.id()
        );
    }
    println!(
        "baseline f((a+b)/2) = {:.10} <= mean f = {:.10} <= (f(a)+f(b))/2 = {:.10}, trapezoid gap {:.10}",
        table.midpoint_value, table.integral_mean, table.trapezoid_value, table.trapezoid_gap
    );
}

fn cmd_means(args: MeansArgs) -> hh_bounds::Result<u8> {
    let prop = Proposition::new(args.prop, args.n)?;
    let check = proposition_check(prop, args.a, args.b, args.lambda, args.mu, args.q)?;
    match args.format {
        Format::Json => {
            let line = serde_json::to_string(&check).map_err(|e| Error::Unknown(e.to_string()))?;
            println!("{line}");
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            w.serialize(check).map_err(|e| Error::Unknown(e.to_string()))?;
            w.flush().map_err(|e| Error::Unknown(e.to_string()))?;
        }
        Format::Text => {
            println!("proposition   {}", check.proposition);
            println!("mean_lhs      {:?}", check.mean_lhs);
            println!("mean_rhs      {:?}", check.mean_rhs);
            println!("corollary_rhs {:?}", check.corollary_rhs);
            println!("residual      {:e}", check.residual);
            println!("holds         {}", check.holds);
            println!("display_holds {}", check.display_holds);
            if let Some(r) = check.factor_residual {
                println!("factor_residual {r:e}");
            }
            if check.residual > 1e-12 * check.corollary_rhs.abs().max(1.0) {
                println!(
                    "finding: mean-form value differs from the corollary by a factor {:?}",
                    check.mean_rhs / check.corollary_rhs
                );
            }
        }
    }
    Ok(if check.holds { EXIT_HOLDS } else { EXIT_VIOLATED })
}
