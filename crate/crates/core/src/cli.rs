//! The `urblock` command line: `test`, `critvals` and `simulate`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::baselines::{self, BaseLag, BaselineKind, BaselineSpec, NULL_REPS, NULL_SEED};
use crate::error::UrError;
use crate::limits::{build_crit_table, CritTable, TABLE_ALPHA, TABLE_B};
use crate::mc::experiment::in_pool;
use crate::mc::{figures, parse_config, run_experiment, table, DgpSpec, RunOptions, TestId};
use crate::prewhiten::schwert_pmax;
use crate::series::{BlockScheme, Series};
use crate::testkit::{run_test, LagRule, TestOutcome, TestSpec, Variant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

/// Below this many observations `test` refuses to run.
const MIN_OBS: usize = 10;
const WARN_OBS: usize = 30;

#[derive(Debug, Parser)]
#[command(name = "urblock", version, about = "Pooled-block unit root tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test a series read from a CSV file for a unit root.
    Test(TestArgs),
    /// Simulate fixed-b critical values.
    Critvals(CritArgs),
    /// Run the Monte Carlo experiments described in a grid file.
    Simulate(SimArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TestName {
    TauSb,
    TauFb,
    Adf,
    DfGls,
    DfGlsTrend,
    El,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure {
    /// Trend shapes on a grid of r values.
    Trends,
    /// Size-adjusted power against the initial-condition spread.
    Initial,
}

#[derive(Debug, clap::Args)]
struct TestArgs {
    /// CSV file with the series.
    #[arg(long, short)]
    input: PathBuf,
    /// Column name, or 1-based column position.
    #[arg(long)]
    column: Option<String>,
    #[arg(long, value_enum, default_value = "tau-sb")]
    test: TestName,
    /// Exponent of the power rule B = T^gamma (tau-sb).
    #[arg(long, default_value_t = 0.7)]
    gamma: f64,
    /// Relative blocklength B = b T (tau-fb).
    #[arg(long, default_value_t = 0.2)]
    b: f64,
    /// `N`, `bic` (maximum 5), `bicN`, or `schwert`.
    #[arg(long, default_value = "bic")]
    lags: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, clap::Args)]
struct CritArgs {
    /// Master seed; replication i draws from stream (seed, i).
    #[arg(long)]
    seed: u64,
    /// Grid points per simulated path.
    #[arg(long, default_value_t = 5000)]
    grid: usize,
    #[arg(long, default_value_t = 20_000)]
    reps: usize,
    /// Comma-separated relative blocklengths.
    #[arg(long, value_delimiter = ',')]
    b_grid: Option<Vec<f64>>,
    /// Comma-separated significance levels.
    #[arg(long, value_delimiter = ',')]
    alpha_grid: Option<Vec<f64>>,
    /// Output file (default stdout).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, clap::Args)]
struct SimArgs {
    /// Experiment grid file.
    #[arg(long, required_unless_present = "figure")]
    config: Option<PathBuf>,
    /// Master seed; replication i draws from stream (seed, i).
    #[arg(long)]
    seed: u64,
    /// Overrides the replication count of every experiment.
    #[arg(long)]
    reps: Option<usize>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Output file (default stdout).
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Emit figure data instead of rejection tables.
    #[arg(long, value_enum)]
    figure: Option<Figure>,
}

/// Error carrying the process exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<UrError> for Failure {
    fn from(e: UrError) -> Self {
        let code = match e {
            UrError::DegenerateSeries
            | UrError::DegenerateResiduals
            | UrError::ProfileDegenerate { .. }
            | UrError::RankDeficient { .. }
            | UrError::NonFinite(_) => EXIT_DEGENERATE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

/// Arguments that do not change any result are left out of provenance lines.
fn canonical_command(args: &[String]) -> String {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        if a == "--threads" || a == "--output" || a == "-o" {
            skip = true;
            continue;
        }
        if a.starts_with("--threads=") || a.starts_with("--output=") {
            continue;
        }
        out.push(a.as_str());
    }
    out.join(" ")
}

fn provenance(args: &[String], seed: Option<u64>) -> String {
    let mut p = format!(
        "urblock {} cmd=\"{}\"",
        env!("CARGO_PKG_VERSION"),
        canonical_command(args)
    );
    if let Some(s) = seed {
        let _ = write!(p, " seed={s}");
    }
    p
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| input_error(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| input_error(format!("cannot write output: {e}")))
        }
    }
}

/// Reads one numeric column. A first row whose selected cell is not numeric
/// is taken as a header; blank lines are skipped.
pub fn read_series_csv(path: &Path, column: Option<&str>) -> Result<Vec<f64>, UrError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| UrError::Io(format!("{}: {e}", path.display())))?;
    let mut rows: Vec<(usize, csv::StringRecord)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| UrError::Io(format!("{}: {e}", path.display())))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        rows.push((line, rec));
    }
    let Some((_, first)) = rows.first() else {
        return Err(UrError::Parse {
            line: 0,
            message: "no data rows".into(),
        });
    };
    let numeric = |s: &str| s.parse::<f64>().is_ok();
    let by_position = column.and_then(|c| c.parse::<usize>().ok());

    let (col, has_header) = match (column, by_position) {
        (_, Some(0)) => {
            return Err(UrError::InvalidArgument("column positions start at 1".into()))
        }
        (_, Some(p)) => (p - 1, first.get(p - 1).is_some_and(|c| !numeric(c))),
        (Some(name), None) => {
            let idx = first.iter().position(|h| h == name).ok_or_else(|| {
                UrError::InvalidArgument(format!("no column named `{name}` in the header"))
            })?;
            (idx, true)
        }
        (None, None) => {
            if first.len() != 1 {
                return Err(UrError::InvalidArgument(format!(
                    "input has {} columns; choose one with --column",
                    first.len()
                )));
            }
            (0, !first.get(0).is_some_and(numeric))
        }
    };
    let mut values = Vec::with_capacity(rows.len());
    for (line, rec) in rows.iter().skip(usize::from(has_header)) {
        let cell = rec.get(col).ok_or_else(|| UrError::Parse {
            line: *line,
            message: format!("missing column {}", col + 1),
        })?;
        let v: f64 = cell.parse().map_err(|_| UrError::Parse {
            line: *line,
            message: format!("non-numeric value `{cell}`"),
        })?;
        if !v.is_finite() {
            return Err(UrError::Parse {
                line: *line,
                message: format!("non-finite value `{cell}`"),
            });
        }
        values.push(v);
    }
    Ok(values)
}

fn parse_cli_lag(s: &str, len: usize) -> Result<LagRule, Failure> {
    crate::mc::experiment::parse_lag(s)
        .map(|rule| match rule {
            LagRule::Schwert if len < 20 => LagRule::Fixed(0),
            r => r,
        })
        .ok_or_else(|| input_error(format!("bad --lags value `{s}` (use N, bic, bicN or schwert)")))
}

fn outcome_json(test: &str, alpha: f64, out: &TestOutcome, prov: &str) -> serde_json::Value {
    json!({
        "test": test,
        "alpha": alpha,
        "statistic": out.statistic,
        "critical_value": out.critical_value,
        "p_value": out.p_value,
        "reject": out.reject,
        "diagnostics": out.diagnostics,
        "provenance": prov,
    })
}

fn outcome_text(test: &str, alpha: f64, out: &TestOutcome, prov: &str) -> String {
    let d = &out.diagnostics;
    let mut s = format!("# {prov}\n");
    let _ = writeln!(s, "test            {test}");
    let _ = writeln!(s, "observations    {}", d.len);
    let _ = writeln!(s, "statistic       {:.6}", out.statistic);
    let _ = writeln!(s, "critical value  {:.6} (alpha = {alpha})", out.critical_value);
    if let Some(p) = out.p_value {
        let _ = writeln!(s, "p-value         {p:.6}");
    }
    let decision = if out.reject {
        "reject the unit root in favour of stationarity"
    } else {
        "do not reject the unit root"
    };
    let _ = writeln!(s, "decision        {decision}");
    if d.blocklength > 0 {
        let _ = writeln!(s, "blocklength     {}", d.blocklength);
    }
    let _ = writeln!(s, "lags            {}", d.lag);
    let opt = |s: &mut String, name: &str, v: Option<f64>| {
        if let Some(v) = v {
            let _ = writeln!(s, "{name:<16}{v:.6}");
        }
    };
    if let Some(a) = d.aux_len {
        let _ = writeln!(s, "aux length      {a}");
    }
    opt(&mut s, "sigma2_hat", d.sigma2_hat);
    opt(&mut s, "kappa2_hat", d.kappa2_hat);
    opt(&mut s, "v_T", d.v_t);
    opt(&mut s, "rho_hat", d.rho_hat);
    for w in &d.warnings {
        let _ = writeln!(s, "warning         {w}");
    }
    s
}

fn outcome_csv(test: &str, alpha: f64, out: &TestOutcome, prov: &str) -> String {
    let d = &out.diagnostics;
    let o = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
    format!(
        "# {prov}\ntest,alpha,n_obs,statistic,critical_value,p_value,reject,blocklength,lags,aux_len,sigma2_hat,kappa2_hat\n\
         {test},{alpha},{},{},{},{},{},{},{},{},{},{}\n",
        d.len,
        out.statistic,
        out.critical_value,
        o(out.p_value),
        out.reject,
        d.blocklength,
        d.lag,
        d.aux_len.map_or_else(String::new, |a| a.to_string()),
        o(d.sigma2_hat),
        o(d.kappa2_hat),
    )
}

fn cmd_test(a: &TestArgs, argv: &[String]) -> Result<(), Failure> {
    let values = read_series_csv(&a.input, a.column.as_deref())?;
    if values.len() < MIN_OBS {
        return Err(input_error(format!(
            "series has {} observations; at least {MIN_OBS} are required",
            values.len()
        )));
    }
    if values.len() < WARN_OBS {
        log::warn!("series has only {} observations", values.len());
        eprintln!("warning: series has only {} observations", values.len());
    }
    let series = Series::new(values)?;
    let lag = parse_cli_lag(&a.lags, series.len())?;
    let (id, out) = match a.test {
        TestName::TauSb | TestName::TauFb => {
            let spec = TestSpec {
                variant: if a.test == TestName::TauSb {
                    Variant::SmallB
                } else {
                    Variant::FixedB
                },
                scheme: if a.test == TestName::TauSb {
                    BlockScheme::PowerRule(a.gamma)
                } else {
                    BlockScheme::FixedFraction(a.b)
                },
                lag,
                alpha: a.alpha,
            };
            let table = CritTable::load_default()?;
            (TestId::Pooled(spec), run_test(&series, &spec, &table)?)
        }
        _ => {
            let kind = match a.test {
                TestName::Adf => BaselineKind::Adf,
                TestName::DfGls => BaselineKind::DfGls,
                TestName::DfGlsTrend => BaselineKind::DfGlsTrend,
                _ => BaselineKind::EndersLee,
            };
            let lag = match lag {
                LagRule::Fixed(p) => BaseLag::Fixed(p),
                LagRule::Bic(p) => BaseLag::Bic(p),
                LagRule::Schwert => BaseLag::Bic(schwert_pmax(series.len())),
            };
            let spec = BaselineSpec::new(kind, lag);
            (
                TestId::Baseline(spec),
                baselines::baseline_test(&series, &spec, a.alpha)?,
            )
        }
    };
    let prov = provenance(argv, None);
    let name = id.to_string();
    let text = match a.format {
        Format::Text => outcome_text(&name, a.alpha, &out, &prov),
        Format::Json => format!("{}\n", outcome_json(&name, a.alpha, &out, &prov)),
        Format::Csv => outcome_csv(&name, a.alpha, &out, &prov),
    };
    write_output(None, &text)
}

fn cmd_critvals(a: &CritArgs, argv: &[String]) -> Result<(), Failure> {
    let b_grid = a.b_grid.clone().unwrap_or_else(|| TABLE_B.to_vec());
    let alpha_grid = a.alpha_grid.clone().unwrap_or_else(|| TABLE_ALPHA.to_vec());
    let table = in_pool(a.threads, || {
        build_crit_table(&b_grid, &alpha_grid, a.grid, a.reps, a.seed)
    })??;
    let prov = provenance(argv, Some(a.seed));
    eprintln!("{prov}");
    write_output(a.output.as_deref(), &format!("# {prov}\n{}", table.to_text()))
}

fn cmd_simulate(a: &SimArgs, argv: &[String]) -> Result<(), Failure> {
    let prov = format!(
        "{} baseline_cv=simulated-null(reps={NULL_REPS},seed={NULL_SEED})",
        provenance(argv, Some(a.seed))
    );
    if a.figure == Some(Figure::Trends) {
        return write_output(
            a.output.as_deref(),
            &format!("# {prov}\n{}", figures::trend_curves(3.0, 301)),
        );
    }
    let path = a.config.as_ref().expect("clap enforces --config");
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let experiments = parse_config(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let table = CritTable::load_default()?;

    if a.figure == Some(Figure::Initial) {
        let ex = &experiments[0];
        let alt: DgpSpec = ex.cells[0];
        let sds: Vec<f64> = ex.cells.iter().map(|c| c.init_sd).collect();
        let reps = a.reps.unwrap_or(ex.reps);
        let points = in_pool(a.threads, || {
            figures::size_adjusted_power(&alt, &ex.tests, &sds, ex.alpha, reps, a.seed, &table)
        })??;
        return write_output(
            a.output.as_deref(),
            &figures::power_points_csv(&points, Some(&prov)),
        );
    }

    let mut results = Vec::new();
    let mut text_out = format!("# {prov}\n");
    for ex in &experiments {
        if let Some(s) = ex.seed.filter(|s| *s != a.seed) {
            log::warn!("[{}]: seed {s} in the grid file is overridden by --seed {}", ex.name, a.seed);
        }
        let opts = RunOptions {
            reps: a.reps.unwrap_or(ex.reps),
            alpha: ex.alpha,
            seed: a.seed,
            threads: a.threads,
        };
        let mut section = Vec::new();
        for cell in &ex.cells {
            log::info!("[{}] T={} rho={} ({} reps)", ex.name, cell.len, cell.rho, opts.reps);
            section.extend(run_experiment(cell, &ex.tests, &opts, &table)?);
        }
        let _ = write!(text_out, "\n[{}]\n{}", ex.name, table::to_text(&section));
        results.extend(section);
    }
    let out = match a.format {
        Format::Text => text_out,
        Format::Csv => table::to_csv(&results, Some(&prov)),
        Format::Json => {
            let v = json!({ "provenance": prov, "results": results });
            format!("{v}\n")
        }
    };
    write_output(a.output.as_deref(), &out)
}

/// Runs the command line given by `argv` (including the program name) and
/// returns the exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let res = match &cli.command {
        Command::Test(a) => cmd_test(a, &argv),
        Command::Critvals(a) => cmd_critvals(a, &argv),
        Command::Simulate(a) => cmd_simulate(a, &argv),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Entry point of the binary.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    run(std::env::args().collect())
}
