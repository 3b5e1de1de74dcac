//! The `ddd` command line.
//!
//! Exit codes: 0 on success, 1 when the command fails at run time, 2 for
//! usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::RngCore;

use crate::data::{standardize, DataMatrix};
use crate::depth::{DepthFunction, DepthMethod, DepthPlan, DEFAULT_APPROX_DIRECTIONS};
use crate::discrepancy::{ddd_gof_banded, ddd_twosample_banded, Band, DddRecord};
use crate::distributions::ReferenceDistribution;
use crate::error::{Error, Result};
use crate::hypothesis::{
    gof_test_many, twosample_test_many, EvalGrid, GofSpec, PValueRule, Statistic, TestResult,
    TwoSampleSpec, DEFAULT_BOOTSTRAP, DEFAULT_GRID_SIZE,
};
use crate::io::{
    fmt_real, parse_null_spec, read_csv, write_ddd_csv, write_ddd_svg, DepthRecord, Payload,
    ResultDocument,
};
use crate::rng::StreamRng;
use crate::simulation::{
    render_table, run_gof_cell, run_local_power_curve, run_twosample_cell, ExperimentSpec, Model,
    PowerEstimate, TableFormat,
};

#[derive(Debug, Parser)]
#[command(
    name = "ddd",
    version,
    about = "Half-space depth, data-depth discrepancy and depth-based tests"
)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Depth of query points with respect to a sample.
    Depth(DepthArgs),
    /// Data-depth discrepancy records, as CSV and optionally SVG.
    #[command(subcommand)]
    Ddd(DddCommand),
    /// Goodness-of-fit test of a sample against a null distribution.
    Gof(GofArgs),
    /// Two-sample test.
    Twosample(TwoSampleArgs),
    /// Monte Carlo size / power study.
    Simulate(SimulateArgs),
}

#[derive(Debug, Subcommand)]
enum DddCommand {
    /// Discrepancy between a sample and a null distribution at the sample rows.
    Gof(DddGofArgs),
    /// Discrepancy between two samples at the pooled rows.
    Twosample(DddTwoSampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatChoice {
    Ks,
    Cvm,
    Both,
}

impl StatChoice {
    fn list(self) -> Vec<Statistic> {
        match self {
            StatChoice::Ks => vec![Statistic::Ks],
            StatChoice::Cvm => vec![Statistic::Cvm],
            StatChoice::Both => Statistic::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GridChoice {
    Sphere,
    Pooled,
}

impl From<GridChoice> for EvalGrid {
    fn from(g: GridChoice) -> Self {
        match g {
            GridChoice::Sphere => EvalGrid::Sphere,
            GridChoice::Pooled => EvalGrid::Pooled,
        }
    }
}

fn parse_method(s: &str) -> std::result::Result<DepthMethod, String> {
    match s {
        "auto" => Ok(DepthMethod::Auto),
        "exact" => Ok(DepthMethod::Exact),
        "approx" => Ok(DepthMethod::Approx {
            directions: DEFAULT_APPROX_DIRECTIONS,
        }),
        _ => match s.strip_prefix("approx:").map(str::parse::<usize>) {
            Some(Ok(directions)) if directions > 0 => Ok(DepthMethod::Approx { directions }),
            _ => Err(format!(
                "'{s}' is not one of auto, exact, approx, approx:<M>"
            )),
        },
    }
}

#[derive(Debug, Args)]
struct Common {
    /// Master seed; drawn from the OS and echoed in the output when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// auto | exact | approx | approx:<directions>
    #[arg(long, default_value = "auto", value_parser = parse_method)]
    method: DepthMethod,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (default: csv for `ddd`, json otherwise).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Input CSV files have no header line.
    #[arg(long)]
    no_header: bool,
}

#[derive(Debug, Args)]
struct TestOptions {
    /// Grid size M: sphere points for KS, null draws for CvM.
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    directions: usize,
    /// Bootstrap replicates B.
    #[arg(long, default_value_t = DEFAULT_BOOTSTRAP)]
    bootstrap: usize,
    #[arg(long, value_enum, default_value = "sphere")]
    eval_grid: GridChoice,
    #[arg(long, value_enum, default_value = "both")]
    statistic: StatChoice,
    /// Use (1 + count) / (1 + B) instead of count / B.
    #[arg(long)]
    corrected_p: bool,
    /// Nominal level for the rejection rates of `simulate`.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

impl TestOptions {
    fn rule(&self) -> PValueRule {
        if self.corrected_p {
            PValueRule::Corrected
        } else {
            PValueRule::Strict
        }
    }
}

#[derive(Debug, Args)]
struct DepthArgs {
    sample: PathBuf,
    /// One query point, comma-separated.
    #[arg(long, conflicts_with = "queries", allow_hyphen_values = true)]
    point: Option<String>,
    /// CSV of query points (default: the sample itself).
    #[arg(long)]
    queries: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct DddGofArgs {
    data: PathBuf,
    /// Null distribution, e.g. standard-normal, t:3, normal:<mean>:<cov>.
    #[arg(long, default_value = "standard-normal")]
    null: String,
    /// Standardize the data with their own mean and covariance first.
    #[arg(long)]
    standardize: bool,
    /// Reference sample size (default max(10 n, 5000)).
    #[arg(long)]
    ref_size: Option<usize>,
    #[command(flatten)]
    plot: PlotArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct DddTwoSampleArgs {
    x: PathBuf,
    y: PathBuf,
    #[command(flatten)]
    plot: PlotArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Also write an SVG plot here.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, default_value_t = 640)]
    width: u32,
    #[arg(long, default_value_t = 400)]
    height: u32,
    /// Use a bootstrap band with this many replicates instead of two sigma.
    #[arg(long)]
    bootstrap_band: Option<usize>,
}

impl PlotArgs {
    fn band(&self) -> Band {
        match self.bootstrap_band {
            Some(replicates) => Band::Bootstrap { replicates },
            None => Band::TwoSigma,
        }
    }
}

#[derive(Debug, Args)]
struct GofArgs {
    data: PathBuf,
    #[arg(long, default_value = "standard-normal")]
    null: String,
    /// Standardize with the sample mean and covariance and test against the
    /// standard normal (replaces --null).
    #[arg(long)]
    standardize: bool,
    #[arg(long)]
    ref_size: Option<usize>,
    #[command(flatten)]
    test: TestOptions,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct TwoSampleArgs {
    x: PathBuf,
    y: PathBuf,
    #[command(flatten)]
    test: TestOptions,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelChoice {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    B,
    Contiguous,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Experiment spec as JSON; replaces the model flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "config")]
    model: Option<ModelChoice>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Second sample size for two-sample models.
    #[arg(long)]
    m: Option<usize>,
    /// Ratio n / (n + m); used when --m is absent.
    #[arg(long)]
    lambda: Option<f64>,
    /// Mean shift of model B.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Contiguous model: comma-separated gamma grid.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    gammas: Vec<f64>,
    /// Contiguous model: null F0.
    #[arg(long, default_value = "standard-normal")]
    null: String,
    /// Contiguous model: contaminating law H.
    #[arg(long, default_value = "laplace")]
    contamination: String,
    /// Contiguous model: contaminate the second of two samples.
    #[arg(long)]
    two_sample: bool,
    #[arg(long, default_value_t = 200)]
    reps: usize,
    #[arg(long)]
    ref_size: Option<usize>,
    #[command(flatten)]
    test: TestOptions,
    #[command(flatten)]
    common: Common,
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let echo: Vec<String> = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let run = || execute(cli.command, echo);
    let outcome = match cli.threads {
        Some(0) => Err(Error::Parameter("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Io(e.to_string()))
            .and_then(|pool| pool.install(run)),
        None => run(),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ddd: error: {e}");
            1
        }
    }
}

fn execute(command: Command, echo: Vec<String>) -> Result<()> {
    let start = Instant::now();
    let default_format = match command {
        Command::Ddd(_) => Format::Csv,
        _ => Format::Json,
    };
    let (common, seed, payload) = match command {
        Command::Depth(a) => {
            let seed = resolve_seed(a.common.seed);
            let recs = run_depth(&a, seed)?;
            (a.common, seed, Payload::Depth(recs))
        }
        Command::Ddd(DddCommand::Gof(a)) => {
            let seed = resolve_seed(a.common.seed);
            let x = load(&a.data, &a.common)?;
            let (x, null) = if a.standardize {
                (
                    standardize(&x)?.0,
                    ReferenceDistribution::standard_normal(x.ncols())?,
                )
            } else {
                let null = parse_null_spec(&a.null, x.ncols())?;
                (x, null)
            };
            let recs = ddd_gof_banded(
                &x,
                &null,
                a.ref_size,
                a.common.method,
                a.plot.band(),
                &mut StreamRng::new(seed, 0),
            )?;
            write_svg(&a.plot, &recs)?;
            (a.common, seed, Payload::Ddd(recs))
        }
        Command::Ddd(DddCommand::Twosample(a)) => {
            let seed = resolve_seed(a.common.seed);
            let x = load(&a.x, &a.common)?;
            let y = load(&a.y, &a.common)?;
            let recs = ddd_twosample_banded(
                &x,
                &y,
                a.common.method,
                a.plot.band(),
                &mut StreamRng::new(seed, 0),
            )?;
            write_svg(&a.plot, &recs)?;
            (a.common, seed, Payload::Ddd(recs))
        }
        Command::Gof(a) => {
            let seed = resolve_seed(a.common.seed);
            let x = load(&a.data, &a.common)?;
            let (x, null) = if a.standardize {
                (
                    standardize(&x)?.0,
                    ReferenceDistribution::standard_normal(x.ncols())?,
                )
            } else {
                let null = parse_null_spec(&a.null, x.ncols())?;
                (x, null)
            };
            let stats = a.test.statistic.list();
            let spec = GofSpec {
                f0: null,
                statistic: stats[0],
                grid_size: a.test.directions,
                bootstrap: a.test.bootstrap,
                reference_size: a.ref_size,
                method: a.common.method,
                grid: a.test.eval_grid.into(),
                p_value: a.test.rule(),
                seed,
            };
            let results = gof_test_many(&x, &spec, &stats)?;
            (a.common, seed, Payload::Tests(results))
        }
        Command::Twosample(a) => {
            let seed = resolve_seed(a.common.seed);
            let x = load(&a.x, &a.common)?;
            let y = load(&a.y, &a.common)?;
            let stats = a.test.statistic.list();
            let spec = TwoSampleSpec {
                statistic: stats[0],
                grid_size: a.test.directions,
                bootstrap: a.test.bootstrap,
                method: a.common.method,
                grid: a.test.eval_grid.into(),
                p_value: a.test.rule(),
                seed,
            };
            let results = twosample_test_many(&x, &y, &spec, &stats)?;
            (a.common, seed, Payload::Tests(results))
        }
        Command::Simulate(a) => {
            let seed = resolve_seed(a.common.seed);
            let cells = run_simulate(&a, seed)?;
            (a.common, seed, Payload::Power(cells))
        }
    };
    let doc = ResultDocument::new(echo, seed, payload, start.elapsed().as_secs_f64());
    let bytes = match common.format.unwrap_or(default_format) {
        Format::Json => {
            let mut s = doc.to_json()?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => render_csv(&doc.payload)?,
        Format::Text => render_text(&doc)?.into_bytes(),
    };
    match &common.out {
        Some(path) => write_file(path, &bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
            Ok(())
        }
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| StreamRng::from_entropy().next_u64())
}

fn load(path: &Path, common: &Common) -> Result<DataMatrix> {
    read_csv(path, !common.no_header)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_svg(plot: &PlotArgs, records: &[DddRecord]) -> Result<()> {
    match &plot.svg {
        Some(path) => write_file(path, &write_ddd_svg(records, plot.width, plot.height)?),
        None => Ok(()),
    }
}

fn run_depth(a: &DepthArgs, seed: u64) -> Result<Vec<DepthRecord>> {
    let sample = load(&a.sample, &a.common)?;
    let queries = match (&a.point, &a.queries) {
        (Some(p), _) => {
            let coords = p
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parameter(format!("'{v}' is not a number")))
                })
                .collect::<Result<Vec<f64>>>()?;
            DataMatrix::new(1, coords.len(), coords)?
        }
        (None, Some(path)) => load(path, &a.common)?,
        (None, None) => sample.clone(),
    };
    let plan = DepthPlan::resolve(
        a.common.method,
        sample.ncols(),
        &mut StreamRng::new(seed, 0),
    )?;
    let depths = DepthFunction::new(&sample, &plan)?.profile(queries.as_slice())?;
    Ok(queries
        .rows()
        .zip(depths)
        .enumerate()
        .map(|(index, (p, depth))| DepthRecord {
            index,
            point: p.to_vec(),
            depth,
            value: depth.value(),
        })
        .collect())
}

fn run_simulate(a: &SimulateArgs, seed: u64) -> Result<Vec<PowerEstimate>> {
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let spec: ExperimentSpec = serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            column: Some(e.column()),
            message: e.to_string(),
        })?;
        return if spec.model.is_two_sample() {
            run_twosample_cell(&spec)
        } else {
            run_gof_cell(&spec)
        };
    }
    let model = match a.model.expect("clap requires --model without --config") {
        ModelChoice::A1 => Model::A1,
        ModelChoice::A2 => Model::A2,
        ModelChoice::A3 => Model::A3,
        ModelChoice::A4 => Model::A4,
        ModelChoice::A5 => Model::A5,
        ModelChoice::A6 => Model::A6,
        ModelChoice::B => Model::B { mu: a.mu },
        ModelChoice::Contiguous => Model::A1,
    };
    let spec = ExperimentSpec {
        m: a.m,
        lambda: a.lambda,
        alpha: a.test.alpha,
        reps: a.reps,
        bootstrap: a.test.bootstrap,
        grid_size: a.test.directions,
        reference_size: a.ref_size,
        method: a.common.method,
        grid: a.test.eval_grid.into(),
        p_value: a.test.rule(),
        statistics: a.test.statistic.list(),
        ..ExperimentSpec::new(model, a.d, a.n, seed)
    };
    match a.model {
        Some(ModelChoice::Contiguous) => {
            let f0 = parse_null_spec(&a.null, a.d)?;
            let h = parse_null_spec(&a.contamination, a.d)?;
            let curve = run_local_power_curve(&a.gammas, &f0, &h, &spec, a.two_sample)?;
            Ok(curve.into_iter().flat_map(|(_, cell)| cell).collect())
        }
        Some(ModelChoice::B) => run_twosample_cell(&spec),
        _ => run_gof_cell(&spec),
    }
}

fn render_csv(payload: &Payload) -> Result<Vec<u8>> {
    Ok(match payload {
        Payload::Depth(recs) => {
            let d = recs.first().map_or(0, |r| r.point.len());
            let mut s = String::from("index,hits,total,depth");
            for j in 1..=d {
                let _ = write!(s, ",x{j}");
            }
            s.push('\n');
            for r in recs {
                let _ = write!(
                    s,
                    "{},{},{},{}",
                    r.index,
                    r.depth.hits,
                    r.depth.total,
                    fmt_real(r.value)
                );
                for v in &r.point {
                    let _ = write!(s, ",{}", fmt_real(*v));
                }
                s.push('\n');
            }
            s.into_bytes()
        }
        Payload::Ddd(recs) => write_ddd_csv(recs),
        Payload::Tests(results) => {
            let mut s = String::from("statistic,value,p_value,exceedances,bootstrap\n");
            for t in results {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    t.statistic,
                    fmt_real(t.statistic_value),
                    fmt_real(t.p_value),
                    t.exceedances,
                    t.replicates.len()
                );
            }
            s.into_bytes()
        }
        Payload::Power(cells) => render_table(cells, TableFormat::Csv)?.into_bytes(),
    })
}

fn render_text(doc: &ResultDocument) -> Result<String> {
    let mut s = String::new();
    match &doc.payload {
        Payload::Depth(recs) => {
            for r in recs {
                let _ = writeln!(s, "{}\t{}\t{:.6}", r.index, r.depth, r.value);
            }
        }
        Payload::Ddd(recs) => {
            let outside = recs.iter().filter(|r| r.outside).count();
            let _ = writeln!(s, "{} points, {} outside the band", recs.len(), outside);
        }
        Payload::Tests(results) => {
            for t in results {
                s.push_str(&describe_test(t));
            }
        }
        Payload::Power(cells) => s.push_str(&render_table(cells, TableFormat::Text)?),
    }
    let _ = writeln!(s, "seed {}", doc.seed);
    Ok(s)
}

fn describe_test(t: &TestResult) -> String {
    format!(
        "{}: statistic {:.6}, p-value {:.4} ({} of {} replicates exceed)\n",
        t.statistic,
        t.statistic_value,
        t.p_value,
        t.exceedances,
        t.replicates.len()
    )
}
