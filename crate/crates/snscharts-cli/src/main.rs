//! Command-line front end: CSV ingestion, pipeline execution, JSON/CSV
//! reports, bound-table printing, and the embedded self-check suite.
//!
//! Exit codes: 0 ok, 1 self-check failure, 2 signal detected (opt-in via
//! --signal-exit-code), 3 configuration error, 4 data error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use snscharts::charts::{ChartConfig, FreezePolicy, Scheme, StatSelector};
use snscharts::math::round_sig;
use snscharts::multivariate::{
    mv_batch_chart, mv_individual_chart, profile_monitor, variation3_centered_square,
    variation4_sns_squared, ProfileReplicate,
};
use snscharts::{
    change_point_location, change_point_location_from, change_point_scale, run_chart,
    ChangePointResult, ChartRun, ConditionalRankState, RankState,
};

#[derive(Parser)]
#[command(name = "snscharts", version, about = "Nonparametric control charts via sequential normal scores")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a monitoring pipeline over a CSV input.
    Run(RunArgs),
    /// Replay every embedded fixture and report pass/fail per example.
    Verify {
        /// Emit the check matrix as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print an embedded bound or minimum-sample table as CSV.
    Tables {
        /// Table id: 2.1 through 2.8.
        id: String,
    },
    /// Change-point scan over a statistic series read from CSV.
    Changepoint(CpArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum Layout {
    /// Two columns: batch id, value; consecutive equal ids form a batch.
    Long,
    /// One row per batch; every data column is an observation.
    Wide,
    /// One row per observation with one column per component.
    Mv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum Pipeline {
    #[value(name = "location_sns")]
    LocationSns,
    #[value(name = "scale_sns2")]
    ScaleSns2,
    #[value(name = "centered_square")]
    CenteredSquare,
    #[value(name = "conditional")]
    Conditional,
    #[value(name = "mv_componentwise")]
    MvComponentwise,
    #[value(name = "mv_variation3")]
    MvVariation3,
    #[value(name = "mv_variation4")]
    MvVariation4,
    #[value(name = "profile")]
    Profile,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum ChartKind {
    Shewhart,
    Cusum,
    Ewma,
    #[value(name = "ewma_chi2")]
    EwmaChi2,
}

#[derive(Args)]
struct RunArgs {
    /// Input CSV (UTF-8, header row required).
    input: PathBuf,
    #[arg(long, value_enum)]
    pipeline: Pipeline,
    #[arg(long, value_enum, default_value = "wide")]
    layout: Layout,
    #[arg(long, value_enum, default_value = "shewhart")]
    chart: ChartKind,
    /// CUSUM allowance.
    #[arg(long)]
    k: Option<f64>,
    /// EWMA smoothing constant.
    #[arg(long)]
    lambda: Option<f64>,
    /// Nominal in-control average run length.
    #[arg(long, default_value_t = 370)]
    arl: u32,
    /// Known location / quantile (comma-separated per component where
    /// multivariate; intercept,slope,residual-variance for profiles).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Vec<f64>,
    /// P(X <= theta) for the conditional pipeline.
    #[arg(long = "p-theta")]
    p_theta: Option<f64>,
    /// Shared design points for the profile pipeline (comma-separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    design: Vec<f64>,
    /// Reference size: observations (or rows) forming the seeded reference.
    #[arg(long, default_value_t = 0)]
    reference: usize,
    /// Override the upper control limit.
    #[arg(long)]
    upper: Option<f64>,
    /// Override the lower control limit.
    #[arg(long)]
    lower: Option<f64>,
    /// Freeze the reference pool at the first signal (default).
    #[arg(long, overrides_with = "no_freeze")]
    freeze: bool,
    /// Keep absorbing batches after signals.
    #[arg(long = "no-freeze")]
    no_freeze: bool,
    /// Estimate the change point at the first signal.
    #[arg(long)]
    changepoint: bool,
    /// Emit a JSON report (default).
    #[arg(long, group = "fmt")]
    json: bool,
    /// Emit the per-index series as CSV.
    #[arg(long, group = "fmt")]
    csv: bool,
    /// Exit with code 2 when any signal was raised.
    #[arg(long = "signal-exit-code")]
    signal_exit_code: bool,
}

#[derive(Args)]
struct CpArgs {
    /// Input CSV holding the statistic series in its first data column.
    input: PathBuf,
    /// Index of the signaling entry (1-based); the scan covers 1..=signal.
    #[arg(long)]
    signal: usize,
    /// Smallest candidate split.
    #[arg(long = "first-candidate", default_value_t = 2)]
    first_candidate: usize,
    /// Population variance convention: location (1) or scale (2).
    #[arg(long, value_enum, default_value = "location")]
    statistic: CpStatistic,
    #[arg(long, group = "fmt")]
    json: bool,
    #[arg(long, group = "fmt")]
    csv: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CpStatistic {
    Location,
    Scale,
}

enum CliError {
    Config(String),
    Data(String),
}

impl From<snscharts::Error> for CliError {
    fn from(e: snscharts::Error) -> Self {
        match e {
            snscharts::Error::InvalidInput(m) => CliError::Data(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(3);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Run(args) => cmd_run(&args),
        Cmd::Verify { json } => return cmd_verify(json),
        Cmd::Tables { id } => cmd_tables(&id),
        Cmd::Changepoint(args) => cmd_changepoint(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(3)
        }
        Err(CliError::Data(m)) => {
            eprintln!("data error: {m}");
            ExitCode::from(4)
        }
    }
}

// ---------------------------------------------------------------- ingestion

struct Table {
    /// First column (index/batch id) as raw strings, where present.
    ids: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// Read a CSV file; the first column is treated as an identifier when its
/// header looks like an index (batch/obs/rep/index/id) or is non-numeric.
fn read_table(path: &PathBuf) -> Result<Table, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Data(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if header.is_empty() {
        return Err(CliError::Data(format!("{}: empty file", path.display())));
    }
    let first = header[0].to_ascii_lowercase();
    let has_id = matches!(first.as_str(), "batch" | "obs" | "rep" | "index" | "id");
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(e.to_string()))?;
        let mut cells = record.iter().map(|c| c.trim());
        if has_id {
            ids.push(cells.next().unwrap_or("").to_string());
        }
        let mut row = Vec::new();
        for (j, cell) in cells.enumerate() {
            if cell.is_empty() {
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| {
                CliError::Data(format!(
                    "{}: non-numeric cell {cell:?} at row {}, column {}",
                    path.display(),
                    i + 2,
                    j + 1 + has_id as usize
                ))
            })?;
            row.push(v);
        }
        if !row.is_empty() {
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(Table { ids, rows })
}

fn batches_from(table: &Table, layout: Layout) -> Result<Vec<Vec<f64>>, CliError> {
    match layout {
        Layout::Wide => Ok(table.rows.clone()),
        Layout::Long => {
            // Consecutive rows with the same id form a batch; a file without
            // an id column yields singleton batches.
            if table.ids.is_empty() {
                return Ok(table.rows.iter().map(|r| vec![r[0]]).collect());
            }
            let mut batches: Vec<Vec<f64>> = Vec::new();
            let mut last: Option<&str> = None;
            for (id, row) in table.ids.iter().zip(&table.rows) {
                if last == Some(id.as_str()) {
                    batches.last_mut().unwrap().push(row[0]);
                } else {
                    batches.push(vec![row[0]]);
                    last = Some(id);
                }
            }
            Ok(batches)
        }
        Layout::Mv => Err(CliError::Config(
            "mv layout is only valid for multivariate pipelines".into(),
        )),
    }
}

fn mv_rows(table: &Table) -> Result<Vec<Vec<f64>>, CliError> {
    let p = table.rows[0].len();
    for (i, r) in table.rows.iter().enumerate() {
        if r.len() != p {
            return Err(CliError::Data(format!(
                "ragged multivariate row {}: {} components, expected {p}",
                i + 2,
                r.len()
            )));
        }
    }
    Ok(table.rows.clone())
}

// ------------------------------------------------------------------ reports

#[derive(Serialize)]
struct ConfigEcho {
    input: String,
    layout: Layout,
    pipeline: Pipeline,
    chart: ChartKind,
    arl: u32,
    k: Option<f64>,
    lambda: Option<f64>,
    theta: Vec<f64>,
    p_theta: Option<f64>,
    reference: usize,
    freeze: bool,
    batches: usize,
}

#[derive(Serialize)]
struct RunReport {
    config: ConfigEcho,
    result: serde_json::Value,
    change_point: Option<ChangePointResult>,
    signaled: bool,
}

/// Round every number in a JSON tree to 6 significant digits (half-to-even);
/// the sole place output precision is reduced.
fn round_json(v: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    return serde_json::Number::from_f64(round_sig(f, 6))
                        .map(Value::Number)
                        .unwrap_or(Value::Null);
                }
            }
            Value::Number(n)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect())
        }
        other => other,
    }
}

fn emit_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Data(e.to_string()))?;
    println!(
        "{}",
        serde_json::to_string_pretty(&round_json(v)).map_err(|e| CliError::Data(e.to_string()))?
    );
    Ok(())
}

fn fmt_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{}", round_sig(x, 6))).unwrap_or_default()
}

// ---------------------------------------------------------------------- run

fn cmd_run(args: &RunArgs) -> Result<ExitCode, CliError> {
    let table = read_table(&args.input)?;
    let freeze = if args.no_freeze {
        FreezePolicy::Never
    } else {
        FreezePolicy::OnFirstSignal
    };
    let (result, series, change_point, signaled) = match args.pipeline {
        Pipeline::LocationSns => univariate(args, &table, freeze, false)?,
        Pipeline::ScaleSns2 => univariate(args, &table, freeze, false)?,
        Pipeline::CenteredSquare => univariate(args, &table, freeze, true)?,
        Pipeline::Conditional => univariate(args, &table, freeze, false)?,
        Pipeline::MvComponentwise => mv_componentwise(args, &table)?,
        Pipeline::MvVariation3 => mv_variation(args, &table, true)?,
        Pipeline::MvVariation4 => mv_variation(args, &table, false)?,
        Pipeline::Profile => profile(args, &table)?,
    };
    let n_batches = series.len();
    let report = RunReport {
        config: ConfigEcho {
            input: args.input.display().to_string(),
            layout: args.layout,
            pipeline: args.pipeline,
            chart: args.chart,
            arl: args.arl,
            k: args.k,
            lambda: args.lambda,
            theta: args.theta.clone(),
            p_theta: args.p_theta,
            reference: args.reference,
            freeze: freeze == FreezePolicy::OnFirstSignal,
            batches: n_batches,
        },
        result,
        change_point,
        signaled,
    };
    if args.csv {
        let mut out = String::from("index,statistic,c_plus,c_minus,ewma,signal\n");
        for r in &series {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.index,
                fmt_cell(Some(r.statistic)),
                fmt_cell(r.c_plus),
                fmt_cell(r.c_minus),
                fmt_cell(r.ewma),
                r.signal as u8
            ));
        }
        print!("{out}");
    } else {
        emit_json(&report)?;
    }
    Ok(if signaled && args.signal_exit_code {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

/// Uniform per-index view used for CSV emission.
struct SeriesRow {
    index: usize,
    statistic: f64,
    c_plus: Option<f64>,
    c_minus: Option<f64>,
    ewma: Option<f64>,
    signal: bool,
}

type RunOutput = (
    serde_json::Value,
    Vec<SeriesRow>,
    Option<ChangePointResult>,
    bool,
);

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Data(e.to_string()))
}

fn chart_config(args: &RunArgs, batch_n: usize) -> Result<(ChartConfig, StatSelector), CliError> {
    let selector = match args.pipeline {
        Pipeline::ScaleSns2 => StatSelector::ZSq,
        _ => StatSelector::Z,
    };
    let scheme = match (args.chart, selector) {
        (ChartKind::Shewhart, StatSelector::Z) => Scheme::ShewhartNormal,
        (ChartKind::Shewhart, StatSelector::ZSq) => Scheme::ShewhartChi2 {
            df: batch_n as u32,
        },
        (ChartKind::Cusum, _) => Scheme::Cusum {
            k: args.k.unwrap_or(0.5),
        },
        (ChartKind::Ewma, _) => Scheme::EwmaNormal {
            lambda: args.lambda.unwrap_or(0.1),
        },
        (ChartKind::EwmaChi2, _) => Scheme::EwmaChi2 {
            lambda: args.lambda.unwrap_or(0.1),
            m: batch_n as u32,
        },
    };
    let config = match args.upper {
        Some(u) => ChartConfig::with_bounds(scheme, args.lower.or(Some(-u)), u)
            .map_err(|e| CliError::Config(e.to_string()))?,
        None => ChartConfig::new(scheme, args.arl).map_err(|e| CliError::Config(e.to_string()))?,
    };
    Ok((config, selector))
}

fn univariate(
    args: &RunArgs,
    table: &Table,
    freeze: FreezePolicy,
    centered: bool,
) -> Result<RunOutput, CliError> {
    let mut batches = batches_from(table, args.layout)?;
    if centered {
        let theta = *args.theta.first().ok_or_else(|| {
            CliError::Config("centered_square requires --theta".into())
        })?;
        for b in &mut batches {
            *b = snscharts::transform_centered_square(b, theta);
        }
    }
    let mut warmup = 0usize;
    if args.reference > 0 {
        // Pull the first `reference` observations into one seeded reference
        // batch (only well-defined when it aligns with batch boundaries).
        let mut flat = Vec::new();
        let mut rest = Vec::new();
        for b in &batches {
            if flat.len() < args.reference {
                if flat.len() + b.len() > args.reference {
                    return Err(CliError::Config(format!(
                        "--reference {} does not align with batch boundaries",
                        args.reference
                    )));
                }
                flat.extend_from_slice(b);
            } else {
                rest.push(b.clone());
            }
        }
        if flat.len() < args.reference {
            return Err(CliError::Config(format!(
                "--reference {} exceeds the {} available observations",
                args.reference,
                flat.len()
            )));
        }
        let mut rebuilt = vec![flat];
        rebuilt.extend(rest);
        batches = rebuilt;
        warmup = 1;
    }
    let batch_n = batches.get(warmup).or(batches.first()).map(|b| b.len()).unwrap_or(1);
    let (config, selector) = chart_config(args, batch_n)?;
    let run: ChartRun = if args.pipeline == Pipeline::Conditional {
        let theta = *args
            .theta
            .first()
            .ok_or_else(|| CliError::Config("conditional requires --theta".into()))?;
        let p_theta = args
            .p_theta
            .ok_or_else(|| CliError::Config("conditional requires --p-theta".into()))?;
        let mut state = ConditionalRankState::new(theta, p_theta)
            .map_err(|e| CliError::Config(e.to_string()))?;
        run_chart(&mut state, &batches, selector, &config, freeze, warmup)?
    } else {
        run_chart(
            &mut RankState::new(),
            &batches,
            selector,
            &config,
            freeze,
            warmup,
        )?
    };
    let change_point = if args.changepoint {
        match run.first_signal() {
            Some(sig) => Some(match selector {
                StatSelector::Z => {
                    let z: Vec<f64> = run.scores.iter().map(|s| s.z).collect();
                    change_point_location(&z, sig as usize)?
                }
                StatSelector::ZSq => {
                    // Per-observation squared scores with the reference batch
                    // expanded back onto the observation axis.
                    let mut y = Vec::new();
                    for s in &run.scores {
                        y.extend(s.sns.iter().map(|v| v * v));
                    }
                    let first = if warmup == 1 { args.reference + 1 } else { 2 };
                    let sig_obs = batches[..sig as usize]
                        .iter()
                        .map(|b| b.len())
                        .sum::<usize>();
                    change_point_scale(&y, sig_obs, first)?
                }
            }),
            None => None,
        }
    } else {
        None
    };
    let signaled = !run.signals.is_empty();
    let series = run
        .points
        .iter()
        .map(|p| SeriesRow {
            index: p.index as usize,
            statistic: p.statistic,
            c_plus: p.c_plus,
            c_minus: p.c_minus,
            ewma: p.ewma,
            signal: p.signal,
        })
        .collect();
    Ok((to_value(&run)?, series, change_point, signaled))
}

fn mv_componentwise(args: &RunArgs, table: &Table) -> Result<RunOutput, CliError> {
    if args.layout != Layout::Mv {
        return Err(CliError::Config(
            "multivariate pipelines require --layout mv".into(),
        ));
    }
    let rows = mv_rows(table)?;
    if args.reference > 0 {
        let run = mv_individual_chart(&rows, args.reference, args.arl, args.lambda.unwrap_or(0.1))?;
        let signaled = !run.t2_signals.is_empty() || !run.ewma_signals.is_empty();
        let series = run
            .t2
            .iter()
            .enumerate()
            .map(|(i, &t2)| SeriesRow {
                index: i + 1,
                statistic: t2,
                c_plus: None,
                c_minus: None,
                ewma: run.ewma[i],
                signal: run.t2_signals.contains(&(i + 1)),
            })
            .collect();
        return Ok((to_value(&run)?, series, None, signaled));
    }
    // Batch mode: group rows by the id column into per-component columns.
    if table.ids.is_empty() {
        return Err(CliError::Config(
            "mv batch mode needs a batch id column (or pass --reference for individuals)".into(),
        ));
    }
    let p = rows[0].len();
    let mut batches: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut last: Option<&str> = None;
    for (id, row) in table.ids.iter().zip(&rows) {
        if last != Some(id.as_str()) {
            batches.push(vec![Vec::new(); p]);
            last = Some(id);
        }
        let batch = batches.last_mut().unwrap();
        for (j, &v) in row.iter().enumerate() {
            batch[j].push(v);
        }
    }
    let run = mv_batch_chart(&batches, args.arl)?;
    let signaled = !run.signals.is_empty();
    let series = run
        .t2
        .iter()
        .enumerate()
        .map(|(i, t2)| SeriesRow {
            index: i + 1,
            statistic: t2.unwrap_or(f64::NAN),
            c_plus: None,
            c_minus: None,
            ewma: None,
            signal: run.signals.contains(&(i + 1)),
        })
        .collect();
    Ok((to_value(&run)?, series, None, signaled))
}

fn mv_variation(args: &RunArgs, table: &Table, centered: bool) -> Result<RunOutput, CliError> {
    if args.layout != Layout::Mv {
        return Err(CliError::Config(
            "multivariate pipelines require --layout mv".into(),
        ));
    }
    let rows = mv_rows(table)?;
    let n_ref = args.reference;
    if n_ref == 0 || n_ref >= rows.len() {
        return Err(CliError::Config(
            "variation pipelines require --reference smaller than the row count".into(),
        ));
    }
    let (reference, phase2) = rows.split_at(n_ref);
    let lambda = args.lambda.unwrap_or(0.1);
    let run = if centered {
        let p = rows[0].len();
        let theta = if args.theta.is_empty() {
            vec![0.0; p]
        } else if args.theta.len() == p {
            args.theta.clone()
        } else {
            return Err(CliError::Config(format!(
                "--theta needs {p} components, got {}",
                args.theta.len()
            )));
        };
        variation3_centered_square(reference, phase2, &theta, args.arl, lambda)?
    } else {
        variation4_sns_squared(reference, phase2, args.arl, lambda)?
    };
    let signaled = !run.t2_signals.is_empty() || !run.overlay.ewma_signals.is_empty();
    let series = run
        .t2
        .iter()
        .enumerate()
        .map(|(i, &t2)| SeriesRow {
            index: i + 1,
            statistic: t2,
            c_plus: None,
            c_minus: None,
            ewma: run.overlay.ewma[i],
            signal: run.t2_signals.contains(&(i + 1)),
        })
        .collect();
    let change_point = run.change_point.clone();
    Ok((to_value(&run)?, series, change_point, signaled))
}

fn profile(args: &RunArgs, table: &Table) -> Result<RunOutput, CliError> {
    if args.design.is_empty() {
        return Err(CliError::Config(
            "profile requires --design with the shared x points".into(),
        ));
    }
    if args.theta.len() != 3 {
        return Err(CliError::Config(
            "profile requires --theta intercept,slope,residual-variance".into(),
        ));
    }
    let replicates: Vec<ProfileReplicate> = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, y)| {
            if y.len() != args.design.len() {
                return Err(CliError::Data(format!(
                    "replicate {} has {} responses, design has {}",
                    i + 1,
                    y.len(),
                    args.design.len()
                )));
            }
            Ok(ProfileReplicate {
                x: args.design.clone(),
                y: y.clone(),
            })
        })
        .collect::<Result<_, _>>()?;
    let run = profile_monitor(
        &replicates,
        (args.theta[0], args.theta[1], args.theta[2]),
        args.arl,
        args.lambda.unwrap_or(0.1),
    )?;
    let signaled = !run.ewma_signals.is_empty();
    let series = run
        .t2
        .iter()
        .enumerate()
        .map(|(i, t2)| SeriesRow {
            index: i + 1,
            statistic: t2.unwrap_or(f64::NAN),
            c_plus: None,
            c_minus: None,
            ewma: run.ewma[i],
            signal: run.ewma_signals.contains(&(i + 1)),
        })
        .collect();
    let change_point = run.change_point.clone();
    Ok((to_value(&run)?, series, change_point, signaled))
}

// ------------------------------------------------------------------- verify

fn cmd_verify(json: bool) -> ExitCode {
    let results = snscharts::verify::run_all();
    let failed = results.iter().filter(|r| !r.pass).count();
    if json {
        if emit_json(&results).is_err() {
            return ExitCode::from(4);
        }
    } else {
        for r in &results {
            println!("{} {}: {}", if r.pass { "pass" } else { "FAIL" }, r.name, r.detail);
        }
        println!(
            "{}/{} checks passed",
            results.len() - failed,
            results.len()
        );
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

// ------------------------------------------------------------------- tables

fn cmd_tables(id: &str) -> Result<ExitCode, CliError> {
    use snscharts::tables::*;
    let fmt = |v: f64| {
        if v.is_nan() {
            String::new()
        } else {
            format!("{v}")
        }
    };
    match id {
        "2.1" => {
            println!(
                "m,{}",
                SHEWHART_ARLS.map(|a| format!("arl_{a}")).join(",")
            );
            for (i, row) in SHEWHART_MIN_SAMPLE.iter().enumerate() {
                println!("{},{}", i + 1, row.map(|v| v.to_string()).join(","));
            }
        }
        "2.2" | "2.3" => {
            println!("arl,{}", CUSUM_KS.map(|k| format!("k_{k}")).join(","));
            for (i, arl) in CHART_ARLS.iter().enumerate() {
                let cells = if id == "2.2" {
                    CUSUM_BOUNDS[i].map(fmt).join(",")
                } else {
                    CUSUM_MIN_SAMPLE[i].map(|v| v.to_string()).join(",")
                };
                println!("{arl},{cells}");
            }
        }
        "2.4" | "2.5" => {
            println!(
                "arl,{}",
                EWMA_LAMBDAS.map(|l| format!("lambda_{l}")).join(",")
            );
            for (i, arl) in CHART_ARLS.iter().enumerate() {
                let cells = if id == "2.4" {
                    EWMA_BOUNDS[i].map(fmt).join(",")
                } else {
                    EWMA_MIN_SAMPLE[i].map(|v| v.to_string()).join(",")
                };
                println!("{arl},{cells}");
            }
        }
        "2.6" => {
            println!("arl,lambda,rho_upper,rho_lower");
            for (i, arl) in CHART_ARLS.iter().enumerate() {
                for (j, lam) in EWMA_CHI2_LAMBDAS.iter().enumerate() {
                    println!(
                        "{arl},{lam},{},{}",
                        fmt(EWMA_CHI2_RHO_UPPER[i][j]),
                        fmt(EWMA_CHI2_RHO_LOWER[i][j])
                    );
                }
            }
        }
        "2.7" => {
            println!("arl,lambda,upper,lower");
            for (i, arl) in CHART_ARLS.iter().enumerate() {
                for (j, lam) in EWMA_CHI2_LAMBDAS.iter().enumerate() {
                    println!(
                        "{arl},{lam},{},{}",
                        fmt(EWMA_CHI2_UPPER[i][j]),
                        fmt(EWMA_CHI2_LOWER[i][j])
                    );
                }
            }
        }
        "2.8" => {
            println!("arl,lambda,min_sample_upper,min_sample_lower");
            for (i, arl) in CHART_ARLS.iter().enumerate() {
                for (j, lam) in EWMA_CHI2_LAMBDAS.iter().enumerate() {
                    let cell = |v: u32| if v == 0 { String::new() } else { v.to_string() };
                    println!(
                        "{arl},{lam},{},{}",
                        cell(EWMA_CHI2_MIN_SAMPLE_UPPER[i][j]),
                        cell(EWMA_CHI2_MIN_SAMPLE_LOWER[i][j])
                    );
                }
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown table id {other:?} (expected 2.1 through 2.8)"
            )))
        }
    }
    Ok(ExitCode::SUCCESS)
}

// -------------------------------------------------------------- changepoint

fn cmd_changepoint(args: &CpArgs) -> Result<ExitCode, CliError> {
    let table = read_table(&args.input)?;
    let series: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
    let result = match args.statistic {
        CpStatistic::Location => {
            change_point_location_from(&series, args.signal, args.first_candidate)?
        }
        CpStatistic::Scale => change_point_scale(&series, args.signal, args.first_candidate)?,
    };
    if args.csv {
        println!("k,t");
        for (k, t) in &result.t_series {
            println!("{k},{}", round_sig(*t, 6));
        }
        println!("# estimate,{}", result.estimate);
    } else {
        emit_json(&result)?;
    }
    Ok(ExitCode::SUCCESS)
}
