//! Command-line interface: `fit`, `extend`, `score`, `bench-sphere` and
//! `compare`.
//!
//! Exit status is 0 on success, 2 on input errors and 3 on numerical
//! failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{run_comparison, BenchConfig, CompareConfig, Method, SphereBench, BENCH_CURVATURE_C};
use crate::error::{Error, Result};
use crate::extend::extend_batch;
use crate::io::{
    fmt_f64, load_model, read_points_table, read_table, save_model, write_bench_queries,
    write_bench_summary, write_outcomes, write_table, ResultsOptions,
};
use crate::model::TrainingModel;
use crate::weights::{SchemeKind, WeightScheme};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pbe", version, about = "PCA-based out-of-sample extension")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Package training points and their images into a model file.
    Fit(FitArgs),
    /// Extend the model to query points.
    Extend(ExtendArgs),
    /// Extend and flag queries whose abnormality score exceeds a threshold.
    Score(ScoreArgs),
    /// Run the sphere benchmark for all weighting schemes.
    BenchSphere(BenchArgs),
    /// Compare the extension with Nyström, MSE and Laplacian pyramids.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Training points table (p rows of n values).
    #[arg(long)]
    pub points: PathBuf,
    /// Images table (p rows of d values).
    #[arg(long)]
    pub images: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub curvature_c: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "tangent-per-point")]
    pub scheme: SchemeKind,
    /// Overrides the model's neighborhood radius.
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Overrides the model's curvature bound.
    #[arg(long, allow_negative_numbers = true)]
    pub curvature_c: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    #[command(flatten)]
    pub query: QueryArgs,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub query: QueryArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Grid points per axis; repeat for several grids.
    #[arg(long, default_values_t = [30usize])]
    pub grid: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub num_queries: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the default radius of 2.5 grid spacings.
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = BENCH_CURVATURE_C, allow_negative_numbers = true)]
    pub curvature_c: f64,
    /// Summary table.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-query errors; defaults to `<out>` with a `.queries.csv` suffix.
    #[arg(long)]
    pub per_query: Option<PathBuf>,
    /// Also write points, images, queries and truth tables of the first grid here.
    #[arg(long)]
    pub emit_data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// One function value per training point.
    #[arg(long)]
    pub function: PathBuf,
    /// Query points, optionally followed by a ground-truth column.
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    pub err: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [100usize, 400, 900])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value = "tangent-per-point")]
    pub scheme: SchemeKind,
    #[arg(long)]
    pub out: PathBuf,
}

/// Maps an error to its exit status.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INPUT
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing reports to `out` and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs with the process arguments on stdout and stderr.
pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Fit(a) => cmd_fit(&a.points, &a.images, a.epsilon, a.curvature_c, &a.out, out),
        Command::Extend(a) => cmd_extend(&a.query, out),
        Command::Score(a) => cmd_score(&a.query, a.threshold, out),
        Command::BenchSphere(a) => cmd_bench_sphere(&a, out),
        Command::Compare(a) => cmd_compare(&a, out),
    }
}

fn say(out: &mut dyn Write, line: impl AsRef<str>) {
    let _ = writeln!(out, "{}", line.as_ref());
}

pub fn cmd_fit(
    points_path: &Path,
    images_path: &Path,
    epsilon: f64,
    curvature_c: f64,
    out_model: &Path,
    out: &mut dyn Write,
) -> Result<i32> {
    let points = read_table(points_path)?;
    let images = read_table(images_path)?;
    if points.len() != images.len() {
        return Err(Error::ValidationFailure(format!(
            "{} points but {} images",
            points.len(),
            images.len()
        )));
    }
    let model = TrainingModel::from_rows(&points, &images, epsilon, curvature_c)?;
    save_model(&model, out_model)?;
    // Largest distance from a training point to its nearest other point.
    let spread = if model.len() > 1 {
        (0..model.len())
            .map(|j| model.index().nearest(model.point(j), 2)[1].distance)
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    say(
        out,
        format!(
            "p={} n={} d={} epsilon={} curvature_c={} nearest_neighbor_radius={}",
            model.len(),
            model.ambient_dim(),
            model.embed_dim(),
            model.epsilon(),
            model.curvature_c(),
            fmt_f64(spread)
        ),
    );
    Ok(EXIT_OK)
}

fn load_for_queries(a: &QueryArgs) -> Result<(TrainingModel, WeightScheme, Vec<Vec<f64>>)> {
    let mut model = load_model(&a.model)?;
    if a.epsilon.is_some() || a.curvature_c.is_some() {
        model = model.with_params(
            a.epsilon.unwrap_or(model.epsilon()),
            a.curvature_c.unwrap_or(model.curvature_c()),
        )?;
    }
    let scheme = WeightScheme::for_model(a.scheme, &model);
    let queries = read_points_table(&a.queries, model.ambient_dim())?;
    Ok((model, scheme, queries))
}

fn batch_status(outcomes: &[Result<crate::extend::ExtensionResult>]) -> i32 {
    let failed: Vec<&Error> = outcomes.iter().filter_map(|o| o.as_ref().err()).collect();
    if outcomes.is_empty() || failed.len() < outcomes.len() {
        EXIT_OK
    } else if failed.iter().all(|e| e.is_numerical()) {
        EXIT_NUMERICAL
    } else {
        EXIT_INPUT
    }
}

pub fn cmd_extend(a: &QueryArgs, out: &mut dyn Write) -> Result<i32> {
    let (model, scheme, queries) = load_for_queries(a)?;
    let outcomes = extend_batch(&queries, &model, &scheme);
    write_outcomes(&outcomes, model.embed_dim(), ResultsOptions::default(), &a.out)?;
    let failed = outcomes.iter().filter(|o| o.is_err()).count();
    say(
        out,
        format!("extended {} of {} queries ({failed} failed)", outcomes.len() - failed, outcomes.len()),
    );
    Ok(batch_status(&outcomes))
}

pub fn cmd_score(a: &QueryArgs, threshold: f64, out: &mut dyn Write) -> Result<i32> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::OutOfRange(format!("threshold must be positive, got {threshold}")));
    }
    let (model, scheme, queries) = load_for_queries(a)?;
    let outcomes = extend_batch(&queries, &model, &scheme);
    let opts = ResultsOptions {
        threshold: Some(threshold),
    };
    write_outcomes(&outcomes, model.embed_dim(), opts, &a.out)?;
    let flagged = outcomes
        .iter()
        .filter(|o| o.as_ref().is_ok_and(|r| r.score > threshold))
        .count();
    say(
        out,
        format!("flagged {flagged} of {} queries with score > {threshold}", outcomes.len()),
    );
    Ok(batch_status(&outcomes))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn cmd_bench_sphere(a: &BenchArgs, out: &mut dyn Write) -> Result<i32> {
    if a.grid.is_empty() {
        return Err(Error::OutOfRange("at least one --grid is required".into()));
    }
    let mut reports = Vec::new();
    for (i, &grid) in a.grid.iter().enumerate() {
        let cfg = BenchConfig {
            grid_per_axis: grid,
            num_queries: a.num_queries,
            seed: a.seed,
            epsilon: a.epsilon,
            curvature_c: a.curvature_c,
        };
        let bench = SphereBench::new(cfg)?;
        if i == 0 {
            if let Some(dir) = &a.emit_data {
                emit_sphere_data(&bench, dir)?;
            }
        }
        reports.extend(bench.run_all()?);
    }
    write_bench_summary(&reports, &a.out)?;
    let per_query = a.per_query.clone().unwrap_or_else(|| sibling(&a.out, ".queries.csv"));
    write_bench_queries(&reports, &per_query)?;
    say(out, format!("{:<18} {:>6} {:>11} {:>11} {:>10}", "scheme", "size", "mean_error", "max_error", "violations"));
    for r in &reports {
        say(
            out,
            format!(
                "{:<18} {:>6} {:>11.3e} {:>11.3e} {:>10}",
                r.scheme.label(),
                r.training_size,
                r.mean_error,
                r.max_error,
                r.bound_violations
            ),
        );
    }
    let failures: usize = reports.iter().map(|r| r.failures).sum();
    Ok(if failures == 0 { EXIT_OK } else { EXIT_NUMERICAL })
}

fn emit_sphere_data(bench: &SphereBench, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let d = &bench.data;
    write_table(&["phi", "theta"], &d.training_params, dir.join("points.csv"))?;
    write_table(&["y1", "y2", "y3"], &d.images, dir.join("images.csv"))?;
    write_table(&["phi", "theta"], &d.query_params, dir.join("queries.csv"))?;
    write_table(&["y1", "y2", "y3"], &d.query_images, dir.join("truth.csv"))
}

pub fn cmd_compare(a: &CompareArgs, out: &mut dyn Write) -> Result<i32> {
    let model = load_model(&a.model)?;
    let f: Vec<f64> = read_points_table(&a.function, 1)?.into_iter().map(|r| r[0]).collect();
    let table = read_table(&a.queries)?;
    let n = model.ambient_dim();
    let (queries, truth): (Vec<Vec<f64>>, Option<Vec<f64>>) = match table.first().map(Vec::len) {
        None => (Vec::new(), None),
        Some(w) if w == n => (table, None),
        Some(w) if w == n + 1 => {
            let truth = table.iter().map(|r| r[n]).collect();
            (table.into_iter().map(|mut r| {
                r.truncate(n);
                r
            }).collect(), Some(truth))
        }
        Some(w) => {
            return Err(Error::DimensionMismatch {
                row: 1,
                expected: n,
                found: w,
            })
        }
    };
    let cfg = CompareConfig {
        sizes: a.sizes.clone(),
        err: a.err,
        seed: a.seed,
        scheme: a.scheme,
    };
    let cmp = run_comparison(&model, &f, &queries, truth.as_deref(), &cfg)?;

    let mut csv = String::from("method,training_size,query_id,value,truth,abs_error\n");
    for r in &cmp.rows {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.method.label(),
            r.training_size,
            r.query_id,
            opt(r.value),
            opt(r.truth),
            opt(r.abs_error())
        ));
    }
    std::fs::write(&a.out, csv).map_err(|e| Error::io(&a.out, e))?;

    say(out, format!("seed={} err={}", a.seed, a.err));
    for size in cmp.sizes() {
        for m in Method::ALL {
            let mean = cmp.mean_error(m, size).map_or("n/a".to_string(), |e| format!("{e:.3e}"));
            say(out, format!("{:<18} {:>6} mean_abs_error={mean}", m.label(), size));
        }
    }
    for fl in &cmp.failures {
        say(out, format!("{} failed at size {}: {}", fl.method, fl.training_size, fl.error));
    }
    Ok(match cmp.failures.first() {
        None => EXIT_OK,
        Some(fl) => exit_code(&fl.error),
    })
}
