//! Command-line interface.
//!
//! Exit codes: 0 every property holds (or the specification is admissible),
//! 1 some property is violated (or two properties conflict), 2 inconclusive,
//! 3 usage, input or solver errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::{distinct_labels, load_csv, CsvOptions, Dataset};
use crate::encoder::encode_dataset;
use crate::property::{self, BuiltinOptions, ParamMap, Property, Specification};
use crate::report::series_to_csv;
use crate::solver::{self, SolverConfig};
use crate::synthetic;
use crate::verifier::{self, ConsistencyOptions, VerifyOptions};

pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dsverify", version, about = "Verify datasets against first-order properties with an SMT solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Print progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a dataset against every property.
    Verify(VerifyArgs),
    /// Print the formula encoding a dataset.
    Encode(EncodeArgs),
    /// Check that the properties can hold together.
    CheckSpec(CheckSpecArgs),
    /// Verify growing prefixes of a dataset and emit a timing CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    #[value(alias = "structured")]
    Json,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// CSV file; the last column is the expected output.
    #[arg(short, long)]
    pub dataset: Option<PathBuf>,

    /// Skip the first line of the CSV.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Args)]
pub struct PropertyArgs {
    /// Directory of `.smt2` property files.
    #[arg(short, long)]
    pub properties: Option<PathBuf>,

    /// Built-in property to include (repeatable): min-cardinality,
    /// minmax-normalized, coverage-array, coverage-expanded, balanced,
    /// no-contradictions.
    #[arg(short, long = "builtin", value_name = "NAME")]
    pub builtins: Vec<String>,

    /// Parameter value `key=value` (repeatable); overrides the params file.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,

    /// File of `key=value` lines.
    #[arg(long)]
    pub params_file: Option<PathBuf>,

    /// Largest feature count for coverage-expanded.
    #[arg(long, default_value_t = property::DEFAULT_EXPANSION_LIMIT)]
    pub expansion_limit: usize,

    /// Grid spacing of the coverage-expanded oracle.
    #[arg(long, default_value_t = property::DEFAULT_GRID_STEP)]
    pub grid_step: f64,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Solver executable (default: $DSVERIFY_SOLVER, then `z3`).
    #[arg(long)]
    pub solver: Option<PathBuf>,

    /// Solver argument (repeatable); replaces the defaults.
    #[arg(long = "solver-arg", value_name = "ARG", allow_hyphen_values = true)]
    pub solver_args: Vec<String>,

    /// Per-check wall-clock timeout in seconds.
    #[arg(long, default_value_t = solver::DEFAULT_TIMEOUT.as_secs_f64())]
    pub timeout: f64,

    /// Solver processes to run at once.
    #[arg(long)]
    pub parallelism: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub props: PropertyArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    #[arg(short, long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Include the solver's model for properties that hold.
    #[arg(long)]
    pub model: bool,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub data: DatasetArgs,

    /// Write the script here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckSpecArgs {
    #[command(flatten)]
    pub props: PropertyArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    /// Feature count used to compile built-ins that depend on it.
    #[arg(long)]
    pub features: Option<usize>,

    /// Also check the conjunction of all properties.
    #[arg(long)]
    pub full: bool,

    #[arg(short, long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub props: PropertyArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    /// Prefix increment.
    #[arg(long, default_value_t = 10)]
    pub step: usize,

    /// Use a generated dataset of this many rows instead of --dataset.
    #[arg(long, value_name = "ROWS", conflicts_with = "dataset")]
    pub synthetic: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Write the CSV here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let verbose = cli.verbose;
    match cli.command {
        Command::Verify(args) => cmd_verify(args, verbose),
        Command::Encode(args) => cmd_encode(args),
        Command::CheckSpec(args) => cmd_check_spec(args, verbose),
        Command::Bench(args) => cmd_bench(args, verbose),
    }
}

fn read_dataset(args: &DatasetArgs) -> Result<Dataset> {
    let path = args.dataset.as_ref().context("--dataset is required")?;
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    load_csv(
        file,
        CsvOptions {
            has_header: args.header,
        },
    )
    .with_context(|| format!("cannot load {}", path.display()))
}

fn read_params(args: &PropertyArgs) -> Result<ParamMap> {
    let mut params = match &args.params_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            property::parse_params(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => ParamMap::new(),
    };
    for assignment in &args.params {
        let (k, v) = property::parse_assignment(assignment)?;
        params.insert(k, v);
    }
    Ok(params)
}

/// Built-ins first, in flag order, then property files.
fn build_spec(args: &PropertyArgs, n: usize) -> Result<Specification> {
    let params = read_params(args)?;
    let opts = BuiltinOptions {
        expansion_limit: args.expansion_limit,
        grid_step: args.grid_step,
    };
    let mut props: Vec<Property> = Vec::new();
    for name in &args.builtins {
        props.push(property::builtin_by_name(name, &params, n, opts).with_context(|| format!("built-in `{name}`"))?);
    }
    if let Some(dir) = &args.properties {
        if !dir.is_dir() {
            bail!("properties directory {} is not readable", dir.display());
        }
        props.extend(property::load_directory(dir, &params)?);
    }
    if props.is_empty() {
        bail!("no properties: pass --properties DIR or --builtin NAME");
    }
    Ok(Specification::new(props)?)
}

fn solver_config(args: &SolverArgs, models: bool) -> Result<SolverConfig> {
    let mut cfg = match &args.solver {
        Some(path) => SolverConfig::for_program(path),
        None => SolverConfig::default(),
    };
    if !args.solver_args.is_empty() {
        cfg.args = args.solver_args.clone();
    }
    if args.timeout.is_nan() || args.timeout <= 0.0 || args.timeout.is_infinite() {
        bail!("--timeout must be a positive number of seconds");
    }
    cfg.timeout = Duration::from_secs_f64(args.timeout);
    cfg.produce_models = models;
    solver::probe(&cfg).with_context(|| format!("solver `{}`", cfg.program.display()))?;
    Ok(cfg)
}

fn verify_options(args: &SolverArgs) -> VerifyOptions {
    let mut opts = VerifyOptions::default();
    if let Some(p) = args.parallelism {
        opts.parallelism = p.max(1);
    }
    opts
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn cmd_verify(args: VerifyArgs, verbose: bool) -> Result<i32> {
    let ds = read_dataset(&args.data)?;
    let spec = build_spec(&args.props, ds.n())?;
    let cfg = solver_config(&args.solver, args.model)?;
    if verbose {
        eprintln!("verifying {} rows x {} features against {} properties", ds.m(), ds.n(), spec.len());
    }
    let mut report = verifier::verify_with(&ds, &spec, &cfg, verify_options(&args.solver));
    if let Some(path) = &args.data.dataset {
        report.dataset = path.display().to_string();
    }
    let text = match args.format {
        Format::Text => report.to_text(),
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json() + "\n",
    };
    emit(&text, None)?;
    Ok(report.exit_code())
}

fn cmd_encode(args: EncodeArgs) -> Result<i32> {
    let ds = read_dataset(&args.data)?;
    let script = encode_dataset(&ds, &distinct_labels(&ds));
    emit(&script.render(), args.output.as_deref())?;
    Ok(0)
}

/// Built-ins whose encoding depends on the feature count.
const SHAPE_DEPENDENT: &[&str] = &["coverage-array", "coverage-expanded", "no-contradictions"];

fn cmd_check_spec(args: CheckSpecArgs, verbose: bool) -> Result<i32> {
    let needs_n = args.props.builtins.iter().any(|b| SHAPE_DEPENDENT.contains(&b.as_str()));
    let n = match args.features {
        Some(0) => bail!("--features must be at least 1"),
        Some(n) => n,
        None if needs_n => bail!("--features is required for built-ins that depend on the feature count"),
        None => 1,
    };
    let spec = build_spec(&args.props, n)?;
    let cfg = solver_config(&args.solver, false)?;
    if verbose {
        eprintln!("checking {} properties pairwise", spec.len());
    }
    let opts = ConsistencyOptions {
        parallelism: verify_options(&args.solver).parallelism,
        full: args.full,
    };
    let matrix = verifier::check_consistency(&spec, n, &cfg, opts);
    let text = match args.format {
        Format::Json => matrix.to_json() + "\n",
        _ => matrix.to_text(),
    };
    emit(&text, None)?;
    Ok(matrix.admissibility().exit_code())
}

fn cmd_bench(args: BenchArgs, verbose: bool) -> Result<i32> {
    let ds = match args.synthetic {
        Some(rows) if rows > 0 => synthetic::generate(rows, args.seed),
        Some(_) => bail!("--synthetic needs at least one row"),
        None => read_dataset(&args.data)?,
    };
    let spec = build_spec(&args.props, ds.n())?;
    let cfg = solver_config(&args.solver, false)?;
    if verbose {
        eprintln!("benchmarking {} rows in steps of {}", ds.m(), args.step);
    }
    let series = verifier::incremental_verify(&ds, &spec, &cfg, args.step, verify_options(&args.solver))?;
    emit(&series_to_csv(&series), args.output.as_deref())?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_verify_flags() {
        let cli = Cli::try_parse_from([
            "dsverify", "verify", "-d", "data.csv", "--builtin", "balanced", "--param", "beta=2",
            "--timeout", "5", "--format", "structured",
        ])
        .unwrap();
        let Command::Verify(args) = cli.command else { panic!() };
        assert_eq!(args.format, Format::Json);
        assert_eq!(args.props.builtins, vec!["balanced"]);
        assert_eq!(args.solver.timeout, 5.0);
    }

    #[test]
    fn usage_errors_exit_3() {
        assert_eq!(run(["dsverify", "verify", "--bogus"]), EXIT_ERROR);
        assert_eq!(run(["dsverify"]), EXIT_ERROR);
        assert_eq!(run(["dsverify", "encode", "-d", "/nonexistent.csv"]), EXIT_ERROR);
    }

    #[test]
    fn bench_rejects_dataset_with_synthetic() {
        assert!(Cli::try_parse_from(["dsverify", "bench", "-d", "x.csv", "--synthetic", "5"]).is_err());
    }
}
