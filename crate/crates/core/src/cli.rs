//! `hetpart` command-line interface.
//!
//! Exit codes: 0 success, 1 no feasible assignment found, 2 usage or
//! validation error, 3 I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::cost::{self, CostKind, CostSpec, PenaltyMode};
use crate::error::{Error, Result};
use crate::harness::{self, Axis, ExperimentSpec, ResultTable, RunRow, RunSettings, Variant};
use crate::model::{generate_matrix, DvfsMode, Profile, UtilizationMatrix};
use crate::oracle;
use crate::pso::RunRecord;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "hetpart",
    version,
    about = "Energy-aware partitioning of real-time tasks on heterogeneous DVFS multiprocessors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random utilization matrix.
    Gen(GenArgs),
    /// Run one partitioner on a matrix and print a JSON report.
    Run(RunArgs),
    /// Find the optimal assignment by exhaustive search.
    Oracle(OracleArgs),
    /// Run an experiment sweep described by a TOML file.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value = "light", value_parser = parse_with::<Profile>)]
    profile: Profile,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct MatrixArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Accept utilizations above 1 (such placements are never used).
    #[arg(long)]
    allow_overweight: bool,
}

#[derive(Debug, Args)]
struct ObjectiveArgs {
    /// Defaults to makespan on full-chip platforms and energy on per-core ones.
    #[arg(long, value_parser = parse_with::<CostKind>)]
    cost: Option<CostKind>,
    #[arg(long, default_value = "fullchip", value_parser = parse_with::<DvfsMode>)]
    dvfs: DvfsMode,
    #[arg(long, default_value = "sum-violating-utilizations", value_parser = parse_with::<PenaltyMode>)]
    penalty: PenaltyMode,
}

impl ObjectiveArgs {
    fn spec(&self) -> CostSpec {
        CostSpec::new(self.cost.unwrap_or_else(|| CostKind::for_dvfs(self.dvfs)))
            .with_penalty(self.penalty)
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    input: MatrixArgs,
    #[arg(long, value_parser = parse_with::<Variant>)]
    variant: Variant,
    #[command(flatten)]
    objective: ObjectiveArgs,
    #[arg(long, default_value_t = 100)]
    iters: usize,
    #[arg(long, default_value_t = 100)]
    swarm: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Share one `r1`, `r2` pair across all components of a particle.
    #[arg(long)]
    shared_draws: bool,
    /// Write the per-iteration global-best trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    input: MatrixArgs,
    #[command(flatten)]
    objective: ObjectiveArgs,
    #[arg(long, default_value_t = oracle::DEFAULT_LIMIT)]
    limit: u64,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    traces: Option<PathBuf>,
    /// Per-configuration aggregates.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Plot series grouped by `--group-by`.
    #[arg(long, requires = "group_by")]
    series: Option<PathBuf>,
    #[arg(long, requires = "series", value_parser = parse_with::<Axis>)]
    group_by: Option<Axis>,
    /// Maximum worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

fn parse_with<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// JSON report of `run` and `oracle`.
#[derive(Debug, Serialize)]
struct Report {
    variant: String,
    cost_kind: &'static str,
    dvfs_mode: &'static str,
    penalty_mode: PenaltyMode,
    n: usize,
    m: usize,
    final_cost: f64,
    feasible: bool,
    assignment: Vec<usize>,
    loads: Vec<f64>,
    energy_per_core: Option<f64>,
    energy_full_chip: Option<f64>,
    evaluations: usize,
}

impl Report {
    fn new(
        variant: &str,
        obj: &ObjectiveArgs,
        matrix: &UtilizationMatrix,
        rec: &RunRecord,
    ) -> Result<Self> {
        let spec = obj.spec();
        Ok(Self {
            variant: variant.to_string(),
            cost_kind: spec.kind.as_str(),
            dvfs_mode: obj.dvfs.as_str(),
            penalty_mode: spec.penalty_mode,
            n: matrix.tasks(),
            m: matrix.processors(),
            final_cost: rec.best_cost,
            feasible: rec.feasible,
            assignment: rec.best_assignment.to_one_based(),
            loads: cost::loads(matrix, &rec.best_assignment)?.0,
            energy_per_core: rec.energy_per_core,
            energy_full_chip: rec.energy_full_chip,
            evaluations: rec.evaluations,
        })
    }
}

fn print_json(out: &mut dyn Write, report: &Report) -> Result<()> {
    let text = serde_json::to_string(report).expect("report serializes");
    writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e))
}

fn gen(args: GenArgs, out: &mut dyn Write) -> Result<i32> {
    let matrix = generate_matrix(args.n, args.m, args.profile, args.seed)?;
    matrix.write_csv(&args.out)?;
    writeln!(
        out,
        "wrote {}x{} {} matrix to {}",
        args.n,
        args.m,
        args.profile.as_str(),
        args.out.display()
    )
    .map_err(|e| Error::io("<stdout>", e))?;
    Ok(EXIT_OK)
}

fn run(args: RunArgs, out: &mut dyn Write) -> Result<i32> {
    if args.variant == Variant::Oracle {
        return Err(Error::Validation(
            "use the `oracle` subcommand for exhaustive search".into(),
        ));
    }
    let matrix = UtilizationMatrix::read_csv(&args.input.matrix, args.input.allow_overweight)?;
    let settings = RunSettings {
        cost: args.objective.spec(),
        swarm_size: args.swarm,
        iterations: args.iters,
        oracle_limit: oracle::DEFAULT_LIMIT,
        per_component_random: !args.shared_draws,
    };
    let rec = harness::run_variant(&matrix, args.variant, &settings, args.seed)?;
    if let Some(path) = &args.trace {
        let table = ResultTable {
            rows: vec![RunRow {
                n: matrix.tasks(),
                m: matrix.processors(),
                trial: 0,
                variant: args.variant,
                cost_kind: settings.cost.kind,
                dvfs_mode: args.objective.dvfs,
                final_cost: rec.best_cost,
                feasible: rec.feasible,
                energy_per_core: rec.energy_per_core,
                energy_full_chip: rec.energy_full_chip,
                wall_ms: 0.0,
                trace: rec.cost_trace.clone(),
            }],
        };
        table.write_traces(path)?;
    }
    print_json(
        out,
        &Report::new(args.variant.tag(), &args.objective, &matrix, &rec)?,
    )?;
    Ok(if rec.feasible {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    })
}

fn run_oracle(args: OracleArgs, out: &mut dyn Write) -> Result<i32> {
    let matrix = UtilizationMatrix::read_csv(&args.input.matrix, args.input.allow_overweight)?;
    let spec = args.objective.spec();
    let (a, _) = oracle::exhaustive_best_with_limit(&matrix, spec, args.limit)?;
    let rec = RunRecord::for_assignment(&matrix, spec, a, matrix.search_space() as usize)?;
    print_json(out, &Report::new("oracle", &args.objective, &matrix, &rec)?)?;
    Ok(if rec.feasible {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    })
}

fn experiment(args: ExperimentArgs, out: &mut dyn Write) -> Result<i32> {
    if args.jobs == Some(0) {
        return Err(Error::Validation("--jobs must be at least 1".into()));
    }
    let spec = ExperimentSpec::load(&args.spec)?;
    let table = harness::run_experiment(&spec, args.jobs)?;
    table.write_results(&args.out)?;
    if let Some(path) = &args.traces {
        table.write_traces(path)?;
    }
    if let Some(path) = &args.summary {
        table.write_summary(path)?;
    }
    if let (Some(path), Some(axis)) = (&args.series, args.group_by) {
        harness::emit_plot_data(&table, axis)?.write(path)?;
    }
    writeln!(
        out,
        "wrote {} result rows to {}",
        table.rows.len(),
        args.out.display()
    )
    .map_err(|e| Error::io("<stdout>", e))?;
    Ok(EXIT_OK)
}

/// Parse `argv` (including the program name) and run the subcommand.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a, out),
        Command::Run(a) => run(a, out),
        Command::Oracle(a) => run_oracle(a, out),
        Command::Experiment(a) => experiment(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_io() {
                EXIT_IO
            } else {
                EXIT_USAGE
            }
        }
    }
}
