//! Experiment sweeps over generated instance families.
//!
//! For every `(n, m, trial)` one matrix is generated and every selected
//! variant runs on it. Seeds are derived from the master seed and the
//! configuration key, and each variant gets its own stream derived from the
//! trial seed and the variant tag. Adding or removing a variant never changes
//! the results of the others.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{CostKind, CostSpec, PenaltyMode};
use crate::error::{Error, Result};
use crate::heuristics;
use crate::model::{generate_matrix, DvfsMode, Profile, UtilizationMatrix};
use crate::oracle;
use crate::pso::{self, PsoVariant, RunRecord};
use crate::rng;

pub const SPEC_VERSION: u32 = 1;

pub const RESULTS_HEADER: [&str; 11] = [
    "n",
    "m",
    "trial",
    "variant",
    "cost_kind",
    "dvfs_mode",
    "final_cost",
    "feasible",
    "energy_per_core",
    "energy_full_chip",
    "wall_ms",
];

pub const TRACE_HEADER: [&str; 6] = ["n", "m", "trial", "variant", "iteration", "gbest_cost"];

pub const SUMMARY_HEADER: [&str; 11] = [
    "n",
    "m",
    "variant",
    "cost_kind",
    "dvfs_mode",
    "trials",
    "mean_cost",
    "std_cost",
    "min_cost",
    "max_cost",
    "feasible_rate",
];

/// Partitioning method. Declaration order is the output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "minmin")]
    MinMin,
    #[serde(rename = "maxmin")]
    MaxMin,
    #[serde(rename = "pso-fi")]
    PsoFi,
    #[serde(rename = "pso-vi")]
    PsoVi,
    #[serde(rename = "pso-re")]
    PsoRe,
    #[serde(rename = "pso-m")]
    PsoM,
    #[serde(rename = "pso-mm")]
    PsoMm,
    #[serde(rename = "oracle")]
    Oracle,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::MinMin,
        Variant::MaxMin,
        Variant::PsoFi,
        Variant::PsoVi,
        Variant::PsoRe,
        Variant::PsoM,
        Variant::PsoMm,
        Variant::Oracle,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Variant::MinMin => "minmin",
            Variant::MaxMin => "maxmin",
            Variant::Oracle => "oracle",
            other => other.pso().expect("swarm variant").tag(),
        }
    }

    pub fn pso(self) -> Option<PsoVariant> {
        match self {
            Variant::PsoFi => Some(PsoVariant::FixedInertia),
            Variant::PsoVi => Some(PsoVariant::VariedInertia),
            Variant::PsoRe => Some(PsoVariant::ReExcitedInertia),
            Variant::PsoM => Some(PsoVariant::MinMinSeeded),
            Variant::PsoMm => Some(PsoVariant::MinMaxSeeded),
            _ => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.tag() == s)
            .ok_or_else(|| Error::Validation(format!("unknown variant `{s}`")))
    }
}

/// Settings shared by single runs and sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub cost: CostSpec,
    pub swarm_size: usize,
    pub iterations: usize,
    pub oracle_limit: u64,
    /// See [`SwarmConfig::per_component_random`](crate::pso::SwarmConfig).
    pub per_component_random: bool,
}

/// Run one variant on one matrix with the given stream seed.
pub fn run_variant(
    matrix: &UtilizationMatrix,
    variant: Variant,
    settings: &RunSettings,
    seed: u64,
) -> Result<RunRecord> {
    let cost = settings.cost;
    match variant {
        Variant::MinMin => {
            RunRecord::for_assignment(matrix, cost, heuristics::min_min(matrix).assignment, 1)
        }
        Variant::MaxMin => {
            RunRecord::for_assignment(matrix, cost, heuristics::max_min(matrix).assignment, 1)
        }
        Variant::Oracle => {
            let (a, _) = oracle::exhaustive_best_with_limit(matrix, cost, settings.oracle_limit)?;
            let space = matrix.search_space() as usize;
            RunRecord::for_assignment(matrix, cost, a, space)
        }
        swarm => {
            let preset = swarm.pso().expect("swarm variant");
            let config = pso::SwarmConfig {
                per_component_random: settings.per_component_random,
                ..preset.config(matrix, settings.swarm_size, settings.iterations, seed)
            };
            pso::run_pso(matrix, cost, &config)
        }
    }
}

fn default_swarm_size() -> usize {
    100
}

fn default_n_values() -> Vec<usize> {
    vec![20, 40, 80]
}

fn default_true() -> bool {
    true
}

fn default_oracle_limit() -> u64 {
    oracle::DEFAULT_LIMIT
}

/// Experiment description, loaded from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub spec_version: u32,
    pub profile: Profile,
    #[serde(default = "default_n_values")]
    pub n_values: Vec<usize>,
    pub m_values: Vec<usize>,
    pub trials: usize,
    pub iteration_budget: usize,
    #[serde(default = "default_swarm_size")]
    pub swarm_size: usize,
    pub dvfs_mode: DvfsMode,
    /// Defaults to the objective matched to `dvfs_mode`.
    #[serde(default)]
    pub cost_kind: Option<CostKind>,
    /// Needed to pair a DVFS mode with the other objective.
    #[serde(default)]
    pub override_cost_rule: bool,
    #[serde(default)]
    pub penalty_mode: PenaltyMode,
    pub variants: Vec<Variant>,
    pub master_seed: u64,
    #[serde(default = "default_oracle_limit")]
    pub oracle_limit: u64,
    /// Per-component `r1`, `r2` draws in the swarm update.
    #[serde(default = "default_true")]
    pub per_component_random: bool,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self =
            toml::from_str(text).map_err(|e| Error::Config(format!("experiment spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    pub fn cost_kind(&self) -> CostKind {
        self.cost_kind
            .unwrap_or_else(|| CostKind::for_dvfs(self.dvfs_mode))
    }

    pub fn cost_spec(&self) -> CostSpec {
        CostSpec::new(self.cost_kind()).with_penalty(self.penalty_mode)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.spec_version != SPEC_VERSION {
            return fail(format!(
                "unsupported spec_version {} (expected {SPEC_VERSION})",
                self.spec_version
            ));
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.iteration_budget == 0 || self.swarm_size == 0 {
            return fail("iteration_budget and swarm_size must be at least 1".into());
        }
        if self.n_values.is_empty() || self.m_values.is_empty() {
            return fail("n_values and m_values must be nonempty".into());
        }
        if self.n_values.contains(&0) || self.m_values.contains(&0) {
            return fail("task and processor counts must be at least 1".into());
        }
        if self.variants.is_empty() {
            return fail("no variants selected".into());
        }
        let mut sorted = self.variants.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return fail("variants are listed more than once".into());
        }
        if let Some(kind) = self.cost_kind {
            let rule = CostKind::for_dvfs(self.dvfs_mode);
            if kind != rule && !self.override_cost_rule {
                return fail(format!(
                    "{} platforms use the {} cost; set override_cost_rule = true to use {}",
                    self.dvfs_mode.as_str(),
                    rule.as_str(),
                    kind.as_str()
                ));
            }
        }
        if self.variants.contains(&Variant::Oracle) {
            for &n in &self.n_values {
                for &m in &self.m_values {
                    let size = (m as f64).powi(n as i32);
                    if size > self.oracle_limit as f64 {
                        return Err(Error::EnumerationLimit {
                            size,
                            limit: self.oracle_limit,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn settings(&self) -> RunSettings {
        RunSettings {
            cost: self.cost_spec(),
            swarm_size: self.swarm_size,
            iterations: self.iteration_budget,
            oracle_limit: self.oracle_limit,
            per_component_random: self.per_component_random,
        }
    }
}

/// Seed of trial `trial` of configuration `(n, m)`.
pub fn trial_seed(master: u64, n: usize, m: usize, trial: usize) -> u64 {
    rng::combine(master, &[n as u64, m as u64, trial as u64])
}

pub fn variant_seed(trial_seed: u64, variant: Variant) -> u64 {
    rng::derive(trial_seed, variant.tag())
}

pub fn trial_matrix(
    profile: Profile,
    n: usize,
    m: usize,
    trial_seed: u64,
) -> Result<UtilizationMatrix> {
    generate_matrix(n, m, profile, rng::derive(trial_seed, rng::stream::MATRIX))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub n: usize,
    pub m: usize,
    pub trial: usize,
    pub variant: Variant,
    pub cost_kind: CostKind,
    pub dvfs_mode: DvfsMode,
    pub final_cost: f64,
    pub feasible: bool,
    pub energy_per_core: Option<f64>,
    pub energy_full_chip: Option<f64>,
    pub wall_ms: f64,
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub n: usize,
    pub m: usize,
    pub variant: Variant,
    pub cost_kind: CostKind,
    pub dvfs_mode: DvfsMode,
    pub trials: usize,
    pub mean_cost: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub std_cost: f64,
    pub min_cost: f64,
    pub max_cost: f64,
    pub feasible_rate: f64,
}

/// Per-run rows in `(n, m, trial, variant)` order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<RunRow>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(format!("{other:?}")),
        },
    }
}

fn write_table(path: &Path, header: &[&str], records: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in records {
        w.write_record(&r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn table_string(header: &[&str], records: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in records {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub(crate) fn stats(values: &[f64]) -> (f64, f64, f64, f64) {
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0)).sqrt()
    } else {
        0.0
    };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (mean, std, min, max)
}

impl ResultTable {
    fn result_records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    r.m.to_string(),
                    r.trial.to_string(),
                    r.variant.tag().to_string(),
                    r.cost_kind.as_str().to_string(),
                    r.dvfs_mode.as_str().to_string(),
                    r.final_cost.to_string(),
                    r.feasible.to_string(),
                    opt(r.energy_per_core),
                    opt(r.energy_full_chip),
                    format!("{:.3}", r.wall_ms),
                ]
            })
            .collect()
    }

    fn trace_records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .flat_map(|r| {
                r.trace.iter().enumerate().map(move |(t, c)| {
                    vec![
                        r.n.to_string(),
                        r.m.to_string(),
                        r.trial.to_string(),
                        r.variant.tag().to_string(),
                        t.to_string(),
                        c.to_string(),
                    ]
                })
            })
            .collect()
    }

    fn summary_records(&self) -> Vec<Vec<String>> {
        self.aggregates()
            .into_iter()
            .map(|a| {
                vec![
                    a.n.to_string(),
                    a.m.to_string(),
                    a.variant.tag().to_string(),
                    a.cost_kind.as_str().to_string(),
                    a.dvfs_mode.as_str().to_string(),
                    a.trials.to_string(),
                    a.mean_cost.to_string(),
                    a.std_cost.to_string(),
                    a.min_cost.to_string(),
                    a.max_cost.to_string(),
                    a.feasible_rate.to_string(),
                ]
            })
            .collect()
    }

    pub fn results_csv(&self) -> String {
        table_string(&RESULTS_HEADER, self.result_records())
    }

    pub fn traces_csv(&self) -> String {
        table_string(&TRACE_HEADER, self.trace_records())
    }

    pub fn summary_csv(&self) -> String {
        table_string(&SUMMARY_HEADER, self.summary_records())
    }

    pub fn write_results(&self, path: &Path) -> Result<()> {
        write_table(path, &RESULTS_HEADER, self.result_records())
    }

    pub fn write_traces(&self, path: &Path) -> Result<()> {
        write_table(path, &TRACE_HEADER, self.trace_records())
    }

    pub fn write_summary(&self, path: &Path) -> Result<()> {
        write_table(path, &SUMMARY_HEADER, self.summary_records())
    }

    /// Final-cost statistics per `(n, m, variant)`.
    pub fn aggregates(&self) -> Vec<Aggregate> {
        let mut groups: BTreeMap<(usize, usize, Variant), Vec<&RunRow>> = BTreeMap::new();
        for r in &self.rows {
            groups.entry((r.n, r.m, r.variant)).or_default().push(r);
        }
        groups
            .into_iter()
            .map(|((n, m, variant), rows)| {
                let costs: Vec<f64> = rows.iter().map(|r| r.final_cost).collect();
                let (mean_cost, std_cost, min_cost, max_cost) = stats(&costs);
                let feasible = rows.iter().filter(|r| r.feasible).count();
                Aggregate {
                    n,
                    m,
                    variant,
                    cost_kind: rows[0].cost_kind,
                    dvfs_mode: rows[0].dvfs_mode,
                    trials: rows.len(),
                    mean_cost,
                    std_cost,
                    min_cost,
                    max_cost,
                    feasible_rate: feasible as f64 / rows.len() as f64,
                }
            })
            .collect()
    }
}

/// Run every configuration of `spec`. `jobs` caps the worker count; `None`
/// uses all cores. Output order does not depend on scheduling.
pub fn run_experiment(spec: &ExperimentSpec, jobs: Option<usize>) -> Result<ResultTable> {
    spec.validate()?;
    let settings = spec.settings();
    let mut variants = spec.variants.clone();
    variants.sort();

    let units: Vec<(usize, usize, usize)> = spec
        .n_values
        .iter()
        .flat_map(|&n| {
            spec.m_values
                .iter()
                .flat_map(move |&m| (0..spec.trials).map(move |t| (n, m, t)))
        })
        .collect();

    let run_unit = |&(n, m, trial): &(usize, usize, usize)| -> Result<Vec<RunRow>> {
        let seed = trial_seed(spec.master_seed, n, m, trial);
        let matrix = trial_matrix(spec.profile, n, m, seed)?;
        variants
            .iter()
            .map(|&variant| {
                let start = Instant::now();
                let rec = run_variant(&matrix, variant, &settings, variant_seed(seed, variant))?;
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                Ok(RunRow {
                    n,
                    m,
                    trial,
                    variant,
                    cost_kind: settings.cost.kind,
                    dvfs_mode: spec.dvfs_mode,
                    final_cost: rec.best_cost,
                    feasible: rec.feasible,
                    energy_per_core: rec.energy_per_core,
                    energy_full_chip: rec.energy_full_chip,
                    wall_ms,
                    trace: rec.cost_trace,
                })
            })
            .collect()
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let chunks: Vec<Result<Vec<RunRow>>> =
        pool.install(|| units.par_iter().map(run_unit).collect());

    let mut rows = Vec::with_capacity(units.len() * variants.len());
    for chunk in chunks {
        rows.extend(chunk?);
    }
    Ok(ResultTable { rows })
}

/// X axis of a plot series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    N,
    M,
    Iteration,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(Axis::N),
            "m" => Ok(Axis::M),
            "iteration" => Ok(Axis::Iteration),
            _ => Err(Error::Validation(format!(
                "unknown axis `{s}` (n|m|iteration)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub variant: Variant,
    pub x: usize,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub axis: Axis,
    pub points: Vec<SeriesPoint>,
}

impl PlotSeries {
    pub fn x_label(&self) -> &'static str {
        match self.axis {
            Axis::N => "n",
            Axis::M => "m",
            Axis::Iteration => "iteration",
        }
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|p| {
                vec![
                    p.variant.tag().to_string(),
                    p.x.to_string(),
                    p.mean.to_string(),
                    p.std.to_string(),
                    p.count.to_string(),
                ]
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        table_string(
            &["variant", self.x_label(), "mean_cost", "std_cost", "count"],
            self.records(),
        )
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_table(
            path,
            &["variant", self.x_label(), "mean_cost", "std_cost", "count"],
            self.records(),
        )
    }
}

/// One series per variant: mean final cost against `n` or `m`, or the mean
/// global-best trace against the iteration index.
pub fn emit_plot_data(table: &ResultTable, axis: Axis) -> Result<PlotSeries> {
    if table.rows.is_empty() {
        return Err(Error::Validation("result table has no rows to plot".into()));
    }
    let mut groups: BTreeMap<(Variant, usize), Vec<f64>> = BTreeMap::new();
    for r in &table.rows {
        match axis {
            Axis::N => groups
                .entry((r.variant, r.n))
                .or_default()
                .push(r.final_cost),
            Axis::M => groups
                .entry((r.variant, r.m))
                .or_default()
                .push(r.final_cost),
            Axis::Iteration => {
                for (t, &c) in r.trace.iter().enumerate() {
                    groups.entry((r.variant, t)).or_default().push(c);
                }
            }
        }
    }
    let points = groups
        .into_iter()
        .map(|((variant, x), values)| {
            let (mean, std, _, _) = stats(&values);
            SeriesPoint {
                variant,
                x,
                mean,
                std,
                count: values.len(),
            }
        })
        .collect();
    Ok(PlotSeries { axis, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ExperimentSpec {
        ExperimentSpec {
            spec_version: 1,
            profile: Profile::Light,
            n_values: vec![6],
            m_values: vec![3],
            trials: 3,
            iteration_budget: 20,
            swarm_size: 20,
            dvfs_mode: DvfsMode::FullChip,
            cost_kind: None,
            override_cost_rule: false,
            penalty_mode: PenaltyMode::default(),
            variants: vec![Variant::PsoM, Variant::MinMin, Variant::Oracle],
            master_seed: 5,
            oracle_limit: oracle::DEFAULT_LIMIT,
            per_component_random: true,
        }
    }

    #[test]
    fn task_counts_default_to_the_standard_sweep() {
        let spec = ExperimentSpec::from_toml(
            "spec_version = 1\nprofile = \"medium\"\nm_values = [4]\ntrials = 1\niteration_budget = 5\ndvfs_mode = \"percore\"\nvariants = [\"minmin\"]\nmaster_seed = 0\n",
        )
        .unwrap();
        assert_eq!(spec.n_values, vec![20, 40, 80]);
    }

    #[test]
    fn variant_tags_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.tag().parse::<Variant>().unwrap(), v);
        }
        assert!("pso".parse::<Variant>().is_err());
    }

    #[test]
    fn toml_schema() {
        let text = r#"
            spec_version = 1
            profile = "medium"
            n_values = [20, 40]
            m_values = [8]
            trials = 30
            iteration_budget = 100
            dvfs_mode = "percore"
            variants = ["minmin", "pso-m"]
            master_seed = 42
        "#;
        let s = ExperimentSpec::from_toml(text).unwrap();
        assert_eq!(s.swarm_size, 100);
        assert_eq!(s.cost_kind(), CostKind::Energy);
        assert_eq!(s.penalty_mode, PenaltyMode::SumViolatingUtilizations);
        assert_eq!(ExperimentSpec::from_toml(&s.to_toml()).unwrap(), s);

        assert!(ExperimentSpec::from_toml(&format!("{text}\nbogus = 1")).is_err());
        let v2 = text.replace("spec_version = 1", "spec_version = 2");
        assert!(ExperimentSpec::from_toml(&v2).is_err());
    }

    #[test]
    fn validation_rules() {
        assert!(spec().validate().is_ok());
        let bad = [
            ExperimentSpec {
                trials: 0,
                ..spec()
            },
            ExperimentSpec {
                variants: vec![],
                ..spec()
            },
            ExperimentSpec {
                variants: vec![Variant::PsoM, Variant::PsoM],
                ..spec()
            },
            ExperimentSpec {
                n_values: vec![40],
                ..spec()
            },
            ExperimentSpec {
                cost_kind: Some(CostKind::Energy),
                ..spec()
            },
            ExperimentSpec {
                m_values: vec![],
                ..spec()
            },
        ];
        for s in bad {
            assert!(s.validate().is_err(), "{s:?}");
        }
        let overridden = ExperimentSpec {
            cost_kind: Some(CostKind::Energy),
            override_cost_rule: true,
            ..spec()
        };
        assert!(overridden.validate().is_ok());
        assert_eq!(overridden.cost_kind(), CostKind::Energy);
    }

    #[test]
    fn rows_are_ordered_and_fair() {
        let table = run_experiment(&spec(), Some(2)).unwrap();
        assert_eq!(table.rows.len(), 9);
        let order: Vec<_> = table.rows.iter().map(|r| (r.trial, r.variant)).collect();
        assert_eq!(order[0], (0, Variant::MinMin));
        assert_eq!(order[1], (0, Variant::PsoM));
        assert_eq!(order[2], (0, Variant::Oracle));
        for trial in table.rows.chunks(3) {
            let (mm, pm, or) = (&trial[0], &trial[1], &trial[2]);
            assert!(pm.final_cost <= mm.final_cost);
            assert!(pm.final_cost >= or.final_cost);
        }

        // Dropping a variant leaves the others untouched.
        let fewer = ExperimentSpec {
            variants: vec![Variant::PsoM],
            ..spec()
        };
        let t2 = run_experiment(&fewer, None).unwrap();
        let pm: Vec<_> = table
            .rows
            .iter()
            .filter(|r| r.variant == Variant::PsoM)
            .map(|r| r.final_cost)
            .collect();
        let pm2: Vec<_> = t2.rows.iter().map(|r| r.final_cost).collect();
        assert_eq!(pm, pm2);
    }

    #[test]
    fn aggregates_and_series() {
        let table = run_experiment(&spec(), None).unwrap();
        let aggs = table.aggregates();
        assert_eq!(aggs.len(), 3);
        for a in &aggs {
            let costs: Vec<f64> = table
                .rows
                .iter()
                .filter(|r| r.variant == a.variant)
                .map(|r| r.final_cost)
                .collect();
            assert_eq!(a.trials, 3);
            assert!((a.mean_cost - costs.iter().sum::<f64>() / 3.0).abs() < 1e-15);
            assert!(a.min_cost <= a.mean_cost && a.mean_cost <= a.max_cost);
        }

        let by_n = emit_plot_data(&table, Axis::N).unwrap();
        assert_eq!(by_n.points.len(), 3);
        assert!(by_n
            .to_csv()
            .starts_with("variant,n,mean_cost,std_cost,count\n"));
        let by_it = emit_plot_data(&table, Axis::Iteration).unwrap();
        let pso_points = by_it
            .points
            .iter()
            .filter(|p| p.variant == Variant::PsoM)
            .count();
        assert_eq!(pso_points, 20);
        assert!(emit_plot_data(&ResultTable::default(), Axis::N).is_err());
        assert!("iterations".parse::<Axis>().is_err());
    }

    #[test]
    fn stats_basics() {
        let (mean, std, min, max) = stats(&[1.0, 2.0, 3.0]);
        assert_eq!((mean, std, min, max), (2.0, 1.0, 1.0, 3.0));
        assert_eq!(stats(&[4.0]).1, 0.0);
    }
}
