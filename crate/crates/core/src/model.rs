//! Problem instances: tasks, utilization matrices, platforms and power.
//!
//! A task set is reduced to an `n x m` [`UtilizationMatrix`] where row `i`
//! holds the utilization of task `i` on each of the `m` processors. Everything
//! downstream (costs, heuristics, swarms) works on the matrix alone.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// A periodic task with implicit deadline and per-processor WCETs.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    wcet: Vec<f64>,
    period: f64,
    deadline: f64,
}

impl TaskSpec {
    pub fn new(wcet: Vec<f64>, period: f64, deadline: f64) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::Validation(format!(
                "period must be positive, got {period}"
            )));
        }
        if deadline != period {
            return Err(Error::Validation(format!(
                "only implicit deadlines are supported (deadline {deadline} != period {period})"
            )));
        }
        if let Some(c) = wcet.iter().find(|c| !(**c > 0.0) || !c.is_finite()) {
            return Err(Error::Validation(format!(
                "wcet values must be positive, got {c}"
            )));
        }
        Ok(Self {
            wcet,
            period,
            deadline,
        })
    }

    /// Task whose deadline equals its period.
    pub fn implicit(wcet: Vec<f64>, period: f64) -> Result<Self> {
        Self::new(wcet, period, period)
    }

    pub fn wcet(&self) -> &[f64] {
        &self.wcet
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn deadline(&self) -> f64 {
        self.deadline
    }
}

/// Row-major `n x m` matrix of task utilizations.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilizationMatrix {
    n: usize,
    m: usize,
    data: Vec<f64>,
    allow_overweight: bool,
}

impl UtilizationMatrix {
    /// Build a matrix from rows. Entries must lie in `(0, 1]`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(rows, false)
    }

    /// Like [`from_rows`](Self::from_rows) but accepts entries above 1. Such
    /// entries mark placements that can never be feasible.
    pub fn from_rows_allow_overweight(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(rows, true)
    }

    fn build(rows: Vec<Vec<f64>>, allow_overweight: bool) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Dimension("matrix needs at least one task".into()));
        }
        let m = rows[0].len();
        if m == 0 {
            return Err(Error::Dimension(
                "matrix needs at least one processor".into(),
            ));
        }
        let mut data = Vec::with_capacity(n * m);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != m {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            for (j, &u) in row.iter().enumerate() {
                if !(u > 0.0) || !u.is_finite() {
                    return Err(Error::Validation(format!(
                        "u[{i}][{j}] = {u} is not a positive finite utilization"
                    )));
                }
                if u > 1.0 && !allow_overweight {
                    return Err(Error::Validation(format!(
                        "u[{i}][{j}] = {u} exceeds 1 (load with allow-overweight to accept it)"
                    )));
                }
            }
            data.extend(row);
        }
        Ok(Self {
            n,
            m,
            data,
            allow_overweight,
        })
    }

    pub fn tasks(&self) -> usize {
        self.n
    }

    pub fn processors(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, task: usize, processor: usize) -> f64 {
        self.data[task * self.m + processor]
    }

    #[inline]
    pub fn row(&self, task: usize) -> &[f64] {
        &self.data[task * self.m..(task + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.m)
    }

    pub fn allows_overweight(&self) -> bool {
        self.allow_overweight
    }

    /// Whether task `i` can ever be placed on processor `j`.
    #[inline]
    pub fn admissible(&self, task: usize, processor: usize) -> bool {
        self.get(task, processor) <= 1.0
    }

    /// Size of the assignment space, `m^n`, as a float to avoid overflow.
    pub fn search_space(&self) -> f64 {
        (self.m as f64).powi(self.n as i32)
    }

    /// Serialize in the matrix CSV format: `n,m` then one row per task.
    ///
    /// Values use the shortest decimal representation that parses back to the
    /// same `f64`, so a write/read cycle is bit-exact.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{},{}", self.n, self.m).unwrap();
        for row in self.rows() {
            let mut first = true;
            for u in row {
                if !first {
                    out.push(',');
                }
                first = false;
                write!(out, "{u:?}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parse the matrix CSV format. `origin` only labels error messages.
    pub fn parse_csv(text: &str, origin: &Path, allow_overweight: bool) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty file, expected `n,m` header".into()))?;
        let dims: Vec<&str> = header.split(',').map(str::trim).collect();
        if dims.len() != 2 {
            return Err(parse_err(
                hline,
                format!("expected `n,m` header, got `{header}`"),
            ));
        }
        let parse_dim = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| parse_err(hline, format!("bad dimension `{s}`: {e}")))
        };
        let (n, m) = (parse_dim(dims[0])?, parse_dim(dims[1])?);

        let mut rows = Vec::with_capacity(n);
        for (lineno, line) in lines {
            let row = line
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| parse_err(lineno, format!("bad utilization `{s}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != m {
                return Err(parse_err(
                    lineno,
                    format!("expected {m} values, found {}", row.len()),
                ));
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(parse_err(
                hline,
                format!("header declares {n} tasks but {} rows follow", rows.len()),
            ));
        }
        Self::build(rows, allow_overweight)
    }

    pub fn read_csv(path: &Path, allow_overweight: bool) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, path, allow_overweight)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Utilization matrix `u[i][j] = wcet[i][j] / period[i]`.
pub fn utilization_from_tasks(tasks: &[TaskSpec], m: usize) -> Result<UtilizationMatrix> {
    let rows = tasks
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if t.wcet.len() != m {
                return Err(Error::Dimension(format!(
                    "task {i} has {} wcet entries, expected {m}",
                    t.wcet.len()
                )));
            }
            if !(t.period > 0.0) {
                return Err(Error::Validation(format!(
                    "task {i} has period {}",
                    t.period
                )));
            }
            Ok(t.wcet.iter().map(|c| c / t.period).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    UtilizationMatrix::build(rows, false)
}

/// Task weight classes used for random instance generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Light,
    Medium,
}

impl Profile {
    /// Closed utilization interval entries are drawn from.
    pub fn range(self) -> (f64, f64) {
        match self {
            Profile::Light => (0.05, 0.25),
            Profile::Medium => (0.25, 0.5),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Light => "light",
            Profile::Medium => "medium",
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "light" => Ok(Profile::Light),
            "medium" => Ok(Profile::Medium),
            _ => Err(Error::Validation(format!(
                "unknown profile `{s}` (light|medium)"
            ))),
        }
    }
}

/// Random matrix with entries drawn independently and uniformly from the
/// profile's closed interval.
pub fn generate_matrix(
    n: usize,
    m: usize,
    profile: Profile,
    seed: u64,
) -> Result<UtilizationMatrix> {
    if n == 0 || m == 0 {
        return Err(Error::Validation(format!(
            "need n, m >= 1 (got n={n}, m={m})"
        )));
    }
    let (lo, hi) = profile.range();
    let mut rng = rng::generator(seed);
    let data = (0..n * m).map(|_| rng.gen_range(lo..=hi)).collect();
    Ok(UtilizationMatrix {
        n,
        m,
        data,
        allow_overweight: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DvfsMode {
    /// Each core runs at its own speed.
    PerCore,
    /// All cores share one clock.
    FullChip,
}

impl DvfsMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DvfsMode::PerCore => "percore",
            DvfsMode::FullChip => "fullchip",
        }
    }
}

impl FromStr for DvfsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "percore" => Ok(DvfsMode::PerCore),
            "fullchip" => Ok(DvfsMode::FullChip),
            _ => Err(Error::Validation(format!(
                "unknown dvfs mode `{s}` (percore|fullchip)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpeedLevels {
    /// Ideal DVFS: any speed in `(0, 1]`.
    Continuous,
    /// Strictly increasing speeds ending at 1.
    Discrete(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlatformSpec {
    m: usize,
    dvfs_mode: DvfsMode,
    speed_levels: SpeedLevels,
}

impl PlatformSpec {
    pub fn new(m: usize, dvfs_mode: DvfsMode, speed_levels: SpeedLevels) -> Result<Self> {
        if m == 0 {
            return Err(Error::Validation(
                "platform needs at least one processor".into(),
            ));
        }
        if let SpeedLevels::Discrete(levels) = &speed_levels {
            if levels.is_empty() {
                return Err(Error::Validation("discrete speed list is empty".into()));
            }
            if levels.iter().any(|&s| !(s > 0.0 && s <= 1.0)) {
                return Err(Error::Validation("speed levels must lie in (0, 1]".into()));
            }
            if levels.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Validation(
                    "speed levels must be strictly increasing".into(),
                ));
            }
            if *levels.last().unwrap() != 1.0 {
                return Err(Error::Validation("highest speed level must be 1".into()));
            }
        }
        Ok(Self {
            m,
            dvfs_mode,
            speed_levels,
        })
    }

    pub fn processors(&self) -> usize {
        self.m
    }

    pub fn dvfs_mode(&self) -> DvfsMode {
        self.dvfs_mode
    }

    pub fn speed_levels(&self) -> &SpeedLevels {
        &self.speed_levels
    }

    /// Speed actually used when `desired` is requested: unchanged on an ideal
    /// platform, otherwise the lowest supported level at or above it.
    pub fn quantize_speed(&self, desired: f64) -> Result<f64> {
        if desired > 1.0 {
            return Err(Error::InfeasibleSpeed(desired));
        }
        if !(desired > 0.0) {
            return Err(Error::Validation(format!(
                "desired speed must be positive, got {desired}"
            )));
        }
        match &self.speed_levels {
            SpeedLevels::Continuous => Ok(desired),
            SpeedLevels::Discrete(levels) => Ok(*levels
                .iter()
                .find(|&&s| s >= desired)
                .expect("last level is 1")),
        }
    }
}

/// CMOS power model constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerParams {
    pub c_eff: f64,
    pub k: f64,
    pub v_th: f64,
    pub i_leak: f64,
}

impl Default for PowerParams {
    // Illustrative values only.
    fn default() -> Self {
        Self {
            c_eff: 1.0,
            k: 1.0,
            v_th: 0.3,
            i_leak: 0.01,
        }
    }
}

impl PowerParams {
    pub fn new(c_eff: f64, k: f64, v_th: f64, i_leak: f64) -> Result<Self> {
        for (name, v) in [
            ("c_eff", c_eff),
            ("k", k),
            ("v_th", v_th),
            ("i_leak", i_leak),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Validation(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self {
            c_eff,
            k,
            v_th,
            i_leak,
        })
    }

    /// Switching power `C_eff * V_dd^2 * f`.
    pub fn dynamic_power(&self, v_dd: f64, f: f64) -> Result<f64> {
        if !(v_dd > 0.0) {
            return Err(Error::Validation(format!(
                "supply voltage must be positive, got {v_dd}"
            )));
        }
        if !(f >= 0.0) {
            return Err(Error::Validation(format!(
                "frequency must be nonnegative, got {f}"
            )));
        }
        Ok(self.c_eff * v_dd * v_dd * f)
    }

    /// Clock frequency `k * (V_dd - V_th)^2 / V_dd` sustained at a supply voltage.
    pub fn frequency_from_voltage(&self, v_dd: f64) -> Result<f64> {
        if !(v_dd > self.v_th) {
            return Err(Error::Domain(format!(
                "supply voltage {v_dd} must exceed the threshold voltage {}",
                self.v_th
            )));
        }
        let overdrive = v_dd - self.v_th;
        Ok(self.k * overdrive * overdrive / v_dd)
    }

    /// Leakage power `I_leak * V_dd`.
    pub fn leakage_power(&self, v_dd: f64) -> Result<f64> {
        if !(v_dd > 0.0) {
            return Err(Error::Validation(format!(
                "supply voltage must be positive, got {v_dd}"
            )));
        }
        Ok(self.i_leak * v_dd)
    }
}

/// Normalized power at speed `f`: `f^3`.
pub fn simplified_power(f: f64) -> f64 {
    f * f * f
}

/// Normalized energy per unit of work at speed `f`: `f^2`.
pub fn simplified_energy(f: f64) -> f64 {
    f * f
}
