//! Assignment evaluation: loads, feasibility, penalties and objective costs.
//!
//! Processor indices are zero-based in memory. The one-based form used in
//! files and JSON output goes through [`Assignment::from_one_based`] and
//! [`Assignment::to_one_based`].

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DvfsMode, UtilizationMatrix};

/// Task-to-processor map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(Vec<usize>);

impl Assignment {
    /// Zero-based processor per task, checked against `m`.
    pub fn new(map: Vec<usize>, m: usize) -> Result<Self> {
        if let Some((i, &p)) = map.iter().enumerate().find(|(_, &p)| p >= m) {
            return Err(Error::Validation(format!(
                "task {i} mapped to processor index {p}, but only {m} processors exist"
            )));
        }
        Ok(Self(map))
    }

    pub fn from_one_based(map: &[usize], m: usize) -> Result<Self> {
        if let Some((i, &p)) = map.iter().enumerate().find(|(_, &p)| p == 0 || p > m) {
            return Err(Error::Validation(format!(
                "task {} mapped to processor {p}, expected 1..={m}",
                i + 1
            )));
        }
        Ok(Self(map.iter().map(|p| p - 1).collect()))
    }

    pub(crate) fn from_vec_unchecked(map: Vec<usize>) -> Self {
        Self(map)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|p| p + 1).collect()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks that the assignment fits `matrix`.
    pub fn validate_for(&self, matrix: &UtilizationMatrix) -> Result<()> {
        if self.0.len() != matrix.tasks() {
            return Err(Error::Dimension(format!(
                "assignment covers {} tasks, matrix has {}",
                self.0.len(),
                matrix.tasks()
            )));
        }
        let m = matrix.processors();
        if let Some((i, &p)) = self.0.iter().enumerate().find(|(_, &p)| p >= m) {
            return Err(Error::Validation(format!(
                "task {i} mapped to processor index {p}, but only {m} processors exist"
            )));
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for Assignment {
    type Output = usize;

    fn index(&self, task: usize) -> &usize {
        &self.0[task]
    }
}

/// Per-processor accumulated utilization `U_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadVector(pub Vec<f64>);

impl LoadVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// EDF schedulability on every processor: `U_j <= 1`, compared exactly.
    pub fn is_feasible(&self) -> bool {
        self.0.iter().all(|&u| u <= 1.0)
    }

    fn first_violation(&self) -> Option<(usize, f64)> {
        self.0.iter().copied().enumerate().find(|&(_, u)| u > 1.0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    /// `max_j U_j + penalty`
    #[default]
    Makespan,
    /// `sum_j U_j^2 / m + penalty`
    Energy,
}

impl CostKind {
    /// Objective matched to a DVFS mode: a shared clock runs at the highest
    /// load, so full-chip platforms minimize makespan; per-core platforms
    /// minimize the quadratic energy term.
    pub fn for_dvfs(mode: DvfsMode) -> Self {
        match mode {
            DvfsMode::FullChip => CostKind::Makespan,
            DvfsMode::PerCore => CostKind::Energy,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CostKind::Makespan => "makespan",
            CostKind::Energy => "energy",
        }
    }
}

impl FromStr for CostKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "makespan" => Ok(CostKind::Makespan),
            "energy" => Ok(CostKind::Energy),
            _ => Err(Error::Validation(format!(
                "unknown cost `{s}` (makespan|energy)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltyMode {
    /// Sum of `U_j` over overloaded processors. Any infeasible assignment then
    /// costs more than 1, hence more than any feasible one.
    #[default]
    SumViolatingUtilizations,
    /// Sum of `U_j - 1` over overloaded processors.
    SumExcess,
}

impl FromStr for PenaltyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum-violating-utilizations" => Ok(PenaltyMode::SumViolatingUtilizations),
            "sum-excess" => Ok(PenaltyMode::SumExcess),
            _ => Err(Error::Validation(format!(
                "unknown penalty mode `{s}` (sum-violating-utilizations|sum-excess)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CostSpec {
    pub kind: CostKind,
    pub penalty_mode: PenaltyMode,
}

impl CostSpec {
    pub fn new(kind: CostKind) -> Self {
        Self {
            kind,
            penalty_mode: PenaltyMode::default(),
        }
    }

    pub fn makespan() -> Self {
        Self::new(CostKind::Makespan)
    }

    pub fn energy() -> Self {
        Self::new(CostKind::Energy)
    }

    pub fn with_penalty(mut self, mode: PenaltyMode) -> Self {
        self.penalty_mode = mode;
        self
    }

    pub fn of_loads(&self, loads: &LoadVector) -> f64 {
        match self.kind {
            CostKind::Makespan => makespan_of_loads(loads, self.penalty_mode),
            CostKind::Energy => energy_of_loads(loads, self.penalty_mode),
        }
    }

    pub fn evaluate(&self, matrix: &UtilizationMatrix, a: &Assignment) -> Result<f64> {
        Ok(self.of_loads(&loads(matrix, a)?))
    }

    /// Cost of an assignment already known to fit the matrix, reusing `scratch`.
    pub(crate) fn evaluate_into(
        &self,
        matrix: &UtilizationMatrix,
        a: &[usize],
        scratch: &mut LoadVector,
    ) -> f64 {
        loads_into(matrix, a, scratch);
        self.of_loads(scratch)
    }
}

/// `U_j = sum of u[i][j]` over tasks `i` mapped to processor `j`, summed in
/// ascending task order.
pub fn loads(matrix: &UtilizationMatrix, a: &Assignment) -> Result<LoadVector> {
    a.validate_for(matrix)?;
    let mut out = LoadVector(vec![0.0; matrix.processors()]);
    loads_into(matrix, a.as_slice(), &mut out);
    Ok(out)
}

pub(crate) fn loads_into(matrix: &UtilizationMatrix, a: &[usize], out: &mut LoadVector) {
    out.0.clear();
    out.0.resize(matrix.processors(), 0.0);
    for (task, &p) in a.iter().enumerate() {
        out.0[p] += matrix.get(task, p);
    }
}

pub fn penalty(loads: &LoadVector, mode: PenaltyMode) -> f64 {
    let over = loads.0.iter().filter(|&&u| u > 1.0);
    match mode {
        PenaltyMode::SumViolatingUtilizations => over.sum(),
        PenaltyMode::SumExcess => over.map(|u| u - 1.0).sum(),
    }
}

fn makespan_of_loads(loads: &LoadVector, mode: PenaltyMode) -> f64 {
    loads.max() + penalty(loads, mode)
}

fn energy_of_loads(loads: &LoadVector, mode: PenaltyMode) -> f64 {
    let m = loads.0.len() as f64;
    loads.0.iter().map(|u| u * u).sum::<f64>() / m + penalty(loads, mode)
}

pub fn makespan_cost(matrix: &UtilizationMatrix, a: &Assignment, mode: PenaltyMode) -> Result<f64> {
    Ok(makespan_of_loads(&loads(matrix, a)?, mode))
}

pub fn energy_cost(matrix: &UtilizationMatrix, a: &Assignment, mode: PenaltyMode) -> Result<f64> {
    Ok(energy_of_loads(&loads(matrix, a)?, mode))
}

pub fn is_feasible(matrix: &UtilizationMatrix, a: &Assignment) -> Result<bool> {
    Ok(loads(matrix, a)?.is_feasible())
}

fn require_feasible(loads: &LoadVector) -> Result<()> {
    match loads.first_violation() {
        Some((processor, load)) => Err(Error::InfeasibleLoad { processor, load }),
        None => Ok(()),
    }
}

/// Energy-optimal constant speed per processor. On one processor the optimum
/// equals its utilization; a shared clock must run at the largest one.
pub fn optimal_speeds(loads: &LoadVector, mode: DvfsMode) -> Result<Vec<f64>> {
    require_feasible(loads)?;
    Ok(match mode {
        DvfsMode::PerCore => loads.0.clone(),
        DvfsMode::FullChip => vec![loads.max(); loads.0.len()],
    })
}

/// Normalized energy over one busy interval with each core at its optimal
/// speed and `E = f^2`. Idle cores on a full chip are still clocked at the
/// chip speed. Reporting only; optimizers use [`CostSpec`].
pub fn energy_metric(loads: &LoadVector, mode: DvfsMode) -> Result<f64> {
    require_feasible(loads)?;
    Ok(match mode {
        DvfsMode::PerCore => loads.0.iter().map(|u| u * u).sum(),
        DvfsMode::FullChip => {
            let top = loads.max();
            loads.0.len() as f64 * top * top
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    fn two_by_two() -> UtilizationMatrix {
        UtilizationMatrix::from_rows(vec![vec![0.2, 0.4], vec![0.3, 0.1]]).unwrap()
    }

    fn a1(map: &[usize], m: usize) -> Assignment {
        Assignment::from_one_based(map, m).unwrap()
    }

    #[test]
    fn load_sums() {
        let u = two_by_two();
        assert_eq!(loads(&u, &a1(&[1, 2], 2)).unwrap().0, vec![0.2, 0.1]);
        assert_eq!(loads(&u, &a1(&[2, 2], 2)).unwrap().0, vec![0.0, 0.5]);
        let wide = UtilizationMatrix::from_rows(vec![vec![0.3, 0.3, 0.3]]).unwrap();
        assert_eq!(loads(&wide, &a1(&[2], 3)).unwrap().0, vec![0.0, 0.3, 0.0]);
    }

    #[test]
    fn assignment_validation() {
        assert!(Assignment::from_one_based(&[0, 1], 2).is_err());
        assert!(Assignment::from_one_based(&[3], 2).is_err());
        assert!(Assignment::new(vec![2], 2).is_err());
        let u = two_by_two();
        assert!(matches!(loads(&u, &a1(&[1], 2)), Err(Error::Dimension(_))));
        assert!(loads(&u, &Assignment::new(vec![0, 2], 3).unwrap()).is_err());
        assert_eq!(a1(&[2, 1], 2).to_one_based(), vec![2, 1]);
    }

    #[test]
    fn penalties() {
        let ok = LoadVector(vec![0.5, 0.3]);
        assert_eq!(penalty(&ok, PenaltyMode::SumViolatingUtilizations), 0.0);
        assert_eq!(penalty(&ok, PenaltyMode::SumExcess), 0.0);
        assert_eq!(
            penalty(
                &LoadVector(vec![1.2, 0.9]),
                PenaltyMode::SumViolatingUtilizations
            ),
            1.2
        );
        assert!(close(
            penalty(&LoadVector(vec![1.2, 1.1]), PenaltyMode::SumExcess),
            0.3
        ));
    }

    #[test]
    fn makespan_values() {
        let u = two_by_two();
        let mode = PenaltyMode::default();
        assert_eq!(makespan_cost(&u, &a1(&[1, 2], 2), mode).unwrap(), 0.2);
        let spec = CostSpec::makespan();
        assert_eq!(spec.of_loads(&LoadVector(vec![1.2, 0.9])), 2.4);
        let single = UtilizationMatrix::from_rows(vec![vec![0.3]]).unwrap();
        assert_eq!(makespan_cost(&single, &a1(&[1], 1), mode).unwrap(), 0.3);
    }

    #[test]
    fn energy_values() {
        let spec = CostSpec::energy();
        assert!(close(spec.of_loads(&LoadVector(vec![0.6, 0.8])), 0.5));
        assert_eq!(spec.of_loads(&LoadVector(vec![0.0, 0.0])), 0.0);
        let u = two_by_two();
        let c = energy_cost(&u, &a1(&[1, 2], 2), PenaltyMode::default()).unwrap();
        assert!(close(c, 0.025));
    }

    #[test]
    fn feasibility_boundary() {
        assert!(LoadVector(vec![1.0, 0.99]).is_feasible());
        assert!(!LoadVector(vec![1.0000001, 0.5]).is_feasible());
        assert!(LoadVector(vec![]).is_feasible());
        let heavy = UtilizationMatrix::from_rows(vec![vec![0.9, 0.9]; 3]).unwrap();
        assert!(!is_feasible(&heavy, &a1(&[1, 2, 1], 2)).unwrap());
        assert!(is_feasible(&two_by_two(), &a1(&[2, 2], 2)).unwrap());
    }

    #[test]
    fn speeds() {
        let u = LoadVector(vec![0.6, 0.3]);
        assert_eq!(
            optimal_speeds(&u, DvfsMode::PerCore).unwrap(),
            vec![0.6, 0.3]
        );
        assert_eq!(
            optimal_speeds(&u, DvfsMode::FullChip).unwrap(),
            vec![0.6, 0.6]
        );
        assert_eq!(
            optimal_speeds(&LoadVector(vec![0.0, 0.5]), DvfsMode::PerCore).unwrap(),
            vec![0.0, 0.5]
        );
        assert!(matches!(
            optimal_speeds(&LoadVector(vec![1.1, 0.5]), DvfsMode::PerCore),
            Err(Error::InfeasibleLoad { processor: 0, .. })
        ));
    }

    #[test]
    fn energy_metrics() {
        assert!(close(
            energy_metric(&LoadVector(vec![0.6, 0.8]), DvfsMode::PerCore).unwrap(),
            1.0
        ));
        assert!(close(
            energy_metric(&LoadVector(vec![0.6, 0.3]), DvfsMode::FullChip).unwrap(),
            0.72
        ));
        for mode in [DvfsMode::PerCore, DvfsMode::FullChip] {
            assert_eq!(
                energy_metric(&LoadVector(vec![0.0, 0.0]), mode).unwrap(),
                0.0
            );
        }
        assert!(energy_metric(&LoadVector(vec![1.5]), DvfsMode::FullChip).is_err());
    }

    #[test]
    fn dvfs_cost_rule() {
        assert_eq!(CostKind::for_dvfs(DvfsMode::FullChip), CostKind::Makespan);
        assert_eq!(CostKind::for_dvfs(DvfsMode::PerCore), CostKind::Energy);
    }

    fn loads_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..2.0, 1..8)
    }

    proptest! {
        #[test]
        fn infeasible_always_costs_more(a in loads_strategy(), b in loads_strategy(), energy: bool) {
            let spec = if energy { CostSpec::energy() } else { CostSpec::makespan() };
            let (la, lb) = (LoadVector(a), LoadVector(b));
            prop_assert_eq!(penalty(&la, PenaltyMode::default()) == 0.0, la.is_feasible());
            if la.is_feasible() {
                prop_assert!(spec.of_loads(&la) <= 1.0);
            }
            if la.is_feasible() && !lb.is_feasible() {
                prop_assert!(spec.of_loads(&lb) > spec.of_loads(&la));
            }
        }

        #[test]
        fn full_chip_energy_dominates(a in prop::collection::vec(0.0f64..=1.0, 1..8)) {
            let l = LoadVector(a);
            let pc = energy_metric(&l, DvfsMode::PerCore).unwrap();
            let fc = energy_metric(&l, DvfsMode::FullChip).unwrap();
            prop_assert!(fc >= pc);
        }

        #[test]
        fn energy_invariant_under_relabeling(
            rows in prop::collection::vec(prop::collection::vec(0.05f64..0.5, 3), 1..6),
            seed in prop::collection::vec(0usize..3, 6),
            perm_idx in 0usize..6,
        ) {
            const PERMS: [[usize; 3]; 6] = [[0,1,2],[0,2,1],[1,0,2],[1,2,0],[2,0,1],[2,1,0]];
            let perm = PERMS[perm_idx];
            let n = rows.len();
            let map: Vec<usize> = seed[..n].to_vec();
            let permuted_rows: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| {
                    let mut out = vec![0.0; 3];
                    for j in 0..3 { out[perm[j]] = r[j]; }
                    out
                })
                .collect();
            let u = UtilizationMatrix::from_rows(rows).unwrap();
            let up = UtilizationMatrix::from_rows(permuted_rows).unwrap();
            let a = Assignment::new(map.clone(), 3).unwrap();
            let ap = Assignment::new(map.iter().map(|&p| perm[p]).collect(), 3).unwrap();
            let e = energy_cost(&u, &a, PenaltyMode::default()).unwrap();
            let ep = energy_cost(&up, &ap, PenaltyMode::default()).unwrap();
            prop_assert!((e - ep).abs() < 1e-12);
        }
    }
}
