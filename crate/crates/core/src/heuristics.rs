//! Min-min and Max-min greedy partitioning over completion utilizations.
//!
//! Each round computes, for every unmapped task, the processor giving the
//! smallest completion utilization `U_j + u[i][j]` among processors that stay
//! within capacity. Min-min then maps the task whose best completion is
//! smallest, Max-min the one whose best completion is largest. Ties go to the
//! lower task index, then the lower processor index.
//!
//! When no unmapped task fits anywhere, the remaining tasks are still placed by
//! the same rule with the capacity bound dropped, and the result is flagged
//! infeasible. The assignment is always complete so it can seed a swarm.

use crate::cost::{Assignment, LoadVector};
use crate::model::UtilizationMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Selection {
    MinMin,
    MaxMin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicResult {
    pub assignment: Assignment,
    /// Every processor stays within `U_j <= 1`.
    pub feasible: bool,
    /// Loads tracked during construction.
    pub loads: LoadVector,
}

pub fn min_min(matrix: &UtilizationMatrix) -> HeuristicResult {
    greedy(matrix, Selection::MinMin, |_, _| {})
}

pub fn max_min(matrix: &UtilizationMatrix) -> HeuristicResult {
    greedy(matrix, Selection::MaxMin, |_, _| {})
}

/// Best processor for `task` and its completion utilization.
fn best_processor(
    matrix: &UtilizationMatrix,
    loads: &[f64],
    task: usize,
    capacity_bound: bool,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &load) in loads.iter().enumerate() {
        if !matrix.admissible(task, j) {
            continue;
        }
        let completion = load + matrix.get(task, j);
        if capacity_bound && completion > 1.0 {
            continue;
        }
        if best.is_none_or(|(_, c)| completion < c) {
            best = Some((j, completion));
        }
    }
    best
}

fn greedy<F>(matrix: &UtilizationMatrix, selection: Selection, mut observe: F) -> HeuristicResult
where
    F: FnMut(&[Option<usize>], &[f64]),
{
    let (n, m) = (matrix.tasks(), matrix.processors());
    let mut loads = vec![0.0; m];
    let mut placed: Vec<Option<usize>> = vec![None; n];
    let mut unmapped: Vec<usize> = (0..n).collect();
    let mut feasible = true;

    while !unmapped.is_empty() {
        let pick = |capacity_bound: bool, loads: &[f64]| {
            let mut chosen: Option<(usize, usize, f64)> = None;
            for (slot, &task) in unmapped.iter().enumerate() {
                let Some((j, c)) = best_processor(matrix, loads, task, capacity_bound) else {
                    continue;
                };
                let better = match (chosen, selection) {
                    (None, _) => true,
                    (Some((_, _, best)), Selection::MinMin) => c < best,
                    (Some((_, _, best)), Selection::MaxMin) => c > best,
                };
                if better {
                    chosen = Some((slot, j, c));
                }
            }
            chosen
        };

        let chosen = match pick(true, &loads) {
            Some(c) => Some(c),
            None => {
                feasible = false;
                pick(false, &loads)
            }
        };
        let (slot, processor) = match chosen {
            Some((slot, j, _)) => (slot, j),
            // Every remaining task is overweight on every processor.
            None => {
                let task = unmapped[0];
                let j = argmin(matrix.row(task));
                (0, j)
            }
        };
        // `unmapped` stays sorted so slot order is task order.
        let task = unmapped.remove(slot);
        loads[processor] += matrix.get(task, processor);
        placed[task] = Some(processor);
        observe(&placed, &loads);
    }

    let map: Vec<usize> = placed
        .into_iter()
        .map(|p| p.expect("all tasks placed"))
        .collect();
    let loads = crate::cost::loads(matrix, &Assignment::from_vec_unchecked(map.clone()))
        .expect("greedy assignment fits matrix");
    HeuristicResult {
        assignment: Assignment::from_vec_unchecked(map),
        feasible: feasible && loads.is_feasible(),
        loads,
    }
}

fn argmin(row: &[f64]) -> usize {
    row.iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |(bj, bu), (j, &u)| if u < bu { (j, u) } else { (bj, bu) },
        )
        .0
}
