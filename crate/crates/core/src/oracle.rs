//! Exhaustive search over all `m^n` assignments.
//!
//! Assignments are visited in lexicographic order (task 0 most significant)
//! by an odometer. Loads are kept as a stack of prefix sums, one level per
//! task, so a digit change only rebuilds the levels below it and every load
//! vector is summed in ascending task order, bit-identical to
//! [`cost::loads`](crate::cost::loads).

use crate::cost::{Assignment, CostSpec, LoadVector};
use crate::error::{Error, Result};
use crate::model::UtilizationMatrix;

pub const DEFAULT_LIMIT: u64 = 10_000_000;

/// First assignment in lexicographic order attaining the minimum cost.
pub fn exhaustive_best(matrix: &UtilizationMatrix, cost: CostSpec) -> Result<(Assignment, f64)> {
    exhaustive_best_with_limit(matrix, cost, DEFAULT_LIMIT)
}

pub fn exhaustive_best_with_limit(
    matrix: &UtilizationMatrix,
    cost: CostSpec,
    limit: u64,
) -> Result<(Assignment, f64)> {
    let size = matrix.search_space();
    if size > limit as f64 {
        return Err(Error::EnumerationLimit { size, limit });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    enumerate(matrix, cost, |digits, c| {
        if best.as_ref().is_none_or(|(_, b)| c < *b) {
            best = Some((digits.to_vec(), c));
        }
    });
    let (digits, c) = best.expect("search space is nonempty");
    Ok((Assignment::new(digits, matrix.processors())?, c))
}

/// Visit every assignment with its cost, in lexicographic order.
pub fn enumerate<F>(matrix: &UtilizationMatrix, cost: CostSpec, mut visit: F)
where
    F: FnMut(&[usize], f64),
{
    let (n, m) = (matrix.tasks(), matrix.processors());
    let mut digits = vec![0usize; n];
    // prefix[d] holds the loads of tasks 0..d.
    let mut prefix = vec![vec![0.0f64; m]; n + 1];
    let mut scratch = LoadVector(Vec::with_capacity(m));

    let rebuild_from = |prefix: &mut Vec<Vec<f64>>, digits: &[usize], from: usize| {
        for d in from..n {
            let (head, tail) = prefix.split_at_mut(d + 1);
            let next = &mut tail[0];
            next.copy_from_slice(&head[d]);
            next[digits[d]] += matrix.get(d, digits[d]);
        }
    };
    rebuild_from(&mut prefix, &digits, 0);

    loop {
        scratch.0.clear();
        scratch.0.extend_from_slice(&prefix[n]);
        visit(&digits, cost.of_loads(&scratch));

        // Advance the odometer: bump the last digit that is not at m-1.
        let Some(pos) = (0..n).rev().find(|&d| digits[d] + 1 < m) else {
            return;
        };
        digits[pos] += 1;
        digits[pos + 1..].iter_mut().for_each(|d| *d = 0);
        rebuild_from(&mut prefix, &digits, pos);
    }
}
