//! Exhaustive search over all partitions, for checking the local search on
//! small instances.

use super::criterion::{check_shape, criterion_value, evaluate};
use super::{improves, BlockSpec, BlockmodelResult, Partition};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Largest number of partitions [`brute_force`] will enumerate.
pub const ORACLE_LIMIT: f64 = 1e6;

/// Stirling number of the second kind, as a float.
pub fn stirling2(n: usize, k: usize) -> f64 {
    // row[j] = S(i, j)
    let mut row = vec![0.0f64; k + 1];
    row[0] = 1.0;
    for _ in 0..n {
        for j in (1..=k).rev() {
            row[j] = j as f64 * row[j] + row[j - 1];
        }
        row[0] = 0.0;
    }
    row[k]
}

/// Calls `visit` with every partition of `n` nodes into exactly `k` non-empty
/// clusters, as restricted-growth strings in lexicographic order.
pub fn for_each_partition<F: FnMut(&[usize])>(n: usize, k: usize, mut visit: F) {
    fn recurse<F: FnMut(&[usize])>(pos: usize, used: usize, k: usize, labels: &mut [usize], visit: &mut F) {
        let n = labels.len();
        if pos == n {
            if used == k {
                visit(labels);
            }
            return;
        }
        // every remaining node may be needed to open the missing clusters
        if k - used > n - pos {
            return;
        }
        for c in 0..=used.min(k - 1) {
            labels[pos] = c;
            recurse(pos + 1, used.max(c + 1), k, labels, visit);
        }
    }
    if k == 0 || n < k {
        return;
    }
    let mut labels = vec![0usize; n];
    recurse(0, 0, k, &mut labels, &mut visit);
}

/// Global optimum over all partitions into `spec.k` clusters. Ties go to the
/// lexicographically smallest canonical assignment.
pub fn brute_force(matrix: &SquareMatrix, spec: &BlockSpec) -> Result<BlockmodelResult> {
    let n = matrix.dim();
    let k = spec.k;
    if n < k {
        return Err(Error::TooFewNodes { n, k });
    }
    let count = stirling2(n, k);
    if count > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge(count));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for_each_partition(n, k, |labels| {
        let value = criterion_value(matrix, labels, spec);
        if best.as_ref().is_none_or(|(b, _)| improves(value, *b)) {
            best = Some((value, labels.to_vec()));
        }
    });
    let (_, assignment) = best.expect("n >= k >= 1 admits a partition");
    let partition = Partition::new(assignment, k)?;
    check_shape(matrix, &partition, spec)?;
    let fit = evaluate(matrix, partition.assignment(), spec);
    Ok(BlockmodelResult::from_fit(partition, fit))
}
