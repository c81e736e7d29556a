use serde::Serialize;

use super::{BlockSpec, BlockType, Diagonal, Measure, Partition};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Per-block outcome of evaluating a partition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockFit {
    pub criterion: f64,
    pub block_types: Vec<Vec<BlockType>>,
    pub block_ideals: Vec<Vec<f64>>,
    pub block_scores: Vec<Vec<f64>>,
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    if m % 2 == 1 {
        sorted[m / 2]
    } else {
        (sorted[m / 2 - 1] + sorted[m / 2]) / 2.0
    }
}

/// Deviation of `values` from the ideal value of `ty`, as `(score, ideal)`.
pub fn block_inconsistency(values: &[f64], ty: BlockType, measure: Measure) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let ideal = match (ty, measure) {
        (BlockType::Null, _) => 0.0,
        (BlockType::Complete, Measure::SumOfSquares) => {
            values.iter().sum::<f64>() / values.len() as f64
        }
        (BlockType::Complete, Measure::AbsoluteDeviation) => median(values),
    };
    let score = match measure {
        Measure::SumOfSquares => values.iter().map(|x| (x - ideal).powi(2)).sum(),
        Measure::AbsoluteDeviation => values.iter().map(|x| (x - ideal).abs()).sum(),
    };
    (score, ideal)
}

/// Cheapest allowed type for a block; null wins ties.
pub(crate) fn best_type(values: &[f64], spec: &BlockSpec) -> (BlockType, f64, f64) {
    let mut best: Option<(BlockType, f64, f64)> = None;
    for &ty in &spec.allowed_types {
        let (score, ideal) = block_inconsistency(values, ty, spec.measure);
        if best.is_none_or(|(_, s, _)| score < s) {
            best = Some((ty, score, if values.is_empty() { 0.0 } else { ideal }));
        }
    }
    best.expect("block spec allows at least one type")
}

pub(crate) fn check_shape(matrix: &SquareMatrix, partition: &Partition, spec: &BlockSpec) -> Result<()> {
    if matrix.dim() != partition.len() {
        return Err(Error::DimensionMismatch {
            rows: matrix.dim(),
            len: partition.len(),
        });
    }
    if partition.k() != spec.k {
        return Err(Error::ClusterCountMismatch {
            partition: partition.k(),
            spec: spec.k,
        });
    }
    Ok(())
}

/// Collects the cells of every block, row-major over cluster pairs.
pub(crate) fn block_cells(matrix: &SquareMatrix, assignment: &[usize], k: usize, diagonal: Diagonal) -> Vec<Vec<f64>> {
    let mut cells = vec![Vec::new(); k * k];
    for (u, &cu) in assignment.iter().enumerate() {
        let row = matrix.row(u);
        for (v, &cv) in assignment.iter().enumerate() {
            if u == v && diagonal == Diagonal::Ignore {
                continue;
            }
            cells[cu * k + cv].push(row[v]);
        }
    }
    cells
}

/// Total inconsistency of `partition` by direct evaluation of every block.
pub fn criterion(matrix: &SquareMatrix, partition: &Partition, spec: &BlockSpec) -> Result<BlockFit> {
    check_shape(matrix, partition, spec)?;
    Ok(evaluate(matrix, partition.assignment(), spec))
}

pub(crate) fn evaluate(matrix: &SquareMatrix, assignment: &[usize], spec: &BlockSpec) -> BlockFit {
    let k = spec.k;
    let cells = block_cells(matrix, assignment, k, spec.diagonal);
    let mut fit = BlockFit {
        criterion: 0.0,
        block_types: vec![vec![BlockType::Null; k]; k],
        block_ideals: vec![vec![0.0; k]; k],
        block_scores: vec![vec![0.0; k]; k],
    };
    for r in 0..k {
        for c in 0..k {
            let (ty, score, ideal) = best_type(&cells[r * k + c], spec);
            fit.block_types[r][c] = ty;
            fit.block_ideals[r][c] = ideal;
            fit.block_scores[r][c] = score;
            fit.criterion += score;
        }
    }
    fit
}

/// Criterion value only.
pub(crate) fn criterion_value(matrix: &SquareMatrix, assignment: &[usize], spec: &BlockSpec) -> f64 {
    block_cells(matrix, assignment, spec.k, spec.diagonal)
        .iter()
        .map(|cells| best_type(cells, spec).1)
        .sum()
}
