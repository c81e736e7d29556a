use std::io::Write;

use super::BlockmodelResult;
use crate::error::Result;
use crate::matrix::SquareMatrix;
use crate::ngram::csv_writer;

/// Matrix reordered so clusters are contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutedImage {
    pub matrix: SquareMatrix,
    /// `order[i]` is the original index of row/column `i`.
    pub order: Vec<usize>,
    /// Row index at which each cluster after the first begins.
    pub boundaries: Vec<usize>,
}

impl PermutedImage {
    pub fn write_boundaries_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["cluster", "start"])?;
        for (i, b) in self.boundaries.iter().enumerate() {
            w.write_record([(i + 1).to_string(), b.to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Sorts rows and columns by cluster, keeping original order within a cluster.
pub fn permuted_image(matrix: &SquareMatrix, result: &BlockmodelResult) -> PermutedImage {
    let clusters = result.partition.clusters();
    let order: Vec<usize> = clusters.iter().flatten().copied().collect();
    let mut boundaries = Vec::new();
    let mut offset = 0;
    for (i, members) in clusters.iter().enumerate() {
        if i > 0 {
            boundaries.push(offset);
        }
        offset += members.len();
    }
    PermutedImage {
        matrix: matrix.permuted(&order),
        order,
        boundaries,
    }
}
