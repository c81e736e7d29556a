//! Generalized homogeneity blockmodeling of valued networks with null and
//! complete blocks.
//!
//! A blockmodel partitions the nodes into `k` clusters. Every cluster pair
//! `(r, c)` induces a block, the cells `matrix[u][v]` with `u` in cluster `r`
//! and `v` in cluster `c`. Each block is scored against every allowed ideal
//! type: a null block against 0, a complete block against its central value
//! (mean for sum of squares, median for absolute deviations). The block keeps
//! its cheapest type, and the criterion is the sum over all `k * k` blocks.
//!
//! [`local_search`] minimizes the criterion from random restarts with
//! relocation and exchange moves; [`brute_force`] enumerates every partition
//! and serves as its oracle on small instances.

mod criterion;
mod image;
mod metrics;
mod oracle;
mod search;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use criterion::{block_inconsistency, criterion, BlockFit};
pub use image::{permuted_image, PermutedImage};
pub use metrics::adjusted_rand_index;
pub use oracle::{brute_force, for_each_partition, stirling2, ORACLE_LIMIT};
pub use search::{local_search, random_partition, LocalSearch, SearchEngine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockType {
    Null,
    Complete,
}

impl fmt::Display for BlockType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockType::Null => "null",
            BlockType::Complete => "complete",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    SumOfSquares,
    AbsoluteDeviation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagonal {
    Ignore,
    Include,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub k: usize,
    pub allowed_types: Vec<BlockType>,
    pub measure: Measure,
    pub diagonal: Diagonal,
}

impl BlockSpec {
    pub fn new(
        k: usize,
        allowed_types: impl IntoIterator<Item = BlockType>,
        measure: Measure,
        diagonal: Diagonal,
    ) -> Result<Self> {
        let mut allowed: Vec<BlockType> = allowed_types.into_iter().collect();
        allowed.sort();
        allowed.dedup();
        if k == 0 {
            return Err(Error::Config("cluster count k must be at least 1".into()));
        }
        if allowed.is_empty() {
            return Err(Error::Config("at least one block type must be allowed".into()));
        }
        Ok(BlockSpec {
            k,
            allowed_types: allowed,
            measure,
            diagonal,
        })
    }

    /// Null and complete blocks, sum of squares, diagonal ignored.
    pub fn null_complete(k: usize) -> Result<Self> {
        Self::new(
            k,
            [BlockType::Null, BlockType::Complete],
            Measure::SumOfSquares,
            Diagonal::Ignore,
        )
    }

    pub fn allows(&self, ty: BlockType) -> bool {
        self.allowed_types.contains(&ty)
    }
}

/// Assignment of `n` nodes to `k` non-empty clusters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self> {
        let mut seen = vec![false; k];
        for &c in &assignment {
            if c >= k {
                return Err(Error::ClusterOutOfRange { index: c, k });
            }
            seen[c] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::EmptyCluster(empty));
        }
        Ok(Partition { assignment, k })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Members of each cluster, in ascending node order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }

    /// Relabels clusters by order of first appearance.
    pub fn canonical(&self) -> Partition {
        Partition {
            assignment: canonical_labels(&self.assignment, self.k),
            k: self.k,
        }
    }
}

pub(crate) fn canonical_labels(assignment: &[usize], k: usize) -> Vec<usize> {
    let mut relabel = vec![usize::MAX; k];
    let mut next = 0;
    assignment
        .iter()
        .map(|&c| {
            if relabel[c] == usize::MAX {
                relabel[c] = next;
                next += 1;
            }
            relabel[c]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockmodelResult {
    pub partition: Partition,
    pub criterion: f64,
    pub block_types: Vec<Vec<BlockType>>,
    pub block_ideals: Vec<Vec<f64>>,
    pub block_scores: Vec<Vec<f64>>,
    pub restarts_run: usize,
    pub best_restart_index: usize,
    /// Local-optimum criterion reached by each restart, in restart order.
    pub restart_criteria: Vec<f64>,
}

impl BlockmodelResult {
    pub(crate) fn from_fit(partition: Partition, fit: BlockFit) -> Self {
        BlockmodelResult {
            partition,
            criterion: fit.criterion,
            block_types: fit.block_types,
            block_ideals: fit.block_ideals,
            block_scores: fit.block_scores,
            restarts_run: 0,
            best_restart_index: 0,
            restart_criteria: Vec::new(),
        }
    }
}

/// `a` is a strict improvement on `b` beyond floating-point noise.
pub(crate) fn improves(a: f64, b: f64) -> bool {
    a < b - 1e-10 * b.abs().max(1.0)
}
