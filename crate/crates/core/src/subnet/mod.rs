//! Keyword-seeded subnetwork extraction and size reduction.
//!
//! A subnetwork starts as the undirected second-order neighbourhood of the
//! nodes matching a [`KeywordSet`]. Subnetworks above a size cap are first
//! pruned by degree, keeping nodes with at least the median number of
//! neighbours among nodes with more than two, and if still too large are cut
//! down to the innermost k-core that keeps a minimum number of nodes.
//!
//! Every step returns an induced subgraph of its input.

mod graph;
mod keywords;
mod timeseries;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::ngram::BigramNetwork;

pub use graph::UndirectedView;
pub use keywords::{
    default_keyword_sets, keyword_sets_from_map, load_keyword_file, match_seeds,
    parse_keyword_json, parse_keyword_toml, KeywordSet, DEFAULT_KEYWORDS_TOML,
};
pub use timeseries::{keyword_timeseries, write_timeseries_csv, OccurrenceRow};

pub const DEFAULT_SIZE_CAP: usize = 500;
pub const DEFAULT_MIN_CORE: usize = 95;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionStep {
    pub step: String,
    /// Median degree for pruning, k for the core step.
    pub threshold: usize,
    pub nodes_before: usize,
    pub nodes_after: usize,
    pub edges_before: usize,
    pub edges_after: usize,
    pub seeds_removed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subnetwork {
    pub network: BigramNetwork,
    pub seeds: BTreeSet<String>,
    pub steps: Vec<ReductionStep>,
}

impl Subnetwork {
    pub fn node_count(&self) -> usize {
        self.network.node_count()
    }

    /// Seeds still present in the network.
    pub fn retained_seeds(&self) -> BTreeSet<String> {
        self.seeds.intersection(&self.network.nodes).cloned().collect()
    }

    fn restrict(&self, keep: &BTreeSet<String>, step: &str, threshold: usize) -> Subnetwork {
        let network = self.network.induced(keep);
        let record = ReductionStep {
            step: step.to_owned(),
            threshold,
            nodes_before: self.network.node_count(),
            nodes_after: network.node_count(),
            edges_before: self.network.edge_count(),
            edges_after: network.edge_count(),
            seeds_removed: self
                .retained_seeds()
                .difference(&network.nodes)
                .cloned()
                .collect(),
        };
        let mut steps = self.steps.clone();
        steps.push(record);
        Subnetwork {
            network,
            seeds: self.seeds.clone(),
            steps,
        }
    }
}

/// Induced subgraph on every node within undirected distance 2 of a seed.
/// Seeds absent from `net` are ignored.
pub fn second_order_neighborhood(net: &BigramNetwork, seeds: &BTreeSet<String>) -> Subnetwork {
    let view = UndirectedView::new(net);
    let sources: Vec<usize> = seeds.iter().filter_map(|s| view.index_of(s)).collect();
    let keep = view.labels_of(view.ball(&sources, 2));
    Subnetwork {
        network: net.induced(&keep),
        seeds: seeds.intersection(&net.nodes).cloned().collect(),
        steps: Vec::new(),
    }
}

/// Lower median; `None` for an empty slice.
fn lower_median(values: &mut [usize]) -> Option<usize> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    Some(values[(values.len() - 1) / 2])
}

/// Keeps seeds and every node whose neighbour count reaches the lower median
/// of the neighbour counts above two. No-op when no node has more than two.
pub fn degree_prune(sub: &Subnetwork) -> Subnetwork {
    let view = UndirectedView::new(&sub.network);
    let degrees: Vec<usize> = (0..view.len()).map(|v| view.degree(v)).collect();
    let mut hubs: Vec<usize> = degrees.iter().copied().filter(|&d| d > 2).collect();
    let Some(median) = lower_median(&mut hubs) else {
        return sub.clone();
    };
    let keep = view.labels_of(
        (0..view.len()).filter(|&v| degrees[v] >= median || sub.seeds.contains(view.labels[v])),
    );
    sub.restrict(&keep, "degree_prune", median)
}

/// Nodes of the k-core of `sub`'s undirected view.
pub fn k_core(sub: &Subnetwork, k: usize) -> BTreeSet<String> {
    let view = UndirectedView::new(&sub.network);
    let cores = view.core_numbers();
    view.labels_of((0..view.len()).filter(|&v| cores[v] >= k))
}

/// The k-core with the largest k (k ≥ 1) that still has at least `min_nodes`
/// nodes; the 1-core when none does. Seeds get no protection here.
pub fn kcore_reduce(sub: &Subnetwork, min_nodes: usize) -> Subnetwork {
    let view = UndirectedView::new(&sub.network);
    let cores = view.core_numbers();
    let max_core = cores.iter().copied().max().unwrap_or(0);
    let chosen = (1..=max_core)
        .rev()
        .find(|&k| cores.iter().filter(|&&c| c >= k).count() >= min_nodes)
        .unwrap_or(1);
    let keep = view.labels_of((0..view.len()).filter(|&v| cores[v] >= chosen));
    sub.restrict(&keep, "kcore", chosen)
}

/// Degree pruning above `size_cap`, then the k-core step if still above it.
pub fn reduce_pipeline(sub: &Subnetwork, size_cap: usize, min_core: usize) -> Subnetwork {
    if sub.node_count() <= size_cap {
        return sub.clone();
    }
    let pruned = degree_prune(sub);
    if pruned.node_count() <= size_cap {
        return pruned;
    }
    kcore_reduce(&pruned, min_core)
}
