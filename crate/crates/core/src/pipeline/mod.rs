//! Configuration-driven batch pipeline and its on-disk artifacts.
//!
//! Output layout:
//!
//! ```text
//! <output>/
//!   manifest.json
//!   preprocess/documents.csv          per-document token counts by stage
//!   preprocess/lemmas/<date>_<id>.txt one lemma per line
//!   network/{nodes,edges,bow}.csv
//!   sets/<set>/{nodes,edges}.csv      reduced subnetwork
//!   sets/<set>/meta.json              seeds and reduction steps
//!   sets/<set>/partition.csv          node,cluster
//!   sets/<set>/report.json            criterion, block grids, restart statistics
//!   sets/<set>/{matrix,image}.csv     dense matrix, cluster-ordered image
//!   sets/<set>/image_boundaries.csv
//!   timeseries.csv
//! ```

mod config;
mod manifest;
mod stages;

pub use config::{ClusterCounts, Overrides, PipelineConfig};
pub use manifest::{scan_tree, sha256_file, FileEntry, RunManifest, MANIFEST_FILE};
pub use stages::{
    report, set_dir_name, Pipeline, NETWORK_DIR, PREPROCESS_DIR, SETS_DIR, TIMESERIES_FILE,
};
