use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use super::config::PipelineConfig;
use super::manifest::RunManifest;
use crate::blockmodel::{local_search, permuted_image, BlockmodelResult};
use crate::error::{Error, Result};
use crate::ngram::{
    build_bigrams, build_bow, csv_reader, csv_writer, normalize_conditional, to_matrix,
    write_matrix_csv, BigramNetwork,
};
use crate::preprocess::{
    load_corpus_dir, load_training_texts, normalize, train_language_model, Document,
    DocumentStats, LemmaDictionary, Preprocessor, SpellCorrector, StopwordList,
};
use crate::subnet::{
    keyword_timeseries, match_seeds, reduce_pipeline, second_order_neighborhood,
    write_timeseries_csv, KeywordSet, Subnetwork,
};

pub const PREPROCESS_DIR: &str = "preprocess";
pub const NETWORK_DIR: &str = "network";
pub const SETS_DIR: &str = "sets";
pub const TIMESERIES_FILE: &str = "timeseries.csv";

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn write_with<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let mut w = create(path)?;
    body(&mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    write_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))
    })
}

fn remove_dir(path: &Path) -> Result<()> {
    if path.exists() {
        fs::remove_dir_all(path).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// File-system safe directory name for a keyword set.
pub fn set_dir_name(set: &str) -> String {
    set.chars()
        .map(|c| if c.is_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// The staged batch pipeline. Each stage reads its inputs from the previous
/// stage's files under the output directory, so stages can be rerun alone.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub config: PipelineConfig,
    /// Record wall-clock stage durations in the manifest. Off by default
    /// because it makes the output tree differ between runs.
    pub record_timings: bool,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        Ok(Pipeline {
            config,
            record_timings: false,
        })
    }

    pub fn out(&self) -> &Path {
        &self.config.output
    }

    fn set_dir(&self, set: &str) -> PathBuf {
        self.out().join(SETS_DIR).join(set_dir_name(set))
    }

    fn record(&self, stage: &str, mut stats: serde_json::Value, started: Instant) -> Result<()> {
        fs::create_dir_all(self.out()).map_err(|e| Error::io(self.out(), e))?;
        if self.record_timings {
            stats["elapsed_ms"] = json!(started.elapsed().as_millis() as u64);
        }
        let mut manifest = RunManifest::load_or_new(self.out(), &self.config.digest())?;
        manifest.stages.insert(stage.to_owned(), stats);
        manifest.write(self.out())
    }

    fn keyword_sets(&self) -> Result<Vec<KeywordSet>> {
        self.config.keyword_sets()
    }

    fn build_preprocessor(&self) -> Result<(Preprocessor, serde_json::Value)> {
        let stopwords = StopwordList::load(&self.config.stopwords)?;
        let lemmas = match &self.config.lemmas {
            Some(p) => LemmaDictionary::load(p)?,
            None => LemmaDictionary::default(),
        };
        let (corrector, lm_stats) = match &self.config.language_model {
            Some(source) => {
                let texts = load_training_texts(source)?;
                let model = train_language_model(texts.iter().map(|t| normalize(t)))
                    .map_err(|e| Error::bad_input(source, e.to_string()))?;
                let stats = json!({"vocabulary": model.len(), "tokens": model.total()});
                let mut corrector = SpellCorrector::new(model, self.config.max_edit);
                corrector.min_len = self.config.min_correct_len;
                (Some(corrector), stats)
            }
            None => (None, serde_json::Value::Null),
        };
        let stats = json!({
            "stopwords": stopwords.len(),
            "lemma_forms": lemmas.len(),
            "language_model": lm_stats,
        });
        Ok((
            Preprocessor {
                corrector,
                stopwords,
                lemmas,
            },
            stats,
        ))
    }

    /// Cleans the corpus into per-document lemma files plus `documents.csv`.
    pub fn preprocess(&self) -> Result<Vec<DocumentStats>> {
        let started = Instant::now();
        let mut docs = load_corpus_dir(&self.config.corpus)?;
        let (pre, resources) = self.build_preprocessor()?;
        let stats = pre.process_all(&mut docs);

        let dir = self.out().join(PREPROCESS_DIR);
        remove_dir(&dir)?;
        for doc in &docs {
            let path = dir.join("lemmas").join(lemma_file_name(doc));
            write_with(&path, |w| {
                for lemma in &doc.tokens {
                    writeln!(w, "{lemma}").map_err(|e| Error::io(&path, e))?;
                }
                Ok(())
            })?;
        }
        let index = dir.join("documents.csv");
        write_with(&index, |w| {
            let mut csv = csv_writer(w);
            for s in &stats {
                csv.serialize(s)?;
            }
            csv.flush().map_err(|e| Error::io(&index, e))
        })?;

        let sum = |f: fn(&DocumentStats) -> usize| stats.iter().map(f).sum::<usize>();
        self.record(
            "preprocess",
            json!({
                "documents": docs.len(),
                "normalized_tokens": sum(|s| s.normalized_tokens),
                "corrected_tokens": sum(|s| s.corrected_tokens),
                "after_stopwords": sum(|s| s.after_stopwords),
                "lemmas": sum(|s| s.lemmas),
                "resources": resources,
            }),
            started,
        )?;
        Ok(stats)
    }

    /// Reads the lemma sequences written by [`Pipeline::preprocess`].
    pub fn load_processed(&self) -> Result<Vec<Document>> {
        let dir = self.out().join(PREPROCESS_DIR);
        let index = dir.join("documents.csv");
        if !index.exists() {
            return Err(Error::bad_input(&index, "preprocessed corpus not found; run `preprocess` first"));
        }
        let file = File::open(&index).map_err(|e| Error::io(&index, e))?;
        let mut docs = Vec::new();
        for row in csv_reader(file).deserialize::<DocumentStats>() {
            let row = row?;
            let date = chrono::NaiveDate::parse_from_str(&row.date, "%Y-%m-%d")
                .map_err(|e| Error::bad_input(&index, format!("bad date `{}`: {e}", row.date)))?;
            let mut doc = Document::new(row.document_id, date, "");
            let path = dir.join("lemmas").join(lemma_file_name(&doc));
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            doc.tokens = text.lines().map(str::to_owned).collect();
            docs.push(doc);
        }
        Ok(docs)
    }

    /// Corpus-wide bag of words and bi-gram network.
    pub fn network(&self) -> Result<BigramNetwork> {
        let started = Instant::now();
        let docs = self.load_processed()?;
        let corpus: Vec<(String, Vec<String>)> =
            docs.into_iter().map(|d| (d.id, d.tokens)).collect();
        let bow = build_bow(&corpus)?;
        let counts = build_bigrams(&corpus);
        let net = match self.config.weight_mode {
            crate::ngram::WeightMode::Count => counts,
            crate::ngram::WeightMode::ConditionalProbability => normalize_conditional(&counts),
        };
        net.validate()?;

        let dir = self.out().join(NETWORK_DIR);
        write_with(&dir.join("nodes.csv"), |w| net.write_nodes_csv(w))?;
        write_with(&dir.join("edges.csv"), |w| net.write_edges_csv(w))?;
        write_with(&dir.join("bow.csv"), |w| bow.write_csv(w))?;
        self.record(
            "network",
            json!({
                "documents": bow.documents.len(),
                "terms": bow.terms.len(),
                "bow_cells": bow.cells.len(),
                "nodes": net.node_count(),
                "edges": net.edge_count(),
                "weight_mode": net.weight_mode,
            }),
            started,
        )?;
        Ok(net)
    }

    fn read_network(&self, dir: &Path) -> Result<BigramNetwork> {
        let open = |name: &str| {
            let path = dir.join(name);
            File::open(&path).map_err(|e| Error::io(&path, e))
        };
        BigramNetwork::read_csv(open("nodes.csv")?, open("edges.csv")?, self.config.weight_mode)
    }

    /// Seeds, second-order neighbourhood and size reduction for every keyword set.
    pub fn extract(&self) -> Result<Vec<(String, Option<Subnetwork>)>> {
        let started = Instant::now();
        let net = self.read_network(&self.out().join(NETWORK_DIR))?;
        let sets = self.keyword_sets()?;
        let (size_cap, min_core) = (self.config.size_cap, self.config.min_core);
        let results: Vec<(String, Option<(Subnetwork, Subnetwork)>)> = sets
            .par_iter()
            .map(|set| {
                let seeds = match_seeds(&net, set);
                if seeds.is_empty() {
                    return (set.name().to_owned(), None);
                }
                let ball = second_order_neighborhood(&net, &seeds);
                let reduced = reduce_pipeline(&ball, size_cap, min_core);
                (set.name().to_owned(), Some((ball, reduced)))
            })
            .collect();

        remove_dir(&self.out().join(SETS_DIR))?;
        let mut warnings = Vec::new();
        let mut summary = serde_json::Map::new();
        for (set, found) in &results {
            let Some((ball, reduced)) = found else {
                warnings.push(format!("keyword set `{set}` matched no lemma; skipped"));
                summary.insert(set.clone(), json!({"skipped": true}));
                continue;
            };
            let dir = self.set_dir(set);
            write_with(&dir.join("nodes.csv"), |w| reduced.network.write_nodes_csv(w))?;
            write_with(&dir.join("edges.csv"), |w| reduced.network.write_edges_csv(w))?;
            let patterns = sets
                .iter()
                .find(|s| s.name() == set)
                .map(|s| s.patterns().to_vec())
                .unwrap_or_default();
            let meta = json!({
                "set": set,
                "patterns": patterns,
                "seeds": reduced.seeds,
                "seeds_retained": reduced.retained_seeds(),
                "neighborhood": {"nodes": ball.node_count(), "edges": ball.network.edge_count()},
                "steps": reduced.steps,
                "final": {"nodes": reduced.node_count(), "edges": reduced.network.edge_count()},
                "weight_mode": reduced.network.weight_mode,
            });
            write_json(&dir.join("meta.json"), &meta)?;
            summary.insert(
                set.clone(),
                json!({
                    "seeds": reduced.seeds.len(),
                    "neighborhood_nodes": ball.node_count(),
                    "nodes": reduced.node_count(),
                    "edges": reduced.network.edge_count(),
                    "steps": reduced.steps.iter().map(|s| s.step.clone()).collect::<Vec<_>>(),
                }),
            );
        }
        self.record(
            "extract",
            json!({"sets": summary, "size_cap": size_cap, "min_core": min_core, "warnings": warnings}),
            started,
        )?;
        Ok(results
            .into_iter()
            .map(|(set, found)| (set, found.map(|(_, reduced)| reduced)))
            .collect())
    }

    fn blockmodel_set(&self, set: &str) -> Result<Option<BlockmodelResult>> {
        let dir = self.set_dir(set);
        if !dir.join("edges.csv").exists() {
            return Ok(None);
        }
        let net = self.read_network(&dir)?;
        let labels: Vec<String> = net.nodes.iter().cloned().collect();
        let matrix = to_matrix(&net, &labels)?;
        let spec = self.config.block_spec(set)?;
        let result = local_search(&matrix, &spec, self.config.restarts, self.config.seed)?;

        for name in ["partition.csv", "report.json", "matrix.csv", "image.csv", "image_boundaries.csv"] {
            let path = dir.join(name);
            if path.exists() {
                fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
            }
        }
        write_with(&dir.join("partition.csv"), |w| {
            let mut csv = csv_writer(w);
            csv.write_record(["node", "cluster"])?;
            for (label, c) in labels.iter().zip(result.partition.assignment()) {
                csv.write_record([label.clone(), c.to_string()])?;
            }
            csv.flush().map_err(csv::Error::from)?;
            Ok(())
        })?;
        write_with(&dir.join("matrix.csv"), |w| write_matrix_csv(&matrix, &labels, w))?;
        let image = permuted_image(&matrix, &result);
        let image_labels: Vec<String> = image.order.iter().map(|&i| labels[i].clone()).collect();
        write_with(&dir.join("image.csv"), |w| write_matrix_csv(&image.matrix, &image_labels, w))?;
        write_with(&dir.join("image_boundaries.csv"), |w| image.write_boundaries_csv(w))?;

        let best = result.criterion;
        let hits = result
            .restart_criteria
            .iter()
            .filter(|&&c| (c - best).abs() <= 1e-9 * best.abs().max(1.0))
            .count();
        let clusters: Vec<Vec<&str>> = result
            .partition
            .clusters()
            .iter()
            .map(|members| members.iter().map(|&i| labels[i].as_str()).collect())
            .collect();
        let report = json!({
            "set": set,
            "nodes": labels.len(),
            "weight_mode": net.weight_mode,
            "spec": spec,
            "criterion": result.criterion,
            "block_types": result.block_types,
            "block_ideals": result.block_ideals,
            "block_scores": result.block_scores,
            "clusters": clusters,
            "restarts": {
                "run": result.restarts_run,
                "seed": self.config.seed,
                "best_index": result.best_restart_index,
                "reaching_best": hits,
                "worst_criterion": result.restart_criteria.iter().copied().fold(f64::MIN, f64::max),
            },
        });
        write_json(&dir.join("report.json"), &report)?;
        Ok(Some(result))
    }

    /// Blockmodels every extracted subnetwork. A failure in one set is
    /// recorded and does not stop the others.
    pub fn blockmodel(&self) -> Result<Vec<(String, Result<Option<BlockmodelResult>>)>> {
        let started = Instant::now();
        let sets = self.keyword_sets()?;
        let results: Vec<(String, Result<Option<BlockmodelResult>>)> = sets
            .par_iter()
            .map(|s| (s.name().to_owned(), self.blockmodel_set(s.name())))
            .collect();
        let mut warnings = Vec::new();
        let mut summary = serde_json::Map::new();
        for (set, outcome) in &results {
            let entry = match outcome {
                Ok(Some(r)) => json!({
                    "k": r.partition.k(),
                    "nodes": r.partition.len(),
                    "criterion": r.criterion,
                }),
                Ok(None) => {
                    warnings.push(format!("keyword set `{set}` has no subnetwork; skipped"));
                    json!({"skipped": true})
                }
                Err(e) => {
                    warnings.push(format!("keyword set `{set}` failed: {e}"));
                    json!({"error": e.to_string()})
                }
            };
            summary.insert(set.clone(), entry);
        }
        self.record(
            "blockmodel",
            json!({
                "sets": summary,
                "restarts": self.config.restarts,
                "seed": self.config.seed,
                "warnings": warnings,
            }),
            started,
        )?;
        Ok(results)
    }

    /// Keyword-set relative frequencies per document.
    pub fn timeseries(&self) -> Result<usize> {
        let started = Instant::now();
        let docs = self.load_processed()?;
        let sets = self.keyword_sets()?;
        let rows = keyword_timeseries(&docs, &sets);
        write_with(&self.out().join(TIMESERIES_FILE), |w| write_timeseries_csv(&rows, w))?;
        self.record(
            "timeseries",
            json!({"documents": docs.len(), "sets": sets.len(), "rows": rows.len()}),
            started,
        )?;
        Ok(rows.len())
    }

    /// Every stage after preprocessing.
    pub fn run_analysis(&self) -> Result<()> {
        self.network()?;
        self.extract()?;
        self.blockmodel()?;
        self.timeseries()?;
        Ok(())
    }

    pub fn run(&self) -> Result<()> {
        self.preprocess()?;
        self.run_analysis()
    }
}

fn lemma_file_name(doc: &Document) -> String {
    format!("{}_{}.txt", doc.date, doc.id)
}

/// Human-readable manifest summary plus the paths failing digest checks.
pub fn report(out_dir: &Path) -> Result<(String, Vec<String>)> {
    let manifest = RunManifest::load(out_dir)?.ok_or_else(|| {
        Error::bad_input(out_dir.join(super::manifest::MANIFEST_FILE), "no manifest found")
    })?;
    let bad = manifest.verify(out_dir)?;
    let mut text = String::new();
    text.push_str(&format!("{} {}\n", manifest.tool, manifest.version));
    text.push_str(&format!("config digest: {}\n", manifest.config_digest));
    for (stage, stats) in &manifest.stages {
        text.push_str(&format!("[{stage}]\n"));
        if let Some(obj) = stats.as_object() {
            for (key, value) in obj {
                if key != "warnings" {
                    text.push_str(&format!("  {key}: {value}\n"));
                }
            }
        }
    }
    for w in &manifest.warnings {
        text.push_str(&format!("warning: {w}\n"));
    }
    text.push_str(&format!(
        "files: {} listed, {} failing verification\n",
        manifest.files.len(),
        bad.len()
    ));
    Ok((text, bad))
}
