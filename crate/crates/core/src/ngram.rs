//! Bag-of-words matrix and the directed, weighted bi-gram network.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    Count,
    ConditionalProbability,
}

/// Directed word network; an edge `a -> b` means `b` directly follows `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct BigramNetwork {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeMap<(String, String), f64>,
    pub weight_mode: WeightMode,
}

impl BigramNetwork {
    pub fn empty(weight_mode: WeightMode) -> Self {
        BigramNetwork {
            nodes: BTreeSet::new(),
            edges: BTreeMap::new(),
            weight_mode,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, source: &str, target: &str) -> Option<f64> {
        self.edges.get(&(source.to_owned(), target.to_owned())).copied()
    }

    /// Subgraph induced by `keep`: all edges with both endpoints retained.
    pub fn induced(&self, keep: &BTreeSet<String>) -> BigramNetwork {
        let nodes: BTreeSet<String> = self.nodes.intersection(keep).cloned().collect();
        let edges = self
            .edges
            .iter()
            .filter(|((s, t), _)| nodes.contains(s) && nodes.contains(t))
            .map(|(k, w)| (k.clone(), *w))
            .collect();
        BigramNetwork {
            nodes,
            edges,
            weight_mode: self.weight_mode,
        }
    }

    /// Checks the weight-mode invariants.
    pub fn validate(&self) -> Result<()> {
        for ((s, t), &w) in &self.edges {
            if !self.nodes.contains(s) || !self.nodes.contains(t) {
                return Err(Error::Invariant(format!("edge {s}->{t} has an endpoint outside the node set")));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::Invariant(format!("edge {s}->{t} has weight {w}")));
            }
            if self.weight_mode == WeightMode::Count && w.fract() != 0.0 {
                return Err(Error::Invariant(format!("count edge {s}->{t} has weight {w}")));
            }
        }
        if self.weight_mode == WeightMode::ConditionalProbability {
            let mut out_sums: HashMap<&str, f64> = HashMap::new();
            for ((s, _), w) in &self.edges {
                *out_sums.entry(s).or_default() += w;
            }
            for (s, sum) in out_sums {
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::Invariant(format!("out-weights of {s} sum to {sum}")));
                }
            }
        }
        Ok(())
    }

    /// `source,target,weight` rows in lexicographic order.
    pub fn write_edges_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["source", "target", "weight"])?;
        for ((s, t), weight) in &self.edges {
            w.write_record([s.as_str(), t.as_str(), &weight.to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn write_nodes_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["node"])?;
        for n in &self.nodes {
            w.write_record([n])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Reads the node and edge CSVs written by this type.
    pub fn read_csv<N: Read, E: Read>(nodes: N, edges: E, weight_mode: WeightMode) -> Result<Self> {
        let mut net = BigramNetwork::empty(weight_mode);
        for rec in csv_reader(nodes).records() {
            let rec = rec?;
            let node = rec.get(0).ok_or_else(|| Error::Config("node row without a value".into()))?;
            net.nodes.insert(node.to_owned());
        }
        for rec in csv_reader(edges).records() {
            let rec = rec?;
            let (Some(s), Some(t), Some(w)) = (rec.get(0), rec.get(1), rec.get(2)) else {
                return Err(Error::Invariant("edge row needs source,target,weight".into()));
            };
            let w: f64 = w
                .parse()
                .map_err(|_| Error::Invariant(format!("bad edge weight `{w}`")))?;
            net.nodes.insert(s.to_owned());
            net.nodes.insert(t.to_owned());
            net.edges.insert((s.to_owned(), t.to_owned()), w);
        }
        Ok(net)
    }
}

pub(crate) fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub(crate) fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).from_reader(input)
}

/// Term by document counts, stored sparsely.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocTermMatrix {
    pub documents: Vec<String>,
    pub terms: Vec<String>,
    pub cells: BTreeMap<(String, String), u64>,
}

impl DocTermMatrix {
    pub fn cell(&self, term: &str, document: &str) -> u64 {
        self.cells
            .get(&(term.to_owned(), document.to_owned()))
            .copied()
            .unwrap_or(0)
    }

    pub fn column_sum(&self, document: &str) -> u64 {
        self.cells
            .iter()
            .filter(|((_, d), _)| d == document)
            .map(|(_, c)| c)
            .sum()
    }

    /// Sparse `term,document,count` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["term", "document", "count"])?;
        for ((t, d), c) in &self.cells {
            w.write_record([t.as_str(), d.as_str(), &c.to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

pub fn build_bow<S: AsRef<str>>(corpus: &[(String, Vec<S>)]) -> Result<DocTermMatrix> {
    let mut seen = HashSet::new();
    let mut matrix = DocTermMatrix::default();
    let mut terms = BTreeSet::new();
    for (id, lemmas) in corpus {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateDocument(id.clone()));
        }
        matrix.documents.push(id.clone());
        for lemma in lemmas {
            let lemma = lemma.as_ref();
            terms.insert(lemma.to_owned());
            *matrix.cells.entry((lemma.to_owned(), id.clone())).or_insert(0) += 1;
        }
    }
    matrix.terms = terms.into_iter().collect();
    Ok(matrix)
}

fn count_document<S: AsRef<str>>(lemmas: &[S]) -> (BTreeSet<String>, HashMap<(String, String), u64>) {
    let nodes = lemmas.iter().map(|l| l.as_ref().to_owned()).collect();
    let mut pairs = HashMap::new();
    for w in lemmas.windows(2) {
        *pairs
            .entry((w[0].as_ref().to_owned(), w[1].as_ref().to_owned()))
            .or_insert(0u64) += 1;
    }
    (nodes, pairs)
}

/// Counts adjacent ordered lemma pairs within each document and sums them
/// over the corpus. Every lemma becomes a node even without edges.
pub fn build_bigrams<S: AsRef<str> + Sync>(corpus: &[(String, Vec<S>)]) -> BigramNetwork {
    let (nodes, counts) = corpus
        .par_iter()
        .map(|(_, lemmas)| count_document(lemmas))
        .reduce(
            || (BTreeSet::new(), HashMap::new()),
            |(mut nodes, mut counts), (n2, c2)| {
                nodes.extend(n2);
                for (k, v) in c2 {
                    *counts.entry(k).or_insert(0) += v;
                }
                (nodes, counts)
            },
        );
    BigramNetwork {
        nodes,
        edges: counts.into_iter().map(|(k, v)| (k, v as f64)).collect(),
        weight_mode: WeightMode::Count,
    }
}

/// Divides each edge count by its source's total out-count.
pub fn normalize_conditional(net: &BigramNetwork) -> BigramNetwork {
    let mut out_totals: HashMap<&str, f64> = HashMap::new();
    for ((s, _), w) in &net.edges {
        *out_totals.entry(s.as_str()).or_default() += w;
    }
    let edges = net
        .edges
        .iter()
        .map(|((s, t), w)| ((s.clone(), t.clone()), w / out_totals[s.as_str()]))
        .collect();
    BigramNetwork {
        nodes: net.nodes.clone(),
        edges,
        weight_mode: WeightMode::ConditionalProbability,
    }
}

/// Dense adjacency matrix in `node_order`; absent edges are 0.
pub fn to_matrix(net: &BigramNetwork, node_order: &[String]) -> Result<SquareMatrix> {
    if node_order.len() != net.nodes.len() {
        return Err(Error::NodeOrderMismatch);
    }
    let mut index = HashMap::with_capacity(node_order.len());
    for (i, node) in node_order.iter().enumerate() {
        if !net.nodes.contains(node) || index.insert(node.as_str(), i).is_some() {
            return Err(Error::NodeOrderMismatch);
        }
    }
    let mut m = SquareMatrix::zeros(node_order.len());
    for ((s, t), w) in &net.edges {
        m[(index[s.as_str()], index[t.as_str()])] = *w;
    }
    Ok(m)
}

/// Dense CSV with node labels as the first row and column.
pub fn write_matrix_csv<W: Write>(matrix: &SquareMatrix, labels: &[String], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    let header: Vec<&str> = std::iter::once("").chain(labels.iter().map(String::as_str)).collect();
    w.write_record(&header)?;
    for (i, label) in labels.iter().enumerate() {
        let mut row = Vec::with_capacity(labels.len() + 1);
        row.push(label.clone());
        row.extend(matrix.row(i).iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
