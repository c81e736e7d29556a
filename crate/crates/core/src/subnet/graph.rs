use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::ngram::BigramNetwork;

/// Undirected simple-graph view of a bi-gram network: edge direction is
/// ignored, reciprocal edges collapse to one neighbour and self-loops are
/// dropped.
#[derive(Debug, Clone)]
pub struct UndirectedView<'a> {
    pub labels: Vec<&'a str>,
    pub adjacency: Vec<Vec<usize>>,
}

impl<'a> UndirectedView<'a> {
    pub fn new(net: &'a BigramNetwork) -> Self {
        let labels: Vec<&str> = net.nodes.iter().map(String::as_str).collect();
        let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut adjacency = vec![Vec::new(); labels.len()];
        for (s, t) in net.edges.keys() {
            let (Some(&a), Some(&b)) = (index.get(s.as_str()), index.get(t.as_str())) else {
                continue;
            };
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        UndirectedView { labels, adjacency }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    pub fn labels_of<I: IntoIterator<Item = usize>>(&self, idx: I) -> BTreeSet<String> {
        idx.into_iter().map(|i| self.labels[i].to_owned()).collect()
    }

    /// Nodes within `radius` hops of any source.
    pub fn ball(&self, sources: &[usize], radius: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            if dist[v] == radius {
                continue;
            }
            for &w in &self.adjacency[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        (0..self.len()).filter(|&v| dist[v] != usize::MAX).collect()
    }

    /// Core number of every node (Batagelj–Zaversnik bucket peeling).
    pub fn core_numbers(&self) -> Vec<usize> {
        let n = self.len();
        let mut degree: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let max_degree = degree.iter().copied().max().unwrap_or(0);

        // bin[d] = start of degree-d block in `vert`
        let mut bin = vec![0usize; max_degree + 2];
        for &d in &degree {
            bin[d + 1] += 1;
        }
        for d in 1..bin.len() {
            bin[d] += bin[d - 1];
        }
        let mut pos = vec![0usize; n];
        let mut vert = vec![0usize; n];
        {
            let mut next = bin.clone();
            for v in 0..n {
                pos[v] = next[degree[v]];
                vert[pos[v]] = v;
                next[degree[v]] += 1;
            }
        }

        for i in 0..n {
            let v = vert[i];
            for &u in &self.adjacency[v] {
                if degree[u] > degree[v] {
                    let du = degree[u];
                    let pu = pos[u];
                    let pw = bin[du];
                    let w = vert[pw];
                    if u != w {
                        vert.swap(pu, pw);
                        pos[u] = pw;
                        pos[w] = pu;
                    }
                    bin[du] += 1;
                    degree[u] -= 1;
                }
            }
        }
        degree
    }
}
