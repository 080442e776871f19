//! Journal citation counting and co-citation network construction.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{AliasTable, BibRecord};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("no journal meets the threshold of {min_citations} citations")]
    EmptyResult { min_citations: u64 },
    #[error("threshold parameters must be at least 1")]
    InvalidThreshold,
    #[error("edge endpoint `{0}` is not a node")]
    UnknownNode(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("edge {0}-{1} has non-positive or non-finite weight {2}")]
    BadWeight(String, String, f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalNode {
    pub name: String,
    pub citations: u64,
}

/// Undirected weighted co-citation network.
///
/// Nodes are kept sorted by name and edges are keyed by `(i, j)` with `i < j`
/// over node indices, so symmetry and the absence of self-loops hold by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CoCitationNetwork {
    year: i32,
    nodes: Vec<JournalNode>,
    edges: BTreeMap<(usize, usize), f64>,
}

impl CoCitationNetwork {
    /// Builds a network from named nodes and name-keyed edges. Edge endpoints
    /// are unordered; repeated pairs are summed.
    pub fn new(
        year: i32,
        nodes: Vec<JournalNode>,
        edges: impl IntoIterator<Item = (String, String, f64)>,
    ) -> Result<Self, GraphError> {
        let mut nodes = nodes;
        nodes.sort_by(|a, b| a.name.cmp(&b.name));
        for pair in nodes.windows(2) {
            if pair[0].name == pair[1].name {
                return Err(GraphError::DuplicateNode(pair[0].name.clone()));
            }
        }
        let mut net = CoCitationNetwork { year, nodes, edges: BTreeMap::new() };
        for (a, b, w) in edges {
            if !(w.is_finite() && w > 0.0) {
                return Err(GraphError::BadWeight(a, b, w));
            }
            let i = net.index_of(&a).ok_or_else(|| GraphError::UnknownNode(a.clone()))?;
            let j = net.index_of(&b).ok_or_else(|| GraphError::UnknownNode(b.clone()))?;
            if i == j {
                return Err(GraphError::SelfLoop(a));
            }
            *net.edges.entry((i.min(j), i.max(j))).or_insert(0.0) += w;
        }
        Ok(net)
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn set_year(&mut self, year: i32) {
        self.year = year;
    }

    /// Nodes in name order.
    pub fn nodes(&self) -> &[JournalNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.name.as_str().cmp(name)).ok()
    }

    /// Edges as `(i, j, weight)` with `i < j`, sorted by `(i, j)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    /// Co-citation weight between two journals, 0 when not linked.
    pub fn weight(&self, a: &str, b: &str) -> f64 {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) if i != j => self.edges.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0),
            _ => 0.0,
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.values().sum()
    }

    /// Keeps only the nodes for which `keep` returns true and the edges
    /// between them.
    fn retain_nodes(&self, keep: impl Fn(&JournalNode) -> bool) -> CoCitationNetwork {
        let mut remap = vec![None; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if keep(node) {
                remap[i] = Some(nodes.len());
                nodes.push(node.clone());
            }
        }
        let edges = self.edges.iter().filter_map(|(&(i, j), &w)| Some(((remap[i]?, remap[j]?), w))).collect();
        CoCitationNetwork { year: self.year, nodes, edges }
    }
}

/// Minimum citation count per journal and cap on the number of retained journals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub min_citations: u64,
    pub top_n: usize,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig { min_citations: 111, top_n: 151 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ThresholdReport {
    pub total_nodes: usize,
    pub above_threshold: usize,
    pub retained_nodes: usize,
    pub retained_edges: usize,
}

/// Distinct canonical journals cited by each record.
fn distinct_journals(records: &[BibRecord], aliases: &AliasTable) -> Vec<BTreeSet<String>> {
    records.par_iter().map(|r| r.cited_journals(aliases).into_iter().collect()).collect()
}

/// Number of records citing each journal. A record counts at most once per journal.
pub fn count_citations(records: &[BibRecord], aliases: &AliasTable) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for set in distinct_journals(records, aliases) {
        for journal in set {
            *counts.entry(journal).or_insert(0) += 1;
        }
    }
    counts
}

/// Unthresholded co-citation network: each record adds 1 to every unordered
/// pair of distinct journals it cites. The year label is the latest
/// publication year in the corpus (0 for an empty corpus).
pub fn build_cocitation(records: &[BibRecord], aliases: &AliasTable) -> CoCitationNetwork {
    let sets = distinct_journals(records, aliases);

    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for set in &sets {
        for journal in set {
            *counts.entry(journal.as_str()).or_insert(0) += 1;
        }
    }
    let names: Vec<&str> = counts.keys().copied().collect();
    let index = |name: &str| names.binary_search(&name).expect("journal counted above");

    // Integer pair counts merge associatively, so the result does not depend
    // on how rayon splits the work.
    let pair_counts = sets
        .par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<(usize, usize), u64>, set| {
            let ids: Vec<usize> = set.iter().map(|j| index(j)).collect();
            for (k, &i) in ids.iter().enumerate() {
                for &j in &ids[k + 1..] {
                    *acc.entry((i, j)).or_insert(0) += 1;
                }
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });

    let nodes = counts.iter().map(|(name, &citations)| JournalNode { name: name.to_string(), citations }).collect();
    let edges = pair_counts.into_iter().map(|(k, v)| (k, v as f64)).collect();
    let year = records.iter().map(|r| r.pub_year).max().unwrap_or(0);
    CoCitationNetwork { year, nodes, edges }
}

/// Keeps journals with at least `min_citations` citations, then at most
/// `top_n` of them by citation count (descending, ties by name ascending).
pub fn apply_threshold(
    net: &CoCitationNetwork,
    cfg: &ThresholdConfig,
) -> Result<(CoCitationNetwork, ThresholdReport), GraphError> {
    if cfg.min_citations == 0 || cfg.top_n == 0 {
        return Err(GraphError::InvalidThreshold);
    }
    let mut eligible: Vec<&JournalNode> = net.nodes.iter().filter(|n| n.citations >= cfg.min_citations).collect();
    if eligible.is_empty() {
        return Err(GraphError::EmptyResult { min_citations: cfg.min_citations });
    }
    let above_threshold = eligible.len();
    eligible.sort_by(|a, b| b.citations.cmp(&a.citations).then_with(|| a.name.cmp(&b.name)));
    eligible.truncate(cfg.top_n);
    let kept: BTreeSet<&str> = eligible.iter().map(|n| n.name.as_str()).collect();

    let out = net.retain_nodes(|n| kept.contains(n.name.as_str()));
    let report = ThresholdReport {
        total_nodes: net.node_count(),
        above_threshold,
        retained_nodes: out.node_count(),
        retained_edges: out.edge_count(),
    };
    Ok((out, report))
}
