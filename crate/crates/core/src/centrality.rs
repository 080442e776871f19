//! Node centrality on co-citation networks: degree, closeness, betweenness
//! (Brandes) and eigenvector (power iteration), plus quartile binning and
//! inter-measure correlation.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cocit::CoCitationNetwork;
use crate::stats;

#[derive(Debug, Error, PartialEq)]
pub enum CentralityError {
    #[error("eigenvector centrality of an empty network")]
    EmptyNetwork,
    #[error("power iteration did not converge in {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("tolerance must be positive and max_iter at least 1")]
    InvalidParameters,
    #[error("correlation needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("unknown {kind} `{value}`")]
    Unknown { kind: &'static str, value: String },
}

/// Adjacency-list view of an undirected weighted graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adj: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    /// Builds a graph on nodes `0..n` from undirected `(u, v, weight)` edges.
    /// Self-loops are ignored.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            if u != v {
                adj[u].push((v, w));
                adj[v].push((u, w));
            }
        }
        for list in &mut adj {
            list.sort_by_key(|&(v, _)| v);
        }
        Graph { adj }
    }

    /// Graph over the network's nodes in name order.
    pub fn from_network(net: &CoCitationNetwork) -> Self {
        let edges: Vec<_> = net.edges().collect();
        Graph::from_edges(net.node_count(), &edges)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    /// Number of connected components (isolated nodes included).
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.node_count()];
        let mut components = 0;
        for start in 0..self.node_count() {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        components
    }

    fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &(w, _) in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Whether edge weights count (eigenvector, degree).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    Binary,
    Weighted,
}

/// Edge length used by shortest-path measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    /// Every edge has length 1.
    Binary,
    /// Edge length is `1 / weight`.
    InverseWeight,
}

impl FromStr for WeightMode {
    type Err = CentralityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary" => Ok(WeightMode::Binary),
            "weighted" => Ok(WeightMode::Weighted),
            _ => Err(CentralityError::Unknown { kind: "weight mode", value: s.into() }),
        }
    }
}

impl FromStr for PathMode {
    type Err = CentralityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary" => Ok(PathMode::Binary),
            "inverse_weight" | "inverse-weight" | "weighted" => Ok(PathMode::InverseWeight),
            _ => Err(CentralityError::Unknown { kind: "path mode", value: s.into() }),
        }
    }
}

pub fn degree_centrality(graph: &Graph, mode: WeightMode) -> Vec<f64> {
    graph
        .adj
        .iter()
        .map(|list| match mode {
            WeightMode::Binary => list.len() as f64,
            WeightMode::Weighted => list.iter().map(|&(_, w)| w).sum(),
        })
        .collect()
}

/// Closeness with unit edge lengths, scaled by component size so that nodes
/// in small components are not inflated: `(m-1)/Σd · (m-1)/(n-1)`.
pub fn closeness_centrality(graph: &Graph) -> Vec<f64> {
    let n = graph.node_count();
    (0..n)
        .into_par_iter()
        .map(|v| {
            let dist = graph.bfs_distances(v);
            let reached: Vec<usize> = dist.iter().flatten().copied().collect();
            let m = reached.len();
            let total: usize = reached.iter().sum();
            if m <= 1 || total == 0 || n <= 1 {
                0.0
            } else {
                let reach = (m - 1) as f64;
                (reach / total as f64) * (reach / (n - 1) as f64)
            }
        })
        .collect()
}

/// Relative tolerance for treating two weighted path lengths as equal.
const PATH_EQ_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then node id
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest-path DAG from one source: settle order, path counts, predecessors.
struct ShortestPaths {
    order: Vec<usize>,
    sigma: Vec<f64>,
    preds: Vec<Vec<usize>>,
}

fn shortest_paths_bfs(graph: &Graph, s: usize) -> ShortestPaths {
    let n = graph.node_count();
    let mut order = Vec::with_capacity(n);
    let mut sigma = vec![0.0; n];
    let mut preds = vec![Vec::new(); n];
    let mut dist: Vec<i64> = vec![-1; n];
    sigma[s] = 1.0;
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(w, _) in graph.neighbors(v) {
            if dist[w] < 0 {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    ShortestPaths { order, sigma, preds }
}

fn shortest_paths_dijkstra(graph: &Graph, s: usize) -> ShortestPaths {
    let n = graph.node_count();
    let mut order = Vec::with_capacity(n);
    let mut sigma = vec![0.0; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dist = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    sigma[s] = 1.0;
    dist[s] = 0.0;
    let mut heap = BinaryHeap::from([HeapItem { dist: 0.0, node: s }]);
    while let Some(HeapItem { dist: d, node: v }) = heap.pop() {
        if settled[v] || d > dist[v] {
            continue;
        }
        settled[v] = true;
        order.push(v);
        for &(w, weight) in graph.neighbors(v) {
            if settled[w] {
                continue;
            }
            let candidate = d + 1.0 / weight;
            let slack = PATH_EQ_RTOL * candidate.max(dist[w].min(candidate));
            if candidate < dist[w] - slack {
                dist[w] = candidate;
                sigma[w] = sigma[v];
                preds[w].clear();
                preds[w].push(v);
                heap.push(HeapItem { dist: candidate, node: w });
            } else if (candidate - dist[w]).abs() <= slack {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    ShortestPaths { order, sigma, preds }
}

/// Pair dependencies of every node on paths starting at `s`.
fn source_dependencies(graph: &Graph, s: usize, mode: PathMode) -> Vec<f64> {
    let sp = match mode {
        PathMode::Binary => shortest_paths_bfs(graph, s),
        PathMode::InverseWeight => shortest_paths_dijkstra(graph, s),
    };
    let mut delta = vec![0.0; graph.node_count()];
    for &w in sp.order.iter().rev() {
        let coeff = (1.0 + delta[w]) / sp.sigma[w];
        for &v in &sp.preds[w] {
            delta[v] += sp.sigma[v] * coeff;
        }
    }
    delta[s] = 0.0;
    delta
}

/// Sources handled per parallel batch; bounds the per-batch dependency buffers.
const SOURCE_BATCH: usize = 256;

/// Brandes betweenness for an undirected graph. Each unordered pair is
/// counted once; `normalized` divides by `(n-1)(n-2)/2`.
///
/// Per-source dependencies are computed in parallel and summed in source
/// order, so the result is bit-identical for any thread count.
pub fn betweenness_centrality(graph: &Graph, mode: PathMode, normalized: bool) -> Vec<f64> {
    let n = graph.node_count();
    let mut total = vec![0.0; n];
    let sources: Vec<usize> = (0..n).collect();
    for batch in sources.chunks(SOURCE_BATCH) {
        let partials: Vec<Vec<f64>> = batch.par_iter().map(|&s| source_dependencies(graph, s, mode)).collect();
        for partial in partials {
            for (t, d) in total.iter_mut().zip(partial) {
                *t += d;
            }
        }
    }
    let scale = if normalized && n > 2 { 0.5 / ((n - 1) * (n - 2) / 2) as f64 } else { 0.5 };
    total.iter_mut().for_each(|t| *t *= scale);
    total
}

/// Outcome of power iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvectorResult {
    /// L2-normalized, entrywise nonnegative.
    pub scores: Vec<f64>,
    pub eigenvalue: f64,
    pub iterations: usize,
    /// `‖Av − λv‖₂ / λ` at exit (absolute residual when λ = 0).
    pub residual: f64,
    /// Set when the graph has more than one component; the vector then
    /// concentrates on the dominant component.
    pub disconnected: bool,
}

/// Principal eigenvector of the adjacency matrix by power iteration from the
/// uniform vector.
///
/// Iterates on `A + σI` with σ equal to the mean edge weight. The shift keeps
/// the dominant eigenvalue strictly largest in magnitude, so bipartite graphs
/// (stars, trees) converge instead of oscillating; it does not change the
/// eigenvectors. Stops once the relative residual `‖Av − λv‖ / λ` with the
/// Rayleigh quotient λ drops to `tol`.
pub fn eigenvector_centrality(
    graph: &Graph,
    mode: WeightMode,
    tol: f64,
    max_iter: usize,
) -> Result<EigenvectorResult, CentralityError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(CentralityError::EmptyNetwork);
    }
    if tol.is_nan() || tol <= 0.0 || max_iter == 0 {
        return Err(CentralityError::InvalidParameters);
    }
    let weight = |w: f64| match mode {
        WeightMode::Binary => 1.0,
        WeightMode::Weighted => w,
    };
    let disconnected = graph.component_count() > 1;

    let (mut weight_sum, mut edge_entries) = (0.0, 0usize);
    for list in &graph.adj {
        for &(_, w) in list {
            weight_sum += weight(w);
            edge_entries += 1;
        }
    }
    let uniform = 1.0 / (n as f64).sqrt();
    if edge_entries == 0 {
        return Ok(EigenvectorResult {
            scores: vec![uniform; n],
            eigenvalue: 0.0,
            iterations: 0,
            residual: 0.0,
            disconnected,
        });
    }
    let shift = weight_sum / edge_entries as f64;

    let mut v = vec![uniform; n];
    let mut av = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iter {
        for (i, list) in graph.adj.iter().enumerate() {
            av[i] = list.iter().map(|&(j, w)| weight(w) * v[j]).sum();
        }
        let lambda: f64 = v.iter().zip(&av).map(|(a, b)| a * b).sum();
        let res_norm = v.iter().zip(&av).map(|(x, y)| (y - lambda * x).powi(2)).sum::<f64>().sqrt();
        residual = res_norm / lambda.abs();
        if residual <= tol {
            let scores = v.iter().map(|x| x.max(0.0)).collect();
            return Ok(EigenvectorResult { scores, eigenvalue: lambda, iterations: iteration, residual, disconnected });
        }
        for (x, y) in v.iter_mut().zip(&av) {
            *x = y + shift * *x;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
    Err(CentralityError::NoConvergence { iterations: max_iter, residual })
}

/// Quartile bin, Q1 holding the highest scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quartile {
    Q1,
    Q2,
    Q3,
    Q4,
}

impl Quartile {
    pub const ALL: [Quartile; 4] = [Quartile::Q1, Quartile::Q2, Quartile::Q3, Quartile::Q4];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Quartile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}", self.index() + 1)
    }
}

impl FromStr for Quartile {
    type Err = CentralityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Q1" => Ok(Quartile::Q1),
            "Q2" => Ok(Quartile::Q2),
            "Q3" => Ok(Quartile::Q3),
            "Q4" => Ok(Quartile::Q4),
            _ => Err(CentralityError::Unknown { kind: "quartile", value: s.into() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuartileAssignment {
    pub bins: Vec<Quartile>,
    /// 75th, 50th and 25th percentile of the scores.
    pub thresholds: [f64; 3],
}

/// Bins scores by value thresholds at the 75th/50th/25th percentiles
/// (linear interpolation). Equal scores always land in the same bin, so bin
/// sizes can be unequal.
pub fn quartile_bins(scores: &[f64]) -> QuartileAssignment {
    if scores.is_empty() {
        return QuartileAssignment { bins: Vec::new(), thresholds: [0.0; 3] };
    }
    let sorted = stats::sorted_copy(scores);
    let thresholds = [
        stats::percentile_sorted(&sorted, 0.75),
        stats::percentile_sorted(&sorted, 0.50),
        stats::percentile_sorted(&sorted, 0.25),
    ];
    let bins = scores
        .iter()
        .map(|&s| {
            if s >= thresholds[0] {
                Quartile::Q1
            } else if s >= thresholds[1] {
                Quartile::Q2
            } else if s >= thresholds[2] {
                Quartile::Q3
            } else {
                Quartile::Q4
            }
        })
        .collect();
    QuartileAssignment { bins, thresholds }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Degree,
    WeightedDegree,
    Closeness,
    Betweenness,
    Eigenvector,
}

impl Measure {
    pub const ALL: [Measure; 5] =
        [Measure::Degree, Measure::WeightedDegree, Measure::Closeness, Measure::Betweenness, Measure::Eigenvector];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Degree => "degree",
            Measure::WeightedDegree => "weighted_degree",
            Measure::Closeness => "closeness",
            Measure::Betweenness => "betweenness",
            Measure::Eigenvector => "eigenvector",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = CentralityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| CentralityError::Unknown { kind: "measure", value: s.into() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralityConfig {
    pub eigenvector_mode: WeightMode,
    pub betweenness_mode: PathMode,
    pub normalize_betweenness: bool,
    pub tolerance: f64,
    pub max_iter: usize,
    /// Measure the quartile column is computed from.
    pub quartile_measure: Measure,
}

impl Default for CentralityConfig {
    fn default() -> Self {
        CentralityConfig {
            eigenvector_mode: WeightMode::Weighted,
            betweenness_mode: PathMode::Binary,
            normalize_betweenness: false,
            tolerance: 1e-10,
            max_iter: 10_000,
            quartile_measure: Measure::Eigenvector,
        }
    }
}

/// All scores for one journal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeScores {
    pub journal: String,
    pub degree: usize,
    pub weighted_degree: f64,
    pub closeness: f64,
    pub betweenness: f64,
    pub eigenvector: f64,
    pub quartile: Quartile,
}

impl NodeScores {
    pub fn get(&self, measure: Measure) -> f64 {
        match measure {
            Measure::Degree => self.degree as f64,
            Measure::WeightedDegree => self.weighted_degree,
            Measure::Closeness => self.closeness,
            Measure::Betweenness => self.betweenness,
            Measure::Eigenvector => self.eigenvector,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMeta {
    pub config: CentralityConfig,
    pub iterations: usize,
    pub eigenvalue: f64,
    pub residual: f64,
    pub disconnected: bool,
    pub quartile_thresholds: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityReport {
    /// One row per node, in network (name) order.
    pub rows: Vec<NodeScores>,
    pub meta: RunMeta,
}

/// Computes every measure for every node of `net`.
pub fn compute_report(net: &CoCitationNetwork, cfg: &CentralityConfig) -> Result<CentralityReport, CentralityError> {
    let graph = Graph::from_network(net);
    let degree = degree_centrality(&graph, WeightMode::Binary);
    let weighted = degree_centrality(&graph, WeightMode::Weighted);
    let closeness = closeness_centrality(&graph);
    let betweenness = betweenness_centrality(&graph, cfg.betweenness_mode, cfg.normalize_betweenness);
    let eigen = eigenvector_centrality(&graph, cfg.eigenvector_mode, cfg.tolerance, cfg.max_iter)?;

    let mut rows: Vec<NodeScores> = net
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, node)| NodeScores {
            journal: node.name.clone(),
            degree: degree[i] as usize,
            weighted_degree: weighted[i],
            closeness: closeness[i],
            betweenness: betweenness[i],
            eigenvector: eigen.scores[i],
            quartile: Quartile::Q4,
        })
        .collect();
    let basis: Vec<f64> = rows.iter().map(|r| r.get(cfg.quartile_measure)).collect();
    let bins = quartile_bins(&basis);
    for (row, bin) in rows.iter_mut().zip(&bins.bins) {
        row.quartile = *bin;
    }
    Ok(CentralityReport {
        rows,
        meta: RunMeta {
            config: *cfg,
            iterations: eigen.iterations,
            eigenvalue: eigen.eigenvalue,
            residual: eigen.residual,
            disconnected: eigen.disconnected,
            quartile_thresholds: bins.thresholds,
        },
    })
}

/// Pairwise correlations between measures. Entries involving a measure that
/// is constant across nodes are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub measures: Vec<Measure>,
    pub pearson: Vec<Vec<Option<f64>>>,
    pub spearman: Vec<Vec<Option<f64>>>,
    /// Measures that were constant (the degenerate rows/columns).
    pub undefined: Vec<Measure>,
}

pub fn correlate_measures(rows: &[NodeScores]) -> Result<CorrelationMatrix, CentralityError> {
    if rows.len() < 3 {
        return Err(CentralityError::TooFewNodes(rows.len()));
    }
    let measures = Measure::ALL.to_vec();
    let columns: Vec<Vec<f64>> = measures.iter().map(|&m| rows.iter().map(|r| r.get(m)).collect()).collect();
    let constant: Vec<bool> = columns.iter().map(|c| c.iter().all(|&x| x == c[0])).collect();
    let k = measures.len();
    let mut pearson = vec![vec![None; k]; k];
    let mut spearman = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            if constant[i] || constant[j] {
                continue;
            }
            let (p, s) = if i == j {
                (Some(1.0), Some(1.0))
            } else {
                (stats::pearson(&columns[i], &columns[j]), stats::spearman(&columns[i], &columns[j]))
            };
            pearson[i][j] = p;
            pearson[j][i] = p;
            spearman[i][j] = s;
            spearman[j][i] = s;
        }
    }
    let undefined = measures.iter().zip(&constant).filter(|(_, &c)| c).map(|(&m, _)| m).collect();
    Ok(CorrelationMatrix { measures, pearson, spearman, undefined })
}
