#![allow(dead_code)]

use std::collections::BTreeMap;

use journalnet::centrality::Graph;
use journalnet::rules::ErihDiscipline;
use journalnet::{ClassLabel, CoCitationNetwork, DanishLevel, JournalDossier, JournalNode};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected graph: a random spanning tree plus extra edges with
/// probability `p`. Weights are integers in 1..=10 when `weighted`, else 1.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, p: f64, weighted: bool) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    let mut present = vec![vec![false; n]; n];
    let weight = |rng: &mut ChaCha8Rng| if weighted { rng.random_range(1..=10) as f64 } else { 1.0 };
    for v in 1..n {
        let u = rng.random_range(0..v);
        present[u][v] = true;
        edges.push((u, v, weight(rng)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present[u][v] && rng.random_bool(p) {
                edges.push((u, v, weight(rng)));
            }
        }
    }
    edges
}

/// Betweenness by explicit enumeration: all-pairs distances by
/// Floyd-Warshall, then every shortest path between each unordered pair is
/// walked and its interior nodes credited `1 / #paths`.
pub fn brute_force_betweenness(n: usize, edges: &[(usize, usize, f64)], inverse_weight: bool) -> Vec<f64> {
    let mut len = vec![vec![f64::INFINITY; n]; n];
    for i in 0..n {
        len[i][i] = 0.0;
    }
    for &(u, v, w) in edges {
        let l = if inverse_weight { 1.0 / w } else { 1.0 };
        len[u][v] = l;
        len[v][u] = l;
    }
    let edge_len = len.clone();
    let mut dist = len;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if dist[i][k] + dist[k][j] < dist[i][j] {
                    dist[i][j] = dist[i][k] + dist[k][j];
                }
            }
        }
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);

    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            if !dist[s][t].is_finite() {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let u = *path.last().unwrap();
                if u == t {
                    paths.push(path);
                    continue;
                }
                for v in 0..n {
                    if v == u || !edge_len[u][v].is_finite() || path.contains(&v) {
                        continue;
                    }
                    if close(dist[s][u] + edge_len[u][v] + dist[v][t], dist[s][t]) {
                        let mut next = path.clone();
                        next.push(v);
                        stack.push(next);
                    }
                }
            }
            let total = paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    bc[v] += 1.0 / total;
                }
            }
        }
    }
    bc
}

/// Principal eigenvector from a dense symmetric eigendecomposition, sign
/// aligned to a positive sum and L2-normalized.
pub fn dense_principal_eigenvector(n: usize, edges: &[(usize, usize, f64)]) -> (Vec<f64>, f64) {
    let mut a = DMatrix::<f64>::zeros(n, n);
    for &(u, v, w) in edges {
        a[(u, v)] += w;
        a[(v, u)] += w;
    }
    let eig = SymmetricEigen::new(a);
    let (idx, &lambda) = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let col = eig.eigenvectors.column(idx);
    let sign = if col.sum() < 0.0 { -1.0 } else { 1.0 };
    let norm = col.norm();
    (col.iter().map(|x| sign * x / norm).collect(), lambda)
}

pub fn graph(n: usize, edges: &[(usize, usize, f64)]) -> Graph {
    Graph::from_edges(n, edges)
}

/// Network from index edges with node names `N00`, `N01`, ... so that name
/// order equals index order.
pub fn network(year: i32, n: usize, edges: &[(usize, usize, f64)]) -> CoCitationNetwork {
    let name = |i: usize| format!("N{i:02}");
    let nodes = (0..n).map(|i| JournalNode { name: name(i), citations: 1_000 }).collect();
    CoCitationNetwork::new(year, nodes, edges.iter().map(|&(a, b, w)| (name(a), name(b), w))).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Synthetic record export: 4,000-ish records citing journals from topical
/// clusters, with a popularity skew so that a long tail falls below the
/// citation threshold.
pub struct CorpusSpec {
    pub records: usize,
    pub journals: usize,
    pub clusters: usize,
    pub refs_per_record: usize,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec { records: 4_000, journals: 260, clusters: 8, refs_per_record: 24, seed: 2015 }
    }
}

pub fn journal_name(k: usize) -> String {
    format!("J SYNTH {k:03}")
}

pub fn synthetic_tsv(spec: &CorpusSpec) -> String {
    let mut rng = rng(spec.seed);
    let mut out = String::from("id\tyear\tsource\tcited\n");
    let per_cluster = spec.journals / spec.clusters;
    for r in 0..spec.records {
        let cluster = rng.random_range(0..spec.clusters);
        let refs: Vec<String> = (0..spec.refs_per_record)
            .map(|_| {
                let k = if rng.random_bool(0.6) {
                    cluster * per_cluster + rng.random_range(0..per_cluster)
                } else {
                    // skewed global draw: low indices are popular
                    let u: f64 = rng.random();
                    ((u * u) * spec.journals as f64) as usize
                };
                let year = 1990 + rng.random_range(0..25);
                format!("Author{}, {year}, {}, V{}, P{}", k % 97, journal_name(k), k % 40 + 1, rng.random_range(1..500))
            })
            .collect();
        out.push_str(&format!("W{r:05}\t2015\t{}\t{}\n", journal_name(cluster * per_cluster), refs.join("; ")));
    }
    out
}

/// Deterministic level assignment for synthetic journals.
pub fn synthetic_levels(names: &[String]) -> BTreeMap<String, DanishLevel> {
    names
        .iter()
        .enumerate()
        .filter(|(i, _)| i % 13 != 0)
        .map(|(i, n)| {
            let level = match i % 5 {
                0..=2 => DanishLevel::Level2,
                3 => DanishLevel::Level1,
                _ => DanishLevel::NotListed,
            };
            (n.clone(), level)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// CIRC decision table

pub fn dossiers() -> Vec<JournalDossier> {
    let quartiles = [None, Some(1), Some(2), Some(3), Some(4)];
    let ipp_values = [None, Some(0.0), Some(0.5)];
    let disciplines = [ErihDiscipline::None, ErihDiscipline::SocialSciences, ErihDiscipline::Humanities];
    let mut out = Vec::new();
    for bits in 0u32..64 {
        let bit = |k: u32| bits & (1 << k) != 0;
        for jcr in quartiles {
            for ipp_q in quartiles {
                for ipp in ipp_values {
                    for disc in disciplines {
                        out.push(JournalDossier {
                            journal: "J".into(),
                            jcr_ss_quartile: jcr,
                            indexed_ssci: bit(0),
                            indexed_ahci: bit(1),
                            scopus_ipp_quartile: ipp_q,
                            ipp_value: ipp,
                            erih_plus: bit(2),
                            erih_discipline: disc,
                            fecyt_seal: bit(3),
                            latindex_catalogue: bit(4),
                            latindex_directory: bit(5),
                        });
                    }
                }
            }
        }
    }
    out
}

pub type Bullet = (ClassLabel, fn(&JournalDossier) -> bool);

/// One entry per criterion bullet of the Social Sciences column.
pub const SOCIAL_BULLETS: [Bullet; 10] = [
    (ClassLabel::APlus, |d| d.jcr_ss_quartile == Some(1)),
    (ClassLabel::A, |d| (d.indexed_ssci || d.indexed_ahci) && d.jcr_ss_quartile != Some(4)),
    (ClassLabel::A, |d| d.scopus_ipp_quartile == Some(1)),
    (ClassLabel::B, |d| d.jcr_ss_quartile == Some(4)),
    (ClassLabel::B, |d| {
        [Some(2), Some(3), Some(4)].contains(&d.scopus_ipp_quartile) && d.ipp_value.is_some_and(|v| v > 0.0)
    }),
    (ClassLabel::B, |d| d.fecyt_seal),
    (ClassLabel::C, |d| d.ipp_value == Some(0.0)),
    (ClassLabel::C, |d| d.erih_plus && d.erih_discipline == ErihDiscipline::SocialSciences),
    (ClassLabel::C, |d| d.latindex_catalogue),
    (ClassLabel::D, |d| d.latindex_directory),
];

pub const HUMANITIES_BULLETS: [Bullet; 2] = [
    (ClassLabel::APlus, |d| d.indexed_ahci && d.scopus_ipp_quartile == Some(1)),
    (ClassLabel::B, |d| d.erih_plus && d.erih_discipline == ErihDiscipline::Humanities),
];

pub fn circ_oracle(bullets: &[Bullet], d: &JournalDossier) -> ClassLabel {
    bullets.iter().filter(|(_, fires)| fires(d)).map(|(c, _)| *c).max().unwrap_or(ClassLabel::NotIncluded)
}
