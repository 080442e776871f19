//! File formats: Pajek NET, the network interchange JSON, and the CSV/JSON
//! report schemas.
//!
//! All writers produce UTF-8 with LF line endings. Floating-point values in
//! CSV reports carry 6 significant digits; JSON keeps full precision so that
//! recommendation evidence can be re-evaluated exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audit::{BoxplotSummary, Composition, CrossTab, Recommendation, SeriesBundle};
use crate::centrality::{CorrelationMatrix, NodeScores, Quartile};
use crate::cocit::{CoCitationNetwork, GraphError, JournalNode};
use crate::rules::{DanishLevel, ErihDiscipline, JournalDossier};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: malformed header: {message}")]
    MalformedHeader { line: usize, message: String },
    #[error("line {line}: edge references vertex {id} outside 1..={count}")]
    DanglingEdge { line: usize, id: usize, count: usize },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Formats a number with 6 significant digits, `%g` style: fixed notation
/// for decimal exponents in [-4, 6), scientific otherwise, trailing zeros
/// removed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Integral values print without a fractional part; others use the shortest
/// representation that reads back to the same `f64`.
fn fmt_weight(w: f64) -> String {
    format!("{w}")
}

pub fn write_file(path: impl AsRef<Path>, contents: &str) -> Result<(), FormatError> {
    fs::write(path, contents)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Pajek NET

/// Serializes a network as Pajek NET: vertices in name order, edges with
/// `i < j` sorted by `(i, j)`. Double quotes inside labels become single
/// quotes since NET has no escape syntax.
pub fn write_pajek(net: &CoCitationNetwork) -> String {
    let mut out = format!("*Vertices {}\n", net.node_count());
    for (i, node) in net.nodes().iter().enumerate() {
        out.push_str(&format!("{} \"{}\"\n", i + 1, node.name.replace('"', "'")));
    }
    out.push_str("*Edges\n");
    for (i, j, w) in net.edges() {
        out.push_str(&format!("{} {} {}\n", i + 1, j + 1, fmt_weight(w)));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PajekImport {
    pub network: CoCitationNetwork,
    pub warnings: Vec<String>,
    /// Always set: NET carries no citation counts, so they are rebuilt as
    /// the rounded-up weighted degree.
    pub lossy: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Vertices,
    Edges,
    Arcs,
}

fn parse_vertex_line(line: &str, lineno: usize) -> Result<(usize, String), FormatError> {
    let malformed = |message: &str| FormatError::Malformed { line: lineno, message: message.into() };
    let line = line.trim();
    let split = line.find(char::is_whitespace).unwrap_or(line.len());
    let id: usize = line[..split].parse().map_err(|_| malformed("vertex id is not a number"))?;
    let rest = line[split..].trim_start();
    let label = if let Some(quoted) = rest.strip_prefix('"') {
        let end = quoted.find('"').ok_or_else(|| malformed("unterminated vertex label"))?;
        quoted[..end].to_string()
    } else {
        rest.split_whitespace().next().map_or_else(|| id.to_string(), str::to_string)
    };
    Ok((id, label))
}

/// Parses Pajek NET text. `*Arcs` are symmetrized by summing both
/// directions; a pair listed twice in `*Edges` (or the same arc twice) is
/// summed with a warning. Self-loops are dropped with a warning.
pub fn read_pajek(text: &str) -> Result<PajekImport, FormatError> {
    let mut section = Section::None;
    let mut count = 0usize;
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut undirected: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut arcs_seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut warnings = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(keyword) = line.strip_prefix('*') {
            let mut parts = keyword.split_whitespace();
            let name = parts.next().unwrap_or("").to_ascii_lowercase();
            section = match name.as_str() {
                "vertices" => {
                    if section != Section::None {
                        return Err(FormatError::MalformedHeader {
                            line: lineno,
                            message: "repeated *Vertices section".into(),
                        });
                    }
                    count = parts.next().and_then(|n| n.parse().ok()).ok_or_else(|| FormatError::MalformedHeader {
                        line: lineno,
                        message: "*Vertices needs a count".into(),
                    })?;
                    labels = vec![None; count];
                    Section::Vertices
                }
                "edges" | "arcs" if section == Section::None => {
                    return Err(FormatError::MalformedHeader {
                        line: lineno,
                        message: format!("*{name} before *Vertices"),
                    })
                }
                "edges" => Section::Edges,
                "arcs" => Section::Arcs,
                other => {
                    return Err(FormatError::MalformedHeader {
                        line: lineno,
                        message: format!("unsupported section *{other}"),
                    })
                }
            };
            continue;
        }
        match section {
            Section::None => {
                return Err(FormatError::MalformedHeader { line: lineno, message: "content before *Vertices".into() })
            }
            Section::Vertices => {
                let (id, label) = parse_vertex_line(line, lineno)?;
                if id == 0 || id > count {
                    return Err(FormatError::Malformed {
                        line: lineno,
                        message: format!("vertex id {id} outside 1..={count}"),
                    });
                }
                if labels[id - 1].replace(label).is_some() {
                    return Err(FormatError::Malformed { line: lineno, message: format!("vertex {id} listed twice") });
                }
            }
            Section::Edges | Section::Arcs => {
                let fields: Vec<&str> = line.split_whitespace().collect();
                let malformed = |message: String| FormatError::Malformed { line: lineno, message };
                if fields.len() < 2 {
                    return Err(malformed("edge line needs two vertex ids".into()));
                }
                let mut ids = [0usize; 2];
                for (slot, f) in ids.iter_mut().zip(&fields) {
                    *slot = f.parse().map_err(|_| malformed(format!("bad vertex id `{f}`")))?;
                    if *slot == 0 || *slot > count {
                        return Err(FormatError::DanglingEdge { line: lineno, id: *slot, count });
                    }
                }
                let w: f64 = match fields.get(2) {
                    Some(f) => f.parse().map_err(|_| malformed(format!("bad weight `{f}`")))?,
                    None => 1.0,
                };
                if !(w.is_finite() && w > 0.0) {
                    return Err(malformed(format!("weight {w} must be positive")));
                }
                let (a, b) = (ids[0] - 1, ids[1] - 1);
                if a == b {
                    warnings.push(format!("line {lineno}: self-loop on vertex {} dropped", ids[0]));
                    continue;
                }
                let key = (a.min(b), a.max(b));
                let duplicate =
                    if section == Section::Arcs { !arcs_seen.insert((a, b)) } else { undirected.contains_key(&key) };
                if duplicate {
                    warnings.push(format!("line {lineno}: duplicate edge {} {} summed", ids[0], ids[1]));
                }
                *undirected.entry(key).or_insert(0.0) += w;
            }
        }
    }
    if section == Section::None {
        return Err(FormatError::MalformedHeader { line: 0, message: "no *Vertices section".into() });
    }

    let names: Vec<String> =
        labels.into_iter().enumerate().map(|(i, l)| l.unwrap_or_else(|| (i + 1).to_string())).collect();
    let mut strength = vec![0.0; count];
    for (&(a, b), &w) in &undirected {
        strength[a] += w;
        strength[b] += w;
    }
    let nodes = names
        .iter()
        .zip(&strength)
        .map(|(name, &s)| JournalNode { name: name.clone(), citations: s.ceil() as u64 })
        .collect();
    let edges = undirected.into_iter().map(|((a, b), w)| (names[a].clone(), names[b].clone(), w));
    let network = CoCitationNetwork::new(0, nodes, edges)?;
    Ok(PajekImport { network, warnings, lossy: true })
}

// ---------------------------------------------------------------------------
// Network interchange JSON

#[derive(Debug, Serialize, Deserialize)]
struct NetworkFile {
    year: i32,
    nodes: Vec<JournalNode>,
    edges: Vec<EdgeEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeEntry {
    a: String,
    b: String,
    w: f64,
}

/// `{year, nodes:[{name, citations}], edges:[{a, b, w}]}`, nodes name-sorted
/// and edges sorted by endpoint.
pub fn write_network_json(net: &CoCitationNetwork) -> String {
    let nodes = net.nodes();
    let file = NetworkFile {
        year: net.year(),
        nodes: nodes.to_vec(),
        edges: net
            .edges()
            .map(|(i, j, w)| EdgeEntry { a: nodes[i].name.clone(), b: nodes[j].name.clone(), w })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("network serializes");
    s.push('\n');
    s
}

pub fn read_network_json(text: &str) -> Result<CoCitationNetwork, FormatError> {
    let file: NetworkFile = serde_json::from_str(text)?;
    Ok(CoCitationNetwork::new(file.year, file.nodes, file.edges.into_iter().map(|e| (e.a, e.b, e.w)))?)
}

// ---------------------------------------------------------------------------
// CSV reports

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> String {
    let bytes = writer.into_inner().expect("in-memory csv flush");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

pub const SCORES_HEADER: [&str; 7] =
    ["journal", "degree", "weighted_degree", "closeness", "betweenness", "eigenvector", "quartile"];

pub fn write_scores_csv(rows: &[NodeScores]) -> String {
    let mut w = csv_writer();
    w.write_record(SCORES_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.journal.clone(),
            r.degree.to_string(),
            fmt_sig(r.weighted_degree),
            fmt_sig(r.closeness),
            fmt_sig(r.betweenness),
            fmt_sig(r.eigenvector),
            r.quartile.to_string(),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

/// Column positions of `names` in a CSV header.
fn header_positions(headers: &csv::StringRecord, names: &[&str]) -> Result<Vec<usize>, FormatError> {
    names
        .iter()
        .map(|n| headers.iter().position(|h| h.trim() == *n).ok_or_else(|| FormatError::MissingColumn(n.to_string())))
        .collect()
}

fn csv_rows<R: Read>(input: R, columns: &[&str]) -> Result<Vec<(usize, Vec<String>)>, FormatError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(input);
    let headers = reader.headers()?.clone();
    let pos = header_positions(&headers, columns)?;
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.iter().all(str::is_empty) {
            continue;
        }
        let values = pos.iter().map(|&i| row.get(i).unwrap_or("").to_string()).collect();
        out.push((line, values));
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(value: &str, line: usize, column: &str) -> Result<T, FormatError> {
    value
        .parse()
        .map_err(|_| FormatError::Malformed { line, message: format!("column `{column}`: cannot parse `{value}`") })
}

pub fn read_scores_csv<R: Read>(input: R) -> Result<Vec<NodeScores>, FormatError> {
    csv_rows(input, &SCORES_HEADER)?
        .into_iter()
        .map(|(line, v)| {
            Ok(NodeScores {
                journal: v[0].clone(),
                degree: parse_num(&v[1], line, "degree")?,
                weighted_degree: parse_num(&v[2], line, "weighted_degree")?,
                closeness: parse_num(&v[3], line, "closeness")?,
                betweenness: parse_num(&v[4], line, "betweenness")?,
                eigenvector: parse_num(&v[5], line, "eigenvector")?,
                quartile: v[6]
                    .parse::<Quartile>()
                    .map_err(|e| FormatError::Malformed { line, message: e.to_string() })?,
            })
        })
        .collect()
}

pub fn write_crosstab_csv(tab: &CrossTab) -> String {
    let mut w = csv_writer();
    w.write_record(["class", "Q1", "Q2", "Q3", "Q4", "Total"]).expect("in-memory write");
    for (label, counts) in tab.rows() {
        let mut rec = vec![label.to_string()];
        rec.extend(counts.iter().map(u64::to_string));
        rec.push(counts.iter().sum::<u64>().to_string());
        w.write_record(&rec).expect("in-memory write");
    }
    let mut total = vec!["Total".to_string()];
    total.extend(Quartile::ALL.iter().map(|&q| tab.column_total(q).to_string()));
    total.push(tab.grand_total().to_string());
    w.write_record(&total).expect("in-memory write");
    finish(w)
}

pub fn write_boxplot_csv(groups: &[BoxplotSummary]) -> String {
    let mut w = csv_writer();
    w.write_record([
        "class",
        "count",
        "min",
        "q1",
        "median",
        "q3",
        "max",
        "whisker_lo",
        "whisker_hi",
        "outliers",
        "skew",
    ])
    .expect("in-memory write");
    for g in groups {
        let outliers: Vec<String> = g.outliers.iter().map(|&o| fmt_sig(o)).collect();
        w.write_record([
            g.class.clone(),
            g.count.to_string(),
            fmt_sig(g.min),
            fmt_sig(g.q1),
            fmt_sig(g.median),
            fmt_sig(g.q3),
            fmt_sig(g.max),
            fmt_sig(g.whisker_lo),
            fmt_sig(g.whisker_hi),
            outliers.join(";"),
            g.skew.to_string(),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

/// `field,class,count,share`; per-class totals follow with field `*`.
pub fn write_composition_csv(c: &Composition) -> String {
    let mut w = csv_writer();
    w.write_record(["field", "class", "count", "share"]).expect("in-memory write");
    for cell in c.cells.iter().chain(&c.per_class) {
        w.write_record([cell.field.clone(), cell.class.clone(), cell.count.to_string(), fmt_sig(cell.share)])
            .expect("in-memory write");
    }
    finish(w)
}

/// Long format: `kind,measure_a,measure_b,value` with empty value when undefined.
pub fn write_correlations_csv(m: &CorrelationMatrix) -> String {
    let mut w = csv_writer();
    w.write_record(["kind", "measure_a", "measure_b", "value"]).expect("in-memory write");
    for (kind, matrix) in [("pearson", &m.pearson), ("spearman", &m.spearman)] {
        for (i, a) in m.measures.iter().enumerate() {
            for (j, b) in m.measures.iter().enumerate() {
                let value = matrix[i][j].map(fmt_sig).unwrap_or_default();
                w.write_record([kind.to_string(), a.to_string(), b.to_string(), value]).expect("in-memory write");
            }
        }
    }
    finish(w)
}

/// `journal,label[,points]` for classification output.
pub fn write_labels_csv(rows: &[(String, String, Option<f64>)]) -> String {
    let mut w = csv_writer();
    let with_points = rows.iter().any(|r| r.2.is_some());
    if with_points {
        w.write_record(["journal", "label", "points"]).expect("in-memory write");
    } else {
        w.write_record(["journal", "label"]).expect("in-memory write");
    }
    for (journal, label, points) in rows {
        let mut rec = vec![journal.clone(), label.clone()];
        if with_points {
            rec.push(points.map(fmt_sig).unwrap_or_default());
        }
        w.write_record(&rec).expect("in-memory write");
    }
    finish(w)
}

// ---------------------------------------------------------------------------
// JSON reports

/// JSON array of recommendations, sorted by journal name.
pub fn write_recommendations_json(recs: &[Recommendation]) -> String {
    let mut sorted: Vec<&Recommendation> = recs.iter().collect();
    sorted.sort_by(|a, b| a.journal.cmp(&b.journal));
    let mut s = serde_json::to_string_pretty(&sorted).expect("recommendations serialize");
    s.push('\n');
    s
}

pub fn write_series_json(bundle: &SeriesBundle) -> String {
    let mut s = serde_json::to_string_pretty(bundle).expect("series serialize");
    s.push('\n');
    s
}

pub fn read_series_json(text: &str) -> Result<SeriesBundle, FormatError> {
    Ok(serde_json::from_str(text)?)
}

// ---------------------------------------------------------------------------
// Input tables

pub const DOSSIER_HEADER: [&str; 11] = [
    "journal",
    "jcr_ss_quartile",
    "indexed_ssci",
    "indexed_ahci",
    "scopus_ipp_quartile",
    "ipp_value",
    "erih_plus",
    "erih_discipline",
    "fecyt_seal",
    "latindex_catalogue",
    "latindex_directory",
];

fn parse_bool(value: &str, line: usize, column: &str) -> Result<bool, FormatError> {
    match value {
        "true" => Ok(true),
        "false" | "" => Ok(false),
        other => Err(FormatError::Malformed {
            line,
            message: format!("column `{column}`: expected true/false, got `{other}`"),
        }),
    }
}

fn parse_opt<T: std::str::FromStr>(value: &str, line: usize, column: &str) -> Result<Option<T>, FormatError> {
    if value.is_empty() {
        Ok(None)
    } else {
        parse_num(value, line, column).map(Some)
    }
}

/// Reads a dossier CSV; every row must satisfy the dossier invariants.
pub fn read_dossiers_csv<R: Read>(input: R) -> Result<Vec<JournalDossier>, FormatError> {
    csv_rows(input, &DOSSIER_HEADER)?
        .into_iter()
        .map(|(line, v)| {
            let c = &DOSSIER_HEADER;
            let d = JournalDossier {
                journal: v[0].clone(),
                jcr_ss_quartile: parse_opt(&v[1], line, c[1])?,
                indexed_ssci: parse_bool(&v[2], line, c[2])?,
                indexed_ahci: parse_bool(&v[3], line, c[3])?,
                scopus_ipp_quartile: parse_opt(&v[4], line, c[4])?,
                ipp_value: parse_opt(&v[5], line, c[5])?,
                erih_plus: parse_bool(&v[6], line, c[6])?,
                erih_discipline: v[7]
                    .parse::<ErihDiscipline>()
                    .map_err(|e| FormatError::Malformed { line, message: e.to_string() })?,
                fecyt_seal: parse_bool(&v[8], line, c[8])?,
                latindex_catalogue: parse_bool(&v[9], line, c[9])?,
                latindex_directory: parse_bool(&v[10], line, c[10])?,
            };
            if d.journal.is_empty() {
                return Err(FormatError::Malformed { line, message: "empty journal name".into() });
            }
            d.validate().map_err(|e| FormatError::Malformed { line, message: e.to_string() })?;
            Ok(d)
        })
        .collect()
}

/// Reads a two-column `journal,<column>` table into a map.
pub fn read_pairs_csv<R: Read>(input: R, column: &str) -> Result<Vec<(usize, String, String)>, FormatError> {
    Ok(csv_rows(input, &["journal", column])?
        .into_iter()
        .map(|(line, mut v)| {
            let value = v.pop().unwrap_or_default();
            let journal = v.pop().unwrap_or_default();
            (line, journal, value)
        })
        .collect())
}

/// Danish levels file `journal,level` with level in {2,1,0}.
pub fn read_levels_csv<R: Read>(input: R) -> Result<BTreeMap<String, DanishLevel>, FormatError> {
    read_pairs_csv(input, "level")?
        .into_iter()
        .map(|(line, journal, level)| {
            let level =
                level.parse::<DanishLevel>().map_err(|e| FormatError::Malformed { line, message: e.to_string() })?;
            Ok((journal, level))
        })
        .collect()
}

/// Field-label file `journal,field`.
pub fn read_fields_csv<R: Read>(input: R) -> Result<BTreeMap<String, String>, FormatError> {
    Ok(read_pairs_csv(input, "field")?.into_iter().map(|(_, j, f)| (j, f)).collect())
}

/// Production file `journal,articles`.
pub fn read_production_csv<R: Read>(input: R) -> Result<BTreeMap<String, f64>, FormatError> {
    read_pairs_csv(input, "articles")?
        .into_iter()
        .map(|(line, j, n)| Ok((j, parse_num(&n, line, "articles")?)))
        .collect()
}
