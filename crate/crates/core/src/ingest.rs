//! Bibliographic record parsing and journal-name canonicalization.
//!
//! Records arrive as a tab-separated export with a header row. Each row is one
//! citing article; its cited-reference cell holds `; `-separated reference
//! strings in the `Author, Year, JOURNAL, Volume, Page` convention.

use std::collections::{BTreeMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("header lacks mapped column `{0}`")]
    MissingColumn(String),
    #[error("input has no data rows")]
    EmptyInput,
    #[error("alias table line {line}: {message}")]
    BadAlias { line: u64, message: String },
    #[error("alias cycle through `{0}`")]
    AliasCycle(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One citing article and the raw reference strings it cites.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibRecord {
    pub record_id: String,
    pub pub_year: i32,
    pub source_journal: String,
    pub cited_refs: Vec<String>,
}

impl BibRecord {
    /// Canonical names of the journals this record cites, in reference order.
    /// Unparseable references are dropped; duplicates are kept.
    pub fn cited_journals(&self, aliases: &AliasTable) -> Vec<String> {
        self.cited_refs
            .iter()
            .filter_map(|r| extract_cited_journal(r))
            .map(|j| normalize_name(&j, aliases))
            .filter(|j| !j.is_empty())
            .collect()
    }
}

/// Column names used to locate record fields in the header row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatConfig {
    pub id_column: String,
    pub year_column: String,
    pub source_column: String,
    pub cited_column: String,
}

impl Default for FormatConfig {
    fn default() -> Self {
        FormatConfig {
            id_column: "id".into(),
            year_column: "year".into(),
            source_column: "source".into(),
            cited_column: "cited".into(),
        }
    }
}

/// A data row that was not turned into a record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedRow {
    /// 1-based line number in the input, header included.
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedRecords {
    pub records: Vec<BibRecord>,
    pub skipped: Vec<SkippedRow>,
}

/// Parses a tab-separated record export.
///
/// Rows with an unparseable or out-of-range year, too few columns, an empty
/// id, or an id already seen are skipped and reported; order is preserved.
pub fn parse_records<R: Read>(input: R, cfg: &FormatConfig) -> Result<ParsedRecords, IngestError> {
    let mut reader =
        csv::ReaderBuilder::new().delimiter(b'\t').quoting(false).flexible(true).has_headers(true).from_reader(input);

    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let id_idx = column(&cfg.id_column)?;
    let year_idx = column(&cfg.year_column)?;
    let source_idx = column(&cfg.source_column)?;
    let cited_idx = column(&cfg.cited_column)?;

    let mut out = ParsedRecords::default();
    let mut seen: HashSet<String> = HashSet::new();
    let mut rows = 0usize;
    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        rows += 1;
        let mut skip = |reason: String| out.skipped.push(SkippedRow { line, reason });

        let (Some(id), Some(year), Some(source)) = (row.get(id_idx), row.get(year_idx), row.get(source_idx)) else {
            skip(format!("expected at least {} columns, found {}", headers.len(), row.len()));
            continue;
        };
        let id = id.trim();
        if id.is_empty() {
            skip("empty record id".into());
            continue;
        }
        let pub_year = match year.trim().parse::<i32>() {
            Ok(y) if (MIN_YEAR..=MAX_YEAR).contains(&y) => y,
            Ok(y) => {
                skip(format!("year {y} outside {MIN_YEAR}..={MAX_YEAR}"));
                continue;
            }
            Err(_) => {
                skip(format!("unparseable year `{}`", year.trim()));
                continue;
            }
        };
        if !seen.insert(id.to_string()) {
            skip(format!("duplicate record id `{id}`"));
            continue;
        }
        out.records.push(BibRecord {
            record_id: id.to_string(),
            pub_year,
            source_journal: source.trim().to_string(),
            cited_refs: split_cited(row.get(cited_idx).unwrap_or("")),
        });
    }

    if rows == 0 {
        return Err(IngestError::EmptyInput);
    }
    Ok(out)
}

fn split_cited(cell: &str) -> Vec<String> {
    cell.split(';').map(str::trim).filter(|r| !r.is_empty()).map(str::to_string).collect()
}

/// Returns the journal segment of a cited-reference string: the third
/// comma-separated segment, trimmed, if it contains at least one letter.
pub fn extract_cited_journal(reference: &str) -> Option<String> {
    let segment = reference.split(',').nth(2)?.trim();
    if segment.chars().any(char::is_alphabetic) {
        Some(segment.to_string())
    } else {
        None
    }
}

/// Uppercases, collapses whitespace and strips leading/trailing punctuation.
fn basic_normalize(raw: &str) -> String {
    let upper = raw.to_uppercase();
    let collapsed = upper.split_whitespace().collect::<Vec<_>>().join(" ");
    collapsed.trim_matches(|c: char| c.is_whitespace() || c.is_ascii_punctuation()).to_string()
}

/// Canonical journal name for `raw`: basic normalization followed by alias lookup.
pub fn normalize_name(raw: &str, aliases: &AliasTable) -> String {
    let name = basic_normalize(raw);
    match aliases.entries.get(&name) {
        Some(canonical) => canonical.clone(),
        None => name,
    }
}

/// Map from normalized alias to canonical journal name, resolved to one level.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AliasTable {
    entries: BTreeMap<String, String>,
}

impl AliasTable {
    /// Builds a table from `(alias, canonical)` pairs. Both sides are
    /// normalized; chains are flattened so every alias maps straight to a
    /// canonical name that is not itself an alias.
    pub fn new<I, A, C>(pairs: I) -> Result<Self, IngestError>
    where
        I: IntoIterator<Item = (A, C)>,
        A: AsRef<str>,
        C: AsRef<str>,
    {
        let mut raw: BTreeMap<String, String> = BTreeMap::new();
        for (alias, canonical) in pairs {
            let alias = basic_normalize(alias.as_ref());
            let canonical = basic_normalize(canonical.as_ref());
            if alias.is_empty() || canonical.is_empty() || alias == canonical {
                continue;
            }
            raw.insert(alias, canonical);
        }

        let mut entries = BTreeMap::new();
        for alias in raw.keys() {
            let mut target = &raw[alias];
            let mut hops = 0;
            while let Some(next) = raw.get(target) {
                hops += 1;
                if next == alias || hops > raw.len() {
                    return Err(IngestError::AliasCycle(alias.clone()));
                }
                target = next;
            }
            entries.insert(alias.clone(), target.clone());
        }
        Ok(AliasTable { entries })
    }

    /// Reads a CSV with header `alias,canonical`.
    pub fn from_csv<R: Read>(input: R) -> Result<Self, IngestError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let headers = reader.headers()?.clone();
        let alias_idx =
            headers.iter().position(|h| h == "alias").ok_or_else(|| IngestError::MissingColumn("alias".into()))?;
        let canon_idx = headers
            .iter()
            .position(|h| h == "canonical")
            .ok_or_else(|| IngestError::MissingColumn("canonical".into()))?;
        let mut pairs = Vec::new();
        for row in reader.records() {
            let row = row?;
            let line = row.position().map(|p| p.line()).unwrap_or(0);
            match (row.get(alias_idx), row.get(canon_idx)) {
                (Some(a), Some(c)) if !a.is_empty() && !c.is_empty() => pairs.push((a.to_string(), c.to_string())),
                _ => {
                    return Err(IngestError::BadAlias { line, message: "both alias and canonical are required".into() })
                }
            }
        }
        AliasTable::new(pairs)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(a, c)| (a.as_str(), c.as_str()))
    }
}
