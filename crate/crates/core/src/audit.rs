//! Audits of a journal list against network centrality: quartile cross-tabs,
//! per-class boxplot summaries, field composition, multi-year evolution and
//! reclassification recommendations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::centrality::{NodeScores, Quartile};
use crate::rules::{ClassLabel, DanishLevel};
use crate::stats;

/// Row for journals that have no classification.
pub const NOT_INCLUDED: &str = "Not included";
/// Field label for journals without one.
pub const UNKNOWN_FIELD: &str = "unknown";

#[derive(Debug, Error, PartialEq)]
pub enum AuditError {
    #[error("class group `{0}` is empty")]
    EmptyGroup(String),
    #[error("journal `{0}` appears in no snapshot")]
    UnknownJournal(String),
    #[error("snapshot years must be strictly increasing")]
    UnsortedSnapshots,
    #[error("at least one snapshot is required")]
    NoSnapshots,
    #[error("evolution series for `{0}` has no points")]
    EmptySeries(String),
    #[error("group medians missing for year {0}")]
    MissingMedians(i32),
}

/// A classification scheme whose labels form cross-tab rows and boxplot groups.
pub trait ClassScheme: Copy + Ord + fmt::Display + Send + Sync + 'static {
    /// Labels, best first.
    fn labels() -> &'static [Self];
}

impl ClassScheme for ClassLabel {
    fn labels() -> &'static [Self] {
        &ClassLabel::ALL
    }
}

impl ClassScheme for DanishLevel {
    fn labels() -> &'static [Self] {
        &DanishLevel::ALL
    }
}

/// Row labels in scheme order, then the "Not included" row when the scheme
/// does not already render one.
fn row_labels<C: ClassScheme>() -> Vec<String> {
    let mut rows: Vec<String> = C::labels().iter().map(|c| c.to_string()).collect();
    if !rows.iter().any(|r| r == NOT_INCLUDED) {
        rows.push(NOT_INCLUDED.to_string());
    }
    rows
}

fn label_of<C: ClassScheme>(classes: &BTreeMap<String, C>, journal: &str) -> String {
    classes.get(journal).map_or_else(|| NOT_INCLUDED.to_string(), |c| c.to_string())
}

/// Classes × eigenquartiles count table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossTab {
    rows: Vec<String>,
    counts: Vec<[u64; 4]>,
}

impl CrossTab {
    pub fn from_counts(rows: Vec<(String, [u64; 4])>) -> Self {
        let (rows, counts) = rows.into_iter().unzip();
        CrossTab { rows, counts }
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[u64; 4])> {
        self.rows.iter().map(String::as_str).zip(&self.counts)
    }

    pub fn count(&self, row: &str, q: Quartile) -> Option<u64> {
        self.row_index(row).map(|i| self.counts[i][q.index()])
    }

    pub fn row_total(&self, row: &str) -> Option<u64> {
        self.row_index(row).map(|i| self.counts[i].iter().sum())
    }

    pub fn column_total(&self, q: Quartile) -> u64 {
        self.counts.iter().map(|c| c[q.index()]).sum()
    }

    pub fn grand_total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Share of a row's journals falling in quartile `q`.
    pub fn row_share(&self, row: &str, q: Quartile) -> Option<f64> {
        let total = self.row_total(row)?;
        (total > 0).then(|| self.count(row, q).unwrap_or(0) as f64 / total as f64)
    }

    /// Share of quartile `q`'s journals that belong to any of `rows`.
    pub fn column_share(&self, rows: &[&str], q: Quartile) -> Option<f64> {
        let total = self.column_total(q);
        let hit: u64 = rows.iter().filter_map(|r| self.count(r, q)).sum();
        (total > 0).then(|| hit as f64 / total as f64)
    }

    fn row_index(&self, row: &str) -> Option<usize> {
        self.rows.iter().position(|r| r == row)
    }
}

/// Cross-tabulates classes against the quartile column of `scores`. Journals
/// without a class are counted in the "Not included" row.
pub fn crosstab<C: ClassScheme>(classes: &BTreeMap<String, C>, scores: &[NodeScores]) -> CrossTab {
    let rows = row_labels::<C>();
    let mut counts = vec![[0u64; 4]; rows.len()];
    for s in scores {
        let label = label_of(classes, &s.journal);
        let i = rows.iter().position(|r| *r == label).expect("label rendered from the scheme");
        counts[i][s.quartile.index()] += 1;
    }
    // drop an empty synthetic "Not included" row
    let mut out: Vec<(String, [u64; 4])> = rows.into_iter().zip(counts).collect();
    if let Some(last) = out.last() {
        if last.0 == NOT_INCLUDED
            && last.1.iter().all(|&c| c == 0)
            && C::labels().iter().all(|c| c.to_string() != NOT_INCLUDED)
        {
            out.pop();
        }
    }
    CrossTab::from_counts(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Skew {
    Left,
    Right,
    None,
}

impl fmt::Display for Skew {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Skew::Left => "left",
            Skew::Right => "right",
            Skew::None => "none",
        })
    }
}

/// Fraction of the IQR by which the two box halves must differ to call a skew.
pub const SKEW_TOLERANCE: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxplotSummary {
    pub class: String,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    /// Ascending.
    pub outliers: Vec<f64>,
    pub skew: Skew,
}

/// Tukey boxplot statistics for one group of values.
pub fn summarize(class: &str, values: &[f64]) -> Result<BoxplotSummary, AuditError> {
    if values.is_empty() {
        return Err(AuditError::EmptyGroup(class.to_string()));
    }
    let sorted = stats::sorted_copy(values);
    let q1 = stats::percentile_sorted(&sorted, 0.25);
    let median = stats::percentile_sorted(&sorted, 0.5);
    let q3 = stats::percentile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let (fence_lo, fence_hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = || sorted.iter().copied().filter(|&v| v >= fence_lo && v <= fence_hi);
    let whisker_lo = inside().next().unwrap_or(q1);
    let whisker_hi = inside().next_back().unwrap_or(q3);
    let outliers = sorted.iter().copied().filter(|&v| v < fence_lo || v > fence_hi).collect();

    let (lower_half, upper_half) = (median - q1, q3 - median);
    let margin = SKEW_TOLERANCE * iqr;
    let skew = if upper_half - lower_half > margin {
        Skew::Left
    } else if lower_half - upper_half > margin {
        Skew::Right
    } else {
        Skew::None
    };
    Ok(BoxplotSummary {
        class: class.to_string(),
        count: sorted.len(),
        min: sorted[0],
        q1,
        median,
        q3,
        max: sorted[sorted.len() - 1],
        whisker_lo,
        whisker_hi,
        outliers,
        skew,
    })
}

/// One boxplot per class that has at least one scored journal, in scheme
/// order; unclassified journals form a trailing "Not included" group.
pub fn boxplot_summary<C: ClassScheme>(
    scores: &BTreeMap<String, f64>,
    classes: &BTreeMap<String, C>,
) -> Result<Vec<BoxplotSummary>, AuditError> {
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (journal, &score) in scores {
        groups.entry(label_of(classes, journal)).or_default().push(score);
    }
    row_labels::<C>().iter().filter_map(|label| groups.get(label).map(|values| summarize(label, values))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionCell {
    pub field: String,
    pub class: String,
    pub count: usize,
    /// Percentage of all journals in the network.
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Composition {
    pub total: usize,
    /// Sorted by field, then scheme order.
    pub cells: Vec<CompositionCell>,
    /// Per class, field column set to "*".
    pub per_class: Vec<CompositionCell>,
}

/// Percentage of the network's journals in each (field, class) cell.
pub fn composition<C: ClassScheme>(
    journals: &[String],
    classes: &BTreeMap<String, C>,
    fields: &BTreeMap<String, String>,
) -> Composition {
    let rows = row_labels::<C>();
    let rank = |label: &str| rows.iter().position(|r| r == label).unwrap_or(rows.len());
    let distinct: BTreeSet<&String> = journals.iter().collect();
    let total = distinct.len();
    let pct = |n: usize| if total == 0 { 0.0 } else { 100.0 * n as f64 / total as f64 };

    let mut cell_counts: BTreeMap<(String, usize, String), usize> = BTreeMap::new();
    let mut class_counts: BTreeMap<(usize, String), usize> = BTreeMap::new();
    for journal in distinct {
        let class = label_of(classes, journal);
        let field = fields.get(journal).cloned().unwrap_or_else(|| UNKNOWN_FIELD.to_string());
        *cell_counts.entry((field, rank(&class), class.clone())).or_default() += 1;
        *class_counts.entry((rank(&class), class)).or_default() += 1;
    }
    let cells = cell_counts
        .into_iter()
        .map(|((field, _, class), count)| CompositionCell { field, class, count, share: pct(count) })
        .collect();
    let per_class = class_counts
        .into_iter()
        .map(|((_, class), count)| CompositionCell { field: "*".into(), class, count, share: pct(count) })
        .collect();
    Composition { total, cells, per_class }
}

/// Centrality scores of one network year.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub year: i32,
    pub scores: Vec<NodeScores>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionPoint {
    pub year: i32,
    pub present: bool,
    pub eigenvector: Option<f64>,
    pub betweenness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSeries {
    pub journal: String,
    pub points: Vec<EvolutionPoint>,
}

impl EvolutionSeries {
    pub fn latest(&self) -> Option<&EvolutionPoint> {
        self.points.last()
    }

    pub fn present_latest(&self) -> bool {
        self.latest().is_some_and(|p| p.present)
    }

    /// Latest minus earliest eigenvector over the points where the journal is
    /// present; `None` with fewer than two such points.
    pub fn delta_over_window(&self) -> Option<f64> {
        let mut present = self.points.iter().filter_map(|p| p.eigenvector);
        let first = present.next()?;
        let last = present.next_back()?;
        Some(last - first)
    }
}

fn check_snapshots(snapshots: &[Snapshot]) -> Result<(), AuditError> {
    if snapshots.is_empty() {
        return Err(AuditError::NoSnapshots);
    }
    if snapshots.windows(2).any(|w| w[0].year >= w[1].year) {
        return Err(AuditError::UnsortedSnapshots);
    }
    Ok(())
}

fn series_from(snapshots: &[Snapshot], journal: &str) -> EvolutionSeries {
    let points = snapshots
        .iter()
        .map(|snap| {
            let row = snap.scores.iter().find(|r| r.journal == journal);
            EvolutionPoint {
                year: snap.year,
                present: row.is_some(),
                eigenvector: row.map(|r| r.eigenvector),
                betweenness: row.map(|r| r.betweenness),
            }
        })
        .collect();
    EvolutionSeries { journal: journal.to_string(), points }
}

/// One point per snapshot for `journal`; years where it is not in the
/// network are flagged absent.
pub fn evolution_series(snapshots: &[Snapshot], journal: &str) -> Result<EvolutionSeries, AuditError> {
    check_snapshots(snapshots)?;
    let series = series_from(snapshots, journal);
    if series.points.iter().all(|p| !p.present) {
        return Err(AuditError::UnknownJournal(journal.to_string()));
    }
    Ok(series)
}

/// Every journal that appears in at least one snapshot, name-sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesBundle {
    pub years: Vec<i32>,
    pub series: Vec<EvolutionSeries>,
}

pub fn all_series(snapshots: &[Snapshot]) -> Result<SeriesBundle, AuditError> {
    check_snapshots(snapshots)?;
    let journals: BTreeSet<&str> = snapshots.iter().flat_map(|s| s.scores.iter().map(|r| r.journal.as_str())).collect();
    let journals: Vec<&str> = journals.into_iter().collect();
    let series = journals.par_iter().map(|j| series_from(snapshots, j)).collect();
    Ok(SeriesBundle { years: snapshots.iter().map(|s| s.year).collect(), series })
}

/// Median eigenvector score of the level-1 and level-2 journals in one year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelMedians {
    pub level1: Option<f64>,
    pub level2: Option<f64>,
}

pub type GroupMedians = BTreeMap<i32, LevelMedians>;

/// Per-year level medians over the journals present in each year.
pub fn group_medians(bundle: &SeriesBundle, levels: &BTreeMap<String, DanishLevel>) -> GroupMedians {
    bundle
        .years
        .iter()
        .enumerate()
        .map(|(k, &year)| {
            let mut by_level: BTreeMap<DanishLevel, Vec<f64>> = BTreeMap::new();
            for s in &bundle.series {
                if let (Some(level), Some(eig)) = (levels.get(&s.journal), s.points.get(k).and_then(|p| p.eigenvector))
                {
                    by_level.entry(*level).or_default().push(eig);
                }
            }
            let med = |l| by_level.get(&l).and_then(|v| stats::median(v));
            (year, LevelMedians { level1: med(DanishLevel::Level1), level2: med(DanishLevel::Level2) })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Policy {
    /// Eigenvector drop over the window that, below the level-1 median,
    /// triggers removal.
    pub decline_delta: f64,
    /// Consecutive latest snapshots that must clear the level-2 median before
    /// promotion.
    pub promotion_snapshots: usize,
}

impl Default for Policy {
    fn default() -> Self {
        Policy { decline_delta: 0.005, promotion_snapshots: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    IntroduceLevel1,
    Stay,
    PromoteLevel2,
    Remove,
}

/// Inputs the action was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub latest_eigenvector: Option<f64>,
    pub level2_median: f64,
    pub level1_median: f64,
    pub delta_over_window: Option<f64>,
    pub present_latest: bool,
    /// Whether each of the last `promotion_snapshots` points cleared that
    /// year's level-2 median.
    pub cleared_level2_median: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub journal: String,
    pub current: DanishLevel,
    pub action: Action,
    pub evidence: Evidence,
}

/// Applies the rule cascade: remove, promote, introduce, otherwise stay.
pub fn recommend(
    series: &EvolutionSeries,
    current: DanishLevel,
    medians: &GroupMedians,
    policy: &Policy,
) -> Result<Recommendation, AuditError> {
    let latest = series.latest().ok_or_else(|| AuditError::EmptySeries(series.journal.clone()))?;
    let latest_medians = medians.get(&latest.year);
    let (Some(level1_median), Some(level2_median)) =
        (latest_medians.and_then(|m| m.level1), latest_medians.and_then(|m| m.level2))
    else {
        return Err(AuditError::MissingMedians(latest.year));
    };

    let window = policy.promotion_snapshots.max(1);
    let cleared_level2_median: Vec<bool> = series.points[series.points.len().saturating_sub(window)..]
        .iter()
        .map(|p| match (p.eigenvector, medians.get(&p.year).and_then(|m| m.level2)) {
            (Some(eig), Some(med)) => eig >= med,
            _ => false,
        })
        .collect();

    let evidence = Evidence {
        latest_eigenvector: latest.eigenvector,
        level2_median,
        level1_median,
        delta_over_window: series.delta_over_window(),
        present_latest: latest.present,
        cleared_level2_median,
    };
    let action = decide(current, &evidence, policy);
    Ok(Recommendation { journal: series.journal.clone(), current, action, evidence })
}

/// The rule cascade over recorded evidence alone.
pub fn decide(current: DanishLevel, e: &Evidence, policy: &Policy) -> Action {
    let Some(latest) = e.latest_eigenvector.filter(|_| e.present_latest) else {
        return Action::Remove;
    };
    let declining = e.delta_over_window.is_some_and(|d| d < -policy.decline_delta);
    if declining && latest < e.level1_median {
        return Action::Remove;
    }
    let window = policy.promotion_snapshots.max(1);
    if current == DanishLevel::Level1
        && e.cleared_level2_median.len() >= window
        && e.cleared_level2_median.iter().all(|&c| c)
    {
        return Action::PromoteLevel2;
    }
    if current == DanishLevel::NotListed && latest >= e.level1_median {
        return Action::IntroduceLevel1;
    }
    Action::Stay
}

/// Recommendations for every series in the bundle, name-sorted. Journals
/// missing from `levels` are treated as not listed.
pub fn recommend_all(
    bundle: &SeriesBundle,
    levels: &BTreeMap<String, DanishLevel>,
    policy: &Policy,
) -> Result<Vec<Recommendation>, AuditError> {
    let medians = group_medians(bundle, levels);
    let mut out = bundle
        .series
        .par_iter()
        .map(|s| {
            let current = levels.get(&s.journal).copied().unwrap_or(DanishLevel::NotListed);
            recommend(s, current, &medians, policy)
        })
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_by(|a, b| a.journal.cmp(&b.journal));
    Ok(out)
}
