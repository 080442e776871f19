//! Journal co-citation network analysis for auditing national journal lists.
//!
//! The pipeline runs bibliographic records through [`ingest`] into a
//! thresholded co-citation network ([`cocit`]), scores every journal with
//! [`centrality`] measures, classifies journals with the CIRC and Danish
//! rules in [`rules`], and compares the two in [`audit`]. [`formats`] holds
//! the Pajek, JSON and CSV readers and writers.

pub mod audit;
pub mod centrality;
pub mod cocit;
pub mod formats;
pub mod ingest;
pub mod rules;
pub mod stats;

pub use audit::{Action, CrossTab, EvolutionSeries, Policy, Recommendation, SeriesBundle, Snapshot};
pub use centrality::{CentralityConfig, CentralityReport, NodeScores, PathMode, Quartile, WeightMode};
pub use cocit::{CoCitationNetwork, JournalNode, ThresholdConfig};
pub use ingest::{AliasTable, BibRecord, FormatConfig};
pub use rules::{ClassLabel, DanishLevel, JournalDossier};
