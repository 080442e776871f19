use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "journalnet", version, about = "Journal co-citation networks, centrality and journal-list audits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a record export into a normalized record store (JSON).
    Ingest(IngestArgs),
    /// Build the thresholded co-citation network from records.
    Build(BuildArgs),
    /// Score every journal of a network and assign eigenquartiles.
    Centrality(CentralityArgs),
    /// Classify journals under the CIRC tracks or the Danish list.
    Classify(ClassifyArgs),
    /// Compare classifications with centrality.
    #[command(subcommand)]
    Audit(AuditCommand),
    /// Turn year-tagged networks into per-journal centrality series.
    Evolve(EvolveArgs),
    /// Recommend list changes from centrality series.
    Recommend(RecommendArgs),
    /// Convert a network to another format.
    #[command(subcommand)]
    Export(ExportCommand),
}

#[derive(Debug, Args)]
pub struct RecordColumns {
    /// Header name of the record id column.
    #[arg(long, default_value = "id")]
    pub id_column: String,
    /// Header name of the publication year column.
    #[arg(long, default_value = "year")]
    pub year_column: String,
    /// Header name of the source journal column.
    #[arg(long, default_value = "source")]
    pub source_column: String,
    /// Header name of the `;`-separated cited references column.
    #[arg(long, default_value = "cited")]
    pub cited_column: String,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Tab-separated record export.
    #[arg(long)]
    pub input: PathBuf,
    /// `alias,canonical` CSV of journal-name variants.
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    #[command(flatten)]
    pub columns: RecordColumns,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Record export (TSV) or a record store written by `ingest` (.json).
    #[arg(long)]
    pub input: PathBuf,
    /// `alias,canonical` CSV of journal-name variants.
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    #[command(flatten)]
    pub columns: RecordColumns,
    /// Minimum number of citing records per journal.
    #[arg(long, default_value_t = 111)]
    pub threshold: u64,
    /// Maximum number of journals kept, most cited first.
    #[arg(long, default_value_t = 151)]
    pub top: usize,
    /// Year label of the network; defaults to the latest publication year.
    #[arg(long)]
    pub year: Option<i32>,
    /// Output network JSON; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CentralityArgs {
    /// Network JSON, or Pajek NET when the file ends in `.net`.
    #[arg(long)]
    pub net: PathBuf,
    /// Measures whose mode is given by the matching `--mode` entry.
    #[arg(long, value_delimiter = ',', default_value = "eigenvector,betweenness")]
    pub measures: Vec<String>,
    /// One mode per `--measures` entry: `weighted`/`binary` for eigenvector,
    /// `binary`/`inverse_weight` for betweenness.
    #[arg(long, value_delimiter = ',', default_value = "weighted,binary")]
    pub mode: Vec<String>,
    /// Divide betweenness by (n-1)(n-2)/2.
    #[arg(long)]
    pub normalized: bool,
    /// Relative eigen-residual at which power iteration stops.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Power-iteration budget.
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Measure the quartile column is computed from.
    #[arg(long, default_value = "eigenvector")]
    pub quartile_by: String,
    /// Output scores CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write Pearson and Spearman correlations between measures.
    #[arg(long)]
    pub correlations: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifyScheme {
    /// CIRC Social Sciences track.
    CircSs,
    /// CIRC Humanities track.
    CircHum,
    /// Danish authority list with BFI points.
    Danish,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, value_enum)]
    pub scheme: ClassifyScheme,
    /// Journal dossier CSV (CIRC schemes).
    #[arg(long, required_if_eq_any = [("scheme", "circ-ss"), ("scheme", "circ-hum")])]
    pub dossiers: Option<PathBuf>,
    /// `journal,level` CSV with level 2, 1 or 0 (danish scheme).
    #[arg(long, required_if_eq("scheme", "danish"))]
    pub levels: Option<PathBuf>,
    /// Output labels CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LabelScheme {
    Circ,
    Danish,
}

#[derive(Debug, Args)]
pub struct LabelInput {
    /// `journal,label` CSV as written by `classify`.
    #[arg(long)]
    pub labels: PathBuf,
    /// How to read the label column.
    #[arg(long, value_enum)]
    pub scheme: LabelScheme,
}

#[derive(Debug, Subcommand)]
pub enum AuditCommand {
    /// Classes by eigenquartile count table.
    Crosstab {
        /// Scores CSV from `centrality`.
        #[arg(long)]
        scores: PathBuf,
        #[command(flatten)]
        labels: LabelInput,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-class boxplot statistics of one measure.
    Boxplot {
        #[arg(long)]
        scores: PathBuf,
        #[command(flatten)]
        labels: LabelInput,
        /// Measure to summarize.
        #[arg(long, default_value = "eigenvector")]
        measure: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Share of network journals per field and class.
    Composition {
        #[arg(long)]
        scores: PathBuf,
        #[command(flatten)]
        labels: LabelInput,
        /// `journal,field` CSV.
        #[arg(long)]
        fields: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that level-2 journals cover at most 20% of world production.
    Level2Share {
        /// `journal,articles` CSV.
        #[arg(long)]
        production: PathBuf,
        /// `journal,level` CSV.
        #[arg(long)]
        levels: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// `YEAR=path` for each snapshot network; a bare path uses the year
    /// stored in the network.
    #[arg(long = "net", required = true)]
    pub nets: Vec<String>,
    /// Relative eigen-residual at which power iteration stops.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Power-iteration budget.
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Output series JSON; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    /// Series JSON from `evolve`.
    #[arg(long)]
    pub series: PathBuf,
    /// `journal,level` CSV of current Danish levels.
    #[arg(long)]
    pub levels: PathBuf,
    /// `default` or a policy JSON file.
    #[arg(long, default_value = "default")]
    pub policy: String,
    /// Overrides the policy's decline threshold.
    #[arg(long)]
    pub decline_delta: Option<f64>,
    /// Overrides the policy's promotion window.
    #[arg(long)]
    pub promotion_snapshots: Option<usize>,
    /// Output recommendations JSON; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ExportCommand {
    /// Write a network JSON as Pajek NET.
    Pajek {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}
