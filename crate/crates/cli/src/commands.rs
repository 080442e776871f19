use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, Context};
use journalnet::audit::{self, Snapshot};
use journalnet::centrality::{compute_report, correlate_measures, Measure};
use journalnet::cocit::{apply_threshold, build_cocitation};
use journalnet::formats::{self, read_pajek};
use journalnet::ingest::{normalize_name, parse_records, ParsedRecords};
use journalnet::rules::{self, bfi_points, classify_circ_humanities, classify_circ_social, LEVEL2_MAX_SHARE};
use journalnet::{
    AliasTable, CentralityConfig, ClassLabel, CoCitationNetwork, DanishLevel, FormatConfig, PathMode, Policy,
    ThresholdConfig, WeightMode,
};
use serde_json::json;

use crate::args::*;
use crate::Failure;

type Result<T> = std::result::Result<T, Failure>;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Ingest(a) => ingest(a),
        Command::Build(a) => build(a),
        Command::Centrality(a) => centrality(a),
        Command::Classify(a) => classify(a),
        Command::Audit(a) => audit_cmd(a),
        Command::Evolve(a) => evolve(a),
        Command::Recommend(a) => recommend(a),
        Command::Export(ExportCommand::Pajek { net, out }) => {
            require_file("--net", &net)?;
            require_out(out.as_deref())?;
            emit(out.as_deref(), &formats::write_pajek(&load_network(&net)?))
        }
    }
}

// ---------------------------------------------------------------------------
// plumbing

fn usage(msg: impl Display) -> Failure {
    Failure::Usage(msg.to_string())
}

fn require_file(flag: &str, path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("{flag}: `{}` is not a readable file", path.display())))
    }
}

fn require_out(out: Option<&Path>) -> Result<()> {
    let Some(parent) = out.and_then(Path::parent) else { return Ok(()) };
    if parent.as_os_str().is_empty() || parent.is_dir() {
        Ok(())
    } else {
        Err(usage(format!("--out: directory `{}` does not exist", parent.display())))
    }
}

fn read_text(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path).with_context(|| path.display().to_string())?)
}

fn open(path: &Path) -> Result<File> {
    Ok(File::open(path).with_context(|| path.display().to_string())?)
}

/// Attaches the file name to a data error.
fn in_file<T, E>(path: &Path, r: std::result::Result<T, E>) -> Result<T>
where
    E: std::error::Error + Send + Sync + 'static,
{
    Ok(r.with_context(|| path.display().to_string())?)
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(path) => in_file(path, formats::write_file(path, contents)),
        None => in_file(Path::new("<stdout>"), io::stdout().lock().write_all(contents.as_bytes())),
    }
}

fn load_aliases(path: Option<&Path>) -> Result<AliasTable> {
    match path {
        Some(p) => in_file(p, AliasTable::from_csv(open(p)?)),
        None => Ok(AliasTable::default()),
    }
}

fn format_config(c: &RecordColumns) -> FormatConfig {
    FormatConfig {
        id_column: c.id_column.clone(),
        year_column: c.year_column.clone(),
        source_column: c.source_column.clone(),
        cited_column: c.cited_column.clone(),
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn load_records(path: &Path, columns: &RecordColumns) -> Result<ParsedRecords> {
    let parsed = if is_json(path) {
        in_file(path, serde_json::from_str::<ParsedRecords>(&read_text(path)?))?
    } else {
        in_file(path, parse_records(open(path)?, &format_config(columns)))?
    };
    for s in &parsed.skipped {
        eprintln!("warning: {}:{}: skipped: {}", path.display(), s.line, s.reason);
    }
    Ok(parsed)
}

/// Network JSON, or Pajek NET for a `.net` file.
fn load_network(path: &Path) -> Result<CoCitationNetwork> {
    let text = read_text(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("net")) {
        let import = in_file(path, read_pajek(&text))?;
        for w in &import.warnings {
            eprintln!("warning: {}: {w}", path.display());
        }
        eprintln!(
            "note: {}: Pajek carries no citation counts or year; citations rebuilt from weighted degree",
            path.display()
        );
        Ok(import.network)
    } else {
        in_file(path, formats::read_network_json(&text))
    }
}

fn parse_labels<C>(path: &Path) -> Result<BTreeMap<String, C>>
where
    C: FromStr,
    C::Err: Display,
{
    in_file(path, formats::read_pairs_csv(open(path)?, "label"))?
        .into_iter()
        .map(|(line, journal, label)| match label.parse::<C>() {
            Ok(c) => Ok((journal, c)),
            Err(e) => Err(Failure::Data(anyhow!("{}: line {line}: {e}", path.display()))),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// subcommands

fn ingest(a: IngestArgs) -> Result<()> {
    require_file("--input", &a.input)?;
    if let Some(p) = &a.aliases {
        require_file("--aliases", p)?;
    }
    require_out(a.out.as_deref())?;

    let aliases = load_aliases(a.aliases.as_deref())?;
    let mut parsed = load_records(&a.input, &a.columns)?;
    for r in &mut parsed.records {
        r.source_journal = normalize_name(&r.source_journal, &aliases);
    }
    eprintln!("ingested {} records, skipped {}", parsed.records.len(), parsed.skipped.len());
    let mut text = serde_json::to_string_pretty(&parsed).map_err(|e| Failure::Data(e.into()))?;
    text.push('\n');
    emit(a.out.as_deref(), &text)
}

fn build(a: BuildArgs) -> Result<()> {
    require_file("--input", &a.input)?;
    if let Some(p) = &a.aliases {
        require_file("--aliases", p)?;
    }
    require_out(a.out.as_deref())?;
    if a.threshold == 0 {
        return Err(usage("--threshold: must be at least 1"));
    }
    if a.top == 0 {
        return Err(usage("--top: must be at least 1"));
    }

    let aliases = load_aliases(a.aliases.as_deref())?;
    let parsed = load_records(&a.input, &a.columns)?;
    let full = build_cocitation(&parsed.records, &aliases);
    let cfg = ThresholdConfig { min_citations: a.threshold, top_n: a.top };
    let (mut net, report) = in_file(&a.input, apply_threshold(&full, &cfg))?;
    if let Some(year) = a.year {
        net.set_year(year);
    }
    eprintln!(
        "{} journals cited, {} with at least {} citations, kept {} journals and {} edges",
        report.total_nodes, report.above_threshold, a.threshold, report.retained_nodes, report.retained_edges
    );
    emit(a.out.as_deref(), &formats::write_network_json(&net))
}

fn centrality_config(a: &CentralityArgs) -> Result<CentralityConfig> {
    if a.measures.len() != a.mode.len() {
        return Err(usage(format!(
            "--mode: {} modes given for {} measures; give one per measure",
            a.mode.len(),
            a.measures.len()
        )));
    }
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(usage("--tol: must be positive"));
    }
    if a.max_iter == 0 {
        return Err(usage("--max-iter: must be at least 1"));
    }
    let mut cfg = CentralityConfig {
        normalize_betweenness: a.normalized,
        tolerance: a.tol,
        max_iter: a.max_iter,
        quartile_measure: a.quartile_by.parse().map_err(|e| usage(format!("--quartile-by: {e}")))?,
        ..CentralityConfig::default()
    };
    for (measure, mode) in a.measures.iter().zip(&a.mode) {
        let measure: Measure = measure.trim().parse().map_err(|e| usage(format!("--measures: {e}")))?;
        let mode = mode.trim();
        let bad_mode = || usage(format!("--mode: `{mode}` is not a mode of {measure}"));
        match measure {
            Measure::Eigenvector => cfg.eigenvector_mode = mode.parse::<WeightMode>().map_err(|_| bad_mode())?,
            Measure::Betweenness => cfg.betweenness_mode = mode.parse::<PathMode>().map_err(|_| bad_mode())?,
            // both degree columns are always written
            Measure::Degree | Measure::WeightedDegree => {
                mode.parse::<WeightMode>().map_err(|_| bad_mode())?;
            }
            Measure::Closeness if mode == "binary" => {}
            Measure::Closeness => return Err(bad_mode()),
        }
    }
    Ok(cfg)
}

fn centrality(a: CentralityArgs) -> Result<()> {
    require_file("--net", &a.net)?;
    require_out(a.out.as_deref())?;
    require_out(a.correlations.as_deref())?;
    let cfg = centrality_config(&a)?;

    let net = load_network(&a.net)?;
    let report = in_file(&a.net, compute_report(&net, &cfg))?;
    let meta = &report.meta;
    eprintln!(
        "{} journals; eigenvector converged in {} iterations (eigenvalue {}, residual {:.3e})",
        report.rows.len(),
        meta.iterations,
        formats::fmt_sig(meta.eigenvalue),
        meta.residual
    );
    if meta.disconnected {
        eprintln!(
            "warning: {}: network is disconnected; eigenvector scores concentrate on one component",
            a.net.display()
        );
    }
    if let Some(path) = &a.correlations {
        let m = in_file(&a.net, correlate_measures(&report.rows))?;
        for measure in &m.undefined {
            eprintln!("warning: {measure} is constant; its correlations are undefined");
        }
        emit(Some(path), &formats::write_correlations_csv(&m))?;
    }
    emit(a.out.as_deref(), &formats::write_scores_csv(&report.rows))
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let input = match a.scheme {
        ClassifyScheme::Danish => a.levels.as_ref().map(|p| ("--levels", p)),
        _ => a.dossiers.as_ref().map(|p| ("--dossiers", p)),
    };
    let Some((flag, input)) = input else { return Err(usage("missing input file for the scheme")) };
    require_file(flag, input)?;
    require_out(a.out.as_deref())?;

    let rows: Vec<(String, String, Option<f64>)> = match a.scheme {
        ClassifyScheme::Danish => in_file(input, formats::read_levels_csv(open(input)?))?
            .into_iter()
            .map(|(journal, level)| (journal, level.to_string(), Some(bfi_points(level))))
            .collect(),
        scheme => {
            let classify: fn(&rules::JournalDossier) -> ClassLabel = match scheme {
                ClassifyScheme::CircSs => classify_circ_social,
                _ => classify_circ_humanities,
            };
            in_file(input, formats::read_dossiers_csv(open(input)?))?
                .iter()
                .map(|d| (d.journal.clone(), classify(d).to_string(), None))
                .collect()
        }
    };
    emit(a.out.as_deref(), &formats::write_labels_csv(&rows))
}

fn audit_cmd(cmd: AuditCommand) -> Result<()> {
    match cmd {
        AuditCommand::Crosstab { scores, labels, out } => {
            require_file("--scores", &scores)?;
            require_file("--labels", &labels.labels)?;
            require_out(out.as_deref())?;
            let rows = in_file(&scores, formats::read_scores_csv(open(&scores)?))?;
            let tab = match labels.scheme {
                LabelScheme::Circ => audit::crosstab(&parse_labels::<ClassLabel>(&labels.labels)?, &rows),
                LabelScheme::Danish => audit::crosstab(&parse_labels::<DanishLevel>(&labels.labels)?, &rows),
            };
            emit(out.as_deref(), &formats::write_crosstab_csv(&tab))
        }
        AuditCommand::Boxplot { scores, labels, measure, out } => {
            require_file("--scores", &scores)?;
            require_file("--labels", &labels.labels)?;
            require_out(out.as_deref())?;
            let measure: Measure = measure.parse().map_err(|e| usage(format!("--measure: {e}")))?;
            let rows = in_file(&scores, formats::read_scores_csv(open(&scores)?))?;
            let values: BTreeMap<String, f64> = rows.iter().map(|r| (r.journal.clone(), r.get(measure))).collect();
            let groups = match labels.scheme {
                LabelScheme::Circ => audit::boxplot_summary(&values, &parse_labels::<ClassLabel>(&labels.labels)?),
                LabelScheme::Danish => audit::boxplot_summary(&values, &parse_labels::<DanishLevel>(&labels.labels)?),
            };
            emit(out.as_deref(), &formats::write_boxplot_csv(&in_file(&scores, groups)?))
        }
        AuditCommand::Composition { scores, labels, fields, out } => {
            require_file("--scores", &scores)?;
            require_file("--labels", &labels.labels)?;
            require_file("--fields", &fields)?;
            require_out(out.as_deref())?;
            let rows = in_file(&scores, formats::read_scores_csv(open(&scores)?))?;
            let journals: Vec<String> = rows.into_iter().map(|r| r.journal).collect();
            let fields = in_file(&fields, formats::read_fields_csv(open(&fields)?))?;
            let c = match labels.scheme {
                LabelScheme::Circ => {
                    audit::composition(&journals, &parse_labels::<ClassLabel>(&labels.labels)?, &fields)
                }
                LabelScheme::Danish => {
                    audit::composition(&journals, &parse_labels::<DanishLevel>(&labels.labels)?, &fields)
                }
            };
            emit(out.as_deref(), &formats::write_composition_csv(&c))
        }
        AuditCommand::Level2Share { production, levels, out } => {
            require_file("--production", &production)?;
            require_file("--levels", &levels)?;
            require_out(out.as_deref())?;
            let prod = in_file(&production, formats::read_production_csv(open(&production)?))?;
            let level2: BTreeSet<String> = in_file(&levels, formats::read_levels_csv(open(&levels)?))?
                .into_iter()
                .filter(|(_, l)| *l == DanishLevel::Level2)
                .map(|(j, _)| j)
                .collect();
            let check = in_file(&production, rules::validate_level2_share(&prod, &level2))?;
            if !check.pass {
                eprintln!("warning: level-2 share {} exceeds {}", check.share, LEVEL2_MAX_SHARE);
            }
            let body = json!({ "share": check.share, "max_share": LEVEL2_MAX_SHARE, "pass": check.pass });
            emit(out.as_deref(), &format!("{body:#}\n"))
        }
    }
}

fn parse_snapshot_arg(arg: &str) -> Result<(Option<i32>, PathBuf)> {
    match arg.split_once('=') {
        Some((year, path)) => {
            let year = year.trim().parse().map_err(|_| usage(format!("--net: `{year}` is not a year in `{arg}`")))?;
            Ok((Some(year), PathBuf::from(path)))
        }
        None => Ok((None, PathBuf::from(arg))),
    }
}

fn evolve(a: EvolveArgs) -> Result<()> {
    let specs = a.nets.iter().map(|s| parse_snapshot_arg(s)).collect::<Result<Vec<_>>>()?;
    for (_, path) in &specs {
        require_file("--net", path)?;
    }
    require_out(a.out.as_deref())?;
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(usage("--tol: must be positive"));
    }
    let cfg = CentralityConfig { tolerance: a.tol, max_iter: a.max_iter, ..CentralityConfig::default() };

    let mut snapshots = Vec::new();
    for (year, path) in &specs {
        let net = load_network(path)?;
        let year = year.unwrap_or(net.year());
        let report = in_file(path, compute_report(&net, &cfg))?;
        snapshots.push((year, path, Snapshot { year, scores: report.rows }));
    }
    snapshots.sort_by_key(|s| s.0);
    if let Some(w) = snapshots.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(usage(format!(
            "--net: `{}` and `{}` are both year {}",
            w[0].1.display(),
            w[1].1.display(),
            w[0].0
        )));
    }
    let snapshots: Vec<Snapshot> = snapshots.into_iter().map(|s| s.2).collect();
    let bundle = audit::all_series(&snapshots).map_err(|e| Failure::Data(e.into()))?;
    emit(a.out.as_deref(), &formats::write_series_json(&bundle))
}

fn recommend(a: RecommendArgs) -> Result<()> {
    require_file("--series", &a.series)?;
    require_file("--levels", &a.levels)?;
    let policy_path = (a.policy != "default").then(|| PathBuf::from(&a.policy));
    if let Some(p) = &policy_path {
        require_file("--policy", p)?;
    }
    require_out(a.out.as_deref())?;

    let mut policy = match &policy_path {
        Some(p) => in_file(p, serde_json::from_str::<Policy>(&read_text(p)?))?,
        None => Policy::default(),
    };
    if let Some(d) = a.decline_delta {
        policy.decline_delta = d;
    }
    if let Some(n) = a.promotion_snapshots {
        policy.promotion_snapshots = n;
    }
    if policy.decline_delta.is_nan() || policy.decline_delta < 0.0 || policy.promotion_snapshots == 0 {
        return Err(usage("policy: decline_delta must be non-negative and promotion_snapshots at least 1"));
    }

    let bundle = in_file(&a.series, formats::read_series_json(&read_text(&a.series)?))?;
    let levels = in_file(&a.levels, formats::read_levels_csv(open(&a.levels)?))?;
    let recs = in_file(&a.series, audit::recommend_all(&bundle, &levels, &policy))?;
    emit(a.out.as_deref(), &formats::write_recommendations_json(&recs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    use crate::args::Cli;

    fn centrality_args(argv: &[&str]) -> CentralityArgs {
        let argv = [&["journalnet", "centrality", "--net", "n.json"][..], argv].concat();
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Centrality(a) => a,
            other => panic!("{other:?}"),
        }
    }

    fn usage_text(r: Result<CentralityConfig>) -> String {
        match r {
            Err(Failure::Usage(msg)) => msg,
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn default_flags_reproduce_default_config() {
        assert_eq!(centrality_config(&centrality_args(&[])).unwrap(), CentralityConfig::default());
    }

    #[test]
    fn modes_pair_with_measures() {
        let a = centrality_args(&["--measures", "betweenness,eigenvector", "--mode", "inverse_weight,binary"]);
        let cfg = centrality_config(&a).unwrap();
        assert_eq!(cfg.betweenness_mode, PathMode::InverseWeight);
        assert_eq!(cfg.eigenvector_mode, WeightMode::Binary);

        let a = centrality_args(&["--measures", "closeness", "--mode", "weighted"]);
        assert!(usage_text(centrality_config(&a)).starts_with("--mode"));
        let a = centrality_args(&["--measures", "pagerank", "--mode", "binary"]);
        assert!(usage_text(centrality_config(&a)).starts_with("--measures"));
        let a = centrality_args(&["--tol", "0"]);
        assert!(usage_text(centrality_config(&a)).starts_with("--tol"));
    }

    #[test]
    fn snapshot_arguments() {
        assert_eq!(parse_snapshot_arg("2011=a/b.json").unwrap(), (Some(2011), PathBuf::from("a/b.json")));
        assert_eq!(parse_snapshot_arg("net.json").unwrap(), (None, PathBuf::from("net.json")));
        assert!(matches!(parse_snapshot_arg("x=net.json"), Err(Failure::Usage(_))));
    }
}
