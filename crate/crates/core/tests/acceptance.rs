//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fail.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use journalnet::audit::{self, Action, Snapshot};
use journalnet::centrality::{betweenness_centrality, compute_report, correlate_measures, eigenvector_centrality};
use journalnet::cocit::{apply_threshold, build_cocitation};
use journalnet::formats::{
    read_pajek, write_boxplot_csv, write_correlations_csv, write_crosstab_csv, write_network_json, write_pajek,
    write_recommendations_json, write_scores_csv, write_series_json,
};
use journalnet::ingest::parse_records;
use journalnet::rules::{classify_circ_humanities, classify_circ_social};
use journalnet::{
    AliasTable, CentralityConfig, CoCitationNetwork, CrossTab, DanishLevel, FormatConfig, JournalNode, PathMode,
    Policy, Quartile, ThresholdConfig, WeightMode,
};
use rand::seq::SliceRandom;
use rand::Rng;

use common::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    ensure(elapsed < budget, || format!("took {elapsed:?}, budget {budget:?}"))?;
    Ok(elapsed)
}

// 1 -------------------------------------------------------------------------

fn eigenquartile_counts() -> (CrossTab, CrossTab) {
    let danish = CrossTab::from_counts(vec![
        ("2".into(), [40, 22, 27, 13]),
        ("1".into(), [7, 4, 14, 16]),
        ("0".into(), [1, 2, 1, 4]),
    ]);
    let circ = CrossTab::from_counts(vec![
        ("A+".into(), [25, 11, 9, 6]),
        ("A".into(), [8, 4, 7, 5]),
        ("B".into(), [2, 2, 1, 2]),
        ("C/D".into(), [0, 0, 0, 1]),
        ("Not included".into(), [13, 11, 25, 19]),
    ]);
    (danish, circ)
}

fn eigenquartile_shares() -> Outcome {
    let start = Instant::now();
    let (danish, circ) = eigenquartile_counts();
    ensure(danish.grand_total() == 151 && circ.grand_total() == 151, || "totals differ from 151".into())?;
    let col: Vec<u64> = Quartile::ALL.iter().map(|&q| circ.column_total(q)).collect();
    ensure(col == [48, 28, 42, 33], || format!("column totals {col:?}"))?;

    let got = [
        ("Level2 in Q1", danish.row_share("2", Quartile::Q1), 39.2),
        ("Q1 at Level2", danish.column_share(&["2"], Quartile::Q1), 83.3),
        ("A+ in Q1", circ.row_share("A+", Quartile::Q1), 49.0),
        ("Q1 at A+/A", circ.column_share(&["A+", "A"], Quartile::Q1), 68.8),
    ];
    let mut detail = Vec::new();
    for (name, share, expected) in got {
        let pct = share.ok_or(format!("{name}: undefined"))? * 100.0;
        // 33/48 = 68.75 sits exactly on the half-point; allow float noise
        ensure((pct - expected).abs() <= 0.05 + 1e-9, || format!("{name}: {pct:.4} vs {expected}"))?;
        detail.push(format!("{name} {pct:.2}%"));
    }
    let elapsed = within_budget(start, Duration::from_secs(1))?;
    Ok(format!("{} in {elapsed:?}", detail.join(", ")))
}

// 2 -------------------------------------------------------------------------

fn circ_enumeration() -> Outcome {
    let start = Instant::now();
    let all = dossiers();
    let mut mismatches = 0usize;
    for d in &all {
        if classify_circ_social(d) != circ_oracle(&SOCIAL_BULLETS, d) {
            mismatches += 1;
        }
        if classify_circ_humanities(d) != circ_oracle(&HUMANITIES_BULLETS, d) {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} mismatches of {}", 2 * all.len()))?;
    let elapsed = within_budget(start, Duration::from_secs(5))?;
    Ok(format!("{} dossiers x 2 tracks match in {elapsed:?}", all.len()))
}

// 3 -------------------------------------------------------------------------

fn eigenvector_checks() -> Outcome {
    let eig = |n: usize, edges: &[(usize, usize, f64)]| {
        eigenvector_centrality(&graph(n, edges), WeightMode::Weighted, 1e-12, 100_000).map_err(|e| e.to_string())
    };

    let k5: Vec<_> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b, 1.0))).collect();
    let s = eig(5, &k5)?.scores;
    let expected = 1.0 / 5f64.sqrt();
    ensure(s.iter().all(|x| (x - expected).abs() <= 1e-9), || format!("K5 {s:?}"))?;

    let star = [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)];
    let s = eig(4, &star)?.scores;
    let (center, leaf) = (1.0 / 2f64.sqrt(), 1.0 / (2f64.sqrt() * 3f64.sqrt()));
    ensure((s[0] - center).abs() <= 1e-9 && s[1..].iter().all(|x| (x - leaf).abs() <= 1e-9), || format!("star {s:?}"))?;

    let mut rng = rng(303);
    let mut worst = 0.0f64;
    let mut worst_scale = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(2..=10);
        let edges = random_connected(&mut rng, n, 0.35, true);
        let got = eig(n, &edges)?;
        let (dense, _) = dense_principal_eigenvector(n, &edges);
        worst = worst.max(max_abs_diff(&got.scores, &dense));
        let factor = rng.random_range(0.001..1000.0);
        let scaled: Vec<_> = edges.iter().map(|&(a, b, w)| (a, b, w * factor)).collect();
        worst_scale = worst_scale.max(max_abs_diff(&got.scores, &eig(n, &scaled)?.scores));
    }
    ensure(worst <= 1e-8, || format!("dense oracle max diff {worst:e}"))?;
    ensure(worst_scale <= 1e-12, || format!("rescaling max diff {worst_scale:e}"))?;
    Ok(format!("K5 and star exact; 50 graphs max diff {worst:.1e}; rescaling max diff {worst_scale:.1e}"))
}

// 4 -------------------------------------------------------------------------

fn betweenness_checks() -> Outcome {
    let mut rng = rng(404);
    let mut worst = 0.0f64;
    for k in 0..50 {
        let n = rng.random_range(2..=12);
        let weighted = k % 2 == 1;
        let p = rng.random_range(0.05..0.5);
        let edges = random_connected(&mut rng, n, p, weighted);
        let mode = if weighted { PathMode::InverseWeight } else { PathMode::Binary };
        let fast = betweenness_centrality(&graph(n, &edges), mode, false);
        worst = worst.max(max_abs_diff(&fast, &brute_force_betweenness(n, &edges, weighted)));
    }
    ensure(worst <= 1e-9, || format!("brute force max diff {worst:e}"))?;

    for n in 3..=12usize {
        let star: Vec<_> = (1..n).map(|v| (0, v, 1.0)).collect();
        let bc = betweenness_centrality(&graph(n, &star), PathMode::Binary, false);
        let expected = ((n - 1) * (n - 2) / 2) as f64;
        ensure(bc[0] == expected && bc[1..].iter().all(|&x| x == 0.0), || format!("star n={n}: {bc:?}"))?;

        let complete: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b, 1.0))).collect();
        let bc = betweenness_centrality(&graph(n, &complete), PathMode::Binary, false);
        ensure(bc.iter().all(|&x| x == 0.0), || format!("K{n}: {bc:?}"))?;
    }
    Ok(format!("50 graphs max diff {worst:.1e}; stars and complete graphs n=3..12 exact"))
}

// 5 -------------------------------------------------------------------------

const CORPUS_JOURNALS: [(&str, fn(usize) -> bool); 6] = [
    ("ALPHA", |_| true),
    ("BETA", |i| i % 2 == 0),
    ("GAMMA", |i| i % 3 == 0),
    ("DELTA", |i| i % 5 == 0),
    ("EPSILON", |i| i % 5 == 1),
    ("ZETA", |i| i % 5 == 1),
];

/// 200 records; record `i` cites each journal whose residue rule holds.
/// Spelling variants, an alias and repeated references are mixed in.
fn residue_corpus() -> (Vec<String>, AliasTable) {
    let aliases = AliasTable::new([("J BETA OLD", "BETA")]).unwrap();
    let lines = (0..200)
        .map(|i| {
            let mut refs = Vec::new();
            for (name, cites) in CORPUS_JOURNALS {
                if !cites(i) {
                    continue;
                }
                let spelled = match (name, i % 4) {
                    ("BETA", 0) => "J Beta Old".to_string(),
                    (_, 1) => name.to_lowercase(),
                    (_, 2) => format!(" {name}."),
                    _ => name.to_string(),
                };
                refs.push(format!("Smith J, {}, {spelled}, V{}, P{}", 1990 + i % 20, i % 7, i));
                if i % 3 == 2 {
                    refs.push(format!("Doe A, 2001, {name}, V1, P1"));
                }
            }
            refs.push(format!("Anon, 2010, 12345, V1, P{i}"));
            format!("R{i:03}\t{}\tSOURCE\t{}", 2000 + i % 16, refs.join("; "))
        })
        .collect();
    (lines, aliases)
}

fn build_from_lines(lines: &[String], aliases: &AliasTable) -> Result<CoCitationNetwork, String> {
    let tsv = format!("id\tyear\tsource\tcited\n{}\n", lines.join("\n"));
    let parsed = parse_records(tsv.as_bytes(), &FormatConfig::default()).map_err(|e| e.to_string())?;
    ensure(parsed.skipped.is_empty(), || format!("skipped rows {:?}", parsed.skipped))?;
    Ok(build_cocitation(&parsed.records, aliases))
}

fn cocitation_checks() -> Outcome {
    let (lines, aliases) = residue_corpus();
    let net = build_from_lines(&lines, &aliases)?;

    // expected counts by direct enumeration of the residue rules
    let names: Vec<&str> = net.nodes().iter().map(|n| n.name.as_str()).collect();
    let mut expected_names: Vec<&str> = CORPUS_JOURNALS.iter().map(|(n, _)| *n).collect();
    expected_names.sort();
    ensure(names == expected_names, || format!("nodes {names:?}"))?;
    for (a, ca) in CORPUS_JOURNALS {
        let citations = (0..200).filter(|&i| ca(i)).count() as u64;
        let node = &net.nodes()[net.index_of(a).unwrap()];
        ensure(node.citations == citations, || format!("{a}: {} citations, expected {citations}", node.citations))?;
        for (b, cb) in CORPUS_JOURNALS {
            if a >= b {
                continue;
            }
            let pairs = (0..200).filter(|&i| ca(i) && cb(i)).count() as f64;
            ensure(net.weight(a, b) == pairs, || format!("{a}-{b}: {} vs {pairs}", net.weight(a, b)))?;
        }
    }
    // a few by hand: lcm(2,3)=6 gives 34 records, CRT i = 6 mod 15 gives 13
    ensure(net.weight("BETA", "GAMMA") == 34.0 && net.weight("EPSILON", "GAMMA") == 13.0, || "hand counts".into())?;
    ensure(net.weight("DELTA", "EPSILON") == 0.0 && net.weight("EPSILON", "ZETA") == 40.0, || "hand counts".into())?;

    let reference = write_network_json(&net);
    let mut rng = rng(505);
    for _ in 0..5 {
        let mut shuffled = lines.clone();
        shuffled.shuffle(&mut rng);
        let other = build_from_lines(&shuffled, &aliases)?;
        let bits = |n: &CoCitationNetwork| n.edges().map(|(a, b, w)| (a, b, w.to_bits())).collect::<Vec<_>>();
        ensure(other == net && bits(&other) == bits(&net) && write_network_json(&other) == reference, || {
            "record permutation changed the network".into()
        })?;
    }

    // DELTA, EPSILON and ZETA tie at 40 for the last two of five slots
    let (kept, report) =
        apply_threshold(&net, &ThresholdConfig { min_citations: 40, top_n: 5 }).map_err(|e| e.to_string())?;
    let kept: Vec<&str> = kept.nodes().iter().map(|n| n.name.as_str()).collect();
    ensure(kept == ["ALPHA", "BETA", "DELTA", "EPSILON", "GAMMA"], || format!("kept {kept:?}"))?;
    ensure(report.above_threshold == 6, || format!("{report:?}"))?;
    Ok(format!("{} edges match enumeration; 5 permutations identical; tie drops ZETA", net.edge_count()))
}

// 6 -------------------------------------------------------------------------

fn pajek_round_trip() -> Outcome {
    let mut rng = rng(606);
    for k in 0..20 {
        let n = rng.random_range(2..=40);
        let mut edges = random_connected(&mut rng, n, 0.2, true);
        if k % 2 == 1 {
            for e in &mut edges {
                e.2 = e.2 / 7.0 + rng.random_range(0.0..1.0);
            }
        }
        let net = network(2015, n, &edges);
        let text = write_pajek(&net);
        ensure(text == write_pajek(&net), || format!("network {k}: writes differ"))?;
        let back = read_pajek(&text).map_err(|e| e.to_string())?.network;
        let labels = |n: &CoCitationNetwork| n.nodes().iter().map(|x| x.name.clone()).collect::<Vec<_>>();
        let bits = |n: &CoCitationNetwork| n.edges().map(|(a, b, w)| (a, b, w.to_bits())).collect::<Vec<_>>();
        ensure(labels(&back) == labels(&net), || format!("network {k}: labels differ"))?;
        ensure(bits(&back) == bits(&net), || format!("network {k}: edges differ"))?;
        ensure(write_pajek(&back) == text, || format!("network {k}: rewrite differs"))?;
    }
    Ok("20 networks preserved exactly; writes byte-identical".into())
}

// 7 -------------------------------------------------------------------------

const CORE: usize = 6;
const PERIPHERY: usize = 6;

fn ecosystem_levels() -> BTreeMap<String, DanishLevel> {
    let mut levels = BTreeMap::new();
    for k in 0..CORE {
        levels.insert(format!("CORE {k}"), DanishLevel::Level2);
    }
    for k in 0..PERIPHERY {
        levels.insert(format!("PERIPHERY {k}"), DanishLevel::Level1);
    }
    levels.insert("RISING".into(), DanishLevel::Level1);
    levels.insert("FLAT".into(), DanishLevel::Level1);
    levels.insert("DECLINING".into(), DanishLevel::Level2);
    levels.insert("TERMINATED".into(), DanishLevel::Level2);
    levels
}

/// A core clique of level-2 journals with a level-1 periphery, plus one
/// journal each that rises into the core, stays flat, declines, and stops
/// publishing before the last snapshot.
fn ecosystem(year: i32) -> CoCitationNetwork {
    let stage = match year {
        2007 => 0,
        2011 => 1,
        _ => 2,
    };
    let core = |k: usize| format!("CORE {k}");
    let per = |k: usize| format!("PERIPHERY {k}");
    let mut edges: Vec<(String, String, f64)> = Vec::new();
    for a in 0..CORE {
        for b in a + 1..CORE {
            edges.push((core(a), core(b), 10.0));
        }
    }
    for k in 0..PERIPHERY {
        edges.push((per(k), core(k % CORE), 2.0));
        edges.push((per(k), per((k + 1) % PERIPHERY), 1.0));
    }
    // rising: periphery in 2007, core-level from 2011
    if stage == 0 {
        edges.push(("RISING".into(), per(0), 1.0));
    } else {
        for k in 0..CORE {
            edges.push(("RISING".into(), core(k), 14.0));
        }
    }
    edges.push(("FLAT".into(), core(0), 3.0));
    edges.push(("FLAT".into(), core(1), 3.0));
    edges.push(("FLAT".into(), per(1), 1.0));
    match stage {
        0 => (0..CORE).for_each(|k| edges.push(("DECLINING".into(), core(k), 10.0))),
        1 => (0..3).for_each(|k| edges.push(("DECLINING".into(), core(k), 3.0))),
        _ => edges.push(("DECLINING".into(), per(2), 1.0)),
    }
    if stage < 2 {
        (0..CORE).for_each(|k| edges.push(("TERMINATED".into(), core(k), 8.0)));
    }

    let mut names: Vec<String> = edges.iter().flat_map(|(a, b, _)| [a.clone(), b.clone()]).collect();
    names.sort();
    names.dedup();
    let nodes = names.into_iter().map(|name| JournalNode { name, citations: 500 }).collect();
    CoCitationNetwork::new(year, nodes, edges).unwrap()
}

fn ecosystem_run() -> Result<(String, Vec<(String, Action)>), String> {
    let cfg = CentralityConfig::default();
    let snapshots = [2007, 2011, 2015]
        .into_iter()
        .map(|year| {
            let report = compute_report(&ecosystem(year), &cfg).map_err(|e| e.to_string())?;
            Ok(Snapshot { year, scores: report.rows })
        })
        .collect::<Result<Vec<_>, String>>()?;
    let bundle = audit::all_series(&snapshots).map_err(|e| e.to_string())?;
    let recs = audit::recommend_all(&bundle, &ecosystem_levels(), &Policy::default()).map_err(|e| e.to_string())?;
    let actions = recs.iter().map(|r| (r.journal.clone(), r.action)).collect();
    Ok((write_series_json(&bundle) + &write_recommendations_json(&recs), actions))
}

fn recommendation_checks() -> Outcome {
    let (reference, actions) = ecosystem_run()?;
    let action = |j: &str| actions.iter().find(|(n, _)| n == j).map(|(_, a)| *a);
    let checks = [
        ("RISING", vec![Action::PromoteLevel2]),
        ("FLAT", vec![Action::Stay]),
        ("DECLINING", vec![Action::Stay, Action::Remove]),
        ("TERMINATED", vec![Action::Remove]),
    ];
    for (journal, allowed) in &checks {
        let got = action(journal);
        ensure(got.is_some_and(|a| allowed.contains(&a)), || format!("{journal}: {got:?}, expected {allowed:?}"))?;
    }
    for run in 0..10 {
        ensure(ecosystem_run()?.0 == reference, || format!("repeat {run} differs"))?;
    }
    for threads in [1, 2, 4, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        let out = pool.install(ecosystem_run)?.0;
        ensure(out == reference, || format!("{threads} threads differ"))?;
    }
    let summary: Vec<String> = checks.iter().map(|(j, _)| format!("{j} {:?}", action(j).unwrap())).collect();
    Ok(format!("{}; identical over 10 runs and 1/2/4/8 threads", summary.join(", ")))
}

// 8 -------------------------------------------------------------------------

fn pipeline(tsv: &str) -> Result<(usize, String), String> {
    let parsed = parse_records(tsv.as_bytes(), &FormatConfig::default()).map_err(|e| e.to_string())?;
    let aliases = AliasTable::default();
    let full = build_cocitation(&parsed.records, &aliases);
    let (net, _) = apply_threshold(&full, &ThresholdConfig::default()).map_err(|e| e.to_string())?;
    let report = compute_report(&net, &CentralityConfig::default()).map_err(|e| e.to_string())?;
    let names: Vec<String> = report.rows.iter().map(|r| r.journal.clone()).collect();
    let levels = synthetic_levels(&names);
    let eig: BTreeMap<String, f64> = report.rows.iter().map(|r| (r.journal.clone(), r.eigenvector)).collect();
    let tab = audit::crosstab(&levels, &report.rows);
    let boxes = audit::boxplot_summary(&eig, &levels).map_err(|e| e.to_string())?;
    let corr = correlate_measures(&report.rows).map_err(|e| e.to_string())?;
    let out = [
        write_network_json(&net),
        write_scores_csv(&report.rows),
        write_crosstab_csv(&tab),
        write_boxplot_csv(&boxes),
        write_correlations_csv(&corr),
    ]
    .concat();
    Ok((net.node_count(), out))
}

fn end_to_end() -> Outcome {
    let tsv = synthetic_tsv(&CorpusSpec::default());
    let start = Instant::now();
    let (nodes, first) = pipeline(&tsv)?;
    let elapsed = within_budget(start, Duration::from_secs(5))?;
    ensure((140..=151).contains(&nodes), || format!("{nodes} nodes"))?;
    let (_, second) = pipeline(&tsv)?;
    ensure(first == second, || "outputs differ between runs".into())?;
    Ok(format!("4000 records -> {nodes} nodes in {elapsed:?}; two runs byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("eigenquartile cross-tab shares", eigenquartile_shares),
        ("CIRC decision table", circ_enumeration),
        ("eigenvector centrality", eigenvector_checks),
        ("betweenness centrality", betweenness_checks),
        ("co-citation construction", cocitation_checks),
        ("Pajek round-trip", pajek_round_trip),
        ("recommendation policy", recommendation_checks),
        ("end-to-end scale", end_to_end),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
