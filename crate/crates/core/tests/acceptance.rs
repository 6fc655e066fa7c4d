//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hyperchange::cochange::build_pairwise;
use hyperchange::commitlog::{ingest_commit_log, IngestConfig, ReleaseView};
use hyperchange::featureset::{compute_features, join, CorpusOptions, FeatureSet, ProductCorpus};
use hyperchange::hypergraph::{
    build_hypergraph, hyperedge_centrality, line_graph, vector_centrality, Hypergraph, Measure,
};
use hyperchange::process::ChangeProfile;
use hyperchange::vector::{commit_count_vector, line_delta_vectors, ownership_vectors, vector_metrics_all};
use hyperchange::worked_example::{
    change_set_1, change_set_2, jsonl, toy_corpus_csv, SET_1_RELEASE, SET_2_RELEASE,
};
use hyperchange::MetricId;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BINS: usize = 100;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn worked_example_structure() -> Outcome {
    let start = Instant::now();
    let cfg = IngestConfig::default();
    let s1 = ingest_commit_log(jsonl(&change_set_1()).as_bytes(), &cfg).map_err(|e| e.to_string())?;
    let s2 = ingest_commit_log(jsonl(&change_set_2()).as_bytes(), &cfg).map_err(|e| e.to_string())?;
    let d1 = build_pairwise(&s1, SET_1_RELEASE).map_err(|e| e.to_string())?.degree_sequence();
    let d2 = build_pairwise(&s2, SET_2_RELEASE).map_err(|e| e.to_string())?.degree_sequence();
    ensure(d1 == [2, 3, 3, 4, 4], || format!("set 1 degrees {d1:?}"))?;
    ensure(d2 == [2, 3, 3, 4, 4], || format!("set 2 degrees {d2:?}"))?;
    let h1 = build_hypergraph(&s1, SET_1_RELEASE).map_err(|e| e.to_string())?;
    let h2 = build_hypergraph(&s2, SET_2_RELEASE).map_err(|e| e.to_string())?;
    ensure(h1.size_multiset() == [4, 3, 3, 2], || format!("set 1 sizes {:?}", h1.size_multiset()))?;
    ensure(h2.size_multiset() == [2; 8], || format!("set 2 sizes {:?}", h2.size_multiset()))?;
    let edges: Vec<(String, String)> = line_graph(&h1)
        .edge_ids()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let expected: Vec<(String, String)> = [("C1", "C2"), ("C1", "C3"), ("C1", "C4"), ("C2", "C3"), ("C2", "C4")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    ensure(edges == expected, || format!("line graph edges {edges:?}"))?;
    let elapsed = start.elapsed();
    within_time(elapsed, Duration::from_secs(1))?;
    Ok(format!("degrees {d1:?}, sizes {:?} vs {:?}, {elapsed:?}", h1.size_multiset(), h2.size_multiset()))
}

fn normalization() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let raw = common::random_hypergraph(&mut rng, 50, 40, 2, 10);
        let hg = Hypergraph::from_edges(raw, BINS).map_err(|e| e.to_string())?;
        let lg = line_graph(&hg);
        for m in Measure::ALL {
            let scores = hyperedge_centrality(&lg, m).map_err(|e| format!("case {case} {m}: {e}"))?;
            let vc = vector_centrality(&hg, m, &scores).map_err(|e| e.to_string())?;
            let total: f64 = vc.values().map(|v| v.l1_norm()).sum();
            worst = worst.max((total - 1.0).abs());
            ensure((total - 1.0).abs() <= 1e-9, || format!("case {case} {m}: total {total}"))?;
        }
    }
    let elapsed = start.elapsed();
    within_time(elapsed, Duration::from_secs(60))?;
    Ok(format!("1000 hypergraphs x 4 measures, max |Σ-1| = {worst:.2e}, {elapsed:?}"))
}

fn brute_force_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let raw = common::random_hypergraph(&mut rng, 8, 6, 2, 8);
        let hg = Hypergraph::from_edges(raw.clone(), BINS).map_err(|e| e.to_string())?;
        let lg = line_graph(&hg);
        for m in Measure::ALL {
            let scores = hyperedge_centrality(&lg, m).map_err(|e| e.to_string())?;
            let fast = vector_centrality(&hg, m, &scores).map_err(|e| e.to_string())?;
            let slow = common::brute_force_vector_centrality(&raw, &scores, BINS);
            ensure(fast.len() == slow.len(), || format!("case {case}: node sets differ"))?;
            for (node, expected) in &slow {
                let got = fast[node].slots();
                for (l, (g, e)) in got.iter().zip(expected).enumerate() {
                    worst = worst.max((g - e).abs());
                    ensure((g - e).abs() <= 1e-12, || {
                        format!("case {case} {m} node {node} slot {}: {g} vs {e}", l + 1)
                    })?;
                }
            }
        }
    }
    Ok(format!("200 hypergraphs x 4 measures, max slot error {worst:.2e}"))
}

fn degree_hand_values() -> Outcome {
    let s1 = ingest_commit_log(jsonl(&change_set_1()).as_bytes(), &IngestConfig::default())
        .map_err(|e| e.to_string())?;
    let hg = build_hypergraph(&s1, SET_1_RELEASE).map_err(|e| e.to_string())?;
    let scores = hyperedge_centrality(&line_graph(&hg), Measure::Degree).map_err(|e| e.to_string())?;
    let vc = vector_centrality(&hg, Measure::Degree, &scores).map_err(|e| e.to_string())?;
    let f5 = &vc["F5.java"];
    let f1 = &vc["F1.java"];
    let checks = [
        ("F5 l=2", f5.slot(2), 0.100, 5e-4),
        ("F5 l=3", f5.slot(3), 0.100, 5e-4),
        ("F1 l=3", f1.slot(3), 0.0667, 5e-5),
        ("F1 l=4", f1.slot(4), 0.075, 5e-4),
    ];
    for (name, got, expected, tol) in checks {
        ensure((got - expected).abs() <= tol, || format!("{name}: {got} vs {expected}"))?;
    }
    let total: f64 = vc.values().map(|v| v.l1_norm()).sum();
    ensure((total - 1.0).abs() <= 1e-9, || format!("total {total}"))?;
    Ok(format!(
        "F5=({:.3}, {:.3}) F1=({:.4}, {:.3}) total={total:.3}",
        f5.slot(2),
        f5.slot(3),
        f1.slot(3),
        f1.slot(4)
    ))
}

fn sums_to_one_or_zero(name: &str, slots: &[f64], positive: bool) -> Result<(), String> {
    let sum: f64 = slots.iter().sum();
    if positive {
        ensure((sum - 1.0).abs() <= 1e-9, || format!("{name}: sum {sum}, expected 1"))
    } else {
        ensure(slots.iter().all(|&v| v == 0.0), || format!("{name}: expected all-zero"))
    }
}

fn vector_coherence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut windows = 0usize;
    let mut files = 0usize;
    while windows < 500 {
        let records = common::random_history(&mut rng);
        let store = common::ingest(&records);
        ensure(store.commits().iter().all(|c| (1..=100).contains(&c.size())), || {
            "stored commit outside 1..=100".to_string()
        })?;
        for w in store.windows() {
            windows += 1;
            let view = ReleaseView::new(&store, &w.release).map_err(|e| e.to_string())?;
            let profile = ChangeProfile::of_view(&view);
            let graph = build_pairwise(&store, &w.release).map_err(|e| e.to_string())?;
            let all = vector_metrics_all(&view, &profile, &graph).map_err(|e| e.to_string())?;
            let raw = common::raw_window_stats(&records, &w.release);
            let release_idx: usize = w.release[1..].parse().unwrap();
            ensure(all.keys().eq(raw.keys()), || format!("{}: file sets differ", w.release))?;
            for (path, stats) in &raw {
                files += 1;
                let h = view.history(path);
                let vs = &all[path];
                ensure(vs.len() == 14 && vs.iter().all(|v| v.bins() == BINS), || {
                    format!("{path}: expected 14 vectors of {BINS} slots")
                })?;
                let comm = commit_count_vector(&h);
                ensure(comm == vs[MetricId::Comm.index()], || format!("{path}: COMM mismatch"))?;
                let counts: Vec<f64> = comm.slots().iter().map(|s| s * stats.commits as f64).collect();
                ensure(counts.iter().all(|c| (c - c.round()).abs() < 1e-9), || {
                    format!("{path}: non-integer bucket counts {counts:?}")
                })?;
                let total: usize = counts.iter().map(|c| c.round() as usize).sum();
                let buckets: usize = h.buckets().values().map(Vec::len).sum();
                ensure(total == stats.commits && buckets == stats.commits, || {
                    format!("{path}: Σ buckets {total}/{buckets} vs |C_f| {}", stats.commits)
                })?;
                sums_to_one_or_zero("COMM", comm.slots(), stats.commits > 0)?;

                let (add, del) = line_delta_vectors(&h);
                sums_to_one_or_zero(&format!("{path} ADD"), add.slots(), stats.added > 0)?;
                sums_to_one_or_zero(&format!("{path} DEL"), del.slots(), stats.deleted > 0)?;

                let owner = stats
                    .lines_by_dev
                    .iter()
                    .fold(None::<(&String, u64)>, |best, (d, &l)| match best {
                        Some((_, b)) if b >= l => best,
                        _ => Some((d, l)),
                    })
                    .map(|(d, _)| d.clone())
                    .unwrap();
                let owner_lines = stats.lines_by_dev[&owner];
                let lifetime = common::raw_owner_lifetime_lines(&records, release_idx, &owner);
                let (own, oexp) = ownership_vectors(&h);
                sums_to_one_or_zero(&format!("{path} OWN"), own.slots(), owner_lines > 0)?;
                sums_to_one_or_zero(&format!("{path} OEXP"), oexp.slots(), lifetime > 0)?;

                for v in vs {
                    ensure(v.slots().iter().all(|x| x.is_finite() && *x >= 0.0), || {
                        format!("{path} {}: negative or non-finite slot", v.metric)
                    })?;
                }
            }
        }
    }
    Ok(format!("{windows} windows, {files} file histories"))
}

fn feature_widths() -> Outcome {
    let store = ingest_commit_log(jsonl(&change_set_1()).as_bytes(), &IngestConfig::default())
        .map_err(|e| e.to_string())?;
    let features = compute_features(&store, SET_1_RELEASE).map_err(|e| e.to_string())?;
    let corpus = ProductCorpus::from_csv(toy_corpus_csv().as_bytes(), &CorpusOptions::default())
        .map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut widths = BTreeMap::new();
    for set in FeatureSet::ALL {
        let (matrix, _) = join(&corpus, &features, set);
        widths.insert(set, matrix.width());
        let mut bytes = Vec::new();
        for k in 0..2 {
            let path = dir.path().join(format!("{}-{k}.csv", set.id()));
            let file = std::fs::File::create(&path).map_err(|e| e.to_string())?;
            matrix.write_csv(file, false).map_err(|e| e.to_string())?;
            bytes.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        ensure(bytes[0] == bytes[1], || format!("{set}: re-export differs"))?;
        let header = String::from_utf8_lossy(&bytes[0]).lines().next().unwrap_or_default().to_string();
        ensure(header.split(',').count() == matrix.width() + 2, || {
            format!("{set}: header has {} fields", header.split(',').count())
        })?;
        ensure(matrix.rows.len() == 5, || format!("{set}: {} rows", matrix.rows.len()))?;
    }
    let got: Vec<usize> = widths.values().copied().collect();
    ensure(got == [68, 1454, 1854], || format!("widths {got:?}"))?;
    Ok(format!("widths {got:?}, 5 rows, byte-identical re-export"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("worked example: degree sequences, hyperedge sizes, line graph", worked_example_structure),
        ("vector centrality normalization on 1000 random hypergraphs", normalization),
        ("vector centrality vs brute-force oracle on 200 hypergraphs", brute_force_equivalence),
        ("degree vector centrality hand values for change set 1", degree_hand_values),
        ("vector metric coherence on 500 random windows", vector_coherence),
        ("feature widths 68/1454/1854 and deterministic export", feature_widths),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL [{}] {name}: {reason}", i + 1);
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
