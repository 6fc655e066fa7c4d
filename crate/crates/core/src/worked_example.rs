//! The two five-file change sets used to contrast pairwise and hyper co-change
//! graphs. Both produce the same pairwise graph; only the hypergraph keeps the
//! commit sizes apart.
//!
//! | file | set 1       | set 2          |
//! |------|-------------|----------------|
//! | F1   | C1 C4       | C1 C5 C6       |
//! | F2   | C1 C2 C4    | C1 C7 C8       |
//! | F3   | C1 C4       | C3 C4          |
//! | F4   | C1 C2 C3    | C2 C3 C5 C7    |
//! | F5   | C2 C3       | C2 C4 C6 C8    |

use crate::commitlog::{CommitRecord, FileDelta};

pub const SET_1_RELEASE: &str = "set1";
pub const SET_2_RELEASE: &str = "set2";

const SET_1: &[(&str, &[u8])] = &[
    ("C1", &[1, 2, 3, 4]),
    ("C2", &[2, 4, 5]),
    ("C3", &[4, 5]),
    ("C4", &[1, 2, 3]),
];

const SET_2: &[(&str, &[u8])] = &[
    ("C1", &[1, 2]),
    ("C2", &[4, 5]),
    ("C3", &[3, 4]),
    ("C4", &[3, 5]),
    ("C5", &[1, 4]),
    ("C6", &[1, 5]),
    ("C7", &[2, 4]),
    ("C8", &[2, 5]),
];

pub fn file_name(n: u8) -> String {
    format!("F{n}.java")
}

fn build(release: &str, table: &[(&str, &[u8])]) -> Vec<CommitRecord> {
    table
        .iter()
        .enumerate()
        .map(|(i, (sha, files))| CommitRecord {
            sha: (*sha).to_string(),
            author: "dev@example.org".to_string(),
            timestamp: 1_600_000_000 + i as i64 * 3600,
            release: release.to_string(),
            files: files
                .iter()
                .map(|&n| FileDelta {
                    path: file_name(n),
                    added: 10,
                    deleted: 2,
                })
                .collect(),
        })
        .collect()
}

pub fn change_set_1() -> Vec<CommitRecord> {
    build(SET_1_RELEASE, SET_1)
}

pub fn change_set_2() -> Vec<CommitRecord> {
    build(SET_2_RELEASE, SET_2)
}

/// Renders records as a JSONL commit stream.
pub fn jsonl(records: &[CommitRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("commit records serialize"));
        out.push('\n');
    }
    out
}

/// A 54-column product corpus for the five example files plus one file that
/// no commit touches. F2 and F4 are labelled defective.
pub fn toy_corpus_csv() -> String {
    let mut out = String::from("File");
    for k in 1..=crate::featureset::PRODUCT_METRIC_COUNT {
        out.push_str(&format!(",PM{k:02}"));
    }
    out.push_str(",RealBug\n");
    let files: Vec<String> = (1..=5).map(file_name).chain(["Untouched.java".to_string()]).collect();
    for (i, f) in files.iter().enumerate() {
        out.push_str(f);
        for k in 1..=crate::featureset::PRODUCT_METRIC_COUNT {
            let v = ((i + 1) * k) % 17;
            out.push_str(&format!(",{}.5", v));
        }
        let label = u8::from(f == "F2.java" || f == "F4.java");
        out.push_str(&format!(",{label}\n"));
    }
    out
}

/// Outcome of one embedded check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        detail: detail.into(),
    }
}

/// Recomputes the worked example end to end and compares against the hand
/// derived values.
pub fn self_test() -> Vec<Check> {
    use crate::cochange::build_pairwise;
    use crate::commitlog::{ingest_commit_log, IngestConfig};
    use crate::featureset::{compute_features, join, CorpusOptions, FeatureSet, ProductCorpus};
    use crate::hypergraph::{build_hypergraph, hyperedge_centrality, line_graph, vector_centrality, Measure};

    let mut checks = Vec::new();
    let ingest = |records: &[CommitRecord]| {
        ingest_commit_log(jsonl(records).as_bytes(), &IngestConfig::default())
    };
    let (s1, s2) = match (ingest(&change_set_1()), ingest(&change_set_2())) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            checks.push(check("ingest", false, e.to_string()));
            return checks;
        }
    };

    let run = || -> crate::error::Result<Vec<Check>> {
        let mut out = Vec::new();
        let d1 = build_pairwise(&s1, SET_1_RELEASE)?.degree_sequence();
        let d2 = build_pairwise(&s2, SET_2_RELEASE)?.degree_sequence();
        out.push(check(
            "pairwise degree sequences",
            d1 == [2, 3, 3, 4, 4] && d1 == d2,
            format!("{d1:?} vs {d2:?}"),
        ));

        let h1 = build_hypergraph(&s1, SET_1_RELEASE)?;
        let h2 = build_hypergraph(&s2, SET_2_RELEASE)?;
        out.push(check(
            "hyperedge size multisets",
            h1.size_multiset() == [4, 3, 3, 2] && h2.size_multiset() == [2; 8],
            format!("{:?} vs {:?}", h1.size_multiset(), h2.size_multiset()),
        ));

        let lg = line_graph(&h1);
        let edges: Vec<String> = lg.edge_ids().map(|(a, b)| format!("{a}{b}")).collect();
        out.push(check(
            "line graph of set 1",
            edges == ["C1C2", "C1C3", "C1C4", "C2C3", "C2C4"],
            edges.join(" "),
        ));

        let scores = hyperedge_centrality(&lg, Measure::Degree)?;
        let vc = vector_centrality(&h1, Measure::Degree, &scores)?;
        let f5 = &vc[&file_name(5)];
        let f1 = &vc[&file_name(1)];
        let total: f64 = vc.values().map(|v| v.l1_norm()).sum();
        let ok = (f5.slot(2) - 0.1).abs() < 1e-12
            && (f5.slot(3) - 0.1).abs() < 1e-12
            && (f1.slot(3) - 0.2 / 3.0).abs() < 1e-12
            && (f1.slot(4) - 0.075).abs() < 1e-12
            && (total - 1.0).abs() < 1e-9;
        out.push(check(
            "degree vector centrality",
            ok,
            format!(
                "F5[2]={:.4} F5[3]={:.4} F1[3]={:.4} F1[4]={:.4} total={total:.6}",
                f5.slot(2),
                f5.slot(3),
                f1.slot(3),
                f1.slot(4)
            ),
        ));

        let feats = compute_features(&s1, SET_1_RELEASE)?;
        let corpus = ProductCorpus::from_csv(toy_corpus_csv().as_bytes(), &CorpusOptions::default())?;
        let widths: Vec<usize> = FeatureSet::ALL
            .into_iter()
            .map(|set| join(&corpus, &feats, set).0.width())
            .collect();
        out.push(check(
            "feature widths",
            widths == [68, 1454, 1854],
            format!("{widths:?}"),
        ));
        Ok(out)
    };
    match run() {
        Ok(c) => checks.extend(c),
        Err(e) => checks.push(check("worked example", false, e.to_string())),
    }
    checks
}
