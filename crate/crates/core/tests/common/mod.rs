//! Random fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use hyperchange::commitlog::{ingest_commit_log, CommitRecord, CommitStore, FileDelta, IngestConfig};
use rand::seq::SliceRandom;
use rand::Rng;

/// Raw hyperedge list: `(edge id, member names)`.
pub type RawEdges = Vec<(String, Vec<String>)>;

/// Random hypergraph with up to `max_nodes` nodes and up to `max_edges`
/// hyperedges whose sizes lie in `min_size..=max_size`.
pub fn random_hypergraph<R: Rng>(
    rng: &mut R,
    max_nodes: usize,
    max_edges: usize,
    min_size: usize,
    max_size: usize,
) -> RawEdges {
    let nodes = rng.gen_range(min_size.max(2)..=max_nodes);
    let names: Vec<String> = (0..nodes).map(|i| format!("n{i:02}")).collect();
    let edges = rng.gen_range(1..=max_edges);
    (0..edges)
        .map(|e| {
            let size = rng.gen_range(min_size..=max_size.min(nodes));
            let members = names.choose_multiple(rng, size).cloned().collect();
            (format!("e{e:02}"), members)
        })
        .collect()
}

/// Direct evaluation of `x_{j,l} = (1/l) Σ_{e : |e| = l, j ∈ e} x(e)` by
/// scanning every (node, order, hyperedge) triple.
pub fn brute_force_vector_centrality(
    edges: &RawEdges,
    scores: &BTreeMap<String, f64>,
    bins: usize,
) -> BTreeMap<String, Vec<f64>> {
    let mut nodes: Vec<String> = edges.iter().flat_map(|(_, m)| m.clone()).collect();
    nodes.sort();
    nodes.dedup();
    let mut out = BTreeMap::new();
    for node in nodes {
        let mut slots = vec![0.0; bins];
        for l in 1..=bins {
            let mut sum = 0.0;
            for (id, members) in edges {
                if members.len() == l && members.iter().any(|m| *m == node) {
                    sum += scores[id];
                }
            }
            slots[l - 1] = sum / l as f64;
        }
        out.insert(node, slots);
    }
    out
}

/// Random multi-release commit history. Sizes are mostly small, with
/// occasional large and over-limit commits; line counts include zeros.
pub fn random_history<R: Rng>(rng: &mut R) -> Vec<CommitRecord> {
    let releases = rng.gen_range(1..=3);
    let pool = rng.gen_range(3..=150);
    let files: Vec<String> = (0..pool).map(|i| format!("src/pkg{}/File{i}.java", i % 4)).collect();
    let authors: Vec<String> = (0..rng.gen_range(1..=6)).map(|i| format!("dev{i}@example.org")).collect();
    let mut out = Vec::new();
    let mut sha = 0;
    for r in 0..releases {
        for _ in 0..rng.gen_range(0..=25) {
            let size = match rng.gen_range(0..20) {
                0 => rng.gen_range(1..=pool.min(120)),
                1..=4 => 1,
                _ => rng.gen_range(1..=pool.min(8)),
            };
            let mut deltas: Vec<FileDelta> = files
                .choose_multiple(rng, size)
                .map(|p| FileDelta {
                    path: p.clone(),
                    added: if rng.gen_bool(0.2) { 0 } else { rng.gen_range(0..200) },
                    deleted: if rng.gen_bool(0.4) { 0 } else { rng.gen_range(0..80) },
                })
                .collect();
            if rng.gen_bool(0.1) {
                deltas.push(FileDelta {
                    path: format!("docs/notes{sha}.md"),
                    added: 3,
                    deleted: 0,
                });
            }
            out.push(CommitRecord {
                sha: format!("{sha:08x}"),
                author: authors.choose(rng).unwrap().clone(),
                timestamp: sha as i64,
                release: format!("r{r}"),
                files: deltas,
            });
            sha += 1;
        }
    }
    out
}

pub fn ingest(records: &[CommitRecord]) -> CommitStore {
    ingest_commit_log(
        hyperchange::worked_example::jsonl(records).as_bytes(),
        &IngestConfig::default(),
    )
    .expect("generated history ingests")
}

/// Per-file raw aggregates computed straight from the commit records.
#[derive(Debug, Default, Clone)]
pub struct RawFileStats {
    pub commits: usize,
    pub added: u64,
    pub deleted: u64,
    pub lines_by_dev: BTreeMap<String, u64>,
}

/// Aggregates for every source file in window `release`, recomputed from the
/// records with the size filter applied independently of the store.
pub fn raw_window_stats(records: &[CommitRecord], release: &str) -> BTreeMap<String, RawFileStats> {
    let mut out: BTreeMap<String, RawFileStats> = BTreeMap::new();
    for c in records.iter().filter(|c| c.release == release) {
        let src: Vec<&FileDelta> = c.files.iter().filter(|d| d.path.ends_with(".java")).collect();
        if src.is_empty() || src.len() > 100 {
            continue;
        }
        for d in src {
            let s = out.entry(d.path.clone()).or_default();
            s.commits += 1;
            s.added += d.added;
            s.deleted += d.deleted;
            *s.lines_by_dev.entry(c.author.clone()).or_default() += d.added + d.deleted;
        }
    }
    out
}

/// Owner's cumulative project-wide changed lines, from raw records.
pub fn raw_owner_lifetime_lines(records: &[CommitRecord], upto: usize, owner: &str) -> u64 {
    records
        .iter()
        .filter(|c| c.release[1..].parse::<usize>().unwrap() <= upto && c.author == owner)
        .filter_map(|c| {
            let src: Vec<&FileDelta> = c.files.iter().filter(|d| d.path.ends_with(".java")).collect();
            (!src.is_empty() && src.len() <= 100).then(|| src.iter().map(|d| d.added + d.deleted).sum::<u64>())
        })
        .sum()
}
