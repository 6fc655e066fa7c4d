//! Hyper co-change graph and hypergraph vector centralities.
//!
//! Every commit that changes at least two source files becomes a hyperedge over
//! those files. Classical centralities are computed for hyperedges on the line
//! graph, rescaled to unit sum, and then spread back onto files: slot `l` of
//! a file collects `x(e) / l` from each size-`l` hyperedge containing it.
//! Because each hyperedge of size `l` hands `x(e) / l` to exactly `l` files,
//! summing the L1 norms over all files gives back `Σ x(e) = 1`.

mod centrality;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::commitlog::{CommitRecord, CommitStore};
use crate::error::{Error, Result};

pub use centrality::{
    betweenness, degree, eigenvector, harmonic_closeness, EIGEN_MAX_ITERATIONS, EIGEN_TOLERANCE,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperedge {
    pub id: String,
    /// Indices into [`Hypergraph::nodes`], ascending.
    pub members: Vec<usize>,
}

impl Hyperedge {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Files as nodes, commits as hyperedges. Identical file sets from different
/// commits remain separate hyperedges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Hypergraph {
    bins: usize,
    nodes: Vec<String>,
    edges: Vec<Hyperedge>,
}

impl Hypergraph {
    /// Builds a hypergraph from `(edge id, member paths)` pairs.
    ///
    /// Every edge must have between 2 and `bins` distinct members and edge ids
    /// must be unique.
    pub fn from_edges<I, S>(edges: I, bins: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<S>)>,
        S: AsRef<str>,
    {
        let raw: Vec<(String, BTreeSet<String>)> = edges
            .into_iter()
            .map(|(id, members)| {
                (
                    id.as_ref().to_string(),
                    members.iter().map(|m| m.as_ref().to_string()).collect(),
                )
            })
            .collect();
        let nodes: Vec<String> = raw
            .iter()
            .flat_map(|(_, m)| m.iter().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<&str, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut ids = BTreeSet::new();
        let mut out = Vec::with_capacity(raw.len());
        for (id, members) in &raw {
            if !ids.insert(id.clone()) {
                return Err(Error::Config(format!("duplicate hyperedge id `{id}`")));
            }
            if members.len() < 2 || members.len() > bins {
                return Err(Error::Config(format!(
                    "hyperedge `{id}` has {} members, expected 2..={bins}",
                    members.len()
                )));
            }
            out.push(Hyperedge {
                id: id.clone(),
                members: members.iter().map(|m| index[m.as_str()]).collect(),
            });
        }
        Ok(Self {
            bins,
            nodes,
            edges: out,
        })
    }

    /// One hyperedge per commit of size two or more.
    pub fn from_commits<'a>(commits: impl IntoIterator<Item = &'a CommitRecord>, bins: usize) -> Result<Self> {
        Self::from_edges(
            commits.into_iter().filter(|c| c.size() >= 2).map(|c| {
                (
                    c.sha.as_str(),
                    c.files.iter().map(|d| d.path.as_str()).collect(),
                )
            }),
            bins,
        )
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Largest hyperedge cardinality (0 when empty).
    pub fn max_cardinality(&self) -> usize {
        self.edges.iter().map(Hyperedge::size).max().unwrap_or(0)
    }

    /// Hyperedge sizes, descending.
    pub fn size_multiset(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.edges.iter().map(Hyperedge::size).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    pub fn member_names(&self, edge: &Hyperedge) -> Vec<&str> {
        edge.members.iter().map(|&m| self.nodes[m].as_str()).collect()
    }

    /// Writes one `{"edge_id": .., "members": [..]}` object per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        #[derive(Serialize)]
        struct Row<'a> {
            edge_id: &'a str,
            members: Vec<&'a str>,
        }
        for e in &self.edges {
            serde_json::to_writer(
                &mut out,
                &Row {
                    edge_id: &e.id,
                    members: self.member_names(e),
                },
            )?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

pub fn build_hypergraph(store: &CommitStore, release: &str) -> Result<Hypergraph> {
    let window = store.window(release)?;
    Hypergraph::from_commits(store.window_commits(window.ordinal), store.max_commit_size())
}

/// Overlap graph of hyperedges: two hyperedges are adjacent when they share a file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LineGraph {
    ids: Vec<String>,
    adjacency: Vec<Vec<usize>>,
}

impl LineGraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Sorted neighbour lists, indexed like [`LineGraph::ids`].
    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// Edges as index pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, n)| n.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    /// Edges by hyperedge id.
    pub fn edge_ids(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges()
            .map(|(a, b)| (self.ids[a].as_str(), self.ids[b].as_str()))
    }
}

pub fn line_graph(hg: &Hypergraph) -> LineGraph {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); hg.nodes.len()];
    for (e, edge) in hg.edges.iter().enumerate() {
        for &m in &edge.members {
            incident[m].push(e);
        }
    }
    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); hg.edges.len()];
    for list in &incident {
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                adjacency[a].insert(b);
                adjacency[b].insert(a);
            }
        }
    }
    LineGraph {
        ids: hg.edges.iter().map(|e| e.id.clone()).collect(),
        adjacency: adjacency
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Degree,
    Betweenness,
    Closeness,
    Eigenvector,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::Degree,
        Measure::Betweenness,
        Measure::Closeness,
        Measure::Eigenvector,
    ];

    /// Column code used in `VC_<code>_<l>` feature names.
    pub fn code(self) -> &'static str {
        match self {
            Measure::Degree => "DEG",
            Measure::Betweenness => "BETW",
            Measure::Closeness => "CLOS",
            Measure::Eigenvector => "EIG",
        }
    }

    pub fn column_names(self, bins: usize) -> impl Iterator<Item = String> {
        (1..=bins).map(move |l| format!("VC_{}_{l:03}", self.code()))
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Degree => "degree",
            Measure::Betweenness => "betweenness",
            Measure::Closeness => "closeness",
            Measure::Eigenvector => "eigenvector",
        })
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Measure::ALL
            .into_iter()
            .find(|m| m.to_string().eq_ignore_ascii_case(s) || m.code().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown centrality measure `{s}`"))
    }
}

/// Hyperedge centralities on the line graph, rescaled to sum to one.
///
/// When every raw score is zero (no overlaps, or no shortest paths through any
/// hyperedge) the scores are uniform `1/m`.
pub fn hyperedge_centrality(lg: &LineGraph, measure: Measure) -> Result<BTreeMap<String, f64>> {
    let raw = match measure {
        Measure::Degree => degree(lg.adjacency()),
        Measure::Betweenness => betweenness(lg.adjacency()),
        Measure::Closeness => harmonic_closeness(lg.adjacency()),
        Measure::Eigenvector => eigenvector(lg.adjacency())?,
    };
    let total: f64 = raw.iter().sum();
    let m = raw.len() as f64;
    Ok(lg
        .ids
        .iter()
        .zip(raw)
        .map(|(id, x)| {
            let x = if total > 0.0 { x / total } else { 1.0 / m };
            (id.clone(), x)
        })
        .collect())
}

/// Per-node vector centrality for one measure. Slot 1 is always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorCentrality {
    pub measure: Measure,
    slots: Vec<f64>,
}

impl VectorCentrality {
    pub fn zeros(measure: Measure, bins: usize) -> Self {
        Self {
            measure,
            slots: vec![0.0; bins],
        }
    }

    /// Component for hyperedge order `l` (1-based).
    pub fn slot(&self, l: usize) -> f64 {
        self.slots[l - 1]
    }

    pub fn slots(&self) -> &[f64] {
        &self.slots
    }

    pub fn l1_norm(&self) -> f64 {
        self.slots.iter().map(|x| x.abs()).sum()
    }
}

/// Spreads hyperedge scores onto nodes: slot `l` of node `j` is
/// `(1/l) Σ x(e)` over size-`l` hyperedges containing `j`.
///
/// `scores` must carry exactly one entry per hyperedge.
pub fn vector_centrality(
    hg: &Hypergraph,
    measure: Measure,
    scores: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, VectorCentrality>> {
    let known: BTreeSet<&str> = hg.edges.iter().map(|e| e.id.as_str()).collect();
    if let Some(unknown) = scores.keys().find(|k| !known.contains(k.as_str())) {
        return Err(Error::ScoreMismatch(format!("score for unknown hyperedge `{unknown}`")));
    }
    let mut per_node = vec![VectorCentrality::zeros(measure, hg.bins); hg.nodes.len()];
    for e in &hg.edges {
        let x = *scores
            .get(&e.id)
            .ok_or_else(|| Error::ScoreMismatch(format!("no score for hyperedge `{}`", e.id)))?;
        let l = e.size();
        for &m in &e.members {
            per_node[m].slots[l - 1] += x / l as f64;
        }
    }
    Ok(hg.nodes.iter().cloned().zip(per_node).collect())
}

/// All four measures' vector centralities for one hypergraph, keyed by file.
pub fn vector_centralities(hg: &Hypergraph) -> Result<BTreeMap<String, Vec<VectorCentrality>>> {
    let mut out: BTreeMap<String, Vec<VectorCentrality>> =
        hg.nodes.iter().map(|n| (n.clone(), Vec::with_capacity(4))).collect();
    if hg.is_empty() {
        return Ok(out);
    }
    let lg = line_graph(hg);
    for measure in Measure::ALL {
        let scores = hyperedge_centrality(&lg, measure)?;
        for (node, vc) in vector_centrality(hg, measure, &scores)? {
            out.get_mut(&node).expect("node present").push(vc);
        }
    }
    Ok(out)
}

/// Width of the centrality block: four measures of `bins` slots each.
pub fn centrality_width(bins: usize) -> usize {
    Measure::ALL.len() * bins
}

pub fn centrality_column_names(bins: usize) -> Vec<String> {
    Measure::ALL
        .into_iter()
        .flat_map(|m| m.column_names(bins))
        .collect()
}

/// Concatenated degree/betweenness/closeness/eigenvector blocks for every file
/// changed in the release. Files outside the hypergraph get zeros.
pub fn centrality_features(store: &CommitStore, release: &str) -> Result<BTreeMap<String, Vec<f64>>> {
    let window = store.window(release)?;
    let hg = build_hypergraph(store, release)?;
    let bins = store.max_commit_size();
    let vcs = vector_centralities(&hg)?;
    let mut out = BTreeMap::new();
    for c in store.window_commits(window.ordinal) {
        for d in &c.files {
            out.entry(d.path.clone()).or_insert_with(|| match vcs.get(&d.path) {
                Some(blocks) => blocks.iter().flat_map(|b| b.slots().iter().copied()).collect(),
                None => vec![0.0; centrality_width(bins)],
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commitlog::{ingest_commit_log, IngestConfig};
    use crate::worked_example::{change_set_1, change_set_2, jsonl, SET_1_RELEASE, SET_2_RELEASE};

    fn store_of(records: &[CommitRecord]) -> CommitStore {
        ingest_commit_log(jsonl(records).as_bytes(), &IngestConfig::default()).unwrap()
    }

    fn set1() -> Hypergraph {
        build_hypergraph(&store_of(&change_set_1()), SET_1_RELEASE).unwrap()
    }

    #[test]
    fn hyperedge_sizes() {
        assert_eq!(set1().size_multiset(), [4, 3, 3, 2]);
        let h2 = build_hypergraph(&store_of(&change_set_2()), SET_2_RELEASE).unwrap();
        assert_eq!(h2.size_multiset(), [2; 8]);
        assert_eq!(h2.max_cardinality(), 2);
        let singles = Hypergraph::from_commits(
            change_set_1().iter().map(|c| {
                let mut c = c.clone();
                c.files.truncate(1);
                c
            }).collect::<Vec<_>>().iter(),
            100,
        )
        .unwrap();
        assert!(singles.is_empty());
    }

    #[test]
    fn line_graph_of_change_set_1() {
        let lg = line_graph(&set1());
        let edges: Vec<(&str, &str)> = lg.edge_ids().collect();
        assert_eq!(
            edges,
            [("C1", "C2"), ("C1", "C3"), ("C1", "C4"), ("C2", "C3"), ("C2", "C4")]
        );
    }

    #[test]
    fn line_graph_isolated_cases() {
        let one = Hypergraph::from_edges([("e", vec!["a", "b"])], 100).unwrap();
        let lg = line_graph(&one);
        assert_eq!(lg.len(), 1);
        assert_eq!(lg.edges().count(), 0);
        let two = Hypergraph::from_edges([("e", vec!["a", "b"]), ("f", vec!["c", "d"])], 100).unwrap();
        let lg = line_graph(&two);
        assert_eq!(lg.len(), 2);
        assert_eq!(lg.edges().count(), 0);
    }

    #[test]
    fn duplicate_hyperedges_stay_distinct() {
        let hg = Hypergraph::from_edges([("e", vec!["a", "b"]), ("f", vec!["b", "a"])], 100).unwrap();
        assert_eq!(hg.edges().len(), 2);
        assert_eq!(line_graph(&hg).edges().collect::<Vec<_>>(), [(0, 1)]);
    }

    #[test]
    fn invalid_hyperedges_rejected() {
        assert!(Hypergraph::from_edges([("e", vec!["a"])], 100).is_err());
        assert!(Hypergraph::from_edges([("e", vec!["a", "b", "c"])], 2).is_err());
        assert!(Hypergraph::from_edges([("e", vec!["a", "b"]), ("e", vec!["c", "d"])], 100).is_err());
    }

    #[test]
    fn degree_scores_change_set_1() {
        let x = hyperedge_centrality(&line_graph(&set1()), Measure::Degree).unwrap();
        let got: Vec<f64> = x.values().copied().collect();
        for (g, e) in got.iter().zip([0.3, 0.3, 0.2, 0.2]) {
            assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_line_graph_is_uniform() {
        // Four hyperedges sharing file `hub`.
        let hg = Hypergraph::from_edges(
            (0..4).map(|i| (format!("e{i}"), vec!["hub".to_string(), format!("f{i}")])),
            100,
        )
        .unwrap();
        let lg = line_graph(&hg);
        for m in Measure::ALL {
            let x = hyperedge_centrality(&lg, m).unwrap();
            assert!(x.values().all(|v| (v - 0.25).abs() < 1e-9), "{m}: {x:?}");
        }
    }

    #[test]
    fn path_betweenness() {
        let hg = Hypergraph::from_edges(
            [("a", vec!["1", "2"]), ("b", vec!["2", "3"]), ("c", vec!["3", "4"])],
            100,
        )
        .unwrap();
        let x = hyperedge_centrality(&line_graph(&hg), Measure::Betweenness).unwrap();
        assert_eq!(x["a"], 0.0);
        assert_eq!(x["b"], 1.0);
        assert_eq!(x["c"], 0.0);
    }

    #[test]
    fn vector_centrality_hand_values() {
        let hg = set1();
        let scores = hyperedge_centrality(&line_graph(&hg), Measure::Degree).unwrap();
        let vc = vector_centrality(&hg, Measure::Degree, &scores).unwrap();
        let f5 = &vc["F5.java"];
        assert!((f5.slot(2) - 0.1).abs() < 1e-12);
        assert!((f5.slot(3) - 0.1).abs() < 1e-12);
        assert_eq!(f5.slots().iter().filter(|&&v| v != 0.0).count(), 2);
        let f1 = &vc["F1.java"];
        assert!((f1.slot(3) - 0.2 / 3.0).abs() < 1e-12);
        assert!((f1.slot(4) - 0.075).abs() < 1e-12);
        assert!(vc.values().all(|v| v.slot(1) == 0.0));
        let total: f64 = vc.values().map(VectorCentrality::l1_norm).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vector_centrality_score_mismatch() {
        let hg = set1();
        let mut scores = hyperedge_centrality(&line_graph(&hg), Measure::Degree).unwrap();
        scores.insert("C9".into(), 0.0);
        assert!(matches!(
            vector_centrality(&hg, Measure::Degree, &scores),
            Err(Error::ScoreMismatch(_))
        ));
        scores.remove("C9");
        scores.remove("C1");
        assert!(matches!(
            vector_centrality(&hg, Measure::Degree, &scores),
            Err(Error::ScoreMismatch(_))
        ));
    }

    #[test]
    fn feature_block_layout() {
        let mut records = change_set_1();
        records.push(CommitRecord {
            sha: "S".into(),
            author: "dev".into(),
            timestamp: 0,
            release: SET_1_RELEASE.into(),
            files: vec![crate::commitlog::FileDelta { path: "solo.java".into(), added: 1, deleted: 0 }],
        });
        let feats = centrality_features(&store_of(&records), SET_1_RELEASE).unwrap();
        assert_eq!(feats.len(), 6);
        assert!(feats.values().all(|v| v.len() == 400));
        assert!(feats["solo.java"].iter().all(|&v| v == 0.0));
        let f5_degree = &feats["F5.java"][..100];
        assert_eq!(f5_degree.iter().filter(|&&v| v != 0.0).count(), 2);
        let names = centrality_column_names(100);
        assert_eq!(names.len(), 400);
        assert_eq!(names[100 + 3], "VC_BETW_004");
    }

    #[test]
    fn change_sets_are_discriminated() {
        let a = centrality_features(&store_of(&change_set_1()), SET_1_RELEASE).unwrap();
        let b = centrality_features(&store_of(&change_set_2()), SET_2_RELEASE).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn hypergraph_jsonl_export() {
        let mut buf = Vec::new();
        set1().write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            r#"{"edge_id":"C1","members":["F1.java","F2.java","F3.java","F4.java"]}"#
        );
        assert_eq!(text.lines().count(), 4);
    }
}
