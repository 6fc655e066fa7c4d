//! Weighted pairwise co-change graph.
//!
//! Two files are linked when they change in the same commit; the weight counts
//! such commits. Every file changed in the window is a node, so files touched
//! only by singleton commits appear as isolated nodes.

use std::collections::BTreeMap;
use std::io::Write;

use crate::commitlog::{CommitRecord, CommitStore};
use crate::error::Result;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairwiseGraph {
    adjacency: BTreeMap<String, BTreeMap<String, u64>>,
}

impl PairwiseGraph {
    pub fn from_commits<'a>(commits: impl IntoIterator<Item = &'a CommitRecord>) -> Self {
        let mut g = Self::default();
        for c in commits {
            for d in &c.files {
                g.adjacency.entry(d.path.clone()).or_default();
            }
            if c.files.len() < 2 {
                continue;
            }
            for (i, a) in c.files.iter().enumerate() {
                for b in &c.files[i + 1..] {
                    g.bump(&a.path, &b.path);
                }
            }
        }
        g
    }

    fn bump(&mut self, a: &str, b: &str) {
        debug_assert_ne!(a, b);
        *self
            .adjacency
            .get_mut(a)
            .expect("node inserted")
            .entry(b.to_string())
            .or_default() += 1;
        *self
            .adjacency
            .get_mut(b)
            .expect("node inserted")
            .entry(a.to_string())
            .or_default() += 1;
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> + '_ {
        self.adjacency.keys().map(String::as_str)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeMap::len).sum::<usize>() / 2
    }

    /// Edges as `(a, b, weight)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, u64)> + '_ {
        self.adjacency.iter().flat_map(|(a, nbrs)| {
            nbrs.iter()
                .filter(move |(b, _)| a < *b)
                .map(move |(b, &w)| (a.as_str(), b.as_str(), w))
        })
    }

    pub fn weight(&self, a: &str, b: &str) -> u64 {
        self.adjacency
            .get(a)
            .and_then(|n| n.get(b))
            .copied()
            .unwrap_or(0)
    }

    /// Neighbours of `path` with edge weights, sorted by neighbour path.
    pub fn neighbors(&self, path: &str) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.adjacency
            .get(path)
            .into_iter()
            .flat_map(|n| n.iter().map(|(p, &w)| (p.as_str(), w)))
    }

    pub fn total_weight(&self) -> u64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    /// Unweighted degrees, ascending.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adjacency.values().map(BTreeMap::len).collect();
        d.sort_unstable();
        d
    }

    /// Writes `file_a,file_b,weight` rows in lexicographic order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["file_a", "file_b", "weight"])?;
        for (a, b, weight) in self.edges() {
            w.write_record([a, b, &weight.to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

pub fn build_pairwise(store: &CommitStore, release: &str) -> Result<PairwiseGraph> {
    let window = store.window(release)?;
    Ok(PairwiseGraph::from_commits(
        store.window_commits(window.ordinal),
    ))
}

/// Unweighted degree multiset of a graph, ascending.
pub fn degree_sequence(graph: &PairwiseGraph) -> Vec<usize> {
    graph.degree_sequence()
}
