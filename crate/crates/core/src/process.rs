//! Scalar process metrics.
//!
//! These are the classic per-file, per-release change metrics. They serve as
//! baseline features and as the denominators of the commit-size-aware vectors.

use std::collections::{BTreeMap, HashMap};

use crate::cochange::PairwiseGraph;
use crate::commitlog::{CommitRecord, FileChangeHistory, ReleaseView};
use crate::error::{Error, Result};
use crate::metric::MetricId;

/// Share of a file's changed lines below which a developer is a minor contributor.
pub const MINOR_THRESHOLD: f64 = 0.05;

/// Normalized Shannon entropy of a distribution given by non-negative weights.
///
/// Only positive weights count toward the support size `n`; the result is
/// `-Σ q log q / log n`, and 0 when fewer than two weights are positive.
pub fn normalized_entropy<I: IntoIterator<Item = f64>>(weights: I) -> f64 {
    let w: Vec<f64> = weights.into_iter().filter(|&x| x > 0.0).collect();
    if w.len() < 2 {
        return 0.0;
    }
    let total: f64 = w.iter().sum();
    let h: f64 = w
        .iter()
        .map(|&x| {
            let q = x / total;
            -q * q.ln()
        })
        .sum();
    (h / (w.len() as f64).ln()).clamp(0.0, 1.0)
}

/// Entropy of the per-file changed-line totals of a window.
pub fn entropy_of_window(changed_lines: &[u64]) -> f64 {
    normalized_entropy(changed_lines.iter().map(|&l| l as f64))
}

/// Geometric mean of the positive entries; 0 when there are none.
pub fn geometric_mean<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let (sum, n) = values
        .into_iter()
        .filter(|&v| v > 0.0)
        .fold((0.0, 0usize), |(s, n), v| (s + v.ln(), n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).exp()
    }
}

/// Window-wide change statistics shared by every file of a release.
#[derive(Debug, Clone)]
pub struct ChangeProfile {
    bins: usize,
    commit_count: usize,
    total_added: u64,
    total_deleted: u64,
    entropy: f64,
    size_commit_counts: Vec<usize>,
    size_entropy: Vec<f64>,
}

impl ChangeProfile {
    pub fn from_commits<'a>(commits: impl IntoIterator<Item = &'a CommitRecord>, bins: usize) -> Self {
        let mut commit_count = 0;
        let mut total_added = 0;
        let mut total_deleted = 0;
        let mut file_lines: HashMap<&str, u64> = HashMap::new();
        let mut size_commit_counts = vec![0; bins];
        let mut size_lines: Vec<HashMap<&str, u64>> = vec![HashMap::new(); bins];
        for c in commits {
            commit_count += 1;
            let size = c.size();
            size_commit_counts[size - 1] += 1;
            for d in &c.files {
                total_added += d.added;
                total_deleted += d.deleted;
                *file_lines.entry(&d.path).or_default() += d.changed();
                *size_lines[size - 1].entry(&d.path).or_default() += d.changed();
            }
        }
        let entropy = normalized_entropy(sorted_weights(&file_lines));
        let size_entropy = size_lines
            .iter()
            .map(|m| normalized_entropy(sorted_weights(m)))
            .collect();
        Self {
            bins,
            commit_count,
            total_added,
            total_deleted,
            entropy,
            size_commit_counts,
            size_entropy,
        }
    }

    pub fn of_view(view: &ReleaseView<'_>) -> Self {
        Self::from_commits(view.commits().iter().copied(), view.bins())
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn commit_count(&self) -> usize {
        self.commit_count
    }

    pub fn total_added(&self) -> u64 {
        self.total_added
    }

    pub fn total_deleted(&self) -> u64 {
        self.total_deleted
    }

    /// Entropy of changed lines across all files of the window.
    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    /// Number of window commits of size `size`.
    pub fn commits_of_size(&self, size: usize) -> usize {
        self.size_commit_counts[size - 1]
    }

    /// Entropy of changed lines across files, restricted to size-`size` commits.
    pub fn entropy_of_size(&self, size: usize) -> f64 {
        self.size_entropy[size - 1]
    }
}

// Summation order must not depend on hash iteration order.
fn sorted_weights(m: &HashMap<&str, u64>) -> Vec<f64> {
    let mut v: Vec<(&str, u64)> = m.iter().map(|(k, v)| (*k, *v)).collect();
    v.sort_unstable();
    v.into_iter().map(|(_, l)| l as f64).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScalarMetrics {
    pub comm: f64,
    pub adev: f64,
    pub ddev: f64,
    pub add: f64,
    pub del: f64,
    pub own: f64,
    pub oexp: f64,
    pub exp: f64,
    pub minor: f64,
    pub sctr: f64,
    pub ncomm: f64,
    pub nadev: f64,
    pub nddev: f64,
    pub nsctr: f64,
}

impl ScalarMetrics {
    pub fn get(&self, metric: MetricId) -> f64 {
        match metric {
            MetricId::Comm => self.comm,
            MetricId::Adev => self.adev,
            MetricId::Ddev => self.ddev,
            MetricId::Add => self.add,
            MetricId::Del => self.del,
            MetricId::Own => self.own,
            MetricId::Oexp => self.oexp,
            MetricId::Exp => self.exp,
            MetricId::Minor => self.minor,
            MetricId::Sctr => self.sctr,
            MetricId::Ncomm => self.ncomm,
            MetricId::Nadev => self.nadev,
            MetricId::Nddev => self.nddev,
            MetricId::Nsctr => self.nsctr,
        }
    }

    /// Values in [`MetricId::ALL`] order.
    pub fn to_array(&self) -> [f64; 14] {
        MetricId::ALL.map(|m| self.get(m))
    }
}

/// Developer shares of the file's changed lines, plus the total.
pub(crate) fn developer_shares<'a>(lines: &BTreeMap<&'a str, u64>) -> (u64, BTreeMap<&'a str, f64>) {
    let total: u64 = lines.values().sum();
    let shares = lines
        .iter()
        .map(|(d, &l)| (*d, if total == 0 { 0.0 } else { l as f64 / total as f64 }))
        .collect();
    (total, shares)
}

/// Every scalar metric except the neighbourhood aggregates, which are left at 0.
pub fn base_scalars(history: &FileChangeHistory<'_>, profile: &ChangeProfile) -> Result<ScalarMetrics> {
    if history.is_empty() {
        return Err(Error::NotComputed {
            release: String::new(),
            path: history.path().to_string(),
        });
    }
    let comm = history.commit_count() as f64;
    let developers = history.developers();
    let added: u64 = history.window().iter().map(|t| t.delta.added).sum();
    let deleted: u64 = history.window().iter().map(|t| t.delta.deleted).sum();

    let lines = history.lines_by_developer();
    let (total, shares) = developer_shares(&lines);
    let (own, minor) = if total == 0 {
        (0.0, 0.0)
    } else {
        let own = shares.values().copied().fold(0.0, f64::max);
        let minor = shares.values().filter(|&&s| s < MINOR_THRESHOLD).count();
        (own, minor as f64)
    };

    let exp_table = history.experience();
    let oexp = history
        .owner()
        .map(|o| exp_table.total(o) as f64)
        .unwrap_or(0.0);
    let exp = geometric_mean(developers.iter().map(|d| exp_table.total(d) as f64));

    let p = comm / profile.commit_count().max(1) as f64;

    Ok(ScalarMetrics {
        comm,
        adev: developers.len() as f64,
        ddev: history.cumulative_developers().len() as f64,
        add: added as f64 / profile.total_added().max(1) as f64,
        del: deleted as f64 / profile.total_deleted().max(1) as f64,
        own,
        oexp,
        exp,
        minor,
        sctr: p * profile.entropy(),
        ..ScalarMetrics::default()
    })
}

/// Weighted mean of `value` over the co-change neighbours of `path`; 0 when
/// the file has no neighbours with known values.
pub fn neighborhood_mean(
    graph: &PairwiseGraph,
    path: &str,
    value: impl Fn(&str) -> Option<f64>,
) -> f64 {
    let (num, den) = graph
        .neighbors(path)
        .filter_map(|(n, w)| value(n).map(|v| (v, w as f64)))
        .fold((0.0, 0.0), |(num, den), (v, w)| (num + w * v, den + w));
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Fills the neighbourhood fields of every file from its neighbours' base values.
pub fn fill_neighborhood(base: &mut BTreeMap<String, ScalarMetrics>, graph: &PairwiseGraph) {
    let snapshot = base.clone();
    for (path, m) in base.iter_mut() {
        let of = |metric: MetricId| {
            neighborhood_mean(graph, path, |n| snapshot.get(n).map(|s| s.get(metric)))
        };
        m.ncomm = of(MetricId::Comm);
        m.nadev = of(MetricId::Adev);
        m.nddev = of(MetricId::Ddev);
        m.nsctr = of(MetricId::Sctr);
    }
}

/// All fourteen scalar metrics of `path` in the view's release.
pub fn scalar_metrics(
    view: &ReleaseView<'_>,
    profile: &ChangeProfile,
    graph: &PairwiseGraph,
    path: &str,
) -> Result<ScalarMetrics> {
    let not_computed = |e: Error| match e {
        Error::NotComputed { path, .. } => Error::NotComputed {
            release: view.release().to_string(),
            path,
        },
        other => other,
    };
    let mut target = base_scalars(&view.history(path), profile).map_err(not_computed)?;
    let mut neighbors = BTreeMap::new();
    for (n, _) in graph.neighbors(path) {
        let h = view.history(n);
        if !h.is_empty() {
            neighbors.insert(n.to_string(), base_scalars(&h, profile)?);
        }
    }
    let of = |metric: MetricId| {
        neighborhood_mean(graph, path, |n| neighbors.get(n).map(|s| s.get(metric)))
    };
    target.ncomm = of(MetricId::Comm);
    target.nadev = of(MetricId::Adev);
    target.nddev = of(MetricId::Ddev);
    target.nsctr = of(MetricId::Sctr);
    Ok(target)
}

/// Scalar metrics for every file changed in the view's release.
pub fn scalar_metrics_all(
    view: &ReleaseView<'_>,
    profile: &ChangeProfile,
    graph: &PairwiseGraph,
) -> Result<BTreeMap<String, ScalarMetrics>> {
    let mut out = BTreeMap::new();
    for path in view.files() {
        out.insert(path.to_string(), base_scalars(&view.history(path), profile)?);
    }
    fill_neighborhood(&mut out, graph);
    Ok(out)
}
