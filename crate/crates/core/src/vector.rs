//! Commit-size-aware vector process metrics.
//!
//! Each scalar process metric is stratified by commit size: slot `i` (1-based)
//! holds the contribution of size-`i` commits. Sizes that never occur are zero
//! padded, and zero denominators produce all-zero vectors rather than NaN.

use std::collections::{BTreeMap, BTreeSet};

use crate::cochange::PairwiseGraph;
use crate::commitlog::{FileChangeHistory, ReleaseView};
use crate::error::{Error, Result};
use crate::metric::MetricId;
use crate::process::{developer_shares, geometric_mean, ChangeProfile, MINOR_THRESHOLD};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricVector {
    pub metric: MetricId,
    slots: Vec<f64>,
}

impl MetricVector {
    pub fn zeros(metric: MetricId, bins: usize) -> Self {
        Self {
            metric,
            slots: vec![0.0; bins],
        }
    }

    pub fn from_slots(metric: MetricId, slots: Vec<f64>) -> Self {
        Self { metric, slots }
    }

    /// Value for commit size `size` (1-based).
    pub fn slot(&self, size: usize) -> f64 {
        self.slots[size - 1]
    }

    fn set(&mut self, size: usize, value: f64) {
        self.slots[size - 1] = value;
    }

    pub fn slots(&self) -> &[f64] {
        &self.slots
    }

    pub fn bins(&self) -> usize {
        self.slots.len()
    }

    pub fn sum(&self) -> f64 {
        self.slots.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.slots.iter().all(|&v| v == 0.0)
    }

    /// Column names `V_<METRIC>_<iii>`.
    pub fn column_names(metric: MetricId, bins: usize) -> impl Iterator<Item = String> {
        (1..=bins).map(move |i| format!("V_{}_{i:03}", metric.name()))
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Builds a vector whose slot `i` is `per_size[i] / total`, or zeros when the
/// total is not positive.
fn proportions(metric: MetricId, per_size: Vec<f64>) -> MetricVector {
    let total: f64 = per_size.iter().sum();
    let slots = per_size.into_iter().map(|v| ratio(v, total)).collect();
    MetricVector::from_slots(metric, slots)
}

/// Slot `i`: fraction of the file's window commits that have size `i`.
pub fn commit_count_vector(history: &FileChangeHistory<'_>) -> MetricVector {
    let mut counts = vec![0.0; history.bins()];
    for t in history.window() {
        counts[t.size() - 1] += 1.0;
    }
    proportions(MetricId::Comm, counts)
}

fn distinct_by_size<'a>(
    touches: &[crate::commitlog::Touch<'a>],
    bins: usize,
) -> Vec<BTreeSet<&'a str>> {
    let mut sets = vec![BTreeSet::new(); bins];
    for t in touches {
        sets[t.size() - 1].insert(t.author());
    }
    sets
}

/// ADEV over the window and DDEV over the cumulative history: slot `i` is the
/// fraction of the file's developers who changed it through size-`i` commits.
pub fn developer_activity_vectors(history: &FileChangeHistory<'_>) -> (MetricVector, MetricVector) {
    let bins = history.bins();
    let build = |metric, touches: &[crate::commitlog::Touch<'_>], total: usize| {
        let slots = distinct_by_size(touches, bins)
            .iter()
            .map(|s| ratio(s.len() as f64, total as f64))
            .collect();
        MetricVector::from_slots(metric, slots)
    };
    (
        build(MetricId::Adev, history.window(), history.developers().len()),
        build(
            MetricId::Ddev,
            history.cumulative(),
            history.cumulative_developers().len(),
        ),
    )
}

/// Distribution of the file's added (resp. deleted) lines across commit sizes.
pub fn line_delta_vectors(history: &FileChangeHistory<'_>) -> (MetricVector, MetricVector) {
    let bins = history.bins();
    let mut added = vec![0.0; bins];
    let mut deleted = vec![0.0; bins];
    for t in history.window() {
        added[t.size() - 1] += t.delta.added as f64;
        deleted[t.size() - 1] += t.delta.deleted as f64;
    }
    (
        proportions(MetricId::Add, added),
        proportions(MetricId::Del, deleted),
    )
}

/// OWN: the owner's changed lines on the file by commit size (window).
/// OEXP: the owner's changed lines anywhere in the project by commit size
/// (cumulative).
pub fn ownership_vectors(history: &FileChangeHistory<'_>) -> (MetricVector, MetricVector) {
    let bins = history.bins();
    let Some(owner) = history.owner() else {
        return (
            MetricVector::zeros(MetricId::Own, bins),
            MetricVector::zeros(MetricId::Oexp, bins),
        );
    };
    let mut own = vec![0.0; bins];
    for t in history.window().iter().filter(|t| t.author() == owner) {
        own[t.size() - 1] += t.changed() as f64;
    }
    let exp = history.experience();
    let oexp = (1..=bins).map(|i| exp.by_size(owner, i) as f64).collect();
    (
        proportions(MetricId::Own, own),
        proportions(MetricId::Oexp, oexp),
    )
}

/// Per developer: changed lines on the file in the window, by size and total.
fn lines_by_developer_and_size<'a>(
    history: &FileChangeHistory<'a>,
) -> BTreeMap<&'a str, (Vec<u64>, u64)> {
    let mut out: BTreeMap<&str, (Vec<u64>, u64)> = BTreeMap::new();
    for t in history.window() {
        let entry = out
            .entry(t.author())
            .or_insert_with(|| (vec![0; history.bins()], 0));
        entry.0[t.size() - 1] += t.changed();
        entry.1 += t.changed();
    }
    out
}

/// Slot `i`: geometric mean, over developers who changed the file through
/// size-`i` commits, of the share of their own changed lines on the file that
/// came from size-`i` commits.
pub fn experience_vector(history: &FileChangeHistory<'_>) -> MetricVector {
    let bins = history.bins();
    let per_dev = lines_by_developer_and_size(history);
    let slots = (0..bins)
        .map(|i| geometric_mean(per_dev.values().map(|(by, total)| ratio(by[i] as f64, *total as f64))))
        .collect();
    MetricVector::from_slots(MetricId::Exp, slots)
}

/// Slot `i`: fraction of the file's minor contributors who are also minor
/// within the size-`i` stratum (positive share below the threshold).
pub fn minor_vector(history: &FileChangeHistory<'_>) -> MetricVector {
    let bins = history.bins();
    let lines = history.lines_by_developer();
    let (total, shares) = developer_shares(&lines);
    if total == 0 {
        return MetricVector::zeros(MetricId::Minor, bins);
    }
    let minors: BTreeSet<&str> = shares
        .iter()
        .filter(|(_, &s)| s < MINOR_THRESHOLD)
        .map(|(d, _)| *d)
        .collect();
    if minors.is_empty() {
        return MetricVector::zeros(MetricId::Minor, bins);
    }
    let per_dev = lines_by_developer_and_size(history);
    let mut stratum_total = vec![0u64; bins];
    for (by, _) in per_dev.values() {
        for (acc, v) in stratum_total.iter_mut().zip(by) {
            *acc += v;
        }
    }
    let slots = (0..bins)
        .map(|i| {
            if stratum_total[i] == 0 {
                return 0.0;
            }
            let n = minors
                .iter()
                .filter(|d| {
                    let l = per_dev[*d].0[i];
                    l > 0 && (l as f64 / stratum_total[i] as f64) < MINOR_THRESHOLD
                })
                .count();
            n as f64 / minors.len() as f64
        })
        .collect();
    MetricVector::from_slots(MetricId::Minor, slots)
}

/// Slot `i`: share of the window's size-`i` commits that touch the file,
/// times the entropy of changed lines across files within size-`i` commits.
pub fn sctr_vector(profile: &ChangeProfile, history: &FileChangeHistory<'_>) -> MetricVector {
    let mut v = MetricVector::zeros(MetricId::Sctr, profile.bins());
    for (size, shas) in history.buckets() {
        let all = profile.commits_of_size(size);
        v.set(
            size,
            ratio(shas.len() as f64, all as f64) * profile.entropy_of_size(size),
        );
    }
    v
}

fn neighborhood_metric(base: MetricId) -> Result<MetricId> {
    MetricId::ALL
        .into_iter()
        .find(|m| m.neighborhood_base() == Some(base))
        .ok_or_else(|| Error::Config(format!("{base} has no neighbourhood aggregate")))
}

/// `Σ w_n V_n / Σ w_n ‖V_n‖₁` over the co-change neighbours of `target`.
///
/// Neighbours without a vector are skipped; no neighbours or a zero
/// denominator yield the zero vector.
pub fn neighborhood_vector(
    target: &str,
    base: MetricId,
    graph: &PairwiseGraph,
    vectors: &BTreeMap<String, MetricVector>,
    bins: usize,
) -> Result<MetricVector> {
    let metric = neighborhood_metric(base)?;
    let mut acc = vec![0.0; bins];
    let mut den = 0.0;
    for (n, w) in graph.neighbors(target) {
        let Some(v) = vectors.get(n) else {
            log::debug!("no {base} vector for neighbour {n} of {target}");
            continue;
        };
        let w = w as f64;
        for (a, x) in acc.iter_mut().zip(v.slots()) {
            *a += w * x;
        }
        den += w * v.slots().iter().map(|x| x.abs()).sum::<f64>();
    }
    let slots = acc.into_iter().map(|a| ratio(a, den)).collect();
    Ok(MetricVector::from_slots(metric, slots))
}

/// The ten vectors that depend only on the file itself and the window profile,
/// in [`MetricId::ALL`] order.
pub fn base_vectors(history: &FileChangeHistory<'_>, profile: &ChangeProfile) -> Vec<MetricVector> {
    let (adev, ddev) = developer_activity_vectors(history);
    let (add, del) = line_delta_vectors(history);
    let (own, oexp) = ownership_vectors(history);
    vec![
        commit_count_vector(history),
        adev,
        ddev,
        add,
        del,
        own,
        oexp,
        experience_vector(history),
        minor_vector(history),
        sctr_vector(profile, history),
    ]
}

/// All fourteen vectors for every file changed in the view's release.
pub fn vector_metrics_all(
    view: &ReleaseView<'_>,
    profile: &ChangeProfile,
    graph: &PairwiseGraph,
) -> Result<BTreeMap<String, Vec<MetricVector>>> {
    let bins = view.bins();
    let mut out: BTreeMap<String, Vec<MetricVector>> = view
        .files()
        .map(|p| (p.to_string(), base_vectors(&view.history(p), profile)))
        .collect();
    for base in [MetricId::Comm, MetricId::Adev, MetricId::Ddev, MetricId::Sctr] {
        let by_file: BTreeMap<String, MetricVector> = out
            .iter()
            .map(|(p, vs)| (p.clone(), vs[base.index()].clone()))
            .collect();
        for (path, vs) in out.iter_mut() {
            vs.push(neighborhood_vector(path, base, graph, &by_file, bins)?);
        }
    }
    Ok(out)
}
