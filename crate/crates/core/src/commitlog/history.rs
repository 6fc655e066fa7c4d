use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use super::{CommitRecord, CommitStore, FileDelta};
use crate::error::Result;

/// One commit's change to one file.
#[derive(Debug, Clone, Copy)]
pub struct Touch<'a> {
    pub commit: &'a CommitRecord,
    pub delta: &'a FileDelta,
}

impl<'a> Touch<'a> {
    pub fn sha(&self) -> &'a str {
        &self.commit.sha
    }

    pub fn author(&self) -> &'a str {
        &self.commit.author
    }

    /// Commit size (number of source files in the commit).
    pub fn size(&self) -> usize {
        self.commit.size()
    }

    pub fn changed(&self) -> u64 {
        self.delta.changed()
    }
}

/// Lines changed by each developer anywhere in the project, over all windows up
/// to the target window, stratified by commit size.
#[derive(Debug, Default)]
pub struct AuthorExperience {
    bins: usize,
    total: HashMap<String, u64>,
    by_size: HashMap<String, Vec<u64>>,
}

impl AuthorExperience {
    fn build<'a>(commits: impl Iterator<Item = &'a CommitRecord>, bins: usize) -> Self {
        let mut exp = Self {
            bins,
            ..Self::default()
        };
        for c in commits {
            let lines: u64 = c.files.iter().map(FileDelta::changed).sum();
            *exp.total.entry(c.author.clone()).or_default() += lines;
            let slots = exp
                .by_size
                .entry(c.author.clone())
                .or_insert_with(|| vec![0; bins]);
            slots[c.size() - 1] += lines;
        }
        exp
    }

    /// Cumulative project-wide changed lines of `author`.
    pub fn total(&self, author: &str) -> u64 {
        self.total.get(author).copied().unwrap_or(0)
    }

    /// Cumulative project-wide changed lines of `author` via size-`size` commits.
    pub fn by_size(&self, author: &str, size: usize) -> u64 {
        self.by_size
            .get(author)
            .map(|slots| slots[size - 1])
            .unwrap_or(0)
    }

    pub fn bins(&self) -> usize {
        self.bins
    }
}

/// The commits of one file in one release window, plus its cumulative history.
#[derive(Debug, Clone)]
pub struct FileChangeHistory<'a> {
    path: String,
    bins: usize,
    window: Vec<Touch<'a>>,
    cumulative: Vec<Touch<'a>>,
    experience: Arc<AuthorExperience>,
}

impl<'a> FileChangeHistory<'a> {
    /// Assembles a history from explicit touches, mostly useful for tests.
    pub fn new(
        path: impl Into<String>,
        bins: usize,
        window: Vec<Touch<'a>>,
        cumulative: Vec<Touch<'a>>,
        experience: Arc<AuthorExperience>,
    ) -> Self {
        Self {
            path: path.into(),
            bins,
            window,
            cumulative,
            experience,
        }
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// True when the file was not changed in the window.
    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    pub fn commit_count(&self) -> usize {
        self.window.len()
    }

    /// Window commits touching the file, in input order.
    pub fn window(&self) -> &[Touch<'a>] {
        &self.window
    }

    /// Commits touching the file in every window up to and including this one.
    pub fn cumulative(&self) -> &[Touch<'a>] {
        &self.cumulative
    }

    pub fn experience(&self) -> &AuthorExperience {
        &self.experience
    }

    /// Window commits of size `size`.
    pub fn bucket(&self, size: usize) -> impl Iterator<Item = &Touch<'a>> + '_ {
        self.window.iter().filter(move |t| t.size() == size)
    }

    pub fn bucket_shas(&self, size: usize) -> Vec<&'a str> {
        self.bucket(size).map(|t| t.sha()).collect()
    }

    /// Window commits grouped by size; only observed sizes appear.
    pub fn buckets(&self) -> BTreeMap<usize, Vec<&'a str>> {
        let mut out: BTreeMap<usize, Vec<&'a str>> = BTreeMap::new();
        for t in &self.window {
            out.entry(t.size()).or_default().push(t.sha());
        }
        out
    }

    pub fn developers(&self) -> BTreeSet<&'a str> {
        self.window.iter().map(|t| t.author()).collect()
    }

    pub fn cumulative_developers(&self) -> BTreeSet<&'a str> {
        self.cumulative.iter().map(|t| t.author()).collect()
    }

    /// Changed lines on this file per developer within the window.
    pub fn lines_by_developer(&self) -> BTreeMap<&'a str, u64> {
        let mut out = BTreeMap::new();
        for t in &self.window {
            *out.entry(t.author()).or_default() += t.changed();
        }
        out
    }

    /// Developer with the most changed lines on the file in the window; ties go
    /// to the lexicographically smallest identity.
    pub fn owner(&self) -> Option<&'a str> {
        let mut best: Option<(&'a str, u64)> = None;
        for (dev, lines) in self.lines_by_developer() {
            match best {
                Some((_, b)) if b >= lines => {}
                _ => best = Some((dev, lines)),
            }
        }
        best.map(|(d, _)| d)
    }
}

/// Read-only snapshot of one release window, shared by every per-file metric.
#[derive(Debug)]
pub struct ReleaseView<'a> {
    store: &'a CommitStore,
    release: String,
    ordinal: usize,
    window: Vec<&'a CommitRecord>,
    window_touches: BTreeMap<&'a str, Vec<Touch<'a>>>,
    cumulative_touches: HashMap<&'a str, Vec<Touch<'a>>>,
    experience: Arc<AuthorExperience>,
}

fn touches<'a>(commits: impl Iterator<Item = &'a CommitRecord>) -> Vec<(&'a str, Touch<'a>)> {
    commits
        .flat_map(|c| {
            c.files
                .iter()
                .map(move |d| (d.path.as_str(), Touch { commit: c, delta: d }))
        })
        .collect()
}

impl<'a> ReleaseView<'a> {
    pub fn new(store: &'a CommitStore, release: &str) -> Result<Self> {
        let ordinal = store.window(release)?.ordinal;
        let window: Vec<&CommitRecord> = store.window_commits(ordinal).collect();
        let mut window_touches: BTreeMap<&str, Vec<Touch>> = BTreeMap::new();
        for (path, t) in touches(window.iter().copied()) {
            window_touches.entry(path).or_default().push(t);
        }
        let mut cumulative_touches: HashMap<&str, Vec<Touch>> = HashMap::new();
        for (path, t) in touches(store.cumulative_commits(ordinal)) {
            cumulative_touches.entry(path).or_default().push(t);
        }
        let experience = Arc::new(AuthorExperience::build(
            store.cumulative_commits(ordinal),
            store.max_commit_size(),
        ));
        Ok(Self {
            store,
            release: release.to_string(),
            ordinal,
            window,
            window_touches,
            cumulative_touches,
            experience,
        })
    }

    pub fn store(&self) -> &'a CommitStore {
        self.store
    }

    pub fn release(&self) -> &str {
        &self.release
    }

    pub fn ordinal(&self) -> usize {
        self.ordinal
    }

    pub fn bins(&self) -> usize {
        self.store.max_commit_size()
    }

    /// Window commits in input order.
    pub fn commits(&self) -> &[&'a CommitRecord] {
        &self.window
    }

    /// Files changed in the window, sorted by path.
    pub fn files(&self) -> impl Iterator<Item = &'a str> + '_ {
        self.window_touches.keys().copied()
    }

    pub fn experience(&self) -> &Arc<AuthorExperience> {
        &self.experience
    }

    pub fn history(&self, path: &str) -> FileChangeHistory<'a> {
        FileChangeHistory {
            path: path.to_string(),
            bins: self.bins(),
            window: self.window_touches.get(path).cloned().unwrap_or_default(),
            cumulative: self
                .cumulative_touches
                .get(path)
                .cloned()
                .unwrap_or_default(),
            experience: Arc::clone(&self.experience),
        }
    }
}
