//! Canonical, release-windowed commit store.
//!
//! Commits arrive as JSONL records (one object per line). Ingestion keeps only
//! the file deltas whose path passes the source filter, then drops commits that
//! touch no source file or more than `max_commit_size` source files. What
//! survives is grouped into release windows; every metric downstream reads the
//! store through [`ReleaseView`].

mod git;
mod history;
mod manifest;

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use git::{extract_from_repository, TagRange};
pub use history::{AuthorExperience, FileChangeHistory, ReleaseView, Touch};
pub use manifest::ReleaseManifest;

/// Default upper bound on commit size; larger commits are treated as bulk edits.
pub const DEFAULT_MAX_COMMIT_SIZE: usize = 100;

/// Lines added and deleted on one file by one commit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDelta {
    pub path: String,
    pub added: u64,
    pub deleted: u64,
}

impl FileDelta {
    pub fn changed(&self) -> u64 {
        self.added + self.deleted
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub sha: String,
    pub author: String,
    pub timestamp: i64,
    pub release: String,
    pub files: Vec<FileDelta>,
}

impl CommitRecord {
    /// Number of source files changed. After ingestion every delta is a source file.
    pub fn size(&self) -> usize {
        self.files.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReleaseWindow {
    pub release: String,
    pub ordinal: usize,
    pub commit_shas: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct IngestConfig {
    /// File-name suffixes that identify source files (e.g. `.java`).
    pub source_suffixes: Vec<String>,
    pub max_commit_size: usize,
    pub manifest: Option<ReleaseManifest>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            source_suffixes: vec![".java".to_string()],
            max_commit_size: DEFAULT_MAX_COMMIT_SIZE,
            manifest: None,
        }
    }
}

impl IngestConfig {
    pub fn is_source(&self, path: &str) -> bool {
        self.source_suffixes.iter().any(|s| path.ends_with(s.as_str()))
    }
}

/// Immutable store of filtered commits grouped into release windows.
#[derive(Debug, Clone, PartialEq)]
pub struct CommitStore {
    commits: Vec<CommitRecord>,
    by_sha: HashMap<String, usize>,
    windows: Vec<ReleaseWindow>,
    window_commits: Vec<Vec<usize>>,
    source_suffixes: Vec<String>,
    max_commit_size: usize,
}

/// Normalizes an author string to a developer identity.
///
/// `Name <mail@host>` resolves to the e-mail; anything else is used verbatim.
/// The result is trimmed and lower-cased.
pub fn normalize_identity(author: &str) -> String {
    let author = author.trim();
    if let (Some(open), Some(close)) = (author.rfind('<'), author.rfind('>')) {
        if open < close {
            let email = author[open + 1..close].trim();
            if !email.is_empty() {
                return email.to_lowercase();
            }
            return author[..open].trim().to_lowercase();
        }
    }
    author.to_lowercase()
}

pub fn normalize_path(path: &str) -> String {
    let p = path.trim().replace('\\', "/");
    p.trim_start_matches("./").to_string()
}

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedRecord {
        line,
        reason: reason.into(),
    }
}

/// Reads a JSONL commit stream into a [`CommitStore`].
pub fn ingest_commit_log<R: BufRead>(stream: R, config: &IngestConfig) -> Result<CommitStore> {
    if config.max_commit_size == 0 {
        return Err(Error::Config("max_commit_size must be positive".into()));
    }
    let mut seen = BTreeSet::new();
    let mut kept = Vec::new();
    let mut dropped_empty = 0usize;
    let mut dropped_large = 0usize;

    for (idx, line) in stream.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| malformed(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut record: CommitRecord =
            serde_json::from_str(&line).map_err(|e| malformed(lineno, e.to_string()))?;
        record.sha = record.sha.trim().to_string();
        if record.sha.is_empty() {
            return Err(malformed(lineno, "empty sha"));
        }
        if record.release.trim().is_empty() {
            return Err(malformed(lineno, "empty release"));
        }
        if !seen.insert(record.sha.clone()) {
            return Err(Error::DuplicateCommit {
                line: lineno,
                sha: record.sha,
            });
        }
        if let Some(manifest) = &config.manifest {
            if manifest.position(&record.release).is_none() {
                return Err(Error::UnknownRelease {
                    line: lineno,
                    release: record.release,
                });
            }
        }
        let mut paths = BTreeSet::new();
        for delta in &mut record.files {
            delta.path = normalize_path(&delta.path);
            if delta.path.is_empty() {
                return Err(malformed(lineno, "empty file path"));
            }
            if !paths.insert(delta.path.clone()) {
                return Err(malformed(
                    lineno,
                    format!("duplicate path `{}` within commit", delta.path),
                ));
            }
        }
        record.author = normalize_identity(&record.author);
        record.files.retain(|d| config.is_source(&d.path));

        let size = record.size();
        if size == 0 {
            dropped_empty += 1;
            continue;
        }
        if size > config.max_commit_size {
            log::debug!(
                "dropping commit {} touching {} source files",
                record.sha,
                size
            );
            dropped_large += 1;
            continue;
        }
        kept.push(record);
    }
    log::info!(
        "ingested {} commits ({} without source files, {} above size {})",
        kept.len(),
        dropped_empty,
        dropped_large,
        config.max_commit_size
    );
    Ok(CommitStore::from_filtered(kept, config))
}

impl CommitStore {
    fn from_filtered(commits: Vec<CommitRecord>, config: &IngestConfig) -> Self {
        let mut releases: Vec<String> = match &config.manifest {
            Some(m) => m.releases().to_vec(),
            None => Vec::new(),
        };
        let mut position: HashMap<String, usize> = releases
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), i))
            .collect();
        let mut window_commits: Vec<Vec<usize>> = vec![Vec::new(); releases.len()];
        let mut by_sha = HashMap::with_capacity(commits.len());
        for (idx, c) in commits.iter().enumerate() {
            by_sha.insert(c.sha.clone(), idx);
            let pos = *position.entry(c.release.clone()).or_insert_with(|| {
                releases.push(c.release.clone());
                window_commits.push(Vec::new());
                releases.len() - 1
            });
            window_commits[pos].push(idx);
        }
        let windows = releases
            .into_iter()
            .zip(&window_commits)
            .enumerate()
            .map(|(ordinal, (release, idxs))| ReleaseWindow {
                release,
                ordinal,
                commit_shas: idxs.iter().map(|&i| commits[i].sha.clone()).collect(),
            })
            .collect();
        Self {
            commits,
            by_sha,
            windows,
            window_commits,
            source_suffixes: config.source_suffixes.clone(),
            max_commit_size: config.max_commit_size,
        }
    }

    pub fn len(&self) -> usize {
        self.commits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commits.is_empty()
    }

    /// All retained commits in input order.
    pub fn commits(&self) -> &[CommitRecord] {
        &self.commits
    }

    pub fn commit(&self, sha: &str) -> Option<&CommitRecord> {
        self.by_sha.get(sha).map(|&i| &self.commits[i])
    }

    pub fn windows(&self) -> &[ReleaseWindow] {
        &self.windows
    }

    pub fn window(&self, release: &str) -> Result<&ReleaseWindow> {
        self.windows
            .iter()
            .find(|w| w.release == release)
            .ok_or_else(|| Error::ReleaseNotFound(release.to_string()))
    }

    pub fn max_commit_size(&self) -> usize {
        self.max_commit_size
    }

    pub fn source_suffixes(&self) -> &[String] {
        &self.source_suffixes
    }

    /// Commits of the window at `ordinal`, in input order.
    pub fn window_commits(&self, ordinal: usize) -> impl Iterator<Item = &CommitRecord> + '_ {
        self.window_commits[ordinal]
            .iter()
            .map(move |&i| &self.commits[i])
    }

    /// Commits of every window up to and including `ordinal`.
    pub fn cumulative_commits(&self, ordinal: usize) -> impl Iterator<Item = &CommitRecord> + '_ {
        self.window_commits[..=ordinal]
            .iter()
            .flatten()
            .map(move |&i| &self.commits[i])
    }

    /// Per-file history of `path` in `release`.
    ///
    /// Builds a throwaway [`ReleaseView`]; callers computing many files should
    /// build the view once and call [`ReleaseView::history`].
    pub fn history_of(&self, release: &str, path: &str) -> Result<FileChangeHistory<'_>> {
        let view = ReleaseView::new(self, release)?;
        Ok(view.history(path))
    }

    /// Writes the retained commits back out as JSONL, in input order.
    pub fn write_jsonl<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_jsonl(&self.commits, out)
    }
}

/// Writes one JSON object per record, one record per line.
pub fn write_jsonl<W: Write>(records: &[CommitRecord], mut out: W) -> std::io::Result<()> {
    for c in records {
        serde_json::to_writer(&mut out, c)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
