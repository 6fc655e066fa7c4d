//! Range-based commit extraction through the `git` command-line tool.

use std::collections::HashSet;
use std::path::Path;
use std::process::Command;

use super::{normalize_identity, CommitRecord, FileDelta};
use crate::error::{Error, Result};

/// Commits reachable from `tag` but not from `prev` are assigned to `release`.
/// Without `prev`, everything reachable from `tag` is assigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagRange {
    pub prev: Option<String>,
    pub tag: String,
    pub release: String,
}

impl TagRange {
    pub fn new(prev: Option<&str>, tag: &str, release: &str) -> Self {
        Self {
            prev: prev.map(str::to_string),
            tag: tag.to_string(),
            release: release.to_string(),
        }
    }

    fn revision_range(&self) -> String {
        match &self.prev {
            Some(prev) => format!("{prev}..{}", self.tag),
            None => self.tag.clone(),
        }
    }
}

const RECORD_SEP: char = '\u{1e}';
const FIELD_SEP: char = '\u{1f}';

fn git(repo: &Path) -> Command {
    let mut cmd = Command::new("git");
    cmd.arg("-C").arg(repo).args(["-c", "core.quotepath=off"]);
    cmd
}

fn verify_tag(repo: &Path, tag: &str) -> Result<()> {
    let status = git(repo)
        .args(["rev-parse", "--verify", "--quiet"])
        .arg(format!("{tag}^{{commit}}"))
        .output()
        .map_err(|e| Error::Extraction(format!("failed to run git: {e}")))?;
    if status.status.success() {
        Ok(())
    } else {
        Err(Error::MissingTag(tag.to_string()))
    }
}

/// Runs `git log --numstat` over each range and returns JSONL-ready records,
/// oldest commit first within each range.
///
/// Renames are reported as a delete plus an add. Binary files carry zero line
/// counts. A commit reachable through two ranges is kept in the first only.
pub fn extract_from_repository(repo: &Path, ranges: &[TagRange]) -> Result<Vec<CommitRecord>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for range in ranges {
        verify_tag(repo, &range.tag)?;
        if let Some(prev) = &range.prev {
            verify_tag(repo, prev)?;
        }
        let output = git(repo)
            .args([
                "log",
                "--topo-order",
                "--reverse",
                "--no-renames",
                "--numstat",
                "--format=%x1e%H%x1f%an%x1f%ae%x1f%ct",
            ])
            .arg(range.revision_range())
            .arg("--")
            .output()
            .map_err(|e| Error::Extraction(format!("failed to run git: {e}")))?;
        if !output.status.success() {
            return Err(Error::Extraction(format!(
                "git log {} failed: {}",
                range.revision_range(),
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        let text = String::from_utf8_lossy(&output.stdout);
        let records = parse_log(&text, &range.release)?;
        log::info!(
            "extracted {} commits for release {} ({})",
            records.len(),
            range.release,
            range.revision_range()
        );
        for r in records {
            if seen.insert(r.sha.clone()) {
                out.push(r);
            } else {
                log::warn!("commit {} already assigned to an earlier release", r.sha);
            }
        }
    }
    Ok(out)
}

/// Parses output of `git log --numstat` produced with the record/field
/// separators used by [`extract_from_repository`].
pub(crate) fn parse_log(text: &str, release: &str) -> Result<Vec<CommitRecord>> {
    let mut out = Vec::new();
    for chunk in text.split(RECORD_SEP).skip(1) {
        let mut lines = chunk.lines();
        let header = lines.next().unwrap_or_default();
        let fields: Vec<&str> = header.split(FIELD_SEP).collect();
        if fields.len() != 4 {
            return Err(Error::Extraction(format!("unexpected log header `{header}`")));
        }
        let timestamp = fields[3]
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::Extraction(format!("bad timestamp in `{header}`")))?;
        let author = if fields[2].trim().is_empty() {
            normalize_identity(fields[1])
        } else {
            normalize_identity(fields[2])
        };
        let mut files = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            files.push(parse_numstat(line, fields[0])?);
        }
        out.push(CommitRecord {
            sha: fields[0].trim().to_string(),
            author,
            timestamp,
            release: release.to_string(),
            files,
        });
    }
    Ok(out)
}

fn parse_numstat(line: &str, sha: &str) -> Result<FileDelta> {
    let mut parts = line.splitn(3, '\t');
    let (Some(a), Some(d), Some(path)) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::Extraction(format!("bad numstat line `{line}` in {sha}")));
    };
    let path = unquote(path);
    let (added, deleted) = match (a.parse::<u64>(), d.parse::<u64>()) {
        (Ok(a), Ok(d)) => (a, d),
        _ => {
            log::warn!("{sha}: non-numeric line counts for {path}, recorded as 0/0");
            (0, 0)
        }
    };
    Ok(FileDelta {
        path,
        added,
        deleted,
    })
}

/// Undoes git's C-style quoting of unusual paths.
fn unquote(path: &str) -> String {
    let Some(inner) = path.strip_prefix('"').and_then(|p| p.strip_suffix('"')) else {
        return path.to_string();
    };
    let mut bytes = Vec::with_capacity(inner.len());
    let mut it = inner.bytes().peekable();
    while let Some(b) = it.next() {
        if b != b'\\' {
            bytes.push(b);
            continue;
        }
        match it.next() {
            Some(b'n') => bytes.push(b'\n'),
            Some(b't') => bytes.push(b'\t'),
            Some(b'"') => bytes.push(b'"'),
            Some(b'\\') => bytes.push(b'\\'),
            Some(c @ b'0'..=b'7') => {
                let mut v = u32::from(c - b'0');
                for _ in 0..2 {
                    if let Some(&n @ b'0'..=b'7') = it.peek() {
                        v = v * 8 + u32::from(n - b'0');
                        it.next();
                    }
                }
                bytes.push(v as u8);
            }
            Some(other) => bytes.push(other),
            None => bytes.push(b'\\'),
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_numstat_blocks() {
        let text = "\u{1e}abc\u{1f}Jane\u{1f}Jane@X.org\u{1f}100\n\n3\t1\tsrc/A.java\n-\t-\timg.png\n\
                    \u{1e}def\u{1f}Bob\u{1f}\u{1f}200\n";
        let recs = parse_log(text, "r1").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].author, "jane@x.org");
        assert_eq!(
            recs[0].files,
            vec![
                FileDelta { path: "src/A.java".into(), added: 3, deleted: 1 },
                FileDelta { path: "img.png".into(), added: 0, deleted: 0 },
            ]
        );
        assert_eq!(recs[1].author, "bob");
        assert!(recs[1].files.is_empty());
    }

    #[test]
    fn unquotes_c_style_paths() {
        assert_eq!(unquote("\"a\\tb.java\""), "a\tb.java");
        assert_eq!(unquote("\"caf\\303\\251.java\""), "café.java");
        assert_eq!(unquote("plain.java"), "plain.java");
    }
}
