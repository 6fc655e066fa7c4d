use std::collections::HashMap;
use std::io::Read;

use crate::error::{Error, Result};

/// Ordered list of releases read from a `release_id,ordinal` CSV.
///
/// Ordinals only need to be distinct; releases are sorted by ordinal and
/// re-numbered from zero. A header row is optional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReleaseManifest {
    releases: Vec<String>,
    position: HashMap<String, usize>,
}

impl ReleaseManifest {
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut rows: Vec<(i64, String)> = Vec::new();
        for (idx, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.iter().all(str::is_empty) {
                continue;
            }
            if rec.len() != 2 {
                return Err(Error::Manifest(format!(
                    "row {}: expected 2 columns, found {}",
                    idx + 1,
                    rec.len()
                )));
            }
            let ordinal = match rec[1].parse::<i64>() {
                Ok(v) => v,
                Err(_) if idx == 0 => continue,
                Err(_) => {
                    return Err(Error::Manifest(format!(
                        "row {}: ordinal `{}` is not an integer",
                        idx + 1,
                        &rec[1]
                    )))
                }
            };
            if rec[0].is_empty() {
                return Err(Error::Manifest(format!("row {}: empty release id", idx + 1)));
            }
            rows.push((ordinal, rec[0].to_string()));
        }
        Self::from_pairs(rows)
    }

    pub fn from_pairs(mut rows: Vec<(i64, String)>) -> Result<Self> {
        rows.sort();
        for pair in rows.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::Manifest(format!(
                    "ordinal {} used by both `{}` and `{}`",
                    pair[0].0, pair[0].1, pair[1].1
                )));
            }
        }
        let releases: Vec<String> = rows.into_iter().map(|(_, r)| r).collect();
        let mut position = HashMap::new();
        for (i, r) in releases.iter().enumerate() {
            if position.insert(r.clone(), i).is_some() {
                return Err(Error::Manifest(format!("release `{r}` listed twice")));
            }
        }
        Ok(Self { releases, position })
    }

    pub fn releases(&self) -> &[String] {
        &self.releases
    }

    pub fn position(&self, release: &str) -> Option<usize> {
        self.position.get(release).copied()
    }
}
