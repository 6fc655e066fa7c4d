//! Run configuration: TOML file values overridden by command-line flags.

use std::path::Path;

use hyperchange::commitlog::IngestConfig;
use hyperchange::featureset::{CorpusOptions, FeatureSet, PathMap, DEFAULT_IGNORED_COLUMNS};
use hyperchange::Error;
use serde::Deserialize;

pub const DEFAULT_MAX_COMMIT_SIZE: usize = 100;

/// Keys accepted in a `--config` file. All are optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub max_commit_size: Option<usize>,
    pub bins: Option<usize>,
    pub source_suffixes: Option<Vec<String>>,
    pub feature_set: Option<String>,
    pub strip_prefix: Option<String>,
    pub add_prefix: Option<String>,
    pub ignored_columns: Option<Vec<String>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))
    }
}

/// Flag values that may override the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub max_commit_size: Option<usize>,
    pub bins: Option<usize>,
    pub source_suffixes: Vec<String>,
    pub feature_set: Option<String>,
    pub strip_prefix: Option<String>,
    pub add_prefix: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub max_commit_size: usize,
    pub bins: usize,
    pub source_suffixes: Vec<String>,
    pub feature_set: FeatureSet,
    pub path_map: PathMap,
    pub ignored_columns: Vec<String>,
}

impl Settings {
    pub fn resolve(file: FileConfig, flags: Overrides) -> Result<Self, Error> {
        let max_commit_size = flags
            .max_commit_size
            .or(file.max_commit_size)
            .unwrap_or(DEFAULT_MAX_COMMIT_SIZE);
        let bins = flags.bins.or(file.bins).unwrap_or(max_commit_size);
        if max_commit_size == 0 {
            return Err(Error::Config("max_commit_size must be positive".into()));
        }
        if bins != max_commit_size {
            return Err(Error::Config(format!(
                "bins ({bins}) must equal max_commit_size ({max_commit_size})"
            )));
        }
        let source_suffixes = if !flags.source_suffixes.is_empty() {
            flags.source_suffixes
        } else {
            file.source_suffixes.unwrap_or_else(|| vec![".java".into()])
        };
        if source_suffixes.iter().any(String::is_empty) {
            return Err(Error::Config("empty source suffix".into()));
        }
        let feature_set = flags
            .feature_set
            .or(file.feature_set)
            .map(|s| s.parse::<FeatureSet>().map_err(Error::Config))
            .transpose()?
            .unwrap_or(FeatureSet::ProductVectorCentrality);
        Ok(Self {
            max_commit_size,
            bins,
            source_suffixes,
            feature_set,
            path_map: PathMap {
                strip_prefix: flags.strip_prefix.or(file.strip_prefix),
                add_prefix: flags.add_prefix.or(file.add_prefix),
            },
            ignored_columns: file
                .ignored_columns
                .unwrap_or_else(|| DEFAULT_IGNORED_COLUMNS.map(String::from).to_vec()),
        })
    }

    pub fn ingest(&self) -> IngestConfig {
        IngestConfig {
            source_suffixes: self.source_suffixes.clone(),
            max_commit_size: self.max_commit_size,
            manifest: None,
        }
    }

    pub fn corpus(&self) -> CorpusOptions {
        CorpusOptions {
            path_map: self.path_map.clone(),
            ignored_columns: self.ignored_columns.clone(),
            ..CorpusOptions::default()
        }
    }
}
