//! Feature matrices: product metrics and labels from an external corpus joined
//! with the computed process and centrality features.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::cochange::build_pairwise;
use crate::commitlog::{normalize_path, CommitStore, ReleaseView};
use crate::error::{Error, Result};
use crate::hypergraph::{centrality_column_names, centrality_features};
use crate::metric::MetricId;
use crate::process::{scalar_metrics_all, ChangeProfile};
use crate::vector::{vector_metrics_all, MetricVector};

pub const PRODUCT_METRIC_COUNT: usize = 54;
pub const PATH_COLUMN: &str = "File";
pub const LABEL_COLUMN: &str = "RealBug";
/// Label-derived columns shipped alongside `RealBug` in the defect corpus.
/// They are not product metrics and are skipped.
pub const DEFAULT_IGNORED_COLUMNS: [&str; 3] = ["RealBugCount", "HeuBug", "HeuBugCount"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureSet {
    /// Product + scalar process metrics.
    ProductScalar,
    /// Product + vector process metrics.
    ProductVector,
    /// Product + vector process metrics + vector centralities.
    ProductVectorCentrality,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 3] = [
        FeatureSet::ProductScalar,
        FeatureSet::ProductVector,
        FeatureSet::ProductVectorCentrality,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FeatureSet::ProductScalar => "PR+SP",
            FeatureSet::ProductVector => "PR+VP",
            FeatureSet::ProductVectorCentrality => "PR+VP+VC",
        }
    }

    /// Number of feature columns for `products` product metrics and `bins` slots.
    pub fn width(self, products: usize, bins: usize) -> usize {
        let vector = MetricId::ALL.len() * bins;
        match self {
            FeatureSet::ProductScalar => products + MetricId::ALL.len(),
            FeatureSet::ProductVector => products + vector,
            FeatureSet::ProductVectorCentrality => products + vector + crate::hypergraph::centrality_width(bins),
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FeatureSet {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        FeatureSet::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown feature set `{s}` (expected pr+sp, pr+vp or pr+vp+vc)"))
    }
}

/// Maps corpus paths onto repository-relative paths.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathMap {
    pub strip_prefix: Option<String>,
    pub add_prefix: Option<String>,
}

impl PathMap {
    pub fn apply(&self, path: &str) -> String {
        let mut p = normalize_path(path);
        if let Some(strip) = &self.strip_prefix {
            if let Some(rest) = p.strip_prefix(strip.as_str()) {
                p = rest.trim_start_matches('/').to_string();
            }
        }
        if let Some(add) = &self.add_prefix {
            p = format!("{}/{}", add.trim_end_matches('/'), p);
        }
        p
    }
}

#[derive(Debug, Clone)]
pub struct CorpusOptions {
    /// Required number of product columns; `None` accepts any count.
    pub product_columns: Option<usize>,
    pub ignored_columns: Vec<String>,
    pub path_map: PathMap,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        Self {
            product_columns: Some(PRODUCT_METRIC_COUNT),
            ignored_columns: DEFAULT_IGNORED_COLUMNS.map(String::from).to_vec(),
            path_map: PathMap::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductRecord {
    pub path: String,
    pub product_values: Vec<f64>,
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductCorpus {
    pub columns: Vec<String>,
    pub records: BTreeMap<String, ProductRecord>,
}

fn parse_label(raw: &str) -> Option<u8> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "0" | "false" => Some(0),
        "1" | "true" => Some(1),
        _ => None,
    }
}

impl ProductCorpus {
    pub fn from_csv<R: Read>(reader: R, options: &CorpusOptions) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let find = |name: &str| headers.iter().position(|h| h == name);
        let path_idx = find(PATH_COLUMN)
            .ok_or_else(|| Error::Schema(format!("corpus has no `{PATH_COLUMN}` column")))?;
        let label_idx = find(LABEL_COLUMN)
            .ok_or_else(|| Error::Schema(format!("corpus has no `{LABEL_COLUMN}` column")))?;
        let product_idx: Vec<usize> = (0..headers.len())
            .filter(|&i| i != path_idx && i != label_idx)
            .filter(|&i| !options.ignored_columns.iter().any(|c| c == &headers[i]))
            .collect();
        if let Some(expected) = options.product_columns {
            if product_idx.len() != expected {
                return Err(Error::Schema(format!(
                    "expected {expected} product metric columns, found {}",
                    product_idx.len()
                )));
            }
        }
        let columns = product_idx.iter().map(|&i| headers[i].to_string()).collect();
        let mut records = BTreeMap::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = row + 2;
            let path = options.path_map.apply(&rec[path_idx]);
            if path.is_empty() {
                return Err(Error::Schema(format!("row {line}: empty `{PATH_COLUMN}`")));
            }
            let label = parse_label(&rec[label_idx]).ok_or_else(|| {
                Error::Schema(format!(
                    "row {line}: label `{}` is not 0/1",
                    &rec[label_idx]
                ))
            })?;
            let product_values = product_idx
                .iter()
                .map(|&i| {
                    rec[i].parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                        Error::Schema(format!(
                            "row {line}: column `{}` value `{}` is not a finite number",
                            &headers[i], &rec[i]
                        ))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if records.contains_key(&path) {
                return Err(Error::DuplicatePath(path));
            }
            records.insert(
                path.clone(),
                ProductRecord {
                    path,
                    product_values,
                    label,
                },
            );
        }
        Ok(Self { columns, records })
    }
}

/// Computed features of one file in one release.
#[derive(Debug, Clone, PartialEq)]
pub struct FileFeatures {
    /// Scalar process metrics in [`MetricId::ALL`] order.
    pub scalar: Vec<f64>,
    /// Fourteen vectors of `bins` slots, in [`MetricId::ALL`] order.
    pub vector: Vec<f64>,
    /// Degree, betweenness, closeness and eigenvector blocks of `bins` slots.
    pub centrality: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReleaseFeatures {
    pub release: String,
    pub bins: usize,
    pub files: BTreeMap<String, FileFeatures>,
}

impl ReleaseFeatures {
    pub fn column_names(&self, set: FeatureSet) -> Vec<String> {
        let scalar = || MetricId::ALL.iter().map(|m| m.name().to_string()).collect::<Vec<_>>();
        let vector = || {
            MetricId::ALL
                .iter()
                .flat_map(|&m| MetricVector::column_names(m, self.bins))
                .collect::<Vec<_>>()
        };
        match set {
            FeatureSet::ProductScalar => scalar(),
            FeatureSet::ProductVector => vector(),
            FeatureSet::ProductVectorCentrality => {
                let mut v = vector();
                v.extend(centrality_column_names(self.bins));
                v
            }
        }
    }
}

/// Computes scalar, vector and centrality features for every file changed in
/// `release`.
pub fn compute_features(store: &CommitStore, release: &str) -> Result<ReleaseFeatures> {
    let view = ReleaseView::new(store, release)?;
    let profile = ChangeProfile::of_view(&view);
    let graph = build_pairwise(store, release)?;
    let scalars = scalar_metrics_all(&view, &profile, &graph)?;
    let mut vectors = vector_metrics_all(&view, &profile, &graph)?;
    let mut centrality = centrality_features(store, release)?;
    let files = scalars
        .into_iter()
        .map(|(path, s)| {
            let vector = vectors
                .remove(&path)
                .unwrap_or_default()
                .iter()
                .flat_map(|v| v.slots().iter().copied())
                .collect();
            let centrality = centrality.remove(&path).unwrap_or_default();
            (
                path,
                FileFeatures {
                    scalar: s.to_array().to_vec(),
                    vector,
                    centrality,
                },
            )
        })
        .collect();
    log::info!("computed features for release {release}");
    Ok(ReleaseFeatures {
        release: release.to_string(),
        bins: view.bins(),
        files,
    })
}

/// Files present on only one side of a join.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Reconciliation {
    /// In the corpus but never changed in the release window.
    pub corpus_only: Vec<String>,
    /// Changed in the window but missing from the corpus.
    pub computed_only: Vec<String>,
}

impl Reconciliation {
    pub fn is_clean(&self) -> bool {
        self.corpus_only.is_empty() && self.computed_only.is_empty()
    }

    /// `side,path` rows, corpus-only first.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["side", "path"])?;
        for p in &self.corpus_only {
            w.write_record(["corpus_only", p])?;
        }
        for p in &self.computed_only {
            w.write_record(["computed_only", p])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRow {
    pub label: u8,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub release: String,
    pub feature_set: FeatureSet,
    /// Feature column names, excluding `path` and `label`.
    pub columns: Vec<String>,
    pub rows: BTreeMap<String, MatrixRow>,
}

/// Inner join of corpus rows with computed features on normalized path.
pub fn join(
    corpus: &ProductCorpus,
    features: &ReleaseFeatures,
    set: FeatureSet,
) -> (FeatureMatrix, Reconciliation) {
    let mut columns = corpus.columns.clone();
    columns.extend(features.column_names(set));
    let mut rows = BTreeMap::new();
    let mut rec = Reconciliation::default();
    for (path, product) in &corpus.records {
        let Some(f) = features.files.get(path) else {
            rec.corpus_only.push(path.clone());
            continue;
        };
        let mut values = product.product_values.clone();
        match set {
            FeatureSet::ProductScalar => values.extend(&f.scalar),
            FeatureSet::ProductVector => values.extend(&f.vector),
            FeatureSet::ProductVectorCentrality => {
                values.extend(&f.vector);
                values.extend(&f.centrality);
            }
        }
        rows.insert(
            path.clone(),
            MatrixRow {
                label: product.label,
                values,
            },
        );
    }
    rec.computed_only = features
        .files
        .keys()
        .filter(|p| !corpus.records.contains_key(*p))
        .cloned()
        .collect();
    if !rec.is_clean() {
        log::warn!(
            "join for {}: {} corpus-only, {} computed-only paths",
            features.release,
            rec.corpus_only.len(),
            rec.computed_only.len()
        );
    }
    (
        FeatureMatrix {
            release: features.release.clone(),
            feature_set: set,
            columns,
            rows,
        },
        rec,
    )
}

/// Renders a value with 12 significant digits, `%.12g` style.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_fraction(mantissa))
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl FeatureMatrix {
    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn check_finite(&self) -> Result<()> {
        for (path, row) in &self.rows {
            if let Some(i) = row.values.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    column: self.columns[i].clone(),
                    row: path.clone(),
                });
            }
        }
        Ok(())
    }

    /// Writes `path,label,<features...>` with rows in path order.
    pub fn write_csv<W: Write>(&self, out: W, force: bool) -> Result<()> {
        if self.is_empty() && !force {
            return Err(Error::EmptyMatrix);
        }
        self.check_finite()?;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["path".to_string(), "label".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        let mut record = Vec::with_capacity(header.len());
        for (path, row) in &self.rows {
            record.clear();
            record.push(path.clone());
            record.push(row.label.to_string());
            record.extend(row.values.iter().map(|&v| format_value(v)));
            w.write_record(&record)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Reads a matrix written by [`FeatureMatrix::write_csv`].
    pub fn read_csv<R: Read>(reader: R, release: &str, feature_set: FeatureSet) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() < 2 || &headers[0] != "path" || &headers[1] != "label" {
            return Err(Error::Schema("matrix header must start with `path,label`".into()));
        }
        let columns: Vec<String> = headers.iter().skip(2).map(String::from).collect();
        let mut rows = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec?;
            let path = rec[0].to_string();
            let label = parse_label(&rec[1])
                .ok_or_else(|| Error::Schema(format!("row `{path}`: bad label `{}`", &rec[1])))?;
            let values = rec
                .iter()
                .skip(2)
                .zip(&columns)
                .map(|(v, c)| {
                    v.parse::<f64>().map_err(|_| {
                        Error::Schema(format!("row `{path}`, column `{c}`: bad value `{v}`"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if rows.insert(path.clone(), MatrixRow { label, values }).is_some() {
                return Err(Error::DuplicatePath(path));
            }
        }
        Ok(Self {
            release: release.to_string(),
            feature_set,
            columns,
            rows,
        })
    }

    /// Feature columns that appear in every row, as a set (for schema checks).
    pub fn column_set(&self) -> BTreeSet<&str> {
        self.columns.iter().map(String::as_str).collect()
    }
}
