//! hyperchange - commit-size-aware change metrics and defect-prediction feature matrices.

mod config;

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperchange::cochange::build_pairwise;
use hyperchange::commitlog::{
    extract_from_repository, ingest_commit_log, write_jsonl, CommitStore, ReleaseManifest, TagRange,
};
use hyperchange::featureset::{compute_features, join, ProductCorpus};
use hyperchange::hypergraph::build_hypergraph;
use hyperchange::Error;
use log::info;

use config::{FileConfig, Overrides, Settings};

#[derive(Debug, Parser)]
#[command(name = "hyperchange", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract a JSONL commit log from a git repository
    Extract {
        /// Repository to read
        #[arg(long)]
        repo: PathBuf,
        /// Release range as `PREV..TAG=RELEASE`, or `..TAG=RELEASE` for history up to TAG
        #[arg(long = "range", required = true, value_parser = parse_range)]
        ranges: Vec<TagRange>,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Join corpus product metrics with computed change features for one release
    Features {
        #[command(flatten)]
        ingest: IngestArgs,
        /// Product-metric corpus CSV (`File`, 54 metrics, `RealBug`)
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        release: String,
        /// pr+sp, pr+vp or pr+vp+vc (default: pr+vp+vc)
        #[arg(long)]
        feature_set: Option<String>,
        /// Prefix removed from corpus paths before joining
        #[arg(long)]
        strip_prefix: Option<String>,
        /// Prefix prepended to corpus paths before joining
        #[arg(long)]
        add_prefix: Option<String>,
        /// Write unmatched paths from both sides to this CSV
        #[arg(long)]
        reconciliation: Option<PathBuf>,
        /// Export even when the join is empty
        #[arg(long)]
        force: bool,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the co-change graph of one release
    GraphExport {
        #[command(flatten)]
        ingest: IngestArgs,
        #[arg(long)]
        release: String,
        #[arg(long, value_enum)]
        kind: GraphKind,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the embedded worked example and compare with hand-derived values
    SelfTest,
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// JSONL commit log
    #[arg(long)]
    commit_log: PathBuf,
    /// Release ordering CSV (`ordinal,release`)
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// TOML config file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    max_commit_size: Option<usize>,
    /// Vector length; must equal the commit size limit
    #[arg(long)]
    bins: Option<usize>,
    /// Source-file suffix, repeatable (default: .java)
    #[arg(long = "source-suffix")]
    source_suffixes: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphKind {
    /// `file_a,file_b,weight` CSV
    Pairwise,
    /// One JSON hyperedge per line
    Hypergraph,
}

fn parse_range(s: &str) -> Result<TagRange, String> {
    let (range, release) = s
        .rsplit_once('=')
        .ok_or_else(|| format!("`{s}` is missing `=RELEASE`"))?;
    let (prev, tag) = match range.split_once("..") {
        Some((prev, tag)) => (Some(prev).filter(|p| !p.is_empty()), tag),
        None => (None, range),
    };
    if tag.is_empty() || release.is_empty() {
        return Err(format!("`{s}` needs a tag and a release"));
    }
    Ok(TagRange::new(prev, tag, release))
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Config(_)) { 2 } else { 1 };
        Failure {
            code,
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HYPERCHANGE_LOG", "info"))
        .format(|buf, record| writeln!(buf, "{} {}", record.level().as_str().to_lowercase(), record.args()))
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let reason: Vec<&str> = rendered
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .filter(|l| !l.is_empty())
                .collect();
            eprintln!("error kind=usage: {}", reason.join(" ").trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };

    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error kind={}: {}", f.kind, f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Extract { repo, ranges, out } => {
            let records = extract_from_repository(&repo, &ranges)?;
            info!("stage=extract repo={} ranges={} commits={}", repo.display(), ranges.len(), records.len());
            let mut buf = Vec::new();
            write_jsonl(&records, &mut buf).map_err(|e| Error::io("<buffer>", e))?;
            emit(out.as_deref(), &buf)?;
        }
        Command::Features {
            ingest,
            corpus,
            release,
            feature_set,
            strip_prefix,
            add_prefix,
            reconciliation,
            force,
            out,
        } => {
            let settings = settings(
                &ingest,
                Overrides {
                    feature_set,
                    strip_prefix,
                    add_prefix,
                    ..Overrides::default()
                },
            )?;
            let store = load_store(&ingest, &settings)?;
            let features = compute_features(&store, &release)?;
            info!("stage=features release={} files={}", release, features.files.len());
            let corpus = ProductCorpus::from_csv(open(&corpus)?, &settings.corpus())?;
            let (matrix, recon) = join(&corpus, &features, settings.feature_set);
            info!(
                "stage=join feature_set={} rows={} corpus_only={} computed_only={}",
                settings.feature_set.id(),
                matrix.rows.len(),
                recon.corpus_only.len(),
                recon.computed_only.len()
            );
            let mut buf = Vec::new();
            matrix.write_csv(&mut buf, force)?;
            if let Some(path) = reconciliation {
                let mut rbuf = Vec::new();
                recon.write_csv(&mut rbuf)?;
                emit(Some(&path), &rbuf)?;
            }
            emit(out.as_deref(), &buf)?;
            info!("stage=export columns={} rows={}", matrix.width() + 2, matrix.rows.len());
        }
        Command::GraphExport { ingest, release, kind, out } => {
            let settings = settings(&ingest, Overrides::default())?;
            let store = load_store(&ingest, &settings)?;
            let mut buf = Vec::new();
            match kind {
                GraphKind::Pairwise => {
                    let g = build_pairwise(&store, &release)?;
                    info!("stage=graph kind=pairwise nodes={} edges={}", g.node_count(), g.edge_count());
                    g.write_csv(&mut buf)?;
                }
                GraphKind::Hypergraph => {
                    let hg = build_hypergraph(&store, &release)?;
                    info!("stage=graph kind=hypergraph nodes={} edges={}", hg.nodes().len(), hg.edges().len());
                    hg.write_jsonl(&mut buf).map_err(|e| Error::io("<buffer>", e))?;
                }
            }
            emit(out.as_deref(), &buf)?;
        }
        Command::SelfTest => {
            let checks = hyperchange::worked_example::self_test();
            let failed = checks.iter().filter(|c| !c.passed).count();
            let mut stdout = std::io::stdout().lock();
            for c in &checks {
                let status = if c.passed { "ok" } else { "FAIL" };
                let _ = writeln!(stdout, "{status:4} {}: {}", c.name, c.detail);
            }
            if failed > 0 {
                let _ = writeln!(stdout, "FAIL");
                return Err(Failure {
                    code: 1,
                    kind: "self-test",
                    message: format!("{failed} of {} checks failed", checks.len()),
                });
            }
            let _ = writeln!(stdout, "PASS");
        }
    }
    Ok(())
}

fn settings(ingest: &IngestArgs, mut flags: Overrides) -> Result<Settings, Error> {
    let file = match &ingest.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    flags.max_commit_size = ingest.max_commit_size;
    flags.bins = ingest.bins;
    flags.source_suffixes = ingest.source_suffixes.clone();
    Settings::resolve(file, flags)
}

fn load_store(ingest: &IngestArgs, settings: &Settings) -> Result<CommitStore, Error> {
    let mut config = settings.ingest();
    if let Some(path) = &ingest.manifest {
        config.manifest = Some(ReleaseManifest::from_csv(open(path)?)?);
    }
    let store = ingest_commit_log(BufReader::new(open(&ingest.commit_log)?), &config)?;
    info!(
        "stage=ingest commits={} windows={} max_commit_size={} bins={}",
        store.len(),
        store.windows().len(),
        settings.max_commit_size,
        settings.bins
    );
    Ok(store)
}

fn open(path: &Path) -> Result<File, Error> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Error::io(path, e)),
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|e| Error::io("<stdout>", e)),
    }
}
