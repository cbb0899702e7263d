//! Command-line front end and run orchestration.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{load_catalog, Catalog};
use crate::conformance::CountMode;
use crate::package::registry::REGISTRY_ENV;
use crate::package::sample::sample_ids;
use crate::package::{
    load_package, load_package_bytes, parse_id_list, sample_packages, PackageId, Registry, SampleStrategy,
};
use crate::report::{analyze, FailureRecord, Format, Outcome, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hiddenflow", version, about = "Compare declared node ports with detected information flows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Endpoint catalog (TOML); the built-in catalog when omitted.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    /// Package registry base URL.
    #[arg(long, global = true, env = REGISTRY_ENV)]
    pub registry: Option<String>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Analyze at most this many packages, half by popularity and half at random.
    #[arg(long, global = true)]
    pub max_packages: Option<usize>,
    /// Count every matched endpoint instead of flow endpoints only.
    #[arg(long, global = true)]
    pub count_syntactic: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one package directory or tarball.
    Scan { path: PathBuf },
    /// Analyze a directory of packages or a file of package ids.
    Corpus { input: PathBuf },
    /// Download the packages named in an id list.
    Fetch { ids: PathBuf },
    /// Check a JSON report and re-emit it.
    Report { report: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Scan,
    Corpus,
    Fetch,
    Report,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub input: PathBuf,
    pub catalog: Option<PathBuf>,
    pub registry: String,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub max_packages: Option<usize>,
    pub count_syntactic: bool,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("--jobs must be at least 1")]
    Jobs,
    #[error("fetch needs --out")]
    FetchOut,
    #[error("cannot create output directory `{path}`: {source}")]
    Out {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Catalog(#[from] crate::catalog::CatalogError),
    #[error("cannot read `{path}`: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("`{path}` line {line}: {message}")]
    IdList { path: PathBuf, line: usize, message: String },
    #[error("`{path}`: {source}")]
    Report {
        path: PathBuf,
        #[source]
        source: crate::report::ReportError,
    },
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, ConfigError> {
        let (mode, input) = match self.command {
            Command::Scan { path } => (Mode::Scan, path),
            Command::Corpus { input } => (Mode::Corpus, input),
            Command::Fetch { ids } => (Mode::Fetch, ids),
            Command::Report { report } => (Mode::Report, report),
        };
        let jobs = self.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if jobs == 0 {
            return Err(ConfigError::Jobs);
        }
        if mode == Mode::Fetch && self.out.is_none() {
            return Err(ConfigError::FetchOut);
        }
        Ok(RunConfig {
            mode,
            input,
            catalog: self.catalog,
            registry: Registry::resolve_base(self.registry.as_deref()),
            jobs,
            out: self.out,
            format: self.format,
            seed: self.seed,
            max_packages: self.max_packages,
            count_syntactic: self.count_syntactic,
        })
    }
}

/// Parse `args` and run. Returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match cli.into_config() {
        Ok(cfg) => run(&cfg, stdout, stderr),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_CONFIG
        }
    }
}

pub fn run(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match try_run(cfg, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_CONFIG
        }
    }
}

fn try_run(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, ConfigError> {
    let catalog = match &cfg.catalog {
        Some(p) => load_catalog(p)?,
        None => Catalog::builtin(),
    };
    if let Some(out) = &cfg.out {
        fs::create_dir_all(out).map_err(|source| ConfigError::Out { path: out.clone(), source })?;
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?;
    let mode = if cfg.count_syntactic { CountMode::Syntactic } else { CountMode::Flows };

    match cfg.mode {
        Mode::Scan => {
            let origin = cfg.input.display().to_string();
            let (outcomes, failures) = pool.install(|| match load_package(&cfg.input) {
                Ok(pkg) => (vec![analyze(&pkg, &origin, &catalog, mode)], vec![]),
                Err(e) => (vec![], vec![FailureRecord { origin: origin.clone(), error: e.to_string() }]),
            });
            finish(cfg, Report::from_outcomes(&catalog.version, mode, outcomes, failures), stdout, stderr)
        }
        Mode::Corpus => {
            let report = pool.install(|| corpus(cfg, &catalog, mode))?;
            finish(cfg, report, stdout, stderr)
        }
        Mode::Fetch => {
            let manifest = pool.install(|| fetch(cfg))?;
            write_fetch_manifest(cfg, manifest, stderr)
        }
        Mode::Report => {
            let bytes =
                fs::read(&cfg.input).map_err(|source| ConfigError::Input { path: cfg.input.clone(), source })?;
            let report =
                Report::from_json(&bytes).map_err(|source| ConfigError::Report { path: cfg.input.clone(), source })?;
            if !report.summary_is_consistent() {
                let _ = writeln!(stderr, "error: summary does not match the package records");
                return Ok(EXIT_PARTIAL);
            }
            write_output(cfg, &report, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

fn finish(cfg: &RunConfig, report: Report, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, ConfigError> {
    for f in &report.failures {
        let _ = writeln!(stderr, "failed: {}: {}", f.origin, f.error);
    }
    write_output(cfg, &report, stdout)?;
    Ok(if report.failures.is_empty() { EXIT_OK } else { EXIT_PARTIAL })
}

fn write_output(cfg: &RunConfig, report: &Report, stdout: &mut dyn Write) -> Result<(), ConfigError> {
    let bytes =
        report.emit(cfg.format).map_err(|source| ConfigError::Report { path: PathBuf::from("<output>"), source })?;
    match &cfg.out {
        Some(dir) => {
            let name = match cfg.format {
                Format::Json => "report.json",
                Format::Csv => "report.csv",
            };
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|source| ConfigError::Out { path, source })
        }
        None => stdout.write_all(&bytes).map_err(|source| ConfigError::Out { path: PathBuf::from("<stdout>"), source }),
    }
}

/// Package inputs in a corpus directory: subdirectories and tarballs.
fn corpus_entries(dir: &Path) -> Result<Vec<PathBuf>, ConfigError> {
    if dir.join(crate::package::MANIFEST).is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let read = fs::read_dir(dir).map_err(|source| ConfigError::Input { path: dir.to_path_buf(), source })?;
    let mut out = Vec::new();
    for entry in read {
        let entry = entry.map_err(|source| ConfigError::Input { path: dir.to_path_buf(), source })?;
        let path = entry.path();
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') {
            continue;
        }
        if path.is_dir() || name.ends_with(".tgz") || name.ends_with(".tar.gz") {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn read_ids(path: &Path) -> Result<Vec<PackageId>, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Input { path: path.to_path_buf(), source })?;
    let mut ids = parse_id_list(&text).map_err(|(line, e)| ConfigError::IdList {
        path: path.to_path_buf(),
        line,
        message: e.to_string(),
    })?;
    ids.sort();
    ids.dedup();
    Ok(ids)
}

fn corpus(cfg: &RunConfig, catalog: &Catalog, mode: CountMode) -> Result<Report, ConfigError> {
    if cfg.input.is_dir() {
        let entries = corpus_entries(&cfg.input)?;
        let loaded: Vec<(String, Result<_, _>)> =
            entries.par_iter().map(|p| (p.display().to_string(), load_package(p))).collect();
        let mut failures = Vec::new();
        let mut pkgs = Vec::new();
        for (origin, r) in loaded {
            match r {
                Ok(pkg) => pkgs.push((origin, pkg)),
                Err(e) => failures.push(FailureRecord { origin, error: e.to_string() }),
            }
        }
        if let Some(n) = cfg.max_packages {
            let valid: Vec<_> = pkgs.iter().filter(|(_, p)| p.is_valid()).map(|(_, p)| p.clone()).collect();
            let keep = sample_packages(&valid, n.min(valid.len()), SampleStrategy::HalfHalf, cfg.seed)
                .expect("sample within bounds of valid packages");
            pkgs.retain(|(_, p)| !p.is_valid() || keep.contains(&p.id));
        }
        let outcomes: Vec<Outcome> = pkgs.par_iter().map(|(origin, p)| analyze(p, origin, catalog, mode)).collect();
        return Ok(Report::from_outcomes(&catalog.version, mode, outcomes, failures));
    }

    let mut ids = read_ids(&cfg.input)?;
    if let Some(n) = cfg.max_packages {
        let pairs: Vec<_> = ids.iter().map(|id| (id.clone(), None)).collect();
        ids = sample_ids(&pairs, n.min(pairs.len()), SampleStrategy::HalfHalf, cfg.seed).expect("sample within bounds");
    }
    let registry = Registry::new(&cfg.registry);
    let results: Vec<(Option<Outcome>, Option<FailureRecord>)> = ids
        .par_iter()
        .map(|id| {
            let origin = id.to_string();
            match registry.fetch(id) {
                Ok(archive) => match load_package_bytes(&archive.bytes, &archive.resolved.slug()) {
                    Ok(pkg) => (Some(analyze(&pkg, &origin, catalog, mode)), None),
                    Err(e) => (None, Some(FailureRecord { origin, error: e.to_string() })),
                },
                Err(e) if e.is_not_found() => (
                    Some(Outcome::Excluded(crate::report::ExcludedRecord {
                        package: id.clone(),
                        origin,
                        validity: crate::package::ValidityStatus::BrokenDownload,
                        diagnostics: vec![crate::diag::Diagnostic::new("", 0, e.to_string())],
                    })),
                    None,
                ),
                Err(e) => (None, Some(FailureRecord { origin, error: e.to_string() })),
            }
        })
        .collect();
    let (outcomes, failures): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(Report::from_outcomes(
        &catalog.version,
        mode,
        outcomes.into_iter().flatten().collect(),
        failures.into_iter().flatten().collect(),
    ))
}

#[derive(Serialize)]
struct FetchedEntry {
    requested: String,
    resolved: String,
    tarball_url: String,
    file: String,
}

#[derive(Serialize)]
struct FetchManifest {
    registry: String,
    fetched: Vec<FetchedEntry>,
    not_found: Vec<String>,
    failures: Vec<FailureRecord>,
}

fn fetch(cfg: &RunConfig) -> Result<FetchManifest, ConfigError> {
    let out = cfg.out.as_ref().ok_or(ConfigError::FetchOut)?;
    let mut ids = read_ids(&cfg.input)?;
    if let Some(n) = cfg.max_packages {
        let pairs: Vec<_> = ids.iter().map(|id| (id.clone(), None)).collect();
        ids = sample_ids(&pairs, n.min(pairs.len()), SampleStrategy::HalfHalf, cfg.seed).expect("sample within bounds");
    }
    let registry = Registry::new(&cfg.registry);
    let results: Vec<_> = ids.par_iter().map(|id| (id, registry.fetch(id))).collect();
    let mut manifest = FetchManifest {
        registry: cfg.registry.clone(),
        fetched: Vec::new(),
        not_found: Vec::new(),
        failures: Vec::new(),
    };
    for (id, r) in results {
        match r {
            Ok(a) => {
                let file = format!("{}.tgz", a.resolved.slug());
                let path = out.join(&file);
                if let Err(e) = fs::write(&path, &a.bytes) {
                    manifest.failures.push(FailureRecord { origin: id.to_string(), error: e.to_string() });
                    continue;
                }
                manifest.fetched.push(FetchedEntry {
                    requested: a.requested.to_string(),
                    resolved: a.resolved.to_string(),
                    tarball_url: a.tarball_url,
                    file,
                });
            }
            Err(e) if e.is_not_found() => manifest.not_found.push(id.to_string()),
            Err(e) => manifest.failures.push(FailureRecord { origin: id.to_string(), error: e.to_string() }),
        }
    }
    Ok(manifest)
}

fn write_fetch_manifest(cfg: &RunConfig, manifest: FetchManifest, stderr: &mut dyn Write) -> Result<i32, ConfigError> {
    let out = cfg.out.as_ref().ok_or(ConfigError::FetchOut)?;
    for f in &manifest.failures {
        let _ = writeln!(stderr, "failed: {}: {}", f.origin, f.error);
    }
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    bytes.push(b'\n');
    let path = out.join("fetched.json");
    fs::write(&path, bytes).map_err(|source| ConfigError::Out { path, source })?;
    Ok(if manifest.failures.is_empty() { EXIT_OK } else { EXIT_PARTIAL })
}
