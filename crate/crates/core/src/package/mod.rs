//! Loading, validating and measuring node packages.

pub mod archive;
pub mod id;
pub mod registry;
pub mod sample;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::{self, File};
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tempfile::TempDir;
use thiserror::Error;
use walkdir::WalkDir;

use crate::diag::Diagnostic;
use crate::spec::{parse_html_specs, spec_totals, NodeSpec, SpecTotals};

pub use archive::ArchiveError;
pub use id::{parse_id_list, PackageId, PackageIdError};
pub use registry::{fetch_package, FetchError, FetchedArchive, Registry};
pub use sample::{sample_packages, SampleError, SampleStrategy};

pub const MANIFEST: &str = "package.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValidityStatus {
    Valid,
    BrokenDownload,
    NoNodes,
    UnparsableSpec,
}

impl fmt::Display for ValidityStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValidityStatus::Valid => "valid",
            ValidityStatus::BrokenDownload => "broken-download",
            ValidityStatus::NoNodes => "no-nodes",
            ValidityStatus::UnparsableSpec => "unparsable-spec",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the package root, `/`-separated.
    pub path: String,
    pub size: u64,
}

/// A node declared in the manifest's `node-red.nodes` section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRegistration {
    pub name: String,
    pub file: String,
}

#[derive(Debug, Clone)]
pub struct NodePackage {
    pub id: PackageId,
    pub root: PathBuf,
    pub manifest: Value,
    pub files: Vec<FileEntry>,
    pub weekly_downloads: Option<u64>,
    pub validity: ValidityStatus,
    pub nodes: Vec<NodeRegistration>,
    pub specs: Vec<NodeSpec>,
    pub diagnostics: Vec<Diagnostic>,
    /// Keeps an extracted tarball alive for as long as the package is.
    _extracted: Option<Arc<TempDir>>,
}

impl PartialEq for NodePackage {
    fn eq(&self, other: &Self) -> bool {
        let same_root = self._extracted.is_some() && other._extracted.is_some() || self.root == other.root;
        same_root
            && self.id == other.id
            && self.manifest == other.manifest
            && self.files == other.files
            && self.weekly_downloads == other.weekly_downloads
            && self.validity == other.validity
            && self.nodes == other.nodes
            && self.specs == other.specs
            && self.diagnostics == other.diagnostics
    }
}

impl NodePackage {
    pub fn spec_totals(&self) -> SpecTotals {
        spec_totals(&self.specs)
    }

    pub fn with_downloads(mut self, weekly: Option<u64>) -> Self {
        self.weekly_downloads = weekly;
        self
    }

    pub fn is_valid(&self) -> bool {
        self.validity == ValidityStatus::Valid
    }

    pub fn read_file(&self, rel: &str) -> std::io::Result<Vec<u8>> {
        fs::read(self.root.join(rel))
    }

    /// Files the analysis looks at: `.js`, `.ts` and `.html` outside
    /// bundled dependencies.
    pub fn source_files(&self) -> impl Iterator<Item = &FileEntry> {
        self.files.iter().filter(|f| source_extension(&f.path).is_some())
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("`{path}`: {source}")]
    Archive {
        path: PathBuf,
        #[source]
        source: ArchiveError,
    },
}

/// Extension class of a counted source file, skipping `node_modules`.
pub fn source_extension(rel: &str) -> Option<&'static str> {
    if rel.split('/').any(|seg| seg == "node_modules") {
        return None;
    }
    let ext = rel.rsplit_once('.')?.1.to_ascii_lowercase();
    match ext.as_str() {
        "js" => Some("js"),
        "ts" => Some("ts"),
        "html" => Some("html"),
        _ => None,
    }
}

fn inventory(root: &Path) -> Result<Vec<FileEntry>, LoadError> {
    let mut files = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = entry.map_err(|e| LoadError::Io {
            path: e.path().unwrap_or(root).to_path_buf(),
            source: e.into_io_error().unwrap_or_else(|| std::io::Error::other("file system loop")),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(root).expect("walk stays under root");
        let path = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        let size = entry.metadata().map(|m| m.len()).unwrap_or(0);
        files.push(FileEntry { path, size });
    }
    files.sort();
    Ok(files)
}

fn manifest_nodes(manifest: &Value) -> Vec<NodeRegistration> {
    manifest
        .get("node-red")
        .and_then(|n| n.get("nodes"))
        .and_then(Value::as_object)
        .map(|nodes| {
            nodes
                .iter()
                .filter_map(|(name, file)| {
                    Some(NodeRegistration {
                        name: name.clone(),
                        file: file.as_str()?.trim_start_matches("./").to_string(),
                    })
                })
                .collect()
        })
        .unwrap_or_default()
}

fn id_from_manifest(manifest: &Value, fallback: &str) -> PackageId {
    let name = manifest.get("name").and_then(Value::as_str).unwrap_or(fallback);
    let version = manifest.get("version").and_then(Value::as_str).unwrap_or("latest");
    PackageId::new(name, version)
        .or_else(|_| PackageId::latest(name))
        .unwrap_or_else(|_| PackageId { name: fallback.to_string(), version: "latest".into() })
}

fn is_gzip(path: &Path) -> bool {
    let mut magic = [0u8; 2];
    File::open(path).and_then(|mut f| f.read_exact(&mut magic)).is_ok() && magic == [0x1f, 0x8b]
}

/// Load a package from an unpacked directory or a gzip tarball.
pub fn load_package(path: &Path) -> Result<NodePackage, LoadError> {
    let meta = fs::metadata(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
    if meta.is_dir() {
        return load_tree(path.to_path_buf(), None);
    }
    if !is_gzip(path) {
        return Err(LoadError::Archive {
            path: path.to_path_buf(),
            source: ArchiveError::Corrupt(std::io::Error::other("not a gzip tarball")),
        });
    }
    let file = File::open(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
    load_archive(file, path)
}

/// Load a package from tarball bytes, e.g. a registry download.
pub fn load_package_bytes(bytes: &[u8], label: &str) -> Result<NodePackage, LoadError> {
    load_archive(bytes, Path::new(label))
}

fn load_archive<R: Read>(reader: R, origin: &Path) -> Result<NodePackage, LoadError> {
    let tmp = tempfile::Builder::new()
        .prefix("hiddenflow-")
        .tempdir()
        .map_err(|source| LoadError::Io { path: std::env::temp_dir(), source })?;
    let rejected = archive::extract_tarball(reader, tmp.path())
        .map_err(|source| LoadError::Archive { path: origin.to_path_buf(), source })?;
    let mut pkg = load_tree(tmp.path().to_path_buf(), Some(Arc::new(tmp)))?;
    let label = origin.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    for r in rejected {
        pkg.diagnostics.push(Diagnostic::new(&label, 0, format!("rejected archive entry `{}`: {}", r.entry, r.reason)));
    }
    Ok(pkg)
}

fn load_tree(root: PathBuf, extracted: Option<Arc<TempDir>>) -> Result<NodePackage, LoadError> {
    let files = inventory(&root)?;
    let fallback = root.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "package".into());
    let mut diagnostics = Vec::new();
    let manifest = match fs::read(root.join(MANIFEST)) {
        Ok(bytes) => match serde_json::from_slice::<Value>(&bytes) {
            Ok(v) if v.is_object() => Some(v),
            Ok(_) => {
                diagnostics.push(Diagnostic::new(MANIFEST, 0, "manifest is not a JSON object"));
                None
            }
            Err(e) => {
                diagnostics.push(Diagnostic::new(MANIFEST, e.line() as u32, format!("malformed manifest: {e}")));
                None
            }
        },
        Err(e) => {
            diagnostics.push(Diagnostic::new(MANIFEST, 0, format!("missing manifest: {e}")));
            None
        }
    };
    let Some(manifest) = manifest else {
        return Ok(NodePackage {
            id: PackageId { name: fallback, version: "latest".into() },
            root,
            manifest: Value::Null,
            files,
            weekly_downloads: None,
            validity: ValidityStatus::UnparsableSpec,
            nodes: Vec::new(),
            specs: Vec::new(),
            diagnostics,
            _extracted: extracted,
        });
    };
    let id = id_from_manifest(&manifest, &fallback);
    let nodes = manifest_nodes(&manifest);
    let present: BTreeSet<&str> = files.iter().map(|f| f.path.as_str()).collect();
    let mut spec_files = BTreeSet::new();
    for node in &nodes {
        let stem = node.file.strip_suffix(".js").or_else(|| node.file.strip_suffix(".ts")).unwrap_or(&node.file);
        let html = format!("{stem}.html");
        if present.contains(html.as_str()) {
            spec_files.insert(html);
        } else {
            diagnostics.push(Diagnostic::new(&node.file, 0, format!("node `{}` has no HTML specification", node.name)));
        }
    }
    let mut specs = Vec::new();
    for file in &spec_files {
        match fs::read(root.join(file)) {
            Ok(bytes) => specs.extend(parse_html_specs(&String::from_utf8_lossy(&bytes), file, &mut diagnostics)),
            Err(e) => diagnostics.push(Diagnostic::new(file, 0, format!("unreadable: {e}"))),
        }
    }
    for spec in &specs {
        for w in &spec.warnings {
            diagnostics.push(Diagnostic::new(
                &spec.location.file,
                spec.location.line,
                format!("{}: {w}", spec.node_name),
            ));
        }
    }
    let validity = if nodes.is_empty() {
        ValidityStatus::NoNodes
    } else if !specs.iter().any(|s| s.parsable) {
        ValidityStatus::UnparsableSpec
    } else {
        ValidityStatus::Valid
    };
    Ok(NodePackage {
        id,
        root,
        manifest,
        files,
        weekly_downloads: None,
        validity,
        nodes,
        specs,
        diagnostics,
        _extracted: extracted,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocStats {
    pub total_loc: u64,
    pub per_extension: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Diagnostic>,
}

/// Lines containing at least one non-whitespace character.
pub fn non_empty_lines(bytes: &[u8]) -> u64 {
    bytes.split(|&b| b == b'\n').filter(|l| l.iter().any(|b| !b.is_ascii_whitespace())).count() as u64
}

pub fn count_loc(pkg: &NodePackage) -> LocStats {
    let mut stats = LocStats {
        per_extension: ["js", "ts", "html"].iter().map(|e| (e.to_string(), 0)).collect(),
        ..LocStats::default()
    };
    for f in &pkg.files {
        let Some(ext) = source_extension(&f.path) else { continue };
        let n = match pkg.read_file(&f.path) {
            Ok(bytes) => non_empty_lines(&bytes),
            Err(e) => {
                stats.warnings.push(Diagnostic::new(&f.path, 0, format!("unreadable, counted as 0: {e}")));
                0
            }
        };
        *stats.per_extension.get_mut(ext).expect("seeded") += n;
        stats.total_loc += n;
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(root: &Path, files: &[(&str, &str)]) {
        for (p, c) in files {
            let path = root.join(p);
            fs::create_dir_all(path.parent().unwrap()).unwrap();
            fs::write(path, c).unwrap();
        }
    }

    const MANIFEST_OK: &str = r#"{"name":"node-red-contrib-x","version":"1.0.0","node-red":{"nodes":{"x":"x.js"}}}"#;

    #[test]
    fn validity_tags() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            &[
                (MANIFEST, MANIFEST_OK),
                ("x.js", "module.exports = function (RED) {};\n"),
                ("x.html", "<script>RED.nodes.registerType('x', {inputs:1, outputs:1})</script>"),
            ],
        );
        let pkg = load_package(dir.path()).unwrap();
        assert_eq!(pkg.validity, ValidityStatus::Valid);
        assert_eq!(pkg.id.to_string(), "node-red-contrib-x@1.0.0");
        assert_eq!(pkg.files.len(), 3);

        let theme = tempfile::tempdir().unwrap();
        write(theme.path(), &[(MANIFEST, r#"{"name":"node-red-contrib-theme","version":"0.1.0"}"#)]);
        assert_eq!(load_package(theme.path()).unwrap().validity, ValidityStatus::NoNodes);

        let computed = tempfile::tempdir().unwrap();
        write(
            computed.path(),
            &[
                (MANIFEST, MANIFEST_OK),
                ("x.js", ""),
                ("x.html", "<script>RED.nodes.registerType('x', {inputs:1, outputs:this.n})</script>"),
            ],
        );
        assert_eq!(load_package(computed.path()).unwrap().validity, ValidityStatus::UnparsableSpec);

        let broken = tempfile::tempdir().unwrap();
        write(broken.path(), &[(MANIFEST, "{ nope")]);
        assert_eq!(load_package(broken.path()).unwrap().validity, ValidityStatus::UnparsableSpec);
    }

    #[test]
    fn load_is_idempotent_for_trees_and_tarballs() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), &[(MANIFEST, MANIFEST_OK), ("x.js", "a\n"), ("x.html", "<script></script>")]);
        assert_eq!(load_package(dir.path()).unwrap(), load_package(dir.path()).unwrap());

        let bytes = archive::tests::tarball(&[
            ("package/package.json", Some(MANIFEST_OK.as_bytes())),
            ("package/x.js", Some(b"a\n")),
            ("package/x.html", Some(b"<script>RED.nodes.registerType('x', {inputs:1,outputs:0})</script>")),
        ]);
        let a = load_package_bytes(&bytes, "x.tgz").unwrap();
        let b = load_package_bytes(&bytes, "x.tgz").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.validity, ValidityStatus::Valid);
        assert!(load_package_bytes(b"garbage", "bad.tgz").is_err());
    }

    #[test]
    fn loc_counts() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            &[
                (MANIFEST, "{}"),
                ("a.js", &"x;\n".repeat(10)),
                ("a.html", "1\n2\n3\n4\n5"),
                ("README.md", "not\ncounted\n"),
                ("node_modules/dep/index.js", "skipped\n"),
            ],
        );
        let loc = count_loc(&load_package(dir.path()).unwrap());
        assert_eq!(loc.total_loc, 15);
        assert_eq!(loc.per_extension["js"], 10);
        assert_eq!(loc.per_extension["html"], 5);
        assert_eq!(loc.per_extension["ts"], 0);

        let mixed = tempfile::tempdir().unwrap();
        write(mixed.path(), &[(MANIFEST, "{}"), ("a.js", "a\n\n  \nb\nc\n"), ("b.html", "<p>\n\t\n</p>\nx\ny\n")]);
        assert_eq!(count_loc(&load_package(mixed.path()).unwrap()).total_loc, 7);

        let md = tempfile::tempdir().unwrap();
        write(md.path(), &[("README.md", "x\n")]);
        assert_eq!(count_loc(&load_package(md.path()).unwrap()).total_loc, 0);
    }
}
