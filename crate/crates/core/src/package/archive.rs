//! Sandboxed extraction of gzip tarballs.

use std::fs;
use std::io::Read;
use std::path::{Component, Path, PathBuf};

use flate2::read::GzDecoder;
use tar::{Archive, EntryType};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("corrupt archive: {0}")]
    Corrupt(#[source] std::io::Error),
    #[error("archive contains no files")]
    Empty,
    #[error("cannot write `{path}`: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Entries skipped during extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejected {
    pub entry: String,
    pub reason: &'static str,
}

fn safe_relative(path: &Path) -> Option<PathBuf> {
    let mut out = PathBuf::new();
    for c in path.components() {
        match c {
            Component::Normal(p) => out.push(p),
            Component::CurDir => {}
            Component::ParentDir | Component::RootDir | Component::Prefix(_) => return None,
        }
    }
    (!out.as_os_str().is_empty()).then_some(out)
}

/// Unpack `reader` (gzip tarball) under `dest`, dropping the single top-level
/// directory npm tarballs carry. Links and entries escaping `dest` are
/// rejected.
pub fn extract_tarball<R: Read>(reader: R, dest: &Path) -> Result<Vec<Rejected>, ArchiveError> {
    let mut archive = Archive::new(GzDecoder::new(reader));
    let mut staged: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    let mut rejected = Vec::new();
    for entry in archive.entries().map_err(ArchiveError::Corrupt)? {
        let mut entry = entry.map_err(ArchiveError::Corrupt)?;
        let raw = entry.path().map_err(ArchiveError::Corrupt)?.into_owned();
        let shown = raw.to_string_lossy().into_owned();
        match entry.header().entry_type() {
            EntryType::Regular | EntryType::Continuous => {}
            EntryType::Directory | EntryType::XGlobalHeader | EntryType::XHeader => continue,
            EntryType::Symlink | EntryType::Link => {
                rejected.push(Rejected { entry: shown, reason: "link entry" });
                continue;
            }
            _ => {
                rejected.push(Rejected { entry: shown, reason: "unsupported entry type" });
                continue;
            }
        }
        let Some(rel) = safe_relative(&raw) else {
            rejected.push(Rejected { entry: shown, reason: "path escapes the extraction root" });
            continue;
        };
        let mut data = Vec::new();
        entry.read_to_end(&mut data).map_err(ArchiveError::Corrupt)?;
        staged.push((rel, data));
    }
    if staged.is_empty() {
        return Err(ArchiveError::Empty);
    }
    let top = staged[0].0.components().next().map(|c| c.as_os_str().to_owned());
    let strip = staged
        .iter()
        .all(|(p, _)| p.components().count() > 1 && p.components().next().map(|c| c.as_os_str().to_owned()) == top);
    for (rel, data) in staged {
        let rel = if strip { rel.components().skip(1).collect::<PathBuf>() } else { rel };
        let target = dest.join(&rel);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent).map_err(|source| ArchiveError::Write { path: parent.to_path_buf(), source })?;
        }
        fs::write(&target, data).map_err(|source| ArchiveError::Write { path: target.clone(), source })?;
    }
    Ok(rejected)
}
