use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PackageId {
    pub name: String,
    /// A concrete version, a dist-tag, or `latest`.
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PackageIdError {
    #[error("package name is empty")]
    EmptyName,
    #[error("invalid package name `{0}`")]
    InvalidName(String),
    #[error("invalid version `{0}`")]
    InvalidVersion(String),
}

fn valid_segment(s: &str) -> bool {
    !s.is_empty() && s != "." && s != ".." && !s.chars().any(|c| c.is_whitespace() || c == '/' || c == '\\')
}

/// Plain names are single path segments; scoped names are `@scope/name`.
pub fn validate_name(name: &str) -> Result<(), PackageIdError> {
    if name.is_empty() {
        return Err(PackageIdError::EmptyName);
    }
    let ok = match name.strip_prefix('@') {
        Some(scoped) => scoped.split_once('/').is_some_and(|(scope, rest)| valid_segment(scope) && valid_segment(rest)),
        None => valid_segment(name),
    };
    if ok {
        Ok(())
    } else {
        Err(PackageIdError::InvalidName(name.to_string()))
    }
}

impl PackageId {
    pub fn new(name: impl Into<String>, version: impl Into<String>) -> Result<Self, PackageIdError> {
        let id = PackageId { name: name.into(), version: version.into() };
        validate_name(&id.name)?;
        if !valid_segment(&id.version) {
            return Err(PackageIdError::InvalidVersion(id.version));
        }
        Ok(id)
    }

    pub fn latest(name: impl Into<String>) -> Result<Self, PackageIdError> {
        PackageId::new(name, "latest")
    }

    /// File-system friendly form, e.g. `@scope/x@1.0.0` -> `scope__x@1.0.0`.
    pub fn slug(&self) -> String {
        format!("{}@{}", self.name.trim_start_matches('@').replace('/', "__"), self.version)
    }
}

impl FromStr for PackageId {
    type Err = PackageIdError;

    /// `name` or `name@version`; a leading `@` belongs to a scope.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s[1.min(s.len())..].rfind('@').map(|p| p + 1) {
            Some(at) => PackageId::new(&s[..at], &s[at + 1..]),
            None => PackageId::latest(s),
        }
    }
}

impl fmt::Display for PackageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.name, self.version)
    }
}

/// Parse a newline-delimited id list. Blank lines and `#` comments are skipped.
pub fn parse_id_list(text: &str) -> Result<Vec<PackageId>, (usize, PackageIdError)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| l.parse().map_err(|e| (i + 1, e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_versioned_and_scoped() {
        let id: PackageId = "node-red-dashboard".parse().unwrap();
        assert_eq!((id.name.as_str(), id.version.as_str()), ("node-red-dashboard", "latest"));
        let id: PackageId = "foo@1.2.3".parse().unwrap();
        assert_eq!((id.name.as_str(), id.version.as_str()), ("foo", "1.2.3"));
        let id: PackageId = "@scope/foo@2.0.0".parse().unwrap();
        assert_eq!((id.name.as_str(), id.version.as_str()), ("@scope/foo", "2.0.0"));
        let id: PackageId = "@scope/foo".parse().unwrap();
        assert_eq!(id.version, "latest");
        assert_eq!(id.slug(), "scope__foo@latest");
    }

    #[test]
    fn rejects_bad_names() {
        assert_eq!("".parse::<PackageId>(), Err(PackageIdError::EmptyName));
        for bad in ["a b", "a/b", "..", "@scope", "@/x", "a\\b", "x@", "@s/x/y"] {
            assert!(bad.parse::<PackageId>().is_err(), "{bad}");
        }
    }

    #[test]
    fn id_list() {
        let ids = parse_id_list("# corpus\nfoo\n\nbar@1.0.0\n").unwrap();
        assert_eq!(ids.len(), 2);
        assert_eq!(parse_id_list("ok\nnot ok\n").unwrap_err().0, 2);
    }
}
