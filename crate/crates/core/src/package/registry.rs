//! Minimal npm registry client: metadata lookup, tarball download and
//! checksum verification.

use std::thread;
use std::time::Duration;

use base64::Engine;
use serde_json::Value;
use sha1::Sha1;
use sha2::{Digest, Sha512};
use thiserror::Error;
use ureq::tls::{RootCerts, TlsConfig};
use ureq::Agent;

use super::id::{validate_name, PackageId, PackageIdError};

pub const DEFAULT_REGISTRY: &str = "https://registry.npmjs.org";
pub const REGISTRY_ENV: &str = "HIDDENFLOW_REGISTRY";

const MAX_TARBALL: u64 = 256 * 1024 * 1024;
const MAX_METADATA: u64 = 64 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum FetchError {
    #[error(transparent)]
    InvalidId(#[from] PackageIdError),
    #[error("{name}@{version} not found in registry")]
    NotFound { name: String, version: String },
    #[error("network failure for {url}: {message}")]
    Network { url: String, message: String },
    #[error("unexpected HTTP status {status} for {url}")]
    Status { url: String, status: u16 },
    #[error("bad registry metadata for {name}: {message}")]
    Metadata { name: String, message: String },
    #[error("integrity mismatch for {url}: expected {expected}, got {actual}")]
    Integrity { url: String, expected: String, actual: String },
}

impl FetchError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, FetchError::Network { .. })
            || matches!(self, FetchError::Status { status, .. } if *status >= 500)
    }

    pub fn is_not_found(&self) -> bool {
        matches!(self, FetchError::NotFound { .. })
    }
}

#[derive(Debug, Clone)]
pub struct FetchedArchive {
    pub requested: PackageId,
    /// Same name, concrete version after dist-tag resolution.
    pub resolved: PackageId,
    pub tarball_url: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct Registry {
    base: String,
    agent: Agent,
    attempts: u32,
}

enum Get {
    Ok(Vec<u8>),
    NotFound,
}

impl Registry {
    pub fn new(base: &str) -> Self {
        let config = Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(120)))
            .tls_config(TlsConfig::builder().root_certs(RootCerts::PlatformVerifier).build())
            .build();
        Registry { base: base.trim_end_matches('/').to_string(), agent: Agent::new_with_config(config), attempts: 3 }
    }

    /// `--registry` value, else the environment override, else npmjs.
    pub fn resolve_base(flag: Option<&str>) -> String {
        flag.map(str::to_string)
            .or_else(|| std::env::var(REGISTRY_ENV).ok().filter(|v| !v.is_empty()))
            .unwrap_or_else(|| DEFAULT_REGISTRY.to_string())
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    fn get_once(&self, url: &str, limit: u64) -> Result<Get, FetchError> {
        let network = |e: ureq::Error| FetchError::Network { url: url.to_string(), message: e.to_string() };
        let mut resp = self.agent.get(url).call().map_err(network)?;
        match resp.status().as_u16() {
            200..=299 => Ok(Get::Ok(resp.body_mut().with_config().limit(limit).read_to_vec().map_err(network)?)),
            404 => Ok(Get::NotFound),
            status => Err(FetchError::Status { url: url.to_string(), status }),
        }
    }

    fn get(&self, url: &str, limit: u64) -> Result<Get, FetchError> {
        let mut attempt = 1;
        loop {
            match self.get_once(url, limit) {
                Err(e) if e.is_retryable() && attempt < self.attempts => {
                    thread::sleep(Duration::from_millis(200 * u64::from(attempt)));
                    attempt += 1;
                }
                other => return other,
            }
        }
    }

    pub fn fetch(&self, id: &PackageId) -> Result<FetchedArchive, FetchError> {
        validate_name(&id.name)?;
        let not_found = || FetchError::NotFound { name: id.name.clone(), version: id.version.clone() };
        let meta_url = format!("{}/{}", self.base, id.name.replace('/', "%2f"));
        let Get::Ok(body) = self.get(&meta_url, MAX_METADATA)? else {
            return Err(not_found());
        };
        let bad = |message: &str| FetchError::Metadata { name: id.name.clone(), message: message.to_string() };
        let meta: Value = serde_json::from_slice(&body).map_err(|e| bad(&e.to_string()))?;
        let version = match meta.pointer(&format!("/dist-tags/{}", id.version)).and_then(Value::as_str) {
            Some(v) => v.to_string(),
            None if id.version == "latest" => return Err(bad("no latest dist-tag")),
            None => id.version.clone(),
        };
        let dist =
            meta.get("versions").and_then(|v| v.get(&version)).and_then(|v| v.get("dist")).ok_or_else(not_found)?;
        let tarball_url = dist.get("tarball").and_then(Value::as_str).ok_or_else(|| bad("missing tarball URL"))?;
        let Get::Ok(bytes) = self.get(tarball_url, MAX_TARBALL)? else {
            return Err(not_found());
        };
        verify(tarball_url, &bytes, dist)?;
        Ok(FetchedArchive {
            requested: id.clone(),
            resolved: PackageId { name: id.name.clone(), version },
            tarball_url: tarball_url.to_string(),
            bytes,
        })
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn verify(url: &str, bytes: &[u8], dist: &Value) -> Result<(), FetchError> {
    let mismatch = |expected: &str, actual: String| FetchError::Integrity {
        url: url.to_string(),
        expected: expected.to_string(),
        actual,
    };
    let sri = dist
        .get("integrity")
        .and_then(Value::as_str)
        .and_then(|s| s.split_whitespace().find(|h| h.starts_with("sha512-")));
    if let Some(expected) = sri {
        let actual = format!("sha512-{}", base64::engine::general_purpose::STANDARD.encode(Sha512::digest(bytes)));
        return if actual == expected { Ok(()) } else { Err(mismatch(expected, actual)) };
    }
    if let Some(expected) = dist.get("shasum").and_then(Value::as_str) {
        let actual = hex(&Sha1::digest(bytes));
        return if actual.eq_ignore_ascii_case(expected) { Ok(()) } else { Err(mismatch(expected, actual)) };
    }
    Ok(())
}

/// Download the tarball for `id` from `registry_base`.
pub fn fetch_package(id: &PackageId, registry_base: &str) -> Result<FetchedArchive, FetchError> {
    Registry::new(registry_base).fetch(id)
}
