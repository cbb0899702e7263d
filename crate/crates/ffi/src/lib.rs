//! C ABI for the analyzer.
//!
//! Every fallible function returns an [`HfStatus`]. On failure a message is
//! kept per thread and can be read with [`hf_last_error`]. Strings handed out
//! by the library are released with [`hf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use thiserror::Error;

use hiddenflow::catalog::{Catalog, DataClass, SinkCategory};
use hiddenflow::conformance::{classify, Case, CountMode};
use hiddenflow::package::load_package;
use hiddenflow::report::{analyze, FailureRecord, Report};
use hiddenflow::risk::{severity_cell, Severity};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Catalog = 4,
    Package = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfCase {
    Convergence = 0,
    Divergence = 1,
    Absence = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfSeverity {
    Low = 0,
    Medium = 1,
    High = 2,
}

/// Opaque endpoint catalog.
pub struct HfCatalog {
    inner: Catalog,
}

#[derive(Debug, Error)]
enum FfiError {
    #[error("argument `{0}` is null")]
    Null(&'static str),
    #[error("argument `{0}` is not valid UTF-8")]
    Utf8(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Catalog(#[from] hiddenflow::catalog::CatalogError),
    #[error(transparent)]
    Package(#[from] hiddenflow::package::LoadError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl FfiError {
    fn status(&self) -> HfStatus {
        match self {
            FfiError::Null(_) => HfStatus::NullArgument,
            FfiError::Utf8(_) => HfStatus::InvalidUtf8,
            FfiError::Invalid(_) => HfStatus::InvalidArgument,
            FfiError::Catalog(_) => HfStatus::Catalog,
            FfiError::Package(_) => HfStatus::Package,
            FfiError::Internal(_) => HfStatus::Internal,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), FfiError>) -> HfStatus {
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(FfiError::Internal(msg))
    });
    match r {
        Ok(()) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HfStatus::Ok
        }
        Err(e) => {
            set_last_error(&e.to_string());
            e.status()
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, FfiError> {
    if p.is_null() {
        return Err(FfiError::Null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| FfiError::Utf8(name))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, FfiError> {
    p.as_mut().ok_or(FfiError::Null(name))
}

fn into_c_string(bytes: Vec<u8>) -> Result<*mut c_char, FfiError> {
    CString::new(bytes).map(CString::into_raw).map_err(|e| FfiError::Internal(e.to_string()))
}

fn parse_kebab<T: serde::de::DeserializeOwned>(s: &str, what: &str) -> Result<T, FfiError> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| FfiError::Invalid(format!("unknown {what} `{s}`")))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn hf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The built-in catalog.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hf_catalog_builtin(out: *mut *mut HfCatalog) -> HfStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(HfCatalog { inner: Catalog::builtin() }));
        Ok(())
    })
}

/// Parse a catalog from TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hf_catalog_from_toml(toml: *const c_char, out: *mut *mut HfCatalog) -> HfStatus {
    guard(|| {
        let text = str_arg(toml, "toml")?;
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(HfCatalog { inner: Catalog::from_toml(text)? }));
        Ok(())
    })
}

/// # Safety
/// `catalog` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hf_catalog_free(catalog: *mut HfCatalog) {
    if !catalog.is_null() {
        drop(Box::from_raw(catalog));
    }
}

/// Number of entries in the catalog.
///
/// # Safety
/// `catalog` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hf_catalog_len(catalog: *const HfCatalog, out: *mut usize) -> HfStatus {
    guard(|| {
        let c = catalog.as_ref().ok_or(FfiError::Null("catalog"))?;
        *out_arg(out, "out")? = c.inner.entries.len();
        Ok(())
    })
}

/// Analyze the package directory or tarball at `path` and return the JSON
/// report, the same document the `scan` command prints. A package that
/// fails to load is a [`HfStatus::Package`] error.
///
/// # Safety
/// `catalog` must be a live handle, `path` a NUL-terminated string and
/// `json_out` a valid pointer. The returned string is freed with
/// [`hf_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hf_analyze_package(
    catalog: *const HfCatalog,
    path: *const c_char,
    count_syntactic: bool,
    json_out: *mut *mut c_char,
) -> HfStatus {
    guard(|| {
        let c = &catalog.as_ref().ok_or(FfiError::Null("catalog"))?.inner;
        let path = str_arg(path, "path")?;
        let json_out = out_arg(json_out, "json_out")?;
        let mode = if count_syntactic { CountMode::Syntactic } else { CountMode::Flows };
        let pkg = load_package(Path::new(path))?;
        let outcome = analyze(&pkg, path, c, mode);
        let report = Report::from_outcomes(&c.version, mode, vec![outcome], Vec::<FailureRecord>::new());
        *json_out = into_c_string(report.to_json())?;
        Ok(())
    })
}

/// Conformance case for spec totals and detected endpoint counts.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hf_classify(s_in: u32, s_out: u32, d_src: u32, d_snk: u32, out: *mut HfCase) -> HfStatus {
    guard(|| {
        *out_arg(out, "out")? = match classify(s_in, s_out, d_src, d_snk) {
            Case::Convergence => HfCase::Convergence,
            Case::Divergence => HfCase::Divergence,
            Case::Absence => HfCase::Absence,
        };
        Ok(())
    })
}

/// Severity of a data class and sink action, both given by their report
/// names (`"input-message"`, `"other-node"`). `extrapolated` may be NULL.
///
/// # Safety
/// Strings must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hf_severity(
    data_class: *const c_char,
    action: *const c_char,
    out: *mut HfSeverity,
    extrapolated: *mut bool,
) -> HfStatus {
    guard(|| {
        let d: DataClass = parse_kebab(str_arg(data_class, "data_class")?, "data class")?;
        let a: SinkCategory = parse_kebab(str_arg(action, "action")?, "sink category")?;
        let out = out_arg(out, "out")?;
        let cell = severity_cell(d, a);
        *out = match cell.severity {
            Severity::Low => HfSeverity::Low,
            Severity::Medium => HfSeverity::Medium,
            Severity::High => HfSeverity::High,
        };
        if let Some(x) = extrapolated.as_mut() {
            *x = cell.extrapolated;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_out_pointer_is_reported() {
        let status = unsafe { hf_catalog_builtin(ptr::null_mut()) };
        assert_eq!(status, HfStatus::NullArgument);
        let msg = unsafe { CStr::from_ptr(hf_last_error()) }.to_str().unwrap();
        assert!(msg.contains("out"));
    }

    #[test]
    fn success_clears_the_last_error() {
        let mut case = HfCase::Absence;
        unsafe { hf_classify(0, 0, 0, 0, ptr::null_mut()) };
        assert!(!hf_last_error().is_null());
        assert_eq!(unsafe { hf_classify(1, 1, 2, 0, &mut case) }, HfStatus::Ok);
        assert_eq!(case, HfCase::Divergence);
        assert!(hf_last_error().is_null());
    }
}
