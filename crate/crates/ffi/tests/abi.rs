use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use hiddenflow_ffi::*;

fn fixture(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/corpus").join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = hf_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn builtin() -> *mut HfCatalog {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { hf_catalog_builtin(&mut c) }, HfStatus::Ok);
    c
}

#[test]
fn analyze_returns_the_scan_report() {
    let cat = builtin();
    let mut json = ptr::null_mut();
    let path = fixture("nr-sens-log");
    assert_eq!(unsafe { hf_analyze_package(cat, path.as_ptr(), false, &mut json) }, HfStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe {
        hf_string_free(json);
        hf_catalog_free(cat);
    }
    let report = hiddenflow::report::Report::from_json(text.as_bytes()).unwrap();
    assert_eq!(report.packages[0].conformance.case.as_str(), "convergence");
    assert_eq!(report.packages[0].flows.len(), 1);
}

#[test]
fn missing_package_is_a_package_error() {
    let cat = builtin();
    let mut json = ptr::null_mut();
    let path = CString::new("/nonexistent/package").unwrap();
    assert_eq!(unsafe { hf_analyze_package(cat, path.as_ptr(), false, &mut json) }, HfStatus::Package);
    assert!(json.is_null());
    assert!(last_error().contains("/nonexistent/package"));
    unsafe { hf_catalog_free(cat) };
}

#[test]
fn catalog_from_toml_validates() {
    let mut c = ptr::null_mut();
    let bad = CString::new("version = \"x\"\n").unwrap();
    assert_eq!(unsafe { hf_catalog_from_toml(bad.as_ptr(), &mut c) }, HfStatus::Catalog);
    assert!(c.is_null());
    assert!(last_error().contains("no entries"));

    let good = CString::new(
        "version = \"t\"\n[[entry]]\nid = \"log\"\nkind = \"sink\"\ncallee = \"console.log\"\ntaint_positions = \"any\"\nsink_category = \"terminal\"\n",
    )
    .unwrap();
    assert_eq!(unsafe { hf_catalog_from_toml(good.as_ptr(), &mut c) }, HfStatus::Ok);
    let mut n = 0;
    assert_eq!(unsafe { hf_catalog_len(c, &mut n) }, HfStatus::Ok);
    assert_eq!(n, 1);
    unsafe { hf_catalog_free(c) };
}

#[test]
fn classify_and_severity() {
    let mut case = HfCase::Convergence;
    assert_eq!(unsafe { hf_classify(1, 1, 0, 1, &mut case) }, HfStatus::Ok);
    assert_eq!(case, HfCase::Absence);

    let (d, a) = (CString::new("error-message").unwrap(), CString::new("file").unwrap());
    let (mut sev, mut extra) = (HfSeverity::Low, false);
    assert_eq!(unsafe { hf_severity(d.as_ptr(), a.as_ptr(), &mut sev, &mut extra) }, HfStatus::Ok);
    assert_eq!((sev, extra), (HfSeverity::High, true));

    let bogus = CString::new("shouting").unwrap();
    assert_eq!(
        unsafe { hf_severity(bogus.as_ptr(), a.as_ptr(), &mut sev, ptr::null_mut()) },
        HfStatus::InvalidArgument
    );
    assert!(last_error().contains("shouting"));
}

#[test]
fn invalid_utf8_is_rejected() {
    let mut c = ptr::null_mut();
    let bytes = CString::new(vec![0xffu8, 0xfe]).unwrap();
    assert_eq!(unsafe { hf_catalog_from_toml(bytes.as_ptr(), &mut c) }, HfStatus::InvalidUtf8);
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(hf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/hiddenflow.h");
    for (cc, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .status()
            .unwrap_or_else(|e| panic!("{cc}: {e}"));
        assert!(status.success(), "{cc} rejected the header");
    }
}
