#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use hiddenflow::catalog::Catalog;
use hiddenflow::conformance::CountMode;
use hiddenflow::package::load_package;
use hiddenflow::report::{analyze, Outcome, PackageRecord};
use hiddenflow::taint::TaintFlow;

#[derive(Debug, Deserialize)]
pub struct Expected {
    pub case: Option<String>,
    pub d_src: Option<u32>,
    pub d_snk: Option<u32>,
    #[serde(default)]
    pub flows: Vec<String>,
    pub group: Option<String>,
    pub severity: Option<String>,
    pub excluded: Option<String>,
}

pub struct Fixture {
    pub name: String,
    pub dir: PathBuf,
    pub expected: Expected,
}

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/corpus")
}

pub fn fixtures() -> Vec<Fixture> {
    let mut out: Vec<Fixture> = std::fs::read_dir(corpus_dir())
        .expect("corpus dir")
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_dir())
        .map(|dir| {
            let text = std::fs::read_to_string(dir.join("expected.toml")).expect("expected.toml");
            Fixture {
                name: dir.file_name().unwrap().to_string_lossy().into_owned(),
                expected: toml::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", dir.display())),
                dir,
            }
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

pub fn run(f: &Fixture) -> Outcome {
    let pkg = load_package(&f.dir).unwrap_or_else(|e| panic!("{}: {e}", f.name));
    analyze(&pkg, &f.name, &Catalog::builtin(), CountMode::Flows)
}

pub fn record(f: &Fixture) -> Box<PackageRecord> {
    match run(f) {
        Outcome::Analyzed(r) => r,
        Outcome::Excluded(e) => panic!("{} excluded: {:?}", f.name, e.validity),
    }
}

pub fn flow_key(f: &TaintFlow) -> String {
    format!(
        "{}:{}:{} -> {}:{}:{}",
        f.source.file, f.source.line, f.source.entry_id, f.sink.file, f.sink.line, f.sink.entry_id
    )
}

pub fn flow_keys(flows: &[TaintFlow]) -> BTreeSet<String> {
    flows.iter().map(flow_key).collect()
}
