mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use hiddenflow::catalog::Catalog;
use hiddenflow::conformance::CountMode;
use hiddenflow::package::{load_package, NodePackage};
use hiddenflow::taint::analyze_package;

fn packages() -> Vec<NodePackage> {
    common::fixtures().iter().filter(|f| f.expected.excluded.is_none()).map(|f| load_package(&f.dir).unwrap()).collect()
}

fn line_pairs(pkgs: &[NodePackage], catalog: &Catalog) -> BTreeSet<(String, String, u32, String, u32)> {
    pkgs.iter()
        .flat_map(|p| {
            analyze_package(p, catalog)
                .flows
                .into_iter()
                .map(move |f| (p.id.name.clone(), f.source.file, f.source.line, f.sink.file, f.sink.line))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adding_catalog_entries_never_removes_flows(mask in prop::collection::vec(any::<bool>(), 64)) {
        let full = Catalog::builtin();
        let mut subset = full.clone();
        let mut i = 0;
        subset.entries.retain(|_| { i += 1; mask[(i - 1) % mask.len()] });
        let pkgs = packages();
        let small = line_pairs(&pkgs, &subset);
        let big = line_pairs(&pkgs, &full);
        prop_assert!(small.is_subset(&big), "{:?}", small.difference(&big).collect::<Vec<_>>());
    }
}

#[test]
fn analysis_is_independent_of_worker_count() {
    let pkgs = packages();
    let catalog = Catalog::builtin();
    let run = |n| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
        pool.install(|| pkgs.iter().map(|p| analyze_package(p, &catalog)).collect::<Vec<_>>())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn count_modes_agree_on_flow_free_packages() {
    let f = common::fixtures().into_iter().find(|f| f.name == "nr-quiet").unwrap();
    let pkg = load_package(&f.dir).unwrap();
    for mode in [CountMode::Flows, CountMode::Syntactic] {
        match hiddenflow::report::analyze(&pkg, "q", &Catalog::builtin(), mode) {
            hiddenflow::report::Outcome::Analyzed(r) => assert_eq!((r.conformance.d_src, r.conformance.d_snk), (0, 0)),
            _ => panic!("nr-quiet excluded"),
        }
    }
}
