//! Endpoint merging, conformance cases and corpus statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::package::{LocStats, PackageId};
use crate::spec::SpecTotals;
use crate::taint::{Endpoint, TaintFlow};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EndpointKey {
    pub file: String,
    pub line: u32,
    pub symbol: String,
}

impl From<&Endpoint> for EndpointKey {
    fn from(e: &Endpoint) -> Self {
        EndpointKey { file: e.file.clone(), line: e.line, symbol: e.symbol.clone() }
    }
}

pub type EndpointSet = BTreeSet<EndpointKey>;

/// Distinct sources and sinks among the endpoints of `flows`.
pub fn merge_endpoints(flows: &[TaintFlow]) -> (EndpointSet, EndpointSet) {
    let sources = flows.iter().map(|f| EndpointKey::from(&f.source)).collect();
    let sinks = flows.iter().map(|f| EndpointKey::from(&f.sink)).collect();
    (sources, sinks)
}

/// Distinct sources and sinks among all syntactic matches, flows or not.
pub fn merge_syntactic(endpoints: &[Endpoint]) -> (EndpointSet, EndpointSet) {
    let mut sources = EndpointSet::new();
    let mut sinks = EndpointSet::new();
    for e in endpoints {
        match e.kind {
            crate::catalog::EndpointKind::Source => sources.insert(e.into()),
            crate::catalog::EndpointKind::Sink => sinks.insert(e.into()),
        };
    }
    (sources, sinks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    Convergence,
    Divergence,
    Absence,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::Convergence, Case::Divergence, Case::Absence];

    pub fn as_str(self) -> &'static str {
        match self {
            Case::Convergence => "convergence",
            Case::Divergence => "divergence",
            Case::Absence => "absence",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify(s_in: u32, s_out: u32, d_src: u32, d_snk: u32) -> Case {
    if d_src > s_in || d_snk > s_out {
        Case::Divergence
    } else if d_src < s_in || d_snk < s_out {
        Case::Absence
    } else {
        Case::Convergence
    }
}

/// Which endpoints count towards `d_src` and `d_snk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMode {
    /// Endpoints taking part in at least one flow.
    #[default]
    Flows,
    /// Every matched endpoint.
    Syntactic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformanceResult {
    pub package: PackageId,
    pub s_in: u32,
    pub s_out: u32,
    pub unparsable_nodes: u32,
    pub d_src: u32,
    pub d_snk: u32,
    pub case: Case,
    pub extra_src: u32,
    pub extra_snk: u32,
}

impl ConformanceResult {
    pub fn new(package: PackageId, totals: SpecTotals, d_src: u32, d_snk: u32) -> Self {
        ConformanceResult {
            package,
            s_in: totals.s_in,
            s_out: totals.s_out,
            unparsable_nodes: totals.unparsable_nodes,
            d_src,
            d_snk,
            case: classify(totals.s_in, totals.s_out, d_src, d_snk),
            extra_src: d_src.saturating_sub(totals.s_in),
            extra_snk: d_snk.saturating_sub(totals.s_out),
        }
    }

    pub fn extras(&self) -> u32 {
        self.extra_src + self.extra_snk
    }
}

pub fn conformance(
    package: PackageId,
    totals: SpecTotals,
    flows: &[TaintFlow],
    endpoints: &[Endpoint],
    mode: CountMode,
) -> ConformanceResult {
    let (src, snk) = match mode {
        CountMode::Flows => merge_endpoints(flows),
        CountMode::Syntactic => merge_syntactic(endpoints),
    };
    ConformanceResult::new(package, totals, src.len() as u32, snk.len() as u32)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CaseStats {
    pub packages: u64,
    pub percent: f64,
    pub nodes: u64,
    pub node_percent: f64,
    pub mean_nodes: f64,
    pub mean_loc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub packages: u64,
    pub nodes: u64,
    pub cases: BTreeMap<Case, CaseStats>,
    /// Extra endpoints per divergent package, keyed by count.
    pub divergence_histogram: BTreeMap<u32, u64>,
    pub mean_extra_src: f64,
    pub mean_extra_snk: f64,
    pub mean_extra: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AggregateError {
    #[error("no classified packages to aggregate")]
    Empty,
}

/// Percentage rounded to one decimal place.
pub fn percent(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        return 0.0;
    }
    (part as f64 * 1000.0 / whole as f64).round() / 10.0
}

fn mean(sum: u64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        sum as f64 / n as f64
    }
}

pub fn aggregate(
    results: &[ConformanceResult],
    loc: &BTreeMap<PackageId, LocStats>,
    nodes_per_pkg: &BTreeMap<PackageId, u64>,
) -> Result<CorpusSummary, AggregateError> {
    if results.is_empty() {
        return Err(AggregateError::Empty);
    }
    let mut sorted: Vec<&ConformanceResult> = results.iter().collect();
    sorted.sort_by(|a, b| a.package.cmp(&b.package));

    let total = sorted.len() as u64;
    let total_nodes: u64 = sorted.iter().map(|r| nodes_per_pkg.get(&r.package).copied().unwrap_or(0)).sum();
    let mut cases = BTreeMap::new();
    for case in Case::ALL {
        let members: Vec<&&ConformanceResult> = sorted.iter().filter(|r| r.case == case).collect();
        let n = members.len() as u64;
        let nodes: u64 = members.iter().map(|r| nodes_per_pkg.get(&r.package).copied().unwrap_or(0)).sum();
        let with_loc: Vec<u64> = members.iter().filter_map(|r| loc.get(&r.package).map(|l| l.total_loc)).collect();
        cases.insert(
            case,
            CaseStats {
                packages: n,
                percent: percent(n, total),
                nodes,
                node_percent: percent(nodes, total_nodes),
                mean_nodes: mean(nodes, n),
                mean_loc: mean(with_loc.iter().sum(), with_loc.len() as u64),
            },
        );
    }

    let divergent: Vec<&&ConformanceResult> = sorted.iter().filter(|r| r.case == Case::Divergence).collect();
    let mut divergence_histogram = BTreeMap::new();
    for r in &divergent {
        *divergence_histogram.entry(r.extras()).or_insert(0) += 1;
    }
    let nd = divergent.len() as u64;
    let sum_src: u64 = divergent.iter().map(|r| r.extra_src as u64).sum();
    let sum_snk: u64 = divergent.iter().map(|r| r.extra_snk as u64).sum();
    Ok(CorpusSummary {
        packages: total,
        nodes: total_nodes,
        cases,
        divergence_histogram,
        mean_extra_src: mean(sum_src, nd),
        mean_extra_snk: mean(sum_snk, nd),
        mean_extra: mean(sum_src + sum_snk, nd),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{DataClass, EndpointKind};
    use proptest::prelude::*;

    fn ep(kind: EndpointKind, line: u32, symbol: &str) -> Endpoint {
        Endpoint {
            kind,
            entry_id: "e".into(),
            file: "a.js".into(),
            line,
            symbol: symbol.into(),
            data_class: None,
            sink_category: None,
        }
    }

    fn flow(src: (u32, &str), snk: (u32, &str)) -> TaintFlow {
        TaintFlow {
            source: ep(EndpointKind::Source, src.0, src.1),
            sink: ep(EndpointKind::Sink, snk.0, snk.1),
            steps: Vec::new(),
            data_class: DataClass::Misc,
        }
    }

    fn result(name: &str, case_inputs: (u32, u32, u32, u32)) -> ConformanceResult {
        let (s_in, s_out, d_src, d_snk) = case_inputs;
        ConformanceResult::new(
            PackageId::new(name, "1.0.0").unwrap(),
            SpecTotals { s_in, s_out, unparsable_nodes: 0 },
            d_src,
            d_snk,
        )
    }

    #[test]
    fn merge_examples() {
        let (s, k) = merge_endpoints(&[flow((10, "msg"), (11, "node.send")), flow((10, "msg"), (12, "console.log"))]);
        assert_eq!((s.len(), k.len()), (1, 2));
        let (s, k) = merge_endpoints(&[flow((10, "msg"), (11, "node.send")), flow((10, "msg"), (11, "node.send"))]);
        assert_eq!((s.len(), k.len()), (1, 1));
        let (s, k) = merge_endpoints(&[]);
        assert!(s.is_empty() && k.is_empty());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(1, 1, 1, 1), Case::Convergence);
        assert_eq!(classify(1, 1, 2, 1), Case::Divergence);
        assert_eq!(classify(2, 1, 1, 3), Case::Divergence);
        assert_eq!(classify(1, 2, 1, 1), Case::Absence);
    }

    #[test]
    fn extras_never_negative() {
        let r = result("p", (3, 2, 1, 5));
        assert_eq!((r.extra_src, r.extra_snk, r.case), (0, 3, Case::Divergence));
    }

    #[test]
    fn aggregate_examples() {
        let mut rs = Vec::new();
        for i in 0..4 {
            rs.push(result(&format!("c{i}"), (1, 1, 1, 1)));
        }
        for i in 0..5 {
            rs.push(result(&format!("d{i}"), (1, 1, 2, 1)));
        }
        rs.push(result("a0", (1, 1, 0, 1)));
        let s = aggregate(&rs, &BTreeMap::new(), &BTreeMap::new()).unwrap();
        assert_eq!(s.cases[&Case::Convergence].percent, 40.0);
        assert_eq!(s.cases[&Case::Divergence].percent, 50.0);
        assert_eq!(s.cases[&Case::Absence].percent, 10.0);

        let rs = vec![result("a", (1, 1, 2, 1)), result("b", (1, 1, 1, 2)), result("c", (0, 0, 1, 1))];
        let s = aggregate(&rs, &BTreeMap::new(), &BTreeMap::new()).unwrap();
        assert_eq!(s.divergence_histogram, BTreeMap::from([(1, 2), (2, 1)]));
        assert!((s.mean_extra - 4.0 / 3.0).abs() < 1e-12);

        let s = aggregate(&[result("x", (1, 0, 0, 0))], &BTreeMap::new(), &BTreeMap::new()).unwrap();
        assert_eq!(s.cases[&Case::Absence].percent, 100.0);
        assert_eq!(aggregate(&[], &BTreeMap::new(), &BTreeMap::new()), Err(AggregateError::Empty));
    }

    #[test]
    fn node_level_counts_and_means() {
        let rs = vec![result("a", (1, 1, 1, 1)), result("b", (1, 1, 2, 2))];
        let id = |n: &str| PackageId::new(n, "1.0.0").unwrap();
        let nodes = BTreeMap::from([(id("a"), 1), (id("b"), 3)]);
        let loc = BTreeMap::from([(id("a"), LocStats { total_loc: 100, ..LocStats::default() })]);
        let s = aggregate(&rs, &loc, &nodes).unwrap();
        assert_eq!(s.nodes, 4);
        assert_eq!(s.cases[&Case::Divergence].nodes, 3);
        assert_eq!(s.cases[&Case::Divergence].node_percent, 75.0);
        assert_eq!(s.cases[&Case::Convergence].mean_loc, 100.0);
        assert_eq!(s.cases[&Case::Divergence].mean_loc, 0.0);
    }

    proptest! {
        #[test]
        fn aggregate_is_consistent(inputs in prop::collection::vec((0u32..4, 0u32..4, 0u32..6, 0u32..6), 1..60)) {
            let rs: Vec<ConformanceResult> =
                inputs.iter().enumerate().map(|(i, t)| result(&format!("p{i}"), *t)).collect();
            let s = aggregate(&rs, &BTreeMap::new(), &BTreeMap::new()).unwrap();
            let counts: u64 = s.cases.values().map(|c| c.packages).sum();
            prop_assert_eq!(counts, rs.len() as u64);
            let pct: f64 = s.cases.values().map(|c| c.percent).sum();
            prop_assert!((pct - 100.0).abs() <= 0.15 + 1e-9);
            for c in s.cases.values() {
                prop_assert_eq!(c.percent, percent(c.packages, s.packages));
            }
            let bins: u64 = s.divergence_histogram.values().sum();
            prop_assert_eq!(bins, s.cases[&Case::Divergence].packages);
            let mut rev = rs.clone();
            rev.reverse();
            prop_assert_eq!(aggregate(&rev, &BTreeMap::new(), &BTreeMap::new()).unwrap(), s);
        }

        #[test]
        fn extras_match_definition(s_in in 0u32..50, s_out in 0u32..50, d_src in 0u32..50, d_snk in 0u32..50) {
            let r = result("p", (s_in, s_out, d_src, d_snk));
            prop_assert_eq!(r.extra_src, d_src.saturating_sub(s_in));
            prop_assert_eq!(r.extra_snk, d_snk.saturating_sub(s_out));
            prop_assert_eq!(r.case == Case::Divergence, r.extras() > 0);
        }
    }
}
