//! Per-package records, corpus reports and their JSON/CSV forms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::Catalog;
use crate::conformance::{aggregate, conformance, ConformanceResult, CorpusSummary, CountMode};
use crate::diag::Diagnostic;
use crate::package::{count_loc, LocStats, NodePackage, PackageId, ValidityStatus};
use crate::risk::{classify_flow, severity_table, summarize_risk, RiskFinding, RiskSummary, Severity, SeverityCell};
use crate::spec::NodeSpec;
use crate::taint::{analyze_package, TaintFlow};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackageRecord {
    pub package: PackageId,
    /// Where the package came from: a path, or the id as requested.
    pub origin: String,
    pub nodes: Vec<NodeSpec>,
    pub loc: LocStats,
    pub conformance: ConformanceResult,
    pub flows: Vec<TaintFlow>,
    pub findings: Vec<RiskFinding>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExcludedRecord {
    pub package: PackageId,
    pub origin: String,
    pub validity: ValidityStatus,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FailureRecord {
    pub origin: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Absent when no package could be classified.
    pub conformance: Option<CorpusSummary>,
    pub risk: RiskSummary,
    pub severity_table: Vec<SeverityCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub catalog_version: String,
    pub count_mode: CountMode,
    pub packages: Vec<PackageRecord>,
    pub excluded: Vec<ExcludedRecord>,
    pub failures: Vec<FailureRecord>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported report schema version {0}")]
    Schema(u32),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

/// Outcome of running the pipeline on one loaded package.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Analyzed(Box<PackageRecord>),
    Excluded(ExcludedRecord),
}

/// Analyze a loaded package: flows, conformance case and risk findings.
pub fn analyze(pkg: &NodePackage, origin: &str, catalog: &Catalog, mode: CountMode) -> Outcome {
    let mut diagnostics = pkg.diagnostics.clone();
    if !pkg.is_valid() {
        diagnostics.sort();
        return Outcome::Excluded(ExcludedRecord {
            package: pkg.id.clone(),
            origin: origin.to_string(),
            validity: pkg.validity,
            diagnostics,
        });
    }
    let analysis = analyze_package(pkg, catalog);
    let loc = count_loc(pkg);
    let nodes: Vec<NodeSpec> = pkg.specs.clone();
    let totals = crate::spec::spec_totals(&nodes);
    let conf = conformance(pkg.id.clone(), totals, &analysis.flows, &analysis.endpoints_syntactic, mode);
    let mut findings = Vec::with_capacity(analysis.flows.len());
    for f in &analysis.flows {
        match classify_flow(f) {
            Ok(finding) => {
                if let Some(w) = &finding.warning {
                    diagnostics.push(Diagnostic::new(&f.source.file, f.source.line, w.clone()));
                }
                findings.push(finding);
            }
            Err(e) => diagnostics.push(Diagnostic::new(&f.sink.file, f.sink.line, e.to_string())),
        }
    }
    findings.sort();
    diagnostics.extend(analysis.diagnostics);
    diagnostics.extend(loc.warnings.iter().cloned());
    diagnostics.sort();
    diagnostics.dedup();
    Outcome::Analyzed(Box::new(PackageRecord {
        package: pkg.id.clone(),
        origin: origin.to_string(),
        nodes,
        loc,
        conformance: conf,
        flows: analysis.flows,
        findings,
        diagnostics,
    }))
}

/// Summary block computed from the per-package records alone.
pub fn summarize(packages: &[PackageRecord]) -> Summary {
    let results: Vec<ConformanceResult> = packages.iter().map(|p| p.conformance.clone()).collect();
    let loc: BTreeMap<PackageId, LocStats> = packages.iter().map(|p| (p.package.clone(), p.loc.clone())).collect();
    let nodes: BTreeMap<PackageId, u64> = packages.iter().map(|p| (p.package.clone(), p.nodes.len() as u64)).collect();
    let findings: Vec<RiskFinding> = packages.iter().flat_map(|p| p.findings.iter().cloned()).collect();
    Summary {
        conformance: aggregate(&results, &loc, &nodes).ok(),
        risk: summarize_risk(&findings),
        severity_table: severity_table(),
    }
}

impl Report {
    pub fn new(
        catalog_version: &str,
        count_mode: CountMode,
        mut packages: Vec<PackageRecord>,
        mut excluded: Vec<ExcludedRecord>,
        mut failures: Vec<FailureRecord>,
    ) -> Report {
        packages.sort_by(|a, b| a.package.cmp(&b.package).then_with(|| a.origin.cmp(&b.origin)));
        excluded.sort();
        failures.sort();
        let summary = summarize(&packages);
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            catalog_version: catalog_version.to_string(),
            count_mode,
            packages,
            excluded,
            failures,
            summary,
        }
    }

    pub fn from_outcomes(
        catalog_version: &str,
        count_mode: CountMode,
        outcomes: Vec<Outcome>,
        failures: Vec<FailureRecord>,
    ) -> Report {
        let mut packages = Vec::new();
        let mut excluded = Vec::new();
        for o in outcomes {
            match o {
                Outcome::Analyzed(r) => packages.push(*r),
                Outcome::Excluded(e) => excluded.push(e),
            }
        }
        Report::new(catalog_version, count_mode, packages, excluded, failures)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Report, ReportError> {
        let report: Report = serde_json::from_slice(bytes)?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(ReportError::Schema(report.schema_version));
        }
        Ok(report)
    }

    /// Whether the embedded summary equals one recomputed from the records.
    pub fn summary_is_consistent(&self) -> bool {
        summarize(&self.packages) == self.summary
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("report serializes");
        out.push(b'\n');
        out
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, ReportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for p in &self.packages {
            let c = &p.conformance;
            let sev = |s: Severity| p.findings.iter().filter(|f| f.severity == s).count().to_string();
            w.write_record([
                p.package.name.clone(),
                p.package.version.clone(),
                p.nodes.len().to_string(),
                p.loc.total_loc.to_string(),
                c.s_in.to_string(),
                c.s_out.to_string(),
                c.unparsable_nodes.to_string(),
                c.d_src.to_string(),
                c.d_snk.to_string(),
                c.case.to_string(),
                c.extra_src.to_string(),
                c.extra_snk.to_string(),
                p.flows.len().to_string(),
                sev(Severity::Low),
                sev(Severity::Medium),
                sev(Severity::High),
                p.diagnostics.len().to_string(),
            ])?;
        }
        w.into_inner().map_err(|e| ReportError::Csv(e.into_error().into()))
    }

    pub fn emit(&self, format: Format) -> Result<Vec<u8>, ReportError> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }
}

pub const CSV_HEADER: [&str; 17] = [
    "name",
    "version",
    "nodes",
    "loc",
    "s_in",
    "s_out",
    "unparsable_nodes",
    "d_src",
    "d_snk",
    "case",
    "extra_src",
    "extra_snk",
    "flows",
    "low",
    "medium",
    "high",
    "diagnostics",
];
