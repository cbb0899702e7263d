//! Severity of flows by data class and sink action.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{DataClass, SinkCategory};
use crate::conformance::{percent, EndpointKey};
use crate::taint::TaintFlow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    Low,
    Medium,
    High,
}

impl Severity {
    pub const ALL: [Severity; 3] = [Severity::Low, Severity::Medium, Severity::High];

    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Low => "low",
            Severity::Medium => "medium",
            Severity::High => "high",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

use DataClass::*;
use Severity::*;
use SinkCategory as A;

/// The assessed groups, with their descriptions.
const TABLE: &[(DataClass, SinkCategory, Severity, &str)] = &[
    (SensitiveInformation, A::Terminal, High, "Display sensitive information in terminal"),
    (SensitiveInformation, A::Dashboard, Medium, "Display sensitive information in dashboard"),
    (SensitiveInformation, A::Log, High, "Log sensitive information"),
    (SensitiveInformation, A::ExternalServer, High, "Send sensitive information to external server"),
    (SensitiveInformation, A::File, High, "Write sensitive information to file"),
    (SensitiveInformation, A::Framework, Medium, "Send sensitive information to framework"),
    (ErrorMessage, A::Log, High, "Log error message"),
    (ErrorMessage, A::Dashboard, Medium, "Display error message in dashboard"),
    (ErrorMessage, A::Terminal, High, "Display error message in terminal"),
    (InputMessage, A::OtherNode, Low, "Send input message to other node"),
    (InputMessage, A::Log, High, "Log input message"),
    (InputMessage, A::Hardware, High, "Send input message to external hardware device"),
    (InputMessage, A::Dashboard, Medium, "Display input message in dashboard"),
    (InputMessage, A::File, High, "Write input message to file"),
    (InputMessage, A::ExternalServer, High, "Send input message to external server"),
    (InputMessage, A::Terminal, High, "Display input message in terminal"),
];

pub const MISC_LOW: &str = "Misc. low severity";
pub const MISC_HIGH: &str = "Misc. high severity";

/// Number of groups including the two misc ones.
pub const GROUP_COUNT: usize = 18;

/// Severity of one cell of the data class by action grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeverityCell {
    pub data_class: DataClass,
    pub action: SinkCategory,
    pub severity: Severity,
    /// Not assessed directly; filled from the worst listed data class.
    pub extrapolated: bool,
    pub group: String,
}

fn misc_severity(action: SinkCategory) -> Severity {
    match action {
        A::OtherNode | A::Framework => Low,
        _ => High,
    }
}

fn worst_listed(action: SinkCategory) -> Severity {
    TABLE.iter().filter(|r| r.1 == action).map(|r| r.2).max().expect("every action is assessed at least once")
}

pub fn severity_cell(data_class: DataClass, action: SinkCategory) -> SeverityCell {
    if data_class == Misc {
        let severity = misc_severity(action);
        let group = if severity == Low { MISC_LOW } else { MISC_HIGH };
        return SeverityCell { data_class, action, severity, extrapolated: false, group: group.into() };
    }
    match TABLE.iter().find(|r| r.0 == data_class && r.1 == action) {
        Some(r) => SeverityCell { data_class, action, severity: r.2, extrapolated: false, group: r.3.into() },
        None => SeverityCell {
            data_class,
            action,
            severity: worst_listed(action),
            extrapolated: true,
            group: format!("{data_class} to {action}"),
        },
    }
}

/// The full grid, in data class then action order.
pub fn severity_table() -> Vec<SeverityCell> {
    DataClass::ALL.iter().flat_map(|&d| SinkCategory::ALL.iter().map(move |&a| severity_cell(d, a))).collect()
}

#[derive(Serialize)]
struct TomlTable<'a> {
    cell: &'a [SeverityCell],
}

/// The severity grid as TOML, one `[[cell]]` per pair.
pub fn severity_table_toml() -> String {
    toml::to_string(&TomlTable { cell: &severity_table() }).expect("severity table serializes")
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlowRef {
    pub source: EndpointKey,
    pub sink: EndpointKey,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RiskFinding {
    pub flow: FlowRef,
    pub data_class: DataClass,
    pub action: SinkCategory,
    pub severity: Severity,
    pub group: String,
    pub extrapolated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RiskError {
    #[error("sink `{symbol}` at {file}:{line} has no sink category")]
    UnresolvedSink { file: String, line: u32, symbol: String },
}

pub fn classify_flow(flow: &TaintFlow) -> Result<RiskFinding, RiskError> {
    let action = flow.sink.sink_category.ok_or_else(|| RiskError::UnresolvedSink {
        file: flow.sink.file.clone(),
        line: flow.sink.line,
        symbol: flow.sink.symbol.clone(),
    })?;
    let cell = severity_cell(flow.data_class, action);
    let warning = (flow.data_class == Misc).then(|| {
        format!(
            "data class of source `{}` ({}) is unresolved; classified as misc",
            flow.source.symbol, flow.source.entry_id
        )
    });
    Ok(RiskFinding {
        flow: FlowRef { source: (&flow.source).into(), sink: (&flow.sink).into() },
        data_class: flow.data_class,
        action,
        severity: cell.severity,
        group: cell.group,
        extrapolated: cell.extrapolated,
        warning,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeverityStats {
    pub count: u64,
    pub percent: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RiskSummary {
    pub flows: u64,
    pub severities: BTreeMap<Severity, SeverityStats>,
    pub groups: BTreeMap<String, u64>,
}

pub fn summarize_risk(findings: &[RiskFinding]) -> RiskSummary {
    let total = findings.len() as u64;
    let mut counts: BTreeMap<Severity, u64> = Severity::ALL.iter().map(|&s| (s, 0)).collect();
    let mut groups = BTreeMap::new();
    for f in findings {
        *counts.get_mut(&f.severity).expect("seeded") += 1;
        *groups.entry(f.group.clone()).or_insert(0) += 1;
    }
    RiskSummary {
        flows: total,
        severities: counts
            .into_iter()
            .map(|(s, c)| (s, SeverityStats { count: c, percent: percent(c, total) }))
            .collect(),
        groups,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::EndpointKind;
    use crate::taint::Endpoint;

    fn flow(data_class: DataClass, action: SinkCategory) -> TaintFlow {
        let ep = |kind, line| Endpoint {
            kind,
            entry_id: "e".into(),
            file: "a.js".into(),
            line,
            symbol: "s".into(),
            data_class: None,
            sink_category: (kind == EndpointKind::Sink).then_some(action),
        };
        TaintFlow {
            source: ep(EndpointKind::Source, 1),
            sink: ep(EndpointKind::Sink, 2),
            steps: Vec::new(),
            data_class,
        }
    }

    fn sev(d: DataClass, a: SinkCategory) -> Severity {
        classify_flow(&flow(d, a)).unwrap().severity
    }

    #[test]
    fn table_examples() {
        assert_eq!(sev(InputMessage, A::OtherNode), Low);
        assert_eq!(sev(ErrorMessage, A::Dashboard), Medium);
        assert_eq!(sev(SensitiveInformation, A::Terminal), High);
    }

    #[test]
    fn gaps_use_worst_listed_value() {
        let c = severity_cell(SensitiveInformation, A::OtherNode);
        assert_eq!((c.severity, c.extrapolated), (Low, true));
        let c = severity_cell(ErrorMessage, A::File);
        assert_eq!((c.severity, c.extrapolated), (High, true));
        let c = severity_cell(ErrorMessage, A::Framework);
        assert_eq!((c.severity, c.extrapolated), (Medium, true));
        let c = severity_cell(InputMessage, A::Framework);
        assert_eq!((c.severity, c.extrapolated), (Medium, true));
        assert!(!severity_cell(InputMessage, A::Hardware).extrapolated);
    }

    #[test]
    fn misc_flows_warn() {
        let f = classify_flow(&flow(Misc, A::Framework)).unwrap();
        assert_eq!((f.severity, f.group.as_str()), (Low, MISC_LOW));
        assert!(f.warning.is_some());
        let f = classify_flow(&flow(Misc, A::Log)).unwrap();
        assert_eq!((f.severity, f.group.as_str()), (High, MISC_HIGH));
        assert!(classify_flow(&flow(InputMessage, A::Log)).unwrap().warning.is_none());
    }

    #[test]
    fn unresolved_sink_is_an_error() {
        let mut f = flow(InputMessage, A::Log);
        f.sink.sink_category = None;
        assert!(matches!(classify_flow(&f), Err(RiskError::UnresolvedSink { .. })));
    }

    #[test]
    fn grid_is_total_and_has_eighteen_groups() {
        let table = severity_table();
        assert_eq!(table.len(), DataClass::ALL.len() * SinkCategory::ALL.len());
        let assessed: std::collections::BTreeSet<&str> =
            table.iter().filter(|c| !c.extrapolated).map(|c| c.group.as_str()).collect();
        assert_eq!(assessed.len(), GROUP_COUNT);
    }

    #[test]
    fn summary_arithmetic() {
        let fs: Vec<RiskFinding> = [
            (InputMessage, A::OtherNode),
            (InputMessage, A::OtherNode),
            (InputMessage, A::Log),
            (ErrorMessage, A::Dashboard),
        ]
        .iter()
        .map(|&(d, a)| classify_flow(&flow(d, a)).unwrap())
        .collect();
        let s = summarize_risk(&fs);
        assert_eq!(s.severities[&Low].percent, 50.0);
        assert_eq!(s.severities[&Medium].percent, 25.0);
        assert_eq!(s.severities[&High].percent, 25.0);
        assert_eq!(s.groups["Send input message to other node"], 2);

        let e = summarize_risk(&[]);
        assert_eq!(e.flows, 0);
        assert!(e.severities.values().all(|v| v.count == 0 && v.percent == 0.0));
    }

    #[test]
    fn toml_export_round_trips() {
        #[derive(Deserialize)]
        struct T {
            cell: Vec<SeverityCell>,
        }
        let text = severity_table_toml();
        let back: T = toml::from_str(&text).unwrap();
        assert_eq!(back.cell, severity_table());
    }
}
