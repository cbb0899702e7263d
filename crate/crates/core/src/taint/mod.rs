//! Taint propagation from catalog sources to catalog sinks.

mod engine;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, DataClass, EndpointKind, SinkCategory};
use crate::diag::Diagnostic;
use crate::js::{self, SyntaxTree};
use crate::package::{source_extension, NodePackage, PackageId};
use crate::spec::html::script_regions;

pub use engine::{MAX_CALL_DEPTH, MAX_ROUNDS};

/// Propagation rule justifying one trace step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Source,
    Assign,
    Operand,
    Member,
    Container,
    Literal,
    Argument,
    Return,
    PassThrough,
    Callback,
    Sink,
    /// Root of a function summary; never appears in reported traces.
    Param,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Source => "source",
            Rule::Assign => "assign",
            Rule::Operand => "operand",
            Rule::Member => "member",
            Rule::Container => "container",
            Rule::Literal => "literal",
            Rule::Argument => "argument",
            Rule::Return => "return",
            Rule::PassThrough => "pass-through",
            Rule::Callback => "callback",
            Rule::Sink => "sink",
            Rule::Param => "param",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Endpoint {
    pub kind: EndpointKind,
    pub entry_id: String,
    pub file: String,
    pub line: u32,
    pub symbol: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_class: Option<DataClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sink_category: Option<SinkCategory>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TraceStep {
    pub file: String,
    pub line: u32,
    pub rule: Rule,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TaintFlow {
    pub source: Endpoint,
    pub sink: Endpoint,
    pub steps: Vec<TraceStep>,
    pub data_class: DataClass,
}

/// Endpoints, flows and warnings of one file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileAnalysis {
    pub endpoints: Vec<Endpoint>,
    pub flows: Vec<TaintFlow>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub package: PackageId,
    pub flows: Vec<TaintFlow>,
    pub endpoints_syntactic: Vec<Endpoint>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn analyze_file(tree: &SyntaxTree, catalog: &Catalog) -> FileAnalysis {
    let file = tree.file.as_str();
    let mut eng = engine::Engine::new(catalog);
    eng.run(&tree.body);

    let sources: Vec<Endpoint> = eng
        .sources
        .iter()
        .map(|s| Endpoint {
            kind: EndpointKind::Source,
            entry_id: s.entry_id.clone(),
            file: file.to_string(),
            line: s.line,
            symbol: s.symbol.clone(),
            data_class: s.data_class,
            sink_category: None,
        })
        .collect();
    let sinks: Vec<Endpoint> = eng
        .sinks
        .iter()
        .map(|s| Endpoint {
            kind: EndpointKind::Sink,
            entry_id: s.entry_id.clone(),
            file: file.to_string(),
            line: s.line,
            symbol: s.symbol.clone(),
            data_class: None,
            sink_category: Some(s.category),
        })
        .collect();

    let mut flows: Vec<TaintFlow> = eng
        .flows
        .iter()
        .map(|(&(src, snk), trace)| {
            let source = sources[src as usize].clone();
            let steps = trace
                .chain()
                .into_iter()
                .map(|s| TraceStep {
                    file: file.to_string(),
                    line: s.line,
                    rule: s.rule,
                    description: s.text.to_string(),
                })
                .collect();
            TaintFlow {
                data_class: source.data_class.unwrap_or(DataClass::Misc),
                source,
                sink: sinks[snk as usize].clone(),
                steps,
            }
        })
        .collect();
    flows.sort();

    let mut endpoints: Vec<Endpoint> = sources.into_iter().chain(sinks).collect();
    endpoints.sort();

    let mut diagnostics: Vec<Diagnostic> = tree
        .parse_errors
        .iter()
        .map(|(line, msg)| Diagnostic::new(file, *line, format!("parse error: {msg}")))
        .collect();
    diagnostics.extend(eng.warnings.iter().map(|(line, msg)| Diagnostic::new(file, *line, msg.clone())));
    diagnostics.sort();
    diagnostics.dedup();
    FileAnalysis { endpoints, flows, diagnostics }
}

/// Parse one package file by extension. HTML files contribute all their
/// code regions as a single tree.
pub fn parse_file(rel: &str, text: &str) -> Option<SyntaxTree> {
    match source_extension(rel)? {
        "js" => Some(js::parse_js(text, rel)),
        "ts" => Some(js::parse_ts(text, rel)),
        _ => {
            let (regions, unclosed) = script_regions(text);
            let mut tree = SyntaxTree { file: rel.to_string(), body: Vec::new(), parse_errors: Vec::new() };
            for r in regions.iter().filter(|r| r.is_code()) {
                let part = js::parser::parse_source(&r.text, rel, r.first_line, false);
                tree.body.extend(part.body);
                tree.parse_errors.extend(part.parse_errors);
            }
            for u in unclosed {
                tree.parse_errors.push((u.line, "unclosed script element".into()));
            }
            Some(tree)
        }
    }
}

pub fn analyze_package(pkg: &NodePackage, catalog: &Catalog) -> AnalysisResult {
    let files: Vec<&str> = pkg.source_files().map(|f| f.path.as_str()).collect();
    let per_file: Vec<FileAnalysis> = files
        .par_iter()
        .map(|rel| match pkg.read_file(rel) {
            Ok(bytes) => {
                let text = String::from_utf8_lossy(&bytes);
                match parse_file(rel, &text) {
                    Some(tree) => analyze_file(&tree, catalog),
                    None => FileAnalysis::default(),
                }
            }
            Err(e) => FileAnalysis {
                diagnostics: vec![Diagnostic::new(*rel, 0, format!("cannot read file: {e}"))],
                ..FileAnalysis::default()
            },
        })
        .collect();

    let mut result = AnalysisResult {
        package: pkg.id.clone(),
        flows: Vec::new(),
        endpoints_syntactic: Vec::new(),
        diagnostics: Vec::new(),
    };
    for fa in per_file {
        result.flows.extend(fa.flows);
        result.endpoints_syntactic.extend(fa.endpoints);
        result.diagnostics.extend(fa.diagnostics);
    }
    result.flows.sort();
    result.endpoints_syntactic.sort();
    result.diagnostics.sort();
    result
}

#[cfg(test)]
mod tests;
