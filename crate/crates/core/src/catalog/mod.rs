//! Source and sink catalog.
//!
//! A catalog is a TOML document with a `version` string and a list of
//! `[[entry]]` tables. Each entry describes one syntactic pattern that either
//! introduces information into a node (a source) or lets it leave the node
//! (a sink). The analyzer never hard-codes an API: everything it recognizes
//! comes from here.
//!
//! ```toml
//! version = "example"
//!
//! [[entry]]
//! id = "listener-input"
//! kind = "source"
//! callee = "node.on"
//! receiver = "node-object"
//! literal_args = { "0" = "input" }
//! source_kind = "callback-parameter"
//! seed_params = [0]
//! data_class = "input-message"
//!
//! [[entry]]
//! id = "console"
//! kind = "sink"
//! callee = "console.*"
//! taint_positions = "any"
//! sink_category = "terminal"
//! ```

mod matcher;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use matcher::{CallContext, NameContext, PathContext, Receiver, SinkMatch, SourceMatch, SyntacticContext};

/// Catalog shipped with the tool.
pub const DEFAULT_CATALOG_TOML: &str = include_str!("../../catalog/default.toml");

/// Default expression for sensitive identifier and property names.
pub const DEFAULT_SENSITIVE_NAMES: &str = "password|passwd|secret|token|api[_-]?key|credential|private[_-]?key";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndpointKind {
    Source,
    Sink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    CallbackParameter,
    ReturnValue,
    PropertyRead,
    NamePattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SinkCategory {
    OtherNode,
    Terminal,
    Dashboard,
    Log,
    File,
    ExternalServer,
    Framework,
    Hardware,
}

impl SinkCategory {
    pub const ALL: [SinkCategory; 8] = [
        SinkCategory::OtherNode,
        SinkCategory::Terminal,
        SinkCategory::Dashboard,
        SinkCategory::Log,
        SinkCategory::File,
        SinkCategory::ExternalServer,
        SinkCategory::Framework,
        SinkCategory::Hardware,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SinkCategory::OtherNode => "other-node",
            SinkCategory::Terminal => "terminal",
            SinkCategory::Dashboard => "dashboard",
            SinkCategory::Log => "log",
            SinkCategory::File => "file",
            SinkCategory::ExternalServer => "external-server",
            SinkCategory::Framework => "framework",
            SinkCategory::Hardware => "hardware",
        }
    }
}

impl fmt::Display for SinkCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Kind of information a flow carries, derived from its source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataClass {
    SensitiveInformation,
    ErrorMessage,
    InputMessage,
    Misc,
}

impl DataClass {
    pub const ALL: [DataClass; 4] =
        [DataClass::SensitiveInformation, DataClass::ErrorMessage, DataClass::InputMessage, DataClass::Misc];

    pub fn as_str(self) -> &'static str {
        match self {
            DataClass::SensitiveInformation => "sensitive-information",
            DataClass::ErrorMessage => "error-message",
            DataClass::InputMessage => "input-message",
            DataClass::Misc => "misc",
        }
    }
}

impl fmt::Display for DataClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the receiver at the root of a callee path must resolve.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ReceiverRole {
    /// The node instance: `this` inside a registered constructor, names
    /// bound to it, and the conventional name `node`.
    NodeObject,
    /// The runtime API object handed to the module (`RED`).
    FrameworkObject,
    /// A value obtained from `require(<module>)` or an import of it.
    RequiredModule(String),
    Any,
}

impl FromStr for ReceiverRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "node-object" => Ok(ReceiverRole::NodeObject),
            "framework-object" => Ok(ReceiverRole::FrameworkObject),
            "any" => Ok(ReceiverRole::Any),
            _ => match s.strip_prefix("required-module:") {
                Some(m) if !m.is_empty() => Ok(ReceiverRole::RequiredModule(m.to_string())),
                _ => Err(format!("unknown receiver role `{s}`")),
            },
        }
    }
}

impl fmt::Display for ReceiverRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReceiverRole::NodeObject => f.write_str("node-object"),
            ReceiverRole::FrameworkObject => f.write_str("framework-object"),
            ReceiverRole::RequiredModule(m) => write!(f, "required-module:{m}"),
            ReceiverRole::Any => f.write_str("any"),
        }
    }
}

/// Dotted callee path; a `*` segment matches any single segment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CalleePath(Vec<String>);

impl CalleePath {
    pub fn segments(&self) -> &[String] {
        &self.0
    }

    /// Whole-path match, segment by segment.
    pub fn matches(pattern: &[String], actual: &[String]) -> bool {
        pattern.len() == actual.len() && Self::matches_prefix(pattern, actual)
    }

    /// `pattern` matches the leading segments of `actual`.
    pub fn matches_prefix(pattern: &[String], actual: &[String]) -> bool {
        pattern.len() <= actual.len() && pattern.iter().zip(actual).all(|(p, a)| p == "*" || p == a)
    }
}

impl FromStr for CalleePath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Err("callee path is empty".into());
        }
        let segs: Vec<String> = s.split('.').map(str::to_string).collect();
        for seg in &segs {
            if seg.is_empty() {
                return Err(format!("callee path `{s}` has an empty segment"));
            }
            if seg.contains('*') && seg != "*" {
                return Err(format!("wildcard in `{s}` must cover a whole segment"));
            }
        }
        Ok(CalleePath(segs))
    }
}

impl fmt::Display for CalleePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchPattern {
    pub callee_path: CalleePath,
    pub receiver_role: Option<ReceiverRole>,
    pub literal_arg_constraints: BTreeMap<usize, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaintPositions {
    Any(AnyMarker),
    Indices(BTreeSet<usize>),
}

impl TaintPositions {
    pub fn any() -> Self {
        TaintPositions::Any(AnyMarker::Any)
    }

    pub fn includes(&self, index: usize) -> bool {
        match self {
            TaintPositions::Any(_) => true,
            TaintPositions::Indices(ix) => ix.contains(&index),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnyMarker {
    Any,
}

/// Where a name-pattern entry looks for names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NameScope {
    /// Declared variables and parameters, and property reads.
    #[default]
    Any,
    Binding,
    Property,
    CatchParameter,
    CallbackParameter,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: String,
    pub kind: EndpointKind,
    pub pattern: MatchPattern,
    pub source_kind: Option<SourceKind>,
    pub taint_positions: Option<TaintPositions>,
    pub sink_category: Option<SinkCategory>,
    pub data_class_hint: Option<DataClass>,
    /// Callback parameters seeded by a callback-parameter source.
    pub seed_params: Vec<usize>,
    pub name_regex: Option<Regex>,
    pub name_scope: NameScope,
    pub description: String,
}

impl CatalogEntry {
    pub fn is_source(&self) -> bool {
        self.kind == EndpointKind::Source
    }
}

#[derive(Debug, Clone)]
pub struct Catalog {
    pub version: String,
    pub entries: Vec<CatalogEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryDiagnostic {
    /// Zero-based position of the entry in the file.
    pub index: usize,
    pub id: Option<String>,
    pub message: String,
}

impl fmt::Display for EntryDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.id {
            Some(id) => write!(f, "entry {} (`{id}`): {}", self.index, self.message),
            None => write!(f, "entry {}: {}", self.index, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read catalog {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("catalog is not valid TOML: {0}")]
    Syntax(String),
    #[error("catalog schema violation: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Schema(Vec<EntryDiagnostic>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    version: String,
    #[serde(default, rename = "entry")]
    entries: Vec<RawEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    id: Option<String>,
    kind: Option<EndpointKind>,
    callee: Option<String>,
    receiver: Option<String>,
    #[serde(default)]
    literal_args: BTreeMap<String, String>,
    source_kind: Option<SourceKind>,
    taint_positions: Option<TaintPositions>,
    sink_category: Option<SinkCategory>,
    data_class: Option<DataClass>,
    seed_params: Option<Vec<usize>>,
    name_regex: Option<String>,
    name_scope: Option<NameScope>,
    #[serde(default)]
    description: String,
}

/// Read and validate a catalog file.
pub fn load_catalog(path: &Path) -> Result<Catalog, CatalogError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CatalogError::Io { path: path.display().to_string(), source })?;
    Catalog::from_toml(&text)
}

impl Catalog {
    /// The catalog shipped with the tool.
    pub fn builtin() -> Catalog {
        Catalog::from_toml(DEFAULT_CATALOG_TOML).expect("built-in catalog is valid")
    }

    pub fn from_toml(text: &str) -> Result<Catalog, CatalogError> {
        let raw: RawCatalog = toml::from_str(text).map_err(|e| CatalogError::Syntax(e.to_string()))?;
        let mut diags = Vec::new();
        if raw.entries.is_empty() {
            diags.push(EntryDiagnostic { index: 0, id: None, message: "catalog has no entries".into() });
        }
        let mut seen = HashSet::new();
        let mut entries = Vec::new();
        for (index, e) in raw.entries.into_iter().enumerate() {
            let id = e.id.clone();
            let mut fail = |message: String| diags.push(EntryDiagnostic { index, id: id.clone(), message });
            match validate_entry(e) {
                Ok(entry) => {
                    if !seen.insert(entry.id.clone()) {
                        fail(format!("duplicate id `{}`", entry.id));
                    } else {
                        entries.push(entry);
                    }
                }
                Err(msgs) => msgs.into_iter().for_each(&mut fail),
            }
        }
        if !diags.is_empty() {
            return Err(CatalogError::Schema(diags));
        }
        Ok(Catalog { version: raw.version, entries })
    }

    pub fn entry(&self, id: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn sources(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(|e| e.kind == EndpointKind::Source)
    }

    pub fn sinks(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(|e| e.kind == EndpointKind::Sink)
    }

    /// Every sink category any entry can produce.
    pub fn sink_categories(&self) -> BTreeSet<SinkCategory> {
        self.sinks().filter_map(|e| e.sink_category).collect()
    }

    /// Every data class any source entry can produce; sources without a
    /// hint produce `misc`.
    pub fn data_classes(&self) -> BTreeSet<DataClass> {
        self.sources().map(|e| e.data_class_hint.unwrap_or(DataClass::Misc)).collect()
    }
}

fn validate_entry(e: RawEntry) -> Result<CatalogEntry, Vec<String>> {
    let mut errs = Vec::new();
    let id = e.id.unwrap_or_default();
    if id.trim().is_empty() {
        errs.push("missing `id`".to_string());
    }
    let Some(kind) = e.kind else {
        errs.push("missing `kind` (source or sink)".to_string());
        return Err(errs);
    };
    let callee_path = match e.callee.as_deref().unwrap_or("").parse::<CalleePath>() {
        Ok(p) => Some(p),
        Err(m) => {
            errs.push(m);
            None
        }
    };
    let receiver_role = match e.receiver.as_deref().map(str::parse::<ReceiverRole>) {
        None => None,
        Some(Ok(r)) => Some(r),
        Some(Err(m)) => {
            errs.push(m);
            None
        }
    };
    let mut literal_arg_constraints = BTreeMap::new();
    for (k, v) in e.literal_args {
        match k.parse::<usize>() {
            Ok(i) => {
                literal_arg_constraints.insert(i, v);
            }
            Err(_) => errs.push(format!("literal_args key `{k}` is not an argument index")),
        }
    }
    match kind {
        EndpointKind::Source => {
            if e.source_kind.is_none() {
                errs.push("source entry needs `source_kind`".into());
            }
            if e.taint_positions.is_some() || e.sink_category.is_some() {
                errs.push("source entry must not set `taint_positions` or `sink_category`".into());
            }
        }
        EndpointKind::Sink => {
            if e.taint_positions.is_none() {
                errs.push("sink entry needs `taint_positions`".into());
            }
            if e.sink_category.is_none() {
                errs.push("sink entry needs `sink_category`".into());
            }
            if e.source_kind.is_some() || e.data_class.is_some() {
                errs.push("sink entry must not set `source_kind` or `data_class`".into());
            }
        }
    }
    let is_name_pattern = e.source_kind == Some(SourceKind::NamePattern);
    let name_regex = match (&e.name_regex, is_name_pattern) {
        (Some(r), true) => match Regex::new(&format!("(?i){r}")) {
            Ok(re) => Some(re),
            Err(err) => {
                errs.push(format!("bad name_regex: {err}"));
                None
            }
        },
        (None, true) => Some(Regex::new(&format!("(?i){DEFAULT_SENSITIVE_NAMES}")).expect("default regex")),
        (Some(_), false) => {
            errs.push("`name_regex` only applies to name-pattern sources".into());
            None
        }
        (None, false) => None,
    };
    if e.name_scope.is_some() && !is_name_pattern {
        errs.push("`name_scope` only applies to name-pattern sources".into());
    }
    if e.seed_params.is_some() && e.source_kind != Some(SourceKind::CallbackParameter) {
        errs.push("`seed_params` only applies to callback-parameter sources".into());
    }
    if !errs.is_empty() {
        return Err(errs);
    }
    Ok(CatalogEntry {
        id,
        kind,
        pattern: MatchPattern {
            callee_path: callee_path.expect("checked above"),
            receiver_role,
            literal_arg_constraints,
        },
        source_kind: e.source_kind,
        taint_positions: e.taint_positions,
        sink_category: e.sink_category,
        data_class_hint: e.data_class,
        seed_params: e.seed_params.unwrap_or_else(|| vec![0]),
        name_regex,
        name_scope: e.name_scope.unwrap_or_default(),
        description: e.description,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_catalog_covers_every_category_and_source_kind() {
        let c = Catalog::builtin();
        assert!(c.entries.len() >= 30, "{} entries", c.entries.len());
        assert_eq!(c.sink_categories(), SinkCategory::ALL.into_iter().collect());
        let kinds: BTreeSet<_> = c.sources().filter_map(|e| e.source_kind).collect();
        assert_eq!(kinds.len(), 4);
        assert_eq!(c.data_classes(), DataClass::ALL.into_iter().collect());
    }

    #[test]
    fn duplicate_ids_are_rejected_by_name() {
        let text = r#"
version = "t"
[[entry]]
id = "a"
kind = "sink"
callee = "console.log"
taint_positions = "any"
sink_category = "terminal"
[[entry]]
id = "a"
kind = "sink"
callee = "console.warn"
taint_positions = [0]
sink_category = "terminal"
"#;
        let Err(CatalogError::Schema(d)) = Catalog::from_toml(text) else { panic!() };
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("duplicate id `a`"));
        assert_eq!(d[0].index, 1);
    }

    #[test]
    fn empty_catalog_is_rejected() {
        let Err(CatalogError::Schema(d)) = Catalog::from_toml("version = \"t\"\n") else { panic!() };
        assert!(d[0].message.contains("no entries"));
    }

    #[test]
    fn kind_specific_fields_are_enforced() {
        let text = r#"
version = "t"
[[entry]]
id = "s"
kind = "sink"
callee = "a.b*"
[[entry]]
id = "src"
kind = "source"
callee = "x"
source_kind = "property-read"
sink_category = "log"
"#;
        let Err(CatalogError::Schema(d)) = Catalog::from_toml(text) else { panic!() };
        let all: Vec<String> = d.iter().map(|x| x.to_string()).collect();
        assert!(all.iter().any(|m| m.contains("whole segment")), "{all:?}");
        assert!(all.iter().any(|m| m.contains("needs `taint_positions`")));
        assert!(all.iter().any(|m| m.contains("`s`") && m.contains("sink_category")));
        assert!(all.iter().any(|m| m.contains("`src`") && m.contains("must not set")));
    }

    #[test]
    fn unknown_category_is_a_syntax_error() {
        let text = "version = \"t\"\n[[entry]]\nid = \"x\"\nkind = \"sink\"\ncallee = \"a\"\ntaint_positions = \"any\"\nsink_category = \"printer\"\n";
        assert!(matches!(Catalog::from_toml(text), Err(CatalogError::Syntax(_))));
    }

    #[test]
    fn wildcard_paths() {
        let p: CalleePath = "console.*".parse().unwrap();
        assert!(CalleePath::matches(p.segments(), &["console".into(), "log".into()]));
        assert!(!CalleePath::matches(p.segments(), &["console".into()]));
        assert!("node..send".parse::<CalleePath>().is_err());
    }
}
