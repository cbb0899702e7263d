use super::{
    CalleePath, Catalog, CatalogEntry, DataClass, NameScope, ReceiverRole, SinkCategory, SourceKind, TaintPositions,
};

/// What the root identifier of a member chain resolved to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Receiver {
    Node,
    Framework,
    /// A module value. `prefix` holds the member path already applied to the
    /// module by the binding, e.g. `["Gpio"]` for `require("onoff").Gpio`;
    /// it is empty for instances created from the module.
    Module {
        name: String,
        prefix: Vec<String>,
    },
    /// An identifier with no declaration in the file.
    Global,
    /// Anything else: locals, parameters, computed values.
    Local,
}

/// A call as written: `node.context().set("k", v)` has path
/// `["node", "context()", "set"]`.
#[derive(Debug, Clone, Copy)]
pub struct CallContext<'a> {
    pub path: &'a [String],
    pub receiver: &'a Receiver,
    /// String-literal value of each argument, when it is one.
    pub literal_args: &'a [Option<String>],
}

/// A property read as written, e.g. `["this", "credentials", "password"]`.
#[derive(Debug, Clone, Copy)]
pub struct PathContext<'a> {
    pub path: &'a [String],
    pub receiver: &'a Receiver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameContext<'a> {
    /// A declared variable or parameter.
    Binding(&'a str),
    CatchParameter(&'a str),
    /// A parameter of a function passed as an argument.
    CallbackParameter(&'a str),
}

#[derive(Debug, Clone, Copy)]
pub enum SyntacticContext<'a> {
    Call(CallContext<'a>),
    PropertyRead(PathContext<'a>),
    Name(NameContext<'a>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceMatch {
    pub entry_id: String,
    pub source_kind: SourceKind,
    /// Callback parameters to seed, for callback-parameter entries.
    pub seed_params: Vec<usize>,
    pub data_class: Option<DataClass>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinkMatch {
    pub entry_id: String,
    pub taint_positions: TaintPositions,
    pub sink_category: SinkCategory,
}

fn path_matches(entry: &CatalogEntry, path: &[String], receiver: &Receiver, prefix_ok: bool) -> bool {
    let segs = entry.pattern.callee_path.segments();
    let cmp = |p: &[String], a: &[String]| {
        if prefix_ok {
            CalleePath::matches_prefix(p, a)
        } else {
            CalleePath::matches(p, a)
        }
    };
    if path.is_empty() {
        return false;
    }
    match &entry.pattern.receiver_role {
        None => cmp(segs, path),
        Some(ReceiverRole::Any) => cmp(&segs[1..], &path[1..]),
        Some(ReceiverRole::NodeObject) => *receiver == Receiver::Node && cmp(&segs[1..], &path[1..]),
        Some(ReceiverRole::FrameworkObject) => *receiver == Receiver::Framework && cmp(&segs[1..], &path[1..]),
        Some(ReceiverRole::RequiredModule(m)) => match receiver {
            Receiver::Module { name, prefix } if name == m => {
                let effective: Vec<String> = prefix.iter().chain(&path[1..]).cloned().collect();
                cmp(&segs[1..], &effective)
            }
            _ => false,
        },
    }
}

fn literals_match(entry: &CatalogEntry, literal_args: &[Option<String>]) -> bool {
    entry
        .pattern
        .literal_arg_constraints
        .iter()
        .all(|(i, want)| literal_args.get(*i).and_then(|a| a.as_deref()) == Some(want.as_str()))
}

fn name_matches(entry: &CatalogEntry, name: &str) -> bool {
    entry.name_regex.as_ref().is_some_and(|re| re.is_match(name))
}

impl Catalog {
    /// First source entry (in catalog order) matching `ctx`.
    pub fn match_source(&self, ctx: &SyntacticContext<'_>) -> Option<SourceMatch> {
        self.sources().find(|e| source_applies(e, ctx)).map(|e| SourceMatch {
            entry_id: e.id.clone(),
            source_kind: e.source_kind.expect("validated source"),
            seed_params: e.seed_params.clone(),
            data_class: e.data_class_hint,
        })
    }

    /// First sink entry (in catalog order) matching the call.
    pub fn match_sink(&self, call: &CallContext<'_>) -> Option<SinkMatch> {
        self.sink_matches(call).into_iter().next()
    }

    /// Every source entry matching `ctx`, in catalog order.
    pub fn source_matches(&self, ctx: &SyntacticContext<'_>) -> Vec<SourceMatch> {
        self.sources()
            .filter(|e| source_applies(e, ctx))
            .map(|e| SourceMatch {
                entry_id: e.id.clone(),
                source_kind: e.source_kind.expect("validated source"),
                seed_params: e.seed_params.clone(),
                data_class: e.data_class_hint,
            })
            .collect()
    }

    /// Every sink entry matching the call, in catalog order.
    pub fn sink_matches(&self, call: &CallContext<'_>) -> Vec<SinkMatch> {
        self.sinks()
            .filter(|e| path_matches(e, call.path, call.receiver, false) && literals_match(e, call.literal_args))
            .map(|e| SinkMatch {
                entry_id: e.id.clone(),
                taint_positions: e.taint_positions.clone().expect("validated sink"),
                sink_category: e.sink_category.expect("validated sink"),
            })
            .collect()
    }
}

fn source_applies(e: &CatalogEntry, ctx: &SyntacticContext<'_>) -> bool {
    match (e.source_kind, ctx) {
        (Some(SourceKind::CallbackParameter | SourceKind::ReturnValue), SyntacticContext::Call(c)) => {
            path_matches(e, c.path, c.receiver, false) && literals_match(e, c.literal_args)
        }
        (Some(SourceKind::PropertyRead), SyntacticContext::PropertyRead(p)) => {
            path_matches(e, p.path, p.receiver, true)
        }
        (Some(SourceKind::NamePattern), SyntacticContext::PropertyRead(p)) => {
            matches!(e.name_scope, NameScope::Any | NameScope::Property)
                && p.path.len() > 1
                && name_matches(e, &p.path[p.path.len() - 1])
        }
        (Some(SourceKind::NamePattern), SyntacticContext::Name(n)) => {
            let (name, scope_ok) = match n {
                NameContext::Binding(s) => (s, matches!(e.name_scope, NameScope::Any | NameScope::Binding)),
                NameContext::CatchParameter(s) => {
                    (s, matches!(e.name_scope, NameScope::Any | NameScope::Binding | NameScope::CatchParameter))
                }
                NameContext::CallbackParameter(s) => {
                    (s, matches!(e.name_scope, NameScope::Any | NameScope::Binding | NameScope::CallbackParameter))
                }
            };
            scope_ok && name_matches(e, name)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(s: &str) -> Vec<String> {
        s.split('.').map(str::to_string).collect()
    }

    #[test]
    fn input_listener_seeds_first_parameter() {
        let c = Catalog::builtin();
        let p = path("node.on");
        let lits = vec![Some("input".to_string()), None];
        let ctx = SyntacticContext::Call(CallContext { path: &p, receiver: &Receiver::Node, literal_args: &lits });
        let m = c.match_source(&ctx).expect("listener matches");
        assert_eq!(m.entry_id, "listener-input");
        assert_eq!(m.seed_params, vec![0]);
        assert_eq!(m.data_class, Some(DataClass::InputMessage));

        let close = vec![Some("close".to_string()), None];
        let ctx = SyntacticContext::Call(CallContext { path: &p, receiver: &Receiver::Node, literal_args: &close });
        assert!(c.match_source(&ctx).is_none());
    }

    #[test]
    fn credentials_read_is_sensitive() {
        let c = Catalog::builtin();
        let p = path("node.credentials.password");
        let m = c
            .match_source(&SyntacticContext::PropertyRead(PathContext { path: &p, receiver: &Receiver::Node }))
            .unwrap();
        assert_eq!(m.entry_id, "credentials-read");
        assert_eq!(m.data_class, Some(DataClass::SensitiveInformation));
    }

    #[test]
    fn name_pattern_is_case_insensitive_and_misses_plain_names() {
        let c = Catalog::builtin();
        assert!(c.match_source(&SyntacticContext::Name(NameContext::Binding("counter"))).is_none());
        let m = c.match_source(&SyntacticContext::Name(NameContext::Binding("ApiKey"))).unwrap();
        assert_eq!(m.entry_id, "sensitive-name");
        let m = c.match_source(&SyntacticContext::Name(NameContext::CallbackParameter("err"))).unwrap();
        assert_eq!(m.data_class, Some(DataClass::ErrorMessage));
        // `err` outside callback position is an ordinary name.
        assert!(c.match_source(&SyntacticContext::Name(NameContext::Binding("err"))).is_none());
    }

    #[test]
    fn sinks_by_receiver_role() {
        let c = Catalog::builtin();
        let none: Vec<Option<String>> = vec![None, None];
        let send = path("node.send");
        let m = c.match_sink(&CallContext { path: &send, receiver: &Receiver::Node, literal_args: &none }).unwrap();
        assert_eq!((m.entry_id.as_str(), m.sink_category), ("node-send", SinkCategory::OtherNode));
        // `node.send` on something that is not the node object is not a send.
        let other = c.match_sink(&CallContext { path: &send, receiver: &Receiver::Local, literal_args: &none });
        assert_ne!(other.map(|m| m.entry_id).as_deref(), Some("node-send"));

        let log = path("console.log");
        let m = c.match_sink(&CallContext { path: &log, receiver: &Receiver::Global, literal_args: &none }).unwrap();
        assert_eq!(m.sink_category, SinkCategory::Terminal);
        assert_eq!(m.taint_positions, TaintPositions::any());

        let fs_mod = Receiver::Module { name: "fs".into(), prefix: vec![] };
        let read = path("fs.readFileSync");
        assert!(c.match_sink(&CallContext { path: &read, receiver: &fs_mod, literal_args: &none }).is_none());
        let write = path("files.writeFileSync");
        let m = c.match_sink(&CallContext { path: &write, receiver: &fs_mod, literal_args: &none }).unwrap();
        assert_eq!(m.sink_category, SinkCategory::File);
        assert!(m.taint_positions.includes(1) && !m.taint_positions.includes(0));

        // Destructured `const { writeFile } = require("fs")`.
        let destructured = Receiver::Module { name: "fs".into(), prefix: vec!["writeFile".into()] };
        let bare = path("writeFile");
        let m = c.match_sink(&CallContext { path: &bare, receiver: &destructured, literal_args: &none }).unwrap();
        assert_eq!(m.entry_id, "fs-write-file");
    }
}
