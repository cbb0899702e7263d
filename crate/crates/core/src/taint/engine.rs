//! Fixpoint taint propagation over one syntax tree.
//!
//! The analysis is flow-insensitive: every binding holds the union of all
//! values ever assigned to it, and the whole tree is re-walked until nothing
//! changes. Local calls are handled through per-function summaries: each
//! parameter carries a symbolic origin, and a function's return value and
//! sinks are recorded in terms of those origins so that a call site can
//! substitute its own arguments.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use crate::catalog::{CallContext, NameContext, PathContext, Receiver, SourceMatch, SyntacticContext};
use crate::catalog::{Catalog, DataClass, SinkCategory, SourceKind, TaintPositions};
use crate::js::ast::*;

use super::Rule;

pub const MAX_CALL_DEPTH: u8 = 8;
pub const MAX_ROUNDS: usize = 64;

type FuncId = u32;
type BindingId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Origin {
    Source(u32),
    Param(FuncId, u32),
}

#[derive(Debug)]
pub(crate) struct Step {
    pub line: u32,
    pub rule: Rule,
    pub text: Rc<str>,
    pub prev: Option<Rc<Step>>,
}

impl Step {
    /// Steps from the root to `self`.
    pub fn chain(self: &Rc<Step>) -> Vec<Rc<Step>> {
        let mut out = Vec::new();
        let mut cur = Some(self.clone());
        while let Some(s) = cur {
            cur = s.prev.clone();
            out.push(s);
        }
        out.reverse();
        out
    }
}

#[derive(Debug, Clone)]
struct Fact {
    trace: Rc<Step>,
    /// Number of summary applications behind this fact.
    depth: u8,
}

impl Fact {
    fn root(line: u32, rule: Rule, text: impl Into<Rc<str>>) -> Fact {
        Fact { trace: Rc::new(Step { line, rule, text: text.into(), prev: None }), depth: 0 }
    }

    fn then(&self, line: u32, rule: Rule, text: &Rc<str>) -> Fact {
        Fact {
            trace: Rc::new(Step { line, rule, text: text.clone(), prev: Some(self.trace.clone()) }),
            depth: self.depth,
        }
    }
}

type Taint = BTreeMap<Origin, Fact>;

fn extend(t: &Taint, line: u32, rule: Rule, text: impl FnOnce() -> String) -> Taint {
    if t.is_empty() {
        return Taint::new();
    }
    let text: Rc<str> = text().into();
    t.iter().map(|(o, f)| (*o, f.then(line, rule, &text))).collect()
}

fn union_into(dst: &mut Taint, src: &Taint) {
    for (o, f) in src {
        dst.entry(*o).or_insert_with(|| f.clone());
    }
}

/// Matching path of a value: how it was reached from a recognised root.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Path {
    receiver: Receiver,
    segs: Vec<String>,
}

impl Path {
    fn push(&self, seg: &str) -> Path {
        let mut segs = self.segs.clone();
        segs.push(seg.to_string());
        Path { receiver: self.receiver.clone(), segs }
    }
}

#[derive(Debug, Clone, Default)]
struct Value {
    taint: Taint,
    funcs: BTreeSet<FuncId>,
    props: BTreeMap<String, BTreeSet<FuncId>>,
    path: Option<Path>,
    /// The member chain as written, e.g. `["this", "credentials"]`.
    written: Option<Vec<String>>,
    /// Set when the value is a plain read of a binding.
    binding: Option<BindingId>,
}

impl Value {
    fn taint(taint: Taint) -> Value {
        Value { taint, ..Value::default() }
    }

    fn text(&self) -> String {
        self.written.as_ref().map_or_else(|| "expression".to_string(), |w| w.join("."))
    }
}

#[derive(Debug, Default)]
struct Binding {
    name: String,
    global: bool,
    taint: Taint,
    funcs: BTreeSet<FuncId>,
    props: BTreeMap<String, BTreeSet<FuncId>>,
    alias: Option<Path>,
    /// Another binding this one was initialised from (`var node = this`).
    link: Option<BindingId>,
}

#[derive(Debug, Clone)]
struct ParamInfo {
    bindings: Vec<BindingId>,
    rest: bool,
}

#[derive(Debug)]
struct FuncInfo {
    key: usize,
    name: String,
    params: Option<Vec<ParamInfo>>,
    returns: Taint,
    /// (parameter, sink) -> trace from the parameter to the sink.
    pending: BTreeMap<(u32, u32), Fact>,
}

#[derive(Debug)]
struct Scope {
    key: usize,
    names: HashMap<String, BindingId>,
    this: Option<BindingId>,
    func: Option<FuncId>,
}

#[derive(Debug, Clone)]
pub(crate) struct SourceRec {
    pub entry_id: String,
    pub line: u32,
    pub symbol: String,
    pub data_class: Option<DataClass>,
}

#[derive(Debug, Clone)]
pub(crate) struct SinkRec {
    pub entry_id: String,
    pub line: u32,
    pub symbol: String,
    pub category: SinkCategory,
    pub positions: TaintPositions,
}

#[derive(Default)]
struct FnCtx {
    callback: bool,
    seeds: Vec<(usize, SourceMatch)>,
    this_alias: Option<Path>,
    this_binding: Option<BindingId>,
    param0_alias: Option<Path>,
}

pub(crate) struct Engine<'a> {
    catalog: &'a Catalog,
    bindings: Vec<Binding>,
    binding_keys: HashMap<(usize, String), BindingId>,
    scopes: Vec<Scope>,
    funcs: Vec<FuncInfo>,
    func_keys: HashMap<usize, FuncId>,
    pub sources: Vec<SourceRec>,
    source_keys: HashMap<(u32, String), u32>,
    pub sinks: Vec<SinkRec>,
    sink_keys: HashMap<(u32, String), u32>,
    pub flows: BTreeMap<(u32, u32), Rc<Step>>,
    pub warnings: BTreeSet<(u32, String)>,
    changed: bool,
    /// Sources matched directly while evaluating the current initializer.
    direct: Vec<u32>,
}

const PROGRAM_KEY: usize = 0;
const GLOBAL_KEY: usize = 1;

fn ptr<T>(r: &T) -> usize {
    r as *const T as usize
}

fn literal_string(e: &Expr) -> Option<String> {
    match &e.kind {
        ExprKind::Str(s) => Some(s.clone()),
        ExprKind::Template { quasis, exprs } if exprs.is_empty() => Some(quasis.concat()),
        _ => None,
    }
}

impl<'a> Engine<'a> {
    pub fn new(catalog: &'a Catalog) -> Self {
        Engine {
            catalog,
            bindings: Vec::new(),
            binding_keys: HashMap::new(),
            scopes: Vec::new(),
            funcs: Vec::new(),
            func_keys: HashMap::new(),
            sources: Vec::new(),
            source_keys: HashMap::new(),
            sinks: Vec::new(),
            sink_keys: HashMap::new(),
            flows: BTreeMap::new(),
            warnings: BTreeSet::new(),
            changed: false,
            direct: Vec::new(),
        }
    }

    /// Walk `body` until a fixpoint. Returns false when the round cap hit.
    pub fn run(&mut self, body: &[Stmt]) -> bool {
        for _ in 0..MAX_ROUNDS {
            self.changed = false;
            self.walk_program(body);
            if !self.changed {
                return true;
            }
        }
        self.warnings.insert((0, format!("iteration limit ({MAX_ROUNDS}) reached; flows may be incomplete")));
        false
    }

    fn walk_program(&mut self, body: &[Stmt]) {
        let this = self.binding_for(PROGRAM_KEY, "this");
        self.scopes.push(Scope { key: PROGRAM_KEY, names: HashMap::new(), this: Some(this), func: None });
        self.hoist_var(body);
        self.hoist_block(body);
        self.stmts(body);
        self.scopes.clear();
    }

    // ---- bindings and scopes ------------------------------------------

    fn binding_for(&mut self, key: usize, name: &str) -> BindingId {
        if let Some(&b) = self.binding_keys.get(&(key, name.to_string())) {
            return b;
        }
        let id = self.bindings.len() as BindingId;
        self.bindings.push(Binding { name: name.to_string(), global: key == GLOBAL_KEY, ..Binding::default() });
        self.binding_keys.insert((key, name.to_string()), id);
        id
    }

    fn declare(&mut self, name: &str) -> BindingId {
        let key = self.scopes.last().expect("scope").key;
        let b = self.binding_for(key, name);
        self.scopes.last_mut().expect("scope").names.insert(name.to_string(), b);
        b
    }

    fn declare_in_function(&mut self, name: &str) -> BindingId {
        let idx = self.scopes.iter().rposition(|s| s.func.is_some() || s.key == PROGRAM_KEY).unwrap_or(0);
        let key = self.scopes[idx].key;
        let b = self.binding_for(key, name);
        self.scopes[idx].names.insert(name.to_string(), b);
        b
    }

    fn resolve(&mut self, name: &str) -> BindingId {
        for s in self.scopes.iter().rev() {
            if let Some(&b) = s.names.get(name) {
                return b;
            }
        }
        self.binding_for(GLOBAL_KEY, name)
    }

    fn this_binding(&mut self) -> BindingId {
        match self.scopes.iter().rev().find_map(|s| s.this) {
            Some(b) => b,
            None => self.binding_for(PROGRAM_KEY, "this"),
        }
    }

    fn canonical(&self, mut b: BindingId) -> BindingId {
        for _ in 0..16 {
            match self.bindings[b as usize].link {
                Some(n) if n != b => b = n,
                _ => break,
            }
        }
        b
    }

    fn func_id(&mut self, key: usize, name: Option<&str>) -> FuncId {
        if let Some(&f) = self.func_keys.get(&key) {
            return f;
        }
        let id = self.funcs.len() as FuncId;
        self.funcs.push(FuncInfo {
            key,
            name: name.unwrap_or("anonymous function").to_string(),
            params: None,
            returns: Taint::new(),
            pending: BTreeMap::new(),
        });
        self.func_keys.insert(key, id);
        id
    }

    fn current_func(&self) -> Option<FuncId> {
        self.scopes.iter().rev().find_map(|s| s.func)
    }

    // ---- monotone updates ------------------------------------------------

    fn merge_binding(&mut self, b: BindingId, t: &Taint, line: u32, rule: Rule, text: impl FnOnce() -> String) {
        let missing: Taint = {
            let have = &self.bindings[b as usize].taint;
            t.iter().filter(|(o, _)| !have.contains_key(o)).map(|(o, f)| (*o, f.clone())).collect()
        };
        if missing.is_empty() {
            return;
        }
        let stepped = extend(&missing, line, rule, text);
        self.bindings[b as usize].taint.extend(stepped);
        self.changed = true;
    }

    fn add_fact(&mut self, b: BindingId, origin: Origin, fact: Fact) {
        if let std::collections::btree_map::Entry::Vacant(v) = self.bindings[b as usize].taint.entry(origin) {
            v.insert(fact);
            self.changed = true;
        }
    }

    fn merge_funcs(&mut self, b: BindingId, funcs: &BTreeSet<FuncId>) {
        let have = &mut self.bindings[b as usize].funcs;
        let before = have.len();
        have.extend(funcs.iter().copied());
        if have.len() != before {
            self.changed = true;
        }
    }

    fn merge_props(&mut self, b: BindingId, props: &BTreeMap<String, BTreeSet<FuncId>>) {
        let b = self.canonical(b);
        for (k, fs) in props {
            let have = self.bindings[b as usize].props.entry(k.clone()).or_default();
            let before = have.len();
            have.extend(fs.iter().copied());
            if have.len() != before {
                self.changed = true;
            }
        }
    }

    fn set_alias(&mut self, b: BindingId, path: &Path) {
        let slot = &mut self.bindings[b as usize].alias;
        if slot.is_none() {
            *slot = Some(path.clone());
            self.changed = true;
        }
    }

    fn set_link(&mut self, b: BindingId, to: BindingId) {
        if b != to && self.canonical(to) != b && self.bindings[b as usize].link.is_none() {
            self.bindings[b as usize].link = Some(to);
            self.changed = true;
        }
    }

    fn add_flow(&mut self, source: u32, sink: u32, trace: Rc<Step>) {
        if let std::collections::btree_map::Entry::Vacant(v) = self.flows.entry((source, sink)) {
            v.insert(trace);
            self.changed = true;
        }
    }

    fn add_pending(&mut self, f: FuncId, param: u32, sink: u32, fact: Fact) {
        if let std::collections::btree_map::Entry::Vacant(v) = self.funcs[f as usize].pending.entry((param, sink)) {
            v.insert(fact);
            self.changed = true;
        }
    }

    fn add_returns(&mut self, t: &Taint) {
        let Some(f) = self.current_func() else { return };
        for (o, fact) in t {
            if let std::collections::btree_map::Entry::Vacant(v) = self.funcs[f as usize].returns.entry(*o) {
                v.insert(fact.clone());
                self.changed = true;
            }
        }
    }

    fn register_source(&mut self, line: u32, symbol: &str, m: &SourceMatch) -> u32 {
        let key = (line, symbol.to_string());
        if let Some(&i) = self.source_keys.get(&key) {
            return i;
        }
        let i = self.sources.len() as u32;
        self.sources.push(SourceRec {
            entry_id: m.entry_id.clone(),
            line,
            symbol: symbol.to_string(),
            data_class: m.data_class,
        });
        self.source_keys.insert(key, i);
        self.changed = true;
        i
    }

    fn source_fact(&self, idx: u32) -> Fact {
        let s = &self.sources[idx as usize];
        Fact::root(s.line, Rule::Source, format!("{} `{}`", s.entry_id, s.symbol))
    }

    fn seed_binding(&mut self, b: BindingId, line: u32, name: &str, m: &SourceMatch) {
        let idx = self.register_source(line, name, m);
        let fact = self.source_fact(idx);
        self.add_fact(b, Origin::Source(idx), fact);
    }

    // ---- hoisting ----------------------------------------------------------

    fn hoist_var(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.hoist_var_stmt(s);
        }
    }

    fn hoist_var_stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Var { kind: VarKind::Var, decls } => {
                for d in decls {
                    let mut names = Vec::new();
                    d.target.bound_names(&mut names);
                    for (n, _) in names {
                        self.declare_in_function(&n);
                    }
                }
            }
            StmtKind::If { cons, alt, .. } => {
                self.hoist_var_stmt(cons);
                if let Some(a) = alt {
                    self.hoist_var_stmt(a);
                }
            }
            StmtKind::For { init, body, .. } => {
                if let Some(i) = init {
                    self.hoist_var_stmt(i);
                }
                self.hoist_var_stmt(body);
            }
            StmtKind::ForEach { left, body, .. } => {
                if let ForTarget::Decl(VarKind::Var, p) = left {
                    let mut names = Vec::new();
                    p.bound_names(&mut names);
                    for (n, _) in names {
                        self.declare_in_function(&n);
                    }
                }
                self.hoist_var_stmt(body);
            }
            StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } | StmtKind::Labeled(body) => {
                self.hoist_var_stmt(body)
            }
            StmtKind::Try { block, handler, finalizer, .. } => {
                self.hoist_var(block);
                if let Some(h) = handler {
                    self.hoist_var(h);
                }
                if let Some(f) = finalizer {
                    self.hoist_var(f);
                }
            }
            StmtKind::Block(b) => self.hoist_var(b),
            StmtKind::Switch { cases, .. } => {
                for c in cases {
                    self.hoist_var(&c.body);
                }
            }
            _ => {}
        }
    }

    /// Declare the lexical names introduced directly in `stmts`.
    fn hoist_block(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            match &s.kind {
                StmtKind::Var { kind: VarKind::Let | VarKind::Const, decls } => {
                    for d in decls {
                        let mut names = Vec::new();
                        d.target.bound_names(&mut names);
                        for (n, _) in names {
                            self.declare(&n);
                        }
                    }
                }
                StmtKind::Function(f) => {
                    if let Some(name) = &f.name {
                        let b = self.declare(name);
                        let fid = self.func_id(Rc::as_ptr(f) as usize, Some(name));
                        self.merge_funcs(b, &BTreeSet::from([fid]));
                    }
                }
                StmtKind::Class(c) => {
                    if let Some(name) = &c.name {
                        self.declare(name);
                    }
                }
                StmtKind::Import { source, specifiers } => {
                    for spec in specifiers {
                        let (local, segs) = match spec {
                            ImportSpecifier::Default(l) | ImportSpecifier::Namespace(l) => (l, vec![source.clone()]),
                            ImportSpecifier::Named { imported, local } => {
                                (local, vec![source.clone(), imported.clone()])
                            }
                        };
                        let b = self.declare(local);
                        let path = Path { receiver: Receiver::Module { name: source.clone(), prefix: vec![] }, segs };
                        self.set_alias(b, &path);
                    }
                }
                _ => {}
            }
        }
    }

    // ---- statements --------------------------------------------------------

    fn stmts(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.stmt(s);
        }
    }

    fn scoped_block(&mut self, key: usize, stmts: &[Stmt]) {
        self.scopes.push(Scope { key, names: HashMap::new(), this: None, func: None });
        self.hoist_block(stmts);
        self.stmts(stmts);
        self.scopes.pop();
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Var { decls, .. } => {
                for d in decls {
                    let mark = self.direct.len();
                    let v = match &d.init {
                        Some(e) => self.expr(e),
                        None => Value::default(),
                    };
                    let direct_sensitive = self.direct[mark..]
                        .iter()
                        .any(|&i| self.sources[i as usize].data_class == Some(DataClass::SensitiveInformation));
                    self.direct.truncate(mark);
                    self.bind_pattern(&d.target, &v, s.line, Some(!direct_sensitive));
                }
            }
            StmtKind::Function(f) => {
                self.visit_function(f, FnCtx::default());
            }
            StmtKind::Class(c) => self.visit_class(c),
            StmtKind::Expr(e) | StmtKind::Throw(e) => {
                self.expr(e);
            }
            StmtKind::If { test, cons, alt } => {
                self.expr(test);
                self.stmt(cons);
                if let Some(a) = alt {
                    self.stmt(a);
                }
            }
            StmtKind::For { init, test, update, body } => {
                self.scopes.push(Scope { key: ptr(s), names: HashMap::new(), this: None, func: None });
                if let Some(i) = init {
                    self.hoist_block(std::slice::from_ref(i));
                    self.stmt(i);
                }
                if let Some(t) = test {
                    self.expr(t);
                }
                if let Some(u) = update {
                    self.expr(u);
                }
                self.stmt(body);
                self.scopes.pop();
            }
            StmtKind::ForEach { left, right, body } => {
                self.scopes.push(Scope { key: ptr(s), names: HashMap::new(), this: None, func: None });
                let rv = self.expr(right);
                let text = rv.text();
                let elem = Value::taint(extend(&rv.taint, s.line, Rule::Member, || format!("element of `{text}`")));
                match left {
                    ForTarget::Decl(kind, p) => {
                        if *kind != VarKind::Var {
                            let mut names = Vec::new();
                            p.bound_names(&mut names);
                            for (n, _) in names {
                                self.declare(&n);
                            }
                        }
                        self.bind_pattern(p, &elem, s.line, Some(true));
                    }
                    ForTarget::Pattern(p) => self.bind_pattern(p, &elem, s.line, None),
                }
                self.stmt(body);
                self.scopes.pop();
            }
            StmtKind::While { test, body } | StmtKind::DoWhile { body, test } => {
                self.expr(test);
                self.stmt(body);
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    let v = self.expr(e);
                    self.add_returns(&v.taint);
                }
            }
            StmtKind::Try { block, param, handler, finalizer } => {
                self.scoped_block(ptr(block), block);
                if let Some(h) = handler {
                    self.scopes.push(Scope { key: ptr(h), names: HashMap::new(), this: None, func: None });
                    if let Some(p) = param {
                        let mut names = Vec::new();
                        p.bound_names(&mut names);
                        for (n, line) in names {
                            let b = self.declare(&n);
                            let ms =
                                self.catalog.source_matches(&SyntacticContext::Name(NameContext::CatchParameter(&n)));
                            if let Some(m) = ms.first() {
                                self.seed_binding(b, line, &n, m);
                            }
                        }
                        self.bind_pattern(p, &Value::default(), s.line, None);
                    }
                    self.hoist_block(h);
                    self.stmts(h);
                    self.scopes.pop();
                }
                if let Some(f) = finalizer {
                    self.scoped_block(ptr(f), f);
                }
            }
            StmtKind::Block(b) => self.scoped_block(ptr(s), b),
            StmtKind::Switch { disc, cases } => {
                self.expr(disc);
                self.scopes.push(Scope { key: ptr(s), names: HashMap::new(), this: None, func: None });
                for c in cases {
                    self.hoist_block(&c.body);
                }
                for c in cases {
                    if let Some(t) = &c.test {
                        self.expr(t);
                    }
                    self.stmts(&c.body);
                }
                self.scopes.pop();
            }
            StmtKind::Labeled(b) => self.stmt(b),
            StmtKind::ExportDefault(e) => match &e.kind {
                ExprKind::Function(f) => {
                    self.visit_function(f, FnCtx { param0_alias: Some(framework_path()), ..FnCtx::default() });
                }
                _ => {
                    self.expr(e);
                }
            },
            StmtKind::Import { .. } | StmtKind::Break | StmtKind::Continue | StmtKind::Empty => {}
        }
    }

    // ---- functions and classes -----------------------------------------

    fn visit_function(&mut self, f: &Rc<Function>, ctx: FnCtx) -> FuncId {
        let key = Rc::as_ptr(f) as usize;
        let fid = self.func_id(key, f.name.as_deref());
        let mark = self.direct.len();
        let this =
            if f.is_arrow { None } else { Some(ctx.this_binding.unwrap_or_else(|| self.binding_for(key, "this"))) };
        if let (Some(t), Some(alias)) = (this, &ctx.this_alias) {
            self.set_alias(t, alias);
        }
        self.scopes.push(Scope { key, names: HashMap::new(), this, func: Some(fid) });
        // A named function expression can call itself by name.
        if let Some(name) = &f.name {
            if !self.scopes.iter().rev().skip(1).any(|s| s.names.contains_key(name)) {
                let b = self.declare(name);
                self.merge_funcs(b, &BTreeSet::from([fid]));
            }
        }
        let mut infos = Vec::with_capacity(f.params.len());
        for (i, p) in f.params.iter().enumerate() {
            let mut names = Vec::new();
            p.pattern.bound_names(&mut names);
            let mut ids = Vec::with_capacity(names.len());
            for (name, line) in &names {
                let b = self.declare(name);
                ids.push(b);
                let fname = self.funcs[fid as usize].name.clone();
                self.add_fact(
                    b,
                    Origin::Param(fid, i as u32),
                    Fact::root(*line, Rule::Param, format!("parameter `{name}` of `{fname}`")),
                );
                let nctx = if ctx.callback { NameContext::CallbackParameter(name) } else { NameContext::Binding(name) };
                if let Some(m) = self.catalog.source_matches(&SyntacticContext::Name(nctx)).first() {
                    self.seed_binding(b, *line, name, m);
                }
                for (_, m) in ctx.seeds.iter().filter(|(k, _)| *k == i) {
                    self.seed_binding(b, *line, name, m);
                }
                if i == 0 {
                    if let Some(alias) = &ctx.param0_alias {
                        self.set_alias(b, alias);
                    }
                }
            }
            infos.push(ParamInfo { bindings: ids, rest: p.rest });
        }
        if self.funcs[fid as usize].params.is_none() {
            self.funcs[fid as usize].params = Some(infos);
        }
        for p in &f.params {
            self.bind_pattern(&p.pattern, &Value::default(), f.line, None);
        }
        match &f.body {
            FunctionBody::Block(body) => {
                self.hoist_var(body);
                self.hoist_block(body);
                self.stmts(body);
            }
            FunctionBody::Expr(e) => {
                let v = self.expr(e);
                self.add_returns(&v.taint);
            }
        }
        self.scopes.pop();
        self.direct.truncate(mark);
        fid
    }

    fn visit_class(&mut self, c: &Rc<Class>) {
        let key = Rc::as_ptr(c) as usize;
        let this = self.binding_for(key, "this");
        if let Some(sup) = &c.superclass {
            self.expr(sup);
        }
        for m in &c.members {
            if let PropKey::Computed(e) = &m.key {
                self.expr(e);
            }
            match &m.value {
                ClassMemberValue::Method(f) => {
                    let fid = self.visit_function(f, FnCtx { this_binding: Some(this), ..FnCtx::default() });
                    if let Some(name) = m.key.name() {
                        self.merge_props(this, &BTreeMap::from([(name.to_string(), BTreeSet::from([fid]))]));
                    }
                }
                ClassMemberValue::Field(Some(e)) => {
                    self.scopes.push(Scope { key, names: HashMap::new(), this: Some(this), func: None });
                    let v = self.expr(e);
                    self.scopes.pop();
                    let name = m.key.name().unwrap_or("field").to_string();
                    self.merge_binding(this, &v.taint, m.line, Rule::Container, || {
                        format!("stored into `this.{name}`")
                    });
                    if !v.funcs.is_empty() {
                        self.merge_props(this, &BTreeMap::from([(name, v.funcs.clone())]));
                    }
                }
                ClassMemberValue::Field(None) => {}
                ClassMemberValue::StaticBlock(b) => {
                    self.scopes.push(Scope { key: ptr(b), names: HashMap::new(), this: Some(this), func: None });
                    self.hoist_var(b);
                    self.hoist_block(b);
                    self.stmts(b);
                    self.scopes.pop();
                }
            }
        }
    }

    // ---- binding patterns ----------------------------------------------

    /// Bind `v` to the names in `p`. `decl` is `Some(seed_names)` for
    /// declarations, `None` for plain assignment.
    fn bind_pattern(&mut self, p: &Pattern, v: &Value, line: u32, decl: Option<bool>) {
        match p {
            Pattern::Ident(name, l) => {
                let b = self.resolve(name);
                self.merge_binding(b, &v.taint, *l, Rule::Assign, || format!("assigned to `{name}`"));
                if !v.funcs.is_empty() {
                    self.merge_funcs(b, &v.funcs);
                }
                if !v.props.is_empty() {
                    self.merge_props(b, &v.props);
                }
                if let Some(path) = &v.path {
                    if path.receiver != Receiver::Local {
                        self.set_alias(b, path);
                    }
                }
                if let Some(src) = v.binding {
                    self.set_link(b, src);
                }
                if decl == Some(true) {
                    if let Some(m) =
                        self.catalog.source_matches(&SyntacticContext::Name(NameContext::Binding(name))).first()
                    {
                        self.seed_binding(b, *l, name, m);
                    }
                }
            }
            Pattern::Object { props, rest } => {
                for (key, sub) in props {
                    let kname = match key {
                        PropKey::Name(n) => Some(n.clone()),
                        PropKey::Computed(e) => {
                            self.expr(e);
                            None
                        }
                    };
                    let label = kname.clone().unwrap_or_else(|| "[computed]".into());
                    let sv = Value {
                        taint: extend(&v.taint, line, Rule::Member, || format!("destructured `{label}`")),
                        path: kname.as_ref().and_then(|k| v.path.as_ref().map(|p| p.push(k))),
                        written: kname.as_ref().and_then(|k| {
                            v.written.as_ref().map(|w| {
                                let mut w = w.clone();
                                w.push(k.clone());
                                w
                            })
                        }),
                        funcs: kname.as_ref().and_then(|k| v.props.get(k)).cloned().unwrap_or_default(),
                        ..Value::default()
                    };
                    self.bind_pattern(sub, &sv, line, decl);
                }
                if let Some(r) = rest {
                    let rv = Value::taint(extend(&v.taint, line, Rule::Member, || "rest of object".into()));
                    self.bind_pattern(r, &rv, line, decl);
                }
            }
            Pattern::Array { elems, rest } => {
                let ev = Value::taint(extend(&v.taint, line, Rule::Member, || "array element".into()));
                for e in elems.iter().flatten() {
                    self.bind_pattern(e, &ev, line, decl);
                }
                if let Some(r) = rest {
                    self.bind_pattern(r, &ev, line, decl);
                }
            }
            Pattern::Default(inner, dexpr) => {
                let dv = self.expr(dexpr);
                let mut merged = v.clone();
                union_into(&mut merged.taint, &dv.taint);
                merged.funcs.extend(dv.funcs.iter().copied());
                self.bind_pattern(inner, &merged, line, decl);
            }
            Pattern::Expr(target) => self.assign_target(target, v),
        }
    }

    /// Write into a member target: the whole container becomes tainted.
    fn assign_target(&mut self, target: &Expr, v: &Value) {
        let mut cur = target;
        let mut first_prop: Option<&str> = None;
        let mut depth = 0;
        loop {
            match &cur.kind {
                ExprKind::Member { object, prop, .. } => {
                    first_prop = Some(prop);
                    depth += 1;
                    cur = object;
                }
                ExprKind::Index { object, index } => {
                    self.expr(index);
                    first_prop = None;
                    depth += 1;
                    cur = object;
                }
                _ => break,
            }
        }
        let root = match &cur.kind {
            ExprKind::Ident(n) => Some((self.resolve(n), n.clone())),
            ExprKind::This => Some((self.this_binding(), "this".to_string())),
            _ => {
                if depth > 0 {
                    self.expr(cur);
                }
                None
            }
        };
        let Some((b, name)) = root else { return };
        if depth == 0 {
            self.bind_pattern(&Pattern::Ident(name, target.line), v, target.line, None);
            return;
        }
        self.merge_binding(b, &v.taint, target.line, Rule::Container, || format!("stored into `{name}`"));
        if depth == 1 && !v.funcs.is_empty() {
            if let Some(p) = first_prop {
                self.merge_props(b, &BTreeMap::from([(p.to_string(), v.funcs.clone())]));
            }
        }
    }

    // ---- expressions -----------------------------------------------------

    fn binding_path(&self, b: BindingId, name: &str) -> Path {
        let bind = &self.bindings[b as usize];
        if let Some(a) = &bind.alias {
            return a.clone();
        }
        let canon = self.canonical(b);
        if canon != b {
            if let Some(a) = &self.bindings[canon as usize].alias {
                return a.clone();
            }
        }
        let receiver = match name {
            "node" => Receiver::Node,
            "RED" => Receiver::Framework,
            _ if bind.global => Receiver::Global,
            _ => Receiver::Local,
        };
        Path { receiver, segs: vec![name.to_string()] }
    }

    fn read_binding(&mut self, b: BindingId, written: &str) -> Value {
        let canon = self.canonical(b);
        let bind = &self.bindings[b as usize];
        let sensitive: Vec<u32> = bind
            .taint
            .keys()
            .filter_map(|o| match o {
                Origin::Source(i) if self.sources[*i as usize].data_class == Some(DataClass::SensitiveInformation) => {
                    Some(*i)
                }
                _ => None,
            })
            .collect();
        self.direct.extend(sensitive);
        let bind = &self.bindings[b as usize];
        Value {
            taint: bind.taint.clone(),
            funcs: bind.funcs.clone(),
            props: self.bindings[canon as usize].props.clone(),
            path: Some(self.binding_path(b, &bind.name.clone())),
            written: Some(vec![written.to_string()]),
            binding: Some(b),
        }
    }

    fn expr(&mut self, e: &Expr) -> Value {
        match &e.kind {
            ExprKind::Ident(n) => {
                let b = self.resolve(n);
                self.read_binding(b, n)
            }
            ExprKind::This => {
                let b = self.this_binding();
                self.read_binding(b, "this")
            }
            ExprKind::Super | ExprKind::Literal(_) | ExprKind::Str(_) | ExprKind::Invalid => Value::default(),
            ExprKind::Template { exprs, .. } => {
                let mut t = Taint::new();
                for x in exprs {
                    let v = self.expr(x);
                    union_into(&mut t, &v.taint);
                }
                Value::taint(extend(&t, e.line, Rule::Operand, || "template string".into()))
            }
            ExprKind::TaggedTemplate { tag, exprs } => {
                let mut t = self.expr(tag).taint;
                for x in exprs {
                    let v = self.expr(x);
                    union_into(&mut t, &v.taint);
                }
                Value::taint(extend(&t, e.line, Rule::PassThrough, || "tagged template result".into()))
            }
            ExprKind::Array(items) => {
                let mut t = Taint::new();
                for x in items.iter().flatten() {
                    let v = self.expr(x);
                    union_into(&mut t, &v.taint);
                }
                Value::taint(extend(&t, e.line, Rule::Literal, || "array literal".into()))
            }
            ExprKind::Object(props) => self.object_literal(props, e.line),
            ExprKind::Function(f) => {
                let fid = self.visit_function(f, FnCtx::default());
                Value { funcs: BTreeSet::from([fid]), ..Value::default() }
            }
            ExprKind::Class(c) => {
                self.visit_class(c);
                Value::default()
            }
            ExprKind::Unary { op, arg } => {
                let v = self.expr(arg);
                if matches!(*op, "typeof" | "void" | "delete") {
                    Value::default()
                } else {
                    Value::taint(extend(&v.taint, e.line, Rule::Operand, || format!("operand of `{op}`")))
                }
            }
            ExprKind::Update { arg } => {
                self.expr(arg);
                Value::default()
            }
            ExprKind::Binary { op, left, right } | ExprKind::Logical { op, left, right } => {
                let mut t = self.expr(left).taint;
                let r = self.expr(right);
                union_into(&mut t, &r.taint);
                Value::taint(extend(&t, e.line, Rule::Operand, || format!("operand of `{op}`")))
            }
            ExprKind::Conditional { test, cons, alt } => {
                let mut t = self.expr(test).taint;
                union_into(&mut t, &self.expr(cons).taint);
                union_into(&mut t, &self.expr(alt).taint);
                Value::taint(extend(&t, e.line, Rule::Operand, || "operand of `?:`".into()))
            }
            ExprKind::Assign { target, value, .. } => {
                let v = match (&value.kind, target.as_ref()) {
                    (ExprKind::Function(f), Pattern::Expr(t)) if t.path_text().as_deref() == Some("module.exports") => {
                        let fid =
                            self.visit_function(f, FnCtx { param0_alias: Some(framework_path()), ..FnCtx::default() });
                        Value { funcs: BTreeSet::from([fid]), ..Value::default() }
                    }
                    _ => self.expr(value),
                };
                self.bind_pattern(target, &v, e.line, None);
                Value { binding: None, ..v }
            }
            ExprKind::Call { callee, args, .. } => self.call(callee, args, e.line, false),
            ExprKind::New { callee, args } => self.call(callee, args, e.line, true),
            ExprKind::Member { .. } => self.member(e, true),
            ExprKind::Index { object, index } => {
                let o = self.expr(object);
                self.expr(index);
                let text = o.text();
                Value::taint(extend(&o.taint, e.line, Rule::Member, || format!("element of `{text}`")))
            }
            ExprKind::Sequence(xs) => {
                let mut last = Value::default();
                for x in xs {
                    last = self.expr(x);
                }
                last
            }
            ExprKind::Spread(x) | ExprKind::Await(x) => self.expr(x),
            ExprKind::Yield(x) => {
                if let Some(x) = x {
                    self.expr(x);
                }
                Value::default()
            }
        }
    }

    fn object_literal(&mut self, props: &[Prop], line: u32) -> Value {
        let mut t = Taint::new();
        let mut fprops: BTreeMap<String, BTreeSet<FuncId>> = BTreeMap::new();
        for p in props {
            match p {
                Prop::KeyValue(k, v) => {
                    if let PropKey::Computed(c) = k {
                        self.expr(c);
                    }
                    let val = self.expr(v);
                    union_into(&mut t, &val.taint);
                    if let (Some(name), false) = (k.name(), val.funcs.is_empty()) {
                        fprops.entry(name.to_string()).or_default().extend(val.funcs);
                    }
                }
                Prop::Shorthand(name, _) => {
                    let b = self.resolve(name);
                    let val = self.read_binding(b, name);
                    union_into(&mut t, &val.taint);
                    if !val.funcs.is_empty() {
                        fprops.entry(name.clone()).or_default().extend(val.funcs);
                    }
                }
                Prop::Method(k, f) => {
                    if let PropKey::Computed(c) = k {
                        self.expr(c);
                    }
                    let fid = self.visit_function(f, FnCtx::default());
                    if let Some(name) = k.name() {
                        fprops.entry(name.to_string()).or_default().insert(fid);
                    }
                }
                Prop::Spread(x) => {
                    let val = self.expr(x);
                    union_into(&mut t, &val.taint);
                }
            }
        }
        Value { taint: extend(&t, line, Rule::Literal, || "object literal".into()), props: fprops, ..Value::default() }
    }

    fn member_object(&mut self, object: &Expr, outer: bool) -> Value {
        match &object.kind {
            ExprKind::Member { .. } => self.member(object, outer),
            _ => self.expr(object),
        }
    }

    fn member(&mut self, e: &Expr, outer: bool) -> Value {
        let ExprKind::Member { object, prop, .. } = &e.kind else { unreachable!("member on non-member") };
        let ov = self.member_object(object, false);
        let written = ov.written.as_ref().map(|w| {
            let mut w = w.clone();
            w.push(prop.clone());
            w
        });
        let text = written.as_ref().map_or_else(|| format!("….{prop}"), |w| w.join("."));
        let mut v = Value {
            taint: extend(&ov.taint, e.line, Rule::Member, || format!("read `{text}`")),
            funcs: ov.props.get(prop).cloned().unwrap_or_default(),
            path: ov.path.as_ref().map(|p| p.push(prop)),
            written,
            ..Value::default()
        };
        if outer {
            self.property_sources(&mut v, e.line);
        }
        v
    }

    /// Property-read and property-name sources on the outermost member of a
    /// chain. The longest matching prefix wins.
    fn property_sources(&mut self, v: &mut Value, line: u32) {
        let (Some(path), Some(written)) = (&v.path, &v.written) else { return };
        let base = path.segs.len() - written.len();
        // Segments up to `aliased` come from a binding, which already carries its own sources.
        let aliased = if base > 0 { base + 1 } else { 0 };
        for k in (2.max(aliased + 1)..=path.segs.len()).rev() {
            let ctx = SyntacticContext::PropertyRead(PathContext { path: &path.segs[..k], receiver: &path.receiver });
            let ms = self.catalog.source_matches(&ctx);
            let Some(m) = ms.first() else { continue };
            if aliased > 0 {
                let inner = SyntacticContext::PropertyRead(PathContext {
                    path: &path.segs[..aliased],
                    receiver: &path.receiver,
                });
                if self.catalog.source_matches(&inner).iter().any(|i| i.entry_id == m.entry_id) {
                    return;
                }
            }
            let shown = k.saturating_sub(base).max(1).min(written.len());
            let symbol = written[..shown].join(".");
            let idx = self.register_source(line, &symbol, m);
            let fact = self.source_fact(idx);
            v.taint.entry(Origin::Source(idx)).or_insert(fact);
            self.direct.push(idx);
            return;
        }
    }

    fn call(&mut self, callee: &Expr, args: &[Expr], line: u32, is_new: bool) -> Value {
        if let ExprKind::Ident(n) = &callee.kind {
            if n == "require" && !is_new {
                let b = self.resolve(n);
                if self.bindings[b as usize].global {
                    if let Some(m) = args.first().and_then(literal_string) {
                        for a in &args[1..] {
                            self.expr(a);
                        }
                        return Value {
                            path: Some(Path {
                                receiver: Receiver::Module { name: m.clone(), prefix: vec![] },
                                segs: vec![m],
                            }),
                            written: Some(vec!["require()".into()]),
                            ..Value::default()
                        };
                    }
                }
            }
        }
        let cv = match &callee.kind {
            ExprKind::Member { object, prop, .. } => {
                let ov = self.member_object(object, true);
                let written = ov.written.as_ref().map(|w| {
                    let mut w = w.clone();
                    w.push(prop.clone());
                    w
                });
                let text = written.as_ref().map_or_else(|| format!("….{prop}"), |w| w.join("."));
                Value {
                    taint: extend(&ov.taint, callee.line, Rule::Member, || format!("read `{text}`")),
                    funcs: ov.props.get(prop).cloned().unwrap_or_default(),
                    path: ov.path.as_ref().map(|p| p.push(prop)),
                    written,
                    ..Value::default()
                }
            }
            _ => self.expr(callee),
        };
        let callee_text = cv.text();
        let literal_args: Vec<Option<String>> = args.iter().map(literal_string).collect();
        let (source_ms, sink_ms) = match &cv.path {
            Some(p) => {
                let ctx = CallContext { path: &p.segs, receiver: &p.receiver, literal_args: &literal_args };
                (self.catalog.source_matches(&SyntacticContext::Call(ctx)), self.catalog.sink_matches(&ctx))
            }
            None => (Vec::new(), Vec::new()),
        };
        let receiver = cv.path.as_ref().map(|p| p.receiver.clone());
        let tail: Vec<&str> =
            cv.path.as_ref().map(|p| p.segs.iter().skip(1).map(String::as_str).collect()).unwrap_or_default();
        let framework = receiver == Some(Receiver::Framework);
        let is_create_node = framework && tail == ["nodes", "createNode"];
        let is_register = framework && tail == ["nodes", "registerType"];

        let callback_ms: Vec<&SourceMatch> =
            source_ms.iter().filter(|m| m.source_kind == SourceKind::CallbackParameter).collect();
        let callback_idx = args.iter().rposition(|a| match &a.kind {
            ExprKind::Function(_) => true,
            ExprKind::Ident(_) => !callback_ms.is_empty(),
            _ => false,
        });
        let seeds: Vec<(usize, SourceMatch)> =
            callback_ms.iter().flat_map(|m| m.seed_params.iter().map(move |&k| (k, (*m).clone()))).collect();

        if is_create_node && args.first().is_some_and(|a| matches!(a.kind, ExprKind::This)) {
            let t = self.this_binding();
            self.set_alias(t, &node_path());
        }

        let mut arg_values = Vec::with_capacity(args.len());
        let mut callback_funcs: Vec<FuncId> = Vec::new();
        for (i, a) in args.iter().enumerate() {
            let v = match &a.kind {
                ExprKind::Function(f) => {
                    let this_alias = (!f.is_arrow && (receiver == Some(Receiver::Node) || is_register)).then(node_path);
                    let ctx = FnCtx {
                        callback: true,
                        seeds: if Some(i) == callback_idx { seeds.clone() } else { Vec::new() },
                        this_alias,
                        ..FnCtx::default()
                    };
                    let fid = self.visit_function(f, ctx);
                    Value { funcs: BTreeSet::from([fid]), ..Value::default() }
                }
                _ => self.expr(a),
            };
            if Some(i) == callback_idx && !matches!(a.kind, ExprKind::Function(_)) {
                for &fid in &v.funcs {
                    self.seed_function_params(fid, &seeds);
                }
            }
            if is_register && i == 1 {
                for &fid in &v.funcs {
                    let key = self.funcs[fid as usize].key;
                    let t = self.binding_for(key, "this");
                    self.set_alias(t, &node_path());
                }
            }
            callback_funcs.extend(v.funcs.iter().copied());
            arg_values.push(v);
        }

        // Sinks.
        if !sink_ms.is_empty() {
            let sink = self.register_sink(line, &callee_text, &sink_ms);
            let positions = self.sinks[sink as usize].positions.clone();
            for (i, (a, v)) in args.iter().zip(&arg_values).enumerate() {
                let covered = positions.includes(i)
                    || (matches!(a.kind, ExprKind::Spread(_))
                        && match &positions {
                            TaintPositions::Any(_) => true,
                            TaintPositions::Indices(ix) => ix.iter().any(|&p| p >= i),
                        });
                if !covered || v.taint.is_empty() {
                    continue;
                }
                let text: Rc<str> = format!("argument {i} of `{callee_text}`").into();
                for (o, f) in &v.taint {
                    let fact = f.then(line, Rule::Sink, &text);
                    match *o {
                        Origin::Source(s) => self.add_flow(s, sink, fact.trace),
                        Origin::Param(g, j) => self.add_pending(g, j, sink, fact),
                    }
                }
            }
        }

        // Result.
        let mut result = Value::default();
        let local: Vec<FuncId> = cv.funcs.iter().copied().collect();
        if !local.is_empty() {
            for fid in local {
                let t = self.apply_summary(fid, &arg_values, line, &callee_text);
                union_into(&mut result.taint, &t);
            }
        } else {
            let mut t = cv.taint.clone();
            for v in &arg_values {
                union_into(&mut t, &v.taint);
            }
            if !t.is_empty() {
                if let Some(Receiver::Module { name, .. }) = &receiver {
                    if name.starts_with('.') {
                        self.warnings.insert((
                            line,
                            format!(
                                "cross-file call to `{callee_text}` (module `{name}`) with tainted data; not followed"
                            ),
                        ));
                    }
                }
                if callback_ms.is_empty() && !callback_funcs.is_empty() {
                    self.taint_callbacks(&callback_funcs, &t, line, &callee_text);
                }
            }
            result.taint = extend(&t, line, Rule::PassThrough, || format!("result of `{callee_text}`"));
        }
        if let Some(m) = source_ms.iter().find(|m| m.source_kind == SourceKind::ReturnValue) {
            let idx = self.register_source(line, &callee_text, m);
            let fact = self.source_fact(idx);
            result.taint.entry(Origin::Source(idx)).or_insert(fact);
            self.direct.push(idx);
        }
        result.path = cv.path.as_ref().and_then(|p| match &p.receiver {
            Receiver::Module { name, .. } => Some(Path { receiver: p.receiver.clone(), segs: vec![name.clone()] }),
            Receiver::Node | Receiver::Framework | Receiver::Global if !is_new => {
                let mut segs = p.segs.clone();
                let last = segs.pop()?;
                segs.push(format!("{last}()"));
                Some(Path { receiver: p.receiver.clone(), segs })
            }
            _ => None,
        });
        result.written = cv.written.as_ref().map(|w| {
            let mut w = w.clone();
            if let Some(last) = w.last_mut() {
                last.push_str("()");
            }
            w
        });
        result
    }

    fn register_sink(&mut self, line: u32, symbol: &str, ms: &[crate::catalog::SinkMatch]) -> u32 {
        let key = (line, symbol.to_string());
        if let Some(&i) = self.sink_keys.get(&key) {
            return i;
        }
        let positions = if ms.iter().any(|m| matches!(m.taint_positions, TaintPositions::Any(_))) {
            TaintPositions::any()
        } else {
            TaintPositions::Indices(
                ms.iter()
                    .flat_map(|m| match &m.taint_positions {
                        TaintPositions::Indices(ix) => ix.iter().copied().collect::<Vec<_>>(),
                        TaintPositions::Any(_) => Vec::new(),
                    })
                    .collect(),
            )
        };
        let i = self.sinks.len() as u32;
        self.sinks.push(SinkRec {
            entry_id: ms[0].entry_id.clone(),
            line,
            symbol: symbol.to_string(),
            category: ms[0].sink_category,
            positions,
        });
        self.sink_keys.insert(key, i);
        self.changed = true;
        i
    }

    fn seed_function_params(&mut self, fid: FuncId, seeds: &[(usize, SourceMatch)]) {
        let Some(params) = self.funcs[fid as usize].params.clone() else { return };
        for (k, m) in seeds {
            let Some(p) = params.get(*k) else { continue };
            for &b in &p.bindings {
                let name = self.bindings[b as usize].name.clone();
                // Parameter line is the root of its Param fact.
                let line =
                    self.bindings[b as usize].taint.get(&Origin::Param(fid, *k as u32)).map_or(0, |f| f.trace.line);
                self.seed_binding(b, line, &name, m);
            }
        }
    }

    fn taint_callbacks(&mut self, funcs: &[FuncId], t: &Taint, line: u32, callee_text: &str) {
        for &fid in funcs {
            let Some(params) = self.funcs[fid as usize].params.clone() else { continue };
            for p in params {
                for b in p.bindings {
                    let name = self.bindings[b as usize].name.clone();
                    self.merge_binding(b, t, line, Rule::Callback, || {
                        format!("passed by `{callee_text}` to callback parameter `{name}`")
                    });
                }
            }
        }
    }

    /// Result taint of calling local function `fid`; also resolves the
    /// function's pending sinks against the actual arguments.
    fn apply_summary(&mut self, fid: FuncId, args: &[Value], line: u32, callee_text: &str) -> Taint {
        let info = &self.funcs[fid as usize];
        let params = info.params.clone().unwrap_or_default();
        let returns = info.returns.clone();
        let pending = info.pending.clone();
        let fname = info.name.clone();
        let arg_taint = |i: u32| -> Taint {
            let i = i as usize;
            match params.get(i) {
                Some(p) if p.rest => {
                    let mut t = Taint::new();
                    for a in args.iter().skip(i) {
                        union_into(&mut t, &a.taint);
                    }
                    t
                }
                _ => args.get(i).map(|a| a.taint.clone()).unwrap_or_default(),
            }
        };
        let ret_text: Rc<str> = format!("returned from `{callee_text}`").into();
        let mut out = Taint::new();
        for (o, rf) in &returns {
            match *o {
                Origin::Param(f, i) if f == fid => {
                    for (ao, af) in &arg_taint(i) {
                        if let Some(fact) = self.splice(af, rf, &fname) {
                            out.entry(*ao).or_insert_with(|| fact.then(line, Rule::Return, &ret_text));
                        }
                    }
                }
                _ => {
                    out.entry(*o).or_insert_with(|| rf.then(line, Rule::Return, &ret_text));
                }
            }
        }
        for ((i, sink), pf) in &pending {
            for (ao, af) in &arg_taint(*i) {
                let Some(fact) = self.splice(af, pf, &fname) else { continue };
                match *ao {
                    Origin::Source(s) => self.add_flow(s, *sink, fact.trace),
                    Origin::Param(g, j) => self.add_pending(g, j, *sink, fact),
                }
            }
        }
        out
    }

    /// Prefix `summary` (rooted at a parameter) with the argument's trace.
    fn splice(&mut self, arg: &Fact, summary: &Fact, fname: &str) -> Option<Fact> {
        let depth = arg.depth.max(summary.depth) + 1;
        if depth > MAX_CALL_DEPTH {
            self.warnings.insert((
                summary.trace.line,
                format!("call depth limit ({MAX_CALL_DEPTH}) reached in `{fname}`; deeper flows dropped"),
            ));
            return None;
        }
        let mut trace = arg.trace.clone();
        for (k, s) in summary.trace.chain().into_iter().enumerate() {
            let (rule, text) = if k == 0 {
                (Rule::Argument, format!("argument bound to {}", s.text).into())
            } else {
                (s.rule, s.text.clone())
            };
            trace = Rc::new(Step { line: s.line, rule, text, prev: Some(trace) });
        }
        Some(Fact { trace, depth })
    }
}

fn node_path() -> Path {
    Path { receiver: Receiver::Node, segs: vec!["this".into()] }
}

fn framework_path() -> Path {
    Path { receiver: Receiver::Framework, segs: vec!["RED".into()] }
}
