//! Syntax tree for the supported script grammar.

use std::rc::Rc;

pub type Line = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Var,
    Let,
    Const,
}

#[derive(Debug, Clone)]
pub struct Stmt {
    pub line: Line,
    pub kind: StmtKind,
}

#[derive(Debug, Clone)]
pub enum StmtKind {
    Var {
        kind: VarKind,
        decls: Vec<Declarator>,
    },
    Function(Rc<Function>),
    Class(Rc<Class>),
    Expr(Expr),
    If {
        test: Expr,
        cons: Box<Stmt>,
        alt: Option<Box<Stmt>>,
    },
    For {
        init: Option<Box<Stmt>>,
        test: Option<Expr>,
        update: Option<Expr>,
        body: Box<Stmt>,
    },
    /// `for (left in right)` and `for (left of right)`.
    ForEach {
        left: ForTarget,
        right: Expr,
        body: Box<Stmt>,
    },
    While {
        test: Expr,
        body: Box<Stmt>,
    },
    DoWhile {
        body: Box<Stmt>,
        test: Expr,
    },
    Return(Option<Expr>),
    Throw(Expr),
    Try {
        block: Vec<Stmt>,
        param: Option<Pattern>,
        handler: Option<Vec<Stmt>>,
        finalizer: Option<Vec<Stmt>>,
    },
    Block(Vec<Stmt>),
    Switch {
        disc: Expr,
        cases: Vec<SwitchCase>,
    },
    Labeled(Box<Stmt>),
    Import {
        source: String,
        specifiers: Vec<ImportSpecifier>,
    },
    /// `export default <expr>`; declarations behind `export` are unwrapped.
    ExportDefault(Expr),
    Break,
    Continue,
    Empty,
}

#[derive(Debug, Clone)]
pub enum ForTarget {
    Decl(VarKind, Pattern),
    Pattern(Pattern),
}

#[derive(Debug, Clone)]
pub struct Declarator {
    pub target: Pattern,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone)]
pub struct SwitchCase {
    pub test: Option<Expr>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImportSpecifier {
    Default(String),
    Namespace(String),
    Named { imported: String, local: String },
}

#[derive(Debug, Clone)]
pub enum Pattern {
    Ident(String, Line),
    Object {
        props: Vec<(PropKey, Pattern)>,
        rest: Option<Box<Pattern>>,
    },
    Array {
        elems: Vec<Option<Pattern>>,
        rest: Option<Box<Pattern>>,
    },
    Default(Box<Pattern>, Box<Expr>),
    /// Assignment target that is not a binding, e.g. `a.b` in `[a.b] = x`.
    Expr(Box<Expr>),
}

impl Pattern {
    /// Names bound by this pattern, in source order.
    pub fn bound_names(&self, out: &mut Vec<(String, Line)>) {
        match self {
            Pattern::Ident(n, l) => out.push((n.clone(), *l)),
            Pattern::Object { props, rest } => {
                for (_, p) in props {
                    p.bound_names(out);
                }
                if let Some(r) = rest {
                    r.bound_names(out);
                }
            }
            Pattern::Array { elems, rest } => {
                for p in elems.iter().flatten() {
                    p.bound_names(out);
                }
                if let Some(r) = rest {
                    r.bound_names(out);
                }
            }
            Pattern::Default(p, _) => p.bound_names(out),
            Pattern::Expr(_) => {}
        }
    }
}

#[derive(Debug, Clone)]
pub struct Param {
    pub pattern: Pattern,
    pub rest: bool,
}

#[derive(Debug, Clone)]
pub enum FunctionBody {
    Block(Vec<Stmt>),
    Expr(Box<Expr>),
}

#[derive(Debug, Clone)]
pub struct Function {
    pub name: Option<String>,
    pub params: Vec<Param>,
    pub body: FunctionBody,
    pub is_arrow: bool,
    pub line: Line,
}

impl Function {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Debug, Clone)]
pub struct Class {
    pub name: Option<String>,
    pub superclass: Option<Expr>,
    pub members: Vec<ClassMember>,
    pub line: Line,
}

#[derive(Debug, Clone)]
pub struct ClassMember {
    pub key: PropKey,
    pub is_static: bool,
    pub value: ClassMemberValue,
    pub line: Line,
}

#[derive(Debug, Clone)]
pub enum ClassMemberValue {
    Method(Rc<Function>),
    Field(Option<Expr>),
    StaticBlock(Vec<Stmt>),
}

#[derive(Debug, Clone)]
pub enum PropKey {
    Name(String),
    Computed(Box<Expr>),
}

impl PropKey {
    pub fn name(&self) -> Option<&str> {
        match self {
            PropKey::Name(n) => Some(n),
            PropKey::Computed(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Prop {
    KeyValue(PropKey, Expr),
    Shorthand(String, Line),
    Method(PropKey, Rc<Function>),
    Spread(Expr),
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub line: Line,
    pub kind: ExprKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Literal {
    Number,
    Bool,
    Null,
    Regex,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Ident(String),
    This,
    Super,
    Literal(Literal),
    Str(String),
    Template {
        quasis: Vec<String>,
        exprs: Vec<Expr>,
    },
    TaggedTemplate {
        tag: Box<Expr>,
        exprs: Vec<Expr>,
    },
    Array(Vec<Option<Expr>>),
    Object(Vec<Prop>),
    Function(Rc<Function>),
    Class(Rc<Class>),
    Unary {
        op: &'static str,
        arg: Box<Expr>,
    },
    Update {
        arg: Box<Expr>,
    },
    Binary {
        op: &'static str,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Logical {
        op: &'static str,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Conditional {
        test: Box<Expr>,
        cons: Box<Expr>,
        alt: Box<Expr>,
    },
    Assign {
        op: &'static str,
        target: Box<Pattern>,
        value: Box<Expr>,
    },
    Call {
        callee: Box<Expr>,
        args: Vec<Expr>,
        optional: bool,
    },
    New {
        callee: Box<Expr>,
        args: Vec<Expr>,
    },
    Member {
        object: Box<Expr>,
        prop: String,
        optional: bool,
    },
    Index {
        object: Box<Expr>,
        index: Box<Expr>,
    },
    Sequence(Vec<Expr>),
    Spread(Box<Expr>),
    Await(Box<Expr>),
    Yield(Option<Box<Expr>>),
    /// Parsed placeholder for input that failed inside an expression.
    Invalid,
}

impl Expr {
    pub fn new(line: Line, kind: ExprKind) -> Self {
        Expr { line, kind }
    }

    /// Dotted text of a member chain such as `node.context().flow.set`, when
    /// the expression is one.
    pub fn path_text(&self) -> Option<String> {
        match &self.kind {
            ExprKind::Ident(n) => Some(n.clone()),
            ExprKind::This => Some("this".into()),
            ExprKind::Member { object, prop, .. } => Some(format!("{}.{prop}", object.path_text()?)),
            ExprKind::Call { callee, .. } => Some(format!("{}()", callee.path_text()?)),
            _ => None,
        }
    }
}

/// A parsed file: statements plus the errors recovered from.
#[derive(Debug, Clone)]
pub struct SyntaxTree {
    pub file: String,
    pub body: Vec<Stmt>,
    pub parse_errors: Vec<(Line, String)>,
}

impl SyntaxTree {
    /// Every function in the tree, in source order, including nested ones.
    pub fn functions(&self) -> Vec<Rc<Function>> {
        let mut out = Vec::new();
        let mut v = FunctionCollector(&mut out);
        for s in &self.body {
            v.stmt(s);
        }
        out
    }
}

struct FunctionCollector<'a>(&'a mut Vec<Rc<Function>>);

impl FunctionCollector<'_> {
    fn func(&mut self, f: &Rc<Function>) {
        self.0.push(f.clone());
        for p in &f.params {
            self.pattern(&p.pattern);
        }
        match &f.body {
            FunctionBody::Block(b) => b.iter().for_each(|s| self.stmt(s)),
            FunctionBody::Expr(e) => self.expr(e),
        }
    }

    fn class(&mut self, c: &Class) {
        if let Some(s) = &c.superclass {
            self.expr(s);
        }
        for m in &c.members {
            if let PropKey::Computed(e) = &m.key {
                self.expr(e);
            }
            match &m.value {
                ClassMemberValue::Method(f) => self.func(f),
                ClassMemberValue::Field(Some(e)) => self.expr(e),
                ClassMemberValue::Field(None) => {}
                ClassMemberValue::StaticBlock(b) => b.iter().for_each(|s| self.stmt(s)),
            }
        }
    }

    fn pattern(&mut self, p: &Pattern) {
        match p {
            Pattern::Ident(..) => {}
            Pattern::Object { props, rest } => {
                for (k, v) in props {
                    if let PropKey::Computed(e) = k {
                        self.expr(e);
                    }
                    self.pattern(v);
                }
                if let Some(r) = rest {
                    self.pattern(r);
                }
            }
            Pattern::Array { elems, rest } => {
                elems.iter().flatten().for_each(|e| self.pattern(e));
                if let Some(r) = rest {
                    self.pattern(r);
                }
            }
            Pattern::Default(p, e) => {
                self.pattern(p);
                self.expr(e);
            }
            Pattern::Expr(e) => self.expr(e),
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Var { decls, .. } => {
                for d in decls {
                    self.pattern(&d.target);
                    if let Some(e) = &d.init {
                        self.expr(e);
                    }
                }
            }
            StmtKind::Function(f) => self.func(f),
            StmtKind::Class(c) => self.class(c),
            StmtKind::Expr(e) | StmtKind::Throw(e) | StmtKind::ExportDefault(e) => self.expr(e),
            StmtKind::If { test, cons, alt } => {
                self.expr(test);
                self.stmt(cons);
                if let Some(a) = alt {
                    self.stmt(a);
                }
            }
            StmtKind::For { init, test, update, body } => {
                if let Some(i) = init {
                    self.stmt(i);
                }
                if let Some(t) = test {
                    self.expr(t);
                }
                if let Some(u) = update {
                    self.expr(u);
                }
                self.stmt(body);
            }
            StmtKind::ForEach { left, right, body } => {
                match left {
                    ForTarget::Decl(_, p) | ForTarget::Pattern(p) => self.pattern(p),
                }
                self.expr(right);
                self.stmt(body);
            }
            StmtKind::While { test, body } | StmtKind::DoWhile { body, test } => {
                self.expr(test);
                self.stmt(body);
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    self.expr(e);
                }
            }
            StmtKind::Try { block, param, handler, finalizer } => {
                block.iter().for_each(|s| self.stmt(s));
                if let Some(p) = param {
                    self.pattern(p);
                }
                handler.iter().flatten().for_each(|s| self.stmt(s));
                finalizer.iter().flatten().for_each(|s| self.stmt(s));
            }
            StmtKind::Block(b) => b.iter().for_each(|s| self.stmt(s)),
            StmtKind::Switch { disc, cases } => {
                self.expr(disc);
                for c in cases {
                    if let Some(t) = &c.test {
                        self.expr(t);
                    }
                    c.body.iter().for_each(|s| self.stmt(s));
                }
            }
            StmtKind::Labeled(b) => self.stmt(b),
            StmtKind::Import { .. } | StmtKind::Break | StmtKind::Continue | StmtKind::Empty => {}
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Ident(_)
            | ExprKind::This
            | ExprKind::Super
            | ExprKind::Literal(_)
            | ExprKind::Str(_)
            | ExprKind::Invalid => {}
            ExprKind::Template { exprs, .. } => exprs.iter().for_each(|x| self.expr(x)),
            ExprKind::TaggedTemplate { tag, exprs } => {
                self.expr(tag);
                exprs.iter().for_each(|x| self.expr(x));
            }
            ExprKind::Array(items) => items.iter().flatten().for_each(|x| self.expr(x)),
            ExprKind::Object(props) => {
                for p in props {
                    match p {
                        Prop::KeyValue(k, v) => {
                            if let PropKey::Computed(c) = k {
                                self.expr(c);
                            }
                            self.expr(v);
                        }
                        Prop::Shorthand(..) => {}
                        Prop::Method(_, f) => self.func(f),
                        Prop::Spread(x) => self.expr(x),
                    }
                }
            }
            ExprKind::Function(f) => self.func(f),
            ExprKind::Class(c) => self.class(c),
            ExprKind::Unary { arg, .. } | ExprKind::Update { arg } => self.expr(arg),
            ExprKind::Binary { left, right, .. } | ExprKind::Logical { left, right, .. } => {
                self.expr(left);
                self.expr(right);
            }
            ExprKind::Conditional { test, cons, alt } => {
                self.expr(test);
                self.expr(cons);
                self.expr(alt);
            }
            ExprKind::Assign { target, value, .. } => {
                self.pattern(target);
                self.expr(value);
            }
            ExprKind::Call { callee, args, .. } | ExprKind::New { callee, args } => {
                self.expr(callee);
                args.iter().for_each(|a| self.expr(a));
            }
            ExprKind::Member { object, .. } => self.expr(object),
            ExprKind::Index { object, index } => {
                self.expr(object);
                self.expr(index);
            }
            ExprKind::Sequence(xs) => xs.iter().for_each(|x| self.expr(x)),
            ExprKind::Spread(x) | ExprKind::Await(x) => self.expr(x),
            ExprKind::Yield(x) => {
                if let Some(x) = x {
                    self.expr(x);
                }
            }
        }
    }
}
