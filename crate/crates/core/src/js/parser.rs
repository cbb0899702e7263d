//! Recursive-descent parser with statement-level error recovery.
//!
//! In TypeScript mode the parser drops type-level syntax as it goes: type
//! annotations, interface and type-alias declarations, generic parameter
//! lists, `as` casts, non-null assertions and access modifiers. What remains
//! is the plain script tree the analyzer consumes.

use std::rc::Rc;

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};

#[derive(Debug)]
struct ParseError {
    line: Line,
    msg: String,
}

type PResult<T> = Result<T, ParseError>;

const ASSIGN_OPS: &[&str] =
    &["=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>=", ">>>=", "&=", "|=", "^=", "&&=", "||=", "??="];

const TS_MODIFIERS: &[&str] = &["public", "private", "protected", "readonly", "override", "declare", "abstract"];

/// Parse JavaScript (or, with `typescript`, TypeScript) source into a tree.
/// Lines are numbered from `first_line`, which lets callers parse script
/// regions cut out of a larger document.
pub fn parse_source(source: &str, file: &str, first_line: u32, typescript: bool) -> SyntaxTree {
    let mut errors = Vec::new();
    let tokens = tokenize(source, first_line, &mut errors);
    let mut p = Parser { toks: tokens, pos: 0, errors, ts: typescript };
    let body = p.program();
    let mut parse_errors = p.errors;
    parse_errors.sort_by_key(|(l, _)| *l);
    SyntaxTree { file: file.to_string(), body, parse_errors }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    errors: Vec<(Line, String)>,
    ts: bool,
}

fn err<T>(line: Line, msg: impl Into<String>) -> PResult<T> {
    Err(ParseError { line, msg: msg.into() })
}

impl Parser {
    // ---- token helpers -------------------------------------------------

    fn peek(&self) -> &Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek_at(&self, off: usize) -> &Token {
        &self.toks[(self.pos + off).min(self.toks.len() - 1)]
    }

    fn line(&self) -> Line {
        self.peek().line
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek().kind, TokenKind::Eof)
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn is(&self, p: &str) -> bool {
        self.peek().is_punct(p)
    }

    fn is_word(&self, w: &str) -> bool {
        self.peek().is_ident(w)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> PResult<()> {
        if self.eat(p) {
            Ok(())
        } else {
            let t = self.peek();
            err(t.line, format!("expected `{p}`, found {}", t.kind))
        }
    }

    fn ident_name(&mut self) -> PResult<String> {
        match &self.peek().kind {
            TokenKind::Ident(n) => {
                let n = n.clone();
                self.bump();
                Ok(n)
            }
            k => err(self.line(), format!("expected identifier, found {k}")),
        }
    }

    fn consume_semicolon(&mut self) -> PResult<()> {
        if self.eat(";") || self.is("}") || self.at_eof() || self.peek().nl_before {
            Ok(())
        } else {
            let t = self.peek();
            err(t.line, format!("expected `;`, found {}", t.kind))
        }
    }

    fn record(&mut self, e: ParseError) {
        if !self.errors.iter().any(|(l, _)| *l == e.line) {
            self.errors.push((e.line, e.msg));
        }
    }

    /// Skip to the end of the broken statement: a `;` or line break at the
    /// starting nesting depth, or the `}` closing the enclosing block.
    fn synchronize(&mut self, start: usize) {
        if self.pos == start {
            self.bump();
        }
        let mut depth = 0i32;
        while !self.at_eof() {
            let t = self.peek();
            if depth == 0 {
                if t.is_punct(";") {
                    self.bump();
                    return;
                }
                if t.is_punct("}") {
                    return;
                }
                if t.nl_before && self.pos > start {
                    return;
                }
            }
            match &t.kind {
                TokenKind::Punct("{" | "(" | "[") => depth += 1,
                TokenKind::Punct("}" | ")" | "]") => {
                    depth -= 1;
                    if depth < 0 {
                        depth = 0;
                    }
                }
                _ => {}
            }
            self.bump();
        }
    }

    // ---- statements ------------------------------------------------------

    fn program(&mut self) -> Vec<Stmt> {
        let mut body = Vec::new();
        while !self.at_eof() {
            if self.is("}") {
                let line = self.line();
                self.record(ParseError { line, msg: "unmatched `}`".into() });
                self.bump();
                continue;
            }
            self.statement_into(&mut body);
        }
        body
    }

    fn statement_into(&mut self, out: &mut Vec<Stmt>) {
        let start = self.pos;
        match self.statement() {
            Ok(Some(s)) => out.push(s),
            Ok(None) => {}
            Err(e) => {
                self.record(e);
                self.synchronize(start);
            }
        }
    }

    fn block_body(&mut self) -> PResult<Vec<Stmt>> {
        self.expect("{")?;
        let mut body = Vec::new();
        while !self.is("}") {
            if self.at_eof() {
                return err(self.line(), "unexpected end of input inside block");
            }
            self.statement_into(&mut body);
        }
        self.bump();
        Ok(body)
    }

    /// `Ok(None)` for statements that carry nothing for the analysis, such as
    /// TypeScript-only declarations.
    fn statement(&mut self) -> PResult<Option<Stmt>> {
        let line = self.line();
        let t = self.peek().clone();
        let kind = match &t.kind {
            TokenKind::Punct("{") => StmtKind::Block(self.block_body()?),
            TokenKind::Punct(";") => {
                self.bump();
                StmtKind::Empty
            }
            TokenKind::Ident(w) => match w.as_str() {
                "var" | "const" => self.var_statement()?,
                "let" if self.let_is_declaration() => self.var_statement()?,
                "function" => StmtKind::Function(self.function(false)?),
                "async" if self.peek_at(1).is_ident("function") && !self.peek_at(1).nl_before => {
                    self.bump();
                    StmtKind::Function(self.function(false)?)
                }
                "class" => StmtKind::Class(self.class()?),
                "if" => self.if_statement()?,
                "for" => self.for_statement()?,
                "while" => {
                    self.bump();
                    self.expect("(")?;
                    let test = self.expression(false)?;
                    self.expect(")")?;
                    let body = Box::new(self.sub_statement()?);
                    StmtKind::While { test, body }
                }
                "do" => {
                    self.bump();
                    let body = Box::new(self.sub_statement()?);
                    if !self.eat_word("while") {
                        return err(self.line(), "expected `while` after do-block");
                    }
                    self.expect("(")?;
                    let test = self.expression(false)?;
                    self.expect(")")?;
                    self.eat(";");
                    StmtKind::DoWhile { body, test }
                }
                "return" => {
                    self.bump();
                    let arg = if self.is(";") || self.is("}") || self.at_eof() || self.peek().nl_before {
                        None
                    } else {
                        Some(self.expression(false)?)
                    };
                    self.consume_semicolon()?;
                    StmtKind::Return(arg)
                }
                "throw" => {
                    self.bump();
                    let arg = self.expression(false)?;
                    self.consume_semicolon()?;
                    StmtKind::Throw(arg)
                }
                "try" => self.try_statement()?,
                "switch" => self.switch_statement()?,
                "break" | "continue" => {
                    self.bump();
                    if !self.peek().nl_before && self.peek().ident().is_some() {
                        self.bump();
                    }
                    self.consume_semicolon()?;
                    if w == "break" {
                        StmtKind::Break
                    } else {
                        StmtKind::Continue
                    }
                }
                "debugger" => {
                    self.bump();
                    self.consume_semicolon()?;
                    StmtKind::Empty
                }
                "import" if !self.peek_at(1).is_punct("(") && !self.peek_at(1).is_punct(".") => {
                    return self.import_statement();
                }
                "export" => return self.export_statement(),
                "interface" if self.ts && self.peek_at(1).ident().is_some() => {
                    self.skip_interface()?;
                    return Ok(None);
                }
                "type" if self.ts && self.peek_at(1).ident().is_some() && !self.peek_at(1).nl_before => {
                    self.skip_type_alias()?;
                    return Ok(None);
                }
                "enum" if self.ts && self.peek_at(1).ident().is_some() => {
                    self.bump();
                    self.bump();
                    self.skip_balanced("{", "}")?;
                    return Ok(None);
                }
                "declare" if self.ts && self.peek_at(1).ident().is_some() && !self.peek_at(1).nl_before => {
                    self.skip_declare()?;
                    return Ok(None);
                }
                "namespace" | "module"
                    if self.ts && self.peek_at(1).ident().is_some() && self.peek_at(2).is_punct("{") =>
                {
                    self.bump();
                    self.bump();
                    StmtKind::Block(self.block_body()?)
                }
                "abstract" if self.ts && self.peek_at(1).is_ident("class") => {
                    self.bump();
                    StmtKind::Class(self.class()?)
                }
                _ if self.peek_at(1).is_punct(":") && !is_reserved(w) => {
                    self.bump();
                    self.bump();
                    StmtKind::Labeled(Box::new(self.sub_statement()?))
                }
                _ => self.expression_statement()?,
            },
            _ => self.expression_statement()?,
        };
        Ok(Some(Stmt { line, kind }))
    }

    /// A statement in a nested position (loop body, branch); TypeScript-only
    /// declarations there become empty statements.
    fn sub_statement(&mut self) -> PResult<Stmt> {
        let line = self.line();
        Ok(self.statement()?.unwrap_or(Stmt { line, kind: StmtKind::Empty }))
    }

    fn let_is_declaration(&self) -> bool {
        let next = self.peek_at(1);
        next.ident().is_some() || next.is_punct("[") || next.is_punct("{")
    }

    fn expression_statement(&mut self) -> PResult<StmtKind> {
        let e = self.expression(false)?;
        self.consume_semicolon()?;
        Ok(StmtKind::Expr(e))
    }

    fn var_kind(&mut self) -> PResult<VarKind> {
        let w = self.ident_name()?;
        Ok(match w.as_str() {
            "var" => VarKind::Var,
            "let" => VarKind::Let,
            _ => VarKind::Const,
        })
    }

    fn var_statement(&mut self) -> PResult<StmtKind> {
        if self.ts && self.is_word("const") && self.peek_at(1).is_ident("enum") {
            self.bump();
            self.bump();
            self.ident_name()?;
            self.skip_balanced("{", "}")?;
            return Ok(StmtKind::Empty);
        }
        let kind = self.var_kind()?;
        let decls = self.declarators(false)?;
        self.consume_semicolon()?;
        Ok(StmtKind::Var { kind, decls })
    }

    fn declarators(&mut self, no_in: bool) -> PResult<Vec<Declarator>> {
        let mut decls = Vec::new();
        loop {
            let target = self.binding_pattern()?;
            if self.ts {
                self.eat("!");
                if self.is(":") {
                    self.bump();
                    self.skip_type(false, false)?;
                }
            }
            let init = if self.eat("=") { Some(self.assignment(no_in)?) } else { None };
            decls.push(Declarator { target, init });
            if !self.eat(",") {
                break;
            }
        }
        Ok(decls)
    }

    fn if_statement(&mut self) -> PResult<StmtKind> {
        self.bump();
        self.expect("(")?;
        let test = self.expression(false)?;
        self.expect(")")?;
        let cons = Box::new(self.sub_statement()?);
        let alt = if self.eat_word("else") { Some(Box::new(self.sub_statement()?)) } else { None };
        Ok(StmtKind::If { test, cons, alt })
    }

    fn for_statement(&mut self) -> PResult<StmtKind> {
        self.bump();
        self.eat_word("await");
        self.expect("(")?;
        let line = self.line();
        let mut init = None;
        if self.is_word("var") || self.is_word("const") || (self.is_word("let") && self.let_is_declaration()) {
            let kind = self.var_kind()?;
            let decls = self.declarators(true)?;
            if (self.is_word("of") || self.is_word("in")) && decls.len() == 1 && decls[0].init.is_none() {
                self.bump();
                let right = self.expression(false)?;
                self.expect(")")?;
                let body = Box::new(self.sub_statement()?);
                let target = decls.into_iter().next().map(|d| d.target).unwrap_or(Pattern::Ident(String::new(), line));
                return Ok(StmtKind::ForEach { left: ForTarget::Decl(kind, target), right, body });
            }
            init = Some(Box::new(Stmt { line, kind: StmtKind::Var { kind, decls } }));
        } else if !self.is(";") {
            let e = self.expression(true)?;
            if self.is_word("of") || self.is_word("in") {
                self.bump();
                let right = self.expression(false)?;
                self.expect(")")?;
                let body = Box::new(self.sub_statement()?);
                let target = self.to_pattern(e)?;
                return Ok(StmtKind::ForEach { left: ForTarget::Pattern(target), right, body });
            }
            init = Some(Box::new(Stmt { line, kind: StmtKind::Expr(e) }));
        }
        self.expect(";")?;
        let test = if self.is(";") { None } else { Some(self.expression(false)?) };
        self.expect(";")?;
        let update = if self.is(")") { None } else { Some(self.expression(false)?) };
        self.expect(")")?;
        let body = Box::new(self.sub_statement()?);
        Ok(StmtKind::For { init, test, update, body })
    }

    fn try_statement(&mut self) -> PResult<StmtKind> {
        self.bump();
        let block = self.block_body()?;
        let mut param = None;
        let mut handler = None;
        if self.eat_word("catch") {
            if self.eat("(") {
                param = Some(self.binding_pattern()?);
                if self.ts && self.eat(":") {
                    self.skip_type(false, false)?;
                }
                self.expect(")")?;
            }
            handler = Some(self.block_body()?);
        }
        let finalizer = if self.eat_word("finally") { Some(self.block_body()?) } else { None };
        if handler.is_none() && finalizer.is_none() {
            return err(self.line(), "try without catch or finally");
        }
        Ok(StmtKind::Try { block, param, handler, finalizer })
    }

    fn switch_statement(&mut self) -> PResult<StmtKind> {
        self.bump();
        self.expect("(")?;
        let disc = self.expression(false)?;
        self.expect(")")?;
        self.expect("{")?;
        let mut cases = Vec::new();
        while !self.eat("}") {
            if self.at_eof() {
                return err(self.line(), "unexpected end of input inside switch");
            }
            let test = if self.eat_word("case") {
                Some(self.expression(false)?)
            } else if self.eat_word("default") {
                None
            } else {
                return err(self.line(), format!("expected `case` or `default`, found {}", self.peek().kind));
            };
            self.expect(":")?;
            let mut body = Vec::new();
            while !self.is("}") && !self.is_word("case") && !self.is_word("default") && !self.at_eof() {
                self.statement_into(&mut body);
            }
            cases.push(SwitchCase { test, body });
        }
        Ok(StmtKind::Switch { disc, cases })
    }

    fn import_statement(&mut self) -> PResult<Option<Stmt>> {
        let line = self.line();
        self.bump();
        if self.ts && self.is_word("type") && !self.peek_at(1).is_punct(",") && !self.peek_at(1).is_ident("from") {
            self.skip_to_statement_end();
            return Ok(None);
        }
        let mut specifiers = Vec::new();
        if let TokenKind::Str(s) = &self.peek().kind {
            let source = s.clone();
            self.bump();
            self.consume_semicolon()?;
            return Ok(Some(Stmt { line, kind: StmtKind::Import { source, specifiers } }));
        }
        if self.ts && self.peek().ident().is_some() && self.peek_at(1).is_punct("=") {
            // `import x = require("y")`
            let local = self.ident_name()?;
            self.bump();
            let init = self.assignment(false)?;
            self.consume_semicolon()?;
            let decls = vec![Declarator { target: Pattern::Ident(local, line), init: Some(init) }];
            return Ok(Some(Stmt { line, kind: StmtKind::Var { kind: VarKind::Const, decls } }));
        }
        loop {
            if self.eat("*") {
                if !self.eat_word("as") {
                    return err(self.line(), "expected `as` in namespace import");
                }
                specifiers.push(ImportSpecifier::Namespace(self.ident_name()?));
            } else if self.eat("{") {
                while !self.eat("}") {
                    if self.ts && self.is_word("type") && self.peek_at(1).ident().is_some() {
                        self.bump();
                    }
                    let imported = match &self.peek().kind {
                        TokenKind::Str(s) => {
                            let s = s.clone();
                            self.bump();
                            s
                        }
                        _ => self.ident_name()?,
                    };
                    let local = if self.eat_word("as") { self.ident_name()? } else { imported.clone() };
                    specifiers.push(ImportSpecifier::Named { imported, local });
                    if !self.eat(",") {
                        self.expect("}")?;
                        break;
                    }
                }
            } else {
                specifiers.push(ImportSpecifier::Default(self.ident_name()?));
            }
            if !self.eat(",") {
                break;
            }
        }
        if !self.eat_word("from") {
            return err(self.line(), "expected `from` in import");
        }
        let source = match &self.peek().kind {
            TokenKind::Str(s) => s.clone(),
            k => return err(self.line(), format!("expected module string, found {k}")),
        };
        self.bump();
        self.consume_semicolon()?;
        Ok(Some(Stmt { line, kind: StmtKind::Import { source, specifiers } }))
    }

    fn export_statement(&mut self) -> PResult<Option<Stmt>> {
        let line = self.line();
        self.bump();
        if self.eat_word("default") {
            if self.is_word("function") || (self.is_word("async") && self.peek_at(1).is_ident("function")) {
                self.eat_word("async");
                let f = self.function(false)?;
                return Ok(Some(Stmt { line, kind: StmtKind::ExportDefault(Expr::new(line, ExprKind::Function(f))) }));
            }
            if self.is_word("class") {
                let c = self.class()?;
                return Ok(Some(Stmt { line, kind: StmtKind::ExportDefault(Expr::new(line, ExprKind::Class(c))) }));
            }
            let e = self.assignment(false)?;
            self.consume_semicolon()?;
            return Ok(Some(Stmt { line, kind: StmtKind::ExportDefault(e) }));
        }
        if self.is("*") || self.is("{") {
            self.skip_to_statement_end();
            return Ok(None);
        }
        if self.ts && self.is_word("=") {
            self.skip_to_statement_end();
            return Ok(None);
        }
        self.statement()
    }

    fn skip_to_statement_end(&mut self) {
        let start = self.pos;
        let mut depth = 0i32;
        while !self.at_eof() {
            let t = self.peek();
            if depth == 0 && self.pos > start && t.nl_before && !t.is_punct("{") {
                return;
            }
            match &t.kind {
                TokenKind::Punct(";") if depth == 0 => {
                    self.bump();
                    return;
                }
                TokenKind::Punct("{" | "(" | "[") => depth += 1,
                TokenKind::Punct("}" | ")" | "]") => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                }
                _ => {}
            }
            self.bump();
        }
    }

    // ---- TypeScript skipping --------------------------------------------

    fn skip_balanced(&mut self, open: &str, close: &str) -> PResult<()> {
        let line = self.line();
        while !self.is(open) {
            if self.at_eof() || self.is(";") {
                return err(line, format!("expected `{open}`"));
            }
            self.bump();
        }
        let mut depth = 0;
        loop {
            if self.at_eof() {
                return err(line, format!("unbalanced `{open}`"));
            }
            let t = self.bump();
            if t.is_punct(open) {
                depth += 1;
            } else if t.is_punct(close) {
                depth -= 1;
                if depth == 0 {
                    return Ok(());
                }
            }
        }
    }

    fn skip_interface(&mut self) -> PResult<()> {
        self.bump();
        self.skip_balanced("{", "}")
    }

    fn skip_type_alias(&mut self) -> PResult<()> {
        self.bump();
        self.ident_name()?;
        if self.is("<") {
            self.skip_type_args()?;
        }
        self.expect("=")?;
        self.skip_type(false, false)?;
        self.eat(";");
        Ok(())
    }

    fn skip_declare(&mut self) -> PResult<()> {
        self.bump();
        let mut depth = 0i32;
        while !self.at_eof() {
            let t = self.bump();
            match &t.kind {
                TokenKind::Punct(";") if depth == 0 => return Ok(()),
                TokenKind::Punct("{" | "(" | "[") => depth += 1,
                TokenKind::Punct("}" | ")" | "]") => {
                    depth -= 1;
                    if depth == 0 && t.is_punct("}") {
                        return Ok(());
                    }
                }
                _ => {}
            }
            if depth == 0 && self.peek().nl_before {
                return Ok(());
            }
        }
        Ok(())
    }

    /// Skip a `<...>` type-argument list, counting `>>` as two closers.
    fn skip_type_args(&mut self) -> PResult<()> {
        let line = self.line();
        self.expect("<")?;
        let mut depth = 1i32;
        while depth > 0 {
            let t = self.bump();
            match &t.kind {
                TokenKind::Punct("<") => depth += 1,
                TokenKind::Punct(">") => depth -= 1,
                TokenKind::Punct(">>") => depth -= 2,
                TokenKind::Punct(">>>") => depth -= 3,
                TokenKind::Punct(";" | "{" | "}") | TokenKind::Eof => {
                    return err(line, "unterminated type argument list")
                }
                TokenKind::Punct("=>") | TokenKind::Punct("(") | TokenKind::Punct(")") => {}
                _ => {}
            }
        }
        if depth < 0 {
            return err(line, "unbalanced type argument list");
        }
        Ok(())
    }

    /// Skip a type expression. `stop_at_arrow` ends it at `=>` (arrow return
    /// types); `stop_at_brace` ends it at a `{` opening a function body.
    fn skip_type(&mut self, stop_at_arrow: bool, stop_at_brace: bool) -> PResult<()> {
        let line = self.line();
        let mut depth = 0i32;
        let mut consumed = 0usize;
        let mut prev_continues = true;
        loop {
            let t = self.peek();
            if matches!(t.kind, TokenKind::Eof) {
                break;
            }
            if depth == 0 {
                match &t.kind {
                    TokenKind::Punct("," | ")" | "]" | "}" | ";" | "=") => break,
                    TokenKind::Punct(">") => break,
                    TokenKind::Punct("=>") if stop_at_arrow => break,
                    TokenKind::Punct("{") if stop_at_brace && consumed > 0 && !prev_continues => break,
                    _ => {}
                }
                if t.nl_before && consumed > 0 && !prev_continues && !t.is_punct("|") && !t.is_punct("&") {
                    break;
                }
            }
            match &t.kind {
                TokenKind::Punct("(" | "[" | "{" | "<") => depth += 1,
                TokenKind::Punct(")" | "]" | "}" | ">") => depth -= 1,
                TokenKind::Punct(">>") => depth -= 2,
                TokenKind::Punct(">>>") => depth -= 3,
                _ => {}
            }
            prev_continues =
                matches!(&t.kind, TokenKind::Punct("|" | "&" | ":" | "=>" | "<" | "," | "?" | "." | "(" | "[" | "{"))
                    || t.is_ident("keyof")
                    || t.is_ident("typeof")
                    || t.is_ident("readonly")
                    || t.is_ident("extends")
                    || t.is_ident("is")
                    || t.is_ident("infer")
                    || t.is_ident("new");
            self.bump();
            consumed += 1;
            if depth < 0 {
                return err(line, "unbalanced brackets in type annotation");
            }
        }
        if consumed == 0 {
            return err(line, "expected type");
        }
        Ok(())
    }

    // ---- functions and classes -----------------------------------------

    fn function(&mut self, _is_expr: bool) -> PResult<Rc<Function>> {
        let line = self.line();
        if !self.eat_word("function") {
            return err(line, "expected `function`");
        }
        self.eat("*");
        let name = match &self.peek().kind {
            TokenKind::Ident(n) if !self.is("(") => {
                let n = n.clone();
                self.bump();
                Some(n)
            }
            _ => None,
        };
        if self.ts && self.is("<") {
            self.skip_type_args()?;
        }
        let params = self.params()?;
        if self.ts && self.eat(":") {
            self.skip_type(false, true)?;
        }
        if self.ts && !self.is("{") {
            // Overload signature without a body.
            self.consume_semicolon()?;
            return Ok(Rc::new(Function {
                name,
                params,
                body: FunctionBody::Block(Vec::new()),
                is_arrow: false,
                line,
            }));
        }
        let body = self.block_body()?;
        Ok(Rc::new(Function { name, params, body: FunctionBody::Block(body), is_arrow: false, line }))
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect("(")?;
        let mut params = Vec::new();
        while !self.eat(")") {
            if self.ts {
                while self.peek().ident().is_some_and(|w| TS_MODIFIERS.contains(&w))
                    && self.peek_at(1).ident().is_some()
                {
                    self.bump();
                }
                if self.is_word("this") && self.peek_at(1).is_punct(":") {
                    self.bump();
                    self.bump();
                    self.skip_type(false, false)?;
                    if !self.eat(",") {
                        self.expect(")")?;
                        break;
                    }
                    continue;
                }
            }
            let rest = self.eat("...");
            let mut pattern = self.binding_pattern()?;
            if self.ts {
                self.eat("?");
                if self.eat(":") {
                    self.skip_type(false, false)?;
                }
            }
            if self.eat("=") {
                let d = self.assignment(false)?;
                pattern = Pattern::Default(Box::new(pattern), Box::new(d));
            }
            params.push(Param { pattern, rest });
            if !self.eat(",") {
                self.expect(")")?;
                break;
            }
        }
        Ok(params)
    }

    fn class(&mut self) -> PResult<Rc<Class>> {
        let line = self.line();
        if !self.eat_word("class") {
            return err(line, "expected `class`");
        }
        let name = match &self.peek().kind {
            TokenKind::Ident(n) if n != "extends" && n != "implements" => {
                let n = n.clone();
                self.bump();
                Some(n)
            }
            _ => None,
        };
        if self.ts && self.is("<") {
            self.skip_type_args()?;
        }
        let superclass = if self.eat_word("extends") {
            let e = self.lhs_expression(false)?;
            if self.ts && self.is("<") {
                self.skip_type_args()?;
            }
            Some(e)
        } else {
            None
        };
        if self.ts && self.eat_word("implements") {
            while !self.is("{") && !self.at_eof() {
                self.bump();
            }
        }
        self.expect("{")?;
        let mut members = Vec::new();
        while !self.eat("}") {
            if self.at_eof() {
                return err(self.line(), "unexpected end of input inside class");
            }
            let start = self.pos;
            match self.class_member() {
                Ok(Some(m)) => members.push(m),
                Ok(None) => {}
                Err(e) => {
                    self.record(e);
                    self.synchronize(start);
                }
            }
        }
        Ok(Rc::new(Class { name, superclass, members, line }))
    }

    fn class_member(&mut self) -> PResult<Option<ClassMember>> {
        let line = self.line();
        if self.eat(";") {
            return Ok(None);
        }
        let mut is_static = false;
        if self.is_word("static") && !self.peek_at(1).is_punct("(") && !self.peek_at(1).is_punct("=") {
            self.bump();
            is_static = true;
            if self.is("{") {
                let body = self.block_body()?;
                return Ok(Some(ClassMember {
                    key: PropKey::Name("static".into()),
                    is_static,
                    value: ClassMemberValue::StaticBlock(body),
                    line,
                }));
            }
        }
        if self.ts {
            while self.peek().ident().is_some_and(|w| TS_MODIFIERS.contains(&w) || w == "static")
                && !self.peek_at(1).is_punct("(")
                && !self.peek_at(1).is_punct("=")
                && !self.peek_at(1).is_punct(":")
                && !self.peek_at(1).is_punct(";")
            {
                if self.is_word("static") {
                    is_static = true;
                }
                self.bump();
            }
            if self.is("[") && self.peek_at(1).ident().is_some() && self.peek_at(2).is_punct(":") {
                // Index signature.
                self.skip_to_statement_end();
                return Ok(None);
            }
        }
        let mut accessor = false;
        if (self.is_word("get") || self.is_word("set") || self.is_word("async"))
            && !self.peek_at(1).is_punct("(")
            && !self.peek_at(1).is_punct("=")
            && !self.peek_at(1).is_punct(";")
            && !self.peek_at(1).nl_before
        {
            self.bump();
            accessor = true;
        }
        let generator = self.eat("*");
        let key = self.prop_key()?;
        if self.ts {
            self.eat("?");
            self.eat("!");
        }
        if self.is("(") || (self.ts && self.is("<")) || accessor || generator {
            if self.ts && self.is("<") {
                self.skip_type_args()?;
            }
            let params = self.params()?;
            if self.ts && self.eat(":") {
                self.skip_type(false, true)?;
            }
            if self.ts && !self.is("{") {
                self.consume_semicolon()?;
                return Ok(None);
            }
            let body = self.block_body()?;
            let f = Function {
                name: key.name().map(str::to_string),
                params,
                body: FunctionBody::Block(body),
                is_arrow: false,
                line,
            };
            return Ok(Some(ClassMember { key, is_static, value: ClassMemberValue::Method(Rc::new(f)), line }));
        }
        if self.ts && self.eat(":") {
            self.skip_type(false, false)?;
        }
        let init = if self.eat("=") { Some(self.assignment(false)?) } else { None };
        self.consume_semicolon()?;
        Ok(Some(ClassMember { key, is_static, value: ClassMemberValue::Field(init), line }))
    }

    fn prop_key(&mut self) -> PResult<PropKey> {
        let t = self.bump();
        match t.kind {
            TokenKind::Ident(n) => Ok(PropKey::Name(n)),
            TokenKind::Str(s) => Ok(PropKey::Name(s)),
            TokenKind::Num(n) => Ok(PropKey::Name(n)),
            TokenKind::Punct("#") => Ok(PropKey::Name(format!("#{}", self.ident_name()?))),
            TokenKind::Punct("[") => {
                let e = self.assignment(false)?;
                self.expect("]")?;
                Ok(PropKey::Computed(Box::new(e)))
            }
            k => err(t.line, format!("expected property name, found {k}")),
        }
    }

    // ---- patterns --------------------------------------------------------

    fn binding_pattern(&mut self) -> PResult<Pattern> {
        let line = self.line();
        if self.is("{") {
            self.bump();
            let mut props = Vec::new();
            let mut rest = None;
            while !self.eat("}") {
                if self.eat("...") {
                    rest = Some(Box::new(self.binding_pattern()?));
                } else {
                    let kline = self.line();
                    let key = self.prop_key()?;
                    let mut value = if self.eat(":") {
                        self.binding_pattern()?
                    } else {
                        match &key {
                            PropKey::Name(n) => Pattern::Ident(n.clone(), kline),
                            PropKey::Computed(_) => return err(kline, "computed key needs a binding"),
                        }
                    };
                    if self.eat("=") {
                        let d = self.assignment(false)?;
                        value = Pattern::Default(Box::new(value), Box::new(d));
                    }
                    props.push((key, value));
                }
                if !self.eat(",") {
                    self.expect("}")?;
                    break;
                }
            }
            return Ok(Pattern::Object { props, rest });
        }
        if self.is("[") {
            self.bump();
            let mut elems = Vec::new();
            let mut rest = None;
            while !self.eat("]") {
                if self.eat(",") {
                    elems.push(None);
                    continue;
                }
                if self.eat("...") {
                    rest = Some(Box::new(self.binding_pattern()?));
                } else {
                    let mut p = self.binding_pattern()?;
                    if self.eat("=") {
                        let d = self.assignment(false)?;
                        p = Pattern::Default(Box::new(p), Box::new(d));
                    }
                    elems.push(Some(p));
                }
                if !self.eat(",") {
                    self.expect("]")?;
                    break;
                }
            }
            return Ok(Pattern::Array { elems, rest });
        }
        let name = self.ident_name()?;
        if is_reserved(&name) {
            return err(line, format!("`{name}` cannot be a binding name"));
        }
        Ok(Pattern::Ident(name, line))
    }

    fn to_pattern(&self, e: Expr) -> PResult<Pattern> {
        let line = e.line;
        Ok(match e.kind {
            ExprKind::Ident(n) => Pattern::Ident(n, line),
            ExprKind::Member { .. } | ExprKind::Index { .. } => Pattern::Expr(Box::new(e)),
            ExprKind::Array(items) => {
                let mut elems = Vec::new();
                let mut rest = None;
                for item in items {
                    match item {
                        None => elems.push(None),
                        Some(Expr { kind: ExprKind::Spread(inner), .. }) => {
                            rest = Some(Box::new(self.to_pattern(*inner)?));
                        }
                        Some(x) => elems.push(Some(self.to_pattern(x)?)),
                    }
                }
                Pattern::Array { elems, rest }
            }
            ExprKind::Object(props) => {
                let mut out = Vec::new();
                let mut rest = None;
                for p in props {
                    match p {
                        Prop::KeyValue(k, v) => out.push((k, self.to_pattern(v)?)),
                        Prop::Shorthand(n, l) => out.push((PropKey::Name(n.clone()), Pattern::Ident(n, l))),
                        Prop::Spread(x) => rest = Some(Box::new(self.to_pattern(x)?)),
                        Prop::Method(..) => return err(line, "method in destructuring pattern"),
                    }
                }
                Pattern::Object { props: out, rest }
            }
            ExprKind::Assign { op: "=", target, value } => Pattern::Default(target, value),
            _ => return err(line, "invalid assignment target"),
        })
    }

    // ---- expressions -----------------------------------------------------

    fn expression(&mut self, no_in: bool) -> PResult<Expr> {
        let first = self.assignment(no_in)?;
        if !self.is(",") {
            return Ok(first);
        }
        let line = first.line;
        let mut items = vec![first];
        while self.eat(",") {
            items.push(self.assignment(no_in)?);
        }
        Ok(Expr::new(line, ExprKind::Sequence(items)))
    }

    fn assignment(&mut self, no_in: bool) -> PResult<Expr> {
        if let Some(arrow) = self.try_arrow()? {
            return Ok(arrow);
        }
        if self.is_word("yield") && !self.peek_at(1).is_punct("=") && !self.peek_at(1).is_punct(")") {
            let line = self.line();
            self.bump();
            self.eat("*");
            let arg = if self.is(")")
                || self.is("]")
                || self.is("}")
                || self.is(",")
                || self.is(";")
                || self.peek().nl_before
            {
                None
            } else {
                Some(Box::new(self.assignment(no_in)?))
            };
            return Ok(Expr::new(line, ExprKind::Yield(arg)));
        }
        let left = self.conditional(no_in)?;
        if let TokenKind::Punct(op) = self.peek().kind {
            if ASSIGN_OPS.contains(&op) {
                let line = self.line();
                self.bump();
                let value = self.assignment(no_in)?;
                let target = if op == "=" {
                    self.to_pattern(left)?
                } else {
                    match left.kind {
                        ExprKind::Ident(n) => Pattern::Ident(n, left.line),
                        ExprKind::Member { .. } | ExprKind::Index { .. } => Pattern::Expr(Box::new(left)),
                        _ => return err(line, "invalid compound assignment target"),
                    }
                };
                return Ok(Expr::new(line, ExprKind::Assign { op, target: Box::new(target), value: Box::new(value) }));
            }
        }
        Ok(left)
    }

    /// Parse an arrow function if one starts here.
    fn try_arrow(&mut self) -> PResult<Option<Expr>> {
        let line = self.line();
        let mut off = 0;
        let is_async = self.is_word("async")
            && !self.peek_at(1).nl_before
            && (self.peek_at(1).is_punct("(") || (self.peek_at(1).ident().is_some() && self.peek_at(2).is_punct("=>")));
        if is_async {
            off = 1;
        }
        let t = self.peek_at(off).clone();
        if let TokenKind::Ident(name) = &t.kind {
            if self.peek_at(off + 1).is_punct("=>") && !is_reserved(name) {
                self.pos += off + 2;
                let params = vec![Param { pattern: Pattern::Ident(name.clone(), t.line), rest: false }];
                return self.arrow_body(params, line).map(Some);
            }
            return Ok(None);
        }
        if !(t.is_punct("(") || (self.ts && t.is_punct("<"))) {
            return Ok(None);
        }
        let start = self.pos + off;
        let Some(close) = self.matching_paren(start) else { return Ok(None) };
        let after = &self.toks[close + 1];
        let plausible = after.is_punct("=>") || (self.ts && after.is_punct(":")) || (self.ts && t.is_punct("<"));
        if !plausible {
            return Ok(None);
        }
        let saved_pos = self.pos;
        let saved_errs = self.errors.len();
        self.pos = start;
        let attempt = (|| -> PResult<Vec<Param>> {
            if self.ts && self.is("<") {
                self.skip_type_args()?;
            }
            let params = self.params()?;
            if self.ts && self.eat(":") {
                self.skip_type(true, false)?;
            }
            if !self.is("=>") || self.peek().nl_before {
                return err(self.line(), "not an arrow function");
            }
            Ok(params)
        })();
        match attempt {
            Ok(params) => {
                self.bump();
                self.arrow_body(params, line).map(Some)
            }
            Err(_) => {
                self.pos = saved_pos;
                self.errors.truncate(saved_errs);
                Ok(None)
            }
        }
    }

    fn matching_paren(&self, open: usize) -> Option<usize> {
        let mut depth = 0i32;
        let mut i = open;
        if self.toks[i].is_punct("<") {
            // Generic arrow: find the `(` after the type parameter list.
            while i < self.toks.len() && !self.toks[i].is_punct("(") {
                i += 1;
            }
        }
        while i < self.toks.len() {
            match &self.toks[i].kind {
                TokenKind::Punct("(" | "[" | "{") => depth += 1,
                TokenKind::Punct(")" | "]" | "}") => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(i);
                    }
                }
                TokenKind::Eof => return None,
                _ => {}
            }
            i += 1;
        }
        None
    }

    fn arrow_body(&mut self, params: Vec<Param>, line: Line) -> PResult<Expr> {
        let body = if self.is("{") {
            FunctionBody::Block(self.block_body()?)
        } else {
            FunctionBody::Expr(Box::new(self.assignment(false)?))
        };
        let f = Function { name: None, params, body, is_arrow: true, line };
        Ok(Expr::new(line, ExprKind::Function(Rc::new(f))))
    }

    fn conditional(&mut self, no_in: bool) -> PResult<Expr> {
        let test = self.binary(1, no_in)?;
        if !self.is("?") {
            return Ok(test);
        }
        let line = self.line();
        self.bump();
        let cons = self.assignment(false)?;
        self.expect(":")?;
        let alt = self.assignment(no_in)?;
        Ok(Expr::new(line, ExprKind::Conditional { test: Box::new(test), cons: Box::new(cons), alt: Box::new(alt) }))
    }

    fn binary_prec(&self, no_in: bool) -> Option<(&'static str, u8)> {
        let t = self.peek();
        let op: &'static str = match &t.kind {
            TokenKind::Punct(p) => p,
            TokenKind::Ident(w) if w == "instanceof" => "instanceof",
            TokenKind::Ident(w) if w == "in" && !no_in => "in",
            _ => return None,
        };
        let prec = match op {
            "??" => 1,
            "||" => 2,
            "&&" => 3,
            "|" => 4,
            "^" => 5,
            "&" => 6,
            "==" | "!=" | "===" | "!==" => 7,
            "<" | ">" | "<=" | ">=" | "instanceof" | "in" => 8,
            "<<" | ">>" | ">>>" => 9,
            "+" | "-" => 10,
            "*" | "/" | "%" => 11,
            "**" => 12,
            _ => return None,
        };
        Some((op, prec))
    }

    fn binary(&mut self, min_prec: u8, no_in: bool) -> PResult<Expr> {
        let mut left = self.unary()?;
        loop {
            if self.ts && (self.is_word("as") || self.is_word("satisfies")) && !self.peek().nl_before {
                self.bump();
                if self.is_word("const") {
                    self.bump();
                } else {
                    self.skip_type(false, false)?;
                }
                continue;
            }
            let Some((op, prec)) = self.binary_prec(no_in) else { break };
            if prec < min_prec {
                break;
            }
            let line = self.line();
            self.bump();
            let right = if op == "**" { self.binary(prec, no_in)? } else { self.binary(prec + 1, no_in)? };
            let kind = if matches!(op, "&&" | "||" | "??") {
                ExprKind::Logical { op, left: Box::new(left), right: Box::new(right) }
            } else {
                ExprKind::Binary { op, left: Box::new(left), right: Box::new(right) }
            };
            left = Expr::new(line, kind);
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let line = self.line();
        let t = self.peek().clone();
        let op: Option<&'static str> = match &t.kind {
            TokenKind::Punct(p @ ("!" | "~" | "+" | "-")) => Some(p),
            TokenKind::Ident(w) if w == "typeof" => Some("typeof"),
            TokenKind::Ident(w) if w == "void" => Some("void"),
            TokenKind::Ident(w) if w == "delete" => Some("delete"),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let arg = self.unary()?;
            return Ok(Expr::new(line, ExprKind::Unary { op, arg: Box::new(arg) }));
        }
        if t.is_punct("++") || t.is_punct("--") {
            self.bump();
            let arg = self.unary()?;
            return Ok(Expr::new(line, ExprKind::Update { arg: Box::new(arg) }));
        }
        if t.is_ident("await")
            && !self.peek_at(1).is_punct(")")
            && !self.peek_at(1).is_punct(";")
            && !self.peek_at(1).is_punct("=")
        {
            self.bump();
            let arg = self.unary()?;
            return Ok(Expr::new(line, ExprKind::Await(Box::new(arg))));
        }
        if self.ts && t.is_punct("<") && self.peek_at(1).ident().is_some() {
            // `<T>expr` type assertion.
            self.skip_type_args()?;
            return self.unary();
        }
        let e = self.lhs_expression(true)?;
        if (self.is("++") || self.is("--")) && !self.peek().nl_before {
            self.bump();
            return Ok(Expr::new(line, ExprKind::Update { arg: Box::new(e) }));
        }
        Ok(e)
    }

    fn arguments(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        let mut args = Vec::new();
        while !self.eat(")") {
            let line = self.line();
            if self.eat("...") {
                let inner = self.assignment(false)?;
                args.push(Expr::new(line, ExprKind::Spread(Box::new(inner))));
            } else {
                args.push(self.assignment(false)?);
            }
            if !self.eat(",") {
                self.expect(")")?;
                break;
            }
        }
        Ok(args)
    }

    /// Try to skip `<...>` type arguments before a call; restores on failure.
    fn try_skip_call_type_args(&mut self) -> bool {
        let saved = self.pos;
        let saved_errs = self.errors.len();
        if self.skip_type_args().is_ok() && (self.is("(") || matches!(self.peek().kind, TokenKind::Template(_))) {
            return true;
        }
        self.pos = saved;
        self.errors.truncate(saved_errs);
        false
    }

    fn lhs_expression(&mut self, allow_call: bool) -> PResult<Expr> {
        let line = self.line();
        let mut e = if self.is_word("new") {
            self.bump();
            if self.eat(".") {
                self.ident_name()?;
                Expr::new(line, ExprKind::Literal(Literal::Null))
            } else {
                let callee = self.lhs_expression(false)?;
                if self.ts && self.is("<") {
                    self.try_skip_call_type_args();
                }
                let args = if self.is("(") { self.arguments()? } else { Vec::new() };
                Expr::new(line, ExprKind::New { callee: Box::new(callee), args })
            }
        } else {
            self.primary()?
        };
        loop {
            let line = self.line();
            if self.eat(".") {
                let prop = if self.eat("#") { format!("#{}", self.ident_name()?) } else { self.ident_name()? };
                e = Expr::new(line, ExprKind::Member { object: Box::new(e), prop, optional: false });
            } else if self.is("?.") {
                self.bump();
                if self.is("(") {
                    let args = self.arguments()?;
                    e = Expr::new(line, ExprKind::Call { callee: Box::new(e), args, optional: true });
                } else if self.eat("[") {
                    let index = self.expression(false)?;
                    self.expect("]")?;
                    e = Expr::new(line, ExprKind::Index { object: Box::new(e), index: Box::new(index) });
                } else {
                    let prop = self.ident_name()?;
                    e = Expr::new(line, ExprKind::Member { object: Box::new(e), prop, optional: true });
                }
            } else if self.is("[") {
                self.bump();
                let index = self.expression(false)?;
                self.expect("]")?;
                e = match index.kind {
                    ExprKind::Str(s) => {
                        Expr::new(line, ExprKind::Member { object: Box::new(e), prop: s, optional: false })
                    }
                    kind => Expr::new(
                        line,
                        ExprKind::Index { object: Box::new(e), index: Box::new(Expr { line: index.line, kind }) },
                    ),
                };
            } else if allow_call && self.is("(") {
                let args = self.arguments()?;
                e = Expr::new(line, ExprKind::Call { callee: Box::new(e), args, optional: false });
            } else if let TokenKind::Template(_) = &self.peek().kind {
                let t = self.bump();
                let exprs = self.template_exprs(t)?;
                e = Expr::new(line, ExprKind::TaggedTemplate { tag: Box::new(e), exprs });
            } else if self.ts && self.is("!") && !self.peek().nl_before {
                self.bump();
            } else if self.ts && allow_call && self.is("<") && !self.peek().nl_before && self.try_skip_call_type_args()
            {
                continue;
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn template_exprs(&mut self, t: Token) -> PResult<Vec<Expr>> {
        let TokenKind::Template(tpl) = t.kind else { return err(t.line, "expected template") };
        let mut exprs = Vec::new();
        for toks in tpl.exprs {
            let mut sub = Parser { toks, pos: 0, errors: Vec::new(), ts: self.ts };
            let e = sub.expression(false);
            let trailing = (!sub.at_eof()).then(|| sub.line());
            self.errors.append(&mut sub.errors);
            let e = e?;
            if let Some(line) = trailing {
                return err(line, "unexpected token in template substitution");
            }
            exprs.push(e);
        }
        Ok(exprs)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        let line = t.line;
        let kind = match t.kind {
            TokenKind::Ident(ref w) => match w.as_str() {
                "this" => {
                    self.bump();
                    ExprKind::This
                }
                "super" => {
                    self.bump();
                    ExprKind::Super
                }
                "null" | "undefined" => {
                    self.bump();
                    if w == "null" {
                        ExprKind::Literal(Literal::Null)
                    } else {
                        ExprKind::Ident("undefined".into())
                    }
                }
                "true" | "false" => {
                    self.bump();
                    ExprKind::Literal(Literal::Bool)
                }
                "function" => ExprKind::Function(self.function(true)?),
                "async" if self.peek_at(1).is_ident("function") && !self.peek_at(1).nl_before => {
                    self.bump();
                    ExprKind::Function(self.function(true)?)
                }
                "class" => ExprKind::Class(self.class()?),
                "import" => {
                    self.bump();
                    if self.eat(".") {
                        self.ident_name()?;
                        ExprKind::Literal(Literal::Null)
                    } else {
                        ExprKind::Ident("import".into())
                    }
                }
                w if is_reserved(w) => return err(line, format!("unexpected keyword `{w}`")),
                _ => {
                    self.bump();
                    ExprKind::Ident(w.clone())
                }
            },
            TokenKind::Num(_) => {
                self.bump();
                ExprKind::Literal(Literal::Number)
            }
            TokenKind::Str(ref s) => {
                self.bump();
                ExprKind::Str(s.clone())
            }
            TokenKind::Template(_) => {
                let t = self.bump();
                let quasis = match &t.kind {
                    TokenKind::Template(tpl) => tpl.quasis.clone(),
                    _ => Vec::new(),
                };
                let exprs = self.template_exprs(t)?;
                ExprKind::Template { quasis, exprs }
            }
            TokenKind::Regex(_) => {
                self.bump();
                ExprKind::Literal(Literal::Regex)
            }
            TokenKind::Punct("(") => {
                self.bump();
                let e = self.expression(false)?;
                self.expect(")")?;
                return Ok(e);
            }
            TokenKind::Punct("[") => {
                self.bump();
                let mut items = Vec::new();
                while !self.eat("]") {
                    if self.eat(",") {
                        items.push(None);
                        continue;
                    }
                    let l = self.line();
                    if self.eat("...") {
                        let inner = self.assignment(false)?;
                        items.push(Some(Expr::new(l, ExprKind::Spread(Box::new(inner)))));
                    } else {
                        items.push(Some(self.assignment(false)?));
                    }
                    if !self.eat(",") {
                        self.expect("]")?;
                        break;
                    }
                }
                ExprKind::Array(items)
            }
            TokenKind::Punct("{") => self.object_literal()?,
            TokenKind::Punct("@") => return err(line, "decorators are not supported"),
            TokenKind::Invalid => return err(line, "invalid token"),
            TokenKind::Eof => return err(line, "unexpected end of input"),
            ref k => return err(line, format!("unexpected {k}")),
        };
        Ok(Expr::new(line, kind))
    }

    fn object_literal(&mut self) -> PResult<ExprKind> {
        self.expect("{")?;
        let mut props = Vec::new();
        while !self.eat("}") {
            let line = self.line();
            if self.eat("...") {
                props.push(Prop::Spread(self.assignment(false)?));
            } else {
                let mut modifier = false;
                if (self.is_word("get") || self.is_word("set") || self.is_word("async"))
                    && !self.peek_at(1).is_punct(",")
                    && !self.peek_at(1).is_punct(":")
                    && !self.peek_at(1).is_punct("(")
                    && !self.peek_at(1).is_punct("}")
                {
                    self.bump();
                    modifier = true;
                }
                let generator = self.eat("*");
                let key_tok = self.peek().clone();
                let key = self.prop_key()?;
                if self.is("(") || modifier || generator {
                    let params = self.params()?;
                    if self.ts && self.eat(":") {
                        self.skip_type(false, true)?;
                    }
                    let body = self.block_body()?;
                    let f = Function {
                        name: key.name().map(str::to_string),
                        params,
                        body: FunctionBody::Block(body),
                        is_arrow: false,
                        line,
                    };
                    props.push(Prop::Method(key, Rc::new(f)));
                } else if self.eat(":") {
                    props.push(Prop::KeyValue(key, self.assignment(false)?));
                } else if let (TokenKind::Ident(n), PropKey::Name(_)) = (&key_tok.kind, &key) {
                    if self.eat("=") {
                        // Shorthand with default, only valid as a pattern.
                        let d = self.assignment(false)?;
                        let target = Pattern::Ident(n.clone(), line);
                        let value =
                            Expr::new(line, ExprKind::Assign { op: "=", target: Box::new(target), value: Box::new(d) });
                        props.push(Prop::KeyValue(PropKey::Name(n.clone()), value));
                    } else {
                        props.push(Prop::Shorthand(n.clone(), line));
                    }
                } else {
                    return err(line, "expected `:` in object literal");
                }
            }
            if !self.eat(",") {
                self.expect("}")?;
                break;
            }
        }
        Ok(ExprKind::Object(props))
    }
}

fn is_reserved(w: &str) -> bool {
    matches!(
        w,
        "break"
            | "case"
            | "catch"
            | "continue"
            | "debugger"
            | "default"
            | "do"
            | "else"
            | "finally"
            | "for"
            | "if"
            | "return"
            | "switch"
            | "throw"
            | "try"
            | "var"
            | "while"
            | "with"
            | "const"
            | "export"
            | "extends"
            | "in"
            | "instanceof"
            | "typeof"
            | "void"
            | "delete"
            | "new"
            | "enum"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> SyntaxTree {
        parse_source(src, "t.js", 1, false)
    }

    fn parse_ts(src: &str) -> SyntaxTree {
        parse_source(src, "t.ts", 1, true)
    }

    #[test]
    fn minimal_declaration() {
        let t = parse("var x = 1;");
        assert!(t.parse_errors.is_empty());
        assert_eq!(t.body.len(), 1);
        assert!(matches!(t.body[0].kind, StmtKind::Var { kind: VarKind::Var, ref decls } if decls.len() == 1));
    }

    #[test]
    fn function_arity() {
        let t = parse("function f(a){return a+1}");
        assert!(t.parse_errors.is_empty());
        let StmtKind::Function(f) = &t.body[0].kind else { panic!() };
        assert_eq!(f.name.as_deref(), Some("f"));
        assert_eq!(f.arity(), 1);
    }

    #[test]
    fn unterminated_string_recovers() {
        let t = parse("var a = 1;\nvar b = a;\nvar c = 'oops;\nvar d = 2;\n");
        assert!(t.parse_errors.iter().any(|(l, _)| *l == 3), "{:?}", t.parse_errors);
        assert!(t.body.iter().any(|s| s.line == 1));
        assert!(t.body.iter().any(|s| s.line == 2));
        assert!(!t.body.iter().any(|s| s.line == 3));
    }

    #[test]
    fn asi_and_arrows() {
        let t = parse("const f = (a, b) => a + b\nlet g = x => { return x }\nf(1, 2)\n");
        assert!(t.parse_errors.is_empty(), "{:?}", t.parse_errors);
        assert_eq!(t.body.len(), 3);
        assert_eq!(t.functions().len(), 2);
    }

    #[test]
    fn node_red_module_shape() {
        let src = r#"
module.exports = function(RED) {
    "use strict";
    function LowerCaseNode(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        node.on('input', function(msg, send, done) {
            msg.payload = msg.payload.toLowerCase();
            send = send || function() { node.send.apply(node, arguments) };
            send(msg);
            if (done) { done(); }
        });
    }
    RED.nodes.registerType("lower-case", LowerCaseNode);
}
"#;
        let t = parse(src);
        assert!(t.parse_errors.is_empty(), "{:?}", t.parse_errors);
        assert_eq!(t.functions().len(), 4);
    }

    #[test]
    fn modern_syntax() {
        let src = r#"
import fs from 'fs';
import { a as b, c } from "./x";
class A extends B {
  #p = 1;
  static s = 2;
  constructor(x) { super(x); this.v = x?.y ?? 3; }
  get g() { return this.#p }
  async m({ a, b: [c = 1, ...d] }, ...rest) { for (const [k, v] of Object.entries(a)) { await k; } }
}
const o = { x, y: 1, [k]: 2, ...z, m() {}, get q() { return 1 } };
label: for (let i = 0, j = 1; i < 3; i++) { if (i in o) continue label; else break; }
switch (x) { case 1: f(); break; default: g(); }
try { h() } catch { } finally { i() }
const t = `a ${b + `c${d}`} e`;
const r = /ab+c/i.test(s) ? 1 : 2;
export default function () {}
"#;
        let t = parse(src);
        assert!(t.parse_errors.is_empty(), "{:?}", t.parse_errors);
    }

    #[test]
    fn typescript_annotations_are_dropped() {
        let src = r#"
import type { Foo } from './foo';
interface Opts { a: number; b?: string }
type Cb = (err: Error | null, v?: string) => void;
enum Color { Red, Green }
export class N<T extends object> implements X {
  private readonly name: string = 'n';
  constructor(private red: any, config: Opts) { super(); }
  handle(msg: Record<string, unknown>): Promise<void> {
    const m = msg as any;
    const n = new Map<string, number>();
    const v = m!.payload as string;
    return f<number>(v);
  }
  abstract x(): void;
}
function f<T>(a: T, cb?: (x: number) => void): T { return a }
const g = (a: number, b: string): string => a + b;
let z: Array<{ k: string }> = [];
"#;
        let t = parse_ts(src);
        assert!(t.parse_errors.is_empty(), "{:?}", t.parse_errors);
        assert_eq!(t.functions().len(), 4);
    }

    #[test]
    fn garbage_is_contained() {
        let t = parse("a(;\nvar ok = 1;\n}}}\nb = [1, 2;\nvar ok2 = 2\n");
        assert!(!t.parse_errors.is_empty());
        let ok: Vec<_> = t.body.iter().filter(|s| matches!(s.kind, StmtKind::Var { .. })).collect();
        assert_eq!(ok.len(), 2, "{:?}", t.parse_errors);
    }

    #[test]
    fn binary_precedence() {
        let t = parse("x = a + b * c - d;");
        let StmtKind::Expr(e) = &t.body[0].kind else { panic!() };
        let ExprKind::Assign { value, .. } = &e.kind else { panic!() };
        let ExprKind::Binary { op, left, .. } = &value.kind else { panic!() };
        assert_eq!(*op, "-");
        assert!(matches!(left.kind, ExprKind::Binary { op: "+", .. }));
    }
}
