//! Tokenizer for the supported script grammar.
//!
//! The lexer never fails: malformed input produces an [`TokenKind::Invalid`]
//! token plus an entry in the error list, and scanning resumes on the next
//! line. Template literals are lexed eagerly, with each `${...}` substitution
//! carried as its own token vector.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Num(String),
    Str(String),
    Template(Box<TemplateToken>),
    Regex(String),
    Punct(&'static str),
    /// Placeholder for a region the lexer could not scan.
    Invalid,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateToken {
    pub quasis: Vec<String>,
    pub exprs: Vec<Vec<Token>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    /// A line terminator occurred between this token and the previous one.
    pub nl_before: bool,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        matches!(&self.kind, TokenKind::Punct(q) if *q == p)
    }

    pub fn is_ident(&self, name: &str) -> bool {
        matches!(&self.kind, TokenKind::Ident(n) if n == name)
    }

    pub fn ident(&self) -> Option<&str> {
        match &self.kind {
            TokenKind::Ident(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "`{s}`"),
            TokenKind::Num(s) => write!(f, "number {s}"),
            TokenKind::Str(_) => f.write_str("string"),
            TokenKind::Template(_) => f.write_str("template"),
            TokenKind::Regex(_) => f.write_str("regular expression"),
            TokenKind::Punct(p) => write!(f, "`{p}`"),
            TokenKind::Invalid => f.write_str("invalid token"),
            TokenKind::Eof => f.write_str("end of input"),
        }
    }
}

const PUNCTUATORS: &[&str] = &[
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "??=", "=>", "==", "!=", "<=", ">=", "&&",
    "||", "??", "?.", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "**", "<<", ">>", "{", "}", "(", ")",
    "[", "]", ";", ",", "<", ">", "+", "-", "*", "/", "%", "&", "|", "^", "!", "~", "?", ":", "=", ".", "@", "#",
];

/// Keywords after which a `/` starts a regular expression rather than a division.
const REGEX_PRECEDING_WORDS: &[&str] = &[
    "return",
    "typeof",
    "instanceof",
    "in",
    "of",
    "new",
    "delete",
    "void",
    "throw",
    "case",
    "do",
    "else",
    "yield",
    "await",
];

pub struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    errors: &'a mut Vec<(u32, String)>,
}

/// Tokenize `source`, numbering lines from `first_line`.
pub fn tokenize(source: &str, first_line: u32, errors: &mut Vec<(u32, String)>) -> Vec<Token> {
    let mut lexer = Lexer { chars: source.chars().collect(), pos: 0, line: first_line, errors };
    let mut out = lexer.run(false);
    let line = lexer.line;
    out.push(Token { kind: TokenKind::Eof, line, nl_before: true });
    out
}

impl<'a> Lexer<'a> {
    fn peek(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn error(&mut self, line: u32, msg: impl Into<String>) {
        self.errors.push((line, msg.into()));
    }

    /// Scan tokens until end of input, or, inside a template substitution,
    /// until the `}` that closes it.
    fn run(&mut self, in_template: bool) -> Vec<Token> {
        let mut out: Vec<Token> = Vec::new();
        let mut depth = 0usize;
        let mut nl = false;
        loop {
            nl |= self.skip_trivia();
            let Some(c) = self.peek(0) else {
                if in_template {
                    self.error(self.line, "unterminated template substitution");
                }
                return out;
            };
            let line = self.line;
            if in_template {
                if c == '{' {
                    depth += 1;
                } else if c == '}' {
                    if depth == 0 {
                        self.pos += 1;
                        return out;
                    }
                    depth -= 1;
                }
            }
            let kind = self.scan(c, out.last());
            out.push(Token { kind, line, nl_before: nl });
            nl = false;
        }
    }

    /// Skip whitespace and comments; report whether a newline was crossed.
    fn skip_trivia(&mut self) -> bool {
        let mut nl = false;
        while let Some(c) = self.peek(0) {
            match c {
                '\n' => {
                    nl = true;
                    self.line += 1;
                    self.pos += 1;
                }
                c if c.is_whitespace() || c == '\u{feff}' => self.pos += 1,
                '/' if self.peek(1) == Some('/') => {
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        self.pos += 1;
                    }
                }
                '/' if self.peek(1) == Some('*') => {
                    let start = self.line;
                    self.pos += 2;
                    loop {
                        match self.peek(0) {
                            None => {
                                self.error(start, "unterminated block comment");
                                break;
                            }
                            Some('*') if self.peek(1) == Some('/') => {
                                self.pos += 2;
                                break;
                            }
                            Some('\n') => {
                                nl = true;
                                self.line += 1;
                                self.pos += 1;
                            }
                            Some(_) => self.pos += 1,
                        }
                    }
                }
                // Hashbang on the first line.
                '#' if self.pos == 0 && self.peek(1) == Some('!') => {
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
        nl
    }

    fn scan(&mut self, c: char, prev: Option<&Token>) -> TokenKind {
        if is_ident_start(c) {
            let start = self.pos;
            while self.peek(0).is_some_and(is_ident_part) {
                self.pos += 1;
            }
            return TokenKind::Ident(self.chars[start..self.pos].iter().collect());
        }
        if c.is_ascii_digit() || (c == '.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) {
            return self.scan_number();
        }
        match c {
            '"' | '\'' => return self.scan_string(c),
            '`' => return self.scan_template(),
            '/' if regex_allowed(prev) => return self.scan_regex(),
            _ => {}
        }
        for p in PUNCTUATORS {
            if self.matches(p) {
                // `?.` followed by a digit is a conditional with a decimal.
                if *p == "?." && self.peek(2).is_some_and(|d| d.is_ascii_digit()) {
                    continue;
                }
                self.pos += p.chars().count();
                return TokenKind::Punct(p);
            }
        }
        self.error(self.line, format!("unexpected character {c:?}"));
        self.pos += 1;
        TokenKind::Invalid
    }

    fn matches(&self, p: &str) -> bool {
        p.chars().enumerate().all(|(i, ch)| self.peek(i) == Some(ch))
    }

    fn scan_number(&mut self) -> TokenKind {
        let start = self.pos;
        if self.peek(0) == Some('0') && self.peek(1).is_some_and(|c| "xXoObB".contains(c)) {
            self.pos += 2;
            while self.peek(0).is_some_and(|c| c.is_ascii_hexdigit() || c == '_') {
                self.pos += 1;
            }
        } else {
            while self.peek(0).is_some_and(|c| c.is_ascii_digit() || c == '_' || c == '.') {
                self.pos += 1;
            }
            if self.peek(0).is_some_and(|c| c == 'e' || c == 'E') {
                self.pos += 1;
                if self.peek(0).is_some_and(|c| c == '+' || c == '-') {
                    self.pos += 1;
                }
                while self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            }
        }
        if self.peek(0) == Some('n') {
            self.pos += 1;
        }
        TokenKind::Num(self.chars[start..self.pos].iter().collect())
    }

    fn scan_string(&mut self, quote: char) -> TokenKind {
        let line = self.line;
        self.pos += 1;
        let mut value = String::new();
        loop {
            match self.peek(0) {
                None | Some('\n') => {
                    self.error(line, "unterminated string literal");
                    return TokenKind::Invalid;
                }
                Some(c) if c == quote => {
                    self.pos += 1;
                    return TokenKind::Str(value);
                }
                Some('\\') => {
                    self.pos += 1;
                    match self.peek(0) {
                        Some('\n') => {
                            self.line += 1;
                        }
                        Some('n') => value.push('\n'),
                        Some('t') => value.push('\t'),
                        Some('r') => value.push('\r'),
                        Some(c) => value.push(c),
                        None => continue,
                    }
                    self.pos += 1;
                }
                Some(c) => {
                    value.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn scan_template(&mut self) -> TokenKind {
        let line = self.line;
        self.pos += 1;
        let mut quasis = Vec::new();
        let mut exprs = Vec::new();
        let mut current = String::new();
        loop {
            match self.peek(0) {
                None => {
                    self.error(line, "unterminated template literal");
                    return TokenKind::Invalid;
                }
                Some('`') => {
                    self.pos += 1;
                    quasis.push(current);
                    return TokenKind::Template(Box::new(TemplateToken { quasis, exprs }));
                }
                Some('\\') => {
                    if let Some(c) = self.peek(1) {
                        if c == '\n' {
                            self.line += 1;
                        }
                        current.push(c);
                    }
                    self.pos += 2;
                }
                Some('$') if self.peek(1) == Some('{') => {
                    self.pos += 2;
                    quasis.push(std::mem::take(&mut current));
                    let mut inner = self.run(true);
                    let eof_line = self.line;
                    inner.push(Token { kind: TokenKind::Eof, line: eof_line, nl_before: false });
                    exprs.push(inner);
                }
                Some(c) => {
                    if c == '\n' {
                        self.line += 1;
                    }
                    current.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn scan_regex(&mut self) -> TokenKind {
        let line = self.line;
        let start = self.pos;
        self.pos += 1;
        let mut in_class = false;
        loop {
            match self.peek(0) {
                None | Some('\n') => {
                    self.error(line, "unterminated regular expression");
                    return TokenKind::Invalid;
                }
                Some('\\') => self.pos += 2,
                Some('[') => {
                    in_class = true;
                    self.pos += 1;
                }
                Some(']') => {
                    in_class = false;
                    self.pos += 1;
                }
                Some('/') if !in_class => {
                    self.pos += 1;
                    break;
                }
                Some(_) => self.pos += 1,
            }
        }
        while self.peek(0).is_some_and(is_ident_part) {
            self.pos += 1;
        }
        TokenKind::Regex(self.chars[start..self.pos].iter().collect())
    }
}

fn regex_allowed(prev: Option<&Token>) -> bool {
    match prev.map(|t| &t.kind) {
        None => true,
        Some(TokenKind::Punct(p)) => !matches!(*p, ")" | "]" | "}"),
        Some(TokenKind::Ident(w)) => REGEX_PRECEDING_WORDS.contains(&w.as_str()),
        Some(TokenKind::Invalid) => true,
        Some(_) => false,
    }
}

pub fn is_ident_start(c: char) -> bool {
    c == '$' || c == '_' || c.is_alphabetic()
}

pub fn is_ident_part(c: char) -> bool {
    c == '$' || c == '_' || c.is_alphanumeric() || c == '\u{200c}' || c == '\u{200d}'
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        let mut errs = Vec::new();
        tokenize(src, 1, &mut errs).into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn regex_versus_division() {
        let k = kinds("a = b / c; d = /x+/g.test(s)");
        assert!(k.contains(&TokenKind::Punct("/")));
        assert!(k.contains(&TokenKind::Regex("/x+/g".into())));
    }

    #[test]
    fn template_substitutions_are_nested() {
        let k = kinds("`a${ {x:1}.x }b${c}`");
        let TokenKind::Template(t) = &k[0] else { panic!("{k:?}") };
        assert_eq!(t.quasis, vec!["a", "b", ""]);
        assert_eq!(t.exprs.len(), 2);
        assert_eq!(t.exprs[1][0].kind, TokenKind::Ident("c".into()));
    }

    #[test]
    fn unterminated_string_reports_line() {
        let mut errs = Vec::new();
        let toks = tokenize("a;\nb;\nc = 'oops;\nd;", 1, &mut errs);
        assert_eq!(errs, vec![(3, "unterminated string literal".to_string())]);
        assert!(toks.iter().any(|t| t.kind == TokenKind::Invalid && t.line == 3));
        assert!(toks.iter().any(|t| t.is_ident("d") && t.line == 4 && t.nl_before));
    }

    #[test]
    fn comments_and_newlines() {
        let mut errs = Vec::new();
        let toks = tokenize("a // x\n/* y\n z */ b", 1, &mut errs);
        assert!(errs.is_empty());
        assert_eq!(toks[1].line, 3);
        assert!(toks[1].nl_before);
    }
}
