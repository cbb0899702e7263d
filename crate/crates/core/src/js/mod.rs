//! Script front end: tokenizer, syntax tree and error-tolerant parser.

pub mod ast;
pub mod lexer;
pub mod parser;

pub use ast::SyntaxTree;

/// Parse a JavaScript file. Never fails; problems land in `parse_errors`.
pub fn parse_js(source: &str, file: &str) -> SyntaxTree {
    parser::parse_source(source, file, 1, false)
}

/// Parse a TypeScript file, dropping type-level syntax during the parse.
pub fn parse_ts(source: &str, file: &str) -> SyntaxTree {
    parser::parse_source(source, file, 1, true)
}
