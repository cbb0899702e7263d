//! Declared port counts from the editor HTML of each node.
//!
//! Registrations are found syntactically: `RED.nodes.registerType("name", {...})`
//! inside script regions, with the configuration object captured by brace
//! matching. Only the `inputs` and `outputs` keys of that object are read.

pub mod html;

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::diag::Diagnostic;
use crate::js::lexer::{tokenize, Token, TokenKind};

pub use html::{script_regions, ScriptRegion};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Location {
    pub file: String,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRegistration {
    pub node_name: String,
    pub properties_text: String,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub node_name: String,
    pub inputs: u32,
    pub outputs: u32,
    pub parsable: bool,
    pub location: Location,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecTotals {
    pub s_in: u32,
    pub s_out: u32,
    pub unparsable_nodes: u32,
}

impl std::ops::Add for SpecTotals {
    type Output = SpecTotals;

    fn add(self, rhs: SpecTotals) -> SpecTotals {
        SpecTotals {
            s_in: self.s_in + rhs.s_in,
            s_out: self.s_out + rhs.s_out,
            unparsable_nodes: self.unparsable_nodes + rhs.unparsable_nodes,
        }
    }
}

fn registration_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\bRED\s*\.\s*nodes\s*\.\s*registerType\s*\(").unwrap())
}

/// Blank out comment bodies and string contents, keeping byte offsets and
/// newlines, so brace matching and pattern search only see code.
fn mask_code(text: &str) -> String {
    #[derive(Clone, Copy, PartialEq)]
    enum State {
        Code,
        Line,
        Block,
        Quote(char),
    }
    let mut out = String::with_capacity(text.len());
    let mut state = State::Code;
    let mut chars = text.chars().peekable();
    let blank = |out: &mut String, c: char| {
        if c == '\n' {
            out.push('\n');
        } else {
            out.extend(std::iter::repeat_n(' ', c.len_utf8()));
        }
    };
    while let Some(c) = chars.next() {
        match state {
            State::Code => match c {
                '/' if chars.peek() == Some(&'/') => {
                    chars.next();
                    out.push_str("  ");
                    state = State::Line;
                }
                '/' if chars.peek() == Some(&'*') => {
                    chars.next();
                    out.push_str("  ");
                    state = State::Block;
                }
                '"' | '\'' | '`' => {
                    out.push(c);
                    state = State::Quote(c);
                }
                _ => out.push(c),
            },
            State::Line => {
                if c == '\n' {
                    state = State::Code;
                }
                blank(&mut out, c);
            }
            State::Block => {
                if c == '*' && chars.peek() == Some(&'/') {
                    chars.next();
                    out.push_str("  ");
                    state = State::Code;
                } else {
                    blank(&mut out, c);
                }
            }
            State::Quote(q) => {
                if c == '\\' {
                    blank(&mut out, c);
                    if let Some(n) = chars.next() {
                        blank(&mut out, n);
                    }
                } else if c == q {
                    out.push(c);
                    state = State::Code;
                } else if c == '\n' && q != '`' {
                    out.push('\n');
                    state = State::Code;
                } else {
                    blank(&mut out, c);
                }
            }
        }
    }
    out
}

/// Offset of the bracket closing the one at `open`, over masked text.
fn matching_close(masked: &str, open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, b) in masked.bytes().enumerate().skip(open) {
        match b {
            b'{' | b'(' | b'[' => depth += 1,
            b'}' | b')' | b']' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

fn skip_ws(masked: &str, mut i: usize) -> usize {
    let bytes = masked.as_bytes();
    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
        i += 1;
    }
    i
}

/// Registrations in one script body whose first line is `first_line`.
pub fn extract_from_script(
    script: &str,
    file: &str,
    first_line: u32,
    warnings: &mut Vec<Diagnostic>,
) -> Vec<RawRegistration> {
    let masked = mask_code(script);
    let bytes = masked.as_bytes();
    let line_of = |off: usize| first_line + masked.as_bytes()[..off].iter().filter(|&&b| b == b'\n').count() as u32;
    let mut out = Vec::new();
    for m in registration_re().find_iter(&masked) {
        let line = line_of(m.start());
        let mut i = skip_ws(&masked, m.end());
        let quote = bytes.get(i).copied();
        if !matches!(quote, Some(b'"' | b'\'' | b'`')) {
            warnings.push(Diagnostic::new(file, line, "node registration with a non-literal type name"));
            continue;
        }
        let Some(close) = masked[i + 1..].find(quote.unwrap() as char).map(|p| p + i + 1) else {
            warnings.push(Diagnostic::new(file, line, "unterminated node type name"));
            continue;
        };
        let node_name = script[i + 1..close].to_string();
        if node_name.is_empty() {
            warnings.push(Diagnostic::new(file, line, "node registration with an empty type name"));
            continue;
        }
        i = skip_ws(&masked, close + 1);
        if bytes.get(i) != Some(&b',') {
            warnings.push(Diagnostic::new(file, line, format!("registration of `{node_name}` has no configuration")));
            continue;
        }
        i = skip_ws(&masked, i + 1);
        let properties_text = if bytes.get(i) == Some(&b'{') {
            match matching_close(&masked, i) {
                Some(end) => script[i..=end].to_string(),
                None => {
                    warnings.push(Diagnostic::new(
                        file,
                        line,
                        format!("unbalanced configuration object for `{node_name}`"),
                    ));
                    continue;
                }
            }
        } else {
            // Configuration passed by reference; kept so the node is counted
            // as unparsable rather than silently dropped.
            let call_open = m.end() - 1;
            let end = matching_close(&masked, call_open).unwrap_or(bytes.len());
            script[i..end].trim().to_string()
        };
        out.push(RawRegistration { node_name, properties_text, location: Location { file: file.to_string(), line } });
    }
    out
}

/// Every node registration inside the code script regions of `html_text`,
/// in document order.
pub fn extract_registrations(html_text: &str, file: &str, warnings: &mut Vec<Diagnostic>) -> Vec<RawRegistration> {
    let (regions, unclosed) = script_regions(html_text);
    for u in unclosed {
        warnings.push(Diagnostic::new(file, u.line, "unterminated script region"));
    }
    regions
        .iter()
        .filter(|r| r.is_code())
        .flat_map(|r| extract_from_script(&r.text, file, r.first_line, warnings))
        .collect()
}

enum Count {
    Missing,
    Literal(u32),
    NonLiteral,
}

fn decimal_literal(tokens: &[Token]) -> Option<u32> {
    match tokens {
        [Token { kind: TokenKind::Num(n), .. }] if n.bytes().all(|b| b.is_ascii_digit()) => n.parse().ok(),
        _ => None,
    }
}

/// Read `inputs` and `outputs` from the top level of the configuration object.
fn read_counts(text: &str) -> Option<(Count, Count)> {
    let mut errors = Vec::new();
    let tokens = tokenize(text, 1, &mut errors);
    if !errors.is_empty() || !tokens.first().is_some_and(|t| t.is_punct("{")) {
        return None;
    }
    let mut inputs = Count::Missing;
    let mut outputs = Count::Missing;
    let mut depth = 0usize;
    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        match &t.kind {
            TokenKind::Punct("{" | "(" | "[") => depth += 1,
            TokenKind::Punct("}" | ")" | "]") => depth = depth.saturating_sub(1),
            TokenKind::Ident(key) | TokenKind::Str(key)
                if depth == 1
                    && (key == "inputs" || key == "outputs")
                    && (tokens[i - 1].is_punct("{") || tokens[i - 1].is_punct(",")) =>
            {
                let slot = if key == "inputs" { &mut inputs } else { &mut outputs };
                if !tokens.get(i + 1).is_some_and(|n| n.is_punct(":")) {
                    // Shorthand or method syntax.
                    *slot = Count::NonLiteral;
                    i += 1;
                    continue;
                }
                let start = i + 2;
                let mut end = start;
                let mut d = 0usize;
                while end < tokens.len() {
                    match &tokens[end].kind {
                        TokenKind::Punct("{" | "(" | "[") => d += 1,
                        TokenKind::Punct("}" | ")" | "]") if d == 0 => break,
                        TokenKind::Punct("}" | ")" | "]") => d -= 1,
                        TokenKind::Punct(",") if d == 0 => break,
                        TokenKind::Eof => break,
                        _ => {}
                    }
                    end += 1;
                }
                *slot = decimal_literal(&tokens[start..end]).map_or(Count::NonLiteral, Count::Literal);
                i = end;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    Some((inputs, outputs))
}

pub fn parse_port_counts(reg: &RawRegistration) -> NodeSpec {
    let mut spec = NodeSpec {
        node_name: reg.node_name.clone(),
        inputs: 0,
        outputs: 0,
        parsable: false,
        location: reg.location.clone(),
        warnings: Vec::new(),
    };
    let Some((inputs, outputs)) = read_counts(&reg.properties_text) else {
        spec.warnings.push("configuration is not an object literal".into());
        return spec;
    };
    if matches!(inputs, Count::NonLiteral) || matches!(outputs, Count::NonLiteral) {
        spec.warnings.push("port count is not an integer literal".into());
        return spec;
    }
    spec.parsable = true;
    spec.inputs = match inputs {
        Count::Literal(n) if n > 1 => {
            spec.warnings.push(format!("inputs = {n} clamped to 1"));
            1
        }
        Count::Literal(n) => n,
        _ => {
            spec.warnings.push("inputs missing, assumed 0".into());
            0
        }
    };
    spec.outputs = match outputs {
        Count::Literal(n) => n,
        _ => {
            spec.warnings.push("outputs missing, assumed 0".into());
            0
        }
    };
    spec
}

pub fn spec_totals(specs: &[NodeSpec]) -> SpecTotals {
    specs.iter().fold(SpecTotals::default(), |acc, s| {
        if s.parsable {
            SpecTotals { s_in: acc.s_in + s.inputs, s_out: acc.s_out + s.outputs, ..acc }
        } else {
            SpecTotals { unparsable_nodes: acc.unparsable_nodes + 1, ..acc }
        }
    })
}

/// Extract and parse every node spec in an HTML file.
pub fn parse_html_specs(html_text: &str, file: &str, warnings: &mut Vec<Diagnostic>) -> Vec<NodeSpec> {
    extract_registrations(html_text, file, warnings).iter().map(parse_port_counts).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(config: &str) -> NodeSpec {
        let html = format!("<script type=\"text/javascript\">\nRED.nodes.registerType('n', {config});\n</script>");
        let mut w = Vec::new();
        let specs = parse_html_specs(&html, "n.html", &mut w);
        assert_eq!(specs.len(), 1, "{w:?}");
        specs.into_iter().next().unwrap()
    }

    #[test]
    fn lower_case_example() {
        let html = r#"<script type="text/javascript">
    RED.nodes.registerType('lower-case',{
        category: 'function',
        color: '#a6bbcf',
        defaults: { name: {value:""} },
        inputs: 1,
        outputs: 1,
        icon: "file.svg",
        label: function() { return this.name || "lower-case"; }
    });
</script>
<script type="text/html" data-template-name="lower-case">
    <div class="form-row"><input type="text" id="node-input-name"></div>
</script>"#;
        let mut w = Vec::new();
        let regs = extract_registrations(html, "lower-case.html", &mut w);
        assert_eq!(regs.len(), 1);
        assert_eq!(regs[0].node_name, "lower-case");
        assert_eq!(regs[0].location.line, 2);
        let spec = parse_port_counts(&regs[0]);
        assert_eq!((spec.inputs, spec.outputs, spec.parsable), (1, 1, true));
        assert!(spec.warnings.is_empty());
    }

    #[test]
    fn two_regions_in_order_and_none_without_script() {
        let html = "<script>RED.nodes.registerType(\"a\", {inputs:1,outputs:1})</script>\n\
                    <script>RED.nodes.registerType(\"b\", {inputs:0,outputs:2})</script>";
        let mut w = Vec::new();
        let names: Vec<_> = extract_registrations(html, "x.html", &mut w).into_iter().map(|r| r.node_name).collect();
        assert_eq!(names, ["a", "b"]);
        assert!(extract_registrations("<p>no script</p>", "x.html", &mut w).is_empty());
    }

    #[test]
    fn format_variants() {
        let s = one("{inputs:1, outputs:2}");
        assert_eq!((s.inputs, s.outputs, s.parsable), (1, 2, true));
        let s = one("{\"inputs\": 1}");
        assert_eq!((s.inputs, s.outputs, s.parsable), (1, 0, true));
        assert_eq!(s.warnings, ["outputs missing, assumed 0"]);
        let s = one("{'inputs' : 0 , 'outputs' : 3}");
        assert_eq!((s.inputs, s.outputs), (0, 3));
        let s = one("{\n  inputs:\n    1, // one port\n  /* two */ outputs : 2\n}");
        assert_eq!((s.inputs, s.outputs, s.parsable), (1, 2, true));
    }

    #[test]
    fn computed_counts_are_unparsable() {
        assert!(!one("{inputs:1, outputs: this.rules.length}").parsable);
        assert!(!one("{inputs:1, outputs: 1 + 1}").parsable);
        assert!(!one("{inputs:1, outputs: 1.5}").parsable);
        assert!(!one("{inputs, outputs: 1}").parsable);
    }

    #[test]
    fn nested_keys_are_ignored_and_inputs_clamped() {
        let s = one("{defaults: {outputs: {value: 4}}, inputs: 3, outputs: 1, oneditprepare: function() { var o = {inputs: 9}; }}");
        assert_eq!((s.inputs, s.outputs, s.parsable), (1, 1, true));
        assert_eq!(s.warnings, ["inputs = 3 clamped to 1"]);
    }

    #[test]
    fn strings_and_comments_do_not_register() {
        let html =
            "<script>\n// RED.nodes.registerType('ghost', {inputs:1})\nvar s = \"RED.nodes.registerType('x', {})\";\n\
                    RED.nodes.registerType('real', {label: \"}{\", inputs: 1, outputs: 0});\n</script>";
        let mut w = Vec::new();
        let specs = parse_html_specs(html, "x.html", &mut w);
        assert_eq!(specs.len(), 1);
        assert_eq!(specs[0].node_name, "real");
        assert_eq!(specs[0].location.line, 4);
        assert_eq!((specs[0].inputs, specs[0].outputs), (1, 0));
    }

    #[test]
    fn config_by_reference_and_malformed_regions() {
        let mut w = Vec::new();
        let specs = parse_html_specs("<script>RED.nodes.registerType('r', cfg);</script>", "x.html", &mut w);
        assert_eq!(specs.len(), 1);
        assert!(!specs[0].parsable);
        let specs = parse_html_specs("<script>RED.nodes.registerType('u', {inputs: 1</script>", "x.html", &mut w);
        assert!(specs.is_empty());
        assert!(w.iter().any(|d| d.message.contains("unbalanced")));
    }

    #[test]
    fn totals() {
        let mk = |i, o, p| NodeSpec {
            node_name: "n".into(),
            inputs: i,
            outputs: o,
            parsable: p,
            location: Location { file: "f".into(), line: 1 },
            warnings: vec![],
        };
        assert_eq!(
            spec_totals(&[mk(1, 1, true), mk(1, 2, true)]),
            SpecTotals { s_in: 2, s_out: 3, unparsable_nodes: 0 }
        );
        assert_eq!(spec_totals(&[]), SpecTotals::default());
        assert_eq!(
            spec_totals(&[mk(1, 1, true), mk(0, 0, false)]),
            SpecTotals { s_in: 1, s_out: 1, unparsable_nodes: 1 }
        );
    }
}
