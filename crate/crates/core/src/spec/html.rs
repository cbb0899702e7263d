//! Locating `<script>` regions in HTML text.

/// Body of one `<script>` element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptRegion {
    pub text: String,
    /// Line of the first character of `text`.
    pub first_line: u32,
    /// Value of the `type` attribute, lowercased, if present.
    pub script_type: Option<String>,
}

impl ScriptRegion {
    /// Whether the body is script code rather than an editor template or
    /// help text (`text/html`, `text/x-red`, `text/markdown`, ...).
    pub fn is_code(&self) -> bool {
        match self.script_type.as_deref() {
            None | Some("") | Some("module") => true,
            Some(t) => t.contains("javascript") || t.contains("ecmascript") || t == "text/babel",
        }
    }
}

/// An opening tag without a matching `</script>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnclosedScript {
    pub line: u32,
}

fn line_at(text: &str, offset: usize) -> u32 {
    1 + text.as_bytes()[..offset].iter().filter(|&&b| b == b'\n').count() as u32
}

fn find_ci(haystack: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    if from > haystack.len() {
        return None;
    }
    haystack[from..].windows(needle.len()).position(|w| w.eq_ignore_ascii_case(needle)).map(|p| p + from)
}

fn attribute(tag: &str, name: &str) -> Option<String> {
    let lower = tag.to_ascii_lowercase();
    let bytes = lower.as_bytes();
    let mut from = 0;
    while let Some(pos) = lower[from..].find(name).map(|p| p + from) {
        from = pos + name.len();
        let before_ok = pos > 0 && bytes[pos - 1].is_ascii_whitespace();
        let rest = lower[from..].trim_start();
        if !before_ok || !rest.starts_with('=') {
            continue;
        }
        let value = rest[1..].trim_start();
        let value = match value.chars().next() {
            Some(q @ ('"' | '\'')) => value[1..].split(q).next().unwrap_or(""),
            _ => value.split(|c: char| c.is_ascii_whitespace() || c == '>').next().unwrap_or(""),
        };
        return Some(value.trim().to_string());
    }
    None
}

/// All `<script>` elements in document order. HTML comments are skipped.
pub fn script_regions(html: &str) -> (Vec<ScriptRegion>, Vec<UnclosedScript>) {
    let bytes = html.as_bytes();
    let mut regions = Vec::new();
    let mut unclosed = Vec::new();
    let mut pos = 0;
    loop {
        let next_script = find_ci(bytes, b"<script", pos);
        let next_comment = find_ci(bytes, b"<!--", pos);
        let start = match (next_script, next_comment) {
            (Some(s), Some(c)) if c < s => {
                pos = find_ci(bytes, b"-->", c + 4).map_or(bytes.len(), |e| e + 3);
                continue;
            }
            (Some(s), _) => s,
            (None, _) => break,
        };
        let after = start + b"<script".len();
        match bytes.get(after) {
            Some(b) if b.is_ascii_whitespace() || *b == b'>' || *b == b'/' => {}
            _ => {
                pos = after;
                continue;
            }
        }
        let Some(tag_end) = html[after..].find('>').map(|p| p + after) else {
            unclosed.push(UnclosedScript { line: line_at(html, start) });
            break;
        };
        let tag = &html[start..tag_end];
        let body_start = tag_end + 1;
        let script_type = attribute(tag, "type").map(|t| t.to_ascii_lowercase());
        if tag.ends_with('/') {
            pos = body_start;
            continue;
        }
        match find_ci(bytes, b"</script", body_start) {
            Some(close) => {
                regions.push(ScriptRegion {
                    text: html[body_start..close].to_string(),
                    first_line: line_at(html, body_start),
                    script_type,
                });
                pos = close + b"</script".len();
            }
            None => {
                unclosed.push(UnclosedScript { line: line_at(html, start) });
                break;
            }
        }
    }
    (regions, unclosed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_regions_with_lines_and_types() {
        let html = "<p>x</p>\n<script type=\"text/javascript\">\nvar a = 1;\n</script>\n\
                    <SCRIPT type='text/html' data-template-name=\"x\">\n<div></div>\n</SCRIPT>\n";
        let (regions, unclosed) = script_regions(html);
        assert!(unclosed.is_empty());
        assert_eq!(regions.len(), 2);
        assert_eq!(regions[0].first_line, 2);
        assert_eq!(regions[0].text, "\nvar a = 1;\n");
        assert!(regions[0].is_code());
        assert_eq!(regions[1].script_type.as_deref(), Some("text/html"));
        assert!(!regions[1].is_code());
    }

    #[test]
    fn skips_comments_and_lookalike_tags() {
        let html = "<!-- <script>bad()</script> --><scripts></scripts><script>ok()</script>";
        let (regions, _) = script_regions(html);
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].text, "ok()");
    }

    #[test]
    fn unterminated_region_is_reported() {
        let (regions, unclosed) = script_regions("a\n<script>\nRED.nodes.registerType('x', {})");
        assert!(regions.is_empty());
        assert_eq!(unclosed, vec![UnclosedScript { line: 2 }]);
    }
}
