//! Best-effort enclosing class/function names for comments.
//!
//! Heuristic metadata only: brace-depth tracking with header sniffing for
//! the C family, indentation walking for Python. Absent whenever the guess
//! would be ambiguous.

use super::{extract_comments, Language};

/// Nearest enclosing class/function name for the given 1-based line, when
/// the heuristics can find one.
pub fn enclosing_scope(content: &str, language: Language, line: u32) -> Option<String> {
    enclosing_scopes(content, language, &[line]).pop().flatten()
}

/// Batch variant: one content scan answering many lines at once.
pub fn enclosing_scopes(content: &str, language: Language, lines: &[u32]) -> Vec<Option<String>> {
    match language {
        Language::Python => lines.iter().map(|&l| python_scope(content, l)).collect(),
        Language::C | Language::Cpp | Language::Java => c_family_scopes(content, language, lines),
        Language::Other => vec![None; lines.len()],
    }
}

fn indent_width(line: &str) -> usize {
    let mut w = 0;
    for ch in line.chars() {
        match ch {
            ' ' => w += 1,
            '\t' => w += 8 - w % 8,
            _ => break,
        }
    }
    w
}

fn def_or_class_name(trimmed: &str) -> Option<&str> {
    for kw in ["def ", "class "] {
        if let Some(rest) = trimmed.strip_prefix(kw) {
            let name: &str = rest
                .split(|c: char| !(c.is_alphanumeric() || c == '_'))
                .next()
                .unwrap_or("");
            if !name.is_empty() {
                return Some(name);
            }
        }
    }
    // "async def foo"
    if let Some(rest) = trimmed.strip_prefix("async ") {
        return def_or_class_name(rest.trim_start());
    }
    None
}

/// Walk upward from the comment's line; a def/class header with smaller
/// indentation is the scope, and any plain code line with smaller
/// indentation lowers the ceiling (we left that block).
fn python_scope(content: &str, line: u32) -> Option<String> {
    let lines: Vec<&str> = content.lines().collect();
    let idx = (line as usize).checked_sub(1)?;
    if idx >= lines.len() {
        return None;
    }
    let mut ceiling = indent_width(lines[idx]);
    if ceiling == 0 {
        return None;
    }
    for i in (0..idx).rev() {
        let l = lines[i];
        let trimmed = l.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let ind = indent_width(l);
        if ind < ceiling {
            if let Some(name) = def_or_class_name(trimmed) {
                return Some(name.to_string());
            }
            ceiling = ind;
            if ceiling == 0 {
                return None;
            }
        }
    }
    None
}

const CONTROL_KEYWORDS: [&str; 9] = [
    "if", "for", "while", "switch", "catch", "return", "do", "else", "sizeof",
];

/// Guess a scope name from the code text preceding a `{`.
fn header_name(buffer: &str) -> Option<String> {
    let trimmed = buffer.trim_end();
    // type-like headers win, taking the last keyword occurrence so
    // "template<class T> struct Foo" names Foo
    let mut best: Option<(usize, String)> = None;
    for kw in ["class", "struct", "interface", "enum", "namespace", "union"] {
        let mut from = 0;
        while let Some(pos) = trimmed[from..].find(kw) {
            let at = from + pos;
            let before_ok = at == 0
                || !trimmed.as_bytes()[at - 1].is_ascii_alphanumeric()
                    && trimmed.as_bytes()[at - 1] != b'_';
            let after = &trimmed[at + kw.len()..];
            if before_ok && after.starts_with(|c: char| c.is_whitespace()) {
                let name: String = after
                    .trim_start()
                    .chars()
                    .take_while(|c| c.is_alphanumeric() || *c == '_')
                    .collect();
                if !name.is_empty() && best.as_ref().map(|(p, _)| at > *p).unwrap_or(true) {
                    best = Some((at, name));
                }
            }
            from = at + kw.len();
        }
    }
    if let Some((_, name)) = best {
        return Some(name);
    }

    // function-like header: "... name ( args ) [qualifiers]"
    let close = trimmed.rfind(')')?;
    let suffix = &trimmed[close + 1..];
    if !suffix.chars().all(|c| {
        c.is_alphanumeric() || c.is_whitespace() || "_,<>&*:->[]".contains(c)
    }) {
        return None;
    }
    // find the '(' matching that ')'
    let bytes = trimmed.as_bytes();
    let mut depth = 0i32;
    let mut open = None;
    for i in (0..=close).rev() {
        match bytes[i] {
            b')' => depth += 1,
            b'(' => {
                depth -= 1;
                if depth == 0 {
                    open = Some(i);
                    break;
                }
            }
            _ => {}
        }
    }
    let open = open?;
    let head = trimmed[..open].trim_end();
    let name: String = head
        .chars()
        .rev()
        .take_while(|c| c.is_alphanumeric() || *c == '_' || *c == '~')
        .collect::<String>()
        .chars()
        .rev()
        .collect();
    if name.is_empty() || CONTROL_KEYWORDS.contains(&name.as_str()) {
        return None;
    }
    if name.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        return None;
    }
    Some(name)
}

fn c_family_scopes(content: &str, language: Language, lines: &[u32]) -> Vec<Option<String>> {
    // byte position of each queried line start
    let mut line_starts = vec![0usize];
    for (i, b) in content.bytes().enumerate() {
        if b == b'\n' {
            line_starts.push(i + 1);
        }
    }
    let targets: Vec<usize> = lines
        .iter()
        .map(|&l| {
            line_starts
                .get((l as usize).saturating_sub(1))
                .copied()
                .unwrap_or(content.len())
        })
        .collect();

    // comment spans let the scanner skip comment bytes
    let extraction = extract_comments(content, language);
    let mut comment_spans = extraction
        .blocks
        .iter()
        .map(|b| (b.start_byte, b.end_byte))
        .collect::<Vec<_>>();
    comment_spans.sort_unstable();

    let bytes = content.as_bytes();
    let n = bytes.len();
    let mut stack: Vec<Option<String>> = Vec::new();
    let mut buffer = String::new();
    let mut answers: Vec<Option<String>> = vec![None; lines.len()];
    let mut pending: Vec<(usize, usize)> = targets.iter().copied().enumerate().collect();
    pending.sort_by_key(|&(_, pos)| pos);
    let mut next_pending = 0;
    let mut span_idx = 0;

    let mut i = 0;
    while i <= n {
        while next_pending < pending.len() && pending[next_pending].1 <= i {
            let (slot, _) = pending[next_pending];
            answers[slot] = stack.iter().rev().flatten().next().cloned();
            next_pending += 1;
        }
        if i == n {
            break;
        }
        while span_idx < comment_spans.len() && comment_spans[span_idx].1 <= i {
            span_idx += 1;
        }
        if span_idx < comment_spans.len()
            && i >= comment_spans[span_idx].0
            && i < comment_spans[span_idx].1
        {
            i = comment_spans[span_idx].1;
            continue;
        }
        let c = bytes[i];
        match c {
            b'"' | b'\'' => {
                // skip literals so braces inside them stay invisible
                let quote = c;
                i += 1;
                while i < n {
                    if bytes[i] == b'\\' {
                        i += 2;
                        continue;
                    }
                    if bytes[i] == quote || bytes[i] == b'\n' {
                        i += 1;
                        break;
                    }
                    i += 1;
                }
                buffer.clear();
                continue;
            }
            b'{' => {
                stack.push(header_name(&buffer));
                buffer.clear();
            }
            b'}' => {
                stack.pop();
                buffer.clear();
            }
            b';' => buffer.clear(),
            _ => {
                if buffer.len() < 512 {
                    buffer.push(c as char);
                }
            }
        }
        i += 1;
    }
    answers
}
