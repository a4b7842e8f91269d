//! Language-aware comment extraction.
//!
//! Hand-rolled lexers for the C family (C, C++, Java) and Python that know
//! enough about string and character literals to never report comment
//! markers inside them. Consecutive full line comments merge into one block,
//! matching how debt remarks usually span several `//` lines.

mod lexer_c;
mod lexer_python;
mod scope;

pub use scope::{enclosing_scope, enclosing_scopes};

use serde::{Deserialize, Serialize};

/// Source language of a file version, keyed off its extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Language {
    C,
    Cpp,
    Java,
    Python,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommentStyle {
    /// `//` comments (possibly several merged lines).
    Line,
    /// `/* ... */` comments.
    Block,
    /// `#` comments (possibly several merged lines).
    Hash,
}

/// One extracted comment block within a single file version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommentBlock {
    /// 1-based, inclusive.
    pub start_line: u32,
    pub end_line: u32,
    /// Byte span in the source content, end exclusive.
    pub start_byte: usize,
    pub end_byte: usize,
    pub style: CommentStyle,
    pub raw_text: String,
    pub normalized_text: String,
}

#[derive(Debug, Clone, Default)]
pub struct Extraction {
    /// Non-overlapping, sorted by start line; empty-after-normalization
    /// blocks are dropped.
    pub blocks: Vec<CommentBlock>,
    pub diagnostics: Vec<String>,
}

/// Span of one lexed comment before merging; produced by the per-language
/// scanners.
#[derive(Debug, Clone)]
pub(crate) struct RawComment {
    pub start_byte: usize,
    pub end_byte: usize,
    pub start_line: u32,
    pub end_line: u32,
    pub style: CommentStyle,
}

/// Extract every comment of `content`. String literals, character literals,
/// raw strings and Python triple-quoted strings (docstrings included) never
/// yield comments. An unterminated block comment is closed at end of input
/// with a diagnostic.
pub fn extract_comments(content: &str, language: Language) -> Extraction {
    let mut diagnostics = Vec::new();
    let raw = match language {
        Language::C | Language::Cpp => {
            lexer_c::lex(content, lexer_c::Dialect::COrCpp, &mut diagnostics)
        }
        Language::Java => lexer_c::lex(content, lexer_c::Dialect::Java, &mut diagnostics),
        Language::Python => lexer_python::lex(content, &mut diagnostics),
        Language::Other => Vec::new(),
    };
    Extraction {
        blocks: merge_and_normalize(content, raw),
        diagnostics,
    }
}

/// Merge runs of single-line comments separated by exactly one newline and
/// whitespace (no code, no blank line in between), then normalize.
fn merge_and_normalize(content: &str, raw: Vec<RawComment>) -> Vec<CommentBlock> {
    let bytes = content.as_bytes();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < raw.len() {
        let style = raw[i].style;
        let mut last = i;
        if matches!(style, CommentStyle::Line | CommentStyle::Hash) {
            while last + 1 < raw.len() {
                let cur = &raw[last];
                let next = &raw[last + 1];
                if next.style != style || next.start_line != cur.end_line + 1 {
                    break;
                }
                let gap = &bytes[cur.end_byte..next.start_byte];
                let only_ws = gap.iter().all(|b| b.is_ascii_whitespace());
                let newlines = gap.iter().filter(|&&b| b == b'\n').count();
                if !only_ws || newlines != 1 {
                    break;
                }
                last += 1;
            }
        }
        let start = &raw[i];
        let end = &raw[last];
        let raw_text = &content[start.start_byte..end.end_byte];
        let normalized = normalize_comment(raw_text, style);
        if !normalized.is_empty() {
            blocks.push(CommentBlock {
                start_line: start.start_line,
                end_line: end.end_line,
                start_byte: start.start_byte,
                end_byte: end.end_byte,
                style,
                raw_text: raw_text.to_string(),
                normalized_text: normalized,
            });
        }
        i = last + 1;
    }
    blocks
}

/// Strip comment markers and collapse whitespace, preserving case.
///
/// Line/hash styles strip one leading `//` or `#` per physical line; block
/// style strips the `/*` and `*/` pair plus any leading `*` gutters.
/// Interior whitespace runs collapse to single spaces.
pub fn normalize_comment(raw_text: &str, style: CommentStyle) -> String {
    let mut pieces: Vec<&str> = Vec::new();
    match style {
        CommentStyle::Line => {
            let lines: Vec<&str> = raw_text.lines().collect();
            for (i, line) in lines.iter().enumerate() {
                let t = line.trim_start();
                let mut piece = t.strip_prefix("//").unwrap_or(t);
                // a backslash splice continues the comment onto a marker-less
                // line; the splice byte is a marker, not content
                if i + 1 < lines.len() && !lines[i + 1].trim_start().starts_with("//") {
                    piece = piece.strip_suffix('\\').unwrap_or(piece);
                }
                pieces.push(piece);
            }
        }
        CommentStyle::Hash => {
            for line in raw_text.lines() {
                let t = line.trim_start();
                pieces.push(t.strip_prefix('#').unwrap_or(t));
            }
        }
        CommentStyle::Block => {
            let inner = raw_text.strip_prefix("/*").unwrap_or(raw_text);
            let inner = inner.strip_suffix("*/").unwrap_or(inner);
            for line in inner.lines() {
                let t = line.trim_start();
                pieces.push(t.trim_start_matches('*'));
            }
        }
    }
    let joined = pieces.join(" ");
    let mut out = String::with_capacity(joined.len());
    for word in joined.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}
