//! Comment scanner for Python source text.
//!
//! Only `#` comments count; single- and triple-quoted strings of any prefix
//! (r, b, f, u and combinations) are skipped, so docstrings never surface as
//! comments. Even in raw strings a backslash keeps the following quote from
//! closing the literal, which mirrors the real tokenizer.

use super::{CommentStyle, RawComment};

pub(crate) fn lex(content: &str, _diagnostics: &mut [String]) -> Vec<RawComment> {
    let b = content.as_bytes();
    let n = b.len();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line: u32 = 1;

    while i < n {
        let c = b[i];
        if c == b'#' {
            let start = i;
            while i < n && b[i] != b'\n' {
                i += 1;
            }
            let mut end = i;
            if end > start && b[end - 1] == b'\r' {
                end -= 1;
            }
            out.push(RawComment {
                start_byte: start,
                end_byte: end,
                start_line: line,
                end_line: line,
                style: CommentStyle::Hash,
            });
            continue;
        }
        if c == b'\'' || c == b'"' {
            if i + 2 < n && b[i + 1] == c && b[i + 2] == c {
                i = skip_triple(b, i + 3, c, &mut line);
            } else {
                i = skip_single(b, i + 1, c, &mut line);
            }
            continue;
        }
        if c == b'\n' {
            line += 1;
        }
        i += 1;
    }
    out
}

/// One-quote string: backslash escapes anything (including the quote and a
/// line-continuation newline); an unescaped newline ends the literal.
fn skip_single(b: &[u8], mut i: usize, quote: u8, line: &mut u32) -> usize {
    let n = b.len();
    while i < n {
        let c = b[i];
        if c == b'\\' {
            if i + 1 < n {
                if b[i + 1] == b'\n' {
                    *line += 1;
                }
                i += 2;
                continue;
            }
            return n;
        }
        if c == quote {
            return i + 1;
        }
        if c == b'\n' {
            *line += 1;
            return i + 1;
        }
        i += 1;
    }
    n
}

/// Triple-quoted string: spans newlines; backslash escapes the next byte.
fn skip_triple(b: &[u8], mut i: usize, quote: u8, line: &mut u32) -> usize {
    let n = b.len();
    while i < n {
        let c = b[i];
        if c == b'\\' {
            if i + 1 < n {
                if b[i + 1] == b'\n' {
                    *line += 1;
                }
                i += 2;
                continue;
            }
            return n;
        }
        if c == quote && i + 2 < n && b[i + 1] == quote && b[i + 2] == quote {
            return i + 3;
        }
        if c == b'\n' {
            *line += 1;
        }
        i += 1;
    }
    n
}
