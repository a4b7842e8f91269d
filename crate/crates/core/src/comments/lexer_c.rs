//! Comment scanner for C, C++ and Java source text.
//!
//! Dialect differences handled here:
//! - C/C++: backslash line splices extend `//` comments and string literals;
//!   C++ raw strings `R"delim(...)delim"` (also `u8R`, `uR`, `UR`, `LR`).
//! - Java: no line splices, no raw strings; text blocks `""" ... """`.
//!
//! Unterminated string or character literals close at end of line (error
//! recovery so one bad literal cannot swallow the rest of the file).

use super::{CommentStyle, RawComment};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dialect {
    COrCpp,
    Java,
}

pub(crate) fn lex(content: &str, dialect: Dialect, diagnostics: &mut Vec<String>) -> Vec<RawComment> {
    let b = content.as_bytes();
    let n = b.len();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line: u32 = 1;

    let splices = dialect == Dialect::COrCpp;

    while i < n {
        let c = b[i];
        if c == b'/' && i + 1 < n && b[i + 1] == b'/' {
            // line comment; in C/C++ a trailing backslash continues it
            let start = i;
            let start_line = line;
            i += 2;
            while i < n {
                if b[i] == b'\n' {
                    if splices && spliced_newline(b, i) {
                        line += 1;
                        i += 1;
                        continue;
                    }
                    break;
                }
                i += 1;
            }
            out.push(RawComment {
                start_byte: start,
                end_byte: trim_cr(b, i),
                start_line,
                end_line: line,
                style: CommentStyle::Line,
            });
            continue;
        }
        if c == b'/' && i + 1 < n && b[i + 1] == b'*' {
            let start = i;
            let start_line = line;
            i += 2;
            let mut closed = false;
            while i < n {
                if b[i] == b'*' && i + 1 < n && b[i + 1] == b'/' {
                    i += 2;
                    closed = true;
                    break;
                }
                if b[i] == b'\n' {
                    line += 1;
                }
                i += 1;
            }
            if !closed {
                diagnostics.push(format!(
                    "unterminated block comment starting at line {start_line}"
                ));
            }
            out.push(RawComment {
                start_byte: start,
                end_byte: i,
                start_line,
                end_line: line,
                style: CommentStyle::Block,
            });
            continue;
        }
        if c == b'"' {
            if dialect == Dialect::COrCpp {
                if let Some(delim_end) = raw_string_prefix(b, i) {
                    i = skip_raw_string(b, i, delim_end, &mut line);
                    continue;
                }
            }
            if dialect == Dialect::Java && i + 2 < n && b[i + 1] == b'"' && b[i + 2] == b'"' {
                i = skip_text_block(b, i + 3, &mut line);
                continue;
            }
            i = skip_quoted(b, i + 1, b'"', splices, &mut line);
            continue;
        }
        if c == b'\'' {
            i = skip_quoted(b, i + 1, b'\'', splices, &mut line);
            continue;
        }
        if c == b'\n' {
            line += 1;
        }
        i += 1;
    }
    out
}

/// Is the newline at `i` preceded by a backslash (allowing one `\r`)?
fn spliced_newline(b: &[u8], i: usize) -> bool {
    if i >= 1 && b[i - 1] == b'\\' {
        return true;
    }
    i >= 2 && b[i - 1] == b'\r' && b[i - 2] == b'\\'
}

/// Exclude a trailing `\r` from a comment span ending before `\n`.
fn trim_cr(b: &[u8], end: usize) -> usize {
    if end > 0 && end <= b.len() && end >= 1 && b[end - 1] == b'\r' {
        end - 1
    } else {
        end
    }
}

/// Scan an ordinary quoted literal starting just after the opening quote.
/// Backslash escapes the next character; an unescaped newline terminates
/// the literal (recovery). Returns the index just past the literal.
fn skip_quoted(b: &[u8], mut i: usize, quote: u8, splices: bool, line: &mut u32) -> usize {
    let n = b.len();
    while i < n {
        let c = b[i];
        if c == b'\\' {
            if splices && i + 2 < n && b[i + 1] == b'\r' && b[i + 2] == b'\n' {
                *line += 1;
                i += 3;
                continue;
            }
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
            // unterminated literal: close at end of line
            *line += 1;
            return i + 1;
        }
        i += 1;
    }
    n
}

/// Detect a C++ raw string opener whose `"` sits at `i`. Returns the index
/// just past the `(` that ends the delimiter, or None.
fn raw_string_prefix(b: &[u8], i: usize) -> Option<usize> {
    // the quote must be immediately preceded by one of R, u8R, uR, UR, LR,
    // and the prefix must not be the tail of a longer identifier
    let has = |pat: &[u8]| -> bool {
        if i < pat.len() {
            return false;
        }
        let s = i - pat.len();
        if &b[s..i] != pat {
            return false;
        }
        s == 0 || !(b[s - 1].is_ascii_alphanumeric() || b[s - 1] == b'_')
    };
    if !(has(b"u8R") || has(b"uR") || has(b"UR") || has(b"LR") || has(b"R")) {
        return None;
    }
    // delimiter runs up to '(' (at most 16 chars, no spaces/backslash/paren)
    let mut j = i + 1;
    let limit = (i + 18).min(b.len());
    while j < limit {
        match b[j] {
            b'(' => return Some(j + 1),
            b' ' | b')' | b'\\' | b'\n' => return None,
            _ => j += 1,
        }
    }
    None
}

/// Scan a raw string: `start` is the `"`, `body` the index past `(`.
/// Ends at `)delim"` with no escape processing.
fn skip_raw_string(b: &[u8], start: usize, body: usize, line: &mut u32) -> usize {
    let delim = &b[start + 1..body - 1];
    let n = b.len();
    let mut i = body;
    while i < n {
        if b[i] == b')' && i + delim.len() + 1 < n + 1 {
            let tail = i + 1 + delim.len();
            if tail < n && &b[i + 1..tail] == delim && b[tail] == b'"' {
                return tail + 1;
            }
        }
        if b[i] == b'\n' {
            *line += 1;
        }
        i += 1;
    }
    n
}

/// Scan a Java text block starting just after the opening `"""`.
fn skip_text_block(b: &[u8], mut i: usize, line: &mut u32) -> usize {
    let n = b.len();
    while i < n {
        if b[i] == b'\\' && i + 1 < n {
            i += 2;
            continue;
        }
        if b[i] == b'"' && i + 2 < n && b[i + 1] == b'"' && b[i + 2] == b'"' {
            return i + 3;
        }
        if b[i] == b'\n' {
            *line += 1;
        }
        i += 1;
    }
    n
}
