//! Shared helpers for the tab-separated stage artifact files.
//!
//! Every artifact is UTF-8, one record per line, no header line. Optional
//! columns are empty strings; free-text columns escape backslash, tab, and
//! newline characters.

use std::io;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{file} line {line}: {message}")]
    Malformed {
        file: &'static str,
        line: usize,
        message: String,
    },
}

impl ArtifactError {
    pub(crate) fn malformed(file: &'static str, line: usize, message: impl Into<String>) -> Self {
        ArtifactError::Malformed {
            file,
            line,
            message: message.into(),
        }
    }
}

/// Escapes a free-text field for a TSV column.
pub(crate) fn escape_field(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn unescape_field(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(ch) = chars.next() {
        if ch != '\\' {
            out.push(ch);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

/// Splits a line into exactly `n` tab-separated columns.
pub(crate) fn columns<'a>(
    line: &'a str,
    n: usize,
    file: &'static str,
    line_no: usize,
) -> Result<Vec<&'a str>, ArtifactError> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != n {
        return Err(ArtifactError::malformed(
            file,
            line_no,
            format!("expected {n} columns, found {}", cols.len()),
        ));
    }
    Ok(cols)
}
