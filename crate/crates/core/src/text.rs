//! Wikitext cleaning, tokenization, and stopword filtering.
//!
//! The cleaning rules are fixed as follows: templates `{{...}}`, tables
//! `{|...|}`, HTML comments, file/image/category/interlanguage links, and
//! parenthesized asides are removed outright; internal links `[[a|b]]` are
//! reduced to their display text; HTML tags, heading fences, list markers,
//! emphasis quotes, and quote marks are stripped while their inner text is
//! kept. Unbalanced markup degrades to literal text instead of aborting.

use std::collections::HashSet;
use std::io::{self, BufRead};

/// Link-target prefixes whose links are dropped wholesale rather than
/// reduced to display text (media, category, and their localized forms).
const DROPPED_LINK_PREFIXES: &[&str] = &[
    "file",
    "image",
    "media",
    "category",
    "archivo",
    "imagen",
    "categoría",
    "ファイル",
    "画像",
];

const QUOTE_CHARS: &[char] = &['"', '“', '”', '«', '»', '「', '」', '『', '』'];

/// Set of tokens removed by [`clean_text`].
///
/// File format: UTF-8, one token per line, `#` starts a comment.
#[derive(Debug, Clone, Default)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Stoplist {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The English list bundled with the crate.
    pub fn builtin_english() -> Self {
        Self::parse(include_str!("../data/stopwords-en.txt"))
    }

    pub fn from_reader(reader: impl BufRead) -> io::Result<Self> {
        let mut words = HashSet::new();
        for line in reader.lines() {
            let line = line?;
            if let Some(word) = Self::parse_line(&line) {
                words.insert(word);
            }
        }
        Ok(Stoplist { words })
    }

    pub fn parse(contents: &str) -> Self {
        let words = contents.lines().filter_map(Self::parse_line).collect();
        Stoplist { words }
    }

    fn parse_line(line: &str) -> Option<String> {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            None
        } else {
            Some(body.to_lowercase())
        }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Strips wiki markup from `text`, keeping readable plain text.
///
/// Case and sentence punctuation survive, so the output is usable both for
/// definition extraction and, via [`tokenize`], for term vectors.
pub fn strip_markup(text: &str) -> String {
    let s = strip_comments(text);
    let s = strip_delimited(&s, b"{{", b"}}");
    let s = strip_delimited(&s, b"{|", b"|}");
    let s = resolve_links(&s);
    let s = strip_tags(&s);
    let s = s.replace("'''''", "").replace("'''", "").replace("''", "");
    let s = strip_line_markup(&s);
    let s = strip_parens(&s);
    s.chars().filter(|c| !QUOTE_CHARS.contains(c)).collect()
}

/// Splits `text` into lowercased alphanumeric tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Markup stripping, tokenization, and stopword removal in one pass.
pub fn clean_text(raw_text: &str, stoplist: &Stoplist) -> Vec<String> {
    tokenize(&strip_markup(raw_text))
        .into_iter()
        .filter(|token| !stoplist.contains(token))
        .collect()
}

fn strip_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find("<!--") {
        out.push_str(&rest[..start]);
        match rest[start..].find("-->") {
            Some(end) => rest = &rest[start + end + 3..],
            None => {
                // unterminated comment: keep it as literal text
                out.push_str(&rest[start..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out
}

/// Removes `open ... close` constructs, tracking nesting. Unbalanced openers
/// are kept as literal text. Delimiters must be ASCII.
fn strip_delimited(text: &str, open: &[u8], close: &[u8]) -> String {
    let bytes = text.as_bytes();
    let mut out: Vec<u8> = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i..].starts_with(open) {
            match find_matching(bytes, i + open.len(), open, close) {
                Some(end) => i = end,
                None => {
                    out.push(bytes[i]);
                    i += 1;
                }
            }
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).expect("removal of ASCII-delimited spans preserves UTF-8")
}

/// Scans from `start` for the close matching an already-seen opener.
/// Returns the byte index just past the close.
fn find_matching(bytes: &[u8], start: usize, open: &[u8], close: &[u8]) -> Option<usize> {
    let mut depth = 1usize;
    let mut j = start;
    while j < bytes.len() {
        if bytes[j..].starts_with(open) {
            depth += 1;
            j += open.len();
        } else if bytes[j..].starts_with(close) {
            depth -= 1;
            j += close.len();
            if depth == 0 {
                return Some(j);
            }
        } else {
            j += 1;
        }
    }
    None
}

fn resolve_links(text: &str) -> String {
    let bytes = text.as_bytes();
    let mut out: Vec<u8> = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i..].starts_with(b"[[") {
            match find_matching(bytes, i + 2, b"[[", b"]]") {
                Some(end) => {
                    let inner = &text[i + 2..end - 2];
                    out.extend_from_slice(link_text(inner).as_bytes());
                    i = end;
                }
                None => {
                    out.push(bytes[i]);
                    i += 1;
                }
            }
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).expect("link resolution preserves UTF-8")
}

/// Display text of one `[[...]]` construct; empty for media/category/
/// interlanguage links.
fn link_text(inner: &str) -> String {
    let target = inner.split('|').next().unwrap_or("").trim();
    let target = target.strip_prefix(':').unwrap_or(target);
    if is_dropped_link_target(target) {
        return String::new();
    }
    let display = match inner.split_once('|') {
        Some((_, rest)) => rest.rsplit('|').next().unwrap_or(rest),
        None => inner,
    };
    // captions can nest links of their own
    resolve_links(display)
}

fn is_dropped_link_target(target: &str) -> bool {
    let Some((prefix, _)) = target.split_once(':') else {
        return false;
    };
    let prefix = prefix.trim().to_lowercase();
    if DROPPED_LINK_PREFIXES.contains(&prefix.as_str()) {
        return true;
    }
    // interlanguage marker: a short all-ASCII-lowercase language code
    (2..=3).contains(&prefix.len()) && prefix.bytes().all(|b| b.is_ascii_lowercase())
}

fn strip_tags(text: &str) -> String {
    let bytes = text.as_bytes();
    let mut out: Vec<u8> = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        let looks_like_tag = bytes[i] == b'<'
            && i + 1 < bytes.len()
            && (bytes[i + 1].is_ascii_alphabetic() || bytes[i + 1] == b'/');
        if looks_like_tag {
            match bytes[i..].iter().position(|&b| b == b'>') {
                Some(rel) => i += rel + 1,
                None => {
                    out.push(bytes[i]);
                    i += 1;
                }
            }
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).expect("tag removal preserves UTF-8")
}

fn strip_line_markup(text: &str) -> String {
    let lines: Vec<String> = text
        .lines()
        .map(|line| {
            if let Some(title) = heading_title(line) {
                return title.to_string();
            }
            let stripped = line.trim_start_matches(['*', '#', ':', ';']);
            if stripped.len() != line.len() {
                stripped.trim_start().to_string()
            } else {
                line.to_string()
            }
        })
        .collect();
    lines.join("\n")
}

/// Title text of a heading line (`== Title ==`), if `line` is one.
fn heading_title(line: &str) -> Option<&str> {
    let trimmed = line.trim_end();
    if !trimmed.starts_with("==") || !trimmed.ends_with("==") {
        return None;
    }
    let inner = trimmed
        .trim_start_matches('=')
        .trim_end_matches('=')
        .trim();
    if inner.is_empty() {
        return None;
    }
    Some(inner)
}

/// True for lines that open a new section, i.e. where [`crate::wiki::first_section`] stops.
pub(crate) fn is_heading_line(line: &str) -> bool {
    heading_title(line).is_some()
}

/// Inner strings of all top-level `[[...]]` constructs, in document order.
pub(crate) fn link_inners(text: &str) -> Vec<&str> {
    let bytes = text.as_bytes();
    let mut inners = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i..].starts_with(b"[[") {
            match find_matching(bytes, i + 2, b"[[", b"]]") {
                Some(end) => {
                    inners.push(&text[i + 2..end - 2]);
                    i = end;
                }
                None => i += 1,
            }
        } else {
            i += 1;
        }
    }
    inners
}

/// Removes balanced parenthesized spans, including the fullwidth pair used
/// in Japanese text. Unmatched openers stay literal.
fn strip_parens(text: &str) -> String {
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for (i, ch) in text.char_indices() {
        match ch {
            '(' | '（' => stack.push(i),
            ')' | '）' => {
                if let Some(start) = stack.pop() {
                    while spans.last().is_some_and(|&(s, _)| s > start) {
                        spans.pop();
                    }
                    spans.push((start, i + ch.len_utf8()));
                }
            }
            _ => {}
        }
    }
    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    for (start, end) in spans {
        out.push_str(&text[pos..start]);
        pos = end;
    }
    out.push_str(&text[pos..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stoplist(words: &[&str]) -> Stoplist {
        Stoplist::parse(&words.join("\n"))
    }

    #[test]
    fn emphasis_and_link_display() {
        let tokens = clean_text("'''Bird''' is a [[animal|creature]].", &stoplist(&["is", "a"]));
        assert_eq!(tokens, vec!["bird", "creature"]);
    }

    #[test]
    fn template_and_parenthesized_aside() {
        let tokens = clean_text("{{infobox}}The (small) bank", &stoplist(&["the"]));
        assert_eq!(tokens, vec!["bank"]);
    }

    #[test]
    fn empty_input() {
        assert_eq!(clean_text("", &Stoplist::empty()), Vec::<String>::new());
    }

    #[test]
    fn nested_templates_removed() {
        assert_eq!(strip_markup("a {{x {{y}} z}} b"), "a  b");
    }

    #[test]
    fn unbalanced_template_degrades_to_literal() {
        let tokens = clean_text("{{never closes bank", &Stoplist::empty());
        assert_eq!(tokens, vec!["never", "closes", "bank"]);
    }

    #[test]
    fn tables_removed() {
        assert_eq!(strip_markup("x {| class=\"t\"\n| cell\n|} y"), "x  y");
    }

    #[test]
    fn media_category_and_interlanguage_links_dropped() {
        assert_eq!(strip_markup("[[File:a.jpg|thumb|A [[bird]] flying]]"), "");
        assert_eq!(strip_markup("[[Category:Birds]]"), "");
        assert_eq!(strip_markup("[[es:Ave]][[ja:鳥類]]"), "");
    }

    #[test]
    fn bare_link_keeps_target() {
        assert_eq!(strip_markup("see [[Bird]]"), "see Bird");
    }

    #[test]
    fn colon_titles_are_not_interlanguage_links() {
        assert_eq!(strip_markup("[[Star Trek: The Next Generation|TNG]]"), "TNG");
    }

    #[test]
    fn html_tags_stripped_text_kept() {
        assert_eq!(strip_markup("a <ref name=\"x\">note</ref> b"), "a note b");
        assert_eq!(strip_markup("1 < 2 stays"), "1 < 2 stays");
    }

    #[test]
    fn comments_removed() {
        assert_eq!(strip_markup("a <!-- hidden --> b"), "a  b");
    }

    #[test]
    fn heading_markers_removed_title_kept() {
        assert_eq!(strip_markup("intro\n== History ==\nrest"), "intro\nHistory\nrest");
    }

    #[test]
    fn list_markers_removed() {
        assert_eq!(strip_markup("* item one\n# item two"), "item one\nitem two");
    }

    #[test]
    fn quote_marks_removed() {
        assert_eq!(strip_markup("\"quoted\" «text» 「言葉」"), "quoted text 言葉");
    }

    #[test]
    fn fullwidth_parens_removed() {
        assert_eq!(strip_markup("土手（どて）とは"), "土手とは");
    }

    #[test]
    fn unmatched_paren_keeps_rest_of_text() {
        let tokens = clean_text("broken (aside bank river", &Stoplist::empty());
        assert_eq!(tokens, vec!["broken", "aside", "bank", "river"]);
    }

    #[test]
    fn stoplist_file_format() {
        let list = Stoplist::parse("# comment\nthe\n  ON  # inline\n\nbetween\n");
        assert_eq!(list.len(), 3);
        assert!(list.contains("the") && list.contains("on") && list.contains("between"));
    }

    proptest! {
        /// Cleaned tokens never contain stopwords, uppercase Latin letters,
        /// or markup characters.
        #[test]
        fn clean_text_output_is_clean(raw in ".{0,400}") {
            let stops = stoplist(&["the", "is", "a", "of"]);
            for token in clean_text(&raw, &stops) {
                prop_assert!(!stops.contains(&token));
                prop_assert!(!token.chars().any(|c| c.is_ascii_uppercase()));
                prop_assert!(!token.chars().any(|c| "[]{}'".contains(c)));
                prop_assert!(!token.is_empty());
            }
        }

        /// Tokenization is insensitive to surrounding whitespace.
        #[test]
        fn tokenize_ignores_whitespace(words in proptest::collection::vec("[a-z]{1,8}", 0..10)) {
            let spaced = words.join("   ");
            prop_assert_eq!(tokenize(&spaced), words);
        }
    }
}
