//! Wikipedia dump ingestion: articles, stores, redirects, and sections.
//!
//! Two input formats are accepted and auto-detected: MediaWiki
//! pages-articles XML exports (elements `page/title`, `page/id`,
//! `page/redirect`, `revision/text`) and a line-oriented JSON fixture
//! format with keys `title`, `lang`, `text`, `id` for tests and desk-scale
//! runs. Parsed stores serialize to a JSONL dump that round-trips every
//! field, so downstream stages can reload them without re-parsing.

use crate::lang::Lang;
use crate::text;
use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use thiserror::Error;

/// Redirect chains longer than this are reported as errors.
pub const MAX_REDIRECT_DEPTH: usize = 16;

/// Non-main namespace prefixes that are skipped outright (canonical English
/// names work on every wiki; the localized Spanish and Japanese names are
/// included for real dumps).
const SKIP_PREFIXES: &[&str] = &[
    // canonical
    "talk:",
    "user:",
    "user talk:",
    "wikipedia:",
    "wikipedia talk:",
    "file:",
    "file talk:",
    "image:",
    "mediawiki:",
    "mediawiki talk:",
    "template:",
    "template talk:",
    "help:",
    "help talk:",
    "category talk:",
    "portal:",
    "draft:",
    "module:",
    "special:",
    "media:",
    // Spanish
    "discusión:",
    "usuario:",
    "usuario discusión:",
    "wikipedia discusión:",
    "archivo:",
    "archivo discusión:",
    "imagen:",
    "plantilla:",
    "plantilla discusión:",
    "ayuda:",
    "ayuda discusión:",
    "categoría discusión:",
    "anexo:",
    "módulo:",
    // Japanese
    "ノート:",
    "利用者:",
    "利用者‐会話:",
    "wikipedia‐ノート:",
    "ファイル:",
    "ファイル‐ノート:",
    "template‐ノート:",
    "help‐ノート:",
    "category‐ノート:",
    "モジュール:",
    "画像:",
];

/// Prefixes marking a retained category page.
const CATEGORY_PREFIXES: &[&str] = &["category:", "categoría:"];

/// Redirect directive keywords, uppercased (`#REDIRECT` plus localized forms).
const REDIRECT_KEYWORDS: &[&str] = &["REDIRECT", "REDIRECCIÓN", "REDIRECCION", "転送", "リダイレクト"];

#[derive(Debug, Error)]
pub enum WikiError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("malformed XML at byte offset {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error("fixture line {line}: {message}")]
    Fixture { line: usize, message: String },
    #[error("store dump line {line}: {message}")]
    StoreDump { line: usize, message: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RedirectError {
    #[error("redirect cycle: {}", cycle.join(" -> "))]
    Cycle { cycle: Vec<String> },
    #[error("redirect chain from {title:?} exceeds depth {MAX_REDIRECT_DEPTH}")]
    TooDeep { title: String },
    #[error("unresolved redirect: {title:?} ends at missing article {target:?}")]
    Unresolved { title: String, target: String },
}

/// One Wikipedia page in one language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub page_id: u64,
    pub title: String,
    pub lang: Lang,
    pub raw_text: String,
    pub redirect_to: Option<String>,
    pub categories: Vec<String>,
    pub langlinks: BTreeMap<Lang, String>,
    pub is_category: bool,
    pub is_disambiguation: bool,
}

impl Article {
    pub fn is_redirect(&self) -> bool {
        self.redirect_to.is_some()
    }

    /// Text up to (exclusive) the first heading line; whole text if none.
    pub fn first_section(&self) -> &str {
        first_section(&self.raw_text)
    }
}

/// Counts reported by [`parse_dump`].
#[derive(Debug, Default, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseStats {
    pub pages_seen: usize,
    pub parsed: usize,
    pub skipped_namespace: usize,
    pub duplicate_titles: usize,
    pub redirects: usize,
    pub category_pages: usize,
    pub disambiguation_pages: usize,
}

/// All parsed pages of one language, keyed by normalized title.
///
/// Construction is single-writer; afterwards the store is immutable and can
/// be read from any number of threads.
#[derive(Debug, Clone)]
pub struct ArticleStore {
    lang: Lang,
    by_title: BTreeMap<String, Article>,
    redirect_map: BTreeMap<String, String>,
}

impl ArticleStore {
    pub fn new(lang: Lang) -> Self {
        ArticleStore {
            lang,
            by_title: BTreeMap::new(),
            redirect_map: BTreeMap::new(),
        }
    }

    pub fn lang(&self) -> Lang {
        self.lang
    }

    pub fn len(&self) -> usize {
        self.by_title.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_title.is_empty()
    }

    pub fn get(&self, title: &str) -> Option<&Article> {
        self.by_title.get(title)
    }

    /// Articles in title order.
    pub fn articles(&self) -> impl Iterator<Item = &Article> {
        self.by_title.values()
    }

    /// The category page for a bare category name (no prefix), if stored.
    pub fn category_page(&self, name: &str) -> Option<&Article> {
        let name = normalize_title(name);
        let prefixes: &[&str] = match self.lang {
            Lang::Es => &["Categoría:", "Category:"],
            _ => &["Category:"],
        };
        prefixes
            .iter()
            .find_map(|p| self.by_title.get(&format!("{p}{name}")))
            .filter(|a| a.is_category)
    }

    /// Inserts unless the title is already present. Returns false on duplicate.
    fn insert(&mut self, article: Article) -> bool {
        if self.by_title.contains_key(&article.title) {
            return false;
        }
        if let Some(target) = &article.redirect_to {
            self.redirect_map
                .insert(article.title.clone(), target.clone());
        }
        self.by_title.insert(article.title.clone(), article);
        true
    }

    /// Follows the redirect map until a non-redirect article; identity when
    /// `title` is not a redirect. Cycles, chains longer than
    /// [`MAX_REDIRECT_DEPTH`], and dangling targets are errors.
    pub fn resolve_redirect(&self, title: &str) -> Result<String, RedirectError> {
        let mut current = title.to_string();
        let mut visited = vec![current.clone()];
        let mut hops = 0usize;
        while let Some(target) = self.redirect_map.get(&current) {
            hops += 1;
            if hops > MAX_REDIRECT_DEPTH {
                return Err(RedirectError::TooDeep {
                    title: title.to_string(),
                });
            }
            if let Some(pos) = visited.iter().position(|t| t == target) {
                let mut cycle = visited[pos..].to_vec();
                cycle.push(target.clone());
                return Err(RedirectError::Cycle { cycle });
            }
            visited.push(target.clone());
            current = target.clone();
        }
        if hops > 0 && !self.by_title.contains_key(&current) {
            return Err(RedirectError::Unresolved {
                title: title.to_string(),
                target: current,
            });
        }
        Ok(current)
    }

    /// Serializes the store as one JSON article per line, in title order.
    /// The same bytes always come out for the same store contents.
    pub fn write_jsonl(&self, mut writer: impl Write) -> io::Result<()> {
        for article in self.by_title.values() {
            serde_json::to_writer(&mut writer, article)?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reloads a store dump produced by [`ArticleStore::write_jsonl`].
    pub fn read_jsonl(reader: impl BufRead, lang: Lang) -> Result<Self, WikiError> {
        let mut store = ArticleStore::new(lang);
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let article: Article =
                serde_json::from_str(&line).map_err(|e| WikiError::StoreDump {
                    line: idx + 1,
                    message: e.to_string(),
                })?;
            if article.lang != lang {
                return Err(WikiError::StoreDump {
                    line: idx + 1,
                    message: format!("expected lang {lang}, found {}", article.lang),
                });
            }
            store.insert(article);
        }
        Ok(store)
    }
}

/// Replaces underscores with spaces and trims surrounding whitespace.
/// First-character case is preserved: MediaWiki titles are case-sensitive
/// beyond normalization.
pub fn normalize_title(raw: &str) -> String {
    raw.replace('_', " ").trim().to_string()
}

/// WordNet-style lookup key for a title or lemma: lowercased, spaces
/// replaced by underscores.
pub fn lemma_key(raw: &str) -> String {
    raw.trim().to_lowercase().replace(' ', "_")
}

/// Text from the start of `text` up to (exclusive) the first heading line
/// (two-or-more `=` fencing a title). Always a prefix of `text`.
pub fn first_section(text: &str) -> &str {
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if text::is_heading_line(line) {
            break;
        }
        offset += line.len();
    }
    &text[..offset]
}

/// Parses a dump in either supported format, detected from the first
/// non-whitespace byte (`<` means XML, anything else the JSONL fixture
/// format).
pub fn parse_dump(
    mut reader: impl BufRead,
    lang: Lang,
) -> Result<(ArticleStore, ParseStats), WikiError> {
    let is_xml = loop {
        let buf = reader.fill_buf()?;
        if buf.is_empty() {
            break false;
        }
        match buf.iter().position(|b| !b.is_ascii_whitespace()) {
            Some(pos) => break buf[pos] == b'<',
            None => {
                let len = buf.len();
                reader.consume(len);
            }
        }
    };
    if is_xml {
        parse_dump_xml(reader, lang)
    } else {
        parse_dump_jsonl(reader, lang)
    }
}

#[derive(Deserialize)]
struct FixtureRecord {
    title: String,
    lang: Lang,
    text: String,
    id: u64,
}

fn parse_dump_jsonl(
    reader: impl BufRead,
    lang: Lang,
) -> Result<(ArticleStore, ParseStats), WikiError> {
    let mut store = ArticleStore::new(lang);
    let mut stats = ParseStats::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: FixtureRecord =
            serde_json::from_str(&line).map_err(|e| WikiError::Fixture {
                line: idx + 1,
                message: e.to_string(),
            })?;
        if record.lang != lang {
            return Err(WikiError::Fixture {
                line: idx + 1,
                message: format!("expected lang {lang}, found {}", record.lang),
            });
        }
        stats.pages_seen += 1;
        admit_page(
            &mut store,
            &mut stats,
            record.title,
            record.id,
            None,
            record.text,
            lang,
        );
    }
    Ok((store, stats))
}

fn parse_dump_xml(
    reader: impl BufRead,
    lang: Lang,
) -> Result<(ArticleStore, ParseStats), WikiError> {
    let mut xml = Reader::from_reader(reader);
    let mut store = ArticleStore::new(lang);
    let mut stats = ParseStats::default();
    let mut buf = Vec::new();
    let mut path: Vec<Vec<u8>> = Vec::new();

    let mut title: Option<String> = None;
    let mut page_id: Option<u64> = None;
    let mut redirect: Option<String> = None;
    let mut page_text = String::new();

    let xml_err = |xml: &Reader<_>, message: String| WikiError::Xml {
        offset: xml.buffer_position() as u64,
        message,
    };

    loop {
        let event = xml
            .read_event_into(&mut buf)
            .map_err(|e| xml_err(&xml, e.to_string()))?;
        match event {
            Event::Start(ref e) => {
                let name = e.local_name().as_ref().to_vec();
                if name == b"page" {
                    title = None;
                    page_id = None;
                    redirect = None;
                    page_text.clear();
                }
                path.push(name);
            }
            Event::Empty(ref e) => {
                if e.local_name().as_ref() == b"redirect" && path_tail_is(&path, &[b"page"]) {
                    for attr in e.attributes() {
                        let attr = attr.map_err(|e| xml_err(&xml, e.to_string()))?;
                        if attr.key.as_ref() == b"title" {
                            let value = attr
                                .unescape_value()
                                .map_err(|e| xml_err(&xml, e.to_string()))?;
                            redirect = Some(value.into_owned());
                        }
                    }
                }
            }
            Event::Text(ref e) => {
                let value = e.unescape().map_err(|e| xml_err(&xml, e.to_string()))?;
                collect_page_text(
                    &path,
                    &value,
                    &mut title,
                    &mut page_id,
                    &mut page_text,
                );
            }
            Event::CData(ref e) => {
                let value = String::from_utf8_lossy(e.as_ref()).into_owned();
                collect_page_text(
                    &path,
                    &value,
                    &mut title,
                    &mut page_id,
                    &mut page_text,
                );
            }
            Event::End(ref e) => {
                let name = e.local_name().as_ref().to_vec();
                path.pop();
                if name == b"page" {
                    let title = title.take().ok_or_else(|| {
                        xml_err(&xml, "page element without title".to_string())
                    })?;
                    let page_id = page_id.take().ok_or_else(|| {
                        xml_err(&xml, format!("page {title:?} without id"))
                    })?;
                    stats.pages_seen += 1;
                    admit_page(
                        &mut store,
                        &mut stats,
                        title,
                        page_id,
                        redirect.take(),
                        std::mem::take(&mut page_text),
                        lang,
                    );
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    Ok((store, stats))
}

fn collect_page_text(
    path: &[Vec<u8>],
    value: &str,
    title: &mut Option<String>,
    page_id: &mut Option<u64>,
    page_text: &mut String,
) {
    if path_tail_is(path, &[b"page", b"title"]) {
        title.get_or_insert_with(String::new).push_str(value);
    } else if path_tail_is(path, &[b"page", b"id"]) {
        // the first id directly under page; revision/contributor ids sit deeper
        if page_id.is_none() {
            *page_id = value.trim().parse().ok();
        }
    } else if path_tail_is(path, &[b"page", b"revision", b"text"]) {
        page_text.push_str(value);
    }
}

fn path_tail_is(path: &[Vec<u8>], tail: &[&[u8]]) -> bool {
    path.len() >= tail.len()
        && path[path.len() - tail.len()..]
            .iter()
            .zip(tail)
            .all(|(a, b)| a.as_slice() == *b)
}

/// Classifies and stores one raw page, updating counts.
fn admit_page(
    store: &mut ArticleStore,
    stats: &mut ParseStats,
    raw_title: String,
    page_id: u64,
    xml_redirect: Option<String>,
    raw_text: String,
    lang: Lang,
) {
    let title = normalize_title(&raw_title);
    if title.is_empty() {
        stats.skipped_namespace += 1;
        return;
    }
    let lower = title.to_lowercase();
    if SKIP_PREFIXES.iter().any(|p| lower.starts_with(p)) {
        stats.skipped_namespace += 1;
        return;
    }
    let is_category = CATEGORY_PREFIXES.iter().any(|p| lower.starts_with(p));

    let redirect_to = xml_redirect
        .map(|t| normalize_title(&t))
        .or_else(|| parse_redirect_target(&raw_text));

    let (categories, langlinks) = if redirect_to.is_some() {
        (Vec::new(), BTreeMap::new())
    } else {
        (scan_categories(&raw_text, lang), scan_langlinks(&raw_text, lang))
    };
    let is_disambiguation = redirect_to.is_none() && detect_disambiguation(&title, &raw_text);

    let article = Article {
        page_id,
        title: title.clone(),
        lang,
        raw_text,
        redirect_to,
        categories,
        langlinks,
        is_category,
        is_disambiguation,
    };
    let is_redirect = article.is_redirect();
    if store.insert(article) {
        stats.parsed += 1;
        if is_redirect {
            stats.redirects += 1;
        }
        if is_category {
            stats.category_pages += 1;
        }
        if is_disambiguation {
            stats.disambiguation_pages += 1;
        }
    } else {
        stats.duplicate_titles += 1;
        log::warn!("duplicate title {title:?} in {lang} dump; keeping first");
    }
}

/// Target of a leading redirect directive (`#REDIRECT [[Target]]` or a
/// localized keyword), if the text starts with one.
pub fn parse_redirect_target(text: &str) -> Option<String> {
    let trimmed = text.trim_start();
    let rest = trimmed.strip_prefix('#')?;
    let keyword_end = rest
        .char_indices()
        .find(|(_, c)| c.is_whitespace() || *c == '[')
        .map(|(i, _)| i)
        .unwrap_or(rest.len());
    let keyword = rest[..keyword_end].to_uppercase();
    if !REDIRECT_KEYWORDS.contains(&keyword.as_str()) {
        return None;
    }
    let after = &rest[keyword_end..];
    let open = after.find("[[")?;
    let close = after[open..].find("]]")? + open;
    let inner = &after[open + 2..close];
    let target = inner.split(['|', '#']).next().unwrap_or("");
    let target = normalize_title(target);
    if target.is_empty() {
        None
    } else {
        Some(target)
    }
}

/// Category names referenced by `[[Category:...]]` markers, in order of
/// first appearance, without the prefix.
pub fn scan_categories(text: &str, lang: Lang) -> Vec<String> {
    let prefixes: &[&str] = match lang {
        Lang::Es => &["categoría:", "category:"],
        _ => &["category:"],
    };
    let mut seen = Vec::new();
    for inner in text::link_inners(text) {
        let target = inner.split('|').next().unwrap_or("").trim();
        let target = target.strip_prefix(':').unwrap_or(target);
        let lower = target.to_lowercase();
        for prefix in prefixes {
            if lower.starts_with(prefix) {
                let name = normalize_title(&target[prefix.len()..]);
                if !name.is_empty() && !seen.contains(&name) {
                    seen.push(name);
                }
                break;
            }
        }
    }
    seen
}

/// Interlanguage link titles keyed by language, restricted to the codes the
/// pipeline pairs with `own` (es/ja for English pages, en otherwise).
/// The first marker per code wins.
pub fn scan_langlinks(text: &str, own: Lang) -> BTreeMap<Lang, String> {
    let wanted: &[Lang] = match own {
        Lang::En => &[Lang::Es, Lang::Ja],
        Lang::Es | Lang::Ja => &[Lang::En],
    };
    let mut links = BTreeMap::new();
    for inner in text::link_inners(text) {
        let target = inner.split('|').next().unwrap_or("");
        let Some((code, rest)) = target.split_once(':') else {
            continue;
        };
        let Some(lang) = Lang::from_code(code.trim()) else {
            continue;
        };
        if !wanted.contains(&lang) || links.contains_key(&lang) {
            continue;
        }
        let title = normalize_title(rest.split('#').next().unwrap_or(rest));
        if !title.is_empty() {
            links.insert(lang, title);
        }
    }
    links
}

/// Main-namespace link targets in `text` (used for category page member
/// lists): media, category, and interlanguage links are excluded.
pub fn article_link_targets(text: &str, lang: Lang) -> Vec<String> {
    let category_prefixes: &[&str] = match lang {
        Lang::Es => &["categoría:", "category:"],
        _ => &["category:"],
    };
    let mut targets = Vec::new();
    for inner in text::link_inners(text) {
        let target = inner.split('|').next().unwrap_or("").trim();
        let target = target.strip_prefix(':').unwrap_or(target);
        if target.is_empty() {
            continue;
        }
        if let Some((prefix, _)) = target.split_once(':') {
            let prefix = prefix.trim().to_lowercase();
            let excluded = category_prefixes.contains(&format!("{prefix}:").as_str())
                || matches!(
                    prefix.as_str(),
                    "file" | "image" | "media" | "archivo" | "imagen" | "ファイル" | "画像"
                )
                || Lang::from_code(&prefix).is_some();
            if excluded {
                continue;
            }
        }
        let title = normalize_title(target.split('#').next().unwrap_or(target));
        if !title.is_empty() && !targets.contains(&title) {
            targets.push(title);
        }
    }
    targets
}

fn detect_disambiguation(title: &str, text: &str) -> bool {
    const MARKERS: &[&str] = &["disambig", "desambiguación", "曖昧さ回避"];
    let title_lower = title.to_lowercase();
    if MARKERS.iter().any(|m| title_lower.contains(m)) || title_lower.contains("disambiguation") {
        return true;
    }
    let mut rest = text;
    while let Some(start) = rest.find("{{") {
        let after = &rest[start + 2..];
        let end = after
            .find(['|', '}'])
            .unwrap_or_else(|| after.len().min(64));
        let name = after[..end].trim().to_lowercase();
        if MARKERS.iter().any(|m| name.contains(m)) {
            return true;
        }
        rest = after;
    }
    false
}
