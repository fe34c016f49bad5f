//! Thesaurus assembly: combining the two disambiguators, assigning entry
//! IDs and per-language sense numbers, and extracting short definitions
//! from article text.
//!
//! The combiner prefers MCAT when it produced an assignment and falls back
//! to VSM otherwise. English sense numbers of WordNet-matched entries are
//! the WordNet sense rank of the chosen synset; Spanish and Japanese sense
//! numbers (and unmatched English lemmas) count occurrences in entry-id
//! order, first occurrence 1.

use crate::artifact::{columns, escape_field, unescape_field, ArtifactError};
use crate::assign::{Method, SenseAssignment};
use crate::lang::Lang;
use crate::text::strip_markup;
use crate::tuples::TranslationTuple;
use crate::wiki::{Article, ArticleStore};
use crate::wordnet::{lemma_key, WordNetStore};
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::io::{self, BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ThesaurusError {
    #[error("no assignment available for polysemous title {0:?}")]
    MissingAssignments(String),
    #[error("article {title:?} missing from the {lang} store")]
    MissingArticle { lang: Lang, title: String },
}

/// One language's column of a thesaurus entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LangEntry {
    pub lemma: String,
    pub sense_number: u32,
    pub definition: Option<String>,
}

/// One aligned thesaurus record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThesaurusEntry {
    pub entry_id: String,
    pub pos: char,
    pub method: Method,
    pub synset_offset: Option<u64>,
    pub en: LangEntry,
    pub es: LangEntry,
    pub ja: LangEntry,
}

impl ThesaurusEntry {
    pub fn lang(&self, lang: Lang) -> &LangEntry {
        match lang {
            Lang::En => &self.en,
            Lang::Es => &self.es,
            Lang::Ja => &self.ja,
        }
    }
}

/// The three language stores a build draws from.
#[derive(Clone, Copy)]
pub struct LangStores<'a> {
    pub en: &'a ArticleStore,
    pub es: &'a ArticleStore,
    pub ja: &'a ArticleStore,
}

impl<'a> LangStores<'a> {
    pub fn get(&self, lang: Lang) -> &'a ArticleStore {
        match lang {
            Lang::En => self.en,
            Lang::Es => self.es,
            Lang::Ja => self.ja,
        }
    }
}

/// MCAT result when available, VSM otherwise; the method field of the
/// chosen source is preserved. Both absent is an error.
pub fn combine_assignments(
    vsm: Option<&SenseAssignment>,
    mcat: Option<&SenseAssignment>,
) -> Result<SenseAssignment, ThesaurusError> {
    mcat.or(vsm).cloned().ok_or_else(|| {
        ThesaurusError::MissingAssignments(
            vsm.or(mcat).map(|a| a.en_title.clone()).unwrap_or_default(),
        )
    })
}

/// Splits plain text into sentences at `"。"` and at `"."` followed by
/// whitespace. Sentences are trimmed; empty segments are dropped.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut start = 0;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for (i, &(pos, ch)) in chars.iter().enumerate() {
        let boundary = match ch {
            '。' => Some(pos + ch.len_utf8()),
            '.' => {
                let next = chars.get(i + 1).map(|&(_, c)| c);
                match next {
                    None => Some(pos + 1),
                    Some(c) if c.is_whitespace() => Some(pos + 1),
                    _ => None,
                }
            }
            _ => None,
        };
        if let Some(end) = boundary {
            let sentence = text[start..end].trim();
            if !sentence.is_empty() {
                sentences.push(sentence.to_string());
            }
            start = end;
        }
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        sentences.push(tail.to_string());
    }
    sentences
}

/// First sentence of the article's lead section matching the language's
/// copula pattern ("X is a/are ...", "X es un/una ...", "X は/が ...である");
/// falls back to the first sentence when no pattern matches. `None` for
/// empty text.
pub fn extract_definition(article: &Article, lang: Lang) -> Option<String> {
    let plain = strip_markup(article.first_section());
    let sentences = split_sentences(&plain);
    if sentences.is_empty() {
        return None;
    }
    let matcher = copula_matcher(&article.title, lang);
    sentences
        .iter()
        .find(|s| matcher(s))
        .or(Some(&sentences[0]))
        .cloned()
}

fn copula_matcher(title: &str, lang: Lang) -> Box<dyn Fn(&str) -> bool> {
    let escaped = regex::escape(title);
    match lang {
        Lang::En => {
            let re = Regex::new(&format!(
                r"(?i)^(?:the\s+)?{escaped}(?:s|es)?\s+(?:is\s+an?|are)\b"
            ))
            .expect("valid generated pattern");
            Box::new(move |s: &str| re.is_match(s))
        }
        Lang::Es => {
            let re = Regex::new(&format!(
                r"(?i)^(?:el\s+|la\s+|los\s+|las\s+|un\s+|una\s+)?{escaped}(?:s|es)?\s+es\s+una?\b"
            ))
            .expect("valid generated pattern");
            Box::new(move |s: &str| re.is_match(s))
        }
        Lang::Ja => {
            let title = title.to_string();
            Box::new(move |s: &str| {
                let Some(rest) = s.strip_prefix(&title) else {
                    return false;
                };
                // accept the common とは form besides bare は/が
                let rest = rest.strip_prefix('と').unwrap_or(rest);
                (rest.starts_with('は') || rest.starts_with('が')) && rest.contains("である")
            })
        }
    }
}

/// Builds one entry per tuple. Monosemous lemmas take their single sense,
/// lemmas absent from WordNet are kept as UNMATCHED (named entities),
/// polysemous lemmas go through [`combine_assignments`]. Entry ids are a
/// zero-padded sequence over English title order.
pub fn build_thesaurus(
    tuples: &[TranslationTuple],
    wn: &WordNetStore,
    vsm: &BTreeMap<String, SenseAssignment>,
    mcat: &BTreeMap<String, SenseAssignment>,
    stores: &LangStores<'_>,
) -> Result<Vec<ThesaurusEntry>, ThesaurusError> {
    let mut ordered: Vec<&TranslationTuple> = tuples.iter().collect();
    ordered.sort_by(|a, b| a.en_title.cmp(&b.en_title));

    let mut entries = Vec::with_capacity(ordered.len());
    for (i, tuple) in ordered.iter().enumerate() {
        let offsets = wn.sense_offsets(&tuple.en_title);
        let (method, synset_offset) = match offsets.len() {
            0 => (Method::Unmatched, None),
            1 => (Method::Monosemous, Some(offsets[0])),
            _ => {
                let combined = combine_assignments(
                    vsm.get(&tuple.en_title),
                    mcat.get(&tuple.en_title),
                )
                .map_err(|_| ThesaurusError::MissingAssignments(tuple.en_title.clone()))?;
                (combined.method, Some(combined.synset_offset))
            }
        };

        let definition = |lang: Lang, title: &str| -> Result<Option<String>, ThesaurusError> {
            let article =
                stores
                    .get(lang)
                    .get(title)
                    .ok_or_else(|| ThesaurusError::MissingArticle {
                        lang,
                        title: title.to_string(),
                    })?;
            Ok(extract_definition(article, lang))
        };

        entries.push(ThesaurusEntry {
            entry_id: format!("T{:07}", i + 1),
            pos: 'n',
            method,
            synset_offset,
            en: LangEntry {
                lemma: tuple.en_title.clone(),
                sense_number: 0,
                definition: definition(Lang::En, &tuple.en_title)?,
            },
            es: LangEntry {
                lemma: tuple.es_title.clone(),
                sense_number: 0,
                definition: definition(Lang::Es, &tuple.es_title)?,
            },
            ja: LangEntry {
                lemma: tuple.ja_title.clone(),
                sense_number: 0,
                definition: definition(Lang::Ja, &tuple.ja_title)?,
            },
        });
    }

    assign_target_senses(&mut entries, wn);
    Ok(entries)
}

/// Fills in sense numbers. English entries with a chosen synset get its
/// WordNet sense rank; every other (lang, lemma) group is numbered
/// 1, 2, 3, ... in entry-id order.
pub fn assign_target_senses(entries: &mut [ThesaurusEntry], wn: &WordNetStore) {
    entries.sort_by(|a, b| a.entry_id.cmp(&b.entry_id));
    let mut counters: HashMap<(Lang, String), u32> = HashMap::new();
    let mut next = |lang: Lang, lemma: &str| -> u32 {
        let counter = counters.entry((lang, lemma.to_string())).or_insert(0);
        *counter += 1;
        *counter
    };
    for entry in entries.iter_mut() {
        entry.en.sense_number = match entry.synset_offset {
            Some(offset) => wn
                .sense_rank(&lemma_key(&entry.en.lemma), offset)
                .expect("chosen synset is one of the lemma's senses") as u32,
            None => next(Lang::En, &entry.en.lemma),
        };
        entry.es.sense_number = next(Lang::Es, &entry.es.lemma);
        entry.ja.sense_number = next(Lang::Ja, &entry.ja.lemma);
    }
}

const TSV_FILE: &str = "thesaurus";

fn opt_def(definition: &Option<String>) -> String {
    definition.as_deref().map(escape_field).unwrap_or_default()
}

/// Writes entries as TSV columns: entry_id, pos, method, synset_offset,
/// en_lemma, en_sense, es_lemma, es_sense, ja_lemma, ja_sense, en_def,
/// es_def, ja_def. Definitions have tabs/newlines escaped.
pub fn write_thesaurus_tsv(entries: &[ThesaurusEntry], mut writer: impl Write) -> io::Result<()> {
    for e in entries {
        let offset = e
            .synset_offset
            .map(|o| format!("{o:08}"))
            .unwrap_or_default();
        writeln!(
            writer,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            e.entry_id,
            e.pos,
            e.method,
            offset,
            e.en.lemma,
            e.en.sense_number,
            e.es.lemma,
            e.es.sense_number,
            e.ja.lemma,
            e.ja.sense_number,
            opt_def(&e.en.definition),
            opt_def(&e.es.definition),
            opt_def(&e.ja.definition),
        )?;
    }
    Ok(())
}

pub fn read_thesaurus_tsv(reader: impl BufRead) -> Result<Vec<ThesaurusEntry>, ArtifactError> {
    let mut entries = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let cols = columns(&line, 13, TSV_FILE, line_no)?;
        let bad = |msg: String| ArtifactError::malformed(TSV_FILE, line_no, msg);
        let pos = cols[1]
            .chars()
            .next()
            .filter(|_| cols[1].chars().count() == 1)
            .ok_or_else(|| bad(format!("bad pos {:?}", cols[1])))?;
        let method: Method = cols[2].parse().map_err(bad)?;
        let synset_offset = if cols[3].is_empty() {
            None
        } else {
            Some(
                cols[3]
                    .parse::<u64>()
                    .map_err(|_| bad(format!("bad synset offset {:?}", cols[3])))?,
            )
        };
        let sense = |s: &str| -> Result<u32, ArtifactError> {
            s.parse()
                .map_err(|_| bad(format!("bad sense number {s:?}")))
        };
        let def = |s: &str| -> Option<String> {
            if s.is_empty() {
                None
            } else {
                Some(unescape_field(s))
            }
        };
        entries.push(ThesaurusEntry {
            entry_id: cols[0].to_string(),
            pos,
            method,
            synset_offset,
            en: LangEntry {
                lemma: cols[4].to_string(),
                sense_number: sense(cols[5])?,
                definition: def(cols[10]),
            },
            es: LangEntry {
                lemma: cols[6].to_string(),
                sense_number: sense(cols[7])?,
                definition: def(cols[11]),
            },
            ja: LangEntry {
                lemma: cols[8].to_string(),
                sense_number: sense(cols[9])?,
                definition: def(cols[12]),
            },
        });
    }
    Ok(entries)
}

/// Flat JSONL record mirroring the TSV columns.
#[derive(Debug, Serialize, Deserialize)]
struct ThesaurusRecord {
    entry_id: String,
    pos: String,
    method: String,
    synset_offset: Option<u64>,
    en_lemma: String,
    en_sense: u32,
    es_lemma: String,
    es_sense: u32,
    ja_lemma: String,
    ja_sense: u32,
    en_def: Option<String>,
    es_def: Option<String>,
    ja_def: Option<String>,
}

pub fn write_thesaurus_jsonl(
    entries: &[ThesaurusEntry],
    mut writer: impl Write,
) -> io::Result<()> {
    for e in entries {
        let record = ThesaurusRecord {
            entry_id: e.entry_id.clone(),
            pos: e.pos.to_string(),
            method: e.method.to_string(),
            synset_offset: e.synset_offset,
            en_lemma: e.en.lemma.clone(),
            en_sense: e.en.sense_number,
            es_lemma: e.es.lemma.clone(),
            es_sense: e.es.sense_number,
            ja_lemma: e.ja.lemma.clone(),
            ja_sense: e.ja.sense_number,
            en_def: e.en.definition.clone(),
            es_def: e.es.definition.clone(),
            ja_def: e.ja.definition.clone(),
        };
        serde_json::to_writer(&mut writer, &record)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_thesaurus_jsonl(reader: impl BufRead) -> Result<Vec<ThesaurusEntry>, ArtifactError> {
    let mut entries = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let record: ThesaurusRecord = serde_json::from_str(&line)
            .map_err(|e| ArtifactError::malformed(TSV_FILE, line_no, e.to_string()))?;
        let pos = record
            .pos
            .chars()
            .next()
            .ok_or_else(|| ArtifactError::malformed(TSV_FILE, line_no, "empty pos"))?;
        let method: Method = record
            .method
            .parse()
            .map_err(|e: String| ArtifactError::malformed(TSV_FILE, line_no, e))?;
        entries.push(ThesaurusEntry {
            entry_id: record.entry_id,
            pos,
            method,
            synset_offset: record.synset_offset,
            en: LangEntry {
                lemma: record.en_lemma,
                sense_number: record.en_sense,
                definition: record.en_def,
            },
            es: LangEntry {
                lemma: record.es_lemma,
                sense_number: record.es_sense,
                definition: record.es_def,
            },
            ja: LangEntry {
                lemma: record.ja_lemma,
                sense_number: record.ja_sense,
                definition: record.ja_def,
            },
        });
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn assignment(title: &str, offset: u64, method: Method) -> SenseAssignment {
        SenseAssignment {
            en_title: title.to_string(),
            lemma: title.to_lowercase(),
            synset_offset: offset,
            method,
            score: 1.0,
            runner_up_score: None,
            degenerate: false,
        }
    }

    #[test]
    fn combiner_prefers_mcat() {
        let vsm = assignment("Java", 2, Method::Vsm);
        let mcat = assignment("Java", 1, Method::Mcat);
        let combined = combine_assignments(Some(&vsm), Some(&mcat)).unwrap();
        assert_eq!(combined.synset_offset, 1);
        assert_eq!(combined.method, Method::Mcat);
    }

    #[test]
    fn combiner_falls_back_to_vsm() {
        let vsm = assignment("Java", 2, Method::Vsm);
        let combined = combine_assignments(Some(&vsm), None).unwrap();
        assert_eq!(combined.synset_offset, 2);
        assert_eq!(combined.method, Method::Vsm);
    }

    #[test]
    fn combiner_single_mcat_and_error_case() {
        let mcat = assignment("Java", 1, Method::Mcat);
        assert_eq!(
            combine_assignments(None, Some(&mcat)).unwrap().synset_offset,
            1
        );
        assert!(combine_assignments(None, None).is_err());
    }

    #[test]
    fn sentence_splitting() {
        assert_eq!(
            split_sentences("First one. Second one. Third"),
            vec!["First one.", "Second one.", "Third"]
        );
        assert_eq!(
            split_sentences("鳥類は動物である。飛ぶものが多い。"),
            vec!["鳥類は動物である。", "飛ぶものが多い。"]
        );
        assert_eq!(split_sentences(""), Vec::<String>::new());
        // "3.5" does not split
        assert_eq!(split_sentences("Version 3.5 shipped. Done"), vec![
            "Version 3.5 shipped.",
            "Done"
        ]);
    }

    fn article(title: &str, lang: Lang, text: &str) -> Article {
        Article {
            page_id: 1,
            title: title.to_string(),
            lang,
            raw_text: text.to_string(),
            redirect_to: None,
            categories: Vec::new(),
            langlinks: BTreeMap::new(),
            is_category: false,
            is_disambiguation: false,
        }
    }

    #[test]
    fn english_copula_pattern_matched() {
        let art = article(
            "Bird",
            Lang::En,
            "Intro note here. '''Birds''' are a group of warm-blooded vertebrates. They fly.\n== Taxonomy ==\nunused",
        );
        assert_eq!(
            extract_definition(&art, Lang::En).as_deref(),
            Some("Birds are a group of warm-blooded vertebrates.")
        );
    }

    #[test]
    fn fallback_to_first_sentence() {
        let art = article("Bird", Lang::En, "Nothing matches here. Second sentence.");
        assert_eq!(
            extract_definition(&art, Lang::En).as_deref(),
            Some("Nothing matches here.")
        );
    }

    #[test]
    fn empty_text_gives_none() {
        let art = article("Bird", Lang::En, "");
        assert_eq!(extract_definition(&art, Lang::En), None);
    }

    #[test]
    fn spanish_and_japanese_patterns() {
        let es = article("Pingüino", Lang::Es, "Un pingüino es un ave marina. Otra frase.");
        assert_eq!(
            extract_definition(&es, Lang::Es).as_deref(),
            Some("Un pingüino es un ave marina.")
        );
        let ja = article("富士山", Lang::Ja, "前置き。富士山は、日本一高い山である。");
        assert_eq!(
            extract_definition(&ja, Lang::Ja).as_deref(),
            Some("富士山は、日本一高い山である。")
        );
        let ja2 = article("ベンチ", Lang::Ja, "ベンチとは、長い椅子である。");
        assert_eq!(
            extract_definition(&ja2, Lang::Ja).as_deref(),
            Some("ベンチとは、長い椅子である。")
        );
    }

    fn mini_entry(id: &str, es_lemma: &str) -> ThesaurusEntry {
        ThesaurusEntry {
            entry_id: id.to_string(),
            pos: 'n',
            method: Method::Unmatched,
            synset_offset: None,
            en: LangEntry {
                lemma: format!("En{id}"),
                sense_number: 0,
                definition: None,
            },
            es: LangEntry {
                lemma: es_lemma.to_string(),
                sense_number: 0,
                definition: Some("Una definición.".into()),
            },
            ja: LangEntry {
                lemma: format!("Ja{id}"),
                sense_number: 0,
                definition: None,
            },
        }
    }

    #[test]
    fn repeated_spanish_lemma_numbered_in_order() {
        let (wn, _) = WordNetStore::load("".as_bytes(), "".as_bytes()).unwrap();
        let mut entries = vec![
            mini_entry("T0000001", "Banco"),
            mini_entry("T0000002", "Banco"),
            mini_entry("T0000003", "Ave"),
            mini_entry("T0000004", "Banco"),
        ];
        assign_target_senses(&mut entries, &wn);
        let senses: Vec<u32> = entries.iter().map(|e| e.es.sense_number).collect();
        assert_eq!(senses, vec![1, 2, 1, 3]);
        // unique lemma gets sense 1; unmatched English numbered too
        assert!(entries.iter().all(|e| e.ja.sense_number == 1));
        assert!(entries.iter().all(|e| e.en.sense_number == 1));
    }

    #[test]
    fn english_rank_from_wordnet() {
        let data = "\
00000001 03 n 01 mercury 0 000 | the element
00000002 03 n 01 mercury 0 000 | the planet
00000003 03 n 01 mercury 0 000 | the god
";
        let index = "mercury n 3 0 3 0 00000001 00000002 00000003\n";
        let (wn, _) = WordNetStore::load(index.as_bytes(), data.as_bytes()).unwrap();
        let mut entries = vec![ThesaurusEntry {
            entry_id: "T0000001".into(),
            pos: 'n',
            method: Method::Mcat,
            synset_offset: Some(3),
            en: LangEntry {
                lemma: "Mercury".into(),
                sense_number: 0,
                definition: None,
            },
            es: LangEntry {
                lemma: "Mercurio".into(),
                sense_number: 0,
                definition: None,
            },
            ja: LangEntry {
                lemma: "マーキュリー".into(),
                sense_number: 0,
                definition: None,
            },
        }];
        assign_target_senses(&mut entries, &wn);
        assert_eq!(entries[0].en.sense_number, 3);
    }

    #[test]
    fn tsv_round_trips_with_escaped_definitions() {
        let mut entry = mini_entry("T0000001", "Banco");
        entry.es.definition = Some("tiene\ttab y\nnueva línea \\ barra".into());
        entry.synset_offset = Some(42);
        entry.method = Method::Vsm;
        let entries = vec![entry, mini_entry("T0000002", "Ave")];

        let mut bytes = Vec::new();
        write_thesaurus_tsv(&entries, &mut bytes).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        for line in text.lines() {
            assert_eq!(line.split('\t').count(), 13);
        }
        assert_eq!(read_thesaurus_tsv(&bytes[..]).unwrap(), entries);
    }

    #[test]
    fn jsonl_round_trips() {
        let entries = vec![mini_entry("T0000001", "Banco"), mini_entry("T0000002", "Ave")];
        let mut bytes = Vec::new();
        write_thesaurus_jsonl(&entries, &mut bytes).unwrap();
        assert_eq!(read_thesaurus_jsonl(&bytes[..]).unwrap(), entries);
    }
}
