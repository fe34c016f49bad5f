//! Comparable corpus construction and thesaurus coverage.
//!
//! The corpus takes the first section of every article whose tuple made it
//! into the thesaurus, split into sentences. Coverage counts how many of
//! the corpus word types match a thesaurus lemma exactly (after the usual
//! lookup normalization); multiword lemmas, which can never equal a single
//! token, are additionally matched as phrases over the raw sentences and
//! reported separately.

use crate::lang::Lang;
use crate::text::{clean_text, strip_markup, Stoplist};
use crate::thesaurus::{split_sentences, LangStores, ThesaurusEntry};
use crate::wordnet::lemma_key;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSentence {
    pub lang: Lang,
    pub en_page_id: u64,
    pub text: String,
}

#[derive(Debug, Clone, Default)]
pub struct ComparableCorpus {
    pub sentences: Vec<CorpusSentence>,
    pub type_sets: BTreeMap<Lang, BTreeSet<String>>,
}

impl ComparableCorpus {
    pub fn types(&self, lang: Lang) -> usize {
        self.type_sets.get(&lang).map_or(0, BTreeSet::len)
    }
}

/// Builds the corpus from the first sections of all thesaurus articles, in
/// entry-id order with languages in en/es/ja order per entry.
pub fn build_corpus(
    entries: &[ThesaurusEntry],
    stores: &LangStores<'_>,
    stoplist: &Stoplist,
) -> ComparableCorpus {
    let mut corpus = ComparableCorpus::default();
    for lang in Lang::ALL {
        corpus.type_sets.insert(lang, BTreeSet::new());
    }
    for entry in entries {
        let en_page_id = stores
            .en
            .get(&entry.en.lemma)
            .map(|a| a.page_id)
            .unwrap_or(0);
        for lang in Lang::ALL {
            let lemma = &entry.lang(lang).lemma;
            let Some(article) = stores.get(lang).get(lemma) else {
                continue;
            };
            let plain = strip_markup(article.first_section());
            let types = corpus.type_sets.get_mut(&lang).expect("all langs present");
            for sentence in split_sentences(&plain) {
                types.extend(clean_text(&sentence, stoplist));
                corpus.sentences.push(CorpusSentence {
                    lang,
                    en_page_id,
                    text: sentence,
                });
            }
        }
    }
    corpus
}

/// Coverage of one language's corpus types by that language's lemmas.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LangCoverage {
    pub types: usize,
    pub matched: usize,
    pub ratio: f64,
    /// multiword lemmas in the thesaurus for this language
    pub phrase_lemmas: usize,
    /// multiword lemmas found verbatim in at least one sentence
    pub phrase_matched: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub per_lang: BTreeMap<Lang, LangCoverage>,
}

impl CoverageReport {
    /// The headline English-side coverage.
    pub fn english(&self) -> &LangCoverage {
        self.per_lang.get(&Lang::En).expect("en always computed")
    }
}

/// Computes per-language coverage of corpus word types by thesaurus lemmas.
/// Ratio is matched/types, 0 when there are no types.
pub fn coverage(corpus: &ComparableCorpus, entries: &[ThesaurusEntry]) -> CoverageReport {
    let mut report = CoverageReport::default();
    for lang in Lang::ALL {
        let lemma_keys: BTreeSet<String> = entries
            .iter()
            .map(|e| lemma_key(&e.lang(lang).lemma))
            .collect();
        let phrases: BTreeSet<String> = entries
            .iter()
            .map(|e| e.lang(lang).lemma.to_lowercase())
            .filter(|l| l.contains(' '))
            .collect();

        let empty = BTreeSet::new();
        let types = corpus.type_sets.get(&lang).unwrap_or(&empty);
        let matched = types.iter().filter(|t| lemma_keys.contains(*t)).count();
        let ratio = if types.is_empty() {
            0.0
        } else {
            matched as f64 / types.len() as f64
        };

        let sentences_lower: Vec<String> = corpus
            .sentences
            .iter()
            .filter(|s| s.lang == lang)
            .map(|s| s.text.to_lowercase())
            .collect();
        let phrase_matched = phrases
            .iter()
            .filter(|p| sentences_lower.iter().any(|s| s.contains(*p)))
            .count();

        report.per_lang.insert(
            lang,
            LangCoverage {
                types: types.len(),
                matched,
                ratio,
                phrase_lemmas: phrases.len(),
                phrase_matched,
            },
        );
    }
    report
}

/// Writes sentences as TSV columns: lang, en_page_id, sentence.
pub fn write_corpus_tsv(corpus: &ComparableCorpus, mut writer: impl Write) -> io::Result<()> {
    for s in &corpus.sentences {
        writeln!(
            writer,
            "{}\t{}\t{}",
            s.lang,
            s.en_page_id,
            crate::artifact::escape_field(&s.text)
        )?;
    }
    Ok(())
}

/// Human-readable coverage summary.
pub fn write_coverage_text(report: &CoverageReport, mut writer: impl Write) -> io::Result<()> {
    writeln!(writer, "thesaurus coverage over the comparable corpus")?;
    for (lang, c) in &report.per_lang {
        writeln!(
            writer,
            "{lang}: {} of {} word types matched ({:.2}%); {} of {} multiword lemmas found as phrases",
            c.matched,
            c.types,
            c.ratio * 100.0,
            c.phrase_matched,
            c.phrase_lemmas,
        )?;
    }
    Ok(())
}

/// Machine-readable single-line JSON report.
pub fn write_coverage_json(report: &CoverageReport, mut writer: impl Write) -> io::Result<()> {
    serde_json::to_writer(&mut writer, report)?;
    writer.write_all(b"\n")?;
    Ok(())
}
