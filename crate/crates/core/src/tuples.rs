//! Alignment of English, Spanish, and Japanese article titles through
//! interlanguage links.
//!
//! A tuple is emitted for every English main-namespace article (neither a
//! redirect, a category page, nor a disambiguation page) that carries both
//! an `es` and a `ja` interlanguage link whose targets resolve to existing
//! articles in their own stores. Articles with exactly one of the two links
//! are recorded in a diagnostic side channel instead. Back-links from the
//! Spanish and Japanese articles are verified and counted but never filter.

use crate::artifact::{columns, ArtifactError};
use crate::lang::Lang;
use crate::wiki::{Article, ArticleStore};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

/// Aligned EN/ES/JA titles for one concept. All three titles are canonical:
/// redirects are fully resolved in each language's own store.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationTuple {
    pub en_title: String,
    pub es_title: String,
    pub ja_title: String,
    pub en_page_id: u64,
}

/// An English article that linked only one of the two target languages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialPair {
    pub en_title: String,
    pub lang: Lang,
    pub foreign_title: String,
}

#[derive(Debug, Default, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleStats {
    pub candidates: usize,
    pub tuples: usize,
    pub es_only: usize,
    pub ja_only: usize,
    pub no_links: usize,
    pub unresolved_es: usize,
    pub unresolved_ja: usize,
    pub missing_es: usize,
    pub missing_ja: usize,
    pub backlink_es_confirmed: usize,
    pub backlink_es_mismatch: usize,
    pub backlink_es_absent: usize,
    pub backlink_ja_confirmed: usize,
    pub backlink_ja_mismatch: usize,
    pub backlink_ja_absent: usize,
}

#[derive(Debug, Clone, Default)]
pub struct TupleExtraction {
    pub tuples: Vec<TranslationTuple>,
    pub partial: Vec<PartialPair>,
    pub stats: TupleStats,
}

/// Interlanguage links of one parsed article (es/ja for English articles,
/// en otherwise). Equivalent to the `langlinks` field populated at parse
/// time; provided for callers holding raw wikitext.
pub fn extract_langlinks(article: &Article) -> BTreeMap<Lang, String> {
    crate::wiki::scan_langlinks(&article.raw_text, article.lang)
}

/// Builds all translation tuples from the three stores. Output is sorted by
/// English title; skips are counted, never fatal.
pub fn build_tuples(
    en_store: &ArticleStore,
    es_store: &ArticleStore,
    ja_store: &ArticleStore,
) -> TupleExtraction {
    let mut extraction = TupleExtraction::default();
    let stats = &mut extraction.stats;

    for article in en_store.articles() {
        if article.is_redirect() || article.is_category || article.is_disambiguation {
            continue;
        }
        stats.candidates += 1;
        let es_link = article.langlinks.get(&Lang::Es);
        let ja_link = article.langlinks.get(&Lang::Ja);
        match (es_link, ja_link) {
            (None, None) => stats.no_links += 1,
            (Some(title), None) => {
                stats.es_only += 1;
                extraction.partial.push(PartialPair {
                    en_title: article.title.clone(),
                    lang: Lang::Es,
                    foreign_title: title.clone(),
                });
            }
            (None, Some(title)) => {
                stats.ja_only += 1;
                extraction.partial.push(PartialPair {
                    en_title: article.title.clone(),
                    lang: Lang::Ja,
                    foreign_title: title.clone(),
                });
            }
            (Some(es_link), Some(ja_link)) => {
                let Some(es_title) = canonical_target(
                    es_store,
                    es_link,
                    &mut stats.unresolved_es,
                    &mut stats.missing_es,
                ) else {
                    continue;
                };
                let Some(ja_title) = canonical_target(
                    ja_store,
                    ja_link,
                    &mut stats.unresolved_ja,
                    &mut stats.missing_ja,
                ) else {
                    continue;
                };
                check_backlink(
                    en_store,
                    es_store.get(&es_title),
                    &article.title,
                    &mut stats.backlink_es_confirmed,
                    &mut stats.backlink_es_mismatch,
                    &mut stats.backlink_es_absent,
                );
                check_backlink(
                    en_store,
                    ja_store.get(&ja_title),
                    &article.title,
                    &mut stats.backlink_ja_confirmed,
                    &mut stats.backlink_ja_mismatch,
                    &mut stats.backlink_ja_absent,
                );
                extraction.tuples.push(TranslationTuple {
                    en_title: article.title.clone(),
                    es_title,
                    ja_title,
                    en_page_id: article.page_id,
                });
            }
        }
    }

    extraction.tuples.sort_by(|a, b| a.en_title.cmp(&b.en_title));
    extraction
        .partial
        .sort_by(|a, b| (&a.en_title, a.lang).cmp(&(&b.en_title, b.lang)));
    stats.tuples = extraction.tuples.len();
    extraction
}

/// Resolves a langlink target in its own store; returns the canonical title
/// only when it names an existing article.
fn canonical_target(
    store: &ArticleStore,
    link: &str,
    unresolved: &mut usize,
    missing: &mut usize,
) -> Option<String> {
    match store.resolve_redirect(link) {
        Err(_) => {
            *unresolved += 1;
            None
        }
        Ok(title) => {
            if store.get(&title).is_some() {
                Some(title)
            } else {
                *missing += 1;
                None
            }
        }
    }
}

fn check_backlink(
    en_store: &ArticleStore,
    foreign: Option<&Article>,
    en_title: &str,
    confirmed: &mut usize,
    mismatch: &mut usize,
    absent: &mut usize,
) {
    let backlink = foreign.and_then(|a| a.langlinks.get(&Lang::En));
    match backlink {
        None => *absent += 1,
        Some(target) => match en_store.resolve_redirect(target) {
            Ok(resolved) if resolved == en_title => *confirmed += 1,
            _ => *mismatch += 1,
        },
    }
}

/// Writes tuples as TSV columns: en_title, es_title, ja_title, en_page_id.
pub fn write_tuples(tuples: &[TranslationTuple], mut writer: impl Write) -> io::Result<()> {
    for t in tuples {
        writeln!(
            writer,
            "{}\t{}\t{}\t{}",
            t.en_title, t.es_title, t.ja_title, t.en_page_id
        )?;
    }
    Ok(())
}

pub fn read_tuples(reader: impl BufRead) -> Result<Vec<TranslationTuple>, ArtifactError> {
    let mut tuples = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let cols = columns(&line, 4, "tuples", idx + 1)?;
        let en_page_id: u64 = cols[3].parse().map_err(|_| {
            ArtifactError::malformed("tuples", idx + 1, format!("bad page id {:?}", cols[3]))
        })?;
        tuples.push(TranslationTuple {
            en_title: cols[0].to_string(),
            es_title: cols[1].to_string(),
            ja_title: cols[2].to_string(),
            en_page_id,
        });
    }
    Ok(tuples)
}

/// Writes partial pairs as TSV columns: en_title, lang, foreign_title.
pub fn write_partial_pairs(pairs: &[PartialPair], mut writer: impl Write) -> io::Result<()> {
    for p in pairs {
        writeln!(writer, "{}\t{}\t{}", p.en_title, p.lang, p.foreign_title)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiki::parse_dump;

    fn store(lang: Lang, records: &[(&str, u64, &str)]) -> ArticleStore {
        let lines: Vec<String> = records
            .iter()
            .map(|(title, id, text)| {
                serde_json::to_string(&serde_json::json!({
                    "title": title, "lang": lang.code(), "text": text, "id": id
                }))
                .unwrap()
            })
            .collect();
        parse_dump(lines.join("\n").as_bytes(), lang).unwrap().0
    }

    fn fixture_stores() -> (ArticleStore, ArticleStore, ArticleStore) {
        let en = store(
            Lang::En,
            &[
                ("Bird", 1, "'''Birds''' are animals. [[es:Aves]] [[ja:鳥類]]"),
                ("Sumatra", 2, "An island. [[es:Sumatra]]"),
                ("Venus", 3, "A planet. [[ja:金星]]"),
                ("Animal", 4, "No links here."),
                ("Birds", 5, "#REDIRECT [[Bird]]"),
                ("Bank (disambiguation)", 6, "* [[Bank]] [[es:Banco]] [[ja:土手]]"),
                ("Category:Birds", 7, "[[Bird]] [[es:Categoría:Aves]] [[ja:Category:鳥類]]"),
            ],
        );
        let es = store(
            Lang::Es,
            &[
                ("Ave", 10, "Las aves. [[en:Bird]]"),
                ("Aves", 11, "#REDIRECCIÓN [[Ave]]"),
            ],
        );
        let ja = store(Lang::Ja, &[("鳥類", 20, "鳥類は動物である。 [[en:Bird]]")]);
        (en, es, ja)
    }

    #[test]
    fn tuple_built_with_redirect_canonicalized() {
        let (en, es, ja) = fixture_stores();
        let extraction = build_tuples(&en, &es, &ja);
        assert_eq!(
            extraction.tuples,
            vec![TranslationTuple {
                en_title: "Bird".into(),
                es_title: "Ave".into(), // es link said "Aves", a redirect
                ja_title: "鳥類".into(),
                en_page_id: 1,
            }]
        );
        assert_eq!(extraction.stats.tuples, 1);
        assert_eq!(extraction.stats.backlink_es_confirmed, 1);
        assert_eq!(extraction.stats.backlink_ja_confirmed, 1);
    }

    #[test]
    fn single_link_goes_to_partial_side_channel() {
        let (en, es, ja) = fixture_stores();
        let extraction = build_tuples(&en, &es, &ja);
        assert_eq!(extraction.stats.es_only, 1);
        assert_eq!(extraction.stats.ja_only, 1);
        assert_eq!(extraction.stats.no_links, 1);
        assert_eq!(
            extraction.partial,
            vec![
                PartialPair {
                    en_title: "Sumatra".into(),
                    lang: Lang::Es,
                    foreign_title: "Sumatra".into()
                },
                PartialPair {
                    en_title: "Venus".into(),
                    lang: Lang::Ja,
                    foreign_title: "金星".into()
                },
            ]
        );
    }

    #[test]
    fn redirects_categories_and_disambiguations_are_not_sources() {
        let (en, es, ja) = fixture_stores();
        let extraction = build_tuples(&en, &es, &ja);
        // Birds (redirect), Category:Birds, Bank (disambiguation) excluded
        assert_eq!(extraction.stats.candidates, 4);
        assert!(extraction.tuples.iter().all(|t| t.en_title == "Bird"));
    }

    #[test]
    fn missing_target_skips_tuple() {
        let en = store(
            Lang::En,
            &[("Bird", 1, "[[es:NoSuchPage]] [[ja:鳥類]]")],
        );
        let es = store(Lang::Es, &[("Ave", 10, "text")]);
        let ja = store(Lang::Ja, &[("鳥類", 20, "text")]);
        let extraction = build_tuples(&en, &es, &ja);
        assert!(extraction.tuples.is_empty());
        assert_eq!(extraction.stats.missing_es, 1);
    }

    #[test]
    fn tuple_invariants_hold() {
        let (en, es, ja) = fixture_stores();
        let extraction = build_tuples(&en, &es, &ja);
        let mut page_ids: Vec<u64> = extraction.tuples.iter().map(|t| t.en_page_id).collect();
        page_ids.dedup();
        assert_eq!(page_ids.len(), extraction.tuples.len());
        for t in &extraction.tuples {
            // re-resolution is a fixed point on all three titles
            assert_eq!(en.resolve_redirect(&t.en_title).unwrap(), t.en_title);
            assert_eq!(es.resolve_redirect(&t.es_title).unwrap(), t.es_title);
            assert_eq!(ja.resolve_redirect(&t.ja_title).unwrap(), t.ja_title);
            assert!(!en.get(&t.en_title).unwrap().is_redirect());
        }
    }

    #[test]
    fn tuples_file_round_trips() {
        let (en, es, ja) = fixture_stores();
        let tuples = build_tuples(&en, &es, &ja).tuples;
        let mut bytes = Vec::new();
        write_tuples(&tuples, &mut bytes).unwrap();
        assert_eq!(read_tuples(&bytes[..]).unwrap(), tuples);
    }
}
