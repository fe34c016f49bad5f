//! Category-overlap sense assignment ("map categories"): the article's
//! Wikipedia category neighborhood is intersected with each candidate
//! sense's hypernym/hyponym neighborhood in WordNet.
//!
//! Three escalating passes gather evidence: (1) the article's category
//! names, (2) the categories' own parent-category names, (3) the member
//! titles listed on the category pages. The overlap score of a sense is the
//! number of distinct closure lemmas matched by any pass; pass totals break
//! ties in pass order, then the lower sense number wins. A sense is
//! assigned only if at least one lemma matched anywhere.

use crate::assign::{Method, SenseAssignment};
use crate::wiki::{article_link_targets, Article, ArticleStore};
use crate::wordnet::{lemma_key, WordNetStore};
use std::collections::{BTreeMap, BTreeSet};

/// Prepositions that end the head noun phrase of a category name, e.g.
/// "Islands of Indonesia" has head token "Islands".
const PREPOSITIONS: &[&str] = &["of", "in", "at", "on", "by", "from", "for", "with", "to"];

/// The category context of one article: its category names, each
/// category's member titles, and each category's own parent categories.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CategoryNeighborhood {
    pub article_title: String,
    pub categories: Vec<String>,
    /// category name -> member article titles (the article itself excluded)
    pub category_members: BTreeMap<String, BTreeSet<String>>,
    /// category name -> names of the categories the category page belongs to
    pub parent_categories: BTreeMap<String, BTreeSet<String>>,
    /// categories whose page was absent from the dump
    pub missing_category_pages: usize,
}

/// Collects the category neighborhood of a non-redirect article. Missing
/// category pages contribute empty sets and are counted.
pub fn build_neighborhood(article: &Article, store: &ArticleStore) -> CategoryNeighborhood {
    let mut neighborhood = CategoryNeighborhood {
        article_title: article.title.clone(),
        categories: article.categories.clone(),
        ..Default::default()
    };
    for name in &article.categories {
        let (members, parents) = match store.category_page(name) {
            Some(page) => {
                let members: BTreeSet<String> = article_link_targets(&page.raw_text, store.lang())
                    .into_iter()
                    .filter(|t| t != &article.title)
                    .collect();
                let parents: BTreeSet<String> = page.categories.iter().cloned().collect();
                (members, parents)
            }
            None => {
                neighborhood.missing_category_pages += 1;
                (BTreeSet::new(), BTreeSet::new())
            }
        };
        neighborhood.category_members.insert(name.clone(), members);
        neighborhood.parent_categories.insert(name.clone(), parents);
    }
    neighborhood
}

/// Normalization variants of a category name, as WordNet lookup keys.
///
/// Wikipedia categories are usually plural noun phrases while WordNet
/// lemmas are singular, so besides the full phrase this tries the head
/// token (the last token before any preposition), the plain last token,
/// and naive de-pluralized forms of each.
pub fn category_variants(name: &str) -> Vec<String> {
    let lower = name.to_lowercase();
    let tokens: Vec<&str> = lower.split_whitespace().collect();
    if tokens.is_empty() {
        return Vec::new();
    }
    let head = tokens
        .iter()
        .position(|t| PREPOSITIONS.contains(t))
        .map(|i| if i > 0 { tokens[i - 1] } else { tokens[0] })
        .unwrap_or_else(|| tokens[tokens.len() - 1]);
    let last = tokens[tokens.len() - 1];

    let mut variants: Vec<String> = Vec::new();
    let mut push = |candidate: String| {
        if !candidate.is_empty() && !variants.contains(&candidate) {
            variants.push(candidate);
        }
    };
    for stem in [tokens.join("_"), head.to_string(), last.to_string()] {
        push(stem.clone());
        if let Some(s) = stem.strip_suffix("es") {
            if s.len() > 1 {
                push(s.to_string());
            }
        }
        if let Some(s) = stem.strip_suffix('s') {
            if s.len() > 1 {
                push(s.to_string());
            }
        }
    }
    variants
}

/// Per-sense overlap evidence, exposed for the brute-force test oracle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OverlapEvidence {
    pub pass1: BTreeSet<String>,
    pub pass2: BTreeSet<String>,
    pub pass3: BTreeSet<String>,
}

impl OverlapEvidence {
    /// Distinct matched lemmas across all passes.
    pub fn score(&self) -> usize {
        let mut all = self.pass1.clone();
        all.extend(self.pass2.iter().cloned());
        all.extend(self.pass3.iter().cloned());
        all.len()
    }

    /// (score, pass1, pass2, pass3) for ordering: higher wins, earlier
    /// passes break ties.
    fn rank(&self) -> (usize, usize, usize, usize) {
        (self.score(), self.pass1.len(), self.pass2.len(), self.pass3.len())
    }
}

/// Lemmas of the combined hypernym and hyponym closure of `offset`.
pub fn closure_lemmas(wn: &WordNetStore, offset: u64, depth: usize) -> BTreeSet<String> {
    let mut lemmas = BTreeSet::new();
    for direction in [
        crate::wordnet::EdgeDirection::Hypernym,
        crate::wordnet::EdgeDirection::Hyponym,
    ] {
        if let Ok(closure) = wn.closure(offset, depth, direction) {
            for o in closure {
                if let Some(synset) = wn.synset(o) {
                    lemmas.extend(synset.lemmas.iter().cloned());
                }
            }
        }
    }
    lemmas
}

/// Overlap evidence for one sense against one neighborhood.
pub fn overlap_evidence(
    neighborhood: &CategoryNeighborhood,
    lemmas: &BTreeSet<String>,
) -> OverlapEvidence {
    let pass1_strings: BTreeSet<String> = neighborhood
        .categories
        .iter()
        .flat_map(|c| category_variants(c))
        .collect();
    let pass2_strings: BTreeSet<String> = neighborhood
        .parent_categories
        .values()
        .flatten()
        .flat_map(|c| category_variants(c))
        .collect();
    let pass3_strings: BTreeSet<String> = neighborhood
        .category_members
        .values()
        .flatten()
        .map(|t| lemma_key(t))
        .collect();

    let matched = |strings: &BTreeSet<String>| -> BTreeSet<String> {
        lemmas
            .iter()
            .filter(|l| strings.contains(*l))
            .cloned()
            .collect()
    };
    OverlapEvidence {
        pass1: matched(&pass1_strings),
        pass2: matched(&pass2_strings),
        pass3: matched(&pass3_strings),
    }
}

/// Chooses the sense of `lemma` with the strongest category overlap, or
/// `None` when no sense has any overlap. Absence of evidence is not an
/// error.
pub fn mcat_assign(
    article: &Article,
    lemma: &str,
    neighborhood: &CategoryNeighborhood,
    wn: &WordNetStore,
    depth: usize,
) -> Option<SenseAssignment> {
    let senses = wn.senses_of(&lemma_key(lemma));
    if senses.is_empty() {
        return None;
    }

    let evidence: Vec<OverlapEvidence> = senses
        .iter()
        .map(|s| overlap_evidence(neighborhood, &closure_lemmas(wn, s.offset, depth)))
        .collect();

    let mut best = 0usize;
    for (i, e) in evidence.iter().enumerate() {
        if e.rank() > evidence[best].rank() {
            best = i;
        }
    }
    if evidence[best].score() == 0 {
        return None;
    }
    let runner_up = evidence
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, e)| e.score())
        .max();

    Some(SenseAssignment {
        en_title: article.title.clone(),
        lemma: lemma.to_string(),
        synset_offset: senses[best].offset,
        method: Method::Mcat,
        score: evidence[best].score() as f64,
        runner_up_score: runner_up.map(|s| s as f64),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::Lang;
    use crate::wiki::parse_dump;

    fn en_store(records: &[(&str, u64, &str)]) -> ArticleStore {
        let lines: Vec<String> = records
            .iter()
            .map(|(title, id, text)| {
                serde_json::to_string(&serde_json::json!({
                    "title": title, "lang": "en", "text": text, "id": id
                }))
                .unwrap()
            })
            .collect();
        parse_dump(lines.join("\n").as_bytes(), Lang::En).unwrap().0
    }

    /// java as island (under island -> land) and as programming language
    /// (under programming_language -> language).
    fn java_wordnet() -> WordNetStore {
        let data = "\
00000001 03 n 01 land 0 000 | solid ground
00000002 03 n 01 island 0 001 @ 00000001 n 0000 | land surrounded by water
00000003 03 n 01 java 0 001 @ 00000002 n 0000 | an island of Indonesia
00000004 03 n 01 language 0 000 | a systematic means of communicating
00000005 03 n 01 programming_language 0 001 @ 00000004 n 0000 | a language for writing programs
00000006 03 n 01 java 0 001 @ 00000005 n 0000 | an object-oriented programming language
";
        let index = "\
island n 1 1 @ 1 0 00000002
java n 2 1 @ 2 0 00000003 00000006
land n 1 1 ~ 1 0 00000001
language n 1 1 ~ 1 0 00000004
programming_language n 1 1 @ 1 0 00000005
";
        WordNetStore::load(index.as_bytes(), data.as_bytes())
            .unwrap()
            .0
    }

    fn java_store() -> ArticleStore {
        en_store(&[
            (
                "Java",
                1,
                "'''Java''' is an island. [[Category:Islands of Indonesia]]",
            ),
            (
                "Category:Islands of Indonesia",
                2,
                "[[Java]] [[Sumatra]] [[Bali]] [[Category:Islands]]",
            ),
        ])
    }

    #[test]
    fn category_variants_cover_head_and_plural() {
        assert_eq!(
            category_variants("Islands of Indonesia"),
            vec![
                "islands_of_indonesia",
                "islands",
                "island",
                "indonesia",
            ]
        );
        assert_eq!(category_variants("Birds"), vec!["birds", "bird"]);
        assert_eq!(
            category_variants("Programming languages"),
            vec!["programming_languages", "languages", "language"]
        );
        assert!(category_variants("").is_empty());
    }

    #[test]
    fn neighborhood_collects_members_and_parents() {
        let store = en_store(&[
            ("Parrot", 1, "A bird. [[Category:Birds]]"),
            (
                "Category:Birds",
                2,
                "[[Parrot]] [[Penguin]] [[Category:Animals]]",
            ),
        ]);
        let article = store.get("Parrot").unwrap();
        let n = build_neighborhood(article, &store);
        assert_eq!(n.categories, vec!["Birds"]);
        // the article itself is excluded from the member set
        assert_eq!(
            n.category_members["Birds"],
            BTreeSet::from(["Penguin".to_string()])
        );
        assert_eq!(
            n.parent_categories["Birds"],
            BTreeSet::from(["Animals".to_string()])
        );
        assert_eq!(n.missing_category_pages, 0);
    }

    #[test]
    fn empty_neighborhood_for_uncategorized_article() {
        let store = en_store(&[("Loner", 1, "No categories.")]);
        let n = build_neighborhood(store.get("Loner").unwrap(), &store);
        assert!(n.categories.is_empty());
        assert!(n.category_members.is_empty());
    }

    #[test]
    fn missing_category_page_counted() {
        let store = en_store(&[("Parrot", 1, "[[Category:Birds]]")]);
        let n = build_neighborhood(store.get("Parrot").unwrap(), &store);
        assert_eq!(n.missing_category_pages, 1);
        assert!(n.category_members["Birds"].is_empty());
    }

    #[test]
    fn java_island_sense_wins() {
        let wn = java_wordnet();
        let store = java_store();
        let article = store.get("Java").unwrap();
        let n = build_neighborhood(article, &store);
        let a = mcat_assign(article, "java", &n, &wn, 3).unwrap();
        assert_eq!(a.synset_offset, 3);
        assert!(a.score >= 1.0);
        assert_eq!(a.method, Method::Mcat);
        // brute-force check: "islands" de-pluralizes to the hypernym "island"
        let lemmas = closure_lemmas(&wn, 3, 3);
        assert!(lemmas.contains("island"));
    }

    #[test]
    fn no_categories_means_no_assignment() {
        let wn = java_wordnet();
        let store = en_store(&[("Java", 1, "No categories here.")]);
        let article = store.get("Java").unwrap();
        let n = build_neighborhood(article, &store);
        assert_eq!(mcat_assign(article, "java", &n, &wn, 3), None);
    }

    #[test]
    fn earlier_pass_breaks_equal_overlap() {
        // Both senses match exactly one lemma via pass 3 (a member title),
        // but sense 2 also matches in pass 1; sense 2 must win.
        let data = "\
00000001 03 n 01 gadget 0 001 ~ 00000003 n 0000 | tool parent
00000002 03 n 01 fruit 0 001 ~ 00000004 n 0000 | fruit parent
00000003 03 n 01 widget 0 001 @ 00000001 n 0000 | first sense
00000004 03 n 01 widget 0 001 @ 00000002 n 0000 | second sense
";
        let index = "\
fruit n 1 0 1 0 00000002
gadget n 1 0 1 0 00000001
widget n 2 0 2 0 00000003 00000004
";
        let wn = WordNetStore::load(index.as_bytes(), data.as_bytes())
            .unwrap()
            .0;
        let store = en_store(&[
            ("Widget", 1, "[[Category:Fruits]] [[Category:Things]]"),
            ("Category:Fruits", 2, "[[Widget]] [[Fruit]]"),
            ("Category:Things", 3, "[[Widget]] [[Gadget]]"),
        ]);
        let article = store.get("Widget").unwrap();
        let n = build_neighborhood(article, &store);
        // pass 3 members: sense1 matches "gadget", sense2 matches "fruit"
        // pass 1 categories: "Fruits" -> "fruit" matches only sense 2
        let a = mcat_assign(article, "widget", &n, &wn, 3).unwrap();
        assert_eq!(a.synset_offset, 4);
        assert_eq!(a.score, 1.0); // distinct lemmas, counted once
        assert_eq!(a.runner_up_score, Some(1.0));
    }

    #[test]
    fn overlap_monotone_in_depth() {
        let wn = java_wordnet();
        let store = java_store();
        let article = store.get("Java").unwrap();
        let n = build_neighborhood(article, &store);
        let mut previous = 0usize;
        for depth in 1..=4 {
            let score = overlap_evidence(&n, &closure_lemmas(&wn, 3, depth)).score();
            assert!(score >= previous, "depth {depth}: {score} < {previous}");
            previous = score;
        }
    }

    #[test]
    fn assignment_is_one_of_the_senses() {
        let wn = java_wordnet();
        let store = java_store();
        let article = store.get("Java").unwrap();
        let n = build_neighborhood(article, &store);
        if let Some(a) = mcat_assign(article, "java", &n, &wn, 2) {
            assert!(wn.sense_offsets("java").contains(&a.synset_offset));
        }
    }
}
