//! Vector-space sense assignment: the article's bag-of-words term vector is
//! compared against each candidate sense's gloss vector by cosine
//! similarity, and the best-scoring sense wins.
//!
//! Term weights are raw frequencies. Cosine is computed as
//! `dot / sqrt(normsq(a) * normsq(b))` with integer-valued squared norms, so
//! analytically forced values (self-similarity 1, the 1/2 of
//! `{a,b}x{a,c}`) come out exact on small vectors. Either vector having
//! zero norm yields 0 by convention.

use crate::assign::{Method, SenseAssignment};
use crate::text::{clean_text, Stoplist};
use crate::wiki::Article;
use crate::wordnet::WordNetStore;
use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;
use std::sync::RwLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VsmError {
    #[error("lemma {0:?} is not in WordNet")]
    NotInWordNet(String),
}

/// Which part of the article feeds the term vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArticleScope {
    /// The whole article text (the better-performing setting).
    #[default]
    Whole,
    /// Only the text before the first heading.
    FirstSection,
}

impl ArticleScope {
    pub fn as_str(self) -> &'static str {
        match self {
            ArticleScope::Whole => "whole",
            ArticleScope::FirstSection => "first_section",
        }
    }
}

impl FromStr for ArticleScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "whole" => Ok(ArticleScope::Whole),
            "first_section" | "first-section" => Ok(ArticleScope::FirstSection),
            _ => Err(format!("invalid mode {s:?}, expected whole|first_section")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VsmConfig {
    pub scope: ArticleScope,
    /// When false, quoted example sentences are stripped from glosses
    /// before vectorization.
    pub gloss_examples: bool,
}

impl VsmConfig {
    pub fn new(scope: ArticleScope, gloss_examples: bool) -> Self {
        VsmConfig {
            scope,
            gloss_examples,
        }
    }
}

/// Sparse term-count vector with a cached squared Euclidean norm.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TermVector {
    counts: BTreeMap<String, u32>,
    norm_sq: f64,
}

impl TermVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_tokens<I>(tokens: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<String>,
    {
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for token in tokens {
            *counts.entry(token.into()).or_insert(0) += 1;
        }
        Self::from_counts(counts)
    }

    /// Builds a vector from explicit counts; zero-count entries are dropped.
    pub fn from_counts(counts: BTreeMap<String, u32>) -> Self {
        let counts: BTreeMap<String, u32> =
            counts.into_iter().filter(|&(_, c)| c > 0).collect();
        let norm_sq = counts
            .values()
            .map(|&c| {
                let c = c as f64;
                c * c
            })
            .sum();
        TermVector { counts, norm_sq }
    }

    /// Every count multiplied by `k`.
    pub fn scaled(&self, k: u32) -> Self {
        Self::from_counts(
            self.counts
                .iter()
                .map(|(t, &c)| (t.clone(), c.saturating_mul(k)))
                .collect(),
        )
    }

    pub fn count(&self, term: &str) -> u32 {
        self.counts.get(term).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(t, &c)| (t.as_str(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq.sqrt()
    }

    /// Dot product over shared terms, visited in lexical term order.
    pub fn dot(&self, other: &TermVector) -> f64 {
        let (small, large) = if self.counts.len() <= other.counts.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .counts
            .iter()
            .filter_map(|(term, &c1)| {
                large
                    .counts
                    .get(term)
                    .map(|&c2| c1 as f64 * c2 as f64)
            })
            .sum()
    }

    /// Cosine similarity in `[0, 1]`; 0 when either vector is empty.
    pub fn cosine(&self, other: &TermVector) -> f64 {
        if self.norm_sq == 0.0 || other.norm_sq == 0.0 {
            return 0.0;
        }
        let value = self.dot(other) / (self.norm_sq * other.norm_sq).sqrt();
        value.clamp(0.0, 1.0)
    }
}

/// Assigns WordNet senses by article/gloss cosine. Gloss vectors are built
/// once per lemma and cached; the type is safe to share across threads.
pub struct VsmDisambiguator<'a> {
    wn: &'a WordNetStore,
    stoplist: &'a Stoplist,
    config: VsmConfig,
    gloss_cache: RwLock<HashMap<String, Vec<(u64, TermVector)>>>,
}

impl<'a> VsmDisambiguator<'a> {
    pub fn new(wn: &'a WordNetStore, stoplist: &'a Stoplist, config: VsmConfig) -> Self {
        VsmDisambiguator {
            wn,
            stoplist,
            config,
            gloss_cache: RwLock::new(HashMap::new()),
        }
    }

    /// Chooses the sense of `lemma` whose gloss vector is most similar to
    /// the article vector. Ties go to the lower WordNet sense number; if
    /// every cosine is zero, sense 1 is returned flagged degenerate.
    pub fn assign(&self, article: &Article, lemma: &str) -> Result<SenseAssignment, VsmError> {
        let gloss_vectors = self.gloss_vectors(lemma)?;

        let text = match self.config.scope {
            ArticleScope::Whole => &article.raw_text,
            ArticleScope::FirstSection => article.first_section(),
        };
        let article_vector = TermVector::from_tokens(clean_text(text, self.stoplist));

        let scores: Vec<f64> = gloss_vectors
            .iter()
            .map(|(_, gloss)| article_vector.cosine(gloss))
            .collect();

        // iterate in sense order with a strict comparison: the earliest
        // maximum wins, which is the lowest sense number
        let mut best = 0usize;
        for (i, &score) in scores.iter().enumerate() {
            if score > scores[best] {
                best = i;
            }
        }
        let runner_up = scores
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != best)
            .map(|(_, &s)| s)
            .fold(None, |acc: Option<f64>, s| {
                Some(acc.map_or(s, |a| a.max(s)))
            });

        if scores[best] == 0.0 {
            return Ok(SenseAssignment {
                en_title: article.title.clone(),
                lemma: lemma.to_string(),
                synset_offset: gloss_vectors[0].0,
                method: Method::Vsm,
                score: 0.0,
                runner_up_score: None,
                degenerate: true,
            });
        }
        Ok(SenseAssignment {
            en_title: article.title.clone(),
            lemma: lemma.to_string(),
            synset_offset: gloss_vectors[best].0,
            method: Method::Vsm,
            score: scores[best],
            runner_up_score: runner_up,
            degenerate: false,
        })
    }

    fn gloss_vectors(&self, lemma: &str) -> Result<Vec<(u64, TermVector)>, VsmError> {
        let key = crate::wordnet::lemma_key(lemma);
        if let Some(cached) = self.gloss_cache.read().expect("lock poisoned").get(&key) {
            return Ok(cached.clone());
        }
        let senses = self.wn.senses_of(&key);
        if senses.is_empty() {
            return Err(VsmError::NotInWordNet(lemma.to_string()));
        }
        let vectors: Vec<(u64, TermVector)> = senses
            .iter()
            .map(|synset| {
                let gloss = if self.config.gloss_examples {
                    synset.gloss.as_str()
                } else {
                    synset.definition()
                };
                let vector = TermVector::from_tokens(clean_text(gloss, self.stoplist));
                (synset.offset, vector)
            })
            .collect();
        self.gloss_cache
            .write()
            .expect("lock poisoned")
            .insert(key, vectors.clone());
        Ok(vectors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::Lang;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn vector(pairs: &[(&str, u32)]) -> TermVector {
        TermVector::from_counts(
            pairs
                .iter()
                .map(|&(t, c)| (t.to_string(), c))
                .collect::<BTreeMap<_, _>>(),
        )
    }

    #[test]
    fn vectorize_counts_tokens() {
        let v = TermVector::from_tokens(["bank", "bank", "river"]);
        assert_eq!(v.count("bank"), 2);
        assert_eq!(v.count("river"), 1);
        assert_eq!(v.norm(), 5f64.sqrt());

        let empty = TermVector::from_tokens(Vec::<String>::new());
        assert!(empty.is_empty());
        assert_eq!(empty.norm(), 0.0);

        let triple = TermVector::from_tokens(["a", "a", "a"]);
        assert_eq!(triple.count("a"), 3);
        assert_eq!(triple.norm(), 3.0);
    }

    #[test]
    fn zero_counts_not_stored() {
        let v = TermVector::from_counts(
            [("a".to_string(), 2u32), ("b".to_string(), 0u32)]
                .into_iter()
                .collect(),
        );
        assert_eq!(v.num_terms(), 1);
    }

    #[test]
    fn cosine_identity_disjoint_and_half() {
        let v = vector(&[("a", 2), ("b", 3)]);
        assert_eq!(v.cosine(&v), 1.0);

        let disjoint = vector(&[("c", 1), ("d", 5)]);
        assert_eq!(v.cosine(&disjoint), 0.0);

        // {a:1,b:1} x {a:1,c:1} = 1 / sqrt(2*2), analytically 0.5
        let left = vector(&[("a", 1), ("b", 1)]);
        let right = vector(&[("a", 1), ("c", 1)]);
        assert_eq!(left.cosine(&right), 0.5);
    }

    #[test]
    fn cosine_zero_norm_convention() {
        let empty = TermVector::new();
        let v = vector(&[("a", 1)]);
        assert_eq!(empty.cosine(&v), 0.0);
        assert_eq!(v.cosine(&empty), 0.0);
        assert_eq!(empty.cosine(&empty), 0.0);
    }

    fn fixture_wordnet() -> WordNetStore {
        let data = "\
00000005 03 n 01 institution 0 000 | an organization
00000006 03 n 01 bank 0 001 @ 00000005 n 0000 | a financial institution that accepts deposits; \"he cashed a check at the bank\"
00000007 03 n 02 slope 0 incline 1 000 | elevated geological formation
00000008 03 n 01 bank 0 001 @ 00000007 n 0000 | sloping land beside a body of water; \"they pulled the canoe up on the bank\"
";
        let index = "\
bank n 2 1 @ 2 0 00000006 00000008
institution n 1 0 1 0 00000005
slope n 1 0 1 0 00000007
";
        WordNetStore::load(index.as_bytes(), data.as_bytes())
            .unwrap()
            .0
    }

    fn article(title: &str, text: &str) -> Article {
        Article {
            page_id: 1,
            title: title.to_string(),
            lang: Lang::En,
            raw_text: text.to_string(),
            redirect_to: None,
            categories: Vec::new(),
            langlinks: BTreeMap::new(),
            is_category: false,
            is_disambiguation: false,
        }
    }

    // Hand-computed oracle for the riverbank fixture, with stoplist {a, the}:
    //   article tokens: land(1) beside(1) water(2) canoe(1) sloping(1)
    //     -> norm_sq = 1+1+4+1+1 = 8
    //   slope-sense gloss tokens: sloping land beside body of water they
    //     pulled canoe up on bank -> all count 1, norm_sq = 12
    //     dot = sloping*1 + land*1 + beside*1 + water*2 + canoe*1 = 6
    //     cosine = 6 / sqrt(8*12) = 6/sqrt(96) = 0.61237...
    //   financial-sense gloss: no shared terms -> cosine 0
    #[test]
    fn riverbank_article_gets_slope_sense() {
        let wn = fixture_wordnet();
        let stoplist = Stoplist::parse("a\nthe");
        let vsm = VsmDisambiguator::new(&wn, &stoplist, VsmConfig::new(ArticleScope::Whole, true));
        let art = article("Bank", "the land beside water. water canoe sloping");
        // recompute the expected cosine from first principles
        let expected = 6.0 / (8.0f64 * 12.0).sqrt();

        let a = vsm.assign(&art, "bank").unwrap();
        assert_eq!(a.synset_offset, 8);
        assert!((a.score - expected).abs() < 1e-12, "score {}", a.score);
        assert_eq!(a.runner_up_score, Some(0.0));
        assert!(!a.degenerate);
        assert_eq!(a.method, Method::Vsm);
    }

    #[test]
    fn empty_article_vector_is_degenerate() {
        let wn = fixture_wordnet();
        let stoplist = Stoplist::empty();
        let vsm = VsmDisambiguator::new(&wn, &stoplist, VsmConfig::default());
        let art = article("Bank", "{{stub}}");
        let a = vsm.assign(&art, "bank").unwrap();
        assert!(a.degenerate);
        assert_eq!(a.score, 0.0);
        assert_eq!(a.synset_offset, 6); // sense 1 by convention
    }

    #[test]
    fn tie_breaks_to_lower_sense_number() {
        // identical glosses force exactly equal scores
        let data = "\
00000001 03 n 01 twin 0 000 | same words here
00000002 03 n 01 twin 0 000 | same words here
";
        let index = "twin n 2 0 2 0 00000001 00000002\n";
        let wn = WordNetStore::load(index.as_bytes(), data.as_bytes())
            .unwrap()
            .0;
        let stoplist = Stoplist::empty();
        let vsm = VsmDisambiguator::new(&wn, &stoplist, VsmConfig::default());
        let a = vsm.assign(&article("Twin", "same words here"), "twin").unwrap();
        assert_eq!(a.synset_offset, 1);
        assert_eq!(a.score, a.runner_up_score.unwrap());
    }

    #[test]
    fn unknown_lemma_is_an_error() {
        let wn = fixture_wordnet();
        let stoplist = Stoplist::empty();
        let vsm = VsmDisambiguator::new(&wn, &stoplist, VsmConfig::default());
        assert!(matches!(
            vsm.assign(&article("X", "text"), "nonexistent"),
            Err(VsmError::NotInWordNet(_))
        ));
    }

    #[test]
    fn first_section_scope_changes_input() {
        let wn = fixture_wordnet();
        let stoplist = Stoplist::parse("a\nthe");
        let art = article(
            "Bank",
            "financial institution deposits check cashed\n== Geography ==\nsloping land beside water canoe",
        );
        let whole = VsmDisambiguator::new(&wn, &stoplist, VsmConfig::new(ArticleScope::Whole, true));
        let first =
            VsmDisambiguator::new(&wn, &stoplist, VsmConfig::new(ArticleScope::FirstSection, true));
        assert_eq!(first.assign(&art, "bank").unwrap().synset_offset, 6);
        // whole text sees both halves but the financial lead dominates
        assert_eq!(whole.assign(&art, "bank").unwrap().synset_offset, 6);
    }

    #[test]
    fn gloss_examples_flag_changes_gloss_vector() {
        let wn = fixture_wordnet();
        let stoplist = Stoplist::parse("a\nthe");
        let art = article("Bank", "canoe canoe canoe");
        // "canoe" appears only inside the slope gloss's example sentence
        let with = VsmDisambiguator::new(&wn, &stoplist, VsmConfig::new(ArticleScope::Whole, true));
        let without =
            VsmDisambiguator::new(&wn, &stoplist, VsmConfig::new(ArticleScope::Whole, false));
        assert!(!with.assign(&art, "bank").unwrap().degenerate);
        assert!(without.assign(&art, "bank").unwrap().degenerate);
    }

    proptest! {
        #[test]
        fn cosine_symmetric_and_bounded(
            left in proptest::collection::btree_map("[a-e]", 1u32..50, 0..6),
            right in proptest::collection::btree_map("[a-e]", 1u32..50, 0..6),
        ) {
            let u = TermVector::from_counts(left.into_iter().map(|(k, v)| (k, v)).collect());
            let v = TermVector::from_counts(right.into_iter().map(|(k, v)| (k, v)).collect());
            let uv = u.cosine(&v);
            let vu = v.cosine(&u);
            prop_assert!((uv - vu).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&uv));
            if !u.is_empty() {
                prop_assert!((u.cosine(&u) - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn norm_squared_matches_counts(
            counts in proptest::collection::btree_map("[a-h]{1,4}", 1u32..1000, 0..12),
        ) {
            let v = TermVector::from_counts(counts.clone().into_iter().collect());
            let expected: f64 = counts.values().map(|&c| (c as f64) * (c as f64)).sum();
            let norm_sq = v.norm() * v.norm();
            let tolerance = 1e-9 * expected.max(1.0);
            prop_assert!((norm_sq - expected).abs() <= tolerance);
        }

        /// Scaling the article vector never changes the argmax sense.
        #[test]
        fn cosine_scale_invariant(
            counts in proptest::collection::btree_map("[a-e]", 1u32..30, 1..5),
            other in proptest::collection::btree_map("[a-e]", 1u32..30, 1..5),
            k in prop_oneof![Just(2u32), Just(5u32), Just(10u32)],
        ) {
            let u = TermVector::from_counts(counts.into_iter().collect());
            let v = TermVector::from_counts(other.into_iter().collect());
            let plain = u.cosine(&v);
            let scaled = u.scaled(k).cosine(&v);
            prop_assert!((plain - scaled).abs() < 1e-9);
        }
    }
}
