//! Trilingual thesaurus construction from Wikipedia dumps and WordNet.
//!
//! The pipeline extracts English-Spanish-Japanese article-title tuples from
//! Wikipedia interlanguage links, disambiguates each English title against
//! WordNet noun senses with two methods (gloss/article cosine similarity and
//! category-to-hypernym-tree mapping), and assembles the results into a
//! thesaurus with per-language sense numbers and definitions extracted from
//! article text. A comparable corpus built from article first sections is
//! used to measure lemma coverage.
//!
//! Modules follow the pipeline stages:
//!
//! * [`wiki`] — dump parsing, wikitext cleaning, redirect resolution
//! * [`wordnet`] — WordNet flat-file loader and hypernym/hyponym graph
//! * [`tuples`] — interlanguage-link alignment into title tuples
//! * [`vsm`] — vector-space sense assignment (article vs. gloss cosine)
//! * [`mcat`] — category-overlap sense assignment
//! * [`thesaurus`] — assignment combination, IDs, sense numbers, definitions
//! * [`corpus`] — comparable corpus and coverage evaluation
//! * [`pipeline`] — stage orchestration, artifact files, caching

pub mod artifact;
pub mod assign;
pub mod corpus;
pub mod lang;
pub mod mcat;
pub mod pipeline;
pub mod text;
pub mod thesaurus;
pub mod tuples;
pub mod vsm;
pub mod wiki;
pub mod wordnet;

pub use lang::Lang;
