//! WordNet noun database: flat-file loader, sense index, and the
//! hypernym/hyponym graph.
//!
//! Only the standard `index.noun` / `data.noun` grammar is consumed.
//! Hypernym (`@`) and hyponym (`~`) pointers are kept, all other pointer
//! symbols are ignored, and non-noun lines are skipped with a warning so
//! that accidentally supplied verb/adjective/adverb files do no harm.
//! After loading, the two edge directions are symmetrized and the hypernym
//! graph is checked to be acyclic; a cycle fails the load.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{self, BufRead};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WordNetError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{file} line {line}: {message}")]
    MalformedLine {
        file: &'static str,
        line: usize,
        message: String,
    },
    #[error("synset {from:08} points at nonexistent offset {to:08}")]
    DanglingPointer { from: u64, to: u64 },
    #[error("index entry {lemma:?} lists nonexistent offset {offset:08}")]
    DanglingIndexOffset { lemma: String, offset: u64 },
    #[error("hypernym cycle: {}", cycle.iter().map(|o| format!("{o:08}")).collect::<Vec<_>>().join(" -> "))]
    HypernymCycle { cycle: Vec<u64> },
    #[error("unknown synset offset {0:08}")]
    UnknownOffset(u64),
}

/// Traversal direction for [`WordNetStore::closure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeDirection {
    Hypernym,
    Hyponym,
}

/// One noun synset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synset {
    pub offset: u64,
    pub pos: char,
    /// Lowercased lemmas, multiword collocations underscore-joined.
    pub lemmas: Vec<String>,
    /// Definition text plus optional quoted example sentences.
    pub gloss: String,
    pub hypernyms: Vec<u64>,
    pub hyponyms: Vec<u64>,
}

impl Synset {
    /// The gloss with trailing quoted example sentences removed.
    pub fn definition(&self) -> &str {
        match self.gloss.find("; \"") {
            Some(pos) => self.gloss[..pos].trim_end(),
            None => self.gloss.trim(),
        }
    }
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct LoadStats {
    pub synsets: usize,
    pub index_lemmas: usize,
    pub skipped_non_noun_data: usize,
    pub skipped_non_noun_index: usize,
}

/// Immutable WordNet noun store; safe for unrestricted concurrent reads.
#[derive(Debug, Clone)]
pub struct WordNetStore {
    synsets: BTreeMap<u64, Synset>,
    /// lemma -> synset offsets in index (sense) order, sense 1 first.
    index: BTreeMap<String, Vec<u64>>,
}

/// Lookup key for a lemma: lowercased, spaces replaced by underscores.
pub fn lemma_key(raw: &str) -> String {
    crate::wiki::lemma_key(raw)
}

impl WordNetStore {
    /// Loads `index.noun` / `data.noun` streams. License header lines
    /// (leading two spaces) are skipped.
    pub fn load(
        index: impl BufRead,
        data: impl BufRead,
    ) -> Result<(Self, LoadStats), WordNetError> {
        let mut stats = LoadStats::default();
        let mut synsets: BTreeMap<u64, Synset> = BTreeMap::new();

        for (line_no, line) in data.lines().enumerate() {
            let line = line?;
            if line.starts_with("  ") || line.trim().is_empty() {
                continue;
            }
            match parse_data_line(&line, line_no + 1)? {
                Some(synset) => {
                    synsets.insert(synset.offset, synset);
                }
                None => stats.skipped_non_noun_data += 1,
            }
        }
        stats.synsets = synsets.len();
        if stats.skipped_non_noun_data > 0 {
            log::warn!(
                "ignored {} non-noun data lines (only nouns are loaded)",
                stats.skipped_non_noun_data
            );
        }

        let mut index_map: BTreeMap<String, Vec<u64>> = BTreeMap::new();
        for (line_no, line) in index.lines().enumerate() {
            let line = line?;
            if line.starts_with("  ") || line.trim().is_empty() {
                continue;
            }
            match parse_index_line(&line, line_no + 1)? {
                Some((lemma, offsets)) => {
                    for &offset in &offsets {
                        if !synsets.contains_key(&offset) {
                            return Err(WordNetError::DanglingIndexOffset { lemma, offset });
                        }
                    }
                    index_map.entry(lemma).or_insert(offsets);
                }
                None => stats.skipped_non_noun_index += 1,
            }
        }
        stats.index_lemmas = index_map.len();
        if stats.skipped_non_noun_index > 0 {
            log::warn!(
                "ignored {} non-noun index lines (only nouns are loaded)",
                stats.skipped_non_noun_index
            );
        }

        validate_pointers(&synsets)?;
        symmetrize(&mut synsets);
        check_acyclic(&synsets)?;

        Ok((
            WordNetStore {
                synsets,
                index: index_map,
            },
            stats,
        ))
    }

    pub fn synset(&self, offset: u64) -> Option<&Synset> {
        self.synsets.get(&offset)
    }

    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    /// Synset offsets for a lemma in WordNet sense order; empty when the
    /// lemma is absent. The lookup lowercases and replaces spaces with
    /// underscores, so article titles can be passed directly.
    pub fn sense_offsets(&self, lemma: &str) -> &[u64] {
        self.index
            .get(&lemma_key(lemma))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Synsets for a lemma in WordNet sense order.
    pub fn senses_of(&self, lemma: &str) -> Vec<&Synset> {
        self.sense_offsets(lemma)
            .iter()
            .filter_map(|o| self.synsets.get(o))
            .collect()
    }

    pub fn is_polysemous(&self, lemma: &str) -> bool {
        self.sense_offsets(lemma).len() > 1
    }

    /// 1-based WordNet sense rank of `offset` among the senses of `lemma`.
    pub fn sense_rank(&self, lemma: &str, offset: u64) -> Option<usize> {
        self.sense_offsets(lemma)
            .iter()
            .position(|&o| o == offset)
            .map(|i| i + 1)
    }

    /// All synsets reachable from `offset` along `direction` edges within
    /// `max_depth` steps, excluding the start. Breadth-first order; edge
    /// lists are kept sorted, so the order is deterministic.
    pub fn closure(
        &self,
        offset: u64,
        max_depth: usize,
        direction: EdgeDirection,
    ) -> Result<Vec<u64>, WordNetError> {
        if !self.synsets.contains_key(&offset) {
            return Err(WordNetError::UnknownOffset(offset));
        }
        let mut result = Vec::new();
        let mut visited: HashSet<u64> = HashSet::from([offset]);
        let mut frontier = vec![offset];
        for _ in 0..max_depth {
            let mut next = Vec::new();
            for &node in &frontier {
                let synset = &self.synsets[&node];
                let edges = match direction {
                    EdgeDirection::Hypernym => &synset.hypernyms,
                    EdgeDirection::Hyponym => &synset.hyponyms,
                };
                for &target in edges {
                    if visited.insert(target) {
                        next.push(target);
                        result.push(target);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(result)
    }

    pub fn hypernym_closure(&self, offset: u64, max_depth: usize) -> Result<Vec<u64>, WordNetError> {
        self.closure(offset, max_depth, EdgeDirection::Hypernym)
    }

    pub fn hyponym_closure(&self, offset: u64, max_depth: usize) -> Result<Vec<u64>, WordNetError> {
        self.closure(offset, max_depth, EdgeDirection::Hyponym)
    }
}

/// Parses one `data.noun` line; `Ok(None)` for non-noun synsets.
fn parse_data_line(line: &str, line_no: usize) -> Result<Option<Synset>, WordNetError> {
    let err = |message: String| WordNetError::MalformedLine {
        file: "data.noun",
        line: line_no,
        message,
    };
    let (head, gloss) = match line.split_once('|') {
        Some((head, gloss)) => (head, gloss.trim().to_string()),
        None => (line, String::new()),
    };
    let fields: Vec<&str> = head.split_whitespace().collect();
    if fields.len() < 4 {
        return Err(err("expected offset, lex_filenum, ss_type, w_cnt".into()));
    }
    let offset: u64 = fields[0]
        .parse()
        .map_err(|_| err(format!("bad synset offset {:?}", fields[0])))?;
    let ss_type = fields[2];
    if ss_type != "n" {
        return Ok(None);
    }
    let w_cnt = usize::from_str_radix(fields[3], 16)
        .map_err(|_| err(format!("bad word count {:?}", fields[3])))?;
    if w_cnt == 0 {
        return Err(err("synset with zero words".into()));
    }
    let words_end = 4 + 2 * w_cnt;
    if fields.len() < words_end + 1 {
        return Err(err(format!("expected {w_cnt} word/lex_id pairs and a pointer count")));
    }
    let lemmas: Vec<String> = (0..w_cnt)
        .map(|i| fields[4 + 2 * i].to_lowercase())
        .collect();
    let p_cnt: usize = fields[words_end]
        .parse()
        .map_err(|_| err(format!("bad pointer count {:?}", fields[words_end])))?;
    if fields.len() < words_end + 1 + 4 * p_cnt {
        return Err(err(format!("expected {p_cnt} pointers of 4 fields each")));
    }
    let mut hypernyms = Vec::new();
    let mut hyponyms = Vec::new();
    for p in 0..p_cnt {
        let base = words_end + 1 + 4 * p;
        let symbol = fields[base];
        let target: u64 = fields[base + 1]
            .parse()
            .map_err(|_| err(format!("bad pointer offset {:?}", fields[base + 1])))?;
        let target_pos = fields[base + 2];
        if target_pos != "n" {
            continue;
        }
        match symbol {
            "@" => hypernyms.push(target),
            "~" => hyponyms.push(target),
            _ => {}
        }
    }
    Ok(Some(Synset {
        offset,
        pos: 'n',
        lemmas,
        gloss,
        hypernyms,
        hyponyms,
    }))
}

/// Parses one `index.noun` line into (lemma, sense-ordered offsets);
/// `Ok(None)` for non-noun entries.
fn parse_index_line(line: &str, line_no: usize) -> Result<Option<(String, Vec<u64>)>, WordNetError> {
    let err = |message: String| WordNetError::MalformedLine {
        file: "index.noun",
        line: line_no,
        message,
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < 6 {
        return Err(err("expected lemma, pos, synset_cnt, p_cnt, ..., offsets".into()));
    }
    let lemma = fields[0].to_lowercase();
    if fields[1] != "n" {
        return Ok(None);
    }
    let synset_cnt: usize = fields[2]
        .parse()
        .map_err(|_| err(format!("bad synset count {:?}", fields[2])))?;
    let p_cnt: usize = fields[3]
        .parse()
        .map_err(|_| err(format!("bad pointer count {:?}", fields[3])))?;
    let expected = 6 + p_cnt + synset_cnt;
    if fields.len() != expected {
        return Err(err(format!(
            "expected {expected} fields for synset_cnt={synset_cnt}, p_cnt={p_cnt}, found {}",
            fields.len()
        )));
    }
    let offsets = fields[6 + p_cnt..]
        .iter()
        .map(|f| {
            f.parse::<u64>()
                .map_err(|_| err(format!("bad synset offset {f:?}")))
        })
        .collect::<Result<Vec<u64>, _>>()?;
    Ok(Some((lemma, offsets)))
}

fn validate_pointers(synsets: &BTreeMap<u64, Synset>) -> Result<(), WordNetError> {
    for synset in synsets.values() {
        for &target in synset.hypernyms.iter().chain(&synset.hyponyms) {
            if !synsets.contains_key(&target) {
                return Err(WordNetError::DanglingPointer {
                    from: synset.offset,
                    to: target,
                });
            }
        }
    }
    Ok(())
}

/// Ensures `s2 ∈ hypernyms(s1) ⟺ s1 ∈ hyponyms(s2)` by adding any missing
/// inverse edge, then sorts and dedups the adjacency lists so traversal
/// order is deterministic.
fn symmetrize(synsets: &mut BTreeMap<u64, Synset>) {
    let mut add_hypo: Vec<(u64, u64)> = Vec::new();
    let mut add_hyper: Vec<(u64, u64)> = Vec::new();
    for synset in synsets.values() {
        for &up in &synset.hypernyms {
            add_hypo.push((up, synset.offset));
        }
        for &down in &synset.hyponyms {
            add_hyper.push((down, synset.offset));
        }
    }
    for (node, hypo) in add_hypo {
        let entry = synsets.get_mut(&node).expect("validated by validate_pointers");
        entry.hyponyms.push(hypo);
    }
    for (node, hyper) in add_hyper {
        let entry = synsets.get_mut(&node).expect("validated by validate_pointers");
        entry.hypernyms.push(hyper);
    }
    for synset in synsets.values_mut() {
        synset.hypernyms.sort_unstable();
        synset.hypernyms.dedup();
        synset.hyponyms.sort_unstable();
        synset.hyponyms.dedup();
    }
}

/// Depth-first cycle check over hypernym edges.
fn check_acyclic(synsets: &BTreeMap<u64, Synset>) -> Result<(), WordNetError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color: HashMap<u64, Color> =
        synsets.keys().map(|&o| (o, Color::White)).collect();

    for &start in synsets.keys() {
        if color[&start] != Color::White {
            continue;
        }
        // iterative DFS: (node, next child index)
        let mut stack: Vec<(u64, usize)> = vec![(start, 0)];
        color.insert(start, Color::Gray);
        while let Some(&mut (node, ref mut child_idx)) = stack.last_mut() {
            let hypernyms = &synsets[&node].hypernyms;
            if *child_idx < hypernyms.len() {
                let target = hypernyms[*child_idx];
                *child_idx += 1;
                match color[&target] {
                    Color::White => {
                        color.insert(target, Color::Gray);
                        stack.push((target, 0));
                    }
                    Color::Gray => {
                        let pos = stack
                            .iter()
                            .position(|&(n, _)| n == target)
                            .unwrap_or(0);
                        let mut cycle: Vec<u64> =
                            stack[pos..].iter().map(|&(n, _)| n).collect();
                        cycle.push(target);
                        return Err(WordNetError::HypernymCycle { cycle });
                    }
                    Color::Black => {}
                }
            } else {
                color.insert(node, Color::Black);
                stack.pop();
            }
        }
    }
    Ok(())
}
