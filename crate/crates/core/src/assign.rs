//! Sense assignments and the tab-separated assignment dump shared by both
//! disambiguation methods.

use crate::artifact::{columns, ArtifactError};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

/// How an entry's sense was decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Vsm,
    Mcat,
    Monosemous,
    Unmatched,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Vsm => "VSM",
            Method::Mcat => "MCAT",
            Method::Monosemous => "MONOSEMOUS",
            Method::Unmatched => "UNMATCHED",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "VSM" => Ok(Method::Vsm),
            "MCAT" => Ok(Method::Mcat),
            "MONOSEMOUS" => Ok(Method::Monosemous),
            "UNMATCHED" => Ok(Method::Unmatched),
            _ => Err(format!("unknown method {s:?}")),
        }
    }
}

/// A WordNet sense chosen for one English article title.
///
/// For VSM the score is a cosine in `[0, 1]`; for MCAT it is the overlap
/// count. `runner_up_score` is the best competing sense's score, when any
/// competitor exists.
#[derive(Debug, Clone, PartialEq)]
pub struct SenseAssignment {
    pub en_title: String,
    pub lemma: String,
    pub synset_offset: u64,
    pub method: Method,
    pub score: f64,
    pub runner_up_score: Option<f64>,
    /// Set when every candidate scored zero and sense 1 was used by
    /// convention.
    pub degenerate: bool,
}

const DUMP_FILE: &str = "assignments";

/// Writes assignments as TSV columns: en_title, lemma, synset_offset,
/// method, score, runner_up, flags.
pub fn write_assignments(
    assignments: &[SenseAssignment],
    mut writer: impl Write,
) -> io::Result<()> {
    for a in assignments {
        let runner_up = a
            .runner_up_score
            .map(|s| format!("{s:.6}"))
            .unwrap_or_default();
        let flags = if a.degenerate { "degenerate" } else { "" };
        writeln!(
            writer,
            "{}\t{}\t{:08}\t{}\t{:.6}\t{}\t{}",
            a.en_title, a.lemma, a.synset_offset, a.method, a.score, runner_up, flags
        )?;
    }
    Ok(())
}

pub fn read_assignments(reader: impl BufRead) -> Result<Vec<SenseAssignment>, ArtifactError> {
    let mut assignments = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let cols = columns(&line, 7, DUMP_FILE, line_no)?;
        let bad = |msg: String| ArtifactError::malformed(DUMP_FILE, line_no, msg);
        let synset_offset: u64 = cols[2]
            .parse()
            .map_err(|_| bad(format!("bad synset offset {:?}", cols[2])))?;
        let method: Method = cols[3].parse().map_err(bad)?;
        let score: f64 = cols[4]
            .parse()
            .map_err(|_| bad(format!("bad score {:?}", cols[4])))?;
        let runner_up_score = if cols[5].is_empty() {
            None
        } else {
            Some(
                cols[5]
                    .parse()
                    .map_err(|_| bad(format!("bad runner-up score {:?}", cols[5])))?,
            )
        };
        assignments.push(SenseAssignment {
            en_title: cols[0].to_string(),
            lemma: cols[1].to_string(),
            synset_offset,
            method,
            score,
            runner_up_score,
            degenerate: cols[6] == "degenerate",
        });
    }
    Ok(assignments)
}
