//! End-to-end pipeline orchestration.
//!
//! Five stages run in dependency order, each reading its inputs from plain
//! artifact files and writing its own artifacts plus a JSON stats report,
//! so any stage can be inspected or replaced. A manifest keyed by content
//! fingerprints lets repeated runs skip stages whose inputs are unchanged;
//! cached and cold runs produce byte-identical output trees.

use crate::artifact::ArtifactError;
use crate::assign::{self, Method, SenseAssignment};
use crate::corpus::{self, CoverageReport};
use crate::lang::Lang;
use crate::mcat;
use crate::text::Stoplist;
use crate::thesaurus::{self, LangStores, ThesaurusEntry};
use crate::tuples::{self, TranslationTuple};
use crate::vsm::{ArticleScope, VsmConfig, VsmDisambiguator, VsmError};
use crate::wiki::{self, ArticleStore, ParseStats, WikiError};
use crate::wordnet::{WordNetError, WordNetStore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TUPLES_FILE: &str = "tuples.tsv";
pub const PARTIAL_PAIRS_FILE: &str = "partial_pairs.tsv";
pub const VSM_ASSIGNMENTS_FILE: &str = "vsm_assignments.tsv";
pub const MCAT_ASSIGNMENTS_FILE: &str = "mcat_assignments.tsv";
pub const CORPUS_FILE: &str = "corpus.tsv";
pub const COVERAGE_TEXT_FILE: &str = "coverage.txt";
pub const COVERAGE_JSON_FILE: &str = "coverage.json";

pub fn store_file(lang: Lang) -> String {
    format!("store.{lang}.jsonl")
}

pub fn thesaurus_file(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Tsv => "thesaurus.tsv",
        OutputFormat::Jsonl => "thesaurus.jsonl",
    }
}

pub fn report_file(stage: Stage) -> String {
    format!("report.{stage}.json")
}

/// Pipeline stages in dependency order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Ingest,
    Tuples,
    Wsd,
    Build,
    Eval,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Ingest, Stage::Tuples, Stage::Wsd, Stage::Build, Stage::Eval];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Tuples => "tuples",
            Stage::Wsd => "wsd",
            Stage::Build => "build",
            Stage::Eval => "eval",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ingest" => Ok(Stage::Ingest),
            "tuples" => Ok(Stage::Tuples),
            "wsd" => Ok(Stage::Wsd),
            "build" => Ok(Stage::Build),
            "eval" => Ok(Stage::Eval),
            _ => Err(format!(
                "unknown stage {s:?}, expected ingest|tuples|wsd|build|eval"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Tsv,
    Jsonl,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Tsv => "tsv",
            OutputFormat::Jsonl => "jsonl",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(OutputFormat::Tsv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            _ => Err(format!("unknown format {s:?}, expected tsv|jsonl")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub en_dump: PathBuf,
    pub es_dump: PathBuf,
    pub ja_dump: PathBuf,
    pub wordnet_index: PathBuf,
    pub wordnet_data: PathBuf,
    /// `None` uses the bundled English list.
    pub stoplist: Option<PathBuf>,
    pub vsm_mode: ArticleScope,
    pub mcat_depth: usize,
    pub gloss_examples: bool,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    /// Worker threads for the WSD stage; `None` keeps the rayon default.
    pub jobs: Option<usize>,
}

impl PipelineConfig {
    pub fn dump_path(&self, lang: Lang) -> &Path {
        match lang {
            Lang::En => &self.en_dump,
            Lang::Es => &self.es_dump,
            Lang::Ja => &self.ja_dump,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let mut paths: Vec<(&str, &Path)> = vec![
            ("--en-dump", &self.en_dump),
            ("--es-dump", &self.es_dump),
            ("--ja-dump", &self.ja_dump),
            ("--wordnet-index", &self.wordnet_index),
            ("--wordnet-data", &self.wordnet_data),
        ];
        if let Some(stoplist) = &self.stoplist {
            paths.push(("--stoplist", stoplist));
        }
        for (flag, path) in paths {
            if !path.is_file() {
                return Err(PipelineError::Config(format!(
                    "{flag} path {} does not exist",
                    path.display()
                )));
            }
        }
        if self.mcat_depth == 0 {
            return Err(PipelineError::Config("--mcat-depth must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("stage {stage} needs {missing}, which stage {run_first} produces; run it first")]
    MissingUpstream {
        stage: Stage,
        run_first: Stage,
        missing: String,
    },
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: StageError,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Error)]
pub enum StageError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Wiki(#[from] WikiError),
    #[error(transparent)]
    WordNet(#[from] WordNetError),
    #[error(transparent)]
    Vsm(#[from] VsmError),
    #[error(transparent)]
    Thesaurus(#[from] thesaurus::ThesaurusError),
    #[error(transparent)]
    Artifact(#[from] ArtifactError),
    #[error("{0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageOutcome {
    pub stage: Stage,
    /// True when unchanged inputs let the stage reuse its artifacts.
    pub cached: bool,
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub outcomes: Vec<StageOutcome>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Manifest {
    version: u32,
    stages: BTreeMap<String, ManifestEntry>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
struct ManifestEntry {
    fingerprint: String,
    outputs: Vec<String>,
}

impl Manifest {
    fn load(out_dir: &Path) -> io::Result<Manifest> {
        let path = out_dir.join(MANIFEST_FILE);
        if !path.is_file() {
            return Ok(Manifest {
                version: 1,
                ..Default::default()
            });
        }
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text).unwrap_or(Manifest {
            version: 1,
            ..Default::default()
        }))
    }

    fn save(&self, out_dir: &Path) -> io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(out_dir.join(MANIFEST_FILE), text + "\n")
    }
}

/// Runs the requested stages in dependency order. Each stage is skipped
/// when the manifest records the same input fingerprint and all its
/// artifacts are present.
pub fn run(config: &PipelineConfig, stages: &[Stage]) -> Result<RunReport, PipelineError> {
    config.validate()?;
    fs::create_dir_all(&config.out_dir)?;
    let requested: BTreeSet<Stage> = stages.iter().copied().collect();
    let mut manifest = Manifest::load(&config.out_dir)?;
    let mut context = StageContext::new(config);
    let mut report = RunReport::default();

    for stage in Stage::ALL {
        if !requested.contains(&stage) {
            continue;
        }
        check_upstream(config, stage)?;
        let fingerprint = stage_fingerprint(config, stage)?;
        let outputs = stage_outputs(config, stage);
        let cached = manifest
            .stages
            .get(stage.name())
            .is_some_and(|entry| entry.fingerprint == fingerprint)
            && outputs
                .iter()
                .all(|name| config.out_dir.join(name).is_file());
        if !cached {
            run_stage(&mut context, stage)
                .map_err(|source| PipelineError::Stage { stage, source })?;
            manifest.stages.insert(
                stage.name().to_string(),
                ManifestEntry {
                    fingerprint,
                    outputs,
                },
            );
            manifest.save(&config.out_dir)?;
        }
        report.outcomes.push(StageOutcome { stage, cached });
    }
    Ok(report)
}

/// Artifact files a stage consumes that another stage produces.
fn upstream_artifacts(config: &PipelineConfig, stage: Stage) -> Vec<(String, Stage)> {
    let stores = || {
        Lang::ALL
            .iter()
            .map(|&l| (store_file(l), Stage::Ingest))
            .collect::<Vec<_>>()
    };
    match stage {
        Stage::Ingest => Vec::new(),
        Stage::Tuples => stores(),
        Stage::Wsd => {
            let mut inputs = stores();
            inputs.push((TUPLES_FILE.to_string(), Stage::Tuples));
            inputs
        }
        Stage::Build => {
            let mut inputs = stores();
            inputs.push((TUPLES_FILE.to_string(), Stage::Tuples));
            inputs.push((VSM_ASSIGNMENTS_FILE.to_string(), Stage::Wsd));
            inputs.push((MCAT_ASSIGNMENTS_FILE.to_string(), Stage::Wsd));
            inputs
        }
        Stage::Eval => {
            let mut inputs = stores();
            inputs.push((thesaurus_file(config.format).to_string(), Stage::Build));
            inputs
        }
    }
}

fn check_upstream(config: &PipelineConfig, stage: Stage) -> Result<(), PipelineError> {
    for (name, producer) in upstream_artifacts(config, stage) {
        if !config.out_dir.join(&name).is_file() {
            return Err(PipelineError::MissingUpstream {
                stage,
                run_first: producer,
                missing: name,
            });
        }
    }
    Ok(())
}

fn stage_outputs(config: &PipelineConfig, stage: Stage) -> Vec<String> {
    let mut outputs = match stage {
        Stage::Ingest => Lang::ALL.iter().map(|&l| store_file(l)).collect(),
        Stage::Tuples => vec![TUPLES_FILE.to_string(), PARTIAL_PAIRS_FILE.to_string()],
        Stage::Wsd => vec![
            VSM_ASSIGNMENTS_FILE.to_string(),
            MCAT_ASSIGNMENTS_FILE.to_string(),
        ],
        Stage::Build => vec![thesaurus_file(config.format).to_string()],
        Stage::Eval => vec![
            CORPUS_FILE.to_string(),
            COVERAGE_TEXT_FILE.to_string(),
            COVERAGE_JSON_FILE.to_string(),
        ],
    };
    outputs.push(report_file(stage));
    outputs
}

/// Content fingerprint of everything a stage reads: raw input files,
/// upstream artifacts, and the configuration knobs that affect it.
fn stage_fingerprint(config: &PipelineConfig, stage: Stage) -> io::Result<String> {
    let mut hasher = Sha256::new();
    hasher.update(b"trithes.stage.v1\0");
    hasher.update(stage.name().as_bytes());
    hasher.update([0]);

    let salt = match stage {
        Stage::Wsd => format!(
            "mode={};depth={};gloss_examples={}",
            config.vsm_mode.as_str(),
            config.mcat_depth,
            config.gloss_examples
        ),
        Stage::Build | Stage::Eval => format!("format={}", config.format.as_str()),
        _ => String::new(),
    };
    hasher.update(salt.as_bytes());
    hasher.update([0]);

    let mut files: Vec<PathBuf> = Vec::new();
    match stage {
        Stage::Ingest => {
            files.extend(Lang::ALL.iter().map(|&l| config.dump_path(l).to_path_buf()));
        }
        Stage::Wsd => {
            files.push(config.wordnet_index.clone());
            files.push(config.wordnet_data.clone());
        }
        Stage::Build => {
            files.push(config.wordnet_index.clone());
            files.push(config.wordnet_data.clone());
        }
        _ => {}
    }
    for (name, _) in upstream_artifacts(config, stage) {
        files.push(config.out_dir.join(name));
    }
    for path in files {
        hasher.update(file_sha256(&path)?.as_bytes());
        hasher.update([0]);
    }
    if matches!(stage, Stage::Wsd | Stage::Eval) {
        match &config.stoplist {
            Some(path) => hasher.update(file_sha256(path)?.as_bytes()),
            None => hasher.update(Sha256::digest(
                include_str!("../data/stopwords-en.txt").as_bytes(),
            )),
        }
        hasher.update([0]);
    }
    Ok(hex(&hasher.finalize()))
}

fn file_sha256(path: &Path) -> io::Result<String> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 65536];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex(&hasher.finalize()))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Per-run cache of loaded inputs so consecutive stages share them.
struct StageContext<'a> {
    config: &'a PipelineConfig,
    stores: Option<StoreSet>,
    wordnet: Option<WordNetStore>,
    stoplist: Option<Stoplist>,
}

struct StoreSet {
    en: ArticleStore,
    es: ArticleStore,
    ja: ArticleStore,
}

impl StoreSet {
    fn lang_stores(&self) -> LangStores<'_> {
        LangStores {
            en: &self.en,
            es: &self.es,
            ja: &self.ja,
        }
    }
}

impl<'a> StageContext<'a> {
    fn new(config: &'a PipelineConfig) -> Self {
        StageContext {
            config,
            stores: None,
            wordnet: None,
            stoplist: None,
        }
    }

    fn out_path(&self, name: &str) -> PathBuf {
        self.config.out_dir.join(name)
    }

    fn stores(&mut self) -> Result<&StoreSet, StageError> {
        if self.stores.is_none() {
            let load = |lang: Lang| -> Result<ArticleStore, StageError> {
                let path = self.config.out_dir.join(store_file(lang));
                let reader = BufReader::new(File::open(path)?);
                Ok(ArticleStore::read_jsonl(reader, lang)?)
            };
            self.stores = Some(StoreSet {
                en: load(Lang::En)?,
                es: load(Lang::Es)?,
                ja: load(Lang::Ja)?,
            });
        }
        Ok(self.stores.as_ref().expect("just loaded"))
    }

    fn wordnet(&mut self) -> Result<&WordNetStore, StageError> {
        if self.wordnet.is_none() {
            let index = BufReader::new(File::open(&self.config.wordnet_index)?);
            let data = BufReader::new(File::open(&self.config.wordnet_data)?);
            let (store, _) = WordNetStore::load(index, data)?;
            self.wordnet = Some(store);
        }
        Ok(self.wordnet.as_ref().expect("just loaded"))
    }

    fn stoplist(&mut self) -> Result<&Stoplist, StageError> {
        if self.stoplist.is_none() {
            self.stoplist = Some(match &self.config.stoplist {
                Some(path) => Stoplist::from_reader(BufReader::new(File::open(path)?))?,
                None => Stoplist::builtin_english(),
            });
        }
        Ok(self.stoplist.as_ref().expect("just loaded"))
    }

    fn read_tuples(&self) -> Result<Vec<TranslationTuple>, StageError> {
        let reader = BufReader::new(File::open(self.out_path(TUPLES_FILE))?);
        Ok(tuples::read_tuples(reader)?)
    }

    fn write_artifact(
        &self,
        name: &str,
        write: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
    ) -> Result<(), StageError> {
        let mut writer = BufWriter::new(File::create(self.out_path(name))?);
        write(&mut writer)?;
        writer.flush()?;
        Ok(())
    }

    fn write_report<T: Serialize>(&self, stage: Stage, stats: &T) -> Result<(), StageError> {
        let text = serde_json::to_string_pretty(stats).expect("stats serialize");
        fs::write(self.out_path(&report_file(stage)), text + "\n")?;
        Ok(())
    }
}

fn run_stage(context: &mut StageContext<'_>, stage: Stage) -> Result<(), StageError> {
    match stage {
        Stage::Ingest => stage_ingest(context),
        Stage::Tuples => stage_tuples(context),
        Stage::Wsd => stage_wsd(context),
        Stage::Build => stage_build(context),
        Stage::Eval => stage_eval(context),
    }
}

fn stage_ingest(context: &mut StageContext<'_>) -> Result<(), StageError> {
    let mut reports: BTreeMap<Lang, ParseStats> = BTreeMap::new();
    let mut parsed: BTreeMap<Lang, ArticleStore> = BTreeMap::new();
    for lang in Lang::ALL {
        let reader = BufReader::new(File::open(context.config.dump_path(lang))?);
        let (store, stats) = wiki::parse_dump(reader, lang)?;
        context.write_artifact(&store_file(lang), |w| store.write_jsonl(w))?;
        reports.insert(lang, stats);
        parsed.insert(lang, store);
    }
    context.stores = Some(StoreSet {
        en: parsed.remove(&Lang::En).expect("parsed"),
        es: parsed.remove(&Lang::Es).expect("parsed"),
        ja: parsed.remove(&Lang::Ja).expect("parsed"),
    });
    context.write_report(Stage::Ingest, &reports)
}

fn stage_tuples(context: &mut StageContext<'_>) -> Result<(), StageError> {
    let stores = context.stores()?;
    let extraction = tuples::build_tuples(&stores.en, &stores.es, &stores.ja);
    context.write_artifact(TUPLES_FILE, |w| tuples::write_tuples(&extraction.tuples, w))?;
    context.write_artifact(PARTIAL_PAIRS_FILE, |w| {
        tuples::write_partial_pairs(&extraction.partial, w)
    })?;
    context.write_report(Stage::Tuples, &extraction.stats)
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct WsdStats {
    tuples: usize,
    polysemous: usize,
    vsm_assigned: usize,
    vsm_degenerate: usize,
    mcat_assigned: usize,
    mcat_unassigned: usize,
}

fn stage_wsd(context: &mut StageContext<'_>) -> Result<(), StageError> {
    let tuples = context.read_tuples()?;
    let config = context.config;
    context.stores()?;
    context.wordnet()?;
    context.stoplist()?;
    let stores = context.stores.as_ref().expect("loaded above");
    let wn = context.wordnet.as_ref().expect("loaded above");
    let stoplist = context.stoplist.as_ref().expect("loaded above");

    let vsm_config = VsmConfig::new(config.vsm_mode, config.gloss_examples);
    let disambiguator = VsmDisambiguator::new(wn, stoplist, vsm_config);

    let polysemous: Vec<&TranslationTuple> = tuples
        .iter()
        .filter(|t| wn.is_polysemous(&t.en_title))
        .collect();

    let assign_one = |tuple: &&TranslationTuple| -> Result<
        (SenseAssignment, Option<SenseAssignment>),
        StageError,
    > {
        let article = stores.en.get(&tuple.en_title).ok_or_else(|| {
            StageError::Inconsistent(format!(
                "tuples file names {:?}, which is not in the English store",
                tuple.en_title
            ))
        })?;
        let vsm = disambiguator.assign(article, &tuple.en_title)?;
        let neighborhood = mcat::build_neighborhood(article, &stores.en);
        let mcat_result =
            mcat::mcat_assign(article, &tuple.en_title, &neighborhood, wn, config.mcat_depth);
        Ok((vsm, mcat_result))
    };

    type AssignResults = Result<Vec<(SenseAssignment, Option<SenseAssignment>)>, StageError>;
    let results = match config.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| StageError::Inconsistent(e.to_string()))?;
            pool.install(|| -> AssignResults {
                polysemous.par_iter().map(assign_one).collect()
            })
        }
        None => polysemous.par_iter().map(assign_one).collect::<AssignResults>(),
    }?;

    let vsm_assignments: Vec<SenseAssignment> = results.iter().map(|(v, _)| v.clone()).collect();
    let mcat_assignments: Vec<SenseAssignment> =
        results.iter().filter_map(|(_, m)| m.clone()).collect();

    let stats = WsdStats {
        tuples: tuples.len(),
        polysemous: polysemous.len(),
        vsm_assigned: vsm_assignments.len(),
        vsm_degenerate: vsm_assignments.iter().filter(|a| a.degenerate).count(),
        mcat_assigned: mcat_assignments.len(),
        mcat_unassigned: polysemous.len() - mcat_assignments.len(),
    };
    context.write_artifact(VSM_ASSIGNMENTS_FILE, |w| {
        assign::write_assignments(&vsm_assignments, w)
    })?;
    context.write_artifact(MCAT_ASSIGNMENTS_FILE, |w| {
        assign::write_assignments(&mcat_assignments, w)
    })?;
    context.write_report(Stage::Wsd, &stats)
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct BuildStats {
    entries: usize,
    monosemous: usize,
    vsm: usize,
    mcat: usize,
    unmatched: usize,
}

fn stage_build(context: &mut StageContext<'_>) -> Result<(), StageError> {
    let tuples = context.read_tuples()?;
    let read_assignments = |name: &str| -> Result<BTreeMap<String, SenseAssignment>, StageError> {
        let reader = BufReader::new(File::open(context.out_path(name))?);
        Ok(assign::read_assignments(reader)?
            .into_iter()
            .map(|a| (a.en_title.clone(), a))
            .collect())
    };
    let vsm_map = read_assignments(VSM_ASSIGNMENTS_FILE)?;
    let mcat_map = read_assignments(MCAT_ASSIGNMENTS_FILE)?;
    context.stores()?;
    context.wordnet()?;
    let stores = context.stores.as_ref().expect("loaded above");
    let wn = context.wordnet.as_ref().expect("loaded above");

    let entries =
        thesaurus::build_thesaurus(&tuples, wn, &vsm_map, &mcat_map, &stores.lang_stores())?;

    let stats = BuildStats {
        entries: entries.len(),
        monosemous: entries.iter().filter(|e| e.method == Method::Monosemous).count(),
        vsm: entries.iter().filter(|e| e.method == Method::Vsm).count(),
        mcat: entries.iter().filter(|e| e.method == Method::Mcat).count(),
        unmatched: entries.iter().filter(|e| e.method == Method::Unmatched).count(),
    };
    let format = context.config.format;
    context.write_artifact(thesaurus_file(format), |w| match format {
        OutputFormat::Tsv => thesaurus::write_thesaurus_tsv(&entries, w),
        OutputFormat::Jsonl => thesaurus::write_thesaurus_jsonl(&entries, w),
    })?;
    context.write_report(Stage::Build, &stats)
}

#[derive(Debug, Serialize, Deserialize)]
struct EvalStats {
    sentences: usize,
    coverage: CoverageReport,
}

/// Reads back the thesaurus artifact in whichever format the build emitted.
pub fn read_thesaurus_artifact(
    path: &Path,
    format: OutputFormat,
) -> Result<Vec<ThesaurusEntry>, ArtifactError> {
    let reader = BufReader::new(File::open(path)?);
    match format {
        OutputFormat::Tsv => thesaurus::read_thesaurus_tsv(reader),
        OutputFormat::Jsonl => thesaurus::read_thesaurus_jsonl(reader),
    }
}

fn stage_eval(context: &mut StageContext<'_>) -> Result<(), StageError> {
    let entries = read_thesaurus_artifact(
        &context.out_path(thesaurus_file(context.config.format)),
        context.config.format,
    )?;
    context.stores()?;
    context.stoplist()?;
    let stores = context.stores.as_ref().expect("loaded above");
    let stoplist = context.stoplist.as_ref().expect("loaded above");

    let corpus = corpus::build_corpus(&entries, &stores.lang_stores(), stoplist);
    let report = corpus::coverage(&corpus, &entries);

    context.write_artifact(CORPUS_FILE, |w| corpus::write_corpus_tsv(&corpus, w))?;
    context.write_artifact(COVERAGE_TEXT_FILE, |w| {
        corpus::write_coverage_text(&report, w)
    })?;
    context.write_artifact(COVERAGE_JSON_FILE, |w| {
        corpus::write_coverage_json(&report, w)
    })?;
    context.write_report(
        Stage::Eval,
        &EvalStats {
            sentences: corpus.sentences.len(),
            coverage: report,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_parsing_and_order() {
        assert_eq!("wsd".parse::<Stage>().unwrap(), Stage::Wsd);
        assert!("bogus".parse::<Stage>().is_err());
        let mut stages = vec![Stage::Eval, Stage::Ingest, Stage::Build];
        stages.sort();
        assert_eq!(stages, vec![Stage::Ingest, Stage::Build, Stage::Eval]);
    }

    #[test]
    fn missing_config_path_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let config = PipelineConfig {
            en_dump: dir.path().join("missing.jsonl"),
            es_dump: dir.path().join("missing.jsonl"),
            ja_dump: dir.path().join("missing.jsonl"),
            wordnet_index: dir.path().join("index.noun"),
            wordnet_data: dir.path().join("data.noun"),
            stoplist: None,
            vsm_mode: ArticleScope::Whole,
            mcat_depth: 3,
            gloss_examples: true,
            out_dir: dir.path().join("out"),
            format: OutputFormat::Tsv,
            jobs: None,
        };
        assert!(matches!(
            run(&config, &[Stage::Ingest]),
            Err(PipelineError::Config(_))
        ));
    }

    #[test]
    fn eval_without_thesaurus_names_build() {
        let dir = tempfile::tempdir().unwrap();
        let touch = |name: &str| {
            let path = dir.path().join(name);
            fs::write(&path, "").unwrap();
            path
        };
        let config = PipelineConfig {
            en_dump: touch("en.jsonl"),
            es_dump: touch("es.jsonl"),
            ja_dump: touch("ja.jsonl"),
            wordnet_index: touch("index.noun"),
            wordnet_data: touch("data.noun"),
            stoplist: None,
            vsm_mode: ArticleScope::Whole,
            mcat_depth: 3,
            gloss_examples: true,
            out_dir: dir.path().join("out"),
            format: OutputFormat::Tsv,
            jobs: None,
        };
        match run(&config, &[Stage::Eval]) {
            Err(PipelineError::MissingUpstream { stage, run_first, .. }) => {
                assert_eq!(stage, Stage::Eval);
                assert_eq!(run_first, Stage::Ingest);
            }
            other => panic!("expected missing-upstream error, got {other:?}"),
        }
    }

    #[test]
    fn depth_zero_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let touch = |name: &str| {
            let path = dir.path().join(name);
            fs::write(&path, "").unwrap();
            path
        };
        let config = PipelineConfig {
            en_dump: touch("en.jsonl"),
            es_dump: touch("es.jsonl"),
            ja_dump: touch("ja.jsonl"),
            wordnet_index: touch("index.noun"),
            wordnet_data: touch("data.noun"),
            stoplist: None,
            vsm_mode: ArticleScope::Whole,
            mcat_depth: 0,
            gloss_examples: true,
            out_dir: dir.path().join("out"),
            format: OutputFormat::Tsv,
            jobs: None,
        };
        assert!(matches!(
            run(&config, &[Stage::Ingest]),
            Err(PipelineError::Config(_))
        ));
    }
}
