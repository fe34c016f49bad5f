use anyhow::{bail, Result};
use clap::Parser;
use std::path::PathBuf;
use trithes::pipeline::{self, OutputFormat, PipelineConfig, Stage};
use trithes::vsm::ArticleScope;

/// Builds a trilingual English-Spanish-Japanese thesaurus from Wikipedia
/// dumps and WordNet.
///
/// The pipeline runs in five stages (ingest, tuples, wsd, build, eval),
/// each writing plain artifact files into the output directory. Unchanged
/// stages are skipped on reruns.
#[derive(Parser)]
#[command(name = "trithes", version)]
struct Cli {
    /// Directory searched for default inputs: wiki.<lang>.jsonl (or .xml),
    /// index.noun, data.noun, stopwords.txt
    #[arg(long, env = "TRITHES_DATA", value_name = "DIR")]
    data_dir: Option<PathBuf>,

    /// English dump (pages-articles XML or JSONL fixture format)
    #[arg(long, value_name = "FILE")]
    en_dump: Option<PathBuf>,

    /// Spanish dump
    #[arg(long, value_name = "FILE")]
    es_dump: Option<PathBuf>,

    /// Japanese dump
    #[arg(long, value_name = "FILE")]
    ja_dump: Option<PathBuf>,

    /// WordNet index.noun file
    #[arg(long, value_name = "FILE")]
    wordnet_index: Option<PathBuf>,

    /// WordNet data.noun file
    #[arg(long, value_name = "FILE")]
    wordnet_data: Option<PathBuf>,

    /// Stopword file, one token per line with # comments; the bundled
    /// English list is used when omitted
    #[arg(long, value_name = "FILE")]
    stoplist: Option<PathBuf>,

    /// Article text fed to the vector-space method
    #[arg(long, default_value = "whole", value_parser = parse_scope, value_name = "whole|first_section")]
    vsm_mode: ArticleScope,

    /// Hypernym/hyponym closure depth for category mapping
    #[arg(long, default_value_t = 3, value_name = "N")]
    mcat_depth: usize,

    /// Include gloss example sentences in gloss vectors
    #[arg(long, default_value = "on", value_parser = parse_on_off, value_name = "on|off")]
    gloss_examples: bool,

    /// Output directory for stage artifacts
    #[arg(long, default_value = "out", value_name = "DIR")]
    out: PathBuf,

    /// Thesaurus emission format
    #[arg(long, default_value = "tsv", value_parser = parse_format, value_name = "tsv|jsonl")]
    format: OutputFormat,

    /// Comma-separated subset of stages to run
    #[arg(long, default_value = "ingest,tuples,wsd,build,eval", value_name = "LIST")]
    stages: String,

    /// Worker threads for the disambiguation stage
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

fn parse_scope(s: &str) -> Result<ArticleScope, String> {
    s.parse()
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse()
}

fn parse_on_off(s: &str) -> Result<bool, String> {
    match s {
        "on" | "true" => Ok(true),
        "off" | "false" => Ok(false),
        _ => Err(format!("expected on|off, found {s:?}")),
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    let data_dir = cli.data_dir.clone();
    let resolve = |flag: &Option<PathBuf>, names: &[&str], option: &str| -> Result<PathBuf> {
        if let Some(path) = flag {
            return Ok(path.clone());
        }
        if let Some(dir) = &data_dir {
            for name in names {
                let candidate = dir.join(name);
                if candidate.is_file() {
                    return Ok(candidate);
                }
            }
            bail!(
                "{option} not given and none of {names:?} found in {}",
                dir.display()
            );
        }
        bail!("{option} is required (or set --data-dir / TRITHES_DATA)");
    };

    let config = PipelineConfig {
        en_dump: resolve(&cli.en_dump, &["wiki.en.jsonl", "wiki.en.xml"], "--en-dump")?,
        es_dump: resolve(&cli.es_dump, &["wiki.es.jsonl", "wiki.es.xml"], "--es-dump")?,
        ja_dump: resolve(&cli.ja_dump, &["wiki.ja.jsonl", "wiki.ja.xml"], "--ja-dump")?,
        wordnet_index: resolve(&cli.wordnet_index, &["index.noun"], "--wordnet-index")?,
        wordnet_data: resolve(&cli.wordnet_data, &["data.noun"], "--wordnet-data")?,
        stoplist: match &cli.stoplist {
            Some(path) => Some(path.clone()),
            None => data_dir
                .as_ref()
                .map(|dir| dir.join("stopwords.txt"))
                .filter(|p| p.is_file()),
        },
        vsm_mode: cli.vsm_mode,
        mcat_depth: cli.mcat_depth,
        gloss_examples: cli.gloss_examples,
        out_dir: cli.out.clone(),
        format: cli.format,
        jobs: cli.jobs,
    };

    let stages = cli
        .stages
        .split(',')
        .map(|s| s.trim().parse::<Stage>())
        .collect::<Result<Vec<Stage>, String>>()
        .map_err(anyhow::Error::msg)?;
    if stages.is_empty() {
        bail!("--stages must name at least one stage");
    }

    let report = pipeline::run(&config, &stages)?;
    for outcome in &report.outcomes {
        println!(
            "stage {:<7} {}",
            outcome.stage,
            if outcome.cached { "cached" } else { "done" }
        );
    }
    println!("artifacts written to {}", config.out_dir.display());
    Ok(())
}
