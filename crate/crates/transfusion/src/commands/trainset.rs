//! `build-trainset` — construct the fused training set by translating
//! marked source sentences and projecting their labels.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;
use transfusion_core::marker::{MarkerStyle, ParseMode};

use crate::backend::{make_translator, HttpOptions};
use crate::config::PipelineConfig;
use crate::conll::{parse_conll, ConllColumns};
use crate::jsonl::{write_jsonl, FusionRecord};
use crate::pipeline::{build_mixed_trainset, LangCounts, TrainsetOptions};

use super::{read_file, sibling_path, write_file, CmdError};

pub struct TrainsetParams {
    pub input: PathBuf,
    pub tgt_lang: String,
    pub output: PathBuf,
    pub stats: Option<PathBuf>,
    pub rejects: Option<PathBuf>,
    pub include_source_copies: bool,
    pub config: PipelineConfig,
    pub style: MarkerStyle,
    pub mode: ParseMode,
    pub seed: u64,
}

#[derive(Serialize)]
struct StatsDto {
    accepted: usize,
    rejected: usize,
    per_language: BTreeMap<String, LangCounts>,
}

pub async fn run(params: TrainsetParams) -> Result<(), CmdError> {
    let input_text = read_file(&params.input)?;
    let doc = parse_conll(&input_text, &ConllColumns::default(), &params.input.to_string_lossy())
        .map_err(CmdError::input)?
        .with_language(params.config.primary_src_language());

    let translator = make_translator(
        &params.config.mt_endpoint,
        params.seed,
        &HttpOptions { bearer_token: params.config.bearer_token.clone() },
    )?;
    let opts = TrainsetOptions {
        style: params.style,
        mode: params.mode,
        batch: params.config.batch_options(),
        include_source_copies: params.include_source_copies,
    };
    let dataset =
        build_mixed_trainset(&doc, translator.as_ref(), &params.tgt_lang, &opts).await?;

    let records: Vec<FusionRecord> =
        dataset.examples.iter().map(FusionRecord::from).collect();
    let mut buffer = Vec::new();
    write_jsonl(&mut buffer, &records).map_err(CmdError::input)?;
    write_file(&params.output, &buffer)?;

    let accepted: usize = dataset.stats.per_language.values().map(|c| c.accepted).sum();
    let rejected: usize = dataset.stats.per_language.values().map(|c| c.rejected).sum();
    let stats = StatsDto { accepted, rejected, per_language: dataset.stats.per_language.clone() };
    let stats_path =
        params.stats.clone().unwrap_or_else(|| sibling_path(&params.output, ".stats.json"));
    let stats_json = serde_json::to_string_pretty(&stats).map_err(CmdError::input)?;
    write_file(&stats_path, stats_json.as_bytes())?;

    let rejects_path =
        params.rejects.clone().unwrap_or_else(|| sibling_path(&params.output, ".rejects.jsonl"));
    let mut buffer = Vec::new();
    write_jsonl(&mut buffer, &dataset.stats.rejections).map_err(CmdError::input)?;
    write_file(&rejects_path, &buffer)?;

    println!(
        "built {} examples ({} accepted, {} rejected) -> {}",
        dataset.examples.len(),
        accepted,
        rejected,
        params.output.display()
    );
    Ok(())
}
