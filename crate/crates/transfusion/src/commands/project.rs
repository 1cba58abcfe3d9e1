//! `project` — transfer entity labels from an annotated file onto
//! target-language text, by marker survival through MT or by word
//! alignments.

use std::path::PathBuf;

use transfusion_core::marker::{insert_markers, MarkerStyle, ParseMode};
use transfusion_core::projection::{project_by_alignment, project_by_markers, ProjectionOutcome};
use transfusion_core::sentence::Document;

use crate::alignment::parse_pharaoh;
use crate::backend::{make_translator, HttpOptions};
use crate::config::PipelineConfig;
use crate::conll::{parse_conll, serialize_conll, ConllColumns};
use crate::jsonl::{write_jsonl, RejectionRecord};
use crate::pipeline::translate_batched;

use super::{read_file, sibling_path, write_file, CmdError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProjectMethod {
    /// Translate the marker-annotated text and read the markers back.
    Markers,
    /// Map spans through word-alignment links from an external aligner.
    Alignment,
}

pub struct ProjectParams {
    pub method: ProjectMethod,
    pub input: PathBuf,
    pub output: PathBuf,
    pub rejects: Option<PathBuf>,
    pub tgt_lang: String,
    pub alignments: Option<PathBuf>,
    pub target: Option<PathBuf>,
    pub config: Option<PipelineConfig>,
    pub style: MarkerStyle,
    pub mode: ParseMode,
    pub seed: u64,
}

pub async fn run(params: ProjectParams) -> Result<(), CmdError> {
    let input_text = read_file(&params.input)?;
    let doc = parse_conll(&input_text, &ConllColumns::default(), &params.input.to_string_lossy())
        .map_err(CmdError::input)?;

    let (projected, rejections) = match params.method {
        ProjectMethod::Markers => project_markers(&doc, &params).await?,
        ProjectMethod::Alignment => project_alignment(&doc, &params)?,
    };

    write_file(&params.output, serialize_conll(&projected).as_bytes())?;
    let rejects_path = params
        .rejects
        .clone()
        .unwrap_or_else(|| sibling_path(&params.output, ".rejects.jsonl"));
    let mut buffer = Vec::new();
    write_jsonl(&mut buffer, &rejections).map_err(CmdError::input)?;
    write_file(&rejects_path, &buffer)?;

    println!(
        "projected {} sentences, rejected {} -> {}",
        projected.len(),
        rejections.len(),
        params.output.display()
    );
    if projected.is_empty() {
        return Err(CmdError::ZeroYield("no sentences were projected".into()));
    }
    Ok(())
}

async fn project_markers(
    doc: &Document,
    params: &ProjectParams,
) -> Result<(Document, Vec<RejectionRecord>), CmdError> {
    let config = params
        .config
        .as_ref()
        .ok_or_else(|| CmdError::Input("the markers method needs a config (--config)".into()))?;
    let translator = make_translator(
        &config.mt_endpoint,
        params.seed,
        &HttpOptions { bearer_token: config.bearer_token.clone() },
    )?;
    let src_lang = config.primary_src_language().to_string();
    let doc = doc.clone().with_language(&src_lang);

    let marked: Vec<String> = doc
        .sentences()
        .iter()
        .map(|sentence| insert_markers(sentence, doc.labels(), params.style).text().to_string())
        .collect();
    let translations = translate_batched(
        translator.as_ref(),
        &marked,
        &src_lang,
        &params.tgt_lang,
        true,
        config.batch_options(),
    )
    .await?;

    let mut accepted = Vec::new();
    let mut rejections = Vec::new();
    for (index, (sentence, translation)) in doc.sentences().iter().zip(&translations).enumerate() {
        match project_by_markers(
            sentence,
            translation,
            doc.labels(),
            params.style,
            params.mode,
            &params.tgt_lang,
        ) {
            ProjectionOutcome::Projected(projected) => accepted.push(projected),
            ProjectionOutcome::Rejected { reason } => {
                rejections.push(RejectionRecord { index, reason })
            }
        }
    }
    let projected = Document::new(doc.source_name(), doc.labels().clone(), accepted)
        .map_err(CmdError::input)?;
    Ok((projected, rejections))
}

fn project_alignment(
    doc: &Document,
    params: &ProjectParams,
) -> Result<(Document, Vec<RejectionRecord>), CmdError> {
    let alignments_path = params
        .alignments
        .as_ref()
        .ok_or_else(|| CmdError::Input("the alignment method needs --alignments".into()))?;
    let target_path = params
        .target
        .as_ref()
        .ok_or_else(|| CmdError::Input("the alignment method needs --target".into()))?;

    let alignments = parse_pharaoh(&read_file(alignments_path)?).map_err(CmdError::input)?;
    let target_text = read_file(target_path)?;
    let target_sentences: Vec<Vec<String>> = target_text
        .lines()
        .map(|line| line.split_whitespace().map(str::to_string).collect())
        .collect();

    if alignments.len() != doc.len() || target_sentences.len() != doc.len() {
        return Err(CmdError::Input(format!(
            "count mismatch: {} source sentences, {} alignment lines, {} target lines",
            doc.len(),
            alignments.len(),
            target_sentences.len()
        )));
    }

    let mut projected = Vec::with_capacity(doc.len());
    for (index, ((sentence, links), tgt_tokens)) in
        doc.sentences().iter().zip(&alignments).zip(&target_sentences).enumerate()
    {
        let out = project_by_alignment(sentence, links, tgt_tokens, &params.tgt_lang)
            .map_err(|err| CmdError::Input(format!("sentence {index}: {err}")))?;
        projected.push(out);
    }
    let projected = Document::new(doc.source_name(), doc.labels().clone(), projected)
        .map_err(CmdError::input)?;
    Ok((projected, Vec::new()))
}
