//! Batched pipeline stages over the service clients: fused trainset
//! construction, inference-input assembly and translate-correct.
//!
//! Work is split into `batch_size` requests with at most `max_in_flight`
//! outstanding at a time; results are reassembled in input order
//! regardless of completion order, so outputs are deterministic for
//! deterministic backends.

use std::collections::BTreeMap;

use futures::stream::{self, StreamExt, TryStreamExt};
use serde::Serialize;
use thiserror::Error;
use transfusion_core::fusion::{build_fusion_input, correct_labels, FusionError, FusionExample};
use transfusion_core::label::LabelSet;
use transfusion_core::marker::{insert_markers, parse_markers, MarkerStyle, ParseMode};
use transfusion_core::projection::{project_by_markers, ProjectionOutcome};
use transfusion_core::sentence::{Document, Sentence, SentenceError};
use transfusion_core::tags::{tags_to_spans, DecodeMode, TagError, TagSequence};

use crate::jsonl::RejectionRecord;
use crate::services::{ServiceError, TagRequest, Tagger, TranslateRequest, Translator};

/// Request chunking and concurrency bounds.
#[derive(Debug, Clone, Copy)]
pub struct BatchOptions {
    pub batch_size: usize,
    pub max_in_flight: usize,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions { batch_size: 32, max_in_flight: 4 }
    }
}

impl BatchOptions {
    fn checked(self) -> Self {
        BatchOptions {
            batch_size: self.batch_size.max(1),
            max_in_flight: self.max_in_flight.max(1),
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("translation failed for sentences {first}..={last}: {source}")]
    Translate { first: usize, last: usize, source: ServiceError },
    #[error("tagging failed for sentences {first}..={last}: {source}")]
    Tag { first: usize, last: usize, source: ServiceError },
    #[error("sentence {sentence}: tagger returned {got} tags for {expected} tokens")]
    TagLength { sentence: usize, expected: usize, got: usize },
    #[error("sentence {sentence}: tagger output: {source}")]
    TagDecode { sentence: usize, source: TagError },
    #[error("sentence {sentence}: {source}")]
    Fusion { sentence: usize, source: FusionError },
    #[error("sentence {sentence}: {source}")]
    Sentence { sentence: usize, source: SentenceError },
}

impl PipelineError {
    /// True when the failure came from a backend service rather than
    /// from the input data.
    pub fn is_backend(&self) -> bool {
        matches!(self, PipelineError::Translate { .. } | PipelineError::Tag { .. })
    }
}

/// Translates `texts` in order-preserving bounded-concurrency batches.
pub async fn translate_batched(
    translator: &dyn Translator,
    texts: &[String],
    src_lang: &str,
    tgt_lang: &str,
    preserve_markers: bool,
    batch: BatchOptions,
) -> Result<Vec<String>, PipelineError> {
    let batch = batch.checked();
    if texts.is_empty() {
        return Ok(Vec::new());
    }
    let chunks: Vec<(usize, Vec<String>)> = texts
        .chunks(batch.batch_size)
        .enumerate()
        .map(|(index, chunk)| (index * batch.batch_size, chunk.to_vec()))
        .collect();
    let results: Vec<Vec<String>> = stream::iter(chunks)
        .map(|(first, chunk)| async move {
            let last = first + chunk.len() - 1;
            let req = TranslateRequest {
                texts: chunk,
                src_lang: src_lang.to_string(),
                tgt_lang: tgt_lang.to_string(),
                preserve_markers,
            };
            translator
                .translate(&req)
                .await
                .and_then(|out| {
                    if out.len() == req.texts.len() {
                        Ok(out)
                    } else {
                        Err(ServiceError::Protocol(format!(
                            "sent {} texts, received {}",
                            req.texts.len(),
                            out.len()
                        )))
                    }
                })
                .map_err(|source| PipelineError::Translate { first, last, source })
        })
        .buffered(batch.max_in_flight)
        .try_collect()
        .await?;
    Ok(results.into_iter().flatten().collect())
}

/// Tags token sequences in order-preserving bounded-concurrency batches,
/// checking that every response is length-matched to its sentence.
pub async fn tag_batched(
    tagger: &dyn Tagger,
    sentences: &[Vec<String>],
    language: &str,
    labels: &LabelSet,
    batch: BatchOptions,
) -> Result<Vec<TagSequence>, PipelineError> {
    let batch = batch.checked();
    if sentences.is_empty() {
        return Ok(Vec::new());
    }
    let label_names: Vec<String> = labels.names().to_vec();
    let chunks: Vec<(usize, Vec<Vec<String>>)> = sentences
        .chunks(batch.batch_size)
        .enumerate()
        .map(|(index, chunk)| (index * batch.batch_size, chunk.to_vec()))
        .collect();
    let results: Vec<Vec<TagSequence>> = stream::iter(chunks)
        .map(|(first, chunk)| {
            let label_names = label_names.clone();
            async move {
                let last = first + chunk.len() - 1;
                let req = TagRequest {
                    sentences: chunk,
                    language: language.to_string(),
                    label_set: label_names,
                };
                let out = tagger
                    .tag(&req)
                    .await
                    .map_err(|source| PipelineError::Tag { first, last, source })?;
                if out.len() != req.sentences.len() {
                    return Err(PipelineError::Tag {
                        first,
                        last,
                        source: ServiceError::Protocol(format!(
                            "sent {} sentences, received {} tag sequences",
                            req.sentences.len(),
                            out.len()
                        )),
                    });
                }
                for (offset, (tags, tokens)) in out.iter().zip(&req.sentences).enumerate() {
                    if tags.len() != tokens.len() {
                        return Err(PipelineError::TagLength {
                            sentence: first + offset,
                            expected: tokens.len(),
                            got: tags.len(),
                        });
                    }
                }
                Ok(out)
            }
        })
        .buffered(batch.max_in_flight)
        .try_collect()
        .await?;
    Ok(results.into_iter().flatten().collect())
}

/// Accepted/rejected projection counts for one target language.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LangCounts {
    pub accepted: usize,
    pub rejected: usize,
}

/// Projection accounting across a build: per-language counts plus the
/// per-sentence rejection audit trail.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ProjectionStats {
    pub per_language: BTreeMap<String, LangCounts>,
    pub rejections: Vec<RejectionRecord>,
}

/// A fused training set plus its projection accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedDataset {
    pub examples: Vec<FusionExample>,
    pub stats: ProjectionStats,
}

#[derive(Debug, Clone, Copy)]
pub struct TrainsetOptions {
    pub style: MarkerStyle,
    pub mode: ParseMode,
    pub batch: BatchOptions,
    /// Also emit, for every source sentence, an example whose target
    /// segment is the source sentence itself.
    pub include_source_copies: bool,
}

impl Default for TrainsetOptions {
    fn default() -> Self {
        TrainsetOptions {
            style: MarkerStyle::Xml,
            mode: ParseMode::Strict,
            batch: BatchOptions::default(),
            include_source_copies: false,
        }
    }
}

/// Builds a mixed training set: every source sentence is marked,
/// machine-translated and label-projected; surviving pairs become fused
/// examples, rejected ones are recorded and skipped. Output order
/// follows input order.
pub async fn build_mixed_trainset(
    src: &Document,
    translator: &dyn Translator,
    tgt_lang: &str,
    opts: &TrainsetOptions,
) -> Result<MixedDataset, PipelineError> {
    let mut stats = ProjectionStats::default();
    let mut counts = LangCounts::default();
    if src.is_empty() {
        stats.per_language.insert(tgt_lang.to_string(), counts);
        return Ok(MixedDataset { examples: Vec::new(), stats });
    }

    let src_lang = src.language().unwrap_or("und").to_string();
    let marked: Vec<String> = src
        .sentences()
        .iter()
        .map(|sentence| insert_markers(sentence, src.labels(), opts.style).text().to_string())
        .collect();
    let translations =
        translate_batched(translator, &marked, &src_lang, tgt_lang, true, opts.batch).await?;

    let mut examples = Vec::new();
    for (index, (sentence, translation)) in
        src.sentences().iter().zip(&translations).enumerate()
    {
        match project_by_markers(sentence, translation, src.labels(), opts.style, opts.mode, tgt_lang)
        {
            ProjectionOutcome::Projected(projected) => {
                let example = build_fusion_input(
                    sentence,
                    projected.tokens(),
                    Some(projected.spans()),
                    tgt_lang,
                    src.labels(),
                    opts.style,
                )
                .map_err(|source| PipelineError::Fusion { sentence: index, source })?;
                examples.push(example);
                counts.accepted += 1;
            }
            ProjectionOutcome::Rejected { reason } => {
                stats.rejections.push(RejectionRecord { index, reason });
                counts.rejected += 1;
            }
        }
        if opts.include_source_copies {
            let example = build_fusion_input(
                sentence,
                sentence.tokens(),
                Some(sentence.spans()),
                &src_lang,
                src.labels(),
                opts.style,
            )
            .map_err(|source| PipelineError::Fusion { sentence: index, source })?;
            examples.push(example);
        }
    }
    stats.per_language.insert(tgt_lang.to_string(), counts);
    Ok(MixedDataset { examples, stats })
}

/// Applies translate-correct to one predicted sentence: translate its
/// marked form to the tagger's language, re-tag the clean translation,
/// and relabel predicted spans whose surviving image the tagger labels
/// differently.
pub async fn translate_correct_sentence(
    pred: &Sentence,
    translator: &dyn Translator,
    tagger: &dyn Tagger,
    src_lang: &str,
    labels: &LabelSet,
    style: MarkerStyle,
) -> Result<Sentence, PipelineError> {
    let doc = Document::new("pred", labels.clone(), vec![pred.clone()])
        .map_err(|source| PipelineError::Sentence { sentence: 0, source })?;
    let corrected =
        translate_correct(&doc, translator, tagger, src_lang, BatchOptions::default(), style)
            .await?;
    Ok(corrected.sentences()[0].clone())
}

/// Document-level translate-correct with batched service calls.
pub async fn translate_correct(
    pred: &Document,
    translator: &dyn Translator,
    tagger: &dyn Tagger,
    src_lang: &str,
    batch: BatchOptions,
    style: MarkerStyle,
) -> Result<Document, PipelineError> {
    if pred.is_empty() {
        return Ok(pred.clone());
    }
    let tgt_lang = pred.language().unwrap_or("und").to_string();
    let marked: Vec<String> = pred
        .sentences()
        .iter()
        .map(|sentence| insert_markers(sentence, pred.labels(), style).text().to_string())
        .collect();
    let translations =
        translate_batched(translator, &marked, &tgt_lang, src_lang, true, batch).await?;

    // Markers may not survive translation; lenient parsing keeps
    // whatever did.
    let projected: Vec<Sentence> = translations
        .iter()
        .map(|translation| {
            parse_markers(translation, pred.labels(), style, ParseMode::Lenient, src_lang)
                .expect("lenient parse is total")
        })
        .collect();

    // The tagger cannot see empty token sequences; give those an empty
    // verdict directly.
    let mut non_empty: Vec<Vec<String>> = Vec::new();
    let mut slot: Vec<Option<usize>> = Vec::with_capacity(projected.len());
    for sentence in &projected {
        if sentence.is_empty() {
            slot.push(None);
        } else {
            slot.push(Some(non_empty.len()));
            non_empty.push(sentence.tokens().to_vec());
        }
    }
    let tagged = tag_batched(tagger, &non_empty, src_lang, pred.labels(), batch).await?;

    let mut corrected = Vec::with_capacity(pred.len());
    for (index, (sentence, projection)) in pred.sentences().iter().zip(&projected).enumerate() {
        let tagger_spans = match slot[index] {
            None => Vec::new(),
            Some(tag_index) => {
                tags_to_spans(&tagged[tag_index], pred.labels(), DecodeMode::Repair)
                    .map_err(|source| PipelineError::TagDecode { sentence: index, source })?
            }
        };
        corrected.push(correct_labels(sentence, projection.spans(), &tagger_spans));
    }
    let document = Document::new(pred.source_name(), pred.labels().clone(), corrected)
        .map_err(|source| PipelineError::Sentence { sentence: 0, source })?;
    Ok(document)
}

/// Per-language tagger assignment for inference-input assembly, kept in
/// fusion order.
pub struct SourceTaggers<'a> {
    pub languages: Vec<String>,
    pub taggers: Vec<&'a dyn Tagger>,
}

/// Builds inference-time fused inputs for an unlabeled target document:
/// translate every sentence into each source language, tag the
/// translations there, and concatenate the marked translations with the
/// target sentence.
pub async fn build_inference_inputs(
    tgt: &Document,
    translator: &dyn Translator,
    sources: &SourceTaggers<'_>,
    labels: &LabelSet,
    batch: BatchOptions,
    style: MarkerStyle,
) -> Result<Vec<FusionExample>, PipelineError> {
    assert_eq!(sources.languages.len(), sources.taggers.len());
    if tgt.is_empty() {
        return Ok(Vec::new());
    }
    let tgt_lang = tgt.language().unwrap_or("und").to_string();
    let texts: Vec<String> = tgt.sentences().iter().map(Sentence::text).collect();

    // source language -> one annotated translation per target sentence
    let mut per_language: Vec<Vec<Sentence>> = Vec::with_capacity(sources.languages.len());
    for (src_lang, tagger) in sources.languages.iter().zip(&sources.taggers) {
        let translations =
            translate_batched(translator, &texts, &tgt_lang, src_lang, false, batch).await?;
        let token_seqs: Vec<Vec<String>> = translations
            .iter()
            .map(|t| t.split_whitespace().map(str::to_string).collect())
            .collect();

        let mut non_empty: Vec<Vec<String>> = Vec::new();
        let mut slot: Vec<Option<usize>> = Vec::with_capacity(token_seqs.len());
        for tokens in &token_seqs {
            if tokens.is_empty() {
                slot.push(None);
            } else {
                slot.push(Some(non_empty.len()));
                non_empty.push(tokens.clone());
            }
        }
        let tagged = tag_batched(*tagger, &non_empty, src_lang, labels, batch).await?;

        let mut annotated = Vec::with_capacity(token_seqs.len());
        for (index, tokens) in token_seqs.into_iter().enumerate() {
            let spans = match slot[index] {
                None => Vec::new(),
                Some(tag_index) => {
                    tags_to_spans(&tagged[tag_index], labels, DecodeMode::Repair)
                        .map_err(|source| PipelineError::TagDecode { sentence: index, source })?
                }
            };
            let sentence = Sentence::new(tokens, spans, src_lang.clone())
                .map_err(|source| PipelineError::Sentence { sentence: index, source })?;
            annotated.push(sentence);
        }
        per_language.push(annotated);
    }

    let mut examples = Vec::with_capacity(tgt.len());
    for (index, sentence) in tgt.sentences().iter().enumerate() {
        let segment_sources: Vec<Sentence> =
            per_language.iter().map(|annotated| annotated[index].clone()).collect();
        let example = transfusion_core::fusion::build_multisource_input(
            &segment_sources,
            sentence.tokens(),
            None,
            &tgt_lang,
            labels,
            style,
        )
        .map_err(|source| PipelineError::Fusion { sentence: index, source })?;
        examples.push(example);
    }
    Ok(examples)
}
