//! Deterministic in-process service backends.
//!
//! These exist so that pipelines can run end-to-end with known ground
//! truth: the dictionary translator is bijective (its inverse recovers
//! source tokens exactly), the oracle tagger replays gold annotations,
//! and every mock is a pure function of its construction-time seed and
//! its input. Two runs produce byte-identical outputs.

use std::collections::BTreeMap;

use async_trait::async_trait;
use transfusion_core::sentence::Document;
use transfusion_core::tags::{spans_to_tags, BioTag, TagSequence};

use crate::det::{fnv1a, SplitMix64};

use super::{
    GenerateRequest, Generator, ServiceError, TagRequest, Tagger, TranslateRequest, Translator,
};

/// True for `<...>`-shaped units, which every mock translator passes
/// through unmodified (entity markers and the `<X>` separator).
fn is_marker_unit(unit: &str) -> bool {
    unit.len() > 2 && unit.starts_with('<') && unit.ends_with('>') && {
        let inner = &unit[1..unit.len() - 1];
        !inner.is_empty() && !inner.contains('<') && !inner.contains('>')
    }
}

/// Swaps an opening marker for a closing one and vice versa, so that a
/// reversed token sequence keeps open-before-close marker structure.
fn swap_marker_role(unit: &str) -> String {
    let inner = &unit[1..unit.len() - 1];
    match inner.strip_prefix('/') {
        Some(label) => format!("<{label}>"),
        None => format!("</{inner}>"),
    }
}

/// Echoes every input text.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityTranslator;

#[async_trait]
impl Translator for IdentityTranslator {
    async fn translate(&self, req: &TranslateRequest) -> Result<Vec<String>, ServiceError> {
        req.validate()?;
        Ok(req.texts.clone())
    }
}

/// Bijective pseudo-translation with optional word reordering.
///
/// Mapping rule (published, relied on by tests): a `<...>` marker unit
/// passes through unchanged; any other whitespace unit `t` maps to
/// `{seed}~{t reversed character-wise}`. With `reverse` enabled the
/// whole unit sequence is reversed and every marker unit swaps its
/// open/close role, which keeps marker pairs well-formed around the
/// reordered tokens.
#[derive(Debug, Clone, Copy)]
pub struct DictionaryTranslator {
    seed: u64,
    reverse: bool,
}

impl DictionaryTranslator {
    pub fn new(seed: u64, reverse: bool) -> Self {
        DictionaryTranslator { seed, reverse }
    }

    pub fn map_token(&self, token: &str) -> String {
        if is_marker_unit(token) {
            return token.to_string();
        }
        let reversed: String = token.chars().rev().collect();
        format!("{}~{}", self.seed, reversed)
    }

    /// Inverse of [`Self::map_token`]; `None` when the token was not
    /// produced by this translator.
    pub fn invert_token(&self, token: &str) -> Option<String> {
        if is_marker_unit(token) {
            return Some(token.to_string());
        }
        let reversed = token.strip_prefix(&format!("{}~", self.seed))?;
        Some(reversed.chars().rev().collect())
    }

    pub fn translate_text(&self, text: &str) -> String {
        let mut units: Vec<String> = text.split_whitespace().map(|u| self.map_token(u)).collect();
        if self.reverse {
            units.reverse();
            for unit in &mut units {
                if is_marker_unit(unit) {
                    *unit = swap_marker_role(unit);
                }
            }
        }
        units.join(" ")
    }
}

#[async_trait]
impl Translator for DictionaryTranslator {
    async fn translate(&self, req: &TranslateRequest) -> Result<Vec<String>, ServiceError> {
        req.validate()?;
        Ok(req.texts.iter().map(|t| self.translate_text(t)).collect())
    }
}

/// Identity translator that deterministically mangles the markers of
/// selected inputs: a text is corrupted iff `fnv1a(text) % period == 0`
/// and it contains a closing marker, in which case the first closing
/// marker unit is dropped.
#[derive(Debug, Clone, Copy)]
pub struct CorruptingTranslator {
    period: u64,
}

impl CorruptingTranslator {
    pub fn new(period: u64) -> Self {
        CorruptingTranslator { period: period.max(1) }
    }

    pub fn would_corrupt(&self, text: &str) -> bool {
        fnv1a(text.as_bytes()) % self.period == 0
            && text.split_whitespace().any(|u| is_marker_unit(u) && u.starts_with("</"))
    }

    fn corrupt(&self, text: &str) -> String {
        let mut dropped = false;
        let units: Vec<&str> = text
            .split_whitespace()
            .filter(|unit| {
                if !dropped && is_marker_unit(unit) && unit.starts_with("</") {
                    dropped = true;
                    false
                } else {
                    true
                }
            })
            .collect();
        units.join(" ")
    }
}

#[async_trait]
impl Translator for CorruptingTranslator {
    async fn translate(&self, req: &TranslateRequest) -> Result<Vec<String>, ServiceError> {
        req.validate()?;
        Ok(req
            .texts
            .iter()
            .map(|t| if self.would_corrupt(t) { self.corrupt(t) } else { t.clone() })
            .collect())
    }
}

/// Replays gold annotations: tagging a sentence whose token sequence
/// appears in the gold document returns its exact tags; anything else is
/// an error.
#[derive(Debug, Clone, Default)]
pub struct OracleTagger {
    gold: BTreeMap<Vec<String>, TagSequence>,
}

impl OracleTagger {
    pub fn from_document(doc: &Document) -> Self {
        let gold = doc
            .sentences()
            .iter()
            .map(|sentence| {
                let tags = spans_to_tags(sentence.spans(), sentence.len())
                    .expect("document sentences carry valid spans");
                (sentence.tokens().to_vec(), tags)
            })
            .collect();
        OracleTagger { gold }
    }

    fn lookup(&self, tokens: &[String]) -> Result<TagSequence, ServiceError> {
        self.gold
            .get(tokens)
            .cloned()
            .ok_or_else(|| ServiceError::GoldMiss(tokens.join(" ")))
    }
}

#[async_trait]
impl Tagger for OracleTagger {
    async fn tag(&self, req: &TagRequest) -> Result<Vec<TagSequence>, ServiceError> {
        req.validate()?;
        req.sentences.iter().map(|tokens| self.lookup(tokens)).collect()
    }
}

/// Oracle tagger with seeded label noise: each gold tag is replaced by a
/// different uniformly chosen tag with probability `flip_rate`.
///
/// The per-sentence random stream is seeded by
/// `seed ^ fnv1a(joined tokens)`, so outputs do not depend on how a
/// corpus is batched. Flip candidates are `O` plus `B-`/`I-` over the
/// request's label set.
#[derive(Debug, Clone)]
pub struct NoisyTagger {
    oracle: OracleTagger,
    flip_rate: f64,
    seed: u64,
}

impl NoisyTagger {
    pub fn from_document(doc: &Document, flip_rate: f64, seed: u64) -> Self {
        NoisyTagger { oracle: OracleTagger::from_document(doc), flip_rate, seed }
    }

    fn candidates(label_set: &[String]) -> Vec<BioTag> {
        let mut out = vec![BioTag::Outside];
        for label in label_set {
            out.push(BioTag::Begin(label.clone()));
            out.push(BioTag::Inside(label.clone()));
        }
        out
    }
}

#[async_trait]
impl Tagger for NoisyTagger {
    async fn tag(&self, req: &TagRequest) -> Result<Vec<TagSequence>, ServiceError> {
        req.validate()?;
        let candidates = Self::candidates(&req.label_set);
        let mut out = Vec::with_capacity(req.sentences.len());
        for tokens in &req.sentences {
            let gold = self.oracle.lookup(tokens)?;
            let mut rng = SplitMix64::new(self.seed ^ fnv1a(tokens.join(" ").as_bytes()));
            let tags: Vec<BioTag> = gold
                .iter()
                .map(|tag| {
                    if self.flip_rate > 0.0 && rng.next_f64() < self.flip_rate {
                        let alternatives: Vec<&BioTag> =
                            candidates.iter().filter(|c| *c != tag).collect();
                        if alternatives.is_empty() {
                            tag.clone()
                        } else {
                            alternatives[rng.next_below(alternatives.len())].clone()
                        }
                    } else {
                        tag.clone()
                    }
                })
                .collect();
            out.push(TagSequence::new(tags));
        }
        Ok(out)
    }
}

/// Returns pre-registered replies keyed by the exact prompt string.
#[derive(Debug, Clone, Default)]
pub struct CannedGenerator {
    replies: BTreeMap<String, String>,
}

impl CannedGenerator {
    pub fn new() -> Self {
        CannedGenerator::default()
    }

    pub fn with_reply(mut self, prompt: impl Into<String>, reply: impl Into<String>) -> Self {
        self.replies.insert(prompt.into(), reply.into());
        self
    }

    pub fn from_map(replies: BTreeMap<String, String>) -> Self {
        CannedGenerator { replies }
    }
}

#[async_trait]
impl Generator for CannedGenerator {
    async fn generate(&self, req: &GenerateRequest) -> Result<String, ServiceError> {
        req.validate()?;
        self.replies
            .get(&req.prompt)
            .cloned()
            .ok_or(ServiceError::NoCannedResponse)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use transfusion_core::label::LabelSet;
    use transfusion_core::sentence::{EntitySpan, Sentence};

    fn translate_req(texts: &[&str]) -> TranslateRequest {
        TranslateRequest {
            texts: texts.iter().map(|t| t.to_string()).collect(),
            src_lang: "eng".into(),
            tgt_lang: "tir".into(),
            preserve_markers: true,
        }
    }

    fn block_on<F: std::future::Future>(future: F) -> F::Output {
        tokio::runtime::Builder::new_current_thread()
            .build()
            .unwrap()
            .block_on(future)
    }

    #[test]
    fn identity_translator_echoes() {
        let out = block_on(IdentityTranslator.translate(&translate_req(&["a b", "c"]))).unwrap();
        assert_eq!(out, vec!["a b".to_string(), "c".into()]);
    }

    #[test]
    fn empty_text_in_batch_is_rejected() {
        let err = block_on(IdentityTranslator.translate(&translate_req(&["a", ""]))).unwrap_err();
        assert!(matches!(err, ServiceError::InvalidRequest(_)));
    }

    #[test]
    fn dictionary_mapping_follows_published_rule() {
        let mock = DictionaryTranslator::new(7, false);
        assert_eq!(mock.map_token("John"), "7~nhoJ");
        assert_eq!(mock.map_token("<PER>"), "<PER>");
        assert_eq!(mock.translate_text("a b"), "7~a 7~b");
        assert_eq!(mock.invert_token("7~nhoJ").as_deref(), Some("John"));
        assert_eq!(mock.invert_token("8~nhoJ"), None);
    }

    #[test]
    fn dictionary_reversal_reorders_and_keeps_markers_well_formed() {
        let mock = DictionaryTranslator::new(7, true);
        assert_eq!(mock.translate_text("a b"), "7~b 7~a");
        assert_eq!(
            mock.translate_text("x <PER> a b </PER> y"),
            "7~y <PER> 7~b 7~a </PER> 7~x"
        );
    }

    #[test]
    fn dictionary_inversion_recovers_tokens() {
        let mock = DictionaryTranslator::new(3, true);
        for token in ["a", "Ḵutelu", "ab'c", "x1"] {
            let mapped = mock.map_token(token);
            assert_eq!(mock.invert_token(&mapped).as_deref(), Some(token));
        }
    }

    #[test]
    fn corrupting_translator_drops_first_close_marker() {
        let mock = CorruptingTranslator::new(1);
        let text = "<PER> a </PER> b <LOC> c </LOC>";
        assert!(mock.would_corrupt(text));
        let out = block_on(mock.translate(&translate_req(&[text]))).unwrap();
        assert_eq!(out[0], "<PER> a b <LOC> c </LOC>");
        // No markers, nothing to corrupt.
        assert!(!mock.would_corrupt("plain text"));
        let out = block_on(mock.translate(&translate_req(&["plain text"]))).unwrap();
        assert_eq!(out[0], "plain text");
    }

    fn gold_doc() -> Document {
        let labels = LabelSet::new(["PER", "LOC"]).unwrap();
        let s1 = Sentence::new(
            vec!["John".into(), "ran".into()],
            vec![EntitySpan::new("PER", 0, 1).unwrap()],
            "eng",
        )
        .unwrap();
        let s2 = Sentence::new(
            vec!["in".into(), "Paris".into()],
            vec![EntitySpan::new("LOC", 1, 2).unwrap()],
            "eng",
        )
        .unwrap();
        Document::new("gold", labels, vec![s1, s2]).unwrap()
    }

    fn tag_req(sentences: &[&[&str]]) -> TagRequest {
        TagRequest {
            sentences: sentences
                .iter()
                .map(|s| s.iter().map(|t| t.to_string()).collect())
                .collect(),
            language: "eng".into(),
            label_set: vec!["PER".into(), "LOC".into()],
        }
    }

    #[test]
    fn oracle_returns_gold_tags() {
        let tagger = OracleTagger::from_document(&gold_doc());
        let out = block_on(tagger.tag(&tag_req(&[&["in", "Paris"], &["John", "ran"]]))).unwrap();
        assert_eq!(out[0].to_strings(), ["O", "B-LOC"]);
        assert_eq!(out[1].to_strings(), ["B-PER", "O"]);
    }

    #[test]
    fn oracle_misses_loudly() {
        let tagger = OracleTagger::from_document(&gold_doc());
        let err = block_on(tagger.tag(&tag_req(&[&["unknown"]]))).unwrap_err();
        assert!(matches!(err, ServiceError::GoldMiss(_)));
    }

    #[test]
    fn noisy_tagger_with_zero_rate_matches_oracle() {
        let doc = gold_doc();
        let oracle = OracleTagger::from_document(&doc);
        let noisy = NoisyTagger::from_document(&doc, 0.0, 99);
        let req = tag_req(&[&["John", "ran"], &["in", "Paris"]]);
        assert_eq!(block_on(noisy.tag(&req)).unwrap(), block_on(oracle.tag(&req)).unwrap());
    }

    #[test]
    fn noisy_tagger_is_batching_invariant() {
        let doc = gold_doc();
        let noisy = NoisyTagger::from_document(&doc, 0.5, 7);
        let joint = block_on(noisy.tag(&tag_req(&[&["John", "ran"], &["in", "Paris"]]))).unwrap();
        let first = block_on(noisy.tag(&tag_req(&[&["John", "ran"]]))).unwrap();
        let second = block_on(noisy.tag(&tag_req(&[&["in", "Paris"]]))).unwrap();
        assert_eq!(joint, vec![first[0].clone(), second[0].clone()]);
    }

    #[test]
    fn canned_generator_replies_or_fails() {
        let generator = CannedGenerator::new().with_reply("ping", "pong");
        let ok = block_on(generator.generate(&GenerateRequest {
            prompt: "ping".into(),
            temperature: 0.0,
        }))
        .unwrap();
        assert_eq!(ok, "pong");
        let again = block_on(generator.generate(&GenerateRequest {
            prompt: "ping".into(),
            temperature: 0.0,
        }))
        .unwrap();
        assert_eq!(again, "pong");
        let err = block_on(generator.generate(&GenerateRequest {
            prompt: "other".into(),
            temperature: 0.0,
        }))
        .unwrap_err();
        assert!(matches!(err, ServiceError::NoCannedResponse));
    }
}
