//! Assembly of fused model inputs and the translate-correct relabeling
//! step.
//!
//! A fused input concatenates one or more marker-annotated source
//! segments with a raw target-language segment, a `<X>` separator
//! between every pair: `[x1 x2 <PER> x3 x4 </PER> x5, <X>, t1 t2 t3]`.
//! Target labels are supervised per token; every position outside the
//! target segment carries the `IGN` sentinel and is excluded from the
//! loss mask.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::label::LabelSet;
use crate::marker::{insert_markers, MarkerStyle};
use crate::sentence::{EntitySpan, Sentence, SentenceError};
use crate::tags::{spans_to_tags, BioTag, TagError};

/// Segment separator token between concatenated inputs.
pub const SEPARATOR_TOKEN: &str = "<X>";

/// Serialized form of [`TargetTag::Ignore`].
pub const IGNORE_TAG: &str = "IGN";

/// A supervision target for one fused-input token: either a BIO tag (on
/// target-segment tokens) or the ignore sentinel (everywhere else).
///
/// `IGN` is deliberately distinct from `O`: reusing `O` would train the
/// model to predict "outside" on source-segment tokens instead of
/// skipping them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetTag {
    Ignore,
    Bio(BioTag),
}

impl TargetTag {
    pub fn is_ignore(&self) -> bool {
        matches!(self, TargetTag::Ignore)
    }

    pub fn parse(s: &str) -> Result<Self, TagError> {
        if s == IGNORE_TAG {
            Ok(TargetTag::Ignore)
        } else {
            s.parse().map(TargetTag::Bio)
        }
    }
}

impl fmt::Display for TargetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetTag::Ignore => f.write_str(IGNORE_TAG),
            TargetTag::Bio(tag) => write!(f, "{tag}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FusionError {
    /// Multi-source builder called with no sources.
    NoSources,
    /// Target spans failed to encode (overlap / out of bounds).
    Tag(TagError),
    /// Target tokens failed sentence validation.
    Sentence(SentenceError),
    /// Raw parts do not satisfy the fused-example invariants.
    Invalid(String),
}

impl fmt::Display for FusionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FusionError::NoSources => f.write_str("at least one source sentence is required"),
            FusionError::Tag(err) => write!(f, "target tags: {err}"),
            FusionError::Sentence(err) => write!(f, "target tokens: {err}"),
            FusionError::Invalid(msg) => write!(f, "invalid fused example: {msg}"),
        }
    }
}

impl core::error::Error for FusionError {}

impl From<TagError> for FusionError {
    fn from(err: TagError) -> Self {
        FusionError::Tag(err)
    }
}

impl From<SentenceError> for FusionError {
    fn from(err: SentenceError) -> Self {
        FusionError::Sentence(err)
    }
}

/// One fused model input/target pair.
///
/// Invariants: `tokens`, `tags` and `mask` have equal length; the mask
/// is true exactly on the final (target) segment; masked-out positions
/// carry [`TargetTag::Ignore`] and masked-in positions a BIO tag; every
/// adjacent segment pair is joined by exactly one [`SEPARATOR_TOKEN`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionExample {
    tokens: Vec<String>,
    tags: Vec<TargetTag>,
    mask: Vec<bool>,
    segment_starts: Vec<usize>,
    src_lang: String,
    tgt_lang: String,
}

impl FusionExample {
    /// Reassembles an example from raw parts, checking every invariant.
    pub fn from_parts(
        tokens: Vec<String>,
        tags: Vec<TargetTag>,
        mask: Vec<bool>,
        segment_starts: Vec<usize>,
        src_lang: impl Into<String>,
        tgt_lang: impl Into<String>,
    ) -> Result<Self, FusionError> {
        if tokens.len() != tags.len() || tokens.len() != mask.len() {
            return Err(FusionError::Invalid(alloc::format!(
                "length mismatch: {} tokens, {} tags, {} mask entries",
                tokens.len(),
                tags.len(),
                mask.len()
            )));
        }
        if segment_starts.len() < 2 {
            return Err(FusionError::Invalid("fewer than two segments".to_string()));
        }
        if segment_starts[0] != 0 {
            return Err(FusionError::Invalid("first segment must start at 0".to_string()));
        }
        for pair in segment_starts.windows(2) {
            if pair[1] <= pair[0] {
                return Err(FusionError::Invalid("segment starts must increase".to_string()));
            }
            match tokens.get(pair[1] - 1) {
                Some(t) if t == SEPARATOR_TOKEN => {}
                _ => {
                    return Err(FusionError::Invalid(alloc::format!(
                        "expected separator {SEPARATOR_TOKEN:?} before position {}",
                        pair[1]
                    )))
                }
            }
        }
        let target_start = *segment_starts.last().unwrap();
        if target_start > tokens.len() {
            return Err(FusionError::Invalid("target segment starts past the end".to_string()));
        }
        for (index, flag) in mask.iter().enumerate() {
            if *flag != (index >= target_start) {
                return Err(FusionError::Invalid(alloc::format!(
                    "mask at {index} does not match the target segment boundary"
                )));
            }
            if *flag == tags[index].is_ignore() {
                return Err(FusionError::Invalid(alloc::format!(
                    "tag at {index} must be {}",
                    if *flag { "a BIO tag, not IGN" } else { "IGN" }
                )));
            }
        }
        Ok(FusionExample {
            tokens,
            tags,
            mask,
            segment_starts,
            src_lang: src_lang.into(),
            tgt_lang: tgt_lang.into(),
        })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn tags(&self) -> &[TargetTag] {
        &self.tags
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Start index of each segment in the flattened token sequence; the
    /// last entry is the target segment.
    pub fn segment_starts(&self) -> &[usize] {
        &self.segment_starts
    }

    pub fn segment_count(&self) -> usize {
        self.segment_starts.len()
    }

    /// Tokens of segment `index`, separator excluded.
    pub fn segment_tokens(&self, index: usize) -> &[String] {
        let start = self.segment_starts[index];
        let end = match self.segment_starts.get(index + 1) {
            Some(next) => next - 1,
            None => self.tokens.len(),
        };
        &self.tokens[start..end]
    }

    /// Tokens of the final (target-language) segment.
    pub fn target_tokens(&self) -> &[String] {
        self.segment_tokens(self.segment_count() - 1)
    }

    pub fn src_lang(&self) -> &str {
        &self.src_lang
    }

    pub fn tgt_lang(&self) -> &str {
        &self.tgt_lang
    }
}

/// Builds a single-source fused input: `[marked source, <X>, target]`.
///
/// `tgt_spans` are the supervision labels over `tgt_tokens` when
/// building training data; pass `None` at inference time, which emits
/// all-`O` placeholder tags over the target segment under an identical
/// schema.
pub fn build_fusion_input(
    src: &Sentence,
    tgt_tokens: &[String],
    tgt_spans: Option<&[EntitySpan]>,
    tgt_lang: &str,
    labels: &LabelSet,
    style: MarkerStyle,
) -> Result<FusionExample, FusionError> {
    build_multisource_input(core::slice::from_ref(src), tgt_tokens, tgt_spans, tgt_lang, labels, style)
}

/// Builds a fused input from several annotated source-language segments:
/// `[marked src 1, <X>, marked src 2, <X>, ..., <X>, target]`.
///
/// Sources keep the given order; `src_lang` of the result is the first
/// source's language. With `k` sources the flattened sequence contains
/// exactly `k` separators.
pub fn build_multisource_input(
    sources: &[Sentence],
    tgt_tokens: &[String],
    tgt_spans: Option<&[EntitySpan]>,
    tgt_lang: &str,
    labels: &LabelSet,
    style: MarkerStyle,
) -> Result<FusionExample, FusionError> {
    let Some(first) = sources.first() else {
        return Err(FusionError::NoSources);
    };
    if let Some(spans) = tgt_spans {
        for span in spans {
            if !labels.contains(&span.label) {
                return Err(FusionError::Sentence(SentenceError::UnknownLabel {
                    label: span.label.clone(),
                }));
            }
        }
    }
    let target = Sentence::new(tgt_tokens.to_vec(), tgt_spans.unwrap_or(&[]).to_vec(), tgt_lang)?;
    let target_tags = spans_to_tags(target.spans(), target.len())?;

    let mut tokens: Vec<String> = Vec::new();
    let mut tags: Vec<TargetTag> = Vec::new();
    let mut mask: Vec<bool> = Vec::new();
    let mut segment_starts: Vec<usize> = Vec::new();

    for source in sources {
        segment_starts.push(tokens.len());
        let marked = insert_markers(source, labels, style);
        for unit in marked.text().split_whitespace() {
            tokens.push(unit.to_string());
        }
        tokens.push(SEPARATOR_TOKEN.to_string());
        while tags.len() < tokens.len() {
            tags.push(TargetTag::Ignore);
            mask.push(false);
        }
    }
    segment_starts.push(tokens.len());
    for (token, tag) in target.tokens().iter().zip(target_tags.into_iter()) {
        tokens.push(token.clone());
        tags.push(TargetTag::Bio(tag));
        mask.push(true);
    }

    Ok(FusionExample {
        tokens,
        tags,
        mask,
        segment_starts,
        src_lang: first.language().to_string(),
        tgt_lang: tgt_lang.to_string(),
    })
}

/// Relabels predicted spans from a source-language tagger's second
/// opinion, the fusion step of the translate-correct baseline.
///
/// `surviving` are the spans recovered leniently from the translated
/// marked prediction and `tagger_spans` the source-language tagger's
/// spans over the same clean translation. The i-th surviving pair
/// corresponds to the i-th predicted span. A predicted span is relabeled
/// only when a tagger span covers exactly the same extent as its
/// surviving image with a different label; spans whose markers were lost
/// in translation, and extents the tagger segments differently, keep
/// their original labels. Extents, span count and tokens never change.
pub fn correct_labels(
    pred: &Sentence,
    surviving: &[EntitySpan],
    tagger_spans: &[EntitySpan],
) -> Sentence {
    let mut spans = pred.spans().to_vec();
    for (span, survived) in spans.iter_mut().zip(surviving.iter()) {
        let verdict = tagger_spans
            .iter()
            .find(|t| t.start == survived.start && t.end == survived.end);
        if let Some(tagged) = verdict {
            if tagged.label != survived.label {
                span.label = tagged.label.clone();
            }
        }
    }
    pred.with_spans(spans).expect("relabeling preserves extents")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn labels() -> LabelSet {
        LabelSet::new(["PER", "LOC", "ORG"]).unwrap()
    }

    fn sentence(lang: &str, words: &[&str], spans: Vec<EntitySpan>) -> Sentence {
        Sentence::new(words.iter().map(|w| w.to_string()).collect(), spans, lang).unwrap()
    }

    fn span(label: &str, start: usize, end: usize) -> EntitySpan {
        EntitySpan::new(label, start, end).unwrap()
    }

    fn tokens(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn strings(example: &FusionExample) -> (Vec<String>, Vec<String>, Vec<u8>) {
        (
            example.tokens().to_vec(),
            example.tags().iter().map(|t| t.to_string()).collect(),
            example.mask().iter().map(|m| u8::from(*m)).collect(),
        )
    }

    #[test]
    fn assembles_training_example() {
        let src = sentence("eng", &["Kutelu", "fell"], vec![span("PER", 0, 1)]);
        let tgt = tokens(&["ku", "te", "lu", "wo"]);
        let example = build_fusion_input(
            &src,
            &tgt,
            Some(&[span("PER", 0, 3)]),
            "yor",
            &labels(),
            MarkerStyle::Xml,
        )
        .unwrap();

        let (toks, tags, mask) = strings(&example);
        assert_eq!(
            toks,
            ["<PER>", "Kutelu", "</PER>", "fell", "<X>", "ku", "te", "lu", "wo"]
        );
        assert_eq!(
            tags,
            ["IGN", "IGN", "IGN", "IGN", "IGN", "B-PER", "I-PER", "I-PER", "O"]
        );
        assert_eq!(mask, [0, 0, 0, 0, 0, 1, 1, 1, 1]);
        assert_eq!(example.segment_starts(), &[0, 5]);
        assert_eq!(example.src_lang(), "eng");
        assert_eq!(example.tgt_lang(), "yor");
        assert_eq!(example.target_tokens(), &["ku", "te", "lu", "wo"]);
        assert_eq!(example.segment_tokens(0), &["<PER>", "Kutelu", "</PER>", "fell"]);
    }

    #[test]
    fn no_spans_yields_all_outside_target() {
        let src = sentence("eng", &["a", "b"], vec![]);
        let example =
            build_fusion_input(&src, &tokens(&["t"]), Some(&[]), "tir", &labels(), MarkerStyle::Xml)
                .unwrap();
        let (_, tags, _) = strings(&example);
        assert_eq!(tags, ["IGN", "IGN", "IGN", "O"]);
    }

    #[test]
    fn inference_mode_matches_training_schema() {
        let src = sentence("eng", &["a", "b"], vec![span("ORG", 0, 2)]);
        let tgt = tokens(&["t1", "t2"]);
        let trained = build_fusion_input(&src, &tgt, Some(&[]), "tir", &labels(), MarkerStyle::Xml)
            .unwrap();
        let inferred =
            build_fusion_input(&src, &tgt, None, "tir", &labels(), MarkerStyle::Xml).unwrap();
        assert_eq!(trained, inferred);
        assert_eq!(trained.mask(), inferred.mask());
    }

    #[test]
    fn multisource_emits_one_separator_per_source() {
        let sources = [
            sentence("eng", &["a"], vec![span("PER", 0, 1)]),
            sentence("deu", &["b"], vec![]),
            sentence("spa", &["c"], vec![span("LOC", 0, 1)]),
        ];
        let example = build_multisource_input(
            &sources,
            &tokens(&["t1", "t2"]),
            None,
            "tir",
            &labels(),
            MarkerStyle::Xml,
        )
        .unwrap();
        let separators = example.tokens().iter().filter(|t| *t == SEPARATOR_TOKEN).count();
        assert_eq!(separators, 3);
        assert_eq!(example.segment_count(), 4);
        assert_eq!(example.src_lang(), "eng");
        assert_eq!(example.segment_tokens(0), &["<PER>", "a", "</PER>"]);
        assert_eq!(example.segment_tokens(1), &["b"]);
    }

    #[test]
    fn single_source_multisource_degenerates_to_fusion_input() {
        let src = sentence("eng", &["a", "b"], vec![span("LOC", 1, 2)]);
        let tgt = tokens(&["t"]);
        let single =
            build_fusion_input(&src, &tgt, None, "tir", &labels(), MarkerStyle::Xml).unwrap();
        let multi = build_multisource_input(
            core::slice::from_ref(&src),
            &tgt,
            None,
            "tir",
            &labels(),
            MarkerStyle::Xml,
        )
        .unwrap();
        assert_eq!(single, multi);
    }

    #[test]
    fn empty_source_list_is_rejected() {
        let err = build_multisource_input(&[], &tokens(&["t"]), None, "tir", &labels(), MarkerStyle::Xml)
            .unwrap_err();
        assert_eq!(err, FusionError::NoSources);
    }

    #[test]
    fn invalid_target_spans_are_rejected() {
        let src = sentence("eng", &["a"], vec![]);
        let err = build_fusion_input(
            &src,
            &tokens(&["t"]),
            Some(&[span("PER", 0, 2)]),
            "tir",
            &labels(),
            MarkerStyle::Xml,
        )
        .unwrap_err();
        assert!(matches!(err, FusionError::Sentence(_)));
        let err = build_fusion_input(
            &src,
            &tokens(&["t"]),
            Some(&[span("GPE", 0, 1)]),
            "tir",
            &labels(),
            MarkerStyle::Xml,
        )
        .unwrap_err();
        assert!(matches!(err, FusionError::Sentence(SentenceError::UnknownLabel { .. })));
    }

    #[test]
    fn from_parts_round_trips_and_validates() {
        let src = sentence("eng", &["a"], vec![span("PER", 0, 1)]);
        let example =
            build_fusion_input(&src, &tokens(&["t"]), None, "tir", &labels(), MarkerStyle::Xml)
                .unwrap();
        let rebuilt = FusionExample::from_parts(
            example.tokens().to_vec(),
            example.tags().to_vec(),
            example.mask().to_vec(),
            example.segment_starts().to_vec(),
            example.src_lang(),
            example.tgt_lang(),
        )
        .unwrap();
        assert_eq!(example, rebuilt);

        // Mask leaking onto the separator position.
        let bad = FusionExample::from_parts(
            example.tokens().to_vec(),
            example.tags().to_vec(),
            vec![false, false, false, true, true],
            example.segment_starts().to_vec(),
            "eng",
            "tir",
        );
        assert!(matches!(bad, Err(FusionError::Invalid(_))));

        // IGN leaking into the target segment.
        let mut tags = example.tags().to_vec();
        *tags.last_mut().unwrap() = TargetTag::Ignore;
        let bad = FusionExample::from_parts(
            example.tokens().to_vec(),
            tags,
            example.mask().to_vec(),
            example.segment_starts().to_vec(),
            "eng",
            "tir",
        );
        assert!(matches!(bad, Err(FusionError::Invalid(_))));
    }

    #[test]
    fn correct_relabels_disagreeing_extent() {
        // Predicted LOC over "Manchester City"; the source tagger calls
        // the identical extent ORG.
        let pred = sentence("wol", &["Manchester", "City", "raw"], vec![span("LOC", 0, 2)]);
        let surviving = [span("LOC", 0, 2)];
        let tagger = [span("ORG", 0, 2)];
        let corrected = correct_labels(&pred, &surviving, &tagger);
        assert_eq!(corrected.spans(), &[span("ORG", 0, 2)]);
        assert_eq!(corrected.tokens(), pred.tokens());
    }

    #[test]
    fn correct_keeps_labels_when_tagger_agrees() {
        let pred = sentence(
            "wol",
            &["a", "b", "c"],
            vec![span("PER", 0, 1), span("LOC", 2, 3)],
        );
        let surviving = [span("PER", 0, 1), span("LOC", 2, 3)];
        let corrected = correct_labels(&pred, &surviving, &surviving);
        assert_eq!(&corrected, &pred);
    }

    #[test]
    fn correct_leaves_spans_whose_markers_were_lost() {
        let pred = sentence(
            "wol",
            &["a", "b"],
            vec![span("PER", 0, 1), span("LOC", 1, 2)],
        );
        // Only the first pair survived translation; the tagger disagrees
        // with it.
        let surviving = [span("PER", 0, 1)];
        let tagger = [span("ORG", 0, 1), span("ORG", 1, 2)];
        let corrected = correct_labels(&pred, &surviving, &tagger);
        assert_eq!(corrected.spans(), &[span("ORG", 0, 1), span("LOC", 1, 2)]);
    }

    #[test]
    fn correct_ignores_partially_overlapping_tagger_spans() {
        let pred = sentence("wol", &["a", "b", "c"], vec![span("PER", 0, 2)]);
        let surviving = [span("PER", 0, 2)];
        // Tagger sees a wider extent: no exact match, no relabel.
        let tagger = [span("ORG", 0, 3)];
        let corrected = correct_labels(&pred, &surviving, &tagger);
        assert_eq!(corrected.spans(), pred.spans());
    }
}
