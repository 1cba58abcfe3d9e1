//! Label projection across parallel sentences.
//!
//! Two families are supported: marker survival (translate the marked
//! source and read the markers back out of the translation) and word
//! alignment (map each source span through its aligned target tokens).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::label::LabelSet;
use crate::marker::{insert_markers, markers_consistent, parse_markers, MarkedText, MarkerStyle, ParseMode};
use crate::sentence::{EntitySpan, Sentence};

/// One word-alignment link between a source and a target token, as
/// produced by an external aligner (Pharaoh `i-j` pairs, 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignmentLink {
    pub src_index: usize,
    pub tgt_index: usize,
}

impl AlignmentLink {
    pub fn new(src_index: usize, tgt_index: usize) -> Self {
        AlignmentLink { src_index, tgt_index }
    }
}

/// Result of a fallible projection: either the projected target-language
/// sentence or a rejection with a human-readable reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectionOutcome {
    Projected(Sentence),
    Rejected { reason: String },
}

impl ProjectionOutcome {
    pub fn is_projected(&self) -> bool {
        matches!(self, ProjectionOutcome::Projected(_))
    }

    pub fn sentence(&self) -> Option<&Sentence> {
        match self {
            ProjectionOutcome::Projected(sentence) => Some(sentence),
            ProjectionOutcome::Rejected { .. } => None,
        }
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            ProjectionOutcome::Projected(_) => None,
            ProjectionOutcome::Rejected { reason } => Some(reason),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectionError {
    LinkOutOfBounds { link: AlignmentLink, src_len: usize, tgt_len: usize },
}

impl fmt::Display for ProjectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectionError::LinkOutOfBounds { link, src_len, tgt_len } => write!(
                f,
                "alignment link {}-{} out of bounds for {} source / {} target tokens",
                link.src_index, link.tgt_index, src_len, tgt_len
            ),
        }
    }
}

impl core::error::Error for ProjectionError {}

/// Projects `src`'s labels onto the translation of its marked form.
///
/// `translated_marked` must be the translator's output for
/// `insert_markers(src)`. The projection is rejected when the label
/// multiset recovered from the translation differs from the source's
/// (markers lost, duplicated or relabeled in transit) or, in strict
/// mode, when the surviving markers are structurally broken. Failures
/// never surface as errors: this operation is fallible by design and
/// reports them as [`ProjectionOutcome::Rejected`].
pub fn project_by_markers(
    src: &Sentence,
    translated_marked: &str,
    labels: &LabelSet,
    style: MarkerStyle,
    mode: ParseMode,
    tgt_language: &str,
) -> ProjectionOutcome {
    let marked_src = insert_markers(src, labels, style);
    let translated = MarkedText::from_raw(translated_marked, labels.clone(), style);
    if !markers_consistent(&marked_src, &translated) {
        return ProjectionOutcome::Rejected { reason: "marker multiset mismatch".to_string() };
    }
    match parse_markers(translated_marked, labels, style, mode, tgt_language) {
        Ok(sentence) => ProjectionOutcome::Projected(sentence),
        Err(err) => ProjectionOutcome::Rejected { reason: format!("marker parse failed: {err}") },
    }
}

/// Projects `src`'s labels onto `tgt_tokens` through word-alignment
/// links.
///
/// Each source span maps to the convex hull `[min, max]` of the target
/// indices aligned to any of its tokens; spans with an empty image are
/// dropped. Overlapping projected spans are resolved deterministically:
/// longer spans win, ties prefer the smaller start, then the
/// lexicographically smaller label.
pub fn project_by_alignment(
    src: &Sentence,
    links: &[AlignmentLink],
    tgt_tokens: &[String],
    tgt_language: &str,
) -> Result<Sentence, ProjectionError> {
    for link in links {
        if link.src_index >= src.len() || link.tgt_index >= tgt_tokens.len() {
            return Err(ProjectionError::LinkOutOfBounds {
                link: *link,
                src_len: src.len(),
                tgt_len: tgt_tokens.len(),
            });
        }
    }

    let mut candidates: Vec<EntitySpan> = Vec::new();
    for span in src.spans() {
        let mut image: Option<(usize, usize)> = None;
        for link in links {
            if span.start <= link.src_index && link.src_index < span.end {
                image = Some(match image {
                    None => (link.tgt_index, link.tgt_index),
                    Some((lo, hi)) => (lo.min(link.tgt_index), hi.max(link.tgt_index)),
                });
            }
        }
        if let Some((lo, hi)) = image {
            candidates.push(EntitySpan { label: span.label.clone(), start: lo, end: hi + 1 });
        }
    }

    candidates.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then(a.start.cmp(&b.start))
            .then(a.label.cmp(&b.label))
    });
    let mut kept: Vec<EntitySpan> = Vec::new();
    for candidate in candidates {
        if !kept.iter().any(|k| k.overlaps(&candidate)) {
            kept.push(candidate);
        }
    }

    // Hull ends stay within the checked link bounds and survivors are
    // pairwise non-overlapping, so construction cannot fail.
    Ok(Sentence::new(tgt_tokens.to_vec(), kept, tgt_language)
        .expect("projected sentence is structurally valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn labels() -> LabelSet {
        LabelSet::new(["PER", "LOC", "ORG"]).unwrap()
    }

    fn sentence(words: &[&str], spans: Vec<EntitySpan>) -> Sentence {
        Sentence::new(words.iter().map(|w| w.to_string()).collect(), spans, "eng").unwrap()
    }

    fn span(label: &str, start: usize, end: usize) -> EntitySpan {
        EntitySpan::new(label, start, end).unwrap()
    }

    fn tokens(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn identity_translation_reproduces_source_labels() {
        let src = sentence(
            &["John", "lives", "in", "Paris"],
            vec![span("PER", 0, 1), span("LOC", 3, 4)],
        );
        let marked = insert_markers(&src, &labels(), MarkerStyle::Xml);
        let outcome = project_by_markers(
            &src,
            marked.text(),
            &labels(),
            MarkerStyle::Xml,
            ParseMode::Strict,
            "tir",
        );
        let projected = outcome.sentence().expect("projected");
        assert_eq!(projected.tokens(), src.tokens());
        assert_eq!(projected.spans(), src.spans());
        assert_eq!(projected.language(), "tir");
    }

    #[test]
    fn dropped_close_marker_is_rejected() {
        let src = sentence(&["John", "runs"], vec![span("PER", 0, 1)]);
        let outcome = project_by_markers(
            &src,
            "<PER> John runs",
            &labels(),
            MarkerStyle::Xml,
            ParseMode::Strict,
            "tir",
        );
        assert_eq!(outcome.reason(), Some("marker multiset mismatch"));
    }

    #[test]
    fn reordered_entities_project_to_new_positions() {
        let src = sentence(
            &["John", "visited", "Paris"],
            vec![span("PER", 0, 1), span("LOC", 2, 3)],
        );
        let outcome = project_by_markers(
            &src,
            "<LOC> pa ri </LOC> zz <PER> jo </PER>",
            &labels(),
            MarkerStyle::Xml,
            ParseMode::Strict,
            "tir",
        );
        let projected = outcome.sentence().expect("projected");
        assert_eq!(projected.tokens(), &["pa", "ri", "zz", "jo"]);
        assert_eq!(projected.spans(), &[span("LOC", 0, 2), span("PER", 3, 4)]);
    }

    #[test]
    fn strict_structural_break_with_intact_multiset_is_rejected() {
        let src = sentence(&["a", "b"], vec![span("PER", 0, 1), span("LOC", 1, 2)]);
        // Crossing markers: lenient recovery only salvages the LOC pair,
        // so the multiset check fails.
        let outcome = project_by_markers(
            &src,
            "<PER> a <LOC> b </PER> c </LOC>",
            &labels(),
            MarkerStyle::Xml,
            ParseMode::Strict,
            "tir",
        );
        assert!(!outcome.is_projected());
    }

    #[test]
    fn alignment_projects_contiguous_image() {
        let src = sentence(&["John", "Smith"], vec![span("PER", 0, 2)]);
        let links = [AlignmentLink::new(0, 3), AlignmentLink::new(1, 4)];
        let tgt = tokens(&["t0", "t1", "t2", "t3", "t4", "t5"]);
        let projected = project_by_alignment(&src, &links, &tgt, "tir").unwrap();
        assert_eq!(projected.spans(), &[span("PER", 3, 5)]);
    }

    #[test]
    fn alignment_drops_span_with_empty_image() {
        let src = sentence(&["Paris", "today"], vec![span("LOC", 0, 1)]);
        let links = [AlignmentLink::new(1, 0)];
        let projected = project_by_alignment(&src, &links, &tokens(&["t0", "t1"]), "tir").unwrap();
        assert!(projected.spans().is_empty());
    }

    #[test]
    fn alignment_gap_projects_convex_hull() {
        let src = sentence(&["New", "York", "City"], vec![span("LOC", 0, 3)]);
        let links = [AlignmentLink::new(0, 1), AlignmentLink::new(2, 4)];
        let tgt = tokens(&["t0", "t1", "t2", "t3", "t4"]);
        let projected = project_by_alignment(&src, &links, &tgt, "tir").unwrap();
        assert_eq!(projected.spans(), &[span("LOC", 1, 5)]);
    }

    #[test]
    fn alignment_overlap_keeps_longer_span() {
        let src = sentence(
            &["Jo", "Acme"],
            vec![span("PER", 0, 1), span("ORG", 1, 2)],
        );
        // PER image {2}; ORG image {1, 2, 3}.
        let links = [
            AlignmentLink::new(0, 2),
            AlignmentLink::new(1, 1),
            AlignmentLink::new(1, 2),
            AlignmentLink::new(1, 3),
        ];
        let tgt = tokens(&["t0", "t1", "t2", "t3"]);
        let projected = project_by_alignment(&src, &links, &tgt, "tir").unwrap();
        assert_eq!(projected.spans(), &[span("ORG", 1, 4)]);
    }

    #[test]
    fn alignment_rejects_out_of_bounds_link() {
        let src = sentence(&["a"], vec![]);
        let err = project_by_alignment(
            &src,
            &[AlignmentLink::new(0, 9)],
            &tokens(&["t0"]),
            "tir",
        )
        .unwrap_err();
        assert!(matches!(err, ProjectionError::LinkOutOfBounds { .. }));
    }

    #[test]
    fn monotone_alignment_preserves_positions() {
        let src = sentence(
            &["a", "b", "c", "d"],
            vec![span("PER", 1, 3)],
        );
        let links: Vec<AlignmentLink> = (0..4).map(|i| AlignmentLink::new(i, i)).collect();
        let tgt = tokens(&["w", "x", "y", "z"]);
        let projected = project_by_alignment(&src, &links, &tgt, "tir").unwrap();
        assert_eq!(projected.spans(), src.spans());
    }
}
