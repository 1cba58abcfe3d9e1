//! Property suites over the span algebra: codec roundtrips, lenient-parse
//! totality, projection and fused-input invariants.

use proptest::prelude::*;

use transfusion_core::fusion::{build_multisource_input, TargetTag, SEPARATOR_TOKEN};
use transfusion_core::label::LabelSet;
use transfusion_core::marker::{insert_markers, parse_markers, MarkerStyle, ParseMode};
use transfusion_core::projection::{project_by_alignment, project_by_markers, AlignmentLink};
use transfusion_core::sentence::{Document, EntitySpan, Sentence};
use transfusion_core::tags::{spans_to_tags, tags_to_spans, BioTag, DecodeMode, TagSequence};
use transfusion_core::{score, ProjectionOutcome};

const LABELS: &[&str] = &["PER", "LOC", "ORG", "GPE"];

fn label_set() -> LabelSet {
    LabelSet::new(LABELS.iter().copied()).unwrap()
}

fn token_strategy() -> impl Strategy<Value = String> {
    // Marker-delimiter characters are excluded: a token that itself
    // parses as a marker makes marked text ambiguous by construction.
    proptest::string::string_regex("[a-zA-Z0-9.,']{1,6}").unwrap()
}

/// Non-overlapping spans over `len` tokens, built from raw (start, len,
/// label) triples by greedy conflict dropping.
fn spans_from_raw(raw: Vec<(usize, usize, usize)>, len: usize) -> Vec<EntitySpan> {
    let mut spans: Vec<EntitySpan> = Vec::new();
    for (start, span_len, label) in raw {
        if len == 0 {
            break;
        }
        let start = start % len;
        let end = (start + 1 + span_len % 3).min(len);
        let candidate = EntitySpan::new(LABELS[label % LABELS.len()], start, end).unwrap();
        if !spans.iter().any(|s| s.overlaps(&candidate)) {
            spans.push(candidate);
        }
    }
    spans.sort_by_key(|s| s.start);
    spans
}

fn sentence_strategy() -> impl Strategy<Value = Sentence> {
    (
        proptest::collection::vec(token_strategy(), 1..12),
        proptest::collection::vec((0usize..12, 0usize..3, 0usize..LABELS.len()), 0..5),
    )
        .prop_map(|(tokens, raw)| {
            let spans = spans_from_raw(raw, tokens.len());
            Sentence::new(tokens, spans, "eng").unwrap()
        })
}

fn style_strategy() -> impl Strategy<Value = MarkerStyle> {
    prop_oneof![Just(MarkerStyle::Xml), Just(MarkerStyle::Square)]
}

proptest! {
    #[test]
    fn tag_roundtrip_recovers_spans(sentence in sentence_strategy()) {
        let tags = spans_to_tags(sentence.spans(), sentence.len()).unwrap();
        let decoded = tags_to_spans(&tags, &label_set(), DecodeMode::Strict).unwrap();
        prop_assert_eq!(decoded.as_slice(), sentence.spans());
    }

    #[test]
    fn repair_is_identity_on_strict_sequences(sentence in sentence_strategy()) {
        let tags = spans_to_tags(sentence.spans(), sentence.len()).unwrap();
        let strict = tags_to_spans(&tags, &label_set(), DecodeMode::Strict).unwrap();
        let repaired = tags_to_spans(&tags, &label_set(), DecodeMode::Repair).unwrap();
        prop_assert_eq!(strict, repaired);
    }

    #[test]
    fn repair_decode_is_total_and_well_formed(
        raw_tags in proptest::collection::vec((0usize..3, 0usize..LABELS.len()), 0..16)
    ) {
        let tags = TagSequence::new(
            raw_tags
                .into_iter()
                .map(|(kind, label)| match kind {
                    0 => BioTag::Outside,
                    1 => BioTag::Begin(LABELS[label].to_string()),
                    _ => BioTag::Inside(LABELS[label].to_string()),
                })
                .collect(),
        );
        let spans = tags_to_spans(&tags, &label_set(), DecodeMode::Repair).unwrap();
        for pair in spans.windows(2) {
            prop_assert!(pair[0].end <= pair[1].start);
        }
        for span in &spans {
            prop_assert!(span.start < span.end && span.end <= tags.len());
        }
        // Decoding is a normalization fixpoint: re-encoding and decoding
        // again changes nothing.
        let reencoded = spans_to_tags(&spans, tags.len()).unwrap();
        let redecoded = tags_to_spans(&reencoded, &label_set(), DecodeMode::Strict).unwrap();
        prop_assert_eq!(spans, redecoded);
    }

    #[test]
    fn marker_roundtrip_is_identity(sentence in sentence_strategy(), style in style_strategy()) {
        let labels = label_set();
        let marked = insert_markers(&sentence, &labels, style);
        let back = parse_markers(marked.text(), &labels, style, ParseMode::Strict, "eng").unwrap();
        prop_assert_eq!(back, sentence);
    }

    #[test]
    fn lenient_parse_is_total(units in proptest::collection::vec(
        prop_oneof![
            token_strategy(),
            Just("<PER>".to_string()),
            Just("</PER>".to_string()),
            Just("<LOC>".to_string()),
            Just("</LOC>".to_string()),
            Just("<misc>".to_string()),
            Just("<".to_string()),
            Just("/>".to_string()),
            "\\PC{1,4}".prop_filter("whitespace-free", |s| !s.chars().any(char::is_whitespace)),
        ],
        0..20,
    )) {
        let labels = label_set();
        let text = units.join(" ");
        let parsed = parse_markers(&text, &labels, MarkerStyle::Xml, ParseMode::Lenient, "x").unwrap();

        // Clean tokens are exactly the units that are not known-label
        // markers, in order.
        let expected: Vec<&str> = text
            .split_whitespace()
            .filter(|unit| {
                let inner = unit
                    .strip_prefix('<')
                    .and_then(|u| u.strip_suffix('>'))
                    .map(|u| u.strip_prefix('/').unwrap_or(u));
                !matches!(inner, Some(label) if labels.contains(label))
            })
            .collect();
        prop_assert_eq!(parsed.tokens().iter().map(String::as_str).collect::<Vec<_>>(), expected);

        for pair in parsed.spans().windows(2) {
            prop_assert!(pair[0].end <= pair[1].start);
        }
        for span in parsed.spans() {
            prop_assert!(span.start < span.end && span.end <= parsed.len());
        }
    }

    #[test]
    fn identity_translation_projects_identically(sentence in sentence_strategy()) {
        let labels = label_set();
        let marked = insert_markers(&sentence, &labels, MarkerStyle::Xml);
        let outcome = project_by_markers(
            &sentence,
            marked.text(),
            &labels,
            MarkerStyle::Xml,
            ParseMode::Strict,
            "tir",
        );
        match outcome {
            ProjectionOutcome::Projected(projected) => {
                prop_assert_eq!(projected.tokens(), sentence.tokens());
                prop_assert_eq!(projected.spans(), sentence.spans());
                prop_assert_eq!(projected.language(), "tir");
            }
            ProjectionOutcome::Rejected { reason } => prop_assert!(false, "rejected: {}", reason),
        }
    }

    #[test]
    fn alignment_projection_output_is_well_formed(
        sentence in sentence_strategy(),
        raw_links in proptest::collection::vec((0usize..12, 0usize..9), 0..24),
        tgt_len in 1usize..9,
    ) {
        let tgt_tokens: Vec<String> = (0..tgt_len).map(|i| format!("t{i}")).collect();
        let links: Vec<AlignmentLink> = raw_links
            .into_iter()
            .map(|(s, t)| AlignmentLink::new(s % sentence.len(), t % tgt_len))
            .collect();
        let projected = project_by_alignment(&sentence, &links, &tgt_tokens, "tir").unwrap();
        for span in projected.spans() {
            prop_assert!(span.end <= tgt_len);
        }
        for pair in projected.spans().windows(2) {
            prop_assert!(pair[0].end <= pair[1].start);
        }
    }

    #[test]
    fn monotone_alignment_is_identity_on_positions(sentence in sentence_strategy()) {
        let links: Vec<AlignmentLink> =
            (0..sentence.len()).map(|i| AlignmentLink::new(i, i)).collect();
        let tgt_tokens: Vec<String> = (0..sentence.len()).map(|i| format!("t{i}")).collect();
        let projected = project_by_alignment(&sentence, &links, &tgt_tokens, "tir").unwrap();
        prop_assert_eq!(projected.spans(), sentence.spans());
    }

    #[test]
    fn fused_input_mask_and_separators(
        sources in proptest::collection::vec(sentence_strategy(), 1..4),
        tgt in sentence_strategy(),
        with_spans in proptest::bool::ANY,
    ) {
        let labels = label_set();
        let example = build_multisource_input(
            &sources,
            tgt.tokens(),
            if with_spans { Some(tgt.spans()) } else { None },
            "tir",
            &labels,
            MarkerStyle::Xml,
        )
        .unwrap();

        let expected_len: usize = sources
            .iter()
            .map(|s| s.len() + 2 * s.spans().len())
            .sum::<usize>()
            + sources.len()
            + tgt.len();
        prop_assert_eq!(example.tokens().len(), expected_len);

        let separators = example.tokens().iter().filter(|t| *t == SEPARATOR_TOKEN).count();
        prop_assert_eq!(separators, sources.len());

        let target_start = *example.segment_starts().last().unwrap();
        for (index, flag) in example.mask().iter().enumerate() {
            prop_assert_eq!(*flag, index >= target_start);
            match &example.tags()[index] {
                TargetTag::Ignore => prop_assert!(!*flag),
                TargetTag::Bio(_) => prop_assert!(*flag),
            }
        }
        prop_assert_eq!(example.target_tokens(), tgt.tokens());
    }

    #[test]
    fn self_score_is_perfect_or_empty(sentences in proptest::collection::vec(sentence_strategy(), 1..6)) {
        let doc = Document::new("d", label_set(), sentences).unwrap();
        let report = score(&doc, &doc).unwrap();
        let has_spans = doc.sentences().iter().any(|s| !s.spans().is_empty());
        if has_spans {
            prop_assert_eq!(report.micro.f1, 1.0);
        } else {
            prop_assert_eq!(report.micro.f1, 0.0);
            prop_assert_eq!(report.micro.gold_count, 0);
        }
    }
}
