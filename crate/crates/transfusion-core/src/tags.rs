//! BIO (IOB2) tag codec.
//!
//! The canonical internal form is IOB2: the first token of every entity
//! carries `B-`, continuations carry `I-`. IOB1-style input, where an
//! entity may open with `I-`, decodes correctly under
//! [`DecodeMode::Repair`], so ingest paths normalize by decoding in
//! repair mode and re-encoding.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::label::LabelSet;
use crate::sentence::EntitySpan;

/// One token-level tag: `O`, `B-<label>` or `I-<label>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BioTag {
    Outside,
    Begin(String),
    Inside(String),
}

impl BioTag {
    pub fn label(&self) -> Option<&str> {
        match self {
            BioTag::Outside => None,
            BioTag::Begin(label) | BioTag::Inside(label) => Some(label),
        }
    }
}

impl FromStr for BioTag {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self, TagError> {
        if s == "O" {
            return Ok(BioTag::Outside);
        }
        match s.split_once('-') {
            Some(("B", label)) if !label.is_empty() => Ok(BioTag::Begin(label.to_string())),
            Some(("I", label)) if !label.is_empty() => Ok(BioTag::Inside(label.to_string())),
            _ => Err(TagError::Malformed(s.to_string())),
        }
    }
}

impl fmt::Display for BioTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BioTag::Outside => f.write_str("O"),
            BioTag::Begin(label) => write!(f, "B-{label}"),
            BioTag::Inside(label) => write!(f, "I-{label}"),
        }
    }
}

/// A sentence-length sequence of [`BioTag`]s.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TagSequence(Vec<BioTag>);

impl TagSequence {
    pub fn new(tags: Vec<BioTag>) -> Self {
        TagSequence(tags)
    }

    /// Parses tag strings, failing on anything that is not `O`, `B-...`
    /// or `I-...`.
    pub fn parse<I, S>(tags: I) -> Result<Self, TagError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        tags.into_iter()
            .map(|t| t.as_ref().parse())
            .collect::<Result<Vec<_>, _>>()
            .map(TagSequence)
    }

    pub fn tags(&self) -> &[BioTag] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, BioTag> {
        self.0.iter()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(|t| t.to_string()).collect()
    }
}

impl From<Vec<BioTag>> for TagSequence {
    fn from(tags: Vec<BioTag>) -> Self {
        TagSequence(tags)
    }
}

impl IntoIterator for TagSequence {
    type Item = BioTag;
    type IntoIter = alloc::vec::IntoIter<BioTag>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// How to treat an `I-X` tag with no valid predecessor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeMode {
    /// Fail on any `I-X` not preceded by `B-X` or `I-X`.
    Strict,
    /// Promote an orphan `I-X` to `B-X` (the conlleval convention); a
    /// label change inside an `I-` run closes the open span.
    Repair,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TagError {
    /// Not `O`, `B-<label>` or `I-<label>`.
    Malformed(String),
    /// Tag label not in the governing label set.
    UnknownLabel(String),
    /// Strict decode hit an `I-X` without a `B-X`/`I-X` predecessor.
    OrphanInside { index: usize, label: String },
    /// Encoding input span exceeds the sequence length.
    SpanOutOfBounds { span: EntitySpan, len: usize },
    /// Encoding input spans overlap.
    OverlappingSpans { first: EntitySpan, second: EntitySpan },
}

impl fmt::Display for TagError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TagError::Malformed(tag) => write!(f, "malformed tag {tag:?}"),
            TagError::UnknownLabel(label) => write!(f, "tag label {label:?} is not in the label set"),
            TagError::OrphanInside { index, label } => {
                write!(f, "I-{label} at position {index} has no B-{label}/I-{label} predecessor")
            }
            TagError::SpanOutOfBounds { span, len } => {
                write!(f, "span {span} exceeds tag sequence length {len}")
            }
            TagError::OverlappingSpans { first, second } => {
                write!(f, "spans {first} and {second} overlap")
            }
        }
    }
}

impl core::error::Error for TagError {}

/// Decodes a tag sequence into maximal contiguous entity spans.
pub fn tags_to_spans(
    tags: &TagSequence,
    labels: &LabelSet,
    mode: DecodeMode,
) -> Result<Vec<EntitySpan>, TagError> {
    let mut spans = Vec::new();
    let mut open: Option<(String, usize)> = None;

    let close = |open: &mut Option<(String, usize)>, end: usize, spans: &mut Vec<EntitySpan>| {
        if let Some((label, start)) = open.take() {
            spans.push(EntitySpan { label, start, end });
        }
    };

    for (index, tag) in tags.iter().enumerate() {
        if let Some(label) = tag.label() {
            if !labels.contains(label) {
                return Err(TagError::UnknownLabel(label.to_string()));
            }
        }
        match tag {
            BioTag::Outside => close(&mut open, index, &mut spans),
            BioTag::Begin(label) => {
                close(&mut open, index, &mut spans);
                open = Some((label.clone(), index));
            }
            BioTag::Inside(label) => match &open {
                Some((current, _)) if current == label => {}
                _ => match mode {
                    DecodeMode::Strict => {
                        return Err(TagError::OrphanInside { index, label: label.clone() })
                    }
                    DecodeMode::Repair => {
                        close(&mut open, index, &mut spans);
                        open = Some((label.clone(), index));
                    }
                },
            },
        }
    }
    close(&mut open, tags.len(), &mut spans);
    Ok(spans)
}

/// Encodes spans as an IOB2 tag sequence of the given length; exact
/// inverse of [`tags_to_spans`] in strict mode.
pub fn spans_to_tags(spans: &[EntitySpan], len: usize) -> Result<TagSequence, TagError> {
    let mut sorted: Vec<&EntitySpan> = spans.iter().collect();
    sorted.sort();
    for pair in sorted.windows(2) {
        if pair[1].start < pair[0].end {
            return Err(TagError::OverlappingSpans {
                first: pair[0].clone(),
                second: pair[1].clone(),
            });
        }
    }
    let mut tags = vec![BioTag::Outside; len];
    for span in sorted {
        if span.start >= span.end || span.end > len {
            return Err(TagError::SpanOutOfBounds { span: span.clone(), len });
        }
        tags[span.start] = BioTag::Begin(span.label.clone());
        for tag in tags.iter_mut().take(span.end).skip(span.start + 1) {
            *tag = BioTag::Inside(span.label.clone());
        }
    }
    Ok(TagSequence(tags))
}
