//! Inline entity-marker codec.
//!
//! Spans travel through a translation system as standalone
//! whitespace-delimited marker tokens around the entity, e.g.
//! `x1 x2 <PER> x3 x4 </PER> x5`. Markers are balanced and non-nested in
//! codec output; translated text coming back is under no such guarantee,
//! which is what [`ParseMode::Lenient`] and [`markers_consistent`] deal
//! with.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::label::LabelSet;
use crate::sentence::{EntitySpan, Sentence};

/// Marker bracket style. Both styles mark an entity of type `L` with an
/// opening `L` unit before its first token and a closing `/L` unit after
/// its last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MarkerStyle {
    /// `<PER> ... </PER>`
    #[default]
    Xml,
    /// `[PER] ... [/PER]`
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MarkerKind {
    Open,
    Close,
}

impl MarkerStyle {
    fn open(&self, label: &str) -> String {
        match self {
            MarkerStyle::Xml => alloc::format!("<{label}>"),
            MarkerStyle::Square => alloc::format!("[{label}]"),
        }
    }

    fn close(&self, label: &str) -> String {
        match self {
            MarkerStyle::Xml => alloc::format!("</{label}>"),
            MarkerStyle::Square => alloc::format!("[/{label}]"),
        }
    }

    /// Splits a whitespace unit into marker kind and label text, if it is
    /// shaped like a marker of this style. The label is not checked
    /// against any label set here.
    fn classify<'a>(&self, unit: &'a str) -> Option<(MarkerKind, &'a str)> {
        let (prefix, suffix) = match self {
            MarkerStyle::Xml => ('<', '>'),
            MarkerStyle::Square => ('[', ']'),
        };
        let inner = unit.strip_prefix(prefix)?.strip_suffix(suffix)?;
        let (kind, label) = match inner.strip_prefix('/') {
            Some(label) => (MarkerKind::Close, label),
            None => (MarkerKind::Open, inner),
        };
        if label.is_empty() || label.contains(prefix) || label.contains(suffix) {
            return None;
        }
        Some((kind, label))
    }
}

/// Text carrying inline entity markers, together with the label set and
/// bracket style it was produced under.
///
/// Values built by [`insert_markers`] always have balanced, non-nested
/// markers; [`MarkedText::from_raw`] wraps untrusted translator output,
/// for which only lenient parsing and [`markers_consistent`] are
/// meaningful.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedText {
    text: String,
    labels: LabelSet,
    style: MarkerStyle,
}

impl MarkedText {
    pub fn from_raw(text: impl Into<String>, labels: LabelSet, style: MarkerStyle) -> Self {
        MarkedText { text: text.into(), labels, style }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn style(&self) -> MarkerStyle {
        self.style
    }
}

impl fmt::Display for MarkedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// How to treat structurally broken markers when parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Reject unbalanced, nested, unknown-label and empty markers.
    #[default]
    Strict,
    /// Never fail: drop broken markers, keep the text.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarkerError {
    /// Marker-shaped unit whose label is not in the label set.
    UnknownLabel { unit: String },
    /// Opening marker while another entity is still open.
    Nested { open: String, next: String },
    /// Closing marker without a matching open marker.
    UnmatchedClose { label: String },
    /// Closing marker label differs from the open one.
    MismatchedClose { open: String, close: String },
    /// Opening marker never closed.
    UnmatchedOpen { label: String },
    /// Opening marker immediately followed by its closing marker.
    EmptySpan { label: String },
}

impl fmt::Display for MarkerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarkerError::UnknownLabel { unit } => write!(f, "unknown marker label in {unit:?}"),
            MarkerError::Nested { open, next } => {
                write!(f, "marker <{next}> opened while <{open}> is still open")
            }
            MarkerError::UnmatchedClose { label } => write!(f, "unmatched closing marker </{label}>"),
            MarkerError::MismatchedClose { open, close } => {
                write!(f, "closing marker </{close}> does not match open marker <{open}>")
            }
            MarkerError::UnmatchedOpen { label } => write!(f, "marker <{label}> is never closed"),
            MarkerError::EmptySpan { label } => write!(f, "marker pair <{label}></{label}> brackets no tokens"),
        }
    }
}

impl core::error::Error for MarkerError {}

/// Wraps each entity span in opening/closing marker units and joins
/// everything with single spaces.
///
/// The sentence's span labels must belong to `labels`; the output then
/// satisfies every [`MarkedText`] invariant and strict [`parse_markers`]
/// recovers the sentence exactly.
pub fn insert_markers(sentence: &Sentence, labels: &LabelSet, style: MarkerStyle) -> MarkedText {
    let mut units: Vec<String> = Vec::with_capacity(sentence.len() + 2 * sentence.spans().len());
    let mut spans = sentence.spans().iter().peekable();
    let mut closing: Option<&EntitySpan> = None;
    for (index, token) in sentence.tokens().iter().enumerate() {
        if let Some(span) = closing {
            if span.end == index {
                units.push(style.close(&span.label));
                closing = None;
            }
        }
        if let Some(span) = spans.peek() {
            if span.start == index {
                units.push(style.open(&span.label));
                closing = Some(spans.next().unwrap());
            }
        }
        units.push(token.clone());
    }
    if let Some(span) = closing {
        units.push(style.close(&span.label));
    }
    MarkedText { text: units.join(" "), labels: labels.clone(), style }
}

/// Recovers clean tokens and entity spans from marked text.
///
/// The input is tokenized on whitespace. Every unit shaped like a marker
/// of the given style whose label belongs to `labels` is treated as
/// markup and removed from the token stream; everything else is a token.
/// Lenient mode never fails: a second opening marker discards the
/// earlier unclosed one, stray or mismatched closing markers are
/// discarded, a pair bracketing no tokens yields no span, and an
/// unclosed trailing marker is dropped.
pub fn parse_markers(
    marked: &str,
    labels: &LabelSet,
    style: MarkerStyle,
    mode: ParseMode,
    language: &str,
) -> Result<Sentence, MarkerError> {
    let mut tokens: Vec<String> = Vec::new();
    let mut spans: Vec<EntitySpan> = Vec::new();
    let mut open: Option<(String, usize)> = None;

    for unit in marked.split_whitespace() {
        match style.classify(unit) {
            Some((kind, label)) if labels.contains(label) => {
                let label = label.to_owned();
                match kind {
                    MarkerKind::Open => {
                        if mode == ParseMode::Strict {
                            if let Some((current, _)) = &open {
                                return Err(MarkerError::Nested {
                                    open: current.clone(),
                                    next: label,
                                });
                            }
                        }
                        // Lenient: a new open discards any pending one.
                        open = Some((label, tokens.len()));
                    }
                    MarkerKind::Close => match open.take() {
                        None => {
                            if mode == ParseMode::Strict {
                                return Err(MarkerError::UnmatchedClose { label });
                            }
                        }
                        Some((current, start)) => {
                            if current != label {
                                if mode == ParseMode::Strict {
                                    return Err(MarkerError::MismatchedClose {
                                        open: current,
                                        close: label,
                                    });
                                }
                                // Stray close; keep waiting for the real one.
                                open = Some((current, start));
                            } else if start == tokens.len() {
                                if mode == ParseMode::Strict {
                                    return Err(MarkerError::EmptySpan { label });
                                }
                            } else {
                                spans.push(EntitySpan { label: current, start, end: tokens.len() });
                            }
                        }
                    },
                }
            }
            // Marker-shaped but outside the label set: a token in
            // lenient mode, an error in strict mode.
            Some(_) if mode == ParseMode::Strict => {
                return Err(MarkerError::UnknownLabel { unit: unit.to_owned() });
            }
            _ => tokens.push(unit.to_owned()),
        }
    }
    if let Some((label, _)) = open {
        if mode == ParseMode::Strict {
            return Err(MarkerError::UnmatchedOpen { label });
        }
    }

    // Tokens come from split_whitespace and spans close in strictly
    // increasing positions, so this cannot fail.
    Ok(Sentence::new(tokens, spans, language).expect("recovered sentence is structurally valid"))
}

fn label_multiset(marked: &MarkedText) -> BTreeMap<String, usize> {
    let sentence = parse_markers(
        marked.text(),
        marked.labels(),
        marked.style(),
        ParseMode::Lenient,
        "",
    )
    .expect("lenient parse is total");
    let mut counts = BTreeMap::new();
    for span in sentence.spans() {
        *counts.entry(span.label.clone()).or_insert(0usize) += 1;
    }
    counts
}

/// True iff the multiset of entity labels recoverable from `after`
/// equals that of `before`. Order is deliberately ignored: translators
/// legitimately reorder entities.
pub fn markers_consistent(before: &MarkedText, after: &MarkedText) -> bool {
    label_multiset(before) == label_multiset(after)
}
