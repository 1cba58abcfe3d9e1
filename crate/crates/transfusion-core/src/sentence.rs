//! Tokenized sentences, entity spans and documents.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::label::LabelSet;

/// A typed, token-indexed, half-open entity span: `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntitySpan {
    pub label: String,
    pub start: usize,
    pub end: usize,
}

impl PartialOrd for EntitySpan {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EntitySpan {
    /// Positional order: start, then end, then label.
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.start
            .cmp(&other.start)
            .then(self.end.cmp(&other.end))
            .then(self.label.cmp(&other.label))
    }
}

impl EntitySpan {
    pub fn new(label: impl Into<String>, start: usize, end: usize) -> Result<Self, SentenceError> {
        if start >= end {
            return Err(SentenceError::EmptySpan { start, end });
        }
        Ok(EntitySpan { label: label.into(), start, end })
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &EntitySpan) -> bool {
        self.start < other.end && other.start < self.end
    }
}

impl fmt::Display for EntitySpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.label, self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SentenceError {
    EmptySpan { start: usize, end: usize },
    EmptyToken { index: usize },
    TokenWithWhitespace { index: usize, token: String },
    SpanOutOfBounds { span: EntitySpan, token_count: usize },
    OverlappingSpans { first: EntitySpan, second: EntitySpan },
    UnknownLabel { label: String },
}

impl fmt::Display for SentenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SentenceError::EmptySpan { start, end } => {
                write!(f, "span [{start}, {end}) is empty or inverted")
            }
            SentenceError::EmptyToken { index } => write!(f, "token {index} is empty"),
            SentenceError::TokenWithWhitespace { index, token } => {
                write!(f, "token {index} contains whitespace: {token:?}")
            }
            SentenceError::SpanOutOfBounds { span, token_count } => {
                write!(f, "span {span} exceeds sentence length {token_count}")
            }
            SentenceError::OverlappingSpans { first, second } => {
                write!(f, "spans {first} and {second} overlap")
            }
            SentenceError::UnknownLabel { label } => {
                write!(f, "label {label:?} is not in the label set")
            }
        }
    }
}

impl core::error::Error for SentenceError {}

/// A whitespace-tokenized sentence with non-overlapping entity spans,
/// ordered by start position, and a language code (opaque string, e.g.
/// `eng` or NLLB-style `tir_Ethi`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<String>,
    spans: Vec<EntitySpan>,
    language: String,
}

impl Sentence {
    /// Validates tokens and spans; spans are sorted by start position.
    pub fn new(
        tokens: Vec<String>,
        spans: Vec<EntitySpan>,
        language: impl Into<String>,
    ) -> Result<Self, SentenceError> {
        for (index, token) in tokens.iter().enumerate() {
            if token.is_empty() {
                return Err(SentenceError::EmptyToken { index });
            }
            if token.chars().any(char::is_whitespace) {
                return Err(SentenceError::TokenWithWhitespace { index, token: token.clone() });
            }
        }
        let mut spans = spans;
        spans.sort();
        for pair in spans.windows(2) {
            if pair[1].start < pair[0].end {
                return Err(SentenceError::OverlappingSpans {
                    first: pair[0].clone(),
                    second: pair[1].clone(),
                });
            }
        }
        for span in &spans {
            if span.start >= span.end {
                return Err(SentenceError::EmptySpan { start: span.start, end: span.end });
            }
            if span.end > tokens.len() {
                return Err(SentenceError::SpanOutOfBounds {
                    span: span.clone(),
                    token_count: tokens.len(),
                });
            }
        }
        Ok(Sentence { tokens, spans, language: language.into() })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn spans(&self) -> &[EntitySpan] {
        &self.spans
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    /// Token count.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Same tokens and spans under a different language code.
    pub fn with_language(mut self, language: impl Into<String>) -> Self {
        self.language = language.into();
        self
    }

    /// Same tokens and language with a replacement span set.
    pub fn with_spans(&self, spans: Vec<EntitySpan>) -> Result<Self, SentenceError> {
        Sentence::new(self.tokens.clone(), spans, self.language.clone())
    }

    /// Checks every span label against a governing label set.
    pub fn check_labels(&self, labels: &LabelSet) -> Result<(), SentenceError> {
        for span in &self.spans {
            if !labels.contains(&span.label) {
                return Err(SentenceError::UnknownLabel { label: span.label.clone() });
            }
        }
        Ok(())
    }

    /// Tokens joined by single spaces.
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

/// An ordered collection of sentences with a governing label set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    source_name: String,
    labels: LabelSet,
    sentences: Vec<Sentence>,
}

impl Document {
    /// Builds a document, checking every sentence against `labels`.
    pub fn new(
        source_name: impl Into<String>,
        labels: LabelSet,
        sentences: Vec<Sentence>,
    ) -> Result<Self, SentenceError> {
        for sentence in &sentences {
            sentence.check_labels(&labels)?;
        }
        Ok(Document { source_name: source_name.into(), labels, sentences })
    }

    /// Builds a document whose label set is inferred from the spans, in
    /// order of first appearance.
    pub fn from_sentences(
        source_name: impl Into<String>,
        sentences: Vec<Sentence>,
    ) -> Result<Self, crate::label::LabelError> {
        let mut names: Vec<String> = Vec::new();
        for sentence in &sentences {
            for span in sentence.spans() {
                if !names.iter().any(|n| n == &span.label) {
                    names.push(span.label.clone());
                }
            }
        }
        let labels = LabelSet::new(names)?;
        Ok(Document { source_name: source_name.into(), labels, sentences })
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    /// Sentence count.
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Language code of the first sentence, if any.
    pub fn language(&self) -> Option<&str> {
        self.sentences.first().map(Sentence::language)
    }

    /// Stamps every sentence with the given language code.
    pub fn with_language(mut self, language: &str) -> Self {
        for sentence in &mut self.sentences {
            sentence.language = language.to_string();
        }
        self
    }
}
