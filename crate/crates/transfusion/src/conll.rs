//! CoNLL-style column file parsing, serialization and label remapping.
//!
//! Input columns are whitespace-separated, sentences are separated by
//! blank lines, `-DOCSTART-` document markers are skipped, and both LF
//! and CRLF line endings (plus a leading BOM) are accepted. Output is
//! always two-column `token tag` with LF endings.

use std::collections::BTreeMap;

use thiserror::Error;
use transfusion_core::label::{LabelError, LabelSet};
use transfusion_core::sentence::{Document, Sentence, SentenceError};
use transfusion_core::tags::{spans_to_tags, tags_to_spans, BioTag, DecodeMode, TagError, TagSequence};

/// Which column carries the NER tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TagColumn {
    /// The last column of each row — covers both 4-column CoNLL03 and
    /// 2-column MasakhaNER-style releases.
    #[default]
    Last,
    Index(usize),
}

/// Column layout of the input file. The default reads tokens from
/// column 0 and tags from the last column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConllColumns {
    pub token: usize,
    pub tag: TagColumn,
}

#[derive(Debug, Error)]
pub enum ConllError {
    #[error("line {line}: expected at least {needed} columns, found {found}")]
    TooFewColumns { line: usize, needed: usize, found: usize },
    #[error("line {line}: {source}")]
    Tag { line: usize, source: TagError },
    #[error("invalid label inventory: {0}")]
    Labels(#[from] LabelError),
    #[error("sentence {sentence}: {source}")]
    Decode { sentence: usize, source: TagError },
    #[error("sentence {sentence}: {source}")]
    Sentence { sentence: usize, source: SentenceError },
}

/// Parses CoNLL column text into a document whose label set is inferred
/// from the tags, in order of first appearance. Tags are decoded in
/// repair mode, which normalizes IOB1-style input to IOB2. Sentences
/// keep the language code `und` until the caller stamps one.
pub fn parse_conll(
    text: &str,
    columns: &ConllColumns,
    source_name: &str,
) -> Result<Document, ConllError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);

    let mut blocks: Vec<(Vec<String>, Vec<BioTag>)> = Vec::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut tags: Vec<BioTag> = Vec::new();
    let mut label_names: Vec<String> = Vec::new();

    for (line_index, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !tokens.is_empty() {
                blocks.push((std::mem::take(&mut tokens), std::mem::take(&mut tags)));
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.first() == Some(&"-DOCSTART-") {
            continue;
        }
        let tag_index = match columns.tag {
            TagColumn::Last => fields.len().saturating_sub(1),
            TagColumn::Index(index) => index,
        };
        let needed = match columns.tag {
            TagColumn::Last => columns.token + 2,
            TagColumn::Index(index) => columns.token.max(index) + 1,
        };
        if fields.len() < needed || tag_index == columns.token {
            return Err(ConllError::TooFewColumns {
                line: line_index + 1,
                needed,
                found: fields.len(),
            });
        }
        let tag: BioTag = fields[tag_index]
            .parse()
            .map_err(|source| ConllError::Tag { line: line_index + 1, source })?;
        if let Some(label) = tag.label() {
            if !label_names.iter().any(|n| n == label) {
                label_names.push(label.to_string());
            }
        }
        tokens.push(fields[columns.token].to_string());
        tags.push(tag);
    }
    if !tokens.is_empty() {
        blocks.push((tokens, tags));
    }

    let labels = LabelSet::new(label_names)?;
    let mut sentences = Vec::with_capacity(blocks.len());
    for (index, (tokens, tags)) in blocks.into_iter().enumerate() {
        let spans = tags_to_spans(&TagSequence::new(tags), &labels, DecodeMode::Repair)
            .map_err(|source| ConllError::Decode { sentence: index, source })?;
        let sentence = Sentence::new(tokens, spans, "und")
            .map_err(|source| ConllError::Sentence { sentence: index, source })?;
        sentences.push(sentence);
    }
    Ok(Document::new(source_name, labels, sentences).expect("labels were inferred from the tags"))
}

/// Serializes a document as two-column `token tag` text, one blank line
/// after every sentence.
pub fn serialize_conll(doc: &Document) -> String {
    let mut out = String::new();
    for sentence in doc.sentences() {
        let tags = spans_to_tags(sentence.spans(), sentence.len())
            .expect("document sentences carry valid spans");
        for (token, tag) in sentence.tokens().iter().zip(tags.iter()) {
            out.push_str(token);
            out.push(' ');
            out.push_str(&tag.to_string());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// A dataset-specific label rewrite: drop an entity type entirely, or
/// merge it into another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RemapRule {
    Drop { from: String },
    Merge { from: String, to: String },
}

impl RemapRule {
    pub fn drop(from: impl Into<String>) -> Self {
        RemapRule::Drop { from: from.into() }
    }

    pub fn merge(from: impl Into<String>, to: impl Into<String>) -> Self {
        RemapRule::Merge { from: from.into(), to: to.into() }
    }

    fn from_label(&self) -> &str {
        match self {
            RemapRule::Drop { from } | RemapRule::Merge { from, .. } => from,
        }
    }
}

#[derive(Debug, Error)]
pub enum RemapError {
    #[error("remap rule references unknown label {0:?}")]
    UnknownLabel(String),
    #[error("invalid remapped label inventory: {0}")]
    Labels(#[from] LabelError),
}

/// Applies remap rules to every span of the document. Only labels and
/// span presence change: token content and span boundaries are kept, and
/// adjacent spans that end up with the same label are not fused.
pub fn remap_labels(doc: &Document, rules: &[RemapRule]) -> Result<Document, RemapError> {
    let mut mapping: BTreeMap<&str, Option<&str>> = BTreeMap::new();
    for rule in rules {
        if !doc.labels().contains(rule.from_label()) {
            return Err(RemapError::UnknownLabel(rule.from_label().to_string()));
        }
        match rule {
            RemapRule::Drop { from } => mapping.insert(from.as_str(), None),
            RemapRule::Merge { from, to } => mapping.insert(from.as_str(), Some(to.as_str())),
        };
    }

    let mut names: Vec<String> = Vec::new();
    for name in doc.labels().iter() {
        let target = match mapping.get(name) {
            Some(None) => continue,
            Some(Some(to)) => (*to).to_string(),
            None => name.to_string(),
        };
        if !names.iter().any(|n| n == &target) {
            names.push(target);
        }
    }
    let labels = LabelSet::new(names)?;

    let sentences = doc
        .sentences()
        .iter()
        .map(|sentence| {
            let spans = sentence
                .spans()
                .iter()
                .filter_map(|span| match mapping.get(span.label.as_str()) {
                    Some(None) => None,
                    Some(Some(to)) => {
                        let mut span = span.clone();
                        span.label = (*to).to_string();
                        Some(span)
                    }
                    None => Some(span.clone()),
                })
                .collect();
            sentence.with_spans(spans).expect("remapping preserves extents")
        })
        .collect();

    Ok(Document::new(doc.source_name(), labels, sentences)
        .expect("remapped labels stay within the remapped inventory"))
}
