//! JSONL record types: fused examples, rejection audit entries and
//! rendered prompts. One JSON object per line, UTF-8, LF endings.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use transfusion_core::fusion::{FusionError, FusionExample, TargetTag};
use transfusion_core::tags::TagError;

/// Wire form of a [`FusionExample`]. `segments` lists the start index of
/// every segment in `tokens`; the entry order, like the field names, is
/// part of the format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionRecord {
    pub tokens: Vec<String>,
    pub tags: Vec<String>,
    pub mask: Vec<u8>,
    pub segments: Vec<usize>,
    pub src_lang: String,
    pub tgt_lang: String,
}

impl From<&FusionExample> for FusionRecord {
    fn from(example: &FusionExample) -> Self {
        FusionRecord {
            tokens: example.tokens().to_vec(),
            tags: example.tags().iter().map(|t| t.to_string()).collect(),
            mask: example.mask().iter().map(|m| u8::from(*m)).collect(),
            segments: example.segment_starts().to_vec(),
            src_lang: example.src_lang().to_string(),
            tgt_lang: example.tgt_lang().to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: {source}")]
    Tag { line: usize, source: TagError },
    #[error("line {line}: {source}")]
    Fusion { line: usize, source: FusionError },
    #[error("line {line}: mask entries must be 0 or 1, found {value}")]
    BadMask { line: usize, value: u8 },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl FusionRecord {
    pub fn into_example(self, line: usize) -> Result<FusionExample, JsonlError> {
        let tags = self
            .tags
            .iter()
            .map(|t| TargetTag::parse(t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|source| JsonlError::Tag { line, source })?;
        let mask = self
            .mask
            .into_iter()
            .map(|m| match m {
                0 => Ok(false),
                1 => Ok(true),
                value => Err(JsonlError::BadMask { line, value }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        FusionExample::from_parts(self.tokens, tags, mask, self.segments, self.src_lang, self.tgt_lang)
            .map_err(|source| JsonlError::Fusion { line, source })
    }
}

/// One skipped sentence in a projection run: input sentence index plus
/// the rejection reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionRecord {
    pub index: usize,
    pub reason: String,
}

/// One rendered prompt, keyed by input sentence index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub id: usize,
    pub prompt: String,
}

/// One tagged English sentence, as consumed by the self-fusion prompt
/// builder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedSentenceRecord {
    pub tokens: Vec<String>,
    pub tags: Vec<String>,
}

/// One candidate annotation: entity label plus surface string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionEntry {
    pub label: String,
    pub surface: String,
}

/// Inputs for one selection prompt: the English translation plus the two
/// candidate annotation sets to choose between.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub english: String,
    pub option1: Vec<OptionEntry>,
    pub option2: Vec<OptionEntry>,
}

pub fn write_jsonl<W: Write, T: Serialize>(mut writer: W, records: &[T]) -> Result<(), JsonlError> {
    for record in records {
        let line = serde_json::to_string(record)
            .map_err(|source| JsonlError::Json { line: 0, source })?;
        writer.write_all(line.as_bytes())?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead, T: for<'de> Deserialize<'de>>(reader: R) -> Result<Vec<T>, JsonlError> {
    let mut records = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|source| JsonlError::Json { line: index + 1, source })?;
        records.push(record);
    }
    Ok(records)
}

/// Reads fused examples back from JSONL, re-checking every invariant.
pub fn read_fusion_jsonl<R: BufRead>(reader: R) -> Result<Vec<FusionExample>, JsonlError> {
    let records: Vec<FusionRecord> = read_jsonl(reader)?;
    records
        .into_iter()
        .enumerate()
        .map(|(index, record)| record.into_example(index + 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use transfusion_core::fusion::build_fusion_input;
    use transfusion_core::label::LabelSet;
    use transfusion_core::marker::MarkerStyle;
    use transfusion_core::sentence::{EntitySpan, Sentence};

    fn example() -> FusionExample {
        let labels = LabelSet::new(["PER"]).unwrap();
        let src = Sentence::new(
            vec!["John".into(), "ran".into()],
            vec![EntitySpan::new("PER", 0, 1).unwrap()],
            "eng",
        )
        .unwrap();
        let tgt: Vec<String> = vec!["jon".into(), "kuru".into()];
        build_fusion_input(&src, &tgt, None, "yor", &labels, MarkerStyle::Xml).unwrap()
    }

    #[test]
    fn record_roundtrips_through_jsonl() {
        let example = example();
        let mut buffer = Vec::new();
        write_jsonl(&mut buffer, &[FusionRecord::from(&example)]).unwrap();
        let restored = read_fusion_jsonl(buffer.as_slice()).unwrap();
        assert_eq!(restored, vec![example]);
    }

    #[test]
    fn record_line_has_expected_shape() {
        let mut buffer = Vec::new();
        write_jsonl(&mut buffer, &[FusionRecord::from(&example())]).unwrap();
        let line = String::from_utf8(buffer).unwrap();
        assert_eq!(
            line,
            "{\"tokens\":[\"<PER>\",\"John\",\"</PER>\",\"ran\",\"<X>\",\"jon\",\"kuru\"],\
             \"tags\":[\"IGN\",\"IGN\",\"IGN\",\"IGN\",\"IGN\",\"O\",\"O\"],\
             \"mask\":[0,0,0,0,0,1,1],\"segments\":[0,5],\
             \"src_lang\":\"eng\",\"tgt_lang\":\"yor\"}\n"
        );
    }

    #[test]
    fn corrupt_mask_value_is_rejected() {
        let mut record = FusionRecord::from(&example());
        record.mask[0] = 2;
        assert!(matches!(record.into_example(1), Err(JsonlError::BadMask { value: 2, .. })));
    }

    #[test]
    fn invariant_violations_are_rejected_on_read() {
        let mut record = FusionRecord::from(&example());
        record.tags[6] = "IGN".into();
        assert!(matches!(record.into_example(3), Err(JsonlError::Fusion { line: 3, .. })));
    }
}
