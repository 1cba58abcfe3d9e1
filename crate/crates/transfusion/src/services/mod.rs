//! Wire contracts for the external machine-translation, NER-tagging and
//! text-generation services, plus deterministic mock implementations.
//!
//! The HTTP protocol is JSON over POST with three endpoints relative to
//! a base URL:
//!
//! * `POST /translate` — [`TranslateRequest`] → `{"texts": [...]}`
//! * `POST /tag` — [`TagRequest`] → `{"tags": [["B-PER", ...], ...]}`
//! * `POST /generate` — [`GenerateRequest`] → `{"text": "..."}`
//!
//! Errors come back as `{"error": "..."}` with a non-2xx status. All
//! operations are order- and count-preserving over their batch.

mod http;
pub mod mock;

pub use http::{HttpServiceClient, RetryPolicy};

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use transfusion_core::tags::TagSequence;

/// Batch translation request. `preserve_markers` hints that the texts
/// carry inline entity markers the backend should keep intact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslateRequest {
    pub texts: Vec<String>,
    pub src_lang: String,
    pub tgt_lang: String,
    pub preserve_markers: bool,
}

impl TranslateRequest {
    pub fn validate(&self) -> Result<(), ServiceError> {
        if self.texts.is_empty() {
            return Err(ServiceError::InvalidRequest("no texts to translate".into()));
        }
        if let Some(index) = self.texts.iter().position(|t| t.is_empty()) {
            return Err(ServiceError::InvalidRequest(format!("text {index} is empty")));
        }
        if self.src_lang.is_empty() || self.tgt_lang.is_empty() {
            return Err(ServiceError::InvalidRequest("empty language code".into()));
        }
        Ok(())
    }
}

/// Batch tagging request; `label_set` names the entity types the backend
/// tagger was trained on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagRequest {
    pub sentences: Vec<Vec<String>>,
    pub language: String,
    pub label_set: Vec<String>,
}

impl TagRequest {
    pub fn validate(&self) -> Result<(), ServiceError> {
        if self.sentences.is_empty() {
            return Err(ServiceError::InvalidRequest("no sentences to tag".into()));
        }
        if let Some(index) = self.sentences.iter().position(|s| s.is_empty()) {
            return Err(ServiceError::InvalidRequest(format!("sentence {index} is empty")));
        }
        if self.language.is_empty() {
            return Err(ServiceError::InvalidRequest("empty language code".into()));
        }
        Ok(())
    }
}

/// Single-prompt text generation request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateRequest {
    pub prompt: String,
    pub temperature: f64,
}

impl GenerateRequest {
    pub fn validate(&self) -> Result<(), ServiceError> {
        if self.prompt.is_empty() {
            return Err(ServiceError::InvalidRequest("empty prompt".into()));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(ServiceError::InvalidRequest(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("unsupported language pair {src}->{tgt}")]
    UnsupportedPair { src: String, tgt: String },
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("backend error: {0}")]
    Backend(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("no canned response registered for the prompt")]
    NoCannedResponse,
    #[error("no gold annotation for sentence {0:?}")]
    GoldMiss(String),
}

#[async_trait]
pub trait Translator: Send + Sync {
    /// Translates a batch; returns one output per input, in order.
    async fn translate(&self, req: &TranslateRequest) -> Result<Vec<String>, ServiceError>;
}

#[async_trait]
pub trait Tagger: Send + Sync {
    /// Tags a batch of token sequences; each returned sequence is
    /// length-matched to its input sentence.
    async fn tag(&self, req: &TagRequest) -> Result<Vec<TagSequence>, ServiceError>;
}

#[async_trait]
pub trait Generator: Send + Sync {
    async fn generate(&self, req: &GenerateRequest) -> Result<String, ServiceError>;
}
