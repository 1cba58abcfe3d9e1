//! Endpoint resolution: turns a configured endpoint string into a live
//! service client.
//!
//! `http://` and `https://` endpoints get the JSON protocol client. The
//! `mock:` scheme selects an in-process deterministic backend, which is
//! how pipelines run hermetically in tests and dry runs:
//!
//! * `mock://identity` — echo translator
//! * `mock://dictionary?seed=7&reverse=true` — bijective pseudo-translator
//! * `mock://corrupt?period=5` — identity translator that mangles markers
//!   in a deterministic subset of inputs
//! * `mock://oracle?gold=PATH.conll` — tagger replaying gold annotations
//! * `mock://noisy?gold=PATH.conll&flip=0.2&seed=42` — oracle with seeded
//!   label noise
//! * `mock://canned?replies=PATH.json` — generator with a prompt→reply map
//!
//! Mock URLs omitting `seed` fall back to the run-level seed.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::conll::{parse_conll, ConllColumns, ConllError};
use crate::services::mock::{
    CannedGenerator, CorruptingTranslator, DictionaryTranslator, IdentityTranslator, NoisyTagger,
    OracleTagger,
};
use crate::services::{Generator, HttpServiceClient, Tagger, Translator};

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("unknown mock backend {kind:?} in {endpoint:?}")]
    UnknownMock { endpoint: String, kind: String },
    #[error("mock endpoint {endpoint:?} is missing parameter {param:?}")]
    MissingParam { endpoint: String, param: &'static str },
    #[error("mock endpoint {endpoint:?}: bad value for {param:?}: {value:?}")]
    BadParam { endpoint: String, param: &'static str, value: String },
    #[error("cannot read {path:?}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("gold file {path:?}: {source}")]
    Gold { path: String, source: ConllError },
    #[error("replies file {path:?}: {source}")]
    Replies { path: String, source: serde_json::Error },
    #[error("endpoint {0:?} has an unsupported scheme (expected http, https or mock)")]
    Scheme(String),
}

/// Options applied to HTTP backends; mocks ignore them.
#[derive(Debug, Clone, Default)]
pub struct HttpOptions {
    pub bearer_token: Option<String>,
}

struct MockUrl<'a> {
    endpoint: &'a str,
    kind: &'a str,
    params: BTreeMap<&'a str, &'a str>,
}

impl<'a> MockUrl<'a> {
    fn parse(endpoint: &'a str) -> Option<Self> {
        let rest = endpoint.strip_prefix("mock://")?;
        let (kind, query) = rest.split_once('?').unwrap_or((rest, ""));
        let params = query
            .split('&')
            .filter(|pair| !pair.is_empty())
            .filter_map(|pair| pair.split_once('='))
            .collect();
        Some(MockUrl { endpoint, kind, params })
    }

    fn required(&self, param: &'static str) -> Result<&'a str, BackendError> {
        self.params.get(param).copied().ok_or_else(|| BackendError::MissingParam {
            endpoint: self.endpoint.to_string(),
            param,
        })
    }

    fn parsed<T: std::str::FromStr>(
        &self,
        param: &'static str,
        default: T,
    ) -> Result<T, BackendError> {
        match self.params.get(param) {
            None => Ok(default),
            Some(value) => value.parse().map_err(|_| BackendError::BadParam {
                endpoint: self.endpoint.to_string(),
                param,
                value: (*value).to_string(),
            }),
        }
    }

    fn unknown(&self) -> BackendError {
        BackendError::UnknownMock {
            endpoint: self.endpoint.to_string(),
            kind: self.kind.to_string(),
        }
    }
}

fn http_client(endpoint: &str, opts: &HttpOptions) -> Result<HttpServiceClient, BackendError> {
    if !endpoint.starts_with("http://") && !endpoint.starts_with("https://") {
        return Err(BackendError::Scheme(endpoint.to_string()));
    }
    Ok(HttpServiceClient::new(endpoint).with_bearer_token(opts.bearer_token.clone()))
}

fn load_gold(mock: &MockUrl<'_>) -> Result<transfusion_core::sentence::Document, BackendError> {
    let path = mock.required("gold")?;
    let text = std::fs::read_to_string(Path::new(path))
        .map_err(|source| BackendError::Read { path: path.to_string(), source })?;
    parse_conll(&text, &ConllColumns::default(), path)
        .map_err(|source| BackendError::Gold { path: path.to_string(), source })
}

pub fn make_translator(
    endpoint: &str,
    default_seed: u64,
    opts: &HttpOptions,
) -> Result<Box<dyn Translator>, BackendError> {
    let Some(mock) = MockUrl::parse(endpoint) else {
        return Ok(Box::new(http_client(endpoint, opts)?));
    };
    match mock.kind {
        "identity" => Ok(Box::new(IdentityTranslator)),
        "dictionary" => {
            let seed = mock.parsed("seed", default_seed)?;
            let reverse = mock.parsed("reverse", false)?;
            Ok(Box::new(DictionaryTranslator::new(seed, reverse)))
        }
        "corrupt" => {
            let period = mock.parsed("period", 1u64)?;
            Ok(Box::new(CorruptingTranslator::new(period)))
        }
        _ => Err(mock.unknown()),
    }
}

pub fn make_tagger(
    endpoint: &str,
    default_seed: u64,
    opts: &HttpOptions,
) -> Result<Box<dyn Tagger>, BackendError> {
    let Some(mock) = MockUrl::parse(endpoint) else {
        return Ok(Box::new(http_client(endpoint, opts)?));
    };
    match mock.kind {
        "oracle" => Ok(Box::new(OracleTagger::from_document(&load_gold(&mock)?))),
        "noisy" => {
            let gold = load_gold(&mock)?;
            let flip = mock.parsed("flip", 0.0f64)?;
            let seed = mock.parsed("seed", default_seed)?;
            Ok(Box::new(NoisyTagger::from_document(&gold, flip, seed)))
        }
        _ => Err(mock.unknown()),
    }
}

pub fn make_generator(
    endpoint: &str,
    opts: &HttpOptions,
) -> Result<Box<dyn Generator>, BackendError> {
    let Some(mock) = MockUrl::parse(endpoint) else {
        return Ok(Box::new(http_client(endpoint, opts)?));
    };
    match mock.kind {
        "canned" => {
            let path = mock.required("replies")?;
            let text = std::fs::read_to_string(Path::new(path))
                .map_err(|source| BackendError::Read { path: path.to_string(), source })?;
            let replies: BTreeMap<String, String> = serde_json::from_str(&text)
                .map_err(|source| BackendError::Replies { path: path.to_string(), source })?;
            Ok(Box::new(CannedGenerator::from_map(replies)))
        }
        _ => Err(mock.unknown()),
    }
}
