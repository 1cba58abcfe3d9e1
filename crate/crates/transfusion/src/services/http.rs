//! HTTP+JSON client for model servers implementing the service protocol.

use std::time::Duration;

use async_trait::async_trait;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use transfusion_core::tags::TagSequence;

use super::{
    GenerateRequest, Generator, ServiceError, TagRequest, Tagger, TranslateRequest, Translator,
};

/// Retry behavior for transport failures and 5xx responses. Requests in
/// this protocol are idempotent, so retrying is always safe; 4xx
/// responses are never retried. Delays grow exponentially from
/// `base_delay` up to `max_delay`.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            base_delay: Duration::from_millis(200),
            max_delay: Duration::from_secs(5),
        }
    }
}

impl RetryPolicy {
    fn delay(&self, attempt: u32) -> Duration {
        let factor = 2u32.saturating_pow(attempt);
        self.base_delay.saturating_mul(factor).min(self.max_delay)
    }
}

/// Client for one service base URL; the standard endpoint paths
/// (`/translate`, `/tag`, `/generate`) are appended per call.
#[derive(Debug, Clone)]
pub struct HttpServiceClient {
    base_url: String,
    http: reqwest::Client,
    retry: RetryPolicy,
    bearer_token: Option<String>,
}

#[derive(Deserialize)]
struct TranslateResponse {
    texts: Vec<String>,
}

#[derive(Deserialize)]
struct TagResponse {
    tags: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct GenerateResponse {
    text: String,
}

#[derive(Deserialize)]
struct ErrorBody {
    error: String,
}

impl HttpServiceClient {
    pub fn new(base_url: impl Into<String>) -> Self {
        HttpServiceClient {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
            retry: RetryPolicy::default(),
            bearer_token: None,
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_bearer_token(mut self, token: Option<String>) -> Self {
        self.bearer_token = token;
        self
    }

    /// One request; the boolean marks the error as retryable (transport
    /// failures and 5xx responses).
    async fn post_once<Req: Serialize, Resp: DeserializeOwned>(
        &self,
        url: &str,
        req: &Req,
    ) -> Result<Resp, (ServiceError, bool)> {
        let mut builder = self.http.post(url).json(req);
        if let Some(token) = &self.bearer_token {
            builder = builder.bearer_auth(token);
        }
        let response = builder
            .send()
            .await
            .map_err(|err| (ServiceError::Transport(err.to_string()), true))?;
        let status = response.status();
        if status.is_success() {
            return response
                .json::<Resp>()
                .await
                .map_err(|err| (ServiceError::Protocol(err.to_string()), false));
        }
        let message = match response.json::<ErrorBody>().await {
            Ok(body) => body.error,
            Err(_) => format!("HTTP {status}"),
        };
        Err((ServiceError::Backend(message), status.is_server_error()))
    }

    async fn post_json<Req: Serialize, Resp: DeserializeOwned>(
        &self,
        path: &str,
        req: &Req,
    ) -> Result<Resp, ServiceError> {
        let url = format!("{}{}", self.base_url, path);
        let mut attempt = 0u32;
        loop {
            match self.post_once(&url, req).await {
                Ok(response) => return Ok(response),
                Err((err, retryable)) => {
                    if !retryable || attempt >= self.retry.max_retries {
                        return Err(err);
                    }
                    tokio::time::sleep(self.retry.delay(attempt)).await;
                    attempt += 1;
                }
            }
        }
    }
}

#[async_trait]
impl Translator for HttpServiceClient {
    async fn translate(&self, req: &TranslateRequest) -> Result<Vec<String>, ServiceError> {
        req.validate()?;
        let response: TranslateResponse = self.post_json("/translate", req).await?;
        if response.texts.len() != req.texts.len() {
            return Err(ServiceError::Protocol(format!(
                "sent {} texts, received {} translations",
                req.texts.len(),
                response.texts.len()
            )));
        }
        Ok(response.texts)
    }
}

#[async_trait]
impl Tagger for HttpServiceClient {
    async fn tag(&self, req: &TagRequest) -> Result<Vec<TagSequence>, ServiceError> {
        req.validate()?;
        let response: TagResponse = self.post_json("/tag", req).await?;
        if response.tags.len() != req.sentences.len() {
            return Err(ServiceError::Protocol(format!(
                "sent {} sentences, received {} tag sequences",
                req.sentences.len(),
                response.tags.len()
            )));
        }
        let mut out = Vec::with_capacity(response.tags.len());
        for (index, (tags, sentence)) in response.tags.iter().zip(&req.sentences).enumerate() {
            if tags.len() != sentence.len() {
                return Err(ServiceError::Protocol(format!(
                    "sentence {index}: {} tokens but {} tags",
                    sentence.len(),
                    tags.len()
                )));
            }
            let parsed = TagSequence::parse(tags)
                .map_err(|err| ServiceError::Protocol(format!("sentence {index}: {err}")))?;
            out.push(parsed);
        }
        Ok(out)
    }
}

#[async_trait]
impl Generator for HttpServiceClient {
    async fn generate(&self, req: &GenerateRequest) -> Result<String, ServiceError> {
        req.validate()?;
        let response: GenerateResponse = self.post_json("/generate", req).await?;
        Ok(response.text)
    }
}
