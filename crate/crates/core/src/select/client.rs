use std::collections::VecDeque;
use std::sync::Mutex;
use std::time::Duration;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde_json::{json, Value};

use super::VlmRequest;
use crate::error::{Error, Result};

pub const KEY_ENV: &str = "PANAV_VLM_KEY";
pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";

/// Anything that turns a request into assistant text.
///
/// Implementations report a rejected credential as [`Error::Unauthorized`]
/// and every other failure as [`Error::Transport`].
pub trait ChatClient: Send + Sync {
    fn complete(&self, request: &VlmRequest) -> Result<String>;
}

/// Chat-completion client: JSON body with text parts and base64 PNG
/// `image_url` parts, bearer-token auth.
pub struct HttpChatClient {
    endpoint: String,
    api_key: Option<String>,
    http: reqwest::blocking::Client,
}

impl HttpChatClient {
    pub fn new(endpoint: impl Into<String>, api_key: Option<String>, timeout: Duration) -> Result<Self> {
        let http = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| Error::Transport(e.to_string()))?;
        Ok(HttpChatClient {
            endpoint: endpoint.into(),
            api_key,
            http,
        })
    }

    /// Reads the key from `PANAV_VLM_KEY`.
    pub fn from_env(endpoint: impl Into<String>, timeout: Duration) -> Result<Self> {
        Self::new(endpoint, std::env::var(KEY_ENV).ok(), timeout)
    }
}

pub fn request_body(request: &VlmRequest) -> Value {
    let mut parts = vec![json!({ "type": "text", "text": request.user })];
    for img in &request.images {
        parts.push(json!({ "type": "text", "text": img.label }));
        parts.push(json!({
            "type": "image_url",
            "image_url": { "url": format!("data:image/png;base64,{}", STANDARD.encode(&img.png)) }
        }));
    }
    json!({
        "model": request.model,
        "temperature": request.temperature,
        "messages": [
            { "role": "system", "content": request.system },
            { "role": "user", "content": parts },
        ]
    })
}

/// Assistant text from a chat-completion response; content may be a string
/// or a list of text parts.
pub fn response_text(body: &Value) -> Option<String> {
    let content = body.get("choices")?.get(0)?.get("message")?.get("content")?;
    match content {
        Value::String(s) => Some(s.clone()),
        Value::Array(parts) => Some(
            parts
                .iter()
                .filter_map(|p| p.get("text").and_then(Value::as_str))
                .collect::<Vec<_>>()
                .join("\n"),
        ),
        _ => None,
    }
}

impl ChatClient for HttpChatClient {
    fn complete(&self, request: &VlmRequest) -> Result<String> {
        let mut call = self.http.post(&self.endpoint).json(&request_body(request));
        if let Some(key) = &self.api_key {
            call = call.bearer_auth(key);
        }
        let resp = call.send().map_err(|e| Error::Transport(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| Error::Transport(e.to_string()))?;
        if status == reqwest::StatusCode::UNAUTHORIZED || status == reqwest::StatusCode::FORBIDDEN {
            return Err(Error::Unauthorized(format!("{status} from {}", self.endpoint)));
        }
        if !status.is_success() {
            let snippet: String = text.chars().take(200).collect();
            return Err(Error::Transport(format!("{status}: {snippet}")));
        }
        let body: Value =
            serde_json::from_str(&text).map_err(|e| Error::Transport(format!("response is not JSON: {e}")))?;
        response_text(&body).ok_or_else(|| Error::Transport("response carries no assistant text".into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScriptedReply {
    Text(String),
    TransportError(String),
    Unauthorized,
}

/// Replays canned replies in order; fails with a transport error once the
/// script runs out.
#[derive(Debug, Default)]
pub struct ScriptedClient {
    replies: Mutex<VecDeque<ScriptedReply>>,
    seen: Mutex<Vec<VlmRequest>>,
}

impl ScriptedClient {
    pub fn new(replies: impl IntoIterator<Item = ScriptedReply>) -> Self {
        ScriptedClient {
            replies: Mutex::new(replies.into_iter().collect()),
            seen: Mutex::new(Vec::new()),
        }
    }

    /// Every reply is `text`.
    pub fn constant(text: &str, times: usize) -> Self {
        Self::new((0..times).map(|_| ScriptedReply::Text(text.to_string())))
    }

    pub fn texts<S: AsRef<str>>(texts: &[S]) -> Self {
        Self::new(texts.iter().map(|t| ScriptedReply::Text(t.as_ref().to_string())))
    }

    pub fn requests(&self) -> Vec<VlmRequest> {
        self.seen.lock().unwrap().clone()
    }
}

impl ChatClient for ScriptedClient {
    fn complete(&self, request: &VlmRequest) -> Result<String> {
        self.seen.lock().unwrap().push(request.clone());
        match self.replies.lock().unwrap().pop_front() {
            Some(ScriptedReply::Text(t)) => Ok(t),
            Some(ScriptedReply::TransportError(e)) => Err(Error::Transport(e)),
            Some(ScriptedReply::Unauthorized) => Err(Error::Unauthorized("scripted".into())),
            None => Err(Error::Transport("script exhausted".into())),
        }
    }
}
