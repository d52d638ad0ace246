//! Chat-completion clients: a minimal HTTP protocol and an offline fixture
//! replayer.
//!
//! Request: `{"model", "messages": [{"role", "content"}], "temperature"}`.
//! Response: `{"content"}`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use acnli_core::harness::PromptBundle;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportError(pub String);

impl std::fmt::Display for TransportError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub trait ChatClient: Send + Sync {
    fn complete(&self, bundle: &PromptBundle) -> Result<String, TransportError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChatConfig {
    Mock {
        fixtures: PathBuf,
    },
    Http {
        endpoint: String,
        /// Environment variable holding a bearer token, if any.
        #[serde(default)]
        api_key_env: Option<String>,
        #[serde(default)]
        temperature: f64,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
    },
}

fn default_timeout() -> u64 {
    120
}

impl ChatConfig {
    pub fn build(&self, offline: bool) -> Result<Box<dyn ChatClient>> {
        match self {
            ChatConfig::Mock { fixtures } => {
                let text = std::fs::read_to_string(fixtures).map_err(|e| Error::io(fixtures, e))?;
                let f: MockFixtures = serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", fixtures.display())))?;
                Ok(Box::new(MockChatClient::new(f)))
            }
            ChatConfig::Http {
                endpoint,
                api_key_env,
                temperature,
                timeout_secs,
            } => {
                if offline {
                    return Err(Error::Usage("--offline forbids the http chat client".into()));
                }
                let api_key = match api_key_env {
                    Some(var) => Some(
                        std::env::var(var).map_err(|_| Error::Config(format!("environment variable {var} is not set")))?,
                    ),
                    None => None,
                };
                Ok(Box::new(HttpChatClient::new(
                    endpoint,
                    api_key,
                    *temperature,
                    Duration::from_secs(*timeout_secs),
                )))
            }
        }
    }
}

#[derive(Debug, Serialize)]
struct Message<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Debug, Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [Message<'a>; 2],
    temperature: f64,
}

#[derive(Debug, Deserialize)]
struct ChatResponse {
    content: String,
}

pub struct HttpChatClient {
    endpoint: String,
    api_key: Option<String>,
    temperature: f64,
    agent: ureq::Agent,
}

impl HttpChatClient {
    pub fn new(endpoint: &str, api_key: Option<String>, temperature: f64, timeout: Duration) -> Self {
        HttpChatClient {
            endpoint: endpoint.into(),
            api_key,
            temperature,
            agent: ureq::Agent::config_builder()
                .timeout_global(Some(timeout))
                .http_status_as_error(false)
                .build()
                .into(),
        }
    }
}

impl ChatClient for HttpChatClient {
    fn complete(&self, bundle: &PromptBundle) -> Result<String, TransportError> {
        let body = ChatRequest {
            model: &bundle.model_name,
            messages: [
                Message {
                    role: "system",
                    content: &bundle.system_message,
                },
                Message {
                    role: "user",
                    content: &bundle.user_message,
                },
            ],
            temperature: self.temperature,
        };
        let mut req = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(&body).map_err(|e| TransportError(e.to_string()))?;
        let status = resp.status().as_u16();
        if status != 200 {
            return Err(TransportError(format!("HTTP {status}")));
        }
        let parsed: ChatResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| TransportError(format!("bad response body: {e}")))?;
        Ok(parsed.content)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MockReply {
    Text(String),
    Failure { transport_error: String },
}

/// Replies keyed by `"<model>/<requirement>"`, `"<model>"` or `"*"`, tried in
/// that order. Call `i` gets reply `i mod len`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockFixtures {
    pub replies: BTreeMap<String, Vec<MockReply>>,
}

pub struct MockChatClient {
    fixtures: MockFixtures,
}

impl MockChatClient {
    pub fn new(fixtures: MockFixtures) -> Self {
        MockChatClient { fixtures }
    }
}

impl ChatClient for MockChatClient {
    fn complete(&self, bundle: &PromptBundle) -> Result<String, TransportError> {
        let keys = [
            format!("{}/{}", bundle.model_name, bundle.requirement_id),
            bundle.model_name.clone(),
            "*".to_string(),
        ];
        let replies = keys
            .iter()
            .find_map(|k| self.fixtures.replies.get(k).filter(|r| !r.is_empty()))
            .ok_or_else(|| TransportError(format!("no fixture for model `{}`", bundle.model_name)))?;
        match &replies[bundle.call_index as usize % replies.len()] {
            MockReply::Text(t) => Ok(t.clone()),
            MockReply::Failure { transport_error } => Err(TransportError(transport_error.clone())),
        }
    }
}
