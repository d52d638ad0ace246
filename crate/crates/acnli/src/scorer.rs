//! Scorer handles: the builtin toy and constant scorers, and an HTTP client
//! for the `/score` protocol.
//!
//! Request: `{"inputs": [{"premise", "hypothesis"}], "return_tokens": bool}`.
//! Response: `{"probs": [[p_not_entail, p_entail]], "tokens": [[..]]?}`,
//! aligned 1:1 with the inputs.

use std::time::Duration;

use acnli_core::faithfulness::{ConstantScorer, FaithfulnessError, ProbDist, Scorer, TextPair, ToyScorer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScorerConfig {
    BuiltinToy {
        #[serde(default = "default_weight")]
        weight: f64,
        #[serde(default = "default_bias")]
        bias: f64,
    },
    Constant {
        entailment: f64,
    },
    ExternalHttp {
        endpoint: String,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
        #[serde(default = "default_max_batch")]
        max_batch: usize,
    },
}

fn default_weight() -> f64 {
    ToyScorer::default().weight
}
fn default_bias() -> f64 {
    ToyScorer::default().bias
}
fn default_timeout() -> u64 {
    30
}
fn default_max_batch() -> usize {
    64
}

impl Default for ScorerConfig {
    fn default() -> Self {
        ScorerConfig::BuiltinToy {
            weight: default_weight(),
            bias: default_bias(),
        }
    }
}

impl ScorerConfig {
    pub fn is_external(&self) -> bool {
        matches!(self, ScorerConfig::ExternalHttp { .. })
    }

    pub fn build(&self, offline: bool) -> Result<Box<dyn Scorer + Send + Sync>> {
        Ok(match self {
            ScorerConfig::BuiltinToy { weight, bias } => Box::new(ToyScorer {
                weight: *weight,
                bias: *bias,
            }),
            ScorerConfig::Constant { entailment } => Box::new(ConstantScorer(
                ProbDist::from_entailment(*entailment).map_err(|e| Error::Config(e.to_string()))?,
            )),
            ScorerConfig::ExternalHttp {
                endpoint,
                timeout_secs,
                max_batch,
            } => {
                if offline {
                    return Err(Error::Usage("--offline forbids the external_http scorer".into()));
                }
                Box::new(HttpScorer::new(endpoint, Duration::from_secs(*timeout_secs), *max_batch))
            }
        })
    }
}

#[derive(Debug, Serialize)]
struct ScoreRequest<'a> {
    inputs: &'a [TextPair],
    return_tokens: bool,
}

#[derive(Debug, Deserialize)]
struct ScoreResponse {
    probs: Vec<[f64; 2]>,
    #[serde(default)]
    tokens: Option<Vec<Vec<String>>>,
}

pub struct HttpScorer {
    url: String,
    agent: ureq::Agent,
    max_batch: usize,
}

impl HttpScorer {
    /// `endpoint` is the service base URL; requests go to `{endpoint}/score`.
    pub fn new(endpoint: &str, timeout: Duration, max_batch: usize) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpScorer {
            url: format!("{}/score", endpoint.trim_end_matches('/')),
            agent,
            max_batch: max_batch.max(1),
        }
    }

    fn call(&self, inputs: &[TextPair], return_tokens: bool) -> Result<ScoreResponse, FaithfulnessError> {
        let mut resp = self
            .agent
            .post(&self.url)
            .send_json(ScoreRequest { inputs, return_tokens })
            .map_err(|e| FaithfulnessError::ScorerUnavailable(format!("{}: {e}", self.url)))?;
        let status = resp.status().as_u16();
        if status >= 500 {
            return Err(FaithfulnessError::ScorerUnavailable(format!("{}: HTTP {status}", self.url)));
        }
        if status != 200 {
            return Err(FaithfulnessError::Protocol(format!("{}: HTTP {status}", self.url)));
        }
        let body: ScoreResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| FaithfulnessError::Protocol(format!("bad response body: {e}")))?;
        if body.probs.len() != inputs.len() {
            return Err(FaithfulnessError::Protocol(format!(
                "{} inputs but {} results",
                inputs.len(),
                body.probs.len()
            )));
        }
        if let Some(tokens) = &body.tokens {
            if return_tokens && tokens.len() != inputs.len() {
                return Err(FaithfulnessError::Protocol("token lists do not align with inputs".into()));
            }
        }
        Ok(body)
    }

    /// Server-side tokenization of each input, when the service exposes it.
    pub fn server_tokens(&self, inputs: &[TextPair]) -> Result<Vec<Vec<String>>, FaithfulnessError> {
        self.call(inputs, true)?
            .tokens
            .ok_or_else(|| FaithfulnessError::Protocol("service returned no tokens".into()))
    }
}

impl Scorer for HttpScorer {
    fn score_batch(&self, inputs: &[TextPair]) -> Result<Vec<ProbDist>, FaithfulnessError> {
        let mut out = Vec::with_capacity(inputs.len());
        for chunk in inputs.chunks(self.max_batch) {
            for p in self.call(chunk, false)?.probs {
                out.push(ProbDist::new(p[0], p[1]).map_err(|e| FaithfulnessError::Protocol(e.to_string()))?);
            }
        }
        Ok(out)
    }
}
