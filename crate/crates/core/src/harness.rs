//! Prompt assembly, JSON candidate extraction and success accounting for
//! assurance-case generation runs. Transport and parsing live in the std
//! crate.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SYSTEM_PREAMBLE: &str = "You are a legal expert in privacy and security issues. \
Your duty is to produce a thorough Data Processing Agreement Assurance Case from General \
Data Protection Regulation legal requirements.";

/// Default `{assurance_case_definition}` filler. Describes the nested JSON
/// layout accepted by the case parser.
pub const DEFAULT_CASE_DEFINITION: &str = "An assurance case in the Claim-Argument-Evidence \
notation is a tree. The root is a single MainClaim. A MainClaim is supported by SubClaims, \
a SubClaim by ArgumentClaims, an ArgumentClaim by ArgumentSubClaims, and every branch ends \
in Evidence nodes, which have no children. Return one JSON object of the form \
{\"requirement_id\": \"...\", \"main_claim\": {\"id\": \"...\", \"type\": \"MainClaim\", \
\"text\": \"...\", \"children\": [...]}} where every child has the same fields and `type` \
is one of MainClaim, SubClaim, ArgumentClaim, ArgumentSubClaim, Evidence.";

pub const DEFAULT_FORMAT: &str = "JSON";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("requirement field `{0}` is empty")]
    MissingField(&'static str),
    #[error("no JSON object found")]
    NoJsonFound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    pub id: String,
    pub name: String,
    pub description: String,
    pub rationale: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system_message: String,
    pub user_message: String,
    pub requirement_id: String,
    pub model_name: String,
    pub call_index: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub case_definition: String,
    pub format: String,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        PromptTemplate {
            case_definition: DEFAULT_CASE_DEFINITION.into(),
            format: DEFAULT_FORMAT.into(),
        }
    }
}

impl PromptTemplate {
    pub fn system_message(&self) -> String {
        if self.case_definition.trim().is_empty() {
            SYSTEM_PREAMBLE.into()
        } else {
            format!("{SYSTEM_PREAMBLE} {}", self.case_definition)
        }
    }

    pub fn user_message(&self, req: &Requirement) -> Result<String, HarnessError> {
        for (name, value) in [
            ("id", &req.id),
            ("name", &req.name),
            ("description", &req.description),
            ("rationale", &req.rationale),
        ] {
            if value.trim().is_empty() {
                return Err(HarnessError::MissingField(name));
            }
        }
        if self.format.trim().is_empty() {
            return Err(HarnessError::MissingField("format"));
        }
        Ok(format!(
            "The requirement is {}: {}\n\nRequirement Description\n{}\n\nRationale and Supplemental Guidance\n{}\n\nGive the output in {}.",
            req.id, req.name, req.description, req.rationale, self.format
        ))
    }

    pub fn build(&self, req: &Requirement, model_name: &str, call_index: u32) -> Result<PromptBundle, HarnessError> {
        Ok(PromptBundle {
            system_message: self.system_message(),
            user_message: self.user_message(req)?,
            requirement_id: req.id.clone(),
            model_name: model_name.into(),
            call_index,
        })
    }
}

/// Prompt with the default case definition.
pub fn build_prompt(req: &Requirement, format: &str) -> Result<PromptBundle, HarnessError> {
    let template = PromptTemplate {
        format: format.into(),
        ..PromptTemplate::default()
    };
    template.build(req, "", 0)
}

/// Removes Markdown code fence lines (```` ``` ```` with an optional info
/// string) and keeps everything else.
pub fn strip_code_fences(raw: &str) -> String {
    if !raw.contains("```") {
        return raw.into();
    }
    let mut out = String::with_capacity(raw.len());
    for line in raw.split_inclusive('\n') {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("```") {
            // inline "```json {...} ```" on one line
            let body = rest.trim_start_matches(|c: char| c.is_ascii_alphanumeric());
            let body = body.strip_suffix("```").unwrap_or(body);
            if !body.trim().is_empty() {
                out.push_str(body.trim());
                out.push('\n');
            }
            continue;
        }
        if let Some(body) = t.strip_suffix("```") {
            out.push_str(body);
            out.push('\n');
            continue;
        }
        out.push_str(line);
    }
    out
}

/// Balanced top-level `{...}` spans in `text`, in order of appearance.
/// Braces inside JSON strings are ignored.
pub fn json_object_spans(text: &str) -> Vec<&str> {
    let bytes = text.as_bytes();
    let mut spans = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate() {
        if in_string {
            if escaped {
                escaped = false;
            } else if b == b'\\' {
                escaped = true;
            } else if b == b'"' {
                in_string = false;
            }
            continue;
        }
        match b {
            b'"' if depth > 0 => in_string = true,
            b'{' => {
                if depth == 0 {
                    start = i;
                }
                depth += 1;
            }
            b'}' if depth > 0 => {
                depth -= 1;
                if depth == 0 {
                    spans.push(&text[start..=i]);
                }
            }
            _ => {}
        }
    }
    spans
}

/// Candidate JSON documents, most likely first. A clean input is returned
/// unchanged as the first candidate.
pub fn json_candidates(raw: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let trimmed = raw.trim();
    if trimmed.starts_with('{') && trimmed.ends_with('}') {
        out.push(trimmed.into());
    }
    let stripped = strip_code_fences(raw);
    for span in json_object_spans(&stripped) {
        if !out.iter().any(|c| c == span) {
            out.push(span.into());
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeStatus {
    ValidJsonCase,
    MalformedJson,
    SchemaInvalid,
    TransportError,
}

impl OutcomeStatus {
    pub const ALL: [OutcomeStatus; 4] = [
        OutcomeStatus::ValidJsonCase,
        OutcomeStatus::MalformedJson,
        OutcomeStatus::SchemaInvalid,
        OutcomeStatus::TransportError,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeStatus::ValidJsonCase => "valid_json_case",
            OutcomeStatus::MalformedJson => "malformed_json",
            OutcomeStatus::SchemaInvalid => "schema_invalid",
            OutcomeStatus::TransportError => "transport_error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationOutcome {
    pub model_name: String,
    pub requirement_id: String,
    pub call_index: u32,
    pub raw_text: String,
    pub status: OutcomeStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl GenerationOutcome {
    pub fn sort_key(&self) -> (&str, &str, u32) {
        (&self.model_name, &self.requirement_id, self.call_index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessRow {
    pub model: String,
    pub total: usize,
    pub error_count: usize,
    pub valid_count: usize,
    pub success_percent: f64,
}

/// Per-model rows sorted by model name. Errors are every non-valid status;
/// the success percentage is computed from the valid count on its own.
pub fn success_rate(outcomes: &[GenerationOutcome]) -> Vec<SuccessRow> {
    let mut by_model: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    for o in outcomes {
        let e = by_model.entry(o.model_name.as_str()).or_default();
        e.0 += 1;
        match o.status {
            OutcomeStatus::ValidJsonCase => e.2 += 1,
            _ => e.1 += 1,
        }
    }
    by_model
        .into_iter()
        .map(|(model, (total, errors, valid))| SuccessRow {
            model: model.into(),
            total,
            error_count: errors,
            valid_count: valid,
            success_percent: valid as f64 / total as f64 * 100.0,
        })
        .collect()
}

/// Counts per status, in [`OutcomeStatus::ALL`] order.
pub fn status_counts(outcomes: &[GenerationOutcome]) -> [(OutcomeStatus, usize); 4] {
    OutcomeStatus::ALL.map(|s| (s, outcomes.iter().filter(|o| o.status == s).count()))
}

/// `95%`, `33.33%`: at most two decimals, trailing zeros dropped.
pub fn format_percent(p: f64) -> String {
    let s = format!("{p:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    format!("{s}%")
}
