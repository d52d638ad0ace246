//! Assurance-case files: parsing with categorised errors, canonical
//! serialization, and the `<model>__<requirement>__<run>.json` naming scheme.

use std::fmt;
use std::fs;
use std::path::Path;

use acnli_core::cae::{validate, AssuranceCase, CaseDocument, CaseMeta, ErrorCategory, TransitionRules, Violation};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseParseError {
    pub category: ErrorCategory,
    pub message: String,
}

impl fmt::Display for CaseParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.category {
            ErrorCategory::MalformedJson => "malformed JSON",
            ErrorCategory::SchemaViolation => "schema violation",
            ErrorCategory::StructureViolation => "structure violation",
        };
        write!(f, "{c}: {}", self.message)
    }
}

impl std::error::Error for CaseParseError {}

fn fail(category: ErrorCategory, message: impl fmt::Display) -> CaseParseError {
    CaseParseError {
        category,
        message: message.to_string(),
    }
}

/// Parses a nested case document.
///
/// Not JSON at all is `MalformedJson`; JSON of the wrong shape (missing
/// fields, unknown node types, a bare string) is `SchemaViolation`; a
/// well-typed document that is not a proper tree is `StructureViolation`.
pub fn parse_case(text: &str, meta: CaseMeta) -> Result<AssuranceCase, CaseParseError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| fail(ErrorCategory::MalformedJson, e))?;
    parse_case_value(value, meta)
}

pub fn parse_case_value(value: serde_json::Value, meta: CaseMeta) -> Result<AssuranceCase, CaseParseError> {
    let doc: CaseDocument = serde_json::from_value(value).map_err(|e| fail(ErrorCategory::SchemaViolation, e))?;
    AssuranceCase::from_document(meta, doc).map_err(|e| fail(e.category(), e))
}

/// Pretty-printed nested document with a trailing newline.
pub fn serialize_case(case: &AssuranceCase) -> String {
    let mut s = serde_json::to_string_pretty(&case.to_document()).expect("documents always serialize");
    s.push('\n');
    s
}

/// Meta from a `<model>__<requirement>__<run>` file stem.
pub fn meta_from_path(path: &Path) -> Option<CaseMeta> {
    let stem = path.file_stem()?.to_str()?;
    let mut parts = stem.split("__");
    let (model, req, run) = (parts.next()?, parts.next()?, parts.next()?);
    if parts.next().is_some() || model.is_empty() || req.is_empty() {
        return None;
    }
    Some(CaseMeta::new(req, model, run.parse().ok()?))
}

/// Meta for a file: from the name when it follows the convention, otherwise
/// the stem as model and the document's own requirement id.
pub fn infer_meta(path: &Path, text: &str) -> CaseMeta {
    if let Some(meta) = meta_from_path(path) {
        return meta;
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("case");
    let requirement = serde_json::from_str::<serde_json::Value>(text)
        .ok()
        .and_then(|v| v.get("requirement_id")?.as_str().map(String::from))
        .unwrap_or_default();
    CaseMeta::new(requirement, stem, 0)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn load_case(path: &Path) -> Result<Result<AssuranceCase, CaseParseError>> {
    let text = read_text(path)?;
    let meta = infer_meta(path, &text);
    Ok(parse_case(&text, meta))
}

pub fn write_case(path: &Path, case: &AssuranceCase) -> Result<()> {
    fs::write(path, serialize_case(case)).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileStatus {
    Valid,
    /// Parsed, but the validator reported violations.
    Invalid,
    MalformedJson,
    SchemaViolation,
    StructureViolation,
}

impl FileStatus {
    pub const ALL: [FileStatus; 5] = [
        FileStatus::Valid,
        FileStatus::Invalid,
        FileStatus::MalformedJson,
        FileStatus::SchemaViolation,
        FileStatus::StructureViolation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FileStatus::Valid => "valid",
            FileStatus::Invalid => "invalid",
            FileStatus::MalformedJson => "malformed_json",
            FileStatus::SchemaViolation => "schema_violation",
            FileStatus::StructureViolation => "structure_violation",
        }
    }
}

impl From<ErrorCategory> for FileStatus {
    fn from(c: ErrorCategory) -> Self {
        match c {
            ErrorCategory::MalformedJson => FileStatus::MalformedJson,
            ErrorCategory::SchemaViolation => FileStatus::SchemaViolation,
            ErrorCategory::StructureViolation => FileStatus::StructureViolation,
        }
    }
}

/// One line of the validation JSONL report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileReport {
    pub file: String,
    pub case_id: String,
    pub status: FileStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Violation>,
}

/// Parses and validates one file. IO failures are errors; everything about
/// the content lands in the report.
pub fn check_file(path: &Path, rules: &TransitionRules) -> Result<(FileReport, Option<AssuranceCase>)> {
    let text = read_text(path)?;
    let meta = infer_meta(path, &text);
    let case_id = meta.case_id();
    let file = path.display().to_string();
    Ok(match parse_case(&text, meta) {
        Err(e) => (
            FileReport {
                file,
                case_id,
                status: e.category.into(),
                error: Some(e.message),
                violations: Vec::new(),
                warnings: Vec::new(),
            },
            None,
        ),
        Ok(case) => {
            let report = validate(&case, rules);
            (
                FileReport {
                    file,
                    case_id,
                    status: if report.is_valid { FileStatus::Valid } else { FileStatus::Invalid },
                    error: None,
                    violations: report.violations,
                    warnings: report.warnings,
                },
                Some(case),
            )
        }
    })
}
