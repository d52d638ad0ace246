//! Generation runs: prompt every `(model, requirement, call)`, persist the raw
//! replies and classify each one.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use acnli_core::cae::{validate, CaseMeta, TransitionRules};
use acnli_core::harness::{json_candidates, GenerationOutcome, OutcomeStatus, PromptBundle, PromptTemplate, Requirement};

use crate::case_io::parse_case_value;
use crate::chat::ChatClient;
use crate::error::{Error, Result};

/// Status of a reply: the first candidate object that is valid JSON decides;
/// it is `valid_json_case` only if it parses as a case and validates.
pub fn classify(raw: &str, meta: &CaseMeta, rules: &TransitionRules) -> (OutcomeStatus, Option<String>, Option<String>) {
    let Some(value) = json_candidates(raw)
        .iter()
        .find_map(|c| serde_json::from_str::<serde_json::Value>(c).ok())
    else {
        return (OutcomeStatus::MalformedJson, None, Some("no JSON object found".into()));
    };
    match parse_case_value(value, meta.clone()) {
        Err(e) => (OutcomeStatus::SchemaInvalid, None, Some(e.to_string())),
        Ok(case) => {
            let report = validate(&case, rules);
            if report.is_valid {
                (OutcomeStatus::ValidJsonCase, Some(case.case_id()), None)
            } else {
                let msgs: Vec<_> = report.violations.iter().map(|v| v.message.as_str()).collect();
                (OutcomeStatus::SchemaInvalid, None, Some(msgs.join("; ")))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenerationJob {
    pub models: Vec<String>,
    pub requirements: Vec<Requirement>,
    pub n_calls: u32,
    pub template: PromptTemplate,
    pub rules: TransitionRules,
    /// Worker threads issuing calls at once.
    pub concurrency: usize,
    /// Directory for one raw reply file per call.
    pub raw_dir: Option<PathBuf>,
}

/// File-name-safe model name.
pub fn file_stem(meta: &CaseMeta) -> String {
    let clean = |s: &str| s.replace(['/', '\\', ':'], "_");
    format!("{}__{}__{}", clean(&meta.source_model), clean(&meta.requirement_id), meta.run_index)
}

fn run_one(client: &dyn ChatClient, bundle: &PromptBundle, rules: &TransitionRules, raw_dir: Option<&Path>) -> Result<GenerationOutcome> {
    let meta = CaseMeta::new(&bundle.requirement_id, &bundle.model_name, bundle.call_index);
    let mut outcome = GenerationOutcome {
        model_name: bundle.model_name.clone(),
        requirement_id: bundle.requirement_id.clone(),
        call_index: bundle.call_index,
        raw_text: String::new(),
        status: OutcomeStatus::TransportError,
        case_id: None,
        detail: None,
    };
    match client.complete(bundle) {
        Err(e) => outcome.detail = Some(e.0),
        Ok(raw) => {
            if let Some(dir) = raw_dir {
                let path = dir.join(format!("{}.json", file_stem(&meta)));
                fs::write(&path, &raw).map_err(|e| Error::io(&path, e))?;
            }
            let (status, case_id, detail) = classify(&raw, &meta, rules);
            outcome.raw_text = raw;
            outcome.status = status;
            outcome.case_id = case_id;
            outcome.detail = detail;
        }
    }
    Ok(outcome)
}

fn run_bundles(client: &dyn ChatClient, bundles: &[PromptBundle], job_rules: &TransitionRules, raw_dir: Option<&Path>, concurrency: usize) -> Result<Vec<GenerationOutcome>> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<GenerationOutcome>>>> = bundles.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..concurrency.clamp(1, bundles.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(bundle) = bundles.get(i) else { break };
                let r = run_one(client, bundle, job_rules, raw_dir);
                *slots[i].lock().expect("slot lock") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every slot filled"))
        .collect()
}

/// One outcome per `(model, requirement, call)`, sorted by that key.
/// Transport failures become outcomes; only local IO errors abort the run.
pub fn generate(client: &dyn ChatClient, job: &GenerationJob) -> Result<Vec<GenerationOutcome>> {
    if job.n_calls == 0 {
        return Err(Error::Usage("n_calls must be at least 1".into()));
    }
    if let Some(dir) = &job.raw_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut bundles = Vec::new();
    for model in &job.models {
        for req in &job.requirements {
            for call in 0..job.n_calls {
                bundles.push(
                    job.template
                        .build(req, model, call)
                        .map_err(|e| Error::Config(format!("requirement `{}`: {e}", req.id)))?,
                );
            }
        }
    }
    let mut out = run_bundles(client, &bundles, &job.rules, job.raw_dir.as_deref(), job.concurrency)?;
    out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(out)
}

/// Second round over failed (non-transport) outcomes: `repair_model` is asked
/// to turn each raw reply into a valid case document, and the outcome is
/// replaced by the reclassified result. Other outcomes pass through.
pub fn repair_round(client: &dyn ChatClient, repair_model: &str, job: &GenerationJob, outcomes: Vec<GenerationOutcome>) -> Result<Vec<GenerationOutcome>> {
    let system = job.template.system_message();
    let mut keep = Vec::new();
    let mut bundles = Vec::new();
    let mut origins = Vec::new();
    for o in outcomes {
        if matches!(o.status, OutcomeStatus::MalformedJson | OutcomeStatus::SchemaInvalid) {
            bundles.push(PromptBundle {
                system_message: system.clone(),
                user_message: format!(
                    "Rewrite the following assurance case as one valid JSON object in the required format. \
Return only the JSON.\n\n{}",
                    o.raw_text
                ),
                requirement_id: o.requirement_id.clone(),
                model_name: repair_model.into(),
                call_index: o.call_index,
            });
            origins.push(o.model_name.clone());
        } else {
            keep.push(o);
        }
    }
    let repaired = run_bundles(client, &bundles, &job.rules, None, job.concurrency)?;
    for (mut r, model) in repaired.into_iter().zip(origins) {
        let meta = CaseMeta::new(&r.requirement_id, &model, r.call_index);
        if r.status == OutcomeStatus::ValidJsonCase {
            r.case_id = Some(meta.case_id());
        }
        r.model_name = model;
        r.detail = Some(match r.detail {
            Some(d) => format!("after repair: {d}"),
            None => "repaired".into(),
        });
        keep.push(r);
    }
    keep.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(keep)
}
