//! The five pipeline commands. Each reads its inputs per the effective
//! [`RunConfig`], writes its outputs plus `manifest.json` into `cfg.out`, and
//! returns the process exit code.

use std::fs;
use std::path::{Path, PathBuf};

use acnli_core::agreement::{flat_table, ged_matrix, measure_pair, plan_pairs, reduce, roll_up, AgreementOptions, Scope, SmallGroups};
use acnli_core::cae::{AssuranceCase, TransitionRules};
use acnli_core::faithfulness::{
    aggregate_records, evaluate_records, occlusion_attribution, AttributionRanking, EvalInstance, FaithfulnessConfig,
    PermutationConfig, Scorer,
};
use acnli_core::ged::GedCostModel;
use acnli_core::harness::{status_counts, success_rate, OutcomeStatus, PromptTemplate, Requirement, DEFAULT_CASE_DEFINITION};
use acnli_core::pairgen::{
    build_gdpr_nli, cae_negatives, cae_pairs, render_input, split_by_requirement, DpaSentence, HopCounts, NliInstance,
    RequirementText, SamplerConfig, SplitSide, SplitSpec, Variant,
};
use rayon::prelude::*;

use crate::case_io::{check_file, serialize_case, FileReport, FileStatus};
use crate::config::{RunConfig, ScopeChoice};
use crate::error::{exit, Error, Result};
use crate::generate::{generate, repair_round, GenerationJob};
use crate::manifest::{expand_inputs, RunManifest};
use crate::{jsonl, report};

/// What a command produced.
#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub exit_code: i32,
    /// One-line human summary.
    pub summary: String,
    pub outputs: Vec<PathBuf>,
}

struct Run<'a> {
    cfg: &'a RunConfig,
    manifest: RunManifest,
    outputs: Vec<PathBuf>,
}

impl<'a> Run<'a> {
    fn start(command: &str, cfg: &'a RunConfig, offline: bool) -> Result<Self> {
        fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
        Ok(Run {
            cfg,
            manifest: RunManifest::new(command, cfg, offline),
            outputs: Vec::new(),
        })
    }

    fn input(&mut self, path: &Path) -> Result<()> {
        self.manifest.add_input(path)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.cfg.out.join(name)
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.record(path)
    }

    fn write_jsonl<T: serde::Serialize>(&mut self, name: &str, items: &[T]) -> Result<()> {
        let path = self.path(name);
        jsonl::write(&path, items)?;
        self.record(path)
    }

    fn record(&mut self, path: PathBuf) -> Result<()> {
        self.manifest.add_output(&path)?;
        self.outputs.push(path);
        Ok(())
    }

    fn finish(mut self, exit_code: i32, summary: String) -> Result<CommandOutcome> {
        let m = self.manifest.write(&self.cfg.out)?;
        self.outputs.push(m);
        Ok(CommandOutcome {
            exit_code,
            summary,
            outputs: self.outputs,
        })
    }
}

fn input_files(cfg: &RunConfig, run: &mut Run) -> Result<Vec<PathBuf>> {
    if cfg.inputs.is_empty() {
        return Err(Error::Usage("no input files given".into()));
    }
    let files = expand_inputs(&cfg.inputs)?;
    for f in &files {
        run.input(f)?;
    }
    Ok(files)
}

/// Parses and validates case files. Files that fail are an error unless
/// `skip_invalid`, in which case they are dropped.
fn load_valid_cases(files: &[PathBuf], skip_invalid: bool) -> Result<Vec<AssuranceCase>> {
    let rules = TransitionRules::default();
    let mut cases = Vec::new();
    for f in files {
        let (rep, case) = check_file(f, &rules)?;
        match (rep.status, case) {
            (FileStatus::Valid, Some(case)) => cases.push(case),
            _ if skip_invalid => {}
            (status, _) => {
                let why = rep
                    .error
                    .or_else(|| rep.violations.first().map(|v| v.message.clone()))
                    .unwrap_or_default();
                return Err(Error::InvalidInput(format!("{}: {}: {why}", f.display(), status.as_str())));
            }
        }
    }
    cases.sort_by_key(|c| c.case_id());
    if let Some(w) = cases.windows(2).find(|w| w[0].case_id() == w[1].case_id()) {
        return Err(Error::InvalidInput(format!("duplicate case id `{}`", w[0].case_id())));
    }
    Ok(cases)
}

pub fn run_validate(cfg: &RunConfig, offline: bool) -> Result<CommandOutcome> {
    let mut run = Run::start("validate", cfg, offline)?;
    let files = input_files(cfg, &mut run)?;
    let rules = TransitionRules::default();
    let mut reports: Vec<FileReport> = Vec::with_capacity(files.len());
    let canonical_dir = cfg.out.join("canonical");
    if cfg.validate.write_canonical {
        fs::create_dir_all(&canonical_dir).map_err(|e| Error::io(&canonical_dir, e))?;
    }
    for f in &files {
        let (rep, case) = check_file(f, &rules)?;
        if let (true, Some(case)) = (cfg.validate.write_canonical, case) {
            let name = f.file_name().expect("input is a file");
            let path = canonical_dir.join(name);
            fs::write(&path, serialize_case(&case)).map_err(|e| Error::io(&path, e))?;
            run.record(path)?;
        }
        reports.push(rep);
    }
    run.write_jsonl("validation.jsonl", &reports)?;

    let count = |s: FileStatus| reports.iter().filter(|r| r.status == s).count();
    let mut summary = String::from("status,count\n");
    for s in FileStatus::ALL {
        summary.push_str(&format!("{},{}\n", s.as_str(), count(s)));
    }
    run.write("validation_summary.csv", &summary)?;
    let errors = reports.len() - count(FileStatus::Valid);
    run.write("error_summary.csv", &report::error_summary_csv(errors, reports.len()))?;

    let code = if errors == 0 { exit::OK } else { exit::VALIDATION_FAILED };
    run.finish(code, format!("{errors} error files of {} total", reports.len()))
}

pub fn run_metrics(cfg: &RunConfig, offline: bool) -> Result<CommandOutcome> {
    let mut run = Run::start("metrics", cfg, offline)?;
    let files = input_files(cfg, &mut run)?;
    let cases = load_valid_cases(&files, cfg.metrics.skip_invalid)?;
    let m = &cfg.metrics;
    let opts = AgreementOptions {
        costs: GedCostModel::try_from(m.costs.clone()).map_err(|e| Error::Config(e.to_string()))?,
        budget: m.budget,
        with_ged: m.with_ged,
    };
    let small = if m.skip_small_groups { SmallGroups::Skip } else { SmallGroups::Error };
    let scopes: &[Scope] = match m.scope {
        ScopeChoice::Intra => &[Scope::Intra],
        ScopeChoice::Inter => &[Scope::Inter],
        ScopeChoice::Both => &[Scope::Intra, Scope::Inter],
    };
    let mut reports = Vec::new();
    let mut inexact = 0usize;
    for &scope in scopes {
        let pairs = plan_pairs(&cases, scope, small)?;
        let metrics: Vec<_> = pairs
            .par_iter()
            .map(|p| measure_pair(&cases[p.left], &cases[p.right], &opts))
            .collect();
        inexact += metrics.iter().filter(|x| !x.ged_exact).count();
        reports.extend(reduce(&pairs, &metrics));
    }
    run.write("agreement.csv", &report::agreement_csv(&reports))?;
    run.write("agreement_summary.csv", &report::agreement_csv(&roll_up(&reports)))?;
    run.write("flat_table.csv", &report::flat_table_csv(&flat_table(&reports)))?;
    if m.with_ged {
        run.write("ged_matrix.csv", &report::ged_matrix_csv(&ged_matrix(&reports)))?;
    }
    let mut summary = format!("{} cases, {} report rows", cases.len(), reports.len());
    if inexact > 0 {
        summary.push_str(&format!(", {inexact} GED values hit the search budget (upper bounds)"));
    }
    run.finish(exit::OK, summary)
}

fn read_split(path: &Path) -> Result<SplitSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn run_pairgen(cfg: &RunConfig, offline: bool) -> Result<CommandOutcome> {
    let mut run = Run::start("pairgen", cfg, offline)?;
    let p = &cfg.pairgen;
    if p.max_hop == 0 {
        return Err(Error::Usage("max_hop must be at least 1".into()));
    }
    let sampler = SamplerConfig::new(p.negative_rate, cfg.seed)
        .map_err(|e| Error::Config(e.to_string()))?
        .with_within_case(p.within_case_negatives);
    let split = match &p.split {
        Some(path) => {
            run.input(path)?;
            Some(read_split(path)?)
        }
        None => None,
    };

    let mut instances: Vec<NliInstance> = Vec::new();
    match (&p.gdpr_requirements, &p.gdpr_dpa) {
        (Some(r), Some(d)) => {
            run.input(r)?;
            run.input(d)?;
            let reqs: Vec<RequirementText> = jsonl::read(r)?;
            let dpa: Vec<DpaSentence> = jsonl::read(d)?;
            instances.extend(build_gdpr_nli(&reqs, &dpa, &sampler));
        }
        (None, None) => {}
        _ => return Err(Error::Usage("gdpr_requirements and gdpr_dpa go together".into())),
    }

    if !cfg.inputs.is_empty() {
        let files = input_files(cfg, &mut run)?;
        let cases = load_valid_cases(&files, p.skip_invalid)?;
        for case in &cases {
            instances.extend(cae_pairs(case, p.max_hop));
        }
        // negatives never pair text across a split boundary
        match &split {
            Some(spec) => {
                let mut train = Vec::new();
                let mut test = Vec::new();
                for c in &cases {
                    match spec.side(&c.meta.requirement_id) {
                        Some(SplitSide::Train) => train.push(c.clone()),
                        Some(SplitSide::Test) => test.push(c.clone()),
                        None => {
                            return Err(acnli_core::pairgen::SplitError::UnknownRequirement(c.meta.requirement_id.clone()).into())
                        }
                    }
                }
                instances.extend(cae_negatives(&train, &sampler));
                instances.extend(cae_negatives(&test, &sampler));
            }
            None => instances.extend(cae_negatives(&cases, &sampler)),
        }
    } else if instances.is_empty() {
        return Err(Error::Usage("no case inputs and no GDPR inputs".into()));
    }

    let max_hop = instances.iter().map(|i| i.hop as usize).max().unwrap_or(1).max(p.max_hop as usize);
    let summary = match &split {
        Some(spec) => {
            let (train, test) = split_by_requirement(instances, spec)?;
            run.write_jsonl("train.jsonl", &train)?;
            run.write_jsonl("test.jsonl", &test)?;
            let (a, b) = (HopCounts::of(&train, Variant::WoChain), HopCounts::of(&test, Variant::WoChain));
            run.write("hop_counts.csv", &report::hop_table_csv(&[("Train", &a), ("Test", &b)], max_hop))?;
            format!("{} train and {} test instances", train.len(), test.len())
        }
        None => {
            run.write_jsonl("dataset.jsonl", &instances)?;
            let a = HopCounts::of(&instances, Variant::WoChain);
            run.write("hop_counts.csv", &report::hop_table_csv(&[("Dataset", &a)], max_hop))?;
            format!("{} instances", instances.len())
        }
    };
    run.finish(exit::OK, summary)
}

fn scorer_label(cfg: &RunConfig) -> String {
    use crate::scorer::ScorerConfig;
    if let Some(n) = &cfg.faithfulness.scorer_name {
        return n.clone();
    }
    match &cfg.faithfulness.scorer {
        ScorerConfig::BuiltinToy { .. } => "builtin_toy".into(),
        ScorerConfig::Constant { .. } => "constant".into(),
        ScorerConfig::ExternalHttp { endpoint, .. } => endpoint.clone(),
    }
}

pub fn run_faithfulness(cfg: &RunConfig, offline: bool) -> Result<CommandOutcome> {
    let mut run = Run::start("faithfulness", cfg, offline)?;
    let f = &cfg.faithfulness;
    let dataset = f
        .dataset
        .as_ref()
        .ok_or_else(|| Error::Usage("faithfulness needs a dataset".into()))?;
    run.input(dataset)?;
    let data: Vec<NliInstance> = jsonl::read(dataset)?;
    let instances: Vec<EvalInstance> = data
        .iter()
        .map(|inst| {
            let (premise, hypothesis) = render_input(inst, &f.separator);
            EvalInstance {
                id: inst.id.clone(),
                premise,
                hypothesis,
                gold: inst.label,
            }
        })
        .collect();
    let scorer = f.scorer.build(offline)?;
    let scorer: &(dyn Scorer + Send + Sync) = &*scorer;

    let rankings: Vec<AttributionRanking> = match &f.rankings {
        Some(path) => {
            run.input(path)?;
            jsonl::read(path)?
        }
        None => {
            let r = instances
                .par_iter()
                .map(|i| occlusion_attribution(&scorer, &i.id, &i.premise, &i.hypothesis))
                .collect::<Result<Vec<_>, _>>()?;
            run.write_jsonl("rankings.jsonl", &r)?;
            r
        }
    };

    // every method must cover every instance; checked here because the
    // evaluation below runs on chunks
    let mut have: std::collections::BTreeMap<&str, std::collections::BTreeSet<&str>> = Default::default();
    for r in &rankings {
        have.entry(r.method.as_str()).or_default().insert(r.instance_id.as_str());
    }
    for (method, ids) in &have {
        if let Some(missing) = instances.iter().find(|i| !ids.contains(i.id.as_str())) {
            return Err(acnli_core::faithfulness::FaithfulnessError::MissingRanking {
                instance: missing.id.clone(),
                method: (*method).into(),
            }
            .into());
        }
    }

    let fcfg = FaithfulnessConfig {
        bins: f.bins.clone(),
        perturbation: f.perturbation.clone(),
    };
    let chunk = instances.len().div_ceil(rayon::current_num_threads().max(1)).max(1);
    let parts = instances
        .par_chunks(chunk)
        .map(|part| {
            let ids: std::collections::BTreeSet<&str> = part.iter().map(|i| i.id.as_str()).collect();
            let mine: Vec<AttributionRanking> = rankings
                .iter()
                .filter(|r| ids.contains(r.instance_id.as_str()))
                .cloned()
                .collect();
            evaluate_records(&scorer, part, &mine, &fcfg)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut records: Vec<_> = parts.into_iter().flatten().collect();
    // chunks are method-major internally; restore one global method-major order
    records.sort_by(|a, b| a.method.cmp(&b.method));
    if records.is_empty() && !instances.is_empty() {
        return Err(acnli_core::faithfulness::FaithfulnessError::MissingRanking {
            instance: instances[0].id.clone(),
            method: "*".into(),
        }
        .into());
    }
    let aggregates = aggregate_records(
        &records,
        &PermutationConfig {
            n_perm: f.n_perm,
            seed: cfg.seed,
        },
    );
    run.write_jsonl("records.jsonl", &records)?;
    let label = scorer_label(cfg);
    let rows: Vec<(String, _)> = aggregates.iter().map(|a| (label.clone(), a.clone())).collect();
    run.write("faithfulness_table.csv", &report::faithfulness_table_csv(&rows))?;
    run.write("faithfulness_pvalues.csv", &report::faithfulness_pvalues_csv(&rows))?;
    let mut agg_json = serde_json::to_string_pretty(&aggregates).expect("aggregates serialize");
    agg_json.push('\n');
    run.write("aggregates.json", &agg_json)?;
    run.finish(exit::OK, format!("{} records over {} methods", records.len(), aggregates.len()))
}

/// JSON array or JSON Lines of requirements.
pub fn read_requirements(path: &Path) -> Result<Vec<Requirement>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    } else {
        jsonl::from_str(&text, path)
    }
}

pub fn run_generate(cfg: &RunConfig, offline: bool) -> Result<CommandOutcome> {
    let mut run = Run::start("generate", cfg, offline)?;
    let g = &cfg.generate;
    let req_path = g
        .requirements
        .as_ref()
        .ok_or_else(|| Error::Usage("generate needs a requirements file".into()))?;
    run.input(req_path)?;
    if let Some(crate::chat::ChatConfig::Mock { fixtures }) = &g.client {
        run.input(fixtures)?;
    }
    let requirements = read_requirements(req_path)?;
    if g.models.is_empty() {
        return Err(Error::Usage("generate needs at least one model".into()));
    }
    let client = g
        .client
        .as_ref()
        .ok_or_else(|| Error::Usage("generate needs a chat client (mock fixtures or endpoint)".into()))?
        .build(offline)?;
    let job = GenerationJob {
        models: g.models.clone(),
        requirements,
        n_calls: g.n_calls,
        template: PromptTemplate {
            case_definition: g.case_definition.clone().unwrap_or_else(|| DEFAULT_CASE_DEFINITION.into()),
            format: g.format.clone(),
        },
        rules: TransitionRules::default(),
        concurrency: g.concurrency,
        raw_dir: Some(cfg.out.join("raw")),
    };
    let mut outcomes = generate(&*client, &job)?;
    if let Some(repair) = &g.repair_model {
        outcomes = repair_round(&*client, repair, &job, outcomes)?;
    }
    let raw_dir = cfg.out.join("raw");
    let mut raw_files: Vec<PathBuf> = fs::read_dir(&raw_dir)
        .map_err(|e| Error::io(&raw_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    raw_files.sort();
    for f in raw_files {
        run.record(f)?;
    }
    run.write_jsonl("outcomes.jsonl", &outcomes)?;
    run.write("success_table.csv", &report::success_table_csv(&success_rate(&outcomes)))?;
    let errors = outcomes.iter().filter(|o| o.status != OutcomeStatus::ValidJsonCase).count();
    run.write("error_summary.csv", &report::error_summary_csv(errors, outcomes.len()))?;
    let mut counts = String::from("status,count\n");
    for (s, n) in status_counts(&outcomes) {
        counts.push_str(&format!("{},{n}\n", s.as_str()));
    }
    run.write("status_counts.csv", &counts)?;

    let all_transport = !outcomes.is_empty() && outcomes.iter().all(|o| o.status == OutcomeStatus::TransportError);
    let code = if all_transport { exit::EXTERNAL } else { exit::OK };
    run.finish(code, format!("{errors} error outputs of {} calls", outcomes.len()))
}
