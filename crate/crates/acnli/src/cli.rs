//! Command-line front end. Flags override values from `--config`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::chat::ChatConfig;
use crate::commands::{run_faithfulness, run_generate, run_metrics, run_pairgen, run_validate, CommandOutcome};
use crate::config::{RunConfig, ScopeChoice};
use crate::error::{exit, Error, Result};
use crate::scorer::ScorerConfig;
use acnli_core::faithfulness::Perturbation;

#[derive(Debug, Parser)]
#[command(name = "acnli", version, about = "Assurance cases to multi-hop NLI data, agreement metrics and faithfulness evaluation")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random choice in the run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Refuse any network access.
    #[arg(long, global = true)]
    pub offline: bool,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate assurance-case files.
    Validate(ValidateArgs),
    /// Flat and graph-edit-distance agreement between cases.
    Metrics(MetricsArgs),
    /// Build premise/hypothesis datasets.
    Pairgen(PairgenArgs),
    /// Comprehensiveness/sufficiency AOPC of attribution rankings.
    Faithfulness(FaithfulnessArgs),
    /// Generate assurance cases with a chat model and account success rates.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Files, directories or glob patterns.
    pub inputs: Vec<String>,
    /// Write the canonical JSON of every parseable case under `<out>/canonical`.
    #[arg(long)]
    pub write_canonical: bool,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Files, directories or glob patterns.
    pub inputs: Vec<String>,
    /// Which agreement table to compute.
    #[arg(long, value_enum)]
    pub scope: Option<ScopeChoice>,
    /// Drop groups with too few cases instead of failing.
    #[arg(long)]
    pub skip_small_groups: bool,
    /// Ignore files that fail parsing or validation.
    #[arg(long)]
    pub skip_invalid: bool,
    /// Flat counts only.
    #[arg(long)]
    pub no_ged: bool,
    /// Expanded-state budget for the exact GED search.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PairgenArgs {
    /// Files, directories or glob patterns.
    pub inputs: Vec<String>,
    /// Negative sampling rate in [0, 1].
    #[arg(long)]
    pub rate: Option<f64>,
    /// Longest ancestor distance kept as a positive pair.
    #[arg(long)]
    pub max_hop: Option<u32>,
    /// Separator between premise and intermediate texts in chain inputs.
    #[arg(long)]
    pub separator: Option<String>,
    /// JSON file `{"train": [...], "test": [...]}` of requirement ids.
    #[arg(long)]
    pub split: Option<PathBuf>,
    /// Also sample non-ancestor pairs inside each case.
    #[arg(long)]
    pub within_case: bool,
    /// Ignore files that fail parsing or validation.
    #[arg(long)]
    pub skip_invalid: bool,
    /// Requirements JSONL of `{id, text}`, paired with `--gdpr-dpa`.
    #[arg(long, requires = "gdpr_dpa")]
    pub gdpr_requirements: Option<PathBuf>,
    /// DPA sentences JSONL of `{id, text, gold: [...]}`.
    #[arg(long, requires = "gdpr_requirements")]
    pub gdpr_dpa: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FaithfulnessArgs {
    /// Dataset JSONL from `pairgen`.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Attribution JSONL; occlusion is computed when omitted.
    #[arg(long)]
    pub rankings: Option<PathBuf>,
    /// Permutations for the significance test.
    #[arg(long)]
    pub n_perm: Option<usize>,
    /// Score with an external `/score` service at this base URL.
    #[arg(long)]
    pub scorer_endpoint: Option<String>,
    /// Replace removed tokens with this token instead of deleting them.
    #[arg(long)]
    pub mask: Option<String>,
    /// Model column in the report.
    #[arg(long)]
    pub scorer_name: Option<String>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// JSON array or JSONL of `{id, name, description, rationale}`.
    #[arg(long)]
    pub requirements: Option<PathBuf>,
    /// Model name; repeatable.
    #[arg(long = "model")]
    pub models: Vec<String>,
    /// Calls per model and requirement.
    #[arg(long)]
    pub n_calls: Option<u32>,
    /// Replay replies from this fixture file instead of calling a service.
    #[arg(long, conflicts_with = "endpoint")]
    pub mock: Option<PathBuf>,
    /// Chat endpoint URL.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Environment variable holding the endpoint's bearer token.
    #[arg(long)]
    pub api_key_env: Option<String>,
    /// Parallel requests.
    #[arg(long)]
    pub concurrency: Option<usize>,
    /// Second round: ask this model to rewrite failed replies.
    #[arg(long)]
    pub repair_model: Option<String>,
}

fn with_inputs(cfg: &mut RunConfig, inputs: &[String]) {
    if !inputs.is_empty() {
        cfg.inputs = inputs.to_vec();
    }
}

/// Effective configuration: file values, then flag overrides.
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    match &cli.command {
        Command::Validate(a) => {
            with_inputs(&mut cfg, &a.inputs);
            cfg.validate.write_canonical |= a.write_canonical;
        }
        Command::Metrics(a) => {
            with_inputs(&mut cfg, &a.inputs);
            let m = &mut cfg.metrics;
            if let Some(s) = a.scope {
                m.scope = s;
            }
            m.skip_small_groups |= a.skip_small_groups;
            m.skip_invalid |= a.skip_invalid;
            if a.no_ged {
                m.with_ged = false;
            }
            if let Some(b) = a.budget {
                m.budget = b;
            }
        }
        Command::Pairgen(a) => {
            with_inputs(&mut cfg, &a.inputs);
            let p = &mut cfg.pairgen;
            if let Some(r) = a.rate {
                p.negative_rate = r;
            }
            if let Some(h) = a.max_hop {
                p.max_hop = h;
            }
            if let Some(s) = &a.separator {
                p.separator = unescape(s);
            }
            if a.split.is_some() {
                p.split = a.split.clone();
            }
            p.within_case_negatives |= a.within_case;
            p.skip_invalid |= a.skip_invalid;
            if a.gdpr_requirements.is_some() {
                p.gdpr_requirements = a.gdpr_requirements.clone();
                p.gdpr_dpa = a.gdpr_dpa.clone();
            }
        }
        Command::Faithfulness(a) => {
            let f = &mut cfg.faithfulness;
            if a.dataset.is_some() {
                f.dataset = a.dataset.clone();
            }
            if a.rankings.is_some() {
                f.rankings = a.rankings.clone();
            }
            if let Some(n) = a.n_perm {
                f.n_perm = n;
            }
            if let Some(e) = &a.scorer_endpoint {
                f.scorer = ScorerConfig::ExternalHttp {
                    endpoint: e.clone(),
                    timeout_secs: 30,
                    max_batch: 64,
                };
            }
            if let Some(m) = &a.mask {
                f.perturbation = Perturbation::Mask(m.clone());
            }
            if a.scorer_name.is_some() {
                f.scorer_name = a.scorer_name.clone();
            }
        }
        Command::Generate(a) => {
            let g = &mut cfg.generate;
            if a.requirements.is_some() {
                g.requirements = a.requirements.clone();
            }
            if !a.models.is_empty() {
                g.models = a.models.clone();
            }
            if let Some(n) = a.n_calls {
                g.n_calls = n;
            }
            if let Some(c) = a.concurrency {
                g.concurrency = c;
            }
            if let Some(m) = &a.mock {
                g.client = Some(ChatConfig::Mock { fixtures: m.clone() });
            }
            if let Some(e) = &a.endpoint {
                g.client = Some(ChatConfig::Http {
                    endpoint: e.clone(),
                    api_key_env: a.api_key_env.clone(),
                    temperature: 0.0,
                    timeout_secs: 120,
                });
            }
            if a.repair_model.is_some() {
                g.repair_model = a.repair_model.clone();
            }
        }
    }
    Ok(cfg)
}

/// `\n` and `\t` escapes as typed on a shell.
fn unescape(s: &str) -> String {
    s.replace("\\n", "\n").replace("\\t", "\t")
}

pub fn execute(cli: &Cli) -> Result<CommandOutcome> {
    let cfg = resolve(cli)?;
    match cli.command {
        Command::Validate(_) => run_validate(&cfg, cli.offline),
        Command::Metrics(_) => run_metrics(&cfg, cli.offline),
        Command::Pairgen(_) => run_pairgen(&cfg, cli.offline),
        Command::Faithfulness(_) => run_faithfulness(&cfg, cli.offline),
        Command::Generate(_) => run_generate(&cfg, cli.offline),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Messages go to stdout/stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

impl From<clap::Error> for Error {
    fn from(e: clap::Error) -> Self {
        Error::Usage(e.to_string())
    }
}
