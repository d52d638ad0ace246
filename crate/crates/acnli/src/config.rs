//! Run configuration, read from TOML. Every section is optional; command-line
//! flags override file values.

use std::path::{Path, PathBuf};

use acnli_core::faithfulness::Perturbation;
use acnli_core::ged::{CostModelSpec, DEFAULT_BUDGET};
use serde::{Deserialize, Serialize};

use crate::chat::ChatConfig;
use crate::error::{Error, Result};
use crate::scorer::ScorerConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Files, directories (every `*.json` inside) or glob patterns.
    #[serde(default)]
    pub inputs: Vec<String>,
    #[serde(default)]
    pub validate: ValidateSection,
    #[serde(default)]
    pub metrics: MetricsSection,
    #[serde(default)]
    pub pairgen: PairgenSection,
    #[serde(default)]
    pub faithfulness: FaithfulnessSection,
    #[serde(default)]
    pub generate: GenerateSection,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out: default_out(),
            inputs: Vec::new(),
            validate: ValidateSection::default(),
            metrics: MetricsSection::default(),
            pairgen: PairgenSection::default(),
            faithfulness: FaithfulnessSection::default(),
            generate: GenerateSection::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSection {
    /// Also write the canonical form of every parseable case.
    #[serde(default)]
    pub write_canonical: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ScopeChoice {
    Intra,
    Inter,
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsSection {
    #[serde(default)]
    pub scope: ScopeChoice,
    #[serde(default)]
    pub skip_small_groups: bool,
    #[serde(default)]
    pub skip_invalid: bool,
    #[serde(default = "yes")]
    pub with_ged: bool,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub costs: CostModelSpec,
}

fn yes() -> bool {
    true
}
fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

impl Default for MetricsSection {
    fn default() -> Self {
        MetricsSection {
            scope: ScopeChoice::Both,
            skip_small_groups: false,
            skip_invalid: false,
            with_ged: true,
            budget: DEFAULT_BUDGET,
            costs: CostModelSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairgenSection {
    #[serde(default = "default_rate")]
    pub negative_rate: f64,
    #[serde(default)]
    pub within_case_negatives: bool,
    #[serde(default = "default_max_hop")]
    pub max_hop: u32,
    #[serde(default = "default_separator")]
    pub separator: String,
    /// JSON `{"train": [...], "test": [...]}` of requirement ids.
    #[serde(default)]
    pub split: Option<PathBuf>,
    #[serde(default)]
    pub skip_invalid: bool,
    /// JSONL of `{id, text}` requirements for requirement/DPA pairs.
    #[serde(default)]
    pub gdpr_requirements: Option<PathBuf>,
    /// JSONL of `{id, text, gold: [...]}` DPA sentences.
    #[serde(default)]
    pub gdpr_dpa: Option<PathBuf>,
}

fn default_rate() -> f64 {
    acnli_core::pairgen::SamplerConfig::DEFAULT_RATE
}
fn default_max_hop() -> u32 {
    4
}
fn default_separator() -> String {
    acnli_core::pairgen::DEFAULT_SEPARATOR.into()
}

impl Default for PairgenSection {
    fn default() -> Self {
        PairgenSection {
            negative_rate: default_rate(),
            within_case_negatives: false,
            max_hop: default_max_hop(),
            separator: default_separator(),
            split: None,
            skip_invalid: false,
            gdpr_requirements: None,
            gdpr_dpa: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaithfulnessSection {
    /// NLI dataset JSONL as written by `pairgen`.
    #[serde(default)]
    pub dataset: Option<PathBuf>,
    /// Attribution JSONL; occlusion attributions are computed when absent.
    #[serde(default)]
    pub rankings: Option<PathBuf>,
    #[serde(default = "default_bins")]
    pub bins: Vec<f64>,
    #[serde(default)]
    pub perturbation: Perturbation,
    #[serde(default = "default_n_perm")]
    pub n_perm: usize,
    /// Chain-variant premise separator.
    #[serde(default = "default_separator")]
    pub separator: String,
    /// Model column in the report.
    #[serde(default)]
    pub scorer_name: Option<String>,
    #[serde(default)]
    pub scorer: ScorerConfig,
}

fn default_bins() -> Vec<f64> {
    acnli_core::faithfulness::FaithfulnessConfig::default().bins
}
fn default_n_perm() -> usize {
    10_000
}

impl Default for FaithfulnessSection {
    fn default() -> Self {
        FaithfulnessSection {
            dataset: None,
            rankings: None,
            bins: default_bins(),
            perturbation: Perturbation::Delete,
            n_perm: default_n_perm(),
            separator: default_separator(),
            scorer_name: None,
            scorer: ScorerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSection {
    /// JSON array or JSONL of `{id, name, description, rationale}`.
    #[serde(default)]
    pub requirements: Option<PathBuf>,
    #[serde(default)]
    pub models: Vec<String>,
    #[serde(default = "default_n_calls")]
    pub n_calls: u32,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    #[serde(default = "default_format")]
    pub format: String,
    #[serde(default)]
    pub case_definition: Option<String>,
    #[serde(default)]
    pub client: Option<ChatConfig>,
    /// Model asked to rewrite failed replies in a second round.
    #[serde(default)]
    pub repair_model: Option<String>,
}

fn default_n_calls() -> u32 {
    5
}
fn default_concurrency() -> usize {
    4
}
fn default_format() -> String {
    acnli_core::harness::DEFAULT_FORMAT.into()
}

impl Default for GenerateSection {
    fn default() -> Self {
        GenerateSection {
            requirements: None,
            models: Vec::new(),
            n_calls: default_n_calls(),
            concurrency: default_concurrency(),
            format: default_format(),
            case_definition: None,
            client: None,
            repair_model: None,
        }
    }
}
