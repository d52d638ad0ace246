//! NLI instance construction.
//!
//! Two sources feed the same instance type:
//!
//! * requirement / DPA sentence pairs, where the requirement text is the
//!   premise and the contract sentence the hypothesis;
//! * assurance cases, where every ancestor -> descendant pair of the CAE tree
//!   is an entailment instance whose hop count is the path length.
//!
//! Negatives are drawn with independent Bernoulli trials from generators
//! keyed by `(seed, unit id)`, so output does not depend on iteration order
//! across units.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cae::{AssuranceCase, IndexedTree};
use crate::rng::keyed_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    NotEntailment,
    Entailment,
}

impl Label {
    /// Class index used by probability vectors: 0 = not_entailment.
    pub fn index(self) -> usize {
        match self {
            Label::NotEntailment => 0,
            Label::Entailment => 1,
        }
    }

    pub fn from_index(i: usize) -> Label {
        if i == 1 {
            Label::Entailment
        } else {
            Label::NotEntailment
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Intermediate path texts appended to the premise.
    Chain,
    WoChain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    GdprDpa,
    Cae,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Cae {
        premise_case: String,
        premise_node: String,
        hypothesis_case: String,
        hypothesis_node: String,
    },
    GdprDpa {
        requirement_id: String,
        dpa_sentence_id: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NliInstance {
    pub id: String,
    pub premise: String,
    pub hypothesis: String,
    /// Texts strictly between premise and hypothesis on the donor path, in
    /// path order; empty for hop 1.
    pub intermediate_texts: Vec<String>,
    pub label: Label,
    pub hop: u32,
    pub variant: Variant,
    pub requirement_id: String,
    pub source: Source,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error("negative rate {0} is outside [0, 1]")]
    RateOutOfRange(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SamplerConfigSpec")]
pub struct SamplerConfig {
    negative_rate: f64,
    pub seed: u64,
    pub within_case_negatives: bool,
}

#[derive(Deserialize)]
struct SamplerConfigSpec {
    #[serde(default = "default_rate")]
    negative_rate: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    within_case_negatives: bool,
}

fn default_rate() -> f64 {
    SamplerConfig::DEFAULT_RATE
}

impl TryFrom<SamplerConfigSpec> for SamplerConfig {
    type Error = SamplerError;
    fn try_from(s: SamplerConfigSpec) -> Result<Self, Self::Error> {
        Ok(SamplerConfig::new(s.negative_rate, s.seed)?.with_within_case(s.within_case_negatives))
    }
}

impl SamplerConfig {
    pub const DEFAULT_RATE: f64 = 0.1;

    pub fn new(negative_rate: f64, seed: u64) -> Result<Self, SamplerError> {
        if !(0.0..=1.0).contains(&negative_rate) {
            return Err(SamplerError::RateOutOfRange(negative_rate));
        }
        Ok(SamplerConfig {
            negative_rate,
            seed,
            within_case_negatives: false,
        })
    }

    pub fn with_within_case(mut self, enabled: bool) -> Self {
        self.within_case_negatives = enabled;
        self
    }

    pub fn negative_rate(&self) -> f64 {
        self.negative_rate
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig::new(Self::DEFAULT_RATE, 0).expect("default rate is valid")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementText {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DpaSentence {
    pub id: String,
    pub text: String,
    /// Requirements this sentence satisfies; may be empty.
    #[serde(default)]
    pub gold: Vec<String>,
}

/// Requirement x DPA sentence pairs. Every gold match is an entailment; each
/// non-matching pair is kept as a negative with probability
/// `cfg.negative_rate`, using one generator per DPA sentence.
///
/// Requirement and sentence ids are expected to be unique.
pub fn build_gdpr_nli(requirements: &[RequirementText], dpa: &[DpaSentence], cfg: &SamplerConfig) -> Vec<NliInstance> {
    let mut out = Vec::new();
    for sentence in dpa {
        let mut rng = keyed_rng(cfg.seed, &format!("gdpr:{}", sentence.id));
        for req in requirements {
            let label = if sentence.gold.iter().any(|g| g == &req.id) {
                Label::Entailment
            } else if rng.random_bool(cfg.negative_rate) {
                Label::NotEntailment
            } else {
                continue;
            };
            out.push(NliInstance {
                id: format!("gdpr:{}:{}", req.id, sentence.id),
                premise: req.text.clone(),
                hypothesis: sentence.text.clone(),
                intermediate_texts: Vec::new(),
                label,
                hop: 1,
                variant: Variant::WoChain,
                requirement_id: req.id.clone(),
                source: Source::GdprDpa,
                provenance: Provenance::GdprDpa {
                    requirement_id: req.id.clone(),
                    dpa_sentence_id: sentence.id.clone(),
                },
            });
        }
    }
    out
}

fn texts(case: &AssuranceCase, tree: &IndexedTree, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| case.nodes[&tree.ids[i]].text.clone()).collect()
}

struct PairSpec<'a> {
    premise_case: &'a AssuranceCase,
    premise_tree: &'a IndexedTree,
    premise: usize,
    hypothesis_case: &'a AssuranceCase,
    hypothesis_tree: &'a IndexedTree,
    hypothesis: usize,
    hop: u32,
    intermediates: Vec<String>,
    label: Label,
}

fn push_both_variants(out: &mut Vec<NliInstance>, spec: PairSpec<'_>) {
    let premise_case = spec.premise_case.case_id();
    let hypothesis_case = spec.hypothesis_case.case_id();
    let u = &spec.premise_tree.ids[spec.premise];
    let v = &spec.hypothesis_tree.ids[spec.hypothesis];
    let tag = match spec.label {
        Label::Entailment => "pos",
        Label::NotEntailment => "neg",
    };
    let base = if premise_case == hypothesis_case {
        format!("cae:{tag}:{premise_case}:{u}>{v}")
    } else {
        format!("cae:{tag}:{premise_case}:{u}>{hypothesis_case}:{v}")
    };
    for variant in [Variant::WoChain, Variant::Chain] {
        let suffix = match variant {
            Variant::WoChain => "wo_chain",
            Variant::Chain => "chain",
        };
        out.push(NliInstance {
            id: format!("{base}:{suffix}"),
            premise: spec.premise_case.nodes[u].text.clone(),
            hypothesis: spec.hypothesis_case.nodes[v].text.clone(),
            intermediate_texts: spec.intermediates.clone(),
            label: spec.label,
            hop: spec.hop,
            variant,
            requirement_id: spec.premise_case.meta.requirement_id.clone(),
            source: Source::Cae,
            provenance: Provenance::Cae {
                premise_case: premise_case.clone(),
                premise_node: u.clone(),
                hypothesis_case: hypothesis_case.clone(),
                hypothesis_node: v.clone(),
            },
        });
    }
}

/// Every ancestor -> descendant pair with path length `<= max_hop`, emitted
/// once per variant (wo_chain first). Premise nodes follow preorder; for each
/// premise, descendants follow preorder.
pub fn cae_pairs(case: &AssuranceCase, max_hop: u32) -> Vec<NliInstance> {
    let tree = case.indexed();
    let mut out = Vec::new();
    for u in 0..tree.len() {
        // preorder: the subtree of u is the contiguous range after u
        for v in u + 1..tree.len() {
            if tree.depth[v] <= tree.depth[u] {
                break;
            }
            let hop = (tree.depth[v] - tree.depth[u]) as u32;
            if hop > max_hop {
                continue;
            }
            let interior = tree.interior_path(u, v).expect("v is in the subtree of u");
            push_both_variants(
                &mut out,
                PairSpec {
                    premise_case: case,
                    premise_tree: &tree,
                    premise: u,
                    hypothesis_case: case,
                    hypothesis_tree: &tree,
                    hypothesis: v,
                    hop,
                    intermediates: texts(case, &tree, &interior),
                    label: Label::Entailment,
                },
            );
        }
    }
    out
}

/// Sampled not_entailment pairs.
///
/// Candidates, for each premise case A (cases visited in case-id order):
///
/// * every `(u in A, v in B)` for every other case B with a different
///   requirement. The pair mimics the hop between `v` and its ancestor at
///   `u`'s depth: `hop = depth(v) - depth(u)` with that ancestor's interior
///   path as intermediates, or hop 1 without intermediates when `v` is not
///   deeper than `u`;
/// * with `within_case_negatives`, every ordered `(u, v)` in A where `u` is
///   not an ancestor of `v`, with hop = tree distance and the undirected
///   interior path as intermediates.
///
/// Each candidate is one Bernoulli(`negative_rate`) draw from a generator
/// keyed by `(seed, A)`. Ancestor pairs are never candidates, so no negative
/// coincides with a positive.
pub fn cae_negatives(cases: &[AssuranceCase], cfg: &SamplerConfig) -> Vec<NliInstance> {
    let mut order: Vec<(String, usize)> = cases.iter().enumerate().map(|(i, c)| (c.case_id(), i)).collect();
    order.sort();
    let trees: Vec<IndexedTree> = cases.iter().map(AssuranceCase::indexed).collect();

    let mut out = Vec::new();
    for (case_id, a) in &order {
        let (case_a, tree_a) = (&cases[*a], &trees[*a]);
        let mut rng = keyed_rng(cfg.seed, &format!("cae-neg:{case_id}"));
        for (_, b) in &order {
            let (case_b, tree_b) = (&cases[*b], &trees[*b]);
            if case_b.meta.requirement_id == case_a.meta.requirement_id {
                continue;
            }
            for u in 0..tree_a.len() {
                for v in 0..tree_b.len() {
                    if !rng.random_bool(cfg.negative_rate) {
                        continue;
                    }
                    let (hop, interior) = mimic_hop(tree_b, v, tree_a.depth[u]);
                    push_both_variants(
                        &mut out,
                        PairSpec {
                            premise_case: case_a,
                            premise_tree: tree_a,
                            premise: u,
                            hypothesis_case: case_b,
                            hypothesis_tree: tree_b,
                            hypothesis: v,
                            hop,
                            intermediates: texts(case_b, tree_b, &interior),
                            label: Label::NotEntailment,
                        },
                    );
                }
            }
        }
        if cfg.within_case_negatives {
            for u in 0..tree_a.len() {
                for v in 0..tree_a.len() {
                    if u == v || tree_a.is_ancestor(u, v) {
                        continue;
                    }
                    if !rng.random_bool(cfg.negative_rate) {
                        continue;
                    }
                    let (hop, interior) = tree_a.path_between(u, v);
                    push_both_variants(
                        &mut out,
                        PairSpec {
                            premise_case: case_a,
                            premise_tree: tree_a,
                            premise: u,
                            hypothesis_case: case_a,
                            hypothesis_tree: tree_a,
                            hypothesis: v,
                            hop: hop as u32,
                            intermediates: texts(case_a, tree_a, &interior),
                            label: Label::NotEntailment,
                        },
                    );
                }
            }
        }
    }
    out
}

/// Number of candidate pairs [`cae_negatives`] draws over.
pub fn negative_candidate_count(cases: &[AssuranceCase], within_case: bool) -> usize {
    let mut total = 0;
    for a in cases {
        for b in cases {
            if a.meta.requirement_id != b.meta.requirement_id {
                total += a.len() * b.len();
            }
        }
        if within_case {
            let t = a.indexed();
            let ancestor_pairs: usize = t.depth.iter().sum();
            total += a.len() * (a.len() - 1) - ancestor_pairs;
        }
    }
    total
}

fn mimic_hop(tree: &IndexedTree, v: usize, premise_depth: usize) -> (u32, Vec<usize>) {
    let depth_v = tree.depth[v];
    if depth_v <= premise_depth {
        return (1, Vec::new());
    }
    let mut anc = v;
    while tree.depth[anc] > premise_depth {
        anc = tree.parent[anc].expect("deeper than root");
    }
    let interior = tree.interior_path(anc, v).expect("ancestor of v");
    ((depth_v - premise_depth) as u32, interior)
}

pub const DEFAULT_SEPARATOR: &str = "\n";

/// Model input for an instance. `Chain` appends the intermediate texts to the
/// premise, each preceded by `separator`; the hypothesis is never changed.
pub fn render_input(instance: &NliInstance, separator: &str) -> (String, String) {
    let premise = match instance.variant {
        Variant::WoChain => instance.premise.clone(),
        Variant::Chain => {
            let mut p = instance.premise.clone();
            for t in &instance.intermediate_texts {
                p.push_str(separator);
                p.push_str(t);
            }
            p
        }
    };
    (premise, instance.hypothesis.clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("requirement `{0}` is listed for both train and test")]
    Overlap(String),
    #[error("requirement `{0}` is in neither split")]
    UnknownRequirement(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SplitSpecRaw")]
pub struct SplitSpec {
    train: BTreeSet<String>,
    test: BTreeSet<String>,
}

#[derive(Deserialize)]
struct SplitSpecRaw {
    #[serde(default)]
    train: Vec<String>,
    #[serde(default)]
    test: Vec<String>,
}

impl TryFrom<SplitSpecRaw> for SplitSpec {
    type Error = SplitError;
    fn try_from(raw: SplitSpecRaw) -> Result<Self, SplitError> {
        SplitSpec::new(raw.train, raw.test)
    }
}

impl SplitSpec {
    pub fn new<I, J, S, T>(train: I, test: J) -> Result<Self, SplitError>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let train: BTreeSet<String> = train.into_iter().map(Into::into).collect();
        let test: BTreeSet<String> = test.into_iter().map(Into::into).collect();
        if let Some(both) = train.intersection(&test).next() {
            return Err(SplitError::Overlap(both.clone()));
        }
        Ok(SplitSpec { train, test })
    }

    pub fn train(&self) -> &BTreeSet<String> {
        &self.train
    }

    pub fn test(&self) -> &BTreeSet<String> {
        &self.test
    }

    pub fn side(&self, requirement: &str) -> Option<SplitSide> {
        if self.train.contains(requirement) {
            Some(SplitSide::Train)
        } else if self.test.contains(requirement) {
            Some(SplitSide::Test)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitSide {
    Train,
    Test,
}

/// Partitions instances by requirement id, preserving order within each side.
pub fn split_by_requirement(
    instances: Vec<NliInstance>,
    spec: &SplitSpec,
) -> Result<(Vec<NliInstance>, Vec<NliInstance>), SplitError> {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for inst in instances {
        match spec.side(&inst.requirement_id) {
            Some(SplitSide::Train) => train.push(inst),
            Some(SplitSide::Test) => test.push(inst),
            None => return Err(SplitError::UnknownRequirement(inst.requirement_id)),
        }
    }
    Ok((train, test))
}

/// `All` plus entailment counts per hop, for one variant.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HopCounts {
    pub all: usize,
    /// `per_hop[k - 1]` = entailment instances with hop k.
    pub per_hop: Vec<usize>,
}

impl HopCounts {
    pub fn of(instances: &[NliInstance], variant: Variant) -> HopCounts {
        let mut counts = HopCounts::default();
        for inst in instances.iter().filter(|i| i.variant == variant) {
            counts.all += 1;
            if inst.label == Label::Entailment {
                let k = inst.hop as usize;
                if counts.per_hop.len() < k {
                    counts.per_hop.resize(k, 0);
                }
                counts.per_hop[k - 1] += 1;
            }
        }
        counts
    }

    pub fn hop(&self, k: usize) -> usize {
        self.per_hop.get(k.wrapping_sub(1)).copied().unwrap_or(0)
    }
}
