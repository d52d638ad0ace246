//! Rationale faithfulness of black-box entailment scorers.
//!
//! For an instance `x` with predicted class `j` (argmax of the unperturbed
//! prediction, fixed for all perturbations), and the top-`q` rationale `r` of
//! an attribution ranking over the hypothesis tokens:
//!
//! * comprehensiveness = `m(x)_j - m(x without r)_j`
//! * sufficiency       = `m(x)_j - m(r only)_j`
//!
//! AOPC averages either metric over the rationale fractions in
//! [`FaithfulnessConfig::bins`] (0.1, 0.2, ..., 1.0 by default). Tokens are
//! whitespace units; the unperturbed input is the token sequence re-joined
//! with single spaces, so keeping every token reproduces it exactly.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pairgen::Label;
use crate::rng::keyed_rng;
use crate::stats::Summary;

pub const PROB_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FaithfulnessError {
    #[error("scorer unavailable: {0}")]
    ScorerUnavailable(String),
    #[error("scorer protocol error: {0}")]
    Protocol(String),
    #[error("instance `{0}` has no tokens")]
    EmptyTokens(String),
    #[error("rationale fraction {0} is outside (0, 1]")]
    InvalidFraction(f64),
    #[error("ranking for `{0}` does not match the instance tokens")]
    RankingMismatch(String),
    #[error("no `{method}` ranking for instance `{instance}`")]
    MissingRanking { instance: String, method: String },
    #[error("invalid probability distribution [{0}, {1}]")]
    InvalidProbabilities(f64, f64),
}

/// Class probabilities `[not_entailment, entailment]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct ProbDist([f64; 2]);

impl ProbDist {
    pub fn new(not_entailment: f64, entailment: f64) -> Result<Self, FaithfulnessError> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !ok(not_entailment) || !ok(entailment) || (not_entailment + entailment - 1.0).abs() > PROB_TOLERANCE {
            return Err(FaithfulnessError::InvalidProbabilities(not_entailment, entailment));
        }
        Ok(ProbDist([not_entailment, entailment]))
    }

    pub fn from_entailment(p: f64) -> Result<Self, FaithfulnessError> {
        ProbDist::new(1.0 - p, p)
    }

    pub fn get(&self, class: Label) -> f64 {
        self.0[class.index()]
    }

    pub fn entailment(&self) -> f64 {
        self.0[1]
    }

    pub fn not_entailment(&self) -> f64 {
        self.0[0]
    }

    /// Ties go to not_entailment.
    pub fn argmax(&self) -> Label {
        if self.0[1] > self.0[0] {
            Label::Entailment
        } else {
            Label::NotEntailment
        }
    }
}

impl TryFrom<[f64; 2]> for ProbDist {
    type Error = FaithfulnessError;
    fn try_from(p: [f64; 2]) -> Result<Self, Self::Error> {
        ProbDist::new(p[0], p[1])
    }
}

impl From<ProbDist> for [f64; 2] {
    fn from(p: ProbDist) -> Self {
        p.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextPair {
    pub premise: String,
    pub hypothesis: String,
}

impl TextPair {
    pub fn new(premise: impl Into<String>, hypothesis: impl Into<String>) -> Self {
        TextPair {
            premise: premise.into(),
            hypothesis: hypothesis.into(),
        }
    }
}

/// Whitespace tokenization after trimming.
pub fn whitespace_tokens(text: &str) -> Vec<String> {
    text.split_whitespace().map(String::from).collect()
}

/// A deterministic premise/hypothesis classifier.
pub trait Scorer {
    /// One distribution per input, in input order.
    fn score_batch(&self, inputs: &[TextPair]) -> Result<Vec<ProbDist>, FaithfulnessError>;

    /// Tokenization attributions are expressed in.
    fn tokenize(&self, text: &str) -> Vec<String> {
        whitespace_tokens(text)
    }

    fn score(&self, premise: &str, hypothesis: &str) -> Result<ProbDist, FaithfulnessError> {
        let mut out = self.score_batch(&[TextPair::new(premise, hypothesis)])?;
        out.pop().ok_or_else(|| FaithfulnessError::Protocol("empty response".into()))
    }
}

impl<S: Scorer + ?Sized> Scorer for &S {
    fn score_batch(&self, inputs: &[TextPair]) -> Result<Vec<ProbDist>, FaithfulnessError> {
        (**self).score_batch(inputs)
    }
    fn tokenize(&self, text: &str) -> Vec<String> {
        (**self).tokenize(text)
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

/// Jaccard overlap of the whitespace token sets; 0 when both are empty.
pub fn jaccard(premise: &str, hypothesis: &str) -> f64 {
    let a: BTreeSet<&str> = premise.split_whitespace().collect();
    let b: BTreeSet<&str> = hypothesis.split_whitespace().collect();
    let union = a.union(&b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(&b).count() as f64 / union as f64
}

/// `P(entailment) = sigmoid(weight * jaccard(premise, hypothesis) + bias)`,
/// with weight 6 and bias -3 by default. Tokens compare as exact strings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyScorer {
    pub weight: f64,
    pub bias: f64,
}

impl Default for ToyScorer {
    fn default() -> Self {
        ToyScorer { weight: 6.0, bias: -3.0 }
    }
}

impl ToyScorer {
    pub fn entailment_probability(&self, premise: &str, hypothesis: &str) -> f64 {
        sigmoid(self.weight * jaccard(premise, hypothesis) + self.bias)
    }
}

impl Scorer for ToyScorer {
    fn score_batch(&self, inputs: &[TextPair]) -> Result<Vec<ProbDist>, FaithfulnessError> {
        Ok(inputs
            .iter()
            .map(|x| {
                let p = self.entailment_probability(&x.premise, &x.hypothesis);
                ProbDist([1.0 - p, p])
            })
            .collect())
    }
}

/// Ignores its input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantScorer(pub ProbDist);

impl Scorer for ConstantScorer {
    fn score_batch(&self, inputs: &[TextPair]) -> Result<Vec<ProbDist>, FaithfulnessError> {
        Ok(vec![self.0; inputs.len()])
    }
}

/// Per-token importance for one instance's hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionRanking {
    pub instance_id: String,
    pub method: String,
    pub tokens: Vec<String>,
    pub scores: Vec<f64>,
}

impl AttributionRanking {
    /// Token indices from most to least important; ties keep the earlier
    /// position first.
    pub fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.tokens.len()).collect();
        idx.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then(a.cmp(&b)));
        idx
    }

    fn check(&self) -> Result<(), FaithfulnessError> {
        if self.tokens.len() != self.scores.len() || self.scores.iter().any(|s| s.is_nan()) {
            return Err(FaithfulnessError::RankingMismatch(self.instance_id.clone()));
        }
        if self.tokens.is_empty() {
            return Err(FaithfulnessError::EmptyTokens(self.instance_id.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", content = "token", rename_all = "snake_case")]
pub enum Perturbation {
    /// Remove tokens; neighbours are joined by one space.
    #[default]
    Delete,
    /// Replace tokens with this mask token.
    Mask(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Comprehensiveness,
    Sufficiency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaithfulnessConfig {
    pub bins: Vec<f64>,
    #[serde(default)]
    pub perturbation: Perturbation,
}

impl Default for FaithfulnessConfig {
    fn default() -> Self {
        FaithfulnessConfig {
            bins: (1..=10).map(|i| i as f64 / 10.0).collect(),
            perturbation: Perturbation::Delete,
        }
    }
}

/// Size of the top-`q` rationale over `n` tokens: `ceil(q * n)`, at least 1.
pub fn rationale_size(q: f64, n: usize) -> Result<usize, FaithfulnessError> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(FaithfulnessError::InvalidFraction(q));
    }
    // guard against 0.3 * 10 = 3.0000000000000004
    let k = libm::ceil(q * n as f64 - 1e-9) as usize;
    Ok(k.clamp(1, n.max(1)))
}

fn render(tokens: &[String], keep: &[bool], perturbation: &Perturbation) -> String {
    let mut out = String::new();
    for (tok, &kept) in tokens.iter().zip(keep) {
        let piece = match (kept, perturbation) {
            (true, _) => tok.as_str(),
            (false, Perturbation::Delete) => continue,
            (false, Perturbation::Mask(mask)) => mask.as_str(),
        };
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(piece);
    }
    out
}

/// Hypothesis with the top-`q` rationale removed (`Comprehensiveness`) or
/// with only the rationale kept (`Sufficiency`).
pub fn perturbed_hypothesis(
    ranking: &AttributionRanking,
    q: f64,
    metric: Metric,
    perturbation: &Perturbation,
) -> Result<String, FaithfulnessError> {
    ranking.check()?;
    let n = ranking.tokens.len();
    let k = rationale_size(q, n)?;
    let mut in_rationale = vec![false; n];
    for &i in ranking.order().iter().take(k) {
        in_rationale[i] = true;
    }
    let keep: Vec<bool> = match metric {
        Metric::Comprehensiveness => in_rationale.iter().map(|r| !r).collect(),
        Metric::Sufficiency => in_rationale,
    };
    Ok(render(&ranking.tokens, &keep, perturbation))
}

fn aligned_tokens<S: Scorer>(scorer: &S, hypothesis: &str, ranking: &AttributionRanking) -> Result<(), FaithfulnessError> {
    ranking.check()?;
    if scorer.tokenize(hypothesis) != ranking.tokens {
        return Err(FaithfulnessError::RankingMismatch(ranking.instance_id.clone()));
    }
    Ok(())
}

fn checked(out: Vec<ProbDist>, expected: usize) -> Result<Vec<ProbDist>, FaithfulnessError> {
    if out.len() != expected {
        return Err(FaithfulnessError::Protocol(format!(
            "expected {expected} distributions, got {}",
            out.len()
        )));
    }
    Ok(out)
}

/// Per-bin metric values and the unperturbed prediction for one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub original: ProbDist,
    pub predicted: Label,
    pub comprehensiveness: Vec<f64>,
    pub sufficiency: Vec<f64>,
}

impl Curve {
    pub fn aopc(&self, metric: Metric) -> f64 {
        let values = match metric {
            Metric::Comprehensiveness => &self.comprehensiveness,
            Metric::Sufficiency => &self.sufficiency,
        };
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Scores the unperturbed input and both perturbations at every bin in a
/// single batch.
pub fn perturbation_curve<S: Scorer>(
    scorer: &S,
    premise: &str,
    hypothesis: &str,
    ranking: &AttributionRanking,
    cfg: &FaithfulnessConfig,
) -> Result<Curve, FaithfulnessError> {
    aligned_tokens(scorer, hypothesis, ranking)?;
    if cfg.bins.is_empty() {
        return Err(FaithfulnessError::InvalidFraction(0.0));
    }
    let original = ranking.tokens.join(" ");
    let mut batch = vec![TextPair::new(premise, original)];
    for metric in [Metric::Comprehensiveness, Metric::Sufficiency] {
        for &q in &cfg.bins {
            batch.push(TextPair::new(
                premise,
                perturbed_hypothesis(ranking, q, metric, &cfg.perturbation)?,
            ));
        }
    }
    let probs = checked(scorer.score_batch(&batch)?, batch.len())?;
    let predicted = probs[0].argmax();
    let base = probs[0].get(predicted);
    let nb = cfg.bins.len();
    Ok(Curve {
        original: probs[0],
        predicted,
        comprehensiveness: probs[1..=nb].iter().map(|p| base - p.get(predicted)).collect(),
        sufficiency: probs[nb + 1..].iter().map(|p| base - p.get(predicted)).collect(),
    })
}

fn single_metric<S: Scorer>(
    scorer: &S,
    premise: &str,
    hypothesis: &str,
    ranking: &AttributionRanking,
    q: f64,
    metric: Metric,
    perturbation: &Perturbation,
) -> Result<f64, FaithfulnessError> {
    aligned_tokens(scorer, hypothesis, ranking)?;
    let batch = [
        TextPair::new(premise, ranking.tokens.join(" ")),
        TextPair::new(premise, perturbed_hypothesis(ranking, q, metric, perturbation)?),
    ];
    let probs = checked(scorer.score_batch(&batch)?, 2)?;
    let j = probs[0].argmax();
    Ok(probs[0].get(j) - probs[1].get(j))
}

pub fn comprehensiveness<S: Scorer>(
    scorer: &S,
    premise: &str,
    hypothesis: &str,
    ranking: &AttributionRanking,
    q: f64,
) -> Result<f64, FaithfulnessError> {
    single_metric(scorer, premise, hypothesis, ranking, q, Metric::Comprehensiveness, &Perturbation::Delete)
}

pub fn sufficiency<S: Scorer>(
    scorer: &S,
    premise: &str,
    hypothesis: &str,
    ranking: &AttributionRanking,
    q: f64,
) -> Result<f64, FaithfulnessError> {
    single_metric(scorer, premise, hypothesis, ranking, q, Metric::Sufficiency, &Perturbation::Delete)
}

pub fn aopc<S: Scorer>(
    scorer: &S,
    premise: &str,
    hypothesis: &str,
    ranking: &AttributionRanking,
    metric: Metric,
    cfg: &FaithfulnessConfig,
) -> Result<f64, FaithfulnessError> {
    Ok(perturbation_curve(scorer, premise, hypothesis, ranking, cfg)?.aopc(metric))
}

/// Leave-one-out attribution: score of token `i` is the drop in the
/// predicted class probability when token `i` alone is deleted.
pub fn occlusion_attribution<S: Scorer>(
    scorer: &S,
    instance_id: &str,
    premise: &str,
    hypothesis: &str,
) -> Result<AttributionRanking, FaithfulnessError> {
    let tokens = scorer.tokenize(hypothesis);
    if tokens.is_empty() {
        return Err(FaithfulnessError::EmptyTokens(instance_id.into()));
    }
    let mut batch = vec![TextPair::new(premise, tokens.join(" "))];
    for i in 0..tokens.len() {
        let keep: Vec<bool> = (0..tokens.len()).map(|k| k != i).collect();
        batch.push(TextPair::new(premise, render(&tokens, &keep, &Perturbation::Delete)));
    }
    let probs = checked(scorer.score_batch(&batch)?, batch.len())?;
    let j = probs[0].argmax();
    let base = probs[0].get(j);
    Ok(AttributionRanking {
        instance_id: instance_id.into(),
        method: "occlusion".into(),
        tokens,
        scores: probs[1..].iter().map(|p| base - p.get(j)).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalInstance {
    pub id: String,
    pub premise: String,
    pub hypothesis: String,
    pub gold: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaithfulnessRecord {
    pub instance_id: String,
    pub method: String,
    pub aopc_compr: f64,
    pub aopc_suff: f64,
    pub predicted: Label,
    pub gold: Label,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricBreakdown {
    pub overall: Option<Summary>,
    pub correct: Option<Summary>,
    pub incorrect: Option<Summary>,
    /// Correct vs incorrect permutation p-value, when both sides are nonempty.
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodAggregate {
    pub method: String,
    pub comprehensiveness: MetricBreakdown,
    pub sufficiency: MetricBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEvaluation {
    pub records: Vec<FaithfulnessRecord>,
    pub aggregates: Vec<MethodAggregate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationConfig {
    pub n_perm: usize,
    pub seed: u64,
}

impl Default for PermutationConfig {
    fn default() -> Self {
        PermutationConfig { n_perm: 10_000, seed: 0 }
    }
}

/// Records for every `(instance, method)`; every method present in
/// `rankings` must cover every instance.
pub fn evaluate_records<S: Scorer>(
    scorer: &S,
    instances: &[EvalInstance],
    rankings: &[AttributionRanking],
    cfg: &FaithfulnessConfig,
) -> Result<Vec<FaithfulnessRecord>, FaithfulnessError> {
    let mut by_key: BTreeMap<(&str, &str), &AttributionRanking> = BTreeMap::new();
    for r in rankings {
        by_key.insert((r.method.as_str(), r.instance_id.as_str()), r);
    }
    let methods: BTreeSet<&str> = rankings.iter().map(|r| r.method.as_str()).collect();
    if methods.is_empty() {
        if let Some(first) = instances.first() {
            return Err(FaithfulnessError::MissingRanking {
                instance: first.id.clone(),
                method: "*".into(),
            });
        }
    }
    let mut records = Vec::new();
    for method in &methods {
        for inst in instances {
            let ranking = by_key
                .get(&(*method, inst.id.as_str()))
                .ok_or_else(|| FaithfulnessError::MissingRanking {
                    instance: inst.id.clone(),
                    method: (*method).into(),
                })?;
            let curve = perturbation_curve(scorer, &inst.premise, &inst.hypothesis, ranking, cfg)?;
            records.push(FaithfulnessRecord {
                instance_id: inst.id.clone(),
                method: (*method).into(),
                aopc_compr: curve.aopc(Metric::Comprehensiveness),
                aopc_suff: curve.aopc(Metric::Sufficiency),
                predicted: curve.predicted,
                gold: inst.gold,
                correct: curve.predicted == inst.gold,
            });
        }
    }
    Ok(records)
}

/// Mean/sd overall and by prediction correctness, per method.
pub fn aggregate_records(records: &[FaithfulnessRecord], perm: &PermutationConfig) -> Vec<MethodAggregate> {
    let mut by_method: BTreeMap<&str, Vec<&FaithfulnessRecord>> = BTreeMap::new();
    for r in records {
        by_method.entry(r.method.as_str()).or_default().push(r);
    }
    by_method
        .into_iter()
        .map(|(method, rs)| {
            let breakdown = |value: fn(&FaithfulnessRecord) -> f64| {
                let all: Vec<f64> = rs.iter().map(|r| value(r)).collect();
                let correct: Vec<f64> = rs.iter().filter(|r| r.correct).map(|r| value(r)).collect();
                let incorrect: Vec<f64> = rs.iter().filter(|r| !r.correct).map(|r| value(r)).collect();
                let p_value = (!correct.is_empty() && !incorrect.is_empty())
                    .then(|| permutation_test(&correct, &incorrect, perm.n_perm, perm.seed));
                MetricBreakdown {
                    overall: Summary::of(&all),
                    correct: Summary::of(&correct),
                    incorrect: Summary::of(&incorrect),
                    p_value,
                }
            };
            MethodAggregate {
                method: method.into(),
                comprehensiveness: breakdown(|r| r.aopc_compr),
                sufficiency: breakdown(|r| r.aopc_suff),
            }
        })
        .collect()
}

pub fn evaluate_corpus<S: Scorer>(
    scorer: &S,
    instances: &[EvalInstance],
    rankings: &[AttributionRanking],
    cfg: &FaithfulnessConfig,
    perm: &PermutationConfig,
) -> Result<CorpusEvaluation, FaithfulnessError> {
    let records = evaluate_records(scorer, instances, rankings, cfg)?;
    let aggregates = aggregate_records(&records, perm);
    Ok(CorpusEvaluation { records, aggregates })
}

/// Two-sided unpaired permutation test on the difference of means.
///
/// When the number of distinct relabelings `C(na + nb, na)` is at most
/// `n_perm`, all of them are enumerated and the exact p-value
/// `#{|diff| >= |observed|} / C` is returned. Otherwise the pooled values are
/// reshuffled `n_perm` times with a generator seeded from `seed` and the
/// result is `(1 + #{extreme}) / (n_perm + 1)`.
pub fn permutation_test(group_a: &[f64], group_b: &[f64], n_perm: usize, seed: u64) -> f64 {
    assert!(!group_a.is_empty() && !group_b.is_empty(), "both groups must be nonempty");
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let observed = (mean(group_a) - mean(group_b)).abs();
    let mut pooled: Vec<f64> = group_a.iter().chain(group_b).copied().collect();
    let scale = pooled.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let threshold = observed - 1e-12 * scale;
    let na = group_a.len();
    let nb = group_b.len();

    if let Some(total) = binomial(na + nb, na).filter(|&c| c <= n_perm as u128) {
        let sum: f64 = pooled.iter().sum();
        let mut extreme = 0u128;
        let mut chosen: Vec<usize> = (0..na).collect();
        loop {
            let sa: f64 = chosen.iter().map(|&i| pooled[i]).sum();
            if (sa / na as f64 - (sum - sa) / nb as f64).abs() >= threshold {
                extreme += 1;
            }
            if !next_combination(&mut chosen, na + nb) {
                break;
            }
        }
        return extreme as f64 / total as f64;
    }

    let mut rng = keyed_rng(seed, "permutation-test");
    let mut extreme = 0usize;
    for _ in 0..n_perm {
        pooled.shuffle(&mut rng);
        let diff = (mean(&pooled[..na]) - mean(&pooled[na..])).abs();
        if diff >= threshold {
            extreme += 1;
        }
    }
    (extreme as f64 + 1.0) / (n_perm as f64 + 1.0)
}

fn binomial(n: usize, k: usize) -> Option<u128> {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(c)
}

/// Advances a sorted index combination in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `.414(.25)` style: mean to three decimals and sd to two, leading zeros
/// dropped. A missing sd prints as `(-)`.
pub fn format_mean_sd(s: &Summary) -> String {
    let sd = match s.sd {
        Some(sd) => strip_leading_zero(&format!("{sd:.2}")),
        None => "-".into(),
    };
    format!("{}({})", strip_leading_zero(&format!("{:.3}", s.mean)), sd)
}

fn strip_leading_zero(s: &str) -> String {
    if let Some(rest) = s.strip_prefix("-0.") {
        if rest.chars().all(|c| c == '0') {
            return format!(".{rest}");
        }
        format!("-.{rest}")
    } else if let Some(rest) = s.strip_prefix("0.") {
        format!(".{rest}")
    } else {
        s.into()
    }
}
