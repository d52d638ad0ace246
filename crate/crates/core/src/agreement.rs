//! Intra- and inter-model agreement over generated cases.
//!
//! Pairs are planned per group, measured independently, then reduced: the
//! unweighted mean over pairs inside a group `(models, requirement)`, then
//! the unweighted mean over requirements for a model pair, then over model
//! pairs for corpus-level tables. Pair order is fixed by the plan, so
//! floating-point sums do not depend on how the measurements were scheduled.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cae::{AssuranceCase, NodeType};
use crate::flat::{flat_diff, FlatDiff};
use crate::ged::{ged_exact, GedCostModel, DEFAULT_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// Repeated runs of one model on one requirement.
    Intra,
    /// Runs of two different models on one requirement.
    Inter,
}

impl Scope {
    pub fn as_str(self) -> &'static str {
        match self {
            Scope::Intra => "intra",
            Scope::Inter => "inter",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgreementError {
    #[error("group {model} / {requirement} has {members} case(s); at least 2 are needed")]
    EmptyGroup {
        model: String,
        requirement: String,
        members: usize,
    },
    #[error("no {0:?} pairs to compare")]
    NoPairs(Scope),
}

/// What to do with an intra-model group that has fewer than two runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmallGroups {
    #[default]
    Error,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupKey {
    pub scope: Scope,
    pub model_a: String,
    pub model_b: String,
    pub requirement: String,
}

/// One planned comparison between `cases[left]` and `cases[right]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CasePair {
    pub group: GroupKey,
    pub left: usize,
    pub right: usize,
}

/// Enumerates every unordered case pair for `scope`, grouped and sorted.
pub fn plan_pairs(cases: &[AssuranceCase], scope: Scope, small: SmallGroups) -> Result<Vec<CasePair>, AgreementError> {
    // (requirement, model) -> indices sorted by run
    let mut by_group: BTreeMap<(&str, &str), Vec<usize>> = BTreeMap::new();
    for (i, c) in cases.iter().enumerate() {
        by_group
            .entry((c.meta.requirement_id.as_str(), c.meta.source_model.as_str()))
            .or_default()
            .push(i);
    }
    for members in by_group.values_mut() {
        members.sort_by_key(|&i| (cases[i].meta.run_index, i));
    }

    let mut pairs = Vec::new();
    match scope {
        Scope::Intra => {
            for (&(req, model), members) in &by_group {
                if members.len() < 2 {
                    match small {
                        SmallGroups::Error => {
                            return Err(AgreementError::EmptyGroup {
                                model: model.into(),
                                requirement: req.into(),
                                members: members.len(),
                            })
                        }
                        SmallGroups::Skip => continue,
                    }
                }
                let group = GroupKey {
                    scope,
                    model_a: model.into(),
                    model_b: model.into(),
                    requirement: req.into(),
                };
                for (x, &left) in members.iter().enumerate() {
                    for &right in &members[x + 1..] {
                        pairs.push(CasePair {
                            group: group.clone(),
                            left,
                            right,
                        });
                    }
                }
            }
        }
        Scope::Inter => {
            let mut by_req: BTreeMap<&str, Vec<(&str, &Vec<usize>)>> = BTreeMap::new();
            for (&(req, model), members) in &by_group {
                by_req.entry(req).or_default().push((model, members));
            }
            for (req, models) in by_req {
                for (x, &(model_a, runs_a)) in models.iter().enumerate() {
                    for &(model_b, runs_b) in &models[x + 1..] {
                        let group = GroupKey {
                            scope,
                            model_a: model_a.into(),
                            model_b: model_b.into(),
                            requirement: req.into(),
                        };
                        for &left in runs_a {
                            for &right in runs_b {
                                pairs.push(CasePair {
                                    group: group.clone(),
                                    left,
                                    right,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    if pairs.is_empty() {
        return Err(AgreementError::NoPairs(scope));
    }
    Ok(pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementOptions {
    pub costs: GedCostModel,
    pub budget: u64,
    /// Skip the structural metric entirely (flat counts only).
    pub with_ged: bool,
}

impl Default for AgreementOptions {
    fn default() -> Self {
        AgreementOptions {
            costs: GedCostModel::unit(),
            budget: DEFAULT_BUDGET,
            with_ged: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMetrics {
    pub flat: FlatDiff,
    pub ged: Option<f64>,
    pub ged_exact: bool,
}

pub fn measure_pair(a: &AssuranceCase, b: &AssuranceCase, opts: &AgreementOptions) -> PairMetrics {
    let flat = flat_diff(a, b);
    if opts.with_ged {
        let r = ged_exact(a, b, &opts.costs, opts.budget);
        PairMetrics {
            flat,
            ged: Some(r.distance),
            ged_exact: r.exact,
        }
    } else {
        PairMetrics {
            flat,
            ged: None,
            ged_exact: true,
        }
    }
}

/// Mean absolute count difference per node type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TypeMeans(pub [f64; 5]);

impl TypeMeans {
    pub fn get(&self, t: NodeType) -> f64 {
        self.0[t.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub scope: Scope,
    pub model_a: String,
    pub model_b: String,
    /// `None` once averaged over requirements.
    pub requirement: Option<String>,
    pub mean_flat: TypeMeans,
    pub mean_ged: Option<f64>,
    /// Every GED that went into `mean_ged` was exact.
    pub ged_exact: bool,
    pub pair_count: usize,
}

/// Per-group means. `metrics[i]` belongs to `pairs[i]`.
pub fn reduce(pairs: &[CasePair], metrics: &[PairMetrics]) -> Vec<AgreementReport> {
    assert_eq!(pairs.len(), metrics.len());
    let mut groups: BTreeMap<&GroupKey, Vec<&PairMetrics>> = BTreeMap::new();
    for (p, m) in pairs.iter().zip(metrics) {
        groups.entry(&p.group).or_default().push(m);
    }
    groups
        .into_iter()
        .map(|(key, ms)| {
            let n = ms.len() as f64;
            let mut flat = [0.0; 5];
            for m in &ms {
                for (t, d) in m.flat.iter() {
                    flat[t.index()] += d as f64;
                }
            }
            flat.iter_mut().for_each(|x| *x /= n);
            let mean_ged = ms
                .iter()
                .map(|m| m.ged)
                .sum::<Option<f64>>()
                .map(|s| s / n);
            AgreementReport {
                scope: key.scope,
                model_a: key.model_a.clone(),
                model_b: key.model_b.clone(),
                requirement: Some(key.requirement.clone()),
                mean_flat: TypeMeans(flat),
                mean_ged,
                ged_exact: ms.iter().all(|m| m.ged_exact),
                pair_count: ms.len(),
            }
        })
        .collect()
}

/// Plans, measures (sequentially) and reduces in one call.
pub fn aggregate_agreement(
    cases: &[AssuranceCase],
    scope: Scope,
    small: SmallGroups,
    opts: &AgreementOptions,
) -> Result<Vec<AgreementReport>, AgreementError> {
    let pairs = plan_pairs(cases, scope, small)?;
    let metrics: Vec<_> = pairs
        .iter()
        .map(|p| measure_pair(&cases[p.left], &cases[p.right], opts))
        .collect();
    Ok(reduce(&pairs, &metrics))
}

fn mean_of(reports: &[&AgreementReport], scope: Scope, model_a: String, model_b: String) -> AgreementReport {
    let n = reports.len() as f64;
    let mut flat = [0.0; 5];
    for r in reports {
        for (acc, x) in flat.iter_mut().zip(r.mean_flat.0) {
            *acc += x;
        }
    }
    flat.iter_mut().for_each(|x| *x /= n);
    AgreementReport {
        scope,
        model_a,
        model_b,
        requirement: None,
        mean_flat: TypeMeans(flat),
        mean_ged: reports.iter().map(|r| r.mean_ged).sum::<Option<f64>>().map(|s| s / n),
        ged_exact: reports.iter().all(|r| r.ged_exact),
        pair_count: reports.iter().map(|r| r.pair_count).sum(),
    }
}

/// Averages per-requirement reports over requirements, one row per
/// `(scope, model_a, model_b)`.
pub fn roll_up(reports: &[AgreementReport]) -> Vec<AgreementReport> {
    let mut groups: BTreeMap<(Scope, &str, &str), Vec<&AgreementReport>> = BTreeMap::new();
    for r in reports {
        groups
            .entry((r.scope, r.model_a.as_str(), r.model_b.as_str()))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((scope, a, b), rs)| mean_of(&rs, scope, a.into(), b.into()))
        .collect()
}

/// Corpus-level flat means in the layout of a Type x {Intra, Inter} table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatTable {
    pub intra: Option<TypeMeans>,
    pub inter: Option<TypeMeans>,
}

/// Means over model (pair) roll-ups of each scope.
pub fn flat_table(reports: &[AgreementReport]) -> FlatTable {
    let rolled = roll_up(reports);
    let pick = |scope: Scope| {
        let rs: Vec<&AgreementReport> = rolled.iter().filter(|r| r.scope == scope).collect();
        (!rs.is_empty()).then(|| mean_of(&rs, scope, String::new(), String::new()).mean_flat)
    };
    FlatTable {
        intra: pick(Scope::Intra),
        inter: pick(Scope::Inter),
    }
}

/// Symmetric model x model matrix of mean GED; the diagonal holds the
/// intra-model means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GedMatrix {
    pub models: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl GedMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.models.iter().position(|m| m == a)?;
        let j = self.models.iter().position(|m| m == b)?;
        self.values[i][j]
    }
}

/// Builds the matrix from per-requirement (or rolled-up) reports of either
/// scope.
pub fn ged_matrix(reports: &[AgreementReport]) -> GedMatrix {
    let rolled = roll_up(reports);
    let mut models: Vec<String> = rolled
        .iter()
        .flat_map(|r| [r.model_a.clone(), r.model_b.clone()])
        .collect();
    models.sort();
    models.dedup();
    let mut values = alloc::vec![alloc::vec![None; models.len()]; models.len()];
    for r in &rolled {
        let i = models.binary_search(&r.model_a).expect("model listed");
        let j = models.binary_search(&r.model_b).expect("model listed");
        values[i][j] = r.mean_ged;
        values[j][i] = r.mean_ged;
    }
    GedMatrix { models, values }
}
