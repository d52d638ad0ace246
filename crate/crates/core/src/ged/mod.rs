//! Graph edit distance between assurance cases.
//!
//! Cases are compared as rooted trees embedded in directed graphs: node label
//! = [`NodeType`] (text is ignored), one unlabeled edge parent -> child. An
//! edit path is induced by a partial injective node map from the first graph
//! into the second; unmapped nodes on the left are deleted, unmapped nodes on
//! the right inserted, and every edge without a counterpart under the map is
//! deleted or inserted.
//!
//! [`ged_exact`] runs a best-first (A*) search over partial maps, processing
//! left nodes in preorder. The remaining-cost bound combines a label
//! histogram matching bound for nodes with an edge count bound; both are
//! admissible, so the first completed map popped is optimal.
//! [`ged_approx`] solves one bipartite assignment over local type/degree
//! signatures and prices the induced map, which gives an upper bound.

mod assignment;

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cae::{AssuranceCase, NodeType};

pub use assignment::solve as solve_assignment;

/// Default cap on expanded search states before falling back to the
/// assignment bound.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Generated (pushed) states are capped at this multiple of the budget so a
/// wide search cannot exhaust memory before the expansion budget is reached.
const GENERATED_PER_EXPANDED: u64 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostModelError {
    #[error("cost `{0}` must be finite and non-negative")]
    Negative(&'static str),
    #[error("substitution {0} -> {1} must cost 0")]
    NonZeroSelf(NodeType, NodeType),
    #[error("substitution {0} -> {1} must be positive")]
    ZeroDistinct(NodeType, NodeType),
    #[error("substitution {0} <-> {1} is not symmetric")]
    Asymmetric(NodeType, NodeType),
}

/// Edit operation costs. Substitution between equal types is free and
/// strictly positive otherwise; the substitution table is symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CostModelSpec", into = "CostModelSpec")]
pub struct GedCostModel {
    node_insert: f64,
    node_delete: f64,
    substitute: [[f64; 5]; 5],
    edge_insert: f64,
    edge_delete: f64,
}

impl Default for GedCostModel {
    fn default() -> Self {
        GedCostModel::unit()
    }
}

impl GedCostModel {
    /// Every insert, delete and cross-type substitution costs 1.
    pub fn unit() -> Self {
        GedCostModel::uniform(1.0, 1.0, 1.0, 1.0, 1.0).expect("unit costs are valid")
    }

    pub fn uniform(
        node_insert: f64,
        node_delete: f64,
        node_substitute: f64,
        edge_insert: f64,
        edge_delete: f64,
    ) -> Result<Self, CostModelError> {
        let mut substitute = [[node_substitute; 5]; 5];
        for (i, row) in substitute.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        let model = GedCostModel {
            node_insert,
            node_delete,
            substitute,
            edge_insert,
            edge_delete,
        };
        model.check()?;
        Ok(model)
    }

    /// Overrides one substitution cost (both directions).
    pub fn with_substitution(mut self, a: NodeType, b: NodeType, cost: f64) -> Result<Self, CostModelError> {
        self.substitute[a.index()][b.index()] = cost;
        self.substitute[b.index()][a.index()] = cost;
        self.check()?;
        Ok(self)
    }

    fn check(&self) -> Result<(), CostModelError> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        for (name, value) in [
            ("node_insert", self.node_insert),
            ("node_delete", self.node_delete),
            ("edge_insert", self.edge_insert),
            ("edge_delete", self.edge_delete),
        ] {
            if !ok(value) {
                return Err(CostModelError::Negative(name));
            }
        }
        for a in NodeType::ALL {
            for b in NodeType::ALL {
                let c = self.substitute(a, b);
                if !ok(c) {
                    return Err(CostModelError::Negative("node_substitute"));
                }
                if a == b && c != 0.0 {
                    return Err(CostModelError::NonZeroSelf(a, b));
                }
                if a != b && c == 0.0 {
                    return Err(CostModelError::ZeroDistinct(a, b));
                }
                if c != self.substitute(b, a) {
                    return Err(CostModelError::Asymmetric(a, b));
                }
            }
        }
        Ok(())
    }

    pub fn node_insert(&self) -> f64 {
        self.node_insert
    }

    pub fn node_delete(&self) -> f64 {
        self.node_delete
    }

    pub fn edge_insert(&self) -> f64 {
        self.edge_insert
    }

    pub fn edge_delete(&self) -> f64 {
        self.edge_delete
    }

    pub fn substitute(&self, a: NodeType, b: NodeType) -> f64 {
        self.substitute[a.index()][b.index()]
    }

    fn min_cross_substitute(&self) -> f64 {
        let mut best = f64::INFINITY;
        for a in NodeType::ALL {
            for b in NodeType::ALL {
                if a != b {
                    best = best.min(self.substitute(a, b));
                }
            }
        }
        best
    }
}

/// Declarative form of a cost model, as found in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModelSpec {
    #[serde(default = "one")]
    pub node_insert: f64,
    #[serde(default = "one")]
    pub node_delete: f64,
    #[serde(default = "one")]
    pub node_substitute: f64,
    #[serde(default = "one")]
    pub edge_insert: f64,
    #[serde(default = "one")]
    pub edge_delete: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub substitution_overrides: Vec<SubstitutionOverride>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstitutionOverride {
    pub a: NodeType,
    pub b: NodeType,
    pub cost: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for CostModelSpec {
    fn default() -> Self {
        GedCostModel::unit().into()
    }
}

impl TryFrom<CostModelSpec> for GedCostModel {
    type Error = CostModelError;

    fn try_from(spec: CostModelSpec) -> Result<Self, Self::Error> {
        let mut model = GedCostModel::uniform(
            spec.node_insert,
            spec.node_delete,
            spec.node_substitute,
            spec.edge_insert,
            spec.edge_delete,
        )?;
        for o in spec.substitution_overrides {
            model = model.with_substitution(o.a, o.b, o.cost)?;
        }
        Ok(model)
    }
}

impl From<GedCostModel> for CostModelSpec {
    fn from(model: GedCostModel) -> Self {
        let base = model.substitute(NodeType::MainClaim, NodeType::SubClaim);
        let mut substitution_overrides = Vec::new();
        for (i, a) in NodeType::ALL.into_iter().enumerate() {
            for b in NodeType::ALL.into_iter().skip(i + 1) {
                let cost = model.substitute(a, b);
                if cost != base {
                    substitution_overrides.push(SubstitutionOverride { a, b, cost });
                }
            }
        }
        CostModelSpec {
            node_insert: model.node_insert,
            node_delete: model.node_delete,
            node_substitute: base,
            edge_insert: model.edge_insert,
            edge_delete: model.edge_delete,
            substitution_overrides,
        }
    }
}

/// Labeled rooted tree in preorder (index 0 is the root).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GedGraph {
    ids: Vec<String>,
    labels: Vec<NodeType>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl GedGraph {
    /// `parent[i] < i` for every non-root node, i.e. nodes listed in an
    /// order where parents come first. Panics otherwise.
    pub fn from_parents(labels: Vec<NodeType>, parent: Vec<Option<usize>>) -> Self {
        let ids = (0..labels.len()).map(|i| alloc::format!("n{i}")).collect();
        GedGraph::with_ids(ids, labels, parent)
    }

    pub fn with_ids(ids: Vec<String>, labels: Vec<NodeType>, parent: Vec<Option<usize>>) -> Self {
        assert_eq!(labels.len(), parent.len());
        assert_eq!(labels.len(), ids.len());
        let mut children = vec![Vec::new(); labels.len()];
        for (i, p) in parent.iter().enumerate() {
            match *p {
                Some(p) => {
                    assert!(p < i, "parents must precede children");
                    children[p].push(i);
                }
                None => assert!(i == 0, "only node 0 may be the root"),
            }
        }
        GedGraph {
            ids,
            labels,
            parent,
            children,
        }
    }

    pub fn from_case(case: &AssuranceCase) -> Self {
        let t = case.indexed();
        GedGraph {
            ids: t.ids,
            labels: t.types,
            parent: t.parent,
            children: t.children,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[NodeType] {
        &self.labels
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn edge_count(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }

    fn has_edge(&self, from: usize, to: usize) -> bool {
        self.parent[to] == Some(from)
    }

    fn degree(&self, i: usize) -> usize {
        self.children[i].len() + usize::from(self.parent[i].is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    SubstituteNode { left: String, right: String, from: NodeType, to: NodeType },
    DeleteNode { left: String, label: NodeType },
    InsertNode { right: String, label: NodeType },
    DeleteEdge { parent: String, child: String },
    InsertEdge { parent: String, child: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GedResult {
    pub distance: f64,
    pub exact: bool,
    pub expanded_states: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edit_path: Option<Vec<EditOp>>,
}

/// Cost of the edit path induced by `map` (left node -> right node or
/// deletion), plus the operations with non-zero cost.
pub fn mapping_cost(a: &GedGraph, b: &GedGraph, map: &[Option<usize>], costs: &GedCostModel) -> (f64, Vec<EditOp>) {
    assert_eq!(map.len(), a.len());
    let mut inverse = vec![None; b.len()];
    for (u, t) in map.iter().enumerate() {
        if let Some(t) = *t {
            assert!(inverse[t].is_none(), "node map must be injective");
            inverse[t] = Some(u);
        }
    }
    let mut total = 0.0;
    let mut ops = Vec::new();
    for (u, t) in map.iter().enumerate() {
        match *t {
            Some(t) => {
                let c = costs.substitute(a.labels[u], b.labels[t]);
                if c > 0.0 {
                    total += c;
                    ops.push(EditOp::SubstituteNode {
                        left: a.ids[u].clone(),
                        right: b.ids[t].clone(),
                        from: a.labels[u],
                        to: b.labels[t],
                    });
                }
            }
            None => {
                total += costs.node_delete;
                ops.push(EditOp::DeleteNode {
                    left: a.ids[u].clone(),
                    label: a.labels[u],
                });
            }
        }
    }
    for (t, src) in inverse.iter().enumerate() {
        if src.is_none() {
            total += costs.node_insert;
            ops.push(EditOp::InsertNode {
                right: b.ids[t].clone(),
                label: b.labels[t],
            });
        }
    }
    for (u, p) in a.parent.iter().enumerate() {
        let Some(p) = *p else { continue };
        let kept = matches!((map[p], map[u]), (Some(x), Some(y)) if b.has_edge(x, y));
        if !kept {
            total += costs.edge_delete;
            ops.push(EditOp::DeleteEdge {
                parent: a.ids[p].clone(),
                child: a.ids[u].clone(),
            });
        }
    }
    for (y, x) in b.parent.iter().enumerate() {
        let Some(x) = *x else { continue };
        let kept = matches!((inverse[x], inverse[y]), (Some(p), Some(u)) if a.has_edge(p, u));
        if !kept {
            total += costs.edge_insert;
            ops.push(EditOp::InsertEdge {
                parent: b.ids[x].clone(),
                child: b.ids[y].clone(),
            });
        }
    }
    (total, ops)
}

const NONE: u32 = u32::MAX;

struct SearchNode {
    parent: u32,
    target: u32,
    depth: u32,
    g: f64,
}

#[derive(PartialEq)]
struct Frontier {
    f: f64,
    depth: u32,
    complete: bool,
    index: u32,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    // BinaryHeap is a max-heap: smaller f, then complete, then deeper, then
    // older entries come out first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.complete.cmp(&other.complete))
            .then_with(|| self.depth.cmp(&other.depth))
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Search<'a> {
    a: &'a GedGraph,
    b: &'a GedGraph,
    costs: &'a GedCostModel,
    /// suffix_labels[k][t] = count of label t among left nodes k..n
    suffix_labels: Vec<[usize; 5]>,
    min_cross: f64,
}

impl<'a> Search<'a> {
    fn new(a: &'a GedGraph, b: &'a GedGraph, costs: &'a GedCostModel) -> Self {
        let n = a.len();
        let mut suffix_labels = vec![[0usize; 5]; n + 1];
        for k in (0..n).rev() {
            suffix_labels[k] = suffix_labels[k + 1];
            suffix_labels[k][a.labels[k].index()] += 1;
        }
        Search {
            a,
            b,
            costs,
            suffix_labels,
            min_cross: costs.min_cross_substitute(),
        }
    }

    /// Cost added by mapping left node `k` to `target` given the earlier
    /// assignments in `map`/`used`.
    fn step_cost(&self, k: usize, target: Option<usize>, map: &[u32], used: &[bool]) -> f64 {
        let (a, b, c) = (self.a, self.b, self.costs);
        let mut cost = match target {
            Some(t) => c.substitute(a.labels[k], b.labels[t]),
            None => c.node_delete,
        };
        // left edge to the (already processed) parent
        if let Some(p) = a.parent[k] {
            let kept = match (map[p], target) {
                (mp, Some(t)) if mp != NONE => b.has_edge(mp as usize, t),
                _ => false,
            };
            if !kept {
                cost += c.edge_delete;
            }
        }
        if let Some(t) = target {
            // right edges between t and images of processed nodes
            if let Some(x) = b.parent[t] {
                if used[x] {
                    let preimage_is_parent = a.parent[k].is_some_and(|p| map[p] == x as u32);
                    if !preimage_is_parent {
                        cost += c.edge_insert;
                    }
                }
            }
            // a processed left node can never be a child of k (preorder)
            for &y in &b.children[t] {
                if used[y] {
                    cost += c.edge_insert;
                }
            }
        }
        cost
    }

    fn completion_cost(&self, used: &[bool]) -> f64 {
        let b = self.b;
        let mut cost = 0.0;
        for (y, &u) in used.iter().enumerate() {
            if !u {
                cost += self.costs.node_insert;
            }
            if let Some(x) = b.parent[y] {
                if !u || !used[x] {
                    cost += self.costs.edge_insert;
                }
            }
        }
        cost
    }

    fn lower_bound(&self, k: usize, used: &[bool]) -> f64 {
        let c = self.costs;
        let left = &self.suffix_labels[k];
        let mut right = [0usize; 5];
        let mut right_edges = 0usize;
        for (y, &u) in used.iter().enumerate() {
            if !u {
                right[self.b.labels[y].index()] += 1;
            }
            if let Some(x) = self.b.parent[y] {
                if !u || !used[x] {
                    right_edges += 1;
                }
            }
        }
        let n_left: usize = left.iter().sum();
        let n_right: usize = right.iter().sum();
        let same: usize = (0..5).map(|t| left[t].min(right[t])).sum();
        let (la, lb) = (n_left - same, n_right - same);
        let pairs = la.min(lb);
        let pair_cost = self.min_cross.min(c.node_delete + c.node_insert);
        let nodes = pairs as f64 * pair_cost + (la - pairs) as f64 * c.node_delete + (lb - pairs) as f64 * c.node_insert;

        // left edges with an unprocessed endpoint = non-root nodes at index >= k
        let left_edges = self.a.len() - k.max(1).min(self.a.len());
        let kept = left_edges.min(right_edges);
        let edges = (left_edges - kept) as f64 * c.edge_delete + (right_edges - kept) as f64 * c.edge_insert;
        nodes + edges
    }
}

/// Exact graph edit distance by A* over partial node maps.
///
/// `budget` caps expanded states. If it is exhausted the result of
/// [`ged_approx`] is returned with `exact = false`.
pub fn ged_exact(a: &AssuranceCase, b: &AssuranceCase, costs: &GedCostModel, budget: u64) -> GedResult {
    ged_exact_graphs(&GedGraph::from_case(a), &GedGraph::from_case(b), costs, budget)
}

pub fn ged_exact_graphs(a: &GedGraph, b: &GedGraph, costs: &GedCostModel, budget: u64) -> GedResult {
    let upper = ged_approx_graphs(a, b, costs);
    let n = a.len();
    let m = b.len();
    let search = Search::new(a, b, costs);
    let slack = 1e-9 * (1.0 + upper.distance.abs());

    let mut arena: Vec<SearchNode> = vec![SearchNode {
        parent: NONE,
        target: NONE,
        depth: 0,
        g: 0.0,
    }];
    let mut heap = BinaryHeap::new();
    let root_used = vec![false; m];
    let root_f = if n == 0 {
        search.completion_cost(&root_used)
    } else {
        search.lower_bound(0, &root_used)
    };
    heap.push(Frontier {
        f: root_f,
        depth: 0,
        complete: n == 0,
        index: 0,
    });

    let generated_cap = budget.saturating_mul(GENERATED_PER_EXPANDED).max(1);
    let mut expanded: u64 = 0;
    let mut map = vec![NONE; n];
    let mut used = vec![false; m];

    while let Some(entry) = heap.pop() {
        let idx = entry.index as usize;
        if entry.complete {
            let node_map = rebuild(&arena, idx, n, &mut map, &mut used);
            let (distance, ops) = mapping_cost(a, b, &node_map, costs);
            debug_assert!((distance - entry.f).abs() <= 1e-6 * (1.0 + distance));
            return GedResult {
                distance,
                exact: true,
                expanded_states: expanded,
                edit_path: Some(ops),
            };
        }
        if expanded >= budget || arena.len() as u64 >= generated_cap {
            return GedResult {
                expanded_states: expanded,
                ..upper
            };
        }
        expanded += 1;

        rebuild(&arena, idx, n, &mut map, &mut used);
        let k = arena[idx].depth as usize;
        let g = arena[idx].g;
        let targets: Vec<Option<usize>> = (0..m).filter(|&t| !used[t]).map(Some).chain(core::iter::once(None)).collect();
        for target in targets {
            let child_g = g + search.step_cost(k, target, &map, &used);
            if let Some(t) = target {
                used[t] = true;
            }
            let complete = k + 1 == n;
            let f = if complete {
                child_g + search.completion_cost(&used)
            } else {
                child_g + search.lower_bound(k + 1, &used)
            };
            if let Some(t) = target {
                used[t] = false;
            }
            if f > upper.distance + slack {
                continue;
            }
            arena.push(SearchNode {
                parent: idx as u32,
                target: target.map_or(NONE, |t| t as u32),
                depth: (k + 1) as u32,
                g: child_g,
            });
            heap.push(Frontier {
                f,
                depth: (k + 1) as u32,
                complete,
                index: (arena.len() - 1) as u32,
            });
        }
    }
    // unreachable in practice: the optimal path is never pruned
    GedResult {
        expanded_states: expanded,
        ..upper
    }
}

/// Fills `map`/`used` with the assignment of the search node at `idx`.
fn rebuild(arena: &[SearchNode], idx: usize, n: usize, map: &mut [u32], used: &mut [bool]) -> Vec<Option<usize>> {
    map.iter_mut().for_each(|x| *x = NONE);
    used.iter_mut().for_each(|x| *x = false);
    let mut cur = idx;
    while arena[cur].parent != NONE {
        let node = &arena[cur];
        let k = node.depth as usize - 1;
        map[k] = node.target;
        if node.target != NONE {
            used[node.target as usize] = true;
        }
        cur = node.parent as usize;
    }
    (0..n).map(|k| (map[k] != NONE).then(|| map[k] as usize)).collect()
}

/// Upper bound from an optimal bipartite assignment over local signatures.
pub fn ged_approx(a: &AssuranceCase, b: &AssuranceCase, costs: &GedCostModel) -> GedResult {
    ged_approx_graphs(&GedGraph::from_case(a), &GedGraph::from_case(b), costs)
}

pub fn ged_approx_graphs(a: &GedGraph, b: &GedGraph, costs: &GedCostModel) -> GedResult {
    let map = approx_map(a, b, costs);
    let (distance, ops) = mapping_cost(a, b, &map, costs);
    GedResult {
        distance,
        exact: false,
        expanded_states: 0,
        edit_path: Some(ops),
    }
}

fn approx_map(a: &GedGraph, b: &GedGraph, costs: &GedCostModel) -> Vec<Option<usize>> {
    let n = a.len();
    let m = b.len();
    let size = n + m;
    if size == 0 {
        return Vec::new();
    }
    const FORBIDDEN: f64 = 1e15;
    let mut matrix = vec![0.0f64; size * size];
    let ei = costs.edge_insert;
    let ed = costs.edge_delete;
    for i in 0..n {
        for j in 0..m {
            let in_a = usize::from(a.parent[i].is_some());
            let in_b = usize::from(b.parent[j].is_some());
            let out_a = a.children[i].len();
            let out_b = b.children[j].len();
            let in_cost = if in_a > in_b { ed } else if in_b > in_a { ei } else { 0.0 };
            let out_cost = if out_a > out_b {
                (out_a - out_b) as f64 * ed
            } else {
                (out_b - out_a) as f64 * ei
            };
            matrix[i * size + j] = costs.substitute(a.labels[i], b.labels[j]) + 0.5 * (in_cost + out_cost);
        }
        for j in 0..n {
            matrix[i * size + m + j] = if i == j {
                costs.node_delete + 0.5 * a.degree(i) as f64 * ed
            } else {
                FORBIDDEN
            };
        }
    }
    for i in 0..m {
        for j in 0..m {
            matrix[(n + i) * size + j] = if i == j {
                costs.node_insert + 0.5 * b.degree(j) as f64 * ei
            } else {
                FORBIDDEN
            };
        }
    }
    let assign = assignment::solve(&matrix, size);
    (0..n).map(|i| (assign[i] < m).then_some(assign[i])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use NodeType::*;

    fn path(labels: &[NodeType]) -> GedGraph {
        let parents = (0..labels.len()).map(|i| i.checked_sub(1)).collect();
        GedGraph::from_parents(labels.to_vec(), parents)
    }

    fn star(center: NodeType, leaf: NodeType, leaves: usize) -> GedGraph {
        let mut labels = vec![center];
        labels.extend(core::iter::repeat_n(leaf, leaves));
        let parents = (0..=leaves).map(|i| if i == 0 { None } else { Some(0) }).collect();
        GedGraph::from_parents(labels, parents)
    }

    #[test]
    fn identical_graphs_have_zero_distance() {
        let g = path(&[MainClaim, SubClaim, ArgumentClaim, Evidence]);
        let r = ged_exact_graphs(&g, &g, &GedCostModel::unit(), DEFAULT_BUDGET);
        assert!(r.exact);
        assert_eq!(r.distance, 0.0);
        assert!(r.edit_path.unwrap().is_empty());
        assert_eq!(ged_approx_graphs(&g, &g, &GedCostModel::unit()).distance, 0.0);
    }

    #[test]
    fn extra_leaf_costs_node_plus_edge() {
        let a = path(&[MainClaim, SubClaim, Evidence]);
        let b = GedGraph::from_parents(
            vec![MainClaim, SubClaim, Evidence, Evidence],
            vec![None, Some(0), Some(1), Some(1)],
        );
        let r = ged_exact_graphs(&a, &b, &GedCostModel::unit(), DEFAULT_BUDGET);
        assert!(r.exact);
        assert_eq!(r.distance, 2.0);
        let ops = r.edit_path.unwrap();
        assert_eq!(ops.len(), 2);
        assert!(ops.iter().any(|o| matches!(o, EditOp::InsertNode { label: Evidence, .. })));
        assert!(ops.iter().any(|o| matches!(o, EditOp::InsertEdge { .. })));
    }

    #[test]
    fn relabel_is_one_substitution() {
        let a = path(&[MainClaim, SubClaim, Evidence]);
        let b = path(&[MainClaim, ArgumentClaim, Evidence]);
        let r = ged_exact_graphs(&a, &b, &GedCostModel::unit(), DEFAULT_BUDGET);
        assert_eq!(r.distance, 1.0);
        let heavy = GedCostModel::unit().with_substitution(SubClaim, ArgumentClaim, 5.0).unwrap();
        // delete + insert node and re-route two edges beats a 5.0 substitution
        let r = ged_exact_graphs(&a, &b, &heavy, DEFAULT_BUDGET);
        assert_eq!(r.distance, 5.0_f64.min(2.0 + 4.0));
    }

    #[test]
    fn empty_right_side() {
        let a = path(&[MainClaim, Evidence]);
        let b = GedGraph::from_parents(vec![], vec![]);
        let r = ged_exact_graphs(&a, &b, &GedCostModel::unit(), DEFAULT_BUDGET);
        assert_eq!(r.distance, 3.0);
        let r = ged_exact_graphs(&b, &a, &GedCostModel::unit(), DEFAULT_BUDGET);
        assert_eq!(r.distance, 3.0);
        assert!(r.exact);
    }

    #[test]
    fn star_versus_path_approx_within_factor_two() {
        let s = star(MainClaim, Evidence, 5);
        let p = path(&[MainClaim, SubClaim, ArgumentClaim, ArgumentSubClaim, Evidence]);
        let exact = ged_exact_graphs(&s, &p, &GedCostModel::unit(), DEFAULT_BUDGET);
        let approx = ged_approx_graphs(&s, &p, &GedCostModel::unit());
        assert!(exact.exact);
        assert!(approx.distance >= exact.distance);
        assert!(approx.distance <= 2.0 * exact.distance);
    }

    #[test]
    fn tiny_budget_falls_back_to_upper_bound() {
        let s = star(MainClaim, Evidence, 5);
        let p = path(&[MainClaim, SubClaim, ArgumentClaim, ArgumentSubClaim, Evidence]);
        let r = ged_exact_graphs(&s, &p, &GedCostModel::unit(), 1);
        assert!(!r.exact);
        assert_eq!(r.distance, ged_approx_graphs(&s, &p, &GedCostModel::unit()).distance);
    }

    #[test]
    fn cost_model_validation() {
        assert!(GedCostModel::uniform(-1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(GedCostModel::uniform(1.0, 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(GedCostModel::unit().with_substitution(Evidence, Evidence, 1.0).is_err());
        let m = GedCostModel::unit().with_substitution(SubClaim, Evidence, 0.5).unwrap();
        assert_eq!(m.substitute(Evidence, SubClaim), 0.5);
        let spec = CostModelSpec::from(m.clone());
        assert_eq!(GedCostModel::try_from(spec).unwrap(), m);
    }

    #[test]
    fn mapping_cost_counts_every_component() {
        let a = path(&[MainClaim, SubClaim]);
        let b = path(&[MainClaim, Evidence]);
        // swap roots: both nodes substituted, edge reversed
        let (cost, ops) = mapping_cost(&a, &b, &[Some(1), Some(0)], &GedCostModel::unit());
        assert_eq!(cost, 2.0 + 2.0);
        assert_eq!(ops.len(), 4);
    }
}
