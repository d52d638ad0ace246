//! Claim-Argument-Evidence assurance cases.
//!
//! A case is a rooted tree of typed nodes. Construction enforces the tree
//! shape (unique ids, one parent per node, everything reachable from the
//! root, nonempty text); [`validate`] then reports the softer, content-level
//! problems that generated cases commonly have.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Element type of a CAE node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeType {
    MainClaim,
    SubClaim,
    ArgumentClaim,
    ArgumentSubClaim,
    Evidence,
}

impl NodeType {
    pub const ALL: [NodeType; 5] = [
        NodeType::MainClaim,
        NodeType::SubClaim,
        NodeType::ArgumentClaim,
        NodeType::ArgumentSubClaim,
        NodeType::Evidence,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            NodeType::MainClaim => "MainClaim",
            NodeType::SubClaim => "SubClaim",
            NodeType::ArgumentClaim => "ArgumentClaim",
            NodeType::ArgumentSubClaim => "ArgumentSubClaim",
            NodeType::Evidence => "Evidence",
        }
    }

    /// Position in the default decomposition order, MainClaim = 0 .. Evidence = 4.
    pub const fn index(self) -> usize {
        match self {
            NodeType::MainClaim => 0,
            NodeType::SubClaim => 1,
            NodeType::ArgumentClaim => 2,
            NodeType::ArgumentSubClaim => 3,
            NodeType::Evidence => 4,
        }
    }
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown node type `{0}`")]
pub struct UnknownNodeType(pub String);

impl FromStr for NodeType {
    type Err = UnknownNodeType;

    /// Matching ignores ASCII case and `_`, `-` and whitespace separators, so
    /// `main_claim`, `Main Claim` and `MainClaim` are the same type.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let folded: String = s
            .chars()
            .filter(|c| !(c.is_whitespace() || *c == '_' || *c == '-'))
            .map(|c| c.to_ascii_lowercase())
            .collect();
        NodeType::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(&folded))
            .ok_or_else(|| UnknownNodeType(s.to_string()))
    }
}

impl Serialize for NodeType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for NodeType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaeNode {
    pub id: String,
    pub node_type: NodeType,
    pub text: String,
    /// Child ids in document order.
    pub children: Vec<String>,
}

impl CaeNode {
    pub fn new(id: impl Into<String>, node_type: NodeType, text: impl Into<String>) -> Self {
        CaeNode {
            id: id.into(),
            node_type,
            text: text.into(),
            children: Vec::new(),
        }
    }

    pub fn with_children<I, S>(mut self, children: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.children = children.into_iter().map(Into::into).collect();
        self
    }
}

/// Where a case came from: the requirement it argues for, the model that
/// generated it and which of the repeated calls produced it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CaseMeta {
    pub requirement_id: String,
    pub source_model: String,
    pub run_index: u32,
}

impl CaseMeta {
    pub fn new(requirement_id: impl Into<String>, source_model: impl Into<String>, run_index: u32) -> Self {
        CaseMeta {
            requirement_id: requirement_id.into(),
            source_model: source_model.into(),
            run_index,
        }
    }

    /// `<model>__<requirement_id>__<run>`, the same stem used for case files.
    pub fn case_id(&self) -> String {
        format!("{}__{}__{}", self.source_model, self.requirement_id, self.run_index)
    }
}

/// Coarse error class, counted separately by the generation harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCategory {
    MalformedJson,
    SchemaViolation,
    StructureViolation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaseError {
    #[error("node with empty id")]
    EmptyId,
    #[error("node `{0}` has empty text")]
    EmptyText(String),
    #[error("document requirement `{found}` does not match expected `{expected}`")]
    RequirementMismatch { expected: String, found: String },
    #[error("duplicate node id `{0}`")]
    DuplicateId(String),
    #[error("root `{0}` is not a node of the case")]
    UnknownRoot(String),
    #[error("node `{parent}` lists unknown child `{child}`")]
    DanglingChild { parent: String, child: String },
    #[error("node `{0}` has more than one parent")]
    MultipleParents(String),
    #[error("cycle through node `{0}`")]
    Cycle(String),
    #[error("node `{0}` is not reachable from the root")]
    Orphan(String),
    #[error("root `{0}` is not a MainClaim")]
    RootNotMainClaim(String),
    #[error("evidence node `{0}` has children")]
    EvidenceHasChildren(String),
}

impl CaseError {
    pub fn category(&self) -> ErrorCategory {
        match self {
            CaseError::EmptyId | CaseError::EmptyText(_) | CaseError::RequirementMismatch { .. } => {
                ErrorCategory::SchemaViolation
            }
            _ => ErrorCategory::StructureViolation,
        }
    }
}

/// Nested document form of a node: `{"id", "type", "text", "children": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NestedNode {
    pub id: String,
    #[serde(rename = "type")]
    pub node_type: NodeType,
    pub text: String,
    #[serde(default)]
    pub children: Vec<NestedNode>,
}

/// Top-level document: `{"requirement_id", "main_claim": {...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub requirement_id: Option<String>,
    pub main_claim: NestedNode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssuranceCase {
    pub meta: CaseMeta,
    pub root: String,
    pub nodes: BTreeMap<String, CaeNode>,
}

/// Index-based view of a case in preorder; index 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedTree {
    pub ids: Vec<String>,
    pub types: Vec<NodeType>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
}

impl IndexedTree {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Nodes strictly between `ancestor` and `descendant`, top-down. `None` if
    /// `ancestor` is not a proper ancestor of `descendant`.
    pub fn interior_path(&self, ancestor: usize, descendant: usize) -> Option<Vec<usize>> {
        let mut path = Vec::new();
        let mut cur = self.parent[descendant]?;
        loop {
            if cur == ancestor {
                path.reverse();
                return Some(path);
            }
            path.push(cur);
            cur = self.parent[cur]?;
        }
    }

    pub fn is_ancestor(&self, ancestor: usize, descendant: usize) -> bool {
        self.interior_path(ancestor, descendant).is_some()
    }

    /// Undirected path between two nodes, endpoints excluded, in walk order
    /// from `from` to `to`. Returns the edge count too.
    pub fn path_between(&self, from: usize, to: usize) -> (usize, Vec<usize>) {
        let mut up_from = vec![from];
        let mut up_to = vec![to];
        let (mut a, mut b) = (from, to);
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root has parent");
            up_from.push(a);
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root has parent");
            up_to.push(b);
        }
        while a != b {
            a = self.parent[a].expect("non-root has parent");
            b = self.parent[b].expect("non-root has parent");
            up_from.push(a);
            up_to.push(b);
        }
        // both lists now end with the common ancestor
        up_to.pop();
        up_to.reverse();
        up_from.extend(up_to);
        let edges = up_from.len() - 1;
        let interior = up_from[1..up_from.len() - 1].to_vec();
        (edges, interior)
    }

    pub fn edge_count(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }
}

impl AssuranceCase {
    /// Builds a case from a flat node list, checking the rooted-tree shape.
    ///
    /// Type-level rules (MainClaim root, evidence leaves) are left to
    /// [`validate`] so programmatically built cases can be inspected; use
    /// [`AssuranceCase::from_document`] for the strict path.
    pub fn from_nodes(meta: CaseMeta, root: impl Into<String>, nodes: Vec<CaeNode>) -> Result<Self, CaseError> {
        let root = root.into();
        let mut map = BTreeMap::new();
        for node in nodes {
            if node.id.trim().is_empty() {
                return Err(CaseError::EmptyId);
            }
            if node.text.trim().is_empty() {
                return Err(CaseError::EmptyText(node.id));
            }
            if map.contains_key(&node.id) {
                return Err(CaseError::DuplicateId(node.id));
            }
            map.insert(node.id.clone(), node);
        }
        if !map.contains_key(&root) {
            return Err(CaseError::UnknownRoot(root));
        }

        let mut parent_of: BTreeMap<&str, &str> = BTreeMap::new();
        for node in map.values() {
            for child in &node.children {
                if !map.contains_key(child) {
                    return Err(CaseError::DanglingChild {
                        parent: node.id.clone(),
                        child: child.clone(),
                    });
                }
                if child == &root {
                    return Err(CaseError::Cycle(root.clone()));
                }
                if parent_of.insert(child.as_str(), node.id.as_str()).is_some() {
                    return Err(CaseError::MultipleParents(child.clone()));
                }
            }
        }

        let mut seen = BTreeSet::new();
        let mut stack = vec![root.as_str()];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                return Err(CaseError::Cycle(id.to_string()));
            }
            stack.extend(map[id].children.iter().map(String::as_str));
        }
        if let Some(orphan) = map.keys().find(|id| !seen.contains(id.as_str())) {
            // walk parent links; coming back to the start means a detached cycle
            let mut cur = orphan.as_str();
            let mut visited = BTreeSet::new();
            while let Some(&p) = parent_of.get(cur) {
                if !visited.insert(cur) {
                    return Err(CaseError::Cycle(cur.to_string()));
                }
                cur = p;
            }
            return Err(CaseError::Orphan(orphan.clone()));
        }

        Ok(AssuranceCase { meta, root, nodes: map })
    }

    /// Strict construction used for parsed documents: tree shape plus a
    /// MainClaim root and childless evidence.
    pub fn from_document(meta: CaseMeta, doc: CaseDocument) -> Result<Self, CaseError> {
        if let Some(found) = &doc.requirement_id {
            if found != &meta.requirement_id {
                return Err(CaseError::RequirementMismatch {
                    expected: meta.requirement_id.clone(),
                    found: found.clone(),
                });
            }
        }
        let root = doc.main_claim.id.clone();
        let mut flat = Vec::new();
        flatten(doc.main_claim, &mut flat);
        let case = AssuranceCase::from_nodes(meta, root, flat)?;
        let root_node = case.root_node();
        if root_node.node_type != NodeType::MainClaim {
            return Err(CaseError::RootNotMainClaim(root_node.id.clone()));
        }
        for node in case.preorder() {
            if node.node_type == NodeType::Evidence && !node.children.is_empty() {
                return Err(CaseError::EvidenceHasChildren(node.id.clone()));
            }
        }
        Ok(case)
    }

    pub fn to_document(&self) -> CaseDocument {
        CaseDocument {
            requirement_id: Some(self.meta.requirement_id.clone()),
            main_claim: self.nest(&self.root),
        }
    }

    fn nest(&self, id: &str) -> NestedNode {
        let node = &self.nodes[id];
        NestedNode {
            id: node.id.clone(),
            node_type: node.node_type,
            text: node.text.clone(),
            children: node.children.iter().map(|c| self.nest(c)).collect(),
        }
    }

    pub fn case_id(&self) -> String {
        self.meta.case_id()
    }

    pub fn root_node(&self) -> &CaeNode {
        &self.nodes[&self.root]
    }

    pub fn node(&self, id: &str) -> Option<&CaeNode> {
        self.nodes.get(id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Depth-first preorder following document child order.
    pub fn preorder(&self) -> Vec<&CaeNode> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root.as_str()];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            out.push(node);
            stack.extend(node.children.iter().rev().map(String::as_str));
        }
        out
    }

    pub fn indexed(&self) -> IndexedTree {
        let order = self.preorder();
        let position: BTreeMap<&str, usize> = order.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
        let n = order.len();
        let mut tree = IndexedTree {
            ids: order.iter().map(|n| n.id.clone()).collect(),
            types: order.iter().map(|n| n.node_type).collect(),
            parent: vec![None; n],
            children: vec![Vec::new(); n],
            depth: vec![0; n],
        };
        for (i, node) in order.iter().enumerate() {
            for child in &node.children {
                let c = position[child.as_str()];
                tree.parent[c] = Some(i);
                tree.children[i].push(c);
            }
        }
        // preorder guarantees parents precede children
        for i in 1..n {
            tree.depth[i] = tree.depth[tree.parent[i].expect("non-root has parent")] + 1;
        }
        tree
    }

    /// Longest root-to-leaf edge count.
    pub fn depth(&self) -> usize {
        self.indexed().depth.into_iter().max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.values().map(|n| n.children.len()).sum()
    }
}

fn flatten(node: NestedNode, out: &mut Vec<CaeNode>) {
    let ids = node.children.iter().map(|c| c.id.clone()).collect();
    out.push(CaeNode {
        id: node.id,
        node_type: node.node_type,
        text: node.text,
        children: ids,
    });
    for child in node.children {
        flatten(child, out);
    }
}

/// Which parent type may own which child type. Disallowed edges are warnings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionRules {
    allowed: [[bool; 5]; 5],
}

impl Default for TransitionRules {
    /// Strictly downward in MainClaim -> SubClaim -> ArgumentClaim ->
    /// ArgumentSubClaim -> Evidence, skipping levels allowed.
    fn default() -> Self {
        let mut allowed = [[false; 5]; 5];
        for (p, row) in allowed.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = p < c;
            }
        }
        TransitionRules { allowed }
    }
}

impl TransitionRules {
    pub fn none() -> Self {
        TransitionRules { allowed: [[false; 5]; 5] }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (NodeType, NodeType)>) -> Self {
        let mut rules = TransitionRules::none();
        for (p, c) in pairs {
            rules.allow(p, c);
        }
        rules
    }

    pub fn allow(&mut self, parent: NodeType, child: NodeType) {
        self.allowed[parent.index()][child.index()] = true;
    }

    pub fn is_allowed(&self, parent: NodeType, child: NodeType) -> bool {
        self.allowed[parent.index()][child.index()]
    }

    pub fn pairs(&self) -> Vec<(NodeType, NodeType)> {
        let mut out = Vec::new();
        for p in NodeType::ALL {
            for c in NodeType::ALL {
                if self.is_allowed(p, c) {
                    out.push((p, c));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationCode {
    RootNotMainClaim,
    ExtraMainClaim,
    NoEvidence,
    EvidenceHasChildren,
    NonEvidenceLeaf,
    DisallowedTransition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub node_id: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionCount {
    pub parent: NodeType,
    pub child: NodeType,
    pub count: usize,
    pub allowed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub case_id: String,
    pub is_valid: bool,
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
    pub transitions: Vec<TransitionCount>,
}

/// Checks a case. Errors make the report invalid; warnings do not.
pub fn validate(case: &AssuranceCase, rules: &TransitionRules) -> ValidationReport {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();
    let mut transitions: BTreeMap<(NodeType, NodeType), usize> = BTreeMap::new();

    let root = case.root_node();
    if root.node_type != NodeType::MainClaim {
        violations.push(Violation {
            code: ViolationCode::RootNotMainClaim,
            node_id: Some(root.id.clone()),
            message: format!("root is {}", root.node_type),
        });
    }

    let mut evidence = 0usize;
    for node in case.preorder() {
        if node.node_type == NodeType::Evidence {
            evidence += 1;
        }
        if node.node_type == NodeType::MainClaim && node.id != case.root {
            violations.push(Violation {
                code: ViolationCode::ExtraMainClaim,
                node_id: Some(node.id.clone()),
                message: "MainClaim below the root".to_string(),
            });
        }
        if node.children.is_empty() {
            if node.node_type != NodeType::Evidence {
                warnings.push(Violation {
                    code: ViolationCode::NonEvidenceLeaf,
                    node_id: Some(node.id.clone()),
                    message: format!("{} leaf without evidence", node.node_type),
                });
            }
        } else if node.node_type == NodeType::Evidence {
            violations.push(Violation {
                code: ViolationCode::EvidenceHasChildren,
                node_id: Some(node.id.clone()),
                message: format!("evidence has {} children", node.children.len()),
            });
        }
        for child_id in &node.children {
            let child = &case.nodes[child_id];
            *transitions.entry((node.node_type, child.node_type)).or_default() += 1;
            if !rules.is_allowed(node.node_type, child.node_type) {
                warnings.push(Violation {
                    code: ViolationCode::DisallowedTransition,
                    node_id: Some(child.id.clone()),
                    message: format!("{} -> {}", node.node_type, child.node_type),
                });
            }
        }
    }
    if evidence == 0 {
        violations.push(Violation {
            code: ViolationCode::NoEvidence,
            node_id: None,
            message: "case contains no Evidence node".to_string(),
        });
    }

    ValidationReport {
        case_id: case.case_id(),
        is_valid: violations.is_empty(),
        violations,
        warnings,
        transitions: transitions
            .into_iter()
            .map(|((parent, child), count)| TransitionCount {
                parent,
                child,
                count,
                allowed: rules.is_allowed(parent, child),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> CaseMeta {
        CaseMeta::new("R18", "phi4", 0)
    }

    fn minimal() -> AssuranceCase {
        AssuranceCase::from_nodes(
            meta(),
            "mc",
            vec![
                CaeNode::new("mc", NodeType::MainClaim, "main").with_children(["sc"]),
                CaeNode::new("sc", NodeType::SubClaim, "sub").with_children(["ev"]),
                CaeNode::new("ev", NodeType::Evidence, "evidence"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn minimal_case_shape() {
        let case = minimal();
        assert_eq!(case.len(), 3);
        assert_eq!(case.depth(), 2);
        assert_eq!(case.edge_count(), 2);
        let report = validate(&case, &TransitionRules::default());
        assert!(report.is_valid);
        assert!(report.warnings.is_empty());
        assert_eq!(report.transitions.len(), 2);
    }

    #[test]
    fn node_type_parsing_is_lenient_on_separators_only() {
        assert_eq!("main_claim".parse::<NodeType>().unwrap(), NodeType::MainClaim);
        assert_eq!("Argument Sub-Claim".parse::<NodeType>().unwrap(), NodeType::ArgumentSubClaim);
        assert!("Goal".parse::<NodeType>().is_err());
        assert!("Strategy".parse::<NodeType>().is_err());
    }

    #[test]
    fn structural_errors_are_distinguished() {
        let dup = AssuranceCase::from_nodes(
            meta(),
            "mc",
            vec![
                CaeNode::new("mc", NodeType::MainClaim, "m"),
                CaeNode::new("mc", NodeType::SubClaim, "s"),
            ],
        );
        assert_eq!(dup.unwrap_err(), CaseError::DuplicateId("mc".into()));

        let two_parents = AssuranceCase::from_nodes(
            meta(),
            "mc",
            vec![
                CaeNode::new("mc", NodeType::MainClaim, "m").with_children(["a", "b"]),
                CaeNode::new("a", NodeType::SubClaim, "a").with_children(["e"]),
                CaeNode::new("b", NodeType::SubClaim, "b").with_children(["e"]),
                CaeNode::new("e", NodeType::Evidence, "e"),
            ],
        );
        assert_eq!(two_parents.unwrap_err(), CaseError::MultipleParents("e".into()));

        let detached_cycle = AssuranceCase::from_nodes(
            meta(),
            "mc",
            vec![
                CaeNode::new("mc", NodeType::MainClaim, "m"),
                CaeNode::new("a", NodeType::SubClaim, "a").with_children(["b"]),
                CaeNode::new("b", NodeType::SubClaim, "b").with_children(["a"]),
            ],
        );
        assert!(matches!(detached_cycle.unwrap_err(), CaseError::Cycle(_)));

        let orphan = AssuranceCase::from_nodes(
            meta(),
            "mc",
            vec![
                CaeNode::new("mc", NodeType::MainClaim, "m"),
                CaeNode::new("x", NodeType::Evidence, "x"),
            ],
        );
        assert_eq!(orphan.unwrap_err(), CaseError::Orphan("x".into()));

        let back_to_root = AssuranceCase::from_nodes(
            meta(),
            "mc",
            vec![
                CaeNode::new("mc", NodeType::MainClaim, "m").with_children(["a"]),
                CaeNode::new("a", NodeType::SubClaim, "a").with_children(["mc"]),
            ],
        );
        assert!(matches!(back_to_root.unwrap_err(), CaseError::Cycle(_)));

        let blank = AssuranceCase::from_nodes(meta(), "mc", vec![CaeNode::new("mc", NodeType::MainClaim, "  \n")]);
        let err = blank.unwrap_err();
        assert_eq!(err.category(), ErrorCategory::SchemaViolation);
    }

    #[test]
    fn main_claim_only_parses_but_flags_no_evidence() {
        let case = AssuranceCase::from_document(
            meta(),
            CaseDocument {
                requirement_id: None,
                main_claim: NestedNode {
                    id: "mc".into(),
                    node_type: NodeType::MainClaim,
                    text: "the processor complies".into(),
                    children: vec![],
                },
            },
        )
        .unwrap();
        let report = validate(&case, &TransitionRules::default());
        assert!(!report.is_valid);
        assert_eq!(report.violations[0].code, ViolationCode::NoEvidence);
        assert_eq!(report.warnings[0].code, ViolationCode::NonEvidenceLeaf);
    }

    #[test]
    fn evidence_with_children_rejected_strictly_and_reported_by_validate() {
        let nodes = vec![
            CaeNode::new("mc", NodeType::MainClaim, "m").with_children(["ev"]),
            CaeNode::new("ev", NodeType::Evidence, "e").with_children(["asc"]),
            CaeNode::new("asc", NodeType::ArgumentSubClaim, "a"),
        ];
        let case = AssuranceCase::from_nodes(meta(), "mc", nodes).unwrap();
        let report = validate(&case, &TransitionRules::default());
        assert!(report.violations.iter().any(|v| v.code == ViolationCode::EvidenceHasChildren));
        assert!(report.warnings.iter().any(|v| v.code == ViolationCode::DisallowedTransition));

        let strict = AssuranceCase::from_document(meta(), case.to_document());
        assert_eq!(strict.unwrap_err(), CaseError::EvidenceHasChildren("ev".into()));
    }

    #[test]
    fn root_must_be_main_claim_under_strict_parse() {
        let doc = CaseDocument {
            requirement_id: Some("R18".into()),
            main_claim: NestedNode {
                id: "x".into(),
                node_type: NodeType::SubClaim,
                text: "t".into(),
                children: vec![],
            },
        };
        assert_eq!(
            AssuranceCase::from_document(meta(), doc).unwrap_err(),
            CaseError::RootNotMainClaim("x".into())
        );
    }

    #[test]
    fn requirement_mismatch_is_schema_error() {
        let mut doc = minimal().to_document();
        doc.requirement_id = Some("R7".into());
        let err = AssuranceCase::from_document(meta(), doc).unwrap_err();
        assert_eq!(err.category(), ErrorCategory::SchemaViolation);
    }

    #[test]
    fn document_round_trip_preserves_child_order() {
        let case = AssuranceCase::from_nodes(
            meta(),
            "mc",
            vec![
                CaeNode::new("mc", NodeType::MainClaim, "m").with_children(["z", "a"]),
                CaeNode::new("z", NodeType::Evidence, "z"),
                CaeNode::new("a", NodeType::Evidence, "a"),
            ],
        )
        .unwrap();
        let back = AssuranceCase::from_document(meta(), case.to_document()).unwrap();
        assert_eq!(back, case);
        let order: Vec<_> = back.preorder().iter().map(|n| n.id.as_str()).collect();
        assert_eq!(order, ["mc", "z", "a"]);
    }

    #[test]
    fn paths_in_indexed_tree() {
        let case = AssuranceCase::from_nodes(
            meta(),
            "mc",
            vec![
                CaeNode::new("mc", NodeType::MainClaim, "m").with_children(["s1", "s2"]),
                CaeNode::new("s1", NodeType::SubClaim, "s1").with_children(["e1"]),
                CaeNode::new("s2", NodeType::SubClaim, "s2").with_children(["e2"]),
                CaeNode::new("e1", NodeType::Evidence, "e1"),
                CaeNode::new("e2", NodeType::Evidence, "e2"),
            ],
        )
        .unwrap();
        let t = case.indexed();
        assert_eq!(t.ids, ["mc", "s1", "e1", "s2", "e2"]);
        assert_eq!(t.interior_path(0, 2), Some(vec![1]));
        assert_eq!(t.interior_path(1, 4), None);
        let (edges, interior) = t.path_between(2, 4);
        assert_eq!(edges, 4);
        assert_eq!(interior, vec![1, 0, 3]);
        let (edges, interior) = t.path_between(3, 2);
        assert_eq!((edges, interior), (3, vec![0, 1]));
        assert_eq!(t.edge_count(), t.len() - 1);
    }

    #[test]
    fn custom_transition_rules() {
        let rules = TransitionRules::from_pairs([(NodeType::MainClaim, NodeType::Evidence)]);
        let report = validate(&minimal(), &rules);
        assert!(report.is_valid);
        assert_eq!(report.warnings.len(), 2);
        assert!(rules.pairs().len() == 1);
    }
}
