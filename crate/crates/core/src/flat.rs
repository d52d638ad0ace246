//! Flat metric: element counts per node type and their absolute differences.

use core::ops::Index;

use serde::ser::SerializeMap;
use alloc::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cae::{AssuranceCase, NodeType};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TypeCounts([usize; 5]);

impl TypeCounts {
    pub fn from_array(counts: [usize; 5]) -> Self {
        TypeCounts(counts)
    }

    pub fn as_array(&self) -> [usize; 5] {
        self.0
    }

    pub fn get(&self, t: NodeType) -> usize {
        self.0[t.index()]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeType, usize)> + '_ {
        NodeType::ALL.into_iter().map(|t| (t, self.get(t)))
    }
}

impl Index<NodeType> for TypeCounts {
    type Output = usize;
    fn index(&self, t: NodeType) -> &usize {
        &self.0[t.index()]
    }
}

impl Serialize for TypeCounts {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(5))?;
        for (t, n) in self.iter() {
            map.serialize_entry(t.as_str(), &n)?;
        }
        map.end()
    }
}

/// Absent types read as zero.
impl<'de> Deserialize<'de> for TypeCounts {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<NodeType, usize>::deserialize(deserializer)?;
        let mut counts = [0usize; 5];
        for (t, n) in map {
            counts[t.index()] = n;
        }
        Ok(TypeCounts(counts))
    }
}

pub fn count_by_type(case: &AssuranceCase) -> TypeCounts {
    let mut counts = [0usize; 5];
    for node in case.nodes.values() {
        counts[node.node_type.index()] += 1;
    }
    TypeCounts(counts)
}

/// `|count_a[t] - count_b[t]|` for every node type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FlatDiff(TypeCounts);

impl FlatDiff {
    pub fn between(a: &TypeCounts, b: &TypeCounts) -> Self {
        let mut d = [0usize; 5];
        for t in NodeType::ALL {
            d[t.index()] = a.get(t).abs_diff(b.get(t));
        }
        FlatDiff(TypeCounts(d))
    }

    pub fn get(&self, t: NodeType) -> usize {
        self.0.get(t)
    }

    pub fn is_zero(&self) -> bool {
        self.0.total() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeType, usize)> + '_ {
        self.0.iter()
    }
}

pub fn flat_diff(a: &AssuranceCase, b: &AssuranceCase) -> FlatDiff {
    FlatDiff::between(&count_by_type(a), &count_by_type(b))
}
