//! Independent oracles and fixture builders shared by integration tests.
//! Nothing here calls into the algorithms it is used to check.

#![allow(dead_code, clippy::needless_range_loop)]

use acnli_core::cae::{AssuranceCase, CaeNode, CaseMeta, NodeType};
use rand::Rng;

/// Labelled rooted tree: `parent[0] == None`, `parent[i] < i` otherwise.
#[derive(Debug, Clone)]
pub struct Tree {
    pub labels: Vec<NodeType>,
    pub parent: Vec<Option<usize>>,
}

impl Tree {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len()).filter_map(|i| self.parent[i].map(|p| (p, i))).collect()
    }

    /// Adds one leaf under `at`.
    pub fn with_leaf(&self, at: usize, label: NodeType) -> Tree {
        let mut t = self.clone();
        t.labels.push(label);
        t.parent.push(Some(at));
        t
    }

    /// Case with ids `n0..`, texts `"{prefix} node {i}"`, any labels.
    pub fn to_case(&self, meta: CaseMeta, prefix: &str) -> AssuranceCase {
        let nodes: Vec<CaeNode> = (0..self.len())
            .map(|i| {
                let kids: Vec<String> = (0..self.len())
                    .filter(|&c| self.parent[c] == Some(i))
                    .map(|c| format!("n{c}"))
                    .collect();
                CaeNode::new(format!("n{i}"), self.labels[i], format!("{prefix} node {i}")).with_children(kids)
            })
            .collect();
        AssuranceCase::from_nodes(meta, "n0", nodes).expect("generated trees are well formed")
    }
}

pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Tree {
    let labels = (0..n).map(|_| NodeType::ALL[rng.random_range(0..5)]).collect();
    let parent = (0..n).map(|i| if i == 0 { None } else { Some(rng.random_range(0..i)) }).collect();
    Tree { labels, parent }
}

/// Minimum unit-cost edit distance over every partial injection of `a`'s
/// nodes into `b`'s. Node substitution costs 1 when labels differ; an edge
/// is kept only when both endpoints are mapped onto an edge of `b` with the
/// same direction.
pub fn brute_force_ged(a: &Tree, b: &Tree) -> f64 {
    fn cost(a: &Tree, b: &Tree, map: &[Option<usize>]) -> f64 {
        let mut c = 0.0;
        let mut used = vec![false; b.len()];
        for (i, m) in map.iter().enumerate() {
            match m {
                None => c += 1.0,
                Some(j) => {
                    used[*j] = true;
                    if a.labels[i] != b.labels[*j] {
                        c += 1.0;
                    }
                }
            }
        }
        c += used.iter().filter(|u| !**u).count() as f64;
        let kept = a
            .edges()
            .iter()
            .filter(|(p, ch)| match (map[*p], map[*ch]) {
                (Some(mp), Some(mc)) => b.parent[mc] == Some(mp),
                _ => false,
            })
            .count();
        c + (a.edges().len() - kept) as f64 + (b.edges().len() - kept) as f64
    }
    fn rec(a: &Tree, b: &Tree, i: usize, map: &mut Vec<Option<usize>>, used: &mut Vec<bool>, best: &mut f64) {
        if i == a.len() {
            *best = best.min(cost(a, b, map));
            return;
        }
        map.push(None);
        rec(a, b, i + 1, map, used, best);
        map.pop();
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                map.push(Some(j));
                rec(a, b, i + 1, map, used, best);
                map.pop();
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(a, b, 0, &mut Vec::new(), &mut vec![false; b.len()], &mut best);
    best
}

/// `(ancestor, descendant, distance)` for every pair at distance
/// `1..=max_hop`, from repeated boolean products of the child adjacency
/// matrix (paths in a tree are unique, so the k-th power marks distance k).
pub fn closure_pairs(t: &Tree, max_hop: usize) -> Vec<(usize, usize, usize)> {
    let n = t.len();
    let mut adj = vec![vec![false; n]; n];
    for (p, c) in t.edges() {
        adj[p][c] = true;
    }
    let mut power = adj.clone();
    let mut out = Vec::new();
    for k in 1..=max_hop {
        for u in 0..n {
            for v in 0..n {
                if power[u][v] {
                    out.push((u, v, k));
                }
            }
        }
        let mut next = vec![vec![false; n]; n];
        for u in 0..n {
            for w in 0..n {
                if power[u][w] {
                    for v in 0..n {
                        if adj[w][v] {
                            next[u][v] = true;
                        }
                    }
                }
            }
        }
        power = next;
    }
    out.sort();
    out
}

/// Interior nodes on the path from ancestor `u` down to `v`, top first.
pub fn interior(t: &Tree, u: usize, v: usize) -> Vec<usize> {
    let mut path = Vec::new();
    let mut cur = t.parent[v];
    while let Some(c) = cur {
        if c == u {
            break;
        }
        path.push(c);
        cur = t.parent[c];
    }
    path.reverse();
    path
}

pub fn path_tree(n: usize) -> Tree {
    Tree {
        labels: (0..n).map(|i| NodeType::ALL[i.min(4)]).collect(),
        parent: (0..n).map(|i| i.checked_sub(1)).collect(),
    }
}

pub fn star_tree(leaves: usize) -> Tree {
    let mut labels = vec![NodeType::MainClaim];
    labels.extend(std::iter::repeat_n(NodeType::Evidence, leaves));
    Tree {
        labels,
        parent: (0..=leaves).map(|i| if i == 0 { None } else { Some(0) }).collect(),
    }
}

/// Complete binary tree with levels `0..=depth` in heap order.
pub fn binary_tree(depth: u32) -> Tree {
    let n = (1usize << (depth + 1)) - 1;
    Tree {
        labels: (0..n)
            .map(|i| NodeType::ALL[(usize::BITS - 1 - (i + 1).leading_zeros()) as usize % 5])
            .collect(),
        parent: (0..n).map(|i| if i == 0 { None } else { Some((i - 1) / 2) }).collect(),
    }
}

/// Exact two-sided p-value by visiting every relabelling of the pooled
/// values into groups of the original sizes.
pub fn exhaustive_permutation_p(a: &[f64], b: &[f64]) -> (f64, usize) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let observed = (mean(a) - mean(b)).abs();
    let (mut extreme, mut total) = (0usize, 0usize);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let (mut ga, mut gb) = (Vec::new(), Vec::new());
        for (i, x) in pooled.iter().enumerate() {
            if mask & (1 << i) != 0 {
                ga.push(*x);
            } else {
                gb.push(*x);
            }
        }
        total += 1;
        if (mean(&ga) - mean(&gb)).abs() >= observed - 1e-12 {
            extreme += 1;
        }
    }
    (extreme as f64 / total as f64, total)
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
