//! Labeled simple graphs with unique positive node IDs.

mod enumerate;
mod gadgets;
mod generate;

pub use enumerate::{enumerate_small_instances, GadgetFamily, InstanceSpace, ENUMERATION_LIMIT};
pub use gadgets::{build_gadget, GadgetSpec};
pub use generate::{parse_generator, random_labeled_graph};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;

pub type NodeId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node id must be positive")]
    ZeroId,
    #[error("node {0} listed twice")]
    DuplicateNode(NodeId),
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("edge ({0},{1}) listed twice")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge endpoint {0} is not a node")]
    UnknownNode(NodeId),
    #[error("node id {id} exceeds the id space n^3 = {bound}")]
    IdOutOfRange { id: NodeId, bound: u64 },
    #[error("declared n = {declared} but {actual} labeled nodes were given")]
    NodeCountMismatch { declared: usize, actual: usize },
    #[error("malformed instance json: {0}")]
    Json(String),
    #[error("invalid gadget parameters: {0}")]
    Gadget(String),
    #[error("enumeration would produce {count} instances, above the limit of {limit}")]
    EnumerationTooLarge { count: u128, limit: u128 },
}

/// Node input. `Pair` covers the two-coordinate labels where either side may be ⊥.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub enum Label {
    #[default]
    Blank,
    Bits(BitString),
    Index(u32),
    Pair(Option<BitString>, Option<u32>),
}

impl Label {
    pub fn bit(b: bool) -> Self {
        Label::Bits(BitString::from_bits(vec![b]))
    }

    pub fn as_bits(&self) -> Option<&BitString> {
        match self {
            Label::Bits(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_index(&self) -> Option<u32> {
        match self {
            Label::Index(i) => Some(*i),
            _ => None,
        }
    }

    /// A label that is exactly one bit.
    pub fn as_single_bit(&self) -> Option<bool> {
        match self {
            Label::Bits(b) if b.len() == 1 => b.get(0),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum LabelRepr {
    Blank,
    Bits { bits: BitString },
    Index { index: u32 },
    Pair { bits: Option<BitString>, index: Option<u32> },
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match self.clone() {
            Label::Blank => LabelRepr::Blank,
            Label::Bits(bits) => LabelRepr::Bits { bits },
            Label::Index(index) => LabelRepr::Index { index },
            Label::Pair(bits, index) => LabelRepr::Pair { bits, index },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match LabelRepr::deserialize(d)? {
            LabelRepr::Blank => Label::Blank,
            LabelRepr::Bits { bits } => Label::Bits(bits),
            LabelRepr::Index { index } => Label::Index(index),
            LabelRepr::Pair { bits, index } => Label::Pair(bits, index),
        })
    }
}

/// Simple undirected graph; every node carries a label.
///
/// The ID space bound `N` is the largest ID present, which is at most `n³`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    adj: BTreeMap<NodeId, BTreeSet<NodeId>>,
    labels: BTreeMap<NodeId, Label>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[NodeId; 2]>,
    labels: BTreeMap<NodeId, Label>,
}

impl LabeledGraph {
    pub fn new(
        nodes: impl IntoIterator<Item = (NodeId, Label)>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, GraphError> {
        let mut labels = BTreeMap::new();
        for (id, label) in nodes {
            if id == 0 {
                return Err(GraphError::ZeroId);
            }
            if labels.insert(id, label).is_some() {
                return Err(GraphError::DuplicateNode(id));
            }
        }
        let n = labels.len() as u64;
        let bound = n.pow(3);
        if let Some((&max, _)) = labels.last_key_value() {
            if u64::from(max) > bound {
                return Err(GraphError::IdOutOfRange { id: max, bound });
            }
        }
        let mut adj: BTreeMap<NodeId, BTreeSet<NodeId>> = labels.keys().map(|&v| (v, BTreeSet::new())).collect();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            for w in [u, v] {
                if !adj.contains_key(&w) {
                    return Err(GraphError::UnknownNode(w));
                }
            }
            if !adj.get_mut(&u).unwrap().insert(v) {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            adj.get_mut(&v).unwrap().insert(u);
        }
        Ok(Self { adj, labels })
    }

    /// Nodes `1..=n`, all blank, with the given edges.
    pub fn unlabeled(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self, GraphError> {
        Self::new((1..=n as NodeId).map(|v| (v, Label::Blank)), edges)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn id_bound(&self) -> u64 {
        self.labels.last_key_value().map_or(0, |(&v, _)| u64::from(v))
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.labels.keys().copied()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.labels.contains_key(&v)
    }

    /// Panics if `v` is not a node.
    pub fn neighbors(&self, v: NodeId) -> &BTreeSet<NodeId> {
        &self.adj[&v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[&v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.values().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn label(&self, v: NodeId) -> &Label {
        &self.labels[&v]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj.get(&u).is_some_and(|s| s.contains(&v))
    }

    /// Edges as `(min, max)` pairs in lexicographic order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        self.adj.iter().flat_map(|(&u, ns)| ns.range(u + 1..).map(move |&v| (u, v))).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn set_label(&mut self, v: NodeId, label: Label) -> Result<(), GraphError> {
        match self.labels.get_mut(&v) {
            Some(l) => {
                *l = label;
                Ok(())
            }
            None => Err(GraphError::UnknownNode(v)),
        }
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for w in [u, v] {
            if !self.contains(w) {
                return Err(GraphError::UnknownNode(w));
            }
        }
        if !self.adj.get_mut(&u).unwrap().insert(v) {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.adj.get_mut(&v).unwrap().insert(u);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        let removed = self.adj.get_mut(&u).is_some_and(|s| s.remove(&v));
        if removed {
            self.adj.get_mut(&v).unwrap().remove(&u);
        }
        removed
    }

    /// Nodes within `radius` hops of `v`, including `v`.
    pub fn ball(&self, v: NodeId, radius: usize) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::from([v]);
        let mut frontier = vec![v];
        for _ in 0..radius {
            let mut next = Vec::new();
            for u in frontier {
                for &w in &self.adj[&u] {
                    if seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        match self.labels.keys().next() {
            None => true,
            Some(&v) => self.ball(v, self.n()).len() == self.n(),
        }
    }

    /// If the graph is a simple path on all its nodes, its node order starting
    /// from the smaller-ID endpoint. A single node counts as a path.
    pub fn path_order(&self) -> Option<Vec<NodeId>> {
        let n = self.n();
        if n == 0 || self.edge_count() != n - 1 {
            return None;
        }
        if n == 1 {
            return Some(self.nodes().collect());
        }
        if self.adj.values().any(|s| s.len() > 2) {
            return None;
        }
        let start = self.nodes().find(|&v| self.degree(v) == 1)?;
        let mut order = vec![start];
        let mut prev = 0;
        let mut cur = start;
        while let Some(&next) = self.adj[&cur].iter().find(|&&w| w != prev) {
            order.push(next);
            prev = cur;
            cur = next;
        }
        (order.len() == n).then_some(order)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_repr()).expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let repr: GraphRepr = serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        if repr.n != repr.labels.len() {
            return Err(GraphError::NodeCountMismatch { declared: repr.n, actual: repr.labels.len() });
        }
        Self::new(repr.labels, repr.edges.into_iter().map(|[u, v]| (u, v)))
    }

    fn to_repr(&self) -> GraphRepr {
        GraphRepr {
            n: self.n(),
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            labels: self.labels.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_with_tail() -> LabeledGraph {
        LabeledGraph::unlabeled(4, [(1, 2), (2, 3), (1, 3), (3, 4)]).unwrap()
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(LabeledGraph::unlabeled(2, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(LabeledGraph::unlabeled(2, [(1, 3)]), Err(GraphError::UnknownNode(3)));
        assert_eq!(LabeledGraph::unlabeled(2, [(1, 2), (2, 1)]), Err(GraphError::DuplicateEdge(1, 2)));
        assert_eq!(
            LabeledGraph::new([(9, Label::Blank), (1, Label::Blank)], []),
            Err(GraphError::IdOutOfRange { id: 9, bound: 8 })
        );
        assert_eq!(LabeledGraph::new([(0, Label::Blank)], []), Err(GraphError::ZeroId));
    }

    #[test]
    fn basic_queries() {
        let g = triangle_with_tail();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edges(), vec![(1, 2), (1, 3), (2, 3), (3, 4)]);
        assert_eq!(g.max_degree(), 3);
        assert_eq!(g.ball(4, 1), BTreeSet::from([3, 4]));
        assert!(g.is_connected());
        assert!(g.path_order().is_none());
        let p = LabeledGraph::unlabeled(3, [(3, 1), (1, 2)]).unwrap();
        assert_eq!(p.path_order(), Some(vec![2, 1, 3]));
    }

    #[test]
    fn path_plus_cycle_is_not_a_path() {
        let g = LabeledGraph::unlabeled(5, [(1, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!(g.path_order().is_none());
    }

    #[test]
    fn json_round_trip() {
        let mut g = triangle_with_tail();
        g.set_label(1, Label::Bits("0110".parse().unwrap())).unwrap();
        g.set_label(2, Label::Index(3)).unwrap();
        g.set_label(3, Label::Pair(None, Some(4))).unwrap();
        let text = g.to_json();
        assert!(text.contains("\"kind\": \"bits\""));
        assert!(text.contains("\"0110\""));
        assert_eq!(LabeledGraph::from_json(&text).unwrap(), g);
    }

    #[test]
    fn json_count_mismatch() {
        let text = r#"{"n": 3, "edges": [], "labels": {"1": {"kind": "blank"}}}"#;
        assert!(matches!(LabeledGraph::from_json(text), Err(GraphError::NodeCountMismatch { declared: 3, actual: 1 })));
    }
}
