//! Deterministic builders for the reduction gadgets. IDs follow generator order
//! starting at 1 unless a layout below says otherwise.

use super::{GraphError, Label, LabeledGraph, NodeId};
use crate::bits::BitString;
use crate::pointer::PointerMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GadgetSpec {
    /// Path on `n` nodes, optional one-bit marks.
    Path {
        n: usize,
        marks: Option<BitString>,
    },
    Cycle {
        n: usize,
        marks: Option<BitString>,
    },
    Clique {
        n: usize,
        marks: Option<BitString>,
    },
    /// Path `a1..an, c, bn..b1` with IDs `1..2n+1` in that order.
    /// Labels: `a1 = start_index`, `an = x`, `bn = y`, `b1 = end_index`.
    XorIndexPath {
        x: BitString,
        y: BitString,
        start_index: u32,
        end_index: u32,
    },
    /// Two cliques on `n` nodes whose edges follow `x` and `y`, joined by a
    /// path of `4k` nodes. Edge `a_mark` of the first clique and `b_mark` of the
    /// second have both endpoints marked.
    CliqueBridge {
        n: usize,
        x: BitString,
        y: BitString,
        a_mark: u32,
        b_mark: u32,
        k: usize,
    },
    /// `K_n`; node `v` gets row `v` of the label matrix.
    DisjOnClique {
        rows: Vec<BitString>,
    },
    /// Path `u_n..u_1, v_1..v_n`; inputs on `u_1`, `v_1`.
    DisjOnEdge {
        x: BitString,
        y: BitString,
    },
    /// Same path; inputs on `u_2`, `v_2`.
    DisjOnPath {
        x: BitString,
        y: BitString,
    },
    /// Path on `2n` nodes with the two maps on its endpoints (ID 1 and `2n`).
    KPclp {
        first: PointerMap,
        second: PointerMap,
    },
    /// Two stars joined at their roots; leaves carry `(bit, index)`.
    DisjEdgeStar {
        a_leaves: Vec<(bool, u32)>,
        b_leaves: Vec<(bool, u32)>,
    },
    /// Clique `K_n` (IDs `1..n`), path `v1..v4` (IDs `n+1..n+4`) with `v4`
    /// attached to clique node 1, pendants `u1`, `u2` (IDs `n+5`, `n+6`) on `v1`.
    SpecialDisjointness {
        x: BitString,
        y: BitString,
        b: bool,
    },
    /// `K_{n,n,n,n}`; part `p` (1-based) holds IDs `(p−1)n+1..pn`.
    /// Part 1 node `i` carries row `x[i]`, part 4 node `j` carries row `y[j]`.
    FourPartite {
        x: Vec<BitString>,
        y: Vec<BitString>,
    },
}

fn bad(msg: impl Into<String>) -> GraphError {
    GraphError::Gadget(msg.into())
}

fn marks_labels(n: usize, marks: &Option<BitString>) -> Result<Vec<(NodeId, Label)>, GraphError> {
    match marks {
        None => Ok((1..=n as NodeId).map(|v| (v, Label::Blank)).collect()),
        Some(m) if m.len() == n => Ok(m.bits().iter().zip(1..).map(|(&b, v)| (v, Label::bit(b))).collect()),
        Some(m) => Err(bad(format!("{} marks for {n} nodes", m.len()))),
    }
}

fn path_edges(ids: &[NodeId]) -> Vec<(NodeId, NodeId)> {
    ids.windows(2).map(|w| (w[0], w[1])).collect()
}

fn clique_edges(ids: &[NodeId]) -> Vec<(NodeId, NodeId)> {
    let mut e = Vec::new();
    for (a, &u) in ids.iter().enumerate() {
        for &v in &ids[a + 1..] {
            e.push((u, v));
        }
    }
    e
}

/// Vertex pairs of `K_n` on IDs `offset+1..offset+n`, ordered by `(min, max)`.
pub(crate) fn clique_pairs(n: usize, offset: NodeId) -> Vec<(NodeId, NodeId)> {
    let ids: Vec<NodeId> = (1..=n as NodeId).map(|v| v + offset).collect();
    clique_edges(&ids)
}

fn ids(range: std::ops::RangeInclusive<usize>) -> Vec<NodeId> {
    range.map(|v| v as NodeId).collect()
}

pub fn build_gadget(spec: &GadgetSpec) -> Result<LabeledGraph, GraphError> {
    match spec {
        GadgetSpec::Path { n, marks } => LabeledGraph::new(marks_labels(*n, marks)?, path_edges(&ids(1..=*n))),
        GadgetSpec::Cycle { n, marks } => {
            if *n < 3 {
                return Err(bad("a cycle needs at least 3 nodes"));
            }
            let mut e = path_edges(&ids(1..=*n));
            e.push((*n as NodeId, 1));
            LabeledGraph::new(marks_labels(*n, marks)?, e)
        }
        GadgetSpec::Clique { n, marks } => LabeledGraph::new(marks_labels(*n, marks)?, clique_edges(&ids(1..=*n))),
        GadgetSpec::XorIndexPath { x, y, start_index, end_index } => {
            let n = x.len();
            if n < 2 || y.len() != n {
                return Err(bad("xor-index path needs |x| = |y| >= 2"));
            }
            for i in [*start_index, *end_index] {
                if i == 0 || i as usize > n {
                    return Err(bad(format!("index {i} outside 1..={n}")));
                }
            }
            let total = 2 * n + 1;
            let mut labels: Vec<(NodeId, Label)> = (1..=total as NodeId).map(|v| (v, Label::Blank)).collect();
            labels[0].1 = Label::Index(*start_index);
            labels[n - 1].1 = Label::Bits(x.clone());
            labels[n + 1].1 = Label::Bits(y.clone());
            labels[total - 1].1 = Label::Index(*end_index);
            LabeledGraph::new(labels, path_edges(&ids(1..=total)))
        }
        GadgetSpec::CliqueBridge { n, x, y, a_mark, b_mark, k } => {
            let m = n * n.saturating_sub(1) / 2;
            if *n < 2 || *k == 0 || x.len() != m || y.len() != m {
                return Err(bad(format!("clique bridge needs n >= 2, k >= 1 and |x| = |y| = {m}")));
            }
            for i in [*a_mark, *b_mark] {
                if i == 0 || i as usize > m {
                    return Err(bad(format!("edge index {i} outside 1..={m}")));
                }
            }
            let nn = *n as NodeId;
            let a_pairs = clique_pairs(*n, 0);
            let b_pairs = clique_pairs(*n, nn);
            let mut edges = Vec::new();
            for (r, (&bx, &by)) in x.bits().iter().zip(y.bits()).enumerate() {
                if bx {
                    edges.push(a_pairs[r]);
                }
                if by {
                    edges.push(b_pairs[r]);
                }
            }
            let path = ids(2 * n + 1..=2 * n + 4 * k);
            edges.extend(path_edges(&path));
            let (first, last) = (path[0], *path.last().unwrap());
            edges.extend((1..=nn).map(|a| (a, first)));
            edges.extend((nn + 1..=2 * nn).map(|b| (b, last)));
            let (a1, a2) = a_pairs[*a_mark as usize - 1];
            let (b1, b2) = b_pairs[*b_mark as usize - 1];
            let marked = [a1, a2, b1, b2];
            let labels = (1..=(2 * n + 4 * k) as NodeId).map(|v| (v, Label::bit(marked.contains(&v))));
            LabeledGraph::new(labels, edges)
        }
        GadgetSpec::DisjOnClique { rows } => {
            let n = rows.len();
            if n == 0 || rows.iter().any(|r| r.len() != n) {
                return Err(bad("disjointness-on-clique needs n >= 1 rows of length n"));
            }
            let labels = rows.iter().cloned().zip(1..).map(|(r, v)| (v, Label::Bits(r)));
            LabeledGraph::new(labels, clique_edges(&ids(1..=n)))
        }
        GadgetSpec::DisjOnEdge { x, y } | GadgetSpec::DisjOnPath { x, y } => {
            let n = x.len();
            let offset = usize::from(matches!(spec, GadgetSpec::DisjOnPath { .. }));
            if y.len() != n || n < 1 + offset {
                return Err(bad("disjointness path gadget needs |x| = |y| large enough"));
            }
            let total = 2 * n;
            let mut labels: Vec<(NodeId, Label)> = (1..=total as NodeId).map(|v| (v, Label::Blank)).collect();
            // u_1 sits at position n, v_1 at n+1 (1-based).
            labels[n - 1 - offset].1 = Label::Bits(x.clone());
            labels[n + offset].1 = Label::Bits(y.clone());
            LabeledGraph::new(labels, path_edges(&ids(1..=total)))
        }
        GadgetSpec::KPclp { first, second } => {
            let n = first.n();
            if n == 0 || second.n() != n {
                return Err(bad("pointer maps must share n >= 1"));
            }
            let total = 2 * n;
            let mut labels: Vec<(NodeId, Label)> = (1..=total as NodeId).map(|v| (v, Label::Blank)).collect();
            labels[0].1 = Label::Bits(first.encode());
            labels[total - 1].1 = Label::Bits(second.encode());
            LabeledGraph::new(labels, path_edges(&ids(1..=total)))
        }
        GadgetSpec::DisjEdgeStar { a_leaves, b_leaves } => {
            let n = a_leaves.len();
            if n == 0 || b_leaves.len() != n {
                return Err(bad("both stars need the same number n >= 1 of leaves"));
            }
            let nn = n as NodeId;
            let (ra, rb) = (1, nn + 2);
            let leaf = |&(b, i): &(bool, u32)| Label::Pair(Some(BitString::from_bits(vec![b])), Some(i));
            let mut labels = vec![(ra, Label::Blank), (rb, Label::Blank)];
            let mut edges = vec![(ra, rb)];
            for (t, l) in a_leaves.iter().enumerate() {
                labels.push((ra + 1 + t as NodeId, leaf(l)));
                edges.push((ra, ra + 1 + t as NodeId));
            }
            for (t, l) in b_leaves.iter().enumerate() {
                labels.push((rb + 1 + t as NodeId, leaf(l)));
                edges.push((rb, rb + 1 + t as NodeId));
            }
            LabeledGraph::new(labels, edges)
        }
        GadgetSpec::SpecialDisjointness { x, y, b } => {
            let n = x.len();
            if n == 0 || y.len() != n {
                return Err(bad("special disjointness needs |x| = |y| = n >= 1"));
            }
            let nn = n as NodeId;
            let v = |r: NodeId| nn + r;
            let mut labels: Vec<(NodeId, Label)> = (1..=nn).map(|c| (c, Label::Pair(None, None))).collect();
            for r in 1..=3 {
                labels.push((v(r), Label::Pair(None, Some(r))));
            }
            labels.push((v(4), Label::Pair(Some(BitString::from_bits(vec![*b])), Some(4))));
            labels.push((v(5), Label::Pair(Some(x.clone()), None)));
            labels.push((v(6), Label::Pair(Some(y.clone()), None)));
            let mut edges = clique_edges(&ids(1..=n));
            edges.extend([(v(1), v(2)), (v(2), v(3)), (v(3), v(4)), (v(4), 1), (v(1), v(5)), (v(1), v(6))]);
            LabeledGraph::new(labels, edges)
        }
        GadgetSpec::FourPartite { x, y } => {
            let n = x.len();
            if n == 0 || y.len() != n || x.iter().chain(y).any(|r| r.len() != n) {
                return Err(bad("four-partite gadget needs two n x n matrices, n >= 1"));
            }
            let nn = n as NodeId;
            let part = |v: NodeId| (v - 1) / nn;
            let mut labels = Vec::new();
            for v in 1..=4 * nn {
                let row = ((v - 1) % nn) as usize;
                let l = match part(v) {
                    0 => Label::Bits(x[row].clone()),
                    3 => Label::Bits(y[row].clone()),
                    _ => Label::Blank,
                };
                labels.push((v, l));
            }
            let mut edges = Vec::new();
            for u in 1..=4 * nn {
                for w in u + 1..=4 * nn {
                    if part(u) != part(w) {
                        edges.push((u, w));
                    }
                }
            }
            LabeledGraph::new(labels, edges)
        }
    }
}
