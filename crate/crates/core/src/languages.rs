//! Centralized membership oracles. These read the whole graph and are the
//! reference every distributed protocol is checked against.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bits::BitString;
use crate::graph::{Label, LabeledGraph, NodeId};
use crate::pointer::{pointer_chase_bit, PointerMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LanguageId {
    OneMarkedEdge,
    XorIndexPath,
    Tomdf,
    TriangleFreeness,
    C4Freeness,
    DisjOnClique,
    DisjOnEdge,
    DisjOnPath,
    KPclp { k: usize },
    DisjEdgeStar,
    SpecialDisjointness,
    FourPartite,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown language {0:?}")]
pub struct UnknownLanguage(pub String);

const NAMES: [(LanguageId, &str, &[&str]); 11] = [
    (LanguageId::OneMarkedEdge, "one-marked-edge", &[]),
    (LanguageId::XorIndexPath, "xor-index-path", &[]),
    (LanguageId::Tomdf, "tomdf", &[]),
    (LanguageId::TriangleFreeness, "triangle-freeness", &[]),
    (LanguageId::C4Freeness, "c4-freeness", &[]),
    (LanguageId::DisjOnClique, "disjointness-on-clique", &["disj-on-clique"]),
    (LanguageId::DisjOnEdge, "disjointness-on-edge", &["disj-on-edge"]),
    (LanguageId::DisjOnPath, "disjointness-on-path", &["disj-on-path"]),
    (LanguageId::DisjEdgeStar, "disj-edge-star", &[]),
    (LanguageId::SpecialDisjointness, "special-disjointness", &[]),
    (LanguageId::FourPartite, "disj-4-partite-graph", &["disj-4partite"]),
];

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LanguageId::KPclp { k } => write!(f, "k-pclp:k={k}"),
            other => {
                let name = NAMES.iter().find(|(l, _, _)| l == other).map(|(_, s, _)| *s).unwrap();
                f.write_str(name)
            }
        }
    }
}

/// Accepts the canonical names, the short aliases, and `k-pclp:k=K` or `K-pclp`.
impl FromStr for LanguageId {
    type Err = UnknownLanguage;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        if let Some(rest) = t.strip_prefix("k-pclp:k=") {
            return rest.parse().map(|k| LanguageId::KPclp { k }).map_err(|_| UnknownLanguage(s.into()));
        }
        if let Some(k) = t.strip_suffix("-pclp").and_then(|k| k.parse().ok()) {
            return Ok(LanguageId::KPclp { k });
        }
        NAMES
            .iter()
            .find(|(_, name, aliases)| *name == t || aliases.contains(&t.as_str()))
            .map(|(l, _, _)| *l)
            .ok_or_else(|| UnknownLanguage(s.into()))
    }
}

/// True iff `x` and `y` have equal length and no common 1-position.
pub fn disjoint(x: &BitString, y: &BitString) -> bool {
    x.len() == y.len() && x.bits().iter().zip(y.bits()).all(|(&a, &b)| !(a && b))
}

pub fn in_triangle(g: &LabeledGraph, v: NodeId) -> bool {
    let ns = g.neighbors(v);
    ns.iter().any(|&a| g.neighbors(a).iter().any(|b| *b > a && ns.contains(b)))
}

pub fn has_triangle(g: &LabeledGraph) -> bool {
    g.nodes().any(|v| in_triangle(g, v))
}

/// A 4-cycle exists iff two distinct nodes share two neighbors.
pub fn has_c4(g: &LabeledGraph) -> bool {
    let nodes: Vec<NodeId> = g.nodes().collect();
    nodes
        .iter()
        .enumerate()
        .any(|(i, &u)| nodes[i + 1..].iter().any(|&w| g.neighbors(u).intersection(g.neighbors(w)).nth(1).is_some()))
}

pub fn is_tomdf(g: &LabeledGraph) -> bool {
    let delta = g.max_degree();
    g.nodes().all(|v| g.degree(v) < delta || !in_triangle(g, v))
}

pub fn membership(lang: LanguageId, g: &LabeledGraph) -> bool {
    match lang {
        LanguageId::OneMarkedEdge => one_marked_edge(g),
        LanguageId::XorIndexPath => xor_index_path(g),
        LanguageId::Tomdf => is_tomdf(g),
        LanguageId::TriangleFreeness => !has_triangle(g),
        LanguageId::C4Freeness => !has_c4(g),
        LanguageId::DisjOnClique => disj_on_clique(g),
        LanguageId::DisjOnEdge => disj_on_path_at(g, 0),
        LanguageId::DisjOnPath => disj_on_path_at(g, 1),
        LanguageId::KPclp { k } => k_pclp(g, k),
        LanguageId::DisjEdgeStar => disj_edge_star(g),
        LanguageId::SpecialDisjointness => special_disjointness(g),
        LanguageId::FourPartite => four_partite(g),
    }
}

fn one_marked_edge(g: &LabeledGraph) -> bool {
    let marks: Option<Vec<bool>> = g.nodes().map(|v| g.label(v).as_single_bit()).collect();
    if marks.is_none() {
        return false;
    }
    let marked = |v| g.label(v).as_single_bit() == Some(true);
    g.edges().into_iter().filter(|&(u, v)| marked(u) && marked(v)).count() == 1
}

fn xor_index_path(g: &LabeledGraph) -> bool {
    let Some(order) = g.path_order() else { return false };
    let total = order.len();
    if total < 5 || total % 2 == 0 {
        return false;
    }
    let n = (total - 1) / 2;
    let l = |p: usize| g.label(order[p]);
    let index = |p: usize| l(p).as_index().filter(|&i| i >= 1 && i as usize <= n);
    let vector = |p: usize| l(p).as_bits().filter(|b| b.len() == n);
    let (Some(i), Some(x), Some(y), Some(j)) = (index(0), vector(n - 1), vector(n + 1), index(2 * n)) else {
        return false;
    };
    let blank_elsewhere = (0..total).filter(|&p| ![0, n - 1, n + 1, 2 * n].contains(&p)).all(|p| *l(p) == Label::Blank);
    blank_elsewhere && x.get(j as usize - 1) != y.get(i as usize - 1)
}

fn disj_on_clique(g: &LabeledGraph) -> bool {
    let n = g.n();
    if n == 0 || g.edge_count() != n * (n - 1) / 2 {
        return false;
    }
    let rows: Option<Vec<&BitString>> = g.nodes().map(|v| g.label(v).as_bits().filter(|b| b.len() == n)).collect();
    let Some(rows) = rows else { return false };
    (0..n).all(|i| rows.iter().any(|r| r.get(i) == Some(false)))
}

/// Path on `2n` nodes with `n > 2`; inputs sit `offset` steps out from the middle edge.
fn disj_on_path_at(g: &LabeledGraph, offset: usize) -> bool {
    let Some(order) = g.path_order() else { return false };
    let total = order.len();
    if total % 2 == 1 || total / 2 <= 2 {
        return false;
    }
    let n = total / 2;
    let (pu, pv) = (n - 1 - offset, n + offset);
    let l = |p: usize| g.label(order[p]);
    let (Some(x), Some(y)) = (l(pu).as_bits(), l(pv).as_bits()) else { return false };
    x.len() == n && (0..total).filter(|&p| p != pu && p != pv).all(|p| *l(p) == Label::Blank) && disjoint(x, y)
}

fn k_pclp(g: &LabeledGraph, k: usize) -> bool {
    let Some(order) = g.path_order() else { return false };
    if order.len() < 2 {
        return false;
    }
    let (s, e) = (order[0], *order.last().unwrap());
    if order[1..order.len() - 1].iter().any(|&v| *g.label(v) != Label::Blank) {
        return false;
    }
    let decode = |v| g.label(v).as_bits().and_then(|b| PointerMap::decode(b).ok());
    let (Some(fs), Some(fe)) = (decode(s), decode(e)) else { return false };
    if order.len() != 2 * fs.n() {
        return false;
    }
    let (first, second) = if fs.contains(0) { (fs, fe) } else { (fe, fs) };
    pointer_chase_bit(&first, &second, k).unwrap_or(false)
}

fn star_leaf(l: &Label) -> Option<(bool, u32)> {
    match l {
        Label::Pair(Some(b), Some(i)) if b.len() == 1 => Some((b.get(0).unwrap(), *i)),
        _ => None,
    }
}

fn disj_edge_star(g: &LabeledGraph) -> bool {
    let total = g.n();
    if total < 4 || total % 2 == 1 {
        return false;
    }
    let n = (total - 2) / 2;
    let roots: Vec<NodeId> = g.nodes().filter(|&v| g.degree(v) == n + 1).collect();
    if roots.len() != 2 || !g.has_edge(roots[0], roots[1]) {
        return false;
    }
    let mut vectors = Vec::new();
    for (&r, &other) in roots.iter().zip(roots.iter().rev()) {
        if *g.label(r) != Label::Blank {
            return false;
        }
        let mut vec = vec![None; n];
        for &leaf in g.neighbors(r).iter().filter(|&&w| w != other) {
            let Some((bit, i)) = (g.degree(leaf) == 1).then(|| star_leaf(g.label(leaf))).flatten() else {
                return false;
            };
            match vec.get_mut((i as usize).wrapping_sub(1)) {
                Some(slot @ None) => *slot = Some(bit),
                _ => return false,
            }
        }
        vectors.push(vec.into_iter().collect::<Option<BitString>>());
    }
    match (&vectors[0], &vectors[1]) {
        (Some(x), Some(y)) => disjoint(x, y),
        _ => false,
    }
}

fn special_disjointness(g: &LabeledGraph) -> bool {
    let total = g.n();
    if total < 7 {
        return false;
    }
    let n = total - 6;
    let mut clique = Vec::new();
    let mut pendants = Vec::new();
    let mut path: [Vec<NodeId>; 4] = Default::default();
    let mut b = None;
    for v in g.nodes() {
        match g.label(v) {
            Label::Pair(None, None) => clique.push(v),
            Label::Pair(Some(x), None) => pendants.push((v, x)),
            Label::Pair(None, Some(r @ 1..=3)) => path[*r as usize - 1].push(v),
            Label::Pair(Some(bit), Some(4)) if bit.len() == 1 => {
                path[3].push(v);
                b = bit.get(0);
            }
            _ => return false,
        }
    }
    if clique.len() != n || pendants.len() != 2 || path.iter().any(|p| p.len() != 1) {
        return false;
    }
    let [v1, v2, v3, v4] = [path[0][0], path[1][0], path[2][0], path[3][0]];
    let attached: Vec<NodeId> = clique.iter().copied().filter(|&c| g.has_edge(v4, c)).collect();
    let clique_complete = clique.iter().enumerate().all(|(i, &a)| clique[i + 1..].iter().all(|&c| g.has_edge(a, c)));
    let wanted = [(v1, v2), (v2, v3), (v3, v4), (v1, pendants[0].0), (v1, pendants[1].0)];
    let shape_ok = attached.len() == 1
        && clique_complete
        && wanted.iter().all(|&(a, c)| g.has_edge(a, c))
        && g.edge_count() == n * (n - 1) / 2 + 6;
    let (x, y) = (pendants[0].1, pendants[1].1);
    shape_ok && x.len() == n && y.len() == n && disjoint(x, y) == b.unwrap()
}

/// Canonical layout only: part `p` holds IDs `(p−1)n+1..pn`.
fn four_partite(g: &LabeledGraph) -> bool {
    let total = g.n();
    if total == 0 || !total.is_multiple_of(4) || g.id_bound() != total as u64 {
        return false;
    }
    let n = total / 4;
    let part = |v: NodeId| (v as usize - 1) / n;
    let edges_ok = g.edge_count() == 6 * n * n && g.edges().into_iter().all(|(u, v)| part(u) != part(v));
    if !edges_ok {
        return false;
    }
    let row = |v: NodeId| g.label(v).as_bits().filter(|b| b.len() == n);
    let xs: Option<Vec<&BitString>> = (1..=n as NodeId).map(row).collect();
    let ys: Option<Vec<&BitString>> = (3 * n as NodeId + 1..=4 * n as NodeId).map(row).collect();
    let blanks_ok = (n as NodeId + 1..=3 * n as NodeId).all(|v| *g.label(v) == Label::Blank);
    let (Some(xs), Some(ys)) = (xs, ys) else { return false };
    blanks_ok && (0..n).all(|i| (0..n).all(|j| !(xs[i].get(j).unwrap() && ys[j].get(i).unwrap())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_gadget, GadgetSpec};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn names_round_trip() {
        for (l, name, aliases) in NAMES {
            assert_eq!(name.parse::<LanguageId>().unwrap(), l);
            assert_eq!(l.to_string().parse::<LanguageId>().unwrap(), l);
            for a in aliases {
                assert_eq!(a.parse::<LanguageId>().unwrap(), l);
            }
        }
        assert_eq!("k-pclp:k=2".parse::<LanguageId>().unwrap(), LanguageId::KPclp { k: 2 });
        assert_eq!("3-pclp".parse::<LanguageId>().unwrap(), LanguageId::KPclp { k: 3 });
        assert!("nope".parse::<LanguageId>().is_err());
    }

    #[test]
    fn one_marked_edge_examples() {
        let p = |m: &str| build_gadget(&GadgetSpec::Path { n: m.len(), marks: Some(bs(m)) }).unwrap();
        assert!(membership(LanguageId::OneMarkedEdge, &p("110")));
        assert!(!membership(LanguageId::OneMarkedEdge, &p("111")));
        assert!(!membership(LanguageId::OneMarkedEdge, &p("101")));
        let blank = build_gadget(&GadgetSpec::Path { n: 3, marks: None }).unwrap();
        assert!(!membership(LanguageId::OneMarkedEdge, &blank));
    }

    #[test]
    fn xor_index_path_examples() {
        let g = |x: &str, y: &str, i, j| {
            build_gadget(&GadgetSpec::XorIndexPath { x: bs(x), y: bs(y), start_index: i, end_index: j }).unwrap()
        };
        // x_2 = 0 = y_1.
        assert!(!membership(LanguageId::XorIndexPath, &g("10", "01", 1, 2)));
        // x_1 = 1, y_1 = 0.
        assert!(membership(LanguageId::XorIndexPath, &g("10", "01", 1, 1)));
        let mut bad = g("10", "01", 1, 1);
        bad.set_label(3, Label::Index(1)).unwrap();
        assert!(!membership(LanguageId::XorIndexPath, &bad));
    }

    #[test]
    fn triangle_family() {
        let k3 = LabeledGraph::unlabeled(3, [(1, 2), (2, 3), (1, 3)]).unwrap();
        assert!(!membership(LanguageId::TriangleFreeness, &k3));
        assert!(!membership(LanguageId::Tomdf, &k3));
        // Triangle 1-2-3 plus hub 4 joined to 1, 2 and pendants: max degree node 4 is outside the triangle.
        let g = LabeledGraph::unlabeled(7, [(1, 2), (2, 3), (1, 3), (4, 1), (4, 5), (4, 6), (4, 7)]).unwrap();
        assert!(membership(LanguageId::Tomdf, &g));
        let c4 = LabeledGraph::unlabeled(4, [(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        assert!(!membership(LanguageId::C4Freeness, &c4));
        assert!(membership(LanguageId::C4Freeness, &k3));
    }

    #[test]
    fn disjointness_gadgets() {
        let e = build_gadget(&GadgetSpec::DisjOnEdge { x: bs("101"), y: bs("010") }).unwrap();
        assert!(membership(LanguageId::DisjOnEdge, &e));
        let e2 = build_gadget(&GadgetSpec::DisjOnEdge { x: bs("10"), y: bs("01") }).unwrap();
        assert!(!membership(LanguageId::DisjOnEdge, &e2), "requires n > 2");
        let p = build_gadget(&GadgetSpec::DisjOnPath { x: bs("101"), y: bs("100") }).unwrap();
        assert!(!membership(LanguageId::DisjOnPath, &p));
        let c = build_gadget(&GadgetSpec::DisjOnClique { rows: vec![bs("10"), bs("11")] }).unwrap();
        assert!(!membership(LanguageId::DisjOnClique, &c));
        let c = build_gadget(&GadgetSpec::DisjOnClique { rows: vec![bs("10"), bs("01")] }).unwrap();
        assert!(membership(LanguageId::DisjOnClique, &c));
    }

    #[test]
    fn special_disjointness_example() {
        let g = build_gadget(&GadgetSpec::SpecialDisjointness { x: bs("1010"), y: bs("0101"), b: false }).unwrap();
        assert!(!membership(LanguageId::SpecialDisjointness, &g));
        let g = build_gadget(&GadgetSpec::SpecialDisjointness { x: bs("1010"), y: bs("0101"), b: true }).unwrap();
        assert!(membership(LanguageId::SpecialDisjointness, &g));
        let g = build_gadget(&GadgetSpec::SpecialDisjointness { x: bs("1010"), y: bs("0111"), b: false }).unwrap();
        assert!(membership(LanguageId::SpecialDisjointness, &g));
    }

    #[test]
    fn four_partite_uses_transposed_pairing() {
        let x = vec![bs("01"), bs("00")];
        let y_same = vec![bs("01"), bs("00")];
        let y_t = vec![bs("00"), bs("10")];
        let g = |y: Vec<BitString>| build_gadget(&GadgetSpec::FourPartite { x: x.clone(), y }).unwrap();
        assert!(membership(LanguageId::FourPartite, &g(y_same)));
        assert!(!membership(LanguageId::FourPartite, &g(y_t)));
    }

    #[test]
    fn edge_star_indices() {
        let g = |a: Vec<(bool, u32)>, b: Vec<(bool, u32)>| {
            build_gadget(&GadgetSpec::DisjEdgeStar { a_leaves: a, b_leaves: b }).unwrap()
        };
        assert!(membership(LanguageId::DisjEdgeStar, &g(vec![(true, 2), (false, 1)], vec![(true, 1), (false, 2)])));
        assert!(!membership(LanguageId::DisjEdgeStar, &g(vec![(true, 1), (false, 2)], vec![(true, 1), (false, 2)])));
        assert!(!membership(LanguageId::DisjEdgeStar, &g(vec![(true, 1), (false, 1)], vec![(false, 1), (false, 2)])));
    }
}
