//! Exhaustive instance enumeration over small gadget parameters.
//!
//! Instances are addressed by a flat index so sweeps can be split across threads.

use std::fmt;
use std::str::FromStr;

use super::gadgets::{build_gadget, GadgetSpec};
use super::{GraphError, LabeledGraph};
use crate::bits::BitString;
use crate::pointer::PointerMap;

pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GadgetFamily {
    XorIndexPath,
    MarkedPath,
    MarkedCycle,
    MarkedClique,
    /// Every labeled graph on `1..=n` with blank labels.
    AllGraphs,
    /// Clique bridges with `k = 1`.
    CliqueBridge,
    DisjOnClique,
    DisjOnEdge,
    DisjOnPath,
    /// Every valid alternating pointer-map pair; size is the index-set size.
    KPclp,
    /// All leaf bits and all index tuples in `[n]^n` on both stars.
    DisjEdgeStar,
    SpecialDisjointness,
    FourPartite,
}

const FAMILIES: [(GadgetFamily, &str); 13] = [
    (GadgetFamily::XorIndexPath, "xor-index-path"),
    (GadgetFamily::MarkedPath, "path"),
    (GadgetFamily::MarkedCycle, "cycle"),
    (GadgetFamily::MarkedClique, "clique"),
    (GadgetFamily::AllGraphs, "all-graphs"),
    (GadgetFamily::CliqueBridge, "clique-bridge"),
    (GadgetFamily::DisjOnClique, "disj-on-clique"),
    (GadgetFamily::DisjOnEdge, "disj-on-edge"),
    (GadgetFamily::DisjOnPath, "disj-on-path"),
    (GadgetFamily::KPclp, "k-pclp"),
    (GadgetFamily::DisjEdgeStar, "disj-edge-star"),
    (GadgetFamily::SpecialDisjointness, "special-disjointness"),
    (GadgetFamily::FourPartite, "disj-4partite"),
];

impl fmt::Display for GadgetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = FAMILIES.iter().find(|(g, _)| g == self).map(|(_, s)| *s).unwrap();
        f.write_str(name)
    }
}

impl FromStr for GadgetFamily {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FAMILIES
            .iter()
            .find(|(_, name)| name.eq_ignore_ascii_case(s))
            .map(|(g, _)| *g)
            .ok_or_else(|| GraphError::Gadget(format!("unknown gadget family {s:?}")))
    }
}

impl GadgetFamily {
    pub fn all() -> impl Iterator<Item = GadgetFamily> {
        FAMILIES.iter().map(|(g, _)| *g)
    }

    pub fn min_size(self) -> usize {
        use GadgetFamily::*;
        match self {
            XorIndexPath | CliqueBridge | DisjOnEdge | DisjOnPath | KPclp => 2,
            MarkedCycle => 3,
            _ => 1,
        }
    }

    fn sizes(self, max_size: usize) -> impl Iterator<Item = usize> {
        let step = if self == GadgetFamily::KPclp { 2 } else { 1 };
        (self.min_size()..=max_size).step_by(step)
    }

    /// Number of instances at exactly `size`, saturating.
    pub fn count_at(self, size: usize) -> u128 {
        use GadgetFamily::*;
        let n = size as u32;
        let p2 = |e: u32| 1u128.checked_shl(e).unwrap_or(u128::MAX);
        let m = n * n.saturating_sub(1) / 2;
        match self {
            XorIndexPath => p2(2 * n).saturating_mul(u128::from(n * n)),
            MarkedPath | MarkedCycle | MarkedClique => p2(n),
            AllGraphs => p2(m),
            CliqueBridge => p2(2 * m).saturating_mul(u128::from(m * m)),
            DisjOnClique => p2(n * n),
            DisjOnEdge | DisjOnPath => p2(2 * n),
            KPclp => pclp_splits(size).len() as u128 * u128::from(n / 2).pow(n),
            DisjEdgeStar => p2(n).saturating_mul(u128::from(n).saturating_pow(n)).saturating_pow(2),
            SpecialDisjointness => p2(2 * n + 1),
            FourPartite => p2(2 * n * n),
        }
    }

    /// Instance number `idx` at `size`.
    fn spec_at(self, size: usize, idx: u128) -> GadgetSpec {
        use GadgetFamily::*;
        let n = size;
        let mut d = Digits(idx);
        match self {
            XorIndexPath => {
                let x = d.bits(n);
                let y = d.bits(n);
                let start_index = (d.take(n as u128) + 1) as u32;
                let end_index = (d.take(n as u128) + 1) as u32;
                GadgetSpec::XorIndexPath { x, y, start_index, end_index }
            }
            MarkedPath => GadgetSpec::Path { n, marks: Some(d.bits(n)) },
            MarkedCycle => GadgetSpec::Cycle { n, marks: Some(d.bits(n)) },
            MarkedClique => GadgetSpec::Clique { n, marks: Some(d.bits(n)) },
            AllGraphs => unreachable!("handled by instance()"),
            CliqueBridge => {
                let m = n * (n - 1) / 2;
                let x = d.bits(m);
                let y = d.bits(m);
                let a_mark = (d.take(m as u128) + 1) as u32;
                let b_mark = (d.take(m as u128) + 1) as u32;
                GadgetSpec::CliqueBridge { n, x, y, a_mark, b_mark, k: 1 }
            }
            DisjOnClique => GadgetSpec::DisjOnClique { rows: (0..n).map(|_| d.bits(n)).collect() },
            DisjOnEdge => GadgetSpec::DisjOnEdge { x: d.bits(n), y: d.bits(n) },
            DisjOnPath => GadgetSpec::DisjOnPath { x: d.bits(n), y: d.bits(n) },
            KPclp => {
                let splits = pclp_splits(n);
                let first_dom = &splits[d.take(splits.len() as u128) as usize];
                let second_dom: Vec<usize> = (0..n).filter(|v| !first_dom.contains(v)).collect();
                let half = (n / 2) as u128;
                let first = first_dom.iter().map(|&a| (a, second_dom[d.take(half) as usize])).collect::<Vec<_>>();
                let second = second_dom.iter().map(|&b| (b, first_dom[d.take(half) as usize])).collect::<Vec<_>>();
                GadgetSpec::KPclp {
                    first: PointerMap::new(n, first).unwrap(),
                    second: PointerMap::new(n, second).unwrap(),
                }
            }
            DisjEdgeStar => {
                let mut side = || -> Vec<(bool, u32)> {
                    let b = d.bits(n);
                    b.bits().iter().map(|&bit| (bit, (d.take(n as u128) + 1) as u32)).collect()
                };
                let a_leaves = side();
                let b_leaves = side();
                GadgetSpec::DisjEdgeStar { a_leaves, b_leaves }
            }
            SpecialDisjointness => {
                let x = d.bits(n);
                let y = d.bits(n);
                let b = d.take(2) == 1;
                GadgetSpec::SpecialDisjointness { x, y, b }
            }
            FourPartite => {
                let x = (0..n).map(|_| d.bits(n)).collect();
                let y = (0..n).map(|_| d.bits(n)).collect();
                GadgetSpec::FourPartite { x, y }
            }
        }
    }

    fn instance(self, size: usize, idx: u128) -> LabeledGraph {
        if self == GadgetFamily::AllGraphs {
            let pairs = super::gadgets::clique_pairs(size, 0);
            let edges = pairs.into_iter().enumerate().filter(|(r, _)| (idx >> r) & 1 == 1).map(|(_, e)| e);
            return LabeledGraph::unlabeled(size, edges).expect("valid by construction");
        }
        build_gadget(&self.spec_at(size, idx)).expect("valid by construction")
    }
}

/// Mixed-radix decoder for instance indices.
struct Digits(u128);

impl Digits {
    fn take(&mut self, radix: u128) -> u128 {
        let v = self.0 % radix;
        self.0 /= radix;
        v
    }

    fn bits(&mut self, len: usize) -> BitString {
        let v = self.take(1u128 << len);
        (0..len).map(|t| (v >> (len - 1 - t)) & 1 == 1).collect()
    }
}

/// Domains for the first map: subsets of `{0..n−1}` of size `n/2` that contain 0.
fn pclp_splits(n: usize) -> Vec<Vec<usize>> {
    if n % 2 == 1 || n == 0 {
        return Vec::new();
    }
    (0u64..1 << n)
        .filter(|s| s & 1 == 1 && s.count_ones() as usize == n / 2)
        .map(|s| (0..n).filter(|&v| (s >> v) & 1 == 1).collect())
        .collect()
}

/// A finite, indexable set of instances.
#[derive(Clone, Debug)]
pub struct InstanceSpace {
    family: GadgetFamily,
    blocks: Vec<(usize, u128)>,
}

impl InstanceSpace {
    pub fn family(&self) -> GadgetFamily {
        self.family
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|&(_, c)| c).sum::<u128>() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Instance sizes covered, with their counts.
    pub fn sizes(&self) -> &[(usize, u128)] {
        &self.blocks
    }

    pub fn get(&self, mut k: usize) -> Option<LabeledGraph> {
        for &(size, count) in &self.blocks {
            if (k as u128) < count {
                return Some(self.family.instance(size, k as u128));
            }
            k -= count as usize;
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = LabeledGraph> + '_ {
        self.blocks.iter().flat_map(move |&(size, count)| (0..count).map(move |i| self.family.instance(size, i)))
    }
}

/// All instances of `family` for every size from its minimum up to `max_size`.
pub fn enumerate_small_instances(family: GadgetFamily, max_size: usize) -> Result<InstanceSpace, GraphError> {
    let blocks: Vec<(usize, u128)> = family.sizes(max_size).map(|s| (s, family.count_at(s))).collect();
    let count = blocks.iter().fold(0u128, |acc, &(_, c)| acc.saturating_add(c));
    if count > ENUMERATION_LIMIT {
        return Err(GraphError::EnumerationTooLarge { count, limit: ENUMERATION_LIMIT });
    }
    Ok(InstanceSpace { family, blocks })
}
