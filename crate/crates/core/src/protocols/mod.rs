//! Distributed deciders, one per language, plus a name registry.

mod disj_clique;
mod disj_path;
mod edge_star;
mod four_partite;
mod one_marked_edge;
mod pclp;
mod special;
mod stress;
mod tomdf;
mod xor_index_path;

pub use disj_clique::DisjOnCliqueProtocol;
pub use disj_path::{DisjOnEdgeProtocol, DisjOnPathProtocol};
pub use edge_star::DisjEdgeStarProtocol;
pub use four_partite::FourPartiteProtocol;
pub use one_marked_edge::OneMarkedEdgeProtocol;
pub use pclp::KPclpProtocol;
pub use special::SpecialDisjointnessProtocol;
pub use stress::{ConstantProtocol, Sequential, StressProtocol};
pub use tomdf::{BccTomdfProtocol, TomdfProtocol};
pub use xor_index_path::XorIndexPathProtocol;

use std::collections::BTreeMap;

use crate::bits::{width_for, BitReader, BitWriter};
use crate::engine::{run, BoxedProtocol, EngineError, NodeView, Protocol, Schedule, Transcript, Verdict};
use crate::graph::{GadgetFamily, Label, LabeledGraph, NodeId};
use crate::languages::LanguageId;
use crate::transforms::TriangleViaTomdf;

/// A protocol packaged with its schedule, the language it decides and the
/// gadget family it is exhaustively checked on.
#[derive(Clone)]
pub struct NamedProtocol {
    pub language: LanguageId,
    pub family: GadgetFamily,
    pub schedule: Schedule,
    pub protocol: BoxedProtocol,
}

impl NamedProtocol {
    pub fn new<P: Protocol + 'static>(language: LanguageId, family: GadgetFamily, schedule: Schedule, p: P) -> Self {
        Self { language, family, schedule, protocol: BoxedProtocol::new(p) }
    }

    pub fn name(&self) -> String {
        self.language.to_string()
    }

    pub fn run(&self, graph: &LabeledGraph, seed: u64) -> Result<(Verdict, Transcript), EngineError> {
        run(&self.protocol, graph, &self.schedule, seed)
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }
}

/// Degree bound baked into the registry's triangle-freeness decider.
pub const TRIANGLE_DEGREE_BOUND: usize = 4;

/// Protocol for `lang`, if one is implemented.
pub fn protocol_for(lang: LanguageId) -> Option<NamedProtocol> {
    use LanguageId::*;
    let s = |text: &str| text.parse::<Schedule>().expect("static schedule");
    Some(match lang {
        OneMarkedEdge => NamedProtocol::new(lang, GadgetFamily::MarkedPath, s("C,B"), OneMarkedEdgeProtocol),
        XorIndexPath => NamedProtocol::new(lang, GadgetFamily::XorIndexPath, s("B,C"), XorIndexPathProtocol),
        Tomdf => NamedProtocol::new(lang, GadgetFamily::AllGraphs, s("B,L"), TomdfProtocol),
        TriangleFreeness => {
            let p = TriangleViaTomdf::new(BccTomdfProtocol::new(TRIANGLE_DEGREE_BOUND), TRIANGLE_DEGREE_BOUND + 1);
            let sched = p.schedule();
            NamedProtocol::new(lang, GadgetFamily::AllGraphs, sched, p)
        }
        C4Freeness => return None,
        DisjOnClique => NamedProtocol::new(lang, GadgetFamily::DisjOnClique, s("C"), DisjOnCliqueProtocol),
        DisjOnEdge => NamedProtocol::new(lang, GadgetFamily::DisjOnEdge, s("L"), DisjOnEdgeProtocol),
        DisjOnPath => NamedProtocol::new(lang, GadgetFamily::DisjOnPath, s("L,L"), DisjOnPathProtocol),
        KPclp { k } => NamedProtocol::new(
            lang,
            GadgetFamily::KPclp,
            Schedule::repeat(crate::engine::RoundKind::Bcc, k),
            KPclpProtocol { k },
        ),
        DisjEdgeStar => NamedProtocol::new(lang, GadgetFamily::DisjEdgeStar, s("C,L"), DisjEdgeStarProtocol),
        SpecialDisjointness => {
            NamedProtocol::new(lang, GadgetFamily::SpecialDisjointness, s("L,C"), SpecialDisjointnessProtocol)
        }
        FourPartite => NamedProtocol::new(lang, GadgetFamily::FourPartite, s("C,C"), FourPartiteProtocol),
    })
}

/// Every registered protocol; pointer chasing appears for `k = 1, 2, 3`.
pub fn registry() -> Vec<NamedProtocol> {
    use LanguageId::*;
    [
        OneMarkedEdge,
        XorIndexPath,
        Tomdf,
        TriangleFreeness,
        DisjOnClique,
        DisjOnEdge,
        DisjOnPath,
        KPclp { k: 1 },
        KPclp { k: 2 },
        KPclp { k: 3 },
        DisjEdgeStar,
        SpecialDisjointness,
        FourPartite,
    ]
    .into_iter()
    .filter_map(protocol_for)
    .collect()
}

pub fn lookup(name: &str) -> Option<NamedProtocol> {
    name.parse::<LanguageId>().ok().and_then(protocol_for)
}

// Encoding helpers shared by the protocols.

/// Bits per node ID: IDs are written as `id − 1` in `⌈log₂ N⌉` bits (at least one).
pub(crate) fn id_width(id_bound: u64) -> usize {
    width_for(id_bound.saturating_sub(1))
}

pub(crate) fn write_id(w: &mut BitWriter, id: NodeId, width: usize) {
    w.uint(u64::from(id) - 1, width);
}

pub(crate) fn read_id(r: &mut BitReader<'_>, width: usize) -> Option<NodeId> {
    r.uint(width).map(|v| v as NodeId + 1)
}

/// Two-bit neighbor count (3 means "more than two") followed by up to two IDs.
pub(crate) fn write_short_adjacency(w: &mut BitWriter, view: &NodeView) {
    let width = id_width(view.id_bound);
    let d = view.neighbors.len();
    if d > 2 {
        w.uint(3, 2);
    } else {
        w.uint(d as u64, 2);
        for &v in &view.neighbors {
            write_id(w, v, width);
        }
    }
}

/// `None` for a malformed block or a node of degree above two.
pub(crate) fn read_short_adjacency(r: &mut BitReader<'_>, id_bound: u64) -> Option<Vec<NodeId>> {
    let width = id_width(id_bound);
    match r.uint(2)? {
        3 => None,
        d => (0..d).map(|_| read_id(r, width)).collect(),
    }
}

/// Path order of the graph described by `lists`, if the lists are mutually
/// consistent, cover `n` nodes and form a single path.
pub(crate) fn path_from_lists(lists: &BTreeMap<NodeId, Vec<NodeId>>, n: usize) -> Option<Vec<NodeId>> {
    if lists.len() != n {
        return None;
    }
    let mut edges = Vec::new();
    for (&u, ns) in lists {
        for &v in ns {
            if !lists.get(&v)?.contains(&u) {
                return None;
            }
            if u < v {
                edges.push((u, v));
            }
        }
    }
    let g = LabeledGraph::new(lists.keys().map(|&v| (v, Label::Blank)), edges).ok()?;
    g.path_order()
}
