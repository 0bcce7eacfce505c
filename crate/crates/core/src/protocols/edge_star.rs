//! Two stars whose roots are adjacent. CONGEST round: every node tells its
//! neighbors its degree and, if it is a leaf, its `(bit, index)` input. Each
//! node then checks its own neighborhood; the local checks force the global
//! shape. LOCAL round: the roots swap their reconstructed vectors.

use serde::{Deserialize, Serialize};

use crate::bits::{width_for, BitReader, BitString, BitWriter};
use crate::engine::{Inbox, NodeView, Outbox, Protocol, RoundCtx};
use crate::graph::{Label, NodeId};
use crate::languages::disjoint;

#[derive(Clone, Copy, Debug)]
pub struct DisjEdgeStarProtocol;

#[derive(Clone, Serialize, Deserialize)]
pub struct State {
    view: NodeView,
    ok: bool,
    /// For a root: the other root and the vector read off its leaves.
    root: Option<(NodeId, BitString)>,
}

/// Leaves per star, if `n` has the right form.
fn star_size(n: usize) -> Option<usize> {
    (n >= 4 && n.is_multiple_of(2)).then(|| (n - 2) / 2)
}

fn leaf_input(view: &NodeView, size: usize) -> Option<(bool, u32)> {
    match &view.label {
        Label::Pair(Some(b), Some(i)) if b.len() == 1 && (1..=size as u32).contains(i) => Some((b.get(0)?, *i)),
        _ => None,
    }
}

impl Protocol for DisjEdgeStarProtocol {
    type State = State;

    fn init(&self, view: &NodeView) -> State {
        State { view: view.clone(), ok: star_size(view.n).is_some(), root: None }
    }

    fn send(&self, s: &State, ctx: RoundCtx) -> Outbox {
        let Some(size) = star_size(s.view.n).filter(|_| s.ok) else { return Outbox::Silent };
        match ctx.round {
            1 => {
                let mut w = BitWriter::new();
                w.uint(s.view.neighbors.len() as u64, width_for(s.view.n as u64 - 1));
                match leaf_input(&s.view, size) {
                    Some((bit, i)) => w.bit(true).bit(bit).uint(u64::from(i), width_for(size as u64)),
                    None => w.bit(false),
                };
                Outbox::to_each(&s.view.neighbors, &w.finish())
            }
            2 => match &s.root {
                Some((other, x)) => Outbox::to_each(&[*other], x),
                None => Outbox::Silent,
            },
            _ => Outbox::Silent,
        }
    }

    fn receive(&self, s: &mut State, ctx: RoundCtx, inbox: &Inbox) {
        let Some(size) = star_size(s.view.n).filter(|_| s.ok) else { return };
        match ctx.round {
            1 => s.ok = self.check_neighborhood(s, size, inbox),
            2 => {
                if let Some((other, x)) = &s.root {
                    s.ok = inbox.from(*other).is_some_and(|y| disjoint(x, y));
                }
            }
            _ => {}
        }
    }

    fn decide(&self, s: &State) -> bool {
        s.ok
    }

    crate::json_state_codec!();
}

struct Report {
    degree: usize,
    leaf: Option<(bool, u32)>,
}

impl DisjEdgeStarProtocol {
    fn check_neighborhood(&self, s: &mut State, size: usize, inbox: &Inbox) -> bool {
        let mut reports = Vec::new();
        for m in inbox.iter() {
            let mut r = BitReader::new(&m.payload);
            let Some(degree) = r.uint(width_for(s.view.n as u64 - 1)) else { return false };
            let leaf = match r.bit() {
                Some(true) => match (r.bit(), r.uint(width_for(size as u64))) {
                    (Some(b), Some(i)) => Some((b, i as u32)),
                    _ => return false,
                },
                Some(false) => None,
                None => return false,
            };
            reports.push((m.from, Report { degree: degree as usize, leaf }));
        }
        if reports.len() != s.view.neighbors.len() {
            return false;
        }
        match s.view.neighbors.len() {
            1 => leaf_input(&s.view, size).is_some() && reports[0].1.degree == size + 1,
            d if d == size + 1 && s.view.label == Label::Blank => {
                let roots: Vec<NodeId> =
                    reports.iter().filter(|(_, r)| r.degree == size + 1).map(|&(v, _)| v).collect();
                let [other] = roots[..] else { return false };
                let mut vector = vec![None; size];
                for (v, r) in &reports {
                    if *v == other {
                        continue;
                    }
                    let Some((bit, i)) = r.leaf.filter(|_| r.degree == 1) else { return false };
                    match vector.get_mut((i as usize).wrapping_sub(1)) {
                        Some(slot @ None) => *slot = Some(bit),
                        _ => return false,
                    }
                }
                match vector.into_iter().collect::<Option<BitString>>() {
                    Some(x) => {
                        s.root = Some((other, x));
                        true
                    }
                    None => false,
                }
            }
            _ => false,
        }
    }
}
