//! Pointer chasing on a `2n`-node path in `k` BCC rounds. Round 1: every node
//! broadcasts its neighbor IDs, and the endpoint whose map contains 0
//! appends `f(0)`. Round `r > 1`: the endpoint whose map contains the current
//! pointer broadcasts its image. Everyone accepts iff the path checks out and
//! the final pointer has an odd number of 1 bits.

use serde::{Deserialize, Serialize};

use super::{path_from_lists, read_short_adjacency, write_short_adjacency};
use crate::bits::{BitReader, BitWriter};
use crate::engine::{Inbox, NodeView, Outbox, Protocol, RoundCtx};
use crate::graph::Label;
use crate::pointer::PointerMap;

#[derive(Clone, Copy, Debug)]
pub struct KPclpProtocol {
    pub k: usize,
}

#[derive(Clone, Serialize, Deserialize)]
pub struct State {
    view: NodeView,
    ok: bool,
    pointer: Option<usize>,
}

fn own_map(view: &NodeView) -> Option<PointerMap> {
    view.label.as_bits().and_then(|b| PointerMap::decode(b).ok()).filter(|m| 2 * m.n() == view.n)
}

fn value_width(view: &NodeView) -> usize {
    PointerMap::value_width(view.n / 2)
}

impl Protocol for KPclpProtocol {
    type State = State;

    fn init(&self, view: &NodeView) -> State {
        let ok = view.n >= 2
            && view.n.is_multiple_of(2)
            && match view.neighbors.len() {
                1 => own_map(view).is_some(),
                _ => view.label == Label::Blank,
            };
        State { view: view.clone(), ok, pointer: Some(0) }
    }

    fn send(&self, s: &State, ctx: RoundCtx) -> Outbox {
        let image = match (&s.pointer, own_map(&s.view)) {
            (Some(p), Some(f)) if s.view.neighbors.len() == 1 => f.get(*p),
            _ => None,
        };
        let mut w = BitWriter::new();
        if ctx.round == 1 {
            write_short_adjacency(&mut w, &s.view);
            if s.view.neighbors.len() == 1 {
                match image {
                    Some(v) => w.bit(true).uint(v as u64, value_width(&s.view)),
                    None => w.bit(false),
                };
            }
        } else if let Some(v) = image {
            w.uint(v as u64, value_width(&s.view));
        } else {
            return Outbox::Silent;
        }
        Outbox::Broadcast(w.finish())
    }

    fn receive(&self, s: &mut State, ctx: RoundCtx, inbox: &Inbox) {
        let width = value_width(&s.view);
        let mut images = Vec::new();
        if ctx.round == 1 {
            let mut lists = std::collections::BTreeMap::new();
            for m in inbox.iter() {
                let mut r = BitReader::new(&m.payload);
                let Some(ns) = read_short_adjacency(&mut r, s.view.id_bound) else {
                    s.ok = false;
                    return;
                };
                if ns.len() == 1 && r.bit() == Some(true) {
                    images.extend(r.uint(width));
                }
                lists.insert(m.from, ns);
            }
            s.ok &= path_from_lists(&lists, s.view.n).is_some();
        } else {
            images.extend(inbox.iter().filter_map(|m| BitReader::new(&m.payload).uint(width)));
        }
        s.pointer = match images[..] {
            [v] if (v as usize) < s.view.n / 2 => Some(v as usize),
            _ => None,
        };
    }

    fn decide(&self, s: &State) -> bool {
        s.ok && s.pointer.is_some_and(|p| p.count_ones() % 2 == 1)
    }

    crate::json_state_codec!();
}
