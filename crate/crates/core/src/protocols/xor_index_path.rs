//! BCC round: each node broadcasts its neighbor IDs; degree-1 nodes add their
//! index label. Everyone then knows the whole path. CONGEST round: the two
//! nodes next to the center send the bit of their vector selected by the far
//! endpoint's index, and the center accepts iff the bits differ.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{path_from_lists, read_short_adjacency, write_short_adjacency};
use crate::bits::{width_for, BitReader, BitString, BitWriter};
use crate::engine::{Inbox, NodeView, Outbox, Protocol, RoundCtx};
use crate::graph::{Label, NodeId};

#[derive(Clone, Copy, Debug)]
pub struct XorIndexPathProtocol;

#[derive(Clone, Serialize, Deserialize)]
pub struct State {
    view: NodeView,
    structure_ok: bool,
    label_ok: bool,
    /// Center node and the bit to send it, for the two nodes beside the center.
    to_center: Option<(NodeId, bool)>,
    is_center: bool,
    center_bits: Vec<bool>,
}

fn index_width(n: usize) -> usize {
    width_for(n as u64)
}

impl Protocol for XorIndexPathProtocol {
    type State = State;

    fn init(&self, view: &NodeView) -> State {
        State {
            view: view.clone(),
            structure_ok: false,
            label_ok: false,
            to_center: None,
            is_center: false,
            center_bits: Vec::new(),
        }
    }

    fn send(&self, s: &State, ctx: RoundCtx) -> Outbox {
        match ctx.round {
            1 => {
                let mut w = BitWriter::new();
                write_short_adjacency(&mut w, &s.view);
                if s.view.neighbors.len() == 1 {
                    match s.view.label.as_index().filter(|&i| i >= 1 && (i as usize) < s.view.n) {
                        Some(i) => w.bit(true).uint(u64::from(i), index_width(s.view.n)),
                        None => w.bit(false),
                    };
                }
                Outbox::Broadcast(w.finish())
            }
            2 => match s.to_center {
                Some((c, bit)) if s.structure_ok && s.label_ok => {
                    Outbox::PerNeighbor(BTreeMap::from([(c, BitString::from_bits(vec![bit]))]))
                }
                _ => Outbox::Silent,
            },
            _ => Outbox::Silent,
        }
    }

    fn receive(&self, s: &mut State, ctx: RoundCtx, inbox: &Inbox) {
        match ctx.round {
            1 => self.learn_path(s, inbox),
            2 if s.is_center => s.center_bits = inbox.iter().filter_map(|m| m.payload.get(0)).collect(),
            _ => {}
        }
    }

    fn decide(&self, s: &State) -> bool {
        let center_ok = !s.is_center || (s.center_bits.len() == 2 && s.center_bits[0] != s.center_bits[1]);
        s.structure_ok && s.label_ok && center_ok
    }

    crate::json_state_codec!();
}

impl XorIndexPathProtocol {
    fn learn_path(&self, s: &mut State, inbox: &Inbox) {
        let mut lists = BTreeMap::new();
        let mut indices = BTreeMap::new();
        for m in inbox.iter() {
            let mut r = BitReader::new(&m.payload);
            let Some(ns) = read_short_adjacency(&mut r, s.view.id_bound) else { return };
            if ns.len() == 1 && r.bit() == Some(true) {
                let Some(i) = r.uint(index_width(s.view.n)) else { return };
                indices.insert(m.from, i as usize);
            }
            lists.insert(m.from, ns);
        }
        let Some(order) = path_from_lists(&lists, s.view.n) else { return };
        let total = order.len();
        if total < 5 || total % 2 == 0 {
            return;
        }
        let n = (total - 1) / 2;
        let index_at = |p: usize| indices.get(&order[p]).copied().filter(|&i| (1..=n).contains(&i));
        let (Some(start), Some(end)) = (index_at(0), index_at(2 * n)) else { return };
        s.structure_ok = true;

        let pos = order.iter().position(|&v| v == s.view.id).expect("own id is on the path");
        let label = &s.view.label;
        s.label_ok = match pos {
            p if p == 0 || p == 2 * n => true,
            p if p == n - 1 || p == n + 1 => label.as_bits().is_some_and(|b| b.len() == n),
            _ => *label == Label::Blank,
        };
        s.is_center = pos == n;
        if s.label_ok && (pos == n - 1 || pos == n + 1) {
            let far_index = if pos < n { end } else { start };
            let bit = label.as_bits().and_then(|b| b.get(far_index - 1)).unwrap();
            s.to_center = Some((order[n], bit));
        }
    }
}
