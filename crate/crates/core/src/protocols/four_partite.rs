//! `K_{n,n,n,n}` with the canonical ID layout. Round 1: part-1 node `i` sends
//! `x[i][j]` to part-2 node `j`, and part-4 node `j` sends `y[j][i]` to part-3
//! node `i`. Round 2: the middle parts swap those bits, so part-2 node `j`
//! sees every pair `(x[i][j], y[j][i])` and rejects if both are 1.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::engine::{Inbox, NodeView, Outbox, Protocol, RoundCtx};
use crate::graph::{Label, NodeId};

#[derive(Clone, Copy, Debug)]
pub struct FourPartiteProtocol;

#[derive(Clone, Serialize, Deserialize)]
pub struct State {
    view: NodeView,
    ok: bool,
    /// Middle parts: bits collected in round 1, keyed by the row/column index.
    held: BTreeMap<usize, bool>,
}

/// Part size when the layout is canonical.
fn part_size(view: &NodeView) -> Option<usize> {
    (view.n > 0 && view.n.is_multiple_of(4) && view.id_bound == view.n as u64).then_some(view.n / 4)
}

/// 0-based part and position inside it.
fn place(v: NodeId, size: usize) -> (usize, usize) {
    let z = v as usize - 1;
    (z / size, z % size)
}

fn node(part: usize, pos: usize, size: usize) -> NodeId {
    (part * size + pos + 1) as NodeId
}

fn one_bit(b: bool) -> BitString {
    BitString::from_bits(vec![b])
}

impl Protocol for FourPartiteProtocol {
    type State = State;

    fn init(&self, view: &NodeView) -> State {
        let ok = part_size(view).is_some_and(|size| {
            let (part, _) = place(view.id, size);
            let expected: Vec<NodeId> = (1..=view.n as NodeId).filter(|&v| place(v, size).0 != part).collect();
            let label_ok = match part {
                0 | 3 => view.label.as_bits().is_some_and(|b| b.len() == size),
                _ => view.label == Label::Blank,
            };
            view.neighbors == expected && label_ok
        });
        State { view: view.clone(), ok, held: BTreeMap::new() }
    }

    fn send(&self, s: &State, ctx: RoundCtx) -> Outbox {
        let Some(size) = part_size(&s.view).filter(|_| s.ok) else { return Outbox::Silent };
        let (part, _) = place(s.view.id, size);
        let msgs: BTreeMap<NodeId, BitString> = match (ctx.round, part) {
            (1, 0 | 3) => {
                let row = s.view.label.as_bits().expect("checked at init");
                let target = if part == 0 { 1 } else { 2 };
                (0..size).map(|q| (node(target, q, size), one_bit(row.get(q).unwrap()))).collect()
            }
            (2, 1 | 2) => {
                let target = if part == 1 { 2 } else { 1 };
                s.held.iter().map(|(&q, &b)| (node(target, q, size), one_bit(b))).collect()
            }
            _ => BTreeMap::new(),
        };
        Outbox::PerNeighbor(msgs)
    }

    fn receive(&self, s: &mut State, ctx: RoundCtx, inbox: &Inbox) {
        let Some(size) = part_size(&s.view).filter(|_| s.ok) else { return };
        let (part, _) = place(s.view.id, size);
        if part != 1 && part != 2 {
            return;
        }
        let source = match (ctx.round, part) {
            (1, 1) => 0,
            (1, 2) => 3,
            (2, 1) => 2,
            (2, _) => 1,
            _ => return,
        };
        let got: BTreeMap<usize, bool> = inbox
            .iter()
            .filter(|m| place(m.from, size).0 == source)
            .filter_map(|m| Some((place(m.from, size).1, m.payload.get(0)?)))
            .collect();
        if ctx.round == 1 {
            s.held = got;
        } else {
            s.ok = got.len() == size && s.held.len() == size && got.iter().all(|(q, &b)| !(b && s.held[q]));
        }
    }

    fn decide(&self, s: &State) -> bool {
        s.ok
    }

    crate::json_state_codec!();
}
