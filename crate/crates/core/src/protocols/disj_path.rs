//! Disjointness on a `2n`-node path with `n > 2`. These protocols only see a
//! constant-radius ball, so they decide the language on the gadget family.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::engine::{Inbox, NodeView, Outbox, Protocol, RoundCtx};
use crate::graph::{Label, NodeId};
use crate::languages::disjoint;

fn size_ok(view: &NodeView) -> bool {
    view.n.is_multiple_of(2) && view.n / 2 > 2
}

fn label_ok(view: &NodeView) -> bool {
    match &view.label {
        Label::Blank => true,
        Label::Bits(b) => b.len() == view.n / 2,
        _ => false,
    }
}

/// Schedule `L`: `u_1` and `v_1` swap their vectors and test disjointness.
#[derive(Clone, Copy, Debug)]
pub struct DisjOnEdgeProtocol;

#[derive(Clone, Serialize, Deserialize)]
pub struct EdgeState {
    view: NodeView,
    ok: bool,
}

impl Protocol for DisjOnEdgeProtocol {
    type State = EdgeState;

    fn init(&self, view: &NodeView) -> EdgeState {
        EdgeState { view: view.clone(), ok: size_ok(view) && label_ok(view) }
    }

    fn send(&self, s: &EdgeState, _ctx: RoundCtx) -> Outbox {
        match s.view.label.as_bits() {
            Some(x) if s.ok => Outbox::to_each(&s.view.neighbors, x),
            _ => Outbox::Silent,
        }
    }

    fn receive(&self, s: &mut EdgeState, _ctx: RoundCtx, inbox: &Inbox) {
        if let Some(x) = s.view.label.as_bits() {
            let got: Vec<&BitString> = inbox.iter().map(|m| &m.payload).collect();
            s.ok &= got.len() == 1 && disjoint(x, got[0]);
        }
    }

    fn decide(&self, s: &EdgeState) -> bool {
        s.ok
    }

    crate::json_state_codec!();
}

/// Schedule `L,L`: inputs on `u_2`, `v_2` travel one hop inwards per round, so
/// `u_1` and `v_1` each end up holding both vectors.
#[derive(Clone, Copy, Debug)]
pub struct DisjOnPathProtocol;

#[derive(Clone, Serialize, Deserialize)]
pub struct PathState {
    view: NodeView,
    ok: bool,
    relay: Option<(NodeId, BitString)>,
}

impl Protocol for DisjOnPathProtocol {
    type State = PathState;

    fn init(&self, view: &NodeView) -> PathState {
        PathState { view: view.clone(), ok: size_ok(view) && label_ok(view), relay: None }
    }

    fn send(&self, s: &PathState, ctx: RoundCtx) -> Outbox {
        if !s.ok {
            return Outbox::Silent;
        }
        match (ctx.round, s.view.label.as_bits(), &s.relay) {
            (1, Some(x), _) => Outbox::to_each(&s.view.neighbors, x),
            (2, _, Some((from, x))) => {
                let others: Vec<NodeId> = s.view.neighbors.iter().copied().filter(|v| v != from).collect();
                Outbox::to_each(&others, x)
            }
            _ => Outbox::Silent,
        }
    }

    fn receive(&self, s: &mut PathState, ctx: RoundCtx, inbox: &Inbox) {
        match ctx.round {
            1 => s.relay = inbox.iter().next().map(|m| (m.from, m.payload.clone())),
            2 => {
                if let (Some((_, mine)), Some(other)) = (&s.relay, inbox.iter().next()) {
                    s.ok &= mine.len() == s.view.n / 2 && disjoint(mine, &other.payload);
                }
            }
            _ => {}
        }
    }

    fn decide(&self, s: &PathState) -> bool {
        s.ok
    }

    crate::json_state_codec!();
}
