//! CONGEST round: marks go to neighbors. BCC round: every node broadcasts how
//! many of its incident edges are doubly marked; the global sum must be 2.

use serde::{Deserialize, Serialize};

use crate::bits::{width_for, BitReader, BitString};
use crate::engine::{Inbox, NodeView, Outbox, Protocol, RoundCtx};

#[derive(Clone, Copy, Debug)]
pub struct OneMarkedEdgeProtocol;

#[derive(Clone, Serialize, Deserialize)]
pub struct State {
    view: NodeView,
    mark: Option<bool>,
    marked_edges: u64,
    total: Option<u64>,
}

fn count_width(n: usize) -> usize {
    width_for(n.saturating_sub(1) as u64)
}

impl Protocol for OneMarkedEdgeProtocol {
    type State = State;

    fn init(&self, view: &NodeView) -> State {
        State { view: view.clone(), mark: view.label.as_single_bit(), marked_edges: 0, total: None }
    }

    fn send(&self, s: &State, ctx: RoundCtx) -> Outbox {
        match ctx.round {
            1 => match s.mark {
                Some(m) => Outbox::to_each(&s.view.neighbors, &BitString::from_bits(vec![m])),
                None => Outbox::Silent,
            },
            2 => Outbox::Broadcast(BitString::from_uint(s.marked_edges, count_width(s.view.n))),
            _ => Outbox::Silent,
        }
    }

    fn receive(&self, s: &mut State, ctx: RoundCtx, inbox: &Inbox) {
        match ctx.round {
            1 if s.mark == Some(true) => {
                s.marked_edges = inbox.iter().filter(|m| m.payload.get(0) == Some(true)).count() as u64;
            }
            2 => {
                let w = count_width(s.view.n);
                let sum: Option<u64> = inbox.iter().map(|m| BitReader::new(&m.payload).uint(w)).sum();
                s.total = sum.filter(|_| inbox.len() == s.view.n);
            }
            _ => {}
        }
    }

    fn decide(&self, s: &State) -> bool {
        s.mark.is_some() && s.total == Some(2)
    }

    crate::json_state_codec!();
}
