//! One CONGEST round on a clique: the node of rank `q` collects bit `q` of
//! every label and accepts iff one of them is 0.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::engine::{Inbox, NodeView, Outbox, Protocol, RoundCtx};

#[derive(Clone, Copy, Debug)]
pub struct DisjOnCliqueProtocol;

#[derive(Clone, Serialize, Deserialize)]
pub struct State {
    view: NodeView,
    /// Own rank among all IDs, 0-based; `None` when the node is not in a clique
    /// or its label is not an `n`-bit string.
    rank: Option<usize>,
    column_has_zero: bool,
}

fn row(view: &NodeView) -> Option<&BitString> {
    view.label.as_bits().filter(|b| b.len() == view.n)
}

impl Protocol for DisjOnCliqueProtocol {
    type State = State;

    fn init(&self, view: &NodeView) -> State {
        let rank = (view.neighbors.len() + 1 == view.n && row(view).is_some())
            .then(|| view.neighbors.iter().filter(|&&v| v < view.id).count());
        State { view: view.clone(), rank, column_has_zero: false }
    }

    fn send(&self, s: &State, _ctx: RoundCtx) -> Outbox {
        let Some(own) = s.rank.and(row(&s.view)) else { return Outbox::Silent };
        let mut ids = s.view.neighbors.clone();
        ids.push(s.view.id);
        ids.sort_unstable();
        let msgs: BTreeMap<_, _> = ids
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != s.view.id)
            .map(|(q, &v)| (v, BitString::from_bits(vec![own.get(q).unwrap()])))
            .collect();
        Outbox::PerNeighbor(msgs)
    }

    fn receive(&self, s: &mut State, _ctx: RoundCtx, inbox: &Inbox) {
        if let Some(q) = s.rank {
            let own = row(&s.view).and_then(|r| r.get(q)) == Some(false);
            s.column_has_zero = own || inbox.iter().any(|m| m.payload.get(0) == Some(false));
        }
    }

    fn decide(&self, s: &State) -> bool {
        s.rank.is_some() && s.column_has_zero
    }

    crate::json_state_codec!();
}
