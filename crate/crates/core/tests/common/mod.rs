//! Helpers shared by the integration test targets.

#![allow(dead_code)]

use std::collections::BTreeSet;

use hybridsim::bits::BitString;
use hybridsim::engine::{
    execute, pack_parts, unpack_parts, BoxedProtocol, BoxedState, EngineError, Inbox, NodeView, Outbox, Protocol,
    RoundCtx, RoundKind, StateCodecError,
};
use hybridsim::graph::{enumerate_small_instances, LabeledGraph, NodeId};
use hybridsim::protocols::NamedProtocol;

/// Replaces one message with a `bits`-bit payload.
#[derive(Clone)]
pub struct Inflate {
    pub inner: BoxedProtocol,
    pub round: usize,
    pub sender: NodeId,
    pub receiver: Option<NodeId>,
    pub bits: usize,
}

impl Protocol for Inflate {
    type State = (NodeId, BoxedState);

    fn init(&self, view: &NodeView) -> Self::State {
        (view.id, self.inner.init(view))
    }

    fn send(&self, s: &Self::State, ctx: RoundCtx) -> Outbox {
        let out = self.inner.send(&s.1, ctx);
        if ctx.round != self.round || s.0 != self.sender {
            return out;
        }
        let big: BitString = (0..self.bits).map(|t| t % 3 == 0).collect();
        match (out, self.receiver) {
            (Outbox::Broadcast(_), None) => Outbox::Broadcast(big),
            (Outbox::PerNeighbor(mut map), Some(v)) => {
                map.insert(v, big);
                Outbox::PerNeighbor(map)
            }
            (other, _) => other,
        }
    }

    fn receive(&self, s: &mut Self::State, ctx: RoundCtx, inbox: &Inbox) {
        self.inner.receive(&mut s.1, ctx, inbox)
    }

    fn decide(&self, s: &Self::State) -> bool {
        self.inner.decide(&s.1)
    }

    fn encode_state(&self, s: &Self::State) -> Vec<u8> {
        pack_parts(&[s.0.to_le_bytes().to_vec(), self.inner.encode_state(&s.1)])
    }

    fn decode_state(&self, bytes: &[u8]) -> Result<Self::State, StateCodecError> {
        let parts = unpack_parts(bytes)?;
        let id = parts[0].try_into().map(NodeId::from_le_bytes).map_err(|_| StateCodecError("id".into()))?;
        Ok((id, self.inner.decode_state(parts[1])?))
    }
}

/// A few instances spread over the protocol's family at its smallest
/// interesting size.
pub fn sample_instances(p: &NamedProtocol) -> Vec<LabeledGraph> {
    let space = enumerate_small_instances(p.family, p.family.min_size().max(3)).unwrap();
    let step = (space.len() / 4).max(1);
    (0..space.len()).step_by(step).filter_map(|k| space.get(k)).take(4).collect()
}

/// Inflates every C/B message of one run to budget + 1 bits, one at a time,
/// and checks each is refused, while inflating to exactly the budget is
/// accepted. Returns the number of messages tried.
pub fn check_inflation(p: &NamedProtocol, g: &LabeledGraph) -> Result<usize, String> {
    let budget = p.schedule.budget(g.n());
    let exec = execute(&p.protocol, g, &p.schedule, 3).map_err(|e| e.to_string())?;
    let sent: BTreeSet<(usize, NodeId, Option<NodeId>)> = exec
        .transcript
        .entries()
        .iter()
        .filter(|e| e.kind != RoundKind::Local)
        .map(|e| (e.round, e.sender, e.receiver))
        .collect();
    for &(round, sender, receiver) in &sent {
        let mk = |bits| Inflate { inner: p.protocol.clone(), round, sender, receiver, bits };
        let expected = EngineError::BandwidthViolation { round, sender, bits: budget + 1, limit: budget };
        match execute(&mk(budget + 1), g, &p.schedule, 3) {
            Err(e) if e == expected => {}
            Err(e) => return Err(format!("{}: round {round} sender {sender}: {e}", p.name())),
            Ok(_) => return Err(format!("{}: round {round} sender {sender}: oversized message accepted", p.name())),
        }
        if let Err(e) = execute(&mk(budget), g, &p.schedule, 3) {
            return Err(format!("{}: round {round} sender {sender}: message at budget refused: {e}", p.name()));
        }
    }
    Ok(sent.len())
}
