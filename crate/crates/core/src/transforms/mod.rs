//! Model transformations: exchanging a BCC round with the LOCAL round after
//! it, and deciding triangle-freeness through a degree-padding reduction.

mod pendant;

pub use pendant::{padded_graph, pendant_layout, TriangleViaTomdf};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bits::BitString;
use crate::engine::{
    pack_parts, unpack_parts, BoxedProtocol, BoxedState, Inbox, Message, NodeView, Outbox, Protocol, RoundCtx,
    RoundKind, Schedule, StateCodecError,
};
use crate::graph::NodeId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("rounds {t} and {next} are not B followed by L", next = t + 1)]
    NotBl { t: usize },
    #[error("round {round} is {kind}; only L and B rounds can be reordered")]
    Unsupported { round: usize, kind: RoundKind },
}

/// A protocol produced by one or more swaps, with the 1-based index of the
/// original BCC round for each swap in the order they were applied.
#[derive(Clone)]
pub struct WrappedProtocol {
    pub protocol: BoxedProtocol,
    pub swaps: Vec<usize>,
}

impl Protocol for WrappedProtocol {
    type State = BoxedState;

    fn init(&self, view: &NodeView) -> BoxedState {
        self.protocol.init(view)
    }
    fn send(&self, s: &BoxedState, ctx: RoundCtx) -> Outbox {
        self.protocol.send(s, ctx)
    }
    fn receive(&self, s: &mut BoxedState, ctx: RoundCtx, inbox: &Inbox) {
        self.protocol.receive(s, ctx, inbox)
    }
    fn decide(&self, s: &BoxedState) -> bool {
        self.protocol.decide(s)
    }
    fn encode_state(&self, s: &BoxedState) -> Vec<u8> {
        self.protocol.encode_state(s)
    }
    fn decode_state(&self, bytes: &[u8]) -> Result<BoxedState, StateCodecError> {
        self.protocol.decode_state(bytes)
    }
}

/// Runs `inner`, written for B at round `t` and L at `t + 1`, under L at `t`
/// and B at `t + 1`. In the new LOCAL round each node ships its whole state to
/// its neighbors. In the new BCC round it broadcasts what it would have
/// broadcast originally; then, knowing every broadcast and each neighbor's
/// state, it replays each neighbor's receive step and recomputes the LOCAL
/// message that neighbor would have sent it.
struct Swapped {
    inner: BoxedProtocol,
    t: usize,
}

#[derive(Clone)]
struct SwapState {
    id: NodeId,
    adjacent: Vec<NodeId>,
    inner: BoxedState,
    neighbors: BTreeMap<NodeId, BoxedState>,
}

impl Protocol for Swapped {
    type State = SwapState;

    fn init(&self, view: &NodeView) -> SwapState {
        SwapState {
            id: view.id,
            adjacent: view.neighbors.clone(),
            inner: self.inner.init(view),
            neighbors: BTreeMap::new(),
        }
    }

    fn send(&self, s: &SwapState, ctx: RoundCtx) -> Outbox {
        if ctx.round == self.t {
            let bytes = BitString::from_bytes(&self.inner.encode_state(&s.inner));
            return Outbox::to_each(&s.adjacent, &bytes);
        }
        if ctx.round == self.t + 1 {
            return self.inner.send(&s.inner, RoundCtx { round: self.t, kind: RoundKind::Bcc });
        }
        self.inner.send(&s.inner, ctx)
    }

    fn receive(&self, s: &mut SwapState, ctx: RoundCtx, inbox: &Inbox) {
        if ctx.round == self.t {
            s.neighbors = inbox
                .iter()
                .filter_map(|m| {
                    let bytes = m.payload.to_bytes()?;
                    Some((m.from, self.inner.decode_state(&bytes).ok()?))
                })
                .collect();
            return;
        }
        if ctx.round != self.t + 1 {
            self.inner.receive(&mut s.inner, ctx, inbox);
            return;
        }
        let bcc = RoundCtx { round: self.t, kind: RoundKind::Bcc };
        let local = RoundCtx { round: self.t + 1, kind: RoundKind::Local };
        let mut replayed = Vec::new();
        for (&v, state) in std::mem::take(&mut s.neighbors).iter_mut() {
            self.inner.receive(state, bcc, inbox);
            if let Outbox::PerNeighbor(mut out) = self.inner.send(state, local) {
                if let Some(payload) = out.remove(&s.id) {
                    replayed.push(Message { from: v, payload });
                }
            }
        }
        self.inner.receive(&mut s.inner, bcc, inbox);
        self.inner.receive(&mut s.inner, local, &Inbox::new(replayed));
    }

    fn decide(&self, s: &SwapState) -> bool {
        self.inner.decide(&s.inner)
    }

    fn encode_state(&self, s: &SwapState) -> Vec<u8> {
        let adjacent: Vec<u8> = s.adjacent.iter().flat_map(|v| v.to_le_bytes()).collect();
        let mut parts = vec![s.id.to_le_bytes().to_vec(), adjacent, self.inner.encode_state(&s.inner)];
        for (&v, state) in &s.neighbors {
            parts.push(v.to_le_bytes().to_vec());
            parts.push(self.inner.encode_state(state));
        }
        pack_parts(&parts)
    }

    fn decode_state(&self, bytes: &[u8]) -> Result<SwapState, StateCodecError> {
        let parts = unpack_parts(bytes)?;
        let id_of =
            |b: &[u8]| b.try_into().map(NodeId::from_le_bytes).map_err(|_| StateCodecError("bad node id".into()));
        if parts.len() < 3 || parts.len() % 2 != 1 || parts[1].len() % 4 != 0 {
            return Err(StateCodecError("bad swap state layout".into()));
        }
        let adjacent = parts[1].chunks(4).map(id_of).collect::<Result<_, _>>()?;
        let mut neighbors = BTreeMap::new();
        for pair in parts[3..].chunks(2) {
            neighbors.insert(id_of(pair[0])?, self.inner.decode_state(pair[1])?);
        }
        Ok(SwapState { id: id_of(parts[0])?, adjacent, inner: self.inner.decode_state(parts[2])?, neighbors })
    }
}

fn wrap(p: BoxedProtocol, prior: Vec<usize>, t: usize) -> WrappedProtocol {
    let mut swaps = prior;
    swaps.push(t);
    WrappedProtocol { protocol: BoxedProtocol::new(Swapped { inner: p, t }), swaps }
}

fn swapped_schedule(schedule: &Schedule, t: usize) -> Result<Schedule, TransformError> {
    let rounds = schedule.rounds();
    if t == 0 || t >= rounds.len() || rounds[t - 1] != RoundKind::Bcc || rounds[t] != RoundKind::Local {
        return Err(TransformError::NotBl { t });
    }
    let mut out = rounds.to_vec();
    out.swap(t - 1, t);
    Ok(schedule.with_rounds(out))
}

/// Swaps the B round at `t` (1-based) with the L round after it.
pub fn swap_bl_to_lb<P: Protocol + 'static>(
    p: P,
    schedule: &Schedule,
    t: usize,
) -> Result<(WrappedProtocol, Schedule), TransformError> {
    let s = swapped_schedule(schedule, t)?;
    Ok((wrap(BoxedProtocol::new(p), Vec::new(), t), s))
}

/// Moves every L round in front of every B round by repeated adjacent swaps,
/// always taking the last B-then-L pair first.
pub fn normalize_lb<P: Protocol + 'static>(
    p: P,
    schedule: &Schedule,
) -> Result<(WrappedProtocol, Schedule), TransformError> {
    if let Some((i, &kind)) = schedule.rounds().iter().enumerate().find(|(_, &k)| k == RoundKind::Congest) {
        return Err(TransformError::Unsupported { round: i + 1, kind });
    }
    let mut current = WrappedProtocol { protocol: BoxedProtocol::new(p), swaps: Vec::new() };
    let mut sched = schedule.clone();
    loop {
        let rounds = sched.rounds();
        let Some(i) = (0..rounds.len().saturating_sub(1))
            .rev()
            .find(|&i| rounds[i] == RoundKind::Bcc && rounds[i + 1] == RoundKind::Local)
        else {
            return Ok((current, sched));
        };
        let t = i + 1;
        sched = swapped_schedule(&sched, t)?;
        current = wrap(current.protocol, current.swaps, t);
    }
}
