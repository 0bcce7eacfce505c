//! Triangle-freeness through a pure-BCC TOMDF decider. Padding every node `v`
//! with `Δ − d(v)` pendant vertices makes all original nodes share the
//! maximum degree without creating triangles, so the padded graph is TOMDF
//! iff the original is triangle-free. One extra BCC round spreads the degree
//! table; afterwards every node knows the padded graph's pendant layout and
//! can simulate every pendant, since a pendant's view is public information.

use std::collections::{BTreeMap, BTreeSet};

use crate::bits::{width_for, BitReader, BitString};
use crate::engine::{
    pack_parts, unpack_parts, BoxedProtocol, BoxedState, Inbox, Message, NodeView, Outbox, Protocol, RoundCtx,
    RoundKind, Schedule, StateCodecError,
};
use crate::graph::{GraphError, Label, LabeledGraph, NodeId};

/// Pendants as `(pendant id, host)`. Hosts are taken in increasing ID order;
/// host `v` receives `Δ − d(v)` pendants whose IDs are the smallest positive
/// integers not yet used.
pub fn pendant_layout(degrees: &BTreeMap<NodeId, usize>) -> Vec<(NodeId, NodeId)> {
    let delta = degrees.values().copied().max().unwrap_or(0);
    let mut next = 1;
    let mut out = Vec::new();
    for (&host, &d) in degrees {
        for _ in d..delta {
            while degrees.contains_key(&next) {
                next += 1;
            }
            out.push((next, host));
            next += 1;
        }
    }
    out
}

/// The padded graph: `g` plus blank-labeled pendants from [`pendant_layout`].
pub fn padded_graph(g: &LabeledGraph) -> Result<LabeledGraph, GraphError> {
    let degrees: BTreeMap<NodeId, usize> = g.nodes().map(|v| (v, g.degree(v))).collect();
    let layout = pendant_layout(&degrees);
    let nodes = g.nodes().map(|v| (v, g.label(v).clone())).chain(layout.iter().map(|&(p, _)| (p, Label::Blank)));
    LabeledGraph::new(nodes, g.edges().into_iter().chain(layout.iter().copied()))
}

/// Decides triangle-freeness by running `decider` (a TOMDF decider for
/// `decider_rounds` BCC rounds) on the padded graph.
#[derive(Clone)]
pub struct TriangleViaTomdf {
    decider: BoxedProtocol,
    decider_rounds: usize,
}

impl TriangleViaTomdf {
    pub fn new<P: Protocol + 'static>(decider: P, decider_rounds: usize) -> Self {
        Self { decider: BoxedProtocol::new(decider), decider_rounds }
    }

    pub fn schedule(&self) -> Schedule {
        Schedule::repeat(RoundKind::Bcc, self.decider_rounds + 1)
    }
}

#[derive(Clone)]
pub struct PaddedState {
    view: NodeView,
    /// Set after round 1.
    sim: Option<Simulation>,
}

#[derive(Clone)]
struct Simulation {
    own: BoxedState,
    /// Every pendant of the padded graph: id → (host, decider state).
    pendants: BTreeMap<NodeId, (NodeId, BoxedState)>,
    failed: bool,
}

fn degree_width(n: usize) -> usize {
    width_for(n.saturating_sub(1) as u64)
}

impl TriangleViaTomdf {
    fn start(&self, view: &NodeView, inbox: &Inbox) -> Simulation {
        let w = degree_width(view.n);
        let degrees: BTreeMap<NodeId, usize> =
            inbox.iter().filter_map(|m| Some((m.from, BitReader::new(&m.payload).uint(w)? as usize))).collect();
        let layout = pendant_layout(&degrees);
        let n_virtual = view.n + layout.len();
        let id_bound = layout.iter().map(|&(p, _)| u64::from(p)).fold(view.id_bound, u64::max);
        let mine: BTreeSet<NodeId> = layout.iter().filter(|&&(_, h)| h == view.id).map(|&(p, _)| p).collect();
        let own_view = NodeView {
            n: n_virtual,
            id_bound,
            neighbors: view.neighbors.iter().copied().chain(mine).collect::<BTreeSet<_>>().into_iter().collect(),
            ..view.clone()
        };
        let pendants = layout
            .iter()
            .map(|&(p, host)| {
                let pv = NodeView {
                    id: p,
                    n: n_virtual,
                    id_bound,
                    neighbors: vec![host],
                    label: Label::Blank,
                    tape: view.shared_tape.for_virtual_node(p),
                    shared_tape: view.shared_tape.clone(),
                };
                (p, (host, self.decider.init(&pv)))
            })
            .collect();
        let failed = degrees.len() != view.n;
        Simulation { own: self.decider.init(&own_view), pendants, failed }
    }

    fn step(&self, sim: &mut Simulation, ctx: RoundCtx, inbox: &Inbox) {
        let mut messages: Vec<Message> = inbox.iter().cloned().collect();
        for (&p, (_, state)) in &sim.pendants {
            match self.decider.send(state, ctx) {
                Outbox::Broadcast(payload) => messages.push(Message { from: p, payload }),
                Outbox::Silent => {}
                Outbox::PerNeighbor(_) => sim.failed = true,
            }
        }
        let virtual_inbox = Inbox::new(messages);
        self.decider.receive(&mut sim.own, ctx, &virtual_inbox);
        for (_, state) in sim.pendants.values_mut() {
            self.decider.receive(state, ctx, &virtual_inbox);
        }
    }
}

impl Protocol for TriangleViaTomdf {
    type State = PaddedState;

    fn init(&self, view: &NodeView) -> PaddedState {
        PaddedState { view: view.clone(), sim: None }
    }

    fn send(&self, s: &PaddedState, ctx: RoundCtx) -> Outbox {
        match &s.sim {
            None => Outbox::Broadcast(BitString::from_uint(s.view.neighbors.len() as u64, degree_width(s.view.n))),
            Some(sim) => self.decider.send(&sim.own, RoundCtx { round: ctx.round - 1, kind: RoundKind::Bcc }),
        }
    }

    fn receive(&self, s: &mut PaddedState, ctx: RoundCtx, inbox: &Inbox) {
        match &mut s.sim {
            None => s.sim = Some(self.start(&s.view, inbox)),
            Some(sim) => self.step(sim, RoundCtx { round: ctx.round - 1, kind: RoundKind::Bcc }, inbox),
        }
    }

    fn decide(&self, s: &PaddedState) -> bool {
        let Some(sim) = &s.sim else { return false };
        !sim.failed
            && self.decider.decide(&sim.own)
            && sim.pendants.values().filter(|(h, _)| *h == s.view.id).all(|(_, st)| self.decider.decide(st))
    }

    fn encode_state(&self, s: &PaddedState) -> Vec<u8> {
        let mut parts = vec![crate::engine::encode_json(&s.view)];
        if let Some(sim) = &s.sim {
            parts.push(vec![u8::from(sim.failed)]);
            parts.push(self.decider.encode_state(&sim.own));
            for (&p, (h, st)) in &sim.pendants {
                parts.push([p.to_le_bytes(), h.to_le_bytes()].concat());
                parts.push(self.decider.encode_state(st));
            }
        }
        pack_parts(&parts)
    }

    fn decode_state(&self, bytes: &[u8]) -> Result<PaddedState, StateCodecError> {
        let parts = unpack_parts(bytes)?;
        let bad = || StateCodecError("bad padded state layout".into());
        let view = crate::engine::decode_json(parts.first().ok_or_else(bad)?)?;
        if parts.len() == 1 {
            return Ok(PaddedState { view, sim: None });
        }
        if parts.len() < 3 || parts.len() % 2 != 1 {
            return Err(bad());
        }
        let mut pendants = BTreeMap::new();
        for pair in parts[3..].chunks(2) {
            let ids: [u8; 8] = pair[0].try_into().map_err(|_| bad())?;
            let p = NodeId::from_le_bytes(ids[..4].try_into().unwrap());
            let h = NodeId::from_le_bytes(ids[4..].try_into().unwrap());
            pendants.insert(p, (h, self.decider.decode_state(pair[1])?));
        }
        let sim = Simulation { own: self.decider.decode_state(parts[2])?, pendants, failed: parts[1] == [1] };
        Ok(PaddedState { view, sim: Some(sim) })
    }
}
