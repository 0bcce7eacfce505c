//! Auxiliary protocols: a constant verdict, sequential composition, and a
//! randomized protocol whose verdict depends on its entire history.

use serde::{Deserialize, Serialize};

use crate::bits::{BitString, BitWriter};
use crate::engine::{
    pack_parts, unpack_parts, BoxedProtocol, BoxedState, Inbox, NodeView, Outbox, Protocol, RoundCtx, RoundKind,
    StateCodecError,
};

/// Sends nothing and answers `verdict` everywhere.
#[derive(Clone, Copy, Debug)]
pub struct ConstantProtocol(pub bool);

impl Protocol for ConstantProtocol {
    type State = ();

    fn init(&self, _view: &NodeView) {}

    fn send(&self, _state: &(), _ctx: RoundCtx) -> Outbox {
        Outbox::Silent
    }

    fn receive(&self, _state: &mut (), _ctx: RoundCtx, _inbox: &Inbox) {}

    fn decide(&self, _state: &()) -> bool {
        self.0
    }

    crate::json_state_codec!();
}

/// Runs `first` for its `first_rounds` rounds, then `second`; a node accepts
/// iff it accepts in both.
#[derive(Clone)]
pub struct Sequential {
    first: BoxedProtocol,
    first_rounds: usize,
    second: BoxedProtocol,
}

impl Sequential {
    pub fn new(first: BoxedProtocol, first_rounds: usize, second: BoxedProtocol) -> Self {
        Self { first, first_rounds, second }
    }

    fn split(&self, ctx: RoundCtx) -> (bool, RoundCtx) {
        if ctx.round <= self.first_rounds {
            (true, ctx)
        } else {
            (false, RoundCtx { round: ctx.round - self.first_rounds, kind: ctx.kind })
        }
    }
}

impl Protocol for Sequential {
    type State = (BoxedState, BoxedState);

    fn init(&self, view: &NodeView) -> Self::State {
        (self.first.init(view), self.second.init(view))
    }

    fn send(&self, s: &Self::State, ctx: RoundCtx) -> Outbox {
        match self.split(ctx) {
            (true, c) => self.first.send(&s.0, c),
            (false, c) => self.second.send(&s.1, c),
        }
    }

    fn receive(&self, s: &mut Self::State, ctx: RoundCtx, inbox: &Inbox) {
        match self.split(ctx) {
            (true, c) => self.first.receive(&mut s.0, c, inbox),
            (false, c) => self.second.receive(&mut s.1, c, inbox),
        }
    }

    fn decide(&self, s: &Self::State) -> bool {
        self.first.decide(&s.0) && self.second.decide(&s.1)
    }

    fn encode_state(&self, s: &Self::State) -> Vec<u8> {
        pack_parts(&[self.first.encode_state(&s.0), self.second.encode_state(&s.1)])
    }

    fn decode_state(&self, bytes: &[u8]) -> Result<Self::State, StateCodecError> {
        match unpack_parts(bytes)?[..] {
            [a, b] => Ok((self.first.decode_state(a)?, self.second.decode_state(b)?)),
            _ => Err(StateCodecError("expected two parts".into())),
        }
    }
}

/// Randomized protocol for exercising transforms. Each round a node draws
/// fresh coins, sends messages derived from its whole state (per-neighbor in
/// LOCAL/CONGEST rounds, a 4-bit broadcast in BCC rounds), and folds every
/// received message into a running digest. The verdict is one digest bit.
#[derive(Clone, Copy, Debug)]
pub struct StressProtocol;

#[derive(Clone, Serialize, Deserialize)]
pub struct StressState {
    view: NodeView,
    digest: u64,
    coins: u64,
    heard: Vec<(u32, String)>,
}

fn mix(h: u64, v: u64) -> u64 {
    // splitmix64 finalizer over the combined word
    let mut z = h ^ v.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Protocol for StressProtocol {
    type State = StressState;

    fn init(&self, view: &NodeView) -> StressState {
        let mut tape = view.tape.clone();
        let coins = tape.next_u64();
        let mut view = view.clone();
        view.tape = tape;
        let digest = mix(u64::from(view.id), serde_json::to_string(&view.label).map_or(0, |t| t.len()) as u64);
        StressState { view, digest, coins, heard: Vec::new() }
    }

    fn send(&self, s: &StressState, ctx: RoundCtx) -> Outbox {
        let base = mix(s.digest, s.coins ^ ctx.round as u64);
        match ctx.kind {
            RoundKind::Bcc => Outbox::Broadcast(BitString::from_uint(base & 0xf, 4)),
            _ => Outbox::PerNeighbor(
                s.view
                    .neighbors
                    .iter()
                    .map(|&v| {
                        let h = mix(base, u64::from(v));
                        let len = (h % 5) as usize + usize::from(ctx.kind == RoundKind::Local) * s.heard.len();
                        let mut w = BitWriter::new();
                        for t in 0..len {
                            w.bit((h >> (t % 64)) & 1 == 1);
                        }
                        (v, w.finish())
                    })
                    .collect(),
            ),
        }
    }

    fn receive(&self, s: &mut StressState, ctx: RoundCtx, inbox: &Inbox) {
        for m in inbox.iter() {
            let word = m.payload.bits().iter().fold(m.payload.len() as u64, |a, &b| (a << 1) | u64::from(b));
            s.digest = mix(s.digest, mix(u64::from(m.from), word));
            s.heard.push((m.from, m.payload.to_string()));
        }
        s.digest = mix(s.digest, ctx.round as u64);
        s.coins = s.view.tape.next_u64();
    }

    fn decide(&self, s: &StressState) -> bool {
        s.digest & 3 != 0
    }

    crate::json_state_codec!();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{execute, Schedule};
    use crate::graph::LabeledGraph;

    #[test]
    fn sequential_accepts_iff_both_parts_accept() {
        let g = LabeledGraph::unlabeled(3, [(1, 2)]).unwrap();
        let s: Schedule = "L,B".parse().unwrap();
        for (a, b) in [(true, true), (true, false), (false, true), (false, false)] {
            let p =
                Sequential::new(BoxedProtocol::new(ConstantProtocol(a)), 1, BoxedProtocol::new(ConstantProtocol(b)));
            let exec = execute(&p, &g, &s, 0).unwrap();
            assert_eq!(exec.verdict.accepted(), a && b);
            let st = &exec.states[&1];
            assert_eq!(p.decide(&p.decode_state(&p.encode_state(st)).unwrap()), a && b);
        }
    }

    #[test]
    fn stress_state_round_trips() {
        let g = crate::graph::random_labeled_graph(6, 0.5, 2);
        let exec = execute(&StressProtocol, &g, &"L,B,C".parse().unwrap(), 1).unwrap();
        assert!(exec.transcript.entries().len() > 6);
        for s in exec.states.values() {
            let again = StressProtocol.decode_state(&StressProtocol.encode_state(s)).unwrap();
            assert_eq!(again.digest, s.digest);
        }
    }
}
