//! Synchronous round engine for LOCAL, CONGEST and BCC rounds.
//!
//! Each round runs in two phases: every node produces an outbox from its
//! pre-round state, then every node consumes its inbox. Nodes are visited in ID
//! order, which makes runs deterministic for a fixed seed.

mod boxed;
mod tape;
mod transcript;

pub use boxed::{BoxedProtocol, BoxedState};
pub use tape::RandomTape;
pub use transcript::{Transcript, TranscriptEntry};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{ceil_log2, BitString};
use crate::graph::{Label, LabeledGraph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RoundKind {
    #[serde(rename = "L")]
    Local,
    #[serde(rename = "C")]
    Congest,
    #[serde(rename = "B")]
    Bcc,
}

impl RoundKind {
    pub fn symbol(self) -> char {
        match self {
            RoundKind::Local => 'L',
            RoundKind::Congest => 'C',
            RoundKind::Bcc => 'B',
        }
    }
}

impl fmt::Display for RoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("unknown round kind {0:?} (expected L, C or B)")]
    UnknownKind(String),
    #[error("bad repetition count in {0:?}")]
    BadCount(String),
}

impl FromStr for RoundKind {
    type Err = ScheduleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "L" | "l" => Ok(RoundKind::Local),
            "C" | "c" => Ok(RoundKind::Congest),
            "B" | "b" => Ok(RoundKind::Bcc),
            other => Err(ScheduleError::UnknownKind(other.to_string())),
        }
    }
}

/// Per-message budget for CONGEST and BCC rounds as a function of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bandwidth {
    /// `factor · ⌈log₂ max(n, 2)⌉` bits.
    LogFactor(u32),
    Fixed(usize),
}

impl Default for Bandwidth {
    fn default() -> Self {
        Bandwidth::LogFactor(4)
    }
}

impl Bandwidth {
    pub fn bits(self, n: usize) -> usize {
        match self {
            Bandwidth::LogFactor(f) => f as usize * ceil_log2(n.max(2) as u64),
            Bandwidth::Fixed(b) => b,
        }
    }
}

/// Ordered round kinds plus a bandwidth function.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule {
    rounds: Vec<RoundKind>,
    bandwidth: Bandwidth,
}

impl Schedule {
    pub fn new(rounds: Vec<RoundKind>) -> Self {
        Self { rounds, bandwidth: Bandwidth::default() }
    }

    pub fn repeat(kind: RoundKind, count: usize) -> Self {
        Self::new(vec![kind; count])
    }

    pub fn with_bandwidth(mut self, bandwidth: Bandwidth) -> Self {
        self.bandwidth = bandwidth;
        self
    }

    pub fn rounds(&self) -> &[RoundKind] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn bandwidth(&self) -> Bandwidth {
        self.bandwidth
    }

    pub fn budget(&self, n: usize) -> usize {
        self.bandwidth.bits(n)
    }

    /// Whether a single ID from `1..=id_bound` fits in one message.
    pub fn fits_id_space(&self, n: usize, id_bound: u64) -> bool {
        self.budget(n) >= ceil_log2(id_bound)
    }

    pub fn count(&self, kind: RoundKind) -> usize {
        self.rounds.iter().filter(|&&k| k == kind).count()
    }

    pub fn concat(&self, other: &Schedule) -> Schedule {
        let mut rounds = self.rounds.clone();
        rounds.extend_from_slice(&other.rounds);
        Schedule { rounds, bandwidth: self.bandwidth }
    }

    pub(crate) fn with_rounds(&self, rounds: Vec<RoundKind>) -> Schedule {
        Schedule { rounds, bandwidth: self.bandwidth }
    }
}

/// Comma-separated kinds, each optionally raised to a count: `L,B^3,C`.
impl FromStr for Schedule {
    type Err = ScheduleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut rounds = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (kind, count) = match tok.split_once('^') {
                Some((k, c)) => (k, c.trim().parse::<usize>().map_err(|_| ScheduleError::BadCount(tok.into()))?),
                None => (tok, 1),
            };
            let kind: RoundKind = kind.parse()?;
            rounds.extend(std::iter::repeat_n(kind, count));
        }
        Ok(Schedule::new(rounds))
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rounds.iter().map(RoundKind::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// `a·#L + b·#B + c·#C`.
pub fn schedule_cost(schedule: &Schedule, a: f64, b: f64, c: f64) -> f64 {
    a * schedule.count(RoundKind::Local) as f64
        + b * schedule.count(RoundKind::Bcc) as f64
        + c * schedule.count(RoundKind::Congest) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundCtx {
    /// 1-based.
    pub round: usize,
    pub kind: RoundKind,
}

/// What a node knows before the first round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeView {
    pub id: NodeId,
    pub n: usize,
    pub id_bound: u64,
    /// Sorted ascending.
    pub neighbors: Vec<NodeId>,
    pub label: Label,
    pub tape: RandomTape,
    pub shared_tape: RandomTape,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outbox {
    Silent,
    /// LOCAL/CONGEST: at most one message per neighbor.
    PerNeighbor(BTreeMap<NodeId, BitString>),
    /// BCC: one message delivered to every node, including the sender.
    Broadcast(BitString),
}

impl Outbox {
    pub fn to_each(neighbors: &[NodeId], msg: &BitString) -> Self {
        Outbox::PerNeighbor(neighbors.iter().map(|&v| (v, msg.clone())).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub from: NodeId,
    pub payload: BitString,
}

/// Messages received in one round, sorted by sender.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inbox(Vec<Message>);

impl Inbox {
    pub fn new(mut messages: Vec<Message>) -> Self {
        messages.sort_by_key(|m| m.from);
        Self(messages)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Message> {
        self.0.iter()
    }

    pub fn from(&self, sender: NodeId) -> Option<&BitString> {
        self.0.binary_search_by_key(&sender, |m| m.from).ok().map(|i| &self.0[i].payload)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot decode protocol state: {0}")]
pub struct StateCodecError(pub String);

/// A distributed algorithm. State must be cloneable and encodable because the
/// round-swap transform ships whole states over LOCAL links.
pub trait Protocol: Send + Sync {
    type State: Clone + Send + Sync + 'static;

    fn init(&self, view: &NodeView) -> Self::State;
    fn send(&self, state: &Self::State, ctx: RoundCtx) -> Outbox;
    fn receive(&self, state: &mut Self::State, ctx: RoundCtx, inbox: &Inbox);
    fn decide(&self, state: &Self::State) -> bool;
    fn encode_state(&self, state: &Self::State) -> Vec<u8>;
    fn decode_state(&self, bytes: &[u8]) -> Result<Self::State, StateCodecError>;
}

pub fn encode_json<T: Serialize>(value: &T) -> Vec<u8> {
    serde_json::to_vec(value).expect("protocol state serializes")
}

pub fn decode_json<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, StateCodecError> {
    serde_json::from_slice(bytes).map_err(|e| StateCodecError(e.to_string()))
}

/// Concatenates byte blobs, each prefixed by its length as a little-endian `u32`.
pub fn pack_parts<B: AsRef<[u8]>>(parts: &[B]) -> Vec<u8> {
    let mut out = Vec::new();
    for p in parts {
        let p = p.as_ref();
        out.extend_from_slice(&(p.len() as u32).to_le_bytes());
        out.extend_from_slice(p);
    }
    out
}

pub fn unpack_parts(mut bytes: &[u8]) -> Result<Vec<&[u8]>, StateCodecError> {
    let mut parts = Vec::new();
    while !bytes.is_empty() {
        let bad = || StateCodecError("truncated part".into());
        let len_bytes: [u8; 4] = bytes.get(..4).ok_or_else(bad)?.try_into().unwrap();
        let len = u32::from_le_bytes(len_bytes) as usize;
        let body = bytes.get(4..4 + len).ok_or_else(bad)?;
        parts.push(body);
        bytes = &bytes[4 + len..];
    }
    Ok(parts)
}

/// Implements `encode_state`/`decode_state` with JSON for a serde state type.
#[macro_export]
macro_rules! json_state_codec {
    () => {
        fn encode_state(&self, state: &Self::State) -> Vec<u8> {
            $crate::engine::encode_json(state)
        }
        fn decode_state(&self, bytes: &[u8]) -> Result<Self::State, $crate::engine::StateCodecError> {
            $crate::engine::decode_json(bytes)
        }
    };
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("round {round}: node {sender} sent {bits} bits, budget is {limit}")]
    BandwidthViolation { round: usize, sender: NodeId, bits: usize, limit: usize },
    #[error("round {round}: node {sender} broke the protocol contract: {reason}")]
    ProtocolContract { round: usize, sender: NodeId, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub per_node: BTreeMap<NodeId, bool>,
}

impl Verdict {
    /// Global accept iff every node accepts.
    pub fn accepted(&self) -> bool {
        self.per_node.values().all(|&a| a)
    }

    pub fn rejecting(&self) -> Vec<NodeId> {
        self.per_node.iter().filter(|(_, &a)| !a).map(|(&v, _)| v).collect()
    }
}

pub struct Execution<S> {
    pub verdict: Verdict,
    pub transcript: Transcript,
    pub states: BTreeMap<NodeId, S>,
}

pub fn node_views(graph: &LabeledGraph, seed: u64) -> Vec<NodeView> {
    graph
        .nodes()
        .map(|v| NodeView {
            id: v,
            n: graph.n(),
            id_bound: graph.id_bound(),
            neighbors: graph.neighbors(v).iter().copied().collect(),
            label: graph.label(v).clone(),
            tape: RandomTape::for_node(seed, v),
            shared_tape: RandomTape::shared(seed),
        })
        .collect()
}

/// Runs `protocol` on `graph` under `schedule`, keeping final node states.
pub fn execute<P: Protocol + ?Sized>(
    protocol: &P,
    graph: &LabeledGraph,
    schedule: &Schedule,
    seed: u64,
) -> Result<Execution<P::State>, EngineError> {
    let budget = schedule.budget(graph.n());
    let mut states: BTreeMap<NodeId, P::State> =
        node_views(graph, seed).iter().map(|view| (view.id, protocol.init(view))).collect();
    let mut transcript = Transcript::default();

    for (idx, &kind) in schedule.rounds().iter().enumerate() {
        let ctx = RoundCtx { round: idx + 1, kind };
        let outboxes: Vec<(NodeId, Outbox)> = states.iter().map(|(&v, s)| (v, protocol.send(s, ctx))).collect();
        let mut inboxes: BTreeMap<NodeId, Vec<Message>> = graph.nodes().map(|v| (v, Vec::new())).collect();
        let contract = |sender, reason: &str| EngineError::ProtocolContract {
            round: ctx.round,
            sender,
            reason: reason.to_string(),
        };

        for (u, out) in outboxes {
            match (kind, out) {
                (_, Outbox::Silent) => {}
                (RoundKind::Bcc, Outbox::Broadcast(payload)) => {
                    if payload.len() > budget {
                        return Err(EngineError::BandwidthViolation {
                            round: ctx.round,
                            sender: u,
                            bits: payload.len(),
                            limit: budget,
                        });
                    }
                    for inbox in inboxes.values_mut() {
                        inbox.push(Message { from: u, payload: payload.clone() });
                    }
                    transcript.push(TranscriptEntry { round: ctx.round, kind, sender: u, receiver: None, payload });
                }
                (RoundKind::Local | RoundKind::Congest, Outbox::PerNeighbor(map)) => {
                    for (v, payload) in map {
                        if !graph.has_edge(u, v) {
                            return Err(contract(u, &format!("message addressed to non-neighbor {v}")));
                        }
                        if kind == RoundKind::Congest && payload.len() > budget {
                            return Err(EngineError::BandwidthViolation {
                                round: ctx.round,
                                sender: u,
                                bits: payload.len(),
                                limit: budget,
                            });
                        }
                        inboxes.get_mut(&v).unwrap().push(Message { from: u, payload: payload.clone() });
                        transcript.push(TranscriptEntry {
                            round: ctx.round,
                            kind,
                            sender: u,
                            receiver: Some(v),
                            payload,
                        });
                    }
                }
                (RoundKind::Bcc, Outbox::PerNeighbor(_)) => {
                    return Err(contract(u, "per-neighbor messages in a BCC round"));
                }
                (_, Outbox::Broadcast(_)) => {
                    return Err(contract(u, "broadcast in a LOCAL/CONGEST round"));
                }
            }
        }

        for (v, s) in states.iter_mut() {
            let inbox = Inbox(inboxes.remove(v).unwrap_or_default());
            protocol.receive(s, ctx, &inbox);
        }
    }

    let per_node = states.iter().map(|(&v, s)| (v, protocol.decide(s))).collect();
    Ok(Execution { verdict: Verdict { per_node }, transcript, states })
}

pub fn run<P: Protocol + ?Sized>(
    protocol: &P,
    graph: &LabeledGraph,
    schedule: &Schedule,
    seed: u64,
) -> Result<(Verdict, Transcript), EngineError> {
    execute(protocol, graph, schedule, seed).map(|e| (e.verdict, e.transcript))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_text() {
        let s: Schedule = "L,B^3,C".parse().unwrap();
        assert_eq!(s.rounds().len(), 5);
        assert_eq!(s.to_string(), "L,B,B,B,C");
        assert_eq!("".parse::<Schedule>().unwrap().len(), 0);
        assert!("L,X".parse::<Schedule>().is_err());
        assert!("B^x".parse::<Schedule>().is_err());
    }

    #[test]
    fn cost() {
        let s: Schedule = "L,L,B,C".parse().unwrap();
        assert_eq!(schedule_cost(&s, 2.0, 3.0, 5.0), 2.0 * 2.0 + 3.0 + 5.0);
    }

    /// Sends `len` zero bits everywhere it may and records what it hears.
    struct Talker {
        len: usize,
        stray: bool,
    }

    impl Protocol for Talker {
        type State = (NodeView, Vec<NodeId>);

        fn init(&self, view: &NodeView) -> Self::State {
            (view.clone(), Vec::new())
        }
        fn send(&self, s: &Self::State, ctx: RoundCtx) -> Outbox {
            let msg = BitString::zeros(self.len);
            match (ctx.kind, self.stray) {
                (RoundKind::Bcc, false) => Outbox::Broadcast(msg),
                (RoundKind::Bcc, true) => Outbox::to_each(&s.0.neighbors, &msg),
                (_, false) => Outbox::to_each(&s.0.neighbors, &msg),
                (_, true) => Outbox::Broadcast(msg),
            }
        }
        fn receive(&self, s: &mut Self::State, _ctx: RoundCtx, inbox: &Inbox) {
            s.1.extend(inbox.iter().map(|m| m.from));
        }
        fn decide(&self, s: &Self::State) -> bool {
            !s.1.is_empty()
        }
        crate::json_state_codec!();
    }

    #[test]
    fn budgets_are_inclusive() {
        let g = LabeledGraph::unlabeled(3, [(1, 2), (2, 3)]).unwrap();
        for kind in ["B", "C"] {
            let s: Schedule = kind.parse().unwrap();
            let budget = s.budget(3);
            assert!(execute(&Talker { len: budget, stray: false }, &g, &s, 0).is_ok());
            let err = execute(&Talker { len: budget + 1, stray: false }, &g, &s, 0).err();
            let expected = EngineError::BandwidthViolation { round: 1, sender: 1, bits: budget + 1, limit: budget };
            assert_eq!(err, Some(expected));
        }
        let local: Schedule = "L".parse().unwrap();
        assert!(execute(&Talker { len: 1000, stray: false }, &g, &local, 0).is_ok());
        let fixed = local.clone().with_bandwidth(Bandwidth::Fixed(1));
        assert!(execute(&Talker { len: 1000, stray: false }, &g, &fixed, 0).is_ok());
        let c1 = "C".parse::<Schedule>().unwrap().with_bandwidth(Bandwidth::Fixed(1));
        assert!(execute(&Talker { len: 2, stray: false }, &g, &c1, 0).is_err());
    }

    #[test]
    fn broadcasts_reach_everyone_including_the_sender() {
        let g = LabeledGraph::unlabeled(3, [(1, 2)]).unwrap();
        let exec = execute(&Talker { len: 1, stray: false }, &g, &"B".parse().unwrap(), 0).unwrap();
        for (_, heard) in exec.states.values() {
            assert_eq!(heard, &vec![1, 2, 3]);
        }
        assert_eq!(exec.transcript.entries().len(), 3);
        assert!(exec.transcript.entries().iter().all(|e| e.receiver.is_none()));
        // node 3 is isolated, so it hears nothing locally
        let exec = execute(&Talker { len: 1, stray: false }, &g, &"L".parse().unwrap(), 0).unwrap();
        assert_eq!(exec.verdict.rejecting(), vec![3]);
    }

    #[test]
    fn round_kind_contract() {
        let g = LabeledGraph::unlabeled(2, [(1, 2)]).unwrap();
        for kind in ["B", "L", "C"] {
            let err = execute(&Talker { len: 1, stray: true }, &g, &kind.parse().unwrap(), 0).err();
            assert!(matches!(err, Some(EngineError::ProtocolContract { round: 1, .. })), "{kind}: {err:?}");
        }
    }

    #[test]
    fn default_bandwidth() {
        let s = Schedule::default();
        assert_eq!(s.budget(1), 4);
        assert_eq!(s.budget(2), 4);
        assert_eq!(s.budget(5), 12);
        assert_eq!(s.budget(8), 12);
        assert_eq!(s.budget(9), 16);
        for n in 1..200u64 {
            assert!(s.fits_id_space(n as usize, n.pow(3)));
        }
    }
}
