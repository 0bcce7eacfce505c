use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{id_width, read_id, write_id};
use crate::bits::{width_for, BitReader, BitString, BitWriter};
use crate::engine::{Inbox, NodeView, Outbox, Protocol, RoundCtx};
use crate::graph::NodeId;

/// Schedule `B,L`. Degrees are broadcast to learn the maximum degree, then
/// neighbor lists are exchanged locally to detect triangles.
#[derive(Clone, Copy, Debug)]
pub struct TomdfProtocol;

#[derive(Clone, Serialize, Deserialize)]
pub struct State {
    view: NodeView,
    max_degree: Option<usize>,
    in_triangle: bool,
}

fn degree_width(n: usize) -> usize {
    width_for(n.saturating_sub(1) as u64)
}

impl Protocol for TomdfProtocol {
    type State = State;

    fn init(&self, view: &NodeView) -> State {
        State { view: view.clone(), max_degree: None, in_triangle: false }
    }

    fn send(&self, s: &State, ctx: RoundCtx) -> Outbox {
        match ctx.round {
            1 => Outbox::Broadcast(BitString::from_uint(s.view.neighbors.len() as u64, degree_width(s.view.n))),
            2 => {
                let w = id_width(s.view.id_bound);
                let mut out = BitWriter::new();
                for &v in &s.view.neighbors {
                    write_id(&mut out, v, w);
                }
                Outbox::to_each(&s.view.neighbors, &out.finish())
            }
            _ => Outbox::Silent,
        }
    }

    fn receive(&self, s: &mut State, ctx: RoundCtx, inbox: &Inbox) {
        match ctx.round {
            1 => {
                let w = degree_width(s.view.n);
                let degrees: Option<Vec<u64>> =
                    inbox.iter().map(|m| m.payload.to_uint().filter(|_| m.payload.len() == w)).collect();
                s.max_degree = degrees.and_then(|d| d.into_iter().max()).map(|d| d as usize);
            }
            2 => {
                let w = id_width(s.view.id_bound);
                let mine: BTreeSet<NodeId> = s.view.neighbors.iter().copied().collect();
                s.in_triangle = inbox.iter().any(|m| {
                    let mut r = BitReader::new(&m.payload);
                    std::iter::from_fn(|| read_id(&mut r, w)).any(|v| v != m.from && mine.contains(&v))
                });
            }
            _ => {}
        }
    }

    fn decide(&self, s: &State) -> bool {
        match s.max_degree {
            Some(d) => s.view.neighbors.len() < d || !s.in_triangle,
            None => false,
        }
    }

    crate::json_state_codec!();
}

/// Pure-BCC decider for graphs of maximum degree at most `max_degree`:
/// round 1 broadcasts the degree, each later round one neighbor ID, so after
/// `max_degree + 1` rounds every node knows the whole graph. A node whose
/// degree exceeds the bound flags it and every node rejects.
#[derive(Clone, Copy, Debug)]
pub struct BccTomdfProtocol {
    max_degree: usize,
}

impl BccTomdfProtocol {
    pub fn new(max_degree: usize) -> Self {
        Self { max_degree }
    }

    pub fn rounds(&self) -> usize {
        self.max_degree + 1
    }
}

#[derive(Clone, Serialize, Deserialize)]
pub struct BccState {
    view: NodeView,
    degrees: BTreeMap<NodeId, usize>,
    lists: BTreeMap<NodeId, Vec<NodeId>>,
    broken: bool,
}

impl Protocol for BccTomdfProtocol {
    type State = BccState;

    fn init(&self, view: &NodeView) -> BccState {
        BccState { view: view.clone(), degrees: BTreeMap::new(), lists: BTreeMap::new(), broken: false }
    }

    fn send(&self, s: &BccState, ctx: RoundCtx) -> Outbox {
        let deg = s.view.neighbors.len();
        let mut w = BitWriter::new();
        if ctx.round == 1 {
            let overflow = deg > self.max_degree;
            w.bit(overflow);
            if !overflow {
                w.uint(deg as u64, degree_width(s.view.n));
            }
        } else {
            match s.view.neighbors.get(ctx.round - 2) {
                Some(&v) => write_id(w.bit(true), v, id_width(s.view.id_bound)),
                None => {
                    w.bit(false);
                }
            }
        }
        Outbox::Broadcast(w.finish())
    }

    fn receive(&self, s: &mut BccState, ctx: RoundCtx, inbox: &Inbox) {
        if inbox.len() != s.view.n {
            s.broken = true;
        }
        for m in inbox.iter() {
            let mut r = BitReader::new(&m.payload);
            if ctx.round == 1 {
                match (r.bit(), r.uint(degree_width(s.view.n))) {
                    (Some(false), Some(d)) => {
                        s.degrees.insert(m.from, d as usize);
                    }
                    _ => s.broken = true,
                }
            } else if r.bit() == Some(true) {
                match read_id(&mut r, id_width(s.view.id_bound)) {
                    Some(v) => s.lists.entry(m.from).or_default().push(v),
                    None => s.broken = true,
                }
            }
        }
    }

    fn decide(&self, s: &BccState) -> bool {
        if s.broken {
            return false;
        }
        let delta = s.degrees.values().copied().max().unwrap_or(0);
        let me = s.view.id;
        if s.view.neighbors.len() < delta {
            return true;
        }
        let empty = Vec::new();
        let mine = s.lists.get(&me).unwrap_or(&empty);
        !mine.iter().any(|a| s.lists.get(a).is_some_and(|la| la.iter().any(|b| b != &me && mine.contains(b))))
    }

    crate::json_state_codec!();
}
