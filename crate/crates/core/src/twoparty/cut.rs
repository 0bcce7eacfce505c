//! Bits that cross an Alice/Bob partition of a simulated network.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{EngineError, RoundKind};
use crate::graph::{LabeledGraph, NodeId};
use crate::protocols::NamedProtocol;

#[derive(Clone, Debug, Default)]
pub struct CutConfig {
    pub alice: BTreeSet<NodeId>,
    pub bob: BTreeSet<NodeId>,
    /// Only messages sent by these nodes are metered.
    pub accounted: BTreeSet<NodeId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CutError {
    #[error("node {0} is on both sides")]
    Overlap(NodeId),
    #[error("node {0} is on neither side")]
    Uncovered(NodeId),
    #[error("node {0} is not in the graph")]
    Unknown(NodeId),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl CutConfig {
    pub fn validate(&self, g: &LabeledGraph) -> Result<(), CutError> {
        if let Some(&v) = self.alice.intersection(&self.bob).next() {
            return Err(CutError::Overlap(v));
        }
        if let Some(&v) = self.alice.iter().chain(&self.bob).chain(&self.accounted).find(|&&v| !g.contains(v)) {
            return Err(CutError::Unknown(v));
        }
        match g.nodes().find(|v| !self.alice.contains(v) && !self.bob.contains(v)) {
            Some(v) => Err(CutError::Uncovered(v)),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundCut {
    pub round: usize,
    pub kind: RoundKind,
    pub alice_to_bob: usize,
    pub bob_to_alice: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutReport {
    pub rounds: Vec<RoundCut>,
    /// Bits in the whole run, metered or not.
    pub transcript_bits: usize,
}

impl CutReport {
    pub fn total(&self) -> usize {
        self.rounds.iter().map(|r| r.alice_to_bob + r.bob_to_alice).sum()
    }
}

/// Runs `np` on `g` and meters the cut. A point-to-point message counts when
/// an accounted sender's message lands on the other side; a broadcast by an
/// accounted node counts once, toward its sender's side.
pub fn cut_communication(
    np: &NamedProtocol,
    g: &LabeledGraph,
    cfg: &CutConfig,
    seed: u64,
) -> Result<CutReport, CutError> {
    cfg.validate(g)?;
    let (_, transcript) = np.run(g, seed)?;
    let mut rounds: Vec<RoundCut> = np
        .schedule
        .rounds()
        .iter()
        .enumerate()
        .map(|(t, &kind)| RoundCut { round: t + 1, kind, alice_to_bob: 0, bob_to_alice: 0 })
        .collect();
    for e in transcript.entries() {
        if !cfg.accounted.contains(&e.sender) {
            continue;
        }
        let from_alice = cfg.alice.contains(&e.sender);
        let crosses = match e.receiver {
            None => true,
            Some(r) => cfg.alice.contains(&r) != from_alice,
        };
        if crosses {
            let slot = &mut rounds[e.round - 1];
            *if from_alice { &mut slot.alice_to_bob } else { &mut slot.bob_to_alice } += e.bits();
        }
    }
    Ok(CutReport { rounds, transcript_bits: transcript.total_bits() })
}
