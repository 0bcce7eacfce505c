use std::collections::BTreeMap;

use serde::Serialize;

use super::RoundKind;
use crate::bits::BitString;
use crate::graph::NodeId;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranscriptEntry {
    pub round: usize,
    pub kind: RoundKind,
    pub sender: NodeId,
    /// `None` for a broadcast.
    pub receiver: Option<NodeId>,
    pub payload: BitString,
}

impl TranscriptEntry {
    pub fn bits(&self) -> usize {
        self.payload.len()
    }
}

/// Every message of a run in delivery order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Transcript {
    entries: Vec<TranscriptEntry>,
}

#[derive(Serialize)]
struct CsvRow {
    round: usize,
    kind: RoundKind,
    sender: NodeId,
    receiver: String,
    bits: usize,
}

impl Transcript {
    pub(crate) fn push(&mut self, entry: TranscriptEntry) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn total_bits(&self) -> usize {
        self.entries.iter().map(TranscriptEntry::bits).sum()
    }

    pub fn bits_by_kind(&self) -> BTreeMap<RoundKind, usize> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry(e.kind).or_default() += e.bits();
        }
        out
    }

    pub fn bits_by_round(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry(e.round).or_default() += e.bits();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serialization cannot fail")
    }

    /// Columns `round,kind,sender,receiver,bits`; broadcasts use receiver `*`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for e in &self.entries {
            w.serialize(CsvRow {
                round: e.round,
                kind: e.kind,
                sender: e.sender,
                receiver: e.receiver.map_or_else(|| "*".to_string(), |v| v.to_string()),
                bits: e.bits(),
            })
            .expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
    }
}
