//! Special disjointness. LOCAL round: every node tells its neighbors its role,
//! its degree and its input (pendants send their vector, `v4` its bit). Every
//! node then checks the degree pattern of its neighborhood, which pins down
//! the whole gadget. CONGEST round: `v1` sends `DISJ(x, y)` and `v3` relays
//! `b` to `v2`, which accepts iff the two bits agree.

use serde::{Deserialize, Serialize};

use crate::bits::{width_for, BitReader, BitString, BitWriter};
use crate::engine::{Inbox, NodeView, Outbox, Protocol, RoundCtx};
use crate::graph::{Label, NodeId};
use crate::languages::disjoint;

#[derive(Clone, Copy, Debug)]
pub struct SpecialDisjointnessProtocol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum Role {
    Clique,
    Path(u8),
    Pendant,
    Invalid,
}

impl Role {
    fn of(label: &Label) -> Role {
        match label {
            Label::Pair(None, None) => Role::Clique,
            Label::Pair(None, Some(r @ 1..=3)) => Role::Path(*r as u8),
            Label::Pair(Some(b), Some(4)) if b.len() == 1 => Role::Path(4),
            Label::Pair(Some(_), None) => Role::Pendant,
            _ => Role::Invalid,
        }
    }

    fn tag(self) -> u64 {
        match self {
            Role::Clique => 0,
            Role::Path(r) => u64::from(r),
            Role::Pendant => 5,
            Role::Invalid => 6,
        }
    }

    fn from_tag(t: u64) -> Role {
        match t {
            0 => Role::Clique,
            1..=4 => Role::Path(t as u8),
            5 => Role::Pendant,
            _ => Role::Invalid,
        }
    }
}

#[derive(Clone, Serialize, Deserialize)]
pub struct State {
    view: NodeView,
    ok: bool,
    /// `v1`: disjointness of the pendant vectors. `v3`: the bit held by `v4`.
    relay: Option<(NodeId, bool)>,
    /// `v2`: bits received in the CONGEST round.
    compared: Vec<bool>,
}

#[derive(Clone)]
struct Report {
    from: NodeId,
    role: Role,
    degree: usize,
    payload: BitString,
}

fn clique_size(n: usize) -> Option<usize> {
    n.checked_sub(6).filter(|&c| c >= 1)
}

impl Protocol for SpecialDisjointnessProtocol {
    type State = State;

    fn init(&self, view: &NodeView) -> State {
        let ok = clique_size(view.n).is_some() && Role::of(&view.label) != Role::Invalid;
        State { view: view.clone(), ok, relay: None, compared: Vec::new() }
    }

    fn send(&self, s: &State, ctx: RoundCtx) -> Outbox {
        match ctx.round {
            1 => {
                let mut w = BitWriter::new();
                w.uint(Role::of(&s.view.label).tag(), 3);
                w.uint(s.view.neighbors.len() as u64, width_for(s.view.n as u64));
                if let Label::Pair(Some(payload), _) = &s.view.label {
                    w.bits(payload);
                }
                Outbox::to_each(&s.view.neighbors, &w.finish())
            }
            2 => match s.relay {
                Some((to, bit)) if s.ok => Outbox::to_each(&[to], &BitString::from_bits(vec![bit])),
                _ => Outbox::Silent,
            },
            _ => Outbox::Silent,
        }
    }

    fn receive(&self, s: &mut State, ctx: RoundCtx, inbox: &Inbox) {
        match ctx.round {
            1 if s.ok => s.ok = self.check_neighborhood(s, inbox),
            2 => s.compared = inbox.iter().filter_map(|m| m.payload.get(0)).collect(),
            _ => {}
        }
    }

    fn decide(&self, s: &State) -> bool {
        let input_ok =
            Role::of(&s.view.label) != Role::Path(2) || (s.compared.len() == 2 && s.compared[0] == s.compared[1]);
        s.ok && input_ok
    }

    crate::json_state_codec!();
}

impl SpecialDisjointnessProtocol {
    fn check_neighborhood(&self, s: &mut State, inbox: &Inbox) -> bool {
        let n = s.view.n;
        let Some(size) = clique_size(n) else { return false };
        let mut reports = Vec::new();
        for m in inbox.iter() {
            let mut r = BitReader::new(&m.payload);
            let (Some(tag), Some(degree)) = (r.uint(3), r.uint(width_for(n as u64))) else { return false };
            let payload = r.take(r.remaining()).unwrap_or_default();
            reports.push(Report { from: m.from, role: Role::from_tag(tag), degree: degree as usize, payload });
        }
        if reports.len() != s.view.neighbors.len() {
            return false;
        }
        let with = |role: Role| reports.iter().filter(|r| r.role == role).cloned().collect::<Vec<_>>();
        let count = |role: Role| reports.iter().filter(|r| r.role == role).count();
        let degree = reports.len();
        match Role::of(&s.view.label) {
            Role::Clique => {
                let cliques = with(Role::Clique);
                let anchors = count(Role::Path(4));
                let big = cliques.iter().filter(|r| r.degree == size).count();
                cliques.len() == size - 1
                    && anchors + cliques.len() == degree
                    && (anchors == 1 || (anchors == 0 && big == 1))
            }
            Role::Path(1) => {
                let pendants = with(Role::Pendant);
                let vectors_ok = pendants.iter().all(|p| p.degree == 1 && p.payload.len() == size);
                if degree != 3 || count(Role::Path(2)) != 1 || pendants.len() != 2 || !vectors_ok {
                    return false;
                }
                let v2 = with(Role::Path(2))[0].from;
                s.relay = Some((v2, disjoint(&pendants[0].payload, &pendants[1].payload)));
                true
            }
            Role::Path(2) => degree == 2 && count(Role::Path(1)) == 1 && count(Role::Path(3)) == 1,
            Role::Path(3) => {
                let v4 = with(Role::Path(4));
                if degree != 2 || count(Role::Path(2)) != 1 || v4.len() != 1 {
                    return false;
                }
                let v2 = with(Role::Path(2))[0].from;
                match v4[0].payload.get(0) {
                    Some(b) if v4[0].payload.len() == 1 => {
                        s.relay = Some((v2, b));
                        true
                    }
                    _ => false,
                }
            }
            Role::Path(4) => degree == 2 && count(Role::Path(3)) == 1 && count(Role::Clique) == 1,
            Role::Pendant => {
                let own_ok = matches!(&s.view.label, Label::Pair(Some(x), None) if x.len() == size);
                own_ok && degree == 1 && count(Role::Path(1)) == 1
            }
            _ => false,
        }
    }
}
