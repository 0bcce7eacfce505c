//! Seeded random graphs and the `family:n:key=value,...` generator syntax.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_gadget, GadgetSpec, GraphError, Label, LabeledGraph, NodeId};
use crate::bits::BitString;
use crate::pointer::PointerMap;

/// `G(n, p)` on IDs `1..=n` with random labels: blank, a short bit string, an
/// index, or a pair, each with equal probability.
pub fn random_labeled_graph(n: usize, edge_prob: f64, seed: u64) -> LabeledGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<(NodeId, Label)> = (1..=n as NodeId)
        .map(|v| {
            let bits = |rng: &mut ChaCha8Rng| -> BitString {
                let len = rng.gen_range(0..=4);
                (0..len).map(|_| rng.gen()).collect()
            };
            let label = match rng.gen_range(0..4) {
                0 => Label::Blank,
                1 => Label::Bits(bits(&mut rng)),
                2 => Label::Index(rng.gen_range(1..=n.max(1) as u32)),
                _ => Label::Pair(Some(bits(&mut rng)), Some(rng.gen_range(1..=n.max(1) as u32))),
            };
            (v, label)
        })
        .collect();
    let mut edges = Vec::new();
    for u in 1..=n as NodeId {
        for v in u + 1..=n as NodeId {
            if rng.gen_bool(edge_prob.clamp(0.0, 1.0)) {
                edges.push((u, v));
            }
        }
    }
    LabeledGraph::new(labels, edges).expect("ids 1..=n are valid")
}

fn bad(msg: impl Into<String>) -> GraphError {
    GraphError::Gadget(msg.into())
}

struct Params(BTreeMap<String, String>);

impl Params {
    fn parse(text: &str) -> Result<Self, GraphError> {
        let mut map = BTreeMap::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| bad(format!("expected key=value, got {part:?}")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self(map))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn req(&self, key: &str) -> Result<&str, GraphError> {
        self.raw(key).ok_or_else(|| bad(format!("missing parameter {key}")))
    }

    fn bits(&self, key: &str) -> Result<BitString, GraphError> {
        self.req(key)?.parse().map_err(|e| bad(format!("{key}: {e}")))
    }

    fn opt_bits(&self, key: &str) -> Result<Option<BitString>, GraphError> {
        self.raw(key).map(|s| s.parse().map_err(|e| bad(format!("{key}: {e}")))).transpose()
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<T, GraphError> {
        self.req(key)?.parse().map_err(|_| bad(format!("{key}: not a number")))
    }

    fn num_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, GraphError> {
        match self.raw(key) {
            None => Ok(default),
            Some(_) => self.num(key),
        }
    }

    /// `/`-separated bit strings.
    fn rows(&self, key: &str) -> Result<Vec<BitString>, GraphError> {
        self.req(key)?.split('/').map(|r| r.parse().map_err(|e| bad(format!("{key}: {e}")))).collect()
    }

    /// `/`-separated `from>to` entries.
    fn map(&self, key: &str, n: usize) -> Result<PointerMap, GraphError> {
        let entries = self
            .req(key)?
            .split('/')
            .map(|e| {
                let (a, b) = e.split_once('>').ok_or_else(|| bad(format!("{key}: expected from>to")))?;
                Ok((a.parse().map_err(|_| bad("bad map entry"))?, b.parse().map_err(|_| bad("bad map entry"))?))
            })
            .collect::<Result<Vec<(usize, usize)>, GraphError>>()?;
        PointerMap::new(n, entries).ok_or_else(|| bad(format!("{key}: entries must lie in 0..{n}")))
    }

    /// `/`-separated `bit.index` leaves.
    fn leaves(&self, key: &str) -> Result<Vec<(bool, u32)>, GraphError> {
        self.req(key)?
            .split('/')
            .map(|e| match e.split_once('.') {
                Some(("0", i)) => i.parse().map(|i| (false, i)).map_err(|_| bad("bad leaf index")),
                Some(("1", i)) => i.parse().map(|i| (true, i)).map_err(|_| bad("bad leaf index")),
                _ => Err(bad(format!("{key}: expected bit.index, got {e:?}"))),
            })
            .collect()
    }
}

/// Builds a graph from `family:n:key=value,...`. Families and keys:
///
/// * `path|cycle|clique:n[:marks=BITS]`
/// * `random:n:p=P,seed=S`
/// * `xor-index-path:n:x=BITS,y=BITS,i=I,j=J`
/// * `clique-bridge:n:x=BITS,y=BITS,a=A,b=B[,k=K]`
/// * `disj-on-clique:n:rows=R1/R2/...`
/// * `disj-on-edge|disj-on-path:n:x=BITS,y=BITS`
/// * `k-pclp:n:first=F>T/...,second=F>T/...`
/// * `disj-edge-star:n:a=BIT.IDX/...,b=BIT.IDX/...`
/// * `special-disjointness:n:x=BITS,y=BITS,b=0|1`
/// * `disj-4partite:n:x=R1/R2/...,y=R1/R2/...`
pub fn parse_generator(text: &str) -> Result<LabeledGraph, GraphError> {
    let mut parts = text.splitn(3, ':');
    let family = parts.next().unwrap_or("").trim().to_ascii_lowercase();
    let n: usize = parts
        .next()
        .ok_or_else(|| bad(format!("expected family:n[:params] in {text:?}")))?
        .trim()
        .parse()
        .map_err(|_| bad(format!("size in {text:?} is not a number")))?;
    let p = Params::parse(parts.next().unwrap_or(""))?;
    let check_len = |what: &str, len: usize| {
        if len == n {
            Ok(())
        } else {
            Err(bad(format!("{what} has length {len}, expected {n}")))
        }
    };
    let spec = match family.as_str() {
        "random" => return Ok(random_labeled_graph(n, p.num_or("p", 0.5)?, p.num_or("seed", 0)?)),
        "path" => GadgetSpec::Path { n, marks: p.opt_bits("marks")? },
        "cycle" => GadgetSpec::Cycle { n, marks: p.opt_bits("marks")? },
        "clique" => GadgetSpec::Clique { n, marks: p.opt_bits("marks")? },
        "xor-index-path" => {
            let (x, y) = (p.bits("x")?, p.bits("y")?);
            check_len("x", x.len())?;
            GadgetSpec::XorIndexPath { x, y, start_index: p.num("i")?, end_index: p.num("j")? }
        }
        "clique-bridge" => GadgetSpec::CliqueBridge {
            n,
            x: p.bits("x")?,
            y: p.bits("y")?,
            a_mark: p.num("a")?,
            b_mark: p.num("b")?,
            k: p.num_or("k", 1)?,
        },
        "disj-on-clique" => {
            let rows = p.rows("rows")?;
            check_len("rows", rows.len())?;
            GadgetSpec::DisjOnClique { rows }
        }
        "disj-on-edge" | "disj-on-path" => {
            let (x, y) = (p.bits("x")?, p.bits("y")?);
            check_len("x", x.len())?;
            if family == "disj-on-edge" {
                GadgetSpec::DisjOnEdge { x, y }
            } else {
                GadgetSpec::DisjOnPath { x, y }
            }
        }
        "k-pclp" => GadgetSpec::KPclp { first: p.map("first", n)?, second: p.map("second", n)? },
        "disj-edge-star" => GadgetSpec::DisjEdgeStar { a_leaves: p.leaves("a")?, b_leaves: p.leaves("b")? },
        "special-disjointness" => {
            let (x, y) = (p.bits("x")?, p.bits("y")?);
            check_len("x", x.len())?;
            GadgetSpec::SpecialDisjointness { x, y, b: p.num::<u8>("b")? == 1 }
        }
        "disj-4partite" => {
            let (x, y) = (p.rows("x")?, p.rows("y")?);
            check_len("x", x.len())?;
            GadgetSpec::FourPartite { x, y }
        }
        other => return Err(bad(format!("unknown generator family {other:?}"))),
    };
    build_gadget(&spec)
}
