//! Exhaustive protocol-versus-oracle sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::EngineError;
use crate::graph::{enumerate_small_instances, GadgetFamily, GraphError};
use crate::languages::{membership, LanguageId};
use crate::protocols::{protocol_for, NamedProtocol};

/// One sweep: a protocol checked against its oracle on every instance of a
/// family up to `max_size`.
#[derive(Clone)]
pub struct SweepTarget {
    pub protocol: NamedProtocol,
    pub family: GadgetFamily,
    pub max_size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub protocol: String,
    pub family: String,
    pub max_size: usize,
    pub checked: usize,
    pub members: usize,
    pub mismatches: usize,
    pub engine_errors: usize,
    /// JSON of the first disagreeing instance, if any.
    pub first_failure: Option<String>,
    pub first_error: Option<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.engine_errors == 0
    }
}

enum Outcome {
    Agree(bool),
    Mismatch,
    Error(EngineError),
}

pub fn sweep(target: &SweepTarget, seed: u64) -> Result<SweepReport, GraphError> {
    let space = enumerate_small_instances(target.family, target.max_size)?;
    let lang = target.protocol.language;
    let results: Vec<(usize, Outcome)> = (0..space.len())
        .into_par_iter()
        .map(|k| {
            let g = space.get(k).expect("index in range");
            let outcome = match target.protocol.run(&g, seed) {
                Ok((verdict, _)) => {
                    let truth = membership(lang, &g);
                    if verdict.accepted() == truth {
                        Outcome::Agree(truth)
                    } else {
                        Outcome::Mismatch
                    }
                }
                Err(e) => Outcome::Error(e),
            };
            (k, outcome)
        })
        .collect();
    let mut report = SweepReport {
        protocol: target.protocol.name(),
        family: target.family.to_string(),
        max_size: target.max_size,
        checked: results.len(),
        members: 0,
        mismatches: 0,
        engine_errors: 0,
        first_failure: None,
        first_error: None,
    };
    for (k, outcome) in results {
        match outcome {
            Outcome::Agree(member) => report.members += usize::from(member),
            Outcome::Mismatch => report.mismatches += 1,
            Outcome::Error(ref e) => {
                report.engine_errors += 1;
                report.first_error.get_or_insert_with(|| e.to_string());
            }
        }
        if !matches!(outcome, Outcome::Agree(_)) && report.first_failure.is_none() {
            report.first_failure = space.get(k).map(|g| g.to_json());
        }
    }
    Ok(report)
}

/// Families and default sizes for each registered protocol.
pub fn standard_targets() -> Vec<SweepTarget> {
    use GadgetFamily as F;
    use LanguageId::*;
    let plan: Vec<(LanguageId, Vec<(F, usize)>)> = vec![
        (OneMarkedEdge, vec![(F::MarkedPath, 6), (F::MarkedCycle, 6), (F::MarkedClique, 6), (F::CliqueBridge, 3)]),
        (XorIndexPath, vec![(F::XorIndexPath, 3)]),
        (Tomdf, vec![(F::AllGraphs, 5)]),
        (TriangleFreeness, vec![(F::AllGraphs, 5)]),
        (DisjOnClique, vec![(F::DisjOnClique, 3)]),
        (DisjOnEdge, vec![(F::DisjOnEdge, 3)]),
        (DisjOnPath, vec![(F::DisjOnPath, 3)]),
        (KPclp { k: 1 }, vec![(F::KPclp, 4)]),
        (KPclp { k: 2 }, vec![(F::KPclp, 4)]),
        (KPclp { k: 3 }, vec![(F::KPclp, 4)]),
        (DisjEdgeStar, vec![(F::DisjEdgeStar, 3)]),
        (SpecialDisjointness, vec![(F::SpecialDisjointness, 3)]),
        (FourPartite, vec![(F::FourPartite, 3)]),
    ];
    plan.into_iter()
        .flat_map(|(lang, fams)| {
            let p = protocol_for(lang).expect("registered");
            fams.into_iter().map(move |(family, max_size)| SweepTarget { protocol: p.clone(), family, max_size })
        })
        .collect()
}

/// Standard targets with every size replaced by `max_n` and, optionally, only
/// the protocol named `only`.
pub fn targets(max_n: Option<usize>, only: Option<LanguageId>) -> Vec<SweepTarget> {
    let mut picked: Vec<SweepTarget> =
        standard_targets().into_iter().filter(|t| only.is_none_or(|l| t.protocol.language == l)).collect();
    if let (true, Some(p)) = (picked.is_empty(), only.and_then(protocol_for)) {
        picked.push(SweepTarget { family: p.family, protocol: p, max_size: 3 });
    }
    for t in &mut picked {
        if let Some(m) = max_n {
            t.max_size = m;
        }
    }
    picked
}
