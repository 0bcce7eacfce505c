use hybridsim::engine::{execute, BoxedProtocol, Protocol, RoundKind, Schedule, Verdict};
use hybridsim::graph::{enumerate_small_instances, random_labeled_graph, GadgetFamily, LabeledGraph};
use hybridsim::languages::{membership, LanguageId};
use hybridsim::protocols::{protocol_for, BccTomdfProtocol, Sequential, StressProtocol, TomdfProtocol};
use hybridsim::transforms::{normalize_lb, padded_graph, swap_bl_to_lb, TransformError};

fn sched(text: &str) -> Schedule {
    text.parse().unwrap()
}

fn all_graphs(max_n: usize) -> Vec<LabeledGraph> {
    enumerate_small_instances(GadgetFamily::AllGraphs, max_n).unwrap().iter().collect()
}

fn random_graphs(count: u64) -> Vec<LabeledGraph> {
    (0..count).map(|s| random_labeled_graph(1 + (s % 8) as usize, 0.2 + 0.1 * (s % 6) as f64, s)).collect()
}

fn verdict<P: Protocol + ?Sized>(p: &P, g: &LabeledGraph, s: &Schedule, seed: u64) -> Verdict {
    execute(p, g, s, seed).unwrap().verdict
}

/// Per-node verdicts of `p` on `s` and of its normalization, on every graph.
fn assert_normalization_preserves<P: Protocol + Clone + 'static>(p: P, s: &Schedule, graphs: &[LabeledGraph]) {
    let (wrapped, normalized) = normalize_lb(p.clone(), s).unwrap();
    let rounds = normalized.rounds();
    let first_b = rounds.iter().position(|&k| k == RoundKind::Bcc).unwrap_or(rounds.len());
    assert!(rounds[first_b..].iter().all(|&k| k == RoundKind::Bcc), "{normalized} is not L*B*");
    assert_eq!(normalized.count(RoundKind::Local), s.count(RoundKind::Local));
    for (k, g) in graphs.iter().enumerate() {
        let seed = k as u64;
        assert_eq!(verdict(&p, g, s, seed), verdict(&wrapped, g, &normalized, seed), "{s} on {}", g.to_json());
    }
}

#[test]
fn tomdf_normalization_is_exact_on_small_graphs() {
    assert_normalization_preserves(TomdfProtocol, &sched("B,L"), &all_graphs(5));
}

#[test]
fn sequential_tomdf_normalization_is_exact_on_small_graphs() {
    let twice = Sequential::new(BoxedProtocol::new(TomdfProtocol), 2, BoxedProtocol::new(TomdfProtocol));
    assert_normalization_preserves(twice, &sched("B,L,B,L"), &all_graphs(5));
}

#[test]
fn stress_normalization_is_exact_on_random_graphs() {
    let graphs = random_graphs(500);
    for s in ["B,L", "B,L,B,L", "B,B,L,L", "L,B,L,B,L", "B,C,B"].map(sched) {
        if s.count(RoundKind::Congest) > 0 {
            assert!(matches!(normalize_lb(StressProtocol, &s), Err(TransformError::Unsupported { round: 2, .. })));
            continue;
        }
        assert_normalization_preserves(StressProtocol, &s, &graphs);
    }
}

/// The stress protocol notices round order: running it on the swapped
/// schedule without the wrapper changes some verdicts.
#[test]
fn stress_protocol_detects_unwrapped_swaps() {
    let graphs = random_graphs(200);
    let differs = graphs
        .iter()
        .filter(|g| verdict(&StressProtocol, g, &sched("B,L"), 0) != verdict(&StressProtocol, g, &sched("L,B"), 0))
        .count();
    assert!(differs > 20, "{differs}");
    let accepts = graphs.iter().filter(|g| verdict(&StressProtocol, g, &sched("B,L"), 0).accepted()).count();
    assert!(accepts > 0 && accepts < graphs.len());
}

#[test]
fn single_swaps() {
    let s = sched("B,L,B,L");
    for t in [1, 3] {
        let (w, out) = swap_bl_to_lb(StressProtocol, &s, t).unwrap();
        assert_eq!(w.swaps, vec![t]);
        assert_eq!(out.rounds()[t - 1], RoundKind::Local);
        for g in random_graphs(60) {
            assert_eq!(verdict(&StressProtocol, &g, &s, 4), verdict(&w, &g, &out, 4));
        }
    }
    assert_eq!(swap_bl_to_lb(StressProtocol, &s, 2).err(), Some(TransformError::NotBl { t: 2 }));
    assert_eq!(swap_bl_to_lb(StressProtocol, &s, 4).err(), Some(TransformError::NotBl { t: 4 }));
    assert_eq!(swap_bl_to_lb(StressProtocol, &s, 0).err(), Some(TransformError::NotBl { t: 0 }));
    let (w, out) = normalize_lb(StressProtocol, &sched("L,L,B")).unwrap();
    assert!(w.swaps.is_empty());
    assert_eq!(out, sched("L,L,B"));
    let (w, out) = normalize_lb(StressProtocol, &s).unwrap();
    assert_eq!(w.swaps, vec![3, 1, 2]);
    assert_eq!(out.to_string(), "L,L,B,B");
}

#[test]
fn padding_equalizes_degrees_without_new_triangles() {
    for g in all_graphs(5) {
        let padded = padded_graph(&g).unwrap();
        let delta = g.max_degree();
        assert!(g.nodes().all(|v| padded.degree(v) == delta));
        assert_eq!(padded.max_degree(), delta);
        assert_eq!(
            membership(LanguageId::Tomdf, &padded),
            membership(LanguageId::TriangleFreeness, &g),
            "{}",
            g.to_json()
        );
    }
}

#[test]
fn bcc_triangle_reduction_is_exact_on_small_graphs() {
    let p = protocol_for(LanguageId::TriangleFreeness).unwrap();
    assert!(p.schedule.rounds().iter().all(|&k| k == RoundKind::Bcc));
    let mut triangle_free = 0;
    let graphs = all_graphs(5);
    for g in &graphs {
        let (v, _) = p.run(g, 2).unwrap();
        assert_eq!(v.accepted(), membership(LanguageId::TriangleFreeness, g), "{}", g.to_json());
        triangle_free += usize::from(v.accepted());
    }
    assert!(triangle_free > 0 && triangle_free < graphs.len());
}

#[test]
fn bcc_tomdf_rejects_above_its_degree_bound() {
    let p = BccTomdfProtocol::new(2);
    let s = Schedule::repeat(RoundKind::Bcc, p.rounds());
    for g in all_graphs(4) {
        let v = verdict(&p, &g, &s, 0);
        if g.max_degree() > 2 {
            assert!(!v.accepted());
        } else {
            assert_eq!(v.accepted(), membership(LanguageId::Tomdf, &g));
        }
    }
}
