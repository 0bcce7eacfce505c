use std::collections::BTreeSet;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hybridsim::bits::BitString;
use hybridsim::graph::{build_gadget, GadgetSpec, LabeledGraph, NodeId};
use hybridsim::languages::LanguageId;
use hybridsim::pointer::{pointer_chase, pointer_chase_bit, PointerMap};
use hybridsim::protocols::protocol_for;
use hybridsim::twoparty::{
    bruteforce_min_error, cut_communication, eval_protocol_error, pointer_chasing_protocol, trivial_xor_index_protocol,
    CutConfig, TwoPartyError,
};

/// Minimum error over every pair of output tables, Alice's indexed by
/// `(x, j)` and Bob's by `(y, i)`, for zero-bit messages at `n = 2`.
fn zero_message_oracle() -> Ratio<u64> {
    let bit = |v: usize, t: usize| v >> t & 1;
    let mut best = u64::MAX;
    for alice in 0u32..256 {
        for bob in 0u32..256 {
            let mut wrong = 0;
            for x in 0..4 {
                for y in 0..4 {
                    for i in 0..2 {
                        for j in 0..2 {
                            let a = alice >> (x * 2 + j) & 1;
                            let b = bob >> (y * 2 + i) & 1;
                            let target = bit(x, j) ^ bit(y, i);
                            wrong += u64::from((a & b) as usize != target);
                        }
                    }
                }
            }
            best = best.min(wrong);
        }
    }
    Ratio::new(best, 64)
}

#[test]
fn brute_force_matches_exhaustive_table_oracle() {
    let oracle = zero_message_oracle();
    let search = bruteforce_min_error(2, 0, 0).unwrap();
    assert_eq!(search.min_error, oracle);
    assert!(oracle > Ratio::from_integer(0));
    assert_eq!(eval_protocol_error(&search.witness, 2).unwrap(), oracle);
}

#[test]
fn brute_force_small_values() {
    assert_eq!(bruteforce_min_error(1, 0, 0).unwrap().min_error, Ratio::new(1, 4));
    assert_eq!(bruteforce_min_error(1, 1, 1).unwrap().min_error, Ratio::from_integer(0));
    assert_eq!(bruteforce_min_error(1, 1, 0).unwrap().min_error, Ratio::from_integer(0));
}

#[test]
fn more_message_bits_never_hurt() {
    let err = |ka, kb| bruteforce_min_error(2, ka, kb).unwrap().min_error;
    let grid = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (2, 1)].map(|(a, b)| ((a, b), err(a, b)));
    for &((a1, b1), e1) in &grid {
        for &((a2, b2), e2) in &grid {
            if a1 <= a2 && b1 <= b2 {
                assert!(e2 <= e1, "({a2},{b2}) = {e2} exceeds ({a1},{b1}) = {e1}");
            }
        }
    }
    for ((a, b), e) in grid {
        let witness = bruteforce_min_error(2, a, b).unwrap().witness;
        assert_eq!(eval_protocol_error(&witness, 2).unwrap(), e);
    }
}

#[test]
fn brute_force_refuses_huge_spaces() {
    assert!(matches!(bruteforce_min_error(3, 1, 1), Err(TwoPartyError::TooLarge { .. })));
    assert!(matches!(bruteforce_min_error(0, 0, 0), Err(TwoPartyError::BadInstance(_))));
}

#[test]
fn trivial_protocol_is_exact() {
    for n in 1..=4 {
        assert_eq!(eval_protocol_error(&trivial_xor_index_protocol(n), n).unwrap(), Ratio::from_integer(0));
    }
}

/// All alternating pairs on `{0,1,2,3}`.
fn alternating_pairs() -> Vec<(PointerMap, PointerMap)> {
    let mut out = Vec::new();
    for partner in 1..4 {
        let dom: Vec<usize> = vec![0, partner];
        let rest: Vec<usize> = (1..4).filter(|&v| v != partner).collect();
        for f in 0..4 {
            for s in 0..4 {
                let first = PointerMap::new(4, dom.iter().enumerate().map(|(t, &d)| (d, rest[f >> t & 1]))).unwrap();
                let second = PointerMap::new(4, rest.iter().enumerate().map(|(t, &d)| (d, dom[s >> t & 1]))).unwrap();
                out.push((first, second));
            }
        }
    }
    out
}

#[test]
fn pointer_chasing_follows_the_composed_map() {
    let pairs = alternating_pairs();
    assert_eq!(pairs.len(), 48);
    for k in 1..=3 {
        for (first, second) in &pairs {
            let run = pointer_chasing_protocol(k).run(first, second).unwrap();
            assert_eq!(run.transcript.len(), k);
            assert_eq!(*run.transcript.last().unwrap(), pointer_chase(first, second, k).unwrap());
            assert_eq!(run.output, pointer_chase_bit(first, second, k).unwrap());
            assert_eq!(run.bits, 2 * k);
        }
    }
}

fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> BitString {
    (0..len).map(|_| rng.gen()).collect()
}

fn range(a: usize, b: usize) -> BTreeSet<NodeId> {
    (a as NodeId..=b as NodeId).collect()
}

fn split(g: &LabeledGraph, alice: BTreeSet<NodeId>, accounted: BTreeSet<NodeId>) -> CutConfig {
    let bob = g.nodes().filter(|v| !alice.contains(v)).collect();
    CutConfig { alice, bob, accounted }
}

/// XOR-index path: Alice holds `a_1..a_n` and the centre; only the seven
/// nodes whose views depend on the inputs are metered.
#[test]
fn xor_path_cut_grows_logarithmically() {
    let p = protocol_for(LanguageId::XorIndexPath).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in [8usize, 16, 32] {
        let mut worst = 0;
        for trial in 0..40 {
            let spec = GadgetSpec::XorIndexPath {
                x: random_bits(&mut rng, n),
                y: random_bits(&mut rng, n),
                start_index: rng.gen_range(1..=n as u32),
                end_index: rng.gen_range(1..=n as u32),
            };
            let g = build_gadget(&spec).unwrap();
            let accounted = [1, 2, n, n + 1, n + 2, 2 * n, 2 * n + 1].map(|v| v as NodeId).into();
            let report = cut_communication(&p, &g, &split(&g, range(1, n + 1), accounted), trial).unwrap();
            assert!(report.total() <= report.transcript_bits);
            worst = worst.max(report.total());
        }
        let bandwidth = p.schedule.budget(2 * n + 1);
        assert!(worst as f64 <= 32.0 * (n as f64).log2(), "n={n}: {worst} bits");
        assert!(worst <= 8 * bandwidth, "n={n}: {worst} bits, bandwidth {bandwidth}");
        assert!(worst > 0);
    }
}

/// Clique bridge with `k = 1`: Alice holds the first clique and the first
/// half of the connecting path; every node is metered.
#[test]
fn clique_bridge_cut_is_linear_in_clique_size() {
    let p = protocol_for(LanguageId::OneMarkedEdge).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let k = 1;
    for n in [4usize, 6, 8] {
        let m = n * (n - 1) / 2;
        let bandwidth = p.schedule.budget(2 * n + 4 * k);
        for trial in 0..40 {
            let spec = GadgetSpec::CliqueBridge {
                n,
                x: random_bits(&mut rng, m),
                y: random_bits(&mut rng, m),
                a_mark: rng.gen_range(1..=m as u32),
                b_mark: rng.gen_range(1..=m as u32),
                k,
            };
            let g = build_gadget(&spec).unwrap();
            let alice: BTreeSet<NodeId> = range(1, n).union(&range(2 * n + 1, 2 * n + 2 * k)).copied().collect();
            let report = cut_communication(&p, &g, &split(&g, alice, g.nodes().collect()), trial).unwrap();
            assert!(report.total() <= 2 * (n + 2 * k) * bandwidth, "n={n}: {} bits", report.total());
            assert!(report.total() > 0);
        }
    }
}
