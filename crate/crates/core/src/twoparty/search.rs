//! Exhaustive minimum-error search over deterministic one-round XOR-index
//! protocols with message budgets `k_A`, `k_B`.
//!
//! For a fixed index pair `(i, j)` the output tables used in that cell are
//! private to it, while Alice's message map for `i` is shared by the cells of
//! row `i` and Bob's map for `j` by column `j`. So the search first computes,
//! per cell and per pair of message maps, the best error over Alice's output
//! tables (Bob's best table then splits per `(y, m_A)`), and afterwards picks
//! the message maps. For a fixed choice of Alice's maps the columns are
//! independent.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use super::{fraction, TableProtocol, TwoPartyError};
use crate::bits::BitString;

/// Largest search space (after pruning) the search accepts.
pub const SEARCH_LIMIT: u128 = 100_000_000;

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub n: usize,
    pub k_a: usize,
    pub k_b: usize,
    pub min_error: Ratio<u64>,
    pub candidates: u128,
    pub witness: TableProtocol,
}

#[derive(Serialize)]
struct SearchJson<'a> {
    n: usize,
    #[serde(rename = "kA")]
    k_a: usize,
    #[serde(rename = "kB")]
    k_b: usize,
    min_error: String,
    candidates: String,
    witness: &'a TableProtocol,
}

impl SearchResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SearchJson {
            n: self.n,
            k_a: self.k_a,
            k_b: self.k_b,
            min_error: fraction(&self.min_error),
            candidates: self.candidates.to_string(),
            witness: &self.witness,
        })
        .expect("serializable")
    }
}

/// `n² · |Alice maps| · |Bob maps| · |Alice output tables per cell|`, where
/// Alice's maps are pinned to send message 0 on the all-zero input.
/// `None` on overflow.
pub fn search_space_size(n: usize, k_a: usize, k_b: usize) -> Option<u128> {
    let nx = 1u128.checked_shl(u32::try_from(n).ok()?)?;
    let ma = 1u128.checked_shl(u32::try_from(k_a).ok()?)?;
    let mb = 1u128.checked_shl(u32::try_from(k_b).ok()?)?;
    let alice = ma.checked_pow(u32::try_from(nx - 1).ok()?)?;
    let bob = mb.checked_pow(u32::try_from(nx).ok()?)?;
    let tables = 1u128.checked_shl(u32::try_from(nx.checked_mul(mb)?).ok()?)?;
    ((n * n) as u128).checked_mul(alice)?.checked_mul(bob)?.checked_mul(tables)
}

/// All maps `0..domain → 0..range`, optionally with input 0 pinned to 0.
fn all_maps(domain: usize, range: usize, pin_zero: bool) -> Vec<Vec<u32>> {
    let free = domain - usize::from(pin_zero);
    let count = range.pow(free as u32);
    (0..count)
        .map(|mut code| {
            let mut f = vec![0u32; domain];
            for slot in f.iter_mut().skip(usize::from(pin_zero)) {
                *slot = (code % range) as u32;
                code /= range;
            }
            f
        })
        .collect()
}

struct Cell {
    n: usize,
    i: usize,
    j: usize,
    ma: usize,
    mb: usize,
}

impl Cell {
    fn target(&self, x: usize, y: usize) -> bool {
        (x >> (self.j - 1) & 1) ^ (y >> (self.i - 1) & 1) == 1
    }

    /// Per `(y, m_A)`: errors if Bob rejects, errors if Bob accepts.
    fn bob_costs(&self, fa: &[u32], fb: &[u32], table: u32) -> Vec<[u32; 2]> {
        let nx = 1 << self.n;
        let mut costs = vec![[0u32; 2]; nx * self.ma];
        for y in 0..nx {
            let mb = fb[y] as usize;
            for x in 0..nx {
                let t = self.target(x, y);
                let out = table >> (x * self.mb + mb) & 1 == 1;
                let c = &mut costs[y * self.ma + fa[x] as usize];
                c[0] += u32::from(t);
                c[1] += u32::from(out != t);
            }
        }
        costs
    }

    /// Fewest errors over Alice's output tables, and the first table reaching it.
    fn best(&self, fa: &[u32], fb: &[u32]) -> (u32, u32) {
        let tables = 1u32 << ((1 << self.n) * self.mb);
        let mut best = (u32::MAX, 0);
        for table in 0..tables {
            let cost = self.bob_costs(fa, fb, table).iter().map(|c| c[0].min(c[1])).sum();
            if cost < best.0 {
                best = (cost, table);
            }
        }
        best
    }
}

pub fn bruteforce_min_error(n: usize, k_a: usize, k_b: usize) -> Result<SearchResult, TwoPartyError> {
    if n == 0 {
        return Err(TwoPartyError::BadInstance("n must be at least 1".into()));
    }
    let candidates = search_space_size(n, k_a, k_b).unwrap_or(u128::MAX);
    if candidates > SEARCH_LIMIT {
        return Err(TwoPartyError::TooLarge { needed: candidates, limit: SEARCH_LIMIT });
    }
    let (nx, ma, mb) = (1usize << n, 1usize << k_a, 1usize << k_b);
    let alice_maps = all_maps(nx, ma, true);
    let bob_maps = all_maps(nx, mb, false);
    let (na, nb) = (alice_maps.len(), bob_maps.len());
    let cell = |i, j| Cell { n, i, j, ma, mb };

    // best[((i−1)·n + j−1)·na·nb + a·nb + b] = (errors, Alice table)
    let best: Vec<(u32, u32)> = (0..n * n * na * nb)
        .into_par_iter()
        .map(|idx| {
            let (c, rest) = (idx / (na * nb), idx % (na * nb));
            cell(c / n + 1, c % n + 1).best(&alice_maps[rest / nb], &bob_maps[rest % nb])
        })
        .collect();
    let cost = |i: usize, j: usize, a: usize, b: usize| best[(((i - 1) * n + j - 1) * na + a) * nb + b].0;

    // Alice's choice is a vector of n map indices, numbered in base na.
    let choices = na.pow(n as u32);
    let decode = |code: usize| -> Vec<usize> { (0..n).map(|t| code / na.pow(t as u32) % na).collect() };
    let column = |alice: &[usize], j: usize| -> (u32, usize) {
        (0..nb)
            .map(|b| ((1..=n).map(|i| cost(i, j, alice[i - 1], b)).sum::<u32>(), b))
            .min()
            .expect("at least one Bob map")
    };
    let (total, code) = (0..choices)
        .into_par_iter()
        .map(|code| {
            let alice = decode(code);
            ((1..=n).map(|j| column(&alice, j).0).sum::<u32>(), code)
        })
        .min()
        .expect("at least one Alice choice");

    let alice = decode(code);
    let bob: Vec<usize> = (1..=n).map(|j| column(&alice, j).1).collect();
    let mut alice_out = Vec::with_capacity(n * n * nx * mb);
    let mut bob_out = Vec::with_capacity(n * n * nx * ma);
    for i in 1..=n {
        for j in 1..=n {
            let (fa, fb) = (&alice_maps[alice[i - 1]], &bob_maps[bob[j - 1]]);
            let table = best[(((i - 1) * n + j - 1) * na + alice[i - 1]) * nb + bob[j - 1]].1;
            alice_out.extend((0..nx * mb).map(|t| table >> t & 1 == 1));
            bob_out.extend(cell(i, j).bob_costs(fa, fb, table).iter().map(|c| c[1] <= c[0]));
        }
    }
    let witness = TableProtocol {
        n,
        k_a,
        k_b,
        alice_msg: alice.iter().flat_map(|&a| alice_maps[a].iter().copied()).collect(),
        bob_msg: bob.iter().flat_map(|&b| bob_maps[b].iter().copied()).collect(),
        alice_out: BitString::from_bits(alice_out),
        bob_out: BitString::from_bits(bob_out),
    };
    let tuples = (n * n * nx * nx) as u64;
    Ok(SearchResult { n, k_a, k_b, min_error: Ratio::new(u64::from(total), tuples), candidates, witness })
}
