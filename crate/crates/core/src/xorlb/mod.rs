//! Numerics behind the XOR-index lower bound: the acceptance probability of a
//! two-sided decision rule, the stationary points of its optimization, the
//! resulting budget bound and a few information measures.

mod info;
mod kkt;

pub use info::{entropy, kl, mutual_information, pinsker_check, tv, Distribution};
pub use kkt::{
    grid_max_success, kkt_csv, kkt_residual_at, kkt_residuals, ordering_chain, table1_rows, table1_scan, ChainLink,
    Entry, GridMax, KktReport, KktRow, Lin, RowEval, Table1Scan,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum XorlbError {
    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange { name: &'static str, value: f64, lo: f64, hi: f64 },
    #[error("row {row} is infeasible at these posteriors")]
    InfeasibleRow { row: usize },
    #[error("distribution is invalid: {0}")]
    BadDistribution(String),
    #[error("distributions have different support sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("divergence is infinite: the second distribution misses mass of the first")]
    InfiniteDivergence,
    #[error("epsilon must be non-negative, got {0}")]
    NegativeEpsilon(f64),
    #[error("n must be at least 1")]
    EmptyInput,
}

fn in_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64, XorlbError> {
    if (lo..=hi).contains(&value) {
        Ok(value)
    } else {
        Err(XorlbError::OutOfRange { name, value, lo, hi })
    }
}

/// Acceptance probabilities of the two players: Alice accepts with
/// probability `p_a` when her guess of Bob's bit differs from her own bit and
/// `q_a` otherwise; likewise for Bob.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecisionRuleParams {
    pub p_a: f64,
    pub q_a: f64,
    pub p_b: f64,
    pub q_b: f64,
}

impl DecisionRuleParams {
    pub fn new(p_a: f64, q_a: f64, p_b: f64, q_b: f64) -> Result<Self, XorlbError> {
        Ok(Self {
            p_a: in_range("p_A", p_a, 0.0, 1.0)?,
            q_a: in_range("q_A", q_a, 0.0, 1.0)?,
            p_b: in_range("p_B", p_b, 0.0, 1.0)?,
            q_b: in_range("q_B", q_b, 0.0, 1.0)?,
        })
    }
}

/// Probability that each player's guess of the other's relevant bit is right.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Posteriors {
    pub r_a: f64,
    pub r_b: f64,
}

impl Posteriors {
    pub fn new(r_a: f64, r_b: f64) -> Result<Self, XorlbError> {
        Ok(Self { r_a: in_range("R_A", r_a, 0.5, 1.0)?, r_b: in_range("R_B", r_b, 0.5, 1.0)? })
    }
}

/// Probability that the joint verdict is correct.
pub fn success_prob(d: &DecisionRuleParams, post: &Posteriors) -> f64 {
    let (ra, rb) = (post.r_a, post.r_b);
    0.5 * (ra * (d.p_a + d.q_a) * (d.p_b - d.q_b) + rb * (d.p_a - d.q_a) * (d.p_b + d.q_b) + 1.0 - d.p_a * d.p_b
        + d.q_a * d.q_b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub successes: u64,
    pub mean: f64,
    /// Binomial standard deviation of the mean at the estimated rate.
    pub std_err: f64,
}

impl MonteCarloEstimate {
    /// Whether the mean lies within `sigmas` binomial standard deviations of `expected`.
    pub fn within(&self, expected: f64, sigmas: f64) -> bool {
        let sd = (expected * (1.0 - expected) / self.trials as f64).sqrt();
        (self.mean - expected).abs() <= sigmas * sd + 1e-12
    }
}

const SHARD: u64 = 1 << 16;

/// Samples the conditional model directly: the two relevant bits differ with
/// probability 1/2, each guess is right with its posterior probability
/// independently, and the players then apply the rule.
pub fn monte_carlo_rule(d: &DecisionRuleParams, post: &Posteriors, trials: u64, seed: u64) -> MonteCarloEstimate {
    let shards = trials.div_ceil(SHARD);
    let successes: u64 = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let count = SHARD.min(trials - s * SHARD);
            let mut ok = 0;
            for _ in 0..count {
                let x: bool = rng.gen();
                let y = x ^ rng.gen::<bool>();
                let guess_x = if rng.gen::<f64>() < post.r_a { x } else { !x };
                let guess_y = if rng.gen::<f64>() < post.r_b { y } else { !y };
                let alice = rng.gen::<f64>() < if guess_y != x { d.p_a } else { d.q_a };
                let bob = rng.gen::<f64>() < if guess_x != y { d.p_b } else { d.q_b };
                ok += u64::from((alice && bob) == (x != y));
            }
            ok
        })
        .sum();
    let mean = successes as f64 / trials.max(1) as f64;
    MonteCarloEstimate { trials, successes, mean, std_err: (mean * (1.0 - mean) / trials.max(1) as f64).sqrt() }
}

/// Smallest symmetric budget `k` with `(1/2 − √(k/n))² ≤ ε`: `⌈(1/2 − √ε)² n⌉`,
/// or 0 once `√ε ≥ 1/2`.
pub fn budget_bound(n: u64, epsilon: f64) -> Result<u64, XorlbError> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(XorlbError::NegativeEpsilon(epsilon));
    }
    if n == 0 {
        return Err(XorlbError::EmptyInput);
    }
    let gap = 0.5 - epsilon.sqrt();
    if gap <= 0.0 {
        return Ok(0);
    }
    Ok((gap * gap * n as f64 - 1e-9).ceil().max(0.0) as u64)
}
