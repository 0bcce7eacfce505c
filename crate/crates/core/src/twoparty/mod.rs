//! Two-party problems, exact error evaluation of one-round protocols, the
//! exhaustive minimum-error search and cut metering of distributed runs.

mod cut;
mod search;

pub use cut::{cut_communication, CutConfig, CutError, CutReport, RoundCut};
pub use search::{bruteforce_min_error, search_space_size, SearchResult, SEARCH_LIMIT};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{ceil_log2, BitReader, BitString, BitWriter};
use crate::languages::disjoint;
use crate::pointer::{pointer_chase, validate_alternating, PointerError, PointerMap};

/// Largest number of (input tuple × tape value) evaluations `eval_protocol_error` will do.
pub const EVAL_LIMIT: u128 = 100_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TwoPartyError {
    #[error("input shapes do not match the problem: {0}")]
    BadInstance(String),
    #[error(transparent)]
    Pointer(#[from] PointerError),
    #[error("protocol is for n = {protocol}, evaluation asked for n = {asked}")]
    SizeMismatch { protocol: usize, asked: usize },
    #[error("{party} sent {len} bits, budget is {budget}")]
    MessageTooLong { party: &'static str, len: usize, budget: usize },
    #[error("exhaustion needs {needed} evaluations, limit is {limit}")]
    TooLarge { needed: u128, limit: u128 },
}

/// XOR-index input: Alice holds `(x, i)`, Bob holds `(y, j)`; indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XorIndexInstance {
    pub x: BitString,
    pub i: usize,
    pub y: BitString,
    pub j: usize,
}

impl XorIndexInstance {
    pub fn new(x: BitString, i: usize, y: BitString, j: usize) -> Result<Self, TwoPartyError> {
        let n = x.len();
        if n == 0 || y.len() != n || !(1..=n).contains(&i) || !(1..=n).contains(&j) {
            return Err(TwoPartyError::BadInstance(format!("need |x| = |y| = n >= 1 and i, j in 1..=n (n = {n})")));
        }
        Ok(Self { x, i, y, j })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }
}

/// `x_j ⊕ y_i`.
pub fn xor_index_value(inst: &XorIndexInstance) -> bool {
    inst.x.bits()[inst.j - 1] ^ inst.y.bits()[inst.i - 1]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwoPartyInstance {
    XorIndex(XorIndexInstance),
    Disj {
        x: BitString,
        y: BitString,
    },
    /// Alice holds `first` (its domain contains 0), Bob holds `second`.
    PointerChasing {
        first: PointerMap,
        second: PointerMap,
        k: usize,
    },
}

impl TwoPartyInstance {
    pub fn problem(&self) -> String {
        match self {
            Self::XorIndex(inst) => format!("xor-index({})", inst.n()),
            Self::Disj { x, .. } => format!("disj({})", x.len()),
            Self::PointerChasing { first, k, .. } => format!("pointer-chasing({},{k})", first.n()),
        }
    }

    /// The bit the players must compute.
    pub fn value(&self) -> Result<bool, TwoPartyError> {
        match self {
            Self::XorIndex(inst) => {
                XorIndexInstance::new(inst.x.clone(), inst.i, inst.y.clone(), inst.j)?;
                Ok(xor_index_value(inst))
            }
            Self::Disj { x, y } => {
                if x.len() != y.len() {
                    return Err(TwoPartyError::BadInstance("|x| != |y|".into()));
                }
                Ok(disjoint(x, y))
            }
            Self::PointerChasing { first, second, k } => Ok(pointer_chase(first, second, *k)?.count_ones() % 2 == 1),
        }
    }
}

/// A simultaneous one-round protocol for XOR-index on `n`-bit inputs. The
/// shared random string is one of `tape_size()` equally likely values. Each
/// player learns the other's index at no cost, so budgets meter only the
/// message payload.
pub trait OneRoundProtocol: Send + Sync {
    fn n(&self) -> usize;
    fn alice_budget(&self) -> usize;
    fn bob_budget(&self) -> usize;
    fn tape_size(&self) -> u64 {
        1
    }
    fn alice_msg(&self, x: &BitString, i: usize, r: u64) -> BitString;
    fn bob_msg(&self, y: &BitString, j: usize, r: u64) -> BitString;
    fn alice_out(&self, x: &BitString, i: usize, bob_msg: &BitString, j: usize) -> bool;
    fn bob_out(&self, y: &BitString, j: usize, alice_msg: &BitString, i: usize) -> bool;
}

/// Inputs are numbered by the integer whose bit `t` is the `(t+1)`-th input bit.
pub(crate) fn input_from_code(code: usize, n: usize) -> BitString {
    (0..n).map(|t| code >> t & 1 == 1).collect()
}

pub(crate) fn input_code(x: &BitString) -> usize {
    x.bits().iter().enumerate().map(|(t, &b)| usize::from(b) << t).sum()
}

/// Exact error of `p` under uniform `(x, i, y, j)` and a uniform shared tape.
pub fn eval_protocol_error<P: OneRoundProtocol + ?Sized>(p: &P, n: usize) -> Result<Ratio<u64>, TwoPartyError> {
    if p.n() != n || n == 0 || n > 24 {
        return Err(TwoPartyError::SizeMismatch { protocol: p.n(), asked: n });
    }
    let tapes = p.tape_size().max(1);
    let tuples = (1u128 << (2 * n)) * (n * n) as u128;
    let needed = tuples * u128::from(tapes);
    if needed > EVAL_LIMIT {
        return Err(TwoPartyError::TooLarge { needed, limit: EVAL_LIMIT });
    }
    let inputs: Vec<BitString> = (0..1usize << n).map(|c| input_from_code(c, n)).collect();
    let check = |party, m: &BitString, budget| {
        if m.len() > budget {
            Err(TwoPartyError::MessageTooLong { party, len: m.len(), budget })
        } else {
            Ok(())
        }
    };
    let errors: u64 = (0..tapes)
        .into_par_iter()
        .map(|r| -> Result<u64, TwoPartyError> {
            let mut alice = Vec::with_capacity(inputs.len() * n);
            let mut bob = Vec::with_capacity(inputs.len() * n);
            for x in &inputs {
                for i in 1..=n {
                    let m = p.alice_msg(x, i, r);
                    check("alice", &m, p.alice_budget())?;
                    alice.push(m);
                    let m = p.bob_msg(x, i, r);
                    check("bob", &m, p.bob_budget())?;
                    bob.push(m);
                }
            }
            let mut wrong = 0;
            for (xc, x) in inputs.iter().enumerate() {
                for i in 1..=n {
                    let ma = &alice[xc * n + i - 1];
                    for (yc, y) in inputs.iter().enumerate() {
                        for j in 1..=n {
                            let mb = &bob[yc * n + j - 1];
                            let out = p.alice_out(x, i, mb, j) && p.bob_out(y, j, ma, i);
                            let truth = x.bits()[j - 1] ^ y.bits()[i - 1];
                            wrong += u64::from(out != truth);
                        }
                    }
                }
            }
            Ok(wrong)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();
    Ok(Ratio::new(errors, tuples as u64 * tapes))
}

/// Renders a ratio as `p/q`, keeping the denominator even when it is 1.
pub fn fraction(r: &Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Each player sends its whole input and index; both then know `x_j ⊕ y_i`
/// and accept iff it is 1.
#[derive(Clone, Copy, Debug)]
pub struct TrivialProtocol {
    pub n: usize,
}

impl TrivialProtocol {
    fn index_width(&self) -> usize {
        ceil_log2(self.n as u64)
    }

    fn pack(&self, v: &BitString, idx: usize) -> BitString {
        let mut w = BitWriter::new();
        w.bits(v).uint((idx - 1) as u64, self.index_width());
        w.finish()
    }

    fn unpack(&self, m: &BitString) -> Option<(BitString, usize)> {
        let mut r = BitReader::new(m);
        let v = r.take(self.n)?;
        let idx = r.uint(self.index_width())? as usize + 1;
        Some((v, idx))
    }
}

pub fn trivial_xor_index_protocol(n: usize) -> TrivialProtocol {
    TrivialProtocol { n }
}

impl OneRoundProtocol for TrivialProtocol {
    fn n(&self) -> usize {
        self.n
    }
    fn alice_budget(&self) -> usize {
        self.n + self.index_width()
    }
    fn bob_budget(&self) -> usize {
        self.n + self.index_width()
    }
    fn alice_msg(&self, x: &BitString, i: usize, _r: u64) -> BitString {
        self.pack(x, i)
    }
    fn bob_msg(&self, y: &BitString, j: usize, _r: u64) -> BitString {
        self.pack(y, j)
    }
    fn alice_out(&self, x: &BitString, i: usize, bob_msg: &BitString, j: usize) -> bool {
        self.unpack(bob_msg).is_some_and(|(y, _)| x.bits()[j - 1] ^ y.bits()[i - 1])
    }
    fn bob_out(&self, y: &BitString, j: usize, alice_msg: &BitString, i: usize) -> bool {
        self.unpack(alice_msg).is_some_and(|(x, _)| x.bits()[j - 1] ^ y.bits()[i - 1])
    }
}

/// Silent protocol with fixed outputs.
#[derive(Clone, Copy, Debug)]
pub struct ConstantOneRound {
    pub n: usize,
    pub alice: bool,
    pub bob: bool,
}

impl OneRoundProtocol for ConstantOneRound {
    fn n(&self) -> usize {
        self.n
    }
    fn alice_budget(&self) -> usize {
        0
    }
    fn bob_budget(&self) -> usize {
        0
    }
    fn alice_msg(&self, _x: &BitString, _i: usize, _r: u64) -> BitString {
        BitString::new()
    }
    fn bob_msg(&self, _y: &BitString, _j: usize, _r: u64) -> BitString {
        BitString::new()
    }
    fn alice_out(&self, _x: &BitString, _i: usize, _m: &BitString, _j: usize) -> bool {
        self.alice
    }
    fn bob_out(&self, _y: &BitString, _j: usize, _m: &BitString, _i: usize) -> bool {
        self.bob
    }
}

/// Deterministic protocol given by explicit tables. Messages are integers
/// below `2^k`, sent as `k`-bit strings. Inputs are indexed by
/// [`input_code`]-style integers and indices are 1-based.
///
/// * `alice_msg[(i−1)·2^n + x]`, `bob_msg[(j−1)·2^n + y]`
/// * `alice_out[((i−1)·n + j−1)·2^n·2^kB + x·2^kB + m_B]`
/// * `bob_out[((i−1)·n + j−1)·2^n·2^kA + y·2^kA + m_A]`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableProtocol {
    pub n: usize,
    pub k_a: usize,
    pub k_b: usize,
    pub alice_msg: Vec<u32>,
    pub bob_msg: Vec<u32>,
    pub alice_out: BitString,
    pub bob_out: BitString,
}

impl TableProtocol {
    fn cell(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.n + j - 1
    }

    fn msg_value(m: &BitString, k: usize) -> Option<usize> {
        (m.len() == k).then(|| m.to_uint().unwrap_or(0) as usize)
    }
}

impl OneRoundProtocol for TableProtocol {
    fn n(&self) -> usize {
        self.n
    }
    fn alice_budget(&self) -> usize {
        self.k_a
    }
    fn bob_budget(&self) -> usize {
        self.k_b
    }
    fn alice_msg(&self, x: &BitString, i: usize, _r: u64) -> BitString {
        let m = self.alice_msg[((i - 1) << self.n) + input_code(x)];
        BitString::from_uint(u64::from(m), self.k_a)
    }
    fn bob_msg(&self, y: &BitString, j: usize, _r: u64) -> BitString {
        let m = self.bob_msg[((j - 1) << self.n) + input_code(y)];
        BitString::from_uint(u64::from(m), self.k_b)
    }
    fn alice_out(&self, x: &BitString, i: usize, bob_msg: &BitString, j: usize) -> bool {
        let Some(mb) = Self::msg_value(bob_msg, self.k_b) else { return false };
        let idx = ((self.cell(i, j) << self.n) + input_code(x)) << self.k_b | mb;
        self.alice_out.bits()[idx]
    }
    fn bob_out(&self, y: &BitString, j: usize, alice_msg: &BitString, i: usize) -> bool {
        let Some(ma) = Self::msg_value(alice_msg, self.k_a) else { return false };
        let idx = ((self.cell(i, j) << self.n) + input_code(y)) << self.k_a | ma;
        self.bob_out.bits()[idx]
    }
}

/// Result of running the alternating pointer-chasing protocol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointerChasingRun {
    /// Pointer sent in each round; Alice speaks in odd rounds.
    pub transcript: Vec<usize>,
    pub output: bool,
    pub bits: usize,
}

/// `k`-round protocol: in round `r` the holder of the current pointer sends
/// its image in `⌈log₂ n⌉` bits. The last receiver outputs the parity.
#[derive(Clone, Copy, Debug)]
pub struct PointerChasingProtocol {
    pub k: usize,
}

pub fn pointer_chasing_protocol(k: usize) -> PointerChasingProtocol {
    PointerChasingProtocol { k }
}

impl PointerChasingProtocol {
    pub fn run(&self, first: &PointerMap, second: &PointerMap) -> Result<PointerChasingRun, TwoPartyError> {
        validate_alternating(first, second)?;
        let width = ceil_log2(first.n() as u64);
        let mut cur = 0;
        let mut transcript = Vec::with_capacity(self.k);
        for r in 1..=self.k {
            let holder = if r % 2 == 1 { first } else { second };
            cur = holder.get(cur).ok_or(PointerError::NotAlternating)?;
            transcript.push(cur);
        }
        Ok(PointerChasingRun { output: cur.count_ones() % 2 == 1, bits: width * self.k, transcript })
    }
}
