//! The 24 stationary decision rules, their KKT residuals, a brute grid
//! maximization and the ordering of the candidate values.

use rayon::prelude::*;
use serde::Serialize;

use super::{success_prob, DecisionRuleParams, Posteriors, XorlbError};

/// `c + a·R_A + b·R_B`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Lin {
    pub c: f64,
    pub a: f64,
    pub b: f64,
}

impl Lin {
    pub const fn new(c: f64, a: f64, b: f64) -> Self {
        Self { c, a, b }
    }

    pub fn eval(&self, post: &Posteriors) -> f64 {
        self.c + self.a * post.r_a + self.b * post.r_b
    }
}

/// A table entry: a ratio of two linear forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub text: &'static str,
    pub num: Lin,
    pub den: Lin,
}

impl Entry {
    const fn constant(text: &'static str, v: f64) -> Self {
        Self { text, num: Lin::new(v, 0.0, 0.0), den: Lin::new(1.0, 0.0, 0.0) }
    }

    /// `None` when the denominator vanishes.
    pub fn eval(&self, post: &Posteriors) -> Option<f64> {
        let den = self.den.eval(post);
        (den.abs() > 1e-12).then(|| self.num.eval(post) / den)
    }
}

const ZERO: Entry = Entry::constant("0", 0.0);
const ONE: Entry = Entry::constant("1", 1.0);
const DIFF_OVER_SUM: Entry =
    Entry { text: "(R_A-R_B)/(R_A+R_B-1)", num: Lin::new(0.0, 1.0, -1.0), den: Lin::new(-1.0, 1.0, 1.0) };
const SUM_OVER_DIFF: Entry =
    Entry { text: "(R_A+R_B-1)/(R_A-R_B)", num: Lin::new(-1.0, 1.0, 1.0), den: Lin::new(0.0, 1.0, -1.0) };
const RDIFF_OVER_SUM: Entry =
    Entry { text: "(R_B-R_A)/(R_A+R_B-1)", num: Lin::new(0.0, -1.0, 1.0), den: Lin::new(-1.0, 1.0, 1.0) };
const SUM_OVER_RDIFF: Entry =
    Entry { text: "(R_A+R_B-1)/(R_B-R_A)", num: Lin::new(-1.0, 1.0, 1.0), den: Lin::new(0.0, -1.0, 1.0) };

/// One stationary point with the value listed for it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KktRow {
    pub id: usize,
    pub p_a: Entry,
    pub p_b: Entry,
    pub q_a: Entry,
    pub q_b: Entry,
    pub claimed: Lin,
}

impl KktRow {
    pub fn params(&self, post: &Posteriors) -> Result<DecisionRuleParams, XorlbError> {
        let get = |e: &Entry| {
            e.eval(post)
                .filter(|v| (-1e-12..=1.0 + 1e-12).contains(v))
                .map(|v| v.clamp(0.0, 1.0))
                .ok_or(XorlbError::InfeasibleRow { row: self.id })
        };
        Ok(DecisionRuleParams {
            p_a: get(&self.p_a)?,
            q_a: get(&self.q_a)?,
            p_b: get(&self.p_b)?,
            q_b: get(&self.q_b)?,
        })
    }
}

/// Rows in table order; columns are `p_A, p_B, q_A, q_B`.
pub fn table1_rows() -> Vec<KktRow> {
    let half = Lin::new(0.5, 0.0, 0.0);
    let rows: [(Entry, Entry, Entry, Entry, Lin); 24] = [
        (ONE, ONE, ONE, ONE, half),
        (ZERO, ZERO, ZERO, ZERO, half),
        (ZERO, ONE, ZERO, DIFF_OVER_SUM, half),
        (ZERO, SUM_OVER_DIFF, ZERO, ONE, half),
        (ZERO, ONE, ONE, ONE, Lin::new(1.0, 0.0, -1.0)),
        (ONE, ZERO, RDIFF_OVER_SUM, ZERO, half),
        (SUM_OVER_RDIFF, ZERO, ONE, ZERO, half),
        (ONE, ZERO, ONE, ONE, Lin::new(1.0, -1.0, 0.0)),
        (ZERO, ZERO, ONE, ONE, Lin::new(1.0, -0.5, -0.5)),
        (ZERO, ONE, ZERO, SUM_OVER_DIFF, half),
        (ZERO, DIFF_OVER_SUM, ZERO, ONE, half),
        (ONE, ONE, ZERO, ONE, Lin::new(0.0, 0.0, 1.0)),
        (ZERO, ONE, ZERO, ONE, half),
        (ONE, ZERO, ZERO, ONE, Lin::new(0.5, -0.5, 0.5)),
        (ZERO, ZERO, ZERO, ONE, half),
        (ONE, ZERO, SUM_OVER_RDIFF, ZERO, half),
        (RDIFF_OVER_SUM, ZERO, ONE, ZERO, half),
        (ONE, ONE, ONE, ZERO, Lin::new(0.0, 1.0, 0.0)),
        (ZERO, ONE, ONE, ZERO, Lin::new(0.5, 0.5, -0.5)),
        (ONE, ZERO, ONE, ZERO, half),
        (ZERO, ZERO, ONE, ZERO, half),
        (ONE, ONE, ZERO, ZERO, Lin::new(0.0, 0.5, 0.5)),
        (ZERO, ONE, ZERO, ZERO, half),
        (ONE, ZERO, ZERO, ZERO, half),
    ];
    rows.into_iter()
        .enumerate()
        .map(|(k, (p_a, p_b, q_a, q_b, claimed))| KktRow { id: k + 1, p_a, p_b, q_a, q_b, claimed })
        .collect()
}

/// Partial derivatives of twice the success probability, in the order
/// `p_A, p_B, q_A, q_B`.
fn gradient(d: &DecisionRuleParams, post: &Posteriors) -> [f64; 4] {
    let sum = post.r_a + post.r_b - 1.0;
    let diff = post.r_a - post.r_b;
    [sum * d.p_b - diff * d.q_b, sum * d.p_a + diff * d.q_a, diff * d.p_b - sum * d.q_b, -diff * d.p_a - sum * d.q_a]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KktReport {
    pub row: usize,
    pub params: DecisionRuleParams,
    /// Largest absolute value over the 4 stationarity and 8 slackness equations.
    pub residual: f64,
    /// Upper-bound multipliers for `p_A, p_B, q_A, q_B`, then lower-bound ones.
    pub multipliers: [f64; 8],
    pub dual_feasible: bool,
}

/// Residual of the KKT system at `row`. Multipliers are recovered from the
/// active bounds: a coordinate at 1 takes its upper multiplier from the
/// stationarity equation, one at 0 its lower multiplier, and an interior
/// coordinate has both at zero.
pub fn kkt_residuals(row: &KktRow, post: &Posteriors) -> Result<KktReport, XorlbError> {
    let d = row.params(post)?;
    kkt_at(row.id, d, post)
}

fn kkt_at(row: usize, d: DecisionRuleParams, post: &Posteriors) -> Result<KktReport, XorlbError> {
    let x = [d.p_a, d.p_b, d.q_a, d.q_b];
    let g = gradient(&d, post);
    let mut mu = [0.0; 8];
    for k in 0..4 {
        if (x[k] - 1.0).abs() < 1e-12 {
            mu[k] = g[k] / 2.0;
        } else if x[k].abs() < 1e-12 {
            mu[k + 4] = -g[k] / 2.0;
        }
    }
    let stationarity = (0..4).map(|k| g[k] - 2.0 * mu[k] + 2.0 * mu[k + 4]);
    let slackness = (0..4).flat_map(|k| [mu[k] * (x[k] - 1.0), -mu[k + 4] * x[k]]);
    let residual = stationarity.chain(slackness).fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(KktReport { row, params: d, residual, multipliers: mu, dual_feasible: mu.iter().all(|&m| m >= -1e-9) })
}

/// KKT residual at an arbitrary point, for points that are not table rows.
pub fn kkt_residual_at(d: DecisionRuleParams, post: &Posteriors) -> f64 {
    kkt_at(0, d, post).map(|r| r.residual).unwrap_or(f64::INFINITY)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowEval {
    pub id: usize,
    pub feasible: bool,
    pub params: Option<DecisionRuleParams>,
    /// Closed-form success probability at the row.
    pub value: Option<f64>,
    /// The value listed for the row.
    pub claimed: f64,
    pub residual: Option<f64>,
    pub dual_feasible: Option<bool>,
}

impl RowEval {
    /// Whether the listed value is the success probability (rather than the failure probability).
    pub fn claimed_is_success(&self) -> Option<bool> {
        self.value.map(|v| (v - self.claimed).abs() < 1e-9)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainLink {
    pub left: &'static str,
    pub right: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// The ten candidate values in increasing order (for `R_A ≥ R_B`; the
/// posteriors are swapped otherwise), checked link by link.
pub fn ordering_chain(post: &Posteriors) -> Vec<ChainLink> {
    let (ra, rb) = if post.r_a >= post.r_b { (post.r_a, post.r_b) } else { (post.r_b, post.r_a) };
    let mixed = 0.5 * (1.0 + ra - rb);
    let terms: [(&'static str, f64); 10] = [
        ("(1-(R_A+R_B))/2", 0.5 * (1.0 - (ra + rb))),
        ("1-R_A", 1.0 - ra),
        ("1-(R_A+R_B)/2", 1.0 - (ra + rb) / 2.0),
        ("1-R_B", 1.0 - rb),
        ("1/2", 0.5),
        ("min(R_B,(1+R_A-R_B)/2)", rb.min(mixed)),
        ("max(R_B,(1+R_A-R_B)/2)", rb.max(mixed)),
        ("(R_A+R_B)/2", (ra + rb) / 2.0),
        ("R_A", ra),
        ("1-(1-R_A)(1-R_B)", 1.0 - (1.0 - ra) * (1.0 - rb)),
    ];
    terms
        .windows(2)
        .map(|w| ChainLink { left: w[0].0, right: w[1].0, lhs: w[0].1, rhs: w[1].1, holds: w[0].1 <= w[1].1 + 1e-12 })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Scan {
    pub posteriors: Posteriors,
    pub rows: Vec<RowEval>,
    pub max_value: f64,
    pub argmax_row: usize,
    /// `R_A + R_B − R_A·R_B`.
    pub bound: f64,
    pub chain: Vec<ChainLink>,
}

impl Table1Scan {
    pub fn max_equals_bound(&self, tol: f64) -> bool {
        (self.max_value - self.bound).abs() <= tol
    }

    pub fn bound_holds(&self, tol: f64) -> bool {
        self.max_value <= self.bound + tol
    }

    pub fn chain_holds(&self) -> bool {
        self.chain.iter().all(|l| l.holds)
    }

    pub fn infeasible_rows(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| !r.feasible).map(|r| r.id).collect()
    }
}

/// Evaluates every row at `post`; infeasible rows are reported, not errors.
pub fn table1_scan(post: &Posteriors) -> Table1Scan {
    let rows: Vec<RowEval> = table1_rows()
        .iter()
        .map(|row| {
            let claimed = row.claimed.eval(post);
            match kkt_residuals(row, post) {
                Ok(rep) => RowEval {
                    id: row.id,
                    feasible: true,
                    value: Some(success_prob(&rep.params, post)),
                    params: Some(rep.params),
                    claimed,
                    residual: Some(rep.residual),
                    dual_feasible: Some(rep.dual_feasible),
                },
                Err(_) => RowEval {
                    id: row.id,
                    feasible: false,
                    params: None,
                    value: None,
                    claimed,
                    residual: None,
                    dual_feasible: None,
                },
            }
        })
        .collect();
    let (argmax_row, max_value) = rows
        .iter()
        .filter_map(|r| r.value.map(|v| (r.id, v)))
        .fold((0, f64::NEG_INFINITY), |best, (id, v)| if v > best.1 { (id, v) } else { best });
    Table1Scan {
        posteriors: *post,
        rows,
        max_value,
        argmax_row,
        bound: post.r_a + post.r_b - post.r_a * post.r_b,
        chain: ordering_chain(post),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridMax {
    pub value: f64,
    pub argmax: DecisionRuleParams,
    pub step: f64,
}

/// Maximum of the success probability over the grid `{0, s, 2s, …, 1}^4`
/// with `s ≈ step` (the grid always contains both endpoints).
pub fn grid_max_success(post: &Posteriors, step: f64) -> GridMax {
    let m = (1.0 / step.clamp(1e-4, 1.0)).round().max(1.0) as usize;
    let at = |k: usize| k as f64 / m as f64;
    let (value, code) = (0..=m)
        .into_par_iter()
        .map(|a| {
            let mut best = (f64::NEG_INFINITY, 0usize);
            for b in 0..=m {
                for c in 0..=m {
                    for d in 0..=m {
                        let p = DecisionRuleParams { p_a: at(a), q_a: at(b), p_b: at(c), q_b: at(d) };
                        let v = success_prob(&p, post);
                        if v > best.0 {
                            best = (v, ((a * (m + 1) + b) * (m + 1) + c) * (m + 1) + d);
                        }
                    }
                }
            }
            best
        })
        .reduce(|| (f64::NEG_INFINITY, usize::MAX), |x, y| if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x });
    let digit = |t: u32| code / (m + 1).pow(t) % (m + 1);
    GridMax {
        value,
        argmax: DecisionRuleParams { p_a: at(digit(3)), q_a: at(digit(2)), p_b: at(digit(1)), q_b: at(digit(0)) },
        step: 1.0 / m as f64,
    }
}

/// CSV with one line per row: id, the four entries, feasibility, value,
/// listed value, residual.
pub fn kkt_csv(post: &Posteriors) -> String {
    #[derive(Serialize)]
    struct Line {
        row: usize,
        p_a: &'static str,
        p_b: &'static str,
        q_a: &'static str,
        q_b: &'static str,
        feasible: bool,
        value: Option<f64>,
        claimed: f64,
        residual: Option<f64>,
    }
    let scan = table1_scan(post);
    let mut w = csv::Writer::from_writer(Vec::new());
    for (row, ev) in table1_rows().iter().zip(&scan.rows) {
        w.serialize(Line {
            row: row.id,
            p_a: row.p_a.text,
            p_b: row.p_b.text,
            q_a: row.q_a.text,
            q_b: row.q_b.text,
            feasible: ev.feasible,
            value: ev.value,
            claimed: ev.claimed,
            residual: ev.residual,
        })
        .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
}
