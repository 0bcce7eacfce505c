//! Entropy, divergence and distance on finite distributions, in bits.

use super::XorlbError;

#[derive(Clone, Debug, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(p: Vec<f64>) -> Result<Self, XorlbError> {
        if p.is_empty() {
            return Err(XorlbError::BadDistribution("empty support".into()));
        }
        if let Some(v) = p.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(XorlbError::BadDistribution(format!("entry {v}")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(XorlbError::BadDistribution(format!("sums to {sum}")));
        }
        Ok(Self(p))
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(w: &[f64]) -> Result<Self, XorlbError> {
        let sum: f64 = w.iter().sum();
        if sum.is_nan() || sum <= 0.0 {
            return Err(XorlbError::BadDistribution("weights sum to zero".into()));
        }
        Self::new(w.iter().map(|x| x / sum).collect()).or_else(|_| {
            // rounding can leave the sum a few ulps off 1; fold it into the largest entry
            let mut p: Vec<f64> = w.iter().map(|x| x / sum).collect();
            let err = 1.0 - p.iter().sum::<f64>();
            let big = (0..p.len()).max_by(|&a, &b| p[a].total_cmp(&p[b])).expect("non-empty");
            p[big] += err;
            Self::new(p)
        })
    }

    pub fn uniform(k: usize) -> Result<Self, XorlbError> {
        Self::from_weights(&vec![1.0; k])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn same_size(a: &Distribution, b: &Distribution) -> Result<(), XorlbError> {
    if a.len() == b.len() {
        Ok(())
    } else {
        Err(XorlbError::SizeMismatch(a.len(), b.len()))
    }
}

pub fn entropy(d: &Distribution) -> f64 {
    d.0.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// `Σ μ log₂(μ/ν)`; infinite when `ν` misses mass of `μ`.
pub fn kl(mu: &Distribution, nu: &Distribution) -> Result<f64, XorlbError> {
    same_size(mu, nu)?;
    let mut total = 0.0;
    for (&p, &q) in mu.0.iter().zip(&nu.0) {
        if p == 0.0 {
            continue;
        }
        if q == 0.0 {
            return Err(XorlbError::InfiniteDivergence);
        }
        total += p * (p / q).log2();
    }
    Ok(total.max(0.0))
}

pub fn tv(mu: &Distribution, nu: &Distribution) -> Result<f64, XorlbError> {
    same_size(mu, nu)?;
    Ok(0.5 * mu.0.iter().zip(&nu.0).map(|(p, q)| (p - q).abs()).sum::<f64>())
}

/// Divergence of a joint table (rows = first variable) from the product of
/// its marginals.
pub fn mutual_information(joint: &[Vec<f64>]) -> Result<f64, XorlbError> {
    let cols = joint.first().map_or(0, Vec::len);
    if cols == 0 || joint.iter().any(|r| r.len() != cols) {
        return Err(XorlbError::BadDistribution("joint table must be a non-empty rectangle".into()));
    }
    Distribution::new(joint.iter().flatten().copied().collect())?;
    let rows: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<f64> = (0..cols).map(|c| joint.iter().map(|r| r[c]).sum()).collect();
    let mut total = 0.0;
    for (r, row) in joint.iter().enumerate() {
        for (c, &p) in row.iter().enumerate() {
            if p > 0.0 {
                total += p * (p / (rows[r] * col[c])).log2();
            }
        }
    }
    Ok(total.max(0.0))
}

/// `tv² ≤ (2 / ln 2)·kl` with `kl` in bits.
pub fn pinsker_check(mu: &Distribution, nu: &Distribution) -> Result<bool, XorlbError> {
    let d = kl(mu, nu)?;
    let t = tv(mu, nu)?;
    Ok(t * t <= 2.0 / std::f64::consts::LN_2 * d + 1e-12)
}
