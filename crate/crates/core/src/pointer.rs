//! Partial maps on `{0,…,n−1}` used by the pointer-chasing problems.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bits::{width_for, BitReader, BitString, BitWriter};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PointerError {
    #[error("maps are over different index sets ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("domains do not partition the index set")]
    NotPartition,
    #[error("domains have unequal sizes")]
    Unbalanced,
    #[error("0 is not in the first map's domain")]
    MissingStart,
    #[error("map does not alternate between the two domains")]
    NotAlternating,
    #[error("bit string does not encode a pointer map")]
    BadEncoding,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointerMap {
    n: usize,
    map: BTreeMap<usize, usize>,
}

impl PointerMap {
    /// Entries must lie in `0..n`.
    pub fn new(n: usize, entries: impl IntoIterator<Item = (usize, usize)>) -> Option<Self> {
        let map: BTreeMap<_, _> = entries.into_iter().collect();
        map.iter().all(|(&k, &v)| k < n && v < n).then_some(Self { n, map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize) -> Option<usize> {
        self.map.get(&x).copied()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.map.contains_key(&x)
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.keys().copied()
    }

    pub fn values(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.values().copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Bits per stored value.
    pub fn value_width(n: usize) -> usize {
        width_for(n.saturating_sub(1) as u64)
    }

    /// Per index: a presence bit, then the value (zero when absent).
    pub fn encode(&self) -> BitString {
        let w = Self::value_width(self.n);
        let mut out = BitWriter::new();
        for x in 0..self.n {
            match self.map.get(&x) {
                Some(&v) => out.bit(true).uint(v as u64, w),
                None => out.bit(false).uint(0, w),
            };
        }
        out.finish()
    }

    /// The index-set size is recovered from the length, which is strictly increasing in `n`.
    pub fn decode(bits: &BitString) -> Result<Self, PointerError> {
        let n = (1..=bits.len())
            .find(|&n| n * (1 + Self::value_width(n)) == bits.len())
            .ok_or(PointerError::BadEncoding)?;
        let w = Self::value_width(n);
        let mut r = BitReader::new(bits);
        let mut map = BTreeMap::new();
        for x in 0..n {
            let present = r.bit().ok_or(PointerError::BadEncoding)?;
            let v = r.uint(w).ok_or(PointerError::BadEncoding)? as usize;
            if present {
                if v >= n {
                    return Err(PointerError::BadEncoding);
                }
                map.insert(x, v);
            } else if v != 0 {
                return Err(PointerError::BadEncoding);
            }
        }
        Ok(Self { n, map })
    }
}

/// Checks that `(first, second)` is a valid alternating pair: domains partition
/// `{0..n−1}` into equal halves, 0 is in `first`'s domain, and each map points
/// into the other's domain.
pub fn validate_alternating(first: &PointerMap, second: &PointerMap) -> Result<(), PointerError> {
    if first.n != second.n {
        return Err(PointerError::SizeMismatch(first.n, second.n));
    }
    let n = first.n;
    if first.len() + second.len() != n || (0..n).any(|x| first.contains(x) == second.contains(x)) {
        return Err(PointerError::NotPartition);
    }
    if first.len() != second.len() {
        return Err(PointerError::Unbalanced);
    }
    if !first.contains(0) {
        return Err(PointerError::MissingStart);
    }
    if first.values().any(|v| !second.contains(v)) || second.values().any(|v| !first.contains(v)) {
        return Err(PointerError::NotAlternating);
    }
    Ok(())
}

/// `f^k(0)` for the union map `f = first ∪ second`.
pub fn pointer_chase(first: &PointerMap, second: &PointerMap, k: usize) -> Result<usize, PointerError> {
    validate_alternating(first, second)?;
    let mut cur = 0;
    for _ in 0..k {
        cur = first.get(cur).or_else(|| second.get(cur)).expect("validated total map");
    }
    Ok(cur)
}

/// Output bit of the pointer-chasing problem: parity of the reached index.
pub fn pointer_chase_bit(first: &PointerMap, second: &PointerMap, k: usize) -> Result<bool, PointerError> {
    pointer_chase(first, second, k).map(|v| v.count_ones() % 2 == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(n: usize, e: &[(usize, usize)]) -> PointerMap {
        PointerMap::new(n, e.iter().copied()).unwrap()
    }

    #[test]
    fn chase_examples() {
        let fa = pm(4, &[(0, 2), (1, 3)]);
        let fb = pm(4, &[(2, 1), (3, 0)]);
        assert_eq!(pointer_chase(&fa, &fb, 1), Ok(2));
        assert!(pointer_chase_bit(&fa, &fb, 1).unwrap());
        assert_eq!(pointer_chase(&fa, &fb, 2), Ok(1));
        assert!(pointer_chase_bit(&fa, &fb, 2).unwrap());
        let fb2 = pm(4, &[(2, 0), (3, 1)]);
        assert_eq!(pointer_chase(&fa, &fb2, 2), Ok(0));
        assert!(!pointer_chase_bit(&fa, &fb2, 2).unwrap());
    }

    #[test]
    fn invalid_pairs() {
        let fa = pm(4, &[(0, 2), (1, 3)]);
        assert_eq!(pointer_chase(&fa, &pm(4, &[(2, 1)]), 1), Err(PointerError::NotPartition));
        assert_eq!(pointer_chase(&fa, &pm(4, &[(2, 1), (3, 2)]), 1), Err(PointerError::NotAlternating));
        assert_eq!(
            pointer_chase(&pm(4, &[(1, 2), (3, 0)]), &pm(4, &[(0, 1), (2, 3)]), 1),
            Err(PointerError::MissingStart)
        );
    }

    #[test]
    fn encoding_round_trip() {
        for n in 1..12 {
            let m = PointerMap::new(n, (0..n).step_by(2).map(|x| (x, (x + 1) % n))).unwrap();
            assert_eq!(PointerMap::decode(&m.encode()).unwrap(), m);
        }
        assert!(PointerMap::decode(&"101".parse().unwrap()).is_err());
    }
}
