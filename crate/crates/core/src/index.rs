//! Tuples, multi-indices, orbits.
//!
//! Enumeration orders are fixed once and for all so that matrix layouts are
//! reproducible across runs: multi-indices of a fixed degree are listed in
//! lexicographically descending order of their count vectors (graded-lex),
//! tuples in `[n]^k` in row-major lexicographic order (first entry most
//! significant). Tuple entries are 1-based, matching the `[n]` convention.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// A vector of per-variable exponents with fixed total degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    counts: Vec<u32>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(counts: Vec<u32>) -> Self {
        let degree = counts.iter().sum();
        MultiIndex { counts, degree }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn num_vars(&self) -> usize {
        self.counts.len()
    }

    /// Component-wise sum; both sides must range over the same variables.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.counts.len(), other.counts.len());
        MultiIndex::new(
            self.counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// A tuple in `[n]^k` with 1-based entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexTuple {
    entries: Vec<u32>,
}

impl IndexTuple {
    pub fn new(entries: Vec<u32>) -> Self {
        IndexTuple { entries }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Row-major linear index in the enumeration of `[n]^k`.
    pub fn linear_index(&self, n: usize) -> usize {
        let mut idx = 0usize;
        for &e in &self.entries {
            debug_assert!(e >= 1 && e as usize <= n);
            idx = idx * n + (e as usize - 1);
        }
        idx
    }

    /// Inverse of [`IndexTuple::linear_index`].
    pub fn from_linear(mut idx: usize, n: usize, k: usize) -> Self {
        let mut entries = vec![0u32; k];
        for slot in entries.iter_mut().rev() {
            *slot = (idx % n) as u32 + 1;
            idx /= n;
        }
        IndexTuple { entries }
    }
}

/// Maps a tuple to its multi-index: `counts[j] = #{l : I_l = j+1}`.
pub fn tuple_to_multiindex(tuple: &IndexTuple, n: usize) -> Result<MultiIndex> {
    let mut counts = vec![0u32; n];
    for &e in tuple.entries() {
        if e < 1 || e as usize > n {
            return Err(Error::bad_input(format!(
                "tuple entry {e} out of range [1, {n}]"
            )));
        }
        counts[e as usize - 1] += 1;
    }
    Ok(MultiIndex::new(counts))
}

/// Multi-index of a linear tuple index without building the tuple.
pub(crate) fn counts_of_linear(mut idx: usize, n: usize, k: usize) -> Vec<u32> {
    let mut counts = vec![0u32; n];
    for _ in 0..k {
        counts[idx % n] += 1;
        idx /= n;
    }
    counts
}

/// Number of tuples in the orbit of `alpha`: `k! / prod(alpha_i!)`, exact.
pub fn orbit_size(alpha: &MultiIndex) -> Result<u128> {
    // Multiply k!/prod incrementally as a running product of binomials so the
    // intermediate values stay within the final magnitude.
    let mut size: u128 = 1;
    let mut placed: u64 = 0;
    for &c in alpha.counts() {
        for j in 1..=c as u64 {
            placed += 1;
            size = size
                .checked_mul(placed as u128)
                .ok_or_else(|| Error::Overflow(format!("orbit size for degree {}", alpha.degree())))?;
            size /= j as u128;
        }
    }
    Ok(size)
}

/// Exact binomial coefficient with overflow detection.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for j in 1..=k {
        out = out
            .checked_mul((n - k + j) as u128)
            .ok_or_else(|| Error::Overflow(format!("binomial({n}, {k})")))?;
        out /= j as u128;
    }
    Ok(out)
}

/// All multi-indices of degree `k` over `n` variables, graded-lex order.
///
/// The count is `C(n+k-1, k)`; an error is returned if it does not fit in
/// `usize`.
pub fn enumerate_multiindices(n: usize, k: usize) -> Result<Vec<MultiIndex>> {
    assert!(n >= 1);
    let count = binomial((n + k - 1) as u64, k as u64)?;
    if count > usize::MAX as u128 {
        return Err(Error::Overflow(format!(
            "multi-index count C({}, {k})",
            n + k - 1
        )));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0u32; n];
    descend(&mut current, 0, k as u32, &mut out);
    debug_assert_eq!(out.len(), count as usize);
    Ok(out)
}

fn descend(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex::new(current.clone()));
        current[pos] = 0;
        return;
    }
    for c in (0..=remaining).rev() {
        current[pos] = c;
        descend(current, pos + 1, remaining - c, out);
    }
    current[pos] = 0;
}

/// Lookup table from count vector to position in the graded-lex enumeration.
#[derive(Debug, Clone)]
pub struct MultiIndexTable {
    pub indices: Vec<MultiIndex>,
    positions: HashMap<Vec<u32>, usize>,
    pub n: usize,
    pub k: usize,
}

impl MultiIndexTable {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let indices = enumerate_multiindices(n, k)?;
        let positions = indices
            .iter()
            .enumerate()
            .map(|(i, a)| (a.counts().to_vec(), i))
            .collect();
        Ok(MultiIndexTable {
            indices,
            positions,
            n,
            k,
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.positions.get(alpha.counts()).copied()
    }

    pub fn position_of_counts(&self, counts: &[u32]) -> Option<usize> {
        self.positions.get(counts).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_to_multiindex_examples() {
        let mi = tuple_to_multiindex(&IndexTuple::new(vec![1, 1]), 2).unwrap();
        assert_eq!(mi.counts(), &[2, 0]);
        let mi = tuple_to_multiindex(&IndexTuple::new(vec![2, 1, 2]), 2).unwrap();
        assert_eq!(mi.counts(), &[1, 2]);
        let mi = tuple_to_multiindex(&IndexTuple::new(vec![3, 1]), 3).unwrap();
        assert_eq!(mi.counts(), &[1, 0, 1]);
    }

    #[test]
    fn tuple_out_of_range_rejected() {
        assert!(tuple_to_multiindex(&IndexTuple::new(vec![0, 1]), 2).is_err());
        assert!(tuple_to_multiindex(&IndexTuple::new(vec![3]), 2).is_err());
    }

    #[test]
    fn orbit_size_examples() {
        assert_eq!(orbit_size(&MultiIndex::new(vec![2, 0])).unwrap(), 1);
        assert_eq!(orbit_size(&MultiIndex::new(vec![1, 1])).unwrap(), 2);
        // Enumerate all tuples in [2]^3 mapping to (2,1) as an oracle.
        let mut count = 0;
        for idx in 0..8usize {
            if counts_of_linear(idx, 2, 3) == vec![2, 1] {
                count += 1;
            }
        }
        assert_eq!(count, 3);
        assert_eq!(orbit_size(&MultiIndex::new(vec![2, 1])).unwrap(), 3);
    }

    #[test]
    fn enumeration_examples() {
        let list = enumerate_multiindices(2, 2).unwrap();
        let counts: Vec<_> = list.iter().map(|m| m.counts().to_vec()).collect();
        assert_eq!(counts, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);

        let list = enumerate_multiindices(1, 3).unwrap();
        assert_eq!(list.len(), 1);
        assert_eq!(list[0].counts(), &[3]);

        assert_eq!(enumerate_multiindices(3, 1).unwrap().len(), 3);
    }

    #[test]
    fn orbit_sizes_sum_to_nk() {
        for n in 1..=4usize {
            for k in 0..=3usize {
                let total: u128 = enumerate_multiindices(n, k)
                    .unwrap()
                    .iter()
                    .map(|a| orbit_size(a).unwrap())
                    .sum();
                assert_eq!(total, (n as u128).pow(k as u32));
            }
        }
    }

    #[test]
    fn linear_index_roundtrip() {
        let n = 3usize;
        let k = 4usize;
        for idx in 0..n.pow(k as u32) {
            let t = IndexTuple::from_linear(idx, n, k);
            assert_eq!(t.linear_index(n), idx);
            assert_eq!(
                tuple_to_multiindex(&t, n).unwrap().counts(),
                counts_of_linear(idx, n, k).as_slice()
            );
        }
    }

    #[test]
    fn orbit_size_overflow_detected() {
        // 40! ~ 8e47 exceeds u128::MAX ~ 3.4e38.
        let alpha = MultiIndex::new(vec![1; 40]);
        assert!(orbit_size(&alpha).is_err());
    }
}
