//! Finite subsets of the positive naturals, their colexicographic ranking,
//! the neighbor relation, exact binomials and the beth tower.
//!
//! Ground-set elements are 1-based everywhere in the public API: `[m]` is
//! `{1, ..., m}`. Subsets are kept as strictly increasing `u32` sequences.

mod tower;

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use tower::{beth, beth_tower, short_decimal, Tower, DEFAULT_CAP_BITS};

/// A strictly increasing sequence of naturals `>= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct SortedSubset(Vec<u32>);

impl SortedSubset {
    pub fn new(elements: Vec<u32>) -> Result<Self> {
        if is_strictly_increasing(&elements) && elements.first().map_or(true, |&e| e >= 1) {
            Ok(SortedSubset(elements))
        } else {
            Err(Error::NotASortedSubset(elements))
        }
    }

    /// Sorts and deduplicates `elements` first; fails only on a zero.
    pub fn from_unsorted(mut elements: Vec<u32>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        Self::new(elements)
    }

    /// `[m] = {1, ..., m}`.
    pub fn interval(m: u32) -> Self {
        SortedSubset((1..=m).collect())
    }

    pub fn empty() -> Self {
        SortedSubset(Vec::new())
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn min(&self) -> Option<u32> {
        self.0.first().copied()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn is_subset_of(&self, other: &SortedSubset) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }

    /// `A_{>i}`.
    pub fn above(&self, i: u32) -> &[u32] {
        let start = self.0.partition_point(|&x| x <= i);
        &self.0[start..]
    }
}

impl TryFrom<Vec<u32>> for SortedSubset {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        SortedSubset::new(v)
    }
}

impl From<SortedSubset> for Vec<u32> {
    fn from(s: SortedSubset) -> Vec<u32> {
        s.0
    }
}

impl AsRef<[u32]> for SortedSubset {
    fn as_ref(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for SortedSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

pub fn is_strictly_increasing(xs: &[u32]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

/// `C(a, b)` as a machine integer, `None` on overflow.
pub fn binom_u64(a: u64, b: u64) -> Option<u64> {
    if b > a {
        return Some(0);
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        // acc * (a - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul(u128::from(a - i))? / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

/// Exact `C(a, b)`; zero when `b > a`.
pub fn binom(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// Colexicographic rank of an `n`-subset of the positive naturals.
///
/// `{1,2} -> 0`, `{1,3} -> 1`, `{2,3} -> 2`, `{1,4} -> 3`, ... Ranks of
/// subsets of `[N]` never change when `N` grows.
pub fn rank(u: &[u32], n: usize) -> Result<u64> {
    if u.len() != n {
        return Err(Error::WrongArity {
            expected: n,
            got: u.len(),
        });
    }
    if !is_strictly_increasing(u) || u.first().is_some_and(|&x| x == 0) {
        return Err(Error::NotASortedSubset(u.to_vec()));
    }
    Ok(rank_unchecked(u))
}

/// [`rank`] without validation; `u` must be strictly increasing and 1-based.
#[inline]
pub fn rank_unchecked(u: &[u32]) -> u64 {
    u.iter()
        .enumerate()
        .map(|(i, &x)| binom_u64(u64::from(x - 1), i as u64 + 1).expect("rank overflows u64"))
        .sum()
}

/// Rank of a strictly increasing sequence of 0-based indices.
#[inline]
pub fn rank_indices(idx: &[usize]) -> u64 {
    idx.iter()
        .enumerate()
        .map(|(i, &x)| binom_u64(x as u64, i as u64 + 1).expect("rank overflows u64"))
        .sum()
}

/// Inverse of [`rank`].
pub fn unrank(mut r: u64, n: usize) -> SortedSubset {
    let mut out = vec![0u32; n];
    for i in (1..=n).rev() {
        // largest c with C(c, i) <= r
        let mut lo = (i - 1) as u64;
        let mut hi = lo + 1;
        while binom_u64(hi, i as u64).is_some_and(|b| b <= r) {
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if binom_u64(mid, i as u64).is_some_and(|b| b <= r) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        r -= binom_u64(lo, i as u64).unwrap();
        out[i - 1] = lo as u32 + 1;
    }
    SortedSubset(out)
}

/// Two finite sets are neighbors when they have the same size, differ in
/// exactly one element, and the two differing elements sit at the same
/// position of their sorted sequences.
pub fn neighbors(u: &[u32], v: &[u32]) -> bool {
    if u.len() != v.len() {
        return false;
    }
    let only_u: Vec<u32> = u.iter().copied().filter(|x| !v.contains(x)).collect();
    let only_v: Vec<u32> = v.iter().copied().filter(|x| !u.contains(x)).collect();
    if only_u.len() != 1 || only_v.len() != 1 {
        return false;
    }
    let (k, l) = (only_u[0], only_v[0]);
    u.iter()
        .filter(|x| v.contains(x))
        .all(|&m| (k < m) == (l < m))
}

/// Visits every `k`-subset of `elements` (sorted) in colex order of the
/// index sets. The callback receives the chosen elements in increasing order.
pub fn for_each_subset<F>(elements: &[u32], k: usize, mut visit: F)
where
    F: FnMut(&[u32]),
{
    let mut buf = vec![0u32; k];
    for_each_index_subset(elements.len(), k, |idx| {
        for (slot, &i) in buf.iter_mut().zip(idx) {
            *slot = elements[i];
        }
        visit(&buf);
    });
}

/// Visits every `k`-subset of `{0, ..., len-1}` in colex order.
pub fn for_each_index_subset<F>(len: usize, k: usize, mut visit: F)
where
    F: FnMut(&[usize]),
{
    for_each_index_subset_while(len, k, |idx| {
        visit(idx);
        true
    });
}

/// Like [`for_each_subset`] but stops as soon as `visit` returns `false`.
/// Returns `true` when every subset was visited.
pub fn for_each_subset_while<F>(elements: &[u32], k: usize, mut visit: F) -> bool
where
    F: FnMut(&[u32]) -> bool,
{
    let mut buf = vec![0u32; k];
    for_each_index_subset_while(elements.len(), k, |idx| {
        for (slot, &i) in buf.iter_mut().zip(idx) {
            *slot = elements[i];
        }
        visit(&buf)
    })
}

/// Index-level [`for_each_subset_while`].
pub fn for_each_index_subset_while<F>(len: usize, k: usize, mut visit: F) -> bool
where
    F: FnMut(&[usize]) -> bool,
{
    if k > len {
        return true;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&idx) {
            return false;
        }
        // colex successor: bump the lowest position that has room
        let mut i = 0;
        loop {
            if i == k {
                return true;
            }
            let limit = if i + 1 < k { idx[i + 1] } else { len };
            if idx[i] + 1 < limit {
                idx[i] += 1;
                for (j, slot) in idx.iter_mut().enumerate().take(i) {
                    *slot = j;
                }
                break;
            }
            i += 1;
        }
    }
}

/// Merges two disjoint sorted sequences.
pub fn merge_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[1, 2], 2).unwrap(), 0);
        assert_eq!(rank(&[1, 3], 2).unwrap(), 1);
        assert_eq!(rank(&[2, 3], 2).unwrap(), 2);
        assert!(matches!(rank(&[1, 2, 3], 2), Err(Error::WrongArity { .. })));
        assert!(rank(&[3, 2], 2).is_err());
    }

    #[test]
    fn rank_unrank_exhaustive() {
        for n in 0..=4usize {
            for big_n in n as u32..=20 {
                let mut expected = 0u64;
                for_each_subset(&SortedSubset::interval(big_n).0, n, |u| {
                    assert_eq!(rank(u, n).unwrap(), expected);
                    assert_eq!(unrank(expected, n).as_slice(), u);
                    expected += 1;
                });
                assert_eq!(expected, binom_u64(u64::from(big_n), n as u64).unwrap());
            }
        }
    }

    #[test]
    fn neighbor_examples() {
        assert!(neighbors(&[1, 3], &[2, 3]));
        assert!(!neighbors(&[3, 4], &[1, 3]));
        assert!(!neighbors(&[1, 4], &[2, 3]));
        assert!(!neighbors(&[1, 3], &[1, 3]));
        assert!(!neighbors(&[1], &[1, 2]));
        assert!(neighbors(&[5], &[2]));
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(1, 1), BigUint::from(1u32));
        assert_eq!(binom(5, 2), BigUint::from(10u32));
        assert_eq!(binom(2, 5), BigUint::zero());
        assert_eq!(binom(60, 30), BigUint::from(binom_u64(60, 30).unwrap()));
        assert_eq!(binom_u64(0, 0), Some(1));
    }

    #[test]
    fn subset_from_unsorted() {
        let s = SortedSubset::from_unsorted(vec![5, 2, 5, 3]).unwrap();
        assert_eq!(s.as_slice(), &[2, 3, 5]);
        assert!(SortedSubset::new(vec![0, 1]).is_err());
        assert_eq!(s.above(2), &[3, 5]);
        assert_eq!(s.to_string(), "{2,3,5}");
    }

    fn small_set() -> impl Strategy<Value = Vec<u32>> {
        proptest::collection::btree_set(1u32..12, 0..6).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn neighbors_symmetric_irreflexive(u in small_set(), v in small_set()) {
            prop_assert_eq!(neighbors(&u, &v), neighbors(&v, &u));
            prop_assert!(!neighbors(&u, &u));
            if neighbors(&u, &v) {
                let diff = u.iter().zip(&v).filter(|(a, b)| a != b).count();
                prop_assert_eq!(diff, 1);
            }
        }
    }
}
