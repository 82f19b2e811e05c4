//! The canonicity predicate, pattern discovery, a pruned exhaustive search
//! for canonical subsets, and exact `ER(n; m)` certification for tiny
//! parameters.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::coloring::{tuple_count, Coloring, NPlace};
use crate::combinatorics::{binom, for_each_subset_while, SortedSubset};
use crate::error::{Error, Result};

/// A set of 1-based coordinate positions `v ⊆ {1, ..., n}`, as a bitmask
/// (bit `l-1` set when position `l` is in `v`).
///
/// The derived order is the numeric order of the mask, which is colex order
/// on sets of positions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Pattern(u32);

impl Pattern {
    pub const EMPTY: Pattern = Pattern(0);

    pub fn from_bits(bits: u32) -> Self {
        Pattern(bits)
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        Pattern(((1u64 << n) - 1) as u32)
    }

    pub fn from_positions<I: IntoIterator<Item = usize>>(positions: I) -> Result<Self> {
        let mut bits = 0u32;
        for p in positions {
            if p == 0 || p > 31 {
                return Err(Error::InvalidArgument(format!("pattern position {p} outside 1..=31")));
            }
            bits |= 1 << (p - 1);
        }
        Ok(Pattern(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, position: usize) -> bool {
        position >= 1 && self.0 & (1 << (position - 1)) != 0
    }

    /// Positions in increasing order, 1-based.
    pub fn positions(self) -> Vec<usize> {
        (1..=32).filter(|&p| self.contains(p)).collect()
    }

    pub fn check_arity(self, n: usize) -> Result<()> {
        if n < 32 && self.0 >> n != 0 {
            Err(Error::PatternOutOfRange { pattern: self.0, arity: n })
        } else {
            Ok(())
        }
    }

    /// Every pattern over `{1, ..., n}`, smallest first.
    pub fn all(n: usize) -> impl DoubleEndedIterator<Item = Pattern> {
        (0..1u32 << n).map(Pattern)
    }
}

impl TryFrom<Vec<usize>> for Pattern {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Pattern::from_positions(v)
    }
}

impl From<Pattern> for Vec<usize> {
    fn from(p: Pattern) -> Vec<usize> {
        p.positions()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.positions().iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for Pattern {
    type Err = Error;

    /// Accepts `1,3`, `{1,3}`, `{}` or the empty string.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let mut positions = Vec::new();
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            positions.push(
                part.parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad pattern position `{part}`")))?,
            );
        }
        Pattern::from_positions(positions)
    }
}

/// A subset on which a coloring is canonical, with the pattern it follows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalWitness {
    pub subset: SortedSubset,
    pub pattern: Pattern,
}

/// `f(i_1..i_n) = f(j_1..j_n)` iff the tuples agree on every position of `v`,
/// for all increasing tuples from `subset`.
///
/// Runs in one pass: canonicity with `v` is the statement that "same color"
/// and "same projection onto `v`" are the same equivalence relation.
pub fn is_canonical<F: NPlace + ?Sized>(f: &F, subset: &SortedSubset, v: Pattern) -> Result<bool> {
    let n = f.arity();
    v.check_arity(n)?;
    if subset.len() < n {
        return Err(Error::SubsetTooSmall { got: subset.len(), need: n });
    }
    Ok(canonical_unchecked(f, subset.as_slice(), v))
}

pub(crate) fn canonical_unchecked<F: NPlace + ?Sized>(f: &F, subset: &[u32], v: Pattern) -> bool {
    let positions: Vec<usize> = v.positions();
    let mut color_of_proj: HashMap<Vec<u32>, u64> = HashMap::new();
    let mut proj_of_color: HashMap<u64, Vec<u32>> = HashMap::new();
    for_each_subset_while(subset, f.arity(), |u| {
        let c = f.color(u);
        let proj: Vec<u32> = positions.iter().map(|&p| u[p - 1]).collect();
        if let Some(&c0) = color_of_proj.get(&proj) {
            if c0 != c {
                return false;
            }
        } else {
            color_of_proj.insert(proj.clone(), c);
        }
        match proj_of_color.get(&c) {
            Some(p0) => *p0 == proj,
            None => {
                proj_of_color.insert(c, proj);
                true
            }
        }
    })
}

/// Every pattern `v` for which `f` is canonical on `subset`, smallest first.
pub fn find_patterns<F: NPlace + ?Sized>(f: &F, subset: &SortedSubset) -> Result<Vec<Pattern>> {
    let n = f.arity();
    if subset.len() < n {
        return Err(Error::SubsetTooSmall { got: subset.len(), need: n });
    }
    Ok(Pattern::all(n)
        .filter(|&v| canonical_unchecked(f, subset.as_slice(), v))
        .collect())
}

/// Colex-least `m`-subset of `[N]` on which `f` is canonical, with the
/// pattern it follows. The pattern is unique once `m > n`; for `m = n` every
/// pattern fits the single tuple and the full pattern is reported.
///
/// `budget` caps `C(N, m)`; `None` forces the search. Partial subsets are
/// extended only while some pattern survives on them, which is sound because
/// canonicity is inherited by subsets.
pub fn oracle_find(f: &Coloring, m: usize, budget: Option<u64>) -> Result<Option<CanonicalWitness>> {
    let n = f.arity();
    if m < n {
        return Err(Error::InvalidArgument(format!("oracle needs m >= n, got m={m}, n={n}")));
    }
    if let Some(budget) = budget {
        let count = binom(u64::from(f.domain()), m as u64);
        if count > BigUint::from(budget) {
            return Err(Error::BudgetExceeded {
                what: "oracle subsets C(N, m)",
                count: count.to_string(),
                budget,
            });
        }
    }
    if m > f.domain() as usize {
        return Ok(None);
    }
    let all: Vec<Pattern> = Pattern::all(n).collect();
    // chosen[0] is the largest element; elements are added in decreasing order
    let mut chosen: Vec<u32> = Vec::with_capacity(m);
    Ok(search_from_top(f, m, f.domain(), &mut chosen, &all))
}

fn search_from_top(
    f: &Coloring,
    m: usize,
    below: u32,
    chosen: &mut Vec<u32>,
    alive: &[Pattern],
) -> Option<CanonicalWitness> {
    let remaining = m - chosen.len();
    if remaining == 0 {
        let subset = SortedSubset::new(chosen.iter().rev().copied().collect()).unwrap();
        return Some(CanonicalWitness {
            subset,
            pattern: *alive.last().unwrap(),
        });
    }
    // the next element is the largest still unchosen; colex order grows it
    let (lo, hi) = if chosen.is_empty() {
        (remaining as u32, f.domain())
    } else {
        (remaining as u32, below - 1)
    };
    for x in lo..=hi {
        chosen.push(x);
        let current: Vec<u32> = chosen.iter().rev().copied().collect();
        let survivors: Vec<Pattern> = if current.len() < f.arity() {
            alive.to_vec()
        } else {
            alive
                .iter()
                .copied()
                .filter(|&v| canonical_unchecked(f, &current, v))
                .collect()
        };
        if !survivors.is_empty() {
            if let Some(w) = search_from_top(f, m, x, chosen, &survivors) {
                chosen.pop();
                return Some(w);
            }
        }
        chosen.pop();
    }
    None
}

/// [`oracle_find`] without pruning: plain colex scan over all `m`-subsets.
pub fn oracle_scan(f: &Coloring, m: usize) -> Result<Option<CanonicalWitness>> {
    let n = f.arity();
    if m < n {
        return Err(Error::InvalidArgument(format!("oracle needs m >= n, got m={m}, n={n}")));
    }
    let ground: Vec<u32> = (1..=f.domain()).collect();
    let mut found = None;
    for_each_subset_while(&ground, m, |a| {
        if let Some(v) = Pattern::all(n).rev().find(|&v| canonical_unchecked(f, a, v)) {
            found = Some(CanonicalWitness {
                subset: SortedSubset::new(a.to_vec()).unwrap(),
                pattern: v,
            });
            false
        } else {
            true
        }
    });
    Ok(found)
}

/// Outcome of an exhaustive `ER(n; m) <= N` check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ErOutcome {
    AllColoringsOk { colorings_checked: u64 },
    Counterexample { coloring: Coloring },
}

/// Bell number `B(k)`, the number of set partitions of a `k`-set.
pub fn bell(k: u64) -> BigUint {
    // Bell triangle
    let mut row = vec![BigUint::one()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().unwrap().clone());
        for x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        row = next;
    }
    row[0].clone()
}

/// Checks whether every coloring of `[N]^n` has a canonical `m`-subset.
///
/// Colorings are enumerated up to renaming of colors, as restricted growth
/// strings over the colex-ordered tuples; the first failure in that order is
/// returned. `budget` caps the Bell number of `C(N, n)`.
pub fn er_search(n: usize, m: usize, domain: u32, budget: Option<u64>) -> Result<ErOutcome> {
    if n == 0 || m < n {
        return Err(Error::InvalidArgument(format!("er-search needs 1 <= n <= m, got n={n}, m={m}")));
    }
    let tuples = tuple_count(n, domain)?;
    if let Some(budget) = budget {
        let count = bell(tuples);
        if count > BigUint::from(budget) {
            return Err(Error::BudgetExceeded {
                what: "er-search colorings (Bell number)",
                count: count.to_string(),
                budget,
            });
        }
    }
    let len = tuples as usize;
    let mut rgs = vec![0u32; len];
    let mut checked = 0u64;
    loop {
        let f = Coloring::from_values(n, domain, &rgs)?;
        checked += 1;
        if oracle_find(&f, m, None)?.is_none() {
            return Ok(ErOutcome::Counterexample { coloring: f });
        }
        if !next_rgs(&mut rgs) {
            break;
        }
    }
    Ok(ErOutcome::AllColoringsOk {
        colorings_checked: checked,
    })
}

/// Advances a restricted growth string; `false` after the last one.
fn next_rgs(a: &mut [u32]) -> bool {
    let len = a.len();
    let mut prefix_max = vec![0u32; len];
    for i in 1..len {
        prefix_max[i] = prefix_max[i - 1].max(a[i - 1]);
    }
    for i in (1..len).rev() {
        if a[i] <= prefix_max[i] {
            a[i] += 1;
            for x in a.iter_mut().skip(i + 1) {
                *x = 0;
            }
            return true;
        }
    }
    false
}

/// Least `N` in `lo..=hi` for which [`er_search`] succeeds, if any.
pub fn er_number(n: usize, m: usize, lo: u32, hi: u32, budget: Option<u64>) -> Result<Option<u32>> {
    for domain in lo..=hi {
        if let ErOutcome::AllColoringsOk { .. } = er_search(n, m, domain, budget)? {
            return Ok(Some(domain));
        }
    }
    Ok(None)
}
