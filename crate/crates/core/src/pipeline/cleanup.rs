//! Unary cleanups: making height functions one-sided and unary colorings
//! constant or one-to-one.

use std::collections::HashMap;

use crate::combinatorics::SortedSubset;

/// A unary function on elements.
pub type Unary<'a> = &'a dyn Fn(u32) -> u64;

/// Which side of `(*)` a height function is on over a set: `Some(true)` if
/// `h(i) >= j` for all `i < j`, `Some(false)` if `h(i) < j` for all `i < j`.
/// A set with fewer than two elements satisfies both; `Some(true)` is reported.
pub fn h_regime(set: &[u32], h: Unary<'_>) -> Option<bool> {
    let Some(&top) = set.last() else {
        return Some(true);
    };
    // h(i) >= j for every later j iff h(i) >= max; h(i) < j for every later
    // j iff h(i) < the next element
    let high = set[..set.len() - 1].iter().all(|&i| h(i) >= u64::from(top));
    let low = set.windows(2).all(|w| h(w[0]) < u64::from(w[1]));
    match (high, low) {
        (true, _) => Some(true),
        (false, true) => Some(false),
        _ => None,
    }
}

/// Finds `A'' ⊆ a` with `|A''| = m0` on which every `h_k` is one-sided in
/// the sense of [`h_regime`]. Heights below their argument are raised to it
/// first, which changes no comparison `h(i)` against `j > i`.
pub fn cleanup_h(a: &[u32], hs: &[Unary<'_>], m0: usize) -> Option<SortedSubset> {
    let mut s = cleanup_h_run(a, hs, Some(m0));
    if s.len() < m0 {
        return None;
    }
    s.truncate(m0);
    Some(SortedSubset::new(s).expect("subsets of a sorted set are sorted"))
}

/// [`cleanup_h`] keeping as many elements as the greedy choices allow.
pub fn cleanup_h_max(a: &[u32], hs: &[Unary<'_>]) -> SortedSubset {
    SortedSubset::new(cleanup_h_run(a, hs, None)).expect("subsets of a sorted set are sorted")
}

fn cleanup_h_run(a: &[u32], hs: &[Unary<'_>], goal: Option<usize>) -> Vec<u32> {
    let clamp = |k: usize, i: u32| hs[k](i).max(u64::from(i));
    if hs.is_empty() || a.is_empty() {
        return a.to_vec();
    }
    // keep the largest class of elements sharing the order type of
    // (h_0(i), ..., h_{k-1}(i)); on it the functions are pointwise ordered
    let order_type = |i: u32| -> Vec<usize> {
        let vals: Vec<u64> = (0..hs.len()).map(|k| clamp(k, i)).collect();
        vals.iter().map(|v| vals.iter().filter(|w| *w < v).count()).collect()
    };
    let mut classes: HashMap<Vec<usize>, Vec<u32>> = HashMap::new();
    let mut first_seen: Vec<Vec<usize>> = Vec::new();
    for &i in a {
        let t = order_type(i);
        let e = classes.entry(t.clone()).or_default();
        if e.is_empty() {
            first_seen.push(t);
        }
        e.push(i);
    }
    let best_type = first_seen
        .iter()
        .max_by(|x, y| classes[*x].len().cmp(&classes[*y].len()).then(std::cmp::Ordering::Greater))
        .unwrap()
        .clone();
    let mut order: Vec<usize> = (0..hs.len()).collect();
    order.sort_by_key(|&k| (best_type[k], k));
    let mut s = classes.remove(&best_type).unwrap();

    for &k in &order {
        let h = |i: u32| clamp(k, i);
        let clique = largest_high_block(&s, &h);
        let chain = longest_low_chain(&s, &h);
        let take_high = match goal {
            Some(g) => clique.len() >= g,
            None => clique.len() >= chain.len(),
        };
        if take_high {
            // later functions are pointwise larger, so they are high here too
            return clique;
        }
        s = chain;
    }
    s
}

/// Largest `T ⊆ s` with `h(i) >= max T` for every `i ∈ T`.
fn largest_high_block(s: &[u32], h: &dyn Fn(u32) -> u64) -> Vec<u32> {
    let mut best: Vec<u32> = Vec::new();
    for (x, &top) in s.iter().enumerate() {
        let t: Vec<u32> = s[..=x].iter().copied().filter(|&i| h(i) >= u64::from(top)).collect();
        if t.len() > best.len() {
            best = t;
        }
    }
    best
}

/// Longest chain `i_1 < i_2 < ...` in `s` with `h(i_a) < i_{a+1}`, by
/// picking intervals `[i, h(i)]` in order of their right ends.
fn longest_low_chain(s: &[u32], h: &dyn Fn(u32) -> u64) -> Vec<u32> {
    let mut by_end: Vec<(u64, u32)> = s.iter().map(|&i| (h(i), i)).collect();
    by_end.sort_unstable();
    let mut chain = Vec::new();
    let mut last_end: Option<u64> = None;
    for (end, i) in by_end {
        if last_end.is_none_or(|e| u64::from(i) > e) {
            chain.push(i);
            last_end = Some(end);
        }
    }
    chain.sort_unstable();
    chain
}

/// Whether every `f` is constant or one-to-one and every `g` is constant on `set`.
pub fn is_constant_or_injective(set: &[u32], fs: &[Unary<'_>], gs: &[Unary<'_>]) -> bool {
    let distinct = |f: Unary<'_>| {
        let mut v: Vec<u64> = set.iter().map(|&i| f(i)).collect();
        v.sort_unstable();
        v.dedup();
        v.len()
    };
    fs.iter().all(|&f| {
        let d = distinct(f);
        d <= 1 || d == set.len()
    }) && gs.iter().all(|&g| distinct(g) <= 1)
}

/// Finds `A' ⊆ a` with `|A'| = m0 + 1` on which every `f_k` is constant or
/// one-to-one and every `g_k` is constant.
pub fn constant_or_injective(a: &[u32], fs: &[Unary<'_>], gs: &[Unary<'_>], m0: usize) -> Option<SortedSubset> {
    let mut s = coi_run(a, fs, gs);
    if s.len() <= m0 {
        return None;
    }
    s.truncate(m0 + 1);
    Some(SortedSubset::new(s).expect("subsets of a sorted set are sorted"))
}

/// [`constant_or_injective`] without truncation.
pub fn constant_or_injective_max(a: &[u32], fs: &[Unary<'_>], gs: &[Unary<'_>]) -> SortedSubset {
    SortedSubset::new(coi_run(a, fs, gs)).expect("subsets of a sorted set are sorted")
}

/// Groups `s` by value, in order of first appearance.
fn classes(s: &[u32], f: Unary<'_>) -> Vec<Vec<u32>> {
    let mut idx: HashMap<u64, usize> = HashMap::new();
    let mut out: Vec<Vec<u32>> = Vec::new();
    for &i in s {
        let next = out.len();
        let c = *idx.entry(f(i)).or_insert(next);
        if c == out.len() {
            out.push(Vec::new());
        }
        out[c].push(i);
    }
    out
}

fn largest(classes: Vec<Vec<u32>>) -> Vec<u32> {
    // earliest class wins ties
    let mut best: Vec<u32> = Vec::new();
    for c in classes {
        if c.len() > best.len() {
            best = c;
        }
    }
    best
}

fn coi_run(a: &[u32], fs: &[Unary<'_>], gs: &[Unary<'_>]) -> Vec<u32> {
    let mut s = a.to_vec();
    for &g in gs {
        s = largest(classes(&s, g));
    }
    for &f in fs {
        let cls = classes(&s, f);
        let reps: Vec<u32> = cls.iter().map(|c| c[0]).collect();
        let same = largest(cls);
        s = if same.len() >= reps.len() { same } else { reps };
        s.sort_unstable();
    }
    s
}
