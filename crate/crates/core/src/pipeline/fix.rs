//! Random repair: a random `m`-subset on which the step-down data describes
//! colors exactly, not only up to the one-sided guarantees of the state.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use super::stepdown::StepDownState;
use crate::coloring::NPlace;
use crate::combinatorics::{for_each_subset_while, SortedSubset};
use crate::error::{Error, Result};

/// Tail positions that decide colors after `u` inside `s`: `g_k(u)`, plus
/// position `n*` when `h_k(u)` lies above the next element of `s`.
pub fn effective_positions(state: &StepDownState, k: usize, u: &[u32], s: &[u32]) -> u32 {
    let ns = state.n_star;
    let mut mask = state.g_set(k, u);
    let next = s.partition_point(|&x| x <= u[ns - 1]);
    if s.get(next).is_some_and(|&x| state.height(k, u) > u64::from(x)) {
        mask |= 1 << ns;
    }
    mask
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixViolation {
    pub k: usize,
    pub u: Vec<u32>,
    pub w1: Vec<u32>,
    pub w2: Vec<u32>,
}

/// Checks that for every `u ∈ [s]^{n*}` and `k`, `f_k(u ∪ w1) = f_k(u ∪ w2)`
/// exactly when `w1, w2 ⊆ s` agree on [`effective_positions`].
pub fn check_fix(state: &StepDownState, fs: &[&dyn NPlace], s: &[u32]) -> Option<FixViolation> {
    let ns = state.n_star;
    let d = state.tail_len();
    let mut found = None;
    for_each_subset_while(s, ns, |u| {
        let above = &s[s.partition_point(|&x| x <= u[ns - 1])..];
        for (k, f) in fs.iter().enumerate() {
            let mask = effective_positions(state, k, u, s);
            let mut color_of: HashMap<Vec<u32>, (u64, Vec<u32>)> = HashMap::new();
            let mut key_of: HashMap<u64, (Vec<u32>, Vec<u32>)> = HashMap::new();
            let mut t: Vec<u32> = u.to_vec();
            let ok = for_each_subset_while(above, d, |w| {
                t.truncate(ns);
                t.extend_from_slice(w);
                let c = f.color(&t);
                let key: Vec<u32> = w
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| mask & (1 << (ns + p)) != 0)
                    .map(|(_, &x)| x)
                    .collect();
                let clash = match color_of.get(&key) {
                    Some((c0, w0)) if *c0 != c => Some(w0.clone()),
                    Some(_) => None,
                    None => {
                        color_of.insert(key.clone(), (c, w.to_vec()));
                        None
                    }
                }
                .or_else(|| match key_of.get(&c) {
                    Some((k0, w0)) if *k0 != key => Some(w0.clone()),
                    Some(_) => None,
                    None => {
                        key_of.insert(c, (key, w.to_vec()));
                        None
                    }
                });
                if let Some(w0) = clash {
                    found = Some(FixViolation {
                        k,
                        u: u.to_vec(),
                        w1: w0,
                        w2: w.to_vec(),
                    });
                    return false;
                }
                true
            });
            if !ok {
                return false;
            }
        }
        true
    });
    found
}

#[derive(Clone, Debug, Serialize)]
pub struct FixOutcome {
    pub subset: Option<SortedSubset>,
    /// Draws made, including the successful one.
    pub attempts: usize,
}

fn check_args(a2: &[u32], state: &StepDownState, fs: &[&dyn NPlace], m: usize) -> Result<()> {
    if m < state.n_star || a2.len() < m {
        return Err(Error::InvalidArgument(format!(
            "need n* = {} <= m = {m} <= |A''| = {}",
            state.n_star,
            a2.len()
        )));
    }
    if !a2.iter().all(|&x| state.ground.contains(x)) {
        return Err(Error::InvalidArgument("A'' is not inside the state's set".into()));
    }
    if fs.len() != state.coloring_count() || fs.iter().any(|f| f.arity() != state.n_top) {
        return Err(Error::InvalidArgument("colorings do not match the state".into()));
    }
    Ok(())
}

/// Draws `m`-subsets of `a2` until one passes [`check_fix`], at most
/// `retry_budget` times.
pub fn random_fix<R: Rng>(a2: &[u32], state: &StepDownState, fs: &[&dyn NPlace], m: usize, rng: &mut R, retry_budget: usize) -> Result<FixOutcome> {
    random_fix_with(a2, state, fs, m, rng, retry_budget, |_| true)
}

/// [`random_fix`] that also requires `accept` of the drawn subset.
pub fn random_fix_with<R: Rng>(
    a2: &[u32],
    state: &StepDownState,
    fs: &[&dyn NPlace],
    m: usize,
    rng: &mut R,
    retry_budget: usize,
    mut accept: impl FnMut(&[u32]) -> bool,
) -> Result<FixOutcome> {
    check_args(a2, state, fs, m)?;
    for attempt in 1..=retry_budget {
        let s = draw(a2, m, rng);
        if check_fix(state, fs, &s).is_none() && accept(&s) {
            return Ok(FixOutcome {
                subset: Some(SortedSubset::new(s).expect("sorted draw")),
                attempts: attempt,
            });
        }
    }
    Ok(FixOutcome {
        subset: None,
        attempts: retry_budget,
    })
}

/// One uniform `m`-subset of `a2`, sorted.
pub fn draw<R: Rng>(a2: &[u32], m: usize, rng: &mut R) -> Vec<u32> {
    let mut idx = sample(rng, a2.len(), m).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| a2[i]).collect()
}

/// The colex-least `m`-subset of `a2` passing [`check_fix`], scanning at
/// most `budget` subsets.
pub fn fix_exhaustive(a2: &[u32], state: &StepDownState, fs: &[&dyn NPlace], m: usize, budget: u64) -> Result<Option<SortedSubset>> {
    check_args(a2, state, fs, m)?;
    let mut seen = 0u64;
    let mut out = None;
    for_each_subset_while(a2, m, |s| {
        seen += 1;
        if check_fix(state, fs, s).is_none() {
            out = Some(SortedSubset::new(s.to_vec()).expect("sorted"));
            return false;
        }
        seen < budget
    });
    Ok(out)
}
