//! Arity step-down: from `n⊗`-place colorings to data on `n*`-sets.
//!
//! A [`StepDownState`] at level `n*` carries a set `A'`, anchors
//! `w* = {j*_{n*} < j*_{n*+1} < ...}` above `A'` and, for each
//! `u ∈ [A']^{n*}`, a value `g'(u)`, a set `g_k(u)` of relevant tail
//! positions and a height `h_k(u)`. With `d = n⊗ - n*` and all `w` taken
//! from `[A'_{>max u}]^d` the state promises:
//!
//! - (a) `g(u ∪ w) = g'(u) = g(u ∪ w*)`;
//! - (b) `g_k(u) ⊆ {n*+1, ..., n⊗-1}` (0-based positions);
//! - (c) if `w1, w2` agree on the positions in `g_k(u)` and
//!   `min(w1 ∪ w2) < h_k(u)` forces `min w1 = min w2`, then
//!   `f_k(u ∪ w1) = f_k(u ∪ w2)`;
//! - (d) moving the element at position `p > n*` (everything else fixed) keeps
//!   the color iff `p ∉ g_k(u)`; moving the one at position `n*` from `i` to
//!   a larger `j` keeps it iff `h_k(u) <= i`;
//! - (e) for neighbors `u0, u1`, `f_k(u0 ∪ w) = f_k(u1 ∪ w)` iff
//!   `f_k(u0 ∪ w*) = f_k(u1 ∪ w*)`.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{StageFailure, StageRecord, Target};
use crate::coloring::{FnColoring, NPlace};
use crate::combinatorics::{binom_u64, for_each_subset, for_each_subset_while, rank_indices, SortedSubset};
use crate::error::{Error, Result};
use crate::ramification::{build_tree, build_tree_to, extract, extract_deepest, RamInput};

/// Largest table a state may hold.
pub const MAX_TABLE: u64 = 1 << 26;

/// Per-`u` data, indexed by the colex rank of `u` inside `A'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Table<T> {
    Const(T),
    Dense(Vec<T>),
}

impl<T: Copy + PartialEq> Table<T> {
    pub fn get(&self, rank: usize) -> T {
        match self {
            Table::Const(v) => *v,
            Table::Dense(v) => v[rank],
        }
    }

    /// A dense table, collapsed to a constant when all entries agree.
    pub fn from_vec(v: Vec<T>, empty: T) -> Self {
        match v.first() {
            None => Table::Const(empty),
            Some(&x) if v.iter().all(|&y| y == x) => Table::Const(x),
            Some(_) => Table::Dense(v),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StepDownState {
    pub n_star: usize,
    pub n_top: usize,
    pub ground: SortedSubset,
    /// `j*_{n*}, j*_{n*+1}, ..., j*_{n⊗-1}`, increasing.
    pub anchors: Vec<u32>,
    pub g_prime: Table<u64>,
    /// `g_k(u)` as a bit mask over 0-based positions.
    pub g_sets: Vec<Table<u32>>,
    pub heights: Vec<Table<u64>>,
}

fn table_len(ground: usize, arity: usize) -> Result<usize> {
    match binom_u64(ground as u64, arity as u64) {
        Some(c) if c <= MAX_TABLE => Ok(c as usize),
        c => Err(Error::BudgetExceeded {
            what: "step-down table",
            count: c.map_or_else(|| "more than 2^64".into(), |c| c.to_string()),
            budget: MAX_TABLE,
        }),
    }
}

impl StepDownState {
    /// The trivial state `n* = n⊗`: `g' = g`, `g_k = ∅`, `h_k = 0`, no anchors.
    pub fn identity(ground: SortedSubset, n: usize, k: usize, g: &dyn NPlace) -> Result<Self> {
        let len = table_len(ground.len(), n)?;
        let mut vals = Vec::with_capacity(len);
        for_each_subset(ground.as_slice(), n, |u| vals.push(g.color(u)));
        Ok(StepDownState {
            n_star: n,
            n_top: n,
            ground,
            anchors: Vec::new(),
            g_prime: Table::from_vec(vals, 0),
            g_sets: vec![Table::Const(0); k],
            heights: vec![Table::Const(0); k],
        })
    }

    pub fn coloring_count(&self) -> usize {
        self.g_sets.len()
    }

    /// `n⊗ - n*`, the length of the tails `w`.
    pub fn tail_len(&self) -> usize {
        self.n_top - self.n_star
    }

    /// Colex rank of `u` among the `n*`-subsets of `A'`.
    pub fn local_rank(&self, u: &[u32]) -> Option<usize> {
        if u.len() != self.n_star {
            return None;
        }
        let g = self.ground.as_slice();
        let mut idx = Vec::with_capacity(u.len());
        for x in u {
            idx.push(g.binary_search(x).ok()?);
        }
        Some(rank_indices(&idx) as usize)
    }

    fn rank_of(&self, u: &[u32]) -> usize {
        self.local_rank(u)
            .unwrap_or_else(|| panic!("{u:?} is not an {}-subset of A'", self.n_star))
    }

    pub fn g_prime_at(&self, u: &[u32]) -> u64 {
        self.g_prime.get(self.rank_of(u))
    }

    pub fn g_set(&self, k: usize, u: &[u32]) -> u32 {
        self.g_sets[k].get(self.rank_of(u))
    }

    pub fn height(&self, k: usize, u: &[u32]) -> u64 {
        self.heights[k].get(self.rank_of(u))
    }

    /// Sets `g_k(u)` for `u ∈ [A']^{n*}` (test and tooling hook).
    pub fn set_g_set(&mut self, k: usize, u: &[u32], mask: u32) {
        let r = self.rank_of(u);
        let len = table_len(self.ground.len(), self.n_star).expect("state table fits");
        let t = &mut self.g_sets[k];
        if let Table::Const(c) = *t {
            *t = Table::Dense(vec![c; len]);
        }
        if let Table::Dense(v) = t {
            v[r] = mask;
        }
    }
}

/// Inputs of the step-down.
pub struct StepDownInput<'a> {
    pub ground: SortedSubset,
    pub colorings: Vec<&'a dyn NPlace>,
    pub values: &'a dyn NPlace,
    pub value_bound: usize,
    pub n_top: usize,
    pub n_star: usize,
}

/// Where `h_k(U)` of an `(n*+1)`-set sits relative to the set it lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum HClass {
    /// At most the next element of `A'` after `max U`, or nothing is above.
    Low,
    /// Above `max A'`.
    High,
    Mid,
}

fn hclass(h: u64, u_max: u32, ground: &[u32]) -> HClass {
    let next = ground.partition_point(|&x| x <= u_max);
    match ground.get(next) {
        None => HClass::Low,
        Some(&nx) if h <= u64::from(nx) => HClass::Low,
        _ if h > u64::from(*ground.last().unwrap()) => HClass::High,
        _ => HClass::Mid,
    }
}

/// Runs the step-down from `n⊗` to `n*`. `targets[i]` is the ramification
/// target producing level `n* + i`. The result is verified (within
/// `verify_budget` checked instances) before it is returned.
pub fn step_down(
    input: &StepDownInput<'_>,
    targets: &[Target],
    log: &mut Vec<StageRecord>,
    verify_budget: u64,
) -> Result<StepDownState> {
    let (n_top, n_star) = (input.n_top, input.n_star);
    if n_star == 0 || n_top < n_star || n_top > 31 {
        return Err(Error::InvalidArgument(format!("need 31 >= n⊗ >= n* >= 1, got n⊗={n_top}, n*={n_star}")));
    }
    if input.colorings.is_empty() || input.colorings.iter().any(|f| f.arity() != n_top) {
        return Err(Error::InvalidArgument(format!("need at least one coloring, all of arity {n_top}")));
    }
    if input.values.arity() != n_top {
        return Err(Error::InvalidArgument("value map arity differs from n⊗".into()));
    }
    if targets.len() < n_top - n_star {
        return Err(Error::InvalidArgument(format!("need {} ramification targets, got {}", n_top - n_star, targets.len())));
    }
    if input.ground.len() < n_top {
        return Err(StageFailure::new("step_down", format!("|A| = {} is below n⊗ = {n_top}", input.ground.len())).into());
    }
    let state = step_rec(input, n_star, targets, log)?;
    let report = verify_stepdown(&state, &input.colorings, input.values, verify_budget, 0)?;
    log.push(StageRecord {
        verified_instances: Some(report.instances),
        exhaustive: Some(report.exhaustive),
        ..StageRecord::new("step_down_verify", state.ground.len())
    });
    if let Some(v) = report.violation {
        return Err(StageFailure::new(
            "step_down_verify",
            format!("clause ({}) fails: {}", v.clause, v.detail),
        )
        .into());
    }
    Ok(state)
}

fn step_rec(input: &StepDownInput<'_>, n_star: usize, targets: &[Target], log: &mut Vec<StageRecord>) -> Result<StepDownState> {
    let k = input.colorings.len();
    let n_top = input.n_top;
    if n_star == n_top {
        return StepDownState::identity(input.ground.clone(), n_top, k, input.values);
    }
    let s1 = step_rec(input, n_star + 1, &targets[1..], log)?;
    let r = n_star + 1;
    let a1 = s1.ground.as_slice();
    let old_anchors = &s1.anchors;

    let fs: Vec<_> = input
        .colorings
        .iter()
        .map(|&f| {
            FnColoring::new(r, move |u: &[u32]| {
                let mut t = Vec::with_capacity(n_top);
                t.extend_from_slice(u);
                t.extend_from_slice(old_anchors);
                f.color(&t)
            })
        })
        .collect();

    // the value map carries g', every g_k and where every h_k sits
    let identity_below = s1.n_star == n_top;
    let (g_tab, t_bound) = if identity_below {
        (None, input.value_bound)
    } else {
        let len = table_len(a1.len(), r)?;
        let mut ids: HashMap<(u64, Vec<u32>, Vec<HClass>), u64> = HashMap::new();
        let mut tab = Vec::with_capacity(len);
        let mut rank = 0usize;
        for_each_subset(a1, r, |u| {
            let key = (
                s1.g_prime.get(rank),
                (0..k).map(|q| s1.g_sets[q].get(rank)).collect::<Vec<_>>(),
                (0..k)
                    .map(|q| hclass(s1.heights[q].get(rank), u[r - 1], a1))
                    .collect::<Vec<_>>(),
            );
            let next = ids.len() as u64;
            tab.push(*ids.entry(key).or_insert(next));
            rank += 1;
        });
        let t = ids.len().max(1);
        (Some(tab), t)
    };
    let g_fn = FnColoring::new(r, |u: &[u32]| match &g_tab {
        Some(tab) => tab[s1.rank_of(u)],
        None => input.values.color(&[u, old_anchors.as_slice()].concat()),
    });
    let values: &dyn NPlace = &g_fn;

    let target = &targets[0];
    let ram = RamInput {
        ground: s1.ground.clone(),
        arity: r,
        colorings: fs.iter().map(|f| f as &dyn NPlace).collect(),
        heights: Vec::new(),
        values,
        value_bound: t_bound,
        target: match target {
            Target::Size(m) => *m,
            Target::Max { cap } => cap.saturating_sub(1),
        },
    };
    let stage = format!("ramification_{n_star}");
    let out = match target {
        Target::Size(m) => {
            let tree = build_tree(&ram)?;
            extract(&tree, *m).map_err(|f| {
                StageFailure::new(
                    &stage,
                    format!(
                        "tree on {} elements reached level {}, needed level {}",
                        a1.len(),
                        f.deepest_level,
                        f.wanted_level
                    ),
                )
            })?
        }
        Target::Max { cap } => {
            let tree = build_tree_to(&ram, *cap)?;
            extract_deepest(&tree)
                .ok_or_else(|| StageFailure::new(&stage, format!("tree on {} elements has no second level", a1.len())))?
        }
    };
    log.push(StageRecord {
        output_size: Some(out.a_star.len()),
        target: Some(target.describe()),
        ..StageRecord::new(&stage, a1.len())
    });
    if out.a_star.len() < n_star {
        return Err(StageFailure::new(&stage, format!("|A*| = {} is below n* = {n_star}", out.a_star.len())).into());
    }

    let a_star = out.a_star;
    let j = out.j_star;
    let d_new = n_top - n_star;
    let len = table_len(a_star.len(), n_star)?;
    let mut g_prime = Vec::with_capacity(len);
    let mut g_sets: Vec<Vec<u32>> = vec![Vec::with_capacity(len); k];
    let mut heights: Vec<Vec<u64>> = vec![Vec::with_capacity(len); k];
    let mut failure: Option<StageFailure> = None;
    let sa = a_star.as_slice();
    let mut big_u = vec![0u32; r];
    for_each_subset_while(sa, n_star, |u| {
        big_u[..n_star].copy_from_slice(u);
        big_u[n_star] = j;
        g_prime.push(s1.g_prime_at(&big_u));
        let above = a_star.above(u[n_star - 1]);
        for q in 0..k {
            // h: one past the last i whose color against u differs from j*'s
            let cj = fs[q].color(&big_u);
            let mut tuple = big_u.clone();
            let differs: Vec<bool> = above
                .iter()
                .map(|&i| {
                    tuple[n_star] = i;
                    fs[q].color(&tuple) != cj
                })
                .collect();
            let last = differs.iter().rposition(|&b| b);
            if let Some(p) = last {
                if differs[..p].iter().any(|&b| !b) {
                    failure = Some(StageFailure::new(
                        &stage,
                        format!("B_u for u = {u:?} is not an initial segment"),
                    ));
                    return false;
                }
            }
            heights[q].push(last.map_or(0, |p| u64::from(above[p]) + 1));

            let mut mask = s1.g_sets[q].get(s1.rank_of(&big_u));
            if n_star + 1 < n_top {
                match position_relevant(&s1, q, u, above, d_new) {
                    Ok(true) => mask |= 1 << (n_star + 1),
                    Ok(false) => {}
                    Err(msg) => {
                        failure = Some(StageFailure::new(&stage, msg));
                        return false;
                    }
                }
            }
            g_sets[q].push(mask);
        }
        true
    });
    if let Some(f) = failure {
        return Err(f.into());
    }
    let mut anchors = vec![j];
    anchors.extend_from_slice(old_anchors);
    Ok(StepDownState {
        n_star,
        n_top,
        ground: a_star,
        anchors,
        g_prime: Table::from_vec(g_prime, 0),
        g_sets: g_sets.into_iter().map(|v| Table::from_vec(v, 0)).collect(),
        heights: heights.into_iter().map(|v| Table::from_vec(v, 0)).collect(),
    })
}

/// Whether position `n*+1` matters after `u`: moving the second tail element
/// from `x` to a larger one changes the color iff `h_old(u ∪ {j}) > x`. This
/// must not depend on the first tail element `j`.
fn position_relevant(s1: &StepDownState, q: usize, u: &[u32], above: &[u32], d_new: usize) -> std::result::Result<bool, String> {
    let mut seen = [false; 2];
    let mut big_u = u.to_vec();
    big_u.push(0);
    let n = u.len();
    for (a, &jj) in above.iter().enumerate() {
        big_u[n] = jj;
        let h = s1.height(q, &big_u);
        for (b, &x) in above.iter().enumerate().skip(a + 1) {
            // x needs the moved-to element and the rest of the tail above it
            if above.len() - b > d_new - 1 {
                seen[usize::from(h > u64::from(x))] = true;
            }
        }
    }
    match seen {
        [true, true] => Err(format!(
            "relevance of position {} after u = {u:?} depends on the first tail element",
            n + 1
        )),
        [false, true] => Ok(true),
        // no pair can witness the position, so it never matters
        [_, false] => Ok(false),
    }
}

/// A failed state clause with a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepViolation {
    pub clause: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub violation: Option<StepViolation>,
    /// Clause instances examined.
    pub instances: u64,
    /// False when the instance count exceeded the budget and instances were sampled.
    pub exhaustive: bool,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

fn tuple(parts: &[&[u32]]) -> Vec<u32> {
    parts.concat()
}

/// Checks clauses (a) to (e). Exhaustive when the instance count is at most
/// `budget`, otherwise `budget` instances are sampled with `seed`.
pub fn verify_stepdown(state: &StepDownState, fs: &[&dyn NPlace], g: &dyn NPlace, budget: u64, seed: u64) -> Result<VerifyReport> {
    let v = |clause: &'static str, detail: String| StepViolation { clause, detail };
    let ns = state.n_star;
    let d = state.tail_len();
    let a = state.ground.as_slice();
    if fs.len() != state.coloring_count() || fs.iter().any(|f| f.arity() != state.n_top) {
        return Err(Error::InvalidArgument("colorings do not match the state".into()));
    }
    // shape
    if state.anchors.len() != d
        || !crate::combinatorics::is_strictly_increasing(&state.anchors)
        || state.anchors.first().is_some_and(|&j| a.last().is_some_and(|&m| j <= m))
    {
        return Ok(VerifyReport {
            violation: Some(v("shape", "anchors are not an increasing run above A'".into())),
            instances: 0,
            exhaustive: true,
        });
    }
    let allowed: u32 = (ns + 1..state.n_top).fold(0, |m, p| m | 1 << p);
    let mut bad_b = None;
    for_each_subset_while(a, ns, |u| {
        for q in 0..fs.len() {
            if state.g_set(q, u) & !allowed != 0 {
                bad_b = Some(v("b", format!("g_{q}({u:?}) uses a position outside {}..{}", ns + 1, state.n_top)));
                return false;
            }
        }
        true
    });
    if bad_b.is_some() {
        return Ok(VerifyReport {
            violation: bad_b,
            instances: 0,
            exhaustive: true,
        });
    }
    if d == 0 {
        return Ok(VerifyReport {
            violation: None,
            instances: 0,
            exhaustive: true,
        });
    }
    let c = |x: usize| binom_u64(a.len() as u64, x as u64).unwrap_or(u64::MAX);
    let k = fs.len() as u64;
    let total = c(state.n_top)
        .saturating_mul(1 + k)
        .saturating_add(c(state.n_top + 1).saturating_mul((d as u64 + ns as u64) * k));
    if total <= budget {
        Ok(verify_exhaustive(state, fs, g, total))
    } else {
        Ok(verify_sampled(state, fs, g, budget, seed))
    }
}

fn sel_key(w: &[u32], mask: u32, ns: usize, h: u64) -> (Vec<u32>, Option<u32>) {
    let sel = w
        .iter()
        .enumerate()
        .filter(|&(p, _)| mask & (1 << (ns + p)) != 0)
        .map(|(_, &x)| x)
        .collect();
    let first = (u64::from(w[0]) < h).then_some(w[0]);
    (sel, first)
}

fn check_d(state: &StepDownState, f: &dyn NPlace, q: usize, u: &[u32], t: &[u32], pos: usize) -> Option<StepViolation> {
    let ns = state.n_star;
    let (i, j) = (t[pos], t[pos + 1]);
    let w1 = &t[..pos];
    let w2 = &t[pos + 2..];
    let eq = f.color(&tuple(&[u, w1, &[i], w2])) == f.color(&tuple(&[u, w1, &[j], w2]));
    let want = if pos > 0 {
        state.g_set(q, u) & (1 << (ns + pos)) == 0
    } else {
        state.height(q, u) <= u64::from(i)
    };
    (eq != want).then(|| StepViolation {
        clause: if pos > 0 { "d)(i" } else { "d)(ii" },
        detail: format!("k={q}, u={u:?}, w1={w1:?}, i={i}, j={j}, w2={w2:?}"),
    })
}

fn check_e(state: &StepDownState, f: &dyn NPlace, q: usize, s: &[u32], p: usize, w: &[u32]) -> Option<StepViolation> {
    let u0: Vec<u32> = s.iter().enumerate().filter(|&(x, _)| x != p + 1).map(|(_, &y)| y).collect();
    let u1: Vec<u32> = s.iter().enumerate().filter(|&(x, _)| x != p).map(|(_, &y)| y).collect();
    let at_star = f.color(&tuple(&[&u0, &state.anchors])) == f.color(&tuple(&[&u1, &state.anchors]));
    let here = f.color(&tuple(&[&u0, w])) == f.color(&tuple(&[&u1, w]));
    (here != at_star).then(|| StepViolation {
        clause: "e",
        detail: format!("k={q}, u0={u0:?}, u1={u1:?}, w={w:?}"),
    })
}

fn verify_exhaustive(state: &StepDownState, fs: &[&dyn NPlace], g: &dyn NPlace, total: u64) -> VerifyReport {
    let ns = state.n_star;
    let d = state.tail_len();
    let a = state.ground.as_slice();
    let mut found: Option<StepViolation> = None;
    for_each_subset_while(a, ns, |u| {
        let gp = state.g_prime_at(u);
        if g.color(&tuple(&[u, &state.anchors])) != gp {
            found = Some(StepViolation {
                clause: "a",
                detail: format!("g(u ∪ w*) != g'(u) at u={u:?}"),
            });
            return false;
        }
        let above = state.ground.above(u[ns - 1]);
        let masks: Vec<u32> = (0..fs.len()).map(|q| state.g_set(q, u)).collect();
        let hs: Vec<u64> = (0..fs.len()).map(|q| state.height(q, u)).collect();
        let mut groups: Vec<HashMap<(Vec<u32>, Option<u32>), (u64, Vec<u32>)>> = vec![HashMap::new(); fs.len()];
        let ok = for_each_subset_while(above, d, |w| {
            let t = tuple(&[u, w]);
            if g.color(&t) != gp {
                found = Some(StepViolation {
                    clause: "a",
                    detail: format!("g(u ∪ w) != g'(u) at u={u:?}, w={w:?}"),
                });
                return false;
            }
            for (q, f) in fs.iter().enumerate() {
                let col = f.color(&t);
                let key = sel_key(w, masks[q], ns, hs[q]);
                match groups[q].get(&key) {
                    Some((c0, w0)) if *c0 != col => {
                        found = Some(StepViolation {
                            clause: "c",
                            detail: format!("k={q}, u={u:?}, w1={w0:?}, w2={w:?}"),
                        });
                        return false;
                    }
                    Some(_) => {}
                    None => {
                        groups[q].insert(key, (col, w.to_vec()));
                    }
                }
            }
            true
        });
        if !ok {
            return false;
        }
        for_each_subset_while(above, d + 1, |t| {
            for (q, f) in fs.iter().enumerate() {
                for pos in 0..d {
                    if let Some(x) = check_d(state, *f, q, u, t, pos) {
                        found = Some(x);
                        return false;
                    }
                }
            }
            true
        })
    });
    if found.is_none() {
        for_each_subset_while(a, ns + 1, |s| {
            for_each_subset_while(state.ground.above(s[ns]), d, |w| {
                for (q, f) in fs.iter().enumerate() {
                    for p in 0..ns {
                        if let Some(x) = check_e(state, *f, q, s, p, w) {
                            found = Some(x);
                            return false;
                        }
                    }
                }
                true
            })
        });
    }
    VerifyReport {
        violation: found,
        instances: total,
        exhaustive: true,
    }
}

fn verify_sampled(state: &StepDownState, fs: &[&dyn NPlace], g: &dyn NPlace, budget: u64, seed: u64) -> VerifyReport {
    let ns = state.n_star;
    let n = state.n_top;
    let d = state.tail_len();
    let a = state.ground.as_slice();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng, size: usize| -> Vec<u32> {
        let mut idx = sample(rng, a.len(), size).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| a[i]).collect()
    };
    let can_wide = a.len() > n;
    for step in 0..budget {
        let q = rng.gen_range(0..fs.len());
        let f = fs[q];
        let found = match step % 4 {
            0 => {
                let s = pick(&mut rng, n);
                let (u, w) = s.split_at(ns);
                let gp = state.g_prime_at(u);
                (g.color(&s) != gp || g.color(&tuple(&[u, &state.anchors])) != gp).then(|| StepViolation {
                    clause: "a",
                    detail: format!("u={u:?}, w={w:?}"),
                })
            }
            1 => {
                let s = pick(&mut rng, n);
                let (u, w1) = s.split_at(ns);
                let above = state.ground.above(u[ns - 1]);
                let mut idx = sample(&mut rng, above.len(), d).into_vec();
                idx.sort_unstable();
                let w2: Vec<u32> = idx.into_iter().map(|i| above[i]).collect();
                let (mask, h) = (state.g_set(q, u), state.height(q, u));
                (sel_key(w1, mask, ns, h) == sel_key(&w2, mask, ns, h)
                    && f.color(&s) != f.color(&tuple(&[u, &w2])))
                .then(|| StepViolation {
                    clause: "c",
                    detail: format!("k={q}, u={u:?}, w1={w1:?}, w2={w2:?}"),
                })
            }
            2 if can_wide => {
                let s = pick(&mut rng, n + 1);
                let (u, t) = s.split_at(ns);
                check_d(state, f, q, u, t, rng.gen_range(0..d))
            }
            3 if can_wide => {
                let s = pick(&mut rng, n + 1);
                let (head, w) = s.split_at(ns + 1);
                check_e(state, f, q, head, rng.gen_range(0..ns), w)
            }
            _ => None,
        };
        if found.is_some() {
            return VerifyReport {
                violation: found,
                instances: step + 1,
                exhaustive: false,
            };
        }
    }
    VerifyReport {
        violation: None,
        instances: budget,
        exhaustive: false,
    }
}
