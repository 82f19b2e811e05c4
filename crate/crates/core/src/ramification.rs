//! The ramification tree.
//!
//! Given colorings `f_k` of `[A]^r` (`r > 1`), a value map `g` of `[A]^r` with
//! at most `t` values and height functions `h_k` on `[A]^{r-1}`, build a tree
//! on `A` whose branches are sequences along which the last coordinate of
//! every `f_k` and `g` has stabilized. A node `j*` at level `m*+1` yields a
//! set `A*` (its strict ancestors, `m*+1` of them) such that for all
//! `u, v ∈ [A*]^{r-1}`:
//!
//! - (α) for neighbors `u, v` and `i ∈ A*` above both, `f_k(u∪i) = f_k(v∪i)`
//!   iff `f_k(u∪j*) = f_k(v∪j*)`;
//! - (β) for `i0 < i1` in `A*` above `u`, `f_k(u∪i0) = f_k(u∪i1)` iff
//!   `f_k(u∪i0) = f_k(u∪j*)`;
//! - (γ) `g(u∪i) = g(u∪j*)` for `i ∈ A*` above `u`;
//! - (δ) `h_k(u) >= i` has the same truth value for every `i ∈ A*` above `u`
//!   and for `i = j*`.
//!
//! Nodes split their residual set by an equivalence relation `E_B` read off a
//! signature: the truth values of the clauses above for the candidate
//! element against the branch `B`. Only clause instances whose tuples end at
//! `max(B)` are encoded; the others are constant on a residual set already.

use std::collections::HashMap;

use serde::Serialize;

use crate::coloring::NPlace;
use crate::combinatorics::{for_each_subset, SortedSubset};
use crate::error::{Error, Result};

/// Inputs of one ramification run.
pub struct RamInput<'a> {
    pub ground: SortedSubset,
    /// `r`, the arity of the colorings; must exceed 1.
    pub arity: usize,
    pub colorings: Vec<&'a dyn NPlace>,
    /// Height functions on `[A]^{r-1}`; either empty or one per coloring.
    pub heights: Vec<&'a dyn NPlace>,
    pub values: &'a dyn NPlace,
    /// `t`, an upper bound on the number of distinct values of `values`.
    pub value_bound: usize,
    /// `m*`: the run succeeds once some node reaches level `m* + 1`.
    pub target: usize,
}

impl RamInput<'_> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.arity < 2 {
            return bad(format!("ramification needs arity > 1, got {}", self.arity));
        }
        if self.ground.is_empty() {
            return bad("ramification needs a nonempty ground set".into());
        }
        if self.colorings.is_empty() {
            return bad("ramification needs at least one coloring".into());
        }
        if self.value_bound == 0 {
            return bad("value bound t must be positive".into());
        }
        if let Some(f) = self.colorings.iter().find(|f| f.arity() != self.arity) {
            return bad(format!("coloring of arity {} in a ramification of arity {}", f.arity(), self.arity));
        }
        if self.values.arity() != self.arity {
            return bad("value map arity differs from the ramification arity".into());
        }
        if !self.heights.is_empty() && self.heights.len() != self.colorings.len() {
            return bad("need one height function per coloring".into());
        }
        if self.heights.iter().any(|h| h.arity() != self.arity - 1) {
            return bad("height functions must have arity r - 1".into());
        }
        Ok(())
    }

    pub fn coloring_count(&self) -> usize {
        self.colorings.len()
    }
}

/// Encoded clause truth values of a candidate against a branch.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EbSignature(pub Vec<u64>);

/// Signature of `i` against `branch`, restricted to clause instances whose
/// tuples end at `max(branch)`.
///
/// Layout: for each `k`, for each `(r-1)`-subset `T` of `branch \ max` in
/// colex order, the `r-1` neighbor bits (α) of `T ∪ max` followed by its (β)
/// bit; then for each `(r-2)`-subset `T'` the value (γ) of `g(T' ∪ max ∪ i)`;
/// then for each `k` and `T'` the bit (δ) `h_k(T' ∪ max) >= i`.
pub fn eb_signature(branch: &[u32], i: u32, input: &RamInput<'_>) -> Result<EbSignature> {
    if branch.last().is_some_and(|&b| i <= b) {
        return Err(Error::InvalidArgument(format!(
            "candidate {i} is not above the branch maximum {}",
            branch.last().unwrap()
        )));
    }
    Ok(signature_unchecked(branch, i, input))
}

fn signature_unchecked(branch: &[u32], i: u32, input: &RamInput<'_>) -> EbSignature {
    let mut out = Vec::new();
    let Some((&top, rest)) = branch.split_last() else {
        return EbSignature(out);
    };
    let r = input.arity;
    let mut s = vec![0u32; r];
    let mut a = Vec::with_capacity(r);
    let mut b = Vec::with_capacity(r);
    for f in &input.colorings {
        for_each_subset(rest, r - 1, |t| {
            s[..r - 1].copy_from_slice(t);
            s[r - 1] = top;
            for p in 0..r - 1 {
                // u = S \ s[p+1], v = S \ s[p]: neighbors differing at position p
                a.clear();
                a.extend(s.iter().enumerate().filter(|&(q, _)| q != p + 1).map(|(_, &x)| x));
                a.push(i);
                b.clear();
                b.extend(s.iter().enumerate().filter(|&(q, _)| q != p).map(|(_, &x)| x));
                b.push(i);
                out.push(u64::from(f.color(&a) == f.color(&b)));
            }
            a.clear();
            a.extend_from_slice(t);
            a.push(i);
            out.push(u64::from(f.color(&a) == f.color(&s)));
        });
    }
    for_each_subset(rest, r - 2, |t| {
        a.clear();
        a.extend_from_slice(t);
        a.push(top);
        a.push(i);
        out.push(input.values.color(&a));
    });
    for h in &input.heights {
        for_each_subset(rest, r - 2, |t| {
            a.clear();
            a.extend_from_slice(t);
            a.push(top);
            out.push(u64::from(h.color(&a) >= u64::from(i)));
        });
    }
    EbSignature(out)
}

/// Signature against every clause instance inside `branch`, not only those
/// ending at its maximum. A longer branch extends the signature of its
/// prefixes, which is what makes `E_B` refine as `B` grows.
pub fn eb_signature_full(branch: &[u32], i: u32, input: &RamInput<'_>) -> Result<EbSignature> {
    if branch.last().is_some_and(|&b| i <= b) {
        return Err(Error::InvalidArgument(format!("candidate {i} is not above the branch")));
    }
    let mut out = Vec::new();
    for q in 1..=branch.len() {
        out.extend(signature_unchecked(&branch[..q], i, input).0);
    }
    Ok(EbSignature(out))
}

#[derive(Clone, Debug, Serialize)]
pub struct RamNode {
    pub element: u32,
    pub level: usize,
    pub parent: Option<usize>,
    /// `A_j \ {j}`: the rest of the equivalence class this node was picked from.
    pub residual: Vec<u32>,
    pub successors: Vec<usize>,
}

/// The levelled tree; node 0 is `min(A)`.
#[derive(Clone, Debug, Serialize)]
pub struct RamTree {
    pub nodes: Vec<RamNode>,
    /// Levels were expanded up to and including this one.
    pub max_level: usize,
}

impl RamTree {
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.level).max().unwrap_or(0)
    }

    /// Elements on the path from the root to `node`, root first.
    pub fn branch(&self, node: usize) -> Vec<u32> {
        let mut out = Vec::new();
        let mut cur = Some(node);
        while let Some(c) = cur {
            out.push(self.nodes[c].element);
            cur = self.nodes[c].parent;
        }
        out.reverse();
        out
    }

    pub fn level(&self, level: usize) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(move |(_, n)| n.level == level)
            .map(|(i, _)| i)
    }

    pub fn elements(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.nodes.iter().map(|n| n.element).collect();
        v.sort_unstable();
        v
    }

    /// JSON summary for tracing: one record per node.
    pub fn dump(&self) -> serde_json::Value {
        let nodes: Vec<serde_json::Value> = self
            .nodes
            .iter()
            .map(|n| {
                serde_json::json!({
                    "element": n.element,
                    "level": n.level,
                    "parent": n.parent.map(|p| self.nodes[p].element),
                    "class_size": n.residual.len() + 1,
                    "successors": n.successors.len(),
                })
            })
            .collect();
        serde_json::json!({ "depth": self.depth(), "nodes": nodes })
    }
}

/// Builds the tree level by level until `A` is used up or level
/// `input.target + 1` exists.
pub fn build_tree(input: &RamInput<'_>) -> Result<RamTree> {
    build_tree_to(input, input.target + 1)
}

/// [`build_tree`] with an explicit last level to expand into.
pub fn build_tree_to(input: &RamInput<'_>, max_level: usize) -> Result<RamTree> {
    input.validate()?;
    let ground = input.ground.as_slice();
    let mut nodes = vec![RamNode {
        element: ground[0],
        level: 0,
        parent: None,
        residual: ground[1..].to_vec(),
        successors: Vec::new(),
    }];
    let mut frontier = vec![0usize];
    let mut level = 0;
    while level < max_level && !frontier.is_empty() {
        let mut next = Vec::new();
        for &id in &frontier {
            let residual = std::mem::take(&mut nodes[id].residual);
            if residual.is_empty() {
                continue;
            }
            let branch = branch_of(&nodes, id);
            let mut class_of: HashMap<EbSignature, usize> = HashMap::new();
            let mut classes: Vec<Vec<u32>> = Vec::new();
            for &i in &residual {
                let sig = signature_unchecked(&branch, i, input);
                let next_id = classes.len();
                let c = *class_of.entry(sig).or_insert(next_id);
                if c == classes.len() {
                    classes.push(Vec::new());
                }
                classes[c].push(i);
            }
            for class in classes {
                let child = nodes.len();
                nodes.push(RamNode {
                    element: class[0],
                    level: level + 1,
                    parent: Some(id),
                    residual: class[1..].to_vec(),
                    successors: Vec::new(),
                });
                nodes[id].successors.push(child);
                next.push(child);
            }
            nodes[id].residual = residual;
        }
        frontier = next;
        level += 1;
    }
    Ok(RamTree { nodes, max_level })
}

fn branch_of(nodes: &[RamNode], node: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut cur = Some(node);
    while let Some(c) = cur {
        out.push(nodes[c].element);
        cur = nodes[c].parent;
    }
    out.reverse();
    out
}

/// `A*` together with the element `j*` above it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamOutput {
    pub a_star: SortedSubset,
    pub j_star: u32,
}

/// Ramification did not reach the requested level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamFailure {
    pub deepest_level: usize,
    pub wanted_level: usize,
}

/// Takes the first node at level `target + 1` as `j*` and its ancestors as `A*`.
pub fn extract(tree: &RamTree, target: usize) -> std::result::Result<RamOutput, RamFailure> {
    let wanted = target + 1;
    match tree.level(wanted).next() {
        Some(id) => Ok(output_at(tree, id)),
        None => Err(RamFailure {
            deepest_level: tree.depth(),
            wanted_level: wanted,
        }),
    }
}

/// Extraction at the deepest level present; `None` for a lone root.
pub fn extract_deepest(tree: &RamTree) -> Option<RamOutput> {
    let d = tree.depth();
    (d > 0).then(|| output_at(tree, tree.level(d).next().unwrap()))
}

fn output_at(tree: &RamTree, id: usize) -> RamOutput {
    let mut branch = tree.branch(id);
    let j_star = branch.pop().unwrap();
    RamOutput {
        a_star: SortedSubset::new(branch).expect("branches increase"),
        j_star,
    }
}

/// Which output clause failed, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RamViolation {
    Shape(String),
    Alpha { k: usize, u: Vec<u32>, v: Vec<u32>, i: u32 },
    Beta { k: usize, u: Vec<u32>, i0: u32, i1: u32 },
    Gamma { u: Vec<u32>, i: u32 },
    Delta { k: usize, u: Vec<u32> },
}

/// Exhaustively checks the output contract, without looking at any tree.
pub fn check_ram_output(input: &RamInput<'_>, out: &RamOutput) -> Option<RamViolation> {
    let a = out.a_star.as_slice();
    let j = out.j_star;
    let r = input.arity;
    if !out.a_star.is_subset_of(&input.ground) || !input.ground.contains(j) {
        return Some(RamViolation::Shape("A* or j* outside the ground set".into()));
    }
    if a.len() <= input.target {
        return Some(RamViolation::Shape(format!("|A*| = {} <= m* = {}", a.len(), input.target)));
    }
    if a.last().is_some_and(|&m| m >= j) {
        return Some(RamViolation::Shape("j* is not above A*".into()));
    }
    let with = |u: &[u32], x: u32| -> Vec<u32> {
        let mut t = u.to_vec();
        t.push(x);
        t
    };
    let mut found = None;
    // (α): neighbor pairs are the two ways to drop one of two adjacent
    // elements of an r-subset S
    for (k, f) in input.colorings.iter().enumerate() {
        for_each_subset(a, r, |s| {
            if found.is_some() {
                return;
            }
            for p in 0..r - 1 {
                let u: Vec<u32> = s.iter().enumerate().filter(|&(q, _)| q != p + 1).map(|(_, &x)| x).collect();
                let v: Vec<u32> = s.iter().enumerate().filter(|&(q, _)| q != p).map(|(_, &x)| x).collect();
                let at_j = f.color(&with(&u, j)) == f.color(&with(&v, j));
                for &i in out.a_star.above(s[r - 1]) {
                    if (f.color(&with(&u, i)) == f.color(&with(&v, i))) != at_j {
                        found = Some(RamViolation::Alpha { k, u: u.clone(), v: v.clone(), i });
                        return;
                    }
                }
            }
        });
        if found.is_some() {
            return found;
        }
    }
    for_each_subset(a, r - 1, |u| {
        if found.is_some() {
            return;
        }
        let above = out.a_star.above(*u.last().unwrap());
        for (k, f) in input.colorings.iter().enumerate() {
            let cj = f.color(&with(u, j));
            for (x, &i0) in above.iter().enumerate() {
                let c0 = f.color(&with(u, i0));
                for &i1 in &above[x + 1..] {
                    if (c0 == f.color(&with(u, i1))) != (c0 == cj) {
                        found = Some(RamViolation::Beta { k, u: u.to_vec(), i0, i1 });
                        return;
                    }
                }
            }
        }
        let gj = input.values.color(&with(u, j));
        if let Some(&i) = above.iter().find(|&&i| input.values.color(&with(u, i)) != gj) {
            found = Some(RamViolation::Gamma { u: u.to_vec(), i });
            return;
        }
        for (k, h) in input.heights.iter().enumerate() {
            let hu = h.color(u);
            let at_j = hu >= u64::from(j);
            if above.iter().any(|&i| (hu >= u64::from(i)) != at_j) {
                found = Some(RamViolation::Delta { k, u: u.to_vec() });
                return;
            }
        }
    });
    found
}

pub fn verify_ram_output(input: &RamInput<'_>, out: &RamOutput) -> bool {
    check_ram_output(input, out).is_none()
}

/// Builds the tree and extracts `(A*, j*)`.
pub fn ramify(input: &RamInput<'_>) -> Result<std::result::Result<RamOutput, RamFailure>> {
    let tree = build_tree(input)?;
    Ok(extract(&tree, input.target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::successor_bound;
    use crate::coloring::{generate, Coloring, FnColoring, Generator};
    use num_bigint::BigUint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zero(arity: usize) -> FnColoring<impl Fn(&[u32]) -> u64> {
        FnColoring::new(arity, |_| 0)
    }

    #[test]
    fn empty_branch_gives_single_class() {
        let f = generate(&Generator::Random { colors: 3 }, 2, 8, 1).unwrap();
        let g = zero(2);
        let input = RamInput {
            ground: SortedSubset::interval(8),
            arity: 2,
            colorings: vec![&f],
            heights: vec![],
            values: &g,
            value_bound: 1,
            target: 3,
        };
        let s: Vec<EbSignature> = (1..=8).map(|i| eb_signature(&[], i, &input).unwrap()).collect();
        assert!(s.windows(2).all(|w| w[0] == w[1]));
        assert!(s[0].0.is_empty());
    }

    #[test]
    fn short_branch_has_no_clauses_for_higher_arity() {
        let f = generate(&Generator::Random { colors: 3 }, 3, 8, 1).unwrap();
        let g = zero(3);
        let input = RamInput {
            ground: SortedSubset::interval(8),
            arity: 3,
            colorings: vec![&f],
            heights: vec![],
            values: &g,
            value_bound: 1,
            target: 3,
        };
        // |B| = 1 < r - 1 = 2
        assert!(eb_signature(&[1], 5, &input).unwrap().0.is_empty());
        assert!(eb_signature(&[3], 2, &input).is_err());
    }

    #[test]
    fn constant_inputs_give_one_signature() {
        let f = generate(&Generator::Constant, 2, 10, 0).unwrap();
        let g = zero(2);
        let h = zero(1);
        let input = RamInput {
            ground: SortedSubset::interval(10),
            arity: 2,
            colorings: vec![&f],
            heights: vec![&h],
            values: &g,
            value_bound: 1,
            target: 3,
        };
        let sig = eb_signature(&[1, 2, 3], 4, &input).unwrap();
        // two (α) bits and two (β) bits for T = {1}, {2}; one (γ) value and
        // one (δ) bit for u = {3}
        assert_eq!(sig.0.len(), 6);
        for i in 5..=10 {
            assert_eq!(eb_signature(&[1, 2, 3], i, &input).unwrap(), sig);
        }
        assert_eq!(sig.0, vec![1, 1, 1, 1, 0, 0]);
    }

    #[test]
    fn constant_coloring_builds_a_path() {
        for target in 1..6usize {
            let size = target as u32 + 2;
            let f = generate(&Generator::Constant, 2, size, 0).unwrap();
            let g = zero(2);
            let h = zero(1);
            let input = RamInput {
                ground: SortedSubset::interval(size),
                arity: 2,
                colorings: vec![&f],
                heights: vec![&h],
                values: &g,
                value_bound: 1,
                target,
            };
            let tree = build_tree(&input).unwrap();
            assert_eq!(tree.nodes.len(), size as usize);
            for (i, n) in tree.nodes.iter().enumerate() {
                assert_eq!(n.element, i as u32 + 1);
                assert_eq!(n.level, i);
            }
            let out = extract(&tree, target).unwrap();
            assert_eq!(out.a_star, SortedSubset::interval(target as u32 + 1));
            assert_eq!(out.j_star, target as u32 + 2);
            assert!(verify_ram_output(&input, &out));
        }
    }

    #[test]
    fn singleton_ground() {
        let f = generate(&Generator::Constant, 2, 3, 0).unwrap();
        let g = zero(2);
        let input = RamInput {
            ground: SortedSubset::new(vec![3]).unwrap(),
            arity: 2,
            colorings: vec![&f],
            heights: vec![],
            values: &g,
            value_bound: 1,
            target: 1,
        };
        let tree = build_tree(&input).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert_eq!(
            extract(&tree, 1),
            Err(RamFailure {
                deepest_level: 0,
                wanted_level: 2
            })
        );
        assert_eq!(extract_deepest(&tree), None);
    }

    #[test]
    fn shallow_tree_reports_depth() {
        let f = generate(&Generator::Injective, 2, 12, 0).unwrap();
        let g = zero(2);
        let input = RamInput {
            ground: SortedSubset::interval(6),
            arity: 2,
            colorings: vec![&f],
            heights: vec![],
            values: &g,
            value_bound: 1,
            target: 10,
        };
        let tree = build_tree(&input).unwrap();
        let err = extract(&tree, 10).unwrap_err();
        assert_eq!(err.deepest_level, tree.depth());
        assert!(err.deepest_level < 11);
    }

    #[test]
    fn injective_coloring_is_a_path_too() {
        // every (α) and (β) comparison is false for every candidate
        let f = generate(&Generator::Injective, 2, 20, 0).unwrap();
        let g = zero(2);
        let input = RamInput {
            ground: SortedSubset::interval(20),
            arity: 2,
            colorings: vec![&f],
            heights: vec![],
            values: &g,
            value_bound: 1,
            target: 18,
        };
        let out = ramify(&input).unwrap().unwrap();
        assert_eq!(out.a_star, SortedSubset::interval(19));
        assert!(verify_ram_output(&input, &out));
    }

    #[test]
    fn mutation_is_detected() {
        let size = 12u32;
        let f = generate(&Generator::MinPosition { position: 1 }, 2, size, 0).unwrap();
        let g = zero(2);
        let input = RamInput {
            ground: SortedSubset::interval(size),
            arity: 2,
            colorings: vec![&f],
            heights: vec![],
            values: &g,
            value_bound: 1,
            target: 5,
        };
        let out = ramify(&input).unwrap().unwrap();
        assert!(verify_ram_output(&input, &out));
        assert_eq!(out.j_star, 7);
        // break (β) at u = {1}: f(1, j*) gets a fresh color while f(1, 2) = f(1, 3)
        let mut raw: Vec<u32> = f.values().to_vec();
        raw[crate::combinatorics::rank(&[1, 7], 2).unwrap() as usize] = 999;
        let mutated = Coloring::from_values(2, size, &raw).unwrap();
        let broken = RamInput {
            colorings: vec![&mutated],
            ..input
        };
        assert!(matches!(check_ram_output(&broken, &out), Some(RamViolation::Beta { .. })));
    }

    #[test]
    fn heights_split_classes() {
        // h({j}) = 5 for all j: candidates <= 5 and > 5 separate
        let f = generate(&Generator::Constant, 2, 9, 0).unwrap();
        let g = zero(2);
        let h = FnColoring::new(1, |_| 5);
        let input = RamInput {
            ground: SortedSubset::interval(9),
            arity: 2,
            colorings: vec![&f],
            heights: vec![&h],
            values: &g,
            value_bound: 1,
            target: 8,
        };
        let tree = build_tree(&input).unwrap();
        // the root splits {2..9} into {2..5} and {6..9}
        let kids: Vec<u32> = tree.nodes[0].successors.iter().map(|&c| tree.nodes[c].element).collect();
        assert_eq!(kids, vec![2, 6]);
        assert_eq!(tree.nodes[tree.nodes[0].successors[0]].residual, vec![3, 4, 5]);
        let out = extract_deepest(&tree).unwrap();
        assert_eq!(out.a_star, SortedSubset::interval(4));
        assert_eq!(out.j_star, 5);
        let input = RamInput { target: 3, ..input };
        assert!(verify_ram_output(&input, &out));
    }

    #[test]
    fn random_instances_are_sound_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for case in 0..30u64 {
            let r = 2 + (case % 2) as usize;
            let size: u32 = rng.gen_range(10..40);
            let colors = rng.gen_range(1..4);
            let f = generate(&Generator::Random { colors }, r, size, case).unwrap();
            let t = rng.gen_range(1..3usize);
            let g = generate(&Generator::Random { colors: t as u32 }, r, size, case + 100).unwrap();
            let hs: Vec<u64> = (0..=size).map(|_| rng.gen_range(0..=u64::from(size) + 1)).collect();
            let h = FnColoring::new(r - 1, move |u: &[u32]| hs[u[0] as usize]);
            let input = RamInput {
                ground: SortedSubset::interval(size),
                arity: r,
                colorings: vec![&f],
                heights: vec![&h],
                values: &g,
                value_bound: t,
                target: 3,
            };
            let tree = build_tree_to(&input, size as usize).unwrap();
            assert_eq!(tree.elements(), input.ground.as_slice());
            for n in &tree.nodes {
                let bound = successor_bound(n.level as u64, r as u64, 1, t as u64);
                assert!(BigUint::from(n.successors.len()) <= bound);
                if let Some(p) = n.parent {
                    assert!(tree.nodes[p].element < n.element);
                }
            }
            for level in 1..=tree.depth() {
                let id = tree.level(level).next().unwrap();
                let out = output_at(&tree, id);
                let shaped = RamInput {
                    target: level - 1,
                    ..RamInput {
                        ground: input.ground.clone(),
                        arity: r,
                        colorings: vec![&f],
                        heights: vec![&h],
                        values: &g,
                        value_bound: t,
                        target: 0,
                    }
                };
                assert_eq!(check_ram_output(&shaped, &out), None, "case {case} level {level}");
            }
        }
    }
}
