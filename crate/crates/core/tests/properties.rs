use std::collections::HashMap;

use canon_core::coloring::{generate, FnColoring, Generator};
use canon_core::combinatorics::{for_each_subset, SortedSubset};
use canon_core::pipeline::*;
use canon_core::{Coloring, NPlace};
use proptest::prelude::*;

fn state_for(f: &Coloring) -> Option<StepDownState> {
    let zero = FnColoring::new(f.arity(), |_: &[u32]| 0);
    let input = StepDownInput {
        ground: SortedSubset::interval(f.domain()),
        colorings: vec![f],
        values: &zero,
        value_bound: 1,
        n_top: f.arity(),
        n_star: 1,
    };
    step_down(&input, &vec![Target::Max { cap: 40 }; f.arity()], &mut Vec::new(), u64::MAX).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    // on a one-sided subset of a verified state, equal effective keys force
    // equal colors
    #[test]
    fn equal_keys_give_equal_colors(seed in 0u64..10_000, n in 2usize..=3, kind in 0usize..4, bits in 0u32..8) {
        let size = if n == 2 { 40 } else { 20 };
        let kind = match kind {
            0 => Generator::Random { colors: 2 },
            1 => Generator::Canonical { pattern: canon_core::Pattern::from_bits(bits & ((1 << n) - 1)) },
            2 => Generator::MinPosition { position: 1 + bits as usize % n },
            _ => Generator::Injective,
        };
        let f = generate(&kind, n, size, seed).unwrap();
        let Some(state) = state_for(&f) else { return Ok(()) };
        let h0 = |i: u32| state.height(0, &[i]);
        let a2 = cleanup_h_max(state.ground.as_slice(), &[&h0]);
        prop_assert!(h_regime(a2.as_slice(), &h0).is_some());
        let s = a2.as_slice();
        for &u in s {
            let mask = effective_positions(&state, 0, &[u], s);
            let mut seen: HashMap<Vec<u32>, u64> = HashMap::new();
            for_each_subset(a2.above(u), n - 1, |w| {
                let key: Vec<u32> = w
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| mask & (1 << (1 + p)) != 0)
                    .map(|(_, &x)| x)
                    .collect();
                let c = f.color(&[&[u][..], w].concat());
                assert_eq!(*seen.entry(key).or_insert(c), c, "u={u}, w={w:?}");
            });
        }
    }

    #[test]
    fn cleanup_outputs_are_one_sided(hs in proptest::collection::vec(proptest::collection::vec(0u64..80, 65), 1..=2), m0 in 1usize..=4) {
        let a: Vec<u32> = (1..=64).collect();
        let fns: Vec<Box<dyn Fn(u32) -> u64>> = hs.iter().map(|t| {
            let t = t.clone();
            Box::new(move |i: u32| t[i as usize]) as Box<dyn Fn(u32) -> u64>
        }).collect();
        let refs: Vec<&dyn Fn(u32) -> u64> = fns.iter().map(|f| f.as_ref()).collect();
        let out = cleanup_h_max(&a, &refs);
        prop_assert!(out.as_slice().iter().all(|x| a.contains(x)));
        for h in &refs {
            prop_assert!(h_regime(out.as_slice(), h).is_some());
        }
        if let Some(t) = cleanup_h(&a, &refs, m0) {
            prop_assert_eq!(t.len(), m0);
            for h in &refs {
                prop_assert!(h_regime(t.as_slice(), h).is_some());
            }
        }
    }

    #[test]
    fn unary_outputs_are_constant_or_injective(fv in proptest::collection::vec(0u64..6, 41), gv in proptest::collection::vec(0u64..3, 41)) {
        let a: Vec<u32> = (1..=40).collect();
        let f = |i: u32| fv[i as usize];
        let g = |i: u32| gv[i as usize];
        let out = constant_or_injective_max(&a, &[&f], &[&g]);
        prop_assert!(!out.is_empty());
        prop_assert!(is_constant_or_injective(out.as_slice(), &[&f], &[&g]));
    }

    #[test]
    fn witnesses_are_canonical(seed in 0u64..100_000, n in 1usize..=3, m in 2usize..=4) {
        let m = m.max(n);
        let size = [0, 30, 40, 16][n];
        let f = generate(&Generator::Random { colors: 2 }, n, size, seed).unwrap();
        let cfg = CanonizeConfig { seed, verify_budget: 50_000, ..CanonizeConfig::default() };
        let out = canonize(&f, m, &cfg).unwrap();
        prop_assert!(out.witness.is_some() != out.failure.is_some());
        if let Some(w) = out.witness {
            prop_assert_eq!(w.subset.len(), m);
            prop_assert!(canon_core::canonicity::is_canonical(&f, &w.subset, w.pattern).unwrap());
        }
    }
}

#[test]
fn coloring_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.txt");
    let f = generate(&Generator::Random { colors: 3 }, 2, 9, 4).unwrap();
    f.write(&path).unwrap();
    assert_eq!(Coloring::read(&path).unwrap(), f);
    let g: &dyn NPlace = &f;
    assert_eq!(g.arity(), 2);
}
