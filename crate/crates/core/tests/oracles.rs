//! Brute-force cross-checks of the telescoping solver and the deciders.
//!
//! The oracle here never uses partial sums: it searches candidate witnesses
//! entry by entry and only keeps those satisfying each defining equation.

use corona_core::{
    decide, solve_telescoping, AlgebraCapabilities, BaseSpace, CircleMode, GroupElement, GroupSpec,
    JumpData, Relation, SpaceKind, Verdict,
};
use proptest::prelude::*;

/// All elements with `|free part| <= bound`, every torsion residue.
fn bounded_elements(spec: &GroupSpec, bound: i64) -> Vec<GroupElement> {
    let mut free: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..spec.free_rank() {
        free = free
            .into_iter()
            .flat_map(|p| (-bound..=bound).map(move |v| [p.clone(), vec![v]].concat()))
            .collect();
    }
    let mut torsion: Vec<Vec<i64>> = vec![Vec::new()];
    for &d in spec.torsion_orders() {
        torsion = torsion
            .into_iter()
            .flat_map(|p| (0..d as i64).map(move |v| [p.clone(), vec![v]].concat()))
            .collect();
    }
    free.iter()
        .flat_map(|f| torsion.iter().map(|t| spec.element(f.clone(), t).unwrap()))
        .collect()
}

/// Exhaustive witness search with pruning on the defining equations.
fn oracle_solvable(
    candidates: &[GroupElement],
    deltas: &[GroupElement],
    forced: &[usize],
    wrap: Option<&GroupElement>,
) -> bool {
    fn go(
        t: &mut Vec<GroupElement>,
        candidates: &[GroupElement],
        deltas: &[GroupElement],
        forced: &[usize],
        wrap: Option<&GroupElement>,
    ) -> bool {
        let i = t.len();
        if i == deltas.len() + 1 {
            return match wrap {
                Some(d0) => t[0].sub(&t[i - 1]).unwrap() == *d0,
                None => true,
            };
        }
        for c in candidates {
            if forced.contains(&i) && !c.is_zero() {
                continue;
            }
            if i > 0 && c.sub(&t[i - 1]).unwrap() != deltas[i - 1] {
                continue;
            }
            t.push(c.clone());
            if go(t, candidates, deltas, forced, wrap) {
                return true;
            }
            t.pop();
        }
        false
    }
    go(&mut Vec::new(), candidates, deltas, forced, wrap)
}

fn tuples(values: &[GroupElement], n: usize) -> Vec<Vec<GroupElement>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    out
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0u32..1 << (n + 1))
        .map(|mask| (0..=n).filter(|&i| mask & (1 << i) != 0).collect())
        .collect()
}

fn check_against_oracle(spec: &GroupSpec) {
    let small = bounded_elements(spec, 2);
    // n <= 3 and |delta| <= 2, so every witness with t_0 pinned lies within 3 * 2.
    let search = bounded_elements(spec, 6);
    for n in 0..=3 {
        for deltas in tuples(&small, n) {
            for forced in subsets(n) {
                let got = solve_telescoping(spec, &deltas, &forced, None).unwrap();
                let want = oracle_solvable(&search, &deltas, &forced, None);
                assert_eq!(got.witness().is_some(), want, "{deltas:?} forced {forced:?}");
            }
            for d0 in &small {
                let got = solve_telescoping(spec, &deltas, &[], Some(d0)).unwrap();
                let want = oracle_solvable(&search, &deltas, &[], Some(d0));
                assert_eq!(got.witness().is_some(), want, "{deltas:?} wrap {d0:?}");
            }
        }
    }
}

#[test]
fn telescoping_matches_oracle_over_integers() {
    check_against_oracle(&GroupSpec::integers());
}

#[test]
fn telescoping_matches_oracle_over_small_cyclic_groups() {
    for d in 2..=4 {
        check_against_oracle(&GroupSpec::cyclic(d).unwrap());
    }
}

proptest! {
    #[test]
    fn telescoping_matches_oracle_with_mixed_groups(
        d in 2u64..=4,
        raw in proptest::collection::vec((-2i64..=2, 0i64..4), 0..=3),
        wrap_raw in proptest::option::of((-2i64..=2, 0i64..4)),
        mask in 0u32..16,
    ) {
        let spec = GroupSpec::new(1, vec![d]).unwrap();
        let deltas: Vec<_> = raw.iter().map(|&(f, t)| spec.element(vec![f], &[t]).unwrap()).collect();
        let n = deltas.len();
        let search = bounded_elements(&spec, 6);
        match wrap_raw {
            Some((f, t)) => {
                let d0 = spec.element(vec![f], &[t]).unwrap();
                let got = solve_telescoping(&spec, &deltas, &[], Some(&d0)).unwrap();
                prop_assert_eq!(got.witness().is_some(), oracle_solvable(&search, &deltas, &[], Some(&d0)));
            }
            None => {
                let forced: Vec<usize> = (0..=n).filter(|&i| mask & (1 << i) != 0).collect();
                let got = solve_telescoping(&spec, &deltas, &forced, None).unwrap();
                prop_assert_eq!(got.witness().is_some(), oracle_solvable(&search, &deltas, &forced, None));
            }
        }
    }
}

fn space(kind: SpaceKind, n: usize) -> BaseSpace {
    let partition = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
    BaseSpace::new(kind, partition).unwrap()
}

#[test]
fn deciders_match_brute_force_on_small_instances() {
    let spec = GroupSpec::integers();
    let values: Vec<_> = (-2..=2).map(|v| spec.from_integer(v).unwrap()).collect();
    // |k - l| <= 4 and n <= 2: witnesses reach |t_i| = 8.
    let search: Vec<_> = (-8..=8).map(|v| spec.from_integer(v).unwrap()).collect();
    let caps = AlgebraCapabilities::compact_operators();
    for kind in [SpaceKind::Interval, SpaceKind::HalfLine, SpaceKind::Line, SpaceKind::Circle] {
        for n in 0..=2 {
            let s = space(kind, n);
            let wraps: Vec<Option<GroupElement>> =
                if s.has_wrap() { values.iter().cloned().map(Some).collect() } else { vec![None] };
            for k in tuples(&values, n) {
                for l in tuples(&values, n) {
                    for kw in &wraps {
                        for lw in &wraps {
                            let jp = JumpData::new(spec.clone(), k.clone(), kw.clone()).unwrap();
                            let jq = JumpData::new(spec.clone(), l.clone(), lw.clone()).unwrap();
                            let deltas: Vec<_> = k.iter().zip(&l).map(|(a, b)| a.sub(b).unwrap()).collect();
                            let d0 = kw.as_ref().zip(lw.as_ref()).map(|(a, b)| a.sub(b).unwrap());
                            let want = oracle_solvable(&search, &deltas, &s.forced_zero_indices(), d0.as_ref());
                            for rel in Relation::ALL {
                                let c = decide(rel, &jp, &jq, &s, caps, CircleMode::StrictCyclic).unwrap();
                                let expect = if want { Verdict::Equivalent } else { Verdict::NotEquivalent };
                                assert_eq!(c.verdict, expect, "{kind} {rel} k={k:?} l={l:?}");
                                if want {
                                    assert!(corona_core::verify_certificate(&c, &jp, &jq, &s));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn relation_hierarchy_and_topology_laws(
        kind_ix in 0usize..4,
        pairs in proptest::collection::vec((-3i64..=3, -3i64..=3), 0..5),
        wraps in (-3i64..=3, -3i64..=3),
        paper in any::<bool>(),
    ) {
        let kinds = [SpaceKind::Interval, SpaceKind::HalfLine, SpaceKind::Line, SpaceKind::Circle];
        let kind = kinds[kind_ix];
        let s = space(kind, pairs.len());
        let k: Vec<i64> = pairs.iter().map(|p| p.0).collect();
        let l: Vec<i64> = pairs.iter().map(|p| p.1).collect();
        let (kw, lw) = if s.has_wrap() { (Some(wraps.0), Some(wraps.1)) } else { (None, None) };
        let jp = JumpData::integers(&k, kw).unwrap();
        let jq = JumpData::integers(&l, lw).unwrap();
        let mode = if paper { CircleMode::PaperRemark } else { CircleMode::StrictCyclic };
        let caps = AlgebraCapabilities::compact_operators();
        let v = |rel| decide(rel, &jp, &jq, &s, caps, mode).unwrap().verdict;
        let (m, u, h) = (v(Relation::Mvn), v(Relation::Unitary), v(Relation::Homotopy));
        if h == Verdict::Equivalent { prop_assert_eq!(u, Verdict::Equivalent); }
        if u == Verdict::Equivalent { prop_assert_eq!(m, Verdict::Equivalent); }
        match kind {
            SpaceKind::Interval | SpaceKind::HalfLine => prop_assert_eq!(m, Verdict::Equivalent),
            SpaceKind::Line => {
                let balanced = k.iter().sum::<i64>() == l.iter().sum::<i64>();
                prop_assert_eq!(m == Verdict::Equivalent, balanced);
            }
            SpaceKind::Circle => {
                let cyclic = k.iter().sum::<i64>() + wraps.0 == l.iter().sum::<i64>() + wraps.1;
                prop_assert_eq!(m == Verdict::Equivalent, paper || cyclic);
            }
        }
    }
}
