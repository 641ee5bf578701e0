//! Cross-checks between the analytic generator, the backward search, and
//! plain forward simulation.

use std::collections::BTreeSet;

use collatz_stairs::{
    classify, collatz_step, generate_stair, inverse_step, stair_index_icltz, stair_index_iu, stairs_icltz,
    subtree_root, subtree_stairs, verify_bvc, verify_forward, y_k, Bvc, Nat, Placement, StairIndex,
};

const BUDGET: u64 = 1_000_000;

/// Forward code of `x` up the `steps` edges toward the root: a `1` where
/// the child was odd (3x+1), a `0` where it was even. Built bottom-up.
fn forward_code(x: &Nat, steps: u32) -> Bvc {
    let mut bits = Vec::new();
    let mut cur = x.clone();
    for _ in 0..steps {
        bits.push(cur.is_odd());
        cur = collatz_step(&cur).unwrap();
    }
    bits.reverse();
    Bvc::new(bits)
}

#[test]
fn cycle_stairs_are_complete() {
    let j_max = 14u32;
    let stairs = stairs_icltz(j_max).unwrap();
    let bound = 1u64 << (j_max + 2);
    for n in 1..=bound {
        let j = stair_index_icltz(&Nat::from(n), BUDGET).unwrap();
        if (1..=u64::from(j_max)).contains(&j) {
            assert!(
                stairs[j as usize - 1].contains(&Nat::from(n)),
                "{n} missing from stair {j}"
            );
        }
    }
    for s in &stairs {
        for m in &s.members {
            assert_eq!(stair_index_icltz(m, BUDGET).unwrap(), u64::from(s.index));
        }
    }
}

#[test]
fn cycle_stairs_are_disjoint() {
    let stairs = stairs_icltz(18).unwrap();
    let mut seen = BTreeSet::new();
    for s in &stairs {
        for m in &s.members {
            assert!(seen.insert(m.clone()), "{m} repeated");
            assert!(!matches!(m.to_u64(), Some(1 | 2 | 4)));
        }
    }
}

#[test]
fn subtree_roots_have_one_child() {
    for k in 2..=100 {
        let root = subtree_root(k).unwrap();
        let pre = inverse_step(&root).unwrap();
        assert_eq!(pre.len(), 1, "k = {k}");
        assert_eq!(pre.doubled, Nat::from(root.as_biguint() * 2u32));
    }
}

#[test]
fn subtrees_do_not_intersect() {
    let mut owner = std::collections::BTreeMap::new();
    for k in 2..=6 {
        for s in subtree_stairs(k, 14).unwrap() {
            for m in s.members {
                if let Some(prev) = owner.insert(m.clone(), k) {
                    panic!("{m} in subtrees {prev} and {k}");
                }
            }
        }
    }
}

#[test]
fn backward_members_have_forward_index() {
    for k in 2..=6 {
        for s in subtree_stairs(k, 14).unwrap() {
            for m in &s.members {
                assert_eq!(
                    stair_index_iu(m, BUDGET).unwrap(),
                    StairIndex::Placed {
                        steps: u64::from(s.index),
                        subtree: k
                    }
                );
            }
        }
    }
}

#[test]
fn backward_members_verify_along_their_path() {
    for k in 2..=5 {
        let anchor = Nat::from(y_k(k).unwrap().into_biguint() * 2u32 / 3u32);
        for s in subtree_stairs(k, 14).unwrap().into_iter().skip(1) {
            for m in &s.members {
                let code = forward_code(m, s.index - 2);
                let v = verify_bvc(m, &code);
                assert!(v.accepted(), "{m} with {code}: {:?}", v.rejection);
                assert_eq!(v.ancestor, anchor);
            }
        }
    }
}

#[test]
fn accepted_terms_anchor_at_stair_two() {
    for k in 2..=6 {
        let anchor = Nat::from(y_k(k).unwrap().into_biguint() * 2u32 / 3u32);
        for j in 2..=14 {
            for t in generate_stair(k, j).unwrap().accepted() {
                let v = verify_bvc(t.value.as_ref().unwrap(), &t.bvc);
                assert!(v.accepted());
                assert_eq!(v.steps, t.bvc.len());
                assert_eq!(v.steps, (j - 2) as usize);
                assert_eq!(v.ancestor, anchor, "k={k} j={j} bvc={}", t.bvc);
            }
        }
    }
}

#[test]
fn accepted_terms_converge_forward() {
    for k in 2..=6 {
        for j in 1..=14 {
            let stair = generate_stair(k, j).unwrap();
            let values: Vec<_> = stair.accepted_values().collect();
            let distinct: BTreeSet<_> = values.iter().collect();
            assert_eq!(values.len(), distinct.len());
            for v in values {
                assert!(verify_forward(v, k, j), "k={k} j={j} value={v}");
            }
        }
    }
}

#[test]
fn placements_match_generated_stairs() {
    for n in 2..=20_000u64 {
        if let Placement::Placed { k, j } = classify(n, BUDGET).unwrap() {
            if j <= 12 {
                let stair = generate_stair(k, j as u32).unwrap();
                assert!(
                    stair.accepted_values().any(|v| *v == Nat::from(n)),
                    "{n} placed at ({k}, {j})"
                );
            }
        }
    }
}

#[test]
fn twenty_seven_lands_far_up_the_k2_subtree() {
    // Value from an independent u64 forward loop: 27 first meets a power
    // of two (16) after 107 steps.
    let mut x = 27u64;
    let mut steps = 0;
    while !x.is_power_of_two() {
        x = if x.is_multiple_of(2) { x / 2 } else { 3 * x + 1 };
        steps += 1;
    }
    assert_eq!((steps, x), (107, 16));
    assert_eq!(classify(27, BUDGET).unwrap(), Placement::Placed { k: 2, j: 107 });
}

#[test]
fn large_subtree_index_stays_exact() {
    // Roots far outside u128 still land one step from their power of two.
    for k in [70, 200, 513] {
        let root = subtree_root(k).unwrap();
        assert_eq!(
            stair_index_iu(&root, 10).unwrap(),
            StairIndex::Placed { steps: 1, subtree: k }
        );
        assert!(verify_forward(&root, k, 1));
    }
}
