use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smtw_instance::random::random_strict;
use smtw_instance::{is_stable, Instance, Matching};
use smtw_rotation::{build_rotation_structure, instance_for_dag, RotationStructure};

fn all_stable(inst: &Instance) -> BTreeSet<Matching> {
    fn go(inst: &Instance, m: usize, mu: &mut Matching, out: &mut BTreeSet<Matching>) {
        if m == inst.num_men() {
            if is_stable(inst, mu) {
                out.insert(mu.clone());
            }
            return;
        }
        go(inst, m + 1, mu, out);
        for &(w, _) in inst.man_list(m) {
            if mu.woman_partner(w).is_none() {
                mu.set(m, w);
                go(inst, m + 1, mu, out);
                mu.unmatch_man(m);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(
        inst,
        0,
        &mut Matching::empty(inst.num_men(), inst.num_women()),
        &mut out,
    );
    out
}

fn instance(seed: u64, max: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nm = 2 + (seed % (max - 1)) as usize;
    let nw = 2 + (seed / 11 % (max - 1)) as usize;
    let p = rng.gen_range(0.5..1.0);
    random_strict(&mut rng, nm, nw, p)
}

/// Rotation membership computed from partners alone: the first man of a
/// rotation has moved past his woman in it.
fn membership(rs: &RotationStructure, mu: &Matching) -> Vec<bool> {
    let inst = rs.instance();
    rs.rotations()
        .iter()
        .map(|rot| {
            let m = rot.pairs[0].0;
            let w1 = rot.pairs[1 % rot.len()].1;
            let cur = mu.man_partner(m).and_then(|w| inst.man_rank(m, w)).unwrap();
            cur >= inst.man_rank(m, w1).unwrap()
        })
        .collect()
}

fn reachable(rs: &RotationStructure, a: usize) -> FixedBitSet {
    let mut seen = FixedBitSet::with_capacity(rs.num_rotations());
    let mut stack = vec![a];
    while let Some(x) = stack.pop() {
        for &y in rs.successors(x) {
            if !seen.put(y) {
                stack.push(y);
            }
        }
    }
    seen
}

/// A topological order different from ascending ids when possible: always pick the largest available.
fn reverse_kahn(rs: &RotationStructure, closed: &FixedBitSet) -> Vec<usize> {
    let mut done = FixedBitSet::with_capacity(rs.num_rotations());
    let mut order = Vec::new();
    while order.len() < closed.count_ones(..) {
        let next = closed
            .ones()
            .filter(|&x| !done.contains(x))
            .filter(|&x| rs.direct_predecessors(x).iter().all(|&p| done.contains(p)))
            .max()
            .unwrap();
        done.insert(next);
        order.push(next);
    }
    order
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closed_sets_biject_with_stable_matchings(seed in any::<u64>()) {
        let inst = instance(seed, 6);
        let rs = build_rotation_structure(&inst).unwrap();
        let stable = all_stable(&inst);
        let mut via_sets = BTreeSet::new();
        let count = rs.for_each_closed_set(usize::MAX, |s| {
            let a = rs.eliminate_set(s).unwrap();
            let b = rs.eliminate_in_order(&reverse_kahn(&rs, s)).unwrap();
            assert_eq!(a, b);
            assert!(is_stable(&inst, &a));
            assert_eq!(&rs.rotation_set(&a), s);
            via_sets.insert(a);
        }).unwrap();
        prop_assert_eq!(count, stable.len());
        prop_assert_eq!(via_sets, stable);
    }

    #[test]
    fn digraph_matches_precedence(seed in any::<u64>()) {
        let inst = instance(seed, 7);
        let rs = build_rotation_structure(&inst).unwrap();
        let k = rs.num_rotations();
        let n = inst.n();
        prop_assert!(k <= n * n);
        let stable: Vec<Matching> = all_stable(&inst).into_iter().collect();
        let members: Vec<Vec<bool>> = stable.iter().map(|mu| membership(&rs, mu)).collect();
        for a in 0..k {
            let reach = reachable(&rs, a);
            prop_assert!(!reach.contains(a), "cycle through {}", a);
            for b in 0..k {
                // a precedes b exactly when every stable matching containing b also contains a
                let implied = a != b && members.iter().all(|s| !s[b] || s[a]);
                prop_assert_eq!(rs.precedes(a, b), implied);
                prop_assert_eq!(reach.contains(b), implied);
            }
        }
        // no arc is implied by a longer path
        for (a, b) in rs.arcs() {
            let longer = rs.successors(a).iter().any(|&c| c != b && reachable(&rs, c).contains(b));
            prop_assert!(!longer);
        }
    }

    #[test]
    fn per_man_paths(seed in any::<u64>()) {
        let inst = instance(seed, 8);
        let rs = build_rotation_structure(&inst).unwrap();
        let mo = rs.man_optimal();
        for m in 0..inst.num_men() {
            let rm = rs.rotations_of(m);
            for w in rm.windows(2) {
                prop_assert!(rs.precedes(w[0], w[1]));
            }
            let path = rs.man_path(m).unwrap();
            for w in path.windows(2) {
                prop_assert!(rs.successors(w[0]).contains(&w[1]));
            }
            let on_path: Vec<usize> = path.iter().copied().filter(|x| rm.contains(x)).collect();
            prop_assert_eq!(&on_path, rm);
            if !rm.is_empty() {
                prop_assert!(mo.man_partner(m).is_some());
            }
        }
        for rot in rs.rotations() {
            prop_assert!(rot.len() >= 2);
            for &(m, w) in &rot.pairs {
                prop_assert!(mo.man_partner(m).is_some() && mo.woman_partner(w).is_some());
            }
        }
    }
}

#[test]
fn bipartite_posets_are_realised() {
    for w in 1..=6 {
        let arcs: Vec<(usize, usize)> = (0..w)
            .flat_map(|a| (0..w).map(move |b| (a, w + b)))
            .collect();
        let inst = instance_for_dag(2 * w, &arcs);
        let rs = build_rotation_structure(&inst).unwrap();
        assert_eq!(rs.num_rotations(), 2 * w);
        assert_eq!(rs.arcs().len(), w * w);
        let mut count = 0;
        rs.for_each_closed_set(usize::MAX, |_| count += 1).unwrap();
        // any subset of the bottom layer, plus (only when it is full) any subset of the top
        assert_eq!(count, (1usize << w) - 1 + (1usize << w));
    }
}
