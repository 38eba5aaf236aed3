use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smtw_instance::{is_stable, primal_graph};
use smtw_reduce::*;
use smtw_td::{heuristic_decomposition, validate};

const RELAXED: CliqueMode = CliqueMode::Relaxed(Spacers {
    s10: 1,
    s20: 1,
    s30: 1,
    s40: 1,
    alpha_mult: 1,
});

/// Classes {1,2}, {3,4}, {5,6}; `yes` adds the edge closing the triangle 1-3-5.
fn three_classes(yes: bool) -> CliqueInput {
    let g = if yes {
        "6 4\n1 3\n3 5\n2 6\n1 5\n"
    } else {
        "6 3\n1 3\n3 5\n2 6\n"
    };
    parse_clique(g, "1 2\n3 4\n5 6\n").unwrap()
}

fn square() -> CliqueInput {
    parse_clique("4 2\n1 3\n2 4\n", "1 2\n3 4\n").unwrap()
}

fn sat_outputs(inp: &SatInput, scale: u64) -> Vec<ReductionOutput> {
    [false, true]
        .into_iter()
        .map(
            |bsm| match reduce_sat(inp, bsm, SatSpacers::Scaled(scale)).unwrap() {
                SatOutcome::Instance(o) => *o,
                SatOutcome::Unsatisfiable { block } => panic!("block {block} unsatisfiable"),
            },
        )
        .collect()
}

fn tiny_formulas() -> Vec<SatInput> {
    vec![
        SatInput::new(2, vec![vec![1, 2], vec![-1, 2]], 1).unwrap(),
        SatInput::new(2, vec![vec![1, 2], vec![-1, 2]], 2).unwrap(),
        SatInput::new(3, vec![vec![1, -2], vec![2, 3]], 2).unwrap(),
        SatInput::new(3, vec![vec![1, 2], vec![-2, 3], vec![-1, -3]], 3).unwrap(),
    ]
}

fn assert_passes(rep: &VerificationReport, names: &[&str]) {
    for c in &rep.checks {
        assert!(
            !matches!(c.status, CheckStatus::Fail(_)),
            "{:?} {}: {:?}",
            rep.kind,
            c.name,
            c.status
        );
    }
    for n in names {
        let c = rep
            .get(n)
            .unwrap_or_else(|| panic!("{:?} lacks check {n}", rep.kind));
        assert_eq!(
            c.status,
            CheckStatus::Pass,
            "{:?} {n}: {}",
            rep.kind,
            c.detail
        );
    }
}

#[test]
fn clique_sm_reductions_verify() {
    for inp in [square(), three_classes(true), three_classes(false)] {
        for out in [
            reduce_clique_to_sesm(&inp, RELAXED).unwrap(),
            reduce_clique_to_bsm(&inp, RELAXED).unwrap(),
        ] {
            let rep = verify_reduction(&out);
            assert_passes(
                &rep,
                &[
                    "agent_count",
                    "treewidth_bound",
                    "leader_form",
                    "stable_matchings_perfect",
                ],
            );
            let has = inp.find_clique(1000).unwrap().is_some();
            assert_eq!(
                rep.get("mu_c_stable").unwrap().status == CheckStatus::Pass,
                has
            );
            assert!(matches!(
                rep.get("measure_target").map(|c| &c.status),
                Some(CheckStatus::Skipped(_)) | None
            ));
        }
    }
}

#[test]
fn clique_smt_reductions_verify() {
    for inp in [square(), three_classes(true), three_classes(false)] {
        let max = verify_reduction(&reduce_clique_to_max_smt(&inp).unwrap());
        assert_passes(
            &max,
            &[
                "agent_count",
                "treewidth_bound",
                "leader_form",
                "perfect_iff_clique",
            ],
        );
        let min = verify_reduction(&reduce_clique_to_min_smt(&inp).unwrap());
        assert_passes(
            &min,
            &[
                "agent_count",
                "treewidth_bound",
                "leader_form",
                "min_size_iff_clique",
                "p_prime_forest",
            ],
        );
    }
}

#[test]
fn min_smt_yes_instance_attains_target_exactly() {
    let inp = three_classes(true);
    let out = reduce_clique_to_min_smt(&inp).unwrap();
    let set = smtw_oracle::enumerate_stable_pruned(&out.instance, 50_000_000).unwrap();
    let least = set.scores.iter().map(|s| s.size).min().unwrap();
    assert_eq!(least, inp.k() + 2 * inp.num_vertices() + inp.num_edges());
    assert_eq!(out.predicted.target, Target::MinSize(least));
}

#[test]
fn sesm_and_bsm_share_roles_up_to_pendant_counts() {
    let inp = three_classes(true);
    let (a, b) = (
        reduce_clique_to_sesm(&inp, RELAXED).unwrap(),
        reduce_clique_to_bsm(&inp, RELAXED).unwrap(),
    );
    let gadget = |o: &ReductionOutput| -> Vec<Role> {
        o.men
            .iter()
            .chain(&o.women)
            .filter(|r| !r.family.contains("hap"))
            .cloned()
            .collect()
    };
    assert_eq!(gadget(&a), gadget(&b));
    // w̃^i_j gets 2^{k-i} fillers in one and 4^{i-1} in the other
    let m3 = |o: &ReductionOutput, i: usize| {
        o.instance
            .woman_list(o.woman("w_tilde", &[i, 1]).unwrap())
            .len()
    };
    assert_eq!((m3(&a, 1), m3(&a, 3)), (2 + 4, 2 + 1));
    assert_eq!((m3(&b, 1), m3(&b, 3)), (2 + 1, 2 + 16));
}

#[test]
fn sat_reductions_verify() {
    for inp in tiny_formulas() {
        for out in sat_outputs(&inp, 1) {
            let rep = verify_reduction(&out);
            assert_passes(
                &rep,
                &[
                    "agent_count",
                    "treewidth_bound",
                    "rotation_classes",
                    "h_pi_containment",
                    "stable_matchings_perfect",
                    "stable_are_good",
                    "stable_equals_excellent",
                    "legal_sets_eliminate_to_stable",
                    "rotation_set_decomposition",
                ],
            );
            if out.kind == ReductionKind::SatBsm {
                assert_passes(&rep, &["digraph_matches_sesm"]);
            }
        }
    }
}

#[test]
fn sat_structure_does_not_depend_on_scale() {
    let inp = SatInput::new(2, vec![vec![1, 2], vec![-1, 2]], 1).unwrap();
    let count = |scale| {
        let out = &sat_outputs(&inp, scale)[0];
        excellent_matchings(out).unwrap().len()
    };
    assert_eq!(count(1), count(3));
    let out = &sat_outputs(&inp, 2)[0];
    assert_passes(
        &verify_reduction(out),
        &["stable_equals_excellent", "legal_sets_eliminate_to_stable"],
    );
}

#[test]
fn sat_agent_count_formula() {
    for inp in tiny_formulas() {
        for out in sat_outputs(&inp, 2) {
            let pool = out.predicted.extra["pool"] as usize;
            assert_eq!(
                out.instance.n(),
                4 * inp.n + 8 * inp.total_assignments() + 2 * pool + 2
            );
            assert_eq!(out.predicted.happy_pairs, pool);
        }
    }
}

#[test]
fn sat_rotation_graph_width() {
    for inp in tiny_formulas() {
        for out in sat_outputs(&inp, 1) {
            let rs = smtw_rotation::build_rotation_structure(&out.instance).unwrap();
            let g = rs.rotation_graph();
            let w = validate(&heuristic_decomposition(&g), &g).unwrap();
            assert!(w <= inp.n + 2 * (1 << (inp.p * inp.d)) + 2);
        }
    }
}

#[test]
fn legal_sets_match_closed_sets_count() {
    let inp = tiny_formulas().remove(0);
    let out = &sat_outputs(&inp, 1)[0];
    let rs = smtw_rotation::build_rotation_structure(&out.instance).unwrap();
    let closed = rs.for_each_closed_set(usize::MAX, |_| {}).unwrap();
    assert_eq!(legal_sets(&inp).unwrap().len(), closed);
    let classes = rotation_classes(out, &rs);
    assert!(!classes.contains(&RotationClass::Other));
}

#[test]
fn unsatisfiable_formula_yields_marker() {
    let inp = SatInput::new(2, vec![vec![1], vec![-1], vec![2]], 2).unwrap();
    assert!(matches!(
        reduce_sat_to_sesm(&inp, 1).unwrap(),
        SatOutcome::Unsatisfiable { block: 0 }
    ));
    assert!(matches!(
        reduce_sat_to_bsm(&inp, 1).unwrap(),
        SatOutcome::Unsatisfiable { block: 0 }
    ));
}

#[test]
fn preconditions_and_guards() {
    // α = 12 - 5|E| with unit spacers
    let full = parse_clique("4 4\n1 3\n1 4\n2 3\n2 4\n", "1 2\n3 4\n").unwrap();
    assert!(matches!(
        reduce_clique_to_sesm(&full, RELAXED),
        Err(ReduceError::NegativeAlpha(-8))
    ));
    let big = CliqueMode::Relaxed(Spacers {
        s40: 10,
        ..Spacers::default()
    });
    assert!(reduce_clique_to_sesm(&full, big).is_ok());
    assert!(matches!(
        reduce_clique_to_sesm(&full, CliqueMode::Strict),
        Err(ReduceError::Precondition(_))
    ));
    let sparse = parse_clique("4 1\n1 3\n", "1 2\n3 4\n").unwrap();
    let k3 = parse_clique("6 1\n1 3\n", "1 2\n3 4\n5 6\n").unwrap();
    for r in [
        reduce_clique_to_max_smt(&k3),
        reduce_clique_to_min_smt(&k3),
        reduce_clique_to_sesm(&k3, RELAXED),
    ] {
        assert!(matches!(r, Err(ReduceError::Precondition(_))));
    }
    assert!(reduce_clique_to_min_smt(&sparse).is_ok());
    let inp = SatInput::new(3, vec![vec![1, 2, 3]], 1).unwrap();
    assert!(matches!(
        reduce_sat(&inp, false, SatSpacers::Nominal),
        Err(ReduceError::Guard(_))
    ));
}

#[test]
fn sidecar_roundtrips_roles() {
    let out = reduce_clique_to_sesm(&square(), RELAXED).unwrap();
    let text = write_sidecar(&out);
    for (i, r) in out.men.iter().enumerate() {
        assert!(text.contains(&format!("man {}: {r}\n", i + 1)));
    }
    assert!(text.contains("predict.delta_at_most: 0\n"));
    assert!(text.contains("mode: relaxed\n"));
}

/// Random graph over `k` classes of `p` vertices with at least one edge per class pair.
fn random_input(rng: &mut ChaCha8Rng) -> CliqueInput {
    let (k, p) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
    let mut edges = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            let mut any = false;
            for x in 0..p {
                for y in 0..p {
                    if rng.gen_bool(0.4) {
                        edges.push((a * p + x, b * p + y));
                        any = true;
                    }
                }
            }
            if !any {
                edges.push((a * p + rng.gen_range(0..p), b * p + rng.gen_range(0..p)));
            }
        }
    }
    let classes = (0..k).map(|a| (a * p..(a + 1) * p).collect()).collect();
    CliqueInput::new(k * p, &edges, classes).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn random_clique_inputs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inp = random_input(&mut rng);
        let clique = inp.find_clique(1000).unwrap();
        let bound = 2 * inp.k() + 12;
        let mut outs = vec![reduce_clique_to_max_smt(&inp).unwrap(), reduce_clique_to_min_smt(&inp).unwrap()];
        for bsm in [false, true] {
            // the smallest s40 keeping α non-negative
            let out = (1..)
                .map(|s40| reduce_clique_to_sm(&inp, CliqueMode::Relaxed(Spacers { s40, ..Spacers::default() }), bsm))
                .find(|r| !matches!(r, Err(ReduceError::NegativeAlpha(_))))
                .unwrap();
            outs.push(out.unwrap());
        }
        for out in &outs {
            prop_assert_eq!(out.instance.n(), out.predicted.agents);
            prop_assert_eq!(check_leader_form(out), Ok(()));
            let g = primal_graph(&out.instance);
            prop_assert!(validate(&heuristic_decomposition(&g), &g).unwrap() <= bound);
            if let Some(c) = &clique {
                let mu = match out.kind {
                    ReductionKind::CliqueMaxSmt => mu_c_max(out, &inp, c).unwrap(),
                    ReductionKind::CliqueMinSmt => mu_c_min(out, &inp, c).unwrap(),
                    _ => mu_c_sm(out, &inp, c).unwrap(),
                };
                prop_assert!(is_stable(&out.instance, &mu));
            }
        }
    }
}
