use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use smtw_instance::random::{random_strict, random_tied_with_count};
use smtw_instance::{
    is_stable, primal_graph, score, Instance, Optimum, Problem, SolveError, SolveReport,
};
use smtw_oracle::{
    enumerate_stable_pruned, enumerate_weakly_stable, optimum_of, StableSet, WEAK_PAIR_GUARD,
};
use smtw_rotation::build_rotation_structure;
use smtw_td::{heuristic_decomposition, make_nice};

use crate::{print_json, CliError, FuzzArgs};

const SEARCH_BUDGET: u64 = 50_000_000;
/// Mismatch descriptions kept in the summary.
const SHOWN: usize = 20;

fn check_report(
    inst: &Instance,
    set: &StableSet,
    r: &SolveReport,
    what: &str,
    bad: &mut Vec<String>,
) {
    let (want, _) = optimum_of(set, r.problem);
    if r.optimum != want {
        bad.push(format!(
            "{what} {}: {:?}, oracle {:?}",
            r.problem, r.optimum, want
        ));
        return;
    }
    let Some(mu) = &r.witness else { return };
    if !is_stable(inst, mu) {
        bad.push(format!("{what} {}: witness not stable", r.problem));
        return;
    }
    let s = score(inst, mu).expect("witness fits the instance");
    let got = match r.problem {
        Problem::Sesm => Some(s.delta.abs()),
        Problem::Bsm => Some(s.bal as i64),
        Problem::MaxSmt | Problem::MinSmt => Some(s.size as i64),
        Problem::Gsm => None,
    };
    if let (Some(g), Optimum::Value(v)) = (got, &r.optimum) {
        if g != *v {
            bad.push(format!(
                "{what} {}: witness scores {g}, optimum {v}",
                r.problem
            ));
        }
    }
}

/// Compares XP, FPT, the lattice extremes and the closed-set count against
/// the oracle's stable set. Returns the disagreements found.
pub fn check_strict(inst: &Instance) -> Result<Vec<String>, SolveError> {
    let set = enumerate_stable_pruned(inst, SEARCH_BUDGET)?;
    let mut bad = Vec::new();
    let xp_ntd = make_nice(&heuristic_decomposition(&primal_graph(inst)))?;
    let rs = build_rotation_structure(inst)?;
    let fpt_ntd = make_nice(&heuristic_decomposition(&rs.rotation_graph()))?;
    for p in [Problem::Sesm, Problem::Bsm] {
        check_report(
            inst,
            &set,
            &smtw_xp::xp_solve(inst, p, &xp_ntd)?,
            "xp",
            &mut bad,
        );
    }
    for p in [Problem::Sesm, Problem::Bsm, Problem::Gsm] {
        check_report(
            inst,
            &set,
            &smtw_fpt::fpt_solve(inst, &rs, &fpt_ntd, p)?,
            "fpt",
            &mut bad,
        );
    }
    let closed = rs.for_each_closed_set(smtw_oracle::CLOSED_SET_GUARD, |_| {})?;
    if closed != set.len() {
        bad.push(format!(
            "{closed} closed sets, {} stable matchings",
            set.len()
        ));
    }
    let ext = smtw_gs::lattice_extremes(inst)?;
    let min_m = set.scores.iter().map(|s| s.sat_m).min();
    let max_m = set.scores.iter().map(|s| s.sat_m).max();
    let sat_m = |mu| score(inst, mu).map(|s| s.sat_m).ok();
    if sat_m(&ext.man_optimal) != min_m || sat_m(&ext.woman_optimal) != max_m {
        bad.push("lattice extremes differ from the oracle's sat_M range".into());
    }
    Ok(bad)
}

/// Compares XP max- and min-SMT against exhaustive weakly stable enumeration.
pub fn check_tied(inst: &Instance) -> Result<Vec<String>, SolveError> {
    let set = enumerate_weakly_stable(inst)?;
    let ntd = make_nice(&heuristic_decomposition(&primal_graph(inst)))?;
    let mut bad = Vec::new();
    for p in [Problem::MaxSmt, Problem::MinSmt] {
        check_report(
            inst,
            &set,
            &smtw_xp::xp_solve(inst, p, &ntd)?,
            "xp",
            &mut bad,
        );
    }
    Ok(bad)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FuzzSummary {
    pub trials: usize,
    /// Trials a guard stopped before every check ran.
    pub guarded: usize,
    pub mismatches: Vec<String>,
}

fn trial(n: usize, seed: u64, t: usize) -> (bool, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    let (nm, nw) = (rng.gen_range(2..=n), rng.gen_range(2..=n));
    let p_accept = rng.gen_range(0.3..=1.0);
    let strict = random_strict(&mut rng, nm, nw, p_accept);
    let pairs = rng.gen_range(1..=WEAK_PAIR_GUARD.min(nm * nw));
    let tied = random_tied_with_count(&mut rng, nm, nw, pairs, 0.4);
    let mut guarded = false;
    let mut bad = Vec::new();
    for r in [check_strict(&strict), check_tied(&tied)] {
        match r {
            Ok(b) => bad.extend(b.into_iter().map(|m| format!("trial {t}: {m}"))),
            Err(SolveError::Guard(_)) => guarded = true,
            Err(e) => bad.push(format!("trial {t}: {e}")),
        }
    }
    (guarded, bad)
}

/// Runs `trials` independent seeded trials on `jobs` threads.
pub fn run_trials(n: usize, trials: usize, seed: u64, jobs: usize) -> FuzzSummary {
    let jobs = jobs.max(1);
    let mut results: Vec<(usize, bool, Vec<String>)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                s.spawn(move || {
                    (j..trials)
                        .step_by(jobs)
                        .map(|t| {
                            let (g, b) = trial(n, seed, t);
                            (t, g, b)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("trial thread"))
            .collect()
    });
    results.sort_by_key(|r| r.0);
    FuzzSummary {
        trials,
        guarded: results.iter().filter(|r| r.1).count(),
        mismatches: results.into_iter().flat_map(|r| r.2).collect(),
    }
}

pub(crate) fn fuzz(a: &FuzzArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.n < 2 {
        return Err(CliError::Validation("--n must be at least 2".into()));
    }
    let sum = run_trials(a.n, a.trials, a.seed, a.jobs);
    print_json(
        out,
        &json!({
            "trials": sum.trials,
            "seed": a.seed,
            "max_per_side": a.n,
            "guarded": sum.guarded,
            "mismatch_count": sum.mismatches.len(),
            "mismatches": sum.mismatches.iter().take(SHOWN).collect::<Vec<_>>(),
        }),
    )?;
    if sum.mismatches.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{} mismatches",
            sum.mismatches.len()
        )))
    }
}
