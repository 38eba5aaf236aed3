//! Brute-force solvers used as ground truth.
//!
//! Three independent routes to the stable set:
//! a pruned backtracking search over men ([`enumerate_stable_pruned`], which
//! also backs the strict filter route), the closed sets of the rotation poset
//! ([`stable_by_closed_sets`]) and a plain exhaustive filter over every partial
//! matching for tied instances ([`enumerate_weakly_stable`]).

use std::time::Instant;

use smtw_instance::{
    find_blocking_pair, is_stable, score, Instance, Matching, Method, Optimum, Problem, Scores,
    SolveError, SolveReport, Stats,
};
use smtw_rotation::build_rotation_structure;

/// Agent limit for the strict filter route.
pub const FILTER_AGENT_GUARD: usize = 20;
/// Acceptable-pair limit for exhaustive weakly stable enumeration.
pub const WEAK_PAIR_GUARD: usize = 16;
/// Closed-set limit for the rotation route.
pub const CLOSED_SET_GUARD: usize = 1 << 20;

/// All stable matchings of an instance, sorted, with their scores.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableSet {
    pub matchings: Vec<Matching>,
    pub scores: Vec<Scores>,
}

impl StableSet {
    fn new(inst: &Instance, mut matchings: Vec<Matching>) -> Self {
        matchings.sort();
        matchings.dedup();
        let scores = matchings
            .iter()
            .map(|mu| score(inst, mu).expect("enumerated matchings are valid"))
            .collect();
        StableSet { matchings, scores }
    }

    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }

    /// Sorted distinct `(sat_m, sat_w)` pairs.
    pub fn pairs(&self) -> Vec<(u64, u64)> {
        let mut p: Vec<(u64, u64)> = self.scores.iter().map(|s| (s.sat_m, s.sat_w)).collect();
        p.sort_unstable();
        p.dedup();
        p
    }
}

struct Search<'a> {
    inst: &'a Instance,
    /// `best_later[w][k]`: best rank `w` gives any man with index at least `k`.
    best_later: Vec<Vec<u32>>,
    /// Best rank among decided men who prefer `w` to their own status.
    claim: Vec<u32>,
    mu: Matching,
    budget: u64,
    nodes: u64,
    out: Vec<Matching>,
}

impl Search<'_> {
    fn go(&mut self, k: usize) -> Result<(), SolveError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SolveError::Guard(format!(
                "search exceeded {} nodes",
                self.budget
            )));
        }
        let inst = self.inst;
        // an unassigned woman claimed by a decided man she ranks above every remaining man blocks for certain
        for w in 0..inst.num_women() {
            if self.mu.woman_partner(w).is_none() && self.claim[w] < self.best_later[w][k] {
                return Ok(());
            }
        }
        if k == inst.num_men() {
            debug_assert!(matches!(find_blocking_pair(inst, &self.mu), Ok(None)));
            self.out.push(self.mu.clone());
            return Ok(());
        }
        let list = inst.man_list(k);
        for choice in (0..list.len()).map(Some).chain(std::iter::once(None)) {
            let (w, r) = match choice {
                Some(i) => {
                    let (w, r) = list[i];
                    if self.mu.woman_partner(w).is_some() {
                        continue;
                    }
                    let rk = inst.woman_rank(w, k).expect("acceptable");
                    if self.claim[w] < rk {
                        continue;
                    }
                    (Some(w), r)
                }
                None => (None, u32::MAX),
            };
            // women k prefers to his choice
            let better: Vec<usize> = list.iter().take_while(|e| e.1 < r).map(|e| e.0).collect();
            let blocked = better.iter().any(|&x| {
                self.mu
                    .woman_partner(x)
                    .is_some_and(|h| inst.woman_rank(x, k) < inst.woman_rank(x, h))
            });
            if blocked {
                continue;
            }
            let saved: Vec<(usize, u32)> = better
                .iter()
                .filter(|&&x| self.mu.woman_partner(x).is_none())
                .map(|&x| (x, self.claim[x]))
                .collect();
            for &(x, old) in &saved {
                self.claim[x] = old.min(inst.woman_rank(x, k).expect("acceptable"));
            }
            if let Some(w) = w {
                self.mu.set(k, w);
            }
            let res = self.go(k + 1);
            self.mu.unmatch_man(k);
            for &(x, old) in &saved {
                self.claim[x] = old;
            }
            res?;
        }
        Ok(())
    }
}

/// Every weakly stable matching, by backtracking over men with blocking-pair
/// pruning. Gives up with [`SolveError::Guard`] after `node_budget` search nodes.
/// Works with or without ties.
pub fn enumerate_stable_pruned(inst: &Instance, node_budget: u64) -> Result<StableSet, SolveError> {
    let nm = inst.num_men();
    let best_later = (0..inst.num_women())
        .map(|w| {
            let mut v = vec![u32::MAX; nm + 1];
            for k in (0..nm).rev() {
                v[k] = v[k + 1].min(inst.woman_rank(w, k).unwrap_or(u32::MAX));
            }
            v
        })
        .collect();
    let mut s = Search {
        inst,
        best_later,
        claim: vec![u32::MAX; inst.num_women()],
        mu: Matching::empty(nm, inst.num_women()),
        budget: node_budget,
        nodes: 0,
        out: Vec::new(),
    };
    s.go(0)?;
    Ok(StableSet::new(inst, s.out))
}

/// The stable set of a strict instance by filtering matchings for stability.
pub fn stable_by_filter(inst: &Instance) -> Result<StableSet, SolveError> {
    if inst.has_ties() {
        return Err(SolveError::Ties);
    }
    if inst.n() > FILTER_AGENT_GUARD {
        return Err(SolveError::Guard(format!(
            "{} agents, filter route allows {FILTER_AGENT_GUARD}",
            inst.n()
        )));
    }
    enumerate_stable_pruned(inst, u64::MAX)
}

/// The stable set of a strict instance by eliminating every closed set of rotations.
pub fn stable_by_closed_sets(inst: &Instance) -> Result<StableSet, SolveError> {
    let rs = build_rotation_structure(inst)?;
    let mut out = Vec::new();
    let mut err = None;
    rs.for_each_closed_set(CLOSED_SET_GUARD, |set| match rs.eliminate_set(set) {
        Ok(mu) => out.push(mu),
        Err(e) => err = Some(e),
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(StableSet::new(inst, out))
}

/// The stable set of a strict instance (filter route).
pub fn enumerate_stable_strict(inst: &Instance) -> Result<StableSet, SolveError> {
    stable_by_filter(inst)
}

/// Every weakly stable matching, by testing every partial matching over acceptable pairs.
pub fn enumerate_weakly_stable(inst: &Instance) -> Result<StableSet, SolveError> {
    if inst.num_pairs() > WEAK_PAIR_GUARD {
        return Err(SolveError::Guard(format!(
            "{} acceptable pairs, exhaustive route allows {WEAK_PAIR_GUARD}",
            inst.num_pairs()
        )));
    }
    fn go(inst: &Instance, m: usize, mu: &mut Matching, out: &mut Vec<Matching>) {
        if m == inst.num_men() {
            if is_stable(inst, mu) {
                out.push(mu.clone());
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
    let mut out = Vec::new();
    go(
        inst,
        0,
        &mut Matching::empty(inst.num_men(), inst.num_women()),
        &mut out,
    );
    Ok(StableSet::new(inst, out))
}

/// The optimum of `problem` over an already enumerated stable set, with the
/// first optimal matching (in sorted order) as witness.
pub fn optimum_of(set: &StableSet, problem: Problem) -> (Optimum, Option<Matching>) {
    let pick = |key: &dyn Fn(&Scores) -> i64, maximise: bool| {
        let mut best: Option<(i64, usize)> = None;
        for (i, s) in set.scores.iter().enumerate() {
            let v = key(s);
            let better = match best {
                None => true,
                Some((b, _)) => (maximise && v > b) || (!maximise && v < b),
            };
            if better {
                best = Some((v, i));
            }
        }
        let (v, i) = best.expect("every instance has a stable matching");
        (Optimum::Value(v), Some(set.matchings[i].clone()))
    };
    match problem {
        Problem::Sesm => pick(&|s| s.delta.abs(), false),
        Problem::Bsm => pick(&|s| s.bal as i64, false),
        Problem::MaxSmt => pick(&|s| s.size as i64, true),
        Problem::MinSmt => pick(&|s| s.size as i64, false),
        Problem::Gsm => (Optimum::Pairs(set.pairs()), None),
    }
}

fn report(problem: Problem, set: &StableSet, start: Instant) -> SolveReport {
    let (optimum, witness) = optimum_of(set, problem);
    SolveReport {
        problem,
        method: Method::Oracle,
        optimum,
        witness,
        stats: Stats {
            entries: set.len(),
            elapsed: start.elapsed(),
            ..Stats::default()
        },
    }
}

/// Exact optimum by enumeration within the desk-scale guards: the strict
/// filter route for SESM, BSM and GSM, exhaustive enumeration for max- and min-SMT.
pub fn oracle_optimum(inst: &Instance, problem: Problem) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let set = match problem {
        Problem::Sesm | Problem::Bsm | Problem::Gsm => stable_by_filter(inst)?,
        Problem::MaxSmt | Problem::MinSmt => enumerate_weakly_stable(inst)?,
    };
    Ok(report(problem, &set, start))
}

/// Exact optimum by pruned search, for instances beyond the plain guards.
pub fn oracle_optimum_budgeted(
    inst: &Instance,
    problem: Problem,
    node_budget: u64,
) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    if inst.has_ties() && matches!(problem, Problem::Sesm | Problem::Bsm | Problem::Gsm) {
        return Err(SolveError::Ties);
    }
    let set = enumerate_stable_pruned(inst, node_budget)?;
    Ok(report(problem, &set, start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use smtw_instance::golden;

    fn value(inst: &Instance, p: Problem) -> i64 {
        oracle_optimum(inst, p).unwrap().optimum.value().unwrap()
    }

    #[test]
    fn golden_stable_sets() {
        assert_eq!(enumerate_stable_strict(&golden::i2()).unwrap().len(), 2);
        assert_eq!(enumerate_stable_strict(&golden::i3()).unwrap().len(), 3);
        assert_eq!(
            enumerate_stable_strict(&golden::one_by_one())
                .unwrap()
                .len(),
            1
        );
        for (_, inst) in golden::all().into_iter().filter(|(_, i)| !i.has_ties()) {
            assert_eq!(stable_by_filter(&inst), stable_by_closed_sets(&inst));
            assert_eq!(enumerate_weakly_stable(&inst), stable_by_filter(&inst));
        }
    }

    #[test]
    fn golden_optima() {
        assert_eq!(value(&golden::i2(), Problem::Sesm), 2);
        assert_eq!(value(&golden::i2(), Problem::Bsm), 4);
        assert_eq!(value(&golden::i3(), Problem::Sesm), 0);
        assert_eq!(value(&golden::i3(), Problem::Bsm), 6);
        assert_eq!(value(&golden::one_by_one(), Problem::Sesm), 0);
        assert_eq!(value(&golden::one_by_one(), Problem::Bsm), 1);
        assert_eq!(value(&golden::i_t(), Problem::MaxSmt), 2);
        assert_eq!(value(&golden::i_t(), Problem::MinSmt), 1);
        assert_eq!(value(&golden::i2(), Problem::MaxSmt), 2);
        let r = oracle_optimum(&golden::i3(), Problem::Gsm).unwrap();
        assert_eq!(r.optimum, Optimum::Pairs(vec![(3, 9), (6, 6), (9, 3)]));
        let r = oracle_optimum(&golden::i2(), Problem::Gsm).unwrap();
        assert_eq!(r.optimum, Optimum::Pairs(vec![(2, 4), (4, 2)]));
        let w = oracle_optimum(&golden::i3(), Problem::Sesm)
            .unwrap()
            .witness
            .unwrap();
        assert_eq!(w.pairs(), vec![(0, 1), (1, 2), (2, 0)]);
        let w = oracle_optimum(&golden::i_t(), Problem::MinSmt)
            .unwrap()
            .witness
            .unwrap();
        assert_eq!(w.pairs(), vec![(1, 0)]);
    }

    #[test]
    fn tied_sizes() {
        let set = enumerate_weakly_stable(&golden::i_t()).unwrap();
        let sizes: Vec<usize> = set.scores.iter().map(|s| s.size).collect();
        assert!(sizes.contains(&1) && sizes.contains(&2));
        assert_eq!(set, enumerate_stable_pruned(&golden::i_t(), 1000).unwrap());
        let empty = Instance::strict(vec![vec![]; 2], vec![vec![]; 2]).unwrap();
        let set = enumerate_weakly_stable(&empty).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.matchings[0].size(), 0);
    }

    #[test]
    fn guards() {
        assert_eq!(stable_by_filter(&golden::i_t()), Err(SolveError::Ties));
        let big = Instance::strict(vec![(0..6).collect(); 6], vec![(0..6).collect(); 6]).unwrap();
        assert!(matches!(
            enumerate_weakly_stable(&big),
            Err(SolveError::Guard(_))
        ));
        let huge = Instance::strict(vec![vec![]; 11], vec![vec![]; 11]).unwrap();
        assert!(matches!(stable_by_filter(&huge), Err(SolveError::Guard(_))));
        assert!(matches!(
            enumerate_stable_pruned(&big, 3),
            Err(SolveError::Guard(_))
        ));
    }
}
