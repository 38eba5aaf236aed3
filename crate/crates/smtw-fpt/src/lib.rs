//! Dynamic programs over a nice tree decomposition of the rotation digraph.
//!
//! A state is a node `v` with a subset `R'` of its bag; a stable matching is
//! compatible with it when its rotation set meets the bag exactly in `R'`.
//! Rows are indexed by bitmasks over the bag in ascending rotation id, and
//! every node materialises all `2^|bag|` rows. Three row shapes are kept:
//!
//! - `N`: the reachable `(t_M, t_W)` pairs;
//! - `S`: the reachable `t_M - t_W`;
//! - `B`: for each reachable `t_M`, the least `t_W`.
//!
//! The men-side and women-side sums range over `M*`, the men matched in
//! every stable matching. A man's contribution is fixed at his partner in
//! the matching once he is settled; before that it tracks the matching of
//! `cl(R')`. Witnesses are rebuilt by walking the tables top-down and taking
//! the union of the chosen subsets, which is closed.

mod state;
mod table;

use std::collections::BTreeSet;
use std::time::Instant;

use smtw_instance::{Instance, Method, Optimum, Problem, SolveError, SolveReport, Stats};
use smtw_rotation::RotationStructure;
use smtw_td::NiceTreeDecomposition;

pub use state::{state_views, ManKind, ManView, State, MAX_BAG};

use state::Context;
use table::{fill, Cell, DiffCell, MinCell, PairCell, Tables};

fn stats<C: Cell>(ctx: &Context, tables: &Tables<C>, start: Instant) -> Stats {
    let n = ctx.inst.n() as u128;
    let side = n * n + 1;
    let rows = tables.row_count();
    Stats {
        nodes: ctx.ntd.len(),
        width: ctx.ntd.width(),
        rows,
        entries: tables.entry_count(),
        // a dense N row has one boolean per (t_M, t_W) in [0, n²]²
        dense_entries: rows as u128 * side * side,
        elapsed: start.elapsed(),
    }
}

fn report(
    problem: Problem,
    optimum: Optimum,
    witness: Option<smtw_instance::Matching>,
    stats: Stats,
) -> SolveReport {
    SolveReport {
        problem,
        method: Method::Fpt,
        optimum,
        witness,
        stats,
    }
}

/// Every reachable `(sat_M, sat_W)` over the stable matchings, as in table `N`
/// at the root. The witness is the matching of the lexicographically least pair.
pub fn fpt_solve_gsm(
    inst: &Instance,
    rs: &RotationStructure,
    ntd: &NiceTreeDecomposition,
) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let ctx = Context::new(inst, rs, ntd)?;
    let tables = fill::<PairCell>(&ctx);
    let pairs: Vec<(i64, i64)> = tables.root(&ctx).keys();
    let first = *pairs.first().expect("the woman-optimal matching is stable");
    let witness = rs.eliminate_set(&tables.reconstruct(&ctx, first))?;
    let optimum = Optimum::Pairs(pairs.iter().map(|&(a, b)| (a as u64, b as u64)).collect());
    Ok(report(
        Problem::Gsm,
        optimum,
        Some(witness),
        stats(&ctx, &tables, start),
    ))
}

/// Sex-equality cost `min |sat_M - sat_W|` from table `S`.
pub fn fpt_solve_sesm(
    inst: &Instance,
    rs: &RotationStructure,
    ntd: &NiceTreeDecomposition,
) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let ctx = Context::new(inst, rs, ntd)?;
    let tables = fill::<DiffCell>(&ctx);
    let best = tables
        .root(&ctx)
        .keys()
        .into_iter()
        .min_by_key(|&(d, _)| (d.abs(), d))
        .expect("the root row is non-empty");
    let witness = rs.eliminate_set(&tables.reconstruct(&ctx, best))?;
    Ok(report(
        Problem::Sesm,
        Optimum::Value(best.0.abs()),
        Some(witness),
        stats(&ctx, &tables, start),
    ))
}

/// Balance cost `min max(sat_M, sat_W)` from table `B`.
pub fn fpt_solve_bsm(
    inst: &Instance,
    rs: &RotationStructure,
    ntd: &NiceTreeDecomposition,
) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let ctx = Context::new(inst, rs, ntd)?;
    let tables = fill::<MinCell>(&ctx);
    let best = tables
        .root(&ctx)
        .keys()
        .into_iter()
        .min_by_key(|&(b, v)| (b.max(v), b))
        .expect("the root row is non-empty");
    let witness = rs.eliminate_set(&tables.reconstruct(&ctx, best))?;
    Ok(report(
        Problem::Bsm,
        Optimum::Value(best.0.max(best.1)),
        Some(witness),
        stats(&ctx, &tables, start),
    ))
}

/// Dispatch on the problem; only GSM, SESM and BSM have rotation programs.
pub fn fpt_solve(
    inst: &Instance,
    rs: &RotationStructure,
    ntd: &NiceTreeDecomposition,
    problem: Problem,
) -> Result<SolveReport, SolveError> {
    match problem {
        Problem::Gsm => fpt_solve_gsm(inst, rs, ntd),
        Problem::Sesm => fpt_solve_sesm(inst, rs, ntd),
        Problem::Bsm => fpt_solve_bsm(inst, rs, ntd),
        Problem::MaxSmt | Problem::MinSmt => Err(SolveError::Invalid(format!(
            "{problem} has ties and no rotation program; use the xp method"
        ))),
    }
}

/// Per node, per bag subset, the set of reachable `(t_M, t_W)`.
pub type NRows = Vec<Vec<BTreeSet<(i64, i64)>>>;

/// The rows of table `N`: `rows[v][mask]` holds the 1-entries `(t_M, t_W)` of
/// state `(v, R')`, where bit `i` of `mask` selects the `i`-th smallest rotation
/// of `v`'s bag.
pub fn n_table(
    inst: &Instance,
    rs: &RotationStructure,
    ntd: &NiceTreeDecomposition,
) -> Result<NRows, SolveError> {
    let ctx = Context::new(inst, rs, ntd)?;
    let tables = fill::<PairCell>(&ctx);
    Ok(tables
        .rows
        .into_iter()
        .map(|r| r.into_iter().map(|c| c.0).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use smtw_instance::{golden, score};
    use smtw_rotation::build_rotation_structure;
    use smtw_td::{heuristic_decomposition, make_nice};

    use super::*;

    fn solve(inst: &Instance, problem: Problem) -> SolveReport {
        let rs = build_rotation_structure(inst).unwrap();
        let ntd = make_nice(&heuristic_decomposition(&rs.rotation_graph())).unwrap();
        fpt_solve(inst, &rs, &ntd, problem).unwrap()
    }

    #[test]
    fn golden_values() {
        let cases = [
            (golden::i2(), vec![(2, 4), (4, 2)], 2, 4),
            (golden::i3(), vec![(3, 9), (6, 6), (9, 3)], 0, 6),
            (golden::one_by_one(), vec![(1, 1)], 0, 1),
        ];
        for (inst, pairs, delta, bal) in cases {
            assert_eq!(solve(&inst, Problem::Gsm).optimum, Optimum::Pairs(pairs));
            let s = solve(&inst, Problem::Sesm);
            assert_eq!(s.optimum, Optimum::Value(delta));
            assert_eq!(
                score(&inst, s.witness.as_ref().unwrap())
                    .unwrap()
                    .delta
                    .abs(),
                delta
            );
            let b = solve(&inst, Problem::Bsm);
            assert_eq!(b.optimum, Optimum::Value(bal));
            assert_eq!(
                score(&inst, b.witness.as_ref().unwrap()).unwrap().bal as i64,
                bal
            );
        }
    }

    #[test]
    fn rows_cover_every_subset() {
        let inst = golden::i3();
        let rs = build_rotation_structure(&inst).unwrap();
        let ntd = make_nice(&heuristic_decomposition(&rs.rotation_graph())).unwrap();
        let r = fpt_solve_gsm(&inst, &rs, &ntd).unwrap();
        let expect: usize = ntd.nodes.iter().map(|x| 1 << x.bag.len()).sum();
        assert_eq!(r.stats.rows, expect);
    }

    #[test]
    fn views_on_i3() {
        let inst = golden::i3();
        let rs = build_rotation_structure(&inst).unwrap();
        let ntd = make_nice(&heuristic_decomposition(&rs.rotation_graph())).unwrap();
        let root = State {
            node: ntd.root,
            subset: vec![],
        };
        let views = state_views(&inst, &rs, &ntd, &root).unwrap();
        assert!(views.values().all(|v| v.kind == ManKind::Settled));
        let (v, _) = ntd
            .nodes
            .iter()
            .enumerate()
            .find(|(_, x)| x.kind == smtw_td::NodeKind::Introduce(0))
            .unwrap();
        let views = state_views(
            &inst,
            &rs,
            &ntd,
            &State {
                node: v,
                subset: vec![0],
            },
        )
        .unwrap();
        assert_eq!(views[&0].ell, Some(0));
        let bad = State {
            node: ntd.root,
            subset: vec![0],
        };
        assert!(state_views(&inst, &rs, &ntd, &bad).is_err());
    }

    #[test]
    fn rejects_foreign_decompositions() {
        let inst = golden::i3();
        let rs = build_rotation_structure(&inst).unwrap();
        let td = smtw_td::TreeDecomposition::new(vec![vec![0], vec![1]], vec![(0, 1)], 1);
        let ntd = make_nice(&td).unwrap();
        assert!(matches!(
            fpt_solve_gsm(&inst, &rs, &ntd),
            Err(SolveError::Decomposition(_))
        ));
        assert!(matches!(
            fpt_solve_sesm(&golden::i_t(), &rs, &ntd),
            Err(SolveError::Ties)
        ));
    }
}
