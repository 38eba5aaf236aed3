use std::io::Write;

use serde_json::{json, Value};
use smtw_instance::{
    parse_instance, primal_graph, score, Instance, Matching, Method, Optimum, Problem, SolveError,
    SolveReport, Stats,
};
use smtw_rotation::{build_rotation_structure, RotationStructure};
use smtw_td::{
    heuristic_decomposition, make_nice, read_td, validate, Graph, NiceTreeDecomposition,
};

use crate::{print_json, read_file, CliError, RotationsArgs, SolveArgs};

/// Pruned-search budget when an instance is past the oracle's plain filter guard.
const ORACLE_BUDGET: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum GraphKind {
    Primal,
    Rotation,
}

fn pairs_json(mu: &Matching) -> Value {
    Value::Array(
        mu.pairs()
            .into_iter()
            .map(|(m, w)| json!([m + 1, w + 1]))
            .collect(),
    )
}

fn stats_json(s: &Stats) -> Value {
    // u128 counts beyond u64 are written as decimal strings
    let dense = u64::try_from(s.dense_entries)
        .map(Value::from)
        .unwrap_or_else(|_| Value::from(s.dense_entries.to_string()));
    json!({
        "nodes": s.nodes,
        "width": s.width,
        "rows": s.rows,
        "entries": s.entries,
        "dense_entries": dense,
        "elapsed_ms": s.elapsed.as_secs_f64() * 1000.0,
    })
}

/// The report as JSON. `exact` is false for the Gale-Shapley method, whose
/// value is that of one stable matching rather than the optimum.
pub fn report_json(r: &SolveReport, with_witness: bool) -> Value {
    let optimum = match &r.optimum {
        Optimum::Value(v) => json!(v),
        Optimum::Pairs(p) => Value::Array(p.iter().map(|&(a, b)| json!([a, b])).collect()),
    };
    let witness = match (&r.witness, with_witness) {
        (Some(mu), true) => pairs_json(mu),
        _ => Value::Null,
    };
    json!({
        "problem": r.problem.name(),
        "method": r.method.name(),
        "exact": r.method != Method::Gs,
        "optimum": optimum,
        "witness": witness,
        "stats": stats_json(&r.stats),
    })
}

fn decomposition(
    td: Option<&std::path::Path>,
    g: &Graph,
) -> Result<NiceTreeDecomposition, CliError> {
    let td = match td {
        None => heuristic_decomposition(g),
        Some(path) => {
            let (td, nv) = read_td(&read_file(path)?, 0)?;
            if nv != g.n() {
                return Err(CliError::Validation(format!(
                    "decomposition declares {nv} vertices, the graph has {}",
                    g.n()
                )));
            }
            validate(&td, g)?;
            td
        }
    };
    Ok(make_nice(&td)?)
}

/// Value of the matching found by Gale-Shapley (strict) or by breaking ties
/// in index order (tied).
fn gs_report(inst: &Instance, problem: Problem) -> Result<SolveReport, SolveError> {
    let start = std::time::Instant::now();
    let mu = match problem {
        Problem::MaxSmt | Problem::MinSmt => smtw_gs::stable_with_tiebreak(inst, 0),
        _ => smtw_gs::man_optimal(inst)?,
    };
    let s = score(inst, &mu)?;
    let optimum = match problem {
        Problem::Sesm => Optimum::Value(s.delta.abs()),
        Problem::Bsm => Optimum::Value(s.bal as i64),
        Problem::MaxSmt | Problem::MinSmt => Optimum::Value(s.size as i64),
        Problem::Gsm => Optimum::Pairs(vec![(s.sat_m, s.sat_w)]),
    };
    Ok(SolveReport {
        problem,
        method: Method::Gs,
        optimum,
        witness: Some(mu),
        stats: Stats {
            elapsed: start.elapsed(),
            ..Stats::default()
        },
    })
}

fn oracle_report(inst: &Instance, problem: Problem) -> Result<SolveReport, SolveError> {
    match smtw_oracle::oracle_optimum(inst, problem) {
        Err(SolveError::Guard(_)) if !inst.has_ties() => {
            smtw_oracle::oracle_optimum_budgeted(inst, problem, ORACLE_BUDGET)
        }
        r => r,
    }
}

/// Solves `problem` on `inst` with `method`, over `td` when one is given.
pub fn solve_instance(
    inst: &Instance,
    problem: Problem,
    method: Method,
    graph: Option<GraphKind>,
    td: Option<&std::path::Path>,
) -> Result<SolveReport, CliError> {
    let wanted = match method {
        Method::Xp => Some(GraphKind::Primal),
        Method::Fpt => Some(GraphKind::Rotation),
        Method::Oracle | Method::Gs => None,
    };
    if wanted.is_none() && (td.is_some() || graph.is_some()) {
        return Err(CliError::Validation(format!(
            "--td and --graph apply to xp and fpt only, not {method}"
        )));
    }
    if let (Some(w), Some(g)) = (wanted, graph) {
        if w != g {
            let name = if w == GraphKind::Primal {
                "primal"
            } else {
                "rotation"
            };
            return Err(CliError::Validation(format!(
                "{method} works over the {name} graph"
            )));
        }
    }
    Ok(match method {
        Method::Xp => {
            let ntd = decomposition(td, &primal_graph(inst))?;
            smtw_xp::xp_solve(inst, problem, &ntd)?
        }
        Method::Fpt => {
            if matches!(problem, Problem::MaxSmt | Problem::MinSmt) {
                return Err(SolveError::Invalid(format!(
                    "{problem} has ties and no rotation program; use the xp method"
                ))
                .into());
            }
            let rs = build_rotation_structure(inst)?;
            let ntd = decomposition(td, &rs.rotation_graph())?;
            smtw_fpt::fpt_solve(inst, &rs, &ntd, problem)?
        }
        Method::Oracle => oracle_report(inst, problem)?,
        Method::Gs => gs_report(inst, problem)?,
    })
}

pub(crate) fn solve(a: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let inst = parse_instance(&read_file(&a.instance)?)?;
    let r = solve_instance(&inst, a.problem, a.method, a.graph, a.td.as_deref())?;
    print_json(out, &report_json(&r, a.witness))
}

fn rotations_json(rs: &RotationStructure) -> Result<Value, CliError> {
    let rotations: Vec<Value> = rs
        .rotations()
        .iter()
        .map(|r| {
            json!({
                "id": r.id + 1,
                "pairs": r.pairs.iter().map(|&(m, w)| json!([m + 1, w + 1])).collect::<Vec<_>>(),
            })
        })
        .collect();
    let arcs: Vec<Value> = rs
        .arcs()
        .into_iter()
        .map(|(a, b)| json!([a + 1, b + 1]))
        .collect();
    let closed = rs.for_each_closed_set(smtw_oracle::CLOSED_SET_GUARD, |_| {})?;
    Ok(json!({
        "rotations": rotations,
        "arcs": arcs,
        "closed_sets": closed,
        "man_optimal": pairs_json(rs.man_optimal()),
        "woman_optimal": pairs_json(rs.woman_optimal()),
    }))
}

pub(crate) fn rotations(a: &RotationsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let inst = parse_instance(&read_file(&a.instance)?)?;
    let rs = build_rotation_structure(&inst)?;
    if a.dot {
        write!(out, "{}", rs.to_dot()).map_err(|e| CliError::Validation(format!("write: {e}")))
    } else {
        print_json(out, &rotations_json(&rs)?)
    }
}
