use std::io::Write;

use serde_json::{json, Value};
use smtw_instance::write_instance;
use smtw_reduce::{
    parse_clique, parse_dimacs, reduce_clique_to_bsm, reduce_clique_to_max_smt,
    reduce_clique_to_min_smt, reduce_clique_to_sesm, reduce_sat, verify_reduction, write_sidecar,
    CheckStatus, CliqueInput, CliqueMode, ReduceError, ReductionKind, ReductionOutput, SatOutcome,
    SatSpacers, Spacers,
};

use crate::{print_json, read_file, CliError, GenerateArgs, ReductionArgs};

/// Upper end of the search for the default `s40`.
const S40_SEARCH: u64 = 1 << 16;

/// Accepts the canonical names plus `minsmt`/`maxsmt` spellings.
pub fn parse_kind(s: &str) -> Result<ReductionKind, CliError> {
    let norm = s
        .to_ascii_lowercase()
        .replace("minsmt", "min-smt")
        .replace("maxsmt", "max-smt");
    norm.parse().map_err(CliError::Validation)
}

/// Splits `class ...` lines out of a graph file.
fn split_classes(text: &str) -> (String, String) {
    let (mut graph, mut classes) = (String::new(), String::new());
    for line in text.lines() {
        match line.trim_start().strip_prefix("class") {
            Some(rest) if rest.is_empty() || rest.starts_with(char::is_whitespace) => {
                classes.push_str(rest.trim());
                classes.push('\n');
            }
            _ => {
                graph.push_str(line);
                graph.push('\n');
            }
        }
    }
    (graph, classes)
}

fn clique_input(a: &ReductionArgs) -> Result<CliqueInput, CliError> {
    let (graph, inline) = split_classes(&read_file(&a.input)?);
    let partition = match &a.partition {
        Some(_) if !inline.trim().is_empty() => {
            return Err(CliError::Validation(
                "classes given both inline and with --partition".into(),
            ))
        }
        Some(p) => read_file(p)?,
        None if inline.trim().is_empty() => {
            return Err(CliError::Validation(
                "no color classes: pass --partition or add `class` lines".into(),
            ))
        }
        None => inline,
    };
    Ok(parse_clique(&graph, &partition)?)
}

fn clique_output(kind: ReductionKind, a: &ReductionArgs) -> Result<ReductionOutput, CliError> {
    let inp = clique_input(a)?;
    let build = |mode: CliqueMode| match kind {
        ReductionKind::CliqueSesm => reduce_clique_to_sesm(&inp, mode),
        ReductionKind::CliqueBsm => reduce_clique_to_bsm(&inp, mode),
        _ => unreachable!("the SMT reductions take no mode"),
    };
    match kind {
        ReductionKind::CliqueMaxSmt => Ok(reduce_clique_to_max_smt(&inp)?),
        ReductionKind::CliqueMinSmt => Ok(reduce_clique_to_min_smt(&inp)?),
        _ if !a.relaxed => Ok(build(CliqueMode::Strict)?),
        _ => {
            let spacers = |s40| {
                CliqueMode::Relaxed(Spacers {
                    s10: a.s10,
                    s20: a.s20,
                    s30: a.s30,
                    s40,
                    alpha_mult: a.alpha_mult,
                })
            };
            if let Some(s40) = a.s40 {
                return Ok(build(spacers(s40))?);
            }
            for s40 in 1..=S40_SEARCH {
                match build(spacers(s40)) {
                    Err(ReduceError::NegativeAlpha(_)) => continue,
                    r => return Ok(r?),
                }
            }
            Err(CliError::Guard(format!(
                "no s40 up to {S40_SEARCH} makes the happy-pair count non-negative"
            )))
        }
    }
}

pub(crate) enum Built {
    Output(Box<ReductionOutput>),
    Unsatisfiable { block: usize },
}

pub(crate) fn build(a: &ReductionArgs) -> Result<Built, CliError> {
    let kind = parse_kind(&a.kind)?;
    match kind {
        ReductionKind::SatSesm | ReductionKind::SatBsm => {
            let inp = parse_dimacs(&read_file(&a.input)?, a.d)?;
            let spacers = if a.relaxed {
                SatSpacers::Scaled(a.spacer_scale)
            } else {
                SatSpacers::Nominal
            };
            Ok(
                match reduce_sat(&inp, kind == ReductionKind::SatBsm, spacers)? {
                    SatOutcome::Instance(o) => Built::Output(o),
                    SatOutcome::Unsatisfiable { block } => Built::Unsatisfiable { block },
                },
            )
        }
        _ => Ok(Built::Output(Box::new(clique_output(kind, a)?))),
    }
}

fn unsat_json(kind: &str, block: usize) -> Value {
    json!({ "kind": kind, "unsatisfiable_block": block + 1 })
}

pub(crate) fn verify(a: &ReductionArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let o = match build(a)? {
        Built::Output(o) => o,
        Built::Unsatisfiable { block } => {
            return print_json(out, &unsat_json(parse_kind(&a.kind)?.name(), block))
        }
    };
    let rep = verify_reduction(&o);
    let checks: Vec<Value> = rep
        .checks
        .iter()
        .map(|c| {
            let (status, reason) = match &c.status {
                CheckStatus::Pass => ("pass", None),
                CheckStatus::Fail(r) => ("fail", Some(r.as_str())),
                CheckStatus::Skipped(r) => ("skipped", Some(r.as_str())),
            };
            json!({ "name": c.name, "status": status, "reason": reason, "detail": c.detail })
        })
        .collect();
    print_json(
        out,
        &json!({
            "kind": rep.kind.name(),
            "relaxed": rep.relaxed,
            "agents": o.instance.n(),
            "passed": rep.passed(),
            "checks": checks,
            "notes": rep.notes,
        }),
    )?;
    if rep.passed() {
        Ok(())
    } else {
        Err(CliError::Failed("verification failed".into()))
    }
}

pub(crate) fn generate(a: &GenerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let o = match build(&a.reduction)? {
        Built::Output(o) => o,
        Built::Unsatisfiable { block } => {
            return print_json(
                out,
                &unsat_json(parse_kind(&a.reduction.kind)?.name(), block),
            )
        }
    };
    let inst_path = a.out.with_extension("smti");
    let meta_path = a.out.with_extension("meta");
    let write = |p: &std::path::Path, text: String| {
        std::fs::write(p, text).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))
    };
    write(&inst_path, write_instance(&o.instance))?;
    write(&meta_path, write_sidecar(&o))?;
    print_json(
        out,
        &json!({
            "kind": o.kind.name(),
            "relaxed": o.relaxed,
            "agents": o.instance.n(),
            "instance": inst_path.display().to_string(),
            "sidecar": meta_path.display().to_string(),
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_aliases() {
        assert_eq!(
            parse_kind("clique-minsmt").unwrap(),
            ReductionKind::CliqueMinSmt
        );
        assert_eq!(
            parse_kind("clique-maxsmt").unwrap(),
            ReductionKind::CliqueMaxSmt
        );
        assert_eq!(parse_kind("SAT-BSM").unwrap(), ReductionKind::SatBsm);
        assert!(parse_kind("clique").is_err());
    }

    #[test]
    fn class_lines_are_split_off() {
        let (g, c) = split_classes("4 2\nclass 1 2\n1 3\nclass 3 4\n2 4\n");
        assert_eq!(g, "4 2\n1 3\n2 4\n");
        assert_eq!(c, "1 2\n3 4\n");
        // a token merely starting with "class" stays in the graph
        let (g, c) = split_classes("classy\n");
        assert_eq!((g.as_str(), c.as_str()), ("classy\n", ""));
    }
}
