use std::fmt::Write;

use crate::{BoundGraph, ReductionOutput, Target};

/// Line-oriented `key: value` metadata: kind, predictions, then one line per
/// agent giving its 1-based id and role.
pub fn write_sidecar(out: &ReductionOutput) -> String {
    let mut s = String::new();
    let p = &out.predicted;
    let _ = writeln!(s, "reduction: {}", out.kind.name());
    let _ = writeln!(
        s,
        "mode: {}",
        if out.relaxed { "relaxed" } else { "strict" }
    );
    let _ = writeln!(s, "predict.agents: {}", p.agents);
    let _ = writeln!(s, "predict.happy_pairs: {}", p.happy_pairs);
    let _ = writeln!(s, "predict.treewidth_bound: {}", p.treewidth_bound);
    let graph = match p.bound_graph {
        BoundGraph::Primal => "primal",
        BoundGraph::Rotation => "rotation",
    };
    let _ = writeln!(s, "predict.bound_graph: {graph}");
    let (name, v) = match p.target {
        Target::Delta(v) => ("delta_at_most", v),
        Target::Bal(v) => ("bal_at_most", v),
        Target::MaxSize(v) => ("max_size", v as i128),
        Target::MinSize(v) => ("min_size", v as i128),
    };
    let _ = writeln!(s, "predict.{name}: {v}");
    for (k, v) in &p.extra {
        let _ = writeln!(s, "predict.{k}: {v}");
    }
    for (i, r) in out.men.iter().enumerate() {
        let _ = writeln!(s, "man {}: {r}", i + 1);
    }
    for (i, r) in out.women.iter().enumerate() {
        let _ = writeln!(s, "woman {}: {r}", i + 1);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{parse_clique, reduce_clique_to_min_smt};

    #[test]
    fn lists_every_agent() {
        let inp = parse_clique("4 2\n1 3\n2 4\n", "1 2\n3 4\n").unwrap();
        let out = reduce_clique_to_min_smt(&inp).unwrap();
        let text = write_sidecar(&out);
        assert!(text.starts_with("reduction: clique-min-smt\n"));
        assert_eq!(
            text.lines()
                .filter(|l| l.starts_with("man ") || l.starts_with("woman "))
                .count(),
            out.instance.n()
        );
        assert!(text.contains("man 1: m 1\n"));
        assert!(text.contains("predict.min_size: 12\n"));
    }
}
