use std::collections::BTreeMap;

use smtw_instance::Matching;

use crate::builder::{strict, Builder};
use crate::clique::{Clique, CliqueInput};
use crate::clique_sm::{pairs, TW_SLACK};
use crate::{
    BoundGraph, Predicted, ReduceError, ReductionKind, ReductionOutput, Role, Source, Target,
};

/// Leader lists shared by both variants: vertex women in order (reversed for
/// the mirror), each followed by the edge women incident to that vertex.
fn leader_lists(b: &mut Builder, inp: &CliqueInput, tail: Option<(&'static str, &'static str)>) {
    let (k, p) = (inp.k(), inp.p());
    for i in 0..k {
        for mirror in [false, true] {
            let me = b.m(if mirror { "m_hat" } else { "m" }, &[i + 1]);
            let order: Vec<usize> = if mirror {
                (0..p).rev().collect()
            } else {
                (0..p).collect()
            };
            let mut list = Vec::new();
            for &j in &order {
                list.push(b.w(if mirror { "w_hat" } else { "w" }, &[i + 1, j + 1]));
                list.extend(
                    inp.incident(i, j)
                        .iter()
                        .map(|&(x, y, t)| b.w("w_edge", &[x + 1, y + 1, t + 1])),
                );
            }
            if let Some((plain, hat)) = tail {
                list.push(b.w(if mirror { hat } else { plain }, &[i + 1]));
            }
            b.set_man(me, strict(list));
        }
    }
}

fn leaders_of(b: &Builder, i: usize, j: usize) -> Vec<usize> {
    vec![
        b.m("m", &[i]),
        b.m("m_hat", &[i]),
        b.m("m", &[j]),
        b.m("m_hat", &[j]),
    ]
}

fn output(
    kind: ReductionKind,
    inp: &CliqueInput,
    b: Builder,
    agents: usize,
    target: Target,
) -> Result<ReductionOutput, ReduceError> {
    let (instance, men, women) = b.finish()?;
    Ok(ReductionOutput {
        kind,
        relaxed: false,
        instance,
        men,
        women,
        predicted: Predicted {
            agents,
            happy_pairs: 0,
            treewidth_bound: 2 * inp.k() + TW_SLACK,
            bound_graph: BoundGraph::Primal,
            target,
            extra: BTreeMap::new(),
        },
        source: Source::Clique(inp.clone()),
    })
}

/// A perfect weakly stable matching exists iff the graph has a multicolored clique.
pub fn reduce_clique_to_max_smt(inp: &CliqueInput) -> Result<ReductionOutput, ReduceError> {
    inp.require_pair_edges()?;
    let (k, p) = (inp.k(), inp.p());
    let mut b = Builder::default();
    for i in 1..=k {
        b.man("m", &[i]);
        b.man("m_hat", &[i]);
        for j in 2..=p {
            b.man("m_enr", &[i, j]);
        }
        for j in 1..=p {
            b.man("m_hat_enr", &[i, j]);
        }
        for j in 1..=p {
            b.woman("w", &[i, j]);
            b.woman("w_hat", &[i, j]);
        }
        b.woman("w_sel", &[i]);
    }
    let all = pairs(inp);
    for (&(i, j), list) in &all {
        let q = list.len();
        for t in 1..=q {
            let idx = [i + 1, j + 1, t];
            b.man("m_edge", &idx);
            b.man("m_bar_edge", &idx);
            b.woman("w_edge", &idx);
            b.woman("w_bar_edge", &idx);
            if t >= 2 {
                b.man("m_tilde_edge", &idx);
                b.woman("w_tilde_edge", &idx);
            }
        }
    }
    leader_lists(&mut b, inp, None);
    for i in 1..=k {
        for j in 2..=p {
            let m = b.m("m_enr", &[i, j]);
            let l = vec![vec![b.w("w", &[i, j - 1]), b.w("w", &[i, j])]];
            b.set_man(m, l);
        }
        for j in 1..=p {
            let m = b.m("m_hat_enr", &[i, j]);
            let l = vec![b.w("w_sel", &[i]), b.w("w", &[i, j]), b.w("w_hat", &[i, j])];
            b.set_man(m, strict(l));
        }
        for j in 1..=p {
            let w = b.w("w", &[i, j]);
            let first = if j == 1 {
                vec![b.m("m_enr", &[i, 2])]
            } else if j < p {
                vec![b.m("m_enr", &[i, j]), b.m("m_enr", &[i, j + 1])]
            } else {
                vec![b.m("m_enr", &[i, p])]
            };
            b.set_woman(
                w,
                vec![first, vec![b.m("m_hat_enr", &[i, j])], vec![b.m("m", &[i])]],
            );
            let wh = b.w("w_hat", &[i, j]);
            b.set_woman(
                wh,
                strict(vec![b.m("m_hat_enr", &[i, j]), b.m("m_hat", &[i])]),
            );
        }
        let ws = b.w("w_sel", &[i]);
        b.set_woman(
            ws,
            vec![(1..=p).map(|j| b.m("m_hat_enr", &[i, j])).collect()],
        );
    }
    for (&(i, j), list) in &all {
        let q = list.len();
        let id = |t: usize| [i + 1, j + 1, t];
        for t in 1..=q {
            let m = b.m("m_edge", &id(t));
            b.set_man(
                m,
                vec![vec![b.w("w_edge", &id(t)), b.w("w_bar_edge", &id(t))]],
            );

            let mut tilde = Vec::new();
            if t >= 2 {
                tilde.push(b.w("w_tilde_edge", &id(t)));
            }
            if t < q {
                tilde.push(b.w("w_tilde_edge", &id(t + 1)));
            }
            let mb = b.m("m_bar_edge", &id(t));
            let mut l = if tilde.is_empty() {
                Vec::new()
            } else {
                vec![tilde]
            };
            l.push(vec![b.w("w_edge", &id(t))]);
            b.set_man(mb, l);

            let w = b.w("w_edge", &id(t));
            let l = vec![vec![m], leaders_of(&b, i + 1, j + 1), vec![mb]];
            b.set_woman(w, l);

            let mut tilde = Vec::new();
            if t >= 2 {
                tilde.push(b.m("m_tilde_edge", &id(t)));
            }
            if t < q {
                tilde.push(b.m("m_tilde_edge", &id(t + 1)));
            }
            let wb = b.w("w_bar_edge", &id(t));
            let mut l = if tilde.is_empty() {
                Vec::new()
            } else {
                vec![tilde]
            };
            l.push(vec![m]);
            b.set_woman(wb, l);

            if t >= 2 {
                let mt = b.m("m_tilde_edge", &id(t));
                b.set_man(
                    mt,
                    vec![vec![
                        b.w("w_bar_edge", &id(t - 1)),
                        b.w("w_bar_edge", &id(t)),
                    ]],
                );
                let wt = b.w("w_tilde_edge", &id(t));
                b.set_woman(
                    wt,
                    vec![vec![
                        b.m("m_bar_edge", &id(t - 1)),
                        b.m("m_bar_edge", &id(t)),
                    ]],
                );
            }
        }
    }
    let edge_agents: usize = all
        .values()
        .map(|l| l.len())
        .filter(|&q| q > 0)
        .map(|q| 6 * q - 2)
        .sum();
    let agents = 2 * k * (2 * p + 1) + edge_agents;
    let men = agents / 2;
    output(
        ReductionKind::CliqueMaxSmt,
        inp,
        b,
        agents,
        Target::MaxSize(men),
    )
}

/// The smallest weakly stable matching has size `k + 2|V| + |E|` iff the
/// graph has a multicolored clique.
pub fn reduce_clique_to_min_smt(inp: &CliqueInput) -> Result<ReductionOutput, ReduceError> {
    inp.require_pair_edges()?;
    let (k, p) = (inp.k(), inp.p());
    let mut b = Builder::default();
    for i in 1..=k {
        b.man("m", &[i]);
        b.man("m_hat", &[i]);
        for j in 1..=p {
            b.man("m_enr", &[i, j]);
            b.man("m_hat_enr", &[i, j]);
        }
        for j in 1..=p {
            b.woman("w", &[i, j]);
            b.woman("w_hat", &[i, j]);
            b.woman("w_bar", &[i, j]);
        }
        b.woman("w_lead", &[i]);
        b.woman("w_hat_lead", &[i]);
    }
    let all = pairs(inp);
    for (&(i, j), list) in &all {
        b.woman("w_pair", &[i + 1, j + 1]);
        for t in 1..=list.len() {
            b.man("m_edge", &[i + 1, j + 1, t]);
            b.woman("w_edge", &[i + 1, j + 1, t]);
        }
    }
    leader_lists(&mut b, inp, Some(("w_lead", "w_hat_lead")));
    for i in 1..=k {
        for j in 1..=p {
            let (m, mh) = (b.m("m_enr", &[i, j]), b.m("m_hat_enr", &[i, j]));
            let (w, wh, wb) = (
                b.w("w", &[i, j]),
                b.w("w_hat", &[i, j]),
                b.w("w_bar", &[i, j]),
            );
            b.set_man(m, strict(vec![w, wb]));
            b.set_man(mh, strict(vec![wh, wb]));
            b.set_woman(w, vec![vec![b.m("m", &[i]), m]]);
            b.set_woman(wh, vec![vec![b.m("m_hat", &[i]), mh]]);
            b.set_woman(wb, vec![vec![m, mh]]);
        }
        let wl = b.w("w_lead", &[i]);
        b.set_woman(wl, vec![vec![b.m("m", &[i])]]);
        let wl = b.w("w_hat_lead", &[i]);
        b.set_woman(wl, vec![vec![b.m("m_hat", &[i])]]);
    }
    for (&(i, j), list) in &all {
        let wp = b.w("w_pair", &[i + 1, j + 1]);
        let mut tied = Vec::new();
        for t in 1..=list.len() {
            let idx = [i + 1, j + 1, t];
            let (m, w) = (b.m("m_edge", &idx), b.w("w_edge", &idx));
            b.set_man(m, strict(vec![wp, w]));
            b.set_woman(w, vec![vec![m], leaders_of(&b, i + 1, j + 1)]);
            tied.push(m);
        }
        b.set_woman(
            wp,
            if tied.is_empty() {
                Vec::new()
            } else {
                vec![tied]
            },
        );
    }
    let e = inp.num_edges();
    let agents = k * (5 * p + 4) + 2 * e + k * (k - 1) / 2;
    let target = Target::MinSize(k + 2 * inp.num_vertices() + e);
    output(ReductionKind::CliqueMinSmt, inp, b, agents, target)
}

/// The perfect matching a clique induces in the max-SMT reduction.
pub fn mu_c_max(
    out: &ReductionOutput,
    inp: &CliqueInput,
    c: &Clique,
) -> Result<Matching, ReduceError> {
    let (k, p) = (inp.k(), inp.p());
    let r = Role::new;
    let mut v = Vec::new();
    for i in 1..=k {
        let l = c.vertices[i - 1] + 1;
        v.push((r("m", &[i]), r("w", &[i, l])));
        v.push((r("m_hat", &[i]), r("w_hat", &[i, l])));
        for j in 2..=p {
            v.push((
                r("m_enr", &[i, j]),
                r("w", &[i, if j <= l { j - 1 } else { j }]),
            ));
        }
        for j in 1..=p {
            let w = if j == l {
                r("w_sel", &[i])
            } else {
                r("w_hat", &[i, j])
            };
            v.push((r("m_hat_enr", &[i, j]), w));
        }
    }
    for (&(i, j), list) in &pairs(inp) {
        let l = c.edges[&(i, j)] + 1;
        let id = |t: usize| [i + 1, j + 1, t];
        for t in 1..=list.len() {
            if t == l {
                v.push((r("m_edge", &id(t)), r("w_bar_edge", &id(t))));
                v.push((r("m_bar_edge", &id(t)), r("w_edge", &id(t))));
            } else {
                v.push((r("m_edge", &id(t)), r("w_edge", &id(t))));
            }
            if t >= 2 && t <= l {
                v.push((r("m_tilde_edge", &id(t)), r("w_bar_edge", &id(t - 1))));
                v.push((r("m_bar_edge", &id(t - 1)), r("w_tilde_edge", &id(t))));
            } else if t > l {
                v.push((r("m_tilde_edge", &id(t)), r("w_bar_edge", &id(t))));
                v.push((r("m_bar_edge", &id(t)), r("w_tilde_edge", &id(t))));
            }
        }
    }
    Ok(out.matching_of(&v)?)
}

/// The smallest weakly stable matching a clique induces in the min-SMT reduction.
pub fn mu_c_min(
    out: &ReductionOutput,
    inp: &CliqueInput,
    c: &Clique,
) -> Result<Matching, ReduceError> {
    let (k, p) = (inp.k(), inp.p());
    let r = Role::new;
    let mut v = Vec::new();
    for i in 1..=k {
        let l = c.vertices[i - 1] + 1;
        v.push((r("m", &[i]), r("w", &[i, l])));
        v.push((r("m_hat", &[i]), r("w_hat", &[i, l])));
        for j in 1..=p {
            if j == l {
                v.push((r("m_enr", &[i, j]), r("w_bar", &[i, j])));
            } else {
                v.push((r("m_enr", &[i, j]), r("w", &[i, j])));
                v.push((r("m_hat_enr", &[i, j]), r("w_hat", &[i, j])));
            }
        }
    }
    for (&(i, j), list) in &pairs(inp) {
        let l = c.edges[&(i, j)] + 1;
        for t in 1..=list.len() {
            let w = if t == l {
                r("w_pair", &[i + 1, j + 1])
            } else {
                r("w_edge", &[i + 1, j + 1, t])
            };
            v.push((r("m_edge", &[i + 1, j + 1, t]), w));
        }
    }
    Ok(out.matching_of(&v)?)
}
