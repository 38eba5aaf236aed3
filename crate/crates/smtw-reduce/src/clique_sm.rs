use std::collections::BTreeMap;

use smtw_instance::Matching;

use crate::builder::{strict, Builder, M_HAP, M_STAR, W_HAP, W_STAR};
use crate::clique::{Clique, CliqueInput, CliqueMode, Spacers};
use crate::{
    BoundGraph, Predicted, ReduceError, ReductionKind, ReductionOutput, Role, Source, Target,
};

/// Slack added to `2k` for the primal treewidth bound.
pub(crate) const TW_SLACK: usize = 12;

fn c2(k: i128) -> i128 {
    k * (k - 1) / 2
}

/// The happy-pair count `α` of the sex-equality variant, or `α̂` for balance.
fn alpha(inp: &CliqueInput, s: &Spacers, bsm: bool) -> i128 {
    let (k, p, e) = (inp.k() as i128, inp.p() as i128, inp.num_edges() as i128);
    let (s10, s30, s40) = (s.s10 as i128, s.s30 as i128, s.s40 as i128);
    let two_k = 1i128 << k;
    let base = -9 * k + 3 * p * k + 4 * k * k
        - (p * k - k + 2) * e
        - (e - 2 * c2(k)) * s10
        - (two_k - 1) * s30;
    if bsm {
        base + (p - 1) * ((1i128 << (2 * k)) - 1) / 3 * s40
    } else {
        base + (p - 1) * (two_k - 1) * s40
    }
}

/// Happy agents inserted as fillers, summed over the gadget definitions.
fn fillers(inp: &CliqueInput, s: &Spacers, bsm: bool) -> u128 {
    let (k, p, e) = (inp.k() as u128, inp.p() as u128, inp.num_edges() as u128);
    let (s10, s20, s30, s40) = (s.s10 as u128, s.s20 as u128, s.s30 as u128, s.s40 as u128);
    let mut total = 0u128;
    for i in 0..inp.k() {
        let deg = inp.class_degree(i) as u128;
        // m^i and its mirror
        total += 2 * (s20 * (p - 1) + p * e - deg);
        // m̃^i_1, the middle ones, m̃^i_p
        total += (s30 + 1) + (p - 2) * (1 << i) * s30 + ((1 << (k - 1)) * s30 + 1);
        // w^i_j and ŵ^i_j
        total += 2 * ((p - 2) * s20 + s20 + 1);
        let tilde = if bsm {
            1u128 << (2 * i)
        } else {
            1u128 << (k as usize - 1 - i)
        };
        total += p * tilde * s40;
    }
    total + 2 * e * s10
}

/// Either variant; `bsm` selects the balanced one.
pub fn reduce_clique_to_sm(
    inp: &CliqueInput,
    mode: CliqueMode,
    bsm: bool,
) -> Result<ReductionOutput, ReduceError> {
    inp.require_pair_edges()?;
    let s = mode.spacers(inp)?;
    let a = alpha(inp, &s, bsm);
    if a < 0 {
        return Err(ReduceError::NegativeAlpha(a));
    }
    let requested = (a as u128)
        .checked_mul(s.alpha_mult as u128)
        .ok_or_else(|| ReduceError::Guard("α' overflows".into()))?;
    let fill = fillers(inp, &s, bsm);
    let happy = requested.max(fill);
    let (k, p) = (inp.k(), inp.p());
    let e = inp.num_edges();
    let agents = 8 * (p * k) as u128 + 4 * e as u128 + 2 * happy + 2;
    if agents > crate::MAX_AGENTS as u128 {
        return Err(ReduceError::Guard(format!(
            "{agents} agents exceed {}",
            crate::MAX_AGENTS
        )));
    }
    let happy = happy as usize;

    let mut b = Builder::default();
    for i in 1..=k {
        b.man("m", &[i]);
        b.man("m_hat", &[i]);
    }
    for i in 1..=k {
        for j in 1..=p {
            b.woman("w", &[i, j]);
            b.woman("w_hat", &[i, j]);
        }
        for j in 2..=p {
            b.man("m_enr", &[i, j]);
        }
        for j in 1..p {
            b.man("m_hat_enr", &[i, j]);
        }
        for j in 1..=p {
            b.man("m_tilde", &[i, j]);
            b.man("m_bar", &[i, j]);
            b.woman("w_tilde", &[i, j]);
            b.woman("w_bar", &[i, j]);
        }
    }
    for (&(i, j), list) in pairs(inp).iter() {
        for t in 1..=list.len() {
            let idx = [i + 1, j + 1, t];
            b.man("m_edge", &idx);
            b.man("m_bar_edge", &idx);
            b.woman("w_edge", &idx);
            b.woman("w_bar_edge", &idx);
        }
    }
    let edge_w =
        |b: &Builder, (x, y, t): (usize, usize, usize)| b.w("w_edge", &[x + 1, y + 1, t + 1]);

    // leaders: the vertex women in order, each followed by its edges, padded with happy women
    for i in 0..k {
        for mirror in [false, true] {
            let me = b.m(if mirror { "m_hat" } else { "m" }, &[i + 1]);
            let order: Vec<usize> = if mirror {
                (0..p).rev().collect()
            } else {
                (0..p).collect()
            };
            let mut list = Vec::new();
            for (pos, &j) in order.iter().enumerate() {
                list.push(b.w(if mirror { "w_hat" } else { "w" }, &[i + 1, j + 1]));
                let inc = inp.incident(i, j);
                list.extend(inc.iter().map(|&x| edge_w(&b, x)));
                let block = 1 + e + if pos + 1 < p { s.s20 as usize } else { 0 };
                let pad = block - 1 - inc.len();
                list.extend(b.fresh_women(me, pad)?);
            }
            b.set_man(me, strict(list));
        }
    }
    for i in 1..=k {
        for j in 2..=p {
            let m = b.m("m_enr", &[i, j]);
            let l = vec![b.w("w", &[i, j]), b.w("w", &[i, j - 1])];
            b.set_man(m, strict(l));
        }
        for j in 1..p {
            let m = b.m("m_hat_enr", &[i, j]);
            let l = vec![b.w("w_hat", &[i, j]), b.w("w_hat", &[i, j + 1])];
            b.set_man(m, strict(l));
        }
        for j in 1..=p {
            let m = b.m("m_tilde", &[i, j]);
            let mut l = vec![b.w("w_tilde", &[i, j])];
            let pad = if j == 1 {
                l.push(b.w("w_hat", &[i, 1]));
                s.s30 as usize + 1
            } else if j < p {
                l.push(b.w("w", &[i, j]));
                l.push(b.w("w_hat", &[i, j]));
                (1usize << (i - 1)) * s.s30 as usize
            } else {
                l.push(b.w("w", &[i, p]));
                (1usize << (k - 1)) * s.s30 as usize + 1
            };
            l.extend(b.fresh_women(m, pad)?);
            l.push(b.w("w_bar", &[i, j]));
            b.set_man(m, strict(l));
            let mb = b.m("m_bar", &[i, j]);
            let l = vec![b.w("w_bar", &[i, j]), b.w("w_tilde", &[i, j])];
            b.set_man(mb, strict(l));
        }
    }
    for (&(i, j), list) in pairs(inp).iter() {
        for t in 1..=list.len() {
            let idx = [i + 1, j + 1, t];
            let m = b.m("m_edge", &idx);
            let mut l = vec![b.w("w_edge", &idx)];
            l.extend(b.fresh_women(m, s.s10 as usize)?);
            l.push(b.w("w_bar_edge", &idx));
            b.set_man(m, strict(l));
            let mb = b.m("m_bar_edge", &idx);
            let l = vec![b.w("w_bar_edge", &idx), b.w("w_edge", &idx)];
            b.set_man(mb, strict(l));
        }
    }

    for i in 1..=k {
        let (leader, mirror) = (b.m("m", &[i]), b.m("m_hat", &[i]));
        for j in 1..=p {
            let w = b.w("w", &[i, j]);
            let l = if j == 1 {
                vec![b.m("m_enr", &[i, 2]), leader]
            } else {
                let mut l = if j < p {
                    vec![b.m("m_enr", &[i, j + 1])]
                } else {
                    b.fresh_men(w, 1)?
                };
                l.push(leader);
                l.push(b.m("m_tilde", &[i, j]));
                l.extend(b.fresh_men(w, s.s20 as usize)?);
                l.push(b.m("m_enr", &[i, j]));
                l
            };
            b.set_woman(w, strict(l));
        }
        for j in 1..=p {
            let w = b.w("w_hat", &[i, j]);
            let l = if j == p {
                vec![b.m("m_hat_enr", &[i, p - 1]), mirror]
            } else {
                let mut l = if j > 1 {
                    vec![b.m("m_hat_enr", &[i, j - 1])]
                } else {
                    b.fresh_men(w, 1)?
                };
                l.push(mirror);
                l.push(b.m("m_tilde", &[i, j]));
                l.extend(b.fresh_men(w, s.s20 as usize)?);
                l.push(b.m("m_hat_enr", &[i, j]));
                l
            };
            b.set_woman(w, strict(l));
        }
        for j in 1..=p {
            let w = b.w("w_tilde", &[i, j]);
            let factor = if bsm {
                1usize << (2 * (i - 1))
            } else {
                1usize << (k - i)
            };
            let mut l = vec![b.m("m_bar", &[i, j])];
            l.extend(b.fresh_men(w, factor * s.s40 as usize)?);
            l.push(b.m("m_tilde", &[i, j]));
            b.set_woman(w, strict(l));
            let wb = b.w("w_bar", &[i, j]);
            let l = vec![b.m("m_tilde", &[i, j]), b.m("m_bar", &[i, j])];
            b.set_woman(wb, strict(l));
        }
    }
    for (&(i, j), list) in pairs(inp).iter() {
        for t in 1..=list.len() {
            let idx = [i + 1, j + 1, t];
            let w = b.w("w_edge", &idx);
            let mut l = vec![
                b.m("m_bar_edge", &idx),
                b.m("m", &[i + 1]),
                b.m("m_hat", &[i + 1]),
                b.m("m", &[j + 1]),
                b.m("m_hat", &[j + 1]),
            ];
            l.extend(b.fresh_men(w, s.s10 as usize)?);
            l.push(b.m("m_edge", &idx));
            b.set_woman(w, strict(l));
            let wb = b.w("w_bar_edge", &idx);
            let l = vec![b.m("m_edge", &idx), b.m("m_bar_edge", &idx)];
            b.set_woman(wb, strict(l));
        }
    }
    b.pool(happy)?;
    b.garbage_collector(a as usize);
    let built_happy = b.happy_count();
    let (instance, men, women) = b.finish()?;

    let mut extra = BTreeMap::new();
    extra.insert(if bsm { "alpha_hat" } else { "alpha" }.to_string(), a);
    extra.insert("alpha_prime_requested".into(), requested as i128);
    extra.insert("fillers".into(), fill as i128);
    for (name, v) in [
        ("s10", s.s10),
        ("s20", s.s20),
        ("s30", s.s30),
        ("s40", s.s40),
        ("alpha_mult", s.alpha_mult),
    ] {
        extra.insert(name.into(), v as i128);
    }
    let target = if bsm {
        let (ki, pi) = (k as i128, p as i128);
        let eta = 1 - 6 * ki
            + 9 * pi * ki
            + 3 * ki * ki
            + 2 * e as i128
            + (pi - 1) * ki * s.s20 as i128
            + c2(ki) * s.s10 as i128
            + (pi - 1) * ((1i128 << (2 * ki)) - 1) / 3 * s.s40 as i128
            + built_happy as i128;
        extra.insert("eta".into(), eta);
        Target::Bal(eta)
    } else {
        Target::Delta(0)
    };
    Ok(ReductionOutput {
        kind: if bsm {
            ReductionKind::CliqueBsm
        } else {
            ReductionKind::CliqueSesm
        },
        relaxed: matches!(mode, CliqueMode::Relaxed(_)),
        instance,
        men,
        women,
        predicted: Predicted {
            agents: agents as usize,
            happy_pairs: happy,
            treewidth_bound: 2 * k + TW_SLACK,
            bound_graph: BoundGraph::Primal,
            target,
            extra,
        },
        source: Source::Clique(inp.clone()),
    })
}

pub fn reduce_clique_to_sesm(
    inp: &CliqueInput,
    mode: CliqueMode,
) -> Result<ReductionOutput, ReduceError> {
    reduce_clique_to_sm(inp, mode, false)
}

pub fn reduce_clique_to_bsm(
    inp: &CliqueInput,
    mode: CliqueMode,
) -> Result<ReductionOutput, ReduceError> {
    reduce_clique_to_sm(inp, mode, true)
}

pub(crate) fn pairs(inp: &CliqueInput) -> BTreeMap<(usize, usize), Vec<(usize, usize)>> {
    let k = inp.k();
    let mut out = BTreeMap::new();
    for i in 0..k {
        for j in i + 1..k {
            out.insert((i, j), inp.edges_between(i, j).to_vec());
        }
    }
    out
}

/// The matching a clique induces in the SESM or BSM reduction.
pub fn mu_c_sm(
    out: &ReductionOutput,
    inp: &CliqueInput,
    c: &Clique,
) -> Result<Matching, ReduceError> {
    let (k, p) = (inp.k(), inp.p());
    let r = Role::new;
    let mut pairs_out = Vec::new();
    let mut pair = |m: Role, w: Role| pairs_out.push((m, w));
    for i in 1..=k {
        let l = c.vertices[i - 1] + 1;
        pair(r("m", &[i]), r("w", &[i, l]));
        pair(r("m_hat", &[i]), r("w_hat", &[i, l]));
        for j in 2..=p {
            let to = if j <= l { j - 1 } else { j };
            pair(r("m_enr", &[i, j]), r("w", &[i, to]));
        }
        for j in 1..p {
            let to = if j >= l { j + 1 } else { j };
            pair(r("m_hat_enr", &[i, j]), r("w_hat", &[i, to]));
        }
        for j in 1..=p {
            if j == l {
                pair(r("m_tilde", &[i, j]), r("w_bar", &[i, j]));
                pair(r("m_bar", &[i, j]), r("w_tilde", &[i, j]));
            } else {
                pair(r("m_tilde", &[i, j]), r("w_tilde", &[i, j]));
                pair(r("m_bar", &[i, j]), r("w_bar", &[i, j]));
            }
        }
    }
    for (&(i, j), list) in pairs(inp).iter() {
        let chosen = c.edges[&(i, j)] + 1;
        for t in 1..=list.len() {
            let idx = [i + 1, j + 1, t];
            if t == chosen {
                pair(r("m_edge", &idx), r("w_edge", &idx));
                pair(r("m_bar_edge", &idx), r("w_bar_edge", &idx));
            } else {
                pair(r("m_edge", &idx), r("w_bar_edge", &idx));
                pair(r("m_bar_edge", &idx), r("w_edge", &idx));
            }
        }
    }
    let happy = out.men.iter().filter(|x| x.family == M_HAP).count();
    for h in 1..=happy {
        pair(r(M_HAP, &[h]), r(W_HAP, &[h]));
    }
    pair(r(M_STAR, &[]), r(W_STAR, &[]));
    Ok(out.matching_of(&pairs_out)?)
}
