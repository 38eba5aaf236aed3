use std::collections::{BTreeSet, HashMap};

use smtw_instance::{
    is_stable, parse_instance, primal_graph, score, write_instance, Matching, SolveError,
};
use smtw_oracle::{enumerate_stable_pruned, stable_by_closed_sets};
use smtw_rotation::{build_rotation_structure, RotationStructure};
use smtw_td::{heuristic_decomposition, validate, TreeDecomposition};

use crate::clique::CliqueInput;
use crate::sat::{reduce_sat, SatInput, SatOutcome, SatSpacers};
use crate::{
    mu_c_max, mu_c_min, mu_c_sm, BoundGraph, ReduceError, ReductionKind, ReductionOutput, Role,
    Source, Target,
};

/// Search nodes granted to the stable-set oracle per check.
pub const ORACLE_BUDGET: u64 = 50_000_000;
/// Search nodes tried before switching to closed-set enumeration on strict instances.
const SEARCH_BUDGET: u64 = 2_000_000;
/// Vertex choices tried when looking for a multicolored clique.
const CLIQUE_SEARCH: u64 = 1 << 20;
/// Legal sets enumerated before giving up.
const LEGAL_LIMIT: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail(String),
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    /// Measured quantities behind the verdict.
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub kind: ReductionKind,
    pub relaxed: bool,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// No check failed (skipped checks are allowed).
    pub fn passed(&self) -> bool {
        !self
            .checks
            .iter()
            .any(|c| matches!(c.status, CheckStatus::Fail(_)))
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, status: CheckStatus, detail: impl Into<String>) {
        self.checks.push(Check {
            name,
            status,
            detail: detail.into(),
        });
    }

    fn verdict(&mut self, name: &'static str, ok: bool, detail: impl Into<String>) {
        let detail = detail.into();
        let status = if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail(detail.clone())
        };
        self.push(name, status, detail);
    }

    fn record(&mut self, name: &'static str, r: Result<String, Outcome>) {
        match r {
            Ok(d) => self.push(name, CheckStatus::Pass, d),
            Err(Outcome::Fail(d)) => self.push(name, CheckStatus::Fail(d.clone()), d),
            Err(Outcome::Skip(d)) => self.push(name, CheckStatus::Skipped(d.clone()), d),
        }
    }
}

enum Outcome {
    Fail(String),
    Skip(String),
}

impl From<SolveError> for Outcome {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Guard(g) => Outcome::Skip(format!("guard: {g}")),
            e => Outcome::Fail(e.to_string()),
        }
    }
}

impl From<ReduceError> for Outcome {
    fn from(e: ReduceError) -> Self {
        match e {
            ReduceError::Guard(g) | ReduceError::Solve(SolveError::Guard(g)) => {
                Outcome::Skip(format!("guard: {g}"))
            }
            e => Outcome::Fail(e.to_string()),
        }
    }
}

fn fail<T>(s: String) -> Result<T, Outcome> {
    Err(Outcome::Fail(s))
}

/// Runs every structural check that applies to `out`'s reduction kind.
pub fn verify_reduction(out: &ReductionOutput) -> VerificationReport {
    let mut rep = VerificationReport {
        kind: out.kind,
        relaxed: out.relaxed,
        checks: Vec::new(),
        notes: Vec::new(),
    };
    if out.relaxed {
        rep.notes.push(
            "relaxed spacers: list orders are exact, so stable-set structure is checked; \
             measure thresholds depend on spacer magnitudes and are not checked"
                .into(),
        );
    }
    let n = out.instance.n();
    rep.verdict(
        "agent_count",
        n == out.predicted.agents && out.men.len() + out.women.len() == n,
        format!("actual {n}, predicted {}", out.predicted.agents),
    );
    let roles: BTreeSet<&Role> = out.men.iter().chain(&out.women).collect();
    let distinct = out.men.iter().collect::<BTreeSet<_>>().len() == out.men.len()
        && out.women.iter().collect::<BTreeSet<_>>().len() == out.women.len();
    rep.verdict(
        "roles_partition",
        distinct,
        format!("{} roles", roles.len()),
    );
    let back = parse_instance(&write_instance(&out.instance));
    rep.verdict(
        "format_roundtrip",
        back.as_ref() == Ok(&out.instance),
        "write then parse",
    );

    let rs = if out.instance.has_ties() {
        None
    } else {
        Some(build_rotation_structure(&out.instance))
    };
    rep.record("treewidth_bound", treewidth_check(out, rs.as_ref()));

    match &out.source {
        Source::Clique(inp) => clique_checks(out, inp, &mut rep),
        Source::Sat(inp) => match rs {
            Some(Ok(rs)) => sat_checks(out, inp, &rs, &mut rep),
            Some(Err(e)) => rep.push("rotation_structure", CheckStatus::Fail(e.to_string()), ""),
            None => rep.push(
                "rotation_structure",
                CheckStatus::Fail("instance has ties".into()),
                "",
            ),
        },
    }
    rep
}

fn treewidth_check(
    out: &ReductionOutput,
    rs: Option<&Result<RotationStructure, SolveError>>,
) -> Result<String, Outcome> {
    let bound = out.predicted.treewidth_bound;
    let g = match out.predicted.bound_graph {
        BoundGraph::Primal => primal_graph(&out.instance),
        BoundGraph::Rotation => match rs {
            Some(Ok(rs)) => rs.rotation_graph(),
            Some(Err(e)) => return fail(e.to_string()),
            None => return fail("rotation graph of a tied instance".into()),
        },
    };
    let width =
        validate(&heuristic_decomposition(&g), &g).map_err(|e| Outcome::Fail(e.to_string()))?;
    if width <= bound {
        return Ok(format!("min-fill width {width} ≤ {bound}"));
    }
    if let (Source::Sat(inp), Some(Ok(rs))) = (&out.source, rs) {
        let classes = rotation_classes(out, rs);
        if let Some(td) = block_decomposition(inp, &classes) {
            if let Ok(w) = validate(&td, &g) {
                if w <= bound {
                    return Ok(format!(
                        "min-fill width {width}; block decomposition width {w} ≤ {bound}"
                    ));
                }
            }
        }
    }
    fail(format!("min-fill width {width} > {bound}"))
}

/// A path of bags `R₂ ∪ R₁^i ∪ R₃^i`, one per block; valid whenever the
/// rotation digraph lies inside `H_Π`.
fn block_decomposition(inp: &SatInput, classes: &[RotationClass]) -> Option<TreeDecomposition> {
    let id: HashMap<RotationClass, usize> =
        classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let vars: Vec<usize> = (1..=inp.n)
        .map(|t| id.get(&RotationClass::Var { t }).copied())
        .collect::<Option<_>>()?;
    let mut bags = Vec::new();
    for (bi, blk) in inp.blocks.iter().enumerate() {
        let mut bag = vars.clone();
        for j in 1..=blk.assignments.len() {
            bag.push(*id.get(&RotationClass::Bar { i: bi + 1, j })?);
            bag.push(*id.get(&RotationClass::Asg { i: bi + 1, j })?);
        }
        bags.push(bag);
    }
    let edges = (1..bags.len()).map(|i| (i - 1, i)).collect();
    Some(TreeDecomposition::new(bags, edges, 0))
}

// ---------------------------------------------------------------- clique

fn clique_checks(out: &ReductionOutput, inp: &CliqueInput, rep: &mut VerificationReport) {
    rep.record(
        "leader_form",
        check_leader_form(out)
            .map(|()| "all four conditions hold".into())
            .map_err(Outcome::Fail),
    );
    let clique = match inp.find_clique(CLIQUE_SEARCH) {
        Ok(c) => c,
        Err(e) => {
            rep.push("clique_search", CheckStatus::Skipped(e.to_string()), "");
            return;
        }
    };
    match out.kind {
        ReductionKind::CliqueSesm | ReductionKind::CliqueBsm => {
            rep.record(
                "stable_matchings_perfect",
                (|| {
                    // the search is exact but slow here; eliminating closed sets scales further
                    let (set, route) = match enumerate_stable_pruned(&out.instance, SEARCH_BUDGET) {
                        Ok(set) => (set, "search"),
                        Err(SolveError::Guard(_)) => {
                            (stable_by_closed_sets(&out.instance)?, "closed sets")
                        }
                        Err(e) => return Err(e.into()),
                    };
                    let men = out.instance.num_men();
                    match set.matchings.iter().find(|mu| mu.size() != men) {
                        Some(mu) => {
                            fail(format!("a stable matching has size {} of {men}", mu.size()))
                        }
                        None => Ok(format!(
                            "{} stable matchings ({route}), all of size {men}",
                            set.matchings.len()
                        )),
                    }
                })(),
            );
            match &clique {
                Some(c) => {
                    let mu = mu_c_sm(out, inp, c);
                    rep.record(
                        "mu_c_stable",
                        stable_of_size(out, mu, out.instance.num_men()),
                    );
                    if out.relaxed {
                        rep.push(
                            "measure_target",
                            CheckStatus::Skipped("relaxed spacers".into()),
                            "",
                        );
                    } else if let Ok(mu) = mu_c_sm(out, inp, c) {
                        let s = score(&out.instance, &mu).expect("valid matching");
                        let (ok, d) = match out.predicted.target {
                            Target::Delta(t) => (
                                (s.delta as i128).abs() <= t,
                                format!("δ(μ^C) = {}", s.delta),
                            ),
                            Target::Bal(t) => (
                                (s.bal as i128) <= t,
                                format!("bal(μ^C) = {}, η = {t}", s.bal),
                            ),
                            _ => unreachable!("clique SM targets are measures"),
                        };
                        rep.verdict("measure_target", ok, d);
                    }
                }
                None => rep.push(
                    "mu_c_stable",
                    CheckStatus::Skipped("the graph has no multicolored clique".into()),
                    "",
                ),
            }
        }
        ReductionKind::CliqueMaxSmt => {
            if let Some(c) = &clique {
                rep.record(
                    "mu_c_stable",
                    stable_of_size(out, mu_c_max(out, inp, c), out.instance.num_men()),
                );
            }
            rep.record(
                "perfect_iff_clique",
                (|| {
                    let set = enumerate_stable_pruned(&out.instance, ORACLE_BUDGET)?;
                    let best = set.scores.iter().map(|s| s.size).max().unwrap_or(0);
                    let Target::MaxSize(full) = out.predicted.target else {
                        unreachable!()
                    };
                    let d = format!(
                        "largest weakly stable size {best} of {full}, clique: {}",
                        clique.is_some()
                    );
                    if (best == full) == clique.is_some() {
                        Ok(d)
                    } else {
                        fail(d)
                    }
                })(),
            );
        }
        ReductionKind::CliqueMinSmt => {
            let Target::MinSize(target) = out.predicted.target else {
                unreachable!()
            };
            if let Some(c) = &clique {
                rep.record(
                    "mu_c_stable",
                    stable_of_size(out, mu_c_min(out, inp, c), target),
                );
            }
            rep.record(
                "min_size_iff_clique",
                (|| {
                    let set = enumerate_stable_pruned(&out.instance, ORACLE_BUDGET)?;
                    let least = set.scores.iter().map(|s| s.size).min().unwrap_or(0);
                    let d = format!(
                        "smallest weakly stable size {least}, target {target}, clique: {}",
                        clique.is_some()
                    );
                    let ok = if clique.is_some() {
                        least == target
                    } else {
                        least > target
                    };
                    if ok {
                        Ok(d)
                    } else {
                        fail(d)
                    }
                })(),
            );
            let f = p_prime_is_forest(out);
            rep.verdict("p_prime_forest", f, "primal graph without leaders");
        }
        _ => unreachable!("clique source"),
    }
}

fn stable_of_size(
    out: &ReductionOutput,
    mu: Result<Matching, ReduceError>,
    size: usize,
) -> Result<String, Outcome> {
    let mu = mu?;
    if !is_stable(&out.instance, &mu) {
        return fail("μ^C has a blocking pair".into());
    }
    if mu.size() != size {
        return fail(format!("μ^C has size {}, expected {size}", mu.size()));
    }
    Ok(format!("stable, size {size}"))
}

/// The four conditions on each leader's list: it meets the basic women in
/// exactly its own vertex women and the edge women of its class; vertex
/// women appear in order (reversed for the mirror); each edge woman sits
/// between her endpoint's vertex woman and the next one.
pub fn check_leader_form(out: &ReductionOutput) -> Result<(), String> {
    let Source::Clique(inp) = &out.source else {
        return Err("not a clique reduction".into());
    };
    let (k, p) = (inp.k(), inp.p());
    for i in 1..=k {
        for mirror in [false, true] {
            let fam = if mirror { "m_hat" } else { "m" };
            let vfam = if mirror { "w_hat" } else { "w" };
            let m = out
                .man(fam, &[i])
                .ok_or_else(|| format!("no leader {fam} {i}"))?;
            let pos: HashMap<&Role, usize> = out
                .instance
                .man_list(m)
                .iter()
                .enumerate()
                .map(|(r, &(w, _))| (&out.women[w], r))
                .collect();
            let basic: BTreeSet<&Role> = pos
                .keys()
                .copied()
                .filter(|r| matches!(r.family, "w" | "w_hat" | "w_edge"))
                .collect();
            let mut want = BTreeSet::new();
            let vertex: Vec<Role> = (1..=p).map(|j| Role::new(vfam, &[i, j])).collect();
            want.extend(vertex.iter());
            let mut edges = Vec::new();
            for a in 0..k {
                for b in a + 1..k {
                    if a + 1 != i && b + 1 != i {
                        continue;
                    }
                    for (t, &(u, v)) in inp.edges_between(a, b).iter().enumerate() {
                        let end = if a + 1 == i { u } else { v } + 1;
                        edges.push((Role::new("w_edge", &[a + 1, b + 1, t + 1]), end));
                    }
                }
            }
            want.extend(edges.iter().map(|(r, _)| r));
            if basic != want {
                return Err(format!(
                    "{fam} {i}: basic women differ from its vertex and edge women"
                ));
            }
            let vpos: Vec<usize> = vertex.iter().map(|r| pos[r]).collect();
            let ordered = vpos
                .windows(2)
                .all(|w| if mirror { w[0] > w[1] } else { w[0] < w[1] });
            if !ordered {
                return Err(format!("{fam} {i}: vertex women out of order"));
            }
            for (e, j) in &edges {
                let lo = vpos[j - 1];
                let next = if mirror {
                    j.checked_sub(2).map(|x| vpos[x])
                } else {
                    vpos.get(*j).copied()
                };
                let at = pos[e];
                if at <= lo || next.is_some_and(|hi| at >= hi) {
                    return Err(format!(
                        "{fam} {i}: {e} is not inside the block of vertex {j}"
                    ));
                }
            }
        }
    }
    Ok(())
}

fn p_prime_is_forest(out: &ReductionOutput) -> bool {
    let nm = out.instance.num_men();
    let g = primal_graph(&out.instance);
    let leader = |v: usize| v < nm && matches!(out.men[v].family, "m" | "m_hat");
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (u, v) in g.edges() {
        if leader(u) || leader(v) {
            continue;
        }
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

// ---------------------------------------------------------------- SAT

/// Which SAT gadget rotation a rotation is; indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RotationClass {
    /// `ρ̄^i_j ∈ R₁`, in the false selector of assignment `j` of block `i`.
    Bar {
        i: usize,
        j: usize,
    },
    /// `ρ_t ∈ R₂`, in the variable selector of `x_t`.
    Var {
        t: usize,
    },
    /// `ρ^i_j ∈ R₃`, in the truth selector.
    Asg {
        i: usize,
        j: usize,
    },
    Other,
}

impl RotationClass {
    /// The pair of pairs the rotation exchanges, as (man, woman) role pairs.
    fn pairs(self) -> Option<[(Role, Role); 2]> {
        let r = Role::new;
        Some(match self {
            RotationClass::Bar { i, j } => [
                (r("m_bar", &[i, j]), r("w_bar", &[i, j])),
                (r("m_bar_hat", &[i, j]), r("w_bar_hat", &[i, j])),
            ],
            RotationClass::Var { t } => [
                (r("m_var", &[t]), r("w_var", &[t])),
                (r("m_var_hat", &[t]), r("w_var_hat", &[t])),
            ],
            RotationClass::Asg { i, j } => [
                (r("m_asg", &[i, j]), r("w_asg", &[i, j])),
                (r("m_asg_hat", &[i, j]), r("w_asg_hat", &[i, j])),
            ],
            RotationClass::Other => return None,
        })
    }

    fn all(inp: &SatInput) -> Vec<RotationClass> {
        let cells = cells(inp);
        let mut v: Vec<RotationClass> = cells
            .iter()
            .map(|&(i, j)| RotationClass::Bar { i, j })
            .collect();
        v.extend((1..=inp.n).map(|t| RotationClass::Var { t }));
        v.extend(cells.iter().map(|&(i, j)| RotationClass::Asg { i, j }));
        v
    }
}

fn cells(inp: &SatInput) -> Vec<(usize, usize)> {
    inp.blocks
        .iter()
        .enumerate()
        .flat_map(|(i, b)| (1..=b.assignments.len()).map(move |j| (i + 1, j)))
        .collect()
}

/// The class of each rotation of `rs`, indexed by rotation id.
pub fn rotation_classes(out: &ReductionOutput, rs: &RotationStructure) -> Vec<RotationClass> {
    rs.rotations()
        .iter()
        .map(|rot| {
            let got: BTreeSet<(&Role, &Role)> = rot
                .pairs
                .iter()
                .map(|&(m, w)| (&out.men[m], &out.women[w]))
                .collect();
            let (m0, _) = rot.pairs[0];
            let role = &out.men[m0];
            let guess = match (role.family, &role.idx[..]) {
                ("m_bar" | "m_bar_hat", &[i, j]) => RotationClass::Bar { i, j },
                ("m_var" | "m_var_hat", &[t]) => RotationClass::Var { t },
                ("m_asg" | "m_asg_hat", &[i, j]) => RotationClass::Asg { i, j },
                _ => return RotationClass::Other,
            };
            let want = guess.pairs().expect("gadget class");
            let want: BTreeSet<(&Role, &Role)> = want.iter().map(|(m, w)| (m, w)).collect();
            if want == got {
                guess
            } else {
                RotationClass::Other
            }
        })
        .collect()
}

/// Arcs of `H_Π`: `R₁ × R₂`, `R₂ × R₃`, and `(ρ̄^i_k, ρ^i_j)` within each block.
pub fn h_pi_arcs(inp: &SatInput) -> BTreeSet<(RotationClass, RotationClass)> {
    let cells = cells(inp);
    let mut arcs = BTreeSet::new();
    for &(i, j) in &cells {
        for t in 1..=inp.n {
            arcs.insert((RotationClass::Bar { i, j }, RotationClass::Var { t }));
            arcs.insert((RotationClass::Var { t }, RotationClass::Asg { i, j }));
        }
        for &(x, k) in &cells {
            if x == i {
                arcs.insert((RotationClass::Bar { i, j: k }, RotationClass::Asg { i, j }));
            }
        }
    }
    arcs
}

/// Which gadgets are swapped: one flag per assignment for `R₁`, per variable for `R₂`,
/// per assignment for `R₃`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Swaps {
    bar: Vec<bool>,
    var: Vec<bool>,
    asg: Vec<bool>,
}

impl Swaps {
    fn classes(&self, cells: &[(usize, usize)]) -> Vec<RotationClass> {
        let mut v = Vec::new();
        v.extend(
            cells
                .iter()
                .zip(&self.bar)
                .filter(|p| *p.1)
                .map(|(&(i, j), _)| RotationClass::Bar { i, j }),
        );
        v.extend(
            self.var
                .iter()
                .enumerate()
                .filter(|p| *p.1)
                .map(|(t, _)| RotationClass::Var { t: t + 1 }),
        );
        v.extend(
            cells
                .iter()
                .zip(&self.asg)
                .filter(|p| *p.1)
                .map(|(&(i, j), _)| RotationClass::Asg { i, j }),
        );
        v
    }
}

/// Every flag vector meeting the legality conditions: a swapped variable
/// selector forces the false selectors of assignments setting it false; a
/// swapped truth selector forces the variable selectors it sets true and
/// the false selectors of the other assignments of its block.
fn legal_swaps(inp: &SatInput, limit: usize) -> Result<Vec<Swaps>, Outcome> {
    let cells = cells(inp);
    let asg = |c: usize| &inp.blocks[cells[c].0 - 1].assignments[cells[c].1 - 1];
    let a = cells.len();
    if a + inp.n >= usize::BITS as usize {
        return Err(Outcome::Skip("too many gadgets".into()));
    }
    let mut out = Vec::new();
    for bar_mask in 0u64..1 << a {
        let bar: Vec<bool> = (0..a).map(|c| bar_mask >> c & 1 == 1).collect();
        // variables whose false-setting assignments are all swapped
        let var_ok: Vec<bool> = (0..inp.n)
            .map(|t| (0..a).all(|c| !asg(c).1.contains(&t) || bar[c]))
            .collect();
        let free: Vec<usize> = (0..inp.n).filter(|&t| var_ok[t]).collect();
        for var_mask in 0u64..1 << free.len() {
            let mut var = vec![false; inp.n];
            for (b, &t) in free.iter().enumerate() {
                var[t] = var_mask >> b & 1 == 1;
            }
            let asg_ok: Vec<usize> = (0..a)
                .filter(|&c| {
                    asg(c).0.iter().all(|&t| var[t])
                        && (0..a).all(|d| d == c || cells[d].0 != cells[c].0 || bar[d])
                })
                .collect();
            for asg_mask in 0u64..1 << asg_ok.len() {
                let mut flags = vec![false; a];
                for (b, &c) in asg_ok.iter().enumerate() {
                    flags[c] = asg_mask >> b & 1 == 1;
                }
                out.push(Swaps {
                    bar: bar.clone(),
                    var: var.clone(),
                    asg: flags,
                });
                if out.len() > limit {
                    return Err(Outcome::Skip(format!("more than {limit} legal sets")));
                }
            }
        }
    }
    Ok(out)
}

/// The legal subsets of `R₁ ∪ R₂ ∪ R₃`.
pub fn legal_sets(inp: &SatInput) -> Result<Vec<Vec<RotationClass>>, ReduceError> {
    let cells = cells(inp);
    match legal_swaps(inp, LEGAL_LIMIT) {
        Ok(v) => Ok(v.iter().map(|s| s.classes(&cells)).collect()),
        Err(Outcome::Skip(s) | Outcome::Fail(s)) => Err(ReduceError::Guard(s)),
    }
}

/// The pairs of a good matching with the given gadgets swapped.
fn matching_of_swaps(
    out: &ReductionOutput,
    inp: &SatInput,
    s: &Swaps,
) -> Result<Matching, ReduceError> {
    let cells = cells(inp);
    let mut pairs = Vec::new();
    let mut gadget = |c: RotationClass, swapped: bool| {
        let [(m1, w1), (m2, w2)] = c.pairs().expect("gadget class");
        if swapped {
            pairs.push((m1, w2.clone()));
            pairs.push((m2, w1));
        } else {
            pairs.push((m1, w1));
            pairs.push((m2, w2));
        }
    };
    for (c, &(i, j)) in cells.iter().enumerate() {
        gadget(RotationClass::Bar { i, j }, s.bar[c]);
        gadget(RotationClass::Asg { i, j }, s.asg[c]);
    }
    for t in 0..inp.n {
        gadget(RotationClass::Var { t: t + 1 }, s.var[t]);
    }
    for r in out.men.iter().filter(|r| r.family == crate::builder::M_HAP) {
        pairs.push((r.clone(), Role::new(crate::builder::W_HAP, &r.idx)));
    }
    pairs.push((
        Role::new(crate::builder::M_STAR, &[]),
        Role::new(crate::builder::W_STAR, &[]),
    ));
    Ok(out.matching_of(&pairs)?)
}

/// The swap flags of `mu` if it is good: every gadget pair of pairs appears
/// either as listed or exchanged, and happy pairs and `(m*, w*)` stay together.
fn swaps_of(out: &ReductionOutput, inp: &SatInput, mu: &Matching) -> Option<Swaps> {
    let cells = cells(inp);
    let men: HashMap<&Role, usize> = out.men.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let women: HashMap<&Role, usize> = out.women.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let flag = |c: RotationClass| -> Option<bool> {
        let [(m1, w1), (m2, w2)] = c.pairs()?;
        let (m1, w1, m2, w2) = (men[&m1], women[&w1], men[&m2], women[&w2]);
        match (mu.man_partner(m1), mu.man_partner(m2)) {
            (Some(a), Some(b)) if a == w1 && b == w2 => Some(false),
            (Some(a), Some(b)) if a == w2 && b == w1 => Some(true),
            _ => None,
        }
    };
    let bar = cells
        .iter()
        .map(|&(i, j)| flag(RotationClass::Bar { i, j }))
        .collect::<Option<Vec<_>>>()?;
    let asg = cells
        .iter()
        .map(|&(i, j)| flag(RotationClass::Asg { i, j }))
        .collect::<Option<Vec<_>>>()?;
    let var = (1..=inp.n)
        .map(|t| flag(RotationClass::Var { t }))
        .collect::<Option<Vec<_>>>()?;
    let fixed = out.men.iter().enumerate().all(|(m, r)| match r.family {
        crate::builder::M_HAP => {
            mu.man_partner(m).map(|w| &out.women[w])
                == Some(&Role::new(crate::builder::W_HAP, &r.idx))
        }
        crate::builder::M_STAR => {
            mu.man_partner(m).map(|w| out.women[w].family) == Some(crate::builder::W_STAR)
        }
        _ => true,
    });
    fixed.then_some(Swaps { bar, var, asg })
}

/// The excellent matchings, built directly from the legality conditions on gadget swaps.
pub fn excellent_matchings(out: &ReductionOutput) -> Result<Vec<Matching>, ReduceError> {
    let Source::Sat(inp) = &out.source else {
        return Err(ReduceError::Invalid("not a SAT reduction".into()));
    };
    let swaps = legal_swaps(inp, LEGAL_LIMIT).map_err(|e| match e {
        Outcome::Skip(s) | Outcome::Fail(s) => ReduceError::Guard(s),
    })?;
    let mut v = swaps
        .iter()
        .map(|s| matching_of_swaps(out, inp, s))
        .collect::<Result<Vec<_>, _>>()?;
    v.sort();
    Ok(v)
}

fn sat_checks(
    out: &ReductionOutput,
    inp: &SatInput,
    rs: &RotationStructure,
    rep: &mut VerificationReport,
) {
    let classes = rotation_classes(out, rs);
    let expected: BTreeSet<RotationClass> = RotationClass::all(inp).into_iter().collect();
    let got: Vec<RotationClass> = classes.clone();
    let got_set: BTreeSet<RotationClass> = got.iter().copied().collect();
    rep.verdict(
        "rotation_classes",
        got_set == expected && got.len() == expected.len(),
        format!(
            "{} rotations, {} expected gadget rotations",
            got.len(),
            expected.len()
        ),
    );

    let h = h_pi_arcs(inp);
    let arcs = rs.arcs();
    let outside: Vec<_> = arcs
        .iter()
        .map(|&(a, b)| (classes[a], classes[b]))
        .filter(|x| !h.contains(x))
        .collect();
    rep.verdict(
        "h_pi_containment",
        outside.is_empty(),
        format!(
            "{} arcs, {} outside H_Π{}",
            arcs.len(),
            outside.len(),
            outside
                .first()
                .map(|x| format!(", e.g. {x:?}"))
                .unwrap_or_default()
        ),
    );

    let men = out.instance.num_men();
    let stable = enumerate_stable_pruned(&out.instance, ORACLE_BUDGET);
    rep.record(
        "stable_matchings_perfect",
        (|| {
            let set = stable.clone()?;
            match set.matchings.iter().find(|mu| mu.size() != men) {
                Some(mu) => fail(format!("a stable matching has size {} of {men}", mu.size())),
                None => Ok(format!(
                    "{} stable matchings, all perfect",
                    set.matchings.len()
                )),
            }
        })(),
    );
    rep.record(
        "stable_are_good",
        (|| {
            let set = stable.clone()?;
            let bad = set
                .matchings
                .iter()
                .filter(|mu| swaps_of(out, inp, mu).is_none())
                .count();
            if bad == 0 {
                Ok(format!(
                    "{} stable matchings, all good",
                    set.matchings.len()
                ))
            } else {
                fail(format!("{bad} stable matchings are not good"))
            }
        })(),
    );
    rep.record(
        "stable_equals_excellent",
        (|| {
            let set = stable.clone()?;
            let lam = excellent_matchings(out)?;
            let d = format!("|S| = {}, |Λ| = {}", set.matchings.len(), lam.len());
            if set.matchings == lam {
                Ok(d)
            } else {
                fail(d)
            }
        })(),
    );
    rep.record(
        "legal_sets_eliminate_to_stable",
        (|| {
            let set = stable.clone()?;
            if got_set != expected {
                return fail("rotations are not the gadget rotations".into());
            }
            let id: HashMap<RotationClass, usize> =
                classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
            let legal = legal_sets(inp)?;
            let mut produced = Vec::with_capacity(legal.len());
            for l in &legal {
                let ids: Vec<usize> = l.iter().map(|c| id[c]).collect();
                let s = rs.set_of(&ids)?;
                if !rs.is_closed(&s) {
                    return fail(format!("legal set {l:?} is not closed"));
                }
                produced.push(rs.eliminate_set(&s)?);
            }
            produced.sort();
            let d = format!(
                "{} legal sets, {} stable matchings",
                legal.len(),
                set.matchings.len()
            );
            if produced == set.matchings {
                Ok(d)
            } else {
                fail(d)
            }
        })(),
    );
    rep.record(
        "rotation_set_decomposition",
        (|| {
            let set = stable.clone()?;
            let cells = cells(inp);
            for mu in &set.matchings {
                let Some(sw) = swaps_of(out, inp, mu) else {
                    return fail("stable matching is not good".into());
                };
                let want: BTreeSet<RotationClass> = sw.classes(&cells).into_iter().collect();
                let have: BTreeSet<RotationClass> =
                    rs.rotation_set(mu).ones().map(|r| classes[r]).collect();
                if want != have {
                    return fail(format!("R(μ) = {have:?}, swapped gadgets {want:?}"));
                }
            }
            Ok(format!(
                "R(μ) = R₁(μ) ∪ R₂(μ) ∪ R₃(μ) for {} matchings",
                set.matchings.len()
            ))
        })(),
    );
    if out.kind == ReductionKind::SatBsm {
        rep.record(
            "digraph_matches_sesm",
            same_digraph_as_sesm(out, inp, &classes, rs),
        );
    }
    if out.relaxed {
        rep.push(
            "measure_target",
            CheckStatus::Skipped("relaxed spacers".into()),
            "",
        );
    }
}

fn same_digraph_as_sesm(
    out: &ReductionOutput,
    inp: &SatInput,
    classes: &[RotationClass],
    rs: &RotationStructure,
) -> Result<String, Outcome> {
    let spacers = match out.predicted.extra.get("spacer_scale") {
        Some(&0) | None => SatSpacers::Nominal,
        Some(&s) => SatSpacers::Scaled(s as u64),
    };
    let SatOutcome::Instance(sesm) = reduce_sat(inp, false, spacers)? else {
        return fail("SESM variant unsatisfiable".into());
    };
    let rs2 = build_rotation_structure(&sesm.instance)?;
    let classes2 = rotation_classes(&sesm, &rs2);
    let arcs = |rs: &RotationStructure,
                cl: &[RotationClass]|
     -> BTreeSet<(RotationClass, RotationClass)> {
        rs.arcs().into_iter().map(|(a, b)| (cl[a], cl[b])).collect()
    };
    let (a, b) = (arcs(rs, classes), arcs(&rs2, &classes2));
    let nodes = |cl: &[RotationClass]| cl.iter().copied().collect::<BTreeSet<_>>();
    let d = format!("{} arcs vs {}", a.len(), b.len());
    if a == b && nodes(classes) == nodes(&classes2) {
        Ok(d)
    } else {
        fail(d)
    }
}
