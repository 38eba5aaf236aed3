use std::collections::HashMap;
use std::time::Instant;

use smtw_gs::lattice_extremes;
use smtw_instance::{
    primal_graph, Instance, Matching, Method, Optimum, Problem, Side, SolveError, SolveReport,
    Stats,
};
use smtw_td::{NiceTreeDecomposition, NodeKind};

use crate::cell::{Cell, MinCell, OptCell, SetCell, Target};

const UNMATCHED: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Sesm,
    Bsm,
    Smt,
}

struct Model<'a> {
    inst: &'a Instance,
    nm: usize,
    kind: Kind,
    /// Candidate statuses per vertex, in list order, unmatched last.
    domains: Vec<Vec<u32>>,
}

impl Model<'_> {
    fn side(&self, v: usize) -> (Side, usize) {
        if v < self.nm {
            (Side::Man, v)
        } else {
            (Side::Woman, v - self.nm)
        }
    }

    fn status(&self, x: u32) -> Option<usize> {
        (x != UNMATCHED).then(|| self.side(x as usize).1)
    }

    fn rank(&self, a: usize, b: usize) -> Option<u32> {
        let (sa, ia) = self.side(a);
        let (_, ib) = self.side(b);
        self.inst.rank(sa, ia, ib)
    }

    /// Whether `a` strictly prefers vertex `b` to its status `x`.
    fn prefers(&self, a: usize, b: usize, x: u32) -> bool {
        let (sa, ia) = self.side(a);
        self.inst.prefers(sa, ia, self.side(b).1, self.status(x))
    }

    /// Whether `a` with status `x` and `b` with status `y` can coexist in one partial solution.
    fn compatible(&self, a: usize, x: u32, b: usize, y: u32) -> bool {
        let same_sex = (a < self.nm) == (b < self.nm);
        if same_sex {
            return x == UNMATCHED || x != y;
        }
        if (x == b as u32) != (y == a as u32) {
            return false;
        }
        !(self.rank(a, b).is_some() && self.prefers(a, b, x) && self.prefers(b, a, y))
    }

    fn contribution(&self, a: usize, x: u32) -> Target {
        if x == UNMATCHED {
            return (0, 0);
        }
        let b = x as usize;
        let own = i64::from(self.rank(a, b).expect("domains hold acceptable partners"));
        let theirs = i64::from(self.rank(b, a).expect("acceptability is mutual"));
        match (self.kind, a < self.nm) {
            (Kind::Sesm, true) => (own - theirs, 0),
            (Kind::Sesm, false) => (0, 0),
            (Kind::Bsm, true) => (own, 0),
            (Kind::Bsm, false) => (0, own),
            (Kind::Smt, true) => (1, 0),
            (Kind::Smt, false) => (0, 0),
        }
    }

    fn bag_contribution(&self, bag: &[usize], key: &[u32]) -> Target {
        bag.iter().zip(key).fold((0, 0), |acc, (&a, &x)| {
            let c = self.contribution(a, x);
            (acc.0 + c.0, acc.1 + c.1)
        })
    }
}

type Table<C> = HashMap<Vec<u32>, C>;

fn fill<C: Cell>(model: &Model, ntd: &NiceTreeDecomposition) -> Vec<Table<C>> {
    let mut tables: Vec<Table<C>> = Vec::with_capacity(ntd.len());
    for node in &ntd.nodes {
        let mut table: Table<C> = HashMap::new();
        match node.kind {
            NodeKind::Leaf => {
                table.insert(Vec::new(), C::leaf());
            }
            NodeKind::Introduce(a) => {
                let child = &ntd.nodes[node.children[0]];
                let pos = node
                    .bag
                    .binary_search(&a)
                    .expect("introduced vertex in bag");
                for (key, cell) in &tables[node.children[0]] {
                    for &x in &model.domains[a] {
                        let ok = child
                            .bag
                            .iter()
                            .zip(key)
                            .all(|(&b, &y)| model.compatible(a, x, b, y));
                        if ok {
                            let mut k = key.clone();
                            k.insert(pos, x);
                            table.insert(k, cell.shift(model.contribution(a, x)));
                        }
                    }
                }
            }
            NodeKind::Forget(a) => {
                let child = &ntd.nodes[node.children[0]];
                let pos = child
                    .bag
                    .binary_search(&a)
                    .expect("forgotten vertex in child bag");
                for (key, cell) in &tables[node.children[0]] {
                    let mut k = key.clone();
                    k.remove(pos);
                    match table.get_mut(&k) {
                        Some(c) => c.absorb(cell),
                        None => {
                            table.insert(k, cell.clone());
                        }
                    }
                }
            }
            NodeKind::Join => {
                let (l, r) = (&tables[node.children[0]], &tables[node.children[1]]);
                for (key, c1) in l {
                    if let Some(c2) = r.get(key) {
                        let cell = C::join(c1, c2, model.bag_contribution(&node.bag, key));
                        if !cell.is_empty() {
                            table.insert(key.clone(), cell);
                        }
                    }
                }
            }
        }
        tables.push(table);
    }
    tables
}

/// Walks down from the root entry `target`, collecting every agent's status.
fn backtrack<C: Cell>(
    model: &Model,
    ntd: &NiceTreeDecomposition,
    tables: &[Table<C>],
    target: Target,
) -> Vec<u32> {
    let mut status = vec![UNMATCHED; model.domains.len()];
    let mut stack = vec![(ntd.root, Vec::<u32>::new(), target)];
    while let Some((v, key, t)) = stack.pop() {
        let node = &ntd.nodes[v];
        match node.kind {
            NodeKind::Leaf => {}
            NodeKind::Introduce(a) => {
                let pos = node.bag.binary_search(&a).expect("in bag");
                let x = key[pos];
                status[a] = x;
                let c = model.contribution(a, x);
                let mut k = key;
                k.remove(pos);
                stack.push((node.children[0], k, (t.0 - c.0, t.1 - c.1)));
            }
            NodeKind::Forget(a) => {
                let u = node.children[0];
                let pos = ntd.nodes[u].bag.binary_search(&a).expect("in child bag");
                let next = model.domains[a].iter().find_map(|&x| {
                    let mut k = key.clone();
                    k.insert(pos, x);
                    tables[u].get(&k).filter(|c| c.contains(t)).map(|_| k)
                });
                stack.push((u, next.expect("some extension realises the entry"), t));
            }
            NodeKind::Join => {
                let (l, r) = (node.children[0], node.children[1]);
                let corr = model.bag_contribution(&node.bag, &key);
                let other = &tables[r][&key];
                let split = tables[l][&key]
                    .targets()
                    .into_iter()
                    .map(|t1| (t1, (t.0 - t1.0 + corr.0, t.1 - t1.1 + corr.1)))
                    .find(|&(_, t2)| other.contains(t2))
                    .expect("some split realises the entry");
                stack.push((l, key.clone(), split.0));
                stack.push((r, key, split.1));
            }
        }
    }
    status
}

fn witness(model: &Model, status: &[u32]) -> Matching {
    let man_to = (0..model.nm).map(|m| model.status(status[m])).collect();
    Matching::from_man_partners(model.inst.num_women(), man_to)
}

fn prepare<'a>(
    inst: &'a Instance,
    ntd: &NiceTreeDecomposition,
    kind: Kind,
) -> Result<Model<'a>, SolveError> {
    ntd.validate(&primal_graph(inst))?;
    let nm = inst.num_men();
    let vertex = |side: Side, x: usize| -> u32 {
        match side {
            Side::Man => x as u32,
            Side::Woman => (nm + x) as u32,
        }
    };
    let mut domains = Vec::with_capacity(inst.n());
    if kind == Kind::Smt {
        for (side, count) in [(Side::Man, nm), (Side::Woman, inst.num_women())] {
            for a in 0..count {
                let mut d: Vec<u32> = inst
                    .list(side, a)
                    .iter()
                    .map(|&(x, _)| vertex(side.other(), x))
                    .collect();
                d.push(UNMATCHED);
                domains.push(d);
            }
        }
    } else {
        if inst.has_ties() {
            return Err(SolveError::Ties);
        }
        // in every stable matching an agent's partner lies between its two extreme partners
        let ex = lattice_extremes(inst)?;
        for (side, count) in [(Side::Man, nm), (Side::Woman, inst.num_women())] {
            for a in 0..count {
                let (best, worst) = match side {
                    Side::Man => (
                        ex.man_optimal.partner(side, a),
                        ex.woman_optimal.partner(side, a),
                    ),
                    Side::Woman => (
                        ex.woman_optimal.partner(side, a),
                        ex.man_optimal.partner(side, a),
                    ),
                };
                let d = match (best, worst) {
                    (Some(b), Some(w)) => {
                        let lo = inst.rank(side, a, b).expect("acceptable");
                        let hi = inst.rank(side, a, w).expect("acceptable");
                        inst.list(side, a)
                            .iter()
                            .filter(|&&(_, r)| lo <= r && r <= hi)
                            .map(|&(x, _)| vertex(side.other(), x))
                            .collect()
                    }
                    _ => vec![UNMATCHED],
                };
                domains.push(d);
            }
        }
    }
    Ok(Model {
        inst,
        nm,
        kind,
        domains,
    })
}

fn stats<C: Cell>(ntd: &NiceTreeDecomposition, tables: &[Table<C>], start: Instant) -> Stats {
    Stats {
        nodes: ntd.len(),
        width: ntd.width(),
        rows: tables.iter().map(HashMap::len).sum(),
        entries: tables.iter().flat_map(|t| t.values()).map(Cell::len).sum(),
        dense_entries: 0,
        elapsed: start.elapsed(),
    }
}

fn report(problem: Problem, value: i64, witness: Matching, stats: Stats) -> SolveReport {
    SolveReport {
        problem,
        method: Method::Xp,
        optimum: Optimum::Value(value),
        witness: Some(witness),
        stats,
    }
}

/// Minimum `|sat_m - sat_w|` over stable matchings of a strict instance.
pub fn xp_solve_sesm(
    inst: &Instance,
    ntd: &NiceTreeDecomposition,
) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let model = prepare(inst, ntd, Kind::Sesm)?;
    let tables = fill::<SetCell>(&model, ntd);
    let root = &tables[ntd.root][&Vec::new()];
    let t = *root
        .0
        .iter()
        .min_by_key(|t| (t.abs(), **t))
        .expect("a stable matching exists");
    let w = witness(&model, &backtrack(&model, ntd, &tables, (t, 0)));
    Ok(report(
        Problem::Sesm,
        t.abs(),
        w,
        stats(ntd, &tables, start),
    ))
}

/// Minimum `max(sat_m, sat_w)` over stable matchings of a strict instance.
pub fn xp_solve_bsm(
    inst: &Instance,
    ntd: &NiceTreeDecomposition,
) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let model = prepare(inst, ntd, Kind::Bsm)?;
    let tables = fill::<MinCell>(&model, ntd);
    let root = &tables[ntd.root][&Vec::new()];
    let (t, i) = root
        .0
        .iter()
        .map(|(&t, &i)| (t, i))
        .min_by_key(|&(t, i)| (t.max(i), t))
        .expect("a stable matching exists");
    let w = witness(&model, &backtrack(&model, ntd, &tables, (t, i)));
    Ok(report(
        Problem::Bsm,
        t.max(i),
        w,
        stats(ntd, &tables, start),
    ))
}

fn solve_smt<const MAX: bool>(
    inst: &Instance,
    ntd: &NiceTreeDecomposition,
    problem: Problem,
) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let model = prepare(inst, ntd, Kind::Smt)?;
    let tables = fill::<OptCell<MAX>>(&model, ntd);
    let v = tables[ntd.root][&Vec::new()]
        .0
        .expect("a weakly stable matching exists");
    let w = witness(&model, &backtrack(&model, ntd, &tables, (v, 0)));
    Ok(report(problem, v, w, stats(ntd, &tables, start)))
}

/// Largest weakly stable matching; ties allowed.
pub fn xp_solve_max_smt(
    inst: &Instance,
    ntd: &NiceTreeDecomposition,
) -> Result<SolveReport, SolveError> {
    solve_smt::<true>(inst, ntd, Problem::MaxSmt)
}

/// Smallest weakly stable matching; ties allowed.
pub fn xp_solve_min_smt(
    inst: &Instance,
    ntd: &NiceTreeDecomposition,
) -> Result<SolveReport, SolveError> {
    solve_smt::<false>(inst, ntd, Problem::MinSmt)
}

/// Dispatches on `problem`. The pair-set objective has no primal-graph program.
pub fn xp_solve(
    inst: &Instance,
    problem: Problem,
    ntd: &NiceTreeDecomposition,
) -> Result<SolveReport, SolveError> {
    match problem {
        Problem::Sesm => xp_solve_sesm(inst, ntd),
        Problem::Bsm => xp_solve_bsm(inst, ntd),
        Problem::MaxSmt => xp_solve_max_smt(inst, ntd),
        Problem::MinSmt => xp_solve_min_smt(inst, ntd),
        Problem::Gsm => Err(SolveError::Invalid(
            "the pair set is only computed over the rotation digraph".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use smtw_instance::{golden, is_stable, score};
    use smtw_td::{heuristic_decomposition, make_nice, TreeDecomposition};

    fn nice(inst: &Instance) -> NiceTreeDecomposition {
        make_nice(&heuristic_decomposition(&primal_graph(inst))).unwrap()
    }

    fn value(r: &SolveReport) -> i64 {
        r.optimum.value().unwrap()
    }

    #[test]
    fn golden_values() {
        let i2 = golden::i2();
        let i3 = golden::i3();
        let one = golden::one_by_one();
        let it = golden::i_t();
        assert_eq!(value(&xp_solve_sesm(&i2, &nice(&i2)).unwrap()), 2);
        assert_eq!(value(&xp_solve_sesm(&i3, &nice(&i3)).unwrap()), 0);
        assert_eq!(value(&xp_solve_sesm(&one, &nice(&one)).unwrap()), 0);
        assert_eq!(value(&xp_solve_bsm(&i2, &nice(&i2)).unwrap()), 4);
        assert_eq!(value(&xp_solve_bsm(&i3, &nice(&i3)).unwrap()), 6);
        assert_eq!(value(&xp_solve_bsm(&one, &nice(&one)).unwrap()), 1);
        assert_eq!(value(&xp_solve_max_smt(&it, &nice(&it)).unwrap()), 2);
        assert_eq!(value(&xp_solve_min_smt(&it, &nice(&it)).unwrap()), 1);
        assert_eq!(value(&xp_solve_max_smt(&i2, &nice(&i2)).unwrap()), 2);
        assert_eq!(value(&xp_solve_min_smt(&i2, &nice(&i2)).unwrap()), 2);
        let empty = Instance::strict(vec![vec![]; 2], vec![vec![]; 3]).unwrap();
        assert_eq!(value(&xp_solve_max_smt(&empty, &nice(&empty)).unwrap()), 0);
        assert_eq!(value(&xp_solve_min_smt(&empty, &nice(&empty)).unwrap()), 0);
    }

    #[test]
    fn witnesses_attain_optimum() {
        let i3 = golden::i3();
        let r = xp_solve_sesm(&i3, &nice(&i3)).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.pairs(), vec![(0, 1), (1, 2), (2, 0)]);
        let it = golden::i_t();
        let w = xp_solve_min_smt(&it, &nice(&it)).unwrap().witness.unwrap();
        assert!(is_stable(&it, &w));
        assert_eq!(score(&it, &w).unwrap().size, 1);
    }

    #[test]
    fn rejects_ties_and_wrong_decompositions() {
        let it = golden::i_t();
        assert_eq!(
            xp_solve_sesm(&it, &nice(&it)).unwrap_err(),
            SolveError::Ties
        );
        let i2 = golden::i2();
        let bad = make_nice(&TreeDecomposition::new(vec![vec![0, 1, 2, 3]], vec![], 0)).unwrap();
        assert!(xp_solve_sesm(&i2, &bad).is_ok());
        let bad = make_nice(&TreeDecomposition::new(vec![vec![0, 1, 2]], vec![], 0)).unwrap();
        assert!(matches!(
            xp_solve_bsm(&i2, &bad),
            Err(SolveError::Decomposition(_))
        ));
        assert!(xp_solve(&i2, Problem::Gsm, &nice(&i2)).is_err());
    }
}
