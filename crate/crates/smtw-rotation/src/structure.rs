use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use smtw_gs::{man_optimal, woman_optimal};
use smtw_instance::{Instance, Matching, Side, SolveError};
use smtw_td::Graph;

/// A rotation `((m_0,w_0),...,(m_{r-1},w_{r-1}))`. Eliminating it matches each
/// `m_i` with `w_{(i+1) mod r}`. Stored with its smallest man first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rotation {
    pub id: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl Rotation {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `(man, woman before, woman after)` for each man of the rotation.
    pub fn moves(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let r = self.pairs.len();
        (0..r).map(move |i| (self.pairs[i].0, self.pairs[i].1, self.pairs[(i + 1) % r].1))
    }
}

/// The rotation poset of a strict instance together with its digraph and per-man paths.
#[derive(Clone, Debug)]
pub struct RotationStructure {
    inst: Instance,
    rotations: Vec<Rotation>,
    /// Out-neighbours in the transitive reduction, ascending.
    dag: Vec<Vec<usize>>,
    /// Direct predecessors in the transitive reduction, ascending.
    dag_in: Vec<Vec<usize>>,
    /// Strict predecessors under the precedence order.
    preds: Vec<FixedBitSet>,
    per_man: Vec<Vec<usize>>,
    paths: Vec<Vec<usize>>,
    man_optimal: Matching,
    woman_optimal: Matching,
}

/// `s_mu(m)`: the first woman after `mu(m)` on the list of `m` who prefers
/// `m` to her status. An unmatched woman accepts anyone, so when she comes
/// first `m` can move no further and there is no successor.
fn next_woman(inst: &Instance, mu: &Matching, m: usize) -> Option<usize> {
    let cur = mu.man_partner(m)?;
    let list = inst.man_list(m);
    let start = list.iter().position(|&(w, _)| w == cur)? + 1;
    list[start..]
        .iter()
        .map(|&(w, _)| w)
        .find(|&w| inst.prefers(Side::Woman, w, m, mu.woman_partner(w)))
        .filter(|&w| mu.woman_partner(w).is_some())
}

/// First rotation exposed in `mu`, scanning men in id order and following
/// the `m -> mu(s_mu(m))` successor map.
fn exposed_rotation(inst: &Instance, mu: &Matching) -> Option<Vec<(usize, usize)>> {
    let nm = inst.num_men();
    let succ: Vec<Option<usize>> = (0..nm)
        .map(|m| next_woman(inst, mu, m).and_then(|w| mu.woman_partner(w)))
        .collect();
    // 0 unvisited, 1 on the current walk, 2 finished
    let mut state = vec![0u8; nm];
    for start in 0..nm {
        let mut walk = Vec::new();
        let mut x = start;
        loop {
            if state[x] == 2 {
                break;
            }
            if state[x] == 1 {
                let at = walk.iter().position(|&y| y == x).expect("on walk");
                let mut cycle: Vec<usize> = walk[at..].to_vec();
                let lo = (0..cycle.len())
                    .min_by_key(|&i| cycle[i])
                    .expect("non-empty");
                cycle.rotate_left(lo);
                return Some(
                    cycle
                        .iter()
                        .map(|&m| (m, mu.man_partner(m).expect("matched")))
                        .collect(),
                );
            }
            state[x] = 1;
            walk.push(x);
            match succ[x] {
                Some(y) => x = y,
                None => break,
            }
        }
        for y in walk {
            state[y] = 2;
        }
    }
    None
}

fn apply(mu: &mut Matching, rot: &Rotation) {
    let moves: Vec<(usize, usize, usize)> = rot.moves().collect();
    for &(m, _, _) in &moves {
        mu.unmatch_man(m);
    }
    for (m, _, to) in moves {
        mu.set(m, to);
    }
}

/// Builds the rotation structure of a strict instance.
pub fn build_rotation_structure(inst: &Instance) -> Result<RotationStructure, SolveError> {
    let mo = man_optimal(inst)?;
    let wo = woman_optimal(inst)?;
    let mut mu = mo.clone();
    let mut rotations = Vec::new();
    while let Some(pairs) = exposed_rotation(inst, &mu) {
        let rot = Rotation {
            id: rotations.len(),
            pairs,
        };
        apply(&mut mu, &rot);
        rotations.push(rot);
    }
    debug_assert_eq!(
        mu, wo,
        "eliminating every rotation reaches the woman-optimal matching"
    );
    let k = rotations.len();

    // rule 1: the rotation that produced a pair precedes the one that eliminates it
    let mut produced: HashMap<(usize, usize), usize> = HashMap::new();
    // per woman: (rotation, old partner, new partner)
    let mut woman_moves: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); inst.num_women()];
    for rot in &rotations {
        let r = rot.len();
        for (i, (m, _, to)) in rot.moves().enumerate() {
            produced.insert((m, to), rot.id);
            let (new_partner, _) = rot.pairs[(i + r - 1) % r];
            let (old_partner, w) = rot.pairs[i];
            woman_moves[w].push((rot.id, old_partner, new_partner));
        }
    }
    let mut direct: Vec<Vec<usize>> = vec![Vec::new(); k];
    for rot in &rotations {
        for (m, from, to) in rot.moves() {
            if let Some(&p) = produced.get(&(m, from)) {
                direct[rot.id].push(p);
            }
            // rule 2: m skips w; the rotation moving w from below m to above m comes first
            let list = inst.man_list(m);
            let a = list.iter().position(|&(w, _)| w == from).expect("on list");
            let b = list.iter().position(|&(w, _)| w == to).expect("on list");
            let rank_m = |w: usize, x: usize| inst.woman_rank(w, x).expect("acceptable");
            for &(w, _) in &list[a + 1..b] {
                let pm = rank_m(w, m);
                for &(p, old, new) in &woman_moves[w] {
                    if p != rot.id && rank_m(w, old) > pm && rank_m(w, new) < pm {
                        direct[rot.id].push(p);
                    }
                }
            }
        }
    }
    let mut preds: Vec<FixedBitSet> = Vec::with_capacity(k);
    for (id, ds) in direct.iter().enumerate() {
        let mut set = FixedBitSet::with_capacity(k);
        for &p in ds {
            assert!(p < id, "precedence arcs follow elimination order");
            set.insert(p);
            set.union_with(&preds[p]);
        }
        preds.push(set);
    }
    let mut dag = vec![Vec::new(); k];
    let mut dag_in = vec![Vec::new(); k];
    for id in 0..k {
        let mut implied = FixedBitSet::with_capacity(k);
        for p in preds[id].ones() {
            implied.union_with(&preds[p]);
        }
        for p in preds[id].ones() {
            if !implied.contains(p) {
                dag[p].push(id);
                dag_in[id].push(p);
            }
        }
    }
    for out in &mut dag {
        out.sort_unstable();
    }
    let mut per_man = vec![Vec::new(); inst.num_men()];
    for rot in &rotations {
        for &(m, _) in &rot.pairs {
            per_man[m].push(rot.id);
        }
    }
    let paths = per_man
        .iter()
        .map(|rs| {
            let mut path: Vec<usize> = rs.first().copied().into_iter().collect();
            for w in rs.windows(2) {
                let seg = bfs_path(&dag, w[0], w[1]).expect("rotations of one man form a chain");
                path.extend_from_slice(&seg[1..]);
            }
            path
        })
        .collect();
    Ok(RotationStructure {
        inst: inst.clone(),
        rotations,
        dag,
        dag_in,
        preds,
        per_man,
        paths,
        man_optimal: mo,
        woman_optimal: wo,
    })
}

/// Shortest directed path from `a` to `b`, exploring out-neighbours in ascending order.
fn bfs_path(dag: &[Vec<usize>], a: usize, b: usize) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; dag.len()];
    parent[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            let mut path = vec![b];
            let mut y = b;
            while y != a {
                y = parent[y];
                path.push(y);
            }
            path.reverse();
            return Some(path);
        }
        for &y in &dag[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

impl RotationStructure {
    pub fn instance(&self) -> &Instance {
        &self.inst
    }

    pub fn num_rotations(&self) -> usize {
        self.rotations.len()
    }

    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }

    pub fn rotation(&self, id: usize) -> &Rotation {
        &self.rotations[id]
    }

    pub fn man_optimal(&self) -> &Matching {
        &self.man_optimal
    }

    pub fn woman_optimal(&self) -> &Matching {
        &self.woman_optimal
    }

    /// Out-neighbours of a rotation in the rotation digraph.
    pub fn successors(&self, id: usize) -> &[usize] {
        &self.dag[id]
    }

    /// In-neighbours of a rotation in the rotation digraph.
    pub fn direct_predecessors(&self, id: usize) -> &[usize] {
        &self.dag_in[id]
    }

    /// Arcs of the rotation digraph, lexicographically sorted.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, outs) in self.dag.iter().enumerate() {
            out.extend(outs.iter().map(|&b| (a, b)));
        }
        out
    }

    /// Strict predecessors of `id`.
    pub fn predecessors(&self, id: usize) -> &FixedBitSet {
        &self.preds[id]
    }

    /// Whether `a` strictly precedes `b`.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.preds[b].contains(a)
    }

    /// Rotations involving man `m`, in precedence order.
    pub fn rotations_of(&self, m: usize) -> &[usize] {
        &self.per_man[m]
    }

    /// A directed path in the rotation digraph containing every rotation of
    /// `m`, empty when `m` takes part in none. Consecutive rotations of `m` are
    /// joined by breadth-first shortest paths.
    pub fn man_path(&self, m: usize) -> Result<&[usize], SolveError> {
        self.paths
            .get(m)
            .map(Vec::as_slice)
            .ok_or_else(|| SolveError::Invalid(format!("unknown man {}", m + 1)))
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.num_rotations())
    }

    pub fn set_of(&self, ids: &[usize]) -> Result<FixedBitSet, SolveError> {
        let mut set = self.empty_set();
        for &id in ids {
            if id >= self.num_rotations() {
                return Err(SolveError::Invalid(format!("unknown rotation {id}")));
            }
            set.insert(id);
        }
        Ok(set)
    }

    /// The smallest closed superset.
    pub fn closure_set(&self, subset: &FixedBitSet) -> FixedBitSet {
        let mut out = subset.clone();
        for id in subset.ones() {
            out.union_with(&self.preds[id]);
        }
        out
    }

    pub fn closure(&self, subset: &[usize]) -> Result<Vec<usize>, SolveError> {
        Ok(self.closure_set(&self.set_of(subset)?).ones().collect())
    }

    pub fn is_closed(&self, set: &FixedBitSet) -> bool {
        set.ones().all(|id| self.preds[id].is_subset(set))
    }

    /// The stable matching whose rotation set is `closed`, eliminating in ascending id order.
    pub fn eliminate_set(&self, closed: &FixedBitSet) -> Result<Matching, SolveError> {
        if !self.is_closed(closed) {
            return Err(SolveError::Invalid("rotation set is not closed".into()));
        }
        let mut mu = self.man_optimal.clone();
        for id in closed.ones() {
            apply(&mut mu, &self.rotations[id]);
        }
        Ok(mu)
    }

    pub fn eliminate(&self, closed: &[usize]) -> Result<Matching, SolveError> {
        self.eliminate_set(&self.set_of(closed)?)
    }

    /// Eliminates rotations in the given order, checking at every step that
    /// the rotation is exposed in the current matching.
    pub fn eliminate_in_order(&self, order: &[usize]) -> Result<Matching, SolveError> {
        let mut mu = self.man_optimal.clone();
        for &id in order {
            let rot = self
                .rotations
                .get(id)
                .ok_or_else(|| SolveError::Invalid(format!("unknown rotation {id}")))?;
            let exposed = rot.moves().all(|(m, from, to)| {
                mu.man_partner(m) == Some(from) && next_woman(&self.inst, &mu, m) == Some(to)
            });
            if !exposed {
                return Err(SolveError::Invalid(format!("rotation {id} is not exposed")));
            }
            apply(&mut mu, rot);
        }
        Ok(mu)
    }

    /// The rotation set of a stable matching: a rotation is in it exactly
    /// when its first man sits at his post-rotation woman or lower.
    pub fn rotation_set(&self, mu: &Matching) -> FixedBitSet {
        let mut set = self.empty_set();
        for rot in &self.rotations {
            let (m, _, to) = rot.moves().next().expect("rotations are non-empty");
            let cur = mu.man_partner(m).and_then(|w| self.inst.man_rank(m, w));
            let after = self.inst.man_rank(m, to).expect("acceptable");
            if cur.is_some_and(|r| r >= after) {
                set.insert(rot.id);
            }
        }
        set
    }

    /// Calls `visit` on every closed set, stopping with an error once `limit` sets were produced.
    pub fn for_each_closed_set(
        &self,
        limit: usize,
        mut visit: impl FnMut(&FixedBitSet),
    ) -> Result<usize, SolveError> {
        fn go(
            rs: &RotationStructure,
            id: usize,
            set: &mut FixedBitSet,
            count: &mut usize,
            limit: usize,
            visit: &mut dyn FnMut(&FixedBitSet),
        ) -> Result<(), SolveError> {
            if id == rs.num_rotations() {
                *count += 1;
                if *count > limit {
                    return Err(SolveError::Guard(format!("more than {limit} closed sets")));
                }
                visit(set);
                return Ok(());
            }
            go(rs, id + 1, set, count, limit, visit)?;
            if rs.dag_in[id].iter().all(|&p| set.contains(p)) {
                set.insert(id);
                go(rs, id + 1, set, count, limit, visit)?;
                set.set(id, false);
            }
            Ok(())
        }
        let mut count = 0;
        let mut set = self.empty_set();
        go(self, 0, &mut set, &mut count, limit, &mut visit)?;
        Ok(count)
    }

    /// The underlying undirected graph of the rotation digraph.
    pub fn rotation_graph(&self) -> Graph {
        Graph::from_edges(self.num_rotations(), &self.arcs())
    }

    /// Graphviz rendering of the rotation digraph. Node labels list the rotation's pairs, 1-based.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph rotations {\n");
        for rot in &self.rotations {
            let label: Vec<String> = rot
                .pairs
                .iter()
                .map(|&(m, w)| format!("(m{},w{})", m + 1, w + 1))
                .collect();
            let _ = writeln!(out, "  r{} [label=\"{}\"];", rot.id + 1, label.join(" "));
        }
        for (a, b) in self.arcs() {
            let _ = writeln!(out, "  r{} -> r{};", a + 1, b + 1);
        }
        out.push_str("}\n");
        out
    }
}
