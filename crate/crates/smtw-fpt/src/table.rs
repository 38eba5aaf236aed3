use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use smtw_td::NodeKind;

use crate::state::Context;

/// A pair of men-side and women-side quantities.
pub(crate) type Pair = (i64, i64);

/// What one row stores. Keys are pairs in a cell-specific coordinate
/// system reached through `project`; all four computations then act
/// componentwise on keys.
pub(crate) trait Cell: Clone + Default {
    /// Maps `(sum over men, sum over women)` into key coordinates.
    fn project(p: Pair) -> Pair;
    fn single(k: Pair) -> Self;
    fn shift(&self, d: Pair) -> Self;
    fn absorb(&mut self, other: &Self);
    fn join(a: &Self, b: &Self, corr: Pair) -> Self;
    fn len(&self) -> usize;
    fn contains(&self, k: Pair) -> bool;
    fn keys(&self) -> Vec<Pair>;
}

fn add(a: Pair, b: Pair) -> Pair {
    (a.0 + b.0, a.1 + b.1)
}

fn sub(a: Pair, b: Pair) -> Pair {
    (a.0 - b.0, a.1 - b.1)
}

/// The 1-entries of table N, as `(t_M, t_W)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct PairCell(pub BTreeSet<Pair>);

/// The 1-entries of table S, as `(d, 0)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct DiffCell(pub BTreeSet<Pair>);

macro_rules! set_cell {
    ($name:ident, $proj:expr) => {
        impl Cell for $name {
            fn project(p: Pair) -> Pair {
                $proj(p)
            }
            fn single(k: Pair) -> Self {
                $name(BTreeSet::from([k]))
            }
            fn shift(&self, d: Pair) -> Self {
                $name(self.0.iter().map(|&k| add(k, d)).collect())
            }
            fn absorb(&mut self, other: &Self) {
                self.0.extend(other.0.iter().copied());
            }
            fn join(a: &Self, b: &Self, corr: Pair) -> Self {
                let mut out = BTreeSet::new();
                for &x in &a.0 {
                    for &y in &b.0 {
                        out.insert(sub(add(x, y), corr));
                    }
                }
                $name(out)
            }
            fn len(&self) -> usize {
                self.0.len()
            }
            fn contains(&self, k: Pair) -> bool {
                self.0.contains(&k)
            }
            fn keys(&self) -> Vec<Pair> {
                self.0.iter().copied().collect()
            }
        }
    };
}

set_cell!(PairCell, |p: Pair| p);
set_cell!(DiffCell, |p: Pair| (p.0 - p.1, 0));

/// Table B: for each men-side value `b`, the least women-side value. Absent `b` is nil.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct MinCell(pub BTreeMap<i64, i64>);

impl MinCell {
    fn put(&mut self, b: i64, v: i64) {
        let e = self.0.entry(b).or_insert(v);
        *e = (*e).min(v);
    }
}

impl Cell for MinCell {
    fn project(p: Pair) -> Pair {
        p
    }
    fn single(k: Pair) -> Self {
        MinCell(BTreeMap::from([k]))
    }
    fn shift(&self, d: Pair) -> Self {
        MinCell(self.0.iter().map(|(&b, &v)| (b + d.0, v + d.1)).collect())
    }
    fn absorb(&mut self, other: &Self) {
        for (&b, &v) in &other.0 {
            self.put(b, v);
        }
    }
    fn join(a: &Self, b: &Self, corr: Pair) -> Self {
        let mut out = MinCell::default();
        for (&b1, &v1) in &a.0 {
            for (&b2, &v2) in &b.0 {
                out.put(b1 + b2 - corr.0, v1 + v2 - corr.1);
            }
        }
        out
    }
    fn len(&self) -> usize {
        self.0.len()
    }
    fn contains(&self, k: Pair) -> bool {
        self.0.get(&k.0) == Some(&k.1)
    }
    fn keys(&self) -> Vec<Pair> {
        self.0.iter().map(|(&b, &v)| (b, v)).collect()
    }
}

/// Per-row data kept beside the cells for reconstruction.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Aux {
    None,
    /// Introduce case 3: the key shift applied to the child row.
    Shift(Pair),
    /// Join: the key correction.
    Corr(Pair),
}

pub(crate) struct Tables<C> {
    /// `rows[v][mask]`, masks over the slots of `v`'s bag in ascending rotation id.
    pub rows: Vec<Vec<C>>,
    pub aux: Vec<Vec<Aux>>,
}

/// Drops bit `p` from a mask, closing the gap.
fn remove_bit(mask: usize, p: usize) -> usize {
    (mask & ((1 << p) - 1)) | (mask >> (p + 1)) << p
}

/// Opens a gap at bit `p` and sets it to `bit`.
fn insert_bit(mask: usize, p: usize, bit: bool) -> usize {
    (mask & ((1 << p) - 1)) | usize::from(bit) << p | (mask >> p) << (p + 1)
}

fn slot(bag: &[usize], r: usize) -> usize {
    bag.binary_search(&r).expect("vertex is in the bag")
}

/// Introduce case 3: `ρ ∈ R'`. Returns the summed `(diffα, diffλ)` over `M_ρ`.
fn introduce_shift(
    ctx: &Context,
    child: usize,
    cl_rho: &FixedBitSet,
    subset: &FixedBitSet,
    closed: &FixedBitSet,
    closed_without: &FixedBitSet,
) -> Pair {
    let mut d = (0, 0);
    for &m in &ctx.mstar {
        let Some(rho_m) = ctx.last_in(m, cl_rho) else {
            continue;
        };
        if ctx.gamma[child].contains(rho_m) {
            continue;
        }
        let in_cl = match ctx.last_in(m, subset) {
            None => true,
            Some(l) => l == rho_m || ctx.rs.precedes(l, rho_m),
        };
        if !in_cl {
            continue;
        }
        let now = ctx.ranks(m, ctx.partner(m, closed));
        let before = ctx.ranks(m, ctx.partner(m, closed_without));
        d = add(d, sub(now, before));
    }
    d
}

pub(crate) fn fill<C: Cell>(ctx: &Context) -> Tables<C> {
    let ntd = ctx.ntd;
    let mut rows: Vec<Vec<C>> = Vec::with_capacity(ntd.len());
    let mut aux: Vec<Vec<Aux>> = Vec::with_capacity(ntd.len());
    // children precede parents in index order
    for (v, node) in ntd.nodes.iter().enumerate() {
        let size = 1usize << node.bag.len();
        let mut row = vec![C::default(); size];
        let mut extra = vec![Aux::None; size];
        match node.kind {
            NodeKind::Leaf => {
                let base = ctx.sat(&ctx.rs.empty_set());
                row[0] = C::single(C::project(base));
            }
            NodeKind::Forget(rho) => {
                let u = node.children[0];
                let p = slot(&ntd.nodes[u].bag, rho);
                for (mask, cell) in row.iter_mut().enumerate() {
                    let mut c = rows[u][insert_bit(mask, p, false)].clone();
                    c.absorb(&rows[u][insert_bit(mask, p, true)]);
                    *cell = c;
                }
            }
            NodeKind::Introduce(rho) => {
                let u = node.children[0];
                let p = slot(&node.bag, rho);
                let mut cl_rho = ctx.rs.predecessors(rho).clone();
                cl_rho.insert(rho);
                for mask in 0..size {
                    let subset = ctx.set_of_mask(v, mask);
                    let closed = ctx.rs.closure_set(&subset);
                    let escapes = node
                        .bag
                        .iter()
                        .enumerate()
                        .any(|(i, &r)| mask >> i & 1 == 0 && closed.contains(r));
                    if escapes {
                        continue;
                    }
                    let cm = remove_bit(mask, p);
                    if mask >> p & 1 == 0 {
                        row[mask] = rows[u][cm].clone();
                        continue;
                    }
                    let mut without = subset.clone();
                    without.set(rho, false);
                    let closed_without = ctx.rs.closure_set(&without);
                    let d = introduce_shift(ctx, u, &cl_rho, &subset, &closed, &closed_without);
                    let d = C::project(d);
                    row[mask] = rows[u][cm].shift(d);
                    extra[mask] = Aux::Shift(d);
                }
            }
            NodeKind::Join => {
                let (a, b) = (node.children[0], node.children[1]);
                for mask in 0..size {
                    let closed = ctx.rs.closure_set(&ctx.set_of_mask(v, mask));
                    let corr = C::project(ctx.sat(&closed));
                    row[mask] = C::join(&rows[a][mask], &rows[b][mask], corr);
                    extra[mask] = Aux::Corr(corr);
                }
            }
        }
        rows.push(row);
        aux.push(extra);
    }
    Tables { rows, aux }
}

impl<C: Cell> Tables<C> {
    /// The closed set of a stable matching realising `key` at the root row.
    pub fn reconstruct(&self, ctx: &Context, key: Pair) -> FixedBitSet {
        let ntd = ctx.ntd;
        let mut chosen = ctx.rs.empty_set();
        let mut stack = vec![(ntd.root, 0usize, key)];
        while let Some((v, mask, key)) = stack.pop() {
            debug_assert!(self.rows[v][mask].contains(key));
            let node = &ntd.nodes[v];
            chosen.union_with(&ctx.set_of_mask(v, mask));
            match node.kind {
                NodeKind::Leaf => {}
                NodeKind::Forget(rho) => {
                    let u = node.children[0];
                    let p = slot(&ntd.nodes[u].bag, rho);
                    let out = insert_bit(mask, p, false);
                    let cm = if self.rows[u][out].contains(key) {
                        out
                    } else {
                        insert_bit(mask, p, true)
                    };
                    stack.push((u, cm, key));
                }
                NodeKind::Introduce(rho) => {
                    let u = node.children[0];
                    let cm = remove_bit(mask, slot(&node.bag, rho));
                    let ck = match self.aux[v][mask] {
                        Aux::Shift(d) => sub(key, d),
                        _ => key,
                    };
                    stack.push((u, cm, ck));
                }
                NodeKind::Join => {
                    let (a, b) = (node.children[0], node.children[1]);
                    let Aux::Corr(corr) = self.aux[v][mask] else {
                        unreachable!("join rows carry a correction")
                    };
                    let (ka, kb) = self.rows[a][mask]
                        .keys()
                        .into_iter()
                        .map(|ka| (ka, add(sub(key, ka), corr)))
                        .find(|&(_, kb)| self.rows[b][mask].contains(kb))
                        .expect("a join entry has a split");
                    stack.push((a, mask, ka));
                    stack.push((b, mask, kb));
                }
            }
        }
        chosen
    }

    pub fn root(&self, ctx: &Context) -> &C {
        &self.rows[ctx.ntd.root][0]
    }

    pub fn row_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn entry_count(&self) -> usize {
        self.rows.iter().flatten().map(Cell::len).sum()
    }
}
