use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use smtw_instance::{Instance, SolveError};
use smtw_rotation::RotationStructure;
use smtw_td::NiceTreeDecomposition;

/// Largest bag the tables accept; rows per node are `2^|bag|`.
pub const MAX_BAG: usize = 24;

/// A decomposition node together with a subset `R'` of its bag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub node: usize,
    /// Rotation ids, each of which must lie in the node's bag.
    pub subset: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManKind {
    Settled,
    Unsettled,
}

/// How one man of `M*` looks from a state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManView {
    pub man: usize,
    /// Last vertex of `P(m)` inside `R'`.
    pub ell: Option<usize>,
    /// After `ell`, the first vertex of `P(m)` in the bag but outside `R'`;
    /// without `ell`, the first vertex of `P(m)` in the bag.
    pub eff: Option<usize>,
    /// The stretch of `P(m)` from `ell` (or the start) to `eff` (or the end);
    /// empty when `P(m)` misses the bag.
    pub segment: Vec<usize>,
    pub kind: ManKind,
    /// The man's partner in the matching of `cl(R')`.
    pub partner: usize,
}

/// Everything the tables need that does not depend on a particular row.
pub(crate) struct Context<'a> {
    pub inst: &'a Instance,
    pub rs: &'a RotationStructure,
    pub ntd: &'a NiceTreeDecomposition,
    /// Rotations in the bags of each node's subtree.
    pub gamma: Vec<FixedBitSet>,
    /// Men matched in every stable matching, ascending.
    pub mstar: Vec<usize>,
    /// Per man, the woman he gets from each of his rotations, in poset order.
    moves: Vec<Vec<(usize, usize)>>,
    paths: Vec<Vec<usize>>,
}

impl<'a> Context<'a> {
    pub fn new(
        inst: &'a Instance,
        rs: &'a RotationStructure,
        ntd: &'a NiceTreeDecomposition,
    ) -> Result<Self, SolveError> {
        if inst.has_ties() {
            return Err(SolveError::Ties);
        }
        if rs.instance() != inst {
            return Err(SolveError::Invalid(
                "rotation structure belongs to another instance".into(),
            ));
        }
        ntd.validate(&rs.rotation_graph()).map_err(|e| {
            SolveError::Decomposition(format!("not a decomposition of the rotation digraph: {e}"))
        })?;
        if let Some(big) = ntd
            .nodes
            .iter()
            .map(|x| x.bag.len())
            .max()
            .filter(|&b| b > MAX_BAG)
        {
            return Err(SolveError::Guard(format!(
                "bag of size {big} exceeds {MAX_BAG}"
            )));
        }
        let nm = inst.num_men();
        let mstar: Vec<usize> = (0..nm)
            .filter(|&m| rs.man_optimal().man_partner(m).is_some())
            .collect();
        let mut moves = vec![Vec::new(); nm];
        for rot in rs.rotations() {
            for (m, _, to) in rot.moves() {
                moves[m].push((rot.id, to));
            }
        }
        let mut paths = vec![Vec::new(); nm];
        for &m in &mstar {
            paths[m] = rs.man_path(m)?.to_vec();
        }
        Ok(Context {
            inst,
            rs,
            ntd,
            gamma: ntd.cumulative(rs.num_rotations()),
            mstar,
            moves,
            paths,
        })
    }

    /// The partner of `m` once the closed set `closed` is eliminated.
    pub fn partner(&self, m: usize, closed: &FixedBitSet) -> usize {
        // ids follow elimination order, so his rotations are sorted
        self.moves[m]
            .iter()
            .rev()
            .find(|(r, _)| closed.contains(*r))
            .map(|&(_, w)| w)
            .unwrap_or_else(|| self.rs.man_optimal().man_partner(m).expect("man of M*"))
    }

    /// `(p_m(w), p_w(m))` for the pair `(m, w)`.
    pub fn ranks(&self, m: usize, w: usize) -> (i64, i64) {
        let a = self
            .inst
            .man_rank(m, w)
            .expect("stable pairs are acceptable");
        let b = self
            .inst
            .woman_rank(w, m)
            .expect("stable pairs are acceptable");
        (i64::from(a), i64::from(b))
    }

    /// Satisfaction sums of the matching of the closed set `closed`.
    pub fn sat(&self, closed: &FixedBitSet) -> (i64, i64) {
        self.mstar.iter().fold((0, 0), |(a, l), &m| {
            let (x, y) = self.ranks(m, self.partner(m, closed));
            (a + x, l + y)
        })
    }

    /// The rotations of `node`'s bag selected by `mask`.
    pub fn set_of_mask(&self, node: usize, mask: usize) -> FixedBitSet {
        let mut s = self.rs.empty_set();
        for (i, &r) in self.ntd.nodes[node].bag.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s.insert(r);
            }
        }
        s
    }

    /// Last vertex of `P(m)` that lies in `set`.
    pub fn last_in(&self, m: usize, set: &FixedBitSet) -> Option<usize> {
        self.paths[m]
            .iter()
            .rev()
            .copied()
            .find(|&x| set.contains(x))
    }

    pub fn view(
        &self,
        node: usize,
        subset: &FixedBitSet,
        closed: &FixedBitSet,
        m: usize,
    ) -> ManView {
        let bag = &self.ntd.nodes[node].bag;
        let in_bag = |x: &usize| bag.binary_search(x).is_ok();
        let path = &self.paths[m];
        let ell = path.iter().rposition(|&x| subset.contains(x));
        let eff = match ell {
            Some(i) => path[i + 1..]
                .iter()
                .position(|x| in_bag(x) && !subset.contains(*x))
                .map(|j| i + 1 + j),
            None => path.iter().position(in_bag),
        };
        let relevant = path.iter().any(in_bag);
        let segment = match (ell, eff) {
            (Some(i), Some(j)) => path[i..=j].to_vec(),
            (Some(i), None) => path[i..].to_vec(),
            (None, Some(j)) => path[..=j].to_vec(),
            (None, None) => Vec::new(),
        };
        let gamma = &self.gamma[node];
        let settled = path.iter().all(|&x| gamma.contains(x))
            || (relevant && segment.iter().all(|&x| gamma.contains(x)));
        ManView {
            man: m,
            ell: ell.map(|i| path[i]),
            eff: eff.map(|j| path[j]),
            segment,
            kind: if settled {
                ManKind::Settled
            } else {
                ManKind::Unsettled
            },
            partner: self.partner(m, closed),
        }
    }
}

/// The view of every man of `M*` from `state`.
pub fn state_views(
    inst: &Instance,
    rs: &RotationStructure,
    ntd: &NiceTreeDecomposition,
    state: &State,
) -> Result<BTreeMap<usize, ManView>, SolveError> {
    let ctx = Context::new(inst, rs, ntd)?;
    let node = ntd
        .nodes
        .get(state.node)
        .ok_or_else(|| SolveError::Invalid(format!("no node {}", state.node + 1)))?;
    if let Some(r) = state
        .subset
        .iter()
        .find(|r| node.bag.binary_search(r).is_err())
    {
        return Err(SolveError::Invalid(format!(
            "rotation {} is not in the bag of node {}",
            r + 1,
            state.node + 1
        )));
    }
    let subset = rs.set_of(&state.subset)?;
    let closed = rs.closure_set(&subset);
    Ok(ctx
        .mstar
        .iter()
        .map(|&m| (m, ctx.view(state.node, &subset, &closed, m)))
        .collect())
}
