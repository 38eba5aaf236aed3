use fixedbitset::FixedBitSet;

use crate::{Graph, TdError, TreeDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    /// Empty bag, no children.
    Leaf,
    /// Bag is the child's bag plus this vertex.
    Introduce(usize),
    /// Bag is the child's bag minus this vertex.
    Forget(usize),
    /// Two children with the same bag as this node.
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    /// Sorted.
    pub bag: Vec<usize>,
    pub kind: NodeKind,
    pub children: Vec<usize>,
}

/// A nice tree decomposition. Children always have smaller indices than their
/// parent, so index order is a post-order and the root is the last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
    pub root: usize,
}

impl NiceTreeDecomposition {
    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|x| x.bag.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// For every node, the union of the bags in its subtree, over vertices `0..universe`.
    pub fn cumulative(&self, universe: usize) -> Vec<FixedBitSet> {
        let mut out: Vec<FixedBitSet> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let mut set = FixedBitSet::with_capacity(universe);
            for &v in &node.bag {
                set.insert(v);
            }
            for &c in &node.children {
                set.union_with(&out[c]);
            }
            out.push(set);
        }
        out
    }

    /// The underlying plain decomposition.
    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|x| x.bag.clone()).collect();
        let mut edges = Vec::new();
        for (i, x) in self.nodes.iter().enumerate() {
            for &c in &x.children {
                edges.push((c, i));
            }
        }
        TreeDecomposition::new(bags, edges, self.root)
    }

    /// Checks node typing, the empty root, index ordering and validity against `g`. Returns the width.
    pub fn validate(&self, g: &Graph) -> Result<usize, TdError> {
        if self.nodes.is_empty() {
            return Err(TdError::Empty);
        }
        if self.root + 1 != self.nodes.len() {
            return Err(TdError::BadRoot(self.root + 1));
        }
        if !self.nodes[self.root].bag.is_empty() {
            return Err(TdError::NotNice {
                node: self.root + 1,
                kind: "root",
            });
        }
        for (i, x) in self.nodes.iter().enumerate() {
            let bad = |kind| TdError::NotNice { node: i + 1, kind };
            if x.children.iter().any(|&c| c >= i) || !x.bag.windows(2).all(|w| w[0] < w[1]) {
                return Err(bad("ordered"));
            }
            match x.kind {
                NodeKind::Leaf => {
                    if !x.children.is_empty() || !x.bag.is_empty() {
                        return Err(bad("leaf"));
                    }
                }
                NodeKind::Introduce(v) => {
                    let ok = x.children.len() == 1 && {
                        let cb = &self.nodes[x.children[0]].bag;
                        cb.binary_search(&v).is_err()
                            && x.bag.len() == cb.len() + 1
                            && x.bag
                                .iter()
                                .all(|&u| u == v || cb.binary_search(&u).is_ok())
                    };
                    if !ok {
                        return Err(bad("introduce"));
                    }
                }
                NodeKind::Forget(v) => {
                    let ok = x.children.len() == 1 && {
                        let cb = &self.nodes[x.children[0]].bag;
                        x.bag.binary_search(&v).is_err()
                            && cb.len() == x.bag.len() + 1
                            && cb
                                .iter()
                                .all(|&u| u == v || x.bag.binary_search(&u).is_ok())
                    };
                    if !ok {
                        return Err(bad("forget"));
                    }
                }
                NodeKind::Join => {
                    let ok = x.children.len() == 2
                        && x.children.iter().all(|&c| self.nodes[c].bag == x.bag);
                    if !ok {
                        return Err(bad("join"));
                    }
                }
            }
        }
        crate::validate(&self.to_tree_decomposition(), g)
    }
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, bag: Vec<usize>, kind: NodeKind, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode {
            bag,
            kind,
            children,
        });
        self.nodes.len() - 1
    }

    /// Forgets `from \ to` and then introduces `to \ from`, both in ascending order.
    fn chain(&mut self, mut at: usize, to: &[usize]) -> usize {
        let from = self.nodes[at].bag.clone();
        let mut bag = from.clone();
        for &v in from.iter().filter(|v| to.binary_search(v).is_err()) {
            bag.retain(|&u| u != v);
            at = self.push(bag.clone(), NodeKind::Forget(v), vec![at]);
        }
        for &v in to.iter().filter(|v| from.binary_search(v).is_err()) {
            let p = bag.partition_point(|&u| u < v);
            bag.insert(p, v);
            at = self.push(bag.clone(), NodeKind::Introduce(v), vec![at]);
        }
        at
    }

    fn join_all(&mut self, parts: &[usize]) -> usize {
        if parts.len() == 1 {
            return parts[0];
        }
        let mid = parts.len() / 2;
        let l = self.join_all(&parts[..mid]);
        let r = self.join_all(&parts[mid..]);
        let bag = self.nodes[l].bag.clone();
        self.push(bag, NodeKind::Join, vec![l, r])
    }
}

/// Converts a decomposition into a nice one rooted at `td.root`.
///
/// Every leaf has an empty bag and so does the root. Between a bag and its
/// parent, vertices are forgotten first and then introduced, each in
/// ascending order. A bag with `k >= 2` children becomes a balanced tree of
/// `k - 1` join nodes.
pub fn make_nice(td: &TreeDecomposition) -> Result<NiceTreeDecomposition, TdError> {
    td.check_tree()?;
    let adj = td.adjacency();
    let nb = td.bags.len();
    let mut parent = vec![usize::MAX; nb];
    let mut preorder = Vec::with_capacity(nb);
    let mut stack = vec![td.root];
    parent[td.root] = td.root;
    while let Some(x) = stack.pop() {
        preorder.push(x);
        for &y in adj[x].iter().rev() {
            if parent[y] == usize::MAX {
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    let mut b = Builder { nodes: Vec::new() };
    let mut top = vec![usize::MAX; nb];
    for &x in preorder.iter().rev() {
        let bag = &td.bags[x];
        let kids: Vec<usize> = adj[x]
            .iter()
            .copied()
            .filter(|&y| parent[y] == x && y != x)
            .collect();
        let parts: Vec<usize> = if kids.is_empty() {
            let leaf = b.push(Vec::new(), NodeKind::Leaf, Vec::new());
            vec![b.chain(leaf, bag)]
        } else {
            kids.iter().map(|&c| b.chain(top[c], bag)).collect()
        };
        top[x] = b.join_all(&parts);
    }
    let root = b.chain(top[td.root], &[]);
    Ok(NiceTreeDecomposition {
        nodes: b.nodes,
        root,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_becomes_nice() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![(0, 1)], 0);
        let nice = make_nice(&td).unwrap();
        assert_eq!(nice.validate(&g), Ok(1));
        let kinds: Vec<NodeKind> = nice.nodes.iter().map(|x| x.kind).collect();
        use NodeKind::*;
        assert_eq!(
            kinds,
            vec![
                Leaf,
                Introduce(1),
                Introduce(2),
                Forget(2),
                Introduce(0),
                Forget(0),
                Forget(1)
            ]
        );
    }

    #[test]
    fn star_uses_balanced_joins() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let td = TreeDecomposition::new(
            vec![vec![0], vec![0, 1], vec![0, 2], vec![0, 3], vec![0, 4]],
            vec![(0, 1), (0, 2), (0, 3), (0, 4)],
            0,
        );
        let nice = make_nice(&td).unwrap();
        assert_eq!(nice.validate(&g), Ok(1));
        let joins = nice
            .nodes
            .iter()
            .filter(|x| x.kind == NodeKind::Join)
            .count();
        assert_eq!(joins, 3);
        let gamma = nice.cumulative(5);
        assert_eq!(gamma[nice.root].count_ones(..), 5);
    }

    #[test]
    fn single_empty_bag() {
        let td = TreeDecomposition::new(vec![vec![]], vec![], 0);
        let nice = make_nice(&td).unwrap();
        assert_eq!(nice.nodes.len(), 1);
        assert_eq!(nice.validate(&Graph::new(0)), Ok(0));
    }
}
