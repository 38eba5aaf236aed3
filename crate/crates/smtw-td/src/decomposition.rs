use crate::{Graph, TdError};

/// A tree decomposition: bags of vertices joined by tree edges, with a chosen root bag.
///
/// Bags are kept sorted and free of duplicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
}

impl TreeDecomposition {
    pub fn new(bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>, root: usize) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { bags, edges, root }
    }

    /// Largest bag size minus one; zero when every bag is empty.
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            if a < adj.len() && b < adj.len() {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// Checks that the bag graph is a tree and the root is a bag.
    pub fn check_tree(&self) -> Result<(), TdError> {
        let nb = self.bags.len();
        if nb == 0 {
            return Err(TdError::Empty);
        }
        if self.root >= nb {
            return Err(TdError::BadRoot(self.root + 1));
        }
        for &(a, b) in &self.edges {
            if a >= nb || b >= nb {
                return Err(TdError::NotATree(format!(
                    "edge {}-{} names a missing bag",
                    a + 1,
                    b + 1
                )));
            }
            if a == b {
                return Err(TdError::NotATree(format!("loop at bag {}", a + 1)));
            }
        }
        if self.edges.len() + 1 != nb {
            return Err(TdError::NotATree(format!(
                "{} bags but {} edges",
                nb,
                self.edges.len()
            )));
        }
        let adj = self.adjacency();
        let mut seen = vec![false; nb];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        if count != nb {
            return Err(TdError::NotATree("bag graph is disconnected".into()));
        }
        Ok(())
    }
}

/// Validates `td` against `g` and returns its width.
///
/// Checks, in order: the bag graph is a tree, every bag vertex exists, every
/// edge of `g` lies in some bag, every vertex lies in some bag, and the bags
/// holding each vertex are connected.
pub fn validate(td: &TreeDecomposition, g: &Graph) -> Result<usize, TdError> {
    td.check_tree()?;
    let n = g.n();
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                return Err(TdError::VertexOutOfRange(v + 1));
            }
            holders[v].push(i);
        }
    }
    for (u, v) in g.edges() {
        let covered = td
            .bags
            .iter()
            .any(|b| b.binary_search(&u).is_ok() && b.binary_search(&v).is_ok());
        if !covered {
            return Err(TdError::UncoveredEdge(u + 1, v + 1));
        }
    }
    let adj = td.adjacency();
    let mut mark = vec![usize::MAX; td.bags.len()];
    for (v, hs) in holders.iter().enumerate() {
        let Some(&first) = hs.first() else {
            return Err(TdError::MissingVertex(v + 1));
        };
        for &h in hs {
            mark[h] = v;
        }
        let mut reached = 1;
        let mut stack = vec![first];
        mark[first] = usize::MAX - 1 - v;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if mark[y] == v {
                    mark[y] = usize::MAX - 1 - v;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        if reached != hs.len() {
            return Err(TdError::DisconnectedVertex(v + 1));
        }
    }
    Ok(td.width())
}

/// Adds `extra` to every bag. The result stays valid for any graph on which
/// `td` was valid plus arbitrary edges among `extra` and to any vertex.
pub fn inflate(td: &TreeDecomposition, extra: &[usize]) -> TreeDecomposition {
    let bags = td
        .bags
        .iter()
        .map(|b| b.iter().chain(extra).copied().collect())
        .collect();
    TreeDecomposition::new(bags, td.edges.clone(), td.root)
}
