use std::collections::BTreeSet;

use crate::{Graph, TreeDecomposition};

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nb: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Min-fill elimination order. Ties go to the smaller current degree, then the smaller vertex.
pub fn min_fill_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).collect()).collect();
    let mut fill: Vec<usize> = (0..n).map(|v| fill_in(&adj, v)).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&x| alive[x])
            .min_by_key(|&x| (fill[x], adj[x].len(), x))
            .expect("a live vertex remains");
        alive[v] = false;
        order.push(v);
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &nb {
            adj[a].remove(&v);
        }
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj[v].clear();
        let mut touched: BTreeSet<usize> = nb.iter().copied().collect();
        for &a in &nb {
            touched.extend(adj[a].iter().copied());
        }
        for x in touched {
            fill[x] = fill_in(&adj, x);
        }
    }
    order
}

/// Builds the decomposition induced by eliminating vertices in `order`.
///
/// The bag of `v` is `v` plus its neighbours that are still present when `v`
/// is eliminated. Its parent is the bag of the earliest-eliminated such
/// neighbour. The roots of different components are chained together, and
/// the bag of the last vertex is the root.
///
/// # Panics
/// If `order` is not a permutation of the vertices.
pub fn decomposition_from_order(g: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = g.n();
    assert_eq!(order.len(), n, "order must list every vertex once");
    if n == 0 {
        return TreeDecomposition::new(vec![vec![]], vec![], 0);
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        assert!(pos[v] == usize::MAX, "order repeats vertex {v}");
        pos[v] = i;
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).collect()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::new();
    let mut component_roots = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let later: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &later {
            adj[a].remove(&v);
        }
        for (k, &a) in later.iter().enumerate() {
            for &b in &later[k + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        match later.iter().map(|&a| pos[a]).min() {
            Some(p) => edges.push((i, p)),
            None => component_roots.push(i),
        }
        let mut bag = later;
        bag.push(v);
        bags.push(bag);
    }
    for w in component_roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    TreeDecomposition::new(bags, edges, n - 1)
}

/// A decomposition from the min-fill heuristic.
pub fn heuristic_decomposition(g: &Graph) -> TreeDecomposition {
    decomposition_from_order(g, &min_fill_order(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate;

    #[test]
    fn trees_get_width_one() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]);
        let td = heuristic_decomposition(&g);
        assert_eq!(validate(&td, &g), Ok(1));
    }

    #[test]
    fn cycle_gets_width_two() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(validate(&heuristic_decomposition(&g), &g), Ok(2));
    }

    #[test]
    fn clique_gets_full_width() {
        let mut g = Graph::new(5);
        for u in 0..5 {
            for v in u + 1..5 {
                g.add_edge(u, v);
            }
        }
        assert_eq!(validate(&heuristic_decomposition(&g), &g), Ok(4));
    }

    #[test]
    fn disconnected_and_empty_graphs() {
        let g = Graph::from_edges(5, &[(0, 1), (3, 4)]);
        assert_eq!(validate(&heuristic_decomposition(&g), &g), Ok(1));
        let g = Graph::new(0);
        assert_eq!(validate(&heuristic_decomposition(&g), &g), Ok(0));
        let g = Graph::new(3);
        assert_eq!(validate(&heuristic_decomposition(&g), &g), Ok(0));
    }
}
