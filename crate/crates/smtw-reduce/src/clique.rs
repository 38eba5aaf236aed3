use std::collections::BTreeMap;

use crate::ReduceError;

/// A multicolored clique instance: a graph with its vertex set split into
/// `k` classes of equal size `p`.
///
/// Vertex `v^i_j` is the `j`-th vertex listed for class `i`. For classes
/// `i < j`, the edges between them are `e^{i,j}_1, ..., e^{i,j}_{q^{i,j}}`,
/// ordered by the positions of their endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueInput {
    n: usize,
    classes: Vec<Vec<usize>>,
    /// `(class, position)` of each vertex, 0-based.
    place: Vec<(usize, usize)>,
    /// `pairs[(i, j)]`: endpoint positions `(a, b)` of the edges between classes `i < j`.
    pairs: BTreeMap<(usize, usize), Vec<(usize, usize)>>,
    edges: usize,
}

impl CliqueInput {
    /// `edges` over vertices `0..n`; `classes` lists the vertices of each class.
    pub fn new(
        n: usize,
        edges: &[(usize, usize)],
        classes: Vec<Vec<usize>>,
    ) -> Result<Self, ReduceError> {
        let bad = |s: String| Err(ReduceError::Invalid(s));
        let k = classes.len();
        if k < 2 {
            return bad(format!("need at least two classes, got {k}"));
        }
        let p = classes[0].len();
        if p < 2 {
            return bad("classes need at least two vertices".into());
        }
        if classes.iter().any(|c| c.len() != p) {
            return bad("classes differ in size".into());
        }
        let mut place = vec![None; n];
        for (i, c) in classes.iter().enumerate() {
            for (j, &v) in c.iter().enumerate() {
                if v >= n {
                    return bad(format!("class {} names vertex {} of {n}", i + 1, v + 1));
                }
                if place[v].replace((i, j)).is_some() {
                    return bad(format!("vertex {} is in two classes", v + 1));
                }
            }
        }
        let Some(place) = place.into_iter().collect::<Option<Vec<_>>>() else {
            return bad("the classes do not cover every vertex".into());
        };
        let mut pairs: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for i in 0..k {
            for j in i + 1..k {
                pairs.insert((i, j), Vec::new());
            }
        }
        for &(u, v) in edges {
            if u >= n || v >= n {
                return bad(format!(
                    "edge ({}, {}) leaves the vertex range",
                    u + 1,
                    v + 1
                ));
            }
            let (a, b) = if place[u].0 <= place[v].0 {
                (place[u], place[v])
            } else {
                (place[v], place[u])
            };
            if a.0 == b.0 {
                return bad(format!(
                    "edge ({}, {}) lies inside class {}",
                    u + 1,
                    v + 1,
                    a.0 + 1
                ));
            }
            pairs.get_mut(&(a.0, b.0)).expect("i < j").push((a.1, b.1));
        }
        for (&(i, j), list) in pairs.iter_mut() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return bad(format!(
                    "repeated edge between classes {} and {}",
                    i + 1,
                    j + 1
                ));
            }
        }
        Ok(CliqueInput {
            n,
            classes,
            place,
            pairs,
            edges: edges.len(),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges
    }

    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn p(&self) -> usize {
        self.classes[0].len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// `(class, position)` of a vertex, 0-based.
    pub fn place(&self, v: usize) -> (usize, usize) {
        self.place[v]
    }

    /// Endpoint positions of `E^{i,j}` for classes `i < j` (0-based).
    pub fn edges_between(&self, i: usize, j: usize) -> &[(usize, usize)] {
        &self.pairs[&(i, j)]
    }

    /// `q^{i,j}`.
    pub fn q(&self, i: usize, j: usize) -> usize {
        self.pairs[&(i, j)].len()
    }

    /// Edges incident to `v^i_a` as `(i', j', t)` with `i' < j'` and 0-based `t`, ascending.
    pub fn incident(&self, i: usize, a: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (&(x, y), list) in &self.pairs {
            for (t, &(u, v)) in list.iter().enumerate() {
                if (x == i && u == a) || (y == i && v == a) {
                    out.push((x, y, t));
                }
            }
        }
        out
    }

    /// Edges with an endpoint in class `i`.
    pub fn class_degree(&self, i: usize) -> usize {
        self.pairs
            .iter()
            .filter(|((x, y), _)| *x == i || *y == i)
            .map(|(_, l)| l.len())
            .sum()
    }

    /// Rejects inputs with a pair of classes joined by no edge: they have no
    /// multicolored clique, and the gadgets assume every `E^{i,j}` is nonempty.
    pub(crate) fn require_pair_edges(&self) -> Result<(), ReduceError> {
        match self.pairs.iter().find(|(_, l)| l.is_empty()) {
            Some((&(i, j), _)) => Err(ReduceError::Precondition(format!(
                "no edge between classes {} and {}",
                i + 1,
                j + 1
            ))),
            None => Ok(()),
        }
    }

    /// Some multicolored clique, by exhaustive search over one vertex per class.
    pub fn find_clique(&self, limit: u64) -> Result<Option<Clique>, ReduceError> {
        let (k, p) = (self.k(), self.p());
        let total = (p as u64).checked_pow(k as u32).filter(|&t| t <= limit);
        if total.is_none() {
            return Err(ReduceError::Guard(format!(
                "{p}^{k} vertex choices exceed {limit}"
            )));
        }
        let mut pick = vec![0usize; k];
        loop {
            if let Some(c) = self.clique_at(&pick) {
                return Ok(Some(c));
            }
            let mut d = 0;
            while d < k && pick[d] + 1 == p {
                pick[d] = 0;
                d += 1;
            }
            if d == k {
                return Ok(None);
            }
            pick[d] += 1;
        }
    }

    fn clique_at(&self, pick: &[usize]) -> Option<Clique> {
        let mut edges = BTreeMap::new();
        for (&(i, j), list) in &self.pairs {
            let t = list.iter().position(|&e| e == (pick[i], pick[j]))?;
            edges.insert((i, j), t);
        }
        Some(Clique {
            vertices: pick.to_vec(),
            edges,
        })
    }
}

/// A multicolored clique: `vertices[i]` is `ℓ_i`, `edges[(i, j)]` is `ℓ_{i,j}` (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clique {
    pub vertices: Vec<usize>,
    pub edges: BTreeMap<(usize, usize), usize>,
}

/// Parses an edge list (`n m` header, then `u v` lines, 1-based) and a
/// partition (one line of 1-based vertices per class). `#` starts a comment.
pub fn parse_clique(graph: &str, partition: &str) -> Result<CliqueInput, ReduceError> {
    let syntax = |s: String| ReduceError::Invalid(s);
    let rows = |s: &str, what: &str| -> Result<Vec<Vec<usize>>, ReduceError> {
        s.lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| syntax(format!("{what}: bad number '{t}'")))
                    })
                    .collect()
            })
            .collect()
    };
    let one_based = |v: usize| {
        v.checked_sub(1)
            .ok_or_else(|| syntax("vertices are 1-based".into()))
    };
    let g = rows(graph, "graph")?;
    let head = g.first().ok_or_else(|| syntax("empty graph file".into()))?;
    let [n, m] = head[..] else {
        return Err(syntax("graph header must be 'n m'".into()));
    };
    if g.len() != m + 1 {
        return Err(syntax(format!(
            "graph header promises {m} edges, found {}",
            g.len() - 1
        )));
    }
    let mut edges = Vec::with_capacity(m);
    for e in &g[1..] {
        let [u, v] = e[..] else {
            return Err(syntax("edge lines must be 'u v'".into()));
        };
        edges.push((one_based(u)?, one_based(v)?));
    }
    let classes = rows(partition, "partition")?
        .into_iter()
        .map(|c| c.into_iter().map(one_based).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    CliqueInput::new(n, &edges, classes)
}

/// Spacer counts standing in for `|E|^10`, `|E|^20`, `|E|^30`, `|E|^40`,
/// and the multiplier standing in for `4^k |E|^10` in `α' = α · 4^k |E|^10`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Spacers {
    pub s10: u64,
    pub s20: u64,
    pub s30: u64,
    pub s40: u64,
    pub alpha_mult: u64,
}

impl Default for Spacers {
    fn default() -> Self {
        Spacers {
            s10: 1,
            s20: 1,
            s30: 1,
            s40: 1,
            alpha_mult: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliqueMode {
    /// Spacers replaced by small counts; magnitude preconditions skipped.
    Relaxed(Spacers),
    /// Nominal spacers and preconditions `|E| ≥ n`, `|E| > 10^k`.
    Strict,
}

impl CliqueMode {
    pub(crate) fn spacers(self, inp: &CliqueInput) -> Result<Spacers, ReduceError> {
        match self {
            CliqueMode::Relaxed(s) => {
                if [s.s10, s.s20, s.s30, s.s40, s.alpha_mult].contains(&0) {
                    return Err(ReduceError::Invalid("spacers must be positive".into()));
                }
                Ok(s)
            }
            CliqueMode::Strict => {
                let e = inp.num_edges() as u64;
                let k = inp.k() as u32;
                if e < inp.num_vertices() as u64 {
                    return Err(ReduceError::Precondition(format!(
                        "|E| = {e} < n = {}",
                        inp.num_vertices()
                    )));
                }
                if 10u64.checked_pow(k).is_some_and(|t| e <= t) {
                    return Err(ReduceError::Precondition(format!("|E| = {e} ≤ 10^{k}")));
                }
                let pow = |x: u32| {
                    e.checked_pow(x)
                        .ok_or_else(|| ReduceError::Guard(format!("|E|^{x} overflows")))
                };
                let mult = 4u64
                    .checked_pow(k)
                    .and_then(|f| f.checked_mul(pow(10).ok()?))
                    .ok_or_else(|| ReduceError::Guard("4^k |E|^10 overflows".into()))?;
                Ok(Spacers {
                    s10: pow(10)?,
                    s20: pow(20)?,
                    s30: pow(30)?,
                    s40: pow(40)?,
                    alpha_mult: mult,
                })
            }
        }
    }
}
