use std::collections::{BTreeMap, BTreeSet};

/// A target inside a cell: a first coordinate and, where the cell keeps one, a second.
pub(crate) type Target = (i64, i64);

/// What a table row stores, with the four table operations.
pub(crate) trait Cell: Clone {
    fn leaf() -> Self;
    /// Adds an agent's contribution.
    fn shift(&self, c: Target) -> Self;
    /// Merges two rows that collapse to the same key at a forget node.
    fn absorb(&mut self, other: &Self);
    /// Combines the two children of a join; `corr` is the bag's contribution, counted twice otherwise.
    fn join(a: &Self, b: &Self, corr: Target) -> Self;
    fn is_empty(&self) -> bool;
    fn len(&self) -> usize;
    fn contains(&self, t: Target) -> bool;
    fn targets(&self) -> Vec<Target>;
}

/// Reachable first coordinates.
#[derive(Clone, Debug, Default)]
pub(crate) struct SetCell(pub BTreeSet<i64>);

impl Cell for SetCell {
    fn leaf() -> Self {
        SetCell(BTreeSet::from([0]))
    }
    fn shift(&self, c: Target) -> Self {
        SetCell(self.0.iter().map(|t| t + c.0).collect())
    }
    fn absorb(&mut self, other: &Self) {
        self.0.extend(other.0.iter().copied());
    }
    fn join(a: &Self, b: &Self, corr: Target) -> Self {
        let mut out = BTreeSet::new();
        for x in &a.0 {
            for y in &b.0 {
                out.insert(x + y - corr.0);
            }
        }
        SetCell(out)
    }
    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    fn len(&self) -> usize {
        self.0.len()
    }
    fn contains(&self, t: Target) -> bool {
        self.0.contains(&t.0)
    }
    fn targets(&self) -> Vec<Target> {
        self.0.iter().map(|&t| (t, 0)).collect()
    }
}

/// For each reachable first coordinate, the smallest second coordinate.
#[derive(Clone, Debug, Default)]
pub(crate) struct MinCell(pub BTreeMap<i64, i64>);

impl MinCell {
    fn offer(&mut self, t: i64, i: i64) {
        self.0
            .entry(t)
            .and_modify(|v| *v = (*v).min(i))
            .or_insert(i);
    }
}

impl Cell for MinCell {
    fn leaf() -> Self {
        MinCell(BTreeMap::from([(0, 0)]))
    }
    fn shift(&self, c: Target) -> Self {
        MinCell(self.0.iter().map(|(&t, &i)| (t + c.0, i + c.1)).collect())
    }
    fn absorb(&mut self, other: &Self) {
        for (&t, &i) in &other.0 {
            self.offer(t, i);
        }
    }
    fn join(a: &Self, b: &Self, corr: Target) -> Self {
        let mut out = MinCell::default();
        for (&t1, &i1) in &a.0 {
            for (&t2, &i2) in &b.0 {
                out.offer(t1 + t2 - corr.0, i1 + i2 - corr.1);
            }
        }
        out
    }
    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    fn len(&self) -> usize {
        self.0.len()
    }
    fn contains(&self, t: Target) -> bool {
        self.0.get(&t.0) == Some(&t.1)
    }
    fn targets(&self) -> Vec<Target> {
        self.0.iter().map(|(&t, &i)| (t, i)).collect()
    }
}

/// The best first coordinate only: largest when `MAX`, else smallest.
#[derive(Clone, Debug, Default)]
pub(crate) struct OptCell<const MAX: bool>(pub Option<i64>);

impl<const MAX: bool> Cell for OptCell<MAX> {
    fn leaf() -> Self {
        OptCell(Some(0))
    }
    fn shift(&self, c: Target) -> Self {
        OptCell(self.0.map(|v| v + c.0))
    }
    fn absorb(&mut self, other: &Self) {
        self.0 = match (self.0, other.0) {
            (Some(a), Some(b)) => Some(if MAX { a.max(b) } else { a.min(b) }),
            (a, b) => a.or(b),
        };
    }
    fn join(a: &Self, b: &Self, corr: Target) -> Self {
        OptCell(a.0.zip(b.0).map(|(x, y)| x + y - corr.0))
    }
    fn is_empty(&self) -> bool {
        self.0.is_none()
    }
    fn len(&self) -> usize {
        usize::from(self.0.is_some())
    }
    fn contains(&self, t: Target) -> bool {
        self.0 == Some(t.0)
    }
    fn targets(&self) -> Vec<Target> {
        self.0.map(|v| (v, 0)).into_iter().collect()
    }
}
