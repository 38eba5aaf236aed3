use smtw_td::Graph;

use crate::{Instance, InstanceError, Side};

/// A partial injective assignment of men to women.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    man_to: Vec<Option<usize>>,
    woman_to: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(num_men: usize, num_women: usize) -> Self {
        Matching {
            man_to: vec![None; num_men],
            woman_to: vec![None; num_women],
        }
    }

    /// Builds a matching from pairs, rejecting out-of-range ids and repeated agents.
    pub fn from_pairs(
        num_men: usize,
        num_women: usize,
        pairs: &[(usize, usize)],
    ) -> Result<Self, InstanceError> {
        let mut mu = Matching::empty(num_men, num_women);
        for &(m, w) in pairs {
            if m >= num_men || w >= num_women {
                return Err(InstanceError::MatchingShape {
                    men: num_men,
                    women: num_women,
                });
            }
            if mu.man_to[m].is_some() || mu.woman_to[w].is_some() {
                return Err(InstanceError::NotInjective {
                    man: m + 1,
                    woman: w + 1,
                });
            }
            mu.man_to[m] = Some(w);
            mu.woman_to[w] = Some(m);
        }
        Ok(mu)
    }

    /// Builds a matching from each man's partner.
    ///
    /// # Panics
    /// If two men share a woman or a woman is out of range.
    pub fn from_man_partners(num_women: usize, man_to: Vec<Option<usize>>) -> Self {
        let mut woman_to = vec![None; num_women];
        for (m, w) in man_to.iter().enumerate() {
            if let Some(w) = *w {
                assert!(woman_to[w].is_none(), "woman {w} matched twice");
                woman_to[w] = Some(m);
            }
        }
        Matching { man_to, woman_to }
    }

    pub fn num_men(&self) -> usize {
        self.man_to.len()
    }

    pub fn num_women(&self) -> usize {
        self.woman_to.len()
    }

    pub fn man_partner(&self, m: usize) -> Option<usize> {
        self.man_to[m]
    }

    pub fn woman_partner(&self, w: usize) -> Option<usize> {
        self.woman_to[w]
    }

    pub fn partner(&self, side: Side, a: usize) -> Option<usize> {
        match side {
            Side::Man => self.man_to[a],
            Side::Woman => self.woman_to[a],
        }
    }

    pub fn man_partners(&self) -> &[Option<usize>] {
        &self.man_to
    }

    /// Matches `m` with `w`, first unmatching both.
    pub fn set(&mut self, m: usize, w: usize) {
        self.unmatch_man(m);
        if let Some(old) = self.woman_to[w].take() {
            self.man_to[old] = None;
        }
        self.man_to[m] = Some(w);
        self.woman_to[w] = Some(m);
    }

    pub fn unmatch_man(&mut self, m: usize) {
        if let Some(w) = self.man_to[m].take() {
            self.woman_to[w] = None;
        }
    }

    /// Pairs `(m, w)` ordered by man.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.man_to
            .iter()
            .enumerate()
            .filter_map(|(m, w)| w.map(|w| (m, w)))
            .collect()
    }

    pub fn size(&self) -> usize {
        self.man_to.iter().flatten().count()
    }

    /// The same matching with men and women exchanged, to go with [`Instance::transpose`].
    pub fn transpose(&self) -> Matching {
        Matching {
            man_to: self.woman_to.clone(),
            woman_to: self.man_to.clone(),
        }
    }

    /// Checks shape and that every pair is mutually acceptable.
    pub fn check(&self, inst: &Instance) -> Result<(), InstanceError> {
        if self.num_men() != inst.num_men() || self.num_women() != inst.num_women() {
            return Err(InstanceError::MatchingShape {
                men: inst.num_men(),
                women: inst.num_women(),
            });
        }
        for (m, w) in self.pairs() {
            if self.woman_to[w] != Some(m) {
                return Err(InstanceError::NotInjective {
                    man: m + 1,
                    woman: w + 1,
                });
            }
            if !inst.acceptable(m, w) {
                return Err(InstanceError::Unacceptable {
                    man: m + 1,
                    woman: w + 1,
                });
            }
        }
        Ok(())
    }
}

/// Objective measures of one matching.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Scores {
    pub sat_m: u64,
    pub sat_w: u64,
    /// `sat_m - sat_w`.
    pub delta: i64,
    /// `max(sat_m, sat_w)`.
    pub bal: u64,
    pub size: usize,
}

/// The first blocking pair, scanning men in order and each man's list in rank
/// order, or `None` when `mu` is weakly stable. Both agents of a blocking pair
/// strictly prefer each other to their current status; unmatched is worse
/// than any acceptable partner.
pub fn find_blocking_pair(
    inst: &Instance,
    mu: &Matching,
) -> Result<Option<(usize, usize)>, InstanceError> {
    mu.check(inst)?;
    for m in 0..inst.num_men() {
        let cur = mu.man_partner(m);
        for &(w, _) in inst.man_list(m) {
            if inst.prefers(Side::Man, m, w, cur)
                && inst.prefers(Side::Woman, w, m, mu.woman_partner(w))
            {
                return Ok(Some((m, w)));
            }
        }
    }
    Ok(None)
}

/// Whether `mu` is a valid, weakly stable matching of `inst`.
pub fn is_stable(inst: &Instance, mu: &Matching) -> bool {
    matches!(find_blocking_pair(inst, mu), Ok(None))
}

/// Rank sums over matched pairs; unmatched agents add nothing.
pub fn score(inst: &Instance, mu: &Matching) -> Result<Scores, InstanceError> {
    mu.check(inst)?;
    let mut s = Scores::default();
    for (m, w) in mu.pairs() {
        s.sat_m += u64::from(inst.man_rank(m, w).expect("checked"));
        s.sat_w += u64::from(inst.woman_rank(w, m).expect("checked"));
        s.size += 1;
    }
    s.delta = s.sat_m as i64 - s.sat_w as i64;
    s.bal = s.sat_m.max(s.sat_w);
    Ok(s)
}

/// One vertex per agent (men `0..num_men`, then women), an edge per acceptable pair.
pub fn primal_graph(inst: &Instance) -> Graph {
    let nm = inst.num_men();
    let mut g = Graph::new(inst.n());
    for m in 0..nm {
        for &(w, _) in inst.man_list(m) {
            g.add_edge(m, nm + w);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;

    #[test]
    fn unmatched_mutual_pair_blocks() {
        let inst = golden::one_by_one();
        let mu = Matching::empty(1, 1);
        assert_eq!(find_blocking_pair(&inst, &mu), Ok(Some((0, 0))));
    }

    #[test]
    fn i2_blocking_pairs() {
        let inst = golden::i2();
        let mu = Matching::from_pairs(2, 2, &[(0, 0), (1, 1)]).unwrap();
        assert_eq!(find_blocking_pair(&inst, &mu), Ok(None));
        // m1 prefers w1 to w2 and w1 is unmatched, so (m1, w1) comes first
        let mu = Matching::from_pairs(2, 2, &[(0, 1)]).unwrap();
        assert_eq!(find_blocking_pair(&inst, &mu), Ok(Some((0, 0))));
    }

    #[test]
    fn malformed_matchings_rejected() {
        let inst = golden::i_t();
        let mu = Matching::from_pairs(2, 2, &[(0, 1)]).unwrap();
        assert_eq!(
            find_blocking_pair(&inst, &mu),
            Err(InstanceError::Unacceptable { man: 1, woman: 2 })
        );
        assert!(Matching::from_pairs(2, 2, &[(0, 1), (1, 1)]).is_err());
        assert!(score(&inst, &Matching::empty(3, 2)).is_err());
    }

    #[test]
    fn scores_of_golden_matchings() {
        let inst = golden::i2();
        let mu = Matching::from_pairs(2, 2, &[(0, 0), (1, 1)]).unwrap();
        assert_eq!(
            score(&inst, &mu).unwrap(),
            Scores {
                sat_m: 2,
                sat_w: 4,
                delta: -2,
                bal: 4,
                size: 2
            }
        );
        assert_eq!(
            score(&inst, &Matching::empty(2, 2)).unwrap(),
            Scores::default()
        );
        let inst = golden::i3();
        let mid = Matching::from_pairs(3, 3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let s = score(&inst, &mid).unwrap();
        assert_eq!((s.sat_m, s.sat_w, s.delta), (6, 6, 0));
    }

    #[test]
    fn primal_graphs() {
        let g = primal_graph(&golden::i2());
        assert_eq!((g.n(), g.edge_count()), (4, 4));
        let g = primal_graph(&golden::i3());
        assert_eq!(g.edge_count(), 9);
        let empty = Instance::strict(vec![vec![]; 2], vec![vec![]; 3]).unwrap();
        let g = primal_graph(&empty);
        assert_eq!((g.n(), g.edge_count()), (5, 0));
    }

    #[test]
    fn set_and_transpose() {
        let mut mu = Matching::empty(2, 2);
        mu.set(0, 0);
        mu.set(1, 0);
        assert_eq!(mu.pairs(), vec![(1, 0)]);
        assert_eq!(mu.transpose().pairs(), vec![(0, 1)]);
    }
}
