use crate::InstanceError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Man,
    Woman,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Man => "man",
            Side::Woman => "woman",
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Man => Side::Woman,
            Side::Woman => Side::Man,
        }
    }
}

/// One agent's list: entries in rank order, plus a copy sorted by partner for lookups.
#[derive(Clone, Debug, PartialEq, Eq)]
struct PrefList {
    ranked: Vec<(usize, u32)>,
    by_id: Vec<(usize, u32)>,
}

impl PrefList {
    fn from_groups(groups: &[Vec<usize>]) -> Self {
        let mut ranked = Vec::new();
        for (g, group) in groups.iter().enumerate() {
            for &x in group {
                ranked.push((x, g as u32 + 1));
            }
        }
        let mut by_id = ranked.clone();
        by_id.sort_unstable();
        PrefList { ranked, by_id }
    }

    fn rank(&self, x: usize) -> Option<u32> {
        self.by_id
            .binary_search_by_key(&x, |e| e.0)
            .ok()
            .map(|i| self.by_id[i].1)
    }
}

/// A stable marriage instance with possibly tied, possibly incomplete lists.
///
/// Immutable once built. Construction validates ids, duplicates, empty tie
/// groups and symmetry of acceptability. Ids in errors are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    men: Vec<PrefList>,
    women: Vec<PrefList>,
    has_ties: bool,
}

impl Instance {
    /// Builds an instance from tie groups: `men[m]` is the list of groups of
    /// women, best group first.
    pub fn from_groups(
        men: Vec<Vec<Vec<usize>>>,
        women: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self, InstanceError> {
        let nm = men.len();
        let nw = women.len();
        check_side(&men, Side::Man, nw)?;
        check_side(&women, Side::Woman, nm)?;
        let inst = Instance {
            has_ties: men.iter().chain(&women).flatten().any(|g| g.len() > 1),
            men: men.iter().map(|g| PrefList::from_groups(g)).collect(),
            women: women.iter().map(|g| PrefList::from_groups(g)).collect(),
        };
        for m in 0..nm {
            for &(w, _) in &inst.men[m].ranked {
                if inst.women[w].rank(m).is_none() {
                    return Err(InstanceError::Asymmetric {
                        man: m + 1,
                        woman: w + 1,
                    });
                }
            }
        }
        for w in 0..nw {
            for &(m, _) in &inst.women[w].ranked {
                if inst.men[m].rank(w).is_none() {
                    return Err(InstanceError::Asymmetric {
                        man: m + 1,
                        woman: w + 1,
                    });
                }
            }
        }
        Ok(inst)
    }

    /// Builds a strict instance: `men[m]` lists women best first.
    pub fn strict(men: Vec<Vec<usize>>, women: Vec<Vec<usize>>) -> Result<Self, InstanceError> {
        let wrap = |side: Vec<Vec<usize>>| -> Vec<Vec<Vec<usize>>> {
            side.into_iter()
                .map(|l| l.into_iter().map(|x| vec![x]).collect())
                .collect()
        };
        Instance::from_groups(wrap(men), wrap(women))
    }

    pub fn num_men(&self) -> usize {
        self.men.len()
    }

    pub fn num_women(&self) -> usize {
        self.women.len()
    }

    /// Number of agents.
    pub fn n(&self) -> usize {
        self.men.len() + self.women.len()
    }

    pub fn has_ties(&self) -> bool {
        self.has_ties
    }

    fn side(&self, side: Side) -> &[PrefList] {
        match side {
            Side::Man => &self.men,
            Side::Woman => &self.women,
        }
    }

    /// `(partner, rank)` entries of an agent's list in rank order.
    pub fn list(&self, side: Side, a: usize) -> &[(usize, u32)] {
        &self.side(side)[a].ranked
    }

    pub fn man_list(&self, m: usize) -> &[(usize, u32)] {
        &self.men[m].ranked
    }

    pub fn woman_list(&self, w: usize) -> &[(usize, u32)] {
        &self.women[w].ranked
    }

    /// The rank `a` gives to `x`, if acceptable.
    pub fn rank(&self, side: Side, a: usize, x: usize) -> Option<u32> {
        self.side(side)[a].rank(x)
    }

    /// `p_m(w)`.
    pub fn man_rank(&self, m: usize, w: usize) -> Option<u32> {
        self.men[m].rank(w)
    }

    /// `p_w(m)`.
    pub fn woman_rank(&self, w: usize, m: usize) -> Option<u32> {
        self.women[w].rank(m)
    }

    pub fn acceptable(&self, m: usize, w: usize) -> bool {
        self.men[m].rank(w).is_some()
    }

    /// Number of mutually acceptable pairs.
    pub fn num_pairs(&self) -> usize {
        self.men.iter().map(|l| l.ranked.len()).sum()
    }

    /// Whether `a` strictly prefers `x` to its current status `cur` (`None` is unmatched).
    /// An unacceptable `x` is never preferred.
    pub fn prefers(&self, side: Side, a: usize, x: usize, cur: Option<usize>) -> bool {
        let Some(rx) = self.rank(side, a, x) else {
            return false;
        };
        match cur {
            None => true,
            Some(c) => self.rank(side, a, c).is_none_or(|rc| rx < rc),
        }
    }

    /// Tie groups of an agent, best first.
    pub fn groups(&self, side: Side, a: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut last = 0;
        for &(x, r) in self.list(side, a) {
            if r != last {
                out.push(Vec::new());
                last = r;
            }
            out.last_mut().expect("group pushed").push(x);
        }
        out
    }

    /// The instance with the roles of men and women exchanged.
    pub fn transpose(&self) -> Instance {
        Instance {
            men: self.women.clone(),
            women: self.men.clone(),
            has_ties: self.has_ties,
        }
    }
}

fn check_side(lists: &[Vec<Vec<usize>>], side: Side, others: usize) -> Result<(), InstanceError> {
    let name = side.name();
    for (a, groups) in lists.iter().enumerate() {
        let mut seen = vec![false; others];
        for g in groups {
            if g.is_empty() {
                return Err(InstanceError::EmptyGroup {
                    side: name,
                    id: a + 1,
                });
            }
            for &x in g {
                if x >= others {
                    return Err(InstanceError::Syntax(format!(
                        "{} {} lists unknown {} {}",
                        name,
                        a + 1,
                        side.other().name(),
                        x + 1
                    )));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(InstanceError::Duplicate {
                        side: name,
                        id: a + 1,
                        other: x + 1,
                    });
                }
            }
        }
    }
    Ok(())
}
