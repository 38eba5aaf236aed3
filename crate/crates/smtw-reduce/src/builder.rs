use std::collections::HashMap;

use smtw_instance::Instance;

use crate::{ReduceError, Role, MAX_AGENTS};

pub(crate) const M_HAP: &str = "m_hap";
pub(crate) const W_HAP: &str = "w_hap";
pub(crate) const M_STAR: &str = "m_star";
pub(crate) const W_STAR: &str = "w_star";

/// Collects agents and tie-group lists, then renumbers so that happy
/// agents and the garbage collector come last.
#[derive(Default)]
pub(crate) struct Builder {
    men: Vec<Role>,
    women: Vec<Role>,
    mlists: Vec<Vec<Vec<usize>>>,
    wlists: Vec<Vec<Vec<usize>>>,
    mix: HashMap<Role, usize>,
    wix: HashMap<Role, usize>,
    /// Happy pairs in allocation order.
    happy: Vec<(usize, usize)>,
    /// Pairs already handed out as fillers.
    used: usize,
}

pub(crate) fn strict(v: Vec<usize>) -> Vec<Vec<usize>> {
    v.into_iter().map(|x| vec![x]).collect()
}

impl Builder {
    fn guard(&self) -> Result<(), ReduceError> {
        if self.men.len() + self.women.len() > MAX_AGENTS {
            return Err(ReduceError::Guard(format!("more than {MAX_AGENTS} agents")));
        }
        Ok(())
    }

    pub fn man(&mut self, family: &'static str, idx: &[usize]) -> usize {
        let r = Role::new(family, idx);
        let id = self.men.len();
        assert!(
            self.mix.insert(r.clone(), id).is_none(),
            "duplicate man {r}"
        );
        self.men.push(r);
        self.mlists.push(Vec::new());
        id
    }

    pub fn woman(&mut self, family: &'static str, idx: &[usize]) -> usize {
        let r = Role::new(family, idx);
        let id = self.women.len();
        assert!(
            self.wix.insert(r.clone(), id).is_none(),
            "duplicate woman {r}"
        );
        self.women.push(r);
        self.wlists.push(Vec::new());
        id
    }

    pub fn m(&self, family: &'static str, idx: &[usize]) -> usize {
        self.mix[&Role::new(family, idx)]
    }

    pub fn w(&self, family: &'static str, idx: &[usize]) -> usize {
        self.wix[&Role::new(family, idx)]
    }

    pub fn set_man(&mut self, m: usize, groups: Vec<Vec<usize>>) {
        self.mlists[m] = groups;
    }

    pub fn set_woman(&mut self, w: usize, groups: Vec<Vec<usize>>) {
        self.wlists[w] = groups;
    }

    /// Adds a happy pair whose lists hold only each other.
    pub fn happy_pair(&mut self) -> Result<(usize, usize), ReduceError> {
        let h = self.happy.len() + 1;
        let m = self.man(M_HAP, &[h]);
        let w = self.woman(W_HAP, &[h]);
        self.mlists[m] = vec![vec![w]];
        self.wlists[w] = vec![vec![m]];
        self.happy.push((m, w));
        self.guard()?;
        Ok((m, w))
    }

    pub fn happy_count(&self) -> usize {
        self.happy.len()
    }

    /// Tops the pool up to `n` pairs.
    pub fn pool(&mut self, n: usize) -> Result<(), ReduceError> {
        while self.happy.len() < n {
            self.happy_pair()?;
        }
        Ok(())
    }

    /// `count` happy women not used as fillers before, each with `b`
    /// appended to her list.
    pub fn fresh_women(&mut self, b: usize, count: usize) -> Result<Vec<usize>, ReduceError> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            if self.used == self.happy.len() {
                self.happy_pair()?;
            }
            let (_, w) = self.happy[self.used];
            self.used += 1;
            self.wlists[w].push(vec![b]);
            out.push(w);
        }
        Ok(out)
    }

    pub fn fresh_men(&mut self, b: usize, count: usize) -> Result<Vec<usize>, ReduceError> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            if self.used == self.happy.len() {
                self.happy_pair()?;
            }
            let (m, _) = self.happy[self.used];
            self.used += 1;
            self.mlists[m].push(vec![b]);
            out.push(m);
        }
        Ok(out)
    }

    /// The first `count` pooled happy women, shared between lists; `b` is
    /// appended to each of their lists.
    pub fn shared_women(&mut self, b: usize, count: usize) -> Vec<usize> {
        assert!(count <= self.happy.len(), "pool too small");
        (0..count)
            .map(|i| {
                let (_, w) = self.happy[i];
                self.wlists[w].push(vec![b]);
                w
            })
            .collect()
    }

    pub fn shared_men(&mut self, b: usize, count: usize) -> Vec<usize> {
        assert!(count <= self.happy.len(), "pool too small");
        (0..count)
            .map(|i| {
                let (m, _) = self.happy[i];
                self.mlists[m].push(vec![b]);
                m
            })
            .collect()
    }

    /// Adds `m*` and `w*`: `m*` ranks the first `alpha` happy women in
    /// index order and then `w*`.
    pub fn garbage_collector(&mut self, alpha: usize) {
        assert!(alpha <= self.happy.len(), "pool too small");
        let ms = self.man(M_STAR, &[]);
        let ws = self.woman(W_STAR, &[]);
        let mut list: Vec<usize> = self.happy[..alpha].iter().map(|&(_, w)| w).collect();
        for &w in &list {
            self.wlists[w].push(vec![ms]);
        }
        list.push(ws);
        self.mlists[ms] = strict(list);
        self.wlists[ws] = vec![vec![ms]];
    }

    /// Builds the instance; agents are ordered by family class, then creation.
    pub fn finish(self) -> Result<(Instance, Vec<Role>, Vec<Role>), ReduceError> {
        let class = |r: &Role| match r.family {
            M_HAP | W_HAP => 1,
            M_STAR | W_STAR => 2,
            _ => 0,
        };
        let order = |roles: &[Role]| {
            let mut ids: Vec<usize> = (0..roles.len()).collect();
            ids.sort_by_key(|&i| (class(&roles[i]), i));
            let mut new = vec![0; roles.len()];
            for (pos, &i) in ids.iter().enumerate() {
                new[i] = pos;
            }
            (ids, new)
        };
        let (morder, mnew) = order(&self.men);
        let (worder, wnew) = order(&self.women);
        let remap =
            |lists: &[Vec<Vec<usize>>], ids: &[usize], to: &[usize]| -> Vec<Vec<Vec<usize>>> {
                ids.iter()
                    .map(|&i| {
                        lists[i]
                            .iter()
                            .map(|g| g.iter().map(|&x| to[x]).collect())
                            .collect()
                    })
                    .collect()
            };
        let men = remap(&self.mlists, &morder, &wnew);
        let women = remap(&self.wlists, &worder, &mnew);
        let inst = Instance::from_groups(men, women)?;
        let mroles = morder.iter().map(|&i| self.men[i].clone()).collect();
        let wroles = worder.iter().map(|&i| self.women[i].clone()).collect();
        Ok((inst, mroles, wroles))
    }
}
