//! Gale-Shapley for incomplete lists.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use smtw_instance::{Instance, Matching, Side, SolveError};

/// The man-optimal stable matching (men propose).
///
/// Men start proposing in id order; a rejected man goes to the back of a FIFO queue.
pub fn man_optimal(inst: &Instance) -> Result<Matching, SolveError> {
    if inst.has_ties() {
        return Err(SolveError::Ties);
    }
    Ok(propose(inst))
}

fn propose(inst: &Instance) -> Matching {
    let nm = inst.num_men();
    let mut next = vec![0usize; nm];
    let mut holds: Vec<Option<usize>> = vec![None; inst.num_women()];
    let mut queue: VecDeque<usize> = (0..nm).collect();
    while let Some(m) = queue.pop_front() {
        let list = inst.man_list(m);
        while next[m] < list.len() {
            let w = list[next[m]].0;
            next[m] += 1;
            match holds[w] {
                None => {
                    holds[w] = Some(m);
                    break;
                }
                Some(cur) if inst.prefers(Side::Woman, w, m, Some(cur)) => {
                    holds[w] = Some(m);
                    queue.push_back(cur);
                    break;
                }
                Some(_) => {}
            }
        }
    }
    let mut man_to = vec![None; nm];
    for (w, m) in holds.iter().enumerate() {
        if let Some(m) = *m {
            man_to[m] = Some(w);
        }
    }
    Matching::from_man_partners(inst.num_women(), man_to)
}

/// The woman-optimal stable matching (women propose).
pub fn woman_optimal(inst: &Instance) -> Result<Matching, SolveError> {
    Ok(man_optimal(&inst.transpose())?.transpose())
}

/// Breaks every tie group by a seeded shuffle and runs men-proposing
/// Gale-Shapley. The result is weakly stable for the tied instance.
pub fn stable_with_tiebreak(inst: &Instance, seed: u64) -> Matching {
    if !inst.has_ties() {
        return propose(inst);
    }
    propose(&break_ties(inst, seed))
}

/// A strict instance obtained by shuffling inside each tie group.
pub fn break_ties(inst: &Instance, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut side = |s: Side, count: usize| -> Vec<Vec<usize>> {
        (0..count)
            .map(|a| {
                let mut flat = Vec::new();
                for mut g in inst.groups(s, a) {
                    g.shuffle(&mut rng);
                    flat.extend(g);
                }
                flat
            })
            .collect()
    };
    let men = side(Side::Man, inst.num_men());
    let women = side(Side::Woman, inst.num_women());
    Instance::strict(men, women).expect("tie breaking keeps lists symmetric")
}

/// Both extreme stable matchings of a strict instance and the agents matched in them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeExtremes {
    pub man_optimal: Matching,
    pub woman_optimal: Matching,
    /// Men matched in every stable matching, ascending.
    pub matched_men: Vec<usize>,
    /// Women matched in every stable matching, ascending.
    pub matched_women: Vec<usize>,
}

pub fn lattice_extremes(inst: &Instance) -> Result<LatticeExtremes, SolveError> {
    let mo = man_optimal(inst)?;
    let wo = woman_optimal(inst)?;
    let matched_men = (0..inst.num_men())
        .filter(|&m| mo.man_partner(m).is_some())
        .collect();
    let matched_women = (0..inst.num_women())
        .filter(|&w| mo.woman_partner(w).is_some())
        .collect();
    Ok(LatticeExtremes {
        man_optimal: mo,
        woman_optimal: wo,
        matched_men,
        matched_women,
    })
}
