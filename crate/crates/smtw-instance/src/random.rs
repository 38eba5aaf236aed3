//! Seeded random instances for property tests and batch runs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::Instance;

fn acceptable_pairs<R: Rng>(rng: &mut R, nm: usize, nw: usize, p: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for m in 0..nm {
        for w in 0..nw {
            if rng.gen_bool(p) {
                out.push((m, w));
            }
        }
    }
    out
}

fn group<R: Rng>(rng: &mut R, list: Vec<usize>, p_tie: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for x in list {
        match groups.last_mut() {
            Some(g) if rng.gen_bool(p_tie) => g.push(x),
            _ => groups.push(vec![x]),
        }
    }
    groups
}

/// An instance on the given acceptable pairs with shuffled lists. Each
/// entry joins the previous tie group with probability `p_tie`.
pub fn with_pairs<R: Rng>(
    rng: &mut R,
    nm: usize,
    nw: usize,
    pairs: &[(usize, usize)],
    p_tie: f64,
) -> Instance {
    let mut men = vec![Vec::new(); nm];
    let mut women = vec![Vec::new(); nw];
    for &(m, w) in pairs {
        men[m].push(w);
        women[w].push(m);
    }
    let mut side = |lists: Vec<Vec<usize>>| -> Vec<Vec<Vec<usize>>> {
        lists
            .into_iter()
            .map(|mut l| {
                l.shuffle(rng);
                group(rng, l, p_tie)
            })
            .collect()
    };
    let men = side(men);
    let women = side(women);
    Instance::from_groups(men, women).expect("generated lists are symmetric")
}

/// Strict lists; each pair is acceptable with probability `p_accept`.
pub fn random_strict<R: Rng>(rng: &mut R, nm: usize, nw: usize, p_accept: f64) -> Instance {
    let pairs = acceptable_pairs(rng, nm, nw, p_accept);
    with_pairs(rng, nm, nw, &pairs, 0.0)
}

/// Possibly tied lists; each pair is acceptable with probability `p_accept`.
pub fn random_tied<R: Rng>(
    rng: &mut R,
    nm: usize,
    nw: usize,
    p_accept: f64,
    p_tie: f64,
) -> Instance {
    let pairs = acceptable_pairs(rng, nm, nw, p_accept);
    with_pairs(rng, nm, nw, &pairs, p_tie)
}

/// Possibly tied lists over exactly `min(count, nm*nw)` acceptable pairs chosen uniformly.
pub fn random_tied_with_count<R: Rng>(
    rng: &mut R,
    nm: usize,
    nw: usize,
    count: usize,
    p_tie: f64,
) -> Instance {
    let mut all: Vec<(usize, usize)> = (0..nm).flat_map(|m| (0..nw).map(move |w| (m, w))).collect();
    all.shuffle(rng);
    all.truncate(count);
    all.sort_unstable();
    with_pairs(rng, nm, nw, &all, p_tie)
}
