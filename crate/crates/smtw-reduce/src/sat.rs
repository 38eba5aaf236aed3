use std::collections::BTreeMap;

use crate::builder::{strict, Builder};
use crate::{BoundGraph, Predicted, ReduceError, ReductionKind, ReductionOutput, Source, Target};

/// Largest `|X^i|` whose assignments are enumerated.
const MAX_BLOCK_VARS: usize = 20;

/// One block `C^i` of `d` consecutive clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    /// `X^i`: the variables of the block, sorted, 0-based.
    pub vars: Vec<usize>,
    /// `F^i` as `(P^i_j, N^i_j)`: true and false variables of each satisfying assignment.
    pub assignments: Vec<(Vec<usize>, Vec<usize>)>,
}

/// A CNF formula split into blocks of `d` clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatInput {
    pub n: usize,
    /// After padding; literals are `±(var + 1)`.
    pub clauses: Vec<Vec<i32>>,
    /// Clause count before padding.
    pub original_clauses: usize,
    pub d: usize,
    /// Largest clause width.
    pub p: usize,
    /// `⌈r / n⌉` for the unpadded clause count `r`.
    pub s: usize,
    pub blocks: Vec<Block>,
}

impl SatInput {
    /// Pads with `(x_1 ∨ ¬x_1)` until `d` divides the clause count, then
    /// enumerates each block's satisfying assignments.
    pub fn new(n: usize, mut clauses: Vec<Vec<i32>>, d: usize) -> Result<Self, ReduceError> {
        if n == 0 {
            return Err(ReduceError::Invalid("no variables".into()));
        }
        if d == 0 {
            return Err(ReduceError::Invalid("block size must be positive".into()));
        }
        if clauses.is_empty() {
            return Err(ReduceError::Invalid("no clauses".into()));
        }
        for c in &clauses {
            if let Some(&l) = c.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > n) {
                return Err(ReduceError::Invalid(format!(
                    "literal {l} out of range for {n} variables"
                )));
            }
        }
        let original = clauses.len();
        while !clauses.len().is_multiple_of(d) {
            clauses.push(vec![1, -1]);
        }
        let p = clauses.iter().map(Vec::len).max().unwrap_or(0);
        let mut blocks = Vec::new();
        for chunk in clauses.chunks(d) {
            let mut vars: Vec<usize> = chunk
                .iter()
                .flatten()
                .map(|l| l.unsigned_abs() as usize - 1)
                .collect();
            vars.sort_unstable();
            vars.dedup();
            if vars.len() > MAX_BLOCK_VARS {
                return Err(ReduceError::Guard(format!(
                    "block with {} variables",
                    vars.len()
                )));
            }
            let mut assignments = Vec::new();
            for mask in 0u32..1 << vars.len() {
                let value = |v: usize| mask >> vars.binary_search(&v).expect("block var") & 1 == 1;
                let sat = chunk.iter().all(|c| {
                    c.iter()
                        .any(|&l| value(l.unsigned_abs() as usize - 1) == (l > 0))
                });
                if sat {
                    let (pos, neg): (Vec<usize>, Vec<usize>) =
                        vars.iter().partition(|&&v| value(v));
                    assignments.push((pos, neg));
                }
            }
            blocks.push(Block { vars, assignments });
        }
        Ok(SatInput {
            n,
            clauses,
            original_clauses: original,
            d,
            p,
            s: original.div_ceil(n),
            blocks,
        })
    }

    pub fn q(&self) -> usize {
        self.blocks.len()
    }

    /// `ã`.
    pub fn total_assignments(&self) -> usize {
        self.blocks.iter().map(|b| b.assignments.len()).sum()
    }
}

/// Reads DIMACS CNF (`c` comments, `p cnf n m`, zero-terminated clauses).
pub fn parse_dimacs(text: &str, d: usize) -> Result<SatInput, ReduceError> {
    let bad = |s: String| ReduceError::Invalid(s);
    let mut header = None;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let f: Vec<&str> = rest.split_whitespace().collect();
            let [fmt, n, m] = f[..] else {
                return Err(bad(format!("line {}: bad header", no + 1)));
            };
            let (Ok(n), Ok(m)) = (n.parse::<usize>(), m.parse::<usize>()) else {
                return Err(bad(format!("line {}: bad header", no + 1)));
            };
            if fmt != "cnf" {
                return Err(bad(format!("line {}: expected 'cnf'", no + 1)));
            }
            header = Some((n, m));
            continue;
        }
        if header.is_none() {
            return Err(bad(format!("line {}: clause before header", no + 1)));
        }
        for tok in line.split_whitespace() {
            let l: i32 = tok
                .parse()
                .map_err(|_| bad(format!("line {}: bad literal '{tok}'", no + 1)))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else {
                cur.push(l);
            }
        }
    }
    let (n, m) = header.ok_or_else(|| bad("missing 'p cnf' header".into()))?;
    if !cur.is_empty() {
        clauses.push(cur);
    }
    if clauses.len() != m {
        return Err(bad(format!(
            "header promises {m} clauses, found {}",
            clauses.len()
        )));
    }
    SatInput::new(n, clauses, d)
}

/// Spacer magnitudes: `g` stands for `n^20` and `t` for `n^10`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SatSpacers {
    /// `g = n^20`, `t = n^10`.
    Nominal,
    /// `g = s²`, `t = s`.
    Scaled(u64),
}

#[derive(Clone, Debug)]
pub enum SatOutcome {
    Instance(Box<ReductionOutput>),
    /// Block `block` (0-based) has no satisfying assignment, so neither has the formula.
    Unsatisfiable {
        block: usize,
    },
}

struct Magnitudes {
    g: i128,
    t: i128,
}

impl Magnitudes {
    fn of(inp: &SatInput, sp: SatSpacers) -> Result<Self, ReduceError> {
        let (g, t) = match sp {
            SatSpacers::Scaled(0) => {
                return Err(ReduceError::Invalid("spacer scale must be positive".into()))
            }
            SatSpacers::Scaled(s) => ((s as i128) * (s as i128), s as i128),
            SatSpacers::Nominal => {
                let n = inp.n as i128;
                let g = n
                    .checked_pow(20)
                    .ok_or_else(|| ReduceError::Guard("n^20 overflows".into()))?;
                (g, n.pow(10))
            }
        };
        Ok(Magnitudes { g, t })
    }

    /// `γ(i)` for 1-based `i`.
    fn gamma(&self, i: usize) -> Option<i128> {
        self.g.checked_mul(1i128.checked_shl(i as u32 - 1)?)
    }

    /// `λ(i)`, or `λ̂(i)` when `bsm`.
    fn lambda(&self, i: usize, q: usize, bsm: bool) -> Option<i128> {
        let e = if bsm { 2 * (i - 1) } else { 2 * q - i };
        self.g
            .checked_mul(1i128.checked_shl(e as u32).filter(|&x| x > 0)?)
    }
}

fn overflow() -> ReduceError {
    ReduceError::Guard("spacer arithmetic overflows".into())
}

pub fn reduce_sat(
    inp: &SatInput,
    bsm: bool,
    spacers: SatSpacers,
) -> Result<SatOutcome, ReduceError> {
    if let Some(block) = inp.blocks.iter().position(|b| b.assignments.is_empty()) {
        return Ok(SatOutcome::Unsatisfiable { block });
    }
    let mag = Magnitudes::of(inp, spacers)?;
    let (n, q) = (inp.n, inp.q());
    let a_tot = inp.total_assignments() as i128;
    let mut alpha = (2 * q as i128 - a_tot)
        .checked_mul(mag.t)
        .ok_or_else(overflow)?;
    let mut need = mag.t;
    for (bi, blk) in inp.blocks.iter().enumerate() {
        let i = bi + 1;
        let (gam, lam) = (
            mag.gamma(i).ok_or_else(overflow)?,
            mag.lambda(i, q, bsm).ok_or_else(overflow)?,
        );
        let a = blk.assignments.len() as i128;
        alpha = ((a - 1).checked_mul(lam).and_then(|x| x.checked_sub(gam)))
            .and_then(|x| alpha.checked_add(x))
            .ok_or_else(overflow)?;
        need = need.max(gam).max(lam);
    }
    if alpha < 0 {
        return Err(ReduceError::NegativeAlpha(alpha));
    }
    let pool = alpha.max(need);
    let agents = 4 * n as i128 + 8 * a_tot + 2 * pool + 2;
    if agents > crate::MAX_AGENTS as i128 {
        return Err(ReduceError::Guard(format!(
            "{agents} agents exceed {}",
            crate::MAX_AGENTS
        )));
    }

    let mut b = Builder::default();
    for t in 1..=n {
        b.man("m_var", &[t]);
        b.man("m_var_hat", &[t]);
        b.woman("w_var", &[t]);
        b.woman("w_var_hat", &[t]);
    }
    let cells: Vec<(usize, usize)> = inp
        .blocks
        .iter()
        .enumerate()
        .flat_map(|(i, blk)| (1..=blk.assignments.len()).map(move |j| (i + 1, j)))
        .collect();
    for &(i, j) in &cells {
        for fam in ["m_asg", "m_asg_hat", "m_bar", "m_bar_hat"] {
            b.man(fam, &[i, j]);
        }
        for fam in ["w_asg", "w_asg_hat", "w_bar", "w_bar_hat"] {
            b.woman(fam, &[i, j]);
        }
    }
    b.pool(pool as usize)?;
    let asg = |i: usize, j: usize| &inp.blocks[i - 1].assignments[j - 1];
    let in_pos = |t: usize| {
        cells
            .iter()
            .copied()
            .filter(move |&(i, j)| asg(i, j).0.contains(&(t - 1)))
    };
    let in_neg = |t: usize| {
        cells
            .iter()
            .copied()
            .filter(move |&(i, j)| asg(i, j).1.contains(&(t - 1)))
    };

    for t in 1..=n {
        let (m, mh, w, wh) = (
            b.m("m_var", &[t]),
            b.m("m_var_hat", &[t]),
            b.w("w_var", &[t]),
            b.w("w_var_hat", &[t]),
        );
        let mut l = vec![w];
        l.extend(in_neg(t).map(|(i, j)| b.w("w_bar", &[i, j])));
        l.push(wh);
        b.set_man(m, strict(l));
        b.set_man(mh, strict(vec![wh, w]));
        let mut l = vec![mh];
        l.extend(in_pos(t).map(|(i, j)| b.m("m_asg", &[i, j])));
        l.push(m);
        b.set_woman(w, strict(l));
        b.set_woman(wh, strict(vec![m, mh]));
    }
    for &(i, j) in &cells {
        let others = || {
            cells
                .iter()
                .copied()
                .filter(move |&(x, y)| x == i && y != j)
        };
        let (pos, neg) = asg(i, j);
        let gam = mag.gamma(i).ok_or_else(overflow)? as usize;
        let lam = mag.lambda(i, q, bsm).ok_or_else(overflow)? as usize;
        let tau = mag.t as usize;

        let (m, mh) = (b.m("m_asg", &[i, j]), b.m("m_asg_hat", &[i, j]));
        let (w, wh) = (b.w("w_asg", &[i, j]), b.w("w_asg_hat", &[i, j]));
        let mut l = vec![w];
        l.extend(pos.iter().map(|&v| b.w("w_var", &[v + 1])));
        l.extend(others().map(|(x, y)| b.w("w_bar", &[x, y])));
        l.extend(b.shared_women(m, gam));
        l.push(wh);
        b.set_man(m, strict(l));
        b.set_man(mh, strict(vec![wh, w]));
        let mut l = vec![mh];
        l.extend(b.shared_men(w, lam));
        l.push(m);
        b.set_woman(w, strict(l));
        b.set_woman(wh, strict(vec![m, mh]));

        let (m, mh) = (b.m("m_bar", &[i, j]), b.m("m_bar_hat", &[i, j]));
        let (w, wh) = (b.w("w_bar", &[i, j]), b.w("w_bar_hat", &[i, j]));
        let mut l = vec![w];
        l.extend(b.shared_women(m, tau));
        l.push(wh);
        b.set_man(m, strict(l));
        b.set_man(mh, strict(vec![wh, w]));
        let mut l = vec![mh];
        l.extend(neg.iter().map(|&v| b.m("m_var", &[v + 1])));
        l.extend(others().map(|(x, y)| b.m("m_asg", &[x, y])));
        l.extend(b.shared_men(w, tau));
        l.push(m);
        b.set_woman(w, strict(l));
        b.set_woman(wh, strict(vec![m, mh]));
    }
    b.garbage_collector(alpha as usize);
    let (instance, men, women) = b.finish()?;

    let pd = inp.p * inp.d;
    let four_pd = 1i128
        .checked_shl(2 * pd as u32)
        .filter(|&x| x > 0)
        .ok_or_else(overflow)?;
    let nn = n as i128;
    let threshold = (100 * inp.s as i128)
        .checked_mul(four_pd)
        .and_then(|x| x.checked_mul(nn * nn))
        .ok_or_else(overflow)?;
    let mut extra = BTreeMap::new();
    extra.insert(if bsm { "alpha_hat" } else { "alpha" }.to_string(), alpha);
    extra.insert("pool".into(), pool);
    extra.insert("g".into(), mag.g);
    extra.insert("tau".into(), mag.t);
    extra.insert("q".into(), q as i128);
    extra.insert("p".into(), inp.p as i128);
    extra.insert("d".into(), inp.d as i128);
    extra.insert("s".into(), inp.s as i128);
    extra.insert("a_total".into(), a_tot);
    extra.insert(
        "spacer_scale".into(),
        match spacers {
            SatSpacers::Nominal => 0,
            SatSpacers::Scaled(s) => s as i128,
        },
    );
    let target = if bsm {
        let mut eta = threshold + alpha + q as i128 * mag.t;
        for (bi, blk) in inp.blocks.iter().enumerate() {
            eta += (blk.assignments.len() as i128 - 1)
                * mag.lambda(bi + 1, q, true).ok_or_else(overflow)?;
        }
        extra.insert("eta".into(), eta);
        Target::Bal(eta)
    } else {
        Target::Delta(threshold)
    };
    let bound = 1usize.checked_shl(pd as u32).ok_or_else(overflow)?;
    Ok(SatOutcome::Instance(Box::new(ReductionOutput {
        kind: if bsm {
            ReductionKind::SatBsm
        } else {
            ReductionKind::SatSesm
        },
        relaxed: matches!(spacers, SatSpacers::Scaled(_)),
        instance,
        men,
        women,
        predicted: Predicted {
            agents: agents as usize,
            happy_pairs: pool as usize,
            treewidth_bound: n + 2 * bound,
            bound_graph: BoundGraph::Rotation,
            target,
            extra,
        },
        source: Source::Sat(inp.clone()),
    })))
}

pub fn reduce_sat_to_sesm(inp: &SatInput, spacer_scale: u64) -> Result<SatOutcome, ReduceError> {
    reduce_sat(inp, false, SatSpacers::Scaled(spacer_scale))
}

pub fn reduce_sat_to_bsm(inp: &SatInput, spacer_scale: u64) -> Result<SatOutcome, ReduceError> {
    reduce_sat(inp, true, SatSpacers::Scaled(spacer_scale))
}
