//! Reductions from multicolored clique and sparse CNF-SAT to the stable
//! marriage problems, built as concrete instances.
//!
//! Every agent carries a [`Role`] naming its gadget family and indices
//! (1-based, as in the constructions). Spacer lengths, the runs of happy
//! agents padding preference lists, are huge at their nominal values, so
//! each generator has a relaxed mode where small configurable counts take
//! their place. List *orders* are unaffected, so the structural statements
//! (which matchings are stable, what the rotations are, treewidth) remain
//! checkable by [`verify_reduction`]; the measure thresholds are reported
//! but not meaningful at relaxed scale.

mod builder;
mod clique;
mod clique_sm;
mod clique_smt;
mod sat;
mod sidecar;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use smtw_instance::{Instance, InstanceError, Matching, Problem, SolveError};
use thiserror::Error;

pub use clique::{parse_clique, Clique, CliqueInput, CliqueMode, Spacers};
pub use clique_sm::{mu_c_sm, reduce_clique_to_bsm, reduce_clique_to_sesm, reduce_clique_to_sm};
pub use clique_smt::{mu_c_max, mu_c_min, reduce_clique_to_max_smt, reduce_clique_to_min_smt};
pub use sat::{
    parse_dimacs, reduce_sat, reduce_sat_to_bsm, reduce_sat_to_sesm, Block, SatInput, SatOutcome,
    SatSpacers,
};
pub use sidecar::write_sidecar;
pub use verify::{
    check_leader_form, excellent_matchings, h_pi_arcs, legal_sets, rotation_classes,
    verify_reduction, Check, CheckStatus, RotationClass, VerificationReport,
};

/// Agent cap for generated instances.
pub const MAX_AGENTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("happy-pair count {0} is negative; spacers too small")]
    NegativeAlpha(i128),
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Which gadget an agent belongs to, with its indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Role {
    pub family: &'static str,
    pub idx: Vec<usize>,
}

impl Role {
    pub fn new(family: &'static str, idx: &[usize]) -> Self {
        Role {
            family,
            idx: idx.to_vec(),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.family)?;
        for i in &self.idx {
            write!(f, " {i}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionKind {
    CliqueSesm,
    CliqueBsm,
    CliqueMaxSmt,
    CliqueMinSmt,
    SatSesm,
    SatBsm,
}

impl ReductionKind {
    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::CliqueSesm => "clique-sesm",
            ReductionKind::CliqueBsm => "clique-bsm",
            ReductionKind::CliqueMaxSmt => "clique-max-smt",
            ReductionKind::CliqueMinSmt => "clique-min-smt",
            ReductionKind::SatSesm => "sat-sesm",
            ReductionKind::SatBsm => "sat-bsm",
        }
    }

    pub fn problem(self) -> Problem {
        match self {
            ReductionKind::CliqueSesm | ReductionKind::SatSesm => Problem::Sesm,
            ReductionKind::CliqueBsm | ReductionKind::SatBsm => Problem::Bsm,
            ReductionKind::CliqueMaxSmt => Problem::MaxSmt,
            ReductionKind::CliqueMinSmt => Problem::MinSmt,
        }
    }

    pub fn all() -> [ReductionKind; 6] {
        use ReductionKind::*;
        [
            CliqueSesm,
            CliqueBsm,
            CliqueMaxSmt,
            CliqueMinSmt,
            SatSesm,
            SatBsm,
        ]
    }
}

impl std::str::FromStr for ReductionKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ReductionKind::all()
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown reduction '{s}'"))
    }
}

/// Which graph the treewidth bound speaks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundGraph {
    Primal,
    Rotation,
}

/// What a yes-instance of the source problem guarantees.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// `Δ` at most this.
    Delta(i128),
    /// `Bal` at most this.
    Bal(i128),
    /// A weakly stable matching of exactly this size exists (and this is the largest).
    MaxSize(usize),
    /// A weakly stable matching of exactly this size exists (and this is the smallest).
    MinSize(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicted {
    /// From the explicit gadget set sizes.
    pub agents: usize,
    pub happy_pairs: usize,
    pub treewidth_bound: usize,
    pub bound_graph: BoundGraph,
    pub target: Target,
    /// Named intermediate quantities (`alpha`, `eta`, spacer values, ...).
    pub extra: BTreeMap<String, i128>,
}

/// The input a reduction was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Clique(CliqueInput),
    Sat(SatInput),
}

#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub kind: ReductionKind,
    /// Whether spacers were replaced by small counts.
    pub relaxed: bool,
    pub instance: Instance,
    pub men: Vec<Role>,
    pub women: Vec<Role>,
    pub predicted: Predicted,
    pub source: Source,
}

impl ReductionOutput {
    pub fn man(&self, family: &'static str, idx: &[usize]) -> Option<usize> {
        let r = Role::new(family, idx);
        self.men.iter().position(|x| *x == r)
    }

    pub fn woman(&self, family: &'static str, idx: &[usize]) -> Option<usize> {
        let r = Role::new(family, idx);
        self.women.iter().position(|x| *x == r)
    }

    /// Builds a matching from role pairs; panics on unknown roles.
    pub fn matching_of(&self, pairs: &[(Role, Role)]) -> Result<Matching, InstanceError> {
        let men: BTreeMap<&Role, usize> =
            self.men.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let women: BTreeMap<&Role, usize> =
            self.women.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let ids: Vec<(usize, usize)> = pairs
            .iter()
            .map(|(m, w)| {
                let mi = *men.get(m).unwrap_or_else(|| panic!("no man {m}"));
                let wi = *women.get(w).unwrap_or_else(|| panic!("no woman {w}"));
                (mi, wi)
            })
            .collect();
        let mu = Matching::from_pairs(self.instance.num_men(), self.instance.num_women(), &ids)?;
        mu.check(&self.instance)?;
        Ok(mu)
    }
}
