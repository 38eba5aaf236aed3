//! Dynamic programs over a nice tree decomposition of the primal graph.
//!
//! Primal-graph vertices are agents: men `0..num_men`, then women. A table
//! row is keyed by the status of every bag agent (a partner vertex or
//! unmatched) and stores a cell whose shape depends on the objective:
//!
//! - SESM: the reachable values of `sum over men of p_m(g(m)) - p_{g(m)}(m)`;
//! - BSM: for each reachable men-side sum, the smallest women-side sum;
//! - max-/min-SMT: the largest or smallest number of matched men.
//!
//! Contributions are added when an agent is introduced, and join nodes
//! subtract the bag's contribution, which both children counted. A row
//! survives only if no two bag agents are inconsistent, share a partner or
//! block each other. Every acceptable pair meets at the introduce node of
//! whichever of the two comes later, so every pair gets checked.

mod cell;
mod dp;

pub use dp::{xp_solve, xp_solve_bsm, xp_solve_max_smt, xp_solve_min_smt, xp_solve_sesm};
