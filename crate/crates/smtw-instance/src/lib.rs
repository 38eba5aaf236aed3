//! Instances of stable marriage with ties and incomplete lists, matchings,
//! weak stability and the objective measures.
//!
//! Agents are dense 0-based indices: men `0..num_men`, women `0..num_women`.
//! Ranks are positive, 1 is best and equal ranks are ties.

mod error;
mod format;
pub mod golden;
mod instance;
mod matching;
pub mod random;
mod report;

pub use error::{InstanceError, SolveError};
pub use format::{parse_instance, write_instance};
pub use instance::{Instance, Side};
pub use matching::{find_blocking_pair, is_stable, primal_graph, score, Matching, Scores};
pub use report::{Method, Optimum, Problem, SolveReport, Stats};
