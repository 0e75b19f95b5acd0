//! Stable roommates toolkit: instances with ties and incomplete lists, weak
//! stability checks, exact solvers for the decision, egalitarian,
//! rank-maximal and almost-stable variants, a random instance generator, an
//! argumentation-framework solving path and a small benchmark harness.

pub mod af;
pub mod bench;
pub mod error;
pub mod fixtures;
pub mod generator;
pub mod instance;
pub mod matching;
pub mod solvers;
pub mod stability;

pub use error::{Error, Result};
pub use instance::{parse_instance, AgentId, Instance, Metadata, PreferenceList, RankTable};
pub use matching::{matching_to_text, parse_matching, validate_matching, Matching};
pub use solvers::{
    brute_force_oracle, egalitarian_cost, enumerate_all, solve_almost_stable, solve_decision,
    solve_egalitarian, solve_rank_maximal, Mode, Profile, SolveResult, Solver, Status,
};
pub use stability::{blocking_pairs, blocks, is_stable, BlockingPair};
