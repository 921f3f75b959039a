//! Experience-guided exploration-evaluation search.
//!
//! Past searches are distilled into a *knowledge state machine*: states are
//! sub-problems, transitions are sub-solutions, and both carry a polarity
//! recording whether they helped. New searches consult the machine first —
//! recorded sub-solutions are adopted without proposing, recorded verdicts
//! skip evaluation, recorded dead ends are pruned — and fall back to
//! pluggable proposer/evaluator backends only for unknown states.
//!
//! Two benchmark domains ship in the box: the 24-point arithmetic game and
//! the classic 5x5 taxi grid world. The `experiment` module and the `smot`
//! CLI drive end-to-end runs, machine construction, and the subsampling /
//! noise-injection sweeps.

pub mod backend;
pub mod client;
pub mod domain;
pub mod experiment;
pub mod extract;
pub mod game24;
pub mod report;
pub mod search;
pub mod sm;
pub mod taxi;
pub mod tree;

pub use backend::BackendError;
pub use domain::ProblemDomain;
pub use extract::{build_state_machine, extract_conducive, extract_non_conducive};
pub use search::{
    greedy_chain, run_search, smot_bfs, smot_dfs, BackendCalls, EvaluatorBackend,
    ProposerBackend, SearchAborted, SearchConfig, SearchResult, SearchStatus, SolvabilityScore,
    Strategy, Verdict,
};
pub use sm::{KnowledgeStateMachine, Polarity, Solvability, StateKey, SubSolution};
pub use tree::{Outcome, ReasoningTree};
