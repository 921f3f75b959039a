//! The contract a benchmark domain offers to the search layer.

use crate::sm::{StateKey, SubSolution};

/// Key-level view of a problem domain: canonical state encoding, successor
/// generation, and the success test. All methods are total over arbitrary
/// keys; a key the domain cannot parse is simply never successful, never
/// terminal, and has no successors.
pub trait ProblemDomain: Send + Sync {
    fn id(&self) -> &'static str;

    /// True iff the key encodes a goal state.
    fn is_success(&self, s: &StateKey) -> bool;

    /// True iff no further step can be taken from this state.
    fn is_terminal(&self, s: &StateKey) -> bool;

    /// Every legal step out of `s`, deterministically ordered, each with a
    /// canonical target key.
    fn successors(&self, s: &StateKey) -> Vec<SubSolution>;
}
