//! Turning recorded reasoning trees into state-machine entries.
//!
//! Two sweeps per tree: a top-to-bottom pass collects every edge lying on a
//! root-to-success path (conducive), and a bottom-to-top pass collects every
//! edge into a node whose entire expanded subtree failed (non-conducive).
//! Outcome-less leaves count as failures only in trees flagged exhaustive;
//! in sampled trees they are inconclusive and license no negatives.

use indexmap::IndexSet;

use crate::sm::{KnowledgeStateMachine, Polarity, StateKey, SubSolution};
use crate::tree::{NodeId, Outcome, ReasoningTree};

/// Edges and states one extraction pass identified, tagged by polarity.
/// Within a single tree's output the two edge lists are disjoint on
/// `(from, label, target)` triples; conducive wins the overlap.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtractedTransitions {
    pub conducive: Vec<(StateKey, SubSolution)>,
    pub non_conducive: Vec<(StateKey, SubSolution)>,
    pub conducive_states: IndexSet<StateKey>,
    pub non_conducive_states: IndexSet<StateKey>,
}

struct Classified {
    /// Node lies on some root-to-success-leaf path.
    conducive: Vec<bool>,
    /// Every expanded descendant line of the node failed.
    non_conducive: Vec<bool>,
}

/// Single reverse-breadth-first pass computing both node classifications;
/// children are always visited before their parents.
fn classify(tree: &ReasoningTree) -> Classified {
    let n = tree.len();
    let mut conducive = vec![false; n];
    let mut non_conducive = vec![false; n];
    for id in tree.bfs_order().into_iter().rev() {
        let node = tree.node(id);
        if node.children.is_empty() {
            match node.outcome {
                Some(Outcome::Success) => conducive[id] = true,
                Some(Outcome::Failure) => non_conducive[id] = true,
                None => {
                    if tree.is_exhaustive() {
                        non_conducive[id] = true;
                    }
                }
            }
        } else {
            conducive[id] = node.children.iter().any(|&c| conducive[c]);
            non_conducive[id] = node.children.iter().all(|&c| non_conducive[c]);
        }
    }
    Classified {
        conducive,
        non_conducive,
    }
}

fn edge(tree: &ReasoningTree, child: NodeId) -> (StateKey, SubSolution) {
    let node = tree.node(child);
    let parent = node.parent.expect("edges lead to non-root nodes");
    let label = node
        .incoming_label
        .clone()
        .expect("non-root nodes carry labels");
    (
        tree.node(parent).state.clone(),
        SubSolution::new(label, node.state.clone()),
    )
}

fn push_edges(
    tree: &ReasoningTree,
    pick: &[bool],
    seen: &mut IndexSet<(StateKey, String, StateKey)>,
    out: &mut Vec<(StateKey, SubSolution)>,
) {
    for (id, node) in tree.nodes() {
        if node.parent.is_some() && pick[id] {
            let (from, sol) = edge(tree, id);
            if seen.insert((from.clone(), sol.label.clone(), sol.target.clone())) {
                out.push((from, sol));
            }
        }
    }
}

/// Top-to-bottom traversal: every edge on some root-to-success path, and
/// every state on such a path.
pub fn extract_conducive(tree: &ReasoningTree) -> ExtractedTransitions {
    let classes = classify(tree);
    let mut out = ExtractedTransitions::default();
    let mut seen = IndexSet::new();
    push_edges(tree, &classes.conducive, &mut seen, &mut out.conducive);
    for (id, node) in tree.nodes() {
        if classes.conducive[id] {
            out.conducive_states.insert(node.state.clone());
        }
    }
    out
}

/// Bottom-to-top traversal: every edge whose target node's expanded subtree
/// entirely failed, and every state so identified. Edges that are also on a
/// success path elsewhere in the tree are excluded (conducive wins).
pub fn extract_non_conducive(tree: &ReasoningTree) -> ExtractedTransitions {
    let classes = classify(tree);
    let mut out = ExtractedTransitions::default();
    let mut seen = IndexSet::new();
    // Seed with the conducive triples so overlapping edges stay out.
    let mut conducive_sink = Vec::new();
    push_edges(tree, &classes.conducive, &mut seen, &mut conducive_sink);
    push_edges(tree, &classes.non_conducive, &mut seen, &mut out.non_conducive);
    for (id, node) in tree.nodes() {
        if classes.non_conducive[id] {
            out.non_conducive_states.insert(node.state.clone());
        }
    }
    out
}

/// Extract one tree and merge its findings into an existing machine. The
/// machine's initial state is set from the tree root on first use. Trees
/// can be streamed through here one at a time; whole-corpus construction
/// never needs them all in memory.
pub fn record_tree(sm: &mut KnowledgeStateMachine, tree: &ReasoningTree) {
    if sm.initial().is_none() {
        sm.set_initial(tree.node(tree.root()).state.clone());
    }
    let good = extract_conducive(tree);
    for (from, sol) in good.conducive {
        sm.record_transition(from, sol, Polarity::Conducive);
    }
    for state in good.conducive_states {
        sm.mark_solvability(state, Polarity::Conducive);
    }
    let bad = extract_non_conducive(tree);
    for (from, sol) in bad.non_conducive {
        sm.record_transition(from, sol, Polarity::NonConducive);
    }
    for state in bad.non_conducive_states {
        sm.mark_solvability(state, Polarity::NonConducive);
    }
}

/// Run both traversals over every tree and merge the results into one
/// machine via the conducive-wins recording rules. The initial state comes
/// from the first tree's root.
pub fn build_state_machine<'a, I>(trees: I) -> KnowledgeStateMachine
where
    I: IntoIterator<Item = &'a ReasoningTree>,
{
    let mut sm = KnowledgeStateMachine::new();
    for tree in trees {
        record_tree(&mut sm, tree);
    }
    sm
}
