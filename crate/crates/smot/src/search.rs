//! The breadth- and depth-first explore-evaluate search loops, with the
//! knowledge state machine short-circuiting both the proposer and the
//! evaluator whenever it holds an answer.
//!
//! With an empty machine the breadth-first loop degenerates to a plain
//! propose-all / evaluate-all / select-best search. With a populated one,
//! recorded sub-solutions replace proposer calls, recorded verdicts replace
//! evaluator calls, states recorded unsolvable are pruned before selection,
//! and a recorded-solvable candidate is followed greedily along conducive
//! transitions to a terminal success when the recording is complete.

use std::collections::HashSet;

use thiserror::Error;

use crate::backend::BackendError;
use crate::domain::ProblemDomain;
use crate::sm::{KnowledgeStateMachine, Solvability, StateKey, SubSolution};
use crate::tree::{NodeId, Outcome, ReasoningTree};

/// Four-level solvability verdict. The two absolute levels come only from
/// the state machine; backends may answer only with the middle two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SolvabilityScore {
    AbsolutelyUnsolvable,
    Impossible,
    Possible,
    AbsolutelySolvable,
}

/// What an evaluator backend may answer for a state the machine does not
/// know.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Possible,
    Impossible,
}

impl From<Verdict> for SolvabilityScore {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Possible => SolvabilityScore::Possible,
            Verdict::Impossible => SolvabilityScore::Impossible,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Bfs,
    Dfs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub step_limit: usize,
    pub breadth_limit: usize,
    pub strategy: Strategy,
}

#[derive(Debug, Error)]
#[error("step and breadth limits must be at least 1")]
pub struct InvalidConfig;

impl SearchConfig {
    pub fn new(step_limit: usize, breadth_limit: usize, strategy: Strategy) -> Result<Self, InvalidConfig> {
        if step_limit == 0 || breadth_limit == 0 {
            return Err(InvalidConfig);
        }
        Ok(SearchConfig {
            step_limit,
            breadth_limit,
            strategy,
        })
    }
}

/// Generates candidate sub-solutions when the machine has none recorded.
pub trait ProposerBackend {
    fn propose(&mut self, s: &StateKey, breadth: usize) -> Result<Vec<SubSolution>, BackendError>;
}

/// Judges sub-problems the machine does not know.
pub trait EvaluatorBackend {
    fn evaluate(&mut self, s: &StateKey) -> Result<Verdict, BackendError>;
}

/// Fallback-backend invocation counts. State-machine hits are never counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BackendCalls {
    pub proposer: usize,
    pub evaluator: usize,
}

impl BackendCalls {
    pub fn total(&self) -> usize {
        self.proposer + self.evaluator
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    Solved,
    Exhausted,
    StepLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub status: SearchStatus,
    /// Steps from the start state to the terminal success; empty unless
    /// solved (and empty when the start state is already a success).
    pub trajectory: Vec<SubSolution>,
    pub backend_calls: BackendCalls,
    /// The explored tree with success/failure leaf labels, reusable as
    /// extraction input.
    pub tree: ReasoningTree,
}

impl SearchResult {
    pub fn solved(&self) -> bool {
        self.status == SearchStatus::Solved
    }
}

/// A backend failure aborts the search; the partial tree and the counters
/// up to the failure come along.
#[derive(Debug, Error)]
#[error("search aborted: {error}")]
pub struct SearchAborted {
    pub error: BackendError,
    pub backend_calls: BackendCalls,
    pub tree: ReasoningTree,
}

/// Machine-first proposal: recorded conducive sub-solutions are adopted
/// directly (capped at `breadth`, stored order); only when the machine has
/// none does the backend run and the proposer counter tick. The returned
/// flag is true for machine-sourced candidates.
pub fn propose(
    s: &StateKey,
    sm: &KnowledgeStateMachine,
    backend: &mut dyn ProposerBackend,
    breadth: usize,
    calls: &mut BackendCalls,
) -> Result<(Vec<SubSolution>, bool), BackendError> {
    let hits = sm.query_conducive(s);
    if !hits.is_empty() {
        return Ok((hits.into_iter().take(breadth).cloned().collect(), true));
    }
    calls.proposer += 1;
    let mut sols = backend.propose(s, breadth)?;
    sols.truncate(breadth);
    Ok((sols, false))
}

/// Machine-first evaluation: recorded verdicts map to the absolute levels
/// with no backend call; unknown states fall back to the backend and tick
/// the evaluator counter.
pub fn evaluate(
    s: &StateKey,
    sm: &KnowledgeStateMachine,
    backend: &mut dyn EvaluatorBackend,
    calls: &mut BackendCalls,
) -> Result<SolvabilityScore, BackendError> {
    match sm.query_solvability(s) {
        Solvability::KnownSolvable => Ok(SolvabilityScore::AbsolutelySolvable),
        Solvability::KnownUnsolvable => Ok(SolvabilityScore::AbsolutelyUnsolvable),
        Solvability::Unknown => {
            calls.evaluator += 1;
            Ok(backend.evaluate(s)?.into())
        }
    }
}

struct Ctx {
    tree: ReasoningTree,
    calls: BackendCalls,
}

impl Ctx {
    fn new(s0: StateKey) -> Self {
        Ctx {
            tree: ReasoningTree::new(s0),
            calls: BackendCalls::default(),
        }
    }

    fn state(&self, node: NodeId) -> StateKey {
        self.tree.node(node).state.clone()
    }

    fn fail_leaf(&mut self, node: NodeId) {
        self.tree
            .set_outcome(node, Outcome::Failure)
            .expect("leaf without outcome");
    }

    fn trajectory_to(&self, node: NodeId) -> Vec<SubSolution> {
        self.tree
            .path_from_root(node)
            .into_iter()
            .map(|(label, state)| SubSolution::new(label, state))
            .collect()
    }
}

enum FastPath {
    Solved(NodeId),
    DeadEnd(NodeId),
}

/// Follow the first recorded conducive transition from `start` until a
/// domain success (solved) or a state with no conducive recording (dead
/// end). Chain nodes become part of the explored tree. A revisited state
/// stops the chain, so hand-built cyclic recordings cannot loop.
fn follow_conducive(
    ctx: &mut Ctx,
    sm: &KnowledgeStateMachine,
    domain: &dyn ProblemDomain,
    start: NodeId,
) -> FastPath {
    let mut cur = start;
    let mut seen: HashSet<StateKey> = HashSet::from([ctx.state(start)]);
    loop {
        let state = ctx.state(cur);
        if domain.is_success(&state) {
            ctx.tree
                .set_outcome(cur, Outcome::Success)
                .expect("fresh chain leaf");
            return FastPath::Solved(cur);
        }
        let next = match sm.query_conducive(&state).first() {
            Some(sol) => (*sol).clone(),
            None => return FastPath::DeadEnd(cur),
        };
        if !seen.insert(next.target.clone()) {
            return FastPath::DeadEnd(cur);
        }
        cur = ctx
            .tree
            .add_child(cur, next.label, next.target)
            .expect("chain parent has no outcome");
    }
}

struct Candidate {
    node: NodeId,
    machine_sourced: bool,
    score: SolvabilityScore,
}

enum Judged {
    Solved(NodeId),
    Dropped,
    Keep(Candidate),
}

/// Success check, terminal check, scoring, machine fast-path, and pruning
/// for one fresh candidate node. Shared by both strategies.
fn judge_candidate(
    ctx: &mut Ctx,
    sm: &KnowledgeStateMachine,
    evaluator: &mut dyn EvaluatorBackend,
    domain: &dyn ProblemDomain,
    node: NodeId,
    machine_sourced: bool,
) -> Result<Judged, BackendError> {
    let state = ctx.state(node);
    if domain.is_success(&state) {
        ctx.tree
            .set_outcome(node, Outcome::Success)
            .expect("fresh candidate leaf");
        return Ok(Judged::Solved(node));
    }
    if domain.is_terminal(&state) {
        ctx.fail_leaf(node);
        return Ok(Judged::Dropped);
    }
    let mut node = node;
    let mut machine_sourced = machine_sourced;
    let mut score = evaluate(&state, sm, evaluator, &mut ctx.calls)?;
    if score == SolvabilityScore::AbsolutelySolvable {
        match follow_conducive(ctx, sm, domain, node) {
            FastPath::Solved(leaf) => return Ok(Judged::Solved(leaf)),
            FastPath::DeadEnd(dead) if dead != node => {
                // Resume normal expansion from where the recording ran out.
                node = dead;
                machine_sourced = true;
                let dead_state = ctx.state(dead);
                if domain.is_terminal(&dead_state) {
                    ctx.fail_leaf(node);
                    return Ok(Judged::Dropped);
                }
                score = evaluate(&dead_state, sm, evaluator, &mut ctx.calls)?;
            }
            FastPath::DeadEnd(_) => {}
        }
    }
    if score == SolvabilityScore::AbsolutelyUnsolvable {
        ctx.fail_leaf(node);
        return Ok(Judged::Dropped);
    }
    Ok(Judged::Keep(Candidate {
        node,
        machine_sourced,
        score,
    }))
}

/// Highest score first; machine-sourced before backend-sourced; insertion
/// order as the final tie-break (the sort is stable).
fn rank(candidates: &mut Vec<Candidate>) {
    candidates.sort_by(|a, b| {
        b.score
            .cmp(&a.score)
            .then(b.machine_sourced.cmp(&a.machine_sourced))
    });
}

fn start_shortcut(
    ctx: &mut Ctx,
    domain: &dyn ProblemDomain,
) -> Option<(SearchStatus, Vec<SubSolution>)> {
    let root = ctx.tree.root();
    let state = ctx.state(root);
    if domain.is_success(&state) {
        ctx.tree
            .set_outcome(root, Outcome::Success)
            .expect("fresh root");
        return Some((SearchStatus::Solved, Vec::new()));
    }
    if domain.is_terminal(&state) {
        ctx.fail_leaf(root);
        return Some((SearchStatus::Exhausted, Vec::new()));
    }
    None
}

fn bfs_body(
    ctx: &mut Ctx,
    sm: &KnowledgeStateMachine,
    proposer: &mut dyn ProposerBackend,
    evaluator: &mut dyn EvaluatorBackend,
    cfg: &SearchConfig,
    domain: &dyn ProblemDomain,
) -> Result<(SearchStatus, Vec<SubSolution>), BackendError> {
    if let Some(done) = start_shortcut(ctx, domain) {
        return Ok(done);
    }
    let mut frontier = vec![ctx.tree.root()];
    for _step in 0..cfg.step_limit {
        // Proposal sweep over the whole frontier.
        let mut fresh: Vec<(NodeId, bool)> = Vec::new();
        for &node in &frontier {
            let state = ctx.state(node);
            let (sols, machine_sourced) =
                propose(&state, sm, proposer, cfg.breadth_limit, &mut ctx.calls)?;
            if sols.is_empty() {
                ctx.fail_leaf(node);
                continue;
            }
            for sol in sols {
                let child = ctx
                    .tree
                    .add_child(node, sol.label, sol.target)
                    .expect("frontier nodes have no outcome");
                fresh.push((child, machine_sourced));
            }
        }
        // Evaluation sweep, pruning as it goes.
        let mut survivors: Vec<Candidate> = Vec::new();
        for (node, machine_sourced) in fresh {
            match judge_candidate(ctx, sm, evaluator, domain, node, machine_sourced)? {
                Judged::Solved(leaf) => {
                    return Ok((SearchStatus::Solved, ctx.trajectory_to(leaf)))
                }
                Judged::Dropped => {}
                Judged::Keep(c) => survivors.push(c),
            }
        }
        // Keep the best `breadth_limit` candidates.
        rank(&mut survivors);
        frontier = survivors
            .iter()
            .take(cfg.breadth_limit)
            .map(|c| c.node)
            .collect();
        if frontier.is_empty() {
            return Ok((SearchStatus::Exhausted, Vec::new()));
        }
    }
    Ok((SearchStatus::StepLimit, Vec::new()))
}

fn dfs_body(
    ctx: &mut Ctx,
    sm: &KnowledgeStateMachine,
    proposer: &mut dyn ProposerBackend,
    evaluator: &mut dyn EvaluatorBackend,
    cfg: &SearchConfig,
    domain: &dyn ProblemDomain,
) -> Result<(SearchStatus, Vec<SubSolution>), BackendError> {
    if let Some(done) = start_shortcut(ctx, domain) {
        return Ok(done);
    }
    let mut stack = vec![ctx.tree.root()];
    let mut depth_cut = false;
    while let Some(node) = stack.pop() {
        if ctx.tree.depth(node) >= cfg.step_limit {
            depth_cut = true;
            continue;
        }
        let state = ctx.state(node);
        let (sols, machine_sourced) =
            propose(&state, sm, proposer, cfg.breadth_limit, &mut ctx.calls)?;
        if sols.is_empty() {
            ctx.fail_leaf(node);
            continue;
        }
        let mut survivors: Vec<Candidate> = Vec::new();
        for sol in sols {
            let child = ctx
                .tree
                .add_child(node, sol.label, sol.target)
                .expect("expansion nodes have no outcome");
            match judge_candidate(ctx, sm, evaluator, domain, child, machine_sourced)? {
                Judged::Solved(leaf) => {
                    return Ok((SearchStatus::Solved, ctx.trajectory_to(leaf)))
                }
                Judged::Dropped => {}
                Judged::Keep(c) => survivors.push(c),
            }
        }
        // Descend only into viable children, best first; an
        // impossible-only frontier means backtrack.
        survivors.retain(|c| c.score >= SolvabilityScore::Possible);
        rank(&mut survivors);
        survivors.truncate(cfg.breadth_limit);
        for c in survivors.iter().rev() {
            stack.push(c.node);
        }
    }
    if depth_cut {
        Ok((SearchStatus::StepLimit, Vec::new()))
    } else {
        Ok((SearchStatus::Exhausted, Vec::new()))
    }
}

fn finish(
    ctx: Ctx,
    outcome: Result<(SearchStatus, Vec<SubSolution>), BackendError>,
) -> Result<SearchResult, Box<SearchAborted>> {
    match outcome {
        Ok((status, trajectory)) => Ok(SearchResult {
            status,
            trajectory,
            backend_calls: ctx.calls,
            tree: ctx.tree,
        }),
        Err(error) => Err(Box::new(SearchAborted {
            error,
            backend_calls: ctx.calls,
            tree: ctx.tree,
        })),
    }
}

/// Breadth-first search from `s0`: expand the whole frontier, score every
/// candidate, keep the `breadth_limit` best, stop on success, exhaustion,
/// or after `step_limit` levels.
pub fn smot_bfs(
    s0: StateKey,
    sm: &KnowledgeStateMachine,
    proposer: &mut dyn ProposerBackend,
    evaluator: &mut dyn EvaluatorBackend,
    cfg: &SearchConfig,
    domain: &dyn ProblemDomain,
) -> Result<SearchResult, Box<SearchAborted>> {
    let mut ctx = Ctx::new(s0);
    let outcome = bfs_body(&mut ctx, sm, proposer, evaluator, cfg, domain);
    finish(ctx, outcome)
}

/// Depth-first variant: expand the highest-scoring unvisited child first
/// and backtrack when every child is impossible or pruned. Ordering
/// choices mirror the breadth-first tie-breaks.
pub fn smot_dfs(
    s0: StateKey,
    sm: &KnowledgeStateMachine,
    proposer: &mut dyn ProposerBackend,
    evaluator: &mut dyn EvaluatorBackend,
    cfg: &SearchConfig,
    domain: &dyn ProblemDomain,
) -> Result<SearchResult, Box<SearchAborted>> {
    let mut ctx = Ctx::new(s0);
    let outcome = dfs_body(&mut ctx, sm, proposer, evaluator, cfg, domain);
    finish(ctx, outcome)
}

/// Dispatch on the configured strategy.
pub fn run_search(
    s0: StateKey,
    sm: &KnowledgeStateMachine,
    proposer: &mut dyn ProposerBackend,
    evaluator: &mut dyn EvaluatorBackend,
    cfg: &SearchConfig,
    domain: &dyn ProblemDomain,
) -> Result<SearchResult, Box<SearchAborted>> {
    match cfg.strategy {
        Strategy::Bfs => smot_bfs(s0, sm, proposer, evaluator, cfg, domain),
        Strategy::Dfs => smot_dfs(s0, sm, proposer, evaluator, cfg, domain),
    }
}

/// Breadth-1 greedy chain without evaluation: adopt the first proposal at
/// every step. The machine still short-circuits proposals when provided;
/// pass an empty machine for a pure backend chain.
pub fn greedy_chain(
    s0: StateKey,
    sm: &KnowledgeStateMachine,
    proposer: &mut dyn ProposerBackend,
    step_limit: usize,
    domain: &dyn ProblemDomain,
) -> Result<SearchResult, Box<SearchAborted>> {
    let mut ctx = Ctx::new(s0);
    let outcome = (|ctx: &mut Ctx| {
        if let Some(done) = start_shortcut(ctx, domain) {
            return Ok(done);
        }
        let mut cur = ctx.tree.root();
        for _ in 0..step_limit {
            let state = ctx.state(cur);
            let (sols, _) = propose(&state, sm, proposer, 1, &mut ctx.calls)?;
            let Some(sol) = sols.into_iter().next() else {
                ctx.fail_leaf(cur);
                return Ok((SearchStatus::Exhausted, Vec::new()));
            };
            cur = ctx
                .tree
                .add_child(cur, sol.label, sol.target)
                .expect("chain tip has no outcome");
            let state = ctx.state(cur);
            if domain.is_success(&state) {
                ctx.tree
                    .set_outcome(cur, Outcome::Success)
                    .expect("chain tip");
                return Ok((SearchStatus::Solved, ctx.trajectory_to(cur)));
            }
            if domain.is_terminal(&state) {
                ctx.fail_leaf(cur);
                return Ok((SearchStatus::Exhausted, Vec::new()));
            }
        }
        Ok((SearchStatus::StepLimit, Vec::new()))
    })(&mut ctx);
    finish(ctx, outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{game24_oracle_backends, scripted_mock, BackendError, MockScript};
    use crate::extract::build_state_machine;
    use crate::game24::{Game24Domain, Game24State};
    use crate::sm::Polarity;

    fn key(s: &str) -> StateKey {
        StateKey::new(s)
    }

    fn cfg(k: usize, b: usize) -> SearchConfig {
        SearchConfig::new(k, b, Strategy::Bfs).unwrap()
    }

    fn fig_machine() -> KnowledgeStateMachine {
        // The motivating recording: from 2 2 6 6, dividing is recorded
        // good and subtracting is recorded bad.
        let mut sm = KnowledgeStateMachine::new();
        sm.record_transition(
            key("2 2 6 6"),
            SubSolution::new("6/2=3", key("2 3 6")),
            Polarity::Conducive,
        );
        sm.record_transition(
            key("2 2 6 6"),
            SubSolution::new("6-2=4", key("2 4 6")),
            Polarity::NonConducive,
        );
        sm.record_transition(
            key("2 3 6"),
            SubSolution::new("2+6=8", key("3 8")),
            Polarity::Conducive,
        );
        sm.record_transition(
            key("3 8"),
            SubSolution::new("3*8=24", key("24")),
            Polarity::Conducive,
        );
        sm
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::new(0, 5, Strategy::Bfs).is_err());
        assert!(SearchConfig::new(5, 0, Strategy::Bfs).is_err());
        assert!(SearchConfig::new(1, 1, Strategy::Dfs).is_ok());
    }

    #[test]
    fn propose_prefers_machine_and_counts_fallbacks() {
        let sm = fig_machine();
        let (mut prop, _) = game24_oracle_backends();
        let mut calls = BackendCalls::default();

        let (sols, machine) =
            propose(&key("2 2 6 6"), &sm, prop.as_mut(), 20, &mut calls).unwrap();
        assert!(machine);
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].label, "6/2=3");
        assert_eq!(calls.proposer, 0);

        let (sols, machine) =
            propose(&key("1 2 3 4"), &sm, prop.as_mut(), 20, &mut calls).unwrap();
        assert!(!machine);
        assert!(!sols.is_empty() && sols.len() <= 20);
        assert_eq!(calls.proposer, 1);
    }

    #[test]
    fn propose_truncates_oversized_backend_replies() {
        let many: Vec<SubSolution> = (0..25)
            .map(|i| SubSolution::new(format!("m{i}"), key(&format!("t{i}"))))
            .collect();
        let script = MockScript::new().propose_for("s", many);
        let (mut prop, _, _) = scripted_mock(script);
        let sm = KnowledgeStateMachine::new();
        let mut calls = BackendCalls::default();
        let (sols, _) = propose(&key("s"), &sm, &mut prop, 20, &mut calls).unwrap();
        assert_eq!(sols.len(), 20);
        assert_eq!(sols[0].label, "m0");
    }

    #[test]
    fn evaluate_maps_machine_verdicts_to_absolutes() {
        let sm = fig_machine();
        let (_, mut eval) = game24_oracle_backends();
        let mut calls = BackendCalls::default();
        assert_eq!(
            evaluate(&key("3 8"), &sm, eval.as_mut(), &mut calls).unwrap(),
            SolvabilityScore::AbsolutelySolvable
        );
        assert_eq!(
            evaluate(&key("2 4 6"), &sm, eval.as_mut(), &mut calls).unwrap(),
            SolvabilityScore::AbsolutelyUnsolvable
        );
        assert_eq!(calls.evaluator, 0);
        assert_eq!(
            evaluate(&key("1 1 1 1"), &sm, eval.as_mut(), &mut calls).unwrap(),
            SolvabilityScore::Impossible
        );
        assert_eq!(calls.evaluator, 1);
    }

    #[test]
    fn terminal_start_solves_without_backends() {
        let sm = KnowledgeStateMachine::new();
        let (mut prop, mut eval) = game24_oracle_backends();
        let res = smot_bfs(
            key("24"),
            &sm,
            prop.as_mut(),
            eval.as_mut(),
            &cfg(3, 20),
            &Game24Domain,
        )
        .unwrap();
        assert_eq!(res.status, SearchStatus::Solved);
        assert!(res.trajectory.is_empty());
        assert_eq!(res.backend_calls.total(), 0);
    }

    #[test]
    fn machine_covered_instance_solves_with_zero_calls() {
        let trees = [
            Game24State::from_ints(&[2, 4, 6, 12]).unwrap().exhaustive_tree(),
            Game24State::from_ints(&[2, 2, 6, 6]).unwrap().exhaustive_tree(),
        ];
        let sm = build_state_machine(trees.iter());
        let (mut prop, mut eval) = game24_oracle_backends();
        let res = smot_bfs(
            key("2 2 6 6"),
            &sm,
            prop.as_mut(),
            eval.as_mut(),
            &cfg(3, 20),
            &Game24Domain,
        )
        .unwrap();
        assert_eq!(res.status, SearchStatus::Solved);
        assert_eq!(res.backend_calls.total(), 0);
        // Replay the steps and confirm the final state is exactly 24.
        let start = Game24State::from_ints(&[2, 2, 6, 6]).unwrap();
        let moves = crate::game24::moves_from_steps(&start, &res.trajectory).unwrap();
        let eq = crate::game24::format_equation(&start, &moves).unwrap();
        assert!(!eq.is_empty());
    }

    #[test]
    fn unsolvable_instance_is_never_solved() {
        let sm = KnowledgeStateMachine::new();
        let (mut prop, mut eval) = game24_oracle_backends();
        let res = smot_bfs(
            key("1 1 1 1"),
            &sm,
            prop.as_mut(),
            eval.as_mut(),
            &cfg(3, 20),
            &Game24Domain,
        )
        .unwrap();
        assert_ne!(res.status, SearchStatus::Solved);
        assert!(res.trajectory.is_empty());
    }

    #[test]
    fn pruning_drops_known_unsolvable_candidates() {
        // Machine says both children of "s" are unsolvable; the frontier
        // empties without an evaluator fallback for them.
        let mut sm = KnowledgeStateMachine::new();
        sm.record_transition(
            key("bad1-src"),
            SubSolution::new("x", key("bad1")),
            Polarity::NonConducive,
        );
        sm.record_transition(
            key("bad2-src"),
            SubSolution::new("x", key("bad2")),
            Polarity::NonConducive,
        );
        let script = MockScript::new().propose_for(
            "s",
            vec![
                SubSolution::new("a", key("bad1")),
                SubSolution::new("b", key("bad2")),
            ],
        );
        let (mut prop, mut eval, transcript) = scripted_mock(script);
        struct Never;
        impl ProblemDomain for Never {
            fn id(&self) -> &'static str {
                "never"
            }
            fn is_success(&self, _: &StateKey) -> bool {
                false
            }
            fn is_terminal(&self, _: &StateKey) -> bool {
                false
            }
            fn successors(&self, _: &StateKey) -> Vec<SubSolution> {
                Vec::new()
            }
        }
        let res = smot_bfs(key("s"), &sm, &mut prop, &mut eval, &cfg(3, 20), &Never).unwrap();
        assert_eq!(res.status, SearchStatus::Exhausted);
        assert_eq!(res.backend_calls.evaluator, 0);
        // Only the single proposal call reached the backends.
        assert_eq!(transcript.len(), 1);
        // Pruned nodes are failure leaves in the emitted tree.
        let failures = res
            .tree
            .nodes()
            .filter(|(_, n)| n.outcome == Some(Outcome::Failure))
            .count();
        assert_eq!(failures, 2);
    }

    #[test]
    fn backend_failure_aborts_with_partial_tree() {
        let script = MockScript::new().fail_propose_for("1 2 3 4", "scripted outage");
        let (mut prop, mut eval, _) = scripted_mock(script);
        let err = smot_bfs(
            key("1 2 3 4"),
            &KnowledgeStateMachine::new(),
            &mut prop,
            &mut eval,
            &cfg(3, 20),
            &Game24Domain,
        )
        .unwrap_err();
        assert!(matches!(err.error, BackendError::Scripted(_)));
        assert_eq!(err.tree.len(), 1); // root only, nothing expanded
    }

    #[test]
    fn dfs_agrees_with_bfs_on_oracle_runs() {
        let trees = [
            Game24State::from_ints(&[2, 2, 6, 6]).unwrap().exhaustive_tree(),
        ];
        let sm = build_state_machine(trees.iter());
        for (instance, machine) in [
            ("2 2 6 6", &sm),
            ("1 1 1 1", &sm),
            ("24", &sm),
        ] {
            let (mut p1, mut e1) = game24_oracle_backends();
            let (mut p2, mut e2) = game24_oracle_backends();
            let bfs = smot_bfs(
                key(instance),
                machine,
                p1.as_mut(),
                e1.as_mut(),
                &cfg(3, 20),
                &Game24Domain,
            )
            .unwrap();
            let dfs = smot_dfs(
                key(instance),
                machine,
                p2.as_mut(),
                e2.as_mut(),
                &SearchConfig::new(3, 20, Strategy::Dfs).unwrap(),
                &Game24Domain,
            )
            .unwrap();
            assert_eq!(bfs.solved(), dfs.solved(), "instance {instance}");
        }
        // Fully covered instance: both strategies stay at zero calls.
        let (mut p, mut e) = game24_oracle_backends();
        let dfs = smot_dfs(
            key("2 2 6 6"),
            &sm,
            p.as_mut(),
            e.as_mut(),
            &SearchConfig::new(3, 20, Strategy::Dfs).unwrap(),
            &Game24Domain,
        )
        .unwrap();
        assert_eq!(dfs.backend_calls.total(), 0);
        assert!(dfs.solved());
    }

    #[test]
    fn dfs_backtracks_through_failures() {
        // First child leads nowhere (machine knows), second child wins.
        let sm = build_state_machine(
            [Game24State::from_ints(&[1, 5, 5, 5]).unwrap().exhaustive_tree()].iter(),
        );
        let (mut p, mut e) = game24_oracle_backends();
        let res = smot_dfs(
            key("1 5 5 5"),
            &sm,
            p.as_mut(),
            e.as_mut(),
            &SearchConfig::new(3, 20, Strategy::Dfs).unwrap(),
            &Game24Domain,
        )
        .unwrap();
        assert!(res.solved()); // 5*(5-1/5)
        assert_eq!(res.backend_calls.total(), 0);
    }

    #[test]
    fn greedy_chain_is_breadth_one() {
        let script = MockScript::new()
            .propose_for("a", vec![SubSolution::new("s1", key("b"))])
            .propose_for("b", vec![SubSolution::new("s2", key("c"))]);
        let (mut prop, _, transcript) = scripted_mock(script);
        struct Goal;
        impl ProblemDomain for Goal {
            fn id(&self) -> &'static str {
                "goal"
            }
            fn is_success(&self, s: &StateKey) -> bool {
                s.as_str() == "c"
            }
            fn is_terminal(&self, s: &StateKey) -> bool {
                s.as_str() == "c"
            }
            fn successors(&self, _: &StateKey) -> Vec<SubSolution> {
                Vec::new()
            }
        }
        let res = greedy_chain(key("a"), &KnowledgeStateMachine::new(), &mut prop, 30, &Goal)
            .unwrap();
        assert_eq!(res.status, SearchStatus::Solved);
        assert_eq!(res.trajectory.len(), 2);
        assert_eq!(res.backend_calls.proposer, 2);
        assert_eq!(transcript.len(), 2);
    }

    #[test]
    fn fast_path_dead_end_resumes_expansion() {
        // Recorded chain: s -> m (conducive), but m has no recording and the
        // recording for m's own solvability is missing, so the chain dead-ends
        // at m and the oracle backends finish the job.
        let mut sm = KnowledgeStateMachine::new();
        sm.record_transition(
            key("2 2 6 6"),
            SubSolution::new("6/2=3", key("2 3 6")),
            Polarity::Conducive,
        );
        let (mut p, mut e) = game24_oracle_backends();
        let res = smot_bfs(
            key("2 2 6 6"),
            &sm,
            p.as_mut(),
            e.as_mut(),
            &cfg(3, 20),
            &Game24Domain,
        )
        .unwrap();
        assert!(res.solved());
        // The proposer had to run for the dead-end state but never for the
        // recorded start.
        assert!(res.backend_calls.proposer >= 1);
        assert_eq!(res.trajectory.first().map(|s| s.label.as_str()), Some("6/2=3"));
    }

    #[test]
    fn deterministic_results_for_identical_inputs() {
        let sm = fig_machine();
        let run = || {
            let (mut p, mut e) = game24_oracle_backends();
            smot_bfs(
                key("2 2 6 6"),
                &sm,
                p.as_mut(),
                e.as_mut(),
                &cfg(3, 20),
                &Game24Domain,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }
}
