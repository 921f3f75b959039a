//! Experiment pipelines behind the CLI: machine construction, evaluation
//! runs, subsample/noise sweeps, and the self-check suite.
//!
//! The 24-game runs a tree search per instance; the taxi runs the staged
//! pickup/dropoff policy per scenario, one action at a time. Mode `tot`
//! ignores the machine (runs with an empty one), `cot` additionally drops
//! evaluation and forces breadth 1.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::backend::{
    game24_oracle_backends, scripted_mock, taxi_oracle_backends, MockScript,
};
use crate::client::{completion_client, default_templates, AdapterConfig, ClientError};
use crate::domain::ProblemDomain;
use crate::extract::{extract_conducive, extract_non_conducive, record_tree};
use crate::game24::{self, Game24Domain, Game24Error, Game24State};
use crate::report::{EpisodeReport, EpisodeStatus, ExperimentReport, SweepCell, SweepKind, SweepReport};
use crate::search::{
    greedy_chain, run_search, EvaluatorBackend, ProposerBackend, SearchConfig, SearchResult,
    Strategy,
};
use crate::sm::{KnowledgeStateMachine, LoadError, SmError, Solvability, StateKey};
use crate::taxi::{
    build_navigation_sm, default_scenarios, run_policy_episode, FixedActionProposer, GridMap,
    Scenario, TaxiAction, TaxiError,
};
use crate::tree::{Outcome, ReasoningTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Game24,
    Taxi,
}

impl DomainKind {
    pub fn parse(s: &str) -> Result<Self, ExperimentError> {
        match s {
            "game24" => Ok(DomainKind::Game24),
            "taxi" => Ok(DomainKind::Taxi),
            other => Err(ExperimentError::BadConfig(format!(
                "unknown domain `{other}` (expected game24 or taxi)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DomainKind::Game24 => "game24",
            DomainKind::Taxi => "taxi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Smot,
    Tot,
    Cot,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Self, ExperimentError> {
        match s {
            "smot" => Ok(Mode::Smot),
            "tot" => Ok(Mode::Tot),
            "cot" => Ok(Mode::Cot),
            other => Err(ExperimentError::BadConfig(format!(
                "unknown mode `{other}` (expected smot, tot or cot)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Smot => "smot",
            Mode::Tot => "tot",
            Mode::Cot => "cot",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Oracle,
    Mock,
    Completion,
}

impl BackendKind {
    pub fn parse(s: &str) -> Result<Self, ExperimentError> {
        match s {
            "oracle" => Ok(BackendKind::Oracle),
            "mock" => Ok(BackendKind::Mock),
            "completion" => Ok(BackendKind::Completion),
            other => Err(ExperimentError::BadConfig(format!(
                "unknown backend `{other}` (expected oracle, mock or completion)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BackendKind::Oracle => "oracle",
            BackendKind::Mock => "mock",
            BackendKind::Completion => "completion",
        }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Game24(#[from] Game24Error),
    #[error(transparent)]
    Taxi(#[from] TaxiError),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    MachineLoad(#[from] LoadError),
    #[error(transparent)]
    Machine(#[from] SmError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub domain: DomainKind,
    pub mode: Mode,
    pub backend: BackendKind,
    pub strategy: Strategy,
    /// Step limit for searches; action cap for taxi episodes.
    pub steps: usize,
    pub breadth: usize,
    /// 1-based problem indices (24-game) or scenario numbers (taxi).
    pub instances: Vec<u32>,
    pub repetitions: u32,
    pub seed: u64,
    pub workers: usize,
    /// Label of the loaded machine, echoed into reports.
    pub machine_label: String,
}

impl ExperimentConfig {
    /// Per-domain defaults: the 24-game searches 3 steps with breadth 20
    /// once per instance; taxi episodes cap at 30 actions and repeat 20
    /// times.
    pub fn new(domain: DomainKind, mode: Mode, backend: BackendKind) -> Self {
        let (steps, repetitions) = match domain {
            DomainKind::Game24 => (3, 1),
            DomainKind::Taxi => (30, 20),
        };
        ExperimentConfig {
            domain,
            mode,
            backend,
            strategy: Strategy::Bfs,
            steps,
            breadth: 20,
            instances: Vec::new(),
            repetitions,
            seed: 0,
            workers: 1,
            machine_label: "none".to_string(),
        }
    }

    /// Breadth actually used: `cot` always runs single-file.
    pub fn effective_breadth(&self) -> usize {
        match self.mode {
            Mode::Cot => 1,
            _ => self.breadth,
        }
    }

    pub fn echo(&self) -> String {
        format!(
            "domain={} mode={} backend={} strategy={} steps={} breadth={} reps={} seed={} workers={} machine={} instances={}",
            self.domain.as_str(),
            self.mode.as_str(),
            self.backend.as_str(),
            match self.strategy {
                Strategy::Bfs => "bfs",
                Strategy::Dfs => "dfs",
            },
            self.steps,
            self.effective_breadth(),
            self.repetitions,
            self.seed,
            self.workers,
            self.machine_label,
            echo_instances(&self.instances),
        )
    }
}

fn echo_instances(instances: &[u32]) -> String {
    if instances.is_empty() {
        return "none".to_string();
    }
    let contiguous = instances
        .windows(2)
        .all(|w| w[1] == w[0] + 1);
    if contiguous {
        format!("{}-{}", instances[0], instances[instances.len() - 1])
    } else {
        format!("{} listed", instances.len())
    }
}

/// Shared inputs for runs: the machine, the problem corpus, the map, and
/// the scenarios.
#[derive(Debug, Clone)]
pub struct Resources {
    pub machine: KnowledgeStateMachine,
    pub problems: Arc<Vec<Game24State>>,
    pub map: GridMap,
    pub scenarios: Vec<Scenario>,
    pub adapter: Option<AdapterConfig>,
}

impl Resources {
    pub fn with_defaults(machine: KnowledgeStateMachine) -> Self {
        Resources {
            machine,
            problems: Arc::new(game24::vendored_problems()),
            map: GridMap::default_map(),
            scenarios: default_scenarios(),
            adapter: None,
        }
    }

    /// All instance numbers a domain offers: every problem index for the
    /// 24-game, every scenario for taxi.
    pub fn all_instances(&self, domain: DomainKind) -> Vec<u32> {
        match domain {
            DomainKind::Game24 => (1..=self.problems.len() as u32).collect(),
            DomainKind::Taxi => (1..=self.scenarios.len() as u32).collect(),
        }
    }
}

/// Build the 24-game machine: one exhaustive tree per instance, both
/// traversals extracted and merged.
pub fn build_game24_machine(problems: &[Game24State]) -> KnowledgeStateMachine {
    let mut sm = KnowledgeStateMachine::new();
    for p in problems {
        let tree = p.exhaustive_tree();
        record_tree(&mut sm, &tree);
    }
    sm
}

/// Build the machine for a domain over the selected instances.
pub fn build_machine(
    domain: DomainKind,
    res: &Resources,
    instances: &[u32],
) -> Result<KnowledgeStateMachine, ExperimentError> {
    match domain {
        DomainKind::Game24 => {
            let mut selected = Vec::with_capacity(instances.len());
            for &i in instances {
                let state = res
                    .problems
                    .get(i as usize - 1)
                    .ok_or_else(|| out_of_range(i, res.problems.len()))?;
                selected.push(state.clone());
            }
            Ok(build_game24_machine(&selected))
        }
        DomainKind::Taxi => Ok(build_navigation_sm(&res.map)?),
    }
}

fn out_of_range(instance: u32, len: usize) -> ExperimentError {
    ExperimentError::BadConfig(format!(
        "instance {instance} out of range (corpus holds {len})"
    ))
}

fn make_backends(
    cfg: &ExperimentConfig,
    res: &Resources,
) -> Result<(Box<dyn ProposerBackend>, Box<dyn EvaluatorBackend>), ExperimentError> {
    match cfg.backend {
        BackendKind::Oracle => Ok(match cfg.domain {
            DomainKind::Game24 => game24_oracle_backends(),
            DomainKind::Taxi => taxi_oracle_backends(res.map.clone()),
        }),
        BackendKind::Mock => match cfg.domain {
            DomainKind::Game24 => {
                // Inert stand-in: proposes nothing, judges impossible.
                let (p, e, _) = scripted_mock(MockScript::new());
                Ok((Box::new(p), Box::new(e)))
            }
            DomainKind::Taxi => {
                // A backend with no sense of direction: always "north".
                let (_, e, _) = scripted_mock(MockScript::new());
                Ok((Box::new(FixedActionProposer(TaxiAction::North)), Box::new(e)))
            }
        },
        BackendKind::Completion => {
            let adapter = res.adapter.clone().ok_or_else(|| {
                ExperimentError::BadConfig(
                    "completion backend needs an endpoint configuration".into(),
                )
            })?;
            let (p, e) = completion_client(adapter, default_templates(cfg.domain.as_str()))?;
            Ok((Box::new(p), Box::new(e)))
        }
    }
}

fn instance_label(domain: DomainKind, instance: u32) -> String {
    match domain {
        DomainKind::Game24 => instance.to_string(),
        DomainKind::Taxi => format!("scenario-{instance}"),
    }
}

fn episode_from_result(
    cfg: &ExperimentConfig,
    res: &Resources,
    instance: u32,
    repetition: u32,
    result: SearchResult,
) -> EpisodeReport {
    let mut report = EpisodeReport {
        instance: instance_label(cfg.domain, instance),
        repetition,
        status: result.status.into(),
        solved: result.solved(),
        steps: result.trajectory.len(),
        nodes: result.tree.len(),
        backend_calls: result.backend_calls,
        detail: None,
        abort_error: None,
    };
    if cfg.domain == DomainKind::Game24 && report.solved && !result.trajectory.is_empty() {
        // Solved runs must replay into a checked equation; a backend that
        // fabricated steps is caught right here.
        let start = &res.problems[instance as usize - 1];
        match game24::moves_from_steps(start, &result.trajectory)
            .and_then(|moves| game24::format_equation(start, &moves))
        {
            Ok(eq) => report.detail = Some(eq),
            Err(e) => {
                report.solved = false;
                report.status = EpisodeStatus::Aborted;
                report.abort_error = Some(format!("solution failed verification: {e}"));
            }
        }
    }
    report
}

fn run_episode(
    cfg: &ExperimentConfig,
    res: &Resources,
    machine: &KnowledgeStateMachine,
    instance: u32,
    repetition: u32,
) -> EpisodeReport {
    let aborted = |error: String, calls, nodes| EpisodeReport {
        instance: instance_label(cfg.domain, instance),
        repetition,
        status: EpisodeStatus::Aborted,
        solved: false,
        steps: 0,
        nodes,
        backend_calls: calls,
        detail: None,
        abort_error: Some(error),
    };
    let backends = match make_backends(cfg, res) {
        Ok(b) => b,
        Err(e) => return aborted(e.to_string(), Default::default(), 0),
    };
    let (mut proposer, mut evaluator) = backends;
    match cfg.domain {
        DomainKind::Game24 => {
            let s0 = res.problems[instance as usize - 1].key();
            let search_cfg = SearchConfig {
                step_limit: cfg.steps,
                breadth_limit: cfg.effective_breadth(),
                strategy: cfg.strategy,
            };
            let outcome = match cfg.mode {
                Mode::Cot => greedy_chain(
                    s0,
                    machine,
                    proposer.as_mut(),
                    cfg.steps,
                    &Game24Domain,
                ),
                _ => run_search(
                    s0,
                    machine,
                    proposer.as_mut(),
                    evaluator.as_mut(),
                    &search_cfg,
                    &Game24Domain,
                ),
            };
            match outcome {
                Ok(result) => episode_from_result(cfg, res, instance, repetition, result),
                Err(e) => aborted(e.error.to_string(), e.backend_calls, e.tree.len()),
            }
        }
        DomainKind::Taxi => {
            let scenario = &res.scenarios[instance as usize - 1];
            match run_policy_episode(
                &res.map,
                scenario,
                machine,
                Some(proposer.as_mut()),
                cfg.steps,
            ) {
                Ok(result) => episode_from_result(cfg, res, instance, repetition, result),
                Err(e) => aborted(e.error.to_string(), e.backend_calls, e.tree.len()),
            }
        }
    }
}

fn validate(cfg: &ExperimentConfig, res: &Resources) -> Result<Vec<u32>, ExperimentError> {
    if cfg.steps == 0 || cfg.breadth == 0 {
        return Err(ExperimentError::BadConfig(
            "steps and breadth must be at least 1".into(),
        ));
    }
    if cfg.repetitions == 0 {
        return Err(ExperimentError::BadConfig("repetitions must be at least 1".into()));
    }
    if cfg.workers == 0 {
        return Err(ExperimentError::BadConfig("workers must be at least 1".into()));
    }
    if cfg.backend == BackendKind::Completion && res.adapter.is_none() {
        return Err(ExperimentError::BadConfig(
            "completion backend needs an endpoint configuration".into(),
        ));
    }
    let limit = match cfg.domain {
        DomainKind::Game24 => res.problems.len(),
        DomainKind::Taxi => res.scenarios.len(),
    };
    let mut instances = cfg.instances.clone();
    if instances.is_empty() {
        return Err(ExperimentError::BadConfig("no instances selected".into()));
    }
    instances.sort_unstable();
    instances.dedup();
    for &i in &instances {
        if i == 0 || i as usize > limit {
            return Err(out_of_range(i, limit));
        }
    }
    Ok(instances)
}

/// Run every selected instance `repetitions` times against the machine the
/// mode calls for; rows come back sorted by instance, then repetition.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    res: &Resources,
) -> Result<ExperimentReport, ExperimentError> {
    match cfg.mode {
        Mode::Smot => run_with_machine(cfg, res, &res.machine, cfg.echo()),
        Mode::Tot | Mode::Cot => {
            run_with_machine(cfg, res, &KnowledgeStateMachine::new(), cfg.echo())
        }
    }
}

fn run_with_machine(
    cfg: &ExperimentConfig,
    res: &Resources,
    machine: &KnowledgeStateMachine,
    config_echo: String,
) -> Result<ExperimentReport, ExperimentError> {
    let instances = validate(cfg, res)?;
    let start = Instant::now();
    let specs: Vec<(u32, u32)> = instances
        .iter()
        .flat_map(|&i| (0..cfg.repetitions).map(move |r| (i, r)))
        .collect();
    let episodes: Vec<EpisodeReport> = if cfg.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| ExperimentError::BadConfig(e.to_string()))?;
        pool.install(|| {
            specs
                .par_iter()
                .map(|&(i, r)| run_episode(cfg, res, machine, i, r))
                .collect()
        })
    } else {
        specs
            .iter()
            .map(|&(i, r)| run_episode(cfg, res, machine, i, r))
            .collect()
    };
    Ok(ExperimentReport {
        config_echo,
        episodes,
        elapsed: start.elapsed(),
    })
}

/// Subsampling sweep: run once per (fraction, seed) cell against a machine
/// restricted to that fraction of its states.
pub fn run_ablation(
    cfg: &ExperimentConfig,
    res: &Resources,
    fractions: &[f64],
    seeds: &[u64],
) -> Result<SweepReport, ExperimentError> {
    sweep(cfg, res, fractions, seeds, SweepKind::Ablation)
}

/// Noise sweep: run once per (fraction, seed) cell against a machine with
/// that share of its conducive entries flipped.
pub fn run_noise(
    cfg: &ExperimentConfig,
    res: &Resources,
    fractions: &[f64],
    seeds: &[u64],
) -> Result<SweepReport, ExperimentError> {
    sweep(cfg, res, fractions, seeds, SweepKind::Noise)
}

fn sweep(
    cfg: &ExperimentConfig,
    res: &Resources,
    fractions: &[f64],
    seeds: &[u64],
    kind: SweepKind,
) -> Result<SweepReport, ExperimentError> {
    let mut cells = Vec::with_capacity(fractions.len() * seeds.len());
    for &fraction in fractions {
        for &seed in seeds {
            let machine = match kind {
                SweepKind::Ablation => res.machine.subsample_states(fraction, seed)?,
                SweepKind::Noise => res.machine.inject_noise(fraction, seed)?,
            };
            let echo = format!(
                "{} {}={} sweep_seed={}",
                cfg.echo(),
                match kind {
                    SweepKind::Ablation => "fraction",
                    SweepKind::Noise => "noise",
                },
                fraction,
                seed
            );
            let report = run_with_machine(cfg, res, &machine, echo)?;
            cells.push(SweepCell {
                fraction,
                seed,
                report,
            });
        }
    }
    Ok(SweepReport {
        kind,
        config_echo: cfg.echo(),
        cells,
    })
}

/// One self-check suite's verdict.
#[derive(Debug)]
pub struct SuiteVerdict {
    pub name: &'static str,
    pub outcome: Result<String, String>,
}

#[derive(Debug)]
pub struct SelfcheckOutcome {
    pub suites: Vec<SuiteVerdict>,
}

impl SelfcheckOutcome {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.outcome.is_ok())
    }
}

/// The oracle-consistency suite: the 24-game machine against brute force,
/// extraction against an independent post-order recursion, and taxi
/// navigation against grid distances. When a machine file is given it must
/// load cleanly first.
pub fn selfcheck(machine_path: Option<&Path>) -> SelfcheckOutcome {
    let mut suites = Vec::new();
    if let Some(path) = machine_path {
        suites.push(SuiteVerdict {
            name: "machine-load",
            outcome: KnowledgeStateMachine::load_from_path(path)
                .map(|sm| format!("{} states", sm.state_count()))
                .map_err(|e| e.to_string()),
        });
    }
    suites.push(SuiteVerdict {
        name: "game24-machine-vs-oracle",
        outcome: check_game24_machine(),
    });
    suites.push(SuiteVerdict {
        name: "extraction-vs-postorder",
        outcome: check_extraction(),
    });
    suites.push(SuiteVerdict {
        name: "taxi-navigation",
        outcome: check_taxi(),
    });
    SelfcheckOutcome { suites }
}

fn check_game24_machine() -> Result<String, String> {
    let problems = game24::vendored_problems();
    let train = &problems[..problems.len().min(60)];
    let sm = build_game24_machine(train);
    let keys: Vec<StateKey> = sm.states().map(|(k, _)| k.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let sample: Vec<&StateKey> = keys.choose_multiple(&mut rng, 200.min(keys.len())).collect();
    let mut checked = 0;
    for key in sample {
        let state = Game24State::parse_key(key)
            .map_err(|e| format!("machine holds a non-domain key: {e}"))?;
        let truth = state.brute_force_solvable();
        match sm.query_solvability(key) {
            Solvability::KnownSolvable if !truth => {
                return Err(format!("machine claims {key} solvable; oracle disagrees"));
            }
            Solvability::KnownUnsolvable if truth => {
                return Err(format!("machine claims {key} unsolvable; oracle disagrees"));
            }
            _ => checked += 1,
        }
    }
    Ok(format!(
        "{checked} sampled states agree with brute force ({} recorded)",
        sm.state_count()
    ))
}

fn check_extraction() -> Result<String, String> {
    use rand::Rng;

    // Independent recursive fixpoint for the bottom-up classification.
    fn post_order(tree: &ReasoningTree, id: usize, out: &mut Vec<bool>) -> bool {
        let node = tree.node(id);
        let nc = if node.children.is_empty() {
            match node.outcome {
                Some(Outcome::Failure) => true,
                Some(Outcome::Success) => false,
                None => tree.is_exhaustive(),
            }
        } else {
            node.children
                .iter()
                .map(|&c| post_order(tree, c, out))
                .fold(true, |acc, x| acc && x)
        };
        out[id] = nc;
        nc
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for round in 0..50 {
        // Random labeled tree, sometimes exhaustive.
        let mut tree = ReasoningTree::new(StateKey::new("n0"));
        let mut open = vec![0usize];
        let mut next = 1;
        while !open.is_empty() && tree.len() < 300 {
            let pick = rng.gen_range(0..open.len());
            let node = open.swap_remove(pick);
            let kids = rng.gen_range(0..4);
            if kids == 0 {
                if rng.gen_bool(0.8) {
                    let outcome = if rng.gen_bool(0.3) {
                        Outcome::Success
                    } else {
                        Outcome::Failure
                    };
                    tree.set_outcome(node, outcome).expect("leaf");
                }
                continue;
            }
            for _ in 0..kids {
                let id = tree
                    .add_child(node, format!("e{next}"), StateKey::new(format!("n{next}")))
                    .expect("open node");
                next += 1;
                open.push(id);
            }
        }
        tree.mark_exhaustive(round % 2 == 0);

        let mut oracle = vec![false; tree.len()];
        post_order(&tree, tree.root(), &mut oracle);
        let expected: std::collections::BTreeSet<&str> = tree
            .nodes()
            .filter(|(id, _)| oracle[*id])
            .map(|(_, n)| n.state.as_str())
            .collect();
        let got: std::collections::BTreeSet<String> = extract_non_conducive(&tree)
            .non_conducive_states
            .into_iter()
            .map(|k| k.as_str().to_string())
            .collect();
        let got: std::collections::BTreeSet<&str> = got.iter().map(|s| s.as_str()).collect();
        if got != expected {
            return Err(format!("round {round}: non-conducive sets diverge"));
        }

        // Top-down set against direct success-path enumeration.
        let mut conducive_oracle = std::collections::BTreeSet::new();
        for (id, node) in tree.nodes() {
            if node.outcome == Some(Outcome::Success) {
                let mut cur = id;
                conducive_oracle.insert(tree.node(cur).state.as_str());
                while let Some(parent) = tree.node(cur).parent {
                    conducive_oracle.insert(tree.node(parent).state.as_str());
                    cur = parent;
                }
            }
        }
        let got: std::collections::BTreeSet<&str> = {
            let states = extract_conducive(&tree).conducive_states;
            tree.nodes()
                .map(|(_, n)| n.state.as_str())
                .filter(|s| states.contains(&StateKey::new(*s)))
                .collect()
        };
        if got != conducive_oracle {
            return Err(format!("round {round}: conducive sets diverge"));
        }
    }
    Ok("50 random trees match the recursive oracle".to_string())
}

fn check_taxi() -> Result<String, String> {
    use crate::taxi::{follow_navigation, Color, GRID};

    let map = GridMap::default_map();
    let sm = build_navigation_sm(&map).map_err(|e| e.to_string())?;
    if sm.state_count() != 96 {
        return Err(format!("expected 96 states, found {}", sm.state_count()));
    }
    for color in Color::ALL {
        let target = map.color_cell(color);
        for x in 0..GRID {
            for y in 0..GRID {
                let actions = follow_navigation(&sm, &map, (x, y), color)
                    .ok_or_else(|| format!("no recorded route from ({x},{y}) to {color}"))?;
                let want = map
                    .distance((x, y), target)
                    .ok_or_else(|| format!("({x},{y}) cannot reach {color}"))?;
                if actions.len() as u32 != want {
                    return Err(format!(
                        "route from ({x},{y}) to {color} takes {} actions, distance is {want}",
                        actions.len()
                    ));
                }
            }
        }
    }
    for (i, scenario) in default_scenarios().iter().enumerate() {
        let res = run_policy_episode(&map, scenario, &sm, None, 30)
            .map_err(|e| e.error.to_string())?;
        if !res.solved() {
            return Err(format!("scenario {} failed under the machine", i + 1));
        }
    }
    Ok("96 states; all 100 routes optimal; 5 scenarios delivered".to_string())
}

/// Convenience wrapper around the domain trait objects for callers that
/// need one.
pub fn domain_object(domain: DomainKind, res: &Resources) -> Box<dyn ProblemDomain> {
    match domain {
        DomainKind::Game24 => Box::new(Game24Domain),
        DomainKind::Taxi => Box::new(crate::taxi::TaxiDomain::new(res.map.clone())),
    }
}
