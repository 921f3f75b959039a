//! Proposer/evaluator backend implementations: domain oracles for
//! ground-truth runs and a deterministic scripted mock for tests.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::domain::ProblemDomain;
use crate::game24::Game24State;
use crate::search::{EvaluatorBackend, ProposerBackend, Verdict};
use crate::sm::{StateKey, SubSolution};
use crate::taxi::{GridMap, TaxiState};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BackendError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("reply contained nothing parseable")]
    EmptyReply,
    #[error("request budget exhausted")]
    BudgetExceeded,
    #[error("scripted failure: {0}")]
    Scripted(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Proposer that enumerates the domain's true successors, capped at the
/// requested breadth.
pub struct SuccessorProposer {
    domain: Arc<dyn ProblemDomain>,
}

impl SuccessorProposer {
    pub fn new(domain: Arc<dyn ProblemDomain>) -> Self {
        SuccessorProposer { domain }
    }
}

impl ProposerBackend for SuccessorProposer {
    fn propose(&mut self, s: &StateKey, breadth: usize) -> Result<Vec<SubSolution>, BackendError> {
        let mut sols = self.domain.successors(s);
        sols.truncate(breadth);
        Ok(sols)
    }
}

/// Evaluator that answers with exhaustive 24-game backtracking.
#[derive(Debug, Default)]
pub struct Game24OracleEvaluator;

impl EvaluatorBackend for Game24OracleEvaluator {
    fn evaluate(&mut self, s: &StateKey) -> Result<Verdict, BackendError> {
        let state = Game24State::parse_key(s)
            .map_err(|e| BackendError::Domain(e.to_string()))?;
        if state.brute_force_solvable() {
            Ok(Verdict::Possible)
        } else {
            Ok(Verdict::Impossible)
        }
    }
}

/// Evaluator that answers with grid reachability: a taxi state is judged
/// possible iff every cell the episode still needs is reachable.
#[derive(Debug)]
pub struct TaxiOracleEvaluator {
    map: GridMap,
}

impl TaxiOracleEvaluator {
    pub fn new(map: GridMap) -> Self {
        TaxiOracleEvaluator { map }
    }
}

impl EvaluatorBackend for TaxiOracleEvaluator {
    fn evaluate(&mut self, s: &StateKey) -> Result<Verdict, BackendError> {
        let state = TaxiState::parse_key(s)
            .map_err(|e| BackendError::Domain(e.to_string()))?;
        if state.deliverable(&self.map) {
            Ok(Verdict::Possible)
        } else {
            Ok(Verdict::Impossible)
        }
    }
}

/// Oracle backends for the 24-game: true successors plus backtracking
/// solvability. Fully deterministic.
pub fn game24_oracle_backends() -> (Box<dyn ProposerBackend>, Box<dyn EvaluatorBackend>) {
    (
        Box::new(SuccessorProposer::new(Arc::new(
            crate::game24::Game24Domain,
        ))),
        Box::new(Game24OracleEvaluator),
    )
}

/// Oracle backends for the taxi world on the given map.
pub fn taxi_oracle_backends(map: GridMap) -> (Box<dyn ProposerBackend>, Box<dyn EvaluatorBackend>) {
    (
        Box::new(SuccessorProposer::new(Arc::new(
            crate::taxi::TaxiDomain::new(map.clone()),
        ))),
        Box::new(TaxiOracleEvaluator::new(map)),
    )
}

/// A canned reply or a scripted failure.
#[derive(Debug, Clone)]
pub enum MockResponse<T> {
    Reply(T),
    Fail(String),
}

impl<T: Clone> MockResponse<T> {
    fn resolve(&self) -> Result<T, BackendError> {
        match self {
            MockResponse::Reply(v) => Ok(v.clone()),
            MockResponse::Fail(msg) => Err(BackendError::Scripted(msg.clone())),
        }
    }
}

/// Keyed canned responses with a default rule for unknown states.
/// Unscripted states propose nothing and evaluate Impossible.
#[derive(Debug, Clone)]
pub struct MockScript {
    proposals: HashMap<String, MockResponse<Vec<SubSolution>>>,
    verdicts: HashMap<String, MockResponse<Verdict>>,
    default_proposal: MockResponse<Vec<SubSolution>>,
    default_verdict: MockResponse<Verdict>,
}

impl Default for MockScript {
    fn default() -> Self {
        MockScript {
            proposals: HashMap::new(),
            verdicts: HashMap::new(),
            default_proposal: MockResponse::Reply(Vec::new()),
            default_verdict: MockResponse::Reply(Verdict::Impossible),
        }
    }
}

impl MockScript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn propose_for(mut self, key: &str, sols: Vec<SubSolution>) -> Self {
        self.proposals
            .insert(key.to_string(), MockResponse::Reply(sols));
        self
    }

    pub fn fail_propose_for(mut self, key: &str, msg: &str) -> Self {
        self.proposals
            .insert(key.to_string(), MockResponse::Fail(msg.to_string()));
        self
    }

    pub fn default_propose(mut self, response: MockResponse<Vec<SubSolution>>) -> Self {
        self.default_proposal = response;
        self
    }

    pub fn verdict_for(mut self, key: &str, verdict: Verdict) -> Self {
        self.verdicts
            .insert(key.to_string(), MockResponse::Reply(verdict));
        self
    }

    pub fn fail_verdict_for(mut self, key: &str, msg: &str) -> Self {
        self.verdicts
            .insert(key.to_string(), MockResponse::Fail(msg.to_string()));
        self
    }

    pub fn default_verdict(mut self, response: MockResponse<Verdict>) -> Self {
        self.default_verdict = response;
        self
    }
}

/// One backend call as the mock saw it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CallRecord {
    Propose { state: String, breadth: usize },
    Evaluate { state: String },
}

/// Shared, thread-safe record of every call a scripted mock served.
#[derive(Debug, Clone, Default)]
pub struct Transcript(Arc<Mutex<Vec<CallRecord>>>);

impl Transcript {
    pub fn len(&self) -> usize {
        self.0.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn records(&self) -> Vec<CallRecord> {
        self.0.lock().unwrap().clone()
    }

    fn push(&self, record: CallRecord) {
        self.0.lock().unwrap().push(record);
    }
}

pub struct ScriptedProposer {
    script: MockScript,
    transcript: Transcript,
}

pub struct ScriptedEvaluator {
    script: MockScript,
    transcript: Transcript,
}

/// Build replaying backends from a script. Both halves append to the same
/// transcript, in call order.
pub fn scripted_mock(script: MockScript) -> (ScriptedProposer, ScriptedEvaluator, Transcript) {
    let transcript = Transcript::default();
    (
        ScriptedProposer {
            script: script.clone(),
            transcript: transcript.clone(),
        },
        ScriptedEvaluator {
            script,
            transcript: transcript.clone(),
        },
        transcript,
    )
}

impl ProposerBackend for ScriptedProposer {
    fn propose(&mut self, s: &StateKey, breadth: usize) -> Result<Vec<SubSolution>, BackendError> {
        self.transcript.push(CallRecord::Propose {
            state: s.as_str().to_string(),
            breadth,
        });
        self.script
            .proposals
            .get(s.as_str())
            .unwrap_or(&self.script.default_proposal)
            .resolve()
    }
}

impl EvaluatorBackend for ScriptedEvaluator {
    fn evaluate(&mut self, s: &StateKey) -> Result<Verdict, BackendError> {
        self.transcript.push(CallRecord::Evaluate {
            state: s.as_str().to_string(),
        });
        self.script
            .verdicts
            .get(s.as_str())
            .unwrap_or(&self.script.default_verdict)
            .resolve()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn game24_oracle_matches_known_verdicts() {
        let (_, mut eval) = game24_oracle_backends();
        assert_eq!(
            eval.evaluate(&StateKey::new("2 4 6")).unwrap(),
            Verdict::Impossible
        );
        assert_eq!(
            eval.evaluate(&StateKey::new("3 8")).unwrap(),
            Verdict::Possible
        );
        assert!(eval.evaluate(&StateKey::new("not numbers")).is_err());
    }

    #[test]
    fn successor_proposer_caps_breadth() {
        let (mut prop, _) = game24_oracle_backends();
        let all = prop.propose(&StateKey::new("1 2 3 4"), 100).unwrap();
        let capped = prop.propose(&StateKey::new("1 2 3 4"), 5).unwrap();
        assert!(all.len() > 5);
        assert_eq!(capped.len(), 5);
        assert_eq!(&all[..5], &capped[..]);
    }

    #[test]
    fn scripted_mock_replays_and_records() {
        let script = MockScript::new()
            .propose_for(
                "s",
                vec![
                    SubSolution::new("a", StateKey::new("t1")),
                    SubSolution::new("b", StateKey::new("t2")),
                ],
            )
            .fail_verdict_for("t2", "boom")
            .verdict_for("t1", Verdict::Possible);
        let (mut prop, mut eval, transcript) = scripted_mock(script);

        let sols = prop.propose(&StateKey::new("s"), 20).unwrap();
        assert_eq!(sols.len(), 2);
        assert_eq!(sols[0].label, "a");

        assert_eq!(
            eval.evaluate(&StateKey::new("t1")).unwrap(),
            Verdict::Possible
        );
        assert!(matches!(
            eval.evaluate(&StateKey::new("t2")),
            Err(BackendError::Scripted(_))
        ));
        // Unknown keys hit the defaults.
        assert!(prop.propose(&StateKey::new("zzz"), 20).unwrap().is_empty());
        assert_eq!(
            eval.evaluate(&StateKey::new("zzz")).unwrap(),
            Verdict::Impossible
        );

        assert_eq!(transcript.len(), 5);
        assert_eq!(
            transcript.records()[0],
            CallRecord::Propose {
                state: "s".into(),
                breadth: 20
            }
        );
    }

    #[test]
    fn identical_call_sequences_get_identical_answers() {
        let script = MockScript::new().verdict_for("x", Verdict::Possible);
        let (_, mut e1, _) = scripted_mock(script.clone());
        let (_, mut e2, _) = scripted_mock(script);
        for _ in 0..3 {
            assert_eq!(
                e1.evaluate(&StateKey::new("x")).unwrap(),
                e2.evaluate(&StateKey::new("x")).unwrap()
            );
        }
    }
}
