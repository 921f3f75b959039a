//! Completion-service backends: render a prompt template, call a
//! JSON-over-HTTP chat endpoint, and parse the reply with a strict line
//! grammar. Proposals come back as `<step> -> <state key>` lines; verdicts
//! as a bare `possible` / `impossible` token.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use thiserror::Error;

use crate::backend::BackendError;
use crate::search::{EvaluatorBackend, ProposerBackend, Verdict};
use crate::sm::{StateKey, SubSolution};

/// Environment variable holding the bearer token for the endpoint.
pub const API_KEY_ENV: &str = "SMOT_API_KEY";

#[derive(Debug, Clone)]
pub struct AdapterConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub max_retries: u32,
    pub timeout: Duration,
    /// Hard cap on requests per session; every attempt (including retries)
    /// consumes one unit.
    pub budget: u64,
}

impl AdapterConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        AdapterConfig {
            endpoint: endpoint.into(),
            model: model.into(),
            temperature: 0.7,
            max_retries: 2,
            timeout: Duration::from_secs(30),
            budget: 1000,
        }
    }
}

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("template text is empty")]
    Empty,
    #[error("template must reference {{state}}")]
    MissingState,
    #[error("unknown placeholder {{{0}}}")]
    UnknownPlaceholder(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateRole {
    Propose,
    Evaluate,
}

/// A prompt with `{state}` (and optionally `{breadth}`) placeholders. All
/// placeholders are checked at construction, so rendering cannot fail or
/// produce an empty prompt.
#[derive(Debug, Clone)]
pub struct PromptTemplate {
    pub role: TemplateRole,
    pub domain: String,
    text: String,
}

impl PromptTemplate {
    pub fn new(
        role: TemplateRole,
        domain: impl Into<String>,
        text: impl Into<String>,
    ) -> Result<Self, TemplateError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(TemplateError::Empty);
        }
        if !text.contains("{state}") {
            return Err(TemplateError::MissingState);
        }
        let mut rest = text.as_str();
        while let Some(open) = rest.find('{') {
            let tail = &rest[open + 1..];
            let Some(close) = tail.find('}') else { break };
            let name = &tail[..close];
            if name != "state" && name != "breadth" {
                return Err(TemplateError::UnknownPlaceholder(name.to_string()));
            }
            rest = &tail[close + 1..];
        }
        Ok(PromptTemplate {
            role,
            domain: domain.into(),
            text,
        })
    }

    pub fn render(&self, state: &StateKey, breadth: usize) -> String {
        self.text
            .replace("{state}", state.as_str())
            .replace("{breadth}", &breadth.to_string())
    }
}

/// Propose/evaluate template pair for one domain.
#[derive(Debug, Clone)]
pub struct CompletionTemplates {
    pub propose: PromptTemplate,
    pub evaluate: PromptTemplate,
}

/// Built-in templates instructing the model to emit the line grammar.
pub fn default_templates(domain: &str) -> CompletionTemplates {
    let (propose, evaluate) = match domain {
        "game24" => (
            "You are solving a 24-point arithmetic puzzle. The remaining numbers are: {state}.\n\
             Propose up to {breadth} next steps. A step picks two of the numbers and combines \
             them with +, -, * or /.\n\
             Reply with one proposal per line, formatted exactly as\n\
             <a><op><b>=<result> -> <remaining numbers, ascending, space-separated>\n\
             and no other text.",
            "You are judging a 24-point arithmetic puzzle position. The remaining numbers \
             are: {state}.\n\
             Can these numbers be combined with +, -, * and / so that exactly 24 remains?\n\
             Reply with the single word possible or impossible.",
        ),
        "taxi" => (
            "You are driving a taxi on a 5x5 grid with walls. The situation is: {state}.\n\
             Propose up to {breadth} next actions, choosing from north, south, east, west, \
             pickup, dropoff.\n\
             Reply with one proposal per line, formatted exactly as\n\
             <action> -> <resulting situation>\n\
             and no other text.",
            "You are judging a taxi-navigation situation: {state}.\n\
             Can the passenger still be delivered from here?\n\
             Reply with the single word possible or impossible.",
        ),
        _ => (
            "The current state is: {state}.\n\
             Propose up to {breadth} next steps, one per line, formatted exactly as\n\
             <step> -> <next state>\n\
             and no other text.",
            "The current state is: {state}.\n\
             Reply with the single word possible or impossible.",
        ),
    };
    CompletionTemplates {
        propose: PromptTemplate::new(TemplateRole::Propose, domain, propose)
            .expect("built-in template is valid"),
        evaluate: PromptTemplate::new(TemplateRole::Evaluate, domain, evaluate)
            .expect("built-in template is valid"),
    }
}

#[derive(Debug, Error)]
pub enum TransportError {
    /// Connection-level failures and 5xx responses; worth retrying.
    #[error("{0}")]
    Retryable(String),
    /// Protocol or client errors; retrying cannot help.
    #[error("{0}")]
    Fatal(String),
}

/// The wire layer under the completion client. Implementations take a
/// rendered prompt and return the model's reply text.
pub trait Transport: Send + Sync {
    fn send(&self, prompt: &str) -> Result<String, TransportError>;
}

struct HttpTransport {
    client: reqwest::blocking::Client,
    endpoint: String,
    model: String,
    temperature: f64,
    api_key: Option<String>,
}

impl Transport for HttpTransport {
    fn send(&self, prompt: &str) -> Result<String, TransportError> {
        let body = serde_json::json!({
            "model": self.model,
            "temperature": self.temperature,
            "messages": [{"role": "user", "content": prompt}],
        });
        let mut req = self.client.post(&self.endpoint).json(&body);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let resp = req
            .send()
            .map_err(|e| TransportError::Retryable(e.to_string()))?;
        let status = resp.status();
        if status.is_server_error() {
            return Err(TransportError::Retryable(format!("status {status}")));
        }
        if !status.is_success() {
            return Err(TransportError::Fatal(format!("status {status}")));
        }
        let value: serde_json::Value = resp
            .json()
            .map_err(|e| TransportError::Fatal(format!("bad response body: {e}")))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| TransportError::Fatal("response has no message content".into()))
    }
}

/// One adapter session: a transport, a retry policy, and a request budget
/// shared by the proposer and evaluator halves of an episode.
struct Session {
    transport: Box<dyn Transport>,
    max_retries: u32,
    remaining: AtomicU64,
}

impl Session {
    /// Sends with retries on retryable transport failures only. Every
    /// attempt draws on the budget first, so the cap holds under any
    /// error/retry interleaving.
    fn request(&self, prompt: &str) -> Result<String, BackendError> {
        let mut last = None;
        for _attempt in 0..=self.max_retries {
            let claimed = self
                .remaining
                .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1))
                .is_ok();
            if !claimed {
                return Err(BackendError::BudgetExceeded);
            }
            match self.transport.send(prompt) {
                Ok(reply) => return Ok(reply),
                Err(TransportError::Fatal(msg)) => return Err(BackendError::Transport(msg)),
                Err(TransportError::Retryable(msg)) => {
                    log::warn!("transport failure (will retry if attempts remain): {msg}");
                    last = Some(msg);
                }
            }
        }
        Err(BackendError::Transport(
            last.unwrap_or_else(|| "no attempts made".into()),
        ))
    }
}

/// Parse proposal lines of the form `<step> -> <state key>`. Unparseable
/// lines are dropped with a warning; a reply with no parseable line at all
/// is a distinct error.
pub fn parse_proposals(reply: &str) -> Result<Vec<SubSolution>, BackendError> {
    let mut out = Vec::new();
    for line in reply.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once("->") {
            Some((label, key)) => {
                let (label, key) = (label.trim(), key.trim());
                if label.is_empty() || key.is_empty() {
                    log::warn!("dropping malformed proposal line: {line}");
                    continue;
                }
                out.push(SubSolution::new(label, StateKey::new(key)));
            }
            None => log::warn!("dropping malformed proposal line: {line}"),
        }
    }
    if out.is_empty() {
        return Err(BackendError::EmptyReply);
    }
    Ok(out)
}

/// Parse a verdict token, case-insensitively, from the first line that
/// carries one.
pub fn parse_verdict(reply: &str) -> Result<Verdict, BackendError> {
    for line in reply.lines() {
        match line.trim().to_ascii_lowercase().as_str() {
            "possible" => return Ok(Verdict::Possible),
            "impossible" => return Ok(Verdict::Impossible),
            "" => continue,
            other => log::warn!("dropping non-verdict line: {other}"),
        }
    }
    Err(BackendError::EmptyReply)
}

pub struct CompletionProposer {
    session: Arc<Session>,
    template: PromptTemplate,
}

pub struct CompletionEvaluator {
    session: Arc<Session>,
    template: PromptTemplate,
}

impl ProposerBackend for CompletionProposer {
    fn propose(&mut self, s: &StateKey, breadth: usize) -> Result<Vec<SubSolution>, BackendError> {
        let reply = self.session.request(&self.template.render(s, breadth))?;
        let mut sols = parse_proposals(&reply)?;
        sols.truncate(breadth);
        Ok(sols)
    }
}

impl EvaluatorBackend for CompletionEvaluator {
    fn evaluate(&mut self, s: &StateKey) -> Result<Verdict, BackendError> {
        let reply = self.session.request(&self.template.render(s, 1))?;
        parse_verdict(&reply)
    }
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("failed to build http client: {0}")]
    Http(String),
    #[error(transparent)]
    Template(#[from] TemplateError),
}

/// Backends speaking the chat-completion wire protocol at the configured
/// endpoint. Credentials come from `SMOT_API_KEY` when set.
pub fn completion_client(
    cfg: AdapterConfig,
    templates: CompletionTemplates,
) -> Result<(CompletionProposer, CompletionEvaluator), ClientError> {
    let client = reqwest::blocking::Client::builder()
        .timeout(cfg.timeout)
        .build()
        .map_err(|e| ClientError::Http(e.to_string()))?;
    let transport = HttpTransport {
        client,
        endpoint: cfg.endpoint.clone(),
        model: cfg.model.clone(),
        temperature: cfg.temperature,
        api_key: std::env::var(API_KEY_ENV).ok(),
    };
    Ok(completion_client_with_transport(
        cfg,
        templates,
        Box::new(transport),
    ))
}

/// Same as [`completion_client`] but over a caller-supplied transport.
pub fn completion_client_with_transport(
    cfg: AdapterConfig,
    templates: CompletionTemplates,
    transport: Box<dyn Transport>,
) -> (CompletionProposer, CompletionEvaluator) {
    let session = Arc::new(Session {
        transport,
        max_retries: cfg.max_retries,
        remaining: AtomicU64::new(cfg.budget),
    });
    (
        CompletionProposer {
            session: session.clone(),
            template: templates.propose,
        },
        CompletionEvaluator {
            session,
            template: templates.evaluate,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    #[test]
    fn template_validation() {
        assert!(matches!(
            PromptTemplate::new(TemplateRole::Propose, "d", ""),
            Err(TemplateError::Empty)
        ));
        assert!(matches!(
            PromptTemplate::new(TemplateRole::Propose, "d", "no placeholder"),
            Err(TemplateError::MissingState)
        ));
        assert!(matches!(
            PromptTemplate::new(TemplateRole::Propose, "d", "{state} and {bogus}"),
            Err(TemplateError::UnknownPlaceholder(_))
        ));
        let t = PromptTemplate::new(TemplateRole::Propose, "d", "go {state} x{breadth}").unwrap();
        let rendered = t.render(&StateKey::new("2 3 6"), 20);
        assert_eq!(rendered, "go 2 3 6 x20");
    }

    #[test]
    fn builtin_templates_render() {
        for domain in ["game24", "taxi", "other"] {
            let t = default_templates(domain);
            let p = t.propose.render(&StateKey::new("k"), 5);
            let e = t.evaluate.render(&StateKey::new("k"), 5);
            assert!(!p.is_empty() && !p.contains('{'));
            assert!(!e.is_empty() && !e.contains('{'));
        }
    }

    #[test]
    fn proposal_parsing() {
        let sols = parse_proposals("6/2=3 -> 2 3 6\njunk line\n2+2=4 -> 4 6 6\n").unwrap();
        assert_eq!(sols.len(), 2);
        assert_eq!(sols[0].label, "6/2=3");
        assert_eq!(sols[0].target.as_str(), "2 3 6");

        assert!(matches!(
            parse_proposals("nothing useful here"),
            Err(BackendError::EmptyReply)
        ));
        assert!(matches!(parse_proposals(""), Err(BackendError::EmptyReply)));
        // Arrow with empty sides is dropped, not panicked on.
        assert!(matches!(
            parse_proposals(" -> \n->"),
            Err(BackendError::EmptyReply)
        ));
    }

    #[test]
    fn verdict_parsing() {
        assert_eq!(parse_verdict("impossible").unwrap(), Verdict::Impossible);
        assert_eq!(parse_verdict("  Possible \n").unwrap(), Verdict::Possible);
        assert_eq!(
            parse_verdict("thinking...\nIMPOSSIBLE").unwrap(),
            Verdict::Impossible
        );
        assert!(matches!(
            parse_verdict("maybe?"),
            Err(BackendError::EmptyReply)
        ));
    }

    /// Transport that replays a schedule of outcomes and counts attempts.
    struct Scripted {
        replies: Mutex<Vec<Result<String, TransportError>>>,
        attempts: Mutex<u64>,
    }

    impl Scripted {
        fn new(replies: Vec<Result<String, TransportError>>) -> Self {
            Scripted {
                replies: Mutex::new(replies),
                attempts: Mutex::new(0),
            }
        }
    }

    impl Transport for Scripted {
        fn send(&self, _prompt: &str) -> Result<String, TransportError> {
            *self.attempts.lock().unwrap() += 1;
            let mut replies = self.replies.lock().unwrap();
            if replies.is_empty() {
                Ok("possible".into())
            } else {
                replies.remove(0)
            }
        }
    }

    fn cfg(budget: u64, retries: u32) -> AdapterConfig {
        let mut c = AdapterConfig::new("http://unused.local", "test-model");
        c.budget = budget;
        c.max_retries = retries;
        c
    }

    #[test]
    fn zero_budget_fails_before_any_request() {
        let scripted = Arc::new(Scripted::new(vec![Ok("possible".into())]));
        let (_, mut eval) = completion_client_with_transport(
            cfg(0, 3),
            default_templates("game24"),
            Box::new(SharedTransport(scripted.clone())),
        );
        assert!(matches!(
            eval.evaluate(&StateKey::new("1 2 3")),
            Err(BackendError::BudgetExceeded)
        ));
        assert_eq!(*scripted.attempts.lock().unwrap(), 0);
    }

    struct SharedTransport(Arc<Scripted>);

    impl Transport for SharedTransport {
        fn send(&self, p: &str) -> Result<String, TransportError> {
            self.0.send(p)
        }
    }

    #[test]
    fn retries_only_on_retryable_errors() {
        let transport = Box::new(Scripted::new(vec![
            Err(TransportError::Retryable("blip".into())),
            Ok("possible".into()),
        ]));
        let (_, mut eval) =
            completion_client_with_transport(cfg(10, 2), default_templates("game24"), transport);
        assert_eq!(
            eval.evaluate(&StateKey::new("1 2 3")).unwrap(),
            Verdict::Possible
        );

        let scripted = Arc::new(Scripted::new(vec![
            Err(TransportError::Fatal("status 401".into())),
            Ok("possible".into()),
        ]));
        let (_, mut eval) = completion_client_with_transport(
            cfg(10, 2),
            default_templates("game24"),
            Box::new(SharedTransport(scripted.clone())),
        );
        assert!(matches!(
            eval.evaluate(&StateKey::new("1 2 3")),
            Err(BackendError::Transport(_))
        ));
        assert_eq!(*scripted.attempts.lock().unwrap(), 1); // no retry on fatal
    }

    #[test]
    fn budget_caps_attempts_across_retries() {
        let scripted = Arc::new(Scripted::new(vec![
            Err(TransportError::Retryable("a".into())),
            Err(TransportError::Retryable("b".into())),
            Err(TransportError::Retryable("c".into())),
            Err(TransportError::Retryable("d".into())),
        ]));
        let (_, mut eval) = completion_client_with_transport(
            cfg(2, 10),
            default_templates("game24"),
            Box::new(SharedTransport(scripted.clone())),
        );
        let err = eval.evaluate(&StateKey::new("1 2 3")).unwrap_err();
        assert!(matches!(err, BackendError::BudgetExceeded));
        assert_eq!(*scripted.attempts.lock().unwrap(), 2);
    }

    #[test]
    fn proposer_and_evaluator_share_one_budget() {
        let transport = Box::new(Scripted::new(vec![
            Ok("6/2=3 -> 2 3 6".into()),
            Ok("possible".into()),
            Ok("possible".into()),
        ]));
        let (mut prop, mut eval) =
            completion_client_with_transport(cfg(2, 0), default_templates("game24"), transport);
        assert!(prop.propose(&StateKey::new("2 2 6 6"), 5).is_ok());
        assert!(eval.evaluate(&StateKey::new("2 3 6")).is_ok());
        assert!(matches!(
            eval.evaluate(&StateKey::new("2 3 6")),
            Err(BackendError::BudgetExceeded)
        ));
    }
}
