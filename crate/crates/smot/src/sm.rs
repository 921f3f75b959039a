//! The knowledge state machine: polarity-tagged sub-problem transitions
//! harvested from past searches, with queries, persistence, and the
//! experiment-support mutations (subsampling, noise injection).

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use indexmap::IndexMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Canonical encoding of a sub-problem, produced by the owning domain.
///
/// Two semantically identical sub-problems must encode to byte-identical
/// keys; the key is never empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey(String);

impl StateKey {
    pub fn new(key: impl Into<String>) -> Self {
        let key = key.into();
        assert!(!key.is_empty(), "state keys must be non-empty");
        StateKey(key)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A reasoning step: an action description plus the sub-problem it leads to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubSolution {
    pub label: String,
    pub target: StateKey,
}

impl SubSolution {
    pub fn new(label: impl Into<String>, target: StateKey) -> Self {
        let label = label.into();
        assert!(!label.is_empty(), "sub-solution labels must be non-empty");
        SubSolution { label, target }
    }
}

/// Whether a recorded state or transition helped solve the problem.
///
/// `Conducive` ranks above `NonConducive`: a conducive record is a
/// constructive witness and wins every conflict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    NonConducive,
    Conducive,
}

impl Polarity {
    fn sigil(self) -> &'static str {
        match self {
            Polarity::Conducive => "+",
            Polarity::NonConducive => "-",
        }
    }
}

/// Verdict of a solvability query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solvability {
    KnownSolvable,
    KnownUnsolvable,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct StateEntry {
    solvability: Solvability,
    transitions: Vec<(SubSolution, Polarity)>,
}

impl StateEntry {
    fn new() -> Self {
        StateEntry {
            solvability: Solvability::Unknown,
            transitions: Vec::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SmError {
    #[error("fraction must lie in [0, 1], got {0}")]
    InvalidFraction(f64),
}

/// Errors raised while loading a persisted machine.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("missing or malformed header (expected `smot-sm 1`)")]
    BadHeader,
    #[error("unsupported format version `{0}` (expected 1)")]
    VersionMismatch(String),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

fn malformed(line: usize, msg: impl Into<String>) -> LoadError {
    LoadError::Malformed {
        line,
        msg: msg.into(),
    }
}

/// The four-tuple of recorded experience: sub-problem states, sub-solution
/// transitions, an optional initial state, and polarity marks on both.
///
/// Construction is single-writer; a finalized machine is immutable and can
/// be shared freely across concurrent readers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeStateMachine {
    initial: Option<StateKey>,
    entries: IndexMap<StateKey, StateEntry>,
}

impl KnowledgeStateMachine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn initial(&self) -> Option<&StateKey> {
        self.initial.as_ref()
    }

    pub fn set_initial(&mut self, key: StateKey) {
        self.initial = Some(key);
    }

    /// Number of recorded state entries (bare transition targets excluded).
    pub fn state_count(&self) -> usize {
        self.entries.len()
    }

    pub fn transition_count(&self) -> usize {
        self.entries.values().map(|e| e.transitions.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Iterate recorded states with their solvability marks, in insertion order.
    pub fn states(&self) -> impl Iterator<Item = (&StateKey, Solvability)> {
        self.entries.iter().map(|(k, e)| (k, e.solvability))
    }

    /// Record one transition. Idempotent upsert: the same `(from, label,
    /// target)` triple is stored once, and a conducive recording overrides a
    /// non-conducive one (never the reverse). Both endpoints gain entries;
    /// a conducive transition marks both endpoints solvable, a non-conducive
    /// one marks only the target unsolvable (the source may still lie on an
    /// untried viable path).
    pub fn record_transition(&mut self, from: StateKey, sol: SubSolution, polarity: Polarity) {
        self.entries
            .entry(sol.target.clone())
            .or_insert_with(StateEntry::new);
        match polarity {
            Polarity::Conducive => {
                self.upgrade_mark(&from, Solvability::KnownSolvable);
                self.upgrade_mark(&sol.target, Solvability::KnownSolvable);
            }
            Polarity::NonConducive => {
                self.upgrade_mark(&sol.target, Solvability::KnownUnsolvable);
            }
        }
        self.push_transition(from, sol, polarity);
    }

    /// Set a state's solvability mark directly. Conducive wins: an existing
    /// `KnownSolvable` mark is never downgraded.
    pub fn mark_solvability(&mut self, key: StateKey, polarity: Polarity) {
        let verdict = match polarity {
            Polarity::Conducive => Solvability::KnownSolvable,
            Polarity::NonConducive => Solvability::KnownUnsolvable,
        };
        self.upgrade_mark(&key, verdict);
    }

    fn upgrade_mark(&mut self, key: &StateKey, verdict: Solvability) {
        let entry = self
            .entries
            .entry(key.clone())
            .or_insert_with(StateEntry::new);
        match (entry.solvability, verdict) {
            (Solvability::KnownSolvable, _) => {}
            (_, Solvability::Unknown) => {}
            _ => entry.solvability = verdict,
        }
    }

    /// Append a transition without touching solvability marks and without
    /// creating a target entry. Used by `load` (exact reconstruction) and by
    /// builders that manage marks themselves.
    pub(crate) fn push_transition(&mut self, from: StateKey, sol: SubSolution, polarity: Polarity) {
        let entry = self.entries.entry(from).or_insert_with(StateEntry::new);
        for (existing, existing_pol) in entry.transitions.iter_mut() {
            if existing.label == sol.label && existing.target == sol.target {
                *existing_pol = (*existing_pol).max(polarity);
                return;
            }
        }
        entry.transitions.push((sol, polarity));
    }

    /// The conducive sub-solution query: every transition of `s` recorded
    /// conducive, in stored order. Empty when `s` is unknown or has none.
    pub fn query_conducive(&self, s: &StateKey) -> Vec<&SubSolution> {
        match self.entries.get(s) {
            Some(entry) => entry
                .transitions
                .iter()
                .filter(|(_, p)| *p == Polarity::Conducive)
                .map(|(sol, _)| sol)
                .collect(),
            None => Vec::new(),
        }
    }

    /// All transitions of `s` with their polarities, in stored order.
    pub fn transitions(&self, s: &StateKey) -> &[(SubSolution, Polarity)] {
        self.entries
            .get(s)
            .map(|e| e.transitions.as_slice())
            .unwrap_or(&[])
    }

    /// The sub-problem solvability query. States never recorded (or recorded
    /// only as the source of failed directions, with no verdict of their own)
    /// report `Unknown` so a caller can fall back to its own evaluator.
    pub fn query_solvability(&self, s: &StateKey) -> Solvability {
        self.entries
            .get(s)
            .map(|e| e.solvability)
            .unwrap_or(Solvability::Unknown)
    }

    /// Keep `ceil(fraction * state_count)` entries chosen uniformly by the
    /// seeded generator, preserving their relative order and contents.
    /// Transitions whose source entry was dropped disappear; dropped states
    /// still referenced as targets remain bare keys (and so query `Unknown`).
    pub fn subsample_states(&self, fraction: f64, seed: u64) -> Result<Self, SmError> {
        check_fraction(fraction)?;
        let n = self.entries.len();
        let keep = ceil_fraction(fraction, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chosen = rand::seq::index::sample(&mut rng, n, keep).into_vec();
        chosen.sort_unstable();
        let mut entries = IndexMap::with_capacity(keep);
        for idx in chosen {
            let (key, entry) = self.entries.get_index(idx).expect("sampled in range");
            entries.insert(key.clone(), entry.clone());
        }
        Ok(KnowledgeStateMachine {
            initial: self.initial.clone(),
            entries,
        })
    }

    /// Flip `ceil(fraction * conducive_entry_count)` uniformly chosen
    /// conducive entries to non-conducive, together with all of their
    /// conducive transitions. Deterministic per seed.
    pub fn inject_noise(&self, fraction: f64, seed: u64) -> Result<Self, SmError> {
        check_fraction(fraction)?;
        let conducive: Vec<usize> = self
            .entries
            .values()
            .enumerate()
            .filter(|(_, e)| e.solvability == Solvability::KnownSolvable)
            .map(|(i, _)| i)
            .collect();
        let flips = ceil_fraction(fraction, conducive.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chosen = rand::seq::index::sample(&mut rng, conducive.len(), flips).into_vec();
        chosen.sort_unstable();
        let mut out = self.clone();
        for pick in chosen {
            let idx = conducive[pick];
            let (_, entry) = out.entries.get_index_mut(idx).expect("index in range");
            entry.solvability = Solvability::KnownUnsolvable;
            for (_, polarity) in entry.transitions.iter_mut() {
                *polarity = Polarity::NonConducive;
            }
        }
        Ok(out)
    }

    /// Count of entries currently marked solvable.
    pub fn conducive_state_count(&self) -> usize {
        self.entries
            .values()
            .filter(|e| e.solvability == Solvability::KnownSolvable)
            .count()
    }

    /// Write the machine in the `smot-sm 1` line format.
    pub fn save<W: Write>(&self, sink: W) -> io::Result<()> {
        let mut w = BufWriter::new(sink);
        writeln!(w, "smot-sm 1")?;
        if let Some(initial) = &self.initial {
            writeln!(w, "I\t{}", escape(initial.as_str()))?;
        }
        for (key, entry) in &self.entries {
            match entry.solvability {
                Solvability::KnownSolvable => {
                    writeln!(w, "S\t{}\t+", escape(key.as_str()))?;
                }
                Solvability::KnownUnsolvable => {
                    writeln!(w, "S\t{}\t-", escape(key.as_str()))?;
                }
                Solvability::Unknown => {}
            }
            for (sol, polarity) in &entry.transitions {
                writeln!(
                    w,
                    "T\t{}\t{}\t{}\t{}",
                    escape(key.as_str()),
                    escape(&sol.label),
                    escape(sol.target.as_str()),
                    polarity.sigil()
                )?;
            }
        }
        w.flush()
    }

    pub fn save_to_path(&self, path: impl AsRef<Path>) -> io::Result<()> {
        self.save(File::create(path)?)
    }

    /// Parse a machine from the `smot-sm 1` line format. Reconstructs the
    /// stored structure exactly (no recording semantics are re-applied).
    pub fn load<R: BufRead>(source: R) -> Result<Self, LoadError> {
        let mut lines = source.lines();
        let header = lines.next().ok_or(LoadError::BadHeader)??;
        let mut head = header.split(' ');
        if head.next() != Some("smot-sm") {
            return Err(LoadError::BadHeader);
        }
        match head.next() {
            Some("1") => {}
            Some(v) => return Err(LoadError::VersionMismatch(v.to_string())),
            None => return Err(LoadError::BadHeader),
        }

        let mut sm = KnowledgeStateMachine::new();
        for (idx, line) in lines.enumerate() {
            let lineno = idx + 2;
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields[0] {
                "I" => {
                    if fields.len() != 2 {
                        return Err(malformed(lineno, "I record needs 1 field"));
                    }
                    sm.initial = Some(parse_key(fields[1], lineno)?);
                }
                "S" => {
                    if fields.len() != 3 {
                        return Err(malformed(lineno, "S record needs 2 fields"));
                    }
                    let key = parse_key(fields[1], lineno)?;
                    let polarity = parse_polarity(fields[2], lineno)?;
                    let entry = sm.entries.entry(key).or_insert_with(StateEntry::new);
                    if entry.solvability != Solvability::Unknown {
                        return Err(malformed(lineno, "duplicate S record for state"));
                    }
                    entry.solvability = match polarity {
                        Polarity::Conducive => Solvability::KnownSolvable,
                        Polarity::NonConducive => Solvability::KnownUnsolvable,
                    };
                }
                "T" => {
                    if fields.len() != 5 {
                        return Err(malformed(lineno, "T record needs 4 fields"));
                    }
                    let from = parse_key(fields[1], lineno)?;
                    let label = unescape(fields[2], lineno)?;
                    if label.is_empty() {
                        return Err(malformed(lineno, "empty transition label"));
                    }
                    let target = parse_key(fields[3], lineno)?;
                    let polarity = parse_polarity(fields[4], lineno)?;
                    let entry = sm.entries.entry(from).or_insert_with(StateEntry::new);
                    if entry
                        .transitions
                        .iter()
                        .any(|(s, _)| s.label == label && s.target == target)
                    {
                        return Err(malformed(lineno, "duplicate transition record"));
                    }
                    entry.transitions.push((SubSolution { label, target }, polarity));
                }
                other => {
                    return Err(malformed(lineno, format!("unknown record kind `{other}`")));
                }
            }
        }
        Ok(sm)
    }

    pub fn load_from_path(path: impl AsRef<Path>) -> Result<Self, LoadError> {
        Self::load(BufReader::new(File::open(path)?))
    }
}

fn check_fraction(fraction: f64) -> Result<(), SmError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(SmError::InvalidFraction(fraction));
    }
    Ok(())
}

fn ceil_fraction(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64).ceil() as usize).min(n)
}

fn parse_key(field: &str, lineno: usize) -> Result<StateKey, LoadError> {
    let key = unescape(field, lineno)?;
    if key.is_empty() {
        return Err(malformed(lineno, "empty state key"));
    }
    Ok(StateKey(key))
}

fn parse_polarity(field: &str, lineno: usize) -> Result<Polarity, LoadError> {
    match field {
        "+" => Ok(Polarity::Conducive),
        "-" => Ok(Polarity::NonConducive),
        other => Err(malformed(lineno, format!("bad polarity `{other}`"))),
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str, lineno: usize) -> Result<String, LoadError> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => {
                return Err(malformed(lineno, format!("bad escape `\\{other}`")));
            }
            None => return Err(malformed(lineno, "dangling backslash")),
        }
    }
    Ok(out)
}
