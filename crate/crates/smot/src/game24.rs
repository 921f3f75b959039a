//! The 24-point game: combine the given numbers with +, -, *, / so the last
//! remaining value is exactly 24. All arithmetic is exact-rational, since
//! division creates fractions and the success test is exact equality.

use std::fmt;
use std::io::BufRead;

use num_rational::Rational64;
use num_traits::Zero;
use thiserror::Error;

use crate::domain::ProblemDomain;
use crate::sm::{StateKey, SubSolution};
use crate::tree::{Outcome, ReasoningTree};

/// The winning value.
pub fn target() -> Rational64 {
    Rational64::from_integer(24)
}

#[derive(Debug, Error)]
pub enum Game24Error {
    #[error("a state holds between 1 and 4 numbers, got {0}")]
    BadArity(usize),
    #[error("need at least two numbers to combine")]
    NoMoves,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cannot decode state key `{0}`")]
    BadKey(String),
    #[error("step `{0}` is not a legal move here")]
    IllegalStep(String),
    #[error("operand {operand} unavailable for `{label}`")]
    MissingOperand { operand: String, label: String },
    #[error("trajectory ends at {0}, not 24")]
    NotTarget(String),
}

/// Render a rational without a denominator when it is integral.
fn render(r: Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rational(token: &str) -> Option<Rational64> {
    match token.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.parse().ok()?;
            let d: i64 = d.parse().ok()?;
            if d == 0 {
                return None;
            }
            Some(Rational64::new(n, d))
        }
        None => token.parse::<i64>().ok().map(Rational64::from_integer),
    }
}

/// A multiset of 1-4 exact rationals, kept sorted ascending so identical
/// multisets share one canonical key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Game24State {
    numbers: Vec<Rational64>,
}

impl Game24State {
    pub fn new(numbers: impl Into<Vec<Rational64>>) -> Result<Self, Game24Error> {
        let mut numbers = numbers.into();
        if numbers.is_empty() || numbers.len() > 4 {
            return Err(Game24Error::BadArity(numbers.len()));
        }
        numbers.sort_unstable();
        Ok(Game24State { numbers })
    }

    pub fn from_ints(numbers: &[i64]) -> Result<Self, Game24Error> {
        Self::new(
            numbers
                .iter()
                .map(|&n| Rational64::from_integer(n))
                .collect::<Vec<_>>(),
        )
    }

    pub fn numbers(&self) -> &[Rational64] {
        &self.numbers
    }

    /// Canonical key: lowest-terms rationals, ascending, space-separated.
    pub fn key(&self) -> StateKey {
        let parts: Vec<String> = self.numbers.iter().map(|&n| render(n)).collect();
        StateKey::new(parts.join(" "))
    }

    pub fn parse_key(key: &StateKey) -> Result<Self, Game24Error> {
        let numbers: Option<Vec<Rational64>> =
            key.as_str().split(' ').map(parse_rational).collect();
        match numbers {
            Some(ns) if !ns.is_empty() && ns.len() <= 4 => Game24State::new(ns)
                .map_err(|_| Game24Error::BadKey(key.as_str().to_string())),
            _ => Err(Game24Error::BadKey(key.as_str().to_string())),
        }
    }

    /// True iff the state is exactly the single number 24.
    pub fn is_success(&self) -> bool {
        self.numbers.len() == 1 && self.numbers[0] == target()
    }

    pub fn is_terminal(&self) -> bool {
        self.numbers.len() == 1
    }

    /// All distinct (move, successor) applications of one arithmetic step:
    /// pick two numbers, combine them, keep the rest. Both orders are
    /// generated for - and /, division by zero skipped, duplicates (same
    /// label and same successor) removed, result sorted by label.
    pub fn successors(&self) -> Result<Vec<(Game24Move, Game24State)>, Game24Error> {
        if self.numbers.len() < 2 {
            return Err(Game24Error::NoMoves);
        }
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for i in 0..self.numbers.len() {
            for j in (i + 1)..self.numbers.len() {
                let (a, b) = (self.numbers[i], self.numbers[j]);
                let rest: Vec<Rational64> = self
                    .numbers
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, &n)| n)
                    .collect();
                let candidates = [
                    Game24Move::new(a, Op::Add, b),
                    Game24Move::new(b, Op::Sub, a),
                    Game24Move::new(a, Op::Sub, b),
                    Game24Move::new(a, Op::Mul, b),
                    Game24Move::new(b, Op::Div, a),
                    Game24Move::new(a, Op::Div, b),
                ];
                for mv in candidates.into_iter().flatten() {
                    let mut next = rest.clone();
                    next.push(mv.result());
                    let next = Game24State::new(next).expect("arity shrinks by one");
                    if seen.insert((mv.label(), next.key())) {
                        out.push((mv, next));
                    }
                }
            }
        }
        out.sort_by(|(m1, s1), (m2, s2)| {
            m1.label().cmp(&m2.label()).then_with(|| s1.key().cmp(&s2.key()))
        });
        Ok(out)
    }

    /// Exhaustive backtracking: true iff some complete combination of the
    /// remaining numbers reaches exactly 24.
    pub fn brute_force_solvable(&self) -> bool {
        if self.numbers.len() == 1 {
            return self.is_success();
        }
        self.successors()
            .expect("two or more numbers")
            .into_iter()
            .any(|(_, next)| next.brute_force_solvable())
    }

    /// The full successor tree with success/failure leaf labels, flagged
    /// exhaustive.
    pub fn exhaustive_tree(&self) -> ReasoningTree {
        fn expand(state: &Game24State, tree: &mut ReasoningTree, node: usize) {
            if state.is_terminal() {
                let outcome = if state.is_success() {
                    Outcome::Success
                } else {
                    Outcome::Failure
                };
                tree.set_outcome(node, outcome).expect("fresh leaf");
                return;
            }
            for (mv, next) in state.successors().expect("non-terminal") {
                let child = tree
                    .add_child(node, mv.label(), next.key())
                    .expect("parent has no outcome");
                expand(&next, tree, child);
            }
        }
        let mut tree = ReasoningTree::new(self.key());
        let root = tree.root();
        expand(self, &mut tree, root);
        tree.mark_exhaustive(true);
        tree
    }
}

impl fmt::Display for Game24State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Mul => "*",
            Op::Div => "/",
        })
    }
}

/// One arithmetic step `lhs op rhs = result`, with exact operands.
/// Commutative moves are normalized to `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Game24Move {
    lhs: Rational64,
    op: Op,
    rhs: Rational64,
    result: Rational64,
}

impl Game24Move {
    /// Returns `None` for division by zero.
    pub fn new(lhs: Rational64, op: Op, rhs: Rational64) -> Option<Self> {
        let (lhs, rhs) = match op {
            Op::Add | Op::Mul if rhs < lhs => (rhs, lhs),
            _ => (lhs, rhs),
        };
        let result = match op {
            Op::Add => lhs + rhs,
            Op::Sub => lhs - rhs,
            Op::Mul => lhs * rhs,
            Op::Div => {
                if rhs.is_zero() {
                    return None;
                }
                lhs / rhs
            }
        };
        Some(Game24Move {
            lhs,
            op,
            rhs,
            result,
        })
    }

    pub fn operands(&self) -> (Rational64, Rational64) {
        (self.lhs, self.rhs)
    }

    pub fn op(&self) -> Op {
        self.op
    }

    pub fn result(&self) -> Rational64 {
        self.result
    }

    pub fn label(&self) -> String {
        format!(
            "{}{}{}={}",
            render(self.lhs),
            self.op,
            render(self.rhs),
            render(self.result)
        )
    }
}

/// Recover typed moves from recorded search steps, checking each step is a
/// legal successor of the previous state.
pub fn moves_from_steps(
    start: &Game24State,
    steps: &[SubSolution],
) -> Result<Vec<Game24Move>, Game24Error> {
    let mut state = start.clone();
    let mut moves = Vec::with_capacity(steps.len());
    for step in steps {
        let next = state
            .successors()?
            .into_iter()
            .find(|(mv, s)| mv.label() == step.label && s.key() == step.target);
        match next {
            Some((mv, s)) => {
                moves.push(mv);
                state = s;
            }
            None => return Err(Game24Error::IllegalStep(step.label.clone())),
        }
    }
    Ok(moves)
}

#[derive(Clone)]
enum Expr {
    Literal(Rational64),
    Binary(Op, Box<Expr>, Box<Expr>),
}

impl Expr {
    fn eval(&self) -> Rational64 {
        match self {
            Expr::Literal(n) => *n,
            Expr::Binary(op, l, r) => {
                let (l, r) = (l.eval(), r.eval());
                match op {
                    Op::Add => l + r,
                    Op::Sub => l - r,
                    Op::Mul => l * r,
                    Op::Div => l / r,
                }
            }
        }
    }

    fn literals(&self, out: &mut Vec<Rational64>) {
        match self {
            Expr::Literal(n) => out.push(*n),
            Expr::Binary(_, l, r) => {
                l.literals(out);
                r.literals(out);
            }
        }
    }

    fn text(&self) -> String {
        match self {
            Expr::Literal(n) if *n < Rational64::zero() => format!("({})", render(*n)),
            Expr::Literal(n) => render(*n),
            Expr::Binary(op, l, r) => format!("({}{}{})", l.text(), op, r.text()),
        }
    }
}

/// Replay a move trajectory into a single parenthesized infix expression
/// that uses each starting number exactly once and evaluates to exactly 24.
/// The expression tree is re-evaluated from its literals before returning.
pub fn format_equation(start: &Game24State, moves: &[Game24Move]) -> Result<String, Game24Error> {
    let mut pool: Vec<(Rational64, Expr)> = start
        .numbers
        .iter()
        .map(|&n| (n, Expr::Literal(n)))
        .collect();
    for mv in moves {
        let (lhs, rhs) = mv.operands();
        let take = |pool: &mut Vec<(Rational64, Expr)>, v: Rational64| {
            pool.iter()
                .position(|(value, _)| *value == v)
                .map(|idx| pool.remove(idx).1)
        };
        let left = take(&mut pool, lhs).ok_or_else(|| Game24Error::MissingOperand {
            operand: render(lhs),
            label: mv.label(),
        })?;
        let right = take(&mut pool, rhs).ok_or_else(|| Game24Error::MissingOperand {
            operand: render(rhs),
            label: mv.label(),
        })?;
        pool.push((mv.result(), Expr::Binary(mv.op(), Box::new(left), Box::new(right))));
    }
    if pool.len() != 1 {
        return Err(Game24Error::NotTarget(
            pool.iter().map(|(v, _)| render(*v)).collect::<Vec<_>>().join(" "),
        ));
    }
    let expr = pool.pop().expect("one expression left").1;
    let value = expr.eval();
    if value != target() {
        return Err(Game24Error::NotTarget(render(value)));
    }
    let mut literals = Vec::new();
    expr.literals(&mut literals);
    literals.sort_unstable();
    if literals != start.numbers {
        return Err(Game24Error::NotTarget(format!(
            "expression uses {:?}",
            literals
        )));
    }
    Ok(expr.text())
}

/// Parse a problem file: one puzzle of four whitespace-separated integers
/// per line, `#` starts a comment.
pub fn load_problem_set<R: BufRead>(source: R) -> Result<Vec<Game24State>, Game24Error> {
    let mut out = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Game24Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let numbers: Result<Vec<i64>, _> =
            body.split_whitespace().map(|t| t.parse::<i64>()).collect();
        let numbers = numbers.map_err(|e| Game24Error::Parse {
            line: lineno,
            msg: format!("bad integer: {e}"),
        })?;
        if numbers.len() != 4 {
            return Err(Game24Error::Parse {
                line: lineno,
                msg: format!("expected 4 numbers, got {}", numbers.len()),
            });
        }
        out.push(Game24State::from_ints(&numbers).expect("four numbers"));
    }
    Ok(out)
}

/// The bundled 1,000-puzzle corpus, ordered easiest to hardest. See the
/// file header and README for how it was assembled.
pub fn vendored_problems() -> Vec<Game24State> {
    load_problem_set(include_str!("../data/problems24.txt").as_bytes())
        .expect("bundled corpus parses")
}

/// Key-level adapter for the search layer.
#[derive(Debug, Clone, Copy, Default)]
pub struct Game24Domain;

impl ProblemDomain for Game24Domain {
    fn id(&self) -> &'static str {
        "game24"
    }

    fn is_success(&self, s: &StateKey) -> bool {
        Game24State::parse_key(s).map(|st| st.is_success()).unwrap_or(false)
    }

    fn is_terminal(&self, s: &StateKey) -> bool {
        Game24State::parse_key(s).map(|st| st.is_terminal()).unwrap_or(false)
    }

    fn successors(&self, s: &StateKey) -> Vec<SubSolution> {
        let Ok(state) = Game24State::parse_key(s) else {
            return Vec::new();
        };
        match state.successors() {
            Ok(list) => list
                .into_iter()
                .map(|(mv, next)| SubSolution::new(mv.label(), next.key()))
                .collect(),
            Err(_) => Vec::new(),
        }
    }
}
