//! The 5x5 taxi grid world: drive to the passenger, pick them up, deliver
//! them to their destination. Walls block east/west movement only, as in
//! the classic layout.
//!
//! Coordinates run x = 0..4 west to east and y = 0..4 south to north. The
//! navigation state machine is keyed by (coordinate, target color) pairs
//! and records, for each pair, the moves that lie on some shortest path.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::io::BufRead;

use thiserror::Error;

use crate::backend::BackendError;
use crate::domain::ProblemDomain;
use crate::search::{BackendCalls, ProposerBackend, SearchAborted, SearchResult, SearchStatus};
use crate::sm::{KnowledgeStateMachine, Polarity, StateKey, SubSolution};
use crate::tree::{Outcome, ReasoningTree};

pub type Cell = (u8, u8);

pub const GRID: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Green,
    Yellow,
    Blue,
}

impl Color {
    pub const ALL: [Color; 4] = [Color::Red, Color::Green, Color::Yellow, Color::Blue];

    pub fn parse(s: &str) -> Result<Self, TaxiError> {
        match s {
            "red" => Ok(Color::Red),
            "green" => Ok(Color::Green),
            "yellow" => Ok(Color::Yellow),
            "blue" => Ok(Color::Blue),
            other => Err(TaxiError::BadColor(other.to_string())),
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Yellow => "yellow",
            Color::Blue => "blue",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaxiAction {
    North,
    South,
    East,
    West,
    Pickup,
    Dropoff,
}

impl TaxiAction {
    pub const MOVES: [TaxiAction; 4] = [
        TaxiAction::North,
        TaxiAction::South,
        TaxiAction::East,
        TaxiAction::West,
    ];

    pub fn parse(s: &str) -> Result<Self, TaxiError> {
        match s {
            "north" => Ok(TaxiAction::North),
            "south" => Ok(TaxiAction::South),
            "east" => Ok(TaxiAction::East),
            "west" => Ok(TaxiAction::West),
            "pickup" => Ok(TaxiAction::Pickup),
            "dropoff" => Ok(TaxiAction::Dropoff),
            other => Err(TaxiError::BadAction(other.to_string())),
        }
    }
}

impl fmt::Display for TaxiAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaxiAction::North => "north",
            TaxiAction::South => "south",
            TaxiAction::East => "east",
            TaxiAction::West => "west",
            TaxiAction::Pickup => "pickup",
            TaxiAction::Dropoff => "dropoff",
        })
    }
}

#[derive(Debug, Error)]
pub enum TaxiError {
    #[error("unknown color `{0}`")]
    BadColor(String),
    #[error("unknown action `{0}`")]
    BadAction(String),
    #[error("cannot decode state key `{0}`")]
    BadKey(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid map: {0}")]
    BadMap(String),
    #[error("invalid scenario: {0}")]
    BadScenario(String),
    #[error("cell ({0},{1}) cannot reach the {2} location")]
    Unreachable(u8, u8, Color),
}

/// Wall set (unordered pairs of horizontally adjacent cells) plus the four
/// colored locations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    walls: HashSet<(Cell, Cell)>,
    colors: [(Color, Cell); 4],
}

fn norm_pair(a: Cell, b: Cell) -> (Cell, Cell) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl GridMap {
    pub fn new(walls: Vec<(Cell, Cell)>, colors: [(Color, Cell); 4]) -> Result<Self, TaxiError> {
        let mut set = HashSet::new();
        for (a, b) in walls {
            if !in_grid(a) || !in_grid(b) {
                return Err(TaxiError::BadMap(format!("wall cell out of range: {a:?} {b:?}")));
            }
            if a.1 != b.1 || a.0.abs_diff(b.0) != 1 {
                return Err(TaxiError::BadMap(format!(
                    "walls sit between horizontally adjacent cells, got {a:?} {b:?}"
                )));
            }
            set.insert(norm_pair(a, b));
        }
        let mut cells: Vec<Cell> = colors.iter().map(|&(_, c)| c).collect();
        if cells.iter().any(|&c| !in_grid(c)) {
            return Err(TaxiError::BadMap("colored cell out of range".into()));
        }
        cells.sort_unstable();
        cells.dedup();
        if cells.len() != 4 {
            return Err(TaxiError::BadMap("colored cells must be distinct".into()));
        }
        let mut seen = HashSet::new();
        for (color, _) in &colors {
            if !seen.insert(*color) {
                return Err(TaxiError::BadMap(format!("color {color} placed twice")));
            }
        }
        Ok(GridMap { walls: set, colors })
    }

    /// The classic layout: Red (0,4), Green (4,4), Yellow (0,0), Blue (3,0),
    /// with six wall segments.
    pub fn default_map() -> Self {
        GridMap::new(
            vec![
                ((1, 4), (2, 4)),
                ((1, 3), (2, 3)),
                ((0, 1), (1, 1)),
                ((0, 0), (1, 0)),
                ((2, 1), (3, 1)),
                ((2, 0), (3, 0)),
            ],
            [
                (Color::Red, (0, 4)),
                (Color::Green, (4, 4)),
                (Color::Yellow, (0, 0)),
                (Color::Blue, (3, 0)),
            ],
        )
        .expect("default layout is valid")
    }

    pub fn wall_count(&self) -> usize {
        self.walls.len()
    }

    pub fn blocked(&self, a: Cell, b: Cell) -> bool {
        self.walls.contains(&norm_pair(a, b))
    }

    pub fn color_cell(&self, color: Color) -> Cell {
        self.colors
            .iter()
            .find(|(c, _)| *c == color)
            .map(|&(_, cell)| cell)
            .expect("all four colors are placed")
    }

    /// Where a movement action lands from `cell`; blocked moves stay put.
    pub fn move_cell(&self, cell: Cell, action: TaxiAction) -> Cell {
        let (x, y) = cell;
        let next = match action {
            TaxiAction::North if y + 1 < GRID => (x, y + 1),
            TaxiAction::South if y > 0 => (x, y - 1),
            TaxiAction::East if x + 1 < GRID => (x + 1, y),
            TaxiAction::West if x > 0 => (x - 1, y),
            _ => return cell,
        };
        match action {
            TaxiAction::East | TaxiAction::West if self.blocked(cell, next) => cell,
            _ => next,
        }
    }

    /// Breadth-first distances from every cell to `target`; `None` marks
    /// unreachable cells.
    pub fn distances_to(&self, target: Cell) -> [[Option<u32>; 5]; 5] {
        let mut dist = [[None; 5]; 5];
        dist[target.0 as usize][target.1 as usize] = Some(0);
        let mut queue = VecDeque::from([target]);
        while let Some(cell) = queue.pop_front() {
            let d = dist[cell.0 as usize][cell.1 as usize].expect("queued cells have distances");
            for action in TaxiAction::MOVES {
                let next = self.move_cell(cell, action);
                if next != cell && dist[next.0 as usize][next.1 as usize].is_none() {
                    dist[next.0 as usize][next.1 as usize] = Some(d + 1);
                    queue.push_back(next);
                }
            }
        }
        dist
    }

    /// Shortest-path distance between two cells, if connected.
    pub fn distance(&self, from: Cell, to: Cell) -> Option<u32> {
        self.distances_to(to)[from.0 as usize][from.1 as usize]
    }

    /// Parse a map override file: `color <name> = x,y` and `wall = x,y x,y`
    /// lines, `#` comments allowed.
    pub fn parse<R: BufRead>(source: R) -> Result<Self, TaxiError> {
        let mut walls = Vec::new();
        let mut colors: Vec<(Color, Cell)> = Vec::new();
        for (idx, line) in source.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| TaxiError::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (lhs, rhs) = body.split_once('=').ok_or_else(|| TaxiError::Parse {
                line: lineno,
                msg: "expected `key = value`".into(),
            })?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            if lhs == "wall" {
                let mut cells = rhs.split_whitespace();
                let a = parse_cell(cells.next().unwrap_or(""), lineno)?;
                let b = parse_cell(cells.next().unwrap_or(""), lineno)?;
                if cells.next().is_some() {
                    return Err(TaxiError::Parse {
                        line: lineno,
                        msg: "wall takes exactly two cells".into(),
                    });
                }
                walls.push((a, b));
            } else if let Some(name) = lhs.strip_prefix("color ") {
                let color = Color::parse(name.trim()).map_err(|e| TaxiError::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?;
                colors.push((color, parse_cell(rhs, lineno)?));
            } else {
                return Err(TaxiError::Parse {
                    line: lineno,
                    msg: format!("unknown map key `{lhs}`"),
                });
            }
        }
        if colors.len() != 4 {
            return Err(TaxiError::BadMap(format!(
                "expected 4 colors, got {}",
                colors.len()
            )));
        }
        let colors: [(Color, Cell); 4] = [colors[0], colors[1], colors[2], colors[3]];
        GridMap::new(walls, colors)
    }
}

fn in_grid(cell: Cell) -> bool {
    cell.0 < GRID && cell.1 < GRID
}

fn parse_cell(token: &str, lineno: usize) -> Result<Cell, TaxiError> {
    let bad = || TaxiError::Parse {
        line: lineno,
        msg: format!("bad cell `{token}` (expected x,y)"),
    };
    let (x, y) = token.split_once(',').ok_or_else(bad)?;
    let cell = (
        x.trim().parse::<u8>().map_err(|_| bad())?,
        y.trim().parse::<u8>().map_err(|_| bad())?,
    );
    if !in_grid(cell) {
        return Err(bad());
    }
    Ok(cell)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Passenger {
    AtLocation(Color),
    InTaxi,
    Delivered,
}

/// A full simulator state. The canonical key is `(x,y)|<passenger>|<dest>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TaxiState {
    pub taxi: Cell,
    pub passenger: Passenger,
    pub destination: Color,
}

impl TaxiState {
    pub fn key(&self) -> StateKey {
        let passenger = match self.passenger {
            Passenger::AtLocation(c) => format!("at:{c}"),
            Passenger::InTaxi => "in-taxi".to_string(),
            Passenger::Delivered => "delivered".to_string(),
        };
        StateKey::new(format!(
            "({},{})|{}|{}",
            self.taxi.0, self.taxi.1, passenger, self.destination
        ))
    }

    pub fn parse_key(key: &StateKey) -> Result<Self, TaxiError> {
        let bad = || TaxiError::BadKey(key.as_str().to_string());
        let mut parts = key.as_str().split('|');
        let coord = parts.next().ok_or_else(bad)?;
        let passenger = parts.next().ok_or_else(bad)?;
        let dest = parts.next().ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        let coord = coord
            .strip_prefix('(')
            .and_then(|c| c.strip_suffix(')'))
            .ok_or_else(bad)?;
        let taxi = parse_cell(coord, 0).map_err(|_| bad())?;
        let passenger = if let Some(color) = passenger.strip_prefix("at:") {
            Passenger::AtLocation(Color::parse(color).map_err(|_| bad())?)
        } else if passenger == "in-taxi" {
            Passenger::InTaxi
        } else if passenger == "delivered" {
            Passenger::Delivered
        } else {
            return Err(bad());
        };
        let destination = Color::parse(dest).map_err(|_| bad())?;
        Ok(TaxiState {
            taxi,
            passenger,
            destination,
        })
    }

    pub fn is_success(&self) -> bool {
        self.passenger == Passenger::Delivered
    }

    /// True iff the episode can still be completed from here: every cell it
    /// needs is reachable.
    pub fn deliverable(&self, map: &GridMap) -> bool {
        let dest = map.color_cell(self.destination);
        match self.passenger {
            Passenger::Delivered => true,
            Passenger::InTaxi => map.distance(self.taxi, dest).is_some(),
            Passenger::AtLocation(c) => {
                let origin = map.color_cell(c);
                map.distance(self.taxi, origin).is_some()
                    && map.distance(origin, dest).is_some()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaxiStep {
    pub state: TaxiState,
    /// False when the action was a lawful no-op (blocked move, illegal
    /// pickup or dropoff).
    pub changed: bool,
}

/// Apply one action. Total: every (state, action) pair yields a valid
/// state; illegal actions are lawful no-ops.
pub fn step(s: &TaxiState, action: TaxiAction, map: &GridMap) -> TaxiStep {
    let mut next = *s;
    match action {
        TaxiAction::North | TaxiAction::South | TaxiAction::East | TaxiAction::West => {
            next.taxi = map.move_cell(s.taxi, action);
        }
        TaxiAction::Pickup => {
            if let Passenger::AtLocation(c) = s.passenger {
                if map.color_cell(c) == s.taxi {
                    next.passenger = Passenger::InTaxi;
                }
            }
        }
        TaxiAction::Dropoff => {
            if s.passenger == Passenger::InTaxi && map.color_cell(s.destination) == s.taxi {
                next.passenger = Passenger::Delivered;
            }
        }
    }
    TaxiStep {
        changed: next != *s,
        state: next,
    }
}

/// Key of a navigation sub-problem: standing at `cell`, heading for `color`.
pub fn nav_key(cell: Cell, color: Color) -> StateKey {
    StateKey::new(format!("({},{})->{}", cell.0, cell.1, color))
}

/// Record, for every (coordinate, target color) pair with coordinate off the
/// target, the moves lying on some shortest path to the target. On the
/// default map that is 25*4 - 4 = 96 states; arrival cells stay bare keys.
pub fn build_navigation_sm(map: &GridMap) -> Result<KnowledgeStateMachine, TaxiError> {
    let mut sm = KnowledgeStateMachine::new();
    for color in Color::ALL {
        let target = map.color_cell(color);
        let dist = map.distances_to(target);
        for x in 0..GRID {
            for y in 0..GRID {
                let cell = (x, y);
                let d = dist[x as usize][y as usize]
                    .ok_or(TaxiError::Unreachable(x, y, color))?;
                if cell == target {
                    continue;
                }
                let from = nav_key(cell, color);
                sm.mark_solvability(from.clone(), Polarity::Conducive);
                for action in TaxiAction::MOVES {
                    let next = map.move_cell(cell, action);
                    if next != cell && dist[next.0 as usize][next.1 as usize] == Some(d - 1) {
                        sm.push_transition(
                            from.clone(),
                            SubSolution::new(action.to_string(), nav_key(next, color)),
                            Polarity::Conducive,
                        );
                    }
                }
            }
        }
    }
    Ok(sm)
}

/// Greedily follow recorded conducive moves from `from` toward `color`.
/// Returns the action sequence, or `None` when the recording runs out or
/// loops before arrival.
pub fn follow_navigation(
    sm: &KnowledgeStateMachine,
    map: &GridMap,
    from: Cell,
    color: Color,
) -> Option<Vec<TaxiAction>> {
    let target = map.color_cell(color);
    let mut cur = from;
    let mut seen = HashSet::from([cur]);
    let mut actions = Vec::new();
    while cur != target {
        let hits = sm.query_conducive(&nav_key(cur, color));
        let action = TaxiAction::parse(&hits.first()?.label).ok()?;
        cur = map.move_cell(cur, action);
        if !seen.insert(cur) {
            return None;
        }
        actions.push(action);
    }
    Some(actions)
}

/// One benchmark episode: where the taxi starts, where the passenger
/// waits, and where they are going.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scenario {
    pub taxi_start: Cell,
    pub origin: Color,
    pub destination: Color,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), TaxiError> {
        if !in_grid(self.taxi_start) {
            return Err(TaxiError::BadScenario("taxi start out of range".into()));
        }
        if self.origin == self.destination {
            return Err(TaxiError::BadScenario(
                "destination must differ from the passenger's origin".into(),
            ));
        }
        Ok(())
    }

    pub fn initial_state(&self) -> TaxiState {
        TaxiState {
            taxi: self.taxi_start,
            passenger: Passenger::AtLocation(self.origin),
            destination: self.destination,
        }
    }
}

/// The five built-in episodes. Long cross-map routes; all complete within
/// the 30-action cap under shortest-path driving.
pub fn default_scenarios() -> Vec<Scenario> {
    vec![
        Scenario {
            taxi_start: (2, 2),
            origin: Color::Blue,
            destination: Color::Yellow,
        },
        Scenario {
            taxi_start: (0, 0),
            origin: Color::Red,
            destination: Color::Green,
        },
        Scenario {
            taxi_start: (4, 0),
            origin: Color::Yellow,
            destination: Color::Red,
        },
        Scenario {
            taxi_start: (1, 1),
            origin: Color::Green,
            destination: Color::Yellow,
        },
        Scenario {
            taxi_start: (2, 4),
            origin: Color::Blue,
            destination: Color::Red,
        },
    ]
}

/// Parse a scenario file: blocks of `taxi_start = x,y`,
/// `passenger_origin = <color>`, `destination = <color>`; each `taxi_start`
/// begins a new scenario, `#` comments allowed.
pub fn parse_scenarios<R: BufRead>(source: R) -> Result<Vec<Scenario>, TaxiError> {
    struct Partial {
        taxi_start: Cell,
        origin: Option<Color>,
        destination: Option<Color>,
        line: usize,
    }
    let mut out: Vec<Scenario> = Vec::new();
    let mut current: Option<Partial> = None;
    let finish = |p: Partial| -> Result<Scenario, TaxiError> {
        let scenario = Scenario {
            taxi_start: p.taxi_start,
            origin: p.origin.ok_or(TaxiError::Parse {
                line: p.line,
                msg: "scenario missing passenger_origin".into(),
            })?,
            destination: p.destination.ok_or(TaxiError::Parse {
                line: p.line,
                msg: "scenario missing destination".into(),
            })?,
        };
        scenario.validate()?;
        Ok(scenario)
    };
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| TaxiError::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (lhs, rhs) = body.split_once('=').ok_or_else(|| TaxiError::Parse {
            line: lineno,
            msg: "expected `key = value`".into(),
        })?;
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        match lhs {
            "taxi_start" => {
                if let Some(done) = current.take() {
                    out.push(finish(done)?);
                }
                current = Some(Partial {
                    taxi_start: parse_cell(rhs, lineno)?,
                    origin: None,
                    destination: None,
                    line: lineno,
                });
            }
            "passenger_origin" | "destination" => {
                let slot = current.as_mut().ok_or_else(|| TaxiError::Parse {
                    line: lineno,
                    msg: "scenario must start with taxi_start".into(),
                })?;
                let color = Color::parse(rhs).map_err(|e| TaxiError::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?;
                if lhs == "passenger_origin" {
                    slot.origin = Some(color);
                } else {
                    slot.destination = Some(color);
                }
            }
            other => {
                return Err(TaxiError::Parse {
                    line: lineno,
                    msg: format!("unknown scenario key `{other}`"),
                });
            }
        }
    }
    if let Some(done) = current.take() {
        out.push(finish(done)?);
    }
    Ok(out)
}

/// Key-level adapter for generic search over full taxi states.
#[derive(Debug, Clone)]
pub struct TaxiDomain {
    map: GridMap,
}

impl TaxiDomain {
    pub fn new(map: GridMap) -> Self {
        TaxiDomain { map }
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }
}

impl ProblemDomain for TaxiDomain {
    fn id(&self) -> &'static str {
        "taxi"
    }

    fn is_success(&self, s: &StateKey) -> bool {
        TaxiState::parse_key(s).map(|st| st.is_success()).unwrap_or(false)
    }

    fn is_terminal(&self, s: &StateKey) -> bool {
        self.is_success(s)
    }

    fn successors(&self, s: &StateKey) -> Vec<SubSolution> {
        let Ok(state) = TaxiState::parse_key(s) else {
            return Vec::new();
        };
        const ALL: [TaxiAction; 6] = [
            TaxiAction::North,
            TaxiAction::South,
            TaxiAction::East,
            TaxiAction::West,
            TaxiAction::Pickup,
            TaxiAction::Dropoff,
        ];
        ALL.iter()
            .filter_map(|&a| {
                let outcome = step(&state, a, &self.map);
                outcome
                    .changed
                    .then(|| SubSolution::new(a.to_string(), outcome.state.key()))
            })
            .collect()
    }
}

/// Drive one episode with the staged policy: head for the passenger, pick
/// up, head for the destination, drop off. Moves come from the navigation
/// machine when recorded; otherwise the fallback proposer is asked for one
/// action (ticking the proposer counter). With no recording and no
/// fallback the episode fails on the spot.
pub fn run_policy_episode(
    map: &GridMap,
    scenario: &Scenario,
    sm: &KnowledgeStateMachine,
    mut fallback: Option<&mut dyn ProposerBackend>,
    action_cap: usize,
) -> Result<SearchResult, Box<SearchAborted>> {
    let mut state = scenario.initial_state();
    let mut tree = ReasoningTree::new(state.key());
    let mut calls = BackendCalls::default();
    let mut tip = tree.root();

    for _ in 0..action_cap {
        if state.is_success() {
            break;
        }
        let goal = match state.passenger {
            Passenger::AtLocation(c) => c,
            Passenger::InTaxi => state.destination,
            Passenger::Delivered => unreachable!("handled above"),
        };
        let action = if state.taxi == map.color_cell(goal) {
            match state.passenger {
                Passenger::AtLocation(_) => TaxiAction::Pickup,
                _ => TaxiAction::Dropoff,
            }
        } else {
            let recorded = sm
                .query_conducive(&nav_key(state.taxi, goal))
                .first()
                .and_then(|sol| TaxiAction::parse(&sol.label).ok());
            match recorded {
                Some(action) => action,
                None => match fallback.as_deref_mut() {
                    Some(backend) => {
                        calls.proposer += 1;
                        let sols = match backend.propose(&state.key(), 1) {
                            Ok(sols) => sols,
                            Err(error) => {
                                return Err(Box::new(SearchAborted {
                                    error,
                                    backend_calls: calls,
                                    tree,
                                }))
                            }
                        };
                        match sols
                            .iter()
                            .find_map(|sol| TaxiAction::parse(&sol.label).ok())
                        {
                            Some(action) => action,
                            None => break, // nothing actionable proposed
                        }
                    }
                    None => break,
                },
            }
        };
        state = step(&state, action, map).state;
        tip = tree
            .add_child(tip, action.to_string(), state.key())
            .expect("chain tip has no outcome");
    }

    let (status, trajectory) = if state.is_success() {
        tree.set_outcome(tip, Outcome::Success).expect("chain tip");
        let steps = tree
            .path_from_root(tip)
            .into_iter()
            .map(|(label, s)| SubSolution::new(label, s))
            .collect();
        (SearchStatus::Solved, steps)
    } else {
        // Inconclusive: the cap (or a silent policy) cut the episode short.
        (SearchStatus::StepLimit, Vec::new())
    };
    Ok(SearchResult {
        status,
        trajectory,
        backend_calls: calls,
        tree,
    })
}

/// Fallback that always proposes the given action, whatever the state.
/// Stands in for a backend with no sense of direction.
pub struct FixedActionProposer(pub TaxiAction);

impl ProposerBackend for FixedActionProposer {
    fn propose(&mut self, s: &StateKey, _breadth: usize) -> Result<Vec<SubSolution>, BackendError> {
        let state = TaxiState::parse_key(s)
            .map_err(|e| BackendError::Domain(e.to_string()))?;
        let map = GridMap::default_map();
        let next = step(&state, self.0, &map).state;
        Ok(vec![SubSolution::new(self.0.to_string(), next.key())])
    }
}
