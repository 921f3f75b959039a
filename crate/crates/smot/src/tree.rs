//! Recorded exploration trees whose leaves are labeled success or failure.
//!
//! Searches emit these as they run; the extraction pass turns them into
//! state-machine entries. A tree flagged *exhaustive* promises that every
//! expanded node's complete successor set is present, which licenses hard
//! negatives during extraction.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::sm::StateKey;

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Success,
    Failure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub state: StateKey,
    /// Label of the edge from the parent; `None` exactly on the root.
    pub incoming_label: Option<String>,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Set only on leaves. A leaf without an outcome is inconclusive
    /// (expansion was cut off, not proven failed).
    pub outcome: Option<Outcome>,
}

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("node {0} does not exist")]
    NoSuchNode(NodeId),
    #[error("node {0} already has an outcome; cannot add children")]
    ChildUnderOutcome(NodeId),
    #[error("node {0} has children; cannot set a leaf outcome")]
    OutcomeOnInternal(NodeId),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("missing or malformed header (expected `smot-tree 1`)")]
    BadHeader,
    #[error("unsupported format version `{0}` (expected 1)")]
    VersionMismatch(String),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

fn malformed(line: usize, msg: impl Into<String>) -> TreeError {
    TreeError::Malformed {
        line,
        msg: msg.into(),
    }
}

/// A rooted exploration tree. Nodes are stored in creation order; the root
/// is node 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReasoningTree {
    nodes: Vec<TreeNode>,
    exhaustive: bool,
}

impl ReasoningTree {
    pub fn new(root_state: StateKey) -> Self {
        ReasoningTree {
            nodes: vec![TreeNode {
                state: root_state,
                incoming_label: None,
                parent: None,
                children: Vec::new(),
                outcome: None,
            }],
            exhaustive: false,
        }
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a tree always has its root
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn mark_exhaustive(&mut self, flag: bool) {
        self.exhaustive = flag;
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn get(&self, id: NodeId) -> Option<&TreeNode> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &TreeNode)> {
        self.nodes.iter().enumerate()
    }

    pub fn add_child(
        &mut self,
        parent: NodeId,
        label: impl Into<String>,
        state: StateKey,
    ) -> Result<NodeId, TreeError> {
        if parent >= self.nodes.len() {
            return Err(TreeError::NoSuchNode(parent));
        }
        if self.nodes[parent].outcome.is_some() {
            return Err(TreeError::ChildUnderOutcome(parent));
        }
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            state,
            incoming_label: Some(label.into()),
            parent: Some(parent),
            children: Vec::new(),
            outcome: None,
        });
        self.nodes[parent].children.push(id);
        Ok(id)
    }

    pub fn set_outcome(&mut self, id: NodeId, outcome: Outcome) -> Result<(), TreeError> {
        if id >= self.nodes.len() {
            return Err(TreeError::NoSuchNode(id));
        }
        if !self.nodes[id].children.is_empty() {
            return Err(TreeError::OutcomeOnInternal(id));
        }
        self.nodes[id].outcome = Some(outcome);
        Ok(())
    }

    /// Number of edges on the path from the root to `id`.
    pub fn depth(&self, id: NodeId) -> usize {
        let mut depth = 0;
        let mut cur = id;
        while let Some(parent) = self.nodes[cur].parent {
            depth += 1;
            cur = parent;
        }
        depth
    }

    /// The (label, state) steps from the root down to `id`.
    pub fn path_from_root(&self, id: NodeId) -> Vec<(String, StateKey)> {
        let mut steps = Vec::new();
        let mut cur = id;
        while let Some(parent) = self.nodes[cur].parent {
            let label = self.nodes[cur]
                .incoming_label
                .clone()
                .expect("non-root nodes carry labels");
            steps.push((label, self.nodes[cur].state.clone()));
            cur = parent;
        }
        steps.reverse();
        steps
    }

    /// Node ids in breadth-first order from the root.
    pub fn bfs_order(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut queue = std::collections::VecDeque::from([self.root()]);
        while let Some(id) = queue.pop_front() {
            order.push(id);
            queue.extend(self.nodes[id].children.iter().copied());
        }
        order
    }

    /// Write the tree in the `smot-tree 1` line format.
    pub fn save<W: Write>(&self, sink: W) -> io::Result<()> {
        let mut w = BufWriter::new(sink);
        if self.exhaustive {
            writeln!(w, "smot-tree 1 exhaustive")?;
        } else {
            writeln!(w, "smot-tree 1")?;
        }
        for (id, node) in self.nodes.iter().enumerate() {
            match node.outcome {
                Some(Outcome::Success) => {
                    writeln!(w, "N\t{id}\t{}\tsuccess", escape(node.state.as_str()))?
                }
                Some(Outcome::Failure) => {
                    writeln!(w, "N\t{id}\t{}\tfailure", escape(node.state.as_str()))?
                }
                None => writeln!(w, "N\t{id}\t{}", escape(node.state.as_str()))?,
            }
        }
        for (id, node) in self.nodes.iter().enumerate() {
            for &child in &node.children {
                let label = self.nodes[child]
                    .incoming_label
                    .as_deref()
                    .expect("children carry labels");
                writeln!(w, "E\t{id}\t{}\t{child}", escape(label))?;
            }
        }
        w.flush()
    }

    pub fn save_to_path(&self, path: impl AsRef<Path>) -> io::Result<()> {
        self.save(File::create(path)?)
    }

    /// Parse a tree from the `smot-tree 1` line format. Node ids in the file
    /// may be arbitrary integers; they are remapped to creation order with
    /// the root first.
    pub fn load<R: BufRead>(source: R) -> Result<Self, TreeError> {
        let mut lines = source.lines();
        let header = lines.next().ok_or(TreeError::BadHeader)??;
        let mut head = header.split(' ');
        if head.next() != Some("smot-tree") {
            return Err(TreeError::BadHeader);
        }
        let exhaustive = match head.next() {
            Some("1") => match head.next() {
                None => false,
                Some("exhaustive") => true,
                Some(_) => return Err(TreeError::BadHeader),
            },
            Some(v) => return Err(TreeError::VersionMismatch(v.to_string())),
            None => return Err(TreeError::BadHeader),
        };

        struct RawNode {
            state: String,
            outcome: Option<Outcome>,
            lineno: usize,
        }
        let mut raw: HashMap<i64, RawNode> = HashMap::new();
        let mut raw_order: Vec<i64> = Vec::new();
        let mut edges: Vec<(i64, String, i64, usize)> = Vec::new();

        for (idx, line) in lines.enumerate() {
            let lineno = idx + 2;
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields[0] {
                "N" => {
                    if fields.len() < 3 || fields.len() > 4 {
                        return Err(malformed(lineno, "N record needs 2 or 3 fields"));
                    }
                    let id: i64 = fields[1]
                        .parse()
                        .map_err(|_| malformed(lineno, "bad node id"))?;
                    let state = unescape(fields[2], lineno)?;
                    if state.is_empty() {
                        return Err(malformed(lineno, "empty state key"));
                    }
                    let outcome = match fields.get(3) {
                        None => None,
                        Some(&"success") => Some(Outcome::Success),
                        Some(&"failure") => Some(Outcome::Failure),
                        Some(other) => {
                            return Err(malformed(lineno, format!("bad outcome `{other}`")))
                        }
                    };
                    if raw
                        .insert(
                            id,
                            RawNode {
                                state,
                                outcome,
                                lineno,
                            },
                        )
                        .is_some()
                    {
                        return Err(malformed(lineno, format!("duplicate node id {id}")));
                    }
                    raw_order.push(id);
                }
                "E" => {
                    if fields.len() != 4 {
                        return Err(malformed(lineno, "E record needs 3 fields"));
                    }
                    let parent: i64 = fields[1]
                        .parse()
                        .map_err(|_| malformed(lineno, "bad parent id"))?;
                    let label = unescape(fields[2], lineno)?;
                    if label.is_empty() {
                        return Err(malformed(lineno, "empty edge label"));
                    }
                    let child: i64 = fields[3]
                        .parse()
                        .map_err(|_| malformed(lineno, "bad child id"))?;
                    edges.push((parent, label, child, lineno));
                }
                other => {
                    return Err(malformed(lineno, format!("unknown record kind `{other}`")));
                }
            }
        }

        // Exactly one node must lack an incoming edge: the root.
        let mut incoming: HashMap<i64, usize> = HashMap::new();
        for (parent, _, child, lineno) in &edges {
            if !raw.contains_key(parent) {
                return Err(malformed(*lineno, format!("edge from unknown node {parent}")));
            }
            if !raw.contains_key(child) {
                return Err(malformed(*lineno, format!("edge to unknown node {child}")));
            }
            *incoming.entry(*child).or_default() += 1;
        }
        if incoming.values().any(|&n| n > 1) {
            return Err(malformed(0, "node with multiple parents"));
        }
        let roots: Vec<i64> = raw_order
            .iter()
            .copied()
            .filter(|id| !incoming.contains_key(id))
            .collect();
        if roots.len() != 1 {
            return Err(malformed(
                0,
                format!("expected exactly one root, found {}", roots.len()),
            ));
        }
        let root_id = roots[0];

        let root_raw = &raw[&root_id];
        let mut tree = ReasoningTree::new(StateKey::new(root_raw.state.clone()));
        tree.exhaustive = exhaustive;
        let mut map: HashMap<i64, NodeId> = HashMap::from([(root_id, 0)]);

        // Attach edges; parents must appear before children, so iterate
        // until fixpoint over the remaining edge list.
        let mut pending = edges;
        while !pending.is_empty() {
            let before = pending.len();
            let mut rest = Vec::new();
            for (parent, label, child, lineno) in pending {
                match map.get(&parent).copied() {
                    Some(parent_idx) => {
                        if map.contains_key(&child) {
                            return Err(malformed(lineno, "cycle or duplicate edge"));
                        }
                        let state = StateKey::new(raw[&child].state.clone());
                        let idx = tree
                            .add_child(parent_idx, label, state)
                            .expect("parent exists and has no outcome yet");
                        map.insert(child, idx);
                    }
                    None => rest.push((parent, label, child, lineno)),
                }
            }
            if rest.len() == before {
                return Err(malformed(0, "disconnected or cyclic edges"));
            }
            pending = rest;
        }

        for id in raw_order {
            let node = &raw[&id];
            if let Some(outcome) = node.outcome {
                let idx = map[&id];
                tree.set_outcome(idx, outcome)
                    .map_err(|_| malformed(node.lineno, "outcome on internal node"))?;
            }
        }
        Ok(tree)
    }

    pub fn load_from_path(path: impl AsRef<Path>) -> Result<Self, TreeError> {
        Self::load(BufReader::new(File::open(path)?))
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

fn unescape(s: &str, lineno: usize) -> Result<String, TreeError> {
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
            Some(other) => return Err(malformed(lineno, format!("bad escape `\\{other}`"))),
            None => return Err(malformed(lineno, "dangling backslash")),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(s: &str) -> StateKey {
        StateKey::new(s)
    }

    #[test]
    fn build_and_walk() {
        let mut t = ReasoningTree::new(key("root"));
        let a = t.add_child(t.root(), "a", key("sa")).unwrap();
        let b = t.add_child(t.root(), "b", key("sb")).unwrap();
        let aa = t.add_child(a, "aa", key("saa")).unwrap();
        t.set_outcome(aa, Outcome::Success).unwrap();
        t.set_outcome(b, Outcome::Failure).unwrap();

        assert_eq!(t.len(), 4);
        assert_eq!(t.depth(aa), 2);
        let path = t.path_from_root(aa);
        assert_eq!(
            path,
            vec![("a".into(), key("sa")), ("aa".into(), key("saa"))]
        );
        assert_eq!(t.bfs_order(), vec![0, a, b, aa]);
    }

    #[test]
    fn outcome_rules_enforced() {
        let mut t = ReasoningTree::new(key("root"));
        let a = t.add_child(t.root(), "a", key("sa")).unwrap();
        assert!(t.set_outcome(t.root(), Outcome::Failure).is_err());
        t.set_outcome(a, Outcome::Failure).unwrap();
        assert!(t.add_child(a, "x", key("sx")).is_err());
    }

    #[test]
    fn round_trip() {
        let mut t = ReasoningTree::new(key("r"));
        let a = t.add_child(t.root(), "left", key("sa")).unwrap();
        let b = t.add_child(t.root(), "right", key("sb")).unwrap();
        t.set_outcome(b, Outcome::Failure).unwrap();
        let c = t.add_child(a, "down\twith\ttabs", key("sc")).unwrap();
        t.set_outcome(c, Outcome::Success).unwrap();
        t.mark_exhaustive(true);

        let mut buf = Vec::new();
        t.save(&mut buf).unwrap();
        let loaded = ReasoningTree::load(&buf[..]).unwrap();
        assert_eq!(loaded, t);
    }

    #[test]
    fn load_requires_single_root() {
        let text = "smot-tree 1\nN\t0\ta\nN\t1\tb\n";
        let err = ReasoningTree::load(text.as_bytes()).unwrap_err();
        assert!(matches!(err, TreeError::Malformed { .. }));
    }

    #[test]
    fn load_accepts_arbitrary_ids() {
        let text = "smot-tree 1\nN\t42\troot\nN\t7\tleaf\tsuccess\nE\t42\tstep\t7\n";
        let t = ReasoningTree::load(text.as_bytes()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.node(0).state, key("root"));
        assert_eq!(t.node(1).outcome, Some(Outcome::Success));
        assert!(!t.is_exhaustive());
    }

    #[test]
    fn load_rejects_versions_and_cycles() {
        let err = ReasoningTree::load("smot-tree 9\n".as_bytes()).unwrap_err();
        assert!(matches!(err, TreeError::VersionMismatch(_)));

        let text = "smot-tree 1\nN\t0\ta\nN\t1\tb\nE\t0\tx\t1\nE\t1\ty\t0\n";
        let err = ReasoningTree::load(text.as_bytes()).unwrap_err();
        assert!(matches!(err, TreeError::Malformed { .. }));
    }
}
