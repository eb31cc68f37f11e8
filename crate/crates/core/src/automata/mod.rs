//! Bottom-up tree automata over first-child/next-sibling encodings.
//!
//! An ordered unranked tree is encoded as a binary tree whose left edges are
//! `Fc` and whose right edges are `Ns`. Free variables become bit tracks on
//! the node labels, so an automaton over tracks `x, X` reads symbols from
//! `Σ × {0,1}²`. Formulas over `Label_α`, `Fc` and `Ns` compile to
//! deterministic automata; see [`Compiler`].

mod compile;
mod dta;

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::mso::{Assignment, Var};
use crate::tree::{Label, LabeledTree, NodeId};

pub use compile::{compile, Compiler};
pub use dta::{BoolOp, TreeAutomaton};

pub const DEFAULT_STATE_BUDGET: usize = 2_000_000;
pub const DEFAULT_ENTRY_BUDGET: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("atom `{0}` is not over Label_α, Fc, Ns; eliminate derived axes first")]
    UnsupportedAtom(String),
    #[error("`{name}` has arity {expected}, used with {got} arguments")]
    ArityMismatch { name: String, expected: usize, got: usize },
    #[error("free variable `{0}` has no track")]
    UntrackedVariable(String),
    #[error("state budget exceeded: {states} states ({entries} table entries) against a budget of {budget} states / {entry_budget} entries")]
    StateBudgetExceeded {
        states: usize,
        entries: usize,
        budget: usize,
        entry_budget: usize,
    },
    #[error("binary tree does not encode a single tree: {0}")]
    NotASingleTree(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
}

/// Caps on automaton size. Exceeding either is reported as
/// [`AutomataError::StateBudgetExceeded`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
    /// Cap on `(states + 1)² · |symbols|`, the size of a transition table.
    pub max_entries: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: DEFAULT_STATE_BUDGET,
            max_entries: DEFAULT_ENTRY_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryNode {
    pub label: Label,
    /// Bit `i` is set iff the node carries track `i`.
    pub marks: u64,
    pub left: Option<usize>,
    pub right: Option<usize>,
}

/// A binary tree with labels from `Σ × {0,1}^k`, `k = tracks.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryTree {
    pub nodes: Vec<BinaryNode>,
    pub root: usize,
    pub tracks: Vec<Var>,
}

impl BinaryTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(parent, child)` pairs along left edges.
    pub fn left_edges(&self) -> Vec<(usize, usize)> {
        self.edges(|n| n.left)
    }

    /// `(node, right neighbour)` pairs along right edges.
    pub fn right_edges(&self) -> Vec<(usize, usize)> {
        self.edges(|n| n.right)
    }

    fn edges(&self, pick: impl Fn(&BinaryNode) -> Option<usize>) -> Vec<(usize, usize)> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| pick(n).map(|c| (i, c)))
            .collect()
    }

    /// Nodes in an order where children come before parents.
    pub(crate) fn postorder(&self) -> Result<Vec<usize>, AutomataError> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((u, expanded)) = stack.pop() {
            if u >= self.nodes.len() {
                return Err(AutomataError::NotASingleTree(format!("node {u} out of range")));
            }
            if expanded {
                order.push(u);
                continue;
            }
            if std::mem::replace(&mut seen[u], true) {
                return Err(AutomataError::NotASingleTree(format!("node {u} is shared")));
            }
            stack.push((u, true));
            let n = &self.nodes[u];
            stack.extend(n.right.map(|c| (c, false)));
            stack.extend(n.left.map(|c| (c, false)));
        }
        Ok(order)
    }
}

impl fmt::Display for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &BinaryTree, u: Option<usize>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let Some(u) = u else {
                return f.write_str("_");
            };
            let n = &t.nodes[u];
            write!(f, "{}", n.label)?;
            for (i, v) in t.tracks.iter().enumerate() {
                if n.marks >> i & 1 == 1 {
                    write!(f, "+{v}")?;
                }
            }
            if n.left.is_some() || n.right.is_some() {
                f.write_str("(")?;
                go(t, n.left, f)?;
                f.write_str(", ")?;
                go(t, n.right, f)?;
                f.write_str(")")?;
            }
            Ok(())
        }
        go(self, Some(self.root), f)
    }
}

/// First-child/next-sibling encoding. Binary node `i` is tree node `v_i`.
pub fn fcns_encode(t: &LabeledTree) -> BinaryTree {
    let mut nodes: Vec<BinaryNode> = t
        .nodes()
        .map(|v| BinaryNode {
            label: t.label(v).clone(),
            marks: 0,
            left: t.children(v).first().map(|c| c.0),
            right: None,
        })
        .collect();
    for v in t.nodes() {
        for w in t.children(v).windows(2) {
            nodes[w[0].0].right = Some(w[1].0);
        }
    }
    BinaryTree {
        nodes,
        root: t.root().0,
        tracks: Vec::new(),
    }
}

/// Encodes `t` and marks each track with the value `asg` gives it.
pub fn annotate(t: &LabeledTree, tracks: &[Var], asg: &Assignment) -> Result<BinaryTree, AutomataError> {
    if tracks.len() > 64 {
        return Err(AutomataError::AlphabetMismatch("more than 64 tracks".into()));
    }
    let mut b = fcns_encode(t);
    for (i, var) in tracks.iter().enumerate() {
        let marked: Vec<NodeId> = match var {
            Var::Node(x) => vec![*asg.nodes.get(x).ok_or_else(|| AutomataError::UntrackedVariable(x.clone()))?],
            Var::Set(s) => asg
                .sets
                .get(s)
                .ok_or_else(|| AutomataError::UntrackedVariable(s.clone()))?
                .iter()
                .copied()
                .collect(),
        };
        for v in marked {
            let node = b
                .nodes
                .get_mut(v.0)
                .ok_or_else(|| AutomataError::AlphabetMismatch(format!("{var} is assigned {v}, outside the tree")))?;
            node.marks |= 1 << i;
        }
    }
    b.tracks = tracks.to_vec();
    Ok(b)
}

/// Inverse of [`fcns_encode`], as an ordered tree numbered breadth-first.
pub fn fcns_decode(b: &BinaryTree) -> Result<LabeledTree, AutomataError> {
    fcns_decode_marked(b).map(|(t, _)| t)
}

/// Decodes `b` and reads the tracks back as an assignment. A node track
/// marked on several nodes keeps the first one in breadth-first order;
/// an unmarked node track is left unassigned.
pub fn fcns_decode_marked(b: &BinaryTree) -> Result<(LabeledTree, Assignment), AutomataError> {
    if b.root >= b.nodes.len() {
        return Err(AutomataError::NotASingleTree("root out of range".into()));
    }
    if b.nodes[b.root].right.is_some() {
        return Err(AutomataError::NotASingleTree("the root has a right child".into()));
    }
    // also rejects sharing and cycles
    b.postorder()?;

    let mut order = Vec::new();
    let mut parents = Vec::new();
    let mut queue = VecDeque::from([(b.root, None)]);
    while let Some((u, parent)) = queue.pop_front() {
        let id = order.len();
        order.push(u);
        parents.push(parent);
        let mut child = b.nodes[u].left;
        while let Some(c) = child {
            queue.push_back((c, Some(id)));
            child = b.nodes[c].right;
        }
    }
    let labels = order.iter().map(|&u| b.nodes[u].label.clone()).collect();
    let t = LabeledTree::from_parents(labels, parents, true)
        .map_err(|e| AutomataError::NotASingleTree(e.to_string()))?;

    let mut asg = Assignment::new();
    for (i, var) in b.tracks.iter().enumerate() {
        let marked = order
            .iter()
            .enumerate()
            .filter(|(_, &u)| b.nodes[u].marks >> i & 1 == 1)
            .map(|(id, _)| NodeId(id));
        match var {
            Var::Node(x) => {
                if let Some(v) = marked.into_iter().next() {
                    asg.nodes.insert(x.clone(), v);
                }
            }
            Var::Set(s) => {
                asg.sets.insert(s.clone(), marked.collect());
            }
        }
    }
    Ok((t, asg))
}
