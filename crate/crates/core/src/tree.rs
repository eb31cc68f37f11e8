//! Node-labeled unranked trees, their text format, and exhaustive enumeration.
//!
//! A tree optionally carries a sibling order. Unordered trees still store their
//! children in a sequence (the order they were read or built in), but nothing
//! downstream is allowed to depend on it: structures over unordered schemas
//! only see the parent/child relation.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Opaque node identifier. Trees number their nodes breadth-first from the
/// root, so `v0` is always the root of a parsed or enumerated tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A symbol of the label alphabet. Always a non-empty identifier over
/// `[A-Za-z0-9_]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(symbol: impl Into<String>) -> Result<Self, TreeError> {
        let symbol = symbol.into();
        if is_identifier(&symbol) {
            Ok(Label(symbol))
        } else {
            Err(TreeError::BadLabel(symbol))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A finite, non-empty, sorted set of labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<Label>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self, TreeError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set = symbols
            .into_iter()
            .map(Label::new)
            .collect::<Result<BTreeSet<_>, _>>()?;
        if set.is_empty() {
            return Err(TreeError::EmptyAlphabet);
        }
        Ok(Alphabet {
            symbols: set.into_iter().collect(),
        })
    }

    pub fn symbols(&self) -> &[Label] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.symbols.binary_search(label).is_ok()
    }

    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.symbols.binary_search(label).ok()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("invalid label `{0}`")]
    BadLabel(String),
    #[error("alphabet must not be empty")]
    EmptyAlphabet,
    #[error("not a tree: {0}")]
    InvalidShape(String),
}

/// A Σ-labeled unranked tree, optionally ordered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledTree {
    labels: Vec<Label>,
    children: Vec<Vec<NodeId>>,
    parent: Vec<Option<NodeId>>,
    root: NodeId,
    ordered: bool,
}

impl LabeledTree {
    /// Builds a tree from per-node labels and parent links. Children are kept in
    /// increasing id order. Exactly one node may lack a parent and every node
    /// must be reachable from it.
    pub fn from_parents(
        labels: Vec<Label>,
        parents: Vec<Option<usize>>,
        ordered: bool,
    ) -> Result<Self, TreeError> {
        let n = labels.len();
        if n == 0 {
            return Err(TreeError::InvalidShape("a tree has at least one node".into()));
        }
        if parents.len() != n {
            return Err(TreeError::InvalidShape(
                "parent list and label list differ in length".into(),
            ));
        }
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        for (v, p) in parents.iter().enumerate() {
            match p {
                None => roots.push(v),
                Some(p) if *p >= n => {
                    return Err(TreeError::InvalidShape(format!("parent {p} out of range")))
                }
                Some(p) => children[*p].push(NodeId(v)),
            }
        }
        if roots.len() != 1 {
            return Err(TreeError::InvalidShape(format!(
                "expected exactly one root, found {}",
                roots.len()
            )));
        }
        let root = NodeId(roots[0]);
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v.0], true) {
                return Err(TreeError::InvalidShape("cycle".into()));
            }
            stack.extend(children[v.0].iter().copied());
        }
        if seen.iter().any(|s| !s) {
            return Err(TreeError::InvalidShape(
                "some node is not reachable from the root".into(),
            ));
        }
        Ok(LabeledTree {
            labels,
            children,
            parent: parents.into_iter().map(|p| p.map(NodeId)).collect(),
            root,
            ordered,
        })
    }

    /// Builds a tree from a nested description, numbering nodes breadth-first.
    pub fn from_nested(spec: &Nested, ordered: bool) -> Self {
        let mut labels = Vec::new();
        let mut parents = Vec::new();
        let mut queue = VecDeque::new();
        queue.push_back((spec, None));
        while let Some((node, parent)) = queue.pop_front() {
            let id = labels.len();
            labels.push(node.label.clone());
            parents.push(parent);
            for child in &node.children {
                queue.push_back((child, Some(id)));
            }
        }
        Self::from_parents(labels, parents, ordered).expect("nested description is a tree")
    }

    /// Parses the `(label child*)` text format.
    pub fn parse(text: &str, ordered: bool) -> Result<Self, TreeError> {
        let nested = NestedParser::new(text).parse_document()?;
        Ok(Self::from_nested(&nested, ordered))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.labels.len()).map(NodeId)
    }

    pub fn label(&self, v: NodeId) -> &Label {
        &self.labels[v.0]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v.0]
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v.0]
    }

    /// Same tree with the order flag changed.
    pub fn with_order(&self, ordered: bool) -> Self {
        LabeledTree {
            ordered,
            ..self.clone()
        }
    }

    pub fn to_nested(&self) -> Nested {
        self.nested_at(self.root)
    }

    fn nested_at(&self, v: NodeId) -> Nested {
        Nested {
            label: self.labels[v.0].clone(),
            children: self.children[v.0].iter().map(|&c| self.nested_at(c)).collect(),
        }
    }

    /// Labels used in the tree.
    pub fn label_set(&self) -> BTreeSet<Label> {
        self.labels.iter().cloned().collect()
    }

    /// Canonical text: the text format itself for ordered trees, and the text
    /// of the tree with recursively sorted children for unordered ones.
    pub fn canonical_form(&self) -> String {
        if self.ordered {
            self.to_string()
        } else {
            self.to_nested().canonicalize().to_string()
        }
    }

    /// Returns the tree with `v` (which must be a non-root leaf) removed,
    /// renumbered breadth-first, and the map from old to new ids.
    pub fn remove_leaf(&self, v: NodeId) -> Option<(Self, Vec<Option<NodeId>>)> {
        if v == self.root || !self.children[v.0].is_empty() {
            return None;
        }
        let mut order = Vec::with_capacity(self.len() - 1);
        let mut queue = VecDeque::from([self.root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            queue.extend(self.children[u.0].iter().copied().filter(|&c| c != v));
        }
        let mut map = vec![None; self.len()];
        for (new, old) in order.iter().enumerate() {
            map[old.0] = Some(NodeId(new));
        }
        let labels = order.iter().map(|u| self.labels[u.0].clone()).collect();
        let parents = order
            .iter()
            .map(|u| self.parent[u.0].map(|p| map[p.0].expect("parent kept").0))
            .collect();
        let tree = Self::from_parents(labels, parents, self.ordered).ok()?;
        // from_parents sorts children by id; BFS numbering already matches the
        // original sibling order, so the order is preserved.
        Some((tree, map))
    }
}

impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &LabeledTree, v: NodeId, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "({}", t.labels[v.0])?;
            for &c in &t.children[v.0] {
                f.write_str(" ")?;
                go(t, c, f)?;
            }
            f.write_str(")")
        }
        go(self, self.root, f)
    }
}

/// A tree as a plain nested value; used for building, canonicalizing and
/// printing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Nested {
    pub label: Label,
    pub children: Vec<Nested>,
}

impl Nested {
    pub fn leaf(label: Label) -> Self {
        Nested {
            label,
            children: Vec::new(),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Nested::size).sum::<usize>()
    }

    /// Recursively sorts children by their serialized form.
    pub fn canonicalize(&self) -> Nested {
        let mut kids: Vec<(String, Nested)> = self
            .children
            .iter()
            .map(|c| {
                let c = c.canonicalize();
                (c.to_string(), c)
            })
            .collect();
        kids.sort_by(|a, b| a.0.cmp(&b.0));
        Nested {
            label: self.label.clone(),
            children: kids.into_iter().map(|(_, c)| c).collect(),
        }
    }
}

impl fmt::Display for Nested {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.label)?;
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

struct NestedParser<'a> {
    chars: Vec<char>,
    pos: usize,
    _text: &'a str,
}

impl<'a> NestedParser<'a> {
    fn new(text: &'a str) -> Self {
        NestedParser {
            chars: text.chars().collect(),
            pos: 0,
            _text: text,
        }
    }

    fn error(&self, message: impl Into<String>) -> TreeError {
        let (mut line, mut col) = (1, 1);
        for &c in &self.chars[..self.pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        TreeError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn parse_document(&mut self) -> Result<Nested, TreeError> {
        self.skip_ws();
        let node = self.parse_node()?;
        self.skip_ws();
        if self.pos != self.chars.len() {
            return Err(self.error("trailing input after tree"));
        }
        Ok(node)
    }

    fn parse_node(&mut self) -> Result<Nested, TreeError> {
        if self.chars.get(self.pos) != Some(&'(') {
            return Err(self.error("expected `(`"));
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a label"));
        }
        let label = Label(self.chars[start..self.pos].iter().collect());
        let mut children = Vec::new();
        loop {
            self.skip_ws();
            match self.chars.get(self.pos) {
                Some('(') => children.push(self.parse_node()?),
                Some(')') => {
                    self.pos += 1;
                    return Ok(Nested { label, children });
                }
                Some(_) => return Err(self.error("expected `(` or `)`")),
                None => return Err(self.error("unexpected end of input")),
            }
        }
    }
}

/// Enumerates every Σ-labeled tree with at most `max_nodes` nodes exactly once
/// up to isomorphism, smallest trees first. Unordered trees are identified up
/// to child permutation and come out in canonical (sorted-children) form.
pub fn enumerate_trees(
    alphabet: &Alphabet,
    max_nodes: usize,
    ordered: bool,
) -> impl Iterator<Item = LabeledTree> {
    let alphabet = alphabet.clone();
    (1..=max_nodes).flat_map(move |n| {
        trees_of_size(&alphabet, n, ordered)
            .into_iter()
            .map(move |t| LabeledTree::from_nested(&t, ordered))
    })
}

/// All trees with exactly `n` nodes, in generation order.
pub fn trees_of_size(alphabet: &Alphabet, n: usize, ordered: bool) -> Vec<Nested> {
    let mut memo_trees: Vec<Vec<Nested>> = vec![Vec::new(); n + 1];
    let mut memo_forests: Vec<Vec<Vec<Nested>>> = vec![Vec::new(); n + 1];
    memo_forests[0] = vec![Vec::new()];
    for size in 1..=n {
        // Forests of `size - 1` nodes are complete once trees of every smaller
        // size are known.
        let mut trees = Vec::new();
        for forest in &memo_forests[size - 1] {
            for label in alphabet.symbols() {
                trees.push(Nested {
                    label: label.clone(),
                    children: forest.clone(),
                });
            }
        }
        if !ordered {
            let mut seen = BTreeSet::new();
            trees = trees
                .into_iter()
                .map(|t| t.canonicalize())
                .filter(|t| seen.insert(t.to_string()))
                .collect();
        }
        memo_trees[size] = trees;
        let mut forests = Vec::new();
        for first in 1..=size {
            for head in &memo_trees[first] {
                for tail in &memo_forests[size - first] {
                    let mut f = Vec::with_capacity(tail.len() + 1);
                    f.push(head.clone());
                    f.extend(tail.iter().cloned());
                    forests.push(f);
                }
            }
        }
        memo_forests[size] = forests;
    }
    std::mem::take(&mut memo_trees[n])
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::fixtures::SAMPLE;

    fn one(label: &str) -> Alphabet {
        Alphabet::new([label]).unwrap()
    }

    #[test]
    fn parses_sample_breadth_first() {
        let t = LabeledTree::parse(SAMPLE, true).unwrap();
        assert_eq!(t.len(), 9);
        assert_eq!(t.root(), NodeId(0));
        let kids: Vec<_> = t.children(NodeId(0)).iter().map(|v| v.0).collect();
        assert_eq!(kids, vec![1, 2, 3, 4, 5]);
        assert_eq!(t.children(NodeId(2)), &[NodeId(6), NodeId(7)]);
        assert_eq!(t.children(NodeId(4)), &[NodeId(8)]);
        assert_eq!(t.label(NodeId(6)).as_str(), "White");
        assert_eq!(t.to_string(), SAMPLE);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = LabeledTree::parse("(a\n (b", true).unwrap_err();
        assert_eq!(
            err,
            TreeError::Syntax {
                line: 2,
                col: 4,
                message: "unexpected end of input".into()
            }
        );
        assert!(matches!(
            LabeledTree::parse("(a) (b)", true),
            Err(TreeError::Syntax { .. })
        ));
        assert!(matches!(
            LabeledTree::parse("( )", true),
            Err(TreeError::Syntax { .. })
        ));
    }

    #[test]
    fn from_parents_rejects_forests_and_cycles() {
        let l = || Label::new("a").unwrap();
        assert!(LabeledTree::from_parents(vec![l(), l()], vec![None, None], false).is_err());
        assert!(LabeledTree::from_parents(vec![l(), l()], vec![Some(1), Some(0)], false).is_err());
        assert!(
            LabeledTree::from_parents(vec![l(), l(), l()], vec![None, Some(2), Some(1)], false)
                .is_err()
        );
    }

    #[test]
    fn unordered_counts_match_rooted_tree_numbers() {
        let a = one("a");
        let counts: Vec<usize> = (1..=7).map(|n| trees_of_size(&a, n, false).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 9, 20, 48]);
        assert_eq!(enumerate_trees(&a, 3, false).count(), 4);
    }

    #[test]
    fn ordered_counts_are_catalan() {
        let a = one("a");
        let counts: Vec<usize> = (1..=7).map(|n| trees_of_size(&a, n, true).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 14, 42, 132]);
    }

    #[test]
    fn single_nodes_per_label() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        assert_eq!(enumerate_trees(&ab, 1, false).count(), 2);
        assert_eq!(enumerate_trees(&ab, 1, true).count(), 2);
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        for ordered in [false, true] {
            let forms: Vec<String> = enumerate_trees(&ab, 5, ordered)
                .map(|t| t.canonical_form())
                .collect();
            let set: BTreeSet<_> = forms.iter().collect();
            assert_eq!(set.len(), forms.len());
        }
    }

    #[test]
    fn remove_leaf_keeps_sibling_order() {
        let t = LabeledTree::parse("(a (b) (c (d)) (e))", true).unwrap();
        let (s, map) = t.remove_leaf(NodeId(1)).unwrap();
        assert_eq!(s.to_string(), "(a (c (d)) (e))");
        assert_eq!(map[1], None);
        assert_eq!(map[3], Some(NodeId(2)));
        assert!(t.remove_leaf(NodeId(0)).is_none());
        assert!(t.remove_leaf(NodeId(2)).is_none());
    }
}
