//! Finite relational structures and the tree schemas τ_u, τ'_u, τ_o, τ'_o,
//! τ_GK together with their `M`-variants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::tree::{is_identifier, Alphabet, Label, LabeledTree, NodeId};

/// Prefix of the per-label unary relations, `Label_a` for label `a`.
pub const LABEL_PREFIX: &str = "Label_";

/// The navigational relations a tree structure can carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    Child,
    Desc,
    Is,
    Root,
    Leaf,
    Fc,
    Ns,
    Ls,
}

impl Axis {
    pub const ALL: [Axis; 8] = [
        Axis::Child,
        Axis::Desc,
        Axis::Is,
        Axis::Root,
        Axis::Leaf,
        Axis::Fc,
        Axis::Ns,
        Axis::Ls,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Child => "Child",
            Axis::Desc => "Desc",
            Axis::Is => "Is",
            Axis::Root => "Root",
            Axis::Leaf => "Leaf",
            Axis::Fc => "Fc",
            Axis::Ns => "Ns",
            Axis::Ls => "Ls",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Axis::Child | Axis::Desc | Axis::Is | Axis::Fc | Axis::Ns => 2,
            Axis::Root | Axis::Leaf | Axis::Ls => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Axis> {
        Axis::ALL.into_iter().find(|a| a.name() == name)
    }

    /// Whether materializing the relation needs a sibling order.
    pub fn needs_order(self) -> bool {
        matches!(self, Axis::Fc | Axis::Ns | Axis::Ls)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Relation name for label `label`.
pub fn label_relation(label: &Label) -> String {
    format!("{LABEL_PREFIX}{label}")
}

/// The label named by a `Label_α` relation, if `name` is one.
pub fn relation_label(name: &str) -> Option<Label> {
    name.strip_prefix(LABEL_PREFIX)
        .and_then(|s| Label::new(s).ok())
}

/// Arity of a built-in tree relation name (`Label_α` or an axis).
pub fn builtin_arity(name: &str) -> Option<usize> {
    if relation_label(name).is_some() {
        Some(1)
    } else {
        Axis::from_name(name).map(Axis::arity)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("relation `{0}` needs a sibling order but the tree is unordered")]
    OrderRequired(String),
    #[error("label `{0}` is not covered by the schema")]
    UnknownLabel(String),
    #[error("relation `{0}` cannot be materialized from a tree")]
    UnknownRelation(String),
    #[error("schema is not a subschema: `{0}` missing or of different arity")]
    NotASubschema(String),
    #[error("relation `{name}` has arity {expected}, got a tuple of length {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("element {0} is outside the domain")]
    OutOfDomain(NodeId),
    #[error("relation `{0}` is not in the schema")]
    NotInSchema(String),
    #[error("invalid relation name `{0}`")]
    BadName(String),
}

/// A finite set of relation symbols with arities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Schema {
    relations: BTreeMap<String, usize>,
}

impl Schema {
    pub fn empty() -> Self {
        Schema::default()
    }

    pub fn with(mut self, name: impl Into<String>, arity: usize) -> Result<Self, StructureError> {
        self.insert(name, arity)?;
        Ok(self)
    }

    pub fn insert(&mut self, name: impl Into<String>, arity: usize) -> Result<(), StructureError> {
        let name = name.into();
        if !is_identifier(&name) || arity == 0 {
            return Err(StructureError::BadName(name));
        }
        if let Some(a) = builtin_arity(&name) {
            if a != arity {
                return Err(StructureError::ArityMismatch {
                    name,
                    expected: a,
                    got: arity,
                });
            }
        }
        self.relations.insert(name, arity);
        Ok(())
    }

    fn labels_and(alphabet: &Alphabet, axes: &[Axis]) -> Self {
        let mut relations: BTreeMap<String, usize> = alphabet
            .symbols()
            .iter()
            .map(|l| (label_relation(l), 1))
            .collect();
        for a in axes {
            relations.insert(a.name().to_string(), a.arity());
        }
        Schema { relations }
    }

    /// τ_u: labels and `Child`.
    pub fn unordered(alphabet: &Alphabet) -> Self {
        Self::labels_and(alphabet, &[Axis::Child])
    }

    /// τ_u^M for `M ⊆ {Desc, Is, Root, Leaf}`.
    pub fn unordered_with(alphabet: &Alphabet, extra: &[Axis]) -> Self {
        let mut axes = vec![Axis::Child];
        axes.extend_from_slice(extra);
        Self::labels_and(alphabet, &axes)
    }

    /// τ'_u.
    pub fn unordered_prime(alphabet: &Alphabet) -> Self {
        Self::unordered_with(alphabet, &[Axis::Desc, Axis::Is, Axis::Root, Axis::Leaf])
    }

    /// τ_o: labels, `Fc` and `Ns`.
    pub fn ordered(alphabet: &Alphabet) -> Self {
        Self::labels_and(alphabet, &[Axis::Fc, Axis::Ns])
    }

    /// τ_o^M for `M ⊆ {Child, Desc, Root, Leaf, Ls}`.
    pub fn ordered_with(alphabet: &Alphabet, extra: &[Axis]) -> Self {
        let mut axes = vec![Axis::Fc, Axis::Ns];
        axes.extend_from_slice(extra);
        Self::labels_and(alphabet, &axes)
    }

    /// τ'_o.
    pub fn ordered_prime(alphabet: &Alphabet) -> Self {
        Self::ordered_with(
            alphabet,
            &[Axis::Child, Axis::Desc, Axis::Root, Axis::Leaf, Axis::Ls],
        )
    }

    /// τ_GK = τ_o^{Root, Leaf, Ls}.
    pub fn gk(alphabet: &Alphabet) -> Self {
        Self::ordered_with(alphabet, &[Axis::Root, Axis::Leaf, Axis::Ls])
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.relations.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.relations.contains_key(name)
    }

    pub fn has_axis(&self, axis: Axis) -> bool {
        self.contains(axis.name())
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_subschema_of(&self, other: &Schema) -> bool {
        self.relations
            .iter()
            .all(|(k, a)| other.relations.get(k) == Some(a))
    }

    /// Labels α with `Label_α` in the schema.
    pub fn labels(&self) -> Vec<Label> {
        self.relations.keys().filter_map(|k| relation_label(k)).collect()
    }

    /// The alphabet made of the schema's labels, if there is at least one.
    pub fn alphabet(&self) -> Option<Alphabet> {
        let labels = self.labels();
        Alphabet::new(labels.iter().map(|l| l.as_str().to_string())).ok()
    }

    pub fn axes(&self) -> Vec<Axis> {
        Axis::ALL.into_iter().filter(|a| self.has_axis(*a)).collect()
    }

    pub fn needs_order(&self) -> bool {
        self.axes().into_iter().any(Axis::needs_order)
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, a)) in self.relations.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}/{a}")?;
        }
        f.write_str("}")
    }
}

/// A ground atom `R(a1, …, ar)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub predicate: String,
    pub args: Vec<NodeId>,
}

impl Fact {
    pub fn new(predicate: impl Into<String>, args: Vec<NodeId>) -> Self {
        Fact {
            predicate: predicate.into(),
            args,
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// A set of ground atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactSet(BTreeSet<Fact>);

impl FactSet {
    pub fn new() -> Self {
        FactSet(BTreeSet::new())
    }

    pub fn insert(&mut self, fact: Fact) -> bool {
        self.0.insert(fact)
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.0.contains(fact)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fact> {
        self.0.iter()
    }

    pub fn is_subset(&self, other: &FactSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &FactSet) -> FactSet {
        FactSet(self.0.union(&other.0).cloned().collect())
    }

    /// Facts with the given predicate.
    pub fn with_predicate<'a>(&'a self, predicate: &'a str) -> impl Iterator<Item = &'a Fact> {
        self.0.iter().filter(move |f| f.predicate == predicate)
    }

    /// Image of the set under a node map.
    pub fn map_nodes(&self, map: impl Fn(NodeId) -> NodeId) -> FactSet {
        FactSet(
            self.0
                .iter()
                .map(|f| Fact::new(f.predicate.clone(), f.args.iter().map(|&a| map(a)).collect()))
                .collect(),
        )
    }
}

impl FromIterator<Fact> for FactSet {
    fn from_iter<I: IntoIterator<Item = Fact>>(iter: I) -> Self {
        FactSet(iter.into_iter().collect())
    }
}

impl IntoIterator for FactSet {
    type Item = Fact;
    type IntoIter = std::collections::btree_set::IntoIter<Fact>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a FactSet {
    type Item = &'a Fact;
    type IntoIter = std::collections::btree_set::Iter<'a, Fact>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A finite relational structure. The domain is `v0 … v(n-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    size: usize,
    schema: Schema,
    relations: BTreeMap<String, BTreeSet<Vec<NodeId>>>,
}

impl Structure {
    /// A structure with all relations empty.
    pub fn new(size: usize, schema: Schema) -> Self {
        let relations = schema
            .relations()
            .map(|(k, _)| (k.to_string(), BTreeSet::new()))
            .collect();
        Structure {
            size,
            schema,
            relations,
        }
    }

    pub fn insert(&mut self, name: &str, tuple: Vec<NodeId>) -> Result<(), StructureError> {
        let arity = self
            .schema
            .arity(name)
            .ok_or_else(|| StructureError::NotInSchema(name.to_string()))?;
        if tuple.len() != arity {
            return Err(StructureError::ArityMismatch {
                name: name.to_string(),
                expected: arity,
                got: tuple.len(),
            });
        }
        if let Some(&bad) = tuple.iter().find(|a| a.0 >= self.size) {
            return Err(StructureError::OutOfDomain(bad));
        }
        self.relations
            .get_mut(name)
            .expect("schema relation present")
            .insert(tuple);
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn domain(&self) -> impl Iterator<Item = NodeId> {
        (0..self.size).map(NodeId)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn relation(&self, name: &str) -> Option<&BTreeSet<Vec<NodeId>>> {
        self.relations.get(name)
    }

    pub fn holds(&self, name: &str, tuple: &[NodeId]) -> bool {
        self.relations
            .get(name)
            .is_some_and(|r| r.contains(tuple))
    }

    /// `atoms(A)`: one ground atom per tuple per relation.
    pub fn atoms(&self) -> FactSet {
        self.relations
            .iter()
            .flat_map(|(name, tuples)| tuples.iter().map(move |t| Fact::new(name.clone(), t.clone())))
            .collect()
    }

    /// The `schema`-reduct: same domain, relations restricted to `schema`.
    pub fn reduct(&self, schema: &Schema) -> Result<Structure, StructureError> {
        for (name, arity) in schema.relations() {
            if self.schema.arity(name) != Some(arity) {
                return Err(StructureError::NotASubschema(name.to_string()));
            }
        }
        Ok(Structure {
            size: self.size,
            schema: schema.clone(),
            relations: self
                .relations
                .iter()
                .filter(|(k, _)| schema.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        })
    }
}

/// Materializes `S_u^M(t)` or `S_o^M(t)` (or any schema made of labels and
/// axes) for the tree `t`.
pub fn build_structure(t: &LabeledTree, schema: &Schema) -> Result<Structure, StructureError> {
    for v in t.nodes() {
        let label = t.label(v);
        if !schema.contains(&label_relation(label)) {
            return Err(StructureError::UnknownLabel(label.to_string()));
        }
    }
    let mut s = Structure::new(t.len(), schema.clone());
    let names: Vec<String> = schema.relations().map(|(k, _)| k.to_string()).collect();
    for name in names {
        let tuples = tree_relation(t, &name)?;
        *s.relations.get_mut(&name).expect("present") = tuples;
    }
    Ok(s)
}

fn tree_relation(t: &LabeledTree, name: &str) -> Result<BTreeSet<Vec<NodeId>>, StructureError> {
    if let Some(label) = relation_label(name) {
        return Ok(t
            .nodes()
            .filter(|&v| *t.label(v) == label)
            .map(|v| vec![v])
            .collect());
    }
    let axis = Axis::from_name(name).ok_or_else(|| StructureError::UnknownRelation(name.into()))?;
    if axis.needs_order() && !t.is_ordered() {
        return Err(StructureError::OrderRequired(name.into()));
    }
    let mut out = BTreeSet::new();
    match axis {
        Axis::Child => {
            for u in t.nodes() {
                for &v in t.children(u) {
                    out.insert(vec![u, v]);
                }
            }
        }
        Axis::Desc => {
            for v in t.nodes() {
                let mut p = t.parent(v);
                while let Some(u) = p {
                    out.insert(vec![u, v]);
                    p = t.parent(u);
                }
            }
        }
        Axis::Is => {
            for u in t.nodes() {
                for &a in t.children(u) {
                    for &b in t.children(u) {
                        if a != b {
                            out.insert(vec![a, b]);
                        }
                    }
                }
            }
        }
        Axis::Root => {
            out.insert(vec![t.root()]);
        }
        Axis::Leaf => {
            for v in t.nodes().filter(|&v| t.children(v).is_empty()) {
                out.insert(vec![v]);
            }
        }
        // Fc(u, v): v is the first child of u.
        Axis::Fc => {
            for u in t.nodes() {
                if let Some(&v) = t.children(u).first() {
                    out.insert(vec![u, v]);
                }
            }
        }
        Axis::Ns => {
            for u in t.nodes() {
                for w in t.children(u).windows(2) {
                    out.insert(vec![w[0], w[1]]);
                }
            }
        }
        Axis::Ls => {
            for u in t.nodes() {
                if let Some(&v) = t.children(u).last() {
                    out.insert(vec![v]);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::fixtures::SAMPLE;

    fn bw() -> Alphabet {
        Alphabet::new(["Black", "White"]).unwrap()
    }

    fn ids(r: &BTreeSet<Vec<NodeId>>) -> Vec<Vec<usize>> {
        r.iter().map(|t| t.iter().map(|v| v.0).collect()).collect()
    }

    #[test]
    fn sample_unordered_structure() {
        let t = LabeledTree::parse(SAMPLE, false).unwrap();
        let s = build_structure(&t, &Schema::unordered(&bw())).unwrap();
        assert_eq!(
            ids(s.relation("Child").unwrap()),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![0, 4],
                vec![0, 5],
                vec![2, 6],
                vec![2, 7],
                vec![4, 8]
            ]
        );
        assert_eq!(
            ids(s.relation("Label_Black").unwrap()),
            vec![vec![0], vec![1], vec![3], vec![5], vec![7], vec![8]]
        );
        assert_eq!(s.atoms().len(), 17);
    }

    #[test]
    fn sample_gk_structure() {
        let t = LabeledTree::parse(SAMPLE, true).unwrap();
        let s = build_structure(&t, &Schema::gk(&bw())).unwrap();
        assert_eq!(ids(s.relation("Fc").unwrap()), vec![vec![0, 1], vec![2, 6], vec![4, 8]]);
        assert_eq!(
            ids(s.relation("Ns").unwrap()),
            vec![vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 5], vec![6, 7]]
        );
        assert_eq!(ids(s.relation("Ls").unwrap()), vec![vec![5], vec![7], vec![8]]);
        assert_eq!(ids(s.relation("Root").unwrap()), vec![vec![0]]);
        assert_eq!(
            ids(s.relation("Leaf").unwrap()),
            vec![vec![1], vec![3], vec![5], vec![6], vec![7], vec![8]]
        );
    }

    #[test]
    fn single_node_prime_structure() {
        let a = Alphabet::new(["a"]).unwrap();
        let t = LabeledTree::parse("(a)", false).unwrap();
        let s = build_structure(&t, &Schema::unordered_prime(&a)).unwrap();
        assert_eq!(ids(s.relation("Root").unwrap()), vec![vec![0]]);
        assert_eq!(ids(s.relation("Leaf").unwrap()), vec![vec![0]]);
        for r in ["Child", "Desc", "Is"] {
            assert!(s.relation(r).unwrap().is_empty());
        }
    }

    #[test]
    fn sample_desc_has_eleven_pairs() {
        let t = LabeledTree::parse(SAMPLE, false).unwrap();
        let s = build_structure(&t, &Schema::unordered_prime(&bw())).unwrap();
        assert_eq!(s.relation("Desc").unwrap().len(), 11);
        assert_eq!(s.relation("Is").unwrap().len(), 22);
        // 17 base atoms, 11 Desc, 22 Is, 1 Root, 6 Leaf.
        assert_eq!(s.atoms().len(), 17 + 11 + 22 + 1 + 6);
    }

    #[test]
    fn errors() {
        let t = LabeledTree::parse("(a (b))", false).unwrap();
        let ab = Alphabet::new(["a", "b"]).unwrap();
        assert_eq!(
            build_structure(&t, &Schema::gk(&ab)),
            Err(StructureError::OrderRequired("Fc".into()))
        );
        let a = Alphabet::new(["a"]).unwrap();
        assert_eq!(
            build_structure(&t, &Schema::unordered(&a)),
            Err(StructureError::UnknownLabel("b".into()))
        );
        let custom = Schema::unordered(&ab).with("Edge", 2).unwrap();
        assert_eq!(
            build_structure(&t, &custom),
            Err(StructureError::UnknownRelation("Edge".into()))
        );
    }

    #[test]
    fn reducts() {
        let t = LabeledTree::parse(SAMPLE, true).unwrap();
        let full = build_structure(&t, &Schema::ordered_prime(&bw())).unwrap();
        let gk = full.reduct(&Schema::gk(&bw())).unwrap();
        assert_eq!(gk, build_structure(&t, &Schema::gk(&bw())).unwrap());
        let dropped: BTreeSet<&str> = full
            .schema()
            .relations()
            .map(|(k, _)| k)
            .filter(|k| !gk.schema().contains(k))
            .collect();
        assert_eq!(dropped, BTreeSet::from(["Child", "Desc"]));
        assert_eq!(full.reduct(full.schema()).unwrap(), full);

        let u = LabeledTree::parse(SAMPLE, false).unwrap();
        let prime = build_structure(&u, &Schema::unordered_prime(&bw())).unwrap();
        assert_eq!(
            prime.reduct(&Schema::unordered(&bw())).unwrap(),
            build_structure(&u, &Schema::unordered(&bw())).unwrap()
        );
        assert!(matches!(
            prime.reduct(&Schema::gk(&bw())),
            Err(StructureError::NotASubschema(_))
        ));
    }

    #[test]
    fn empty_relations_give_no_atoms() {
        let s = Structure::new(1, Schema::empty().with("Child", 2).unwrap());
        assert!(s.atoms().is_empty());
    }

    #[test]
    fn insert_checks_arity_and_domain() {
        let mut s = Structure::new(2, Schema::empty().with("Child", 2).unwrap());
        assert!(s.insert("Child", vec![NodeId(0), NodeId(1)]).is_ok());
        assert!(matches!(
            s.insert("Child", vec![NodeId(0)]),
            Err(StructureError::ArityMismatch { .. })
        ));
        assert_eq!(
            s.insert("Child", vec![NodeId(0), NodeId(2)]),
            Err(StructureError::OutOfDomain(NodeId(2)))
        );
    }
}
