//! Monadic datalog: programs, queries, validation and fixpoint semantics.

mod eval;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::structure::{Fact, Schema, Structure};
use crate::tree::NodeId;

pub use eval::{
    evaluate_query, evaluate_unary_query, fixpoint, fixpoint_with, immediate_consequence,
    Strategy,
};
pub use parse::{parse_program, parse_query};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DatalogError {
    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("rule {rule}: head variable `{var}` does not occur in the body")]
    Safety { rule: usize, var: String },
    #[error("rule {rule}: empty body")]
    EmptyBody { rule: usize },
    #[error("intensional predicate `{0}` is not unary")]
    NotMonadic(String),
    #[error("extensional predicate `{0}` is not in the schema")]
    NotInSchema(String),
    #[error("intensional predicate `{0}` clashes with a schema relation")]
    IdbInSchema(String),
    #[error("predicate `{name}` used with arity {got}, expected {expected}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("query predicate `{0}` does not occur in the program")]
    UnknownQueryPredicate(String),
    #[error("fact {0} is not over the program's predicates and domain")]
    DomainError(Fact),
    #[error("program is invalid for the schema: {}", list(.0))]
    Invalid(Vec<DatalogError>),
}

fn list(errors: &[DatalogError]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// `P(x1, …, xm)` with variables only.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new<S: Into<String>>(predicate: impl Into<String>, args: impl IntoIterator<Item = S>) -> Self {
        Atom {
            predicate: predicate.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.predicate, self.args.join(","))
    }
}

/// `head <- body`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl Rule {
    pub fn new(head: Atom, body: Vec<Atom>) -> Self {
        Rule { head, body }
    }

    /// Variables in order of first occurrence (head first).
    pub fn variables(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for a in std::iter::once(&self.head).chain(&self.body) {
            for v in &a.args {
                if !seen.contains(&v.as_str()) {
                    seen.push(v.as_str());
                }
            }
        }
        seen
    }

    fn safety_violation(&self, index: usize) -> Option<DatalogError> {
        if self.body.is_empty() {
            return Some(DatalogError::EmptyBody { rule: index });
        }
        self.head
            .args
            .iter()
            .find(|v| !self.body.iter().any(|b| b.args.contains(v)))
            .map(|v| DatalogError::Safety {
                rule: index,
                var: v.clone(),
            })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <- ", self.head)?;
        for (i, b) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str(".")
    }
}

/// A finite list of safe rules.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    rules: Vec<Rule>,
}

impl Program {
    /// Builds a program, rejecting unsafe rules (which includes empty bodies,
    /// since rules carry no constants).
    pub fn new(rules: Vec<Rule>) -> Result<Self, DatalogError> {
        if let Some(e) = rules
            .iter()
            .enumerate()
            .find_map(|(i, r)| r.safety_violation(i))
        {
            return Err(e);
        }
        Ok(Program { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Head predicates, in order of first appearance as a head.
    pub fn idb(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rules {
            if !out.contains(&r.head.predicate.as_str()) {
                out.push(&r.head.predicate);
            }
        }
        out
    }

    pub fn is_idb(&self, predicate: &str) -> bool {
        self.rules.iter().any(|r| r.head.predicate == predicate)
    }

    /// Body-only predicates.
    pub fn edb(&self) -> BTreeSet<&str> {
        self.rules
            .iter()
            .flat_map(|r| &r.body)
            .map(|a| a.predicate.as_str())
            .filter(|p| !self.is_idb(p))
            .collect()
    }

    pub fn occurs(&self, predicate: &str) -> bool {
        self.rules
            .iter()
            .flat_map(|r| std::iter::once(&r.head).chain(&r.body))
            .any(|a| a.predicate == predicate)
    }

    /// Arity of every predicate, taken from its first occurrence.
    pub fn arities(&self) -> BTreeMap<&str, usize> {
        let mut out = BTreeMap::new();
        for a in self.rules.iter().flat_map(|r| std::iter::once(&r.head).chain(&r.body)) {
            out.entry(a.predicate.as_str()).or_insert(a.args.len());
        }
        out
    }

    /// Schema-independent well-formedness: safety, consistent arities, unary
    /// intensional predicates.
    pub fn structural_violations(&self) -> Vec<DatalogError> {
        let mut errors: Vec<DatalogError> = self
            .rules
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.safety_violation(i))
            .collect();
        let arities = self.arities();
        let mut reported = BTreeSet::new();
        for a in self.rules.iter().flat_map(|r| std::iter::once(&r.head).chain(&r.body)) {
            let expected = arities[a.predicate.as_str()];
            if a.args.len() != expected && reported.insert(a.predicate.clone()) {
                errors.push(DatalogError::ArityMismatch {
                    name: a.predicate.clone(),
                    expected,
                    got: a.args.len(),
                });
            }
        }
        for p in self.idb() {
            if arities[p] != 1 {
                errors.push(DatalogError::NotMonadic(p.to_string()));
            }
        }
        errors
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Checks a program against a schema: safety, monadic intensional predicates,
/// `edb(P) ⊆ schema`, and consistent arities. Returns every violation found.
pub fn validate(program: &Program, schema: &Schema) -> Result<(), Vec<DatalogError>> {
    let mut errors = program.structural_violations();
    let arities = program.arities();
    for p in program.edb() {
        match schema.arity(p) {
            None => errors.push(DatalogError::NotInSchema(p.to_string())),
            Some(a) if a != arities[p] => errors.push(DatalogError::ArityMismatch {
                name: p.to_string(),
                expected: a,
                got: arities[p],
            }),
            Some(_) => {}
        }
    }
    for p in program.idb() {
        if schema.contains(p) {
            errors.push(DatalogError::IdbInSchema(p.to_string()));
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

/// A query `(P, p)`: a program and a predicate occurring in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    program: Program,
    predicate: String,
}

impl Query {
    pub fn new(program: Program, predicate: impl Into<String>) -> Result<Self, DatalogError> {
        let predicate = predicate.into();
        if !program.occurs(&predicate) {
            return Err(DatalogError::UnknownQueryPredicate(predicate));
        }
        Ok(Query { program, predicate })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    pub fn arity(&self) -> usize {
        self.program.arities()[self.predicate.as_str()]
    }

    /// Canonical serialization `(p{rule,rule,…})`. Variables are renamed per
    /// rule in order of first occurrence to `x`, `x1`, `x2`, …
    pub fn canonical_string(&self) -> String {
        let rules: Vec<String> = self
            .program
            .rules
            .iter()
            .map(|r| {
                let names: BTreeMap<&str, String> = r
                    .variables()
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| (v, canonical_var(i)))
                    .collect();
                let atom = |a: &Atom| {
                    let args: Vec<&str> = a.args.iter().map(|v| names[v.as_str()].as_str()).collect();
                    format!("{}({})", a.predicate, args.join(","))
                };
                let body: Vec<String> = r.body.iter().map(atom).collect();
                format!("{}<-{}", atom(&r.head), body.join(","))
            })
            .collect();
        format!("({}{{{}}})", self.predicate, rules.join(","))
    }

    /// Length of the canonical serialization over the alphabet in which every
    /// predicate symbol, variable letter, digit, bracket, comma and the arrow
    /// count as one symbol each.
    pub fn size(&self) -> usize {
        let mut n = 4; // ( { } )
        n += 1; // query predicate
        n += self.program.rules.len().saturating_sub(1); // separating commas
        for r in &self.program.rules {
            let names: BTreeMap<&str, usize> = r
                .variables()
                .into_iter()
                .enumerate()
                .map(|(i, v)| (v, canonical_var(i).len()))
                .collect();
            let atom = |a: &Atom| -> usize {
                1 + 2 + a.args.len().saturating_sub(1) + a.args.iter().map(|v| names[v.as_str()]).sum::<usize>()
            };
            n += atom(&r.head) + 1 + r.body.iter().map(atom).sum::<usize>() + r.body.len() - 1;
        }
        n
    }
}

fn canonical_var(i: usize) -> String {
    if i == 0 {
        "x".to_string()
    } else {
        format!("x{i}")
    }
}

/// `query_size` as a free function.
pub fn query_size(q: &Query) -> usize {
    q.size()
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}query: {}", self.program, self.predicate)
    }
}

/// A total map from the variables of a rule to domain elements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation(pub BTreeMap<String, NodeId>);

impl Valuation {
    /// The ground atom `β(atom)`; `None` if some variable is unassigned.
    pub fn apply(&self, atom: &Atom) -> Option<Fact> {
        let args = atom
            .args
            .iter()
            .map(|v| self.0.get(v).copied())
            .collect::<Option<Vec<_>>>()?;
        Some(Fact::new(atom.predicate.clone(), args))
    }

    /// Every valuation of `vars` into a domain of `size` elements.
    pub fn all(vars: &[&str], size: usize) -> impl Iterator<Item = Valuation> {
        let vars: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
        let total = size.checked_pow(vars.len() as u32).unwrap_or(0);
        (0..total).map(move |mut code| {
            let mut map = BTreeMap::new();
            for v in &vars {
                map.insert(v.clone(), NodeId(code % size));
                code /= size;
            }
            Valuation(map)
        })
    }
}

/// Whether `h` (indexed by the elements of `a`) maps every tuple of every
/// relation of `a` into the same relation of `b`.
pub fn check_homomorphism(h: &[NodeId], a: &Structure, b: &Structure) -> bool {
    if h.len() != a.size() || h.iter().any(|v| v.0 >= b.size()) {
        return false;
    }
    a.schema().relations().all(|(name, _)| {
        a.relation(name).into_iter().flatten().all(|t| {
            let image: Vec<NodeId> = t.iter().map(|v| h[v.0]).collect();
            b.holds(name, &image)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::build_structure;
    use crate::tree::{Alphabet, LabeledTree};

    use crate::fixtures::TWO_WHITE;

    fn bw() -> Alphabet {
        Alphabet::new(["Black", "White"]).unwrap()
    }

    #[test]
    fn two_white_program_shape() {
        let p = parse_program(TWO_WHITE).unwrap();
        assert_eq!(p.rules().len(), 8);
        assert_eq!(p.idb(), vec!["Ans", "White2", "White1", "White0"]);
        let edb: Vec<&str> = p.edb().into_iter().collect();
        assert_eq!(edb, vec!["Fc", "Label_Black", "Label_White", "Ls", "Ns", "Root"]);
        assert!(validate(&p, &Schema::gk(&bw())).is_ok());
    }

    #[test]
    fn two_white_against_plain_ordered_schema() {
        let p = parse_program(TWO_WHITE).unwrap();
        let errs = validate(&p, &Schema::ordered(&bw())).unwrap_err();
        assert_eq!(
            errs,
            vec![
                DatalogError::NotInSchema("Ls".into()),
                DatalogError::NotInSchema("Root".into())
            ]
        );
    }

    #[test]
    fn binary_idb_is_not_monadic() {
        let p = parse_program("E(x,y) <- Child(x,y).").unwrap();
        let errs = validate(&p, &Schema::unordered(&bw())).unwrap_err();
        assert_eq!(errs, vec![DatalogError::NotMonadic("E".into())]);
    }

    #[test]
    fn idb_may_not_shadow_schema_relation() {
        let p = parse_program("Leaf(x) <- Child(x,y).").unwrap();
        let errs = validate(&p, &Schema::unordered_prime(&bw())).unwrap_err();
        assert_eq!(errs, vec![DatalogError::IdbInSchema("Leaf".into())]);
    }

    #[test]
    fn inconsistent_arity() {
        let p = parse_program("P(x) <- Child(x,y).\nQ(x) <- Child(x).").unwrap();
        let errs = validate(&p, &Schema::unordered(&bw())).unwrap_err();
        assert!(errs.contains(&DatalogError::ArityMismatch {
            name: "Child".into(),
            expected: 2,
            got: 1
        }));
    }

    #[test]
    fn query_size_of_unsat() {
        let q = parse_query("P(x) <- Child(x,x).\nquery: P").unwrap();
        assert_eq!(q.canonical_string(), "(P{P(x)<-Child(x,x)})");
        // ( P { P ( x ) <- Child ( x , x ) } )
        assert_eq!(q.size(), 16);
        let q2 = parse_query("P(x) <- Child(x,x).\nP(y) <- Child(y,z), Leaf(z).\nquery: P").unwrap();
        assert_eq!(
            q2.canonical_string(),
            "(P{P(x)<-Child(x,x),P(x)<-Child(x,x1),Leaf(x1)})"
        );
        // second rule: P ( x ) <- Child ( x , x 1 ) , Leaf ( x 1 ) = 18, plus a comma
        assert_eq!(q2.size(), 16 + 18 + 1);
        assert!(q2.size() > q.size());
    }

    #[test]
    fn homomorphism_from_cherry_to_path() {
        let a = Alphabet::new(["a"]).unwrap();
        let t2 = LabeledTree::parse("(a (a) (a))", false).unwrap();
        let t1 = LabeledTree::parse("(a (a))", false).unwrap();
        let m = Schema::unordered_with(&a, &[crate::structure::Axis::Desc, crate::structure::Axis::Root, crate::structure::Axis::Leaf]);
        let sa = build_structure(&t2, &m).unwrap();
        let sb = build_structure(&t1, &m).unwrap();
        let h = [NodeId(0), NodeId(1), NodeId(1)];
        assert!(check_homomorphism(&h, &sa, &sb));
        assert!(check_homomorphism(&[NodeId(0), NodeId(1), NodeId(2)], &sa, &sa));
        let with_is = Schema::unordered_prime(&a);
        let sa = build_structure(&t2, &with_is).unwrap();
        let sb = build_structure(&t1, &with_is).unwrap();
        assert!(!check_homomorphism(&h, &sa, &sb));
    }

    #[test]
    fn valuations_enumerate_all_maps() {
        assert_eq!(Valuation::all(&["x", "y"], 3).count(), 9);
        let v = Valuation::all(&["x"], 2).nth(1).unwrap();
        assert_eq!(
            v.apply(&Atom::new("P", ["x"])),
            Some(Fact::new("P", vec![NodeId(1)]))
        );
        assert_eq!(v.apply(&Atom::new("P", ["z"])), None);
    }
}
