//! Containment, equivalence and satisfiability of unary monadic datalog
//! queries over ordered or unordered trees.
//!
//! Queries are translated to MSO, their derived axes are eliminated down to
//! `Fc`/`Ns`, and the resulting formula is compiled to a tree automaton whose
//! emptiness answers the question. Unordered queries never see sibling
//! order, so every unordered tree is the order-forgetting image of an ordered
//! one with the same answers; the ordered backend therefore decides both
//! modes.
//!
//! [`bounded_counterexample_search`] is an independent oracle that only uses
//! datalog evaluation.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::automata::{fcns_decode_marked, AutomataError, BoolOp, Compiler, Limits, TreeAutomaton};
use crate::datalog::{evaluate_unary_query, parse_query, validate, DatalogError, Query};
use crate::mso::{Formula, Var};
use crate::structure::{build_structure, Axis, Schema, StructureError};
use crate::translate::{
    axis_elim_ordered, axis_elim_unordered, datalog_to_mso, unordered_to_ordered, TranslateError, QUERY_VAR,
};
use crate::tree::{enumerate_trees, Alphabet, LabeledTree, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error(transparent)]
    Datalog(#[from] DatalogError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Automata(AutomataError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("the schema has no labels")]
    EmptyAlphabet,
    #[error("automaton witness {tree} with node {node} does not re-verify")]
    Unverified { tree: String, node: NodeId },
}

/// The class of trees a decision problem ranges over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeMode {
    pub ordered: bool,
    pub schema: Schema,
}

impl TreeMode {
    /// Ordered trees under τ'_o.
    pub fn ordered(alphabet: &Alphabet) -> Self {
        TreeMode {
            ordered: true,
            schema: Schema::ordered_prime(alphabet),
        }
    }

    /// Unordered trees under τ'_u.
    pub fn unordered(alphabet: &Alphabet) -> Self {
        TreeMode {
            ordered: false,
            schema: Schema::unordered_prime(alphabet),
        }
    }

    pub fn with_schema(ordered: bool, schema: Schema) -> Self {
        TreeMode { ordered, schema }
    }

    fn alphabet(&self) -> Result<Alphabet, DecideError> {
        self.schema.alphabet().ok_or(DecideError::EmptyAlphabet)
    }
}

/// A tree with a designated node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evidence {
    pub tree: LabeledTree,
    pub node: NodeId,
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.tree, self.node)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// For satisfiability, with a witness.
    Yes(Option<Evidence>),
    /// For containment and equivalence, with a counterexample.
    No(Option<Evidence>),
    /// The automata construction ran out of budget.
    Unknown(Unknown),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unknown {
    pub reason: AutomataError,
    /// Largest tree size the bounded oracle searched.
    pub searched_up_to: usize,
    /// What the bounded oracle found, if anything.
    pub oracle: Option<Evidence>,
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    pub fn evidence(&self) -> Option<&Evidence> {
        match self {
            Verdict::Yes(e) | Verdict::No(e) => e.as_ref(),
            Verdict::Unknown(u) => u.oracle.as_ref(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    pub limits: Limits,
    /// Tree size for the bounded oracle consulted when the budget runs out.
    pub oracle_nodes: usize,
    /// Shrink counterexamples and witnesses by deleting leaves.
    pub minimize: bool,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            limits: Limits::default(),
            oracle_nodes: 5,
            minimize: true,
        }
    }
}

/// `P_unsat(x) <- Child(x,x)`, or the `Fc` variant when the schema has no
/// `Child`.
pub fn unsat_query(schema: &Schema) -> Query {
    let rel = if schema.has_axis(Axis::Child) { "Child" } else { "Fc" };
    parse_query(&format!("P_unsat(x) <- {rel}(x,x).\nquery: P_unsat")).expect("well-formed")
}

/// A compiler session for one mode; automata for the same query are built
/// once and shared between questions.
pub struct Decider {
    mode: TreeMode,
    alphabet: Alphabet,
    options: DecideOptions,
    compiler: Compiler,
}

fn is_budget(e: &AutomataError) -> bool {
    matches!(e, AutomataError::StateBudgetExceeded { .. })
}

impl Decider {
    pub fn new(mode: TreeMode, options: DecideOptions) -> Result<Self, DecideError> {
        let alphabet = mode.alphabet()?;
        let compiler = Compiler::new(alphabet.clone()).with_limits(options.limits);
        Ok(Decider {
            mode,
            alphabet,
            options,
            compiler,
        })
    }

    pub fn mode(&self) -> &TreeMode {
        &self.mode
    }

    pub fn compiler(&self) -> &Compiler {
        &self.compiler
    }

    /// `ψ(x)` over `Label_α`, `Fc` and `Ns`.
    pub fn base_formula(&self, q: &Query) -> Result<Formula, DecideError> {
        validate(q.program(), &self.mode.schema).map_err(DatalogError::Invalid)?;
        let psi = datalog_to_mso(q)?;
        Ok(if self.mode.ordered {
            axis_elim_ordered(&psi)
        } else {
            unordered_to_ordered(&axis_elim_unordered(&psi))
        })
    }

    /// An automaton over the single track `x` accepting exactly the marked
    /// trees whose marked node the query selects.
    pub fn automaton(&mut self, q: &Query) -> Result<Result<TreeAutomaton, AutomataError>, DecideError> {
        let f = self.base_formula(q)?;
        match self.compiler.compile(&f, &[Var::Node(QUERY_VAR.into())]) {
            Ok(a) => Ok(Ok(a)),
            Err(e) if is_budget(&e) => Ok(Err(e)),
            Err(e) => Err(DecideError::Automata(e)),
        }
    }

    fn answers(&self, q: &Query, t: &LabeledTree) -> Result<BTreeSet<NodeId>, DecideError> {
        let s = build_structure(t, &self.mode.schema)?;
        Ok(evaluate_unary_query(q, &s)?)
    }

    /// Nodes in `[[q1]] \ [[q2]]` on `t`; with no `q2`, all of `[[q1]]`.
    fn difference(&self, q1: &Query, q2: Option<&Query>, t: &LabeledTree) -> Result<BTreeSet<NodeId>, DecideError> {
        let mut d = self.answers(q1, t)?;
        if let Some(q2) = q2 {
            let a2 = self.answers(q2, t)?;
            d.retain(|v| !a2.contains(v));
        }
        Ok(d)
    }

    /// Emptiness of `a`; a witness is decoded, re-verified against the
    /// queries and optionally shrunk.
    fn empty_or_evidence(
        &self,
        a: &TreeAutomaton,
        q1: &Query,
        q2: Option<&Query>,
    ) -> Result<Result<Option<Evidence>, AutomataError>, DecideError> {
        let witness = match a.is_empty(&self.options.limits) {
            Ok(w) => w,
            Err(e) if is_budget(&e) => return Ok(Err(e)),
            Err(e) => return Err(DecideError::Automata(e)),
        };
        let Some(w) = witness else {
            return Ok(Ok(None));
        };
        let (tree, asg) = fcns_decode_marked(&w).map_err(DecideError::Automata)?;
        let tree = tree.with_order(self.mode.ordered);
        let node = asg.nodes[QUERY_VAR];
        if !self.difference(q1, q2, &tree)?.contains(&node) {
            return Err(DecideError::Unverified {
                tree: tree.to_string(),
                node,
            });
        }
        let mut ev = Evidence { tree, node };
        if self.options.minimize {
            ev = self.shrink(ev, q1, q2)?;
        }
        Ok(Ok(Some(ev)))
    }

    /// Deletes leaves while some node stays in the difference, preferring
    /// to keep the current node.
    fn shrink(&self, mut ev: Evidence, q1: &Query, q2: Option<&Query>) -> Result<Evidence, DecideError> {
        'outer: loop {
            for v in ev.tree.nodes().collect::<Vec<_>>() {
                let Some((t, map)) = ev.tree.remove_leaf(v) else {
                    continue;
                };
                let d = self.difference(q1, q2, &t)?;
                let node = match map[ev.node.0] {
                    Some(n) if d.contains(&n) => n,
                    _ => match d.first() {
                        Some(&n) => n,
                        None => continue,
                    },
                };
                ev = Evidence { tree: t, node };
                continue 'outer;
            }
            return Ok(ev);
        }
    }

    fn unknown(&self, reason: AutomataError, q1: &Query, q2: Option<&Query>) -> Result<Verdict, DecideError> {
        let n = self.options.oracle_nodes;
        let oracle = self.search(q1, q2, n)?;
        Ok(Verdict::Unknown(Unknown {
            reason,
            searched_up_to: n,
            oracle,
        }))
    }

    fn search(&self, q1: &Query, q2: Option<&Query>, max_nodes: usize) -> Result<Option<Evidence>, DecideError> {
        for tree in enumerate_trees(&self.alphabet, max_nodes, self.mode.ordered) {
            if let Some(&node) = self.difference(q1, q2, &tree)?.first() {
                return Ok(Some(Evidence { tree, node }));
            }
        }
        Ok(None)
    }

    /// Is `[[q1]] ⊆ [[q2]]` on every tree of the mode?
    pub fn containment(&mut self, q1: &Query, q2: &Query) -> Result<Verdict, DecideError> {
        let a1 = self.automaton(q1)?;
        let a2 = self.automaton(q2)?;
        let (a1, a2) = match (a1, a2) {
            (Ok(a1), Ok(a2)) => (a1, a2),
            (Err(e), _) | (_, Err(e)) => return self.unknown(e, q1, Some(q2)),
        };
        let diff = match a1.product(&a2.complement(), BoolOp::And, &self.options.limits) {
            Ok(d) => d,
            Err(e) if is_budget(&e) => return self.unknown(e, q1, Some(q2)),
            Err(e) => return Err(DecideError::Automata(e)),
        };
        match self.empty_or_evidence(&diff, q1, Some(q2))? {
            Ok(None) => Ok(Verdict::Yes(None)),
            Ok(Some(ev)) => Ok(Verdict::No(Some(ev))),
            Err(e) => self.unknown(e, q1, Some(q2)),
        }
    }

    /// Do `q1` and `q2` select the same nodes on every tree? A refutation
    /// in either direction is conclusive even if the other ran out of
    /// budget.
    pub fn equivalence(&mut self, q1: &Query, q2: &Query) -> Result<Verdict, DecideError> {
        let forward = self.containment(q1, q2)?;
        if forward.is_no() {
            return Ok(forward);
        }
        let backward = self.containment(q2, q1)?;
        Ok(match (forward, backward) {
            (_, b @ Verdict::No(_)) => b,
            (Verdict::Yes(_), Verdict::Yes(_)) => Verdict::Yes(None),
            (Verdict::Unknown(u), _) | (_, Verdict::Unknown(u)) => Verdict::Unknown(u),
            (f, _) => f,
        })
    }

    /// Does `q` select a node on some tree of the mode?
    pub fn satisfiable(&mut self, q: &Query) -> Result<Verdict, DecideError> {
        let a = match self.automaton(q)? {
            Ok(a) => a,
            Err(e) => return self.unknown(e, q, None),
        };
        match self.empty_or_evidence(&a, q, None)? {
            Ok(None) => Ok(Verdict::No(None)),
            Ok(Some(ev)) => Ok(Verdict::Yes(Some(ev))),
            Err(e) => self.unknown(e, q, None),
        }
    }
}

pub fn containment(q1: &Query, q2: &Query, mode: &TreeMode) -> Result<Verdict, DecideError> {
    Decider::new(mode.clone(), DecideOptions::default())?.containment(q1, q2)
}

pub fn equivalence(q1: &Query, q2: &Query, mode: &TreeMode) -> Result<Verdict, DecideError> {
    Decider::new(mode.clone(), DecideOptions::default())?.equivalence(q1, q2)
}

pub fn satisfiable(q: &Query, mode: &TreeMode) -> Result<Verdict, DecideError> {
    Decider::new(mode.clone(), DecideOptions::default())?.satisfiable(q)
}

/// The first tree (smallest first, in enumeration order) of at most
/// `max_nodes` nodes with a node in `[[q1]] \ [[q2]]`, computed by datalog
/// evaluation alone.
pub fn bounded_counterexample_search(
    q1: &Query,
    q2: &Query,
    mode: &TreeMode,
    max_nodes: usize,
) -> Result<Option<Evidence>, DecideError> {
    let d = Decider::new(mode.clone(), DecideOptions::default())?;
    for q in [q1, q2] {
        validate(q.program(), &mode.schema).map_err(DatalogError::Invalid)?;
    }
    d.search(q1, Some(q2), max_nodes)
}

/// The first tree of at most `max_nodes` nodes on which `q` selects a node.
pub fn bounded_witness_search(q: &Query, mode: &TreeMode, max_nodes: usize) -> Result<Option<Evidence>, DecideError> {
    let d = Decider::new(mode.clone(), DecideOptions::default())?;
    validate(q.program(), &mode.schema).map_err(DatalogError::Invalid)?;
    d.search(q, None, max_nodes)
}
