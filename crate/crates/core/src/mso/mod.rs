//! Monadic second-order formulas over relational structures.
//!
//! Node variables are conventionally lowercase, set variables uppercase.

mod eval;
pub(crate) mod nnf;
mod parse;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::tree::NodeId;

pub use eval::{
    evaluate, evaluate_reference, evaluate_unary, evaluate_unary_with, evaluate_with, set_nesting, EvalOptions,
    DEFAULT_EVAL_BUDGET,
};
pub use parse::{parse_formula, parse_formula_in};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MsoError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{name}` has arity {expected}, used with {got} arguments")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("variable `{0}` is used both as a node and as a set variable")]
    KindConflict(String),
    #[error("expected exactly one free node variable and no free set variables, found {0}")]
    WrongFreeVariableShape(String),
    #[error("variable `{0}` is assigned an element outside the domain")]
    OutOfDomain(String),
    #[error("direct evaluation needs about 2^{needed_log2} steps, budget is 2^{budget_log2}")]
    BudgetExceeded { needed_log2: u32, budget_log2: u32 },
}

/// A free or bound variable together with its sort.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Node(String),
    Set(String),
}

impl Var {
    pub fn name(&self) -> &str {
        match self {
            Var::Node(n) | Var::Set(n) => n,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `R(x1,...,xr)`
    Rel(String, Vec<String>),
    Eq(String, String),
    Neq(String, String),
    /// `X(x)`: set variable, node variable.
    Member(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    ExistsSet(String, Box<Formula>),
    ForallSet(String, Box<Formula>),
}

impl Formula {
    pub fn rel<S: Into<String>>(name: impl Into<String>, args: impl IntoIterator<Item = S>) -> Self {
        Formula::Rel(name.into(), args.into_iter().map(Into::into).collect())
    }

    pub fn eq(x: impl Into<String>, y: impl Into<String>) -> Self {
        Formula::Eq(x.into(), y.into())
    }

    pub fn neq(x: impl Into<String>, y: impl Into<String>) -> Self {
        Formula::Neq(x.into(), y.into())
    }

    pub fn member(set: impl Into<String>, node: impl Into<String>) -> Self {
        Formula::Member(set.into(), node.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Self {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: Formula) -> Self {
        Formula::Iff(Box::new(self), Box::new(other))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(var.into(), Box::new(body))
    }

    pub fn exists_set(var: impl Into<String>, body: Formula) -> Self {
        Formula::ExistsSet(var.into(), Box::new(body))
    }

    pub fn forall_set(var: impl Into<String>, body: Formula) -> Self {
        Formula::ForallSet(var.into(), Box::new(body))
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn and_all(parts: impl IntoIterator<Item = Formula>) -> Option<Self> {
        parts.into_iter().reduce(Formula::and)
    }

    pub fn or_all(parts: impl IntoIterator<Item = Formula>) -> Option<Self> {
        parts.into_iter().reduce(Formula::or)
    }

    /// Free variables, with their sorts.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut add = |v: Var, bound: &Vec<Var>| {
            if !bound.contains(&v) {
                out.insert(v);
            }
        };
        match self {
            Formula::Rel(_, args) => {
                for a in args {
                    add(Var::Node(a.clone()), bound);
                }
            }
            Formula::Eq(x, y) | Formula::Neq(x, y) => {
                add(Var::Node(x.clone()), bound);
                add(Var::Node(y.clone()), bound);
            }
            Formula::Member(s, x) => {
                add(Var::Set(s.clone()), bound);
                add(Var::Node(x.clone()), bound);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(Var::Node(v.clone()));
                body.collect_free(bound, out);
                bound.pop();
            }
            Formula::ExistsSet(v, body) | Formula::ForallSet(v, body) => {
                bound.push(Var::Set(v.clone()));
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Names of all variables occurring anywhere, free or bound.
    pub fn variable_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Rel(_, args) => out.extend(args.iter().cloned()),
            Formula::Eq(x, y) | Formula::Neq(x, y) | Formula::Member(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Formula::Exists(v, _) | Formula::Forall(v, _) | Formula::ExistsSet(v, _) | Formula::ForallSet(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Relation symbols with the arities they are used with.
    pub fn relations(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Rel(r, args) = f {
                out.insert((r.clone(), args.len()));
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(a)
            | Formula::Exists(_, a)
            | Formula::Forall(_, a)
            | Formula::ExistsSet(_, a)
            | Formula::ForallSet(_, a) => a.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut qf = true;
        self.visit(&mut |f| {
            if matches!(
                f,
                Formula::Exists(..) | Formula::Forall(..) | Formula::ExistsSet(..) | Formula::ForallSet(..)
            ) {
                qf = false;
            }
        });
        qf
    }

    /// `∀X1 ... ∀Xm ∃x1 ... ∃xk ξ` with `ξ` quantifier-free.
    pub fn is_pi1(&self) -> bool {
        let mut f = self;
        while let Formula::ForallSet(_, body) = f {
            f = body;
        }
        while let Formula::Exists(_, body) = f {
            f = body;
        }
        f.is_quantifier_free()
    }

    /// Rewrites into the core connectives (atoms, `x = y`, `¬`, `∨`, `∃x`,
    /// `∃X`), removes double negations and renames bound variables
    /// canonically. Two formulas are alpha-equivalent iff their normal forms
    /// are equal.
    pub fn normalize(&self) -> Formula {
        let core = self.to_core();
        let taken: HashSet<String> = core.free_vars().into_iter().map(|v| v.name().to_string()).collect();
        let mut counter = 0;
        core.canonical_names(&taken, &mut BTreeMap::new(), &mut counter)
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.normalize() == other.normalize()
    }

    fn to_core(&self) -> Formula {
        fn neg(f: Formula) -> Formula {
            match f {
                Formula::Not(inner) => *inner,
                f => f.not(),
            }
        }
        match self {
            Formula::Rel(..) | Formula::Eq(..) | Formula::Member(..) => self.clone(),
            Formula::Neq(x, y) => Formula::eq(x.clone(), y.clone()).not(),
            Formula::Not(a) => neg(a.to_core()),
            Formula::Or(a, b) => a.to_core().or(b.to_core()),
            Formula::And(a, b) => neg(neg(a.to_core()).or(neg(b.to_core()))),
            Formula::Implies(a, b) => neg(a.to_core()).or(b.to_core()),
            Formula::Iff(a, b) => {
                let (a, b) = (a.to_core(), b.to_core());
                let fwd = neg(a.clone()).or(b.clone());
                let bwd = neg(b).or(a);
                neg(neg(fwd).or(neg(bwd)))
            }
            Formula::Exists(v, body) => Formula::exists(v.clone(), body.to_core()),
            Formula::Forall(v, body) => neg(Formula::exists(v.clone(), neg(body.to_core()))),
            Formula::ExistsSet(v, body) => Formula::exists_set(v.clone(), body.to_core()),
            Formula::ForallSet(v, body) => neg(Formula::exists_set(v.clone(), neg(body.to_core()))),
        }
    }

    fn canonical_names(
        &self,
        taken: &HashSet<String>,
        scope: &mut BTreeMap<(bool, String), String>,
        counter: &mut usize,
    ) -> Formula {
        let node = |v: &String, scope: &BTreeMap<(bool, String), String>| {
            scope.get(&(false, v.clone())).cloned().unwrap_or_else(|| v.clone())
        };
        let set = |v: &String, scope: &BTreeMap<(bool, String), String>| {
            scope.get(&(true, v.clone())).cloned().unwrap_or_else(|| v.clone())
        };
        let mut bind = |is_set: bool, v: &String, body: &Formula, scope: &mut BTreeMap<(bool, String), String>| {
            let name = loop {
                let candidate = if is_set { format!("B{counter}") } else { format!("b{counter}") };
                *counter += 1;
                if !taken.contains(&candidate) {
                    break candidate;
                }
            };
            let key = (is_set, v.clone());
            let saved = scope.insert(key.clone(), name.clone());
            let body = body.canonical_names(taken, scope, counter);
            match saved {
                Some(s) => scope.insert(key, s),
                None => scope.remove(&key),
            };
            (name, body)
        };
        match self {
            Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|a| node(a, scope)).collect()),
            Formula::Eq(x, y) => Formula::Eq(node(x, scope), node(y, scope)),
            Formula::Neq(x, y) => Formula::Neq(node(x, scope), node(y, scope)),
            Formula::Member(s, x) => Formula::Member(set(s, scope), node(x, scope)),
            Formula::Not(a) => a.canonical_names(taken, scope, counter).not(),
            Formula::And(a, b) => a
                .canonical_names(taken, scope, counter)
                .and(b.canonical_names(taken, scope, counter)),
            Formula::Or(a, b) => a
                .canonical_names(taken, scope, counter)
                .or(b.canonical_names(taken, scope, counter)),
            Formula::Implies(a, b) => a
                .canonical_names(taken, scope, counter)
                .implies(b.canonical_names(taken, scope, counter)),
            Formula::Iff(a, b) => a
                .canonical_names(taken, scope, counter)
                .iff(b.canonical_names(taken, scope, counter)),
            Formula::Exists(v, b) => {
                let (n, b) = bind(false, v, b, scope);
                Formula::exists(n, b)
            }
            Formula::Forall(v, b) => {
                let (n, b) = bind(false, v, b, scope);
                Formula::forall(n, b)
            }
            Formula::ExistsSet(v, b) => {
                let (n, b) = bind(true, v, b, scope);
                Formula::exists_set(n, b)
            }
            Formula::ForallSet(v, b) => {
                let (n, b) = bind(true, v, b, scope);
                Formula::forall_set(n, b)
            }
        }
    }

    /// Renames every bound variable to a name drawn from `fresh`.
    pub fn rename_bound(&self, fresh: &mut Fresh) -> Formula {
        self.rename_bound_in(fresh, &mut BTreeMap::new())
    }

    fn rename_bound_in(&self, fresh: &mut Fresh, scope: &mut BTreeMap<(bool, String), String>) -> Formula {
        let node = |v: &String, scope: &BTreeMap<(bool, String), String>| {
            scope.get(&(false, v.clone())).cloned().unwrap_or_else(|| v.clone())
        };
        let set = |v: &String, scope: &BTreeMap<(bool, String), String>| {
            scope.get(&(true, v.clone())).cloned().unwrap_or_else(|| v.clone())
        };
        fn bind(
            f: &Formula,
            is_set: bool,
            v: &str,
            body: &Formula,
            fresh: &mut Fresh,
            scope: &mut BTreeMap<(bool, String), String>,
        ) -> Formula {
            let name = if is_set { fresh.set_var(v) } else { fresh.node_var(v) };
            let key = (is_set, v.to_string());
            let saved = scope.insert(key.clone(), name.clone());
            let body = body.rename_bound_in(fresh, scope);
            match saved {
                Some(s) => scope.insert(key, s),
                None => scope.remove(&key),
            };
            match f {
                Formula::Exists(..) => Formula::exists(name, body),
                Formula::Forall(..) => Formula::forall(name, body),
                Formula::ExistsSet(..) => Formula::exists_set(name, body),
                _ => Formula::forall_set(name, body),
            }
        }
        match self {
            Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|a| node(a, scope)).collect()),
            Formula::Eq(x, y) => Formula::Eq(node(x, scope), node(y, scope)),
            Formula::Neq(x, y) => Formula::Neq(node(x, scope), node(y, scope)),
            Formula::Member(s, x) => Formula::Member(set(s, scope), node(x, scope)),
            Formula::Not(a) => a.rename_bound_in(fresh, scope).not(),
            Formula::And(a, b) => a.rename_bound_in(fresh, scope).and(b.rename_bound_in(fresh, scope)),
            Formula::Or(a, b) => a.rename_bound_in(fresh, scope).or(b.rename_bound_in(fresh, scope)),
            Formula::Implies(a, b) => a.rename_bound_in(fresh, scope).implies(b.rename_bound_in(fresh, scope)),
            Formula::Iff(a, b) => a.rename_bound_in(fresh, scope).iff(b.rename_bound_in(fresh, scope)),
            Formula::Exists(v, b) | Formula::Forall(v, b) => bind(self, false, v, b, fresh, scope),
            Formula::ExistsSet(v, b) | Formula::ForallSet(v, b) => bind(self, true, v, b, fresh, scope),
        }
    }

    /// Replaces free node variables according to `map`. Callers must make
    /// sure no replacement is captured by a binder, e.g. by calling
    /// [`Formula::rename_bound`] first.
    pub fn substitute_free(&self, map: &BTreeMap<String, String>) -> Formula {
        self.subst_in(map, &mut Vec::new())
    }

    fn subst_in(&self, map: &BTreeMap<String, String>, bound: &mut Vec<String>) -> Formula {
        let r = |v: &String, bound: &Vec<String>| {
            if bound.contains(v) {
                v.clone()
            } else {
                map.get(v).cloned().unwrap_or_else(|| v.clone())
            }
        };
        match self {
            Formula::Rel(n, args) => Formula::Rel(n.clone(), args.iter().map(|a| r(a, bound)).collect()),
            Formula::Eq(x, y) => Formula::Eq(r(x, bound), r(y, bound)),
            Formula::Neq(x, y) => Formula::Neq(r(x, bound), r(y, bound)),
            Formula::Member(s, x) => Formula::Member(s.clone(), r(x, bound)),
            Formula::Not(a) => a.subst_in(map, bound).not(),
            Formula::And(a, b) => a.subst_in(map, bound).and(b.subst_in(map, bound)),
            Formula::Or(a, b) => a.subst_in(map, bound).or(b.subst_in(map, bound)),
            Formula::Implies(a, b) => a.subst_in(map, bound).implies(b.subst_in(map, bound)),
            Formula::Iff(a, b) => a.subst_in(map, bound).iff(b.subst_in(map, bound)),
            Formula::Exists(v, b) | Formula::Forall(v, b) => {
                bound.push(v.clone());
                let body = b.subst_in(map, bound);
                bound.pop();
                if matches!(self, Formula::Exists(..)) {
                    Formula::exists(v.clone(), body)
                } else {
                    Formula::forall(v.clone(), body)
                }
            }
            Formula::ExistsSet(v, b) => Formula::exists_set(v.clone(), b.subst_in(map, bound)),
            Formula::ForallSet(v, b) => Formula::forall_set(v.clone(), b.subst_in(map, bound)),
        }
    }

    /// Bottom-up rewrite of relation atoms.
    pub fn map_atoms(&self, f: &mut dyn FnMut(&str, &[String]) -> Option<Formula>) -> Formula {
        match self {
            Formula::Rel(n, args) => f(n, args).unwrap_or_else(|| self.clone()),
            Formula::Eq(..) | Formula::Neq(..) | Formula::Member(..) => self.clone(),
            Formula::Not(a) => a.map_atoms(f).not(),
            Formula::And(a, b) => {
                let a = a.map_atoms(f);
                a.and(b.map_atoms(f))
            }
            Formula::Or(a, b) => {
                let a = a.map_atoms(f);
                a.or(b.map_atoms(f))
            }
            Formula::Implies(a, b) => {
                let a = a.map_atoms(f);
                a.implies(b.map_atoms(f))
            }
            Formula::Iff(a, b) => {
                let a = a.map_atoms(f);
                a.iff(b.map_atoms(f))
            }
            Formula::Exists(v, b) => Formula::exists(v.clone(), b.map_atoms(f)),
            Formula::Forall(v, b) => Formula::forall(v.clone(), b.map_atoms(f)),
            Formula::ExistsSet(v, b) => Formula::exists_set(v.clone(), b.map_atoms(f)),
            Formula::ForallSet(v, b) => Formula::forall_set(v.clone(), b.map_atoms(f)),
        }
    }
}

/// Generator of variable names that are distinct from every name it has
/// seen or produced.
#[derive(Debug, Clone, Default)]
pub struct Fresh {
    used: HashSet<String>,
    counter: usize,
}

impl Fresh {
    pub fn new() -> Self {
        Self::default()
    }

    /// A generator avoiding every variable name of `f`.
    pub fn avoiding(f: &Formula) -> Self {
        let mut fresh = Fresh::new();
        fresh.reserve_all(f.variable_names());
        fresh
    }

    pub fn reserve(&mut self, name: impl Into<String>) {
        self.used.insert(name.into());
    }

    pub fn reserve_all(&mut self, names: impl IntoIterator<Item = String>) {
        self.used.extend(names);
    }

    fn next(&mut self, base: &str) -> String {
        loop {
            self.counter += 1;
            let candidate = format!("{base}{}", self.counter);
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    /// A fresh lowercase name derived from `hint`.
    pub fn node_var(&mut self, hint: &str) -> String {
        let base: String = hint.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
        let base = if base.is_empty() { "u".to_string() } else { base.to_ascii_lowercase() };
        self.next(&base)
    }

    /// A fresh uppercase name derived from `hint`.
    pub fn set_var(&mut self, hint: &str) -> String {
        let base: String = hint.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
        let base = if base.is_empty() { "Z".to_string() } else { base.to_ascii_uppercase() };
        self.next(&base)
    }
}

/// A variable assignment: nodes for node variables, node sets for set
/// variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub nodes: BTreeMap<String, NodeId>,
    pub sets: BTreeMap<String, BTreeSet<NodeId>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_node(mut self, var: impl Into<String>, v: NodeId) -> Self {
        self.nodes.insert(var.into(), v);
        self
    }

    pub fn with_set(mut self, var: impl Into<String>, s: impl IntoIterator<Item = NodeId>) -> Self {
        self.sets.insert(var.into(), s.into_iter().collect());
        self
    }
}

// Display precedences; higher binds tighter.
const P_QUANT: u8 = 0;
const P_IFF: u8 = 1;
const P_IMP: u8 = 2;
const P_OR: u8 = 3;
const P_AND: u8 = 4;
const P_NOT: u8 = 5;
const P_ATOM: u8 = 6;

impl Formula {
    fn precedence(&self) -> u8 {
        match self {
            Formula::Rel(..) | Formula::Eq(..) | Formula::Neq(..) | Formula::Member(..) => P_ATOM,
            Formula::Not(_) => P_NOT,
            Formula::And(..) => P_AND,
            Formula::Or(..) => P_OR,
            Formula::Implies(..) => P_IMP,
            Formula::Iff(..) => P_IFF,
            _ => P_QUANT,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let parens = self.precedence() < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            Formula::Rel(r, args) => write!(f, "{r}({})", args.join(","))?,
            Formula::Member(s, x) => write!(f, "{s}({x})")?,
            Formula::Eq(x, y) => write!(f, "{x} = {y}")?,
            Formula::Neq(x, y) => write!(f, "{x} != {y}")?,
            Formula::Not(a) => {
                f.write_str("~")?;
                a.fmt_prec(f, P_NOT)?;
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, P_AND)?;
                f.write_str(" & ")?;
                b.fmt_prec(f, P_AND + 1)?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, P_OR)?;
                f.write_str(" | ")?;
                b.fmt_prec(f, P_OR + 1)?;
            }
            Formula::Implies(a, b) => {
                a.fmt_prec(f, P_IMP + 1)?;
                f.write_str(" -> ")?;
                b.fmt_prec(f, P_IMP)?;
            }
            Formula::Iff(a, b) => {
                a.fmt_prec(f, P_IFF)?;
                f.write_str(" <-> ")?;
                b.fmt_prec(f, P_IFF + 1)?;
            }
            Formula::Exists(v, b) => {
                write!(f, "E {v}. ")?;
                b.fmt_prec(f, P_QUANT)?;
            }
            Formula::Forall(v, b) => {
                write!(f, "A {v}. ")?;
                b.fmt_prec(f, P_QUANT)?;
            }
            Formula::ExistsSet(v, b) => {
                write!(f, "E2 {v}. ")?;
                b.fmt_prec(f, P_QUANT)?;
            }
            Formula::ForallSet(v, b) => {
                write!(f, "A2 {v}. ")?;
                b.fmt_prec(f, P_QUANT)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, P_QUANT)
    }
}
