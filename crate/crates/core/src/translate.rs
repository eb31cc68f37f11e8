//! Translations between query formalisms.
//!
//! * monadic datalog to MSO, and the prenex Π₁ form of the result;
//! * elimination of the derived axes `Child`, `Desc`, `Root`, `Leaf`, `Ls`
//!   (ordered trees) and `Desc`, `Is`, `Root`, `Leaf` (unordered trees);
//! * the transfer of unordered-tree formulas to ordered trees.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::datalog::{Atom, DatalogError, Query};
use crate::mso::{Formula, Fresh};
use crate::structure::Axis;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("query predicate `{0}` is not unary")]
    NotUnary(String),
    #[error("query program is not valid: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    NotValidated(Vec<DatalogError>),
    #[error("formula does not have the expected shape: {0}")]
    WrongShape(String),
}

/// The free node variable of translated queries.
pub const QUERY_VAR: &str = "x";

/// Axis-defining formulas with free variables `x` (and `y`).
#[derive(Debug, Clone)]
pub struct AxisLibrary {
    /// `φ_Ns*(x,y)` over τ_o.
    pub ns_star: Formula,
    pub o_child: Formula,
    pub o_desc: Formula,
    pub o_root: Formula,
    pub o_leaf: Formula,
    pub o_ls: Formula,
    /// `φ_Child*(x,y)` over τ_u.
    pub child_star: Formula,
    pub u_desc: Formula,
    pub u_is: Formula,
    pub u_root: Formula,
    pub u_leaf: Formula,
}

/// `cl_ρ(X) = ∀u ∀w ((X(u) ∧ ρ(u,w)) → X(w))` for a template `ρ(x,y)`.
pub fn closed_under(rho: &Formula, set: &str) -> Formula {
    let mut fresh = Fresh::avoiding(rho);
    fresh.reserve(set);
    let (u, w) = (fresh.node_var("u"), fresh.node_var("w"));
    let step = instantiate(rho, &["x", "y"], &[u.as_str(), w.as_str()], &mut fresh);
    Formula::forall(
        u.clone(),
        Formula::forall(
            w.clone(),
            Formula::member(set, u).and(step).implies(Formula::member(set, w)),
        ),
    )
}

/// `∀X ((X(x) ∧ cl_ρ(X)) → X(y))`: `y` is reachable from `x` by `ρ`-steps.
fn reflexive_transitive(rho: &Formula) -> Formula {
    Formula::forall_set(
        "X",
        Formula::member("X", "x")
            .and(closed_under(rho, "X"))
            .implies(Formula::member("X", "y")),
    )
}

impl AxisLibrary {
    pub fn new() -> Self {
        let fc = |a: &str, b: &str| Formula::rel(Axis::Fc.name(), [a, b]);
        let ns = |a: &str, b: &str| Formula::rel(Axis::Ns.name(), [a, b]);
        let child = |a: &str, b: &str| Formula::rel(Axis::Child.name(), [a, b]);

        let ns_star = reflexive_transitive(&ns("x", "y"));
        let o_child = {
            let mut fresh = Fresh::avoiding(&ns_star);
            fresh.reserve_all(["x".to_string(), "y".to_string()]);
            let x1 = fresh.node_var("x");
            let star = instantiate(&ns_star, &["x", "y"], &[x1.as_str(), "y"], &mut fresh);
            Formula::exists(x1.clone(), fc("x", &x1).and(star))
        };
        let o_desc = Formula::neq("x", "y").and(reflexive_transitive(&o_child));
        let o_root = Formula::exists("y", fc("y", "x").or(ns("y", "x"))).not();
        let o_leaf = Formula::exists("y", fc("x", "y")).not();
        // the root has no next sibling either, but it is not a last sibling
        let o_ls = Formula::exists("y", ns("x", "y")).not().and(o_root.clone().not());

        let child_star = reflexive_transitive(&child("x", "y"));
        let u_desc = Formula::neq("x", "y").and(child_star.clone());
        let u_is = Formula::neq("x", "y").and(Formula::exists("u", child("u", "x").and(child("u", "y"))));
        let u_root = Formula::exists("y", child("y", "x")).not();
        let u_leaf = Formula::exists("y", child("x", "y")).not();
        AxisLibrary {
            ns_star,
            o_child,
            o_desc,
            o_root,
            o_leaf,
            o_ls,
            child_star,
            u_desc,
            u_is,
            u_root,
            u_leaf,
        }
    }

    /// The defining formula of `axis` over τ_o, if it is a derived axis there.
    pub fn ordered(&self, axis: Axis) -> Option<&Formula> {
        match axis {
            Axis::Child => Some(&self.o_child),
            Axis::Desc => Some(&self.o_desc),
            Axis::Root => Some(&self.o_root),
            Axis::Leaf => Some(&self.o_leaf),
            Axis::Ls => Some(&self.o_ls),
            _ => None,
        }
    }

    /// The defining formula of `axis` over τ_u, if it is a derived axis there.
    pub fn unordered(&self, axis: Axis) -> Option<&Formula> {
        match axis {
            Axis::Desc => Some(&self.u_desc),
            Axis::Is => Some(&self.u_is),
            Axis::Root => Some(&self.u_root),
            Axis::Leaf => Some(&self.u_leaf),
            _ => None,
        }
    }
}

impl Default for AxisLibrary {
    fn default() -> Self {
        Self::new()
    }
}

/// `template(params := args)` with all bound variables of the template
/// renamed to names drawn from `fresh`.
pub fn instantiate(template: &Formula, params: &[&str], args: &[&str], fresh: &mut Fresh) -> Formula {
    let map: BTreeMap<String, String> = params
        .iter()
        .zip(args)
        .map(|(p, a)| (p.to_string(), a.to_string()))
        .collect();
    template.rename_bound(fresh).substitute_free(&map)
}

fn replace_axes(f: &Formula, lookup: impl Fn(Axis) -> Option<Formula>) -> Formula {
    let mut fresh = Fresh::avoiding(f);
    fresh.reserve_all(["x".to_string(), "y".to_string()]);
    f.map_atoms(&mut |name, args| {
        let template = Axis::from_name(name).and_then(&lookup)?;
        let params: &[&str] = if args.len() == 1 { &["x"] } else { &["x", "y"] };
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        Some(instantiate(&template, params, &args, &mut fresh))
    })
}

/// Replaces `Child`, `Desc`, `Root`, `Leaf` and `Ls` atoms by their
/// definitions over `Fc` and `Ns`.
pub fn axis_elim_ordered(f: &Formula) -> Formula {
    let lib = AxisLibrary::new();
    replace_axes(f, |a| lib.ordered(a).cloned())
}

/// Replaces `Desc`, `Is`, `Root` and `Leaf` atoms by their definitions over
/// `Child`.
pub fn axis_elim_unordered(f: &Formula) -> Formula {
    let lib = AxisLibrary::new();
    replace_axes(f, |a| lib.unordered(a).cloned())
}

/// Replaces `Child` atoms by their definition over `Fc` and `Ns`, turning a
/// formula over τ_u into one over τ_o that ignores sibling order.
pub fn unordered_to_ordered(f: &Formula) -> Formula {
    let lib = AxisLibrary::new();
    replace_axes(f, |a| (a == Axis::Child).then(|| lib.o_child.clone()))
}

/// Set variables `X1, ..., Xm` for the intensional predicates, in order of
/// first appearance in the program.
pub fn idb_set_variables(q: &Query) -> BTreeMap<String, String> {
    q.program()
        .idb()
        .into_iter()
        .enumerate()
        .map(|(i, p)| (p.to_string(), format!("X{}", i + 1)))
        .collect()
}

fn check_query(q: &Query) -> Result<(), TranslateError> {
    if q.arity() != 1 {
        return Err(TranslateError::NotUnary(q.predicate().to_string()));
    }
    let violations = q.program().structural_violations();
    if !violations.is_empty() {
        return Err(TranslateError::NotValidated(violations));
    }
    Ok(())
}

/// Rules with variables renamed to `z0, z1, ...`, distinct across rules, and
/// atoms translated to MSO atoms. Returns (bound variables, body, head) per
/// rule.
fn translated_rules(q: &Query) -> Vec<(Vec<String>, Vec<Formula>, Formula)> {
    let sets = idb_set_variables(q);
    let mut counter = 0;
    q.program()
        .rules()
        .iter()
        .map(|r| {
            let names: BTreeMap<&str, String> = r
                .variables()
                .into_iter()
                .map(|v| {
                    let z = format!("z{counter}");
                    counter += 1;
                    (v, z)
                })
                .collect();
            let mut vars: Vec<String> = r.variables().into_iter().map(|v| names[v].clone()).collect();
            vars.dedup();
            let atom = |a: &Atom| {
                let args: Vec<String> = a.args.iter().map(|v| names[v.as_str()].clone()).collect();
                match sets.get(&a.predicate) {
                    Some(set) => Formula::member(set.clone(), args[0].clone()),
                    None => Formula::Rel(a.predicate.clone(), args),
                }
            };
            let body = r.body.iter().map(atom).collect();
            (vars, body, atom(&r.head))
        })
        .collect()
}

/// `∀X1 ... ∀Xm (χ → X_P(x))` with `χ` the conjunction over all rules of
/// `∀z̄ ((b1 ∧ ... ∧ bn) → h)`. For an extensional query predicate `P` the
/// result is the atom `P(x)`.
pub fn datalog_to_mso(q: &Query) -> Result<Formula, TranslateError> {
    check_query(q)?;
    let sets = idb_set_variables(q);
    let Some(target) = sets.get(q.predicate()) else {
        return Ok(Formula::rel(q.predicate(), [QUERY_VAR]));
    };
    let psi: Vec<Formula> = translated_rules(q)
        .into_iter()
        .map(|(vars, body, head)| {
            let body = Formula::and_all(body).expect("rules have non-empty bodies");
            vars.into_iter()
                .rev()
                .fold(body.implies(head), |f, z| Formula::forall(z, f))
        })
        .collect();
    let chi = Formula::and_all(psi).expect("an intensional predicate has a rule");
    let matrix = chi.implies(Formula::member(target.clone(), QUERY_VAR));
    Ok(q.program()
        .idb()
        .iter()
        .rev()
        .fold(matrix, |f, p| Formula::forall_set(sets[*p].clone(), f)))
}

/// Rewrites the output of [`datalog_to_mso`] into the prenex form
/// `∀X1 ... ∀Xm ∃z̄ (X_P(x) ∨ ⋁_r (b_r ∧ ¬h_r))`.
///
/// Formulas that already are Π₁ are returned unchanged.
pub fn to_prenex_pi1(f: &Formula) -> Result<Formula, TranslateError> {
    if f.is_pi1() {
        return Ok(f.clone());
    }
    let mut sets = Vec::new();
    let mut g = f;
    while let Formula::ForallSet(x, body) = g {
        sets.push(x.clone());
        g = body;
    }
    let Formula::Implies(chi, target) = g else {
        return Err(TranslateError::WrongShape("expected `χ -> X(x)` under the set quantifiers".into()));
    };
    if !matches!(**target, Formula::Member(..)) {
        return Err(TranslateError::WrongShape("conclusion is not a membership atom".into()));
    }
    let mut conjuncts = Vec::new();
    flatten_and(chi, &mut conjuncts);

    // rename rule variables apart from everything else
    let mut fresh = Fresh::avoiding(f);
    let mut seen = std::collections::BTreeSet::new();
    let mut exists = Vec::new();
    let mut disjuncts = vec![(**target).clone()];
    for psi in conjuncts {
        let mut vars = Vec::new();
        let mut h = psi;
        while let Formula::Forall(z, body) = h {
            vars.push(z.clone());
            h = body;
        }
        let Formula::Implies(body, head) = h else {
            return Err(TranslateError::WrongShape(format!("rule formula `{psi}` is not an implication")));
        };
        if !body.is_quantifier_free() || !head.is_quantifier_free() {
            return Err(TranslateError::WrongShape(format!("rule formula `{psi}` has nested quantifiers")));
        }
        let mut map = BTreeMap::new();
        for z in &vars {
            let name = if seen.insert(z.clone()) {
                z.clone()
            } else {
                let n = fresh.node_var(z);
                seen.insert(n.clone());
                n
            };
            map.insert(z.clone(), name.clone());
            exists.push(name);
        }
        let violated = (**body).clone().and((**head).clone().not());
        disjuncts.push(violated.substitute_free(&map));
    }
    let matrix = Formula::or_all(disjuncts).expect("non-empty");
    let prenex = exists.into_iter().rev().fold(matrix, |m, z| Formula::exists(z, m));
    Ok(sets.into_iter().rev().fold(prenex, |m, x| Formula::forall_set(x, m)))
}

fn flatten_and<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) {
    match f {
        Formula::And(a, b) => {
            flatten_and(a, out);
            flatten_and(b, out);
        }
        other => out.push(other),
    }
}
