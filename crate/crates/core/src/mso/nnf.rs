//! Negation normal form with quantifiers pushed inwards ("miniscoping").
//!
//! Quantifier blocks are distributed over the connective they commute with
//! and narrowed to the conjuncts (disjuncts) that mention their variables.
//! Vacuous quantifiers are dropped, which is sound on non-empty domains.

use super::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum QKind {
    Exists,
    Forall,
    ExistsSet,
    ForallSet,
}

impl QKind {
    pub(crate) fn is_set(self) -> bool {
        matches!(self, QKind::ExistsSet | QKind::ForallSet)
    }

    pub(crate) fn is_existential(self) -> bool {
        matches!(self, QKind::Exists | QKind::ExistsSet)
    }

    pub(crate) fn dual(self) -> QKind {
        match self {
            QKind::Exists => QKind::Forall,
            QKind::Forall => QKind::Exists,
            QKind::ExistsSet => QKind::ForallSet,
            QKind::ForallSet => QKind::ExistsSet,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum NAtom {
    Rel(String, Vec<String>),
    Eq(String, String),
    Member(String, String),
}

#[derive(Clone, Debug)]
pub(crate) enum Nf {
    Const(bool),
    Lit(bool, NAtom),
    And(Vec<Nf>),
    Or(Vec<Nf>),
    Q(QKind, String, Box<Nf>),
}

impl Nf {
    pub(crate) fn mentions(&self, is_set: bool, v: &str) -> bool {
        match self {
            Nf::Const(_) => false,
            Nf::Lit(_, atom) => match atom {
                NAtom::Rel(_, args) => !is_set && args.iter().any(|a| a == v),
                NAtom::Eq(x, y) => !is_set && (x == v || y == v),
                NAtom::Member(s, x) => {
                    if is_set {
                        s == v
                    } else {
                        x == v
                    }
                }
            },
            Nf::And(ps) | Nf::Or(ps) => ps.iter().any(|p| p.mentions(is_set, v)),
            Nf::Q(k, w, body) => !(k.is_set() == is_set && w == v) && body.mentions(is_set, v),
        }
    }
}

pub(crate) fn mk_and(parts: Vec<Nf>) -> Nf {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Nf::Const(true) => {}
            Nf::Const(false) => return Nf::Const(false),
            Nf::And(inner) => out.extend(inner),
            p => out.push(p),
        }
    }
    match out.len() {
        0 => Nf::Const(true),
        1 => out.pop().expect("one part"),
        _ => Nf::And(out),
    }
}

pub(crate) fn mk_or(parts: Vec<Nf>) -> Nf {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Nf::Const(false) => {}
            Nf::Const(true) => return Nf::Const(true),
            Nf::Or(inner) => out.extend(inner),
            p => out.push(p),
        }
    }
    match out.len() {
        0 => Nf::Const(false),
        1 => out.pop().expect("one part"),
        _ => Nf::Or(out),
    }
}

/// Quantifies the block `vars` (all of kind `k`) over `body`, pushing the
/// quantifiers as deep as the connectives allow. Requires a non-empty
/// domain, so that a vacuous quantifier can be dropped.
pub(crate) fn push_block(k: QKind, mut vars: Vec<String>, body: Nf) -> Nf {
    let is_set = k.is_set();
    vars.retain(|v| body.mentions(is_set, v));
    if vars.is_empty() {
        return body;
    }
    let exist = k.is_existential();
    match body {
        // distribute over the connective the quantifier commutes with
        Nf::Or(ps) if exist => mk_or(ps.into_iter().map(|p| push_block(k, vars.clone(), p)).collect()),
        Nf::And(ps) if !exist => mk_and(ps.into_iter().map(|p| push_block(k, vars.clone(), p)).collect()),
        Nf::And(ps) | Nf::Or(ps) => {
            let rebuild = |parts: Vec<Nf>| if exist { mk_and(parts) } else { mk_or(parts) };
            let (with, without): (Vec<Nf>, Vec<Nf>) =
                ps.into_iter().partition(|p| vars.iter().any(|v| p.mentions(is_set, v)));
            if !without.is_empty() {
                let mut parts = without;
                parts.push(push_block(k, vars, rebuild(with)));
                return rebuild(parts);
            }
            // the variable occurring in the fewest parts, if it misses one
            let counts: Vec<usize> = vars
                .iter()
                .map(|v| with.iter().filter(|p| p.mentions(is_set, v)).count())
                .collect();
            let (best, &count) = counts.iter().enumerate().min_by_key(|(_, c)| **c).expect("non-empty");
            if count < with.len() && vars.len() > 1 {
                let v = vars.remove(best);
                let (inner, outer): (Vec<Nf>, Vec<Nf>) = with.into_iter().partition(|p| p.mentions(is_set, &v));
                let mut parts = outer;
                parts.push(push_block(k, vec![v], rebuild(inner)));
                return push_block(k, vars, rebuild(parts));
            }
            wrap(k, vars, rebuild(with))
        }
        Nf::Q(k2, w, inner) if k2 == k => {
            vars.push(w);
            push_block(k, vars, *inner)
        }
        body => wrap(k, vars, body),
    }
}

pub(crate) fn wrap(k: QKind, vars: Vec<String>, body: Nf) -> Nf {
    vars.into_iter().rev().fold(body, |b, v| Nf::Q(k, v, Box::new(b)))
}

pub(crate) fn nnf(f: &Formula, positive: bool) -> Nf {
    let lit = |atom: NAtom| Nf::Lit(positive, atom);
    let quant = |k: QKind, v: &String, body: &Formula| {
        let k = if positive { k } else { k.dual() };
        push_block(k, vec![v.clone()], nnf(body, positive))
    };
    match f {
        Formula::Rel(r, args) => lit(NAtom::Rel(r.clone(), args.clone())),
        Formula::Eq(x, y) if x == y => Nf::Const(positive),
        Formula::Eq(x, y) => lit(NAtom::Eq(x.clone(), y.clone())),
        Formula::Neq(x, y) if x == y => Nf::Const(!positive),
        Formula::Neq(x, y) => Nf::Lit(!positive, NAtom::Eq(x.clone(), y.clone())),
        Formula::Member(s, x) => lit(NAtom::Member(s.clone(), x.clone())),
        Formula::Not(g) => nnf(g, !positive),
        Formula::And(g, h) | Formula::Or(g, h) => {
            let parts = vec![nnf(g, positive), nnf(h, positive)];
            if matches!(f, Formula::And(..)) == positive {
                mk_and(parts)
            } else {
                mk_or(parts)
            }
        }
        Formula::Implies(g, h) => {
            let parts = vec![nnf(g, !positive), nnf(h, positive)];
            if positive {
                mk_or(parts)
            } else {
                mk_and(parts)
            }
        }
        Formula::Iff(g, h) => {
            // (g & h) | (~g & ~h), negated: (g & ~h) | (~g & h)
            let a = mk_and(vec![nnf(g, true), nnf(h, positive)]);
            let b = mk_and(vec![nnf(g, false), nnf(h, !positive)]);
            mk_or(vec![a, b])
        }
        Formula::Exists(v, b) => quant(QKind::Exists, v, b),
        Formula::Forall(v, b) => quant(QKind::Forall, v, b),
        Formula::ExistsSet(v, b) => quant(QKind::ExistsSet, v, b),
        Formula::ForallSet(v, b) => quant(QKind::ForallSet, v, b),
    }
}
