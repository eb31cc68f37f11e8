use std::collections::HashMap;
use std::fmt::Write as _;

use super::dta::{BoolOp, TreeAutomaton};
use super::{AutomataError, Limits};
use crate::mso::nnf::{nnf, NAtom, Nf, QKind};
use crate::mso::{Formula, Var};
use crate::structure::relation_label;
use crate::tree::Alphabet;

/// Compiles MSO formulas over `Label_α`, `Fc` and `Ns` into minimal
/// deterministic automata, sharing work between alpha-equivalent
/// subformulas.
#[derive(Debug, Clone)]
pub struct Compiler {
    alphabet: Alphabet,
    limits: Limits,
    cache: HashMap<String, TreeAutomaton>,
    largest: usize,
}

/// One-shot [`Compiler::compile`] with default limits.
pub fn compile(f: &Formula, tracks: &[Var], alphabet: &Alphabet) -> Result<TreeAutomaton, AutomataError> {
    Compiler::new(alphabet.clone()).compile(f, tracks)
}

impl Compiler {
    pub fn new(alphabet: Alphabet) -> Self {
        Compiler {
            alphabet,
            limits: Limits::default(),
            cache: HashMap::new(),
            largest: 0,
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// The most states any intermediate automaton has had.
    pub fn largest_intermediate(&self) -> usize {
        self.largest
    }

    /// An automaton over exactly `tracks` that accepts the encoding of `T`
    /// marked with `α` iff `T, α ⊨ f`, for assignments that mark each node
    /// track once.
    pub fn compile(&mut self, f: &Formula, tracks: &[Var]) -> Result<TreeAutomaton, AutomataError> {
        for v in f.free_vars() {
            if !tracks.contains(&v) {
                return Err(AutomataError::UntrackedVariable(v.to_string()));
            }
        }
        for (name, arity) in f.relations() {
            let expected = match name.as_str() {
                "Fc" | "Ns" => 2,
                _ if relation_label(&name).is_some() => 1,
                _ => return Err(AutomataError::UnsupportedAtom(name)),
            };
            if arity != expected {
                return Err(AutomataError::ArityMismatch { name, expected, got: arity });
            }
        }
        let nf = nnf(&f.normalize(), true);
        self.compile_nf(&nf)?.with_tracks(tracks)
    }

    fn note(&mut self, a: TreeAutomaton) -> TreeAutomaton {
        self.largest = self.largest.max(a.states());
        a
    }

    fn compile_nf(&mut self, f: &Nf) -> Result<TreeAutomaton, AutomataError> {
        if let Nf::Const(b) = f {
            return Ok(TreeAutomaton::constant(&self.alphabet, *b));
        }
        let (key, free) = cache_key(f);
        let positional = |v: &Var| -> Var {
            let i = free.iter().position(|w| w == v).expect("free variable");
            match v {
                Var::Node(_) => Var::Node(format!("#{i}")),
                Var::Set(_) => Var::Set(format!("#{i}")),
            }
        };
        if let Some(a) = self.cache.get(&key) {
            return Ok(a.rename_tracks(|t| {
                let i: usize = t.name()[1..].parse().expect("positional track");
                free[i].clone()
            }));
        }
        let a = match f {
            Nf::Const(_) => unreachable!("handled above"),
            Nf::Lit(positive, atom) => {
                let a = self.atom(atom);
                if *positive {
                    a
                } else {
                    a.complement()
                }
            }
            Nf::And(parts) | Nf::Or(parts) => {
                let op = if matches!(f, Nf::And(_)) { BoolOp::And } else { BoolOp::Or };
                let mut parts = parts
                    .iter()
                    .map(|p| self.compile_nf(p))
                    .collect::<Result<Vec<_>, _>>()?;
                parts.sort_by_key(|a| a.states());
                let mut acc = parts.remove(0);
                for p in parts {
                    acc = acc.product(&p, op, &self.limits)?.minimize();
                    acc = self.note(acc);
                }
                acc
            }
            Nf::Q(kind, _, _) => {
                let mut vars = Vec::new();
                let mut body = f;
                while let Nf::Q(k, v, inner) = body {
                    if k != kind {
                        break;
                    }
                    vars.push(if k.is_set() { Var::Set(v.clone()) } else { Var::Node(v.clone()) });
                    body = inner;
                }
                let a = self.compile_nf(body)?;
                if kind.is_existential() {
                    self.exists(a, &vars)?
                } else {
                    self.exists(a.complement(), &vars)?.complement()
                }
            }
        };
        let a = self.note(a);
        self.cache.insert(key, a.rename_tracks(positional));
        Ok(a)
    }

    fn exists(&mut self, mut a: TreeAutomaton, vars: &[Var]) -> Result<TreeAutomaton, AutomataError> {
        for v in vars {
            if !a.tracks().contains(v) {
                continue;
            }
            if let Var::Node(x) = v {
                let sing = TreeAutomaton::singleton(&self.alphabet, x);
                a = a.product(&sing, BoolOp::And, &self.limits)?;
                a = self.note(a);
            }
            a = a.project(std::slice::from_ref(v), &self.limits)?;
            a = self.note(a);
            a = a.minimize();
        }
        Ok(a)
    }

    fn atom(&self, atom: &NAtom) -> TreeAutomaton {
        let sigma = &self.alphabet;
        let node = |x: &str| Var::Node(x.to_string());
        match atom {
            NAtom::Rel(name, args) if name == "Fc" || name == "Ns" => {
                if args[0] == args[1] {
                    return TreeAutomaton::constant(sigma, false);
                }
                edge(sigma, node(&args[0]), node(&args[1]), name == "Fc")
            }
            NAtom::Rel(name, args) => {
                let label = relation_label(name).expect("checked in compile");
                match sigma.index_of(&label) {
                    None => TreeAutomaton::constant(sigma, false),
                    Some(want) => mark_test(sigma, vec![node(&args[0])], move |label, _| label == want),
                }
            }
            NAtom::Eq(x, y) => TreeAutomaton::from_fn(
                sigma,
                vec![node(x), node(y)],
                |l, r, _, bits| {
                    // 0: nothing seen, 1: both at one node, 2: otherwise
                    let (l, r) = (l.unwrap_or(0), r.unwrap_or(0));
                    match (l, r, bits) {
                        (0, 0, 0) => 0,
                        (0, 0, 0b11) | (1, 0, 0) | (0, 1, 0) => 1,
                        _ => 2,
                    }
                },
                |q| q == 1,
            ),
            NAtom::Member(set, x) => mark_test(sigma, vec![node(x), Var::Set(set.clone())], |_, bits| bits & 0b10 != 0),
        }
    }
}

/// Accepts iff the node carrying the first track satisfies `test(label,
/// bits)`.
fn mark_test(sigma: &Alphabet, tracks: Vec<Var>, test: impl Fn(usize, u64) -> bool) -> TreeAutomaton {
    TreeAutomaton::from_fn(
        sigma,
        tracks,
        move |l, r, label, bits| {
            // 0: not seen, 1: seen and passed, 2: seen and failed
            let below = l.unwrap_or(0).max(r.unwrap_or(0));
            if bits & 1 == 0 {
                below
            } else if below != 0 {
                2
            } else if test(label, bits) {
                1
            } else {
                2
            }
        },
        |q| q == 1,
    )
}

/// `Fc(x, y)` when `first_child`, else `Ns(x, y)`: `y` is the left
/// (respectively right) child of `x` in the encoding.
fn edge(sigma: &Alphabet, x: Var, y: Var, first_child: bool) -> TreeAutomaton {
    const NONE: u8 = 0;
    const Y_HERE: u8 = 1;
    const Y_BELOW: u8 = 2;
    const DONE: u8 = 3;
    const FAIL: u8 = 4;
    TreeAutomaton::from_fn(
        sigma,
        vec![x, y],
        move |l, r, _, bits| {
            let (l, r) = (l.unwrap_or(NONE), r.unwrap_or(NONE));
            let (bx, by) = (bits & 1 != 0, bits & 2 != 0);
            if l == FAIL || r == FAIL {
                return FAIL;
            }
            if l == DONE || r == DONE {
                return if bx || by || l.min(r) != NONE { FAIL } else { DONE };
            }
            if bx {
                let (near, far) = if first_child { (l, r) } else { (r, l) };
                return if !by && near == Y_HERE && far == NONE { DONE } else { FAIL };
            }
            let below = l != NONE || r != NONE;
            match (by, below) {
                (true, true) => FAIL,
                (true, false) => Y_HERE,
                (false, true) if l != NONE && r != NONE => FAIL,
                (false, true) => Y_BELOW,
                (false, false) => NONE,
            }
        },
        |q| q == DONE,
    )
}

/// A string identifying `f` up to the names of its variables, and its free
/// variables in order of first occurrence.
fn cache_key(f: &Nf) -> (String, Vec<Var>) {
    struct K {
        out: String,
        bound: Vec<Var>,
        free: Vec<Var>,
    }
    impl K {
        fn var(&mut self, v: Var) {
            if let Some(i) = self.bound.iter().rposition(|b| *b == v) {
                let _ = write!(self.out, "b{}", i);
            } else {
                let i = match self.free.iter().position(|w| *w == v) {
                    Some(i) => i,
                    None => {
                        self.free.push(v);
                        self.free.len() - 1
                    }
                };
                let _ = write!(self.out, "f{}", i);
            }
        }

        fn go(&mut self, f: &Nf) {
            let node = |x: &String| Var::Node(x.clone());
            match f {
                Nf::Const(b) => self.out.push(if *b { 'T' } else { 'F' }),
                Nf::Lit(positive, atom) => {
                    if !positive {
                        self.out.push('~');
                    }
                    match atom {
                        NAtom::Rel(r, args) => {
                            self.out.push_str(r);
                            self.out.push('(');
                            for a in args {
                                self.var(node(a));
                                self.out.push(',');
                            }
                            self.out.push(')');
                        }
                        NAtom::Eq(x, y) => {
                            self.out.push_str("=(");
                            self.var(node(x));
                            self.out.push(',');
                            self.var(node(y));
                            self.out.push(')');
                        }
                        NAtom::Member(s, x) => {
                            self.out.push_str("in(");
                            self.var(Var::Set(s.clone()));
                            self.out.push(',');
                            self.var(node(x));
                            self.out.push(')');
                        }
                    }
                }
                Nf::And(ps) | Nf::Or(ps) => {
                    self.out.push_str(if matches!(f, Nf::And(_)) { "&[" } else { "|[" });
                    for p in ps {
                        self.go(p);
                        self.out.push(';');
                    }
                    self.out.push(']');
                }
                Nf::Q(k, v, body) => {
                    let tag = match k {
                        QKind::Exists => "E",
                        QKind::Forall => "A",
                        QKind::ExistsSet => "E2",
                        QKind::ForallSet => "A2",
                    };
                    self.out.push_str(tag);
                    self.out.push('.');
                    self.bound
                        .push(if k.is_set() { Var::Set(v.clone()) } else { Var::Node(v.clone()) });
                    self.go(body);
                    self.bound.pop();
                }
            }
        }
    }
    let mut k = K {
        out: String::new(),
        bound: Vec::new(),
        free: Vec::new(),
    };
    k.go(f);
    (k.out, k.free)
}
