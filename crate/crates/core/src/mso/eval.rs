//! Direct evaluation of MSO formulas on finite structures.
//!
//! Two evaluators share the same semantics. [`evaluate_reference`] follows
//! the textbook definition literally. The default evaluator first brings the
//! formula into negation normal form, pushes quantifiers inwards as far as
//! they go, and then works on bitmasks: every subformula is evaluated for all
//! values of one chosen node variable at once. It applies to structures with
//! at most 64 elements; larger ones fall back to the reference evaluator.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::nnf::{nnf, NAtom, Nf, QKind};
use super::{Assignment, Formula, MsoError, Var};
use crate::structure::Structure;
use crate::tree::NodeId;

/// Default cap on `2^(set-quantifier nesting · |A|)`.
pub const DEFAULT_EVAL_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// Largest admissible value of `2^(set-quantifier nesting · |A|)`.
    pub budget: u64,
    /// Use the reference evaluator regardless of the structure size.
    pub reference: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            budget: DEFAULT_EVAL_BUDGET,
            reference: false,
        }
    }
}

/// Maximal number of set quantifiers along any root-to-leaf path.
pub fn set_nesting(f: &Formula) -> u32 {
    match f {
        Formula::Rel(..) | Formula::Eq(..) | Formula::Neq(..) | Formula::Member(..) => 0,
        Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => set_nesting(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            set_nesting(a).max(set_nesting(b))
        }
        Formula::ExistsSet(_, a) | Formula::ForallSet(_, a) => 1 + set_nesting(a),
    }
}

fn check_budget(f: &Formula, a: &Structure, opts: &EvalOptions) -> Result<(), MsoError> {
    let nesting = set_nesting(f);
    if nesting == 0 {
        return Ok(());
    }
    let budget_log2 = 63 - opts.budget.max(1).leading_zeros();
    let needed = (nesting as u64).saturating_mul(a.size() as u64);
    if needed > budget_log2 as u64 {
        return Err(MsoError::BudgetExceeded {
            needed_log2: needed.min(u32::MAX as u64) as u32,
            budget_log2,
        });
    }
    Ok(())
}

/// Checks symbols against the structure's schema and sorts of variables.
fn check_symbols(f: &Formula, a: &Structure) -> Result<(), MsoError> {
    for (r, n) in f.relations() {
        match a.schema().arity(&r) {
            None => return Err(MsoError::UnknownSymbol(r)),
            Some(k) if k != n => {
                return Err(MsoError::ArityMismatch {
                    name: r,
                    expected: k,
                    got: n,
                })
            }
            Some(_) => {}
        }
    }
    let free = f.free_vars();
    for v in &free {
        if let Var::Node(n) = v {
            if free.contains(&Var::Set(n.clone())) {
                return Err(MsoError::KindConflict(n.clone()));
            }
        }
    }
    Ok(())
}

fn check_assignment(f: &Formula, a: &Structure, asg: &Assignment) -> Result<(), MsoError> {
    for v in f.free_vars() {
        match &v {
            Var::Node(n) => match asg.nodes.get(n) {
                None => return Err(MsoError::UnboundVariable(n.clone())),
                Some(x) if x.0 >= a.size() => return Err(MsoError::OutOfDomain(n.clone())),
                _ => {}
            },
            Var::Set(n) => match asg.sets.get(n) {
                None => return Err(MsoError::UnboundVariable(n.clone())),
                Some(s) if s.iter().any(|x| x.0 >= a.size()) => return Err(MsoError::OutOfDomain(n.clone())),
                _ => {}
            },
        }
    }
    Ok(())
}

/// `A ⊨ f[asg]`.
pub fn evaluate(f: &Formula, a: &Structure, asg: &Assignment) -> Result<bool, MsoError> {
    evaluate_with(f, a, asg, &EvalOptions::default())
}

pub fn evaluate_with(f: &Formula, a: &Structure, asg: &Assignment, opts: &EvalOptions) -> Result<bool, MsoError> {
    check_symbols(f, a)?;
    check_assignment(f, a, asg)?;
    check_budget(f, a, opts)?;
    if !opts.reference {
        if let Some(mut prog) = Compiled::new(f, a) {
            for (name, slot) in &prog.free_nodes {
                prog.ctx.nodes[*slot] = asg.nodes[name].0;
            }
            for (name, slot) in &prog.free_sets {
                prog.ctx.sets[*slot] = asg.sets[name].iter().fold(0u64, |m, v| m | 1 << v.0);
            }
            let root = prog.root.take().expect("compiled");
            return Ok(prog.ctx.eval_bool(&root));
        }
    }
    Ok(Reference::new(a, asg).eval(f))
}

/// `[[f]](A)` for a formula whose only free variable is a node variable.
pub fn evaluate_unary(f: &Formula, a: &Structure) -> Result<BTreeSet<NodeId>, MsoError> {
    evaluate_unary_with(f, a, &EvalOptions::default())
}

pub fn evaluate_unary_with(f: &Formula, a: &Structure, opts: &EvalOptions) -> Result<BTreeSet<NodeId>, MsoError> {
    let free = f.free_vars();
    let var = match free.iter().next() {
        Some(Var::Node(x)) if free.len() == 1 => x.clone(),
        _ => {
            let shown: Vec<String> = free.iter().map(|v| v.to_string()).collect();
            return Err(MsoError::WrongFreeVariableShape(format!("{{{}}}", shown.join(", "))));
        }
    };
    check_symbols(f, a)?;
    check_budget(f, a, opts)?;
    if !opts.reference {
        if let Some(mut prog) = Compiled::new(f, a) {
            let slot = prog.free_nodes[&var];
            let root = prog.root.take().expect("compiled");
            let mask = prog.ctx.eval_vec(&root, slot);
            return Ok((0..a.size()).filter(|i| mask >> i & 1 == 1).map(NodeId).collect());
        }
    }
    let mut out = BTreeSet::new();
    for v in a.domain() {
        let asg = Assignment::new().with_node(var.clone(), v);
        if Reference::new(a, &asg).eval(f) {
            out.insert(v);
        }
    }
    Ok(out)
}

/// `A ⊨ f[asg]` computed by the reference evaluator.
pub fn evaluate_reference(f: &Formula, a: &Structure, asg: &Assignment) -> Result<bool, MsoError> {
    evaluate_with(
        f,
        a,
        asg,
        &EvalOptions {
            reference: true,
            ..EvalOptions::default()
        },
    )
}

struct Reference<'a> {
    a: &'a Structure,
    nodes: HashMap<String, usize>,
    sets: HashMap<String, Vec<bool>>,
}

impl<'a> Reference<'a> {
    fn new(a: &'a Structure, asg: &Assignment) -> Self {
        let nodes = asg.nodes.iter().map(|(k, v)| (k.clone(), v.0)).collect();
        let sets = asg
            .sets
            .iter()
            .map(|(k, s)| {
                let mut bits = vec![false; a.size()];
                for v in s {
                    bits[v.0] = true;
                }
                (k.clone(), bits)
            })
            .collect();
        Reference { a, nodes, sets }
    }

    fn node(&self, v: &str) -> usize {
        self.nodes[v]
    }

    fn eval(&mut self, f: &Formula) -> bool {
        match f {
            Formula::Rel(r, args) => {
                let tuple: Vec<NodeId> = args.iter().map(|x| NodeId(self.node(x))).collect();
                self.a.holds(r, &tuple)
            }
            Formula::Eq(x, y) => self.node(x) == self.node(y),
            Formula::Neq(x, y) => self.node(x) != self.node(y),
            Formula::Member(s, x) => self.sets[s.as_str()][self.node(x)],
            Formula::Not(g) => !self.eval(g),
            Formula::And(g, h) => self.eval(g) && self.eval(h),
            Formula::Or(g, h) => self.eval(g) || self.eval(h),
            Formula::Implies(g, h) => !self.eval(g) || self.eval(h),
            Formula::Iff(g, h) => self.eval(g) == self.eval(h),
            Formula::Exists(v, body) => self.node_quant(v, body, true),
            Formula::Forall(v, body) => !self.node_quant(v, body, false),
            Formula::ExistsSet(v, body) => self.set_quant(v, body, true),
            Formula::ForallSet(v, body) => !self.set_quant(v, body, false),
        }
    }

    /// Whether some value of `v` makes `body` evaluate to `target`.
    fn node_quant(&mut self, v: &str, body: &Formula, target: bool) -> bool {
        let saved = self.nodes.remove(v);
        let mut found = false;
        for i in 0..self.a.size() {
            self.nodes.insert(v.to_string(), i);
            if self.eval(body) == target {
                found = true;
                break;
            }
        }
        self.nodes.remove(v);
        if let Some(s) = saved {
            self.nodes.insert(v.to_string(), s);
        }
        found
    }

    fn set_quant(&mut self, v: &str, body: &Formula, target: bool) -> bool {
        let saved = self.sets.remove(v);
        let n = self.a.size();
        let mut bits = vec![false; n];
        let mut found = false;
        loop {
            self.sets.insert(v.to_string(), bits.clone());
            if self.eval(body) == target {
                found = true;
                break;
            }
            // next subset in binary counting order
            let mut i = 0;
            while i < n && bits[i] {
                bits[i] = false;
                i += 1;
            }
            if i == n {
                break;
            }
            bits[i] = true;
        }
        self.sets.remove(v);
        if let Some(s) = saved {
            self.sets.insert(v.to_string(), s);
        }
        found
    }
}

// ---------------------------------------------------------------------------
// Bitmask evaluation

enum RelTable<'a> {
    Unary(u64),
    Binary { fwd: Vec<u64>, bwd: Vec<u64>, diag: u64 },
    Other(&'a BTreeSet<Vec<NodeId>>),
    Empty,
}

enum Ir {
    Const(bool),
    Rel { pos: bool, rel: usize, args: Vec<usize> },
    Eq { pos: bool, x: usize, y: usize },
    Member { pos: bool, set: usize, x: usize },
    And(Vec<Node>),
    Or(Vec<Node>),
    Q { kind: QKind, slot: usize, body: Box<Node> },
}

struct Node {
    ir: Ir,
    // free node slots
    free: u64,
}

struct Ctx<'a> {
    n: usize,
    dom: u64,
    rels: Vec<RelTable<'a>>,
    nodes: Vec<usize>,
    sets: Vec<u64>,
}

struct Compiled<'a> {
    ctx: Ctx<'a>,
    root: Option<Node>,
    free_nodes: BTreeMap<String, usize>,
    free_sets: BTreeMap<String, usize>,
}

const MAX_SLOTS: usize = 64;

struct Resolver<'a, 'b> {
    a: &'a Structure,
    rel_index: HashMap<String, usize>,
    rels: &'b mut Vec<RelTable<'a>>,
    node_scope: Vec<(String, usize)>,
    set_scope: Vec<(String, usize)>,
    max_node_slot: usize,
    max_set_slot: usize,
}

impl<'a> Resolver<'a, '_> {
    fn node(&self, v: &str) -> usize {
        self.node_scope.iter().rev().find(|(n, _)| n == v).expect("checked free").1
    }

    fn set(&self, v: &str) -> usize {
        self.set_scope.iter().rev().find(|(n, _)| n == v).expect("checked free").1
    }

    fn table(&mut self, r: &str) -> usize {
        if let Some(&i) = self.rel_index.get(r) {
            return i;
        }
        let n = self.a.size();
        let arity = self.a.schema().arity(r).expect("checked symbol");
        let table = match (self.a.relation(r), arity) {
            (None, _) => RelTable::Empty,
            (Some(tuples), 1) => RelTable::Unary(tuples.iter().fold(0, |m, t| m | 1 << t[0].0)),
            (Some(tuples), 2) => {
                let mut fwd = vec![0u64; n];
                let mut bwd = vec![0u64; n];
                let mut diag = 0u64;
                for t in tuples {
                    let (x, y) = (t[0].0, t[1].0);
                    fwd[x] |= 1 << y;
                    bwd[y] |= 1 << x;
                    if x == y {
                        diag |= 1 << x;
                    }
                }
                RelTable::Binary { fwd, bwd, diag }
            }
            (Some(tuples), _) => RelTable::Other(tuples),
        };
        self.rels.push(table);
        self.rel_index.insert(r.to_string(), self.rels.len() - 1);
        self.rels.len() - 1
    }

    fn resolve(&mut self, f: &Nf) -> Option<Node> {
        Some(match f {
            Nf::Const(b) => Node {
                ir: Ir::Const(*b),
                free: 0,
            },
            Nf::Lit(pos, NAtom::Rel(r, args)) => {
                let rel = self.table(r);
                let args: Vec<usize> = args.iter().map(|a| self.node(a)).collect();
                Node {
                    free: args.iter().fold(0, |m, s| m | 1 << s),
                    ir: Ir::Rel { pos: *pos, rel, args },
                }
            }
            Nf::Lit(pos, NAtom::Eq(x, y)) => {
                let (x, y) = (self.node(x), self.node(y));
                Node {
                    free: 1 << x | 1 << y,
                    ir: Ir::Eq { pos: *pos, x, y },
                }
            }
            Nf::Lit(pos, NAtom::Member(s, x)) => {
                let (set, x) = (self.set(s), self.node(x));
                Node {
                    free: 1 << x,
                    ir: Ir::Member { pos: *pos, set, x },
                }
            }
            Nf::And(ps) | Nf::Or(ps) => {
                let mut parts = ps.iter().map(|p| self.resolve(p)).collect::<Option<Vec<Node>>>()?;
                // cheap parts first
                parts.sort_by_key(|p| !matches!(p.ir, Ir::Const(_) | Ir::Rel { .. } | Ir::Eq { .. } | Ir::Member { .. }));
                let free = parts.iter().fold(0, |m, p| m | p.free);
                Node {
                    free,
                    ir: if matches!(f, Nf::And(_)) { Ir::And(parts) } else { Ir::Or(parts) },
                }
            }
            Nf::Q(kind, v, body) => {
                if kind.is_set() {
                    let slot = self.set_scope.len();
                    self.max_set_slot = self.max_set_slot.max(slot + 1);
                    self.set_scope.push((v.clone(), slot));
                    let body = self.resolve(body);
                    self.set_scope.pop();
                    let body = body?;
                    Node {
                        free: body.free,
                        ir: Ir::Q {
                            kind: *kind,
                            slot,
                            body: Box::new(body),
                        },
                    }
                } else {
                    let slot = self.node_scope.len();
                    if slot >= MAX_SLOTS {
                        return None;
                    }
                    self.max_node_slot = self.max_node_slot.max(slot + 1);
                    self.node_scope.push((v.clone(), slot));
                    let body = self.resolve(body);
                    self.node_scope.pop();
                    let body = body?;
                    Node {
                        free: body.free & !(1 << slot),
                        ir: Ir::Q {
                            kind: *kind,
                            slot,
                            body: Box::new(body),
                        },
                    }
                }
            }
        })
    }
}

impl<'a> Compiled<'a> {
    /// `None` when the structure or the formula is too large for bitmasks.
    fn new(f: &Formula, a: &'a Structure) -> Option<Self> {
        let n = a.size();
        if n == 0 || n > 64 {
            return None;
        }
        let free = f.free_vars();
        let mut free_nodes = BTreeMap::new();
        let mut free_sets = BTreeMap::new();
        for v in &free {
            match v {
                Var::Node(x) => {
                    let k = free_nodes.len();
                    free_nodes.insert(x.clone(), k);
                }
                Var::Set(x) => {
                    let k = free_sets.len();
                    free_sets.insert(x.clone(), k);
                }
            }
        }
        if free_nodes.len() > MAX_SLOTS {
            return None;
        }
        let nf = nnf(f, true);
        let mut rels = Vec::new();
        let mut r = Resolver {
            a,
            rel_index: HashMap::new(),
            rels: &mut rels,
            node_scope: free_nodes.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            set_scope: free_sets.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            max_node_slot: free_nodes.len(),
            max_set_slot: free_sets.len(),
        };
        let root = r.resolve(&nf)?;
        let (max_node_slot, max_set_slot) = (r.max_node_slot, r.max_set_slot);
        Some(Compiled {
            ctx: Ctx {
                n,
                dom: if n == 64 { u64::MAX } else { (1 << n) - 1 },
                rels,
                nodes: vec![0; max_node_slot.max(1)],
                sets: vec![0; max_set_slot.max(1)],
            },
            root: Some(root),
            free_nodes,
            free_sets,
        })
    }
}

impl Ctx<'_> {
    fn rel_holds(&self, rel: usize, args: &[usize]) -> bool {
        match &self.rels[rel] {
            RelTable::Unary(m) => m >> self.nodes[args[0]] & 1 == 1,
            RelTable::Binary { fwd, .. } => fwd[self.nodes[args[0]]] >> self.nodes[args[1]] & 1 == 1,
            RelTable::Other(tuples) => {
                let t: Vec<NodeId> = args.iter().map(|&s| NodeId(self.nodes[s])).collect();
                tuples.contains(&t)
            }
            RelTable::Empty => false,
        }
    }

    fn eval_bool(&mut self, node: &Node) -> bool {
        match &node.ir {
            Ir::Const(b) => *b,
            Ir::Rel { pos, rel, args } => self.rel_holds(*rel, args) == *pos,
            Ir::Eq { pos, x, y } => (self.nodes[*x] == self.nodes[*y]) == *pos,
            Ir::Member { pos, set, x } => (self.sets[*set] >> self.nodes[*x] & 1 == 1) == *pos,
            Ir::And(ps) => ps.iter().all(|p| self.eval_bool(p)),
            Ir::Or(ps) => ps.iter().any(|p| self.eval_bool(p)),
            Ir::Q { kind, slot, body } => match kind {
                QKind::Exists => self.eval_vec(body, *slot) != 0,
                QKind::Forall => self.eval_vec(body, *slot) == self.dom,
                QKind::ExistsSet | QKind::ForallSet => {
                    let target = *kind == QKind::ExistsSet;
                    let mut m = 0u64;
                    loop {
                        self.sets[*slot] = m;
                        if self.eval_bool(body) == target {
                            return target;
                        }
                        if m == self.dom {
                            return !target;
                        }
                        m += 1;
                    }
                }
            },
        }
    }

    /// The set of values of slot `v` for which `node` holds.
    fn eval_vec(&mut self, node: &Node, v: usize) -> u64 {
        if node.free >> v & 1 == 0 {
            return if self.eval_bool(node) { self.dom } else { 0 };
        }
        let dom = self.dom;
        let polarity = |pos: bool, m: u64| if pos { m } else { !m & dom };
        match &node.ir {
            Ir::Const(b) => {
                if *b {
                    dom
                } else {
                    0
                }
            }
            Ir::Rel { pos, rel, args } => {
                let m = match &self.rels[*rel] {
                    RelTable::Unary(m) => *m,
                    RelTable::Binary { fwd, bwd, diag } => match (args[0] == v, args[1] == v) {
                        (true, true) => *diag,
                        (true, false) => bwd[self.nodes[args[1]]],
                        _ => fwd[self.nodes[args[0]]],
                    },
                    RelTable::Empty => 0,
                    RelTable::Other(_) => {
                        let mut m = 0;
                        for i in 0..self.n {
                            self.nodes[v] = i;
                            if self.rel_holds(*rel, args) {
                                m |= 1 << i;
                            }
                        }
                        m
                    }
                };
                polarity(*pos, m)
            }
            Ir::Eq { pos, x, y } => {
                let m = match (*x == v, *y == v) {
                    (true, true) => dom,
                    (true, false) => 1 << self.nodes[*y],
                    _ => 1 << self.nodes[*x],
                };
                polarity(*pos, m)
            }
            Ir::Member { pos, set, .. } => polarity(*pos, self.sets[*set] & dom),
            Ir::And(ps) => {
                let mut acc = dom;
                for p in ps {
                    acc &= self.eval_vec(p, v);
                    if acc == 0 {
                        break;
                    }
                }
                acc
            }
            Ir::Or(ps) => {
                let mut acc = 0;
                for p in ps {
                    acc |= self.eval_vec(p, v);
                    if acc == dom {
                        break;
                    }
                }
                acc
            }
            Ir::Q { kind, slot, body } => {
                let exist = kind.is_existential();
                let mut acc = if exist { 0 } else { dom };
                let limit = if kind.is_set() { dom } else { self.n as u64 - 1 };
                let mut i = 0u64;
                loop {
                    if kind.is_set() {
                        self.sets[*slot] = i;
                    } else {
                        self.nodes[*slot] = i as usize;
                    }
                    let m = self.eval_vec(body, v);
                    if exist {
                        acc |= m;
                        if acc == dom {
                            break;
                        }
                    } else {
                        acc &= m;
                        if acc == 0 {
                            break;
                        }
                    }
                    if i == limit {
                        break;
                    }
                    i += 1;
                }
                acc
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;
    use crate::structure::{build_structure, Schema};
    use crate::tree::{enumerate_trees, Alphabet, LabeledTree};

    use crate::fixtures::SAMPLE;

    fn bw() -> Alphabet {
        Alphabet::new(["Black", "White"]).unwrap()
    }

    fn sample_unordered() -> Structure {
        build_structure(&LabeledTree::parse(SAMPLE, false).unwrap(), &Schema::unordered(&bw())).unwrap()
    }

    fn ids(s: &BTreeSet<NodeId>) -> Vec<usize> {
        s.iter().map(|v| v.0).collect()
    }

    #[test]
    fn two_white_children_formula() {
        let f = parse_formula(crate::fixtures::MSO_CHILD).unwrap();
        let a = sample_unordered();
        assert!(evaluate(&f, &a, &Assignment::new().with_node("x", NodeId(0))).unwrap());
        assert!(!evaluate(&f, &a, &Assignment::new().with_node("x", NodeId(2))).unwrap());
        assert_eq!(ids(&evaluate_unary(&f, &a).unwrap()), vec![0]);
        let slow = EvalOptions {
            reference: true,
            ..Default::default()
        };
        assert_eq!(ids(&evaluate_unary_with(&f, &a, &slow).unwrap()), vec![0]);
    }

    #[test]
    fn leaf_formula_on_sample() {
        let f = parse_formula("~E y. Child(x,y)").unwrap();
        assert_eq!(ids(&evaluate_unary(&f, &sample_unordered()).unwrap()), vec![1, 3, 5, 6, 7, 8]);
    }

    #[test]
    fn q_two_rejects_three_children() {
        let psi = parse_formula(
            "E y1. E y2. (Child(x,y1) & Child(x,y2) & Label_a(y1) & Label_a(y2) & y1 != y2 \
             & A z. (Child(x,z) & Label_a(z) -> z = y1 | z = y2))",
        )
        .unwrap();
        let alpha = Alphabet::new(["a"]).unwrap();
        let t3 = LabeledTree::parse("(a (a) (a) (a))", false).unwrap();
        let a3 = build_structure(&t3, &Schema::unordered(&alpha)).unwrap();
        assert!(!evaluate(&psi, &a3, &Assignment::new().with_node("x", NodeId(0))).unwrap());
        let t2 = LabeledTree::parse("(a (a) (a))", false).unwrap();
        let a2 = build_structure(&t2, &Schema::unordered(&alpha)).unwrap();
        assert!(evaluate(&psi, &a2, &Assignment::new().with_node("x", NodeId(0))).unwrap());
    }

    #[test]
    fn trivial_and_unsatisfiable() {
        let a = sample_unordered();
        let f = parse_formula("x = x").unwrap();
        for v in a.domain() {
            assert!(evaluate(&f, &a, &Assignment::new().with_node("x", v)).unwrap());
        }
        let g = parse_formula("Child(x,x)").unwrap();
        let alpha = Alphabet::new(["a", "b"]).unwrap();
        for t in enumerate_trees(&alpha, 5, false) {
            let s = build_structure(&t, &Schema::unordered(&alpha)).unwrap();
            assert!(evaluate_unary(&g, &s).unwrap().is_empty());
        }
    }

    #[test]
    fn errors() {
        let a = sample_unordered();
        let f = parse_formula("Leaf(x)").unwrap();
        assert_eq!(
            evaluate(&f, &a, &Assignment::new().with_node("x", NodeId(0))),
            Err(MsoError::UnknownSymbol("Leaf".into()))
        );
        let g = parse_formula("Child(x)").unwrap();
        assert!(matches!(evaluate_unary(&g, &a), Err(MsoError::ArityMismatch { .. })));
        let h = parse_formula("Child(x,y)").unwrap();
        assert_eq!(
            evaluate(&h, &a, &Assignment::new().with_node("x", NodeId(0))),
            Err(MsoError::UnboundVariable("y".into()))
        );
        assert!(matches!(evaluate_unary(&h, &a), Err(MsoError::WrongFreeVariableShape(_))));
        let k = parse_formula("X(x)").unwrap();
        assert!(matches!(evaluate_unary(&k, &a), Err(MsoError::WrongFreeVariableShape(_))));
        let big = parse_formula("A2 X. A2 Y. A2 Z. (X(x) | Y(x) | Z(x))").unwrap();
        assert_eq!(
            evaluate_unary(&big, &a),
            Err(MsoError::BudgetExceeded {
                needed_log2: 27,
                budget_log2: 24
            })
        );
        let oob = parse_formula("x = x").unwrap();
        assert!(matches!(
            evaluate(&oob, &a, &Assignment::new().with_node("x", NodeId(9))),
            Err(MsoError::OutOfDomain(_))
        ));
    }

    #[test]
    fn set_quantifiers() {
        let alpha = Alphabet::new(["a"]).unwrap();
        let t = LabeledTree::parse("(a (a (a)) (a))", false).unwrap();
        let s = build_structure(&t, &Schema::unordered(&alpha)).unwrap();
        // reflexive-transitive closure of Child
        let star = parse_formula("A2 X. (X(x) & (A u. A w. (X(u) & Child(u,w) -> X(w))) -> X(y))").unwrap();
        for x in s.domain() {
            for y in s.domain() {
                let asg = Assignment::new().with_node("x", x).with_node("y", y);
                let expected = x == y || (x.0 == 0) || (x.0 == 1 && y.0 == 3);
                assert_eq!(evaluate(&star, &s, &asg).unwrap(), expected, "{x} {y}");
                assert_eq!(evaluate_reference(&star, &s, &asg).unwrap(), expected);
            }
        }
        let free_set = parse_formula("E x. X(x) & Leaf(x)").unwrap();
        let schema = Schema::unordered_prime(&alpha);
        let s2 = build_structure(&t, &schema).unwrap();
        let asg = Assignment::new().with_set("X", [NodeId(0), NodeId(1)]);
        assert!(!evaluate(&free_set, &s2, &asg).unwrap());
        let asg = Assignment::new().with_set("X", [NodeId(0), NodeId(2)]);
        assert!(evaluate(&free_set, &s2, &asg).unwrap());
    }

    #[test]
    fn miniscoping_keeps_meaning() {
        let texts = [
            "E y. E z. (Child(x,y) & Child(y,z) | x = z)",
            "A y. (Child(x,y) | Child(y,x) | (E z. Child(z,y) & z != x))",
            "E y. (Label_a(y) & A z. (Child(y,z) -> Label_b(z))) & ~(E y. Child(x,y))",
            "A2 X. E y. E z. (X(x) | Child(y,z) & ~X(z) & X(y))",
            "E y. y != x & Label_b(x)",
            "A y. E z. (Child(z,y) <-> z != x)",
            "E u. E v. E w. (Child(u,v) & Child(v,w) & Child(x,u) & Label_a(w))",
        ];
        let alpha = Alphabet::new(["a", "b"]).unwrap();
        let schema = Schema::unordered(&alpha);
        for text in texts {
            let f = parse_formula(text).unwrap();
            for t in enumerate_trees(&alpha, 4, false) {
                let s = build_structure(&t, &schema).unwrap();
                let fast = evaluate_unary(&f, &s).unwrap();
                let slow = evaluate_unary_with(
                    &f,
                    &s,
                    &EvalOptions {
                        reference: true,
                        ..Default::default()
                    },
                )
                .unwrap();
                assert_eq!(fast, slow, "{text} on {t}");
            }
        }
    }

    #[test]
    fn nesting_counts_paths() {
        let f = parse_formula("(E2 X. X(x)) & A2 Y. A2 Z. (Y(x) | Z(x))").unwrap();
        assert_eq!(set_nesting(&f), 2);
    }
}
