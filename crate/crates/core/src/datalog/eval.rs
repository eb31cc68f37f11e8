//! Immediate-consequence semantics and least-fixpoint evaluation.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::{validate, DatalogError, Program, Query};
use crate::structure::{Fact, FactSet, Structure};
use crate::tree::NodeId;

/// Fixpoint iteration strategy. Both compute the same least fixpoint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Re-apply every rule to the full fact set until nothing changes.
    Naive,
    /// Only consider valuations that use at least one fact derived in the
    /// previous round.
    #[default]
    SemiNaive,
}

#[derive(Default)]
struct Relation {
    tuples: Vec<Vec<NodeId>>,
    set: HashSet<Vec<NodeId>>,
    // position -> element -> tuple indices
    index: Vec<HashMap<NodeId, Vec<usize>>>,
}

impl Relation {
    fn insert(&mut self, t: Vec<NodeId>) -> bool {
        if self.set.contains(&t) {
            return false;
        }
        if self.index.len() < t.len() {
            self.index.resize_with(t.len(), HashMap::new);
        }
        let id = self.tuples.len();
        for (pos, a) in t.iter().enumerate() {
            self.index[pos].entry(*a).or_default().push(id);
        }
        self.set.insert(t.clone());
        self.tuples.push(t);
        true
    }

    fn candidates<'a>(&'a self, args: &[usize], binding: &[Option<NodeId>]) -> Box<dyn Iterator<Item = &'a Vec<NodeId>> + 'a> {
        for (pos, var) in args.iter().enumerate() {
            if let Some(a) = binding[*var] {
                return match self.index.get(pos).and_then(|m| m.get(&a)) {
                    Some(ids) => Box::new(ids.iter().map(move |&i| &self.tuples[i])),
                    None => Box::new(std::iter::empty()),
                };
            }
        }
        Box::new(self.tuples.iter())
    }
}

#[derive(Default)]
struct Database {
    relations: HashMap<String, Relation>,
}

impl Database {
    fn insert(&mut self, fact: Fact) -> bool {
        self.relations
            .entry(fact.predicate)
            .or_default()
            .insert(fact.args)
    }

    fn facts(&self) -> FactSet {
        self.relations
            .iter()
            .flat_map(|(p, r)| r.tuples.iter().map(move |t| Fact::new(p.clone(), t.clone())))
            .collect()
    }
}

struct CompiledAtom {
    predicate: String,
    args: Vec<usize>,
}

struct CompiledRule {
    head: CompiledAtom,
    body: Vec<CompiledAtom>,
    num_vars: usize,
    // body positions holding intensional predicates
    idb_positions: Vec<usize>,
}

fn compile(program: &Program) -> Vec<CompiledRule> {
    program
        .rules()
        .iter()
        .map(|r| {
            let vars = r.variables();
            let atom = |a: &super::Atom| CompiledAtom {
                predicate: a.predicate.clone(),
                args: a
                    .args
                    .iter()
                    .map(|v| vars.iter().position(|w| w == v).expect("variable listed"))
                    .collect(),
            };
            let body: Vec<CompiledAtom> = r.body.iter().map(atom).collect();
            let idb_positions = body
                .iter()
                .enumerate()
                .filter(|(_, a)| program.is_idb(&a.predicate))
                .map(|(i, _)| i)
                .collect();
            CompiledRule {
                head: atom(&r.head),
                body,
                num_vars: vars.len(),
                idb_positions,
            }
        })
        .collect()
}

/// Join order: `first` (if any), then greedily the atom sharing most
/// variables with what is already bound.
fn join_order(rule: &CompiledRule, first: Option<usize>) -> Vec<usize> {
    let mut order = Vec::with_capacity(rule.body.len());
    let mut bound = vec![false; rule.num_vars];
    let mut remaining: Vec<usize> = (0..rule.body.len()).collect();
    if let Some(f) = first {
        remaining.retain(|&i| i != f);
        order.push(f);
        for &v in &rule.body[f].args {
            bound[v] = true;
        }
    }
    while !remaining.is_empty() {
        let (k, _) = remaining
            .iter()
            .enumerate()
            .max_by_key(|(k, &i)| {
                let score = rule.body[i].args.iter().filter(|&&v| bound[v]).count();
                (score, std::cmp::Reverse(*k))
            })
            .expect("non-empty");
        let i = remaining.remove(k);
        for &v in &rule.body[i].args {
            bound[v] = true;
        }
        order.push(i);
    }
    order
}

/// Derives every head instance of `rule` whose body holds, where the atom at
/// `delta_pos` (if any) is matched against `delta` and all others against
/// `full`.
fn fire(
    rule: &CompiledRule,
    full: &Database,
    delta: Option<(usize, &Database)>,
    out: &mut Vec<Fact>,
) {
    let order = join_order(rule, delta.map(|(p, _)| p));
    let empty = Relation::default();
    let rels: Vec<&Relation> = order
        .iter()
        .map(|&i| {
            let db = match delta {
                Some((p, d)) if p == i => d,
                _ => full,
            };
            db.relations.get(&rule.body[i].predicate).unwrap_or(&empty)
        })
        .collect();
    let atoms: Vec<&CompiledAtom> = order.iter().map(|&i| &rule.body[i]).collect();
    let mut binding = vec![None; rule.num_vars];
    join(&atoms, &rels, 0, &mut binding, &mut |b| {
        out.push(Fact::new(
            rule.head.predicate.clone(),
            rule.head.args.iter().map(|&v| b[v].expect("safe rule")).collect(),
        ));
    });
}

fn join(
    atoms: &[&CompiledAtom],
    rels: &[&Relation],
    depth: usize,
    binding: &mut Vec<Option<NodeId>>,
    emit: &mut dyn FnMut(&[Option<NodeId>]),
) {
    if depth == atoms.len() {
        emit(binding);
        return;
    }
    let atom = atoms[depth];
    for tuple in rels[depth].candidates(&atom.args, binding) {
        if tuple.len() != atom.args.len() {
            continue;
        }
        let mut newly = Vec::new();
        let mut ok = true;
        for (&var, &a) in atom.args.iter().zip(tuple) {
            match binding[var] {
                Some(b) if b != a => {
                    ok = false;
                    break;
                }
                Some(_) => {}
                None => {
                    binding[var] = Some(a);
                    newly.push(var);
                }
            }
        }
        if ok {
            join(atoms, rels, depth + 1, binding, emit);
        }
        for v in newly {
            binding[v] = None;
        }
    }
}

fn run(program: &Program, initial: impl IntoIterator<Item = Fact>, strategy: Strategy) -> Database {
    let rules = compile(program);
    let mut full = Database::default();
    for f in initial {
        full.insert(f);
    }
    match strategy {
        Strategy::Naive => loop {
            let mut derived = Vec::new();
            for r in &rules {
                fire(r, &full, None, &mut derived);
            }
            let mut changed = false;
            for f in derived {
                changed |= full.insert(f);
            }
            if !changed {
                return full;
            }
        },
        Strategy::SemiNaive => {
            let mut derived = Vec::new();
            for r in &rules {
                fire(r, &full, None, &mut derived);
            }
            let mut delta = Database::default();
            for f in derived {
                if full.insert(f.clone()) {
                    delta.insert(f);
                }
            }
            while !delta.relations.is_empty() {
                let mut derived = Vec::new();
                for r in &rules {
                    for &p in &r.idb_positions {
                        if delta.relations.contains_key(&r.body[p].predicate) {
                            fire(r, &full, Some((p, &delta)), &mut derived);
                        }
                    }
                }
                let mut next = Database::default();
                for f in derived {
                    if full.insert(f.clone()) {
                        next.insert(f);
                    }
                }
                delta = next;
            }
            full
        }
    }
}

/// One application of the immediate consequence operator: `facts` together
/// with every head instance whose body instance lies in `facts`.
///
/// Every fact must mention only elements below `domain_size`, and predicates
/// the program uses must be used with the program's arity.
pub fn immediate_consequence(
    program: &Program,
    facts: &FactSet,
    domain_size: usize,
) -> Result<FactSet, DatalogError> {
    let arities = program.arities();
    let mut db = Database::default();
    for f in facts {
        let bad_arity = arities
            .get(f.predicate.as_str())
            .is_some_and(|&a| a != f.args.len());
        if bad_arity || f.args.iter().any(|a| a.0 >= domain_size) {
            return Err(DatalogError::DomainError(f.clone()));
        }
        db.insert(f.clone());
    }
    let mut derived = Vec::new();
    for r in &compile(program) {
        fire(r, &db, None, &mut derived);
    }
    Ok(facts.iter().cloned().chain(derived).collect())
}

fn checked(program: &Program, a: &Structure) -> Result<(), DatalogError> {
    validate(program, a.schema()).map_err(DatalogError::Invalid)
}

/// `T_P^ω(atoms(A))`, the least fixpoint containing the structure's atoms.
pub fn fixpoint(program: &Program, a: &Structure) -> Result<FactSet, DatalogError> {
    fixpoint_with(program, a, Strategy::SemiNaive)
}

pub fn fixpoint_with(
    program: &Program,
    a: &Structure,
    strategy: Strategy,
) -> Result<FactSet, DatalogError> {
    checked(program, a)?;
    Ok(run(program, a.atoms(), strategy).facts())
}

/// `[[Q]](A)`: the tuples of the query predicate in the least fixpoint.
pub fn evaluate_query(q: &Query, a: &Structure) -> Result<BTreeSet<Vec<NodeId>>, DatalogError> {
    checked(q.program(), a)?;
    if !q.program().is_idb(q.predicate()) {
        return Ok(a.relation(q.predicate()).cloned().unwrap_or_default());
    }
    let db = run(q.program(), a.atoms(), Strategy::SemiNaive);
    Ok(db
        .relations
        .get(q.predicate())
        .map(|r| r.tuples.iter().cloned().collect())
        .unwrap_or_default())
}

/// `[[Q]](A)` for a unary query, as a node set.
pub fn evaluate_unary_query(q: &Query, a: &Structure) -> Result<BTreeSet<NodeId>, DatalogError> {
    if q.arity() != 1 {
        return Err(DatalogError::ArityMismatch {
            name: q.predicate().to_string(),
            expected: 1,
            got: q.arity(),
        });
    }
    Ok(evaluate_query(q, a)?.into_iter().map(|t| t[0]).collect())
}

#[cfg(test)]
mod tests {
    use super::super::{parse_program, parse_query, Valuation};
    use super::*;
    use crate::structure::{build_structure, Schema};
    use crate::tree::{Alphabet, LabeledTree};

    use crate::fixtures::SAMPLE;

    fn bw() -> Alphabet {
        Alphabet::new(["Black", "White"]).unwrap()
    }

    fn gk(tree: &str) -> Structure {
        build_structure(&LabeledTree::parse(tree, true).unwrap(), &Schema::gk(&bw())).unwrap()
    }

    /// T_P by enumerating every valuation of every rule.
    fn consequence_by_valuations(p: &Program, c: &FactSet, n: usize) -> FactSet {
        let mut out = c.clone();
        for r in p.rules() {
            for beta in Valuation::all(&r.variables(), n) {
                if r.body.iter().all(|b| c.contains(&beta.apply(b).unwrap())) {
                    out.insert(beta.apply(&r.head).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn single_rule_step() {
        let p = parse_program("P(x) <- Label_a(x).").unwrap();
        let c: FactSet = [Fact::new("Label_a", vec![NodeId(0)])].into_iter().collect();
        let next = immediate_consequence(&p, &c, 1).unwrap();
        let expected: FactSet = [
            Fact::new("Label_a", vec![NodeId(0)]),
            Fact::new("P", vec![NodeId(0)]),
        ]
        .into_iter()
        .collect();
        assert_eq!(next, expected);
        assert_eq!(immediate_consequence(&p, &next, 1).unwrap(), next);
    }

    #[test]
    fn domain_errors() {
        let p = parse_program("P(x) <- Label_a(x).").unwrap();
        let c: FactSet = [Fact::new("Label_a", vec![NodeId(3)])].into_iter().collect();
        assert!(matches!(
            immediate_consequence(&p, &c, 2),
            Err(DatalogError::DomainError(_))
        ));
        let c: FactSet = [Fact::new("Label_a", vec![NodeId(0), NodeId(0)])].into_iter().collect();
        assert!(matches!(
            immediate_consequence(&p, &c, 2),
            Err(DatalogError::DomainError(_))
        ));
    }

    #[test]
    fn first_step_on_sample_fires_ls_rules() {
        let p = parse_program(crate::fixtures::TWO_WHITE).unwrap();
        let a = gk(SAMPLE);
        let c = a.atoms();
        let step = immediate_consequence(&p, &c, a.size()).unwrap();
        let new: Vec<String> = step.iter().filter(|f| !c.contains(f)).map(|f| f.to_string()).collect();
        assert_eq!(new, vec!["White0(v5)", "White0(v7)", "White0(v8)"]);
        assert_eq!(step, consequence_by_valuations(&p, &c, a.size()));
    }

    #[test]
    fn two_white_selects_root_of_sample() {
        let q = parse_query(&format!("{}query: Ans", crate::fixtures::TWO_WHITE)).unwrap();
        let got = evaluate_unary_query(&q, &gk(SAMPLE)).unwrap();
        assert_eq!(got, BTreeSet::from([NodeId(0)]));
        // relabel v2 (White) as Black: the root keeps a single White child
        let relabeled = "(Black (Black) (Black (White) (Black)) (Black) (White (Black)) (Black))";
        assert!(evaluate_unary_query(&q, &gk(relabeled)).unwrap().is_empty());
    }

    #[test]
    fn fixpoint_is_idempotent_and_strategies_agree() {
        let p = parse_program(crate::fixtures::TWO_WHITE).unwrap();
        let a = gk(SAMPLE);
        let f = fixpoint(&p, &a).unwrap();
        assert_eq!(immediate_consequence(&p, &f, a.size()).unwrap(), f);
        assert_eq!(fixpoint_with(&p, &a, Strategy::Naive).unwrap(), f);
    }

    #[test]
    fn unsat_rule_derives_nothing() {
        let p = parse_program("P(x) <- Child(x,x).").unwrap();
        let t = LabeledTree::parse(SAMPLE, false).unwrap();
        let a = build_structure(&t, &Schema::unordered(&bw())).unwrap();
        assert_eq!(fixpoint(&p, &a).unwrap(), a.atoms());
        assert_eq!(fixpoint(&Program::default(), &a).unwrap(), a.atoms());
    }

    #[test]
    fn extensional_query_predicate() {
        let q = parse_query("P(x) <- Leaf(x).\nquery: Leaf").unwrap();
        let t = LabeledTree::parse(SAMPLE, false).unwrap();
        let a = build_structure(&t, &Schema::unordered_prime(&bw())).unwrap();
        let got: Vec<usize> = evaluate_unary_query(&q, &a).unwrap().into_iter().map(|v| v.0).collect();
        assert_eq!(got, vec![1, 3, 5, 6, 7, 8]);
    }

    #[test]
    fn invalid_program_is_reported() {
        let q = parse_query("P(x) <- Ls(x).\nquery: P").unwrap();
        let t = LabeledTree::parse(SAMPLE, false).unwrap();
        let a = build_structure(&t, &Schema::unordered(&bw())).unwrap();
        assert!(matches!(evaluate_query(&q, &a), Err(DatalogError::Invalid(_))));
    }

    #[test]
    fn chain_of_rounds_is_increasing() {
        let p = parse_program(crate::fixtures::TWO_WHITE).unwrap();
        let a = gk(SAMPLE);
        let mut c = a.atoms();
        loop {
            let next = immediate_consequence(&p, &c, a.size()).unwrap();
            assert!(c.is_subset(&next));
            if next == c {
                break;
            }
            c = next;
        }
        assert_eq!(c, fixpoint(&p, &a).unwrap());
    }
}
