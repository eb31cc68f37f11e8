//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treelog_core::datalog::{validate, Atom, Program, Query, Rule};
use treelog_core::mso::Formula;
use treelog_core::{Alphabet, Schema};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).unwrap()
}

const VARS: [&str; 3] = ["x", "y", "z"];
const IDBS: [&str; 2] = ["P", "Q"];

fn random_body_atom(rng: &mut ChaCha8Rng, unary: &[String], binary: &[String], idbs: &[&str]) -> Atom {
    let pick = |rng: &mut ChaCha8Rng| *VARS.choose(rng).unwrap();
    let roll = rng.gen_range(0..10);
    if roll < 3 && !idbs.is_empty() {
        let p = *idbs.choose(rng).unwrap();
        Atom::new(p, [pick(rng)])
    } else if roll < 6 || binary.is_empty() {
        let r = unary.choose(rng).unwrap().clone();
        Atom::new(r, [pick(rng)])
    } else {
        let r = binary.choose(rng).unwrap().clone();
        let (a, b) = (pick(rng), pick(rng));
        Atom::new(r, [a, b])
    }
}

/// A random unary monadic program valid over `schema`: at most 3 rules, at
/// most 2 intensional predicates, the first rule headed by the query
/// predicate `P`.
pub fn random_query(rng: &mut ChaCha8Rng, schema: &Schema) -> Query {
    let unary: Vec<String> = schema.relations().filter(|r| r.1 == 1).map(|r| r.0.to_string()).collect();
    let binary: Vec<String> = schema.relations().filter(|r| r.1 == 2).map(|r| r.0.to_string()).collect();
    loop {
        let n_rules = rng.gen_range(1..=3);
        let mut heads = vec!["P"];
        for _ in 1..n_rules {
            heads.push(*IDBS.choose(rng).unwrap());
        }
        let mut idbs: Vec<&str> = heads.clone();
        idbs.sort();
        idbs.dedup();
        let rules: Vec<Rule> = heads
            .iter()
            .map(|&h| {
                let hv = *VARS.choose(rng).unwrap();
                let n_body = rng.gen_range(1..=3);
                let mut body: Vec<Atom> = (0..n_body)
                    .map(|_| random_body_atom(rng, &unary, &binary, &idbs))
                    .collect();
                if !body.iter().any(|a| a.args.iter().any(|v| v == hv)) {
                    let r = unary.choose(rng).unwrap().clone();
                    body.push(Atom::new(r, [hv]));
                }
                Rule::new(Atom::new(h, [hv]), body)
            })
            .collect();
        let Ok(program) = Program::new(rules) else { continue };
        if validate(&program, schema).is_err() {
            continue;
        }
        if let Ok(q) = Query::new(program, "P") {
            return q;
        }
    }
}

/// `q` with one more random rule for its query predicate, so `q ⊆ result`.
pub fn with_extra_rule(rng: &mut ChaCha8Rng, q: &Query, schema: &Schema) -> Query {
    let extra = random_query(rng, schema);
    let mut rules = q.program().rules().to_vec();
    // keep the extra rule's intensional atoms out of the way
    let r = &extra.program().rules()[0];
    let body: Vec<Atom> = r.body.iter().filter(|a| !extra.program().is_idb(&a.predicate)).cloned().collect();
    let head_var = r.head.args[0].clone();
    let mut body = body;
    if !body.iter().any(|a| a.args.contains(&head_var)) {
        body.push(Atom::new(format!("Label_{}", schema.labels()[0]), [head_var.clone()]));
    }
    rules.push(Rule::new(Atom::new("P", [head_var]), body));
    Query::new(Program::new(rules).unwrap(), "P").unwrap()
}

/// `q` with one more body atom in its first rule, so `result ⊆ q`.
pub fn with_extra_atom(rng: &mut ChaCha8Rng, q: &Query, schema: &Schema) -> Query {
    let unary: Vec<String> = schema.relations().filter(|r| r.1 == 1).map(|r| r.0.to_string()).collect();
    let binary: Vec<String> = schema.relations().filter(|r| r.1 == 2).map(|r| r.0.to_string()).collect();
    let idbs = q.program().idb();
    let mut rules = q.program().rules().to_vec();
    let atom = random_body_atom(rng, &unary, &binary, &idbs);
    rules[0].body.push(atom);
    Query::new(Program::new(rules).unwrap(), "P").unwrap()
}

/// Random MSO formula over `Label_a`, `Label_b`, `Fc`, `Ns`, `=` and
/// membership, with at most 2 set and 3 node quantifiers. Free variables are
/// drawn from `free_nodes` and `free_sets`.
pub fn random_formula(rng: &mut ChaCha8Rng, free_nodes: &[&str], free_sets: &[&str]) -> Formula {
    assert!(!free_nodes.is_empty());
    let mut g = FormulaGen {
        nodes: free_nodes.iter().map(|s| s.to_string()).collect(),
        sets: free_sets.iter().map(|s| s.to_string()).collect(),
        node_budget: 3,
        set_budget: 2,
        counter: 0,
    };
    g.gen(rng, 4)
}

struct FormulaGen {
    nodes: Vec<String>,
    sets: Vec<String>,
    node_budget: u32,
    set_budget: u32,
    counter: u32,
}

impl FormulaGen {
    /// Prefers recently bound variables so quantifiers are not vacuous.
    fn pick(rng: &mut ChaCha8Rng, from: &[String]) -> String {
        if rng.gen_bool(0.6) {
            from.last().unwrap().clone()
        } else {
            from.choose(rng).unwrap().clone()
        }
    }

    fn pair(&self, rng: &mut ChaCha8Rng) -> (String, String) {
        let a = Self::pick(rng, &self.nodes);
        let others: Vec<String> = self.nodes.iter().filter(|v| **v != a).cloned().collect();
        let b = if others.is_empty() || rng.gen_bool(0.1) {
            a.clone()
        } else {
            others.choose(rng).unwrap().clone()
        };
        if rng.gen_bool(0.5) {
            (a, b)
        } else {
            (b, a)
        }
    }

    fn atom(&self, rng: &mut ChaCha8Rng) -> Formula {
        let v = |rng: &mut ChaCha8Rng| Self::pick(rng, &self.nodes);
        match rng.gen_range(0..7) {
            0 => Formula::rel("Label_a", [v(rng)]),
            1 => Formula::rel("Label_b", [v(rng)]),
            2 => {
                let (a, b) = self.pair(rng);
                Formula::rel("Fc", [a, b])
            }
            3 => {
                let (a, b) = self.pair(rng);
                Formula::rel("Ns", [a, b])
            }
            4 => {
                let (a, b) = self.pair(rng);
                Formula::eq(a, b)
            }
            _ if !self.sets.is_empty() => Formula::member(Self::pick(rng, &self.sets), v(rng)),
            _ => {
                let (a, b) = self.pair(rng);
                Formula::rel("Ns", [a, b])
            }
        }
    }

    fn gen(&mut self, rng: &mut ChaCha8Rng, depth: u32) -> Formula {
        if depth == 0 {
            return self.atom(rng);
        }
        match rng.gen_range(0..10) {
            0 | 1 => self.atom(rng),
            2 => self.gen(rng, depth - 1).not(),
            3 | 4 => {
                let a = self.gen(rng, depth - 1);
                a.and(self.gen(rng, depth - 1))
            }
            5 => {
                let a = self.gen(rng, depth - 1);
                a.or(self.gen(rng, depth - 1))
            }
            6 => {
                let a = self.gen(rng, depth - 1);
                a.implies(self.gen(rng, depth - 1))
            }
            _ => {
                let set = rng.gen_bool(0.35);
                self.quantify(rng, depth, set)
            }
        }
    }

    fn quantify(&mut self, rng: &mut ChaCha8Rng, depth: u32, set: bool) -> Formula {
        let depth = depth.saturating_sub(1);
        if set && self.set_budget > 0 {
            self.set_budget -= 1;
            self.counter += 1;
            let name = format!("S{}", self.counter);
            self.sets.push(name.clone());
            let body = self.gen(rng, depth + 1);
            self.sets.pop();
            return if rng.gen_bool(0.5) {
                Formula::exists_set(name, body)
            } else {
                Formula::forall_set(name, body)
            };
        }
        if self.node_budget == 0 {
            return self.atom(rng);
        }
        self.node_budget -= 1;
        self.counter += 1;
        let name = format!("u{}", self.counter);
        self.nodes.push(name.clone());
        let body = self.gen(rng, depth + 1);
        self.nodes.pop();
        if rng.gen_bool(0.5) {
            Formula::exists(name, body)
        } else {
            Formula::forall(name, body)
        }
    }
}
