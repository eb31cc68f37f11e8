mod common;

use proptest::prelude::*;

use treelog_core::automata::{annotate, compile};
use treelog_core::datalog::{check_homomorphism, evaluate_unary_query, fixpoint_with, Strategy as Fixpoint};
use treelog_core::mso::{evaluate, Assignment, Var};
use treelog_core::{build_structure, Axis, Label, LabeledTree, NodeId, Schema};

use common::{ab, random_formula, random_query, rng};

/// Random tree with up to `max` nodes; node `i > 0` hangs below some node `< i`.
fn tree(max: usize, ordered: bool) -> impl proptest::strategy::Strategy<Value = LabeledTree> {
    prop::collection::vec((any::<bool>(), any::<usize>()), 1..=max).prop_map(move |spec| {
        let labels = spec.iter().map(|(b, _)| Label::new(if *b { "b" } else { "a" }).unwrap()).collect();
        let parents = spec.iter().enumerate().map(|(i, (_, p))| (i > 0).then(|| p % i)).collect();
        LabeledTree::from_parents(labels, parents, ordered).unwrap()
    })
}

fn leaves(t: &LabeledTree) -> Vec<NodeId> {
    t.nodes().filter(|&v| v != t.root() && t.children(v).is_empty()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn queries_are_monotone_under_leaf_removal(t in tree(7, false), pick in any::<usize>(), seed in any::<u64>()) {
        let schema = Schema::unordered_with(&ab(), &[Axis::Desc, Axis::Is, Axis::Root]);
        let ls = leaves(&t);
        prop_assume!(!ls.is_empty());
        let (small, map) = t.remove_leaf(ls[pick % ls.len()]).unwrap();
        let mut back = vec![NodeId(0); small.len()];
        for (old, new) in map.iter().enumerate() {
            if let Some(n) = new {
                back[n.0] = NodeId(old);
            }
        }
        let a = build_structure(&small, &schema).unwrap();
        let b = build_structure(&t, &schema).unwrap();
        prop_assert!(a.atoms().map_nodes(|v| back[v.0]).is_subset(&b.atoms()));
        let q = random_query(&mut rng(seed), &schema);
        let qa = evaluate_unary_query(&q, &a).unwrap();
        let qb = evaluate_unary_query(&q, &b).unwrap();
        prop_assert!(qa.iter().all(|v| qb.contains(&back[v.0])), "{q}");
    }

    #[test]
    fn queries_are_preserved_under_homomorphisms(s in tree(4, false), t in tree(3, false), seed in any::<u64>()) {
        let schema = Schema::unordered_with(&ab(), &[Axis::Desc, Axis::Leaf]);
        let a = build_structure(&s, &schema).unwrap();
        let b = build_structure(&t, &schema).unwrap();
        let q = random_query(&mut rng(seed), &schema);
        let qa = evaluate_unary_query(&q, &a).unwrap();
        let qb = evaluate_unary_query(&q, &b).unwrap();
        let (n, m) = (s.len(), t.len());
        for code in 0..m.pow(n as u32) {
            let h: Vec<NodeId> = (0..n).map(|i| NodeId(code / m.pow(i as u32) % m)).collect();
            if check_homomorphism(&h, &a, &b) {
                prop_assert!(qa.iter().all(|v| qb.contains(&h[v.0])), "{q} under {h:?}");
            }
        }
    }

    #[test]
    fn naive_and_semi_naive_fixpoints_agree(t in tree(8, true), seed in any::<u64>()) {
        let schema = Schema::ordered_prime(&ab());
        let s = build_structure(&t, &schema).unwrap();
        let q = random_query(&mut rng(seed), &schema);
        prop_assert_eq!(
            fixpoint_with(q.program(), &s, Fixpoint::Naive).unwrap(),
            fixpoint_with(q.program(), &s, Fixpoint::SemiNaive).unwrap()
        );
    }

    #[test]
    fn automata_agree_with_evaluation_on_larger_trees(t in tree(8, true), seed in any::<u64>()) {
        let f = random_formula(&mut rng(seed), &["x"], &[]);
        let tracks = [Var::Node("x".into())];
        let a = compile(&f, &tracks, &ab()).unwrap();
        let s = build_structure(&t, &Schema::ordered(&ab())).unwrap();
        for v in t.nodes() {
            let asg = Assignment::new().with_node("x", v);
            let want = evaluate(&f, &s, &asg).unwrap();
            prop_assert_eq!(a.run(&annotate(&t, &tracks, &asg).unwrap()).unwrap(), want, "{} at {}", f, v);
        }
    }
}
