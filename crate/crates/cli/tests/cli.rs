use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

const SAMPLE: &str = "(Black (Black) (White (White) (Black)) (Black) (White (Black)) (Black))";

const TWO_WHITE: &str = "\
Ans(x) <- Root(x), Fc(x,y), White2(y).
White2(x) <- Label_Black(x), Ns(x,y), White2(y).
White2(x) <- Label_White(x), Ns(x,y), White1(y).
White1(x) <- Label_Black(x), Ns(x,y), White1(y).
White1(x) <- Label_White(x), Ns(x,y), White0(y).
White0(x) <- Label_Black(x), Ns(x,y), White0(y).
White1(x) <- Label_White(x), Ls(x).
White0(x) <- Label_Black(x), Ls(x).
query: Ans
";

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("treelog-cli-{}-{name}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn treelog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treelog")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn eval_two_white_on_sample() {
    let s = Scratch::new("eval");
    let tree = s.file("sample.tree", SAMPLE);
    let prog = s.file("two_white.dl", TWO_WHITE);
    let o = treelog(&["eval", "--schema", "gk", "--tree", &tree, "--program", &prog]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "v0");
}

#[test]
fn eval_mso_child_formula() {
    let s = Scratch::new("mso");
    let tree = s.file("sample.tree", SAMPLE);
    let f = s.file(
        "child.mso",
        "~(E u. Child(u,x)) & E y. E z. (y != z & Child(x,y) & Child(x,z) & Label_White(y) & Label_White(z) \
         & A v. (Child(x,v) -> (v = y | v = z | ~Label_White(v))))",
    );
    let o = treelog(&["eval-mso", "--schema", "u", "--tree", &tree, "--formula", &f]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "v0");
}

#[test]
fn unsat_query_is_unsatisfiable() {
    let s = Scratch::new("unsat");
    let q = s.file("unsat.dl", "P_unsat(x) <- Child(x,x).\nquery: P_unsat\n");
    for schema in ["u-prime", "o-prime"] {
        let o = treelog(&["check-sat", "--schema", schema, "--program", &q]);
        assert_eq!(o.status.code(), Some(1));
        assert_eq!(stdout(&o).trim(), "unsatisfiable");
    }
}

#[test]
fn satisfiable_query_has_a_witness() {
    let s = Scratch::new("sat");
    let q = s.file("two_white.dl", TWO_WHITE);
    let o = treelog(&["check-sat", "--schema", "gk", "--program", &q]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("satisfiable\nwitness: "), "{out}");
    assert!(out.contains("node: v0"), "{out}");
}

#[test]
fn leaf_is_not_contained_in_root() {
    let s = Scratch::new("contained");
    let leaf = s.file("leaf.dl", "P(x) <- Leaf(x).\nquery: P\n");
    let root = s.file("root.dl", "P(x) <- Root(x).\nquery: P\n");
    let o = treelog(&["check-contained", "--schema", "o-prime", &leaf, &root]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "not contained");
    let tree = lines[1].strip_prefix("counterexample: ").unwrap();
    assert_eq!(tree.matches('(').count(), 2, "{tree}");
    assert_eq!(lines[2], "node: v1");

    let o = treelog(&["check-contained", "--schema", "o-prime", &leaf, &leaf]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "contained");
}

#[test]
fn equivalence_of_reordered_programs() {
    let s = Scratch::new("equiv");
    let a = s.file("a.dl", "P(x) <- Label_a(x).\nP(x) <- Label_b(x).\nquery: P\n");
    let b = s.file("b.dl", "P(x) <- Label_b(x).\nP(x) <- Label_a(x).\nquery: P\n");
    let o = treelog(&["check-equiv", "--schema", "u-prime", "--labels", "a,b", &a, &b]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "equivalent");
}

#[test]
fn tiny_budget_is_unknown() {
    let s = Scratch::new("budget");
    let leaf = s.file("leaf.dl", "P(x) <- Leaf(x).\nquery: P\n");
    let root = s.file("root.dl", "P(x) <- Root(x).\nquery: P\n");
    let o = treelog(&["check-equiv", "--schema", "o-prime", "--state-budget", "2", &leaf, &root]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("unknown: "), "{}", stdout(&o));
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(treelog(&["check-sat"]).status.code(), Some(2));
    assert_eq!(treelog(&["no-such-command"]).status.code(), Some(2));
    let s = Scratch::new("errors");
    let bad = s.file("bad.dl", "P(x) <- Leaf(x)\n");
    let o = treelog(&["check-sat", "--schema", "o-prime", "--program", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    let leaf = s.file("leaf.dl", "P(x) <- Leaf(x).\nquery: P\n");
    let tree = s.file("sample.tree", SAMPLE);
    let o = treelog(&["eval", "--schema", "o", "--tree", &tree, "--program", &leaf]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn translate_and_enumerate() {
    let s = Scratch::new("translate");
    let leaf = s.file("leaf.dl", "P(x) <- Leaf(x).\nquery: P\n");
    let o = treelog(&["translate", "--program", &leaf]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "A2 X1. (A z0. Leaf(z0) -> X1(z0)) -> X1(x)");

    let o = treelog(&["enumerate", "--labels", "a", "--max-nodes", "3", "--mode", "unordered"]);
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = treelog(&["enumerate", "--labels", "a,b", "--max-nodes", "2"]);
    assert_eq!(stdout(&o).lines().count(), 2 + 4);
}
