//! `treelog`: evaluate, translate and compare monadic datalog queries on trees.
//!
//! Exit codes: 0 yes / success, 1 no, 2 usage or input error, 3 unknown
//! (budget exceeded).

use std::collections::BTreeSet;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use treelog_core::automata::{Limits, DEFAULT_ENTRY_BUDGET, DEFAULT_STATE_BUDGET};
use treelog_core::datalog::{evaluate_unary_query, parse_program, parse_query, validate, Query};
use treelog_core::decide::{DecideOptions, Decider, Evidence, TreeMode, Verdict};
use treelog_core::mso::{evaluate_unary_with, evaluate_with, parse_formula_in, Assignment, EvalOptions, Formula};
use treelog_core::mso::DEFAULT_EVAL_BUDGET;
use treelog_core::structure::relation_label;
use treelog_core::translate::{
    axis_elim_ordered, axis_elim_unordered, datalog_to_mso, to_prenex_pi1, unordered_to_ordered,
};
use treelog_core::{build_structure, enumerate_trees, Alphabet, Axis, Label, LabeledTree, Schema};

#[derive(Parser)]
#[command(name = "treelog", version, about = "Monadic datalog and MSO over unranked labeled trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a datalog query on a tree and print the selected nodes.
    Eval {
        #[command(flatten)]
        schema: SchemaArgs,
        #[arg(long)]
        tree: String,
        #[arg(long)]
        program: String,
        /// Query predicate, if the program has no `query:` line.
        #[arg(long)]
        query: Option<String>,
    },
    /// Evaluate an MSO formula on a tree. Prints the selected nodes for a
    /// formula with one free node variable, `true`/`false` for a sentence.
    EvalMso {
        #[command(flatten)]
        schema: SchemaArgs,
        #[arg(long)]
        tree: String,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = DEFAULT_EVAL_BUDGET)]
        eval_budget: u64,
    },
    /// Print the MSO formula equivalent to a datalog query.
    Translate {
        #[arg(long)]
        program: String,
        #[arg(long)]
        query: Option<String>,
        /// Print the prenex Π₁ form.
        #[arg(long)]
        prenex: bool,
    },
    /// Rewrite derived axes in an MSO formula.
    AxisElim {
        #[arg(long)]
        formula: String,
        #[arg(long, value_enum, default_value_t = Mode::Unordered)]
        mode: Mode,
        /// In unordered mode, also replace `Child` by its `Fc`/`Ns` definition.
        #[arg(long)]
        to_ordered: bool,
    },
    /// Decide whether the first query is contained in the second.
    CheckContained {
        #[command(flatten)]
        decide: DecideArgs,
        first: String,
        second: String,
    },
    /// Decide whether two queries are equivalent.
    CheckEquiv {
        #[command(flatten)]
        decide: DecideArgs,
        first: String,
        second: String,
    },
    /// Decide whether a query selects a node on some tree.
    CheckSat {
        #[command(flatten)]
        decide: DecideArgs,
        #[arg(long)]
        program: String,
    },
    /// Look for a counterexample to containment among small trees.
    SearchCounterexample {
        #[command(flatten)]
        decide: DecideArgs,
        first: String,
        second: String,
    },
    /// Print all trees up to a size, one per line.
    Enumerate {
        #[arg(long, value_delimiter = ',', required = true)]
        labels: Vec<String>,
        #[arg(long, default_value_t = 3)]
        max_nodes: usize,
        #[arg(long, value_enum, default_value_t = Mode::Ordered)]
        mode: Mode,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Ordered,
    Unordered,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemaName {
    U,
    UPrime,
    O,
    OPrime,
    Gk,
}

#[derive(Args)]
struct SchemaArgs {
    /// Schema; defaults to τ'_u in unordered mode and τ'_o in ordered mode.
    #[arg(long, value_enum)]
    schema: Option<SchemaName>,
    /// Extra axes on top of `--schema u` or `--schema o`.
    #[arg(long = "with", value_delimiter = ',')]
    with: Vec<String>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Label alphabet; defaults to the labels mentioned in the inputs.
    #[arg(long, value_delimiter = ',')]
    labels: Vec<String>,
}

#[derive(Args)]
struct DecideArgs {
    #[command(flatten)]
    schema: SchemaArgs,
    /// Query predicate, if the programs have no `query:` line.
    #[arg(long)]
    query: Option<String>,
    /// Tree size for the bounded search.
    #[arg(long, default_value_t = 5)]
    max_nodes: usize,
    #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
    state_budget: usize,
    #[arg(long, default_value_t = DEFAULT_ENTRY_BUDGET)]
    entry_budget: usize,
    /// Report counterexamples as found, without shrinking them.
    #[arg(long)]
    no_minimize: bool,
}

/// Reported on stderr with exit code 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{path}: {e}")))
}

fn load_query(path: &str, predicate: Option<&str>) -> Result<Query, Failure> {
    let text = read(path)?;
    let q = match predicate {
        Some(p) => parse_program(&text).and_then(|prog| Query::new(prog, p)),
        None => parse_query(&text),
    };
    q.map_err(|e| Failure(format!("{path}: {e}")))
}

fn load_tree(path: &str, ordered: bool) -> Result<LabeledTree, Failure> {
    LabeledTree::parse(&read(path)?, ordered).map_err(|e| Failure(format!("{path}: {e}")))
}

fn query_labels(q: &Query) -> BTreeSet<String> {
    q.program()
        .rules()
        .iter()
        .flat_map(|r| r.body.iter().chain(std::iter::once(&r.head)))
        .filter_map(|a| relation_label(&a.predicate))
        .map(|l| l.as_str().to_string())
        .collect()
}

fn formula_labels(f: &Formula) -> BTreeSet<String> {
    f.relations()
        .into_iter()
        .filter_map(|(r, _)| relation_label(&r))
        .map(|l| l.as_str().to_string())
        .collect()
}

impl SchemaArgs {
    fn ordered(&self) -> bool {
        match (self.mode, self.schema) {
            (Some(m), _) => m == Mode::Ordered,
            (None, Some(s)) => matches!(s, SchemaName::O | SchemaName::OPrime | SchemaName::Gk),
            (None, None) => false,
        }
    }

    /// The alphabet is `--labels` if given, otherwise `mentioned` (plus
    /// `extra` when it is not already there).
    fn alphabet(&self, mentioned: BTreeSet<String>, extra: Option<&str>) -> Result<Alphabet, Failure> {
        let mut labels = if self.labels.is_empty() {
            mentioned
        } else {
            self.labels.iter().cloned().collect()
        };
        if self.labels.is_empty() {
            if let Some(e) = extra {
                labels.insert(e.to_string());
            }
        }
        if labels.is_empty() {
            return Err(Failure("no labels; pass --labels".into()));
        }
        Ok(Alphabet::new(labels)?)
    }

    fn schema(&self, alphabet: &Alphabet) -> Result<Schema, Failure> {
        let ordered = self.ordered();
        let with = self
            .with
            .iter()
            .map(|name| {
                let cap = capitalize(name);
                Axis::from_name(&cap).ok_or_else(|| Failure(format!("unknown axis `{name}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let name = self
            .schema
            .unwrap_or(if ordered { SchemaName::OPrime } else { SchemaName::UPrime });
        if !with.is_empty() && !matches!(name, SchemaName::U | SchemaName::O) {
            return Err(Failure("--with needs --schema u or --schema o".into()));
        }
        Ok(match name {
            SchemaName::U => Schema::unordered_with(alphabet, &with),
            SchemaName::UPrime => Schema::unordered_prime(alphabet),
            SchemaName::O => Schema::ordered_with(alphabet, &with),
            SchemaName::OPrime => Schema::ordered_prime(alphabet),
            SchemaName::Gk => Schema::gk(alphabet),
        })
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c.flat_map(|c| c.to_lowercase())).collect(),
        None => String::new(),
    }
}

fn print_nodes(nodes: impl IntoIterator<Item = treelog_core::NodeId>) {
    for v in nodes {
        println!("{v}");
    }
}

fn print_evidence(kind: &str, ev: &Evidence) {
    println!("{kind}: {}", ev.tree);
    println!("node: {}", ev.node);
}

/// Prints a verdict; `yes`/`no` are the words for the two answers.
fn report(v: &Verdict, yes: &str, no: &str, evidence: &str) -> u8 {
    match v {
        Verdict::Yes(ev) => {
            println!("{yes}");
            if let Some(ev) = ev {
                print_evidence(evidence, ev);
            }
            0
        }
        Verdict::No(ev) => {
            println!("{no}");
            if let Some(ev) = ev {
                print_evidence(evidence, ev);
            }
            1
        }
        Verdict::Unknown(u) => {
            println!("unknown: {}", u.reason);
            match &u.oracle {
                Some(ev) => print_evidence(&format!("bounded search (<= {} nodes) found", u.searched_up_to), ev),
                None => println!("bounded search (<= {} nodes) found nothing", u.searched_up_to),
            }
            3
        }
    }
}

impl DecideArgs {
    fn decider(&self, queries: &[&Query]) -> Result<Decider, Failure> {
        let mentioned = queries.iter().flat_map(|q| query_labels(q)).collect();
        let alphabet = self.schema.alphabet(mentioned, Some("other"))?;
        let mode = TreeMode::with_schema(self.schema.ordered(), self.schema.schema(&alphabet)?);
        let options = DecideOptions {
            limits: Limits {
                max_states: self.state_budget,
                max_entries: self.entry_budget,
            },
            oracle_nodes: self.max_nodes,
            minimize: !self.no_minimize,
        };
        Ok(Decider::new(mode, options)?)
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Eval {
            schema,
            tree,
            program,
            query,
        } => {
            let t = load_tree(&tree, schema.ordered())?;
            let q = load_query(&program, query.as_deref())?;
            let mut labels: BTreeSet<String> = t.label_set().into_iter().map(|l| l.as_str().to_string()).collect();
            labels.extend(query_labels(&q));
            let alphabet = schema.alphabet(labels, None)?;
            let schema = schema.schema(&alphabet)?;
            validate(q.program(), &schema).map_err(|e| Failure(format!("{program}: {}", join(&e))))?;
            let s = build_structure(&t, &schema)?;
            print_nodes(evaluate_unary_query(&q, &s)?);
            Ok(0)
        }
        Command::EvalMso {
            schema,
            tree,
            formula,
            eval_budget,
        } => {
            let t = load_tree(&tree, schema.ordered())?;
            let text = read(&formula)?;
            let mut labels: BTreeSet<String> = t.label_set().into_iter().map(|l| l.as_str().to_string()).collect();
            if let Ok(f) = treelog_core::mso::parse_formula(&text) {
                labels.extend(formula_labels(&f));
            }
            let alphabet = schema.alphabet(labels, None)?;
            let sch = schema.schema(&alphabet)?;
            let f = parse_formula_in(&text, &sch).map_err(|e| Failure(format!("{formula}: {e}")))?;
            let s = build_structure(&t, &sch)?;
            let opts = EvalOptions {
                budget: eval_budget,
                ..EvalOptions::default()
            };
            if f.free_vars().is_empty() {
                println!("{}", evaluate_with(&f, &s, &Assignment::new(), &opts)?);
            } else {
                print_nodes(evaluate_unary_with(&f, &s, &opts)?);
            }
            Ok(0)
        }
        Command::Translate { program, query, prenex } => {
            let q = load_query(&program, query.as_deref())?;
            let mut f = datalog_to_mso(&q)?;
            if prenex {
                f = to_prenex_pi1(&f)?;
            }
            println!("{f}");
            Ok(0)
        }
        Command::AxisElim {
            formula,
            mode,
            to_ordered,
        } => {
            let text = read(&formula)?;
            let f = treelog_core::mso::parse_formula(&text).map_err(|e| Failure(format!("{formula}: {e}")))?;
            let g = match mode {
                Mode::Ordered => axis_elim_ordered(&f),
                Mode::Unordered if to_ordered => unordered_to_ordered(&axis_elim_unordered(&f)),
                Mode::Unordered => axis_elim_unordered(&f),
            };
            println!("{g}");
            Ok(0)
        }
        Command::CheckContained { decide, first, second } => {
            let q1 = load_query(&first, decide.query.as_deref())?;
            let q2 = load_query(&second, decide.query.as_deref())?;
            let v = decide.decider(&[&q1, &q2])?.containment(&q1, &q2)?;
            Ok(report(&v, "contained", "not contained", "counterexample"))
        }
        Command::CheckEquiv { decide, first, second } => {
            let q1 = load_query(&first, decide.query.as_deref())?;
            let q2 = load_query(&second, decide.query.as_deref())?;
            let v = decide.decider(&[&q1, &q2])?.equivalence(&q1, &q2)?;
            Ok(report(&v, "equivalent", "not equivalent", "counterexample"))
        }
        Command::CheckSat { decide, program } => {
            let q = load_query(&program, decide.query.as_deref())?;
            let v = decide.decider(&[&q])?.satisfiable(&q)?;
            Ok(report(&v, "satisfiable", "unsatisfiable", "witness"))
        }
        Command::SearchCounterexample { decide, first, second } => {
            let q1 = load_query(&first, decide.query.as_deref())?;
            let q2 = load_query(&second, decide.query.as_deref())?;
            let d = decide.decider(&[&q1, &q2])?;
            match treelog_core::decide::bounded_counterexample_search(&q1, &q2, d.mode(), decide.max_nodes)? {
                Some(ev) => {
                    print_evidence("counterexample", &ev);
                    Ok(1)
                }
                None => {
                    println!("no counterexample with at most {} nodes", decide.max_nodes);
                    Ok(0)
                }
            }
        }
        Command::Enumerate {
            labels,
            max_nodes,
            mode,
        } => {
            let labels = labels.into_iter().map(Label::new).collect::<Result<Vec<_>, _>>()?;
            let alphabet = Alphabet::new(labels.iter().map(|l| l.as_str()))?;
            for t in enumerate_trees(&alphabet, max_nodes, mode == Mode::Ordered) {
                println!("{t}");
            }
            Ok(0)
        }
    }
}

fn join(errors: &[impl std::fmt::Display]) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
