use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::hash::Hash;

use rustc_hash::FxHashMap;

use super::{AutomataError, BinaryNode, BinaryTree, Limits};
use crate::mso::Var;
use crate::tree::Alphabet;

/// A complete deterministic bottom-up automaton over binary trees.
///
/// Children are addressed by *slot*: slot 0 is the absent child, slot
/// `q + 1` is state `q`. The transition table is stored in shell order, so
/// that exploring states one at a time only ever appends to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeAutomaton {
    alphabet: Alphabet,
    tracks: Vec<Var>,
    accepting: Vec<bool>,
    table: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
}

#[inline]
fn pair_index(l: usize, r: usize) -> usize {
    let s = l.max(r);
    if l == s {
        s * s + r
    } else {
        s * s + s + 1 + l
    }
}

fn entries_for(states: usize, nsym: usize) -> usize {
    (states + 1).saturating_mul(states + 1).saturating_mul(nsym)
}

fn budget_error(states: usize, nsym: usize, limits: &Limits) -> AutomataError {
    AutomataError::StateBudgetExceeded {
        states,
        entries: entries_for(states, nsym),
        budget: limits.max_states,
        entry_budget: limits.max_entries,
    }
}

/// Builds the reachable part of a deterministic automaton whose states are
/// keys `K`. `step(keys, l, r, row)` pushes onto `row` the key reached from
/// child slots `l` and `r` for every symbol in order; slot `i > 0` is
/// `keys[i - 1]`. Each pair of slots is visited exactly once, after both of
/// its components exist.
pub(crate) fn explore<K, F>(nsym: usize, limits: &Limits, mut step: F) -> Result<(Vec<K>, Vec<u32>), AutomataError>
where
    K: Hash + Eq + Clone,
    F: FnMut(&[K], usize, usize, &mut Vec<K>),
{
    let mut keys: Vec<K> = Vec::new();
    let mut index: FxHashMap<K, u32> = FxHashMap::default();
    let mut table: Vec<u32> = Vec::new();
    let mut row = Vec::with_capacity(nsym);
    let mut s = 0;
    while s <= keys.len() {
        if keys.len() > limits.max_states || entries_for(s, nsym) > limits.max_entries {
            return Err(budget_error(keys.len(), nsym, limits));
        }
        let pairs = (0..=s).map(|r| (s, r)).chain((0..s).map(|l| (l, s)));
        for (l, r) in pairs {
            row.clear();
            step(&keys, l, r, &mut row);
            debug_assert_eq!(row.len(), nsym);
            for k in row.drain(..) {
                let q = match index.get(&k) {
                    Some(&q) => q,
                    None => {
                        let q = keys.len() as u32;
                        index.insert(k.clone(), q);
                        keys.push(k);
                        q
                    }
                };
                table.push(q);
            }
        }
        s += 1;
    }
    Ok((keys, table))
}

impl TreeAutomaton {
    /// An automaton from a transition function over small state codes.
    pub(crate) fn from_fn(
        alphabet: &Alphabet,
        tracks: Vec<Var>,
        step: impl Fn(Option<u8>, Option<u8>, usize, u64) -> u8,
        accept: impl Fn(u8) -> bool,
    ) -> Self {
        let k = tracks.len();
        let nsym = alphabet.len() << k;
        let slot = |keys: &[u8], i: usize| (i > 0).then(|| keys[i - 1]);
        let (keys, table) = explore(nsym, &Limits::default(), |keys, l, r, row| {
            let (l, r) = (slot(keys, l), slot(keys, r));
            row.extend((0..nsym).map(|sym| step(l, r, sym >> k, (sym as u64) & ((1 << k) - 1))));
        })
        .expect("base automata are tiny");
        TreeAutomaton {
            alphabet: alphabet.clone(),
            tracks,
            accepting: keys.into_iter().map(accept).collect(),
            table,
        }
    }

    /// Accepts every tree (`true`) or none (`false`).
    pub fn constant(alphabet: &Alphabet, value: bool) -> Self {
        Self::from_fn(alphabet, Vec::new(), |_, _, _, _| 0, |_| value)
    }

    /// Accepts iff the node track `x` is marked exactly once.
    pub fn singleton(alphabet: &Alphabet, x: &str) -> Self {
        Self::from_fn(
            alphabet,
            vec![Var::Node(x.to_string())],
            |l, r, _, bits| {
                let count = l.unwrap_or(0) + r.unwrap_or(0) + bits as u8;
                count.min(2)
            },
            |q| q == 1,
        )
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn tracks(&self) -> &[Var] {
        &self.tracks
    }

    pub fn states(&self) -> usize {
        self.accepting.len()
    }

    pub fn symbols(&self) -> usize {
        self.alphabet.len() << self.tracks.len()
    }

    pub fn is_accepting(&self, q: u32) -> bool {
        self.accepting[q as usize]
    }

    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    /// The state reached at a node with the given children and symbol
    /// `label_index << k | marks`.
    pub fn transition(&self, left: Option<u32>, right: Option<u32>, sym: usize) -> u32 {
        let slot = |q: Option<u32>| q.map_or(0, |q| q as usize + 1);
        self.next(slot(left), slot(right), sym)
    }

    #[inline]
    fn next(&self, l: usize, r: usize, sym: usize) -> u32 {
        self.table[pair_index(l, r) * self.symbols() + sym]
    }

    pub fn complement(&self) -> Self {
        let mut a = self.clone();
        a.accepting.iter_mut().for_each(|b| *b = !*b);
        a
    }

    fn check_alphabet(&self, other: &Self) -> Result<(), AutomataError> {
        if self.alphabet != other.alphabet {
            return Err(AutomataError::AlphabetMismatch(format!(
                "{:?} vs {:?}",
                self.alphabet.symbols(),
                other.alphabet.symbols()
            )));
        }
        Ok(())
    }

    /// For each symbol over `tracks`, the symbol over `self.tracks` that
    /// reads the same label and the same bits. Every track of `self` must
    /// occur in `tracks`.
    fn symbol_map(&self, tracks: &[Var]) -> Vec<usize> {
        let k = tracks.len();
        let pos: Vec<usize> = self
            .tracks
            .iter()
            .map(|t| tracks.iter().position(|u| u == t).expect("track present"))
            .collect();
        let own = self.tracks.len();
        (0..self.alphabet.len() << k)
            .map(|sym| {
                let bits = pos
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (i, &p)| acc | ((sym >> p) & 1) << i);
                (sym >> k) << own | bits
            })
            .collect()
    }

    /// Synchronous product over the union of both track lists.
    pub fn product(&self, other: &Self, op: BoolOp, limits: &Limits) -> Result<Self, AutomataError> {
        self.check_alphabet(other)?;
        let mut tracks = self.tracks.clone();
        tracks.extend(other.tracks.iter().filter(|t| !self.tracks.contains(t)).cloned());
        if tracks.len() > 63 {
            return Err(AutomataError::AlphabetMismatch("more than 63 tracks".into()));
        }
        let ma = self.symbol_map(&tracks);
        let mb = other.symbol_map(&tracks);
        let nsym = self.alphabet.len() << tracks.len();
        let slot = |keys: &[(u32, u32)], i: usize| -> (usize, usize) {
            if i == 0 {
                (0, 0)
            } else {
                let (a, b) = keys[i - 1];
                (a as usize + 1, b as usize + 1)
            }
        };
        let (keys, table) = explore(nsym, limits, |keys, l, r, row| {
            let (la, lb) = slot(keys, l);
            let (ra, rb) = slot(keys, r);
            row.extend((0..nsym).map(|sym| (self.next(la, ra, ma[sym]), other.next(lb, rb, mb[sym]))));
        })?;
        let accepting = keys
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (self.accepting[a as usize], other.accepting[b as usize]);
                match op {
                    BoolOp::And => a && b,
                    BoolOp::Or => a || b,
                }
            })
            .collect();
        Ok(TreeAutomaton {
            alphabet: self.alphabet.clone(),
            tracks,
            accepting,
            table,
        })
    }

    /// Existential projection of the given tracks, determinized by the
    /// subset construction. Tracks not present are ignored.
    pub fn project(&self, vars: &[Var], limits: &Limits) -> Result<Self, AutomataError> {
        let drop: Vec<usize> = (0..self.tracks.len()).filter(|&i| vars.contains(&self.tracks[i])).collect();
        if drop.is_empty() {
            return Ok(self.clone());
        }
        let keep: Vec<usize> = (0..self.tracks.len()).filter(|i| !drop.contains(i)).collect();
        let k = self.tracks.len();
        let k2 = keep.len();
        let nsym = self.alphabet.len() << k2;
        let sources: Vec<Vec<usize>> = (0..nsym)
            .map(|sym| {
                let base = keep
                    .iter()
                    .enumerate()
                    .fold((sym >> k2) << k, |acc, (i, &p)| acc | ((sym >> i) & 1) << p);
                (0..1usize << drop.len())
                    .map(|ext| {
                        drop.iter()
                            .enumerate()
                            .fold(base, |acc, (i, &p)| acc | ((ext >> i) & 1) << p)
                    })
                    .collect()
            })
            .collect();

        let mut stamp = vec![u32::MAX; self.states()];
        let mut round = 0u32;
        let (keys, table) = explore(nsym, limits, |keys: &[Vec<u32>], l, r, row| {
            let slots = |i: usize| -> Vec<usize> {
                if i == 0 {
                    vec![0]
                } else {
                    keys[i - 1].iter().map(|&q| q as usize + 1).collect()
                }
            };
            let (ls, rs) = (slots(l), slots(r));
            for alternatives in &sources {
                round = round.wrapping_add(1);
                let mut out = Vec::new();
                for &sa in alternatives {
                    for &p in &ls {
                        for &q in &rs {
                            let t = self.next(p, q, sa);
                            if stamp[t as usize] != round {
                                stamp[t as usize] = round;
                                out.push(t);
                            }
                        }
                    }
                }
                out.sort_unstable();
                row.push(out);
            }
        })?;
        let accepting = keys
            .iter()
            .map(|set| set.iter().any(|&q| self.accepting[q as usize]))
            .collect();
        Ok(TreeAutomaton {
            alphabet: self.alphabet.clone(),
            tracks: keep.iter().map(|&i| self.tracks[i].clone()).collect(),
            accepting,
            table,
        })
    }

    /// Same language over a different track list, which must contain every
    /// current track. New tracks are ignored by the result.
    pub fn with_tracks(&self, tracks: &[Var]) -> Result<Self, AutomataError> {
        if tracks == self.tracks {
            return Ok(self.clone());
        }
        if let Some(t) = self.tracks.iter().find(|t| !tracks.contains(t)) {
            return Err(AutomataError::UntrackedVariable(t.to_string()));
        }
        let map = self.symbol_map(tracks);
        let n = self.states();
        let mut table = Vec::with_capacity(entries_for(n, map.len()));
        for pair in 0..(n + 1) * (n + 1) {
            let row = pair * self.symbols();
            table.extend(map.iter().map(|&s| self.table[row + s]));
        }
        Ok(TreeAutomaton {
            alphabet: self.alphabet.clone(),
            tracks: tracks.to_vec(),
            accepting: self.accepting.clone(),
            table,
        })
    }

    /// Renames tracks; `rename` must be injective on the current tracks.
    pub fn rename_tracks(&self, rename: impl Fn(&Var) -> Var) -> Self {
        let mut a = self.clone();
        a.tracks = self.tracks.iter().map(rename).collect();
        a
    }

    /// Merges language-equivalent states by iterated partition refinement.
    /// Every state of `self` must be reachable, which holds for automata
    /// built by this module.
    pub fn minimize(&self) -> Self {
        let n = self.states();
        let nsym = self.symbols();
        let mut class: Vec<u32> = self.accepting.iter().map(|&b| b as u32).collect();
        let mut count = renumber(&mut class);
        let mut next_class = vec![0u32; n];
        let mut ids: FxHashMap<(u32, u32), u32> = FxHashMap::default();
        loop {
            let before = count;
            for p in 0..=n {
                for left in [true, false] {
                    for sym in 0..nsym {
                        ids.clear();
                        for q in 0..n {
                            let t = if left {
                                self.next(q + 1, p, sym)
                            } else {
                                self.next(p, q + 1, sym)
                            };
                            let key = (class[q], class[t as usize]);
                            let fresh = ids.len() as u32;
                            next_class[q] = *ids.entry(key).or_insert(fresh);
                        }
                        count = ids.len();
                        std::mem::swap(&mut class, &mut next_class);
                    }
                }
            }
            if count == before {
                break;
            }
        }
        if count == n {
            return self.clone();
        }
        self.quotient(&class, count)
    }

    fn quotient(&self, class: &[u32], count: usize) -> Self {
        let mut rep = vec![usize::MAX; count];
        for (q, &c) in class.iter().enumerate() {
            if rep[c as usize] == usize::MAX {
                rep[c as usize] = q;
            }
        }
        // renumber classes by representative so the result is canonical in
        // the original state order
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by_key(|&c| rep[c]);
        let mut new_id = vec![0u32; count];
        for (i, &c) in order.iter().enumerate() {
            new_id[c] = i as u32;
        }
        let nsym = self.symbols();
        let old_slot = |i: usize| if i == 0 { 0 } else { rep[order[i - 1]] + 1 };
        let mut table = Vec::with_capacity(entries_for(count, nsym));
        for s in 0..=count {
            let pairs = (0..=s).map(|r| (s, r)).chain((0..s).map(|l| (l, s)));
            for (l, r) in pairs {
                let (ol, or) = (old_slot(l), old_slot(r));
                for sym in 0..nsym {
                    let t = self.next(ol, or, sym);
                    table.push(new_id[class[t as usize] as usize]);
                }
            }
        }
        TreeAutomaton {
            alphabet: self.alphabet.clone(),
            tracks: self.tracks.clone(),
            accepting: order.iter().map(|&c| self.accepting[rep[c]]).collect(),
            table,
        }
    }

    /// Position of each of our tracks in `b.tracks`, and each node's symbol.
    fn symbols_of(&self, b: &BinaryTree) -> Result<Vec<usize>, AutomataError> {
        let pos: Vec<usize> = self
            .tracks
            .iter()
            .map(|t| {
                b.tracks
                    .iter()
                    .position(|u| u == t)
                    .ok_or_else(|| AutomataError::AlphabetMismatch(format!("tree has no track for `{t}`")))
            })
            .collect::<Result<_, _>>()?;
        b.nodes
            .iter()
            .map(|n| {
                let label = self
                    .alphabet
                    .index_of(&n.label)
                    .ok_or_else(|| AutomataError::AlphabetMismatch(format!("label `{}` not in Σ", n.label)))?;
                let bits = pos
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (i, &p)| acc | ((n.marks >> p) as usize & 1) << i);
                Ok(label << self.tracks.len() | bits)
            })
            .collect()
    }

    /// The state at the root of `b`.
    pub fn run_state(&self, b: &BinaryTree) -> Result<u32, AutomataError> {
        let syms = self.symbols_of(b)?;
        let mut state = vec![0u32; b.len()];
        for u in b.postorder()? {
            let n = &b.nodes[u];
            let slot = |c: Option<usize>| c.map_or(0, |c| state[c] as usize + 1);
            state[u] = self.next(slot(n.left), slot(n.right), syms[u]);
        }
        Ok(state[b.root])
    }

    pub fn run(&self, b: &BinaryTree) -> Result<bool, AutomataError> {
        Ok(self.accepting[self.run_state(b)? as usize])
    }

    /// `None` if no encoding of a single tree, with every node track marked
    /// exactly once, is accepted. Otherwise a smallest such tree.
    pub fn is_empty(&self, limits: &Limits) -> Result<Option<BinaryTree>, AutomataError> {
        let mut a = self.clone();
        for t in &self.tracks {
            if let Var::Node(x) = t {
                let sing = TreeAutomaton::singleton(&self.alphabet, x);
                a = a.product(&sing, BoolOp::And, limits)?.with_tracks(&self.tracks)?;
            }
        }
        Ok(a.smallest_witness())
    }

    /// Knuth's generalization of Dijkstra's algorithm: states are finalized
    /// in order of the size of their smallest tree.
    fn smallest_witness(&self) -> Option<BinaryTree> {
        let n = self.states();
        let nsym = self.symbols();
        // per slot: size and the (left slot, right slot, symbol) achieving it
        let mut best: Vec<Option<(usize, usize, usize, usize)>> = vec![None; n + 1];
        let mut done = vec![false; n + 1];
        let mut finished: Vec<usize> = Vec::new();
        let mut heap = BinaryHeap::new();
        best[0] = Some((0, 0, 0, 0));
        heap.push(Reverse((0usize, 0usize)));
        while let Some(Reverse((size, i))) = heap.pop() {
            if done[i] {
                continue;
            }
            done[i] = true;
            finished.push(i);
            for &j in &finished {
                let total = 1 + size + best[j].expect("finished").0;
                for (l, r) in [(i, j), (j, i)] {
                    for sym in 0..nsym {
                        let t = self.next(l, r, sym) as usize + 1;
                        if !done[t] && best[t].is_none_or(|b| total < b.0) {
                            best[t] = Some((total, l, r, sym));
                            heap.push(Reverse((total, t)));
                        }
                    }
                }
            }
        }
        let (_, l, sym) = finished
            .iter()
            .flat_map(|&l| (0..nsym).map(move |sym| (l, sym)))
            .filter(|&(l, sym)| self.accepting[self.next(l, 0, sym) as usize])
            .map(|(l, sym)| (best[l].expect("finished").0, l, sym))
            .min()?;

        let mut tree = BinaryTree {
            nodes: Vec::new(),
            root: 0,
            tracks: self.tracks.clone(),
        };
        let k = self.tracks.len();
        let push = |tree: &mut BinaryTree, sym: usize| {
            tree.nodes.push(BinaryNode {
                label: self.alphabet.symbols()[sym >> k].clone(),
                marks: (sym & ((1 << k) - 1)) as u64,
                left: None,
                right: None,
            });
            tree.nodes.len() - 1
        };
        let root = push(&mut tree, sym);
        let mut stack = vec![(root, l, true)];
        while let Some((parent, slot, is_left)) = stack.pop() {
            if slot == 0 {
                continue;
            }
            let (_, cl, cr, csym) = best[slot].expect("finished");
            let u = push(&mut tree, csym);
            if is_left {
                tree.nodes[parent].left = Some(u);
            } else {
                tree.nodes[parent].right = Some(u);
            }
            stack.push((u, cr, false));
            stack.push((u, cl, true));
        }
        Some(tree)
    }

    /// Text dump: tracks, states, accepting set, then one
    /// `(l, r, sym) -> q` line per transition, `_` standing for an absent
    /// child.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let tracks: Vec<String> = self.tracks.iter().map(|t| t.to_string()).collect();
        let labels: Vec<&str> = self.alphabet.symbols().iter().map(|l| l.as_str()).collect();
        let accepting: Vec<String> = (0..self.states())
            .filter(|&q| self.accepting[q])
            .map(|q| q.to_string())
            .collect();
        let _ = writeln!(out, "alphabet: {}", labels.join(" "));
        let _ = writeln!(out, "tracks: {}", tracks.join(" "));
        let _ = writeln!(out, "states: {}", self.states());
        let _ = writeln!(out, "accepting: {}", accepting.join(" "));
        let slot = |i: usize| if i == 0 { "_".to_string() } else { (i - 1).to_string() };
        let k = self.tracks.len();
        for l in 0..=self.states() {
            for r in 0..=self.states() {
                for sym in 0..self.symbols() {
                    let _ = writeln!(
                        out,
                        "({}, {}, {}/{:0width$b}) -> {}",
                        slot(l),
                        slot(r),
                        labels[sym >> k],
                        sym & ((1 << k) - 1),
                        self.next(l, r, sym),
                        width = k
                    );
                }
            }
        }
        out
    }
}

/// Renumbers `ids` densely in order of first occurrence; returns the count.
fn renumber(ids: &mut [u32]) -> usize {
    let mut map: FxHashMap<u32, u32> = FxHashMap::default();
    for id in ids.iter_mut() {
        let fresh = map.len() as u32;
        *id = *map.entry(*id).or_insert(fresh);
    }
    map.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_is_a_bijection_in_shell_order() {
        let mut expected = 0;
        for s in 0..20 {
            for r in 0..=s {
                assert_eq!(pair_index(s, r), expected);
                expected += 1;
            }
            for l in 0..s {
                assert_eq!(pair_index(l, s), expected);
                expected += 1;
            }
        }
    }

    #[test]
    fn singleton_states() {
        let sigma = Alphabet::new(["a"]).unwrap();
        let a = TreeAutomaton::singleton(&sigma, "x");
        assert_eq!(a.states(), 3);
        assert_eq!(a.minimize().states(), 3);
        assert_eq!(TreeAutomaton::constant(&sigma, false).states(), 1);
    }
}
