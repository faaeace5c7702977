//! Büchi automata over sets of named atoms, with emptiness checking against
//! ultimately periodic words.
//!
//! Transitions carry [`Guard`]s: conjunctions of atom literals. A word is
//! accepted when some run visits an accepting state infinitely often, which
//! for a lasso-shaped word reduces to finding a reachable accepting cycle in
//! the finite product of automaton states and word positions. That search is
//! the classic nested depth-first search, implemented with explicit stacks so
//! long traces cannot overflow the call stack.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use super::lasso::LassoWord;
use super::EvalError;

/// A conjunction of atom literals; the empty conjunction is `true`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Guard {
    literals: BTreeMap<String, bool>,
}

impl Guard {
    /// The guard that is satisfied by every assignment.
    pub fn top() -> Self {
        Guard::default()
    }

    /// Conjoins `name` (or its negation) onto the guard.
    ///
    /// Returns `false` when the literal contradicts one already present; the
    /// guard is unchanged in that case and denotes an unsatisfiable edge the
    /// caller should drop.
    pub fn and_literal(&mut self, name: &str, positive: bool) -> bool {
        match self.literals.get(name) {
            Some(&existing) if existing != positive => false,
            Some(_) => true,
            None => {
                self.literals.insert(name.to_string(), positive);
                true
            }
        }
    }

    pub fn is_top(&self) -> bool {
        self.literals.is_empty()
    }

    /// Literals as `(atom, polarity)` pairs in atom order.
    pub fn literals(&self) -> impl Iterator<Item = (&str, bool)> {
        self.literals.iter().map(|(n, &p)| (n.as_str(), p))
    }

    /// Whether the word's letter at `position` satisfies every literal.
    pub fn satisfied_by(&self, word: &LassoWord, position: usize) -> Result<bool, EvalError> {
        for (name, &positive) in &self.literals {
            if word.atom(position, name)? != positive {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return write!(f, "true");
        }
        let mut first = true;
        for (name, positive) in &self.literals {
            if !first {
                write!(f, " && ")?;
            }
            first = false;
            if !positive {
                write!(f, "!")?;
            }
            write!(f, "{name}")?;
        }
        Ok(())
    }
}

/// A nondeterministic Büchi automaton with guard-labelled transitions.
#[derive(Debug, Clone)]
pub struct BuchiAutomaton {
    /// `transitions[s]` lists the `(guard, target)` edges leaving state `s`.
    transitions: Vec<Vec<(Guard, usize)>>,
    initial: usize,
    accepting: BTreeSet<usize>,
    atoms: BTreeSet<String>,
}

impl BuchiAutomaton {
    /// Builds an automaton, checking that every edge target and the initial
    /// and accepting states are in range.
    pub fn new(
        transitions: Vec<Vec<(Guard, usize)>>,
        initial: usize,
        accepting: BTreeSet<usize>,
        atoms: BTreeSet<String>,
    ) -> Self {
        let n = transitions.len();
        assert!(initial < n, "initial state {initial} out of range");
        for (s, edges) in transitions.iter().enumerate() {
            for (_, t) in edges {
                assert!(*t < n, "transition {s} -> {t} leaves the state space");
            }
        }
        for &s in &accepting {
            assert!(s < n, "accepting state {s} out of range");
        }
        BuchiAutomaton {
            transitions,
            initial,
            accepting,
            atoms,
        }
    }

    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting.contains(&state)
    }

    pub fn transitions_from(&self, state: usize) -> &[(Guard, usize)] {
        &self.transitions[state]
    }

    /// Atoms the guards may mention.
    pub fn atoms(&self) -> &BTreeSet<String> {
        &self.atoms
    }

    /// Searches for an accepting run over `word`.
    ///
    /// Returns the word position of the accepting product node that anchors
    /// the cycle, or `None` when the automaton rejects the word. The product
    /// has one node per (state, position) pair and deterministic successor
    /// positions, so Büchi acceptance degenerates to reachability of an
    /// accepting cycle, decided by nested depth-first search.
    pub fn accepting_run(&self, word: &LassoWord) -> Result<Option<usize>, EvalError> {
        let n_pos = word.positions();
        let n_states = self.num_states();
        let n_nodes = n_states * n_pos;
        let node = |state: usize, pos: usize| state * n_pos + pos;

        let successors = |id: usize| -> Result<Vec<usize>, EvalError> {
            let state = id / n_pos;
            let pos = id % n_pos;
            let next_pos = word.next(pos);
            let mut out = Vec::new();
            for (guard, target) in &self.transitions[state] {
                if guard.satisfied_by(word, pos)? {
                    out.push(node(*target, next_pos));
                }
            }
            Ok(out)
        };

        let mut blue = vec![false; n_nodes];
        let mut red = vec![false; n_nodes];

        // Outer (blue) DFS from the initial node; on post-order retreat from
        // an accepting node, run the inner (red) DFS hunting for a cycle back
        // to it. Launching red searches in post-order is what makes a single
        // persistent `red` set sound.
        let root = node(self.initial, 0);
        blue[root] = true;
        let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(root, successors(root)?, 0)];
        while !stack.is_empty() {
            let step = {
                let (_, succs, next) = stack.last_mut().expect("stack checked non-empty");
                if *next < succs.len() {
                    let t = succs[*next];
                    *next += 1;
                    Some(t)
                } else {
                    None
                }
            };
            if let Some(t) = step {
                if !blue[t] {
                    blue[t] = true;
                    stack.push((t, successors(t)?, 0));
                }
                continue;
            }
            let (id, _, _) = stack.pop().expect("stack checked non-empty");
            if !self.is_accepting(id / n_pos) {
                continue;
            }
            // Red DFS seeded at `id`: any edge reaching the seed closes an
            // accepting cycle.
            let seed = id;
            red[seed] = true;
            let mut red_stack: Vec<(Vec<usize>, usize)> = vec![(successors(seed)?, 0)];
            while !red_stack.is_empty() {
                let step = {
                    let (succs, next) = red_stack.last_mut().expect("stack checked non-empty");
                    if *next < succs.len() {
                        let t = succs[*next];
                        *next += 1;
                        Some(t)
                    } else {
                        None
                    }
                };
                let Some(t) = step else {
                    red_stack.pop();
                    continue;
                };
                if t == seed {
                    return Ok(Some(seed % n_pos));
                }
                if !red[t] {
                    red[t] = true;
                    red_stack.push((successors(t)?, 0));
                }
            }
        }
        Ok(None)
    }

    /// Renders the automaton as a Promela never claim.
    ///
    /// `label` is echoed into the header comment, conventionally the formula
    /// the automaton was built from.
    pub fn to_never_claim(&self, label: &str) -> String {
        let name = |s: usize| {
            let mut out = String::new();
            if self.is_accepting(s) {
                out.push_str("accept_");
            }
            out.push_str(&format!("S{s}"));
            if s == self.initial {
                out.push_str("_init");
            }
            out
        };
        let mut out = String::new();
        out.push_str(&format!("never {{ /* {label} */\n"));
        for s in 0..self.num_states() {
            out.push_str(&format!("{}:\n", name(s)));
            let edges = &self.transitions[s];
            if edges.is_empty() {
                out.push_str("    false;\n");
                continue;
            }
            out.push_str("    do\n");
            for (guard, target) in edges {
                out.push_str(&format!("    :: ({guard}) -> goto {}\n", name(*target)));
            }
            out.push_str("    od;\n");
        }
        out.push_str("}\n");
        out
    }
}

/// Whether `aut` accepts `word`; `Some(position)` carries the word position
/// anchoring the accepting cycle.
pub fn accepts(aut: &BuchiAutomaton, word: &LassoWord) -> Result<Option<usize>, EvalError> {
    aut.accepting_run(word)
}
