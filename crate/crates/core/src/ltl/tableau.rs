//! Translation from formulas to Büchi automata.
//!
//! The pipeline is the classic tableau route: rewrite the formula to
//! negation normal form, expand it into a graph of obligation nodes (each
//! node records what must hold now and what is promised for the next step),
//! read that graph as a generalized Büchi automaton with one acceptance set
//! per `U` subformula, then degeneralize to a plain automaton by running a
//! modulo-k copy counter. Unreachable states are pruned at the end.
//!
//! Node expansion uses an explicit worklist and the emptiness search in the
//! resulting automaton is iterative, so deeply nested formulas and long
//! traces never threaten the call stack.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::VecDeque;

use super::buchi::{BuchiAutomaton, Guard};
use super::formula::{nnf, Formula};

/// Sentinel source id for edges out of the virtual initial state.
const INIT: usize = usize::MAX;

/// A node still being expanded: `new` holds unprocessed obligations, `old`
/// the processed ones, `next` the obligations deferred to the successor.
#[derive(Clone)]
struct Proto {
    new: BTreeSet<Formula>,
    old: BTreeSet<Formula>,
    next: BTreeSet<Formula>,
    incoming: BTreeSet<usize>,
}

/// A fully expanded node; nodes are unique up to their `(old, next)` pair.
struct Done {
    old: BTreeSet<Formula>,
    next: BTreeSet<Formula>,
    incoming: BTreeSet<usize>,
}

/// Expands the formula into the node graph.
///
/// Splitting rules, per obligation: `a & b` demands both now; `a | b` forks;
/// `X a` defers `a`; `a U b` forks into "b now" or "a now, `a U b` next";
/// `a R b` forks into "a and b now" or "b now, `a R b` next". Literal
/// contradictions and `false` kill a branch. Completed nodes merge when an
/// existing node has the same `old` and `next` sets.
fn expand(root: Formula) -> Vec<Done> {
    let mut done: Vec<Done> = Vec::new();
    let mut work: Vec<Proto> = vec![Proto {
        new: BTreeSet::from([root]),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
        incoming: BTreeSet::from([INIT]),
    }];
    while let Some(mut node) = work.pop() {
        let mut contradiction = false;
        while let Some(f) = node.new.pop_first() {
            if node.old.contains(&f) {
                continue;
            }
            match &f {
                Formula::True => {}
                Formula::False => {
                    contradiction = true;
                    break;
                }
                Formula::Atom(name) => {
                    if node.old.contains(&Formula::not(Formula::atom(name.clone()))) {
                        contradiction = true;
                        break;
                    }
                    node.old.insert(f);
                }
                Formula::Not(inner) => {
                    if node.old.contains(inner.as_ref()) {
                        contradiction = true;
                        break;
                    }
                    node.old.insert(f.clone());
                }
                Formula::And(a, b) => {
                    node.old.insert(f.clone());
                    for part in [a.as_ref(), b.as_ref()] {
                        if !node.old.contains(part) {
                            node.new.insert(part.clone());
                        }
                    }
                }
                Formula::Or(a, b) => {
                    node.old.insert(f.clone());
                    let mut other = node.clone();
                    if !node.old.contains(a.as_ref()) {
                        node.new.insert(a.as_ref().clone());
                    }
                    if !other.old.contains(b.as_ref()) {
                        other.new.insert(b.as_ref().clone());
                    }
                    work.push(other);
                }
                Formula::Next(a) => {
                    node.old.insert(f.clone());
                    node.next.insert(a.as_ref().clone());
                }
                Formula::Until(a, b) => {
                    node.old.insert(f.clone());
                    let mut fulfilled = node.clone();
                    if !node.old.contains(a.as_ref()) {
                        node.new.insert(a.as_ref().clone());
                    }
                    node.next.insert(f.clone());
                    if !fulfilled.old.contains(b.as_ref()) {
                        fulfilled.new.insert(b.as_ref().clone());
                    }
                    work.push(fulfilled);
                }
                Formula::Release(a, b) => {
                    node.old.insert(f.clone());
                    let mut released = node.clone();
                    if !node.old.contains(b.as_ref()) {
                        node.new.insert(b.as_ref().clone());
                    }
                    node.next.insert(f.clone());
                    for part in [a.as_ref(), b.as_ref()] {
                        if !released.old.contains(part) {
                            released.new.insert(part.clone());
                        }
                    }
                    work.push(released);
                }
                Formula::Implies(..) | Formula::Eventually(..) | Formula::Globally(..) => {
                    unreachable!("expansion input is in negation normal form")
                }
            }
        }
        if contradiction {
            continue;
        }
        if let Some(existing) = done
            .iter_mut()
            .find(|d| d.old == node.old && d.next == node.next)
        {
            existing.incoming.extend(node.incoming.iter().copied());
            continue;
        }
        let id = done.len();
        let successor = Proto {
            new: node.next.clone(),
            old: BTreeSet::new(),
            next: BTreeSet::new(),
            incoming: BTreeSet::from([id]),
        };
        done.push(Done {
            old: node.old,
            next: node.next,
            incoming: node.incoming,
        });
        work.push(successor);
    }
    done
}

/// The conjunction of the literals recorded in `old`.
fn literal_guard(old: &BTreeSet<Formula>) -> Guard {
    let mut guard = Guard::top();
    for f in old {
        let ok = match f {
            Formula::Atom(name) => guard.and_literal(name, true),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(name) => guard.and_literal(name, false),
                _ => true,
            },
            _ => true,
        };
        // Contradictory branches were discarded during expansion.
        assert!(ok, "contradictory literals survived expansion");
    }
    guard
}

fn collect_untils(f: &Formula, out: &mut BTreeSet<Formula>) {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => {}
        Formula::Not(a) | Formula::Next(a) | Formula::Eventually(a) | Formula::Globally(a) => {
            collect_untils(a, out);
        }
        Formula::And(a, b)
        | Formula::Or(a, b)
        | Formula::Implies(a, b)
        | Formula::Release(a, b) => {
            collect_untils(a, out);
            collect_untils(b, out);
        }
        Formula::Until(a, b) => {
            out.insert(f.clone());
            collect_untils(a, out);
            collect_untils(b, out);
        }
    }
}

/// Drops states unreachable from the initial state and renumbers the rest
/// in breadth-first discovery order.
fn prune(
    transitions: Vec<Vec<(Guard, usize)>>,
    initial: usize,
    accepting: BTreeSet<usize>,
) -> (Vec<Vec<(Guard, usize)>>, usize, BTreeSet<usize>) {
    let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([initial]);
    remap.insert(initial, 0);
    while let Some(s) = queue.pop_front() {
        for (_, t) in &transitions[s] {
            if !remap.contains_key(t) {
                remap.insert(*t, remap.len());
                queue.push_back(*t);
            }
        }
    }
    let mut new_transitions = vec![Vec::new(); remap.len()];
    for (&old_id, &new_id) in &remap {
        new_transitions[new_id] = transitions[old_id]
            .iter()
            .map(|(g, t)| (g.clone(), remap[t]))
            .collect();
        new_transitions[new_id].sort();
        new_transitions[new_id].dedup();
    }
    let new_accepting = accepting
        .iter()
        .filter_map(|s| remap.get(s).copied())
        .collect();
    (new_transitions, 0, new_accepting)
}

/// Builds a Büchi automaton accepting exactly the words satisfying `f`.
pub fn to_buchi(f: &Formula) -> BuchiAutomaton {
    let g = nnf(f);
    let atoms = g.atoms();

    let mut untils = BTreeSet::new();
    collect_untils(&g, &mut untils);
    // `x U true` is fulfilled the instant it is claimed, and `true` leaves
    // no mark in a node's `old` set, so it must not impose a liveness
    // obligation at all.
    let untils: Vec<Formula> = untils
        .into_iter()
        .filter(|u| !matches!(u, Formula::Until(_, b) if **b == Formula::True))
        .collect();
    let k = untils.len();

    let done = expand(g);
    let n = done.len();
    let init_idx = n;

    // Generalized automaton: edge q -> r is guarded by the literals node r
    // asserts about the letter read on entry.
    let mut edges: Vec<Vec<(Guard, usize)>> = vec![Vec::new(); n + 1];
    for (r_id, r) in done.iter().enumerate() {
        let guard = literal_guard(&r.old);
        for &q in &r.incoming {
            let src = if q == INIT { init_idx } else { q };
            edges[src].push((guard.clone(), r_id));
        }
    }

    // One acceptance set per `a U b`: a node is fair for it unless it
    // carries the obligation with the promise still unfulfilled.
    let fair_sets: Vec<BTreeSet<usize>> = untils
        .iter()
        .map(|u| {
            let Formula::Until(_, b) = u else {
                unreachable!("collect_untils only yields U formulas")
            };
            (0..n)
                .filter(|&r| !done[r].old.contains(u) || done[r].old.contains(b.as_ref()))
                .collect()
        })
        .collect();

    if k == 0 {
        // No liveness obligations: every infinite run is fair.
        let accepting = (0..n + 1).collect();
        let (transitions, initial, accepting) = prune(edges, init_idx, accepting);
        return BuchiAutomaton::new(transitions, initial, accepting, atoms);
    }

    // Degeneralize with a copy counter: copy j waits for a state fair for
    // set j, then advances to (j + 1) mod k. Hitting copy 0 on a fair-for-0
    // state infinitely often forces every set to recur.
    let pack = |state: usize, copy: usize| state * k + copy;
    let mut transitions: Vec<Vec<(Guard, usize)>> = vec![Vec::new(); (n + 1) * k];
    for (src, out) in edges.iter().enumerate() {
        for copy in 0..k {
            let next_copy = if src < n && fair_sets[copy].contains(&src) {
                (copy + 1) % k
            } else {
                copy
            };
            for (guard, target) in out {
                transitions[pack(src, copy)].push((guard.clone(), pack(*target, next_copy)));
            }
        }
    }
    let accepting: BTreeSet<usize> = fair_sets[0].iter().map(|&s| pack(s, 0)).collect();
    let (transitions, initial, accepting) = prune(transitions, pack(init_idx, 0), accepting);
    BuchiAutomaton::new(transitions, initial, accepting, atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::lasso::LassoWord;
    use crate::ltl::parse::parse_formula;
    use crate::ltl::{accepts, Assignment};

    /// Letters over atoms p and q: '0' none, 'p', 'q', 'b' both.
    fn letter(c: char) -> Assignment {
        let (p, q) = match c {
            '0' => (false, false),
            'p' => (true, false),
            'q' => (false, true),
            'b' => (true, true),
            _ => panic!("unknown letter {c}"),
        };
        Assignment::from([("p".to_string(), p), ("q".to_string(), q)])
    }

    fn word(prefix: &str, cycle: &str) -> LassoWord {
        LassoWord::new(
            prefix.chars().map(letter).collect(),
            cycle.chars().map(letter).collect(),
        )
    }

    fn holds(formula: &str, prefix: &str, cycle: &str) -> bool {
        let f = parse_formula(formula).expect("formula parses");
        let aut = to_buchi(&f);
        accepts(&aut, &word(prefix, cycle))
            .expect("all atoms bound")
            .is_some()
    }

    #[test]
    fn eventually_always_needs_a_stable_suffix() {
        assert!(holds("F G p", "00", "p"));
        assert!(holds("F G p", "", "p"));
        assert!(!holds("F G p", "", "p0"));
        assert!(!holds("F G p", "p", "0"));
    }

    #[test]
    fn always_eventually_needs_recurrence() {
        assert!(holds("G F p", "", "p0"));
        assert!(holds("G F p", "0000", "0p"));
        assert!(!holds("G F p", "pppp", "0"));
    }

    #[test]
    fn globally_rejects_a_single_failure() {
        assert!(holds("G p", "", "p"));
        assert!(holds("G p", "pp", "pp"));
        assert!(!holds("G p", "p0", "p"));
        assert!(!holds("G p", "", "p0"));
    }

    #[test]
    fn until_requires_the_promise_kept() {
        assert!(holds("p U q", "", "q"));
        assert!(holds("p U q", "pp", "q0"));
        assert!(holds("p U q", "", "b"));
        assert!(!holds("p U q", "", "p"));
        assert!(!holds("p U q", "0", "q"));
    }

    #[test]
    fn next_looks_one_step_ahead() {
        assert!(holds("X p", "0p", "0"));
        assert!(!holds("X p", "00", "p"));
        assert!(holds("X X p", "00", "p"));
    }

    #[test]
    fn response_pattern_as_automaton() {
        assert!(holds("G (p -> F q)", "", "pq"));
        assert!(holds("G (p -> F q)", "", "0"));
        assert!(!holds("G (p -> F q)", "0q", "p0"));
    }

    #[test]
    fn constants_translate_to_all_or_nothing() {
        assert!(holds("true", "", "0"));
        assert!(!holds("false", "", "b"));
        assert!(!holds("p & !p", "", "b"));
    }

    #[test]
    fn implication_is_rewritten_before_expansion() {
        assert!(holds("p -> q", "b", "0"));
        assert!(holds("p -> q", "0", "p"));
        assert!(!holds("p -> q", "p", "0"));
    }

    #[test]
    fn conjunction_of_two_promises_degeneralizes_correctly() {
        // Two U-obligations force a two-set acceptance condition; the copy
        // counter must see both fulfilled infinitely often.
        assert!(holds("G F p & G F q", "", "pq"));
        assert!(holds("G F p & G F q", "00", "b"));
        assert!(!holds("G F p & G F q", "q", "p"));
        assert!(!holds("F p & F q", "", "0"));
        assert!(holds("F p & F q", "pq", "0"));
    }

    #[test]
    fn release_mirrors_until() {
        assert!(holds("q R p", "", "b"));
        assert!(holds("q R p", "", "p"));
        assert!(!holds("q R p", "0", "b"));
        assert!(holds("q R p", "pp", "b0"));
    }

    #[test]
    fn automata_stay_small_for_the_stability_shape() {
        let f = parse_formula("F G p").unwrap();
        let aut = to_buchi(&f);
        assert!(aut.num_states() <= 8, "got {} states", aut.num_states());
        assert!(!aut.accepting().is_empty());
    }

    #[test]
    fn until_with_trivially_true_promise_is_no_liveness_obligation() {
        // !((true U p) R false) is valid; normal form turns it into
        // `(false R !p) U true`, whose promise is fulfilled at claim time
        // even though `true` never shows up in a node's `old` set.
        assert!(holds("!((true U p) R false)", "", "0"));
        assert!(holds("!((true U p) R false)", "p", "b"));
        assert!(holds("F true", "", "0"));
        assert!(holds("!G false", "", "0"));
        // A filtered trivial promise must not mask real obligations.
        assert!(holds("(q U p) & F true", "", "p"));
        assert!(!holds("(q U p) & F true", "", "q"));
    }
}
