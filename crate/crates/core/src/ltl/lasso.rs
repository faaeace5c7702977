//! Ultimately periodic words and direct fixpoint evaluation of LTL on them.
//!
//! [`eval_lasso`] computes formula truth values position-by-position, using
//! least/greatest fixpoints around the cycle for until/release. It is
//! deliberately independent of the automaton pipeline so the two can check
//! each other.

use std::collections::BTreeMap;

use super::{EvalError, Formula};

/// Truth values of the atoms at one position.
pub type Assignment = BTreeMap<String, bool>;

/// The infinite word `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoWord {
    prefix: Vec<Assignment>,
    cycle: Vec<Assignment>,
}

impl LassoWord {
    /// The cycle must be non-empty; the prefix may be empty.
    pub fn new(prefix: Vec<Assignment>, cycle: Vec<Assignment>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be non-empty");
        LassoWord { prefix, cycle }
    }

    /// Treats a finite run as a word by repeating its final letter forever.
    pub fn stutter_from(mut letters: Vec<Assignment>) -> Self {
        assert!(!letters.is_empty(), "cannot stutter-extend an empty run");
        let last = letters.pop().unwrap();
        LassoWord::new(letters, vec![last])
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    /// Number of distinct positions: prefix length plus cycle length.
    pub fn positions(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// The position that follows `i`: linear through the prefix, wrapping
    /// from the last cycle position back to the cycle start.
    pub fn next(&self, i: usize) -> usize {
        if i + 1 < self.positions() {
            i + 1
        } else {
            self.prefix.len()
        }
    }

    pub fn assignment(&self, i: usize) -> &Assignment {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[i - self.prefix.len()]
        }
    }

    pub fn atom(&self, i: usize, name: &str) -> Result<bool, EvalError> {
        self.assignment(i)
            .get(name)
            .copied()
            .ok_or_else(|| EvalError::UnboundAtom {
                name: name.to_string(),
                position: i,
            })
    }
}

/// Evaluates `f` on the infinite word `w` by structural recursion, returning
/// its truth at position 0.
pub fn eval_lasso(f: &Formula, w: &LassoWord) -> Result<bool, EvalError> {
    Ok(values(f, w)?[0])
}

/// Truth of `f` at every position of `w`.
/// Per-position truth of `f` across the whole word, for diagnostics.
pub(crate) fn truth_vector(f: &Formula, w: &LassoWord) -> Result<Vec<bool>, EvalError> {
    values(f, w)
}

fn values(f: &Formula, w: &LassoWord) -> Result<Vec<bool>, EvalError> {
    let n = w.positions();
    Ok(match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(name) => {
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                out.push(w.atom(i, name)?);
            }
            out
        }
        Formula::Not(g) => values(g, w)?.iter().map(|v| !v).collect(),
        Formula::And(a, b) => zip_with(values(a, w)?, values(b, w)?, |x, y| x && y),
        Formula::Or(a, b) => zip_with(values(a, w)?, values(b, w)?, |x, y| x || y),
        Formula::Implies(a, b) => zip_with(values(a, w)?, values(b, w)?, |x, y| !x || y),
        Formula::Next(g) => {
            let vg = values(g, w)?;
            (0..n).map(|i| vg[w.next(i)]).collect()
        }
        Formula::Until(a, b) => fix_least(&values(a, w)?, &values(b, w)?, w),
        Formula::Eventually(g) => fix_least(&vec![true; n], &values(g, w)?, w),
        Formula::Release(a, b) => fix_greatest(&values(a, w)?, &values(b, w)?, w),
        Formula::Globally(g) => fix_greatest(&vec![false; n], &values(g, w)?, w),
    })
}

fn zip_with(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// `a U b`: least fixpoint of `val[i] = b[i] | (a[i] & val[next(i)])`.
/// Starting from all-false, updates on the cycle only ever flip false→true,
/// so iteration converges within one pass per cycle position; the prefix then
/// resolves in a single backward sweep.
fn fix_least(a: &[bool], b: &[bool], w: &LassoWord) -> Vec<bool> {
    let n = w.positions();
    let p = w.prefix_len();
    let mut val = vec![false; n];
    loop {
        let mut changed = false;
        for i in (p..n).rev() {
            let v = b[i] || (a[i] && val[w.next(i)]);
            if v != val[i] {
                val[i] = v;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for i in (0..p).rev() {
        val[i] = b[i] || (a[i] && val[i + 1]);
    }
    val
}

/// `a R b`: greatest fixpoint of `val[i] = b[i] & (a[i] | val[next(i)])`,
/// starting from all-true.
fn fix_greatest(a: &[bool], b: &[bool], w: &LassoWord) -> Vec<bool> {
    let n = w.positions();
    let p = w.prefix_len();
    let mut val = vec![true; n];
    loop {
        let mut changed = false;
        for i in (p..n).rev() {
            let v = b[i] && (a[i] || val[w.next(i)]);
            if v != val[i] {
                val[i] = v;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for i in (0..p).rev() {
        val[i] = b[i] && (a[i] || val[i + 1]);
    }
    val
}
