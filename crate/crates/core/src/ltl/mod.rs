//! Linear temporal logic over finite traces extended to infinite words.
//!
//! The module is split into layers. [`Formula`] is the syntax tree with a
//! negation-normal-form rewriter and a minimal-parenthesis printer.
//! [`AtomPredicate`] binds atom names to arithmetic comparisons over named
//! trace fields. [`LassoWord`] is an ultimately periodic word `prefix ·
//! cycle^ω`, the shape every finite trace is extended to before checking.
//! Two independent decision procedures sit on top: a direct fixpoint
//! evaluator ([`eval_lasso`]) and an automaton pipeline ([`to_buchi`] +
//! [`accepts`]) that translates the negated formula and hunts for an
//! accepting run. [`check_trace`] runs both and refuses to answer if they
//! ever disagree.

mod buchi;
mod check;
mod expr;
mod formula;
mod lasso;
mod parse;
mod tableau;

pub use buchi::{accepts, BuchiAutomaton, Guard};
pub use check::{check_trace, check_word, CheckResult};
pub use expr::{AtomPredicate, Cmp, Expr, FieldSource};
pub use formula::{nnf, Formula};
pub use lasso::{eval_lasso, Assignment, LassoWord};
pub use parse::{parse_atom, parse_formula, ParseError};
pub use tableau::to_buchi;

use thiserror::Error;

/// Failures while evaluating a formula or predicate against concrete data.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    /// A formula referenced an atom the word has no assignment for.
    #[error("atom `{name}` has no truth value at position {position}")]
    UnboundAtom { name: String, position: usize },
    /// An arithmetic expression referenced a field the sample lacks.
    #[error("unknown field `{field}`")]
    MissingField { field: String },
}

/// Failures while checking a trace against a formula.
#[derive(Debug, Error)]
pub enum CheckError {
    /// The trace holds no samples, so there is no word to extend.
    #[error("cannot check an empty trace")]
    EmptyTrace,
    /// A formula atom has no predicate bound to it.
    #[error("formula uses atom `{0}` but no predicate defines it")]
    UnboundAtomBinding(String),
    /// Predicate evaluation failed on some sample.
    #[error(transparent)]
    Eval(#[from] EvalError),
    /// The two decision procedures returned different verdicts.
    ///
    /// This is a bug in the checker, never in the trace; it is surfaced
    /// instead of silently picking a winner.
    #[error(
        "internal disagreement on `{formula}`: fixpoint evaluator says {oracle}, \
         automaton says {automaton}"
    )]
    Disagreement {
        formula: String,
        oracle: bool,
        automaton: bool,
    },
}
