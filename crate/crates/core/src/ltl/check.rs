//! Trace checking with two independent decision procedures.
//!
//! A finite trace is extended to an infinite word by repeating its final
//! sample, then judged twice: once by the direct fixpoint evaluator, once by
//! translating the *negated* formula to a Büchi automaton and searching for
//! an accepting run (which would be a violation). The verdicts must agree;
//! a mismatch is reported as an error rather than silently resolved, since
//! it can only mean a defect in one of the procedures.

use super::buchi::accepts;
use super::expr::{AtomPredicate, FieldSource};
use super::formula::Formula;
use super::lasso::{eval_lasso, truth_vector, Assignment, LassoWord};
use super::tableau::to_buchi;
use super::CheckError;

/// Verdict for one formula over one trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckResult {
    /// Whether the formula holds on the stutter-extended trace.
    pub holds: bool,
    /// For satisfied eventually-always formulas: the first index from which
    /// the inner condition holds for the rest of the trace.
    pub witness_index: Option<usize>,
    /// For violated formulas: an index implicated in the violation — the
    /// last failure of the inner condition for eventually-always shapes,
    /// otherwise a position on the accepting violation cycle.
    pub counterexample_index: Option<usize>,
}

/// Checks `formula` against a finite trace of samples.
///
/// Every atom the formula mentions must have a predicate in `bindings`;
/// predicates are evaluated on each sample to produce the word's letters.
pub fn check_trace<S: FieldSource>(
    formula: &Formula,
    rows: &[S],
    bindings: &[AtomPredicate],
) -> Result<CheckResult, CheckError> {
    if rows.is_empty() {
        return Err(CheckError::EmptyTrace);
    }
    let mut predicates = Vec::new();
    for name in formula.atoms() {
        let predicate = bindings
            .iter()
            .find(|p| p.name == name)
            .ok_or(CheckError::UnboundAtomBinding(name))?;
        predicates.push(predicate);
    }
    let mut letters = Vec::with_capacity(rows.len());
    for row in rows {
        let mut letter = Assignment::new();
        for predicate in &predicates {
            letter.insert(predicate.name.clone(), predicate.eval(row)?);
        }
        letters.push(letter);
    }
    check_word(formula, &LassoWord::stutter_from(letters))
}

/// Checks `formula` against an already-built lasso word.
pub fn check_word(formula: &Formula, word: &LassoWord) -> Result<CheckResult, CheckError> {
    let oracle = eval_lasso(formula, word)?;
    let negated = to_buchi(&Formula::not(formula.clone()));
    let violation = accepts(&negated, word)?;
    let automaton = violation.is_none();
    if oracle != automaton {
        return Err(CheckError::Disagreement {
            formula: formula.to_string(),
            oracle,
            automaton,
        });
    }

    let settled_inner = match formula {
        Formula::Eventually(inner) => match inner.as_ref() {
            Formula::Globally(phi) => Some(phi.as_ref()),
            _ => None,
        },
        _ => None,
    };
    let (witness_index, counterexample_index) = match (settled_inner, oracle) {
        (Some(phi), true) => {
            let truth = truth_vector(phi, word)?;
            let settled = truth.iter().rposition(|&ok| !ok).map_or(0, |i| i + 1);
            (Some(settled), None)
        }
        (Some(phi), false) => {
            let truth = truth_vector(phi, word)?;
            (None, truth.iter().rposition(|&ok| !ok).or(violation))
        }
        (None, true) => (None, None),
        (None, false) => (None, violation),
    };
    Ok(CheckResult {
        holds: oracle,
        witness_index,
        counterexample_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse::{parse_atom, parse_formula};
    use crate::ltl::EvalError;
    use std::collections::BTreeMap;

    fn rows(values: &[(f64, f64)]) -> Vec<BTreeMap<String, f64>> {
        values
            .iter()
            .map(|&(m, h)| BTreeMap::from([("m".to_string(), m), ("h".to_string(), h)]))
            .collect()
    }

    fn bindings() -> Vec<AtomPredicate> {
        vec![
            parse_atom("ss = m <= 1.0").unwrap(),
            parse_atom("hot = h >= 5.0").unwrap(),
        ]
    }

    #[test]
    fn settling_trace_satisfies_eventually_always() {
        let f = parse_formula("F G ss").unwrap();
        let data = rows(&[(5.0, 0.0), (3.0, 0.0), (0.5, 0.0), (0.2, 0.0), (0.1, 0.0)]);
        let result = check_trace(&f, &data, &bindings()).unwrap();
        assert!(result.holds);
        assert_eq!(result.witness_index, Some(2));
        assert_eq!(result.counterexample_index, None);
    }

    #[test]
    fn trace_good_from_the_start_settles_at_zero() {
        let f = parse_formula("F G ss").unwrap();
        let data = rows(&[(0.1, 0.0), (0.2, 0.0)]);
        let result = check_trace(&f, &data, &bindings()).unwrap();
        assert!(result.holds);
        assert_eq!(result.witness_index, Some(0));
    }

    #[test]
    fn trace_ending_in_violation_fails_with_last_bad_index() {
        let f = parse_formula("F G ss").unwrap();
        let data = rows(&[(0.5, 0.0), (2.0, 0.0), (0.5, 0.0), (3.0, 0.0), (3.0, 0.0)]);
        let result = check_trace(&f, &data, &bindings()).unwrap();
        assert!(!result.holds);
        assert_eq!(result.witness_index, None);
        assert_eq!(result.counterexample_index, Some(4));
    }

    #[test]
    fn stutter_extension_judges_the_final_sample() {
        // A transient spike recovers by the last sample, and the extension
        // repeats that recovered state forever.
        let f = parse_formula("F G ss").unwrap();
        let data = rows(&[(0.5, 0.0), (2.0, 0.0), (0.5, 0.0)]);
        let result = check_trace(&f, &data, &bindings()).unwrap();
        assert!(result.holds);
        assert_eq!(result.witness_index, Some(2));
    }

    #[test]
    fn plain_globally_reports_some_violation_position() {
        let f = parse_formula("G ss").unwrap();
        let data = rows(&[(0.5, 0.0), (2.0, 0.0), (0.5, 0.0)]);
        let result = check_trace(&f, &data, &bindings()).unwrap();
        assert!(!result.holds);
        assert!(result.counterexample_index.is_some());
    }

    #[test]
    fn missing_binding_is_reported_by_atom_name() {
        let f = parse_formula("F G cold").unwrap();
        let data = rows(&[(0.5, 0.0)]);
        let err = check_trace(&f, &data, &bindings()).unwrap_err();
        assert!(matches!(err, CheckError::UnboundAtomBinding(name) if name == "cold"));
    }

    #[test]
    fn empty_trace_is_rejected() {
        let f = parse_formula("G ss").unwrap();
        let data = rows(&[]);
        assert!(matches!(
            check_trace(&f, &data, &bindings()),
            Err(CheckError::EmptyTrace)
        ));
    }

    #[test]
    fn predicate_on_missing_field_is_reported() {
        let f = parse_formula("G deep").unwrap();
        let mut all = bindings();
        all.push(parse_atom("deep = z < 0.0").unwrap());
        let data = rows(&[(0.5, 0.0)]);
        let err = check_trace(&f, &data, &all).unwrap_err();
        assert!(matches!(
            err,
            CheckError::Eval(EvalError::MissingField { field }) if field == "z"
        ));
    }

    #[test]
    fn both_procedures_agree_across_a_formula_and_trace_corpus() {
        let formulas = [
            "G ss",
            "F ss",
            "F G ss",
            "G F ss",
            "ss U hot",
            "hot R ss",
            "G (hot -> F ss)",
            "X ss",
            "X X hot",
            "!ss U hot",
            "F G (ss & hot)",
            "F ss & F hot",
            "G ss | G hot",
        ];
        let traces = [
            rows(&[(0.5, 9.0)]),
            rows(&[(2.0, 0.0)]),
            rows(&[(2.0, 9.0), (0.5, 0.0)]),
            rows(&[(0.5, 0.0), (2.0, 9.0), (0.5, 9.0)]),
            rows(&[(0.5, 9.0), (0.5, 0.0), (2.0, 9.0), (0.5, 9.0), (0.5, 9.0)]),
        ];
        for text in formulas {
            let f = parse_formula(text).unwrap();
            for data in &traces {
                // Any disagreement surfaces as an Err here.
                let result = check_trace(&f, data, &bindings());
                assert!(result.is_ok(), "{text}: {:?}", result.err());
            }
        }
    }
}
