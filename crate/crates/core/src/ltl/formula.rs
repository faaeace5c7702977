//! LTL syntax tree, precedence-aware printing, and negation normal form.

use std::collections::BTreeSet;
use std::fmt;

/// A linear temporal logic formula over named atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Globally(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }
    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }
    pub fn release(a: Formula, b: Formula) -> Self {
        Formula::Release(Box::new(a), Box::new(b))
    }
    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }
    pub fn globally(f: Formula) -> Self {
        Formula::Globally(Box::new(f))
    }

    /// Atom names referenced anywhere in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f)
            | Formula::Next(f)
            | Formula::Eventually(f)
            | Formula::Globally(f) => f.collect_atoms(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// True when the formula contains no temporal operator.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_propositional(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_propositional() && b.is_propositional()
            }
            Formula::Next(_)
            | Formula::Until(_, _)
            | Formula::Release(_, _)
            | Formula::Eventually(_)
            | Formula::Globally(_) => false,
        }
    }

    /// AST height; an atom has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f)
            | Formula::Next(f)
            | Formula::Eventually(f)
            | Formula::Globally(f) => 1 + f.depth(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

/// Rewrites into negation normal form: `->` is eliminated, negations are
/// pushed onto atoms, and `F`/`G` become `U`/`R`, so the result uses only
/// `true`, `false`, literals, `&`, `|`, `X`, `U`, and `R`.
pub fn nnf(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True | False | Atom(_) => f.clone(),
        And(a, b) => Formula::and(nnf(a), nnf(b)),
        Or(a, b) => Formula::or(nnf(a), nnf(b)),
        Implies(a, b) => Formula::or(nnf(&Formula::not((**a).clone())), nnf(b)),
        Next(a) => Formula::next(nnf(a)),
        Until(a, b) => Formula::until(nnf(a), nnf(b)),
        Release(a, b) => Formula::release(nnf(a), nnf(b)),
        Eventually(a) => Formula::until(True, nnf(a)),
        Globally(a) => Formula::release(False, nnf(a)),
        Not(g) => match &**g {
            True => False,
            False => True,
            Atom(_) => f.clone(),
            Not(h) => nnf(h),
            And(a, b) => Formula::or(neg_nnf(a), neg_nnf(b)),
            Or(a, b) => Formula::and(neg_nnf(a), neg_nnf(b)),
            Implies(a, b) => Formula::and(nnf(a), neg_nnf(b)),
            Next(a) => Formula::next(neg_nnf(a)),
            Until(a, b) => Formula::release(neg_nnf(a), neg_nnf(b)),
            Release(a, b) => Formula::until(neg_nnf(a), neg_nnf(b)),
            Eventually(a) => Formula::release(False, neg_nnf(a)),
            Globally(a) => Formula::until(True, neg_nnf(a)),
        },
    }
}

fn neg_nnf(f: &Formula) -> Formula {
    nnf(&Formula::not(f.clone()))
}

// Binding strength, loosest to tightest: -> (0), | (1), & (2), U/R (3),
// unary (4), atoms (5). Matches the concrete grammar, so `Display` output
// re-parses to the same tree with a minimum of parentheses.
fn binding(f: &Formula) -> u8 {
    use Formula::*;
    match f {
        Implies(_, _) => 0,
        Or(_, _) => 1,
        And(_, _) => 2,
        Until(_, _) | Release(_, _) => 3,
        Not(_) | Next(_) | Eventually(_) | Globally(_) => 4,
        True | False | Atom(_) => 5,
    }
}

fn fmt_prec(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    use Formula::*;
    if binding(f) < min {
        out.write_str("(")?;
        fmt_prec(f, 0, out)?;
        return out.write_str(")");
    }
    match f {
        True => out.write_str("true"),
        False => out.write_str("false"),
        Atom(a) => out.write_str(a),
        Not(g) => {
            out.write_str("!")?;
            fmt_prec(g, 4, out)
        }
        Next(g) => {
            out.write_str("X ")?;
            fmt_prec(g, 4, out)
        }
        Eventually(g) => {
            out.write_str("F ")?;
            fmt_prec(g, 4, out)
        }
        Globally(g) => {
            out.write_str("G ")?;
            fmt_prec(g, 4, out)
        }
        And(a, b) => {
            fmt_prec(a, 2, out)?;
            out.write_str(" & ")?;
            fmt_prec(b, 3, out)
        }
        Or(a, b) => {
            fmt_prec(a, 1, out)?;
            out.write_str(" | ")?;
            fmt_prec(b, 2, out)
        }
        Implies(a, b) => {
            fmt_prec(a, 1, out)?;
            out.write_str(" -> ")?;
            fmt_prec(b, 0, out)
        }
        Until(a, b) => {
            fmt_prec(a, 4, out)?;
            out.write_str(" U ")?;
            fmt_prec(b, 3, out)
        }
        Release(a, b) => {
            fmt_prec(a, 4, out)?;
            out.write_str(" R ")?;
            fmt_prec(b, 3, out)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn negated_globally_becomes_until_of_negation() {
        let f = Formula::not(Formula::globally(p()));
        assert_eq!(
            nnf(&f),
            Formula::until(Formula::True, Formula::not(p()))
        );
    }

    #[test]
    fn negated_until_dualizes_to_release() {
        let f = Formula::not(Formula::until(p(), q()));
        assert_eq!(
            nnf(&f),
            Formula::release(Formula::not(p()), Formula::not(q()))
        );
    }

    #[test]
    fn implication_is_eliminated() {
        let f = Formula::implies(p(), q());
        assert_eq!(nnf(&f), Formula::or(Formula::not(p()), q()));
    }

    #[test]
    fn nnf_output_has_negations_on_atoms_only() {
        fn assert_nnf_shape(f: &Formula) {
            use Formula::*;
            match f {
                True | False | Atom(_) => {}
                Not(inner) => assert!(matches!(**inner, Atom(_)), "bad literal: {f}"),
                And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => {
                    assert_nnf_shape(a);
                    assert_nnf_shape(b);
                }
                Next(a) => assert_nnf_shape(a),
                Implies(_, _) | Eventually(_) | Globally(_) => {
                    panic!("operator not allowed in NNF: {f}")
                }
            }
        }
        let samples = [
            Formula::not(Formula::eventually(Formula::globally(p()))),
            Formula::not(Formula::implies(p(), Formula::next(q()))),
            Formula::not(Formula::release(Formula::not(p()), q())),
            Formula::implies(Formula::globally(p()), Formula::eventually(q())),
        ];
        for f in &samples {
            assert_nnf_shape(&nnf(f));
        }
    }

    #[test]
    fn printer_uses_minimal_parens() {
        let f = Formula::and(Formula::until(p(), q()), Formula::atom("r"));
        assert_eq!(f.to_string(), "p U q & r");
        let g = Formula::until(p(), Formula::until(q(), Formula::atom("r")));
        assert_eq!(g.to_string(), "p U q U r");
        let h = Formula::until(Formula::until(p(), q()), Formula::atom("r"));
        assert_eq!(h.to_string(), "(p U q) U r");
        let i = Formula::not(Formula::until(p(), q()));
        assert_eq!(i.to_string(), "!(p U q)");
        let j = Formula::until(Formula::not(p()), q());
        assert_eq!(j.to_string(), "!p U q");
        let k = Formula::eventually(Formula::globally(Formula::atom("ss")));
        assert_eq!(k.to_string(), "F G ss");
    }
}
