//! Specification-pattern catalog and the property templates built from it.
//!
//! Properties are phrased as a scope (where on the trace the requirement
//! applies) combined with a nesting of pattern kinds (what shape the
//! requirement takes). [`instantiate`] turns such a combination into a
//! temporal-logic formula; the `build_*` helpers package the stock stability
//! property — "eventually the system settles into the acceptance band and
//! stays there" — together with the atomic predicate defining the band.

use std::fmt;

use thiserror::Error;

use crate::ltl::{AtomPredicate, Cmp, Expr, Formula};

/// Trace extent a pattern applies to.
///
/// Only the full-trace scope and the after-trigger scope are implemented;
/// the remaining extents from the standard catalog are recognized by name
/// and rejected with a dedicated error.
#[derive(Debug, Clone, PartialEq)]
pub enum Scope {
    /// The requirement covers the entire trace.
    Globally,
    /// The requirement covers the suffix from every point the trigger holds.
    After(Formula),
}

/// Scope names that are part of the standard catalog but not implemented.
pub const RECOGNIZED_UNIMPLEMENTED_SCOPES: [&str; 3] = ["before", "between", "after-until"];

impl Scope {
    /// Resolves a scope by name, with an optional trigger formula.
    pub fn from_name(name: &str, trigger: Option<Formula>) -> Result<Scope, PatternError> {
        match name {
            "globally" => match trigger {
                None => Ok(Scope::Globally),
                Some(_) => Err(PatternError::UnexpectedTrigger("globally".to_string())),
            },
            "after" => match trigger {
                Some(q) => Ok(Scope::After(q)),
                None => Err(PatternError::MissingTrigger("after".to_string())),
            },
            _ if RECOGNIZED_UNIMPLEMENTED_SCOPES.contains(&name) => {
                Err(PatternError::UnimplementedScope(name.to_string()))
            }
            _ => Err(PatternError::UnknownScope(name.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scope::Globally => "globally",
            Scope::After(_) => "after",
        }
    }
}

/// The recurring behavioral shape of a requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    /// The condition holds at every point: `G P`.
    Universality,
    /// The condition holds at some point: `F P`.
    Existence,
    /// The condition never holds: `G !P`.
    Absence,
    /// Every trigger is eventually answered: `G (P -> F Q)`.
    Response,
    /// Nothing happens before its enabling event: `(!Q U P) | G !Q`.
    Precedence,
}

impl PatternKind {
    pub const ALL: [PatternKind; 5] = [
        PatternKind::Universality,
        PatternKind::Existence,
        PatternKind::Absence,
        PatternKind::Response,
        PatternKind::Precedence,
    ];

    pub fn from_name(name: &str) -> Result<PatternKind, PatternError> {
        match name {
            "universality" => Ok(PatternKind::Universality),
            "existence" => Ok(PatternKind::Existence),
            "absence" => Ok(PatternKind::Absence),
            "response" => Ok(PatternKind::Response),
            "precedence" => Ok(PatternKind::Precedence),
            _ => Err(PatternError::UnknownKind(name.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PatternKind::Universality => "universality",
            PatternKind::Existence => "existence",
            PatternKind::Absence => "absence",
            PatternKind::Response => "response",
            PatternKind::Precedence => "precedence",
        }
    }

    /// Whether the kind takes a second argument formula.
    pub fn is_binary(self) -> bool {
        matches!(self, PatternKind::Response | PatternKind::Precedence)
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A scope plus an ordered nesting of kinds applied to argument formulas.
///
/// `kinds[0]` is the outermost shape: `[Existence, Universality]` applied to
/// `P` reads "eventually (always P)". Binary kinds cannot participate in
/// nesting chains; they appear alone with both arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternInstance {
    pub scope: Scope,
    pub kinds: Vec<PatternKind>,
    pub first: Formula,
    pub second: Option<Formula>,
}

impl PatternInstance {
    pub fn unary(scope: Scope, kinds: Vec<PatternKind>, first: Formula) -> Self {
        PatternInstance {
            scope,
            kinds,
            first,
            second: None,
        }
    }

    pub fn binary(scope: Scope, kind: PatternKind, first: Formula, second: Formula) -> Self {
        PatternInstance {
            scope,
            kinds: vec![kind],
            first,
            second: Some(second),
        }
    }
}

/// Errors from resolving or instantiating patterns.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PatternError {
    #[error("scope `{0}` is recognized but not implemented; supported scopes: globally, after")]
    UnimplementedScope(String),
    #[error("unknown scope `{0}`; supported scopes: globally, after")]
    UnknownScope(String),
    #[error("scope `{0}` requires a trigger formula")]
    MissingTrigger(String),
    #[error("scope `{0}` does not take a trigger formula")]
    UnexpectedTrigger(String),
    #[error(
        "unknown pattern `{0}`; supported patterns: universality, existence, absence, \
         response, precedence"
    )]
    UnknownKind(String),
    #[error("a pattern instance needs at least one pattern kind")]
    EmptyNesting,
    #[error("`{0}` takes two arguments and cannot be part of a nesting chain")]
    BinaryInChain(String),
    #[error("`{0}` requires a second argument formula")]
    MissingSecondArgument(String),
    #[error("no kind in the nesting takes a second argument formula")]
    UnexpectedSecondArgument,
    #[error(
        "`{0}` under the `after` scope is not supported; supported there: universality, \
         absence, response"
    )]
    UnsupportedAfterCombination(String),
}

/// Expands a pattern instance into its temporal-logic formula.
///
/// Nesting composes innermost-first, so `[Existence, Universality]` over `P`
/// yields `F (G P)`. The after-trigger scope wraps the result as
/// `G (q -> template)` and supports the universality, absence, and response
/// shapes.
pub fn instantiate(p: &PatternInstance) -> Result<Formula, PatternError> {
    let Some(&outermost) = p.kinds.first() else {
        return Err(PatternError::EmptyNesting);
    };
    if let Some(&binary) = p.kinds.iter().find(|k| k.is_binary()) {
        if p.kinds.len() > 1 {
            return Err(PatternError::BinaryInChain(binary.name().to_string()));
        }
    } else if p.second.is_some() {
        return Err(PatternError::UnexpectedSecondArgument);
    }

    let core = if outermost.is_binary() {
        let second = p
            .second
            .clone()
            .ok_or_else(|| PatternError::MissingSecondArgument(outermost.name().to_string()))?;
        match outermost {
            PatternKind::Response => Formula::globally(Formula::implies(
                p.first.clone(),
                Formula::eventually(second),
            )),
            PatternKind::Precedence => Formula::or(
                Formula::until(Formula::not(second.clone()), p.first.clone()),
                Formula::globally(Formula::not(second)),
            ),
            _ => unreachable!("only response and precedence are binary"),
        }
    } else {
        let mut formula = p.first.clone();
        for kind in p.kinds.iter().rev() {
            formula = match kind {
                PatternKind::Universality => Formula::globally(formula),
                PatternKind::Existence => Formula::eventually(formula),
                PatternKind::Absence => Formula::globally(Formula::not(formula)),
                PatternKind::Response | PatternKind::Precedence => {
                    unreachable!("binary kinds rejected above")
                }
            };
        }
        formula
    };

    match &p.scope {
        Scope::Globally => Ok(core),
        Scope::After(trigger) => {
            if !matches!(
                outermost,
                PatternKind::Universality | PatternKind::Absence | PatternKind::Response
            ) {
                return Err(PatternError::UnsupportedAfterCombination(
                    outermost.name().to_string(),
                ));
            }
            Ok(Formula::globally(Formula::implies(trigger.clone(), core)))
        }
    }
}

/// A named property: a pattern instantiation plus the predicates its atoms
/// stand for, with the expanded formula cached.
#[derive(Debug, Clone)]
pub struct PropertySpec {
    pub name: String,
    pub pattern: PatternInstance,
    pub atoms: Vec<AtomPredicate>,
    pub formula: Formula,
}

impl PropertySpec {
    pub fn new(
        name: impl Into<String>,
        pattern: PatternInstance,
        atoms: Vec<AtomPredicate>,
    ) -> Result<Self, PatternError> {
        let formula = instantiate(&pattern)?;
        Ok(PropertySpec {
            name: name.into(),
            pattern,
            atoms,
            formula,
        })
    }
}

/// The acceptance-band predicate `ss`: the signal stays within `tolerance`
/// of its equilibrium value.
pub fn build_ss(signal: Expr, equilibrium: Expr, tolerance: Expr) -> AtomPredicate {
    AtomPredicate::new(
        "ss",
        Expr::abs(Expr::sub(signal, equilibrium)),
        Cmp::Le,
        tolerance,
    )
}

/// Wraps an acceptance-band atom into the stability property: eventually
/// the band condition holds and keeps holding.
pub fn build_stability(ss: AtomPredicate) -> PropertySpec {
    let pattern = PatternInstance::unary(
        Scope::Globally,
        vec![PatternKind::Existence, PatternKind::Universality],
        Formula::atom(ss.name.clone()),
    );
    PropertySpec::new("stability", pattern, vec![ss])
        .expect("the stability pattern always instantiates")
}

/// The cruise-control stability property over recorded traces.
///
/// The band condition demands a positive following margin with five percent
/// of the safe distance to spare: `d_rel - d_safe > 0.05 * d_safe`. It is
/// deliberately one-sided — being far beyond the safe distance is fine,
/// only eroding the margin is a violation — so no absolute value is taken.
pub fn build_acc_stability() -> PropertySpec {
    let margin = AtomPredicate::new(
        "ss",
        Expr::sub(Expr::field("d_rel"), Expr::field("d_safe")),
        Cmp::Gt,
        Expr::mul(Expr::num(0.05), Expr::field("d_safe")),
    );
    build_stability(margin)
}

/// One row of the pattern catalog.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub scope: &'static str,
    pub kind: PatternKind,
    /// Rendered template over placeholder atoms, or a rejection note.
    pub template: String,
    pub supported: bool,
}

/// Every scope × kind combination with its rendered template.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    let scopes = [
        Scope::Globally,
        Scope::After(Formula::atom("q")),
    ];
    for scope in scopes {
        for kind in PatternKind::ALL {
            let instance = if kind.is_binary() {
                PatternInstance::binary(
                    scope.clone(),
                    kind,
                    Formula::atom("P"),
                    Formula::atom("Q"),
                )
            } else {
                PatternInstance::unary(scope.clone(), vec![kind], Formula::atom("P"))
            };
            let (template, supported) = match instantiate(&instance) {
                Ok(f) => (f.to_string(), true),
                Err(e) => (e.to_string(), false),
            };
            out.push(CatalogEntry {
                scope: scope.name(),
                kind,
                template,
                supported,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_formula;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn atom(name: &str) -> Formula {
        Formula::atom(name)
    }

    fn expect(p: &PatternInstance, text: &str) {
        let expected = parse_formula(text).unwrap();
        assert_eq!(instantiate(p).unwrap(), expected, "template for {text}");
    }

    #[test]
    fn stability_shape_is_eventually_always() {
        expect(
            &PatternInstance::unary(
                Scope::Globally,
                vec![PatternKind::Existence, PatternKind::Universality],
                atom("ss"),
            ),
            "F (G ss)",
        );
    }

    #[test]
    fn single_kinds_expand_to_their_templates() {
        expect(
            &PatternInstance::unary(Scope::Globally, vec![PatternKind::Universality], atom("p")),
            "G p",
        );
        expect(
            &PatternInstance::unary(Scope::Globally, vec![PatternKind::Existence], atom("p")),
            "F p",
        );
        expect(
            &PatternInstance::unary(Scope::Globally, vec![PatternKind::Absence], atom("p")),
            "G !p",
        );
        expect(
            &PatternInstance::binary(Scope::Globally, PatternKind::Response, atom("p"), atom("q")),
            "G (p -> F q)",
        );
        expect(
            &PatternInstance::binary(
                Scope::Globally,
                PatternKind::Precedence,
                atom("p"),
                atom("q"),
            ),
            "(!q U p) | G !q",
        );
    }

    #[test]
    fn nesting_order_puts_the_first_kind_outermost() {
        expect(
            &PatternInstance::unary(
                Scope::Globally,
                vec![PatternKind::Universality, PatternKind::Existence],
                atom("p"),
            ),
            "G (F p)",
        );
    }

    #[test]
    fn after_scope_wraps_with_a_trigger_implication() {
        expect(
            &PatternInstance::unary(
                Scope::After(atom("q")),
                vec![PatternKind::Universality],
                atom("p"),
            ),
            "G (q -> G p)",
        );
        expect(
            &PatternInstance::binary(
                Scope::After(atom("start")),
                PatternKind::Response,
                atom("p"),
                atom("q"),
            ),
            "G (start -> G (p -> F q))",
        );
    }

    #[test]
    fn after_scope_rejects_existence_and_precedence() {
        let existence = PatternInstance::unary(
            Scope::After(atom("q")),
            vec![PatternKind::Existence],
            atom("p"),
        );
        assert_eq!(
            instantiate(&existence).unwrap_err(),
            PatternError::UnsupportedAfterCombination("existence".to_string())
        );
        let precedence = PatternInstance::binary(
            Scope::After(atom("s")),
            PatternKind::Precedence,
            atom("p"),
            atom("q"),
        );
        assert!(matches!(
            instantiate(&precedence).unwrap_err(),
            PatternError::UnsupportedAfterCombination(_)
        ));
    }

    #[test]
    fn arity_violations_are_named_errors() {
        let chained = PatternInstance {
            scope: Scope::Globally,
            kinds: vec![PatternKind::Response, PatternKind::Universality],
            first: atom("p"),
            second: Some(atom("q")),
        };
        assert_eq!(
            instantiate(&chained).unwrap_err(),
            PatternError::BinaryInChain("response".to_string())
        );

        let missing = PatternInstance {
            scope: Scope::Globally,
            kinds: vec![PatternKind::Response],
            first: atom("p"),
            second: None,
        };
        assert_eq!(
            instantiate(&missing).unwrap_err(),
            PatternError::MissingSecondArgument("response".to_string())
        );

        let extra = PatternInstance {
            scope: Scope::Globally,
            kinds: vec![PatternKind::Universality],
            first: atom("p"),
            second: Some(atom("q")),
        };
        assert_eq!(
            instantiate(&extra).unwrap_err(),
            PatternError::UnexpectedSecondArgument
        );

        let empty = PatternInstance {
            scope: Scope::Globally,
            kinds: vec![],
            first: atom("p"),
            second: None,
        };
        assert_eq!(instantiate(&empty).unwrap_err(), PatternError::EmptyNesting);
    }

    #[test]
    fn scope_names_resolve_or_fail_by_category() {
        assert_eq!(Scope::from_name("globally", None), Ok(Scope::Globally));
        assert_eq!(
            Scope::from_name("after", Some(atom("q"))),
            Ok(Scope::After(atom("q")))
        );
        assert_eq!(
            Scope::from_name("before", None),
            Err(PatternError::UnimplementedScope("before".to_string()))
        );
        assert_eq!(
            Scope::from_name("between", None),
            Err(PatternError::UnimplementedScope("between".to_string()))
        );
        assert_eq!(
            Scope::from_name("after-until", None),
            Err(PatternError::UnimplementedScope("after-until".to_string()))
        );
        assert_eq!(
            Scope::from_name("sometimes", None),
            Err(PatternError::UnknownScope("sometimes".to_string()))
        );
        assert_eq!(
            Scope::from_name("after", None),
            Err(PatternError::MissingTrigger("after".to_string()))
        );
        assert_eq!(
            Scope::from_name("globally", Some(atom("q"))),
            Err(PatternError::UnexpectedTrigger("globally".to_string()))
        );
    }

    #[test]
    fn band_atom_measures_deviation_from_equilibrium() {
        let ss = build_ss(Expr::field("v"), Expr::num(1.0), Expr::num(0.05));
        let at = |v: f64| {
            let row = BTreeMap::from([("v".to_string(), v)]);
            ss.eval(&row).unwrap()
        };
        assert!(at(1.0));
        assert!(!at(1.06));
        assert!(at(0.96));
    }

    #[test]
    fn stability_builder_matches_direct_instantiation() {
        let ss = build_ss(Expr::field("v"), Expr::num(1.0), Expr::num(0.05));
        let spec = build_stability(ss);
        let direct = instantiate(&PatternInstance::unary(
            Scope::Globally,
            vec![PatternKind::Existence, PatternKind::Universality],
            atom("ss"),
        ))
        .unwrap();
        assert_eq!(spec.formula, direct);
        assert_eq!(spec.name, "stability");
        assert_eq!(spec.atoms.len(), 1);
    }

    #[test]
    fn margin_atom_requires_headroom_beyond_the_safe_distance() {
        let spec = build_acc_stability();
        let ss = &spec.atoms[0];
        let at = |d_rel: f64, d_safe: f64| {
            let row = BTreeMap::from([
                ("d_rel".to_string(), d_rel),
                ("d_safe".to_string(), d_safe),
            ]);
            ss.eval(&row).unwrap()
        };
        assert!(at(40.0, 13.9));
        assert!(!at(2.0, 17.8));
        // Exactly five percent of headroom is not enough — strict inequality.
        assert!(!at(21.0, 20.0));
        assert_eq!(spec.formula, parse_formula("F (G ss)").unwrap());
    }

    #[test]
    fn catalog_covers_both_scopes_and_flags_unsupported_pairs() {
        let rows = catalog();
        assert_eq!(rows.len(), 10);
        let find = |scope: &str, kind: PatternKind| {
            rows.iter()
                .find(|r| r.scope == scope && r.kind == kind)
                .unwrap()
        };
        let g_univ = find("globally", PatternKind::Universality);
        assert!(g_univ.supported);
        assert_eq!(g_univ.template, "G P");
        let a_resp = find("after", PatternKind::Response);
        assert!(a_resp.supported);
        assert_eq!(a_resp.template, "G (q -> G (P -> F Q))");
        let a_exist = find("after", PatternKind::Existence);
        assert!(!a_exist.supported);
        assert!(a_exist.template.contains("not supported"));
    }

    proptest! {
        /// Scaling both distances by the same positive factor leaves the
        /// margin atom's verdict unchanged: the tolerance scales with them.
        #[test]
        fn margin_atom_is_scale_consistent(
            d_rel in 0.1f64..200.0,
            d_safe in 0.1f64..200.0,
            scale in 0.01f64..100.0,
        ) {
            // Stay off the knife edge where rounding could flip the verdict.
            prop_assume!((d_rel - 1.05 * d_safe).abs() > 1e-6 * (1.0 + d_safe));
            let spec = build_acc_stability();
            let ss = &spec.atoms[0];
            let row = |r: f64, s: f64| {
                BTreeMap::from([("d_rel".to_string(), r), ("d_safe".to_string(), s)])
            };
            let base = ss.eval(&row(d_rel, d_safe)).unwrap();
            let scaled = ss.eval(&row(d_rel * scale, d_safe * scale)).unwrap();
            prop_assert_eq!(base, scaled);
        }
    }
}
