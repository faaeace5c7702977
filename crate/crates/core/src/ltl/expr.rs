//! Arithmetic atom predicates evaluated over named trace fields.
//!
//! An [`AtomPredicate`] gives a formula atom its meaning on concrete data:
//! `ss = abs(d_rel - d_safe) <= 0.05 * d_safe` names the atom `ss` and binds
//! it to a comparison between two arithmetic expressions over trace columns.

use std::collections::BTreeSet;
use std::fmt;

use super::EvalError;

/// Anything that can resolve a field name to a value — trace samples, test
/// fixtures, and the like.
pub trait FieldSource {
    fn field(&self, name: &str) -> Option<f64>;
}

impl FieldSource for std::collections::BTreeMap<String, f64> {
    fn field(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl FieldSource for std::collections::HashMap<String, f64> {
    fn field(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

/// Arithmetic over field names and literals.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Field(String),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Self {
        Expr::Num(v)
    }
    pub fn field(name: impl Into<String>) -> Self {
        Expr::Field(name.into())
    }
    pub fn neg(e: Expr) -> Self {
        Expr::Neg(Box::new(e))
    }
    pub fn abs(e: Expr) -> Self {
        Expr::Abs(Box::new(e))
    }
    pub fn add(a: Expr, b: Expr) -> Self {
        Expr::Add(Box::new(a), Box::new(b))
    }
    pub fn sub(a: Expr, b: Expr) -> Self {
        Expr::Sub(Box::new(a), Box::new(b))
    }
    pub fn mul(a: Expr, b: Expr) -> Self {
        Expr::Mul(Box::new(a), Box::new(b))
    }
    pub fn div(a: Expr, b: Expr) -> Self {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn eval<S: FieldSource + ?Sized>(&self, src: &S) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Field(name) => src
                .field(name)
                .ok_or_else(|| EvalError::MissingField { field: name.clone() })?,
            Expr::Neg(e) => -e.eval(src)?,
            Expr::Abs(e) => e.eval(src)?.abs(),
            Expr::Add(a, b) => a.eval(src)? + b.eval(src)?,
            Expr::Sub(a, b) => a.eval(src)? - b.eval(src)?,
            Expr::Mul(a, b) => a.eval(src)? * b.eval(src)?,
            Expr::Div(a, b) => a.eval(src)? / b.eval(src)?,
        })
    }

    /// Field names referenced by the expression.
    pub fn fields(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_fields(&mut out);
        out
    }

    fn collect_fields(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Field(name) => {
                out.insert(name.clone());
            }
            Expr::Neg(e) | Expr::Abs(e) => e.collect_fields(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_fields(out);
                b.collect_fields(out);
            }
        }
    }
}

// Binding strength for printing: +/- (1), */÷ (2), unary minus (3),
// leaves (4).
fn expr_binding(e: &Expr) -> u8 {
    match e {
        Expr::Add(_, _) | Expr::Sub(_, _) => 1,
        Expr::Mul(_, _) | Expr::Div(_, _) => 2,
        Expr::Neg(_) => 3,
        Expr::Num(_) | Expr::Field(_) | Expr::Abs(_) => 4,
    }
}

fn fmt_expr(e: &Expr, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if expr_binding(e) < min {
        out.write_str("(")?;
        fmt_expr(e, 0, out)?;
        return out.write_str(")");
    }
    match e {
        Expr::Num(v) => write!(out, "{v}"),
        Expr::Field(name) => out.write_str(name),
        Expr::Neg(inner) => {
            out.write_str("-")?;
            fmt_expr(inner, 3, out)
        }
        Expr::Abs(inner) => {
            out.write_str("abs(")?;
            fmt_expr(inner, 0, out)?;
            out.write_str(")")
        }
        Expr::Add(a, b) => {
            fmt_expr(a, 1, out)?;
            out.write_str(" + ")?;
            fmt_expr(b, 2, out)
        }
        Expr::Sub(a, b) => {
            fmt_expr(a, 1, out)?;
            out.write_str(" - ")?;
            fmt_expr(b, 2, out)
        }
        Expr::Mul(a, b) => {
            fmt_expr(a, 2, out)?;
            out.write_str(" * ")?;
            fmt_expr(b, 3, out)
        }
        Expr::Div(a, b) => {
            fmt_expr(a, 2, out)?;
            out.write_str(" / ")?;
            fmt_expr(b, 3, out)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_expr(self, 0, f)
    }
}

/// Comparison operator between two expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl Cmp {
    pub fn apply(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Cmp::Lt => lhs < rhs,
            Cmp::Le => lhs <= rhs,
            Cmp::Gt => lhs > rhs,
            Cmp::Ge => lhs >= rhs,
            Cmp::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Gt => ">",
            Cmp::Ge => ">=",
            Cmp::Eq => "==",
        }
    }
}

/// Named comparison giving a formula atom its meaning on trace data.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomPredicate {
    pub name: String,
    pub lhs: Expr,
    pub cmp: Cmp,
    pub rhs: Expr,
}

impl AtomPredicate {
    pub fn new(name: impl Into<String>, lhs: Expr, cmp: Cmp, rhs: Expr) -> Self {
        AtomPredicate {
            name: name.into(),
            lhs,
            cmp,
            rhs,
        }
    }

    pub fn eval<S: FieldSource + ?Sized>(&self, src: &S) -> Result<bool, EvalError> {
        Ok(self.cmp.apply(self.lhs.eval(src)?, self.rhs.eval(src)?))
    }

    /// Field names referenced by either side.
    pub fn fields(&self) -> BTreeSet<String> {
        let mut out = self.lhs.fields();
        out.extend(self.rhs.fields());
        out
    }
}

impl fmt::Display for AtomPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {} {} {}",
            self.name,
            self.lhs,
            self.cmp.symbol(),
            self.rhs
        )
    }
}
