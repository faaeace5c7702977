//! Recursive-descent parsers for formulas and atom predicates.
//!
//! Formula grammar, loosest to tightest binding:
//!
//! ```text
//! formula := or ("->" formula)?          right-associative
//! or      := and ("|" and)*
//! and     := until ("&" until)*
//! until   := unary (("U" | "R") until)?  right-associative
//! unary   := ("!" | "X" | "F" | "G") unary | "true" | "false" | ident | "(" formula ")"
//! ```
//!
//! Atom predicates bind a name to a comparison over trace fields:
//!
//! ```text
//! atom       := ident "=" comparison
//! comparison := expr ("<" | "<=" | ">" | ">=" | "==") expr
//! expr       := term (("+" | "-") term)*
//! term       := factor (("*" | "/") factor)*
//! factor     := number | ident | "abs" "(" expr ")" | "-" factor | "(" expr ")"
//! ```
//!
//! Division by a literal zero is rejected at parse time.

use thiserror::Error;

use super::expr::{AtomPredicate, Cmp, Expr};
use super::Formula;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    Eventually,
    Globally,
    Until,
    Release,
    LParen,
    RParen,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(v) => format!("number `{v}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Next => "`X`".into(),
            Tok::Eventually => "`F`".into(),
            Tok::Globally => "`G`".into(),
            Tok::Until => "`U`".into(),
            Tok::Release => "`R`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Assign => "`=`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn new(text: &str) -> Self {
        Lexer {
            chars: text.chars().collect(),
            idx: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn bump(&mut self) -> char {
        let c = self.chars[self.idx];
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, into: &mut String, pred: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&pred) {
            into.push(self.bump());
        }
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut lx = Lexer::new(text);
    let mut out = Vec::new();

    while let Some(c) = lx.peek() {
        let (tline, tcol) = (lx.line, lx.col);
        let err = |message: String| ParseError {
            line: tline,
            col: tcol,
            message,
        };
        if c.is_whitespace() {
            lx.bump();
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::new();
            lx.take_while(&mut ident, |c| c.is_ascii_alphanumeric() || c == '_');
            let tok = match ident.as_str() {
                "true" => Tok::True,
                "false" => Tok::False,
                "X" => Tok::Next,
                "F" => Tok::Eventually,
                "G" => Tok::Globally,
                "U" => Tok::Until,
                "R" => Tok::Release,
                _ => Tok::Ident(ident),
            };
            out.push(Spanned {
                tok,
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let mut num = String::new();
            lx.take_while(&mut num, |c| c.is_ascii_digit());
            if lx.peek() == Some('.') {
                num.push(lx.bump());
                if !lx.peek().is_some_and(|c| c.is_ascii_digit()) {
                    return Err(err(format!("malformed number `{num}`")));
                }
                lx.take_while(&mut num, |c| c.is_ascii_digit());
            }
            if matches!(lx.peek(), Some('e') | Some('E')) {
                num.push(lx.bump());
                if matches!(lx.peek(), Some('+') | Some('-')) {
                    num.push(lx.bump());
                }
                if !lx.peek().is_some_and(|c| c.is_ascii_digit()) {
                    return Err(err(format!("malformed number `{num}`")));
                }
                lx.take_while(&mut num, |c| c.is_ascii_digit());
            }
            let value: f64 = num
                .parse()
                .map_err(|_| err(format!("malformed number `{num}`")))?;
            out.push(Spanned {
                tok: Tok::Number(value),
                line: tline,
                col: tcol,
            });
            continue;
        }
        lx.bump();
        let tok = match c {
            '!' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '-' => {
                if lx.eat('>') {
                    Tok::Implies
                } else {
                    Tok::Minus
                }
            }
            '<' => {
                if lx.eat('=') {
                    Tok::Le
                } else {
                    Tok::Lt
                }
            }
            '>' => {
                if lx.eat('=') {
                    Tok::Ge
                } else {
                    Tok::Gt
                }
            }
            '=' => {
                if lx.eat('=') {
                    Tok::EqEq
                } else {
                    Tok::Assign
                }
            }
            other => {
                return Err(err(format!("unexpected character `{other}`")));
            }
        };
        out.push(Spanned {
            tok,
            line: tline,
            col: tcol,
        });
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let tokens = lex(text)?;
        let (end_line, end_col) = tokens
            .last()
            .map(|t| (t.line, t.col + 1))
            .unwrap_or((1, 1));
        Ok(Parser {
            tokens,
            pos: 0,
            end_line,
            end_col,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> ParseError {
        let (line, col) = self.here();
        let found = self
            .peek()
            .map(|t| t.describe())
            .unwrap_or_else(|| "end of input".into());
        ParseError {
            line,
            col,
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or_expr()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or_expr(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and_expr()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and_expr()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until_expr()?;
        while self.eat(&Tok::And) {
            let rhs = self.until_expr()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn until_expr(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary_expr()?;
        if self.eat(&Tok::Until) {
            let rhs = self.until_expr()?;
            Ok(Formula::until(lhs, rhs))
        } else if self.eat(&Tok::Release) {
            let rhs = self.until_expr()?;
            Ok(Formula::release(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn unary_expr(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary_expr()?))
            }
            Some(Tok::Next) => {
                self.pos += 1;
                Ok(Formula::next(self.unary_expr()?))
            }
            Some(Tok::Eventually) => {
                self.pos += 1;
                Ok(Formula::eventually(self.unary_expr()?))
            }
            Some(Tok::Globally) => {
                self.pos += 1;
                Ok(Formula::globally(self.unary_expr()?))
            }
            Some(Tok::True) => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Ident(_)) => {
                if let Some(Tok::Ident(name)) = self.advance() {
                    Ok(Formula::Atom(name))
                } else {
                    unreachable!()
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error("a formula (`!`, `X`, `F`, `G`, `true`, `false`, an atom, or `(`)")),
        }
    }

    // ---- atom predicates ----

    fn atom_predicate(&mut self) -> Result<AtomPredicate, ParseError> {
        let name = match self.advance() {
            Some(Tok::Ident(name)) => name,
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.error("an atom name"));
            }
        };
        self.expect(Tok::Assign, "`=` after the atom name")?;
        let lhs = self.arith_expr()?;
        let cmp = match self.advance() {
            Some(Tok::Lt) => Cmp::Lt,
            Some(Tok::Le) => Cmp::Le,
            Some(Tok::Gt) => Cmp::Gt,
            Some(Tok::Ge) => Cmp::Ge,
            Some(Tok::EqEq) => Cmp::Eq,
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.error("a comparison (`<`, `<=`, `>`, `>=`, `==`)"));
            }
        };
        let rhs = self.arith_expr()?;
        Ok(AtomPredicate { name, lhs, cmp, rhs })
    }

    fn arith_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = Expr::add(lhs, self.term()?);
            } else if self.eat(&Tok::Minus) {
                lhs = Expr::sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(&Tok::Star) {
                lhs = Expr::mul(lhs, self.factor()?);
            } else if self.eat(&Tok::Slash) {
                let (line, col) = self.here();
                let rhs = self.factor()?;
                if matches!(rhs, Expr::Num(v) if v == 0.0) {
                    return Err(ParseError {
                        line,
                        col,
                        message: "division by zero".into(),
                    });
                }
                lhs = Expr::div(lhs, rhs);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Number(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(Expr::neg(self.factor()?))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "abs" {
                    self.expect(Tok::LParen, "`(` after `abs`")?;
                    let inner = self.arith_expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::abs(inner))
                } else {
                    Ok(Expr::Field(name))
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.arith_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error("a number, field name, `abs(`, `-`, or `(`")),
        }
    }
}

/// Parses an LTL formula.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

/// Parses an atom predicate of the form `name = expr cmp expr`.
pub fn parse_atom(text: &str) -> Result<AtomPredicate, ParseError> {
    let mut p = Parser::new(text)?;
    let a = p.atom_predicate()?;
    p.expect_eof()?;
    Ok(a)
}
