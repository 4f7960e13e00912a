//! Hypotheses written as predicates over point coordinates.
//!
//! ```text
//! expr  := or
//! or    := and (("||" | "or") and)*
//! and   := unary (("&&" | "and") unary)*
//! unary := ("!" | "not") unary | "(" expr ")" | "true" | "false" | term cmp term
//! term  := number | "x" index
//! cmp   := "==" | "!=" | "<" | "<=" | ">" | ">="
//! ```
//!
//! Comparisons are exact on `f64`.

use thiserror::Error;

use super::{Hypothesis, LatticeError, ParameterGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PredicateError {
    #[error("predicate `{input}`: {message} at byte {position}")]
    Syntax { input: String, position: usize, message: String },
    #[error("predicate refers to x{index} but point `{id}` has {dims} coordinates")]
    MissingCoordinate { index: usize, id: String, dims: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Term {
    Const(f64),
    Coord(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Cmp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
enum Expr {
    Bool(bool),
    Compare(Term, Cmp, Term),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Coord(usize),
    Cmp(Cmp),
    And,
    Or,
    Not,
    LParen,
    RParen,
    True,
    False,
}

/// A parsed coordinate predicate.
#[derive(Clone, Debug, PartialEq)]
pub struct Predicate {
    source: String,
    expr: Expr,
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>, PredicateError> {
    let err = |position: usize, message: &str| PredicateError::Syntax {
        input: input.to_string(),
        position,
        message: message.to_string(),
    };
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let two = input.get(i..i + 2).unwrap_or("");
        let (token, width) = match two {
            "==" => (Token::Cmp(Cmp::Eq), 2),
            "!=" => (Token::Cmp(Cmp::Ne), 2),
            "<=" => (Token::Cmp(Cmp::Le), 2),
            ">=" => (Token::Cmp(Cmp::Ge), 2),
            "&&" => (Token::And, 2),
            "||" => (Token::Or, 2),
            _ => match c {
                '<' => (Token::Cmp(Cmp::Lt), 1),
                '>' => (Token::Cmp(Cmp::Gt), 1),
                '!' => (Token::Not, 1),
                '(' => (Token::LParen, 1),
                ')' => (Token::RParen, 1),
                _ if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' => {
                    let mut j = i + 1;
                    while j < bytes.len() {
                        let d = bytes[j] as char;
                        let exp_sign = (d == '-' || d == '+') && matches!(bytes[j - 1], b'e' | b'E');
                        if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                            j += 1;
                        } else {
                            break;
                        }
                    }
                    let value: f64 = input[i..j].parse().map_err(|_| err(start, "malformed number"))?;
                    (Token::Num(value), j - i)
                }
                _ if c.is_ascii_alphabetic() => {
                    let mut j = i + 1;
                    while j < bytes.len() && (bytes[j] as char).is_ascii_alphanumeric() {
                        j += 1;
                    }
                    let word = &input[i..j];
                    let token = match word {
                        "and" => Token::And,
                        "or" => Token::Or,
                        "not" => Token::Not,
                        "true" => Token::True,
                        "false" => Token::False,
                        _ => match word.strip_prefix('x').map(str::parse::<usize>) {
                            Some(Ok(index)) => Token::Coord(index),
                            _ => return Err(err(start, &format!("unknown word `{word}`"))),
                        },
                    };
                    (token, j - i)
                }
                _ => return Err(err(start, &format!("unexpected character `{c}`"))),
            },
        };
        tokens.push((start, token));
        i += width;
    }
    Ok(tokens)
}

struct Parser<'a> {
    input: &'a str,
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> PredicateError {
        let position = self.tokens.get(self.pos).map_or(self.input.len(), |t| t.0);
        PredicateError::Syntax { input: self.input.to_string(), position, message: message.to_string() }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn or(&mut self) -> Result<Expr, PredicateError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Token::Or) {
            self.bump();
            lhs = Expr::Or(Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, PredicateError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Token::And) {
            self.bump();
            lhs = Expr::And(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, PredicateError> {
        match self.peek() {
            Some(Token::Not) => {
                self.bump();
                Ok(Expr::Not(Box::new(self.unary()?)))
            }
            Some(Token::LParen) => {
                self.bump();
                let inner = self.or()?;
                if self.bump() != Some(Token::RParen) {
                    self.pos -= 1;
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(Token::True) => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Some(Token::False) => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            _ => {
                let lhs = self.term()?;
                let cmp = match self.bump() {
                    Some(Token::Cmp(c)) => c,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error("expected a comparison operator"));
                    }
                };
                let rhs = self.term()?;
                Ok(Expr::Compare(lhs, cmp, rhs))
            }
        }
    }

    fn term(&mut self) -> Result<Term, PredicateError> {
        match self.bump() {
            Some(Token::Num(v)) => Ok(Term::Const(v)),
            Some(Token::Coord(i)) => Ok(Term::Coord(i)),
            _ => {
                self.pos -= 1;
                Err(self.error("expected a number or a coordinate `xN`"))
            }
        }
    }
}

impl Predicate {
    pub fn parse(input: &str) -> Result<Self, PredicateError> {
        let tokens = tokenize(input)?;
        let mut parser = Parser { input, tokens, pos: 0 };
        if parser.tokens.is_empty() {
            return Err(parser.error("empty predicate"));
        }
        let expr = parser.or()?;
        if parser.pos < parser.tokens.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(Predicate { source: input.to_string(), expr })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, coord: &[f64]) -> Option<bool> {
        eval(&self.expr, coord)
    }

    /// The points whose coordinates satisfy the predicate.
    pub fn select(&self, grid: &ParameterGrid) -> Result<Hypothesis, PredicateError> {
        let mut h = grid.empty_hypothesis();
        for (i, p) in grid.points().iter().enumerate() {
            match eval(&self.expr, &p.coord) {
                Some(true) => h.insert(i),
                Some(false) => {}
                None => {
                    return Err(PredicateError::MissingCoordinate {
                        index: max_coord(&self.expr).unwrap_or(0),
                        id: p.id.clone(),
                        dims: p.coord.len(),
                    })
                }
            }
        }
        Ok(h)
    }
}

fn max_coord(expr: &Expr) -> Option<usize> {
    let term = |t: &Term| match t {
        Term::Coord(i) => Some(*i),
        Term::Const(_) => None,
    };
    match expr {
        Expr::Bool(_) => None,
        Expr::Compare(a, _, b) => term(a).max(term(b)),
        Expr::Not(e) => max_coord(e),
        Expr::And(a, b) | Expr::Or(a, b) => max_coord(a).max(max_coord(b)),
    }
}

fn eval(expr: &Expr, coord: &[f64]) -> Option<bool> {
    let value = |t: &Term| match t {
        Term::Const(v) => Some(*v),
        Term::Coord(i) => coord.get(*i).copied(),
    };
    Some(match expr {
        Expr::Bool(b) => *b,
        Expr::Compare(a, cmp, b) => {
            let (a, b) = (value(a)?, value(b)?);
            match cmp {
                Cmp::Eq => a == b,
                Cmp::Ne => a != b,
                Cmp::Lt => a < b,
                Cmp::Le => a <= b,
                Cmp::Gt => a > b,
                Cmp::Ge => a >= b,
            }
        }
        Expr::Not(e) => !eval(e, coord)?,
        Expr::And(a, b) => eval(a, coord)? && eval(b, coord)?,
        Expr::Or(a, b) => eval(a, coord)? || eval(b, coord)?,
    })
}
