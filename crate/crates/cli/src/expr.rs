//! Parser for ν-series literals.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := ['-'] factor ('*' factor)*
//! factor  := atom ['^' int]
//! atom    := int            an element of F_p
//!          | 't' [uint]     t^k for the fixed generator t of F_{q^ell}; bare t is t^1
//!          | 'n'            the uniformizer nu of D
//!          | 'p'            pi = nu^ell
//!          | '(' expr ')'
//!          | 'O(n^' int ')' marks the precision of the literal
//! ```
//!
//! Exponents on `n` and `p` may be negative; other exponents must be
//! non-negative.  The literal is evaluated modulo `P^prec`, where `prec` comes
//! from an `O(...)` term or the caller's default.

use sl1d_core::algebra::{Algebra, DElem};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected {found} at offset {at}")]
    Unexpected { found: String, at: usize },
    #[error("negative exponent on a non-invertible factor at offset {0}")]
    NegativeExponent(usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Int(i64),
    T(i64),
    Nu,
    Pi,
    Pow(Box<Node>, i64),
    Neg(Box<Node>),
    Sum(Vec<Node>),
    Product(Vec<Node>),
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    prec: Option<i32>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn err<T>(&self) -> Result<T, ParseError> {
        let found = match self.peek() {
            Some(c) => format!("'{}'", c as char),
            None => "end of input".into(),
        };
        Err(ParseError::Unexpected { found, at: self.i })
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let start = self.i;
        let neg = self.eat(b'-');
        let digits = self.i;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.i += 1;
        }
        if self.i == digits {
            self.i = start;
            return self.err();
        }
        let v: i64 = std::str::from_utf8(&self.s[digits..self.i]).unwrap().parse().map_err(|_| ParseError::Unexpected { found: "integer overflow".into(), at: digits })?;
        Ok(if neg { -v } else { v })
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut terms = Vec::new();
        if let Some(t) = self.term()? {
            terms.push(t);
        }
        loop {
            if self.eat(b'+') {
                if let Some(t) = self.term()? {
                    terms.push(t);
                }
            } else if self.eat(b'-') {
                if let Some(t) = self.term()? {
                    terms.push(Node::Neg(Box::new(t)));
                }
            } else {
                break;
            }
        }
        Ok(Node::Sum(terms))
    }

    fn term(&mut self) -> Result<Option<Node>, ParseError> {
        if self.s[self.i..].starts_with(b"O(n^") {
            self.i += 4;
            self.prec = Some(self.int()? as i32);
            if !self.eat(b')') {
                return self.err();
            }
            return Ok(None);
        }
        let neg = self.eat(b'-');
        let mut factors = vec![self.factor()?];
        while self.eat(b'*') {
            factors.push(self.factor()?);
        }
        let p = Node::Product(factors);
        Ok(Some(if neg { Node::Neg(Box::new(p)) } else { p }))
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        let at = self.i;
        let atom = self.atom()?;
        if self.eat(b'^') {
            let e = self.int()?;
            if e < 0 && !matches!(atom, Node::Nu | Node::Pi) {
                return Err(ParseError::NegativeExponent(at));
            }
            return Ok(Node::Pow(Box::new(atom), e));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err();
                }
                Ok(e)
            }
            Some(b'n') => {
                self.i += 1;
                Ok(Node::Nu)
            }
            Some(b'p') => {
                self.i += 1;
                Ok(Node::Pi)
            }
            Some(b't') => {
                self.i += 1;
                if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    Ok(Node::T(self.int()?))
                } else {
                    Ok(Node::T(1))
                }
            }
            Some(c) if c.is_ascii_digit() => Ok(Node::Int(self.int()?)),
            _ => self.err(),
        }
    }
}

/// Total negative valuation that products may consume, bounding the extra
/// working precision needed for an exact result.
fn precision_loss(n: &Node, ell: i32) -> i32 {
    match n {
        Node::Int(_) | Node::T(_) => 0,
        Node::Nu => 0,
        Node::Pi => 0,
        Node::Pow(b, e) => match **b {
            Node::Nu if *e < 0 => -e as i32,
            Node::Pi if *e < 0 => -e as i32 * ell,
            _ => precision_loss(b, ell) * (*e).max(1) as i32,
        },
        Node::Neg(b) => precision_loss(b, ell),
        Node::Sum(v) => v.iter().map(|x| precision_loss(x, ell)).max().unwrap_or(0),
        Node::Product(v) => v.iter().map(|x| precision_loss(x, ell)).sum(),
    }
}

fn eval(alg: &Algebra, n: &Node, prec: i32) -> DElem {
    let t = alg.tower();
    match n {
        Node::Int(c) => alg.scalar(*c, prec),
        Node::T(k) => alg.constant(t.gen_pow(*k), prec),
        Node::Nu => alg.nu_pow(1, prec),
        Node::Pi => alg.nu_pow(alg.ell(), prec),
        Node::Pow(b, e) => match **b {
            Node::Nu => alg.nu_pow(*e as i32, prec),
            Node::Pi => alg.nu_pow(*e as i32 * alg.ell(), prec),
            _ => {
                let x = eval(alg, b, prec);
                alg.pow(&x, *e as u64)
            }
        },
        Node::Neg(b) => alg.neg(&eval(alg, b, prec)),
        Node::Sum(v) => v.iter().fold(alg.zero(prec), |acc, x| alg.plus(&acc, &eval(alg, x, prec))),
        Node::Product(v) => v.iter().fold(alg.one(prec), |acc, x| alg.times(&acc, &eval(alg, x, prec))),
    }
}

/// Parses and evaluates `src` modulo `P^prec`; an `O(n^k)` term overrides `prec`.
pub fn parse_elem(alg: &Algebra, src: &str, default_prec: i32) -> Result<DElem, ParseError> {
    let compact: Vec<u8> = src.bytes().filter(|c| !c.is_ascii_whitespace()).collect();
    let mut p = Parser { s: &compact, i: 0, prec: None };
    let node = p.expr()?;
    if p.i != compact.len() {
        return p.err();
    }
    let prec = p.prec.unwrap_or(default_prec);
    let work = prec + precision_loss(&node, alg.ell());
    Ok(alg.with_prec(&eval(alg, &node, work), prec))
}
