//! Mini-grammar for observable strings.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := number | symbol | '(' expr ')'
//! symbol := q | p | q' | p' | x | k        (qp, pp are accepted for q', p')
//! ```

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Q,
    P,
    QPrime,
    PPrime,
    X,
    K,
}

impl Symbol {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "q" => Symbol::Q,
            "p" => Symbol::P,
            "q'" | "qp" => Symbol::QPrime,
            "p'" | "pp" => Symbol::PPrime,
            "x" => Symbol::X,
            "k" => Symbol::K,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Symbol::Q => "q",
            Symbol::P => "p",
            Symbol::QPrime => "q'",
            Symbol::PPrime => "p'",
            Symbol::X => "x",
            Symbol::K => "k",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Symbol),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse()
                .map_err(|_| Error::Parse(format!("bad number `{text}`")))?;
            out.push(Token::Num(v));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            if i < chars.len() && (chars[i] == '\'' || chars[i] == '′') {
                i += 1;
            }
            let name: String = chars[start..i]
                .iter()
                .map(|&c| if c == '′' { '\'' } else { c })
                .collect();
            out.push(Token::Ident(name));
        } else if "+-*^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Token::Num(v)) if v.fract() == 0.0 && v >= 0.0 && v <= 16.0 => {
                    self.pos += 1;
                    return Ok(Expr::Pow(Box::new(base), v as u32));
                }
                other => {
                    return Err(Error::Parse(format!(
                        "exponent must be a small non-negative integer, got {other:?}"
                    )))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Symbol::from_name(&name)
                    .map(Expr::Var)
                    .ok_or_else(|| Error::Parse(format!("unknown symbol `{name}`")))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!(
            "trailing input at token {}",
            p.pos + 1
        )));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_primes() {
        let e = parse("2*x^2 + q'*k - 1").unwrap();
        let want = Expr::Sub(
            Box::new(Expr::Add(
                Box::new(Expr::Mul(
                    Box::new(Expr::Num(2.0)),
                    Box::new(Expr::Pow(Box::new(Expr::Var(Symbol::X)), 2)),
                )),
                Box::new(Expr::Mul(
                    Box::new(Expr::Var(Symbol::QPrime)),
                    Box::new(Expr::Var(Symbol::K)),
                )),
            )),
            Box::new(Expr::Num(1.0)),
        );
        assert_eq!(e, want);
        assert_eq!(parse("qp").unwrap(), parse("q'").unwrap());
    }

    #[test]
    fn errors_are_reported() {
        assert!(parse("").is_err());
        assert!(parse("x +").is_err());
        assert!(parse("y").is_err());
        assert!(parse("x^k").is_err());
        assert!(parse("(x").is_err());
        assert!(parse("x $ k").is_err());
    }
}
