//! Polynomial expressions: integer literals, `X`, `Y`, `+ - * ^` and
//! parentheses. Juxtaposition is rejected.

use num_bigint::BigInt;

use crate::algebra::Poly;
use crate::error::{Error, Result};
use crate::field::Field;

const MAX_EXPONENT: u32 = 4096;

/// A nonzero literal that vanishes in the field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiteralNote {
    pub pos: usize,
    pub literal: String,
}

impl std::fmt::Display for LiteralNote {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "literal {} at position {} reduces to 0", self.literal, self.pos)
    }
}

#[derive(Clone, Debug)]
pub struct Parsed {
    pub poly: Poly,
    pub notes: Vec<LiteralNote>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    X,
    Y,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|c| c.1).collect();
                out.push((pos, Tok::Int(s)));
                continue;
            }
            'X' => Tok::X,
            'Y' => Tok::Y,
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(Error::Syntax { pos, msg: format!("unexpected character '{c}'") }),
        };
        out.push((pos, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    field: &'a Field,
    notes: Vec<LiteralNote>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            let minus = match t {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.at += 1;
            let rhs = self.term()?;
            acc = if minus { &acc - &rhs } else { &acc + &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    let rhs = self.unary()?;
                    acc = &acc * &rhs;
                }
                Some(Tok::Int(_) | Tok::X | Tok::Y | Tok::LParen) => {
                    return self.err("implicit multiplication is not allowed, use '*'");
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.at += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.at += 1;
        let Some(Tok::Int(s)) = self.peek().cloned() else {
            return self.err("exponent must be a nonnegative integer literal");
        };
        let e: u32 = match s.parse() {
            Ok(e) if e <= MAX_EXPONENT => e,
            _ => return self.err(format!("exponent exceeds {MAX_EXPONENT}")),
        };
        self.at += 1;
        if self.peek() == Some(&Tok::Caret) {
            return self.err("chained exponents need parentheses");
        }
        Ok(base.pow(e))
    }

    fn atom(&mut self) -> Result<Poly> {
        let k = self.field;
        let pos = self.pos();
        let Some(t) = self.peek().cloned() else {
            return self.err("unexpected end of input");
        };
        self.at += 1;
        match t {
            Tok::Int(s) => {
                let n: BigInt = s.parse().expect("digits");
                let c = k.from_bigint(&n);
                if k.is_zero(&c) && n != BigInt::from(0) {
                    self.notes.push(LiteralNote { pos, literal: s });
                }
                Ok(Poly::constant(k, c))
            }
            Tok::X => Ok(Poly::x(k)),
            Tok::Y => Ok(Poly::y(k)),
            Tok::LParen => {
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.at += 1;
                Ok(inner)
            }
            _ => {
                self.at -= 1;
                self.err("expected a literal, X, Y or '('")
            }
        }
    }
}

/// Parses `text` with coefficients reduced into `field`.
pub fn parse_expression(text: &str, field: &Field) -> Result<Parsed> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), field, notes: Vec::new() };
    let poly = p.expr()?;
    if p.at < p.toks.len() {
        return p.err("unexpected token");
    }
    Ok(Parsed { poly, notes: p.notes })
}

/// `GF(p)`, `GF(p^k)` or `QQ`.
pub fn parse_field(spec: &str) -> Result<Field> {
    let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_uppercase();
    if s == "QQ" || s == "Q" {
        return Ok(Field::rationals());
    }
    let inner = s
        .strip_prefix("GF(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::InvalidField(format!("'{spec}' is not GF(p), GF(p^k) or QQ")))?;
    let bad = || Error::InvalidField(format!("cannot read '{spec}'"));
    match inner.split_once('^') {
        Some((p, k)) => Field::extension(p.parse().map_err(|_| bad())?, k.parse().map_err(|_| bad())?),
        None => Field::prime(inner.parse().map_err(|_| bad())?),
    }
}
