//! Parser for rational map expressions.
//!
//! Grammar: rational expressions in `z` with `+ - * / ^` and parentheses,
//! integer literals (so `a/b` is ordinary division) and the symbol `p`,
//! which is substituted by the chosen prime before any normalization.
//! Exponents are nonnegative integer literals. All arithmetic is exact over
//! the rationals; syntax errors carry byte offsets.

use crate::error::{Error, Result};
use crate::rational::{QPoly, RatFunc, Q};
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Z,
    P,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    toks: Vec<(Tok, usize)>,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let mut lx = Lexer {
        src: src.as_bytes(),
        pos: 0,
        toks: vec![],
    };
    while lx.pos < lx.src.len() {
        let start = lx.pos;
        let c = lx.src[lx.pos];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                lx.pos += 1;
            }
            b'0'..=b'9' => {
                let mut end = lx.pos;
                while end < lx.src.len() && lx.src[end].is_ascii_digit() {
                    end += 1;
                }
                let text = std::str::from_utf8(&lx.src[lx.pos..end]).unwrap();
                let n: BigInt = text.parse().unwrap();
                lx.toks.push((Tok::Int(n), start));
                lx.pos = end;
            }
            b'z' | b'Z' => {
                lx.toks.push((Tok::Z, start));
                lx.pos += 1;
            }
            b'p' | b'P' => {
                lx.toks.push((Tok::P, start));
                lx.pos += 1;
            }
            b'+' => {
                lx.toks.push((Tok::Plus, start));
                lx.pos += 1;
            }
            b'-' => {
                lx.toks.push((Tok::Minus, start));
                lx.pos += 1;
            }
            b'*' => {
                lx.toks.push((Tok::Star, start));
                lx.pos += 1;
            }
            b'/' => {
                lx.toks.push((Tok::Slash, start));
                lx.pos += 1;
            }
            b'^' => {
                lx.toks.push((Tok::Caret, start));
                lx.pos += 1;
            }
            b'(' => {
                lx.toks.push((Tok::LParen, start));
                lx.pos += 1;
            }
            b')' => {
                lx.toks.push((Tok::RParen, start));
                lx.pos += 1;
            }
            other => {
                return Err(Error::Parse {
                    offset: start,
                    message: format!("unexpected character '{}'", other as char),
                })
            }
        }
    }
    Ok(lx.toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    prime: u64,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, o)| *o)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.unary()?)?;
                }
                Some(Tok::Slash) => {
                    let off = self.offset();
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.div(&rhs).map_err(|e| match e {
                        Error::ZeroDenominator => Error::Parse {
                            offset: off,
                            message: "division by the zero function".into(),
                        },
                        e => e,
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            let off = self.offset();
            self.bump();
            match self.bump() {
                Some(Tok::Int(n)) => {
                    let e: usize = n.to_string().parse().map_err(|_| Error::Parse {
                        offset: off,
                        message: "exponent too large".into(),
                    })?;
                    return base.pow(e);
                }
                _ => {
                    return Err(Error::Parse {
                        offset: off,
                        message: "exponent must be a nonnegative integer literal".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(RatFunc::constant(Q::from_integer(n))),
            Some(Tok::Z) => Ok(RatFunc::from_poly(QPoly::x())),
            Some(Tok::P) => Ok(RatFunc::constant(Q::from_integer(BigInt::from(
                self.prime,
            )))),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Parse {
                        offset: self.offset().min(self.end),
                        message: "expected closing parenthesis".into(),
                    }),
                }
            }
            _ => Err(Error::Parse {
                offset: off,
                message: "expected a value".into(),
            }),
        }
    }
}

/// Parse an expression into an exact rational function, with `p` replaced
/// by the given prime.
pub fn parse_expression(text: &str, prime: u64) -> Result<RatFunc> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::Parse {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        prime,
        end: text.len(),
    };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse {
            offset: p.offset(),
            message: "trailing input".into(),
        });
    }
    Ok(f)
}

/// Render a rational function the way the parser accepts it.
pub fn render_ratfunc(f: &RatFunc) -> String {
    let num = render_poly(&f.num);
    if f.den == QPoly::one() {
        num
    } else {
        format!("({num})/({})", render_poly(&f.den))
    }
}

fn render_poly(f: &QPoly) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let mut parts: Vec<String> = vec![];
    for (i, c) in f.coeffs().iter().enumerate().rev() {
        if num_traits::Zero::is_zero(c) {
            continue;
        }
        let coeff = if c.denom() == &BigInt::from(1) {
            c.numer().to_string()
        } else {
            format!("({}/{})", c.numer(), c.denom())
        };
        let part = match i {
            0 => coeff,
            1 if coeff == "1" => "z".into(),
            1 if coeff == "-1" => "-z".into(),
            1 => format!("{coeff}*z"),
            _ if coeff == "1" => format!("z^{i}"),
            _ if coeff == "-1" => format!("-z^{i}"),
            _ => format!("{coeff}*z^{i}"),
        };
        parts.push(part);
    }
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            out.push_str(p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}
