//! Parser for the polynomial input grammar.
//!
//! The variable is `z`; literals are unsigned decimal integers;
//! operators are `+ - * / ^` with parentheses and implicit
//! multiplication (`3z^2`, `(1/25)z`, `2(z+1)`). `/` divides by a
//! nonzero constant only, so `29/16` and `z^3/7` parse while `1/z`
//! does not. Whitespace is insignificant. Syntax errors carry the byte
//! offset of the offending input; [`Polynomial`] rejects degrees below
//! two after parsing.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use ppb_core::{Error, Poly, Polynomial, Result};

/// Exponents beyond this are refused outright: the dense coefficient
/// vector would be allocated before any later guard could run.
const MAX_EXPONENT: u32 = 512;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Z,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Z => "'z'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let tok = match bytes[i] {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = BigInt::parse_bytes(&bytes[start..i], 10).expect("decimal digits");
                out.push((start, Tok::Num(n)));
                continue;
            }
            b'z' => Tok::Z,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => {
                let ch = text[start..].chars().next().expect("in-bounds char");
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unexpected character {ch:?}"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn err(&self, pos: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := factor (('*' factor) | ('/' factor) | factor)*
    // where the trailing bare `factor` is implicit multiplication and
    // `/` requires a nonzero constant divisor.
    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    let pos = self.pos();
                    self.bump();
                    let rhs = self.factor()?;
                    match rhs.degree() {
                        None => return Err(self.err(pos, "division by zero")),
                        Some(0) => acc = acc.scale(&rhs.coeff(0).recip()),
                        Some(_) => return Err(self.err(pos, "divisor must be a nonzero constant")),
                    }
                }
                Some(Tok::Num(_)) | Some(Tok::Z) | Some(Tok::LParen) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    // factor := '-' factor | power
    fn factor(&mut self) -> Result<Poly> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        self.power()
    }

    // power := atom ('^' NUMBER)?
    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if !matches!(self.peek(), Some(Tok::Caret)) {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump() {
            Some((_, Tok::Num(n))) => {
                let e = n
                    .to_u32()
                    .filter(|&e| e <= MAX_EXPONENT)
                    .ok_or_else(|| Error::SizeGuard(format!("exponent {n} too large")))?;
                Ok(base.pow(e))
            }
            Some((p, t)) => Err(self.err(
                p,
                format!("expected integer exponent, found {}", t.describe()),
            )),
            None => Err(self.err(pos, "expected integer exponent after '^'")),
        }
    }

    // atom := NUMBER | 'z' | '(' expr ')'
    fn atom(&mut self) -> Result<Poly> {
        let pos = self.pos();
        match self.bump() {
            Some((_, Tok::Num(n))) => Ok(Poly::constant(ppb_core::Rat::from_integer(n))),
            Some((_, Tok::Z)) => Ok(Poly::var()),
            Some((_, Tok::LParen)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    Some((p, t)) => {
                        Err(self.err(p, format!("expected ')', found {}", t.describe())))
                    }
                    None => Err(self.err(self.end, "unclosed '('")),
                }
            }
            Some((p, t)) => Err(self.err(p, format!("expected a term, found {}", t.describe()))),
            None => Err(self.err(pos, "unexpected end of input")),
        }
    }
}

/// Parse a polynomial in `z` of degree at least two.
pub fn parse_poly(text: &str) -> Result<Polynomial> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "empty input".into(),
        });
    }
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
    };
    let poly = p.expr()?;
    if let Some((pos, t)) = p.bump() {
        return Err(Error::Parse {
            pos,
            msg: format!("unexpected {}", t.describe()),
        });
    }
    Polynomial::new(poly.coeffs().to_vec())
}

/// Parse a standalone rational argument `n`, `-n`, or `n/d`.
pub fn parse_rat_arg(text: &str) -> Result<ppb_core::Rat> {
    let s = text.trim();
    let bad = || Error::arg(format!("expected a rational like -3 or 1/4, got {text:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = match den {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::from(1),
    };
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(ppb_core::Rat::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ppb_core::Rat;
    use proptest::prelude::*;

    fn coeffs(text: &str) -> Vec<Rat> {
        parse_poly(text).unwrap().coeffs().to_vec()
    }

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn worked_examples() {
        assert_eq!(coeffs("z^2 - 29/16"), vec![r(-29, 16), r(0, 1), r(1, 1)]);
        assert_eq!(
            coeffs("z^3 - (1/25)z"),
            vec![r(0, 1), r(-1, 25), r(0, 1), r(1, 1)]
        );
        assert_eq!(
            coeffs("343z^3 - 7z^2"),
            vec![r(0, 1), r(0, 1), r(-7, 1), r(343, 1)]
        );
    }

    #[test]
    fn operators_and_grouping() {
        assert_eq!(coeffs("z*z + 1"), vec![r(1, 1), r(0, 1), r(1, 1)]);
        assert_eq!(coeffs("(z+1)(z-1) + z^2"), vec![r(-1, 1), r(0, 1), r(2, 1)]);
        assert_eq!(coeffs("z^3/7"), vec![r(0, 1), r(0, 1), r(0, 1), r(1, 7)]);
        assert_eq!(coeffs("-z^2 - -1"), vec![r(1, 1), r(0, 1), r(-1, 1)]);
        assert_eq!(coeffs("3/2z^2"), vec![r(0, 1), r(0, 1), r(3, 2)]);
        assert_eq!(coeffs(" z ^ 2 + 0z"), vec![r(0, 1), r(0, 1), r(1, 1)]);
    }

    #[test]
    fn degree_enforced() {
        assert!(matches!(parse_poly("z + 1"), Err(Error::Argument(_))));
        assert!(matches!(parse_poly("5"), Err(Error::Argument(_))));
        assert!(matches!(
            parse_poly("z^2 - z^2 + z"),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn error_positions() {
        match parse_poly("z^2 + @") {
            Err(Error::Parse { pos, msg }) => {
                assert_eq!(pos, 6);
                assert!(msg.contains('@'), "{msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_poly("z^^2") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_poly("z^2 +") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_poly("z^2/0") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_poly("1/z + z^2") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_poly("(z^2") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(parse_poly(""), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_poly("z^9999"), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn rat_args() {
        assert_eq!(parse_rat_arg("-12").unwrap(), r(-12, 1));
        assert_eq!(parse_rat_arg("1/4").unwrap(), r(1, 4));
        assert_eq!(parse_rat_arg("-21/16").unwrap(), r(-21, 16));
        assert!(parse_rat_arg("1/0").is_err());
        assert!(parse_rat_arg("x").is_err());
        assert!(parse_rat_arg("1.5").is_err());
    }

    proptest! {
        // Display promises to render in this grammar; check the round
        // trip on random polynomials.
        #[test]
        fn display_round_trips(
            lead_n in prop_oneof![1i64..=40, -40i64..=-1],
            lead_d in 1i64..=9,
            rest in proptest::collection::vec((-40i64..=40, 1i64..=9), 2..=6),
        ) {
            let mut cs: Vec<Rat> = rest.iter().map(|&(n, d)| r(n, d)).collect();
            cs.push(r(lead_n, lead_d));
            let phi = Polynomial::new(cs).unwrap();
            let reparsed = parse_poly(&phi.to_string()).unwrap();
            prop_assert_eq!(reparsed.coeffs(), phi.coeffs());
        }
    }
}
