//! Text input.
//!
//! Grammar (both modes share it):
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor (['*'] factor)*          -- juxtaposition is a product
//! factor := atom ['^' ['-'] INT]
//! atom   := 'q' | 'p' | 'i' | 'hbar' | INT ['/' INT] | '(' expr ')'
//! ```
//!
//! Operator mode preserves factor order; classical mode treats `q` and `p`
//! as commuting and rejects `hbar`.  Negative exponents are allowed only
//! directly on the generators.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{ClassicalPoly, Expression, Letter};
use crate::error::{Error, Result};
use crate::scalar::{ComplexRational, Rational, Scalar};

#[derive(Clone, PartialEq, Eq, Debug)]
enum Token {
    Q,
    P,
    I,
    Hbar,
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let b = bytes[pos];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => pos += 1,
            b'+' => {
                out.push((Token::Plus, pos));
                pos += 1;
            }
            b'-' => {
                out.push((Token::Minus, pos));
                pos += 1;
            }
            b'*' => {
                out.push((Token::Star, pos));
                pos += 1;
            }
            b'/' => {
                out.push((Token::Slash, pos));
                pos += 1;
            }
            b'^' => {
                out.push((Token::Caret, pos));
                pos += 1;
            }
            b'(' => {
                out.push((Token::LParen, pos));
                pos += 1;
            }
            b')' => {
                out.push((Token::RParen, pos));
                pos += 1;
            }
            b'0'..=b'9' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let digits = &text[start..pos];
                out.push((Token::Int(digits.parse().unwrap()), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_alphanumeric() {
                    pos += 1;
                }
                let word = &text[start..pos];
                let token = match word {
                    "q" => Token::Q,
                    "p" => Token::P,
                    "i" => Token::I,
                    "hbar" => Token::Hbar,
                    _ => return Err(err(start, format!("unknown symbol `{word}`"))),
                };
                out.push((token, start));
            }
            _ => return Err(err(pos, format!("unexpected character `{}`", b as char))),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Node {
    Generator(Letter),
    ImaginaryUnit,
    Hbar { offset: usize },
    Number(Rational),
    Pow { base: Box<Node>, exp: i64, offset: usize },
    Product(Vec<Node>),
    Sum(Vec<(bool, Node)>),
}

struct Parser<'a> {
    tokens: &'a [(Token, usize)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|&(_, o)| o)
            .unwrap_or(self.end)
    }

    fn advance(&mut self) -> Option<&(Token, usize)> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<()> {
        match self.advance() {
            Some((t, _)) if *t == token => Ok(()),
            Some((_, o)) => Err(err(*o, format!("expected {what}"))),
            None => Err(err(self.end, format!("expected {what}, found end of input"))),
        }
    }

    fn parse_expr(&mut self) -> Result<Node> {
        let mut terms = Vec::new();
        let mut negate = false;
        if self.peek() == Some(&Token::Minus) {
            self.advance();
            negate = true;
        }
        terms.push((negate, self.parse_term()?));
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.advance();
                    terms.push((false, self.parse_term()?));
                }
                Some(Token::Minus) => {
                    self.advance();
                    terms.push((true, self.parse_term()?));
                }
                _ => break,
            }
        }
        Ok(Node::Sum(terms))
    }

    fn parse_term(&mut self) -> Result<Node> {
        let mut factors = vec![self.parse_factor()?];
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.advance();
                    factors.push(self.parse_factor()?);
                }
                Some(
                    Token::Q | Token::P | Token::I | Token::Hbar | Token::Int(_) | Token::LParen,
                ) => {
                    factors.push(self.parse_factor()?);
                }
                _ => break,
            }
        }
        Ok(Node::Product(factors))
    }

    fn parse_factor(&mut self) -> Result<Node> {
        let atom = self.parse_atom()?;
        if self.peek() == Some(&Token::Caret) {
            let caret_offset = self.offset();
            self.advance();
            let mut negative = false;
            if self.peek() == Some(&Token::Minus) {
                self.advance();
                negative = true;
            }
            let exp = match self.advance() {
                Some((Token::Int(n), o)) => {
                    let o = *o;
                    i64::try_from(n.clone()).map_err(|_| err(o, "exponent too large"))?
                }
                Some((_, o)) => return Err(err(*o, "expected integer exponent")),
                None => return Err(err(self.end, "expected integer exponent")),
            };
            let exp = if negative { -exp } else { exp };
            return Ok(Node::Pow {
                base: Box::new(atom),
                exp,
                offset: caret_offset,
            });
        }
        Ok(atom)
    }

    fn parse_atom(&mut self) -> Result<Node> {
        match self.advance() {
            Some((Token::Q, _)) => Ok(Node::Generator(Letter::Q)),
            Some((Token::P, _)) => Ok(Node::Generator(Letter::P)),
            Some((Token::I, _)) => Ok(Node::ImaginaryUnit),
            Some((Token::Hbar, o)) => Ok(Node::Hbar { offset: *o }),
            Some((Token::Int(n), _)) => {
                let numer = n.clone();
                // a slash directly after an integer continues the literal
                if self.peek() == Some(&Token::Slash) {
                    self.advance();
                    match self.advance() {
                        Some((Token::Int(d), o)) => {
                            if d.is_zero() {
                                return Err(err(*o, "zero denominator"));
                            }
                            Ok(Node::Number(Rational::new(numer, d.clone())))
                        }
                        Some((_, o)) => Err(err(*o, "expected denominator")),
                        None => Err(err(self.end, "expected denominator")),
                    }
                } else {
                    Ok(Node::Number(Rational::from_integer(numer)))
                }
            }
            Some((Token::LParen, _)) => {
                let inner = self.parse_expr()?;
                self.expect(Token::RParen, "closing parenthesis")?;
                Ok(inner)
            }
            Some((_, o)) => Err(err(*o, "expected q, p, i, hbar, a number, or `(`")),
            None => Err(err(self.end, "unexpected end of input")),
        }
    }
}

fn parse_ast(text: &str) -> Result<Node> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        end: text.len(),
    };
    let node = parser.parse_expr()?;
    if let Some((_, o)) = parser.tokens.get(parser.pos) {
        return Err(err(*o, "trailing input"));
    }
    Ok(node)
}

fn eval_operator(node: &Node) -> Result<Expression> {
    match node {
        Node::Generator(letter) => Ok(Expression::generator_pow(*letter, 1)),
        Node::ImaginaryUnit => Ok(Expression::from_scalar(Scalar::i())),
        Node::Hbar { .. } => Ok(Expression::from_scalar(Scalar::hbar_pow(1))),
        Node::Number(r) => Ok(Expression::from_scalar(Scalar::from_rational(r.clone()))),
        Node::Pow { base, exp, offset } => match base.as_ref() {
            Node::Generator(letter) => Ok(Expression::generator_pow(*letter, *exp)),
            _ if *exp >= 0 => {
                let b = eval_operator(base)?;
                let mut out = Expression::identity();
                for _ in 0..*exp {
                    out = &out * &b;
                }
                Ok(out)
            }
            _ => Err(err(
                *offset,
                "negative exponents are only allowed on q and p",
            )),
        },
        Node::Product(factors) => {
            let mut out = Expression::identity();
            for f in factors {
                out = &out * &eval_operator(f)?;
            }
            Ok(out)
        }
        Node::Sum(terms) => {
            let mut out = Expression::zero();
            for (negated, t) in terms {
                let e = eval_operator(t)?;
                out = if *negated { &out - &e } else { &out + &e };
            }
            Ok(out)
        }
    }
}

fn eval_classical(node: &Node) -> Result<ClassicalPoly> {
    match node {
        Node::Generator(Letter::Q) => Ok(ClassicalPoly::monomial(1, 0, ComplexRational::one())),
        Node::Generator(Letter::P) => Ok(ClassicalPoly::monomial(0, 1, ComplexRational::one())),
        Node::ImaginaryUnit => Ok(ClassicalPoly::monomial(0, 0, ComplexRational::i())),
        Node::Hbar { offset } => Err(err(*offset, "hbar is not a classical quantity")),
        Node::Number(r) => Ok(ClassicalPoly::monomial(
            0,
            0,
            ComplexRational::from(r.clone()),
        )),
        Node::Pow { base, exp, offset } => match base.as_ref() {
            Node::Generator(Letter::Q) => Ok(ClassicalPoly::monomial(*exp, 0, ComplexRational::one())),
            Node::Generator(Letter::P) => Ok(ClassicalPoly::monomial(0, *exp, ComplexRational::one())),
            _ if *exp >= 0 => {
                let b = eval_classical(base)?;
                let mut out = ClassicalPoly::one();
                for _ in 0..*exp {
                    out = &out * &b;
                }
                Ok(out)
            }
            _ => Err(err(
                *offset,
                "negative exponents are only allowed on q and p",
            )),
        },
        Node::Product(factors) => {
            let mut out = ClassicalPoly::one();
            for f in factors {
                out = &out * &eval_classical(f)?;
            }
            Ok(out)
        }
        Node::Sum(terms) => {
            let mut out = ClassicalPoly::zero();
            for (negated, t) in terms {
                let p = eval_classical(t)?;
                out = if *negated { &out + &-&p } else { &out + &p };
            }
            Ok(out)
        }
    }
}

/// Parses operator text into an [`Expression`], preserving factor order.
pub fn parse_operator(text: &str) -> Result<Expression> {
    eval_operator(&parse_ast(text)?)
}

/// Parses classical text into a commuting polynomial in `q` and `p`.
pub fn parse_classical(text: &str) -> Result<ClassicalPoly> {
    eval_classical(&parse_ast(text)?)
}

/// Parses a standalone rational literal such as `3`, `-1/2`, `7/3`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let trimmed = text.trim();
    let (negative, body) = match trimmed.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, trimmed),
    };
    let (numer, denom) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (body, "1"),
    };
    let numer: BigInt = numer
        .parse()
        .map_err(|_| err(0, format!("bad rational `{text}`")))?;
    let denom: BigInt = denom
        .parse()
        .map_err(|_| err(0, format!("bad rational `{text}`")))?;
    if denom.is_zero() {
        return Err(err(0, "zero denominator"));
    }
    let r = Rational::new(numer, denom);
    Ok(if negative { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Word;
    use crate::scalar::rat;

    #[test]
    fn operator_mode_preserves_order() {
        let e = parse_operator("p^2 q^3 p").unwrap();
        let expected = Expression::from_word(Word::from_factors([
            (Letter::P, 2),
            (Letter::Q, 3),
            (Letter::P, 1),
        ]));
        assert_eq!(e, expected);
    }

    #[test]
    fn symmetric_combination() {
        let e = parse_operator("1/2 * (q p + p q)").unwrap();
        let expected = (&(&Expression::q() * &Expression::p())
            + &(&Expression::p() * &Expression::q()))
            .scale_rational(&rat(1, 2));
        assert_eq!(e, expected);
    }

    #[test]
    fn negative_exponents() {
        let e = parse_operator("p^-2 q").unwrap();
        let expected = Expression::from_word(Word::from_factors([
            (Letter::P, -2),
            (Letter::Q, 1),
        ]));
        assert_eq!(e, expected);
    }

    #[test]
    fn classical_mode_commutes() {
        let a = parse_classical("q p q").unwrap();
        let b = parse_classical("q^2 p").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn classical_mode_rejects_hbar() {
        let e = parse_classical("1/2 hbar q");
        assert!(matches!(e, Err(Error::Parse { offset: 4, .. })));
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_operator("q + r") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_operator("q +") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_operator("(q p").is_err());
        assert!(parse_operator("q 3/0").is_err());
    }

    #[test]
    fn format_parse_round_trip_spot_checks() {
        for text in [
            "q p - 1/2 i hbar",
            "p^-2 q + 3/2 i q^2",
            "(1 + i hbar) q",
            "1",
            "0",
            "-q p",
        ] {
            let e = parse_operator(text).unwrap();
            let rendered = crate::format::expression_plain(&e);
            let back = parse_operator(&rendered).unwrap();
            assert_eq!(back, e, "{text} -> {rendered}");
        }
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert_eq!(parse_rational("-1/2").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
