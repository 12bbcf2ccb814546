//! Canonical text output: plain (re-parseable), LaTeX, and a structured
//! JSON tree that round-trips exactly.
//!
//! Terms are always emitted in graded order (total degree descending, `q`
//! before `p`, larger exponents first), so output is deterministic and
//! suitable for golden files.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{Value, json};

use crate::algebra::{Expression, Letter, NormalForm, Word};
use crate::commutator::CommutatorSeriesTerm;
use crate::error::{Error, Result};
use crate::quantize::BasisIndex;
use crate::scalar::{ComplexRational, Rational, Scalar};

/// Output flavour selected by the command line.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OutputFormat {
    Plain,
    Latex,
    Structured,
}

/// One presentable monomial of a scalar: `(-1)^{negative} magnitude i^{imaginary} hbar^{power}`.
struct ScalarPart {
    negative: bool,
    magnitude: Rational,
    imaginary: bool,
    hbar_power: u32,
}

fn scalar_parts(s: &Scalar) -> Vec<ScalarPart> {
    let mut parts = Vec::new();
    for (&power, c) in s.iter() {
        if !c.re.is_zero() {
            parts.push(ScalarPart {
                negative: c.re.is_negative(),
                magnitude: c.re.abs(),
                imaginary: false,
                hbar_power: power,
            });
        }
        if !c.im.is_zero() {
            parts.push(ScalarPart {
                negative: c.im.is_negative(),
                magnitude: c.im.abs(),
                imaginary: true,
                hbar_power: power,
            });
        }
    }
    parts
}

fn rational_plain(r: &Rational) -> String {
    r.to_string()
}

fn rational_latex(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

/// Renders the unsigned body of one scalar part.  `followed_by_symbol`
/// suppresses a bare magnitude of one (e.g. `i hbar q` rather than
/// `1 i hbar q`); an empty string may come back when the part is exactly one
/// and something follows.
fn part_body(part: &ScalarPart, followed_by_symbol: bool, fmt: OutputFormat, joiner: &str) -> String {
    let mut pieces: Vec<String> = Vec::new();
    let suppress_one =
        part.magnitude.is_one() && (part.imaginary || part.hbar_power > 0 || followed_by_symbol);
    if !suppress_one {
        pieces.push(match fmt {
            OutputFormat::Latex => rational_latex(&part.magnitude),
            _ => rational_plain(&part.magnitude),
        });
    }
    if part.imaginary {
        pieces.push("i".to_string());
    }
    if part.hbar_power > 0 {
        pieces.push(match fmt {
            OutputFormat::Latex => {
                if part.hbar_power == 1 {
                    "\\hbar".to_string()
                } else {
                    format!("\\hbar^{{{}}}", part.hbar_power)
                }
            }
            _ => {
                if part.hbar_power == 1 {
                    "hbar".to_string()
                } else {
                    format!("hbar^{}", part.hbar_power)
                }
            }
        });
    }
    pieces.join(joiner)
}

/// Renders a whole scalar as a parenthesised sum, used when a coefficient
/// has more than one part.
fn scalar_sum(s: &Scalar, fmt: OutputFormat, joiner: &str) -> String {
    let parts = scalar_parts(s);
    let mut out = String::new();
    for (i, part) in parts.iter().enumerate() {
        let body = part_body(part, false, fmt, joiner);
        if i == 0 {
            if part.negative {
                out.push('-');
            }
        } else {
            out.push_str(if part.negative { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

fn word_plain(w: &Word) -> String {
    w.factors()
        .iter()
        .map(|&(letter, exp)| {
            if exp == 1 {
                letter.symbol().to_string()
            } else {
                format!("{}^{}", letter.symbol(), exp)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn word_latex(w: &Word) -> String {
    w.factors()
        .iter()
        .map(|&(letter, exp)| {
            if exp == 1 {
                format!("\\textbf{{{}}}", letter.symbol())
            } else {
                format!("\\textbf{{{}}}^{{{}}}", letter.symbol(), exp)
            }
        })
        .collect::<Vec<_>>()
        .join("")
}

/// Renders one `(scalar, symbol)` term; the symbol part is already a string
/// (a word, or a basis tag like `T[1,0]`).  Returns the sign to be merged
/// into the term joiner and the unsigned body.
fn render_term(scalar: &Scalar, symbol: &str, fmt: OutputFormat, joiner: &str) -> (bool, String) {
    let parts = scalar_parts(scalar);
    if parts.len() == 1 {
        let part = &parts[0];
        let coeff = part_body(part, !symbol.is_empty(), fmt, joiner);
        let body = match (coeff.is_empty(), symbol.is_empty()) {
            (true, true) => "1".to_string(),
            (true, false) => symbol.to_string(),
            (false, true) => coeff,
            (false, false) => format!("{coeff}{joiner}{symbol}"),
        };
        (part.negative, body)
    } else {
        let sum = format!("({})", scalar_sum(scalar, fmt, joiner));
        let body = if symbol.is_empty() {
            sum
        } else {
            format!("{sum}{joiner}{symbol}")
        };
        (false, body)
    }
}

fn join_terms(terms: Vec<(bool, String)>, fmt: OutputFormat) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let (plus, minus) = match fmt {
        OutputFormat::Latex => ("+", "-"),
        _ => (" + ", " - "),
    };
    let mut out = String::new();
    for (i, (negative, body)) in terms.iter().enumerate() {
        if i == 0 {
            if *negative {
                out.push('-');
            }
        } else {
            out.push_str(if *negative { minus } else { plus });
        }
        out.push_str(body);
    }
    out
}

/// Canonical plain text for an expression; the grammar accepted by the
/// parser reproduces the expression exactly.
pub fn expression_plain(e: &Expression) -> String {
    expression(e, OutputFormat::Plain)
}

pub fn expression(e: &Expression, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Structured => serde_json::to_string(&expression_value(e)).unwrap(),
        OutputFormat::Plain => join_terms(
            e.sorted_terms()
                .into_iter()
                .map(|(w, c)| render_term(c, &word_plain(w), fmt, " "))
                .collect(),
            fmt,
        ),
        OutputFormat::Latex => join_terms(
            e.sorted_terms()
                .into_iter()
                .map(|(w, c)| render_term(c, &word_latex(w), fmt, ""))
                .collect(),
            fmt,
        ),
    }
}

pub fn normal_form(nf: &NormalForm, fmt: OutputFormat) -> String {
    expression(&nf.as_expression(), fmt)
}

fn basis_symbol_plain(symbol: char, idx: BasisIndex) -> String {
    format!("{symbol}[{},{}]", idx.m, idx.n)
}

fn basis_symbol_latex(symbol: char, idx: BasisIndex) -> String {
    format!("\\textbf{{{symbol}}}_{{{},{}}}", idx.m, idx.n)
}

/// Renders a commutator series term list.
pub fn series(symbol: char, terms: &[CommutatorSeriesTerm], fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Structured => serde_json::to_string(&json!({
            "type": "series",
            "basis": symbol.to_string(),
            "terms": terms.iter().map(|t| json!({
                "coeff": scalar_value(&t.coefficient),
                "target": [t.target.m, t.target.n],
            })).collect::<Vec<_>>(),
        }))
        .unwrap(),
        OutputFormat::Plain => join_terms(
            terms
                .iter()
                .map(|t| render_term(&t.coefficient, &basis_symbol_plain(symbol, t.target), fmt, "*"))
                .collect(),
            fmt,
        ),
        OutputFormat::Latex => join_terms(
            terms
                .iter()
                .map(|t| render_term(&t.coefficient, &basis_symbol_latex(symbol, t.target), fmt, ""))
                .collect(),
            fmt,
        ),
    }
}

/// Renders a basis-coefficient map produced by `express_in_basis`, in
/// graded order (degree descending, then larger `m`).
pub fn basis_map(
    symbol: char,
    coeffs: &std::collections::BTreeMap<BasisIndex, Scalar>,
    fmt: OutputFormat,
) -> String {
    let mut entries: Vec<(&BasisIndex, &Scalar)> = coeffs.iter().collect();
    entries.sort_by_key(|(idx, _)| {
        (
            std::cmp::Reverse(idx.m.abs() + idx.n.abs()),
            std::cmp::Reverse(idx.m),
        )
    });
    match fmt {
        OutputFormat::Structured => serde_json::to_string(&json!({
            "type": "basis-combination",
            "basis": symbol.to_string(),
            "terms": entries.iter().map(|(idx, c)| json!({
                "coeff": scalar_value(c),
                "index": [idx.m, idx.n],
            })).collect::<Vec<_>>(),
        }))
        .unwrap(),
        OutputFormat::Plain => join_terms(
            entries
                .into_iter()
                .map(|(idx, c)| render_term(c, &basis_symbol_plain(symbol, *idx), fmt, "*"))
                .collect(),
            fmt,
        ),
        OutputFormat::Latex => join_terms(
            entries
                .into_iter()
                .map(|(idx, c)| render_term(c, &basis_symbol_latex(symbol, *idx), fmt, ""))
                .collect(),
            fmt,
        ),
    }
}

// ---------------------------------------------------------------------------
// structured tree serialization
// ---------------------------------------------------------------------------

fn rational_value(r: &Rational) -> Value {
    json!([r.numer().to_string(), r.denom().to_string()])
}

fn scalar_value(s: &Scalar) -> Value {
    Value::Array(
        s.iter()
            .map(|(&power, c)| {
                json!({
                    "hbar_power": power,
                    "re": rational_value(&c.re),
                    "im": rational_value(&c.im),
                })
            })
            .collect(),
    )
}

fn word_value(w: &Word) -> Value {
    Value::Array(
        w.factors()
            .iter()
            .map(|&(letter, exp)| json!([letter.symbol().to_string(), exp]))
            .collect(),
    )
}

/// The documented structured tree for an expression: a list of terms in
/// graded order, each `{coeff, word}` with exact rational entries encoded
/// as `[numerator, denominator]` decimal strings.
pub fn expression_value(e: &Expression) -> Value {
    json!({
        "type": "expression",
        "terms": e.sorted_terms().into_iter().map(|(w, c)| json!({
            "coeff": scalar_value(c),
            "word": word_value(w),
        })).collect::<Vec<_>>(),
    })
}

fn bad(message: &str) -> Error {
    Error::Parse {
        offset: 0,
        message: format!("structured input: {message}"),
    }
}

fn rational_from_value(v: &Value) -> Result<Rational> {
    let pair = v.as_array().ok_or_else(|| bad("rational must be a pair"))?;
    if pair.len() != 2 {
        return Err(bad("rational must have two entries"));
    }
    let parse_int = |x: &Value| -> Result<BigInt> {
        x.as_str()
            .ok_or_else(|| bad("rational entries are strings"))?
            .parse::<BigInt>()
            .map_err(|e| bad(&format!("bad integer: {e}")))
    };
    let numer = parse_int(&pair[0])?;
    let denom = parse_int(&pair[1])?;
    if denom.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

fn scalar_from_value(v: &Value) -> Result<Scalar> {
    let list = v.as_array().ok_or_else(|| bad("coeff must be a list"))?;
    let mut out = Scalar::zero();
    for entry in list {
        let power = entry
            .get("hbar_power")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing hbar_power"))? as u32;
        let re = rational_from_value(entry.get("re").ok_or_else(|| bad("missing re"))?)?;
        let im = rational_from_value(entry.get("im").ok_or_else(|| bad("missing im"))?)?;
        out += &Scalar::term(ComplexRational::new(re, im), power);
    }
    Ok(out)
}

fn word_from_value(v: &Value) -> Result<Word> {
    let list = v.as_array().ok_or_else(|| bad("word must be a list"))?;
    let mut factors = Vec::new();
    for entry in list {
        let pair = entry
            .as_array()
            .ok_or_else(|| bad("word factor must be a pair"))?;
        if pair.len() != 2 {
            return Err(bad("word factor must have two entries"));
        }
        let letter = match pair[0].as_str() {
            Some("q") => Letter::Q,
            Some("p") => Letter::P,
            _ => return Err(bad("letter must be \"q\" or \"p\"")),
        };
        let exp = pair[1]
            .as_i64()
            .ok_or_else(|| bad("exponent must be an integer"))?;
        factors.push((letter, exp));
    }
    Ok(Word::from_factors(factors))
}

/// Inverse of [`expression_value`]; the round trip is exact.
pub fn expression_from_value(v: &Value) -> Result<Expression> {
    if v.get("type").and_then(Value::as_str) != Some("expression") {
        return Err(bad("expected type \"expression\""));
    }
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing terms"))?;
    let mut out = Expression::zero();
    for term in terms {
        let coeff = scalar_from_value(term.get("coeff").ok_or_else(|| bad("missing coeff"))?)?;
        let word = word_from_value(term.get("word").ok_or_else(|| bad("missing word"))?)?;
        out = &out + &Expression::term(coeff, word);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn qp() -> Expression {
        &Expression::q() * &Expression::p()
    }

    #[test]
    fn plain_rendering() {
        let e = &qp() - &Expression::from_scalar(
            Scalar::i_hbar_pow(1).scale_rational(&rat(1, 2)),
        );
        assert_eq!(expression_plain(&e), "q p - 1/2 i hbar");
        assert_eq!(expression_plain(&Expression::zero()), "0");
        assert_eq!(expression_plain(&Expression::identity()), "1");
        assert_eq!(
            expression_plain(&Expression::generator_pow(Letter::P, -2)),
            "p^-2"
        );
    }

    #[test]
    fn multi_part_coefficients_are_parenthesised() {
        let c = Scalar::one() + Scalar::i_hbar_pow(1);
        let e = Expression::term(c, Word::generator(Letter::Q, 1));
        assert_eq!(expression_plain(&e), "(1 + i hbar) q");
    }

    #[test]
    fn latex_rendering() {
        let e = &qp().scale_rational(&rat(1, 2)) + &(&Expression::p() * &Expression::q()).scale_rational(&rat(1, 2));
        assert_eq!(
            expression(&e, OutputFormat::Latex),
            "\\frac{1}{2}\\textbf{q}\\textbf{p}+\\frac{1}{2}\\textbf{p}\\textbf{q}"
        );
    }

    #[test]
    fn structured_round_trip() {
        let e = &qp().scale(&Scalar::i_hbar_pow(3)) - &Expression::generator_pow(Letter::P, -2).scale_rational(&rat(7, 3));
        let v = expression_value(&e);
        let back = expression_from_value(&v).unwrap();
        assert_eq!(back, e);
    }
}
