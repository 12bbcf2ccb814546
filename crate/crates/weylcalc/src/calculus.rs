//! Differentiation of operators with respect to the generators.
//!
//! Four rules are provided.  The cyclic (first-type) derivative and its two
//! weighted modifications act on words of unit letters and are only defined
//! for positive exponents; the second-type derivative is the formal limit
//! rule, acts factor-wise and accepts any integer exponents.  First-type
//! outputs are returned exactly as the cyclic rule produces them, without
//! normal ordering.

use crate::algebra::{Expression, Letter, Word};
use crate::error::Result;
use crate::scalar::{Rational, binomial, int, rat};

/// Which differentiation rule to apply.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DerivativeKind {
    /// Cyclic rule: each occurrence contributes `suffix * prefix`.
    FirstType,
    /// Cyclic rule reweighted by `count/2^{count-1} * C(count-1, l-1)`.
    FirstTypeWeylMod,
    /// Cyclic rule keeping the first and last occurrence, weight `count/2`.
    FirstTypeSymMod,
    /// Formal limit rule (ordinary partial differentiation shape).
    SecondType,
}

impl DerivativeKind {
    pub fn apply(self, e: &Expression, wrt: Letter) -> Result<Expression> {
        match self {
            DerivativeKind::FirstType => dq1(e, wrt),
            DerivativeKind::FirstTypeWeylMod => dq1_weyl_mod(e, wrt),
            DerivativeKind::FirstTypeSymMod => dq1_sym_mod(e, wrt),
            DerivativeKind::SecondType => Ok(dq2(e, wrt)),
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            DerivativeKind::FirstType => "first",
            DerivativeKind::FirstTypeWeylMod => "weyl-mod",
            DerivativeKind::FirstTypeSymMod => "sym-mod",
            DerivativeKind::SecondType => "second",
        }
    }
}

/// Shared engine for the cyclic family: `weight(count, l)` receives the
/// total number of `wrt` letters in the word and the 1-based position of
/// the chosen occurrence among them.
fn dq1_weighted(
    e: &Expression,
    wrt: Letter,
    weight: impl Fn(usize, usize) -> Rational,
) -> Result<Expression> {
    let mut out = Expression::zero();
    for (word, coeff) in e.terms() {
        let letters = word.unit_letters()?;
        let count = letters.iter().filter(|&&l| l == wrt).count();
        let mut occurrence = 0usize;
        for r in 0..letters.len() {
            if letters[r] != wrt {
                continue;
            }
            occurrence += 1;
            let w = weight(count, occurrence);
            if w == int(0) {
                continue;
            }
            let rotated = Word::from_letters(
                letters[r + 1..].iter().chain(letters[..r].iter()).copied(),
            );
            out = &out + &Expression::term(coeff.scale_rational(&w), rotated);
        }
    }
    Ok(out)
}

/// Differential quotient of first type: for each occurrence of the chosen
/// generator, write the factors after it followed by the factors before it.
pub fn dq1(e: &Expression, wrt: Letter) -> Result<Expression> {
    dq1_weighted(e, wrt, |_, _| int(1))
}

/// First-type derivative reweighted toward the Weyl basis: the occurrence
/// at position `l` of `count` receives `count/2^{count-1} * C(count-1, l-1)`.
pub fn dq1_weyl_mod(e: &Expression, wrt: Letter) -> Result<Expression> {
    dq1_weighted(e, wrt, |count, l| {
        let c = count as i64;
        Rational::from_integer(binomial(c - 1, l as u32 - 1))
            * Rational::new(c.into(), num_bigint::BigInt::from(2).pow(count as u32 - 1))
    })
}

/// First-type derivative reweighted toward the symmetric basis: only the
/// first and last occurrence contribute, with weight `count/2` each (a
/// single occurrence is both first and last and so has weight one).
pub fn dq1_sym_mod(e: &Expression, wrt: Letter) -> Result<Expression> {
    dq1_weighted(e, wrt, |count, l| {
        let mut deltas = 0;
        if l == 1 {
            deltas += 1;
        }
        if l == count {
            deltas += 1;
        }
        rat(count as i64, 2) * int(deltas)
    })
}

/// Differential quotient of second type, as the formal product rule: each
/// factor `x^k` with `x` the chosen generator contributes
/// `k * prefix x^{k-1} suffix`.  Equal to the limit definition term by term,
/// for any integer exponents.
pub fn dq2(e: &Expression, wrt: Letter) -> Expression {
    let mut out = Expression::zero();
    for (word, coeff) in e.terms() {
        let factors = word.factors();
        for i in 0..factors.len() {
            let (letter, exp) = factors[i];
            if letter != wrt {
                continue;
            }
            let new_word = Word::from_factors(
                factors[..i]
                    .iter()
                    .copied()
                    .chain([(letter, exp - 1)])
                    .chain(factors[i + 1..].iter().copied()),
            );
            out = &out + &Expression::term(coeff.scale_rational(&int(exp)), new_word);
        }
    }
    out
}

/// Iterated second-type derivative; `order` zero returns the input.
pub fn diff_n(e: &Expression, wrt: Letter, order: u32) -> Expression {
    let mut out = e.clone();
    for _ in 0..order {
        out = dq2(&out, wrt);
    }
    out
}

/// Mixed second-type partial `d^{s+t} e / dp^s dq^t`.  Both application
/// orders are computed and checked against each other before returning.
pub fn mixed_partial(e: &Expression, s: u32, t: u32) -> Expression {
    let p_first = diff_n(&diff_n(e, Letter::P, s), Letter::Q, t);
    let q_first = diff_n(&diff_n(e, Letter::Q, t), Letter::P, s);
    assert_eq!(
        p_first, q_first,
        "mixed partials must agree independent of order"
    );
    p_first
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::equals;
    use crate::error::Error;
    use crate::quantize::{BasisIndex, OrderingRule, basis_operator};
    use crate::scalar::Scalar;

    /// The worked word `p p q q q p`.
    fn sample_word() -> Expression {
        Expression::from_word(Word::from_letters([
            Letter::P,
            Letter::P,
            Letter::Q,
            Letter::Q,
            Letter::Q,
            Letter::P,
        ]))
    }

    fn word_of(letters: &[Letter]) -> Word {
        Word::from_letters(letters.iter().copied())
    }

    #[test]
    fn dq1_of_sample_wrt_p() {
        use Letter::{P, Q};
        let d = dq1(&sample_word(), P).unwrap();
        let expected = &(&Expression::from_word(word_of(&[P, Q, Q, Q, P]))
            + &Expression::from_word(word_of(&[Q, Q, Q, P, P])))
            + &Expression::from_word(word_of(&[P, P, Q, Q, Q]));
        assert_eq!(d, expected);
    }

    #[test]
    fn dq1_of_sample_wrt_q() {
        use Letter::{P, Q};
        let d = dq1(&sample_word(), Q).unwrap();
        let expected = &(&Expression::from_word(word_of(&[Q, Q, P, P, P]))
            + &Expression::from_word(word_of(&[Q, P, P, P, Q])))
            + &Expression::from_word(word_of(&[P, P, P, Q, Q]));
        assert_eq!(d, expected);
    }

    #[test]
    fn dq1_single_letter() {
        let d = dq1(&Expression::p(), Letter::P).unwrap();
        assert_eq!(d, Expression::identity());
    }

    #[test]
    fn dq1_rejects_negative_exponents() {
        let e = Expression::generator_pow(Letter::P, -2);
        assert_eq!(dq1(&e, Letter::P), Err(Error::NegativeExponentUnsupported));
    }

    #[test]
    fn dq1_is_cyclically_invariant() {
        use Letter::{P, Q};
        let letters = [P, Q, Q, P, P, Q, P];
        for rot in 0..letters.len() {
            let rotated: Vec<Letter> = letters[rot..]
                .iter()
                .chain(letters[..rot].iter())
                .copied()
                .collect();
            for wrt in [Q, P] {
                let a = dq1(&Expression::from_word(word_of(&letters)), wrt).unwrap();
                let b = dq1(&Expression::from_word(word_of(&rotated)), wrt).unwrap();
                assert_eq!(a, b, "rotation {rot}");
            }
        }
    }

    #[test]
    fn dq2_of_sample() {
        use Letter::{P, Q};
        // 2 p q^3 p + p^2 q^3 and 3 p^2 q^2 p
        let dp = dq2(&sample_word(), P);
        let expected = &Expression::term(
            Scalar::from_int(2),
            Word::from_factors([(P, 1), (Q, 3), (P, 1)]),
        ) + &Expression::from_word(Word::from_factors([(P, 2), (Q, 3)]));
        assert_eq!(dp, expected);

        let dq = dq2(&sample_word(), Q);
        let expected = Expression::term(
            Scalar::from_int(3),
            Word::from_factors([(P, 2), (Q, 2), (P, 1)]),
        );
        assert_eq!(dq, expected);
    }

    #[test]
    fn dq2_negative_power() {
        // d(q p^{-2})/dp = -2 q p^{-3}
        let e = &Expression::q() * &Expression::generator_pow(Letter::P, -2);
        let d = dq2(&e, Letter::P);
        let expected = Expression::term(
            Scalar::from_int(-2),
            Word::from_factors([(Letter::Q, 1), (Letter::P, -3)]),
        );
        assert_eq!(d, expected);
    }

    #[test]
    fn weyl_mod_on_basis_operators() {
        // T_{2,1} -> 2 T_{1,1} and S_{2,1} -> 2 T_{1,1}, both with respect to p
        let t21 = basis_operator(&OrderingRule::Weyl, BasisIndex::new(2, 1).unwrap()).unwrap();
        let t11 = basis_operator(&OrderingRule::Weyl, BasisIndex::new(1, 1).unwrap()).unwrap();
        let d = dq1_weyl_mod(&t21, Letter::P).unwrap();
        assert!(equals(&d, &t11.scale_rational(&int(2))).unwrap());

        let s21 = basis_operator(
            &OrderingRule::SimplestSymmetric,
            BasisIndex::new(2, 1).unwrap(),
        )
        .unwrap();
        let d = dq1_weyl_mod(&s21, Letter::P).unwrap();
        assert!(equals(&d, &t11.scale_rational(&int(2))).unwrap());
    }

    #[test]
    fn weyl_mod_single_occurrence() {
        let d = dq1_weyl_mod(&Expression::p(), Letter::P).unwrap();
        assert_eq!(d, Expression::identity());
    }

    #[test]
    fn sym_mod_on_basis_operators() {
        // S_{2,1} -> 2 S_{1,1} wrt p; S_{1,2} -> 2 S_{1,1} wrt q
        let s = |m, n| {
            basis_operator(
                &OrderingRule::SimplestSymmetric,
                BasisIndex::new(m, n).unwrap(),
            )
            .unwrap()
        };
        let d = dq1_sym_mod(&s(2, 1), Letter::P).unwrap();
        assert!(equals(&d, &s(1, 1).scale_rational(&int(2))).unwrap());
        let d = dq1_sym_mod(&s(1, 2), Letter::Q).unwrap();
        assert!(equals(&d, &s(1, 1).scale_rational(&int(2))).unwrap());
    }

    #[test]
    fn sym_mod_single_occurrence() {
        // d(q p)/dp = q under the symmetric modification
        let e = &Expression::q() * &Expression::p();
        let d = dq1_sym_mod(&e, Letter::P).unwrap();
        assert_eq!(d, Expression::q());
    }

    #[test]
    fn diff_n_closed_forms() {
        for rule in [
            OrderingRule::Weyl,
            OrderingRule::SimplestSymmetric,
            OrderingRule::BornJordan,
        ] {
            // d^2 A_{3,2} / dp^2 = 6 A_{1,2}
            let a32 = basis_operator(&rule, BasisIndex::new(3, 2).unwrap()).unwrap();
            let a12 = basis_operator(&rule, BasisIndex::new(1, 2).unwrap()).unwrap();
            let d = diff_n(&a32, Letter::P, 2);
            assert!(equals(&d, &a12.scale_rational(&int(6))).unwrap(), "{rule:?}");

            // d^2 A_{-1,2} / dp^2 = 2 A_{-3,2}
            let am12 = basis_operator(&rule, BasisIndex::new(-1, 2).unwrap()).unwrap();
            let am32 = basis_operator(&rule, BasisIndex::new(-3, 2).unwrap()).unwrap();
            let d = diff_n(&am12, Letter::P, 2);
            assert!(equals(&d, &am32.scale_rational(&int(2))).unwrap(), "{rule:?}");
        }
    }

    #[test]
    fn diff_n_order_one_is_dq2() {
        let e = &sample_word() + &Expression::generator_pow(Letter::Q, -3);
        assert_eq!(diff_n(&e, Letter::Q, 1), dq2(&e, Letter::Q));
    }

    #[test]
    fn mixed_partial_examples() {
        let rule = OrderingRule::BornJordan;
        let a22 = basis_operator(&rule, BasisIndex::new(2, 2).unwrap()).unwrap();
        let a11 = basis_operator(&rule, BasisIndex::new(1, 1).unwrap()).unwrap();
        let d = mixed_partial(&a22, 1, 1);
        assert!(equals(&d, &a11.scale_rational(&int(4))).unwrap());

        let a32 = basis_operator(&rule, BasisIndex::new(3, 2).unwrap()).unwrap();
        let d = mixed_partial(&a32, 2, 1);
        assert!(equals(&d, &a11.scale_rational(&int(12))).unwrap());

        let e = sample_word();
        assert_eq!(mixed_partial(&e, 0, 0), e);
    }

    #[test]
    fn dq2_is_linear() {
        let a = sample_word();
        let b = &Expression::generator_pow(Letter::Q, 2) * &Expression::generator_pow(Letter::P, -1);
        let alpha = Scalar::i_hbar_pow(1).scale_rational(&rat(3, 2));
        let beta = Scalar::from_int(-2);
        let combo = &a.scale(&alpha) + &b.scale(&beta);
        let lhs = dq2(&combo, Letter::P);
        let rhs = &dq2(&a, Letter::P).scale(&alpha) + &dq2(&b, Letter::P).scale(&beta);
        assert_eq!(lhs, rhs);
    }
}
