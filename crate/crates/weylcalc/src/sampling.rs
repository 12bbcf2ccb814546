//! Deterministic pseudo-random inputs for the identity sweeps.
//!
//! Everything is seeded, so the verification suite and the tests are
//! reproducible run to run.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::algebra::{Expression, Letter, Word};
use crate::scalar::{ComplexRational, Rational, Scalar, int, rat};

pub fn seeded_rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Exponent policy for random words.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NegativePolicy {
    /// All exponents strictly positive.
    AllPositive,
    /// Negative exponents allowed on at most one letter per word, which
    /// keeps every word normal-orderable.
    SingleLetter,
}

#[derive(Clone, Copy, Debug)]
pub struct ExpressionProfile {
    pub max_terms: usize,
    pub max_factors: usize,
    pub max_exponent: i64,
    pub negatives: NegativePolicy,
}

impl Default for ExpressionProfile {
    fn default() -> Self {
        ExpressionProfile {
            max_terms: 4,
            max_factors: 4,
            max_exponent: 4,
            negatives: NegativePolicy::SingleLetter,
        }
    }
}

pub fn random_rational(rng: &mut StdRng) -> Rational {
    let numer = rng.random_range(-6..=6i64);
    let denom = rng.random_range(1..=4i64);
    rat(numer, denom)
}

fn random_nonzero_rational(rng: &mut StdRng) -> Rational {
    loop {
        let r = random_rational(rng);
        if r != int(0) {
            return r;
        }
    }
}

pub fn random_scalar(rng: &mut StdRng) -> Scalar {
    let re = random_rational(rng);
    let im = random_rational(rng);
    let power = rng.random_range(0..=2u32);
    let c = ComplexRational::new(re, im);
    if c == ComplexRational::new(int(0), int(0)) {
        Scalar::one()
    } else {
        Scalar::term(c, power)
    }
}

pub fn random_word(rng: &mut StdRng, profile: &ExpressionProfile) -> Word {
    let n_factors = rng.random_range(0..=profile.max_factors);
    let negative_letter = match profile.negatives {
        NegativePolicy::AllPositive => None,
        NegativePolicy::SingleLetter => {
            if rng.random_bool(0.5) {
                Some(if rng.random_bool(0.5) { Letter::Q } else { Letter::P })
            } else {
                None
            }
        }
    };
    let mut factors = Vec::with_capacity(n_factors);
    for _ in 0..n_factors {
        let letter = if rng.random_bool(0.5) { Letter::Q } else { Letter::P };
        let magnitude = rng.random_range(1..=profile.max_exponent);
        let exp = if negative_letter == Some(letter) && rng.random_bool(0.5) {
            -magnitude
        } else {
            magnitude
        };
        factors.push((letter, exp));
    }
    Word::from_factors(factors)
}

/// A random normal-orderable expression under the given profile.
pub fn random_expression(rng: &mut StdRng, profile: &ExpressionProfile) -> Expression {
    let n_terms = rng.random_range(1..=profile.max_terms);
    let mut out = Expression::zero();
    for _ in 0..n_terms {
        out = &out + &Expression::term(random_scalar(rng), random_word(rng, profile));
    }
    out
}

/// Random rational weights of the requested length summing to one.
pub fn random_normalized_weights(rng: &mut StdRng, len: usize) -> Vec<Rational> {
    assert!(len >= 1);
    let mut weights: Vec<Rational> = (0..len - 1)
        .map(|_| random_nonzero_rational(rng))
        .collect();
    let sum: Rational = weights.iter().cloned().sum();
    weights.push(int(1) - sum);
    weights
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::normal_order;

    #[test]
    fn random_expressions_are_normal_orderable() {
        let mut rng = seeded_rng(7);
        let profile = ExpressionProfile::default();
        for _ in 0..200 {
            let e = random_expression(&mut rng, &profile);
            assert!(normal_order(&e).is_ok());
        }
    }

    #[test]
    fn weights_sum_to_one() {
        let mut rng = seeded_rng(9);
        for len in 1..=6 {
            let w = random_normalized_weights(&mut rng, len);
            assert_eq!(w.len(), len);
            assert_eq!(w.iter().cloned().sum::<Rational>(), int(1));
        }
    }
}
