//! The noncommutative algebra generated by `q` and `p` with `[q, p] = i hbar`.
//!
//! [`Expression`] is a free linear combination of [`Word`]s and performs no
//! reordering on its own; [`normal_order`] rewrites an expression into the
//! unique canonical form with all `q` powers on the left and all `p` powers
//! on the right, which is how operator equality is decided.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{ComplexRational, Rational, Scalar, factorial, falling};

/// One of the two generators.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Letter {
    Q,
    P,
}

impl Letter {
    pub fn symbol(self) -> char {
        match self {
            Letter::Q => 'q',
            Letter::P => 'p',
        }
    }
}

/// A product of generator powers with nonzero integer exponents.
///
/// Adjacent factors always carry distinct letters (runs are merged on
/// construction) and the empty factor list is the identity operator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Word {
    factors: Vec<(Letter, i64)>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// `letter^exponent`; exponent zero gives the identity.
    pub fn generator(letter: Letter, exponent: i64) -> Self {
        Word::from_factors([(letter, exponent)])
    }

    /// Builds a word from raw factors, merging adjacent runs of the same
    /// letter and dropping zero exponents (cascading as needed).
    pub fn from_factors<I: IntoIterator<Item = (Letter, i64)>>(factors: I) -> Self {
        let mut stack: Vec<(Letter, i64)> = Vec::new();
        for (letter, exp) in factors {
            if exp == 0 {
                continue;
            }
            match stack.last_mut() {
                Some((l, e)) if *l == letter => {
                    *e += exp;
                    if *e == 0 {
                        stack.pop();
                        // the neighbours may now touch; restart the merge
                        if stack.len() >= 2 {
                            let merged = std::mem::take(&mut stack);
                            stack = Word::from_factors(merged).factors;
                        }
                    }
                }
                _ => stack.push((letter, exp)),
            }
        }
        Word { factors: stack }
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        Word::from_factors(letters.into_iter().map(|l| (l, 1)))
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[(Letter, i64)] {
        &self.factors
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_factors(self.factors.iter().chain(other.factors.iter()).copied())
    }

    /// Factor-wise reversal (exponents kept); the word part of the adjoint.
    pub fn reversed(&self) -> Word {
        Word {
            factors: self.factors.iter().rev().copied().collect(),
        }
    }

    /// Total degree: the sum of absolute exponents.
    pub fn degree(&self) -> u64 {
        self.factors.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    /// Expands the word into unit letters.  Fails on any negative exponent.
    pub fn unit_letters(&self) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        for &(letter, exp) in &self.factors {
            if exp < 0 {
                return Err(Error::NegativeExponentUnsupported);
            }
            for _ in 0..exp {
                out.push(letter);
            }
        }
        Ok(out)
    }

    /// Presentation order: higher total degree first, then factor-by-factor
    /// with `q` before `p` and larger exponents first.
    pub fn canonical_cmp(&self, other: &Word) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| {
                for ((la, ea), (lb, eb)) in self.factors.iter().zip(&other.factors) {
                    let o = la.cmp(lb).then(eb.cmp(ea));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                self.factors.len().cmp(&other.factors.len())
            })
    }
}

/// A finite linear combination of words over [`Scalar`]; the general
/// operator.  No zero coefficient is ever stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Expression {
    terms: BTreeMap<Word, Scalar>,
}

impl Expression {
    pub fn zero() -> Self {
        Expression::default()
    }

    /// The identity operator.
    pub fn identity() -> Self {
        Expression::from_word(Word::identity())
    }

    pub fn from_word(word: Word) -> Self {
        Expression::term(Scalar::one(), word)
    }

    pub fn from_scalar(scalar: Scalar) -> Self {
        Expression::term(scalar, Word::identity())
    }

    pub fn term(scalar: Scalar, word: Word) -> Self {
        let mut e = Expression::default();
        e.insert_add(word, scalar);
        e
    }

    pub fn q() -> Self {
        Expression::from_word(Word::generator(Letter::Q, 1))
    }

    pub fn p() -> Self {
        Expression::from_word(Word::generator(Letter::P, 1))
    }

    pub fn generator_pow(letter: Letter, exponent: i64) -> Self {
        Expression::from_word(Word::generator(letter, exponent))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, word: &Word) -> Scalar {
        self.terms.get(word).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn scale(&self, scalar: &Scalar) -> Expression {
        let mut out = Expression::default();
        for (w, c) in &self.terms {
            out.insert_add(w.clone(), c * scalar);
        }
        out
    }

    pub fn scale_rational(&self, r: &Rational) -> Expression {
        self.scale(&Scalar::from_rational(r.clone()))
    }

    /// Formal adjoint: words reversed factor-wise, scalars conjugated.
    /// `q` and `p` are self-adjoint and `hbar` is real.
    pub fn adjoint(&self) -> Expression {
        let mut out = Expression::default();
        for (w, c) in &self.terms {
            out.insert_add(w.reversed(), c.conj());
        }
        out
    }

    /// Terms in presentation order (graded, see [`Word::canonical_cmp`]).
    pub fn sorted_terms(&self) -> Vec<(&Word, &Scalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| a.canonical_cmp(b));
        v
    }

    fn insert_add(&mut self, word: Word, scalar: Scalar) {
        if scalar.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(scalar);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &scalar;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }
}

impl Add for &Expression {
    type Output = Expression;
    fn add(self, rhs: &Expression) -> Expression {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.insert_add(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Expression {
    type Output = Expression;
    fn sub(self, rhs: &Expression) -> Expression {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.insert_add(w.clone(), -c);
        }
        out
    }
}

/// Free product: word-wise concatenation with coefficient products.
/// No reordering is performed.
impl Mul for &Expression {
    type Output = Expression;
    fn mul(self, rhs: &Expression) -> Expression {
        let mut out = Expression::default();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &rhs.terms {
                out.insert_add(w1.concat(w2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        let mut out = Expression::default();
        for (w, c) in &self.terms {
            out.insert_add(w.clone(), -c);
        }
        out
    }
}

impl Add for Expression {
    type Output = Expression;
    fn add(self, rhs: Expression) -> Expression {
        &self + &rhs
    }
}

impl Sub for Expression {
    type Output = Expression;
    fn sub(self, rhs: Expression) -> Expression {
        &self - &rhs
    }
}

impl Mul for Expression {
    type Output = Expression;
    fn mul(self, rhs: Expression) -> Expression {
        &self * &rhs
    }
}

impl Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        -&self
    }
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::format::expression_plain(self))
    }
}

/// Canonical form `sum c_{a,b} q^a p^b`, keyed by `(q_exp, p_exp)`.
///
/// No key ever has both exponents negative; such terms are rejected during
/// reordering.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct NormalForm {
    terms: BTreeMap<(i64, i64), Scalar>,
}

impl NormalForm {
    pub fn zero() -> Self {
        NormalForm::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, q_exp: i64, p_exp: i64) -> Scalar {
        self.terms
            .get(&(q_exp, p_exp))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Re-expands the canonical form as an ordinary expression.
    pub fn as_expression(&self) -> Expression {
        let mut out = Expression::default();
        for (&(a, b), c) in &self.terms {
            let word = Word::from_factors([(Letter::Q, a), (Letter::P, b)]);
            out.insert_add(word, c.clone());
        }
        out
    }

    /// Sets `hbar = 0` and reads the coefficients as a commutative
    /// polynomial.
    pub fn classical(&self) -> ClassicalPoly {
        let mut out = ClassicalPoly::zero();
        for (&(a, b), c) in &self.terms {
            out.insert_add((a, b), c.at_hbar_zero());
        }
        out
    }

    /// Largest key under the grading used for display and for basis
    /// elimination: total absolute degree first, larger `q` exponent on ties.
    pub fn leading_key(&self) -> Option<(i64, i64)> {
        self.terms
            .keys()
            .copied()
            .max_by_key(|&(a, b)| (a.unsigned_abs() + b.unsigned_abs(), a))
    }

    pub fn insert_add(&mut self, key: (i64, i64), scalar: impl Into<ScalarLike>) {
        let scalar = scalar.into().0;
        if scalar.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(scalar);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &scalar;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn sub(&self, rhs: &NormalForm) -> NormalForm {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert_add(*k, -c);
        }
        out
    }

    pub fn scale(&self, scalar: &Scalar) -> NormalForm {
        let mut out = NormalForm::default();
        for (k, c) in &self.terms {
            out.insert_add(*k, c * scalar);
        }
        out
    }
}

impl fmt::Debug for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::format::expression_plain(&self.as_expression()))
    }
}

/// Small adapter so `insert_add` accepts both owned scalars and references.
pub struct ScalarLike(Scalar);

impl From<Scalar> for ScalarLike {
    fn from(s: Scalar) -> Self {
        ScalarLike(s)
    }
}

impl From<&Scalar> for ScalarLike {
    fn from(s: &Scalar) -> Self {
        ScalarLike(s.clone())
    }
}

/// Commutative Laurent polynomial in `(q, p)` with complex-rational
/// coefficients; the classical side of the correspondence.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ClassicalPoly {
    terms: BTreeMap<(i64, i64), ComplexRational>,
}

impl ClassicalPoly {
    pub fn zero() -> Self {
        ClassicalPoly::default()
    }

    pub fn one() -> Self {
        ClassicalPoly::monomial(0, 0, ComplexRational::from(Rational::from_integer(1.into())))
    }

    /// `c * q^q_exp * p^p_exp`.
    pub fn monomial(q_exp: i64, p_exp: i64, c: ComplexRational) -> Self {
        let mut poly = ClassicalPoly::default();
        poly.insert_add((q_exp, p_exp), c);
        poly
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &ComplexRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, q_exp: i64, p_exp: i64) -> ComplexRational {
        self.terms
            .get(&(q_exp, p_exp))
            .cloned()
            .unwrap_or_else(ComplexRational::zero)
    }

    pub fn insert_add(&mut self, key: (i64, i64), c: ComplexRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Commutative partial derivative.
    pub fn partial(&self, letter: Letter) -> ClassicalPoly {
        let mut out = ClassicalPoly::zero();
        for (&(a, b), c) in &self.terms {
            let (exp, key) = match letter {
                Letter::Q => (a, (a - 1, b)),
                Letter::P => (b, (a, b - 1)),
            };
            if exp != 0 {
                out.insert_add(key, c.clone() * ComplexRational::from(crate::scalar::int(exp)));
            }
        }
        out
    }
}

impl Add for &ClassicalPoly {
    type Output = ClassicalPoly;
    fn add(self, rhs: &ClassicalPoly) -> ClassicalPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert_add(*k, c.clone());
        }
        out
    }
}

impl Neg for &ClassicalPoly {
    type Output = ClassicalPoly;
    fn neg(self) -> ClassicalPoly {
        let mut out = ClassicalPoly::default();
        for (k, c) in &self.terms {
            out.insert_add(*k, -c.clone());
        }
        out
    }
}

impl Mul for &ClassicalPoly {
    type Output = ClassicalPoly;
    fn mul(self, rhs: &ClassicalPoly) -> ClassicalPoly {
        let mut out = ClassicalPoly::default();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.insert_add((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }
}

impl fmt::Debug for ClassicalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&(a, b), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}+{}i) q^{a} p^{b}", c.re, c.im)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Single-step reordering `p^a q^b = sum_k k! C(a,k) C(b,k) (-i hbar)^k
/// q^{b-k} p^{a-k}`, valid whenever at least one of `a`, `b` is nonnegative
/// (the sum is then finite).
fn swap_p_q(a: i64, b: i64) -> Result<Vec<(Scalar, i64, i64)>> {
    if a < 0 && b < 0 {
        return Err(Error::MixedNegativePowers);
    }
    let k_max = if a >= 0 && b >= 0 {
        a.min(b)
    } else if a >= 0 {
        a
    } else {
        b
    } as u32;
    let mut out = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        // falling(a,k) * falling(b,k) / k! is an integer (falling/k! = binom)
        let c = falling(a, k) * falling(b, k) / factorial(k);
        if c.is_zero() {
            continue;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let coeff = Scalar::i_hbar_pow(k)
            .scale_rational(&Rational::from_integer(c * sign));
        out.push((coeff, b - i64::from(k), a - i64::from(k)));
    }
    Ok(out)
}

fn normal_order_word(word: &Word) -> Result<NormalForm> {
    let factors = word.factors();
    let swap_at = factors
        .windows(2)
        .position(|w| w[0].0 == Letter::P && w[1].0 == Letter::Q);
    match swap_at {
        None => {
            // already of shape q^a p^b (possibly with either part missing)
            let mut q_exp = 0;
            let mut p_exp = 0;
            for &(letter, exp) in factors {
                match letter {
                    Letter::Q => q_exp = exp,
                    Letter::P => p_exp = exp,
                }
            }
            if q_exp < 0 && p_exp < 0 {
                return Err(Error::MixedNegativePowers);
            }
            let mut nf = NormalForm::zero();
            nf.insert_add((q_exp, p_exp), Scalar::one());
            Ok(nf)
        }
        Some(i) => {
            let (a, b) = (factors[i].1, factors[i + 1].1);
            let mut nf = NormalForm::zero();
            for (coeff, q_exp, p_exp) in swap_p_q(a, b)? {
                let rewritten = Word::from_factors(
                    factors[..i]
                        .iter()
                        .copied()
                        .chain([(Letter::Q, q_exp), (Letter::P, p_exp)])
                        .chain(factors[i + 2..].iter().copied()),
                );
                let sub = normal_order_word(&rewritten)?;
                for (k, c) in sub.terms() {
                    nf.insert_add(*k, c * &coeff);
                }
            }
            Ok(nf)
        }
    }
}

/// Rewrites an expression into its unique normal form (`q` left, `p` right).
///
/// Fails with [`Error::MixedNegativePowers`] when some term would need
/// `q^a p^b` with both exponents negative.
pub fn normal_order(e: &Expression) -> Result<NormalForm> {
    let mut nf = NormalForm::zero();
    for (word, coeff) in e.terms() {
        let sub = normal_order_word(word)?;
        for (k, c) in sub.terms() {
            nf.insert_add(*k, c * coeff);
        }
    }
    Ok(nf)
}

/// Exact operator equality, decided by comparing normal forms.
pub fn equals(a: &Expression, b: &Expression) -> Result<bool> {
    Ok(normal_order(a)? == normal_order(b)?)
}

/// Sets `hbar = 0` in the normal form of `e` and reads the result as a
/// commutative polynomial.
pub fn classical_limit(e: &Expression) -> Result<ClassicalPoly> {
    Ok(normal_order(e)?.classical())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn q_pow(e: i64) -> Expression {
        Expression::generator_pow(Letter::Q, e)
    }

    fn p_pow(e: i64) -> Expression {
        Expression::generator_pow(Letter::P, e)
    }

    #[test]
    fn word_run_merging() {
        let w = Word::from_factors([(Letter::Q, 2), (Letter::Q, -1)]);
        assert_eq!(w, Word::generator(Letter::Q, 1));
        let w = Word::from_factors([(Letter::Q, 2), (Letter::P, 1), (Letter::P, -1), (Letter::Q, 3)]);
        assert_eq!(w, Word::generator(Letter::Q, 5));
        let w = Word::from_factors([(Letter::P, 1), (Letter::P, -1)]);
        assert!(w.is_identity());
    }

    #[test]
    fn multiply_examples() {
        let qp = &Expression::q() * &Expression::p();
        assert_eq!(
            qp,
            Expression::from_word(Word::from_factors([(Letter::Q, 1), (Letter::P, 1)]))
        );
        let merged = &q_pow(2) * &q_pow(-1);
        assert_eq!(merged, Expression::q());
        let w = &(&Expression::q() * &Expression::p()) * &Expression::q();
        assert_eq!(
            w,
            Expression::from_word(Word::from_factors([
                (Letter::Q, 1),
                (Letter::P, 1),
                (Letter::Q, 1)
            ]))
        );
    }

    #[test]
    fn commutation_relation() {
        // p q = q p - i hbar
        let pq = &Expression::p() * &Expression::q();
        let nf = normal_order(&pq).unwrap();
        assert_eq!(nf.coefficient(1, 1), Scalar::one());
        assert_eq!(nf.coefficient(0, 0), -Scalar::i_hbar_pow(1));
        assert_eq!(nf.num_terms(), 2);

        // equals: q p vs p q + i hbar
        let qp = &Expression::q() * &Expression::p();
        let rhs = &pq + &Expression::from_scalar(Scalar::i_hbar_pow(1));
        assert!(equals(&qp, &rhs).unwrap());
        assert!(!equals(&qp, &pq).unwrap());
    }

    #[test]
    fn reorder_p_qn() {
        // p q^n = q^n p - i hbar n q^{n-1}
        for n in 1..6i64 {
            let lhs = &Expression::p() * &q_pow(n);
            let rhs = &(&q_pow(n) * &Expression::p())
                - &q_pow(n - 1).scale(&Scalar::i_hbar_pow(1).scale_rational(&int(n)));
            assert!(equals(&lhs, &rhs).unwrap(), "n={n}");
        }
    }

    #[test]
    fn reorder_negative_power() {
        // p^{-1} q = q p^{-1} + i hbar p^{-2}
        let lhs = &p_pow(-1) * &Expression::q();
        let rhs = &(&Expression::q() * &p_pow(-1))
            + &p_pow(-2).scale(&Scalar::i_hbar_pow(1));
        assert!(equals(&lhs, &rhs).unwrap());

        // consistency: multiply both sides by p on the left and the right
        let left_check = &Expression::p() * &lhs;
        assert!(equals(&left_check, &Expression::q()).unwrap());
        let rhs_right = &rhs * &Expression::p();
        let lhs_right = &lhs * &Expression::p();
        assert!(equals(&lhs_right, &rhs_right).unwrap());
    }

    #[test]
    fn mixed_negative_powers_rejected() {
        let w = &p_pow(-1) * &q_pow(-1);
        assert_eq!(normal_order(&w), Err(Error::MixedNegativePowers));
        // already-ordered mixed negative keys are rejected as well
        let w = &q_pow(-1) * &p_pow(-1);
        assert_eq!(normal_order(&w), Err(Error::MixedNegativePowers));
        // but a cancelling run is fine
        let w = &(&q_pow(-1) * &p_pow(-1)) * &p_pow(1);
        assert!(normal_order(&w).is_ok());
    }

    #[test]
    fn adjoint_examples() {
        // (i hbar q p)^dagger = -i hbar p q
        let e = (&Expression::q() * &Expression::p()).scale(&Scalar::i_hbar_pow(1));
        let expected = (&Expression::p() * &Expression::q())
            .scale(&-Scalar::i_hbar_pow(1));
        assert_eq!(e.adjoint(), expected);

        // (p^2 q^3)^dagger = q^3 p^2
        let e = &p_pow(2) * &q_pow(3);
        assert_eq!(e.adjoint(), &q_pow(3) * &p_pow(2));

        // T_{1,1} = (q p + p q)/2 is self-adjoint
        let t11 = (&(&Expression::q() * &Expression::p()) + &(&Expression::p() * &Expression::q()))
            .scale_rational(&crate::scalar::rat(1, 2));
        assert_eq!(t11.adjoint(), t11);
    }

    #[test]
    fn normal_order_is_idempotent() {
        let e = &(&p_pow(2) * &q_pow(3)) + &(&q_pow(-2) * &p_pow(1));
        let nf = normal_order(&e).unwrap();
        let nf2 = normal_order(&nf.as_expression()).unwrap();
        assert_eq!(nf, nf2);
    }

    #[test]
    fn classical_limit_examples() {
        // i hbar q -> 0
        let e = Expression::q().scale(&Scalar::i_hbar_pow(1));
        assert!(classical_limit(&e).unwrap().is_zero());

        // q p - i hbar / 2 -> q p
        let e = &(&Expression::q() * &Expression::p())
            - &Expression::from_scalar(Scalar::i_hbar_pow(1).scale_rational(&crate::scalar::rat(1, 2)));
        let cl = classical_limit(&e).unwrap();
        assert_eq!(cl, ClassicalPoly::monomial(1, 1, ComplexRational::from(int(1))));
    }

    /// Letter-level reordering oracle: applies the unit relation
    /// `p q = q p - i hbar` one adjacent pair at a time, independent of the
    /// closed-form swap used by `normal_order`.
    fn letter_oracle(letters: &[Letter], coeff: &Scalar, acc: &mut NormalForm) {
        match letters.windows(2).position(|w| w == [Letter::P, Letter::Q]) {
            None => {
                let q_exp = letters.iter().filter(|&&l| l == Letter::Q).count() as i64;
                let p_exp = letters.len() as i64 - q_exp;
                acc.insert_add((q_exp, p_exp), coeff.clone());
            }
            Some(i) => {
                let mut swapped = letters.to_vec();
                swapped.swap(i, i + 1);
                letter_oracle(&swapped, coeff, acc);
                let mut dropped = letters.to_vec();
                dropped.drain(i..i + 2);
                letter_oracle(&dropped, &(coeff * &-Scalar::i_hbar_pow(1)), acc);
            }
        }
    }

    #[test]
    fn brute_force_letter_oracle_p2q2() {
        use Letter::{P, Q};
        let mut expected = NormalForm::zero();
        letter_oracle(&[P, P, Q, Q], &Scalar::one(), &mut expected);
        letter_oracle(&[Q, Q, P, P], &-Scalar::one(), &mut expected);

        // the oracle yields -4 i hbar q p + 2 (i hbar)^2
        let mut by_hand = NormalForm::zero();
        by_hand.insert_add((1, 1), Scalar::i_hbar_pow(1).scale_rational(&int(-4)));
        by_hand.insert_add((0, 0), Scalar::i_hbar_pow(2).scale_rational(&int(2)));
        assert_eq!(expected, by_hand);

        let p2q2 = &p_pow(2) * &q_pow(2);
        let q2p2 = &q_pow(2) * &p_pow(2);
        let nf = normal_order(&(&p2q2 - &q2p2)).unwrap();
        assert_eq!(nf, expected);
    }

    #[test]
    fn closed_form_swap_matches_letter_oracle() {
        use Letter::{P, Q};
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            rng_state
        };
        for _ in 0..30 {
            let len = (next() % 7) as usize;
            let letters: Vec<Letter> = (0..len)
                .map(|_| if next() % 2 == 0 { Q } else { P })
                .collect();
            let mut expected = NormalForm::zero();
            letter_oracle(&letters, &Scalar::one(), &mut expected);
            let got = normal_order(&Expression::from_word(Word::from_letters(
                letters.iter().copied(),
            )))
            .unwrap();
            assert_eq!(got, expected, "letters {letters:?}");
        }
    }
}
