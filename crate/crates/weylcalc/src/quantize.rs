//! Ordering rules and the basis operators they generate.
//!
//! A rule assigns sandwich weights to the quantization of a monomial
//! `p^m q^n`: either `sum_j a_j q^j p^m q^{n-j}` (weights on the `q` side)
//! or `sum_j b_j p^j q^n p^{m-j}` (weights on the `p` side).  The built-in
//! families are Weyl (binomial weights), the simplest symmetric rule (half
//! on each extreme ordering) and Born-Jordan (uniform weights).  At most one
//! of the two indices may be negative.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::{ClassicalPoly, Expression, Letter, NormalForm, Word, equals, normal_order};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, binomial, rat};

/// Which side of the sandwich a custom weight family decorates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Orientation {
    /// Weights `a_0..a_n` on `q^j (p-part) q^{n-j}`.
    QSide,
    /// Weights `b_0..b_m` on `p^j (q-part) p^{m-j}`.
    PSide,
}

/// An operator-ordering rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OrderingRule {
    Weyl,
    SimplestSymmetric,
    BornJordan,
    Custom {
        orientation: Orientation,
        weights: Vec<Rational>,
    },
}

impl OrderingRule {
    /// Builds a custom rule, validating that the weights sum to one.
    pub fn custom(orientation: Orientation, weights: Vec<Rational>) -> Result<Self> {
        let sum: Rational = weights.iter().cloned().sum();
        if weights.is_empty() || !sum.is_one() {
            return Err(Error::WeightsNotNormalized {
                sum: sum.to_string(),
            });
        }
        Ok(OrderingRule::Custom {
            orientation,
            weights,
        })
    }

    /// Single-letter tag used when printing basis coefficients.
    pub fn basis_symbol(&self) -> char {
        match self {
            OrderingRule::Weyl => 'T',
            OrderingRule::SimplestSymmetric => 'S',
            OrderingRule::BornJordan => 'B',
            OrderingRule::Custom { .. } => 'A',
        }
    }

    pub fn describe(&self) -> String {
        match self {
            OrderingRule::Weyl => "weyl".into(),
            OrderingRule::SimplestSymmetric => "simplest-symmetric".into(),
            OrderingRule::BornJordan => "born-jordan".into(),
            OrderingRule::Custom {
                orientation,
                weights,
            } => {
                let side = match orientation {
                    Orientation::QSide => 'q',
                    Orientation::PSide => 'p',
                };
                let ws: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
                format!("custom[{side}: {}]", ws.join(" "))
            }
        }
    }

    /// The `q`-side weight family `a_0..a_n` for a built-in rule, `None`
    /// for custom rules (whose weights are fixed at construction).
    pub fn q_side_weights(&self, n: u32) -> Option<Vec<Rational>> {
        let n_i = i64::from(n);
        match self {
            OrderingRule::Weyl => {
                let denom = Rational::from_integer(num_bigint::BigInt::from(2).pow(n));
                Some(
                    (0..=n)
                        .map(|j| Rational::from_integer(binomial(n_i, j)) / denom.clone())
                        .collect(),
                )
            }
            OrderingRule::SimplestSymmetric => Some(
                (0..=n)
                    .map(|j| {
                        let mut w = Rational::zero();
                        if j == 0 {
                            w += rat(1, 2);
                        }
                        if j == n {
                            w += rat(1, 2);
                        }
                        w
                    })
                    .collect(),
            ),
            OrderingRule::BornJordan => Some(vec![rat(1, n_i + 1); n as usize + 1]),
            OrderingRule::Custom { .. } => None,
        }
    }

    /// The `p`-side weight family `b_0..b_m` for a built-in rule; identical
    /// shape to the `q`-side family.
    pub fn p_side_weights(&self, m: u32) -> Option<Vec<Rational>> {
        self.q_side_weights(m)
    }
}

/// The three built-in rules, for operations that are only stated for them.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BuiltinRule {
    Weyl,
    SimplestSymmetric,
    BornJordan,
}

impl BuiltinRule {
    pub const ALL: [BuiltinRule; 3] = [
        BuiltinRule::Weyl,
        BuiltinRule::SimplestSymmetric,
        BuiltinRule::BornJordan,
    ];

    pub fn rule(self) -> OrderingRule {
        match self {
            BuiltinRule::Weyl => OrderingRule::Weyl,
            BuiltinRule::SimplestSymmetric => OrderingRule::SimplestSymmetric,
            BuiltinRule::BornJordan => OrderingRule::BornJordan,
        }
    }

    pub fn basis_symbol(self) -> char {
        self.rule().basis_symbol()
    }
}

/// Index pair of a basis operator; at most one entry may be negative.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BasisIndex {
    /// Power of `p` in the classical monomial.
    pub m: i64,
    /// Power of `q` in the classical monomial.
    pub n: i64,
}

impl BasisIndex {
    pub fn new(m: i64, n: i64) -> Result<Self> {
        if m < 0 && n < 0 {
            return Err(Error::BothIndicesNegative { m, n });
        }
        Ok(BasisIndex { m, n })
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.m, self.n)
    }
}

fn q_sandwich(weights: &[Rational], m: i64, n: u32) -> Expression {
    let mut out = Expression::zero();
    for (j, w) in weights.iter().enumerate() {
        let word = Word::from_factors([
            (Letter::Q, j as i64),
            (Letter::P, m),
            (Letter::Q, i64::from(n) - j as i64),
        ]);
        out = &out + &Expression::term(Scalar::from_rational(w.clone()), word);
    }
    out
}

fn p_sandwich(weights: &[Rational], m: u32, n: i64) -> Expression {
    let mut out = Expression::zero();
    for (j, w) in weights.iter().enumerate() {
        let word = Word::from_factors([
            (Letter::P, j as i64),
            (Letter::Q, n),
            (Letter::P, i64::from(m) - j as i64),
        ]);
        out = &out + &Expression::term(Scalar::from_rational(w.clone()), word);
    }
    out
}

/// The quantum image of `p^m q^n` under the given rule.
///
/// Built-in rules use the `q`-side sandwich when `n >= 0` and fall back to
/// the `p`-side sandwich when `n < 0`; for them the two forms are equal as
/// operators whenever both exist.  Custom rules carry exactly one
/// orientation and require the matching index to equal their weight count
/// minus one.
pub fn basis_operator(rule: &OrderingRule, idx: BasisIndex) -> Result<Expression> {
    if idx.m < 0 && idx.n < 0 {
        return Err(Error::BothIndicesNegative { m: idx.m, n: idx.n });
    }
    match rule {
        OrderingRule::Custom {
            orientation: Orientation::QSide,
            weights,
        } => {
            if idx.n < 0 || weights.len() != idx.n as usize + 1 {
                return Err(Error::WeightCountMismatch {
                    expected: weights.len(),
                    found: idx.n.max(-1) as usize + 1,
                });
            }
            Ok(q_sandwich(weights, idx.m, idx.n as u32))
        }
        OrderingRule::Custom {
            orientation: Orientation::PSide,
            weights,
        } => {
            if idx.m < 0 || weights.len() != idx.m as usize + 1 {
                return Err(Error::WeightCountMismatch {
                    expected: weights.len(),
                    found: idx.m.max(-1) as usize + 1,
                });
            }
            Ok(p_sandwich(weights, idx.m as u32, idx.n))
        }
        builtin => {
            if idx.n >= 0 {
                let weights = builtin.q_side_weights(idx.n as u32).unwrap();
                Ok(q_sandwich(&weights, idx.m, idx.n as u32))
            } else {
                let weights = builtin.p_side_weights(idx.m as u32).unwrap();
                Ok(p_sandwich(&weights, idx.m as u32, idx.n))
            }
        }
    }
}

/// Builds the sandwich of one explicit orientation for a built-in rule.
/// Both orientations are equal as operators wherever both exist.
///
/// Panics if the orientation's own index is negative (`n` for the `q` side,
/// `m` for the `p` side).
pub fn builtin_sandwich(
    rule: BuiltinRule,
    idx: BasisIndex,
    orientation: Orientation,
) -> Expression {
    match orientation {
        Orientation::QSide => {
            assert!(idx.n >= 0, "q-side sandwich needs n >= 0");
            let weights = rule.rule().q_side_weights(idx.n as u32).unwrap();
            q_sandwich(&weights, idx.m, idx.n as u32)
        }
        Orientation::PSide => {
            assert!(idx.m >= 0, "p-side sandwich needs m >= 0");
            let weights = rule.rule().p_side_weights(idx.m as u32).unwrap();
            p_sandwich(&weights, idx.m as u32, idx.n)
        }
    }
}

/// Linear extension of [`basis_operator`] over the monomials of a classical
/// polynomial.
pub fn quantize(f: &ClassicalPoly, rule: &OrderingRule) -> Result<Expression> {
    let mut out = Expression::zero();
    for (&(q_exp, p_exp), c) in f.terms() {
        let idx = BasisIndex::new(p_exp, q_exp)?;
        let image = basis_operator(rule, idx)?;
        out = &out + &image.scale(&Scalar::from_complex(c.clone()));
    }
    Ok(out)
}

/// Re-expresses a normal form as a linear combination of basis operators of
/// the given rule, by triangular elimination on descending total degree
/// (ties broken by larger `q` exponent).  The result is verified by
/// re-expansion; a nonzero remainder reports [`Error::BasisEliminationFailed`].
pub fn express_in_basis(
    nf: &NormalForm,
    rule: &OrderingRule,
) -> Result<BTreeMap<BasisIndex, Scalar>> {
    let mut remainder = nf.clone();
    let mut out: BTreeMap<BasisIndex, Scalar> = BTreeMap::new();
    let mut steps = 0usize;
    while let Some((a, b)) = remainder.leading_key() {
        steps += 1;
        if steps > 100_000 {
            return Err(Error::BasisEliminationFailed);
        }
        let idx = BasisIndex::new(b, a)?;
        let coeff = remainder.coefficient(a, b);
        let basis_nf = normal_order(&basis_operator(rule, idx)?)?;
        remainder = remainder.sub(&basis_nf.scale(&coeff));
        if !remainder.coefficient(a, b).is_zero() {
            return Err(Error::BasisEliminationFailed);
        }
        let entry = out.entry(idx).or_insert_with(Scalar::zero);
        *entry = &*entry + &coeff;
    }
    out.retain(|_, c| !c.is_zero());

    // exact reconstruction check
    let mut rebuilt = Expression::zero();
    for (idx, c) in &out {
        rebuilt = &rebuilt + &basis_operator(rule, *idx)?.scale(c);
    }
    if !equals(&rebuilt, &nf.as_expression())? {
        return Err(Error::BasisEliminationFailed);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::classical_limit;
    use crate::scalar::int;
    use num_complex::Complex;

    fn qp() -> Expression {
        &Expression::q() * &Expression::p()
    }

    fn pq() -> Expression {
        &Expression::p() * &Expression::q()
    }

    #[test]
    fn weyl_t11() {
        let t11 = basis_operator(&OrderingRule::Weyl, BasisIndex::new(1, 1).unwrap()).unwrap();
        let expected = (&qp() + &pq()).scale_rational(&rat(1, 2));
        assert!(equals(&t11, &expected).unwrap());
        assert_eq!(t11, expected);
    }

    #[test]
    fn born_jordan_b22() {
        let b22 = basis_operator(&OrderingRule::BornJordan, BasisIndex::new(2, 2).unwrap()).unwrap();
        let p2q2 = &Expression::generator_pow(Letter::P, 2) * &Expression::generator_pow(Letter::Q, 2);
        let qp2q = &(&Expression::q() * &Expression::generator_pow(Letter::P, 2)) * &Expression::q();
        let q2p2 = &Expression::generator_pow(Letter::Q, 2) * &Expression::generator_pow(Letter::P, 2);
        let expected = (&(&p2q2 + &qp2q) + &q2p2).scale_rational(&rat(1, 3));
        assert_eq!(b22, expected);
    }

    #[test]
    fn simplest_symmetric_single_factor() {
        let s10 = basis_operator(
            &OrderingRule::SimplestSymmetric,
            BasisIndex::new(1, 0).unwrap(),
        )
        .unwrap();
        assert_eq!(s10, Expression::p());
    }

    #[test]
    fn both_indices_negative_rejected() {
        assert!(matches!(
            BasisIndex::new(-1, -2),
            Err(Error::BothIndicesNegative { .. })
        ));
    }

    #[test]
    fn custom_rule_validation() {
        assert!(matches!(
            OrderingRule::custom(Orientation::QSide, vec![rat(1, 2), rat(1, 3)]),
            Err(Error::WeightsNotNormalized { .. })
        ));
        let rule = OrderingRule::custom(Orientation::QSide, vec![rat(1, 4), rat(3, 4)]).unwrap();
        assert!(basis_operator(&rule, BasisIndex::new(2, 1).unwrap()).is_ok());
        assert!(matches!(
            basis_operator(&rule, BasisIndex::new(2, 3).unwrap()),
            Err(Error::WeightCountMismatch { .. })
        ));
    }

    #[test]
    fn quantize_harmonic_oscillator() {
        // p^2/2 + q^2/2 with unit mass and frequency
        let half = Complex::from(rat(1, 2));
        let f = &ClassicalPoly::monomial(0, 2, half.clone())
            + &ClassicalPoly::monomial(2, 0, half);
        let h = quantize(&f, &OrderingRule::Weyl).unwrap();
        let t20 = basis_operator(&OrderingRule::Weyl, BasisIndex::new(2, 0).unwrap()).unwrap();
        let t02 = basis_operator(&OrderingRule::Weyl, BasisIndex::new(0, 2).unwrap()).unwrap();
        let expected = (&t20 + &t02).scale_rational(&rat(1, 2));
        assert!(equals(&h, &expected).unwrap());
    }

    #[test]
    fn quantize_monomial_is_basis_operator() {
        let f = ClassicalPoly::monomial(3, 2, Complex::from(int(1)));
        let h = quantize(&f, &OrderingRule::BornJordan).unwrap();
        let b23 = basis_operator(&OrderingRule::BornJordan, BasisIndex::new(2, 3).unwrap()).unwrap();
        assert!(equals(&h, &b23).unwrap());
    }

    #[test]
    fn quantize_constant() {
        let f = ClassicalPoly::one();
        let h = quantize(&f, &OrderingRule::SimplestSymmetric).unwrap();
        assert_eq!(h, Expression::identity());
    }

    #[test]
    fn classical_limit_inverts_quantization() {
        for rule in [
            OrderingRule::Weyl,
            OrderingRule::SimplestSymmetric,
            OrderingRule::BornJordan,
        ] {
            for m in 0..=4i64 {
                for n in 0..=4i64 {
                    let f = ClassicalPoly::monomial(n, m, Complex::from(int(1)));
                    let h = quantize(&f, &rule).unwrap();
                    assert_eq!(classical_limit(&h).unwrap(), f, "{rule:?} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn express_qp_in_weyl_basis() {
        // q p = T_{1,1} + (i hbar / 2) T_{0,0}
        let nf = normal_order(&qp()).unwrap();
        let coeffs = express_in_basis(&nf, &OrderingRule::Weyl).unwrap();
        assert_eq!(coeffs.len(), 2);
        assert_eq!(coeffs[&BasisIndex::new(1, 1).unwrap()], Scalar::one());
        assert_eq!(
            coeffs[&BasisIndex::new(0, 0).unwrap()],
            Scalar::i_hbar_pow(1).scale_rational(&rat(1, 2))
        );
    }

    #[test]
    fn express_round_trip_b22() {
        let b22 = basis_operator(&OrderingRule::BornJordan, BasisIndex::new(2, 2).unwrap()).unwrap();
        let coeffs = express_in_basis(&normal_order(&b22).unwrap(), &OrderingRule::BornJordan).unwrap();
        assert_eq!(coeffs.len(), 1);
        assert_eq!(coeffs[&BasisIndex::new(2, 2).unwrap()], Scalar::one());
    }

    #[test]
    fn express_q2p_in_symmetric_basis() {
        // q^2 p = S_{1,2} + i hbar S_{0,1}
        let q2p = &Expression::generator_pow(Letter::Q, 2) * &Expression::p();
        let coeffs =
            express_in_basis(&normal_order(&q2p).unwrap(), &OrderingRule::SimplestSymmetric)
                .unwrap();
        assert_eq!(coeffs.len(), 2);
        assert_eq!(coeffs[&BasisIndex::new(1, 2).unwrap()], Scalar::one());
        assert_eq!(coeffs[&BasisIndex::new(0, 1).unwrap()], Scalar::i_hbar_pow(1));
    }
}
