//! Commutators: brute force through normal ordering, and the closed-form
//! basis-preserving series for the three built-in rules.
//!
//! The series are formally infinite; every factorial of a negative integer
//! is treated as having reciprocal zero, which truncates all sums after
//! finitely many terms.  Conservative loop caps derived from the index sizes
//! make the truncation explicit.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::algebra::{Expression, NormalForm, normal_order};
use crate::error::{Error, Result};
use crate::quantize::{BasisIndex, BuiltinRule, basis_operator};
use crate::scalar::{Rational, Scalar, bernoulli_half, binomial, euler_number, factorial, falling};

/// One summand of a closed-form commutator series: a scalar multiple of a
/// single basis operator.  The coefficient always carries exactly one power
/// of `hbar`, and that power is odd.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CommutatorSeriesTerm {
    pub target: BasisIndex,
    pub coefficient: Scalar,
}

/// `[a, b]` computed as `a b - b a` followed by normal ordering.
pub fn commutator_brute(a: &Expression, b: &Expression) -> Result<NormalForm> {
    normal_order(&(&(a * b) - &(b * a)))
}

/// Expands a series term list back into an expression through the basis
/// operators of the rule.
pub fn expand_series(basis: BuiltinRule, terms: &[CommutatorSeriesTerm]) -> Result<Expression> {
    let rule = basis.rule();
    let mut out = Expression::zero();
    for term in terms {
        out = &out + &basis_operator(&rule, term.target)?.scale(&term.coefficient);
    }
    Ok(out)
}

fn check_indices(a: BasisIndex, b: BasisIndex) -> Result<(i64, i64, i64, i64)> {
    if a.m < 0 || a.n < 0 || b.m < 0 || b.n < 0 {
        return Err(Error::NegativeIndexUnsupported);
    }
    Ok((a.m, a.n, b.m, b.n))
}

fn push_term(acc: &mut BTreeMap<(i64, i64), Scalar>, key: (i64, i64), coeff: Scalar) {
    if coeff.is_zero() {
        return;
    }
    let entry = acc.entry(key).or_insert_with(Scalar::zero);
    *entry = &*entry + &coeff;
    if entry.is_zero() {
        acc.remove(&key);
    }
}

fn collect(acc: BTreeMap<(i64, i64), Scalar>) -> Vec<CommutatorSeriesTerm> {
    let mut out: Vec<CommutatorSeriesTerm> = acc
        .into_iter()
        .map(|((m, n), coefficient)| CommutatorSeriesTerm {
            target: BasisIndex::new(m, n).expect("series targets are nonnegative"),
            coefficient,
        })
        .collect();
    out.sort_by_key(|t| {
        (
            std::cmp::Reverse(t.target.m + t.target.n),
            std::cmp::Reverse(t.target.m),
        )
    });
    out
}

/// `2 / (2^{pow} * d1! * d2! * d3!)` as a rational.
fn series_prefactor(pow: u32, d1: u32, d2: u32, d3: u32) -> Rational {
    Rational::new(
        BigInt::from(2),
        BigInt::from(2).pow(pow) * factorial(d1) * factorial(d2) * factorial(d3),
    )
}

/// Alternating inner sum shared by all three series:
/// `sum_k (-1)^k C(2j+1, k) F(m, k+2l) F(n, 2j+1-k+2l) F(r, 2j+1-k+2t) F(s, k+2t)`.
fn alternating_k_sum(j: u32, l: u32, t: u32, m: i64, n: i64, r: i64, s: i64) -> BigInt {
    let top = 2 * j + 1;
    let mut acc = BigInt::zero();
    for k in 0..=top {
        let c = binomial(i64::from(top), k)
            * falling(m, k + 2 * l)
            * falling(n, top - k + 2 * l)
            * falling(r, top - k + 2 * t)
            * falling(s, k + 2 * t);
        if k % 2 == 0 {
            acc += c;
        } else {
            acc -= c;
        }
    }
    acc
}

/// Closed-form commutator `[A_{m,n}, A_{r,s}]` within one built-in basis,
/// returned as a finite list of scalar multiples of basis operators of the
/// same rule.  Only nonnegative indices are supported.
pub fn commutator_series(
    basis: BuiltinRule,
    a: BasisIndex,
    b: BasisIndex,
) -> Result<Vec<CommutatorSeriesTerm>> {
    let (m, n, r, s) = check_indices(a, b)?;
    match basis {
        BuiltinRule::Weyl => Ok(series_weyl(m, n, r, s)),
        BuiltinRule::SimplestSymmetric => Ok(series_nested(m, n, r, s, NestedKind::Symmetric)),
        BuiltinRule::BornJordan => Ok(series_nested(m, n, r, s, NestedKind::BornJordan)),
    }
}

fn series_weyl(m: i64, n: i64, r: i64, s: i64) -> Vec<CommutatorSeriesTerm> {
    let mut acc = BTreeMap::new();
    let j_cap = ((m + n + r + s) / 2 + 1) as u32;
    for j in 0..=j_cap {
        let ksum = alternating_k_sum(j, 0, 0, m, n, r, s);
        if ksum.is_zero() {
            continue;
        }
        let pow = 2 * j + 1;
        let coeff = Scalar::i_hbar_pow(pow)
            .scale_rational(&(series_prefactor(pow, pow, 0, 0) * Rational::from_integer(ksum)));
        let key = (m + r - i64::from(pow), n + s - i64::from(pow));
        push_term(&mut acc, key, coeff);
    }
    collect(acc)
}

enum NestedKind {
    Symmetric,
    BornJordan,
}

impl NestedKind {
    /// Denominator factorial argument for the `l` and `t` sums.
    fn lt_factorial(&self, v: u32) -> u32 {
        match self {
            NestedKind::Symmetric => 2 * v,
            NestedKind::BornJordan => 2 * v + 1,
        }
    }

    /// The `u`-sum weight: `(-i hbar / 2)^u E_u / u!` for the symmetric
    /// series, `(-i hbar)^u B_u(1/2) / u!` for the Born-Jordan series.
    /// Returns the rational part (the `(i hbar)^u` lives with the caller).
    fn u_weight(&self, u: u32) -> Rational {
        let sign = if u % 2 == 0 {
            Rational::from_integer(1.into())
        } else {
            Rational::from_integer((-1).into())
        };
        let base = match self {
            NestedKind::Symmetric => {
                euler_number(u) / Rational::from_integer(BigInt::from(2).pow(u))
            }
            NestedKind::BornJordan => bernoulli_half(u),
        };
        sign * base / Rational::from_integer(factorial(u))
    }
}

fn series_nested(m: i64, n: i64, r: i64, s: i64, kind: NestedKind) -> Vec<CommutatorSeriesTerm> {
    let mut acc = BTreeMap::new();
    let total = m + n + r + s;
    let half_cap = (total / 2 + 1) as u32;
    for j in 0..=half_cap {
        for l in 0..=half_cap {
            for t in 0..=half_cap {
                let ksum = alternating_k_sum(j, l, t, m, n, r, s);
                if ksum.is_zero() {
                    continue;
                }
                let shift = i64::from(2 * j + 1 + 2 * l + 2 * t);
                let big_m = m + r - shift;
                let big_n = n + s - shift;
                // both are nonnegative whenever ksum is nonzero
                let base_pow = 2 * j + 1 + 2 * l + 2 * t;
                let base = series_prefactor(
                    base_pow,
                    2 * j + 1,
                    kind.lt_factorial(l),
                    kind.lt_factorial(t),
                ) * Rational::from_integer(ksum);
                for u in 0..=(total.max(0) as u32) {
                    let fu = falling(big_m, u) * falling(big_n, u);
                    if fu.is_zero() {
                        break;
                    }
                    let w = kind.u_weight(u);
                    if w.is_zero() {
                        continue;
                    }
                    let rat_part = base.clone() * w * Rational::from_integer(fu);
                    let coeff = Scalar::i_hbar_pow(base_pow + u).scale_rational(&rat_part);
                    push_term(&mut acc, (big_m - i64::from(u), big_n - i64::from(u)), coeff);
                }
            }
        }
    }
    collect(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::equals;
    use crate::quantize::OrderingRule;
    use crate::scalar::{int, is_pure_odd_i_hbar};

    fn idx(m: i64, n: i64) -> BasisIndex {
        BasisIndex::new(m, n).unwrap()
    }

    #[test]
    fn canonical_commutation_relation() {
        // [q, p] = i hbar
        let nf = commutator_brute(&Expression::q(), &Expression::p()).unwrap();
        assert_eq!(nf.num_terms(), 1);
        assert_eq!(nf.coefficient(0, 0), Scalar::i_hbar_pow(1));
    }

    #[test]
    fn basis_image_commutator_with_q() {
        // [A_{2,1}, q] = -2 i hbar A_{1,1} in the Born-Jordan basis
        let rule = OrderingRule::BornJordan;
        let a21 = basis_operator(&rule, idx(2, 1)).unwrap();
        let nf = commutator_brute(&a21, &Expression::q()).unwrap();
        let expected = basis_operator(&rule, idx(1, 1))
            .unwrap()
            .scale(&Scalar::i_hbar_pow(1).scale_rational(&int(-2)));
        assert!(equals(&nf.as_expression(), &expected).unwrap());
    }

    #[test]
    fn weyl_series_p2_q() {
        // [T_{2,0}, T_{0,1}] = -2 i hbar T_{1,0}
        let terms = commutator_series(BuiltinRule::Weyl, idx(2, 0), idx(0, 1)).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].target, idx(1, 0));
        assert_eq!(
            terms[0].coefficient,
            Scalar::i_hbar_pow(1).scale_rational(&int(-2))
        );
    }

    #[test]
    fn symmetric_series_oscillator_commutators() {
        // [S_{2,0}, S_{0,1}] = -2 i hbar S_{1,0}; the other three pairs from
        // the oscillator check
        let basis = BuiltinRule::SimplestSymmetric;
        let terms = commutator_series(basis, idx(2, 0), idx(0, 1)).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].target, idx(1, 0));
        assert_eq!(
            terms[0].coefficient,
            Scalar::i_hbar_pow(1).scale_rational(&int(-2))
        );
        assert!(commutator_series(basis, idx(0, 2), idx(0, 1)).unwrap().is_empty());
        assert!(commutator_series(basis, idx(2, 0), idx(1, 0)).unwrap().is_empty());
        let terms = commutator_series(basis, idx(0, 2), idx(1, 0)).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].target, idx(0, 1));
        assert_eq!(
            terms[0].coefficient,
            Scalar::i_hbar_pow(1).scale_rational(&int(2))
        );
    }

    #[test]
    fn born_jordan_series_oscillator_commutator() {
        // [B_{0,2}, B_{1,0}] = 2 i hbar B_{0,1}
        let terms = commutator_series(BuiltinRule::BornJordan, idx(0, 2), idx(1, 0)).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].target, idx(0, 1));
        assert_eq!(
            terms[0].coefficient,
            Scalar::i_hbar_pow(1).scale_rational(&int(2))
        );
    }

    #[test]
    fn series_matches_brute_on_a_nontrivial_pair() {
        for basis in BuiltinRule::ALL {
            let rule = basis.rule();
            let a = basis_operator(&rule, idx(2, 2)).unwrap();
            let b = basis_operator(&rule, idx(1, 2)).unwrap();
            let brute = commutator_brute(&a, &b).unwrap();
            let series = commutator_series(basis, idx(2, 2), idx(1, 2)).unwrap();
            let expanded = expand_series(basis, &series).unwrap();
            assert!(
                equals(&expanded, &brute.as_expression()).unwrap(),
                "{basis:?}"
            );
        }
    }

    #[test]
    fn series_terms_carry_single_odd_hbar_power() {
        for basis in BuiltinRule::ALL {
            let series = commutator_series(basis, idx(2, 2), idx(2, 1)).unwrap();
            assert!(!series.is_empty());
            for term in &series {
                assert!(
                    is_pure_odd_i_hbar(&term.coefficient),
                    "{basis:?} {:?}",
                    term
                );
            }
        }
    }

    #[test]
    fn negative_indices_rejected() {
        assert_eq!(
            commutator_series(BuiltinRule::Weyl, idx(-1, 2), idx(0, 1)),
            Err(Error::NegativeIndexUnsupported)
        );
    }
}
