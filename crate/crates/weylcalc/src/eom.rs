//! Verification of the quantum analogue of Hamilton's equations of motion,
//! `[H, q] = -i hbar dH/dp` and `[H, p] = i hbar dH/dq`, for a chosen
//! derivative rule, plus the antinormal-rewrite demonstration showing where
//! the cyclic derivative family breaks down.

use crate::algebra::{Expression, Letter, NormalForm, equals, normal_order};
use crate::calculus::{DerivativeKind, dq2};
use crate::error::Result;
use crate::scalar::{Scalar, int};

/// Outcome of an equations-of-motion check.  The residuals are
/// `NF([H, q] + i hbar dH/dp)` and `NF([H, p] - i hbar dH/dq)`; the check
/// passes exactly when both vanish, and a failing residual exhibits the
/// precise obstruction term.
#[derive(Clone, Debug)]
pub struct EomReport {
    pub hamiltonian: Expression,
    pub rule: Option<String>,
    pub derivative_kind: DerivativeKind,
    pub residual_q: NormalForm,
    pub residual_p: NormalForm,
    pub passed: bool,
}

impl EomReport {
    pub fn with_rule(mut self, rule: String) -> Self {
        self.rule = Some(rule);
        self
    }
}

/// Checks the quantum equations of motion for `h` under the chosen
/// derivative rule.
pub fn check_eom(h: &Expression, kind: DerivativeKind) -> Result<EomReport> {
    let i_hbar = Scalar::i_hbar_pow(1);
    let d_p = kind.apply(h, Letter::P)?;
    let d_q = kind.apply(h, Letter::Q)?;
    let comm_q = &(h * &Expression::q()) - &(&Expression::q() * h);
    let comm_p = &(h * &Expression::p()) - &(&Expression::p() * h);
    let residual_q = normal_order(&(&comm_q + &d_p.scale(&i_hbar)))?;
    let residual_p = normal_order(&(&comm_p - &d_q.scale(&i_hbar)))?;
    let passed = residual_q.is_zero() && residual_p.is_zero();
    Ok(EomReport {
        hamiltonian: h.clone(),
        rule: None,
        derivative_kind: kind,
        residual_q,
        residual_p,
        passed,
    })
}

/// One derivative rule applied to both rewritings of `q p^m`.
#[derive(Clone, Debug)]
pub struct AppendixVariant {
    pub kind: DerivativeKind,
    pub derivative_normal: Expression,
    pub derivative_antinormal: Expression,
    /// `NF(d(normal) - d(antinormal))`.
    pub discrepancy: NormalForm,
}

/// Result of the rewrite-dependence demonstration for `H = q p^m`.
#[derive(Clone, Debug)]
pub struct AppendixReport {
    pub m: i64,
    /// The three cyclic-family variants, each showing the same discrepancy.
    pub variants: Vec<AppendixVariant>,
    /// The common discrepancy `-i hbar m (m-1) p^{m-2}` in normal form.
    pub expected_discrepancy: NormalForm,
    /// The second-type control: its discrepancy is identically zero.
    pub second_type_discrepancy: NormalForm,
}

/// Differentiates `H = q p^m` and its antinormal rewrite
/// `p^m q + m i hbar p^{m-1}` with each cyclic-family rule.  The two inputs
/// are equal as operators, yet every cyclic variant produces derivatives
/// differing by exactly `i hbar m (m-1) p^{m-2}`; the second-type derivative
/// treats both forms identically.
pub fn appendix_demo(m: i64) -> Result<AppendixReport> {
    assert!(m >= 2, "the demonstration needs m >= 2");
    let h = &Expression::q() * &Expression::generator_pow(Letter::P, m);
    let h_an = &(&Expression::generator_pow(Letter::P, m) * &Expression::q())
        + &Expression::generator_pow(Letter::P, m - 1)
            .scale(&Scalar::i_hbar_pow(1).scale_rational(&int(m)));
    debug_assert!(equals(&h, &h_an)?);

    let expected_discrepancy = normal_order(
        &Expression::generator_pow(Letter::P, m - 2)
            .scale(&(-Scalar::i_hbar_pow(1)).scale_rational(&int(m * (m - 1)))),
    )?;

    let mut variants = Vec::new();
    for kind in [
        DerivativeKind::FirstType,
        DerivativeKind::FirstTypeWeylMod,
        DerivativeKind::FirstTypeSymMod,
    ] {
        let derivative_normal = kind.apply(&h, Letter::P)?;
        let derivative_antinormal = kind.apply(&h_an, Letter::P)?;
        let discrepancy = normal_order(&(&derivative_normal - &derivative_antinormal))?;
        assert_eq!(
            discrepancy, expected_discrepancy,
            "cyclic-family discrepancy must be -i hbar m (m-1) p^(m-2), kind {kind:?}"
        );
        variants.push(AppendixVariant {
            kind,
            derivative_normal,
            derivative_antinormal,
            discrepancy,
        });
    }

    let second_type_discrepancy =
        normal_order(&(&dq2(&h, Letter::P) - &dq2(&h_an, Letter::P)))?;
    assert!(
        second_type_discrepancy.is_zero(),
        "second-type derivative must respect operator equality"
    );

    Ok(AppendixReport {
        m,
        variants,
        expected_discrepancy,
        second_type_discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantize::{BasisIndex, OrderingRule, Orientation, basis_operator, quantize};
    use crate::algebra::ClassicalPoly;
    use crate::scalar::{ComplexRational, rat};

    #[test]
    fn oscillator_passes_with_second_type() {
        // Weyl-quantized p^2/2 + q^2/2 (unit mass and frequency)
        let half = ComplexRational::from(rat(1, 2));
        let f = &ClassicalPoly::monomial(0, 2, half.clone())
            + &ClassicalPoly::monomial(2, 0, half);
        let h = quantize(&f, &OrderingRule::Weyl).unwrap();
        let report = check_eom(&h, DerivativeKind::SecondType).unwrap();
        assert!(report.passed);
        assert!(report.residual_q.is_zero());
        assert!(report.residual_p.is_zero());
    }

    #[test]
    fn custom_rule_image_passes_with_second_type() {
        let rule = OrderingRule::custom(
            Orientation::QSide,
            vec![rat(1, 6), rat(1, 2), rat(1, 3)],
        )
        .unwrap();
        let h = basis_operator(&rule, BasisIndex::new(3, 2).unwrap()).unwrap();
        let report = check_eom(&h, DerivativeKind::SecondType).unwrap();
        assert!(report.passed);
    }

    #[test]
    fn weyl_image_fails_with_plain_first_type() {
        let t32 = basis_operator(&OrderingRule::Weyl, BasisIndex::new(3, 2).unwrap()).unwrap();
        let report = check_eom(&t32, DerivativeKind::FirstType).unwrap();
        assert!(!report.passed);
        assert!(!report.residual_q.is_zero());
    }

    #[test]
    fn appendix_demo_small_cases() {
        // m = 2: discrepancy is the constant -2 i hbar
        let report = appendix_demo(2).unwrap();
        assert_eq!(report.variants.len(), 3);
        assert_eq!(
            report.expected_discrepancy.coefficient(0, 0),
            (-Scalar::i_hbar_pow(1)).scale_rational(&int(2))
        );
        assert!(report.second_type_discrepancy.is_zero());

        // m = 3: discrepancy is -6 i hbar p
        let report = appendix_demo(3).unwrap();
        assert_eq!(
            report.expected_discrepancy.coefficient(0, 1),
            (-Scalar::i_hbar_pow(1)).scale_rational(&int(6))
        );
    }
}
