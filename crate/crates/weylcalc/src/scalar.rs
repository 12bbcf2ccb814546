//! Exact scalar arithmetic.
//!
//! Coefficients throughout the crate are complex rationals attached to
//! nonnegative powers of the reduced Planck constant, so every identity is
//! checked symbolically in `hbar` with no rounding anywhere.  This module
//! also hosts the special number sequences (reciprocal factorials, gamma
//! ratios at negative integers, Euler numbers, Bernoulli polynomials at 1/2)
//! that drive the closed-form commutator series.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type Rational = BigRational;

/// Gaussian rational `re + im*i`.
pub type ComplexRational = num_complex::Complex<Rational>;

/// `n/d` as a [`Rational`].  Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `n` as a [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `k!` for `k >= 0`.
pub fn factorial(k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=i64::from(k) {
        acc *= i;
    }
    acc
}

/// `1/k!` extended by the reciprocal-gamma convention: the value is exactly
/// zero for negative `k`.  This is what truncates the formally infinite
/// commutator series to finite sums.
pub fn factorial_reciprocal(k: i64) -> Rational {
    if k < 0 {
        Rational::zero()
    } else {
        Rational::new(BigInt::one(), factorial(k as u32))
    }
}

/// Falling product `x (x-1) ... (x-steps+1)` for any integer `x`.
///
/// For `x >= 0` the product vanishes once `steps > x`, which implements
/// `x!/(x-steps)!` under the reciprocal-gamma convention.
pub fn falling(x: i64, steps: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..i64::from(steps) {
        acc *= x - i;
    }
    acc
}

/// Binomial coefficient with arbitrary integer top argument.
pub fn binomial(x: i64, k: u32) -> BigInt {
    // The falling product of length k is always divisible by k!.
    falling(x, k) / factorial(k)
}

/// The ratio `Gamma(-n) / Gamma(-n - m)` for nonnegative integers `n`, `m`,
/// resolved through the reflection formula: `(-1)^m (n+m)!/n!`.
pub fn gamma_ratio_negative(n: u32, m: u32) -> Rational {
    let sign = if m % 2 == 0 { 1 } else { -1 };
    let value = falling(i64::from(n) + i64::from(m), m);
    Rational::from_integer(value * sign)
}

/// Euler number `E_u` (integer-valued; zero for odd `u`), computed from the
/// recurrence `sum_k C(2n, 2k) E_{2k} = 0` seeded at `E_0 = 1`.
pub fn euler_number(u: u32) -> Rational {
    if u % 2 == 1 {
        return Rational::zero();
    }
    let half = (u / 2) as usize;
    let mut table: Vec<BigInt> = vec![BigInt::one()];
    for n in 1..=half {
        let mut acc = BigInt::zero();
        for (k, e) in table.iter().enumerate() {
            acc += binomial(2 * n as i64, 2 * k as u32) * e;
        }
        table.push(-acc);
    }
    Rational::from_integer(table[half].clone())
}

/// Bernoulli polynomial evaluated at one half, `B_u(1/2)`, computed from the
/// recurrence `sum_{k=0}^{n-1} C(n,k) B_k(x) = n x^{n-1}` at `x = 1/2`.
pub fn bernoulli_half(u: u32) -> Rational {
    let mut table: Vec<Rational> = vec![Rational::one()];
    for n in 2..=i64::from(u) + 1 {
        // C(n, n-1) * B_{n-1}(1/2) = n / 2^{n-1} - sum_{k<=n-2} C(n,k) B_k(1/2)
        let mut rhs = Rational::new(BigInt::from(n), BigInt::from(2).pow(n as u32 - 1));
        for (k, b) in table.iter().enumerate() {
            rhs -= Rational::from_integer(binomial(n, k as u32)) * b;
        }
        table.push(rhs / int(n));
    }
    table[u as usize].clone()
}

/// Polynomial in `hbar` with [`ComplexRational`] coefficients.
///
/// The zero polynomial is the empty map; no zero coefficient is ever stored,
/// so structural equality is semantic equality.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Scalar {
    coeffs: BTreeMap<u32, ComplexRational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(int(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar::term(ComplexRational::new(r, Rational::zero()), 0)
    }

    pub fn from_complex(c: ComplexRational) -> Self {
        Scalar::term(c, 0)
    }

    /// Single monomial `c * hbar^power`.
    pub fn term(c: ComplexRational, power: u32) -> Self {
        let mut s = Scalar::default();
        s.insert_add(power, c);
        s
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar::term(ComplexRational::i(), 0)
    }

    /// `hbar^power`.
    pub fn hbar_pow(power: u32) -> Self {
        Scalar::term(ComplexRational::one(), power)
    }

    /// `(i hbar)^power`.
    pub fn i_hbar_pow(power: u32) -> Self {
        let i_pow = match power % 4 {
            0 => ComplexRational::one(),
            1 => ComplexRational::i(),
            2 => -ComplexRational::one(),
            _ => -ComplexRational::i(),
        };
        Scalar::term(i_pow, power)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Complex conjugation; `hbar` is fixed.
    pub fn conj(&self) -> Self {
        Scalar {
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (*k, c.conj()))
                .collect(),
        }
    }

    /// Coefficient of `hbar^power` (zero if absent).
    pub fn coefficient(&self, power: u32) -> ComplexRational {
        self.coeffs.get(&power).cloned().unwrap_or_else(ComplexRational::zero)
    }

    /// Value at `hbar = 0`.
    pub fn at_hbar_zero(&self) -> ComplexRational {
        self.coefficient(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u32, &ComplexRational)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (*k, c * ComplexRational::from(r.clone())))
                .collect(),
        }
    }

    fn insert_add(&mut self, power: u32, c: ComplexRational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(power) {
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
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (k, c) in &rhs.coeffs {
            out.insert_add(*k, c.clone());
        }
        out
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (k, c) in &rhs.coeffs {
            out.insert_add(*k, -c.clone());
        }
        out
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (k1, c1) in &self.coeffs {
            for (k2, c2) in &rhs.coeffs {
                out.insert_add(k1 + k2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (k, c) in &rhs.coeffs {
            self.insert_add(*k, c.clone());
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}+{}i)", c.re, c.im)?;
            if *k > 0 {
                write!(f, "*hbar^{k}")?;
            }
        }
        Ok(())
    }
}

/// True when the scalar is a pure rational multiple of `i^k hbar^k` for odd
/// `k`, i.e. carries a single hbar power with purely imaginary coefficient.
pub fn is_pure_odd_i_hbar(s: &Scalar) -> bool {
    if s.num_terms() != 1 {
        return false;
    }
    let (k, c) = s.iter().next().unwrap();
    k % 2 == 1 && c.re.is_zero() && !c.im.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_reciprocal_examples() {
        assert_eq!(factorial_reciprocal(0), int(1));
        assert_eq!(factorial_reciprocal(3), rat(1, 6));
        assert_eq!(factorial_reciprocal(-1), int(0));
        assert_eq!(factorial_reciprocal(-7), int(0));
        for k in 0..15i64 {
            let prod = factorial_reciprocal(k) * Rational::from_integer(factorial(k as u32));
            assert_eq!(prod, int(1));
        }
    }

    #[test]
    fn gamma_ratio_examples() {
        assert_eq!(gamma_ratio_negative(2, 3), int(-60));
        assert_eq!(gamma_ratio_negative(0, 0), int(1));
        assert_eq!(gamma_ratio_negative(1, 2), int(6));
    }

    #[test]
    fn gamma_ratio_matches_telescoping_product() {
        // Gamma(-n) = (-n-1)(-n-2)...(-n-m) * Gamma(-n-m)
        for n in 0..=20u32 {
            for m in 0..=20u32 {
                let mut prod = int(1);
                for i in 1..=i64::from(m) {
                    prod *= int(-(i64::from(n)) - i);
                }
                assert_eq!(gamma_ratio_negative(n, m), prod, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn euler_number_examples() {
        assert_eq!(euler_number(0), int(1));
        assert_eq!(euler_number(1), int(0));
        assert_eq!(euler_number(2), int(-1));
        assert_eq!(euler_number(4), int(5));
        assert_eq!(euler_number(6), int(-61));
        assert_eq!(euler_number(10), int(-50521));
    }

    #[test]
    fn euler_number_matches_zigzag_triangle() {
        // Seidel boustrophedon triangle: the secant numbers |E_{2n}| count
        // alternating permutations.  Independent of the recurrence above.
        let mut row: Vec<BigInt> = vec![BigInt::one()];
        let mut secant: Vec<BigInt> = vec![BigInt::one()];
        for n in 1..=20usize {
            let mut next = vec![BigInt::zero(); n + 1];
            if n % 2 == 1 {
                // fill left to right
                for i in 1..=n {
                    next[i] = next[i - 1].clone()
                        + row.get(i - 1).cloned().unwrap_or_else(BigInt::zero);
                }
            } else {
                for i in (0..n).rev() {
                    next[i] = next[i + 1].clone() + row[i].clone();
                }
                secant.push(next[0].clone());
            }
            row = next;
        }
        for (n, s) in secant.iter().enumerate() {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(
                euler_number(2 * n as u32),
                Rational::from_integer(s * sign),
                "E_{}",
                2 * n
            );
        }
    }

    #[test]
    fn bernoulli_half_examples() {
        assert_eq!(bernoulli_half(0), int(1));
        assert_eq!(bernoulli_half(1), int(0));
        assert_eq!(bernoulli_half(2), rat(-1, 12));
        assert_eq!(bernoulli_half(4), rat(7, 240));
    }

    #[test]
    fn bernoulli_half_matches_closed_form() {
        // Oracle: B_u(1/2) = (2^{1-u} - 1) B_u with B_u from the standard
        // Bernoulli-number recurrence sum_{k<=n} C(n+1,k) B_k = 0.
        let mut bern: Vec<Rational> = vec![int(1)];
        for n in 1..=20usize {
            let mut acc = Rational::zero();
            for (k, b) in bern.iter().enumerate() {
                acc += Rational::from_integer(binomial(n as i64 + 1, k as u32)) * b;
            }
            bern.push(-acc / int(n as i64 + 1));
        }
        for u in 0..=20usize {
            let two_pow = if u == 0 {
                int(2)
            } else {
                Rational::new(BigInt::one(), BigInt::from(2).pow(u as u32 - 1))
            };
            let expected = (two_pow - int(1)) * bern[u].clone();
            assert_eq!(bernoulli_half(u as u32), expected, "B_{u}(1/2)");
        }
    }

    #[test]
    fn scalar_ring_basics() {
        let a = Scalar::i_hbar_pow(2);
        assert_eq!(a, Scalar::term(-ComplexRational::one(), 2));
        let b = Scalar::i() * Scalar::hbar_pow(1);
        assert_eq!(b, Scalar::i_hbar_pow(1));
        assert!((Scalar::one() - Scalar::one()).is_zero());
        assert_eq!(Scalar::i() * Scalar::i(), Scalar::from_int(-1));
    }

    #[test]
    fn conjugation_is_involution() {
        let s = Scalar::from_int(3) + Scalar::i_hbar_pow(3) + Scalar::term(ComplexRational::i(), 2);
        assert_eq!(s.conj().conj(), s);
        assert_eq!(Scalar::i().conj(), -Scalar::i());
        assert_eq!(Scalar::hbar_pow(2).conj(), Scalar::hbar_pow(2));
    }
}
