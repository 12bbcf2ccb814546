//! Exact symbolic calculus in the one-dimensional Weyl algebra.
//!
//! The crate works with finite linear combinations of words in the two
//! generators `q` and `p` subject to `[q, p] = i hbar`, with coefficients
//! that are complex rationals times powers of `hbar`.  Everything is exact;
//! no floating point appears anywhere.
//!
//! What it provides:
//!
//! * canonical normal ordering (`q` powers left, `p` powers right) and the
//!   operator equality it decides ([`algebra`]);
//! * the Weyl, simplest symmetric and Born-Jordan quantization rules plus
//!   custom weight families, with basis operators allowing one negative
//!   index ([`quantize`]);
//! * the cyclic derivative of operator words, its Weyl- and
//!   symmetric-leaning reweightings, and the formal limit derivative,
//!   together with iterated and mixed differentiation ([`calculus`]);
//! * commutators by brute force and by the closed-form basis-preserving
//!   series whose coefficients come from Euler numbers and Bernoulli
//!   polynomial values at one half ([`commutator`]);
//! * a checker for the operator form of Hamilton's equations of motion and
//!   the antinormal-rewrite demonstration ([`eom`]);
//! * a text front end: parser, plain/LaTeX/structured output, a command
//!   line, and a self-verification suite ([`parse`], [`format`], [`cli`],
//!   [`verify`]).
//!
//! Start from [`parse::parse_operator`] or build expressions directly:
//!
//! ```
//! use weylcalc::algebra::{Expression, equals, normal_order};
//! use weylcalc::scalar::Scalar;
//!
//! let qp = &Expression::q() * &Expression::p();
//! let pq = &Expression::p() * &Expression::q();
//! let i_hbar = Expression::from_scalar(Scalar::i_hbar_pow(1));
//! assert!(equals(&qp, &(&pq + &i_hbar)).unwrap());
//! assert_eq!(normal_order(&qp).unwrap().num_terms(), 1);
//! ```

pub mod algebra;
pub mod calculus;
pub mod cli;
pub mod commutator;
pub mod eom;
pub mod error;
pub mod format;
pub mod parse;
pub mod quantize;
pub mod sampling;
pub mod scalar;
pub mod verify;

pub use algebra::{ClassicalPoly, Expression, Letter, NormalForm, Word, classical_limit, equals, normal_order};
pub use calculus::{DerivativeKind, diff_n, dq1, dq1_sym_mod, dq1_weyl_mod, dq2, mixed_partial};
pub use commutator::{CommutatorSeriesTerm, commutator_brute, commutator_series, expand_series};
pub use eom::{AppendixReport, EomReport, appendix_demo, check_eom};
pub use error::{Error, Result};
pub use quantize::{
    BasisIndex, BuiltinRule, OrderingRule, Orientation, basis_operator, builtin_sandwich,
    express_in_basis, quantize,
};
pub use scalar::{ComplexRational, Rational, Scalar};
