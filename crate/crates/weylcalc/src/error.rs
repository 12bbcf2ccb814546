//! Error taxonomy shared by the whole crate.

use thiserror::Error;

/// Everything that can go wrong in the algebra, the quantization layer, the
/// derivative rules, or the text front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A term would need `q^a p^b` with both `a < 0` and `b < 0`.  Words of
    /// that shape have no finite normal form and are outside the supported
    /// operator class.
    #[error("term requires q^a p^b with both exponents negative; not representable")]
    MixedNegativePowers,

    /// A basis index `(m, n)` with both entries negative was requested.
    #[error("basis index ({m}, {n}) has both entries negative")]
    BothIndicesNegative { m: i64, n: i64 },

    /// A custom weight family was paired with an index that does not match
    /// its length.
    #[error("custom rule carries {expected} weights but index requires {found}")]
    WeightCountMismatch { expected: usize, found: usize },

    /// Custom weights must sum to one.
    #[error("custom weights sum to {sum}, expected 1")]
    WeightsNotNormalized { sum: String },

    /// The triangular sweep in basis re-expression left a nonzero remainder.
    #[error("basis elimination left a nonzero remainder")]
    BasisEliminationFailed,

    /// The cyclic (first-type) derivative family is only defined on words
    /// whose exponents are all positive.
    #[error("first-type derivatives require all exponents positive")]
    NegativeExponentUnsupported,

    /// The closed-form commutator series is stated for nonnegative indices
    /// only.
    #[error("commutator series requires nonnegative basis indices")]
    NegativeIndexUnsupported,

    /// Text input could not be parsed; `offset` is a byte position.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Parse errors exit with a different code than domain errors in the CLI.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}
