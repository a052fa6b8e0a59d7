use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix order must be at least 1")]
    ZeroOrder,

    #[error("expected {expected} entries for a {n}x{n} matrix, got {got}")]
    WrongLength { n: usize, expected: usize, got: usize },

    #[error("entry ({row}, {col}) = {value} is not a finite non-negative real")]
    InvalidEntry { row: usize, col: usize, value: f64 },

    #[error("index {index} out of range for order {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("matching factor lambda({k}) is zero (row or column {k} vanishes)")]
    ZeroLambda { k: usize },

    #[error("row or column {k} has zero sum; matrix is not *-positive")]
    NotStarPositive { k: usize },

    #[error("matrix is not bistochastic (max sum residual {residual:e})")]
    NotBistochastic { residual: f64 },

    #[error("negative value {value} at position {index}")]
    NegativeValue { index: usize, value: f64 },

    #[error("map is not a permutation of 0..{n}")]
    InvalidPermutation { n: usize },

    #[error("Sinkhorn did not converge in {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("Sinkhorn input entry ({row}, {col}) = {value} is not strictly positive")]
    NonPositiveEntry { row: usize, col: usize, value: f64 },

    #[error("convex weights must be non-negative and sum to 1 (sum = {sum})")]
    WeightSum { sum: f64 },

    #[error("permutation orders differ: expected {expected}, got {got}")]
    OrderMismatch { expected: usize, got: usize },

    #[error("empty list of convex terms")]
    EmptyCombination,

    #[error("invalid value range ({lo}, {hi}); need 0 < lo < hi")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("scale factor {0} must be finite and positive")]
    InvalidScale(f64),

    #[error("no perfect matching on the support above {threshold:e} (row {row} unmatched)")]
    NoPerfectMatching { row: usize, threshold: f64 },

    #[error("decomposition stopped after {terms} terms with residual mass {residual_mass:e}")]
    TermsExhausted { terms: usize, residual_mass: f64 },

    #[error("power {t} drifted off the polytope: residual {residual:e} > allowed {allowed:e}")]
    Drift { t: usize, residual: f64, allowed: f64 },

    #[error("{name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("unsupported order {0} for the brute-force oracle (expected 2 or 3)")]
    UnsupportedOrder(usize),
}

impl Error {
    /// True for failures of an iterative or combinatorial procedure, as
    /// opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NoPerfectMatching { .. }
                | Error::TermsExhausted { .. }
                | Error::Drift { .. }
        )
    }
}
