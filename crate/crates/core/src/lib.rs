//! Matching factor of bistochastic and *-positive matrices.
//!
//! For a bistochastic matrix `B` of order `n`, the matching factor
//! `M(B) = Π_k ‖B_k·‖² ‖B_·k‖²` satisfies `n^(-2n) ≤ M(B) ≤ 1`, with the upper
//! bound reached exactly at permutation matrices and the lower bound exactly
//! at the uniform matrix. A normalized variant `M*` extends this to any
//! non-negative matrix with a positive entry in every row and column.
//!
//! Modules:
//! - [`matrix`]: dense storage, marginals, class membership tests
//! - [`factor`]: `λ(k)`, `M`, `M*`, bounds, extreme-point classification
//! - [`generate`]: seeded generators and Sinkhorn-Knopp balancing
//! - [`bvn`]: Birkhoff-von Neumann decomposition
//! - [`analysis`]: Markov-power trajectories, proximity score, scan oracles

pub mod analysis;
pub mod bvn;
pub mod error;
pub mod factor;
pub mod generate;
pub mod matrix;

pub use analysis::{
    closed_form_m_n2, oracle_grid_scan, permutation_proximity, power_trajectory, OracleResult,
    TrajectoryRecord,
};
pub use bvn::{bvn_decompose, max_terms_bound, recompose, support_matching, BvnDecomposition};
pub use error::{Error, Result};
pub use factor::{
    bound_slack, classify_extreme, lambda_k, lemma_predicates, matching_factor, star_lambda_k,
    star_matching_factor, theorem_bounds, ExtremeClass, ExtremeKind, LemmaMode, LemmaVerdict,
    MatchingProfile, Variant,
};
pub use generate::{
    convex_combination, permutation_matrix, random_bistochastic, random_permutation,
    random_star_positive, scale, sinkhorn, star_permutation_random, star_uniform, uniform_matrix,
    Permutation, SinkhornConfig, SinkhornOutcome,
};
pub use matrix::{classify, marginals, ClassificationReport, DenseMatrix, Marginals, ToleranceConfig};
