//! The matching factor.
//!
//! For a bistochastic `B` of order `n`, `λ(k) = ‖B_k·‖² · ‖B_·k‖²` pairs the
//! squared norm of row `k` with that of column `k`, and `M(B) = Π λ(k)`.
//! `M` lies in `[n^(-2n), 1]`; the maximum is attained exactly at permutation
//! matrices and the minimum exactly at the uniform matrix.
//!
//! The `*` variant divides each squared norm by its squared sum, which
//! extends the same bounds and extremal characterization to every
//! non-negative matrix with a positive entry in each row and column.
//!
//! Products of `2n` norms underflow quickly (`n^(-2n)` is below the smallest
//! binary64 near `n = 82`), so `M` is always accumulated as `Σ ln λ(k)` in
//! ascending `k`; the linear value is only `exp` of that sum.

use crate::error::{Error, Result};
use crate::generate::Permutation;
use crate::matrix::{classify, marginals, DenseMatrix, ToleranceConfig};

/// Per-index slack for `λ(k) ∈ [1/n², 1]` on inputs validated at the default
/// `sum_tol`.
pub const LAMBDA_SLACK: f64 = 1e-7;

/// Slack applied to both ends of `[-2n ln n, 0]` when checking `log M`.
///
/// With every row and column sum within `s` of 1, each squared norm moves by
/// at most a factor `(1 ± s)²`, so `ln λ(k)` moves by at most `≈ 4s` and
/// `log M` by `≈ 4ns`. At `s = 1e-9` that is `4e-9·n`; `1e-6·n` leaves
/// headroom for accumulated rounding.
pub fn bound_slack(n: usize) -> f64 {
    n as f64 * 1e-6
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Plain,
    Star,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchingProfile {
    pub n: usize,
    pub lambdas: Vec<f64>,
    pub log_lambdas: Vec<f64>,
    /// `Σ log_lambdas`, ascending order.
    pub log_m: f64,
    /// `exp(log_m)`; underflows to 0 for large `n`, which is harmless.
    pub m_linear: f64,
    pub log_lower_bound: f64,
    pub log_upper_bound: f64,
    pub variant: Variant,
}

impl MatchingProfile {
    fn from_lambdas(lambdas: Vec<f64>, variant: Variant) -> Result<Self> {
        let n = lambdas.len();
        if let Some(k) = lambdas.iter().position(|&l| l <= 0.0) {
            return Err(Error::ZeroLambda { k });
        }
        let log_lambdas: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
        let log_m = log_lambdas.iter().fold(0.0, |acc, l| acc + l);
        let (log_lower_bound, log_upper_bound) = theorem_bounds(n)?;
        Ok(Self {
            n,
            lambdas,
            log_lambdas,
            log_m,
            m_linear: log_m.exp(),
            log_lower_bound,
            log_upper_bound,
            variant,
        })
    }

    /// Whether `log_m` sits inside the theoretical bounds widened by
    /// [`bound_slack`].
    pub fn within_bounds(&self) -> bool {
        let slack = bound_slack(self.n);
        self.log_m >= self.log_lower_bound - slack && self.log_m <= self.log_upper_bound + slack
    }

    /// `exp(log_m)` if it is a normal binary64 value.
    pub fn m_linear_representable(&self) -> Option<f64> {
        self.m_linear.is_normal().then_some(self.m_linear)
    }
}

fn check_index(m: &DenseMatrix, k: usize) -> Result<()> {
    if k < m.n() {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: k, n: m.n() })
    }
}

fn norm_sq(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |acc, v| acc + v * v)
}

fn sum(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |acc, v| acc + v)
}

/// `λ(k) = ‖row k‖² · ‖column k‖²`.
pub fn lambda_k(b: &DenseMatrix, k: usize) -> Result<f64> {
    check_index(b, k)?;
    Ok(norm_sq(b.row(k).iter().copied()) * norm_sq(b.column(k)))
}

/// `M(B)` with every per-index factor. Fails if some `λ(k)` is zero, which
/// only happens when a row or column vanishes.
pub fn matching_factor(b: &DenseMatrix) -> Result<MatchingProfile> {
    let marg = marginals(b);
    let lambdas = marg
        .row_norms_sq
        .iter()
        .zip(&marg.col_norms_sq)
        .map(|(r, c)| r * c)
        .collect();
    MatchingProfile::from_lambdas(lambdas, Variant::Plain)
}

fn star_ratio(norm_row: f64, sum_row: f64, norm_col: f64, sum_col: f64, k: usize) -> Result<f64> {
    if !(sum_row > 0.0 && sum_col > 0.0) {
        return Err(Error::NotStarPositive { k });
    }
    Ok((norm_row / (sum_row * sum_row)) * (norm_col / (sum_col * sum_col)))
}

/// `λ*(k) = ‖A_k·‖² ‖A_·k‖² / ((Σ A_k·)² (Σ A_·k)²)`.
pub fn star_lambda_k(a: &DenseMatrix, k: usize) -> Result<f64> {
    check_index(a, k)?;
    star_ratio(
        norm_sq(a.row(k).iter().copied()),
        sum(a.row(k).iter().copied()),
        norm_sq(a.column(k)),
        sum(a.column(k)),
        k,
    )
}

/// `M*(A) = Π λ*(k)`. Same bounds as [`matching_factor`]; invariant under
/// a global positive rescaling of `A`.
pub fn star_matching_factor(a: &DenseMatrix) -> Result<MatchingProfile> {
    let marg = marginals(a);
    let lambdas = (0..a.n())
        .map(|k| {
            star_ratio(marg.row_norms_sq[k], marg.row_sums[k], marg.col_norms_sq[k], marg.col_sums[k], k)
        })
        .collect::<Result<Vec<_>>>()?;
    MatchingProfile::from_lambdas(lambdas, Variant::Star)
}

/// `(ln n^(-2n), ln 1) = (-2n ln n, 0)`.
pub fn theorem_bounds(n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::ZeroOrder);
    }
    let n = n as f64;
    // `0.0 -` keeps the n = 1 bound at +0.0 rather than -0.0.
    Ok((0.0 - 2.0 * n * n.ln(), 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaMode {
    /// Exactly one entry is 1, the rest 0 ⇔ `Σa² = (Σa)² = 1`.
    Unit,
    /// Exactly one entry is non-zero ⇔ `Σa² = (Σa)² > 0`.
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaVerdict {
    pub structural: bool,
    pub analytic: bool,
    pub mode: LemmaMode,
}

/// Evaluates both sides of the single-spike characterization of a
/// non-negative vector. Equalities are tested within `sum_tol`; "non-zero"
/// means above `zero_tol`.
pub fn lemma_predicates(a: &[f64], mode: LemmaMode, tol: &ToleranceConfig) -> Result<LemmaVerdict> {
    if let Some((index, &value)) = a.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
        return Err(Error::NegativeValue { index, value });
    }
    let mut nonzero = a.iter().filter(|&&v| v > tol.zero_tol);
    let spike = nonzero.next().copied();
    let single = spike.is_some() && nonzero.next().is_none();

    let sq = norm_sq(a.iter().copied());
    let s = sum(a.iter().copied());
    let equal = (sq - s * s).abs() <= tol.sum_tol;

    let (structural, analytic) = match mode {
        LemmaMode::Unit => (
            single && spike.is_some_and(|v| (v - 1.0).abs() <= tol.sum_tol),
            equal && (sq - 1.0).abs() <= tol.sum_tol && (s * s - 1.0).abs() <= tol.sum_tol,
        ),
        LemmaMode::Positive => (single, equal && s * s > tol.zero_tol),
    };
    Ok(LemmaVerdict { structural, analytic, mode })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremeKind {
    Permutation,
    Uniform,
    Interior,
    /// `n = 1`: the only matrix is both the permutation and the uniform one.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremeClass {
    pub kind: ExtremeKind,
    pub permutation: Option<Permutation>,
    pub log_m: f64,
}

fn row_argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = j;
        }
    }
    best
}

/// Decides whether a bistochastic matrix is a vertex, the centre, or neither,
/// from `log M`.
///
/// The scalar only nominates a candidate: a `log_m` within `class_log_tol`
/// of 0 triggers a structural check (per-row argmax forms a bijection whose
/// entries are within `sum_tol` of 1), and a `log_m` within `class_log_tol`
/// of the lower bound triggers an entrywise check against `1/n`. A failed
/// check yields `Interior`.
pub fn classify_extreme(b: &DenseMatrix, tol: &ToleranceConfig) -> Result<ExtremeClass> {
    let report = classify(b, tol);
    if !report.is_bistochastic {
        return Err(Error::NotBistochastic { residual: report.max_sum_residual });
    }
    let profile = matching_factor(b)?;
    let log_m = profile.log_m;
    let n = b.n();
    let interior = ExtremeClass { kind: ExtremeKind::Interior, permutation: None, log_m };

    if n == 1 {
        return Ok(ExtremeClass { kind: ExtremeKind::Degenerate, permutation: None, log_m });
    }
    if log_m >= -tol.class_log_tol {
        let map: Vec<usize> = b.rows().map(row_argmax).collect();
        let confirmed = map
            .iter()
            .enumerate()
            .all(|(i, &j)| (b[(i, j)] - 1.0).abs() <= tol.sum_tol);
        return Ok(match Permutation::new(map) {
            Ok(p) if confirmed => {
                ExtremeClass { kind: ExtremeKind::Permutation, permutation: Some(p), log_m }
            }
            _ => interior,
        });
    }
    if log_m <= profile.log_lower_bound + tol.class_log_tol {
        let target = 1.0 / n as f64;
        if b.entries().iter().all(|v| (v - target).abs() <= tol.sum_tol) {
            return Ok(ExtremeClass { kind: ExtremeKind::Uniform, permutation: None, log_m });
        }
    }
    Ok(interior)
}
