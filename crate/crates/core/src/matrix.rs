//! Dense non-negative square matrices, their marginals, and membership tests
//! for the bistochastic family and its `*` generalizations.
//!
//! All reductions accumulate sequentially in ascending index order so that
//! results are bit-reproducible.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

/// An `n x n` matrix of finite non-negative reals stored row-major.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries, rejecting anything that is not
    /// a finite non-negative number.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroOrder);
        }
        let expected = n.checked_mul(n).ok_or(Error::ZeroOrder)?;
        if entries.len() != expected {
            return Err(Error::WrongLength { n, expected, got: entries.len() });
        }
        if let Some((idx, &value)) = entries
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidEntry { row: idx / n, col: idx % n, value });
        }
        Ok(Self { n, entries })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::WrongLength { n, expected: n * n, got: row.len() * n });
            }
            entries.extend_from_slice(row);
        }
        Self::new(n, entries)
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Result<Self> {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self::new(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.entries[i * self.n + j])
    }

    /// Largest `|a - b|` over all entries; `None` if the orders differ.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Option<f64> {
        (self.n == other.n).then(|| {
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }

    /// Matrix product `self * rhs` with ascending-index accumulation.
    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n != rhs.n {
            return Err(Error::OrderMismatch { expected: self.n, got: rhs.n });
        }
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.entries[i * n + k] * rhs.entries[k * n + j];
                }
                out[i * n + j] = acc;
            }
        }
        DenseMatrix::new(n, out)
    }

    /// Applies the same permutation to rows and columns: `out[i][j] = self[p[i]][p[j]]`.
    pub fn conjugate(&self, perm: &[usize]) -> Result<DenseMatrix> {
        if perm.len() != self.n {
            return Err(Error::OrderMismatch { expected: self.n, got: perm.len() });
        }
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for &pi in perm {
            for &pj in perm {
                out.push(self[(pi, pj)]);
            }
        }
        DenseMatrix::new(n, out)
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [f64] {
        &mut self.entries
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.n + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// Row/column sums and squared Euclidean norms.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub row_sums: Vec<f64>,
    pub col_sums: Vec<f64>,
    pub row_norms_sq: Vec<f64>,
    pub col_norms_sq: Vec<f64>,
}

impl Marginals {
    /// Largest `|s - 1|` over all 2n row and column sums.
    pub fn max_sum_residual(&self) -> f64 {
        self.row_sums
            .iter()
            .chain(&self.col_sums)
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

pub fn marginals(m: &DenseMatrix) -> Marginals {
    let n = m.n();
    let mut row_sums = vec![0.0; n];
    let mut col_sums = vec![0.0; n];
    let mut row_norms_sq = vec![0.0; n];
    let mut col_norms_sq = vec![0.0; n];
    // i outer, j inner: both row and column accumulators see ascending indices.
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            row_sums[i] += v;
            row_norms_sq[i] += v * v;
            col_sums[j] += v;
            col_norms_sq[j] += v * v;
        }
    }
    Marginals { row_sums, col_sums, row_norms_sq, col_norms_sq }
}

/// Absolute tolerances used by every membership test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Allowed deviation of a row or column sum from 1.
    pub sum_tol: f64,
    /// Entries at or below this count as zero in structural tests.
    pub zero_tol: f64,
    /// Log-space band used when recognizing extreme points from `log M`.
    pub class_log_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { sum_tol: 1e-9, zero_tol: 1e-12, class_log_tol: 1e-9 }
    }
}

impl ToleranceConfig {
    pub fn new(sum_tol: f64, zero_tol: f64, class_log_tol: f64) -> Result<Self> {
        for (name, value) in [("sum_tol", sum_tol), ("zero_tol", zero_tol), ("class_log_tol", class_log_tol)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::OutOfRange { name, value });
            }
        }
        Ok(Self { sum_tol, zero_tol, class_log_tol })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationReport {
    pub is_nonnegative: bool,
    pub is_bistochastic: bool,
    pub is_star_positive: bool,
    pub is_permutation: bool,
    pub is_star_permutation: bool,
    pub is_uniform: bool,
    pub is_star_uniform: bool,
    pub max_sum_residual: f64,
}

/// Tests membership in all six classes at once.
///
/// `is_star_uniform` also accepts matrices that pass the (looser) uniform
/// test, so that uniform always implies star-uniform.
pub fn classify(m: &DenseMatrix, tol: &ToleranceConfig) -> ClassificationReport {
    let n = m.n();
    let marg = marginals(m);
    let max_sum_residual = marg.max_sum_residual();
    let is_bistochastic = max_sum_residual <= tol.sum_tol;

    let mut row_support = vec![0usize; n];
    let mut col_support = vec![0usize; n];
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            if v > tol.zero_tol {
                row_support[i] += 1;
                col_support[j] += 1;
            }
            min = min.min(v);
            max = max.max(v);
        }
    }

    let is_star_positive = row_support.iter().chain(&col_support).all(|&c| c >= 1);
    let is_star_permutation = row_support.iter().chain(&col_support).all(|&c| c == 1);
    let is_permutation = is_bistochastic
        && is_star_permutation
        && m.entries()
            .iter()
            .filter(|&&v| v > tol.zero_tol)
            .all(|v| (v - 1.0).abs() <= tol.sum_tol);

    let target = 1.0 / n as f64;
    let is_uniform =
        is_bistochastic && m.entries().iter().all(|v| (v - target).abs() <= tol.sum_tol);
    let is_star_uniform = is_star_positive && (max - min <= tol.zero_tol || is_uniform);

    ClassificationReport {
        is_nonnegative: true,
        is_bistochastic,
        is_star_positive,
        is_permutation,
        is_star_permutation,
        is_uniform,
        is_star_uniform,
        max_sum_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_example() -> DenseMatrix {
        DenseMatrix::from_rows(&[
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            [0.0, 2.0 / 3.0, 1.0 / 3.0],
            [2.0 / 3.0, 0.0, 1.0 / 3.0],
        ])
        .unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(DenseMatrix::new(1, vec![1.0]).unwrap().entries(), &[1.0]);
        assert!(matches!(
            DenseMatrix::new(2, vec![1.0, -0.5, 0.0, 1.0]),
            Err(Error::InvalidEntry { row: 0, col: 1, .. })
        ));
        assert!(matches!(DenseMatrix::new(2, vec![1.0; 3]), Err(Error::WrongLength { .. })));
        assert!(matches!(DenseMatrix::new(1, vec![f64::NAN]), Err(Error::InvalidEntry { .. })));
        assert!(matches!(DenseMatrix::new(1, vec![f64::INFINITY]), Err(Error::InvalidEntry { .. })));
        assert_eq!(DenseMatrix::new(0, vec![]), Err(Error::ZeroOrder));
        assert!(DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0]]).is_err());
    }

    #[test]
    fn marginals_of_identity_and_uniform() {
        let m = marginals(&DenseMatrix::identity(2).unwrap());
        assert_eq!(m.row_sums, vec![1.0, 1.0]);
        assert_eq!(m.col_norms_sq, vec![1.0, 1.0]);

        let u = DenseMatrix::new(3, vec![1.0 / 3.0; 9]).unwrap();
        let m = marginals(&u);
        for k in 0..3 {
            assert!((m.row_sums[k] - 1.0).abs() < 1e-15);
            assert!((m.col_norms_sq[k] - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn marginals_of_worked_example() {
        let m = marginals(&worked_example());
        let expect_rows = [1.0 / 3.0, 5.0 / 9.0, 5.0 / 9.0];
        let expect_cols = [5.0 / 9.0, 5.0 / 9.0, 1.0 / 3.0];
        for k in 0..3 {
            assert!((m.row_norms_sq[k] - expect_rows[k]).abs() < 1e-15);
            assert!((m.col_norms_sq[k] - expect_cols[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn classify_worked_examples() {
        let tol = ToleranceConfig::default();
        let p = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let r = classify(&p, &tol);
        assert!(r.is_permutation && r.is_bistochastic && r.is_star_permutation);
        assert!(!r.is_uniform);

        let a = DenseMatrix::from_rows(&[[0.5, 0.0], [0.5, 0.5]]).unwrap();
        let r = classify(&a, &tol);
        assert!(r.is_star_positive && !r.is_bistochastic && !r.is_star_permutation);

        let s = DenseMatrix::from_rows(&[[1.0 / 6.0; 2]; 2]).unwrap();
        let r = classify(&s, &tol);
        assert!(r.is_star_uniform && !r.is_uniform && !r.is_bistochastic);

        let sp = DenseMatrix::from_rows(&[[1.0 / 7.0, 0.0, 0.0], [0.0, 0.0, 5.0], [0.0, 0.2, 0.0]])
            .unwrap();
        let r = classify(&sp, &tol);
        assert!(r.is_star_permutation && !r.is_permutation);

        let r = classify(&worked_example(), &tol);
        assert!(r.is_bistochastic && !r.is_permutation && !r.is_uniform && !r.is_star_uniform);
    }

    #[test]
    fn order_one_is_both_permutation_and_uniform() {
        let r = classify(&DenseMatrix::new(1, vec![1.0]).unwrap(), &ToleranceConfig::default());
        assert!(r.is_permutation && r.is_uniform && r.is_star_uniform && r.is_star_permutation);
    }

    #[test]
    fn zero_row_is_not_star_positive() {
        let m = DenseMatrix::from_rows(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let r = classify(&m, &ToleranceConfig::default());
        assert!(!r.is_star_positive && !r.is_star_uniform);
    }

    #[test]
    fn tolerance_config_rejects_non_positive() {
        assert!(ToleranceConfig::new(0.0, 1e-12, 1e-9).is_err());
        assert!(ToleranceConfig::new(1e-9, f64::NAN, 1e-9).is_err());
        assert!(ToleranceConfig::new(1e-9, 1e-12, 1e-9).is_ok());
    }
}
