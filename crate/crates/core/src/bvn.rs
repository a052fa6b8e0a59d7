//! Birkhoff-von Neumann decomposition by repeated perfect matching on the
//! positive support.

use crate::error::{Error, Result};
use crate::generate::Permutation;
use crate::matrix::{classify, DenseMatrix, ToleranceConfig};

/// Untransferred weight above this is reported as a failure.
const MASS_TOL: f64 = 1e-8;

/// Largest number of terms any decomposition needs: `(n-1)² + 1`.
pub fn max_terms_bound(n: usize) -> usize {
    (n * n + 2).saturating_sub(2 * n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BvnDecomposition {
    pub n: usize,
    pub terms: Vec<(f64, Permutation)>,
    /// `1 - Σ weights` at termination, floored at 0.
    pub residual_mass: f64,
}

impl BvnDecomposition {
    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().fold(0.0, |acc, (w, _)| acc + w)
    }

    /// The decomposition is a single vertex: one term, weight within
    /// `sum_tol` of 1.
    pub fn is_single_vertex(&self, tol: &ToleranceConfig) -> bool {
        matches!(self.terms.as_slice(), [(w, _)] if (w - 1.0).abs() <= tol.sum_tol)
    }
}

struct Kuhn<'a> {
    adj: &'a [Vec<usize>],
    owner: Vec<Option<usize>>,
    visited: Vec<bool>,
}

impl Kuhn<'_> {
    // Prefer a free column (ascending) before displacing anyone; then try
    // augmenting paths through columns in ascending order.
    fn augment(&mut self, row: usize) -> bool {
        if let Some(&c) = self.adj[row].iter().find(|&&c| self.owner[c].is_none()) {
            self.owner[c] = Some(row);
            return true;
        }
        for &c in &self.adj[row] {
            if self.visited[c] {
                continue;
            }
            self.visited[c] = true;
            let other = self.owner[c].expect("non-free column has an owner");
            if self.augment(other) {
                self.owner[c] = Some(row);
                return true;
            }
        }
        false
    }
}

/// Perfect matching on the bipartite graph of entries `> threshold`.
///
/// Rows are inserted in ascending order. Each insertion first takes the
/// lowest free column it is adjacent to, and only otherwise searches for an
/// augmenting path, scanning columns in ascending order.
pub fn support_matching(b: &DenseMatrix, threshold: f64) -> Result<Permutation> {
    let n = b.n();
    let adj: Vec<Vec<usize>> = b
        .rows()
        .map(|row| (0..n).filter(|&j| row[j] > threshold).collect())
        .collect();
    let mut kuhn = Kuhn { adj: &adj, owner: vec![None; n], visited: vec![false; n] };
    for row in 0..n {
        kuhn.visited.iter_mut().for_each(|v| *v = false);
        if !kuhn.augment(row) {
            return Err(Error::NoPerfectMatching { row, threshold });
        }
    }
    let mut map = vec![0; n];
    for (col, owner) in kuhn.owner.iter().enumerate() {
        map[owner.expect("perfect matching")] = col;
    }
    Permutation::new(map)
}

/// Greedy decomposition: match on the support above `zero_tol`, peel off the
/// smallest matched entry times that permutation matrix, and repeat until the
/// largest residual entry drops below `zero_tol·n` or `max_terms` is hit.
///
/// When the leftover is floating-point dust (untransferred mass at most
/// `1e-8`) a failed matching ends the loop instead of erroring.
pub fn bvn_decompose(b: &DenseMatrix, tol: &ToleranceConfig, max_terms: usize) -> Result<BvnDecomposition> {
    let report = classify(b, tol);
    if !report.is_bistochastic {
        return Err(Error::NotBistochastic { residual: report.max_sum_residual });
    }
    let n = b.n();
    let stop_below = tol.zero_tol * n as f64;
    let mut residual = b.clone();
    let mut terms: Vec<(f64, Permutation)> = Vec::new();
    let mut transferred = 0.0;

    loop {
        let max_entry = residual.entries().iter().copied().fold(0.0, f64::max);
        if max_entry < stop_below || terms.len() >= max_terms {
            break;
        }
        let sigma = match support_matching(&residual, tol.zero_tol) {
            Ok(p) => p,
            Err(_) if 1.0 - transferred <= MASS_TOL => break,
            Err(e) => return Err(e),
        };
        let (argmin_row, weight) = sigma
            .map()
            .iter()
            .enumerate()
            .map(|(i, &j)| (i, residual[(i, j)]))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });

        let entries = residual.entries_mut();
        for (i, &j) in sigma.map().iter().enumerate() {
            let cell = &mut entries[i * n + j];
            *cell -= weight;
            if i == argmin_row || (*cell < 0.0 && *cell >= -1e-15) {
                *cell = 0.0;
            }
        }
        transferred += weight;
        terms.push((weight, sigma));
    }

    let residual_mass = (1.0 - transferred).max(0.0);
    if terms.len() >= max_terms && residual_mass > MASS_TOL {
        return Err(Error::TermsExhausted { terms: terms.len(), residual_mass });
    }
    Ok(BvnDecomposition { n, terms, residual_mass })
}

/// `Σ wᵢ P(σᵢ)` in term order.
pub fn recompose(d: &BvnDecomposition) -> DenseMatrix {
    let n = d.n;
    let mut entries = vec![0.0; n * n];
    for (w, p) in &d.terms {
        for (i, &j) in p.map().iter().enumerate() {
            entries[i * n + j] += w;
        }
    }
    DenseMatrix::new(n, entries).expect("non-negative weights give a valid matrix")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{permutation_matrix, uniform_matrix};

    fn perm(map: &[usize]) -> Permutation {
        Permutation::new(map.to_vec()).unwrap()
    }

    fn worked_example() -> DenseMatrix {
        DenseMatrix::from_rows(&[
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            [0.0, 2.0 / 3.0, 1.0 / 3.0],
            [2.0 / 3.0, 0.0, 1.0 / 3.0],
        ])
        .unwrap()
    }

    #[test]
    fn matching_examples() {
        let id = DenseMatrix::identity(3).unwrap();
        assert_eq!(support_matching(&id, 1e-12).unwrap(), perm(&[0, 1, 2]));
        assert_eq!(support_matching(&worked_example(), 1e-12).unwrap(), perm(&[0, 1, 2]));
        assert!(matches!(
            support_matching(&uniform_matrix(2).unwrap(), 0.6),
            Err(Error::NoPerfectMatching { row: 0, .. })
        ));
    }

    #[test]
    fn matching_needs_augmenting_path() {
        // Row 0 grabs column 0 first; row 1 only fits column 0, so row 0 must move.
        let b = DenseMatrix::from_rows(&[[0.5, 0.5], [1.0, 0.0]]).unwrap();
        assert_eq!(support_matching(&b, 1e-12).unwrap(), perm(&[1, 0]));
    }

    #[test]
    fn decompose_examples() {
        let tol = ToleranceConfig::default();
        let s = perm(&[1, 2, 0]);
        let d = bvn_decompose(&permutation_matrix(&s), &tol, max_terms_bound(3)).unwrap();
        assert_eq!(d.terms, vec![(1.0, s.clone())]);
        assert_eq!(d.residual_mass, 0.0);
        assert!(d.is_single_vertex(&tol));
        assert_eq!(recompose(&d), permutation_matrix(&s));

        let b = worked_example();
        let d = bvn_decompose(&b, &tol, max_terms_bound(3)).unwrap();
        let maps: Vec<&[usize]> = d.terms.iter().map(|(_, p)| p.map()).collect();
        assert_eq!(maps, vec![&[0, 1, 2][..], &[1, 2, 0], &[2, 1, 0]]);
        for (w, _) in &d.terms {
            assert!((w - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(recompose(&d).max_abs_diff(&b).unwrap() <= 1e-12);
        assert!(!d.is_single_vertex(&tol));

        let d = bvn_decompose(&uniform_matrix(2).unwrap(), &tol, max_terms_bound(2)).unwrap();
        assert_eq!(d.terms, vec![(0.5, perm(&[0, 1])), (0.5, perm(&[1, 0]))]);
    }

    #[test]
    fn decompose_rejects_non_bistochastic() {
        let a = DenseMatrix::from_rows(&[[0.5, 0.0], [0.5, 0.5]]).unwrap();
        assert!(matches!(
            bvn_decompose(&a, &ToleranceConfig::default(), 10),
            Err(Error::NotBistochastic { .. })
        ));
    }

    #[test]
    fn decompose_reports_exhaustion() {
        let err = bvn_decompose(&worked_example(), &ToleranceConfig::default(), 1).unwrap_err();
        assert!(matches!(err, Error::TermsExhausted { terms: 1, .. }));
    }

    #[test]
    fn term_bound() {
        assert_eq!(max_terms_bound(1), 1);
        assert_eq!(max_terms_bound(2), 2);
        assert_eq!(max_terms_bound(3), 5);
        assert_eq!(max_terms_bound(10), 82);
    }
}
