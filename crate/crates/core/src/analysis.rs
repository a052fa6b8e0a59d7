//! Markov-power trajectories, a permutation-proximity score, and brute-force
//! scans of the matching factor over small Birkhoff polytopes.

use rand::Rng;

use crate::error::{Error, Result};
use crate::factor::{matching_factor, theorem_bounds, MatchingProfile};
use crate::generate::{convex_combination, permutation_matrix, seeded_rng, uniform_matrix, Permutation};
use crate::matrix::{classify, marginals, DenseMatrix, ToleranceConfig};

/// Per-step, per-order allowance for sum drift in repeated products.
const DRIFT_PER_STEP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub n: usize,
    /// `(t, log M(B^t))` for `t = 1..=t_max`.
    pub samples: Vec<(usize, f64)>,
    pub converged: bool,
}

impl TrajectoryRecord {
    pub fn final_log_m(&self) -> Option<f64> {
        self.samples.last().map(|&(_, l)| l)
    }
}

/// Records `log M(B^t)` for `t = 1..=t_max`, with `B^t = B^(t-1)·B`.
///
/// Each power is re-validated: its largest sum residual may not exceed
/// `t·(r₀ + 1e-12·n)`, where `r₀` is the residual of `B` itself. A chain
/// whose input sums are off by `r₀` drifts by about `t·r₀` after `t`
/// products, and each product adds rounding of order `n·ε`.
///
/// `converged` reports whether the last sample is within `limit_tol` of
/// `-2n ln n`.
pub fn power_trajectory(
    b: &DenseMatrix,
    t_max: usize,
    tol: &ToleranceConfig,
    limit_tol: f64,
) -> Result<TrajectoryRecord> {
    if t_max == 0 {
        return Err(Error::OutOfRange { name: "t_max", value: 0.0 });
    }
    let report = classify(b, tol);
    if !report.is_bistochastic {
        return Err(Error::NotBistochastic { residual: report.max_sum_residual });
    }
    let n = b.n();
    let per_step = report.max_sum_residual + DRIFT_PER_STEP * n as f64;
    let mut power = b.clone();
    let mut samples = Vec::with_capacity(t_max);
    for t in 1..=t_max {
        if t > 1 {
            power = power.matmul(b)?;
            let residual = marginals(&power).max_sum_residual();
            let allowed = t as f64 * per_step;
            if residual > allowed {
                return Err(Error::Drift { t, residual, allowed });
            }
        }
        samples.push((t, matching_factor(&power)?.log_m));
    }
    let (lower, _) = theorem_bounds(n)?;
    let converged = samples.last().is_some_and(|&(_, l)| (l - lower).abs() < limit_tol);
    Ok(TrajectoryRecord { n, samples, converged })
}

/// `ρ = 1 + log M / (2n ln n)` clamped to `[0, 1]`: 1 at permutation
/// matrices, 0 at the uniform matrix. Order 1 maps to 1.
pub fn permutation_proximity(profile: &MatchingProfile) -> f64 {
    if profile.n <= 1 {
        return 1.0;
    }
    let n = profile.n as f64;
    (1.0 + profile.log_m / (2.0 * n * n.ln())).clamp(0.0, 1.0)
}

/// `M([[p, 1-p], [1-p, p]]) = (p² + (1-p)²)⁴`. Every 2×2 bistochastic matrix
/// has this form.
pub fn closed_form_m_n2(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { name: "p", value: p });
    }
    let s = p * p + (1.0 - p) * (1.0 - p);
    Ok((s * s) * (s * s))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub min_log_m: f64,
    pub max_log_m: f64,
    /// The minimum is attained at the uniform point and nowhere else scanned.
    pub argmin_is_uniform: bool,
    /// The maximum is attained at permutation matrices and nowhere else scanned.
    pub argmax_is_vertex: bool,
    pub points_scanned: usize,
    /// Points whose `log M` left `[-2n ln n - 1e-9, 1e-9]`.
    pub bound_violations: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum PointKind {
    Vertex,
    Uniform,
    Other,
}

#[derive(Default)]
struct Extremes {
    min: Option<(f64, bool)>,
    max: Option<(f64, bool)>,
    min_only_uniform: bool,
    max_only_vertex: bool,
    points: usize,
    violations: usize,
}

impl Extremes {
    fn push(&mut self, log_m: f64, kind: PointKind, lower: f64) {
        self.points += 1;
        if log_m < lower - 1e-9 || log_m > 1e-9 {
            self.violations += 1;
        }
        let uniform = kind == PointKind::Uniform;
        match self.min {
            Some((m, _)) if log_m > m => {}
            Some((m, only)) if log_m == m => self.min = Some((m, only && uniform)),
            _ => self.min = Some((log_m, uniform)),
        }
        let vertex = kind == PointKind::Vertex;
        match self.max {
            Some((m, _)) if log_m < m => {}
            Some((m, only)) if log_m == m => self.max = Some((m, only && vertex)),
            _ => self.max = Some((log_m, vertex)),
        }
        self.min_only_uniform = self.min.is_some_and(|(_, u)| u);
        self.max_only_vertex = self.max.is_some_and(|(_, v)| v);
    }

    fn finish(self) -> OracleResult {
        OracleResult {
            min_log_m: self.min.map_or(f64::NAN, |(m, _)| m),
            max_log_m: self.max.map_or(f64::NAN, |(m, _)| m),
            argmin_is_uniform: self.min_only_uniform,
            argmax_is_vertex: self.max_only_vertex,
            points_scanned: self.points,
            bound_violations: self.violations,
        }
    }
}

fn all_permutations(n: usize) -> Vec<Permutation> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
        if prefix.len() == used.len() {
            out.push(Permutation::new(prefix.clone()).expect("bijection by construction"));
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                prefix.push(c);
                extend(prefix, used, out);
                prefix.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Brute-force scan of `log M` over the Birkhoff polytope of order 2 or 3.
///
/// For `n = 2`, sweeps `p` over `resolution` evenly spaced points of `[0, 1]`
/// using [`closed_form_m_n2`]. For `n = 3`, evaluates all six vertices, the
/// uniform matrix, and `resolution` random convex combinations of the six
/// vertices with weights `-ln U` normalized to sum 1 (flat Dirichlet).
pub fn oracle_grid_scan(n: usize, resolution: usize, seed: u64) -> Result<OracleResult> {
    if resolution < 2 {
        return Err(Error::OutOfRange { name: "resolution", value: resolution as f64 });
    }
    let (lower, _) = theorem_bounds(n.max(1))?;
    let mut ext = Extremes::default();
    match n {
        2 => {
            let last = (resolution - 1) as f64;
            for i in 0..resolution {
                let p = i as f64 / last;
                let kind = if p == 0.0 || p == 1.0 {
                    PointKind::Vertex
                } else if p == 0.5 {
                    PointKind::Uniform
                } else {
                    PointKind::Other
                };
                let s = p * p + (1.0 - p) * (1.0 - p);
                ext.push(4.0 * s.ln(), kind, lower);
            }
        }
        3 => {
            let vertices = all_permutations(3);
            for v in &vertices {
                ext.push(matching_factor(&permutation_matrix(v))?.log_m, PointKind::Vertex, lower);
            }
            ext.push(matching_factor(&uniform_matrix(3)?)?.log_m, PointKind::Uniform, lower);

            let mut rng = seeded_rng(seed);
            for _ in 0..resolution {
                let raw: Vec<f64> = (0..vertices.len()).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
                let total: f64 = raw.iter().sum();
                let mut terms: Vec<(f64, Permutation)> =
                    raw.iter().zip(&vertices).map(|(w, p)| (w / total, p.clone())).collect();
                // Push the rounding error of the normalization into the last weight.
                let head: f64 = terms[..terms.len() - 1].iter().map(|(w, _)| w).sum();
                terms.last_mut().expect("six vertices").0 = (1.0 - head).max(0.0);
                let b = convex_combination(&terms)?;
                ext.push(matching_factor(&b)?.log_m, PointKind::Other, lower);
            }
        }
        other => return Err(Error::UnsupportedOrder(other)),
    }
    Ok(ext.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::Variant;
    use crate::generate::{random_bistochastic, SinkhornConfig};

    fn worked_example() -> DenseMatrix {
        DenseMatrix::from_rows(&[
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            [0.0, 2.0 / 3.0, 1.0 / 3.0],
            [2.0 / 3.0, 0.0, 1.0 / 3.0],
        ])
        .unwrap()
    }

    /// Independent route for log M: λ from explicit loops, then ln of each.
    fn oracle_log_m(rows: &[Vec<f64>]) -> f64 {
        let n = rows.len();
        let mut total = 0.0;
        for k in 0..n {
            let r: f64 = rows[k].iter().map(|v| v * v).sum();
            let c: f64 = (0..n).map(|i| rows[i][k] * rows[i][k]).sum();
            total += (r * c).ln();
        }
        total
    }

    #[test]
    fn trajectory_of_permutation_is_flat() {
        let p = permutation_matrix(&Permutation::new(vec![1, 2, 0]).unwrap());
        let rec = power_trajectory(&p, 10, &ToleranceConfig::default(), 1e-3).unwrap();
        assert_eq!(rec.samples.len(), 10);
        assert!(rec.samples.iter().all(|&(_, l)| l == 0.0));
        assert!(rec.samples.iter().enumerate().all(|(i, &(t, _))| t == i + 1));
        assert!(!rec.converged);
    }

    #[test]
    fn trajectory_of_worked_example() {
        let rec = power_trajectory(&worked_example(), 2, &ToleranceConfig::default(), 1e-3).unwrap();
        assert!((rec.samples[0].1 - (625.0f64 / 59049.0).ln()).abs() < 1e-12);
        // B² computed by hand.
        let b2 = vec![
            vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            vec![2.0 / 9.0, 4.0 / 9.0, 1.0 / 3.0],
            vec![4.0 / 9.0, 2.0 / 9.0, 1.0 / 3.0],
        ];
        let expect = oracle_log_m(&b2);
        assert!((expect - (707281.0f64 / 387420489.0).ln()).abs() < 1e-12);
        assert!((rec.samples[1].1 - expect).abs() < 1e-12);
        assert!((rec.samples[1].1 + 6.305837876080078).abs() < 1e-12);
    }

    #[test]
    fn trajectory_reaches_uniform_limit() {
        let b = random_bistochastic(4, 2024, &SinkhornConfig::default()).unwrap();
        let rec = power_trajectory(&b, 100, &ToleranceConfig::default(), 1e-3).unwrap();
        assert!(rec.converged);
        assert!((rec.final_log_m().unwrap() + 8.0 * 4f64.ln()).abs() < 1e-3);
    }

    #[test]
    fn trajectory_errors() {
        let tol = ToleranceConfig::default();
        assert!(power_trajectory(&worked_example(), 0, &tol, 1e-3).is_err());
        let a = DenseMatrix::from_rows(&[[0.5, 0.0], [0.5, 0.5]]).unwrap();
        assert!(matches!(power_trajectory(&a, 3, &tol, 1e-3), Err(Error::NotBistochastic { .. })));
    }

    #[test]
    fn proximity() {
        let prof = |b: &DenseMatrix| matching_factor(b).unwrap();
        let p = permutation_matrix(&Permutation::new(vec![1, 0, 2]).unwrap());
        assert_eq!(permutation_proximity(&prof(&p)), 1.0);
        assert!(permutation_proximity(&prof(&uniform_matrix(5).unwrap())).abs() < 1e-15);
        let rho = permutation_proximity(&prof(&worked_example()));
        assert!((rho - (1.0 + (625.0f64 / 59049.0).ln() / (6.0 * 3f64.ln()))).abs() < 1e-15);
        assert!((rho - 0.3100).abs() < 1e-4);
        assert_eq!(permutation_proximity(&prof(&uniform_matrix(1).unwrap())), 1.0);
        assert_eq!(prof(&p).variant, Variant::Plain);
    }

    #[test]
    fn closed_form() {
        assert_eq!(closed_form_m_n2(0.0).unwrap(), 1.0);
        assert_eq!(closed_form_m_n2(1.0).unwrap(), 1.0);
        assert_eq!(closed_form_m_n2(0.5).unwrap(), 1.0 / 16.0);
        assert_eq!(closed_form_m_n2(0.25).unwrap(), 0.152587890625);
        assert!(closed_form_m_n2(1.5).is_err());
        assert!(closed_form_m_n2(f64::NAN).is_err());
    }

    #[test]
    fn scan_n2() {
        let r = oracle_grid_scan(2, 101, 0).unwrap();
        assert_eq!(r.max_log_m, 0.0);
        assert_eq!(r.min_log_m, -4.0 * 2f64.ln());
        assert!(r.argmin_is_uniform && r.argmax_is_vertex);
        assert_eq!(r.points_scanned, 101);
        assert_eq!(r.bound_violations, 0);

        // p = 0.5 is not on an even grid.
        let r = oracle_grid_scan(2, 100, 0).unwrap();
        assert!(!r.argmin_is_uniform && r.argmax_is_vertex);
    }

    #[test]
    fn scan_n3() {
        let r = oracle_grid_scan(3, 2000, 9).unwrap();
        assert_eq!(r.points_scanned, 2007);
        assert_eq!(r.max_log_m, 0.0);
        assert!(r.argmax_is_vertex && r.argmin_is_uniform);
        assert!((r.min_log_m + 6.0 * 3f64.ln()).abs() < 1e-12);
        assert_eq!(r.bound_violations, 0);
    }

    #[test]
    fn scan_errors() {
        assert_eq!(oracle_grid_scan(4, 10, 0), Err(Error::UnsupportedOrder(4)));
        assert!(oracle_grid_scan(2, 1, 0).is_err());
    }

    #[test]
    fn enumerates_symmetric_group() {
        assert_eq!(all_permutations(3).len(), 6);
        assert_eq!(all_permutations(4).len(), 24);
    }
}
