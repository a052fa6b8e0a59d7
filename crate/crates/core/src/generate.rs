//! Generators for every matrix class, Sinkhorn-Knopp balancing, and convex
//! combinations of permutation matrices.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`. There is no global generator: every call builds its own
//! stream from the caller's seed, so identical arguments give identical
//! matrices on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{marginals, DenseMatrix};

/// Builds the documented PRNG for `seed`.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A bijection on `0..n`; row `i` carries its unit entry in column `map[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        if n == 0 {
            return Err(Error::ZeroOrder);
        }
        let mut seen = vec![false; n];
        for &c in &map {
            if c >= n || std::mem::replace(&mut seen[c], true) {
                return Err(Error::InvalidPermutation { n });
            }
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new((0..n).collect())
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn into_map(self) -> Vec<usize> {
        self.map
    }

    /// Composition `self ∘ other`: row `i` goes to `self[other[i]]`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.n() != other.n() {
            return Err(Error::OrderMismatch { expected: self.n(), got: other.n() });
        }
        Permutation::new(other.map.iter().map(|&j| self.map[j]).collect())
    }
}

pub fn permutation_matrix(p: &Permutation) -> DenseMatrix {
    let n = p.n();
    let mut entries = vec![0.0; n * n];
    for (i, &j) in p.map().iter().enumerate() {
        entries[i * n + j] = 1.0;
    }
    DenseMatrix::new(n, entries).expect("0/1 entries of a valid order")
}

pub fn uniform_matrix(n: usize) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::ZeroOrder);
    }
    DenseMatrix::new(n, vec![1.0 / n as f64; n * n])
}

/// Fisher-Yates shuffle of the identity, driven by ChaCha8.
pub fn random_permutation(n: usize, seed: u64) -> Result<Permutation> {
    let mut rng = seeded_rng(seed);
    random_permutation_with(n, &mut rng)
}

pub(crate) fn random_permutation_with<R: Rng>(n: usize, rng: &mut R) -> Result<Permutation> {
    let mut map: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        map.swap(i, j);
    }
    Permutation::new(map)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornConfig {
    pub max_iters: usize,
    /// Stop once every row and column sum is within this of 1.
    pub convergence_tol: f64,
}

impl Default for SinkhornConfig {
    fn default() -> Self {
        Self { max_iters: 10_000, convergence_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SinkhornOutcome {
    pub matrix: DenseMatrix,
    pub iters_used: usize,
    pub final_residual: f64,
}

/// Alternating row-then-column normalization of a strictly positive matrix.
///
/// Convergence is measured after each column pass as the largest deviation
/// of any of the 2n sums from 1.
pub fn sinkhorn(a: &DenseMatrix, cfg: &SinkhornConfig) -> Result<SinkhornOutcome> {
    if cfg.convergence_tol.is_nan() || cfg.convergence_tol <= 0.0 {
        return Err(Error::OutOfRange { name: "convergence_tol", value: cfg.convergence_tol });
    }
    let n = a.n();
    if let Some(idx) = a.entries().iter().position(|&v| v <= 0.0) {
        return Err(Error::NonPositiveEntry { row: idx / n, col: idx % n, value: a.entries()[idx] });
    }

    let mut m = a.clone();
    let mut residual = marginals(&m).max_sum_residual();
    if residual <= cfg.convergence_tol {
        return Ok(SinkhornOutcome { matrix: m, iters_used: 0, final_residual: residual });
    }
    for iter in 1..=cfg.max_iters {
        let e = m.entries_mut();
        for row in e.chunks_exact_mut(n) {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
        }
        let mut col_sums = vec![0.0; n];
        for row in e.chunks_exact(n) {
            for (acc, x) in col_sums.iter_mut().zip(row) {
                *acc += x;
            }
        }
        for row in e.chunks_exact_mut(n) {
            for (x, s) in row.iter_mut().zip(&col_sums) {
                *x /= s;
            }
        }
        residual = marginals(&m).max_sum_residual();
        if residual <= cfg.convergence_tol {
            return Ok(SinkhornOutcome { matrix: m, iters_used: iter, final_residual: residual });
        }
    }
    Err(Error::NoConvergence { iters: cfg.max_iters, residual })
}

/// Sinkhorn balancing of i.i.d. entries drawn uniformly from [0.01, 1.01).
pub fn random_bistochastic(n: usize, seed: u64, cfg: &SinkhornConfig) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::ZeroOrder);
    }
    let mut rng = seeded_rng(seed);
    let entries = (0..n * n).map(|_| 0.01 + rng.gen::<f64>()).collect();
    let start = DenseMatrix::new(n, entries)?;
    Ok(sinkhorn(&start, cfg)?.matrix)
}

/// `Σ wᵢ P(σᵢ)`, accumulated in term order.
pub fn convex_combination(terms: &[(f64, Permutation)]) -> Result<DenseMatrix> {
    let first = terms.first().ok_or(Error::EmptyCombination)?;
    let n = first.1.n();
    let mut sum = 0.0;
    for (w, p) in terms {
        if p.n() != n {
            return Err(Error::OrderMismatch { expected: n, got: p.n() });
        }
        if !w.is_finite() || *w < 0.0 {
            return Err(Error::WeightSum { sum: *w });
        }
        sum += w;
    }
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::WeightSum { sum });
    }
    let mut entries = vec![0.0; n * n];
    for (w, p) in terms {
        for (i, &j) in p.map().iter().enumerate() {
            entries[i * n + j] += w;
        }
    }
    DenseMatrix::new(n, entries)
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if lo > 0.0 && hi > lo && hi.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidRange { lo, hi })
    }
}

/// Random permutation support carrying i.i.d. values from `[lo, hi)`.
pub fn star_permutation_random(n: usize, seed: u64, value_range: (f64, f64)) -> Result<DenseMatrix> {
    let (lo, hi) = value_range;
    check_range(lo, hi)?;
    if n == 0 {
        return Err(Error::ZeroOrder);
    }
    let mut rng = seeded_rng(seed);
    let p = random_permutation_with(n, &mut rng)?;
    let mut entries = vec![0.0; n * n];
    for (i, &j) in p.map().iter().enumerate() {
        entries[i * n + j] = lo + (hi - lo) * rng.gen::<f64>();
    }
    DenseMatrix::new(n, entries)
}

/// Random *-positive matrix: a random permutation support guarantees every
/// row and column is hit, and each remaining cell is switched on with
/// probability `density`. Active cells get i.i.d. values from `[lo, hi)`.
pub fn random_star_positive(
    n: usize,
    seed: u64,
    density: f64,
    value_range: (f64, f64),
) -> Result<DenseMatrix> {
    let (lo, hi) = value_range;
    check_range(lo, hi)?;
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::OutOfRange { name: "density", value: density });
    }
    if n == 0 {
        return Err(Error::ZeroOrder);
    }
    let mut rng = seeded_rng(seed);
    let p = random_permutation_with(n, &mut rng)?;
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let on = p.map()[i] == j || rng.gen::<f64>() < density;
            if on {
                entries[i * n + j] = lo + (hi - lo) * rng.gen::<f64>();
            }
        }
    }
    DenseMatrix::new(n, entries)
}

pub fn star_uniform(n: usize, c: f64) -> Result<DenseMatrix> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::InvalidScale(c));
    }
    if n == 0 {
        return Err(Error::ZeroOrder);
    }
    DenseMatrix::new(n, vec![c; n * n])
}

pub fn scale(a: &DenseMatrix, c: f64) -> Result<DenseMatrix> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::InvalidScale(c));
    }
    DenseMatrix::new(a.n(), a.entries().iter().map(|v| v * c).collect())
}
