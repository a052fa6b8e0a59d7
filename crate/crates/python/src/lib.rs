//! Python bindings for `matchfactor`.
//!
//! Matrices cross the boundary as lists of rows and are validated into a
//! [`Matrix`] on entry. Validation failures raise `MatchFactorError` (a
//! `ValueError`); numerical failures such as Sinkhorn non-convergence raise
//! `NumericalError` (an `ArithmeticError`).

use matchfactor as mf;
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

create_exception!(pymatchfactor, MatchFactorError, PyValueError);
create_exception!(pymatchfactor, NumericalError, PyArithmeticError);

fn to_py(e: mf::Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        MatchFactorError::new_err(e.to_string())
    }
}

/// Square matrix of finite non-negative reals.
#[pyclass(frozen, skip_from_py_object, module = "pymatchfactor")]
#[derive(Clone)]
pub struct Matrix {
    inner: mf::DenseMatrix,
}

#[pymethods]
impl Matrix {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        mf::DenseMatrix::from_rows(&rows).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn identity(n: usize) -> PyResult<Self> {
        mf::DenseMatrix::identity(n).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.to_rows()
    }

    fn __getitem__(&self, idx: (usize, usize)) -> PyResult<f64> {
        let n = self.inner.n();
        if idx.0 >= n || idx.1 >= n {
            return Err(pyo3::exceptions::PyIndexError::new_err("matrix index out of range"));
        }
        Ok(self.inner[idx])
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Matrix({:?})", self.inner.to_rows())
    }

    fn matmul(&self, other: &Matrix) -> PyResult<Matrix> {
        self.inner.matmul(&other.inner).map(|inner| Matrix { inner }).map_err(to_py)
    }

    fn max_abs_diff(&self, other: &Matrix) -> Option<f64> {
        self.inner.max_abs_diff(&other.inner)
    }
}

impl From<mf::DenseMatrix> for Matrix {
    fn from(inner: mf::DenseMatrix) -> Self {
        Self { inner }
    }
}

#[pyclass(frozen, skip_from_py_object, module = "pymatchfactor")]
#[derive(Clone, Copy)]
pub struct Tolerance {
    inner: mf::ToleranceConfig,
}

#[pymethods]
impl Tolerance {
    #[new]
    #[pyo3(signature = (sum_tol = 1e-9, zero_tol = 1e-12, class_log_tol = 1e-9))]
    fn new(sum_tol: f64, zero_tol: f64, class_log_tol: f64) -> PyResult<Self> {
        mf::ToleranceConfig::new(sum_tol, zero_tol, class_log_tol).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn sum_tol(&self) -> f64 {
        self.inner.sum_tol
    }

    #[getter]
    fn zero_tol(&self) -> f64 {
        self.inner.zero_tol
    }

    #[getter]
    fn class_log_tol(&self) -> f64 {
        self.inner.class_log_tol
    }

    fn __repr__(&self) -> String {
        let t = &self.inner;
        format!("Tolerance(sum_tol={}, zero_tol={}, class_log_tol={})", t.sum_tol, t.zero_tol, t.class_log_tol)
    }
}

fn tol_or_default(tol: Option<&Tolerance>) -> mf::ToleranceConfig {
    tol.map(|t| t.inner).unwrap_or_default()
}

#[pyclass(frozen, get_all, module = "pymatchfactor")]
pub struct Classification {
    is_nonnegative: bool,
    is_bistochastic: bool,
    is_star_positive: bool,
    is_permutation: bool,
    is_star_permutation: bool,
    is_uniform: bool,
    is_star_uniform: bool,
    max_sum_residual: f64,
}

#[pyclass(frozen, get_all, module = "pymatchfactor")]
pub struct MatchingProfile {
    n: usize,
    lambdas: Vec<f64>,
    log_lambdas: Vec<f64>,
    log_m: f64,
    m_linear: f64,
    log_lower_bound: f64,
    log_upper_bound: f64,
    /// `"plain"` or `"star"`.
    variant: &'static str,
    within_bounds: bool,
    proximity: f64,
}

impl From<mf::MatchingProfile> for MatchingProfile {
    fn from(p: mf::MatchingProfile) -> Self {
        Self {
            within_bounds: p.within_bounds(),
            proximity: mf::permutation_proximity(&p),
            variant: match p.variant {
                mf::Variant::Plain => "plain",
                mf::Variant::Star => "star",
            },
            n: p.n,
            lambdas: p.lambdas,
            log_lambdas: p.log_lambdas,
            log_m: p.log_m,
            m_linear: p.m_linear,
            log_lower_bound: p.log_lower_bound,
            log_upper_bound: p.log_upper_bound,
        }
    }
}

#[pyclass(frozen, get_all, module = "pymatchfactor")]
pub struct ExtremeClass {
    /// One of `"Permutation"`, `"Uniform"`, `"Interior"`, `"Degenerate"`.
    kind: &'static str,
    permutation: Option<Vec<usize>>,
    log_m: f64,
}

#[pyclass(frozen, get_all, module = "pymatchfactor")]
pub struct LemmaVerdict {
    structural: bool,
    analytic: bool,
}

#[pyclass(frozen, get_all, module = "pymatchfactor")]
pub struct SinkhornOutcome {
    matrix: Matrix,
    iters_used: usize,
    final_residual: f64,
}

#[pyclass(frozen, module = "pymatchfactor")]
pub struct Decomposition {
    inner: mf::BvnDecomposition,
}

#[pymethods]
impl Decomposition {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    /// `(weight, permutation)` pairs in extraction order.
    #[getter]
    fn terms(&self) -> Vec<(f64, Vec<usize>)> {
        self.inner.terms.iter().map(|(w, p)| (*w, p.map().to_vec())).collect()
    }

    #[getter]
    fn residual_mass(&self) -> f64 {
        self.inner.residual_mass
    }

    fn weight_sum(&self) -> f64 {
        self.inner.weight_sum()
    }

    #[pyo3(signature = (tol = None))]
    fn is_single_vertex(&self, tol: Option<&Tolerance>) -> bool {
        self.inner.is_single_vertex(&tol_or_default(tol))
    }

    fn recompose(&self) -> Matrix {
        mf::recompose(&self.inner).into()
    }

    fn __len__(&self) -> usize {
        self.inner.terms.len()
    }
}

#[pyclass(frozen, get_all, module = "pymatchfactor")]
pub struct Trajectory {
    n: usize,
    /// `(t, log M(B^t))` for `t = 1..=t_max`.
    samples: Vec<(usize, f64)>,
    converged: bool,
}

#[pyclass(frozen, get_all, module = "pymatchfactor")]
pub struct OracleResult {
    min_log_m: f64,
    max_log_m: f64,
    argmin_is_uniform: bool,
    argmax_is_vertex: bool,
    points_scanned: usize,
    bound_violations: usize,
}

fn perm(map: Vec<usize>) -> PyResult<mf::Permutation> {
    mf::Permutation::new(map).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (m, tol = None))]
fn classify(m: &Matrix, tol: Option<&Tolerance>) -> Classification {
    let r = mf::classify(&m.inner, &tol_or_default(tol));
    Classification {
        is_nonnegative: r.is_nonnegative,
        is_bistochastic: r.is_bistochastic,
        is_star_positive: r.is_star_positive,
        is_permutation: r.is_permutation,
        is_star_permutation: r.is_star_permutation,
        is_uniform: r.is_uniform,
        is_star_uniform: r.is_star_uniform,
        max_sum_residual: r.max_sum_residual,
    }
}

#[pyfunction]
fn lambda_k(b: &Matrix, k: usize) -> PyResult<f64> {
    mf::lambda_k(&b.inner, k).map_err(to_py)
}

#[pyfunction]
fn star_lambda_k(a: &Matrix, k: usize) -> PyResult<f64> {
    mf::star_lambda_k(&a.inner, k).map_err(to_py)
}

#[pyfunction]
fn matching_factor(b: &Matrix) -> PyResult<MatchingProfile> {
    mf::matching_factor(&b.inner).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn star_matching_factor(a: &Matrix) -> PyResult<MatchingProfile> {
    mf::star_matching_factor(&a.inner).map(Into::into).map_err(to_py)
}

/// `(ln n^(-2n), 0)`.
#[pyfunction]
fn theorem_bounds(n: usize) -> PyResult<(f64, f64)> {
    mf::theorem_bounds(n).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (b, tol = None))]
fn classify_extreme(b: &Matrix, tol: Option<&Tolerance>) -> PyResult<ExtremeClass> {
    let c = mf::classify_extreme(&b.inner, &tol_or_default(tol)).map_err(to_py)?;
    let kind = match c.kind {
        mf::ExtremeKind::Permutation => "Permutation",
        mf::ExtremeKind::Uniform => "Uniform",
        mf::ExtremeKind::Interior => "Interior",
        mf::ExtremeKind::Degenerate => "Degenerate",
    };
    Ok(ExtremeClass { kind, permutation: c.permutation.map(|p| p.into_map()), log_m: c.log_m })
}

/// `mode` is `"unit"` or `"positive"`.
#[pyfunction]
#[pyo3(signature = (a, mode, tol = None))]
fn lemma_predicates(a: Vec<f64>, mode: &str, tol: Option<&Tolerance>) -> PyResult<LemmaVerdict> {
    let mode = match mode {
        "unit" => mf::LemmaMode::Unit,
        "positive" => mf::LemmaMode::Positive,
        other => return Err(PyValueError::new_err(format!("unknown lemma mode {other:?}"))),
    };
    let v = mf::lemma_predicates(&a, mode, &tol_or_default(tol)).map_err(to_py)?;
    Ok(LemmaVerdict { structural: v.structural, analytic: v.analytic })
}

#[pyfunction]
fn random_permutation(n: usize, seed: u64) -> PyResult<Vec<usize>> {
    mf::random_permutation(n, seed).map(|p| p.into_map()).map_err(to_py)
}

#[pyfunction]
fn permutation_matrix(sigma: Vec<usize>) -> PyResult<Matrix> {
    Ok(mf::permutation_matrix(&perm(sigma)?).into())
}

#[pyfunction]
fn uniform_matrix(n: usize) -> PyResult<Matrix> {
    mf::uniform_matrix(n).map(Into::into).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (a, max_iters = 10_000, convergence_tol = 1e-12))]
fn sinkhorn(a: &Matrix, max_iters: usize, convergence_tol: f64) -> PyResult<SinkhornOutcome> {
    let cfg = mf::SinkhornConfig { max_iters, convergence_tol };
    let out = mf::sinkhorn(&a.inner, &cfg).map_err(to_py)?;
    Ok(SinkhornOutcome { matrix: out.matrix.into(), iters_used: out.iters_used, final_residual: out.final_residual })
}

#[pyfunction]
#[pyo3(signature = (n, seed, max_iters = 10_000, convergence_tol = 1e-12))]
fn random_bistochastic(n: usize, seed: u64, max_iters: usize, convergence_tol: f64) -> PyResult<Matrix> {
    let cfg = mf::SinkhornConfig { max_iters, convergence_tol };
    mf::random_bistochastic(n, seed, &cfg).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn convex_combination(terms: Vec<(f64, Vec<usize>)>) -> PyResult<Matrix> {
    let terms = terms.into_iter().map(|(w, p)| Ok((w, perm(p)?))).collect::<PyResult<Vec<_>>>()?;
    mf::convex_combination(&terms).map(Into::into).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, seed, lo = 0.1, hi = 10.0))]
fn star_permutation_random(n: usize, seed: u64, lo: f64, hi: f64) -> PyResult<Matrix> {
    mf::star_permutation_random(n, seed, (lo, hi)).map(Into::into).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, seed, density = 0.5, lo = 0.01, hi = 10.0))]
fn random_star_positive(n: usize, seed: u64, density: f64, lo: f64, hi: f64) -> PyResult<Matrix> {
    mf::random_star_positive(n, seed, density, (lo, hi)).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn star_uniform(n: usize, c: f64) -> PyResult<Matrix> {
    mf::star_uniform(n, c).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn scale(a: &Matrix, c: f64) -> PyResult<Matrix> {
    mf::scale(&a.inner, c).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn max_terms_bound(n: usize) -> usize {
    mf::max_terms_bound(n)
}

#[pyfunction]
#[pyo3(signature = (b, tol = None, max_terms = None))]
fn bvn_decompose(b: &Matrix, tol: Option<&Tolerance>, max_terms: Option<usize>) -> PyResult<Decomposition> {
    let max_terms = max_terms.unwrap_or_else(|| mf::max_terms_bound(b.inner.n()));
    mf::bvn_decompose(&b.inner, &tol_or_default(tol), max_terms).map(|inner| Decomposition { inner }).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (b, t_max, tol = None, limit_tol = 1e-3))]
fn power_trajectory(b: &Matrix, t_max: usize, tol: Option<&Tolerance>, limit_tol: f64) -> PyResult<Trajectory> {
    let r = mf::power_trajectory(&b.inner, t_max, &tol_or_default(tol), limit_tol).map_err(to_py)?;
    Ok(Trajectory { n: r.n, samples: r.samples, converged: r.converged })
}

#[pyfunction]
fn closed_form_m_n2(p: f64) -> PyResult<f64> {
    mf::closed_form_m_n2(p).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, resolution, seed = 0))]
fn oracle_grid_scan(n: usize, resolution: usize, seed: u64) -> PyResult<OracleResult> {
    let r = mf::oracle_grid_scan(n, resolution, seed).map_err(to_py)?;
    Ok(OracleResult {
        min_log_m: r.min_log_m,
        max_log_m: r.max_log_m,
        argmin_is_uniform: r.argmin_is_uniform,
        argmax_is_vertex: r.argmax_is_vertex,
        points_scanned: r.points_scanned,
        bound_violations: r.bound_violations,
    })
}

#[pymodule]
fn pymatchfactor(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("MatchFactorError", py.get_type::<MatchFactorError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add_class::<Matrix>()?;
    m.add_class::<Tolerance>()?;
    m.add_class::<Classification>()?;
    m.add_class::<MatchingProfile>()?;
    m.add_class::<ExtremeClass>()?;
    m.add_class::<LemmaVerdict>()?;
    m.add_class::<SinkhornOutcome>()?;
    m.add_class::<Decomposition>()?;
    m.add_class::<Trajectory>()?;
    m.add_class::<OracleResult>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_k, m)?)?;
    m.add_function(wrap_pyfunction!(star_lambda_k, m)?)?;
    m.add_function(wrap_pyfunction!(matching_factor, m)?)?;
    m.add_function(wrap_pyfunction!(star_matching_factor, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(classify_extreme, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_predicates, m)?)?;
    m.add_function(wrap_pyfunction!(random_permutation, m)?)?;
    m.add_function(wrap_pyfunction!(permutation_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(sinkhorn, m)?)?;
    m.add_function(wrap_pyfunction!(random_bistochastic, m)?)?;
    m.add_function(wrap_pyfunction!(convex_combination, m)?)?;
    m.add_function(wrap_pyfunction!(star_permutation_random, m)?)?;
    m.add_function(wrap_pyfunction!(random_star_positive, m)?)?;
    m.add_function(wrap_pyfunction!(star_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(scale, m)?)?;
    m.add_function(wrap_pyfunction!(max_terms_bound, m)?)?;
    m.add_function(wrap_pyfunction!(bvn_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(power_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_m_n2, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_grid_scan, m)?)?;
    Ok(())
}
