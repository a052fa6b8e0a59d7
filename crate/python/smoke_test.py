"""Smoke test for the pymatchfactor extension module.

Build and run from the repository root:

    cargo build --release -p matchfactor-py --features extension-module
    cp target/release/libpymatchfactor.so python/pymatchfactor.so
    python3 python/smoke_test.py
"""

import math

import pymatchfactor as mf


def check_worked_example():
    t = 1.0 / 3.0
    b = mf.Matrix([[t, t, t], [0.0, 2 * t, t], [2 * t, 0.0, t]])
    prof = mf.matching_factor(b)
    for got, want in zip(prof.lambdas, [5 / 27, 25 / 81, 5 / 27]):
        assert abs(got - want) <= 1e-12 * want, (got, want)
    assert abs(prof.m_linear - 625 / 59049) <= 1e-12 * (625 / 59049)
    assert prof.within_bounds and prof.variant == "plain"
    assert mf.classify_extreme(b).kind == "Interior"

    d = mf.bvn_decompose(b)
    assert len(d) == 3 and d.recompose().max_abs_diff(b) <= 1e-12
    assert sorted(p for _, p in d.terms) == [[0, 1, 2], [1, 2, 0], [2, 1, 0]]


def check_extremes():
    sigma = mf.random_permutation(6, seed=11)
    p = mf.permutation_matrix(sigma)
    assert mf.matching_factor(p).m_linear == 1.0
    c = mf.classify_extreme(p)
    assert c.kind == "Permutation" and c.permutation == sigma

    u = mf.uniform_matrix(5)
    lo, hi = mf.theorem_bounds(5)
    assert hi == 0.0 and abs(mf.matching_factor(u).log_m - lo) <= 1e-9
    assert mf.classify_extreme(u).kind == "Uniform"
    assert mf.classify(u).is_star_uniform


def check_generators_and_star():
    b = mf.random_bistochastic(8, seed=3)
    assert b == mf.random_bistochastic(8, seed=3)
    assert mf.classify(b).is_bistochastic
    traj = mf.power_trajectory(b, 100)
    assert traj.converged and len(traj.samples) == 100

    a = mf.random_star_positive(6, seed=5, density=0.3)
    base = mf.star_matching_factor(a).log_m
    for c in (1e-6, 3.0, 1e6):
        assert abs(mf.star_matching_factor(mf.scale(a, c)).log_m - base) <= 1e-9
    assert abs(mf.star_matching_factor(mf.star_permutation_random(7, seed=2)).log_m) <= 1e-12

    out = mf.sinkhorn(mf.Matrix([[1.0, 2.0], [3.0, 4.0]]))
    assert out.final_residual <= 1e-12


def check_small_cases_and_errors():
    assert abs(mf.closed_form_m_n2(0.5) - 1 / 16) <= 1e-15
    assert abs(math.log(mf.closed_form_m_n2(0.5)) + 4 * math.log(2)) <= 1e-12
    scan = mf.oracle_grid_scan(3, 2000, seed=1)
    assert scan.argmin_is_uniform and scan.argmax_is_vertex and scan.bound_violations == 0
    v = mf.lemma_predicates([0.0, 1.0, 0.0], "unit")
    assert v.structural and v.analytic
    assert mf.max_terms_bound(4) == 10

    for bad in ([[1.0, -1.0], [0.0, 1.0]], [[1.0, 0.0]], []):
        try:
            mf.Matrix(bad)
        except mf.MatchFactorError:
            pass
        else:
            raise AssertionError(f"accepted {bad!r}")
    try:
        mf.random_bistochastic(5, seed=0, max_iters=1, convergence_tol=1e-15)
    except mf.NumericalError:
        pass
    else:
        raise AssertionError("expected non-convergence")


if __name__ == "__main__":
    check_worked_example()
    check_extremes()
    check_generators_and_star()
    check_small_cases_and_errors()
    print("pymatchfactor smoke test passed")
