"""Compiled and pure-Python kernels must agree."""

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from radialgauss import _kernels

BACKENDS = ["python"] + (["cython"] if _kernels.compiled is not None else [])


@pytest.fixture(params=BACKENDS)
def K(request):
    return _kernels.get_backend(request.param)


needs_both = pytest.mark.skipif(_kernels.compiled is None, reason="extension not built")


def test_backend_selection():
    assert _kernels.BACKEND in ("cython", "python")
    with pytest.raises(ValueError):
        _kernels.get_backend("fortran")


@needs_both
@pytest.mark.parametrize("d", [1, 2, 5])
def test_objective_step_parity(d):
    rng = np.random.default_rng(d)
    Z = np.ascontiguousarray(rng.standard_normal((400, d)) * 0.8)
    P, C = _kernels.fallback, _kernels.compiled
    for with_values in (True, False):
        gp, gc = np.zeros_like(Z), np.zeros_like(Z)
        args = (Z, 25.0, 1.0, 1e-4, 25.0, 1.0, 0.1, 20, 1e-12)
        vp = P.objective_step(*args, gp, None, with_values)
        vc = C.objective_step(*args, gc, None, with_values)
        np.testing.assert_allclose(gc, gp, rtol=1e-11, atol=1e-15)
        if with_values:
            np.testing.assert_allclose(vc[:4], vp[:4], rtol=1e-12)


@needs_both
def test_w1_and_radial_parity():
    rng = np.random.default_rng(0)
    Z = np.ascontiguousarray(rng.standard_normal((300, 3)))
    ref = np.sort(rng.standard_normal(300) ** 2)
    outs = []
    for K in (_kernels.fallback, _kernels.compiled):
        g1, g2 = np.zeros_like(Z), np.zeros_like(Z)
        a = K.w1_radial_value_grad(Z, ref, 1.5, 1e-12, g1, None)
        b = K.radial_value_grad(Z, 2.0, 0.7, 17, 1e-12, g2, None, True)
        outs.append((a, b, g1, g2))
    (a0, b0, g10, g20), (a1, b1, g11, g21) = outs
    assert a0[0] == pytest.approx(a1[0], rel=1e-13)
    np.testing.assert_allclose(b0[:2], b1[:2], rtol=1e-13)
    np.testing.assert_allclose(g11, g10, rtol=1e-12, atol=1e-16)
    np.testing.assert_allclose(g21, g20, rtol=1e-12, atol=1e-16)


def test_warm_started_order_is_sorting(K):
    rng = np.random.default_rng(3)
    r = rng.random(200)
    order = np.arange(200, dtype=np.int64)
    idx = np.asarray(K._sort_order(r, order))
    assert np.all(np.diff(r[idx]) >= 0)
    r2 = r + 0.01 * rng.standard_normal(200)
    idx2 = np.asarray(K._sort_order(r2, idx.copy()))
    assert np.all(np.diff(r2[idx2]) >= 0)


@pytest.mark.parametrize("n", [1, 2, 7, 60])
def test_linear_assignment_matches_scipy(K, n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        cost = np.ascontiguousarray(rng.random((n, n)))
        col = np.asarray(K.linear_assignment(cost))
        _, ref = linear_sum_assignment(cost)
        assert sorted(col) == list(range(n))
        assert cost[np.arange(n), col].sum() == pytest.approx(cost[np.arange(n), ref].sum(), rel=1e-12)


def test_linear_assignment_integer_ties(K):
    cost = np.ascontiguousarray(np.random.default_rng(1).integers(0, 3, (30, 30)).astype(float))
    col = np.asarray(K.linear_assignment(cost))
    _, ref = linear_sum_assignment(cost)
    assert cost[np.arange(30), col].sum() == cost[np.arange(30), ref].sum()


def test_pure_env_selects_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, RADIALGAUSS_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import radialgauss; print(radialgauss.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
