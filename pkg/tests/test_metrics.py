import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import linprog

from radialgauss.distributions import (
    sample_gaussian,
    sample_sunshine,
    sample_uniform_sphere,
    sample_x_distribution,
)
from radialgauss.errors import DegenerateInputError, DomainError, SizeError
from radialgauss.metrics import (
    MetricReport,
    histogram,
    ks_radii_chi,
    ks_statistic,
    ks_uniform_angles,
    metric_report,
    w1_1d,
    w1_2d_exact,
    w1_2d_sliced,
    w1_radii_to_chi,
    w1_to_gaussian,
)
from radialgauss.special import ChiModel, chi_mean


def lp_w1(a, b):
    """Exact 1-D transport cost via a linear program over couplings."""
    n = len(a)
    C = np.abs(np.subtract.outer(a, b)).ravel()
    A = np.zeros((2 * n, n * n))
    for i in range(n):
        A[i, i * n:(i + 1) * n] = 1
        A[n + i, i::n] = 1
    res = linprog(C, A_eq=A, b_eq=np.full(2 * n, 1.0 / n), bounds=(0, None), method="highs")
    return res.fun


def test_w1_1d_examples():
    assert w1_1d([3.0, 1.0, 2.0], [1.0, 2.0, 3.0]) == 0.0
    assert w1_1d([0.0, 0.0], [1.0, 3.0]) == 2.0
    with pytest.raises(DegenerateInputError):
        w1_1d([1.0], [1.0, 2.0])


def test_w1_1d_vs_lp():
    rng = np.random.default_rng(0)
    for _ in range(5):
        a, b = rng.standard_normal(20), rng.exponential(size=20)
        assert w1_1d(a, b) == pytest.approx(lp_w1(a, b), abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(arrays(float, (3, 8), elements=st.floats(-100, 100)))
def test_w1_1d_metric_axioms(x):
    a, b, c = x
    assert w1_1d(a, b) == pytest.approx(w1_1d(b, a), abs=1e-12)
    assert w1_1d(a, c) <= w1_1d(a, b) + w1_1d(b, c) + 1e-9
    assert w1_1d(a, a[::-1]) == 0.0


def test_w1_radii_to_chi():
    Z = sample_gaussian(100_000, 2, 0)
    assert w1_radii_to_chi(Z, 3, 1).value < 0.01
    big = w1_radii_to_chi(10 * Z, 3, 1)
    assert big.value == pytest.approx(9 * chi_mean(ChiModel(2)), rel=0.01)
    assert big.se >= 0 and big.reps == 3


def test_w1_2d_exact_examples():
    A = np.random.default_rng(1).standard_normal((30, 2))
    assert w1_2d_exact(A, A[::-1]) == pytest.approx(0.0, abs=1e-15)
    assert w1_2d_exact([[0.0, 0.0]], [[3.0, 4.0]]) == 5.0
    assert w1_2d_exact([[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]) == 0.0
    with pytest.raises(SizeError):
        w1_2d_exact(np.zeros((2001, 2)), np.zeros((2001, 2)))


def test_w1_2d_exact_zero_only_for_equal_multisets():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((40, 2))
    assert w1_2d_exact(A, A[rng.permutation(40)]) == pytest.approx(0.0, abs=1e-15)
    B = A.copy()
    B[0] += 1e-3
    assert w1_2d_exact(A, B) > 0


def test_sliced_properties():
    rng = np.random.default_rng(3)
    A, B = rng.standard_normal((2, 50, 2))
    assert w1_2d_sliced(A, A) == 0.0
    for _ in range(10):
        A, B = rng.standard_normal((50, 2)), rng.standard_normal((50, 2)) * 2 + 1
        assert w1_2d_sliced(A, B) <= w1_2d_exact(A, B) + 1e-9
    t = 0.37
    R = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    s0, s1 = w1_2d_sliced(A, B), w1_2d_sliced(A @ R.T, B @ R.T)
    assert abs(s1 - s0) / s0 < 1e-3
    with pytest.raises(DomainError):
        w1_2d_sliced(np.zeros((3, 3)), np.zeros((3, 3)))


def test_sliced_translation_is_exact():
    A = np.random.default_rng(4).standard_normal((50, 2))
    assert w1_2d_sliced(A, A + [0.6, 0.8]) == pytest.approx(1.0, rel=1e-3)


def test_w1_to_gaussian_protocol():
    Z = sample_gaussian(500, 2, 0)
    e = w1_to_gaussian(Z, 5, 1)
    assert e.reps == 5 and e.se > 0
    assert e.value == w1_to_gaussian(Z, 5, 1).value


def test_ks_angles():
    assert ks_uniform_angles(sample_gaussian(100_000, 2, 0)) < 0.01
    X = sample_x_distribution(100_000, 1)
    assert ks_uniform_angles(X) > 0.1
    t = 0.3
    R = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    G = sample_gaussian(100_000, 2, 5)
    assert abs(ks_uniform_angles(G @ R.T) - ks_uniform_angles(G)) < 0.01
    with pytest.raises(DomainError):
        ks_uniform_angles(np.ones((5, 3)))


def test_ks_radii():
    assert ks_radii_chi(sample_gaussian(100_000, 2, 0)) < 0.005
    assert ks_radii_chi(sample_sunshine(100_000, 0)) < 0.005
    S = sample_uniform_sphere(1000, 2, math.sqrt(2), 0)
    assert ks_radii_chi(S) == pytest.approx(1 - math.exp(-1), abs=1e-9)


def test_ks_statistic_exact_small_case():
    # sample {0.5} vs U(0,1): D = max(1 - 0.5, 0.5 - 0) = 0.5
    assert ks_statistic([0.5], lambda u: u) == 0.5


def test_permutation_invariance():
    rng = np.random.default_rng(6)
    A, B = rng.standard_normal((2, 60, 2))
    p = rng.permutation(60)
    assert w1_2d_exact(A[p], B) == pytest.approx(w1_2d_exact(A, B), rel=1e-12)
    assert w1_2d_sliced(A[p], B) == w1_2d_sliced(A, B)
    assert ks_uniform_angles(A[p]) == ks_uniform_angles(A)


def test_metric_report_and_histogram():
    Z = sample_x_distribution(3000, 0)
    rep = metric_report(Z, 0, 2)
    vals = rep.as_dict()
    assert set(MetricReport.columns()) == set(vals)
    assert all(np.isfinite(v) and v >= 0 for v in vals.values())
    edges, h = histogram(np.linalg.norm(Z, axis=1), 20)
    assert len(edges) == 21 and np.sum(h * np.diff(edges)) == pytest.approx(1.0)
    r3 = metric_report(sample_gaussian(500, 3, 0), 0, 2)
    assert math.isnan(r3.ks_angles_uniform)
