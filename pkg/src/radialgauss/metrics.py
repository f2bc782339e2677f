"""Distances and shape diagnostics for sample sets.

W1 between 1-D samples uses the sorted-pair estimator.  In 2-D there is an
exact assignment-based W1 for small sets and a sliced surrogate on a fixed
angular grid for large ones.  KS statistics test angles against the uniform
law and radii against chi(d).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import _kernels
from .distributions import check_samples
from .errors import DegenerateInputError, DomainError, SizeError
from .rng import SeedLike, make_rng, seed_entropy
from .special import ChiModel, chi_cdf, chi_sample

__all__ = [
    "EXACT_LIMIT",
    "Estimate",
    "MetricReport",
    "w1_1d",
    "w1_radii_to_chi",
    "w1_2d_exact",
    "w1_2d_sliced",
    "w1_to_gaussian",
    "ks_statistic",
    "ks_uniform_angles",
    "ks_radii_chi",
    "angles_unit",
    "radii",
    "metric_report",
    "histogram",
]

EXACT_LIMIT = 2000


@dataclass(frozen=True)
class Estimate:
    """Mean over repetitions with its standard error (0 for a single rep)."""

    value: float
    se: float
    reps: int

    def __float__(self):
        return self.value


def _estimate(values) -> Estimate:
    v = np.asarray(values, dtype=float)
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return Estimate(float(v.mean()), se, int(v.size))


def radii(Z) -> np.ndarray:
    Z = np.asarray(Z, dtype=float)
    return np.sqrt(np.einsum("ij,ij->i", Z, Z))


def w1_1d(a, b) -> float:
    """``1/K sum_i |a_(i) - b_(i)|`` over the sorted values."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size != b.size:
        raise DegenerateInputError(f"w1_1d needs equal sizes, got {a.size} and {b.size}")
    if a.size == 0:
        raise DegenerateInputError("w1_1d needs at least one value")
    return float(np.abs(a - b).mean())


def w1_radii_to_chi(Z, reps: int = 5, seed: SeedLike = 0) -> Estimate:
    """W1 between the radii of ``Z`` and ``reps`` fresh chi(d) draws of size N."""
    Z = check_samples(Z, min_rows=1)
    n, d = Z.shape
    r = np.sort(radii(Z))
    children = np.random.SeedSequence(seed_entropy(seed)).spawn(int(reps))
    chi = ChiModel(d)
    vals = [float(np.abs(r - np.sort(chi_sample(chi, n, c))).mean()) for c in children]
    return _estimate(vals)


def _pair_inputs(A, B):
    A = check_samples(A, min_rows=1)
    B = check_samples(B, min_rows=1)
    if A.shape != B.shape:
        raise DegenerateInputError(f"sample sets differ in shape: {A.shape} vs {B.shape}")
    return A, B


def w1_2d_exact(A, B) -> float:
    """Exact W1 between two equal-size point clouds (mean matched distance).

    Solves the assignment problem on the Euclidean cost matrix; limited to
    ``EXACT_LIMIT`` points.
    """
    A, B = _pair_inputs(A, B)
    n = A.shape[0]
    if n > EXACT_LIMIT:
        raise SizeError(f"exact W1 is limited to {EXACT_LIMIT} points, got {n}; use w1_2d_sliced")
    diff = A[:, None, :] - B[None, :, :]
    cost = np.ascontiguousarray(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)))
    col = np.asarray(_kernels.active.linear_assignment(cost))
    return float(cost[np.arange(n), col].mean())


def w1_2d_sliced(A, B, projections: int = 128) -> float:
    """Sliced W1 on the angular grid ``theta_k = k pi / projections``.

    The per-direction 1-D distances are averaged and multiplied by ``pi/2``,
    since ``|<v, theta>|`` averages to ``2|v|/pi`` over directions; a rigid
    translation then measures its full length.  The value never exceeds the
    exact W1.
    """
    A, B = _pair_inputs(A, B)
    if A.shape[1] != 2:
        raise DomainError(f"w1_2d_sliced supports d = 2 only, got d = {A.shape[1]}")
    projections = int(projections)
    if projections < 1:
        raise DomainError("projections must be >= 1")
    theta = np.arange(projections) * (math.pi / projections)
    U = np.vstack([np.cos(theta), np.sin(theta)])
    pa = np.sort(A @ U, axis=0)
    pb = np.sort(B @ U, axis=0)
    return float(0.5 * math.pi * np.abs(pa - pb).mean())


def w1_to_gaussian(Z, reps: int = 5, seed: SeedLike = 0, projections: int = 128) -> Estimate:
    """W1 from ``Z`` to ``reps`` fresh ``N(0, I)`` draws of the same size.

    Exact below ``EXACT_LIMIT`` points, sliced (2-D) above.
    """
    Z = check_samples(Z, min_rows=1)
    n, d = Z.shape
    children = np.random.SeedSequence(seed_entropy(seed)).spawn(int(reps))
    vals = []
    for c in children:
        G = make_rng(c).standard_normal((n, d))
        vals.append(w1_2d_exact(Z, G) if n <= EXACT_LIMIT else w1_2d_sliced(Z, G, projections))
    return _estimate(vals)


def ks_statistic(x, cdf) -> float:
    """One-sample KS distance between the values ``x`` and a CDF callable."""
    x = np.sort(np.asarray(x, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise DegenerateInputError("KS statistic needs at least one value")
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n), 0.0))


def angles_unit(Z) -> np.ndarray:
    """Polar angles of 2-D rows mapped to ``[0, 1)``."""
    Z = check_samples(Z, min_rows=1)
    if Z.shape[1] != 2:
        raise DomainError(f"angles need d = 2, got d = {Z.shape[1]}")
    u = np.arctan2(Z[:, 1], Z[:, 0]) / (2 * math.pi)
    u = np.where(u < 0, u + 1.0, u)
    return np.where(u >= 1.0, 0.0, u)


def ks_uniform_angles(Z) -> float:
    return ks_statistic(angles_unit(Z), lambda u: u)


def ks_radii_chi(Z) -> float:
    Z = check_samples(Z, min_rows=1)
    chi = ChiModel(Z.shape[1])
    return ks_statistic(radii(Z), lambda r: chi_cdf(chi, r))


@dataclass
class MetricReport:
    """Summary diagnostics of one sample set.

    ``ks_angles_uniform`` is NaN when ``d != 2``.  ``*_se`` are the standard
    errors of the two W1 estimates.
    """

    w1_radii_to_chi: float
    w1_2d_to_gaussian: float
    ks_angles_uniform: float
    ks_radii_chi: float
    cov_offdiag_max: float
    mean_norm: float
    w1_radii_to_chi_se: float = 0.0
    w1_2d_to_gaussian_se: float = 0.0

    @classmethod
    def columns(cls):
        return [f.name for f in fields(cls)]

    def row(self):
        return [getattr(self, k) for k in self.columns()]

    def as_dict(self):
        return asdict(self)


def metric_report(Z, seed: SeedLike = 0, reps: int = 5) -> MetricReport:
    Z = check_samples(Z)
    d = Z.shape[1]
    s1, s2 = np.random.SeedSequence(seed_entropy(seed)).spawn(2)
    wr = w1_radii_to_chi(Z, reps, s1)
    if d == 2:
        wg = w1_to_gaussian(Z, reps, s2)
        ksa = ks_uniform_angles(Z)
    else:
        wg = w1_to_gaussian(Z, reps, s2) if Z.shape[0] <= EXACT_LIMIT else Estimate(float("nan"), 0.0, 0)
        ksa = float("nan")
    C = np.cov(Z, rowvar=False).reshape(d, d)
    off = C - np.diag(np.diag(C))
    return MetricReport(
        w1_radii_to_chi=wr.value,
        w1_2d_to_gaussian=wg.value,
        ks_angles_uniform=ksa,
        ks_radii_chi=ks_radii_chi(Z),
        cov_offdiag_max=float(np.abs(off).max()) if d > 1 else 0.0,
        mean_norm=float(np.linalg.norm(Z.mean(axis=0))),
        w1_radii_to_chi_se=wr.se,
        w1_2d_to_gaussian_se=wg.se,
    )


def histogram(values, bins: int = 50, range=None, density: bool = True):
    """``(edges, heights)``; heights integrate to one when ``density``."""
    heights, edges = np.histogram(np.asarray(values, dtype=float), bins=bins, range=range,
                                  density=density)
    return edges, heights

