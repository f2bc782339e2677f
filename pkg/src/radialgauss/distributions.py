"""Synthetic sample generators.

Every generator returns an ``(n, d)`` float array (row ``i`` is sample
``z_i``, column ``j`` is feature ``z^j``) and is a pure function of its
arguments and ``seed``.

The two counterexample families, the X-distribution and the sunshine
distribution, both have identity covariance but are not elliptically
symmetric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateInputError
from .rng import SeedLike, make_rng, seed_entropy

__all__ = [
    "MixtureSpec",
    "check_samples",
    "sample_gaussian",
    "sample_x_distribution",
    "sample_sunshine",
    "sample_mixture",
    "sample_student_t_isotropic",
    "sample_uniform_sphere",
    "sample_by_name",
    "DISTRIBUTIONS",
]

_DIAG_U = np.array([1.0, 1.0]) / math.sqrt(2.0)
_DIAG_V = np.array([1.0, -1.0]) / math.sqrt(2.0)


def check_samples(Z, min_rows: int = 2) -> np.ndarray:
    """Validate a sample matrix and return it as a 2-D float array."""
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2:
        raise DegenerateInputError(f"expected an (N, d) array, got shape {Z.shape}")
    if Z.shape[0] < min_rows:
        raise DegenerateInputError(f"need at least {min_rows} samples, got {Z.shape[0]}")
    if Z.shape[1] < 1:
        raise DegenerateInputError("need at least one feature column")
    if not np.all(np.isfinite(Z)):
        raise DegenerateInputError("samples contain non-finite entries")
    return Z


def _check_n(n) -> int:
    n = int(n)
    if n < 2:
        raise DegenerateInputError(f"need n >= 2 samples, got {n}")
    return n


def sample_gaussian(n: int, d: int, seed: SeedLike) -> np.ndarray:
    """iid ``N(0, I_d)`` rows."""
    n = _check_n(n)
    if int(d) < 1:
        raise ConfigError("d must be >= 1")
    return make_rng(seed).standard_normal((n, int(d)))


def sample_x_distribution(
    n: int,
    seed: SeedLike,
    along_var: float = 1.998,
    perp_var: float = 0.002,
    arm_profile: str = "cone",
) -> np.ndarray:
    """2-D cross along the diagonals ``(1, 1)/sqrt 2`` and ``(1, -1)/sqrt 2``.

    Each point picks one diagonal with probability 1/2.  Its coordinate
    along that diagonal is ``N(0, along_var)``; the coordinate across it
    has variance ``perp_var``.  With ``along_var + perp_var == 2`` the
    population covariance is exactly the identity.

    ``arm_profile`` controls the across-arm spread:

    ``"cone"``
        across = along * c * sqrt(perp_var / along_var), ``c ~ N(0, 1)``.
        The arm widens linearly with distance from the centre, so the
        angular profile is the same at every radius and the angles stay
        clumped on the diagonals.
    ``"band"``
        across ~ N(0, perp_var) independent of the along coordinate.  With
        ``along_var == perp_var == 1`` this is exactly ``N(0, I)``.
    """
    n = _check_n(n)
    if along_var <= 0 or perp_var <= 0:
        raise ConfigError("along_var and perp_var must be positive")
    if abs(along_var + perp_var - 2.0) > 1e-9:
        raise ConfigError(
            f"along_var + perp_var must equal 2 for identity covariance, "
            f"got {along_var} + {perp_var}"
        )
    rng = make_rng(seed)
    arm = rng.integers(0, 2, size=n)
    g = rng.standard_normal((n, 2))
    along = math.sqrt(along_var) * g[:, 0]
    if arm_profile == "cone":
        across = along * g[:, 1] * math.sqrt(perp_var / along_var)
    elif arm_profile == "band":
        across = math.sqrt(perp_var) * g[:, 1]
    else:
        raise ConfigError(f"unknown arm_profile {arm_profile!r}")
    first = arm[:, None] == 0
    u = np.where(first, _DIAG_U, _DIAG_V)
    v = np.where(first, _DIAG_V, _DIAG_U)
    return along[:, None] * u + across[:, None] * v


def sample_sunshine(
    n: int,
    seed: SeedLike,
    slices: int = 12,
    rotation: float | None = None,
) -> np.ndarray:
    """Gaussian samples with every even-indexed pie slice rotated clockwise.

    Slice ``k`` covers polar angles ``[k w, (k+1) w)`` with ``w = 2 pi /
    slices``, angles taken in ``[0, 2 pi)``.  Points in slices with even
    ``k`` are rotated by ``-rotation`` (default: one slice width).  Radii
    are untouched, so they stay chi(2)-distributed.
    """
    n = _check_n(n)
    slices = int(slices)
    if slices < 4 or slices % 2:
        raise ConfigError(f"slices must be an even integer >= 4, got {slices}")
    width = 2 * math.pi / slices
    if rotation is None:
        rotation = width
    g = make_rng(seed).standard_normal((n, 2))
    radius = np.hypot(g[:, 0], g[:, 1])
    theta = np.mod(np.arctan2(g[:, 1], g[:, 0]), 2 * math.pi)
    k = np.minimum(np.floor(theta / width).astype(np.int64), slices - 1)
    theta = np.where(k % 2 == 0, theta - rotation, theta)
    return np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])


def sample_student_t_isotropic(n: int, d: int, nu: float, seed: SeedLike) -> np.ndarray:
    """Multivariate Student-t with ``nu`` dof, rescaled to unit covariance.

    ``z = g / sqrt(w / nu) * sqrt((nu - 2) / nu)`` with ``g ~ N(0, I_d)`` and
    ``w ~ chi^2(nu)``; spherically symmetric by construction.
    """
    n = _check_n(n)
    if not nu > 2:
        raise ConfigError(f"nu must exceed 2 for a finite covariance, got {nu}")
    rng = make_rng(seed)
    g = rng.standard_normal((n, int(d)))
    w = rng.chisquare(nu, size=n)
    scale = np.sqrt(nu / w) * math.sqrt((nu - 2) / nu)
    return g * scale[:, None]


def sample_uniform_sphere(n: int, d: int, radius: float, seed: SeedLike) -> np.ndarray:
    """Uniform points on the sphere of the given ``radius`` in ``R^d``."""
    n = _check_n(n)
    if not radius > 0:
        raise ConfigError(f"radius must be positive, got {radius}")
    g = make_rng(seed).standard_normal((n, int(d)))
    norms = np.linalg.norm(g, axis=1)
    # a zero Gaussian draw has probability zero, but guard anyway
    norms[norms == 0] = 1.0
    return radius * g / norms[:, None]


@dataclass(frozen=True)
class MixtureSpec:
    """Each row comes from ``contaminant`` with probability ``alpha``, else ``base``.

    ``params`` are forwarded to both component samplers (unknown keys for a
    given sampler are ignored by :func:`sample_by_name`).
    """

    alpha: float
    base: str = "gaussian"
    contaminant: str = "x"
    params: tuple = ()

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        for tag in (self.base, self.contaminant):
            if tag not in DISTRIBUTIONS or tag == "mixture":
                raise ConfigError(f"unknown mixture component {tag!r}")


def sample_mixture(spec: MixtureSpec, n: int, seed: SeedLike, return_labels: bool = False):
    """Row-wise mixture ``alpha * contaminant + (1 - alpha) * base``.

    Both component sets are drawn in full from independent child streams and
    a Bernoulli(alpha) mask selects rows, so ``alpha = 0`` reproduces the base
    sampler's law and ``alpha = 1`` the contaminant's.
    """
    n = _check_n(n)
    children = np.random.SeedSequence(seed_entropy(seed)).spawn(3)
    params = dict(spec.params)
    base = sample_by_name(spec.base, n, children[0], **params)
    other = sample_by_name(spec.contaminant, n, children[1], **params)
    if base.shape != other.shape:
        raise ConfigError(f"mixture components disagree in shape: {base.shape} vs {other.shape}")
    mask = make_rng(children[2]).random(n) < spec.alpha
    out = np.where(mask[:, None], other, base)
    return (out, mask) if return_labels else out



def _gaussian(n, seed, d=2, **_):
    return sample_gaussian(n, d, seed)


def _x(n, seed, along_var=1.998, perp_var=0.002, arm_profile="cone", **_):
    return sample_x_distribution(n, seed, along_var, perp_var, arm_profile)


def _sunshine(n, seed, slices=12, rotation=None, **_):
    return sample_sunshine(n, seed, slices, rotation)


def _student_t(n, seed, d=2, nu=5.0, **_):
    return sample_student_t_isotropic(n, d, nu, seed)


def _sphere(n, seed, d=2, radius=None, **_):
    return sample_uniform_sphere(n, d, math.sqrt(d) if radius is None else radius, seed)


def _mixture(n, seed, alpha=0.5, base="gaussian", contaminant="x", **params):
    spec = MixtureSpec(float(alpha), base, contaminant, tuple(sorted(params.items())))
    return sample_mixture(spec, n, seed)


DISTRIBUTIONS = {
    "gaussian": _gaussian,
    "x": _x,
    "sunshine": _sunshine,
    "student_t": _student_t,
    "sphere": _sphere,
    "mixture": _mixture,
}


def sample_by_name(name: str, n: int, seed: SeedLike, **params) -> np.ndarray:
    """Dispatch on a distribution tag (see ``DISTRIBUTIONS``)."""
    try:
        fn = DISTRIBUTIONS[name]
    except KeyError:
        raise ConfigError(
            f"unknown distribution {name!r}; choose from {sorted(DISTRIBUTIONS)}"
        ) from None
    return fn(n, seed, **params)
