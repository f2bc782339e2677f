"""Special functions and the Chi distribution.

The chi distribution with ``d`` degrees of freedom is the law of the
Euclidean norm of a standard normal vector in ``R^d``::

    p(r) = r**(d-1) * exp(-r**2 / 2) / (2**(d/2 - 1) * Gamma(d/2))

Everything radial in the package (losses, pushforward maps, metrics) is
measured against :class:`ChiModel`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import DegenerateInputError, DomainError
from .rng import SeedLike, make_rng

__all__ = [
    "ChiModel",
    "log_gamma",
    "chi_log_pdf",
    "chi_pdf",
    "chi_cdf",
    "chi_quantile",
    "chi_sample",
    "chi_mean",
    "chi_entropy_reference",
]

# rows * dof per chunk when drawing chi variates as Gaussian norms
_SAMPLE_CHUNK = 1 << 22


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for ``x > 0``."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"log_gamma requires a finite positive argument, got {x!r}")
    return math.lgamma(x)


@dataclass(frozen=True)
class ChiModel:
    """Chi distribution with ``dof`` degrees of freedom.

    ``log_norm`` is the log of the density's normalizer,
    ``(d/2 - 1) * ln 2 + ln Gamma(d/2)``; it is also the constant dropped
    from the Monte-Carlo cross-entropy of the radial loss.
    """

    dof: int
    log_norm: float = field(init=False)

    def __post_init__(self):
        if int(self.dof) != self.dof or self.dof < 1:
            raise DomainError(f"dof must be a positive integer, got {self.dof!r}")
        object.__setattr__(self, "dof", int(self.dof))
        d = self.dof
        object.__setattr__(self, "log_norm", (d / 2 - 1) * math.log(2.0) + log_gamma(d / 2))

    @property
    def mode(self) -> float:
        return math.sqrt(self.dof - 1)

    def log_pdf(self, r):
        return chi_log_pdf(self, r)

    def pdf(self, r):
        return chi_pdf(self, r)

    def cdf(self, r):
        return chi_cdf(self, r)

    def quantile(self, p):
        return chi_quantile(self, p)

    def sample(self, n: int, seed: SeedLike) -> np.ndarray:
        return chi_sample(self, n, seed)

    def mean(self) -> float:
        return chi_mean(self)


def _as_model(model) -> ChiModel:
    return model if isinstance(model, ChiModel) else ChiModel(int(model))


def _scalar_or_array(out, like):
    return float(out) if np.ndim(like) == 0 else out


def chi_log_pdf(model, r):
    """Log density ``(d-1) ln r - r^2/2 - log_norm`` for ``r > 0``."""
    model = _as_model(model)
    r_arr = np.asarray(r, dtype=float)
    if np.any(~(r_arr > 0)):
        raise DomainError("chi_log_pdf requires r > 0")
    out = (model.dof - 1) * np.log(r_arr) - 0.5 * r_arr**2 - model.log_norm
    return _scalar_or_array(out, r)


def chi_pdf(model, r):
    """Density on ``[0, inf)``; zero at the origin for ``d >= 2``."""
    model = _as_model(model)
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise DomainError("chi_pdf requires r >= 0")
    with np.errstate(divide="ignore"):
        logp = (model.dof - 1) * np.log(r_arr) - 0.5 * r_arr**2 - model.log_norm
    out = np.exp(logp)
    if model.dof == 1:
        out = np.where(r_arr == 0, math.exp(-model.log_norm), out)
    return _scalar_or_array(out, r)


def chi_cdf(model, r):
    """Regularized lower incomplete gamma ``P(d/2, r^2/2)``."""
    model = _as_model(model)
    r_arr = np.asarray(r, dtype=float)
    if np.any(~(r_arr >= 0)):
        raise DomainError("chi_cdf requires r >= 0")
    out = special.gammainc(model.dof / 2, 0.5 * r_arr**2)
    return _scalar_or_array(out, r)


def chi_quantile(model, p):
    """Inverse of :func:`chi_cdf` on ``(0, 1)``.

    Bisection on the bracket ``[0, 10 sqrt(d)]`` (widened upward when needed)
    followed by a few bracket-safeguarded Newton steps.  Vectorized over ``p``.
    """
    model = _as_model(model)
    p_arr = np.asarray(p, dtype=float)
    if np.any(~((p_arr > 0) & (p_arr < 1))):
        raise DomainError("chi_quantile requires 0 < p < 1")
    d = model.dof
    lo = np.zeros(p_arr.shape)
    hi = np.full(p_arr.shape, 10.0 * math.sqrt(d))
    # extreme upper tail for small d; widen until bracketed
    while np.any(special.gammainc(d / 2, 0.5 * hi**2) < p_arr):
        hi = np.where(special.gammainc(d / 2, 0.5 * hi**2) < p_arr, 2 * hi, hi)
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        below = special.gammainc(d / 2, 0.5 * mid**2) < p_arr
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    x = 0.5 * (lo + hi)
    for _ in range(3):
        f = special.gammainc(d / 2, 0.5 * x**2) - p_arr
        dens = np.exp((d - 1) * np.log(x) - 0.5 * x**2 - model.log_norm)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = x - f / dens
        ok = np.isfinite(cand) & (cand > lo) & (cand < hi)
        x = np.where(ok, cand, x)
    return _scalar_or_array(x, p)


def chi_sample(model, n: int, seed: SeedLike) -> np.ndarray:
    """``n`` chi variates, each the norm of ``d`` iid standard normals."""
    model = _as_model(model)
    n = int(n)
    if n < 1:
        raise DegenerateInputError("chi_sample needs n >= 1")
    rng = make_rng(seed)
    d = model.dof
    rows = max(1, _SAMPLE_CHUNK // d)
    out = np.empty(n)
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        g = rng.standard_normal((stop - start, d))
        out[start:stop] = np.sqrt(np.einsum("ij,ij->i", g, g))
    return out


def chi_mean(model) -> float:
    """``sqrt(2) Gamma((d+1)/2) / Gamma(d/2)``."""
    model = _as_model(model)
    d = model.dof
    return math.sqrt(2.0) * math.exp(log_gamma((d + 1) / 2) - log_gamma(d / 2))


def chi_entropy_reference(model) -> float:
    """Differential entropy of chi(d) by adaptive quadrature of ``-p ln p``."""
    model = _as_model(model)
    d = model.dof

    def integrand(r):
        if r <= 0:
            return 0.0
        logp = (d - 1) * math.log(r) - 0.5 * r * r - model.log_norm
        return -math.exp(logp) * logp

    mode = model.mode
    upper = mode + 40.0
    pieces = [(0.0, mode), (mode, upper)] if mode > 0 else [(0.0, upper)]
    total = 0.0
    for a, b in pieces:
        val, _ = integrate.quad(integrand, a, b, limit=200, epsabs=1e-13, epsrel=1e-12)
        total += val
    return total
