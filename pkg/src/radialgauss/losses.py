"""VICReg-family losses and the radial Gaussianization terms.

Every loss returns its value together with the exact gradient with respect
to the sample matrix, so sample sets can be optimized directly.

Notation: ``Z`` is ``(N, d)``; ``r_i = ||z_i||``.

* variance   ``v(Z) = 1/d sum_j max(0, target - sqrt(Var z^j + eps))``
* invariance ``s(Z, Z') = 1/N sum_i ||z_i - z'_i||^2``
* covariance ``c(Z) = 1/d sum_{j != k} C(Z)_{jk}^2`` (unbiased ``C``)
* radial cross-entropy ``1/N sum_i (r_i^2 / 2 - (d - 1) ln r_i)``
* m-spacing entropy of the radii
* sorted-pair Wasserstein-1 between the radii and chi(d) draws
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .distributions import check_samples
from .errors import ConfigError, DegenerateInputError, NearOriginError
from .rng import SeedLike, make_rng, seed_entropy
from .special import ChiModel, chi_sample

__all__ = [
    "LossConfig",
    "LossReport",
    "COMPONENTS",
    "default_m",
    "variance_loss",
    "invariance_loss",
    "covariance_loss",
    "radial_ce_loss",
    "m_spacing_entropy",
    "radial_gaussianization_loss",
    "kl_to_chi",
    "w1_radial_loss",
    "total_loss",
    "e2mc_metric",
]

COMPONENTS = ("invariance", "variance", "covariance", "radial_ce", "radial_entropy", "radial_w1")


@dataclass(frozen=True)
class LossConfig:
    """Weights and estimator settings.

    ``m_spacing=None`` means ``floor(sqrt(N))`` at evaluation time.
    ``w1_weight`` scales the radial Wasserstein-1 term and can be combined
    freely with ``beta1``/``beta2``.
    """

    lambda1: float = 0.0
    lambda2: float = 0.0
    lambda3: float = 0.0
    beta1: float = 0.0
    beta2: float = 0.0
    w1_weight: float = 0.0
    var_target: float = 1.0
    var_eps: float = 1e-4
    m_spacing: Optional[int] = None
    pair_tie_eps: float = 1e-12

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "lambda3", "beta1", "beta2", "w1_weight"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise ConfigError(f"{name} must be a finite non-negative number, got {value!r}")
        if not self.var_eps > 0:
            raise ConfigError("var_eps must be positive")
        if not self.pair_tie_eps > 0:
            raise ConfigError("pair_tie_eps must be positive")
        if self.m_spacing is not None and int(self.m_spacing) < 1:
            raise ConfigError("m_spacing must be a positive integer")

    def spacing_for(self, n: int) -> int:
        m = default_m(n) if self.m_spacing is None else int(self.m_spacing)
        if not 1 <= m <= n - 1:
            raise DegenerateInputError(f"m-spacing needs 1 <= m <= N-1, got m={m}, N={n}")
        return m

    def replace(self, **changes) -> "LossConfig":
        data = asdict(self)
        data.update(changes)
        return LossConfig(**data)

    @property
    def is_radial(self) -> bool:
        return self.beta1 > 0 or self.beta2 > 0 or self.w1_weight > 0


@dataclass
class LossReport:
    """Total loss, unweighted components and per-view gradients.

    Components are summed over both views when ``Z'`` is present, and
    ``total = lambda1 inv + lambda2 var + lambda3 cov + beta1 ce
    - beta2 entropy + w1_weight w1``.
    """

    total: float
    components: dict
    gradient: Optional[np.ndarray] = None
    gradient_p: Optional[np.ndarray] = None
    weights: dict = field(default_factory=dict)

    def weighted_sum(self) -> float:
        return float(sum(self.weights[k] * self.components[k] for k in COMPONENTS
                         if self.weights[k] != 0.0))


def default_m(n: int) -> int:
    return max(1, int(math.isqrt(int(n))))


def _kernels_mod():
    return _kernels.active


def _c(Z):
    return np.ascontiguousarray(Z, dtype=float)


def variance_loss(Z, cfg: LossConfig = LossConfig()):
    """Hinge on the per-column standard deviation; returns ``(value, grad)``."""
    Z = _c(check_samples(Z))
    grad = np.zeros_like(Z)
    value = _kernels_mod().variance_value_grad(Z, cfg.var_target, cfg.var_eps, 1.0, grad)
    return value, grad


def invariance_loss(Z, Zp, cfg: LossConfig = LossConfig()):
    """Mean squared row distance; returns ``(value, grad_Z, grad_Zp)``."""
    Z = check_samples(Z, min_rows=1)
    Zp = check_samples(Zp, min_rows=1)
    if Z.shape != Zp.shape:
        raise DegenerateInputError(f"view shapes differ: {Z.shape} vs {Zp.shape}")
    diff = Z - Zp
    n = Z.shape[0]
    value = float(np.einsum("ij,ij->", diff, diff) / n)
    grad = (2.0 / n) * diff
    return value, grad, -grad


def covariance_loss(Z, cfg: LossConfig = LossConfig()):
    """Sum of squared off-diagonal covariances over ``d``; ``(value, grad)``."""
    Z = _c(check_samples(Z))
    grad = np.zeros_like(Z)
    value = _kernels_mod().covariance_value_grad(Z, 1.0, grad)
    return value, grad


def _radii_ok(Z, cfg):
    r = np.sqrt(np.einsum("ij,ij->i", Z, Z))
    if np.any(r <= cfg.pair_tie_eps):
        bad = int(np.argmin(r))
        raise NearOriginError(
            f"row {bad} has norm {r[bad]:.3g} <= {cfg.pair_tie_eps:g} (collapsed sample)"
        )
    return r


def radial_ce_loss(Z, cfg: LossConfig = LossConfig(beta1=1.0)):
    """Monte-Carlo chi cross-entropy without its constant; ``(value, grad)``.

    The value is ``beta1/N sum_i (r_i^2/2 - (d-1) ln r_i)``; the per-row
    gradient is ``beta1/N z_i (1 - (d-1)/r_i^2)``.
    """
    Z = _c(check_samples(Z, min_rows=1))
    _radii_ok(Z, cfg)
    grad = np.zeros_like(Z)
    ce, _, _ = _kernels_mod().radial_value_grad(
        Z, cfg.beta1, 0.0, 1, cfg.pair_tie_eps, grad, None, False
    )
    return cfg.beta1 * ce, grad


def m_spacing_entropy(r, m: Optional[int] = None, beta2: float = 1.0, tie_eps: float = 1e-12):
    """m-spacing differential-entropy estimate of 1-D samples ``r``.

    ``beta2/(N-m) sum_i ln((N+1)/m (r_(i+m) - r_(i)))`` over the order
    statistics; spacings below ``tie_eps`` are clamped (zero gradient).
    Returns ``(value, grad)`` with ``grad`` in the caller's (unsorted) order.
    """
    r = np.asarray(r, dtype=float).ravel()
    n = r.size
    if m is None:
        m = default_m(n)
    m = int(m)
    if m < 1 or n <= m:
        raise DegenerateInputError(f"m-spacing needs N > m >= 1, got N={n}, m={m}")
    if not np.all(np.isfinite(r)):
        raise DegenerateInputError("entropy input contains non-finite values")
    order = np.argsort(r, kind="stable")
    rs = np.ascontiguousarray(r[order])
    gs = np.zeros(n)
    value = _kernels_mod().spacing_entropy_sorted(rs, m, tie_eps, gs)
    grad = np.empty(n)
    grad[order] = beta2 * gs
    return beta2 * value, grad


def radial_gaussianization_loss(Z, cfg: LossConfig):
    """``beta1 * CE(radii) - beta2 * H_m(radii)``; returns ``(value, grad)``."""
    Z = _c(check_samples(Z))
    if cfg.beta1 == 0.0 and cfg.beta2 == 0.0:
        return 0.0, np.zeros_like(Z)
    _radii_ok(Z, cfg)
    m = cfg.spacing_for(Z.shape[0])
    grad = np.zeros_like(Z)
    ce, ent, _ = _kernels_mod().radial_value_grad(
        Z, cfg.beta1, cfg.beta2, m, cfg.pair_tie_eps, grad, None, cfg.beta2 != 0.0
    )
    value = cfg.beta1 * ce
    if cfg.beta2 != 0.0:
        value -= cfg.beta2 * ent
    return value, grad


def kl_to_chi(Z, m: Optional[int] = None) -> float:
    """Estimate of ``KL(radius law || chi(d))`` in nats.

    Cross-entropy (constant restored) minus the m-spacing entropy of the
    radii; consistent as ``N`` grows.  Diagnostic only.
    """
    Z = _c(check_samples(Z))
    cfg = LossConfig(beta1=1.0, beta2=1.0, m_spacing=m)
    _radii_ok(Z, cfg)
    m = cfg.spacing_for(Z.shape[0])
    ce, ent, _ = _kernels_mod().radial_value_grad(Z, 1.0, 1.0, m, cfg.pair_tie_eps, None, None, True)
    return ce + ChiModel(Z.shape[1]).log_norm - ent


def _w1_reference(n: int, d: int, seed: SeedLike) -> np.ndarray:
    return np.sort(chi_sample(ChiModel(d), n, seed))


def w1_radial_loss(Z, cfg: LossConfig, seed: SeedLike, reference=None):
    """``w1_weight`` times the sorted-pair W1 between radii and chi(d) draws.

    ``N`` reference radii are drawn from ``seed`` (or passed as
    ``reference``); the gradient is routed through both sorts and then
    through ``z / ||z||``.  Returns ``(value, grad)``.
    """
    Z = _c(check_samples(Z, min_rows=1))
    n, d = Z.shape
    if reference is None:
        ref = _w1_reference(n, d, seed)
    else:
        ref = np.sort(np.asarray(reference, dtype=float).ravel())
        if ref.size != n:
            raise DegenerateInputError(f"reference has {ref.size} radii for {n} samples")
    ref = np.ascontiguousarray(ref)
    grad = np.zeros_like(Z)
    K = _kernels_mod()
    w1, status = K.w1_radial_value_grad(Z, ref, cfg.w1_weight, cfg.pair_tie_eps, grad, None)
    if status:
        # rows at the origin have no direction: value is still defined, and
        # those rows get the zero subgradient
        w1, _ = K.w1_radial_value_grad(Z, ref, 0.0, cfg.pair_tie_eps, None, None)
        r = np.sqrt(np.einsum("ij,ij->i", Z, Z))
        order = np.argsort(r, kind="stable")
        dr = np.empty(n)
        dr[order] = cfg.w1_weight / n * np.sign(r[order] - ref)
        live = r > cfg.pair_tie_eps
        grad = np.zeros_like(Z)
        grad[live] = (dr[live] / r[live])[:, None] * Z[live]
    return cfg.w1_weight * w1, grad


def _view_terms(Z, cfg: LossConfig, w1_seed, want_grad: bool, order=None, w1_order=None):
    """Unweighted per-view components plus the weighted gradient."""
    K = _kernels_mod()
    n, d = Z.shape
    grad = np.zeros_like(Z) if want_grad else None
    comps = {}
    g = grad if want_grad else np.zeros_like(Z)
    radial = cfg.beta1 != 0.0 or cfg.beta2 != 0.0
    if radial:
        _radii_ok(Z, cfg)
    m = cfg.spacing_for(n)
    v, c, ce, ent, status = K.objective_step(
        Z, cfg.lambda2, cfg.var_target, cfg.var_eps, cfg.lambda3,
        cfg.beta1, cfg.beta2, m, cfg.pair_tie_eps, g, order, True,
    )
    comps["variance"] = v
    comps["covariance"] = c
    comps["radial_ce"] = ce
    comps["radial_entropy"] = ent
    if status and not radial:
        comps["radial_ce"] = comps["radial_entropy"] = float("nan")
    if cfg.w1_weight != 0.0:
        ref = _w1_reference(n, d, w1_seed)
        w1, status = K.w1_radial_value_grad(
            Z, ref, cfg.w1_weight, cfg.pair_tie_eps, g, w1_order
        )
        if status:
            _radii_ok(Z, cfg)
        comps["radial_w1"] = w1
    else:
        comps["radial_w1"] = 0.0
    return comps, grad


def total_loss(Z, Zp=None, cfg: LossConfig = LossConfig(), seed: SeedLike = 0,
               want_grad: bool = True) -> LossReport:
    """Weighted VICReg / Radial-VICReg / W1 objective over one or two views.

    ``Zp`` is required when ``lambda1 > 0``.  With ``lambda1 = 0`` this is the
    (Radial-)VCReg objective; passing only ``Z`` evaluates a single view.
    W1 reference draws for the two views come from independent child
    streams of ``seed``.
    """
    Z = _c(check_samples(Z))
    if cfg.lambda1 > 0 and Zp is None:
        raise ConfigError("lambda1 > 0 needs a second view Zp")
    seeds = np.random.SeedSequence(seed_entropy(seed)).spawn(2)
    comps, grad = _view_terms(Z, cfg, seeds[0], want_grad)
    grad_p = None
    if Zp is not None:
        Zp = _c(check_samples(Zp))
        if Zp.shape != Z.shape:
            raise DegenerateInputError(f"view shapes differ: {Z.shape} vs {Zp.shape}")
        comps_p, grad_p = _view_terms(Zp, cfg, seeds[1], want_grad)
        for k in comps_p:
            comps[k] = comps[k] + comps_p[k]
        inv, g_inv, gp_inv = invariance_loss(Z, Zp)
        comps["invariance"] = inv
        if want_grad and cfg.lambda1 != 0.0:
            grad += cfg.lambda1 * g_inv
            grad_p += cfg.lambda1 * gp_inv
    else:
        comps["invariance"] = 0.0
    weights = {
        "invariance": cfg.lambda1,
        "variance": cfg.lambda2,
        "covariance": cfg.lambda3,
        "radial_ce": cfg.beta1,
        "radial_entropy": -cfg.beta2,
        "radial_w1": cfg.w1_weight,
    }
    comps = {k: comps[k] for k in COMPONENTS}
    report = LossReport(0.0, comps, grad, grad_p, weights)
    report.total = report.weighted_sum()
    return report



def e2mc_metric(Z, m: Optional[int] = None) -> float:
    """Per-dimension entropy + whitening diagnostic.

    ``-1/d sum_j H_m(z^j) + c(Z) + v(Z)`` with default variance settings.
    """
    Z = _c(check_samples(Z))
    n, d = Z.shape
    if m is None:
        m = default_m(n)
    ent = sum(m_spacing_entropy(Z[:, j], m)[0] for j in range(d)) / d
    return -ent + covariance_loss(Z)[0] + variance_loss(Z)[0]
