"""Full-batch gradient descent on the sample points themselves.

Each step moves every point against the gradient of the configured loss,
with a linear warm-up followed by cosine decay of the step size.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional

import numpy as np

from . import _kernels
from .distributions import check_samples
from .errors import ConfigError, DivergenceError
from .losses import COMPONENTS, LossConfig, e2mc_metric, kl_to_chi, total_loss
from .rng import make_rng
from .special import ChiModel, chi_sample

__all__ = [
    "ScheduleConfig",
    "TrajectoryRecord",
    "lr_at",
    "optimize_samples",
    "DIVERGENCE_LIMIT",
    "TRAJECTORY_COLUMNS",
]

DIVERGENCE_LIMIT = 1e6

TRAJECTORY_COLUMNS = ("step", "lr", "total") + COMPONENTS + ("kl_to_chi", "e2mc")


@dataclass(frozen=True)
class ScheduleConfig:
    """Step-size schedule and update convention.

    ``warmup_steps=None`` resolves to 1% of ``total_steps``.

    ``grad_scale`` picks what the step size multiplies:

    ``"mean"``
        the gradient of the (sample-averaged) loss, ``z <- z - lr dL/dz``.
    ``"sum"``
        the per-sample gradient ``N dL/dz_i``, which makes ``lr`` independent
        of the number of points.

    ``batch_size`` (optional) evaluates each step on a random subset of rows;
    only those rows move.
    """

    base_lr: float
    total_steps: int
    warmup_steps: Optional[int] = None
    final_lr_fraction: float = 0.0
    grad_scale: str = "mean"
    batch_size: Optional[int] = None

    def __post_init__(self):
        if not (self.base_lr > 0 and math.isfinite(self.base_lr)):
            raise ConfigError(f"base_lr must be positive, got {self.base_lr}")
        if int(self.total_steps) < 1:
            raise ConfigError(f"total_steps must be >= 1, got {self.total_steps}")
        object.__setattr__(self, "total_steps", int(self.total_steps))
        if self.warmup_steps is None:
            object.__setattr__(self, "warmup_steps", self.total_steps // 100)
        w = int(self.warmup_steps)
        if not 0 <= w <= self.total_steps:
            raise ConfigError(f"warmup_steps must lie in [0, total_steps], got {w}")
        object.__setattr__(self, "warmup_steps", w)
        if not 0.0 <= self.final_lr_fraction <= 1.0:
            raise ConfigError("final_lr_fraction must lie in [0, 1]")
        if self.grad_scale not in ("mean", "sum"):
            raise ConfigError(f"grad_scale must be 'mean' or 'sum', got {self.grad_scale!r}")
        if self.batch_size is not None and int(self.batch_size) < 2:
            raise ConfigError("batch_size must be >= 2")

    def replace(self, **changes) -> "ScheduleConfig":
        data = asdict(self)
        data.update(changes)
        return ScheduleConfig(**data)


def lr_at(schedule: ScheduleConfig, step: int) -> float:
    """Step size at ``step`` (0 ... total_steps)."""
    step = int(step)
    T, W = schedule.total_steps, schedule.warmup_steps
    if not 0 <= step <= T:
        raise ConfigError(f"step {step} outside [0, {T}]")
    if step < W:
        return schedule.base_lr * step / W
    if T == W:
        return schedule.base_lr
    progress = (step - W) / (T - W)
    f = schedule.final_lr_fraction
    return schedule.base_lr * (f + (1.0 - f) * 0.5 * (1.0 + math.cos(math.pi * progress)))


@dataclass
class TrajectoryRecord:
    step: int
    lr: float
    total: float
    components: dict
    kl_to_chi: float = float("nan")
    e2mc: float = float("nan")
    metrics: Optional[dict] = None

    @property
    def radial_gaussianization(self) -> float:
        """Unweighted ``CE - H`` of the radii (the radial loss at beta1=beta2=1)."""
        return self.components["radial_ce"] - self.components["radial_entropy"]

    def row(self) -> list:
        return [self.step, self.lr, self.total] + [self.components[k] for k in COMPONENTS] + [
            self.kl_to_chi,
            self.e2mc,
        ]


def _step_seed(seed: int, step: int):
    return np.random.SeedSequence([int(seed), int(step)])


def _record(Z, cfg, seed, step, lr, metrics_fn) -> TrajectoryRecord:
    report = total_loss(Z, None, cfg, seed=_step_seed(seed, step), want_grad=False)
    rec = TrajectoryRecord(step, lr, report.total, dict(report.components))
    try:
        rec.kl_to_chi = kl_to_chi(Z, cfg.m_spacing)
    except ValueError:
        pass
    rec.e2mc = e2mc_metric(Z, cfg.m_spacing)
    if metrics_fn is not None:
        rec.metrics = dict(metrics_fn(Z, step))
    return rec


def optimize_samples(
    init,
    cfg: LossConfig,
    schedule: ScheduleConfig,
    seed: int = 0,
    record_every: int = 0,
    metrics_fn: Optional[Callable] = None,
):
    """Run gradient descent on the rows of ``init``.

    Update ``k`` (1-based) uses ``lr_at(schedule, k)``; the record for step
    ``k`` describes the points after ``k`` updates.  Records are taken at
    step 0, every ``record_every`` steps (0 disables the cadence) and at the
    final step.  ``seed`` drives the W1 reference draws (one fresh chi draw
    per step) and minibatch selection only.

    ``metrics_fn(Z, step) -> dict`` adds extra measurements to each record.

    Returns ``(final, records)``.  Raises :class:`DivergenceError` on a
    non-finite gradient, a point collapsing onto the origin while a radial
    term is active, or any coordinate exceeding ``DIVERGENCE_LIMIT``.
    """
    Z = np.array(check_samples(init), dtype=float, order="C", copy=True)
    if cfg.lambda1 > 0:
        raise ConfigError("sample optimization works on a single view; set lambda1 = 0")
    seed = int(seed)
    n, d = Z.shape
    K = _kernels.active
    record_every = int(record_every)
    if record_every < 0:
        raise ConfigError("record_every must be >= 0")

    batch = schedule.batch_size
    if batch is not None and int(batch) >= n:
        batch = None
    rows_n = n if batch is None else int(batch)
    m = cfg.spacing_for(rows_n)
    scale = float(rows_n) if schedule.grad_scale == "sum" else 1.0
    radial = cfg.beta1 != 0.0 or cfg.beta2 != 0.0
    chi = ChiModel(d)
    batch_rng = make_rng(np.random.SeedSequence([seed, 0x6261746368])) if batch else None

    active = (cfg.lambda2, cfg.lambda3, cfg.beta1, cfg.beta2, cfg.w1_weight)
    records: List[TrajectoryRecord] = [_record(Z, cfg, seed, 0, lr_at(schedule, 0), metrics_fn)]
    T = schedule.total_steps
    if not any(active):
        for step in range(1, T + 1):
            if step == T or (record_every and step % record_every == 0):
                records.append(_record(Z, cfg, seed, step, lr_at(schedule, step), metrics_fn))
        return Z, records

    order = np.arange(rows_n, dtype=np.int64)
    w1_order = np.arange(rows_n, dtype=np.int64)
    grad = np.empty((rows_n, d))
    for step in range(1, T + 1):
        lr = lr_at(schedule, step)
        if batch is None:
            X = Z
        else:
            idx = np.sort(batch_rng.choice(n, size=rows_n, replace=False))
            X = np.ascontiguousarray(Z[idx])
        grad.fill(0.0)
        _, _, _, _, status = K.objective_step(
            X, cfg.lambda2, cfg.var_target, cfg.var_eps, cfg.lambda3,
            cfg.beta1, cfg.beta2, m, cfg.pair_tie_eps, grad, order, False,
        )
        if status and radial:
            raise DivergenceError(step, "a point collapsed onto the origin")
        if cfg.w1_weight != 0.0:
            ref = np.sort(chi_sample(chi, rows_n, _step_seed(seed, step)))
            _, status = K.w1_radial_value_grad(
                X, ref, cfg.w1_weight, cfg.pair_tie_eps, grad, w1_order
            )
            if status:
                raise DivergenceError(step, "a point collapsed onto the origin")
        if not np.isfinite(grad).all():
            raise DivergenceError(step, "non-finite gradient")
        if lr != 0.0:
            if batch is None:
                Z -= (lr * scale) * grad
            else:
                Z[idx] -= (lr * scale) * grad
        peak = np.abs(Z).max()
        if not peak <= DIVERGENCE_LIMIT:
            raise DivergenceError(step, f"coordinate magnitude {peak:.3g} exceeds {DIVERGENCE_LIMIT:g}")
        if step == T or (record_every and step % record_every == 0):
            rec = _record(Z, cfg, seed, step, lr, metrics_fn)
            if not math.isfinite(rec.total):
                raise DivergenceError(step, "non-finite loss")
            records.append(rec)
    return Z, records
