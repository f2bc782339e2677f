"""Run configuration: flat ``key = value`` files with dotted keys.

Example::

    # X-distribution, Radial-VCReg
    distribution.name = x
    n_samples = 10000
    seed = 0
    record_every = 200
    loss.lambda2 = 25
    loss.lambda3 = 25
    loss.beta1 = 1
    loss.beta2 = 0.1
    schedule.base_lr = 0.05
    schedule.total_steps = 20000

Keys under ``distribution.`` other than ``name`` are forwarded to the
sampler.  Sweep files add comma-separated ``sweep.<axis>`` lists and
``seeds``.  Lines starting with ``#`` and blank lines are ignored.  The
same format is written at the top of every output CSV, so a results file
can be fed back as a spec.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .distributions import DISTRIBUTIONS
from .errors import ConfigError
from .io import format_value
from .losses import LossConfig
from .optimizer import ScheduleConfig

__all__ = [
    "OUTPUT_ENV",
    "ExperimentSpec",
    "SweepSpec",
    "SweepJob",
    "SWEEP_AXES",
    "parse_lines",
    "parse_spec_text",
    "load_spec",
    "load_sweep",
    "spec_from_mapping",
    "sweep_from_mapping",
    "default_output_root",
]

OUTPUT_ENV = "RADIALGAUSS_OUTPUT"

SWEEP_AXES = ("method", "alpha", "lr", "beta1", "beta2", "lambda2", "lambda3", "w1_weight")
METHODS = ("vcreg", "radial_vcreg")

_LOSS_FIELDS = {f.name for f in fields(LossConfig)}
_SCHEDULE_FIELDS = {f.name for f in fields(ScheduleConfig)}
_TOP = {
    "n_samples": int,
    "seed": int,
    "job_index": int,
    "record_every": int,
    "outputs": str,
    "init": str,
    "plot": bool,
    "metrics.reps": int,
}


def default_output_root() -> str:
    return os.environ.get(OUTPUT_ENV, "radialgauss_out")


def parse_lines(text: str, source: str = "<spec>") -> Dict[str, Tuple[str, int]]:
    """``key -> (raw value, line number)``; duplicate keys are an error."""
    out: Dict[str, Tuple[str, int]] = {}
    for no, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if "=" not in s:
            raise ConfigError(f"{source}:{no}: expected 'key = value', got {s!r}")
        key, value = (p.strip() for p in s.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{no}: empty key")
        if key in out:
            raise ConfigError(f"{source}:{no}: duplicate key {key!r} (first on line {out[key][1]})")
        out[key] = (value, no)
    return out


def _auto(value: str):
    low = value.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", ""):
        return None
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        return value


def _typed(value: str, kind, key: str, where: str):
    if value.lower() in ("none", "auto", "") and kind is not str:
        return None
    try:
        if kind is bool:
            low = value.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(value)
            return low in ("true", "1", "yes")
        if kind is int:
            f = float(value)
            if not f.is_integer():
                raise ValueError(value)
            return int(f)
        if kind is float:
            return float(value)
        return value
    except ValueError:
        raise ConfigError(f"{where}: {key} expects {kind.__name__}, got {value!r}") from None


_LOSS_TYPES = {name: (int if name == "m_spacing" else float) for name in _LOSS_FIELDS}
_SCHEDULE_TYPES = {
    "base_lr": float,
    "total_steps": int,
    "warmup_steps": int,
    "final_lr_fraction": float,
    "grad_scale": str,
    "batch_size": int,
}


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce one optimization run.

    ``seed`` draws the initial samples and the metric reference sets;
    ``job_index`` (set by sweeps) separates the optimizer streams of
    different configurations sharing a seed.
    """

    distribution: str = "x"
    dist_params: Tuple[Tuple[str, object], ...] = ()
    n_samples: int = 10_000
    loss: LossConfig = LossConfig()
    schedule: ScheduleConfig = ScheduleConfig(base_lr=0.05, total_steps=20_000)
    seed: int = 0
    job_index: int = 0
    record_every: int = 200
    outputs: Optional[str] = None
    init: Optional[str] = None
    plot: bool = True
    metrics_reps: int = 5

    def __post_init__(self):
        if self.distribution not in DISTRIBUTIONS:
            raise ConfigError(
                f"unknown distribution {self.distribution!r}; choose from {sorted(DISTRIBUTIONS)}"
            )
        if self.n_samples < 2:
            raise ConfigError("n_samples must be >= 2")
        if self.record_every < 0:
            raise ConfigError("record_every must be >= 0")
        if self.metrics_reps < 1:
            raise ConfigError("metrics.reps must be >= 1")

    @property
    def params(self) -> dict:
        return dict(self.dist_params)

    def with_params(self, **params) -> "ExperimentSpec":
        merged = dict(self.dist_params)
        merged.update(params)
        return replace(self, dist_params=tuple(sorted(merged.items())))

    def resolved(self) -> List[str]:
        """Canonical ``key = value`` lines (output location excluded)."""
        lines = [f"distribution.name = {self.distribution}"]
        lines += [f"distribution.{k} = {format_value(v)}" for k, v in self.dist_params]
        lines += [
            f"n_samples = {self.n_samples}",
            f"seed = {self.seed}",
            f"job_index = {self.job_index}",
            f"record_every = {self.record_every}",
            f"metrics.reps = {self.metrics_reps}",
        ]
        if self.init is not None:
            lines.append(f"init = {self.init}")
        for k, v in asdict(self.loss).items():
            lines.append(f"loss.{k} = {'auto' if v is None else format_value(v)}")
        for k, v in asdict(self.schedule).items():
            lines.append(f"schedule.{k} = {'none' if v is None else format_value(v)}")
        return lines

    def output_dir(self, command: str) -> str:
        return self.outputs or os.path.join(default_output_root(), command)


def spec_from_mapping(raw: Dict[str, Tuple[str, int]], source: str = "<spec>",
                      base: Optional[ExperimentSpec] = None,
                      ignore=()) -> ExperimentSpec:
    """Build an :class:`ExperimentSpec` from parsed lines (unknown keys are errors)."""
    base = base or ExperimentSpec()
    top = {}
    loss = asdict(base.loss)
    sched = asdict(base.schedule)
    params = dict(base.dist_params)
    distribution = base.distribution
    for key, (value, no) in raw.items():
        where = f"{source}:{no}"
        if key in ignore or key.startswith("sweep.") or key in ("seeds", "jobs"):
            continue
        if key == "distribution.name":
            distribution = value
        elif key.startswith("distribution."):
            params[key.split(".", 1)[1]] = _auto(value)
        elif key.startswith("loss."):
            name = key[5:]
            if name not in _LOSS_TYPES:
                raise ConfigError(f"{where}: unknown key {key!r}")
            loss[name] = _typed(value, _LOSS_TYPES[name], key, where)
        elif key.startswith("schedule."):
            name = key[9:]
            if name not in _SCHEDULE_TYPES:
                raise ConfigError(f"{where}: unknown key {key!r}")
            sched[name] = _typed(value, _SCHEDULE_TYPES[name], key, where)
        elif key in _TOP:
            top[key] = _typed(value, _TOP[key], key, where)
        else:
            raise ConfigError(f"{where}: unknown key {key!r}")
    if "total_steps" in {k[9:] for k in raw if k.startswith("schedule.")} and \
            "schedule.warmup_steps" not in raw:
        sched["warmup_steps"] = None
    try:
        loss_cfg = LossConfig(**{k: v for k, v in loss.items() if v is not None or k == "m_spacing"})
        schedule = ScheduleConfig(**sched)
    except TypeError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    kw = dict(
        distribution=distribution,
        dist_params=tuple(sorted(params.items())),
        loss=loss_cfg,
        schedule=schedule,
    )
    for key, value in top.items():
        kw["metrics_reps" if key == "metrics.reps" else key] = value
    return replace(base, **kw)


def parse_spec_text(text: str, source: str = "<spec>", overrides: Sequence[str] = ()) -> ExperimentSpec:
    raw = parse_lines(text, source)
    raw.update(parse_lines("\n".join(overrides), "--set"))
    return spec_from_mapping(raw, source)


def load_spec(path, overrides: Sequence[str] = ()) -> ExperimentSpec:
    return parse_spec_text(_read(path), str(path), overrides)


def _read(path) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{path}: not UTF-8 text ({exc})") from None


# ---------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class SweepJob:
    config_index: int
    seed: int
    spec: ExperimentSpec
    settings: Tuple[Tuple[str, object], ...]

    @property
    def key(self):
        return (self.config_index, self.seed)

    @property
    def method(self) -> str:
        return dict(self.settings)["method"]


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian grid over ``axes`` times ``seeds`` around ``base``.

    Axis ``method`` selects ``vcreg`` (all radial weights forced to 0) or
    ``radial_vcreg`` (radial weights from the ``beta1``/``beta2``/``w1_weight``
    axes or the base).  ``lr`` maps to ``schedule.base_lr``, ``alpha`` to the
    distribution's mixture weight, the rest to loss weights.
    """

    base: ExperimentSpec
    axes: Tuple[Tuple[str, Tuple], ...] = ()
    seeds: Tuple[int, ...] = (0,)
    jobs: int = 1

    def __post_init__(self):
        names = [a for a, _ in self.axes]
        for name, values in self.axes:
            if name not in SWEEP_AXES:
                raise ConfigError(f"unknown sweep axis {name!r}; choose from {SWEEP_AXES}")
            if not values:
                raise ConfigError(f"sweep axis {name!r} is empty")
            if name == "method" and any(v not in METHODS for v in values):
                raise ConfigError(f"sweep.method values must be in {METHODS}")
        if len(set(names)) != len(names):
            raise ConfigError("duplicate sweep axis")
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def configs(self) -> List[Tuple[Tuple[str, object], ...]]:
        """Distinct resolved settings in grid order (vcreg duplicates merged)."""
        axes = [(a, v) for a, v in sorted(self.axes, key=lambda av: SWEEP_AXES.index(av[0]))]
        names = [a for a, _ in axes]
        seen = set()
        out = []
        for combo in itertools.product(*[v for _, v in axes]):
            s = dict(zip(names, combo))
            settings = self._resolve(s)
            if settings not in seen:
                seen.add(settings)
                out.append(settings)
        return out

    def _resolve(self, s: dict) -> Tuple[Tuple[str, object], ...]:
        base = self.base
        loss = base.loss
        method = s.get("method")
        if method is None:
            method = "radial_vcreg" if loss.is_radial else "vcreg"
        vals = {
            "alpha": float(s.get("alpha", base.params.get("alpha", math.nan))),
            "lr": float(s.get("lr", base.schedule.base_lr)),
            "lambda2": float(s.get("lambda2", loss.lambda2)),
            "lambda3": float(s.get("lambda3", loss.lambda3)),
        }
        for k in ("beta1", "beta2", "w1_weight"):
            vals[k] = 0.0 if method == "vcreg" else float(s.get(k, getattr(loss, k)))
        return (("method", method),) + tuple((k, vals[k]) for k in
                                             ("alpha", "lr", "beta1", "beta2", "lambda2",
                                              "lambda3", "w1_weight"))

    def jobs_list(self) -> List[SweepJob]:
        out = []
        for ci, settings in enumerate(self.configs()):
            s = dict(settings)
            spec = replace(
                self.base,
                loss=self.base.loss.replace(
                    beta1=s["beta1"], beta2=s["beta2"], w1_weight=s["w1_weight"],
                    lambda2=s["lambda2"], lambda3=s["lambda3"],
                ),
                schedule=self.base.schedule.replace(base_lr=s["lr"]),
                job_index=ci,
            )
            if not math.isnan(s["alpha"]):
                spec = spec.with_params(alpha=s["alpha"])
            for seed in self.seeds:
                out.append(SweepJob(ci, int(seed), replace(spec, seed=int(seed)), settings))
        return out

    def size(self) -> Tuple[int, int]:
        return len(self.configs()), len(self.seeds)

    def resolved(self) -> List[str]:
        lines = self.base.resolved()
        for name, values in self.axes:
            lines.append(f"sweep.{name} = " + ", ".join(format_value(v) for v in values))
        lines.append("seeds = " + ", ".join(str(s) for s in self.seeds))
        return lines


def _split_list(value: str, kind, key: str, where: str):
    items = [v.strip() for v in value.split(",") if v.strip()]
    if not items:
        raise ConfigError(f"{where}: {key} needs at least one value")
    return tuple(_typed(v, kind, key, where) for v in items)


def sweep_from_mapping(raw: Dict[str, Tuple[str, int]], source: str = "<sweep>") -> SweepSpec:
    base = spec_from_mapping(raw, source)
    axes = []
    seeds = (base.seed,)
    jobs = 1
    for key, (value, no) in raw.items():
        where = f"{source}:{no}"
        if key.startswith("sweep."):
            name = key[6:]
            if name not in SWEEP_AXES:
                raise ConfigError(f"{where}: unknown sweep axis {name!r}")
            kind = str if name == "method" else float
            axes.append((name, _split_list(value, kind, key, where)))
        elif key == "seeds":
            seeds = _split_list(value, int, key, where)
        elif key == "jobs":
            jobs = _typed(value, int, key, where)
    return SweepSpec(base, tuple(axes), tuple(seeds), jobs)


def load_sweep(path, overrides: Sequence[str] = ()) -> SweepSpec:
    raw = parse_lines(_read(path), str(path))
    raw.update(parse_lines("\n".join(overrides), "--set"))
    return sweep_from_mapping(raw, str(path))
