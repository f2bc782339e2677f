"""Command-line entry point: ``radialgauss <command> [options]``.

Commands: ``sample``, ``optimize``, ``evaluate``, ``map``, ``sweep``.  Each
accepts ``--spec FILE`` and repeatable ``--set key=value`` overrides.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical
divergence, 4 input/output error.  Outputs go to ``--out`` or, by default,
to ``$RADIALGAUSS_OUTPUT/<command>`` (``./radialgauss_out/<command>``).
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

import numpy as np

from . import __version__
from .config import (
    ExperimentSpec,
    default_output_root,
    load_spec,
    load_sweep,
    parse_spec_text,
)
from .distributions import sample_by_name
from .errors import DivergenceError, ParseError
from .harness import (
    SWEEP_COLUMNS,
    map_samples,
    run_experiment,
    run_sweep,
    write_evaluation,
    write_experiment,
)
from .io import read_samples, write_samples
from .maps import KINDS

EXIT_OK, EXIT_USAGE, EXIT_DIVERGED, EXIT_IO = 0, 2, 3, 4

# sampler flags -> distribution parameter names
_DIST_FLAGS = {
    "alpha": float,
    "along_var": float,
    "perp_var": float,
    "arm_profile": str,
    "slices": int,
    "rotation": float,
    "d": int,
    "nu": float,
    "radius": float,
    "base": str,
    "contaminant": str,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _common(p):
    p.add_argument("--spec", help="key = value spec file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one spec key (repeatable)")
    p.add_argument("--out", help="output directory (file for `sample`)")
    p.add_argument("--seed", type=int, help="seed override")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="radialgauss", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="draw a synthetic sample set to CSV")
    _common(p)
    p.add_argument("--dist", help="distribution tag")
    p.add_argument("--n", type=int, help="number of samples")
    for flag, kind in _DIST_FLAGS.items():
        p.add_argument("--" + flag.replace("_", "-"), dest=flag, type=kind)

    p = sub.add_parser("optimize", help="gradient descent on samples")
    _common(p)
    p.add_argument("--init", help="initial samples CSV (default: sample the configured distribution)")
    p.add_argument("--steps", type=int, help="schedule.total_steps override")
    p.add_argument("--lr", type=float, help="schedule.base_lr override")
    p.add_argument("--no-plot", action="store_true")

    p = sub.add_parser("evaluate", help="metrics and histograms for a samples CSV")
    p.add_argument("samples")
    p.add_argument("--reference", default="gaussian", choices=["gaussian"],
                   help="reference law (standard normal / chi radii)")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--no-plot", action="store_true")

    p = sub.add_parser("map", help="fit and apply a whitening or radial map")
    p.add_argument("samples")
    p.add_argument("--kind", default="radial_vcreg", choices=list(KINDS))
    p.add_argument("--load", help="apply a saved map bundle instead of fitting")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=5)

    p = sub.add_parser("sweep", help="grid of optimization runs")
    _common(p)
    p.add_argument("--jobs", type=int, help="parallel worker processes")
    p.add_argument("--save-samples", action="store_true", help="keep each job's final samples")
    p.add_argument("--no-plot", action="store_true")
    return parser


def _spec(args, extra: List[str]) -> ExperimentSpec:
    overrides = list(args.set) + extra
    if args.spec:
        return load_spec(args.spec, overrides)
    return parse_spec_text("", "<defaults>", overrides)


def _cmd_sample(args) -> int:
    extra = []
    if args.dist:
        extra.append(f"distribution.name = {args.dist}")
    if args.n is not None:
        extra.append(f"n_samples = {args.n}")
    if args.seed is not None:
        extra.append(f"seed = {args.seed}")
    for flag in _DIST_FLAGS:
        value = getattr(args, flag)
        if value is not None:
            extra.append(f"distribution.{flag} = {value}")
    spec = _spec(args, extra)
    Z = sample_by_name(spec.distribution, spec.n_samples, [spec.seed, 0], **spec.params)
    out = args.out or os.path.join(default_output_root(), "sample", "samples.csv")
    header = [line for line in spec.resolved() if line.startswith(("distribution.", "n_samples", "seed"))]
    write_samples(out, Z, header)
    mean = Z.mean(axis=0)
    cov = np.atleast_2d(np.cov(Z, rowvar=False))
    print(f"wrote {Z.shape[0]} x {Z.shape[1]} samples to {out}")
    print("mean: " + " ".join(f"{v:+.4f}" for v in mean))
    print("cov:  " + " | ".join(" ".join(f"{v:+.4f}" for v in row) for row in cov))
    return EXIT_OK


def _cmd_optimize(args) -> int:
    extra = []
    if args.init:
        extra.append(f"init = {args.init}")
    if args.steps is not None:
        extra.append(f"schedule.total_steps = {args.steps}")
    if args.lr is not None:
        extra.append(f"schedule.base_lr = {args.lr}")
    if args.seed is not None:
        extra.append(f"seed = {args.seed}")
    spec = _spec(args, extra)
    out = args.out or spec.output_dir("optimize")
    res = run_experiment(spec)
    paths = write_experiment(res, out, plot=spec.plot and not args.no_plot)
    if res.final is None:
        print(f"error: {res.error}", file=sys.stderr)
        print(f"trajectory up to divergence not kept; see {paths['trajectory']}", file=sys.stderr)
        return EXIT_DIVERGED
    last = res.records[-1]
    print(f"{spec.schedule.total_steps} steps in {res.seconds:.1f}s; final loss {last.total:.6g}, "
          f"kl_to_chi {last.kl_to_chi:.4g}")
    for name, path in paths.items():
        print(f"{name}: {path}")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    Z, comments = read_samples(args.samples)
    out = args.out or os.path.join(default_output_root(), "evaluate")
    res = write_evaluation(Z, out, seed=args.seed, reps=args.reps,
                           comments=[f"samples = {args.samples}", f"seed = {args.seed}",
                                     f"reps = {args.reps}"],
                           plot=not args.no_plot)
    for k, v in res["report"].as_dict().items():
        print(f"{k}: {v:.6g}")
    return EXIT_OK


def _cmd_map(args) -> int:
    Z, _ = read_samples(args.samples)
    out = args.out or os.path.join(default_output_root(), "map")
    comments = [f"samples = {args.samples}", f"kind = {args.kind}", f"seed = {args.seed}"]
    if args.load:
        comments.append(f"map = {args.load}")
    res = map_samples(Z, args.kind, out, args.seed, args.reps, args.load, comments)
    for stage in ("before", "after"):
        rep = res[stage]
        print(f"{stage}: ks_radii_chi {rep.ks_radii_chi:.4g}  ks_angles_uniform "
              f"{rep.ks_angles_uniform:.4g}  w1_radii_to_chi {rep.w1_radii_to_chi:.4g}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    extra = [f"seed = {args.seed}"] if args.seed is not None else []
    overrides = list(args.set) + extra
    if not args.spec:
        print("error: sweep needs --spec", file=sys.stderr)
        return EXIT_USAGE
    sweep = load_sweep(args.spec, overrides)
    out = args.out or sweep.base.output_dir("sweep")
    rows = run_sweep(sweep, out, jobs=args.jobs, save_samples=args.save_samples,
                     plot=not args.no_plot)
    status = [r[SWEEP_STATUS] for r in rows]
    failed = sum(s != "ok" for s in status)
    print(f"{len(rows)} rows, {failed} failed; results in {out}")
    if failed == len(rows):
        return EXIT_DIVERGED if all(s == "diverged" for s in status) else EXIT_USAGE
    return EXIT_OK


SWEEP_STATUS = SWEEP_COLUMNS.index("status")

_COMMANDS = {
    "sample": _cmd_sample,
    "optimize": _cmd_optimize,
    "evaluate": _cmd_evaluate,
    "map": _cmd_map,
    "sweep": _cmd_sweep,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
