"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 10000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from radialgauss._kernels import fallback, get_backend


def _objective(K, Z, grad, order):
    def run():
        grad.fill(0.0)
        K.objective_step(Z, 25.0, 1.0, 1e-4, 25.0, 1.0, 0.1, int(np.sqrt(Z.shape[0])),
                         1e-12, grad, order, False)
    return run


def _assignment(K, cost):
    return lambda: K.linear_assignment(cost)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10_000, help="rows for the objective step")
    ap.add_argument("--lsap", type=int, default=300, help="size of the assignment problem")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    Z = rng.standard_normal((args.n, 2))
    A, B = rng.standard_normal((2, args.lsap, 2))
    cost = np.ascontiguousarray(np.linalg.norm(A[:, None] - B[None], axis=2))
    try:
        backends = {"python": fallback, "cython": get_backend("cython")}
    except ImportError:
        backends = {"python": fallback}
        print("compiled extension not built; timing the fallback only")

    cases = {
        f"objective_step n={args.n}": lambda K: _objective(K, Z, np.empty_like(Z),
                                                           np.arange(args.n, dtype=np.int64)),
        f"linear_assignment {args.lsap}x{args.lsap}": lambda K: _assignment(K, cost),
    }
    print(f"{'kernel':36s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for label, make in cases.items():
        times = {}
        for name, K in backends.items():
            fn = make(K)
            fn()
            number = 1 if "assignment" in label and name == "python" else 5
            times[name] = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
        line = f"{label:36s}" + "".join(f"{1e3 * t:10.2f}ms" for t in times.values())
        if len(times) == 2:
            line += f"  {times['python'] / times['cython']:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
