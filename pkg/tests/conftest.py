import numpy as np
import pytest


def central_fd(f, X, h_rel=1e-5):
    """Central finite-difference gradient of scalar ``f`` at array ``X``."""
    X = np.array(X, dtype=float)
    G = np.empty_like(X)
    flat = X.reshape(-1)
    g = G.reshape(-1)
    for k in range(flat.size):
        h = h_rel * max(1.0, abs(flat[k]))
        old = flat[k]
        flat[k] = old + h
        fp = f(X)
        flat[k] = old - h
        fm = f(X)
        flat[k] = old
        g[k] = (fp - fm) / (2 * h)
    return G


def rel_err(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-12))


def separated_radii_points(rng, n, d, gap, lo=0.5, hi=2.5):
    """Random points whose radii are pairwise at least ``gap`` apart."""
    base = np.sort(rng.uniform(lo, hi, n))
    base = base + gap * np.arange(n)
    rng.shuffle(base)
    dirs = rng.standard_normal((n, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return dirs * base[:, None]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def report_criterion(number, ok, detail):
    """Record and print one acceptance verdict line."""
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
