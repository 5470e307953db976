"""Benchmark the numpy kernels against the compiled core.

Runs each hot kernel on a synthetic node batch and reports per-call
times and speedup, verifying that both backends produce the same
numbers.  Usage::

    python benchmarks/bench_kernels.py [--nodes 50000] [--repeats 7]
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

import numpy as np

from cosserat._kernels import _numpy as knp

try:
    from cosserat._kernels import _core as kc
except ImportError:
    kc = None

PARAMS = (1.3, 0.7, 1.9, 1.1, 1.2, 0.9, 0.6, 2.0, 0.3, 0.2, 0.1)
PARAMS_P4 = (1.3, 0.7, 1.9, 1.1, 1.2, 0.9, 0.6, 4.0, 0.0, 0.0, 0.0)


@dataclass
class Row:
    kernel: str
    numpy_s: float
    compiled_s: float | None
    max_diff: float

    @property
    def speedup(self) -> float | None:
        return None if self.compiled_s is None else self.numpy_s / self.compiled_s


def _time(fn, repeats):
    best = np.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _diff(a, b):
    if isinstance(a, tuple):
        return max(float(np.abs(x - y).max()) for x, y in zip(a, b))
    return float(np.abs(np.asarray(a) - np.asarray(b)).max())


def run(n_nodes: int = 50000, repeats: int = 7, seed: int = 0):
    rng = np.random.default_rng(seed)
    w = rng.standard_normal((n_nodes, 3))
    r = knp.exp_so3_batch(w)
    f = np.eye(3) + 0.4 * rng.standard_normal((n_nodes, 3, 3))
    dr = rng.standard_normal((n_nodes, 3, 3, 3))
    e = 0.4 * rng.standard_normal((n_nodes, 3, 3))
    k = 0.4 * rng.standard_normal((n_nodes, 3, 3))

    cases = [
        ("strain", lambda m: m.strain_batch(r, f)),
        ("slices(project)", lambda m: m.slices_batch(r, dr, True)),
        ("measures", lambda m: m.measures_batch(r, f, dr)),
        ("energy_density", lambda m: m.energy_density(e, k, *PARAMS)),
        ("energy_density p=4", lambda m: m.energy_density(e, k, *PARAMS_P4)),
        ("energy_derivs", lambda m: m.energy_derivs(e, k, *PARAMS)),
        ("exp_so3", lambda m: m.exp_so3_batch(w)),
        ("retraction", lambda m: m.rotate_step_batch(r, 0.05 * w)),
    ]
    rows = []
    for name, fn in cases:
        t_np, out_np = _time(lambda: fn(knp), repeats)
        if kc is None:
            rows.append(Row(name, t_np, None, 0.0))
        else:
            t_c, out_c = _time(lambda: fn(kc), repeats)
            rows.append(Row(name, t_np, t_c, _diff(out_np, out_c)))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", type=int, default=50000)
    ap.add_argument("--repeats", type=int, default=7)
    args = ap.parse_args()
    rows = run(n_nodes=args.nodes, repeats=args.repeats)
    print(f"kernel benchmark: {args.nodes} nodes, best of {args.repeats}")
    if kc is None:
        print("compiled core NOT available; timing the numpy fallback only")
    header = f"{'kernel':22s} {'numpy':>10s} {'compiled':>10s} {'speedup':>8s} {'max diff':>10s}"
    print(header)
    print("-" * len(header))
    for row in rows:
        if row.compiled_s is None:
            print(f"{row.kernel:22s} {row.numpy_s * 1e3:8.3f}ms {'-':>10s} {'-':>8s} {'-':>10s}")
        else:
            print(
                f"{row.kernel:22s} {row.numpy_s * 1e3:8.3f}ms {row.compiled_s * 1e3:8.3f}ms "
                f"{row.speedup:7.1f}x {row.max_diff:10.2e}"
            )


if __name__ == "__main__":
    main()
