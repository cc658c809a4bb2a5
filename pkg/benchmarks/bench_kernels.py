"""Compare the compiled simulation kernels against the pure-Python fallback.

Run with ``python benchmarks/bench_kernels.py``. Both backends consume the
same uniforms, so the script also checks that their outputs are identical.
"""

import argparse
import time

import numpy as np

from ocrp import kernels
from ocrp.montecarlo import leftmost_tables


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(n, steps, alpha):
    rng = np.random.default_rng(0)
    u_grow = rng.random(n - 1)
    u_up, u_down = rng.random(steps), rng.random(steps)
    u_q = rng.random(steps)
    start = kernels.python_backend.grow([1], alpha, 0.0, u_grow)
    tab = leftmost_tables(n, alpha)
    return {
        f"grow (n={n})": lambda b: b.grow([1], alpha, 0.0, u_grow),
        f"updown_path (n={n}, {steps} steps)":
            lambda b: b.updown_path(start, alpha, 0.0, u_up, u_down)[1].tolist(),
        f"q_path (n={n}, {steps} steps)":
            lambda b: b.q_path(n // 2, tab.down, tab.up, tab.cumq, u_q).tolist(),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--steps", type=int, default=40_000)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    compiled, python = kernels.compiled_backend, kernels.python_backend
    if compiled is None:
        print("compiled extension unavailable; only the Python backend is timed")
    print(f"{'kernel':<36}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}")
    for name, fn in cases(args.n, args.steps, args.alpha).items():
        tp, outp = _best(lambda: fn(python), args.repeat)
        if compiled is None:
            print(f"{name:<36}{tp:>12.4f}{'-':>14}{'-':>10}")
            continue
        tc, outc = _best(lambda: fn(compiled), args.repeat)
        if outc != outp:
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<36}{tp:>12.4f}{tc:>14.4f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
