"""Seeded simulation of the composition chain and its leftmost column.

Replica ``r`` of a run with master seed ``s`` draws every uniform from
``PCG64(SeedSequence(s, spawn_key=(r,)))``; results therefore do not depend
on the thread count or on scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import betainc

from . import kernels
from .chains import (
    ChainParams,
    leftmost_kernel_Q,
    leftmost_stationary_q,
    leftmost_stationary_q_float,
    local_probs,
)
from .core import ENUMERATION_CAP, Composition, check_alpha, exact_solve
from .report import SimReport

#: Above this n the leftmost tables are built in float arithmetic.
EXACT_TABLE_MAX = 200
KS_THRESHOLD = 0.05
MONOTONE_SLACK = 0.02


# -- random streams ---------------------------------------------------------------------

@dataclass(frozen=True)
class RngStream:
    seed: int
    replica: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.replica,))
        return np.random.Generator(np.random.PCG64(ss))


def substream(seed: int, replica: int) -> np.random.Generator:
    return RngStream(seed, replica).generator()


def default_threads() -> int:
    return os.cpu_count() or 1


def run_replicas(func: Callable[[np.random.Generator], object], replicas: int, seed: int,
                 threads: int | None = None, chunk: int = 256) -> list:
    """``[func(substream(seed, r)) for r in range(replicas)]``, possibly threaded."""
    threads = threads or default_threads()

    def work(start):
        return [func(substream(seed, r)) for r in range(start, min(start + chunk, replicas))]

    starts = range(0, replicas, chunk)
    if threads == 1 or replicas <= chunk:
        parts = [work(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, starts))
    return [x for part in parts for x in part]


# -- samplers ---------------------------------------------------------------------------

def sample_stationary_alpha_zero(n: int, alpha, rng: np.random.Generator) -> Composition:
    """Exact draw from the (alpha, 0) stationary law: n - 1 growth steps from (1)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    check_alpha(alpha)
    return Composition(kernels.grow([1], float(alpha), 0.0, rng.random(n - 1)))


def sample_stationary_alpha_alpha(m: int, alpha, rng: np.random.Generator) -> Composition:
    """Exact draw from pi~_m: m (alpha, alpha) growth steps from the empty composition."""
    check_alpha(alpha)
    return Composition(kernels.grow([], float(alpha), float(alpha), rng.random(m)))


def step_updown(sigma: Composition, params: ChainParams, rng: np.random.Generator) -> Composition:
    if not sigma:
        raise ValueError("the up-down chain lives on compositions of n >= 1")
    u = rng.random(2)
    parts, _ = kernels.updown_path(list(sigma), float(params.alpha), float(params.theta),
                                   u[:1], u[1:])
    return Composition(parts)


@dataclass(frozen=True)
class LeftmostTables:
    """Float thresholds for one step of Q_n from a single uniform.

    From state i: ``u < down[i]`` moves to i - 1 (or, at i = 1, jumps to a
    q_n-distributed state), ``u < up[i]`` moves to i + 1, otherwise stay.
    """

    n: int
    down: np.ndarray
    up: np.ndarray
    cumq: np.ndarray


@lru_cache(maxsize=64)
def leftmost_tables(n: int, alpha) -> LeftmostTables:
    down = np.zeros(n + 1)
    up = np.zeros(n + 1)
    if n <= EXACT_TABLE_MAX and isinstance(alpha, Fraction):
        for i in range(1, n + 1):
            lp = local_probs(n, alpha, i)
            down[i] = float(lp.down)
            up[i] = float(lp.down + lp.up)
        q = leftmost_stationary_q(n, alpha)
        acc, cum = Fraction(0), []
        for j in range(1, n + 1):
            acc += q[j]
            cum.append(float(acc))
        cumq = np.array(cum)
    else:
        a = float(alpha)
        i = np.arange(1, n + 1, dtype=float)
        d = n * (n + 1.0)
        down[1:] = i * (n - i + a) / d
        up[1:] = down[1:] + (i - a) * (n - i) / d
        cumq = np.cumsum(leftmost_stationary_q_float(n, a))
    cumq[-1] = 1.0
    return LeftmostTables(n, down, up, cumq)


def _initial_composition(n: int, alpha, init, rng) -> Composition:
    if init == "stationary":
        return sample_stationary_alpha_zero(n, alpha, rng)
    i0 = int(init)
    if not 1 <= i0 <= n:
        raise ValueError(f"initial state must lie in 1..{n}, got {init}")
    # the Lambda_n mixture: (i0, sigma) with sigma ~ pi~_{n - i0}
    return Composition((i0, *sample_stationary_alpha_alpha(n - i0, alpha, rng)))


def _resolve_method(n: int, method: str) -> str:
    if method == "auto":
        return "full_chain" if n <= ENUMERATION_CAP else "q_chain"
    if method not in ("full_chain", "q_chain"):
        raise ValueError(f"unknown method {method!r}")
    return method


def simulate_leftmost(n: int, alpha, init, steps: int, rng: np.random.Generator,
                      method: str = "auto") -> np.ndarray:
    """Trajectory Y(0..steps) of the (alpha, 0) leftmost column.

    ``init`` is a state in 1..n or ``"stationary"``. ``full_chain`` runs the
    composition chain and projects; ``q_chain`` steps Q_n directly.
    """
    check_alpha(alpha)
    if init != "stationary" and not 1 <= int(init) <= n:
        raise ValueError(f"initial state must lie in 1..{n}, got {init}")
    method = _resolve_method(n, method)
    if method == "full_chain":
        sigma = _initial_composition(n, alpha, init, rng)
        _, path = kernels.updown_path(list(sigma), float(alpha), 0.0,
                                      rng.random(steps), rng.random(steps))
        return path
    i0 = sample_stationary_alpha_zero(n, alpha, rng)[0] if init == "stationary" else int(init)
    tab = leftmost_tables(n, alpha)
    return kernels.q_path(i0, tab.down, tab.up, tab.cumq, rng.random(steps))


def leftmost_batch(n: int, alpha, replicas: int, steps: int, seed: int, init="stationary",
                   method: str = "auto", record: Sequence[int] | None = None,
                   threads: int | None = None) -> np.ndarray:
    """Array of shape (replicas, len(record)) holding Y(record[k]) per replica."""
    idx = np.arange(steps + 1) if record is None else np.asarray(record)

    def one(rng):
        return simulate_leftmost(n, alpha, init, steps, rng, method)[idx]

    return np.array(run_replicas(one, replicas, seed, threads), dtype=np.int64).reshape(
        replicas, len(idx))


def stationary_leftmost_fractions(n: int, alpha, samples: int, seed: int,
                                  threads: int | None = None) -> np.ndarray:
    """sigma_1 / n for independent draws from the (alpha, 0) stationary law."""
    a = float(alpha)

    def one(rng):
        return kernels.grow([1], a, 0.0, rng.random(n - 1))[0]

    return np.array(run_replicas(one, samples, seed, threads), dtype=float) / n


# -- Kolmogorov-Smirnov ----------------------------------------------------------------

@dataclass(frozen=True)
class KsReport:
    samples: int
    statistic: float
    a: float
    b: float
    threshold: float = KS_THRESHOLD

    @property
    def passed(self) -> bool:
        return self.statistic < self.threshold


def beta_cdf(x, alpha) -> np.ndarray:
    """CDF of Beta(1 - alpha, alpha), the limiting law of the leftmost block."""
    a = float(alpha)
    return betainc(1 - a, a, np.clip(np.asarray(x, dtype=float), 0.0, 1.0))


def ks_distance(samples, alpha, threshold: float = KS_THRESHOLD) -> KsReport:
    """One-sample KS statistic against Beta(1 - alpha, alpha); ties are handled exactly."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ValueError("KS distance of an empty sample")
    n = x.size
    f = beta_cdf(x, alpha)
    # empirical CDF just after / just before each distinct value
    after = np.searchsorted(x, x, side="right") / n
    before = np.searchsorted(x, x, side="left") / n
    d = max(float(np.max(after - f)), float(np.max(f - before)))
    a = float(alpha)
    return KsReport(n, min(max(d, 0.0), 1.0), 1 - a, a, threshold)


def ks_distance_discrete(atoms, weights, alpha) -> float:
    """Exact KS distance of a finitely supported law from Beta(1 - alpha, alpha)."""
    order = np.argsort(atoms)
    atoms = np.asarray(atoms, dtype=float)[order]
    weights = np.asarray([float(w) for w in weights])[order]
    cdf_after = np.cumsum(weights)
    cdf_before = cdf_after - weights
    f = beta_cdf(atoms, alpha)
    return float(max(np.max(np.abs(cdf_after - f)), np.max(np.abs(f - cdf_before))))


# -- diagnostics ----------------------------------------------------------------------

def leftmost_stationary_exact(n: int, alpha) -> dict:
    """Fixed vector of Q_n, solved exactly."""
    alpha = Fraction(alpha)
    q = leftmost_kernel_Q(n, alpha)
    a = [[q[j, i] - (i == j) for j in range(1, n + 1)] for i in range(1, n + 1)]
    a[-1] = [1] * n
    rhs = [0] * (n - 1) + [1]
    return dict(zip(range(1, n + 1), exact_solve(a, rhs)))


def scaling_limit_diagnostic(alpha, n_list: Sequence[int], t: float, samples: int, seed: int,
                             method: str = "auto", threads: int | None = None,
                             exact_max: int = 12, slack: float = MONOTONE_SLACK):
    """KS distance of Y_n(floor(n^2 t)) / n to Beta(1 - alpha, alpha), run from stationarity.

    Rows with n <= exact_max use the exact stationary law of Q_n and carry
    ``exact = 1``; larger n are Monte Carlo.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    rows = []
    report = SimReport("converge", {"alpha": alpha, "n_list": list(n_list), "t": t,
                                    "samples": samples, "seed": seed, "slack": slack})
    for k, n in enumerate(n_list):
        if n < 2:
            raise ValueError("every n must be at least 2")
        steps = math.floor(n * n * t)
        if n <= exact_max:
            law = leftmost_stationary_exact(n, alpha)
            ks = ks_distance_discrete([i / n for i in law], list(law.values()), alpha)
            rows.append({"n": n, "steps": steps, "samples": 0, "ks": ks, "exact": 1})
        else:
            vals = leftmost_batch(n, alpha, samples, steps, seed + k, "stationary", method,
                                  record=[steps], threads=threads)[:, 0] / n
            ks = ks_distance(vals, alpha).statistic
            rows.append({"n": n, "steps": steps, "samples": samples, "ks": ks, "exact": 0})
    for prev, cur in zip(rows, rows[1:]):
        if cur["ks"] > prev["ks"] + slack:
            report.fail(f"KS rose from {prev['ks']:.4f} (n={prev['n']}) "
                        f"to {cur['ks']:.4f} (n={cur['n']})")
    for row in rows:
        report.metric(f"ks_n{row['n']}", row["ks"])
    return rows, report


def eigen_decay_check(n: int, alpha, i0: int, m: int, checkpoints: Sequence[int],
                      replicas: int, seed: int, method: str = "q_chain",
                      threads: int | None = None, n_se: float = 3.0) -> SimReport:
    """Monte Carlo mean of f_m(Y_k) from Y_0 = i0 against lambda_m^k f_m(i0)."""
    from .semigroup import eigenfunction

    f, lam = eigenfunction(n, alpha, m)
    fvals = np.array([0.0] + [float(v) for v in f])
    report = SimReport("eigen-decay", {"n": n, "alpha": alpha, "i0": i0, "m": m,
                                       "replicas": replicas, "seed": seed, "method": method})
    ys = leftmost_batch(n, alpha, replicas, max(checkpoints), seed, i0, method,
                        record=list(checkpoints), threads=threads)
    for col, k in enumerate(checkpoints):
        vals = fvals[ys[:, col]]
        mean = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(replicas))
        expected = float(lam) ** k * float(f[i0 - 1])
        report.metric(f"k{k}_mean", mean)
        report.metric(f"k{k}_expected", expected)
        report.metric(f"k{k}_se", se)
        if abs(mean - expected) > n_se * se:
            report.fail(f"k={k}: mean {mean:.6f} vs expected {expected:.6f} "
                        f"exceeds {n_se} standard errors ({se:.2e})")
    return report
