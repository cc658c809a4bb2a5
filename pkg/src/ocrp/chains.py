"""Ordered CRP up-down chains and their leftmost column.

All constructions are type-preserving: a Fraction ``alpha`` gives exact
rational kernels, a float ``alpha`` gives floating-point ones. The ``verify_*``
functions insist on exact input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .core import (
    EMPTY,
    Composition,
    KernelMatrix,
    StateIndex,
    check_alpha,
    enumerate_compositions,
    identity_kernel,
    is_exact,
    rising,
)
from .report import SimReport


@dataclass(frozen=True)
class ChainParams:
    alpha: Fraction | float
    theta: Fraction | float = 0

    def __post_init__(self):
        check_alpha(self.alpha)
        if self.theta < 0:
            raise ValueError(f"theta must be nonnegative, got {self.theta}")

    @property
    def exact(self) -> bool:
        return is_exact(self.alpha) and is_exact(self.theta)

    @classmethod
    def biased(cls, alpha) -> "ChainParams":
        """The (alpha, 0) chain."""
        return cls(alpha, 0)

    @classmethod
    def symmetric(cls, alpha) -> "ChainParams":
        """The (alpha, alpha) chain."""
        return cls(alpha, alpha)


def _require_exact(alpha, what: str) -> None:
    if not is_exact(alpha):
        raise TypeError(f"{what} is an exact check; pass alpha as a Fraction")


def _ratio(num, den):
    # int / int must not silently become a float in exact mode
    if isinstance(num, int) and isinstance(den, int):
        return Fraction(num, den)
    return num / den


# -- one-step kernels ------------------------------------------------------------

def up_kernel_row(sigma: Composition, params: ChainParams) -> dict:
    """Law of one ordered-CRP growth step from ``sigma``."""
    n = sum(sigma)
    alpha, theta = params.alpha, params.theta
    if n == 0 and theta == 0:
        raise ValueError("up-step from the empty composition needs theta > 0")
    total = n + theta
    out: dict = {}

    def add(tau, w):
        if w:
            tau = Composition(tau)
            out[tau] = out.get(tau, 0) + _ratio(w, total)

    add((1, *sigma), theta)
    for i, p in enumerate(sigma):
        add(sigma[:i] + (p + 1,) + sigma[i + 1:], p - alpha)
        add(sigma[:i + 1] + (1,) + sigma[i + 1:], alpha)
    return out


def down_kernel_row(tau: Composition) -> dict:
    """Law of removing a uniformly chosen customer from ``tau``."""
    n = sum(tau)
    if n == 0:
        raise ValueError("down-step from the empty composition is undefined")
    out: dict = {}
    for i, p in enumerate(tau):
        sigma = Composition(tau[:i] + ((p - 1,) if p > 1 else ()) + tau[i + 1:])
        out[sigma] = out.get(sigma, 0) + Fraction(p, n)
    return out


def updown_row(sigma: Composition, params: ChainParams) -> dict:
    out: dict = {}
    for tau, a in up_kernel_row(sigma, params).items():
        for s, b in down_kernel_row(tau).items():
            out[s] = out.get(s, 0) + a * b
    return out


def up_kernel(n: int, params: ChainParams) -> KernelMatrix:
    """Growth kernel from compositions of n to compositions of n + 1."""
    rows = StateIndex.compositions(n)
    return KernelMatrix(rows, StateIndex.compositions(n + 1),
                        {s: up_kernel_row(s, params) for s in rows})


def down_kernel(n: int) -> KernelMatrix:
    """Removal kernel from compositions of n to compositions of n - 1."""
    rows = StateIndex.compositions(n)
    return KernelMatrix(rows, StateIndex.compositions(n - 1),
                        {s: down_kernel_row(s) for s in rows})


def updown_kernel(n: int, params: ChainParams) -> KernelMatrix:
    """The composite kernel T_n on compositions of n."""
    index = StateIndex.compositions(n)
    return KernelMatrix(index, index, {s: updown_row(s, params) for s in index})


# -- stationary laws --------------------------------------------------------------

def multinomial(sigma: Composition) -> int:
    out = factorial(sum(sigma))
    for p in sigma:
        out //= factorial(p)
    return out


def stationary_alpha_alpha(n: int, alpha) -> dict:
    """Closed-form stationary law of the (alpha, alpha) chain on compositions of n."""
    check_alpha(alpha)
    norm = rising(alpha, n)
    out = {}
    for sigma in enumerate_compositions(n):
        w = multinomial(sigma)
        for p in sigma:
            w = w * alpha * rising(1 - alpha, p - 1)
        out[sigma] = _ratio(w, norm)
    return out


def stationary_alpha_zero(n: int, alpha) -> dict:
    """Law of n - 1 (alpha, 0) growth steps started from (1)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    enumerate_compositions(n)  # enforce the cap before doing any work
    params = ChainParams.biased(alpha)
    mu = {Composition((1,)): Fraction(1) if is_exact(alpha) else 1.0}
    for _ in range(n - 1):
        nxt: dict = {}
        for sigma, w in mu.items():
            for tau, p in up_kernel_row(sigma, params).items():
                nxt[tau] = nxt.get(tau, 0) + w * p
        mu = nxt
    return {s: mu.get(s, 0) for s in enumerate_compositions(n)}


def leftmost_law_alpha_zero(n: int, alpha) -> dict:
    """First-part law of the (alpha, 0) stationary composition, for any n.

    The first table behaves as a Polya urn (weight k - alpha against the rest),
    so ``sigma_1 - 1`` is beta-binomial(n - 1, 1 - alpha, alpha).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    check_alpha(alpha)
    p = Fraction(1) if is_exact(alpha) else 1.0
    for r in range(1, n):
        p = p * (r - 1 + alpha) / r  # P(sigma_1 = 1) = (alpha)_{n-1} / (n-1)!
    out = {1: p}
    for k in range(1, n):
        # P(k+1)/P(k) = (n-k)(k-alpha) / (k (n-k-1+alpha))
        p = p * _ratio((n - k) * (k - alpha), k * (n - k - 1 + alpha))
        out[k + 1] = p
    return out


def leftmost_stationary_q(n: int, alpha) -> dict:
    """Leftmost-column law q_n under the (alpha, alpha) stationary law.

    Uses the ratio ``q(i+1)/q(i) = (n-i)(i-alpha) / ((i+1)(n-i-1+alpha))``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    check_alpha(alpha)
    q = _ratio(n * alpha, n - 1 + alpha)
    out = {1: q}
    for i in range(1, n):
        q = q * _ratio((n - i) * (i - alpha), (i + 1) * (n - i - 1 + alpha))
        out[i + 1] = q
    return out


def leftmost_stationary_q_float(n: int, alpha: float) -> np.ndarray:
    """``q_n(1..n)`` as a float array, by the same recurrence in float arithmetic."""
    alpha = float(alpha)
    q = np.empty(n)
    q[0] = n * alpha / (n - 1 + alpha)
    i = np.arange(1, n)
    ratios = (n - i) * (i - alpha) / ((i + 1) * (n - i - 1 + alpha))
    q[1:] = q[0] * np.cumprod(ratios)
    return q


# -- leftmost-column local probabilities ----------------------------------------------

@dataclass(frozen=True)
class LocalProbs:
    down: Fraction | float
    up: Fraction | float
    stay1: Fraction | float
    stay2: Fraction | float

    @property
    def stay(self):
        return self.stay1 + self.stay2


def local_probs(n: int, alpha, i: int) -> LocalProbs:
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 <= i <= n:
        raise ValueError(f"i must lie in 0..{n}, got {i}")
    d = n * (n + 1)
    return LocalProbs(
        down=_ratio(i * (n - i + alpha), d),
        up=_ratio((i - alpha) * (n - i), d),
        stay1=_ratio((n - i + 1) * (n - i + alpha), d),
        stay2=_ratio((i - alpha) * (i + 1), d),
    )


def y(n: int, alpha, i: int, j: int):
    """Local probability y_{i,j}, extended by zero outside 0 <= i <= n, |i-j| <= 1."""
    if not 0 <= i <= n or abs(i - j) > 1:
        return 0
    lp = local_probs(n, alpha, i)
    if j == i - 1:
        return lp.down
    if j == i + 1:
        return lp.up
    return lp.stay


def leftmost_kernel_Q(n: int, alpha) -> KernelMatrix:
    """Transition kernel of the (alpha, 0) leftmost-column chain on {1..n}."""
    index = StateIndex.integers(n)
    q = leftmost_stationary_q(n, alpha)
    jump = local_probs(n, alpha, 1).down
    rows = {}
    for i in index:
        row = {j: y(n, alpha, i, j) for j in (i - 1, i, i + 1) if 1 <= j <= n}
        if i == 1:
            for j in index:
                row[j] = row.get(j, 0) + jump * q[j]
        rows[i] = row
    return KernelMatrix(index, index, rows)


def lambda_kernel(n: int, alpha) -> KernelMatrix:
    """Link from {1..n} to compositions of n: Lambda(i, (i, sigma)) = pi~_{n-i}(sigma)."""
    cols = StateIndex.compositions(n)
    rows = {}
    for i in range(1, n + 1):
        rows[i] = {Composition((i, *s)): w
                   for s, w in stationary_alpha_alpha(n - i, alpha).items()}
    return KernelMatrix(StateIndex.integers(n), cols, rows)


def phi_kernel(n: int) -> KernelMatrix:
    """Deterministic projection of a composition of n onto its first part."""
    rows = StateIndex.compositions(n)
    return KernelMatrix(rows, StateIndex.integers(n), {s: {s[0]: 1} for s in rows})


def leftmost_marginal(mu: dict, n: int) -> dict:
    out = {i: 0 for i in range(1, n + 1)}
    for sigma, w in mu.items():
        out[sigma[0]] += w
    return out


# -- exact verification ---------------------------------------------------------------

def verify_intertwining(n: int, alpha) -> SimReport:
    """Check Lambda T = Q Lambda and Q = Lambda T Phi for the (alpha, 0) chain."""
    _require_exact(alpha, "verify_intertwining")
    report = SimReport("verify intertwining", {"n": n, "alpha": alpha})
    lam = lambda_kernel(n, alpha)
    t = updown_kernel(n, ChainParams.biased(alpha))
    q = leftmost_kernel_Q(n, alpha)
    lhs, rhs = lam @ t, q @ lam
    gap = lhs.max_abs_diff(rhs)
    report.metric("max_discrepancy", gap)
    if gap != 0:
        report.fail(f"Lambda T != Q Lambda, max entry gap {gap}")
    derived = lhs @ phi_kernel(n)
    gap_q = derived.max_abs_diff(q)
    report.metric("q_closed_form_discrepancy", gap_q)
    if gap_q != 0:
        report.fail(f"Lambda T Phi differs from the closed-form Q by {gap_q}")
    lam_phi = lam @ phi_kernel(n)
    if lam_phi != identity_kernel(StateIndex.integers(n)):
        report.fail("Lambda Phi is not the identity")
    if not (t.is_stochastic() and q.is_stochastic() and lam.is_stochastic()):
        report.fail("a kernel failed the exact stochasticity check")
    return report


def transition_recurrence_rhs(first: Composition, second: Composition, alpha) -> Fraction:
    """Four-term decomposition of T_n^{(alpha,0)}(first, second)."""
    n = sum(first)
    i, sigma = first[0], Composition(first[1:])
    j, sigma2 = second[0], Composition(second[1:])
    sym = ChainParams.symmetric(alpha)
    out = 0
    if j == i - 1:
        out += y(n, alpha, i, j) * up_kernel_row(sigma, sym).get(sigma2, 0)
    if j == i + 1:
        out += y(n, alpha, i, j) * down_kernel_row(sigma).get(sigma2, 0)
    if j == i:
        lp = local_probs(n, alpha, i)
        out += lp.stay1 * updown_row(sigma, sym).get(sigma2, 0)
        out += lp.stay2 * (sigma == sigma2)
    if i == 1:
        out += local_probs(n, alpha, 1).down * up_kernel_row(sigma, sym).get(second, 0)
    return out


def verify_transition_recurrence(n: int, alpha) -> SimReport:
    _require_exact(alpha, "verify_transition_recurrence")
    report = SimReport("verify recurrence", {"n": n, "alpha": alpha})
    t = updown_kernel(n, ChainParams.biased(alpha))
    checked = 0
    for a in t.rows:
        for b in t.cols:
            lhs, rhs = t[a, b], transition_recurrence_rhs(a, b, alpha)
            checked += 1
            if lhs != rhs:
                report.fail(f"T(({a}),({b})) = {lhs} but decomposition gives {rhs}")
    report.metric("pairs_checked", checked)
    report.metric("mismatches", len(report.failures))
    return report


def verify_consistency(n: int, alpha) -> SimReport:
    """pi~_n = pi~_{n-1} p~up = pi~_{n+1} p_down, plus the leftmost factorization."""
    _require_exact(alpha, "verify_consistency")
    report = SimReport("verify consistency", {"n": n, "alpha": alpha})
    target = stationary_alpha_alpha(n, alpha)
    if sum(target.values()) != 1:
        report.fail("pi~_n does not sum to 1")
    from_below = up_kernel(n - 1, ChainParams.symmetric(alpha)).left_apply(
        stationary_alpha_alpha(n - 1, alpha))
    from_above = down_kernel(n + 1).left_apply(stationary_alpha_alpha(n + 1, alpha))
    if from_below != target:
        report.fail("pi~_{n-1} p~up != pi~_n")
    if from_above != target:
        report.fail("pi~_{n+1} p_down != pi~_n")
    q = leftmost_stationary_q(n, alpha)
    bad = 0
    for sigma, w in target.items():
        rest = stationary_alpha_alpha(n - sigma[0], alpha)[Composition(sigma[1:])]
        if w != q[sigma[0]] * rest:
            bad += 1
    if bad:
        report.fail(f"factorization pi~_n(i, s) = q(i) pi~_(n-i)(s) fails at {bad} states")
    report.metric("states", len(target))
    return report


def stationary_multiplicity(n: int, params: ChainParams, tol: float = 1e-9) -> int:
    """Multiplicity of eigenvalue 1 of T_n, computed numerically."""
    dense = updown_kernel(n, params).to_dense()
    ev = np.linalg.eigvals(dense)
    return int(np.sum(np.abs(ev - 1) < tol))
