"""The limiting semigroup U_t next to its discrete counterpart exp(t n(n+1)(Q_n - I)).

Every matrix exponential here is assembled from the exact eigenvectors
f_m = K_n^{-1} h_m; the only floating-point step is exp(-m(m-1) t).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, exp

import numpy as np

from .chains import leftmost_kernel_Q, leftmost_stationary_q
from .core import exact_rank
from .report import SimReport
from .spectral import (
    GRID_SIZE,
    K_apply,
    K_inverse,
    NotInHError,
    Polynomial,
    eigen_indices,
    eta_normalized,
    generator_B,
    grid,
    h_decompose,
    jacobi_h,
)


def eigenvalue_B(m: int) -> int:
    return -m * (m - 1)


@dataclass(frozen=True)
class SpectralSemigroup:
    """U_t acting on polynomials in H through their h-expansion."""

    alpha: Fraction | float

    def __call__(self, f: Polynomial, t: float) -> Polynomial:
        return U_t(f, t, self.alpha)

    def eigenvalue(self, m: int) -> int:
        return eigenvalue_B(m)


def U_t(f: Polynomial, t: float, alpha) -> Polynomial:
    if t < 0:
        raise ValueError("t must be nonnegative")
    out = Polynomial()
    for m, c in h_decompose(f, alpha).items():
        factor = float(c) * exp(eigenvalue_B(m) * t)
        out = out + Polynomial([float(a) * factor for a in jacobi_h(m, alpha).coeffs])
    return out


# -- discrete side ------------------------------------------------------------------

def eigenfunction(n: int, alpha, m: int) -> tuple[list, Fraction]:
    """Right eigenvector f_m = K_n^{-1} h_m of Q_n with eigenvalue 1 - m(m-1)/(n(n+1))."""
    if m == 1 or m < 0 or m > n:
        raise ValueError(f"m must lie in {{0}} u {{2..{n}}}, got {m}")
    return K_inverse(n, alpha, jacobi_h(m, alpha)), 1 - Fraction(m * (m - 1), n * (n + 1))


@dataclass(frozen=True)
class DiscreteEigenSystem:
    n: int
    alpha: Fraction
    eigenfunctions: dict
    eigenvalues: dict

    @classmethod
    def build(cls, n: int, alpha) -> "DiscreteEigenSystem":
        fs, lams = {}, {}
        for m in eigen_indices(n):
            fs[m], lams[m] = eigenfunction(n, alpha, m)
        return cls(n, alpha, fs, lams)

    def check(self) -> SimReport:
        report = SimReport("verify spectrum", {"n": self.n, "alpha": self.alpha})
        q = leftmost_kernel_Q(self.n, self.alpha)
        for m, f in self.eigenfunctions.items():
            qf = q.apply({i: f[i - 1] for i in range(1, self.n + 1)})
            lam = self.eigenvalues[m]
            if any(qf[i] != lam * f[i - 1] for i in range(1, self.n + 1)):
                report.fail(f"Q f_{m} != {lam} f_{m}")
        r = exact_rank(list(self.eigenfunctions.values()))
        report.metric("rank", r)
        if r != self.n:
            report.fail(f"eigenfunctions span a space of dimension {r} < {self.n}")
        report.metric("eigenvalues", [self.eigenvalues[m] for m in self.eigenfunctions])
        return report


def verify_spectrum(n: int, alpha) -> SimReport:
    return DiscreteEigenSystem.build(n, alpha).check()


@lru_cache(maxsize=None)
def _expansion(n: int, alpha):
    """Float matrices (F, C) with e_i = sum_m C[m, i] f_m and F[:, m] = f_m."""
    idx = eigen_indices(n)
    fmat = np.empty((n, len(idx)))
    cmat = np.zeros((len(idx), n))
    for col, m in enumerate(idx):
        fmat[:, col] = [float(v) for v in eigenfunction(n, alpha, m)[0]]
    for i in range(1, n + 1):
        e = [int(j == i) for j in range(1, n + 1)]
        for m, c in h_decompose(K_apply(n, alpha, e), alpha).items():
            cmat[idx.index(m), i - 1] = float(c)
    return idx, fmat, cmat


def discrete_semigroup(n: int, alpha, t: float) -> np.ndarray:
    """exp(t n(n+1)(Q_n - I)) as a dense float matrix indexed by 1..n."""
    idx, fmat, cmat = _expansion(n, alpha)
    decay = np.array([exp(eigenvalue_B(m) * t) for m in idx])
    return fmat @ (decay[:, None] * cmat)


def _K_on_grid(n: int, alpha, g: np.ndarray, xs: np.ndarray) -> np.ndarray:
    q = leftmost_stationary_q(n, alpha)
    out = np.zeros_like(xs)
    for k in range(1, n + 1):
        out += g[k - 1] * comb(n, k) * xs ** k * (1 - xs) ** (n - k)
    c0 = sum(float(q[k]) * g[k - 1] for k in range(1, n + 1))
    return out + c0 * (1 - xs) ** n


def verify_semigroup_relation(n: int, alpha, t: float, grid_size: int = GRID_SIZE,
                              tol: float = 1e-9) -> SimReport:
    """Compare K_n exp(t G_n) e_i with U_t K_n e_i on a uniform grid."""
    report = SimReport("verify semigroup",
                       {"n": n, "alpha": alpha, "t": t, "grid": grid_size, "tol": tol})
    xs = grid(grid_size)
    s = discrete_semigroup(n, alpha, t)
    worst = 0.0
    for i in range(1, n + 1):
        lhs = _K_on_grid(n, alpha, s[:, i - 1], xs)
        e = [int(j == i) for j in range(1, n + 1)]
        rhs = U_t(K_apply(n, alpha, e), t, alpha).evaluate(xs)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    report.metric("max_error", worst)
    if not worst < tol:
        report.fail(f"max grid error {worst:.3e} exceeds {tol:.1e}")
    return report


# -- boundary conditions ------------------------------------------------------------------

def boundary_checks(f: Polynomial, alpha, grid_size: int = GRID_SIZE) -> SimReport:
    """Domain conditions (D1)-(D3) evaluated for a polynomial in H."""
    e = eta_normalized(f, alpha)
    if e != 0:
        raise NotInHError(f"not in H: eta~(f) = {e} != 0")
    report = SimReport("verify boundary", {"f": f.as_strings(), "alpha": alpha})
    lf = generator_B(f, alpha)
    report.metric("D1_Lf_at_0", lf(0))
    report.metric("D1_Lf_at_1", lf(1))
    report.metric("D2_eta", e)
    df = f.derivative()
    sup = float(np.max(np.abs(df.evaluate(grid(grid_size)))))
    a = float(alpha)
    values = []
    for k in range(2, 9):
        h = 10.0 ** -k
        values.append(abs(float(df(1 - h))) * h ** a)
    report.metric("D3_values", values)
    # a polynomial derivative is bounded, so |f'(x)|(1-x)^alpha <= sup|f'| (1-x)^alpha -> 0
    report.metric("D3_symbolic", True)
    envelope = [sup * (10.0 ** -k) ** a * (1 + 1e-9) for k in range(2, 9)]
    if any(v > b for v, b in zip(values, envelope)):
        report.fail("D3 values exceed the sup|f'| (1-x)^alpha envelope")
    if any(b > a_ * (1 + 1e-9) for a_, b in zip(values, values[1:])):
        report.fail("D3 values are not monotonically decaying")
    return report


def verify_eta_unboundedness(alpha, j_max: int = 50) -> SimReport:
    """eta~((1-x)^j) = -prod_{r<j} (r+alpha)/r, whose modulus grows without bound."""
    if j_max < 2:
        raise ValueError("j_max must be at least 2")
    report = SimReport("verify eta", {"alpha": alpha, "j_max": j_max})
    one_minus_x = Polynomial([1, -1])
    power = Polynomial([1])
    closed = Fraction(-1) if isinstance(alpha, Fraction) else -1.0
    values = []
    for j in range(1, j_max + 1):
        power = power * one_minus_x
        if j > 1:
            closed = closed * (j - 1 + alpha) / (j - 1)
        got = eta_normalized(power, alpha)
        if got != closed:
            report.fail(f"eta~((1-x)^{j}) = {got}, closed form {closed}")
        values.append(got)
    if any(abs(b) < abs(a) for a, b in zip(values, values[1:])):
        report.fail("|eta~((1-x)^j)| is not nondecreasing in j")
    if j_max >= 50 and not abs(values[49]) > abs(values[4]):
        report.fail("|eta~| at j = 50 does not exceed the value at j = 5")
    report.metric("eta_j1", values[0])
    report.metric("eta_jmax", values[-1])
    return report
