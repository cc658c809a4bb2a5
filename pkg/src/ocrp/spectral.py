"""Polynomial machinery on [0, 1].

The generator is B f = x(1-x) f'' - alpha f'; its eigenpolynomials h_m span the
kernel of eta, and K_n carries vectors on {1..n} into that space.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import zip_longest
from math import comb, factorial
from numbers import Number, Rational
from typing import Mapping, Sequence

import numpy as np

from .chains import leftmost_kernel_Q, leftmost_stationary_q, y
from .core import falling, format_scalar, is_exact, rising
from .report import SimReport

GRID_SIZE = 1001


class NotInHError(ValueError):
    """Raised when a polynomial is outside the domain an operation needs."""


def grid(size: int = GRID_SIZE) -> np.ndarray:
    return np.linspace(0.0, 1.0, size)


class Polynomial:
    """Univariate polynomial stored by monomial coefficients ``c_0 .. c_d``.

    Coefficients are Fractions for exact work; float coefficients are allowed
    (e.g. for semigroup output) and propagate through arithmetic.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        c = [Fraction(v) if isinstance(v, Rational) else v for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls([c])

    @classmethod
    def x(cls) -> "Polynomial":
        return cls([0, 1])

    @classmethod
    def from_bernstein(cls, coeffs: Sequence) -> "Polynomial":
        k = len(coeffs) - 1
        out = [0] * (k + 1)
        for i, ci in enumerate(coeffs):
            if ci == 0:
                continue
            for r in range(k - i + 1):
                out[i + r] += ci * (comb(k, i) * comb(k - i, r) * (-1) ** r)
        return cls(out)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        if isinstance(other, Number):
            other = Polynomial.constant(other)
        return Polynomial([a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0)])

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return Polynomial([a * other for a in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, int):
            c = Fraction(c)
        return Polynomial([a / c for a in self.coeffs])

    def __eq__(self, other) -> bool:
        if isinstance(other, Number):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        out = 0
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def derivative(self) -> "Polynomial":
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def evaluate(self, xs) -> np.ndarray:
        """Float evaluation on an array of points."""
        xs = np.asarray(xs, dtype=float)
        out = np.zeros_like(xs)
        for c in reversed(self.coeffs):
            out = out * xs + float(c)
        return out

    def to_bernstein(self, k: int) -> list:
        """Coefficients in the degree-k Bernstein basis (k >= degree).

        Uses x^s = sum_j [C(j, s) / C(k, s)] b_{j,k}.
        """
        if k < self.degree:
            raise ValueError(f"degree {self.degree} polynomial has no degree-{k} Bernstein form")
        out = []
        for j in range(k + 1):
            acc = 0
            for s, a in enumerate(self.coeffs):
                if s <= j and a != 0:
                    acc += a * Fraction(comb(j, s), comb(k, s))
            out.append(acc)
        return out

    def as_strings(self) -> list[str]:
        return [format_scalar(c) for c in self.coeffs]

    def __repr__(self) -> str:
        return f"Polynomial([{', '.join(self.as_strings())}])"


@dataclass(frozen=True)
class BernsteinForm:
    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def of(cls, f: Polynomial, k: int) -> "BernsteinForm":
        return cls(tuple(f.to_bernstein(k)))

    def to_polynomial(self) -> Polynomial:
        return Polynomial.from_bernstein(self.coeffs)


# -- basis families -------------------------------------------------------------

def bernstein(i: int, k: int) -> Polynomial:
    """b_{i,k}(x) = C(k, i) x^i (1 - x)^{k-i}; zero outside 0 <= i <= k."""
    if i < 0 or i > k:
        return Polynomial()
    return Polynomial.from_bernstein([1 if j == i else 0 for j in range(k + 1)])


def degenerate_bernstein(i: int, k: int, n: int) -> Polynomial:
    """C(k,i) (n x)^{falling i} (n - n x)^{falling (k-i)} / n^{falling k}."""
    if not 0 <= i <= k <= n:
        raise ValueError(f"need 0 <= i <= k <= n, got {(i, k, n)}")
    out = Polynomial.constant(Fraction(comb(k, i), falling(n, k)))
    for r in range(i):
        out = out * Polynomial([-r, n])
    for s in range(k - i):
        out = out * Polynomial([n - s, -n])
    return out


@lru_cache(maxsize=None)
def jacobi_h(m: int, alpha) -> Polynomial:
    """Eigenpolynomial h_m of B; h_m is a shifted Jacobi polynomial.

    h_1 is the constant alpha, so only m in {0, 2, 3, ...} give a basis.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    coeffs = []
    for s in range(m + 1):
        c = Fraction((-1) ** (m - s) * rising(m - 1, s), factorial(s))
        coeffs.append(c * rising(s - alpha, m - s) / factorial(m - s))
    return Polynomial(coeffs)


def eigen_indices(n: int) -> list[int]:
    """Index set {0} u {2..n} of the eigenpolynomials spanning H_n."""
    return [0] + list(range(2, n + 1))


# -- operator and functional ------------------------------------------------------

def generator_B(f: Polynomial, alpha) -> Polynomial:
    d1 = f.derivative()
    return Polynomial([0, 1, -1]) * d1.derivative() - d1 * alpha


def eta_normalized(f: Polynomial, alpha):
    """eta(f) / (Gamma(1-alpha) Gamma(alpha)), using eta(x^k) ∝ (1-alpha)_{k-1} / (k-1)!."""
    out = 0
    weight = Fraction(1) if is_exact(alpha) else 1.0
    for k in range(1, len(f.coeffs)):
        out += f.coeffs[k] * weight
        weight = weight * (k - alpha) / k
    return out


@dataclass(frozen=True)
class HMembership:
    f: Polynomial
    eta: object
    in_H: bool


def h_membership(f: Polynomial, alpha) -> HMembership:
    e = eta_normalized(f, alpha)
    return HMembership(f, e, e == 0)


def bernstein_membership_gap(f: Polynomial, n: int, alpha):
    """c_0 - sum_j q_n(j) c_j for the degree-n Bernstein coefficients of f."""
    c = f.to_bernstein(n)
    q = leftmost_stationary_q(n, alpha)
    return c[0] - sum(q[j] * c[j] for j in range(1, n + 1))


# -- the kernel K_n -------------------------------------------------------------

def _as_vector(n: int, g) -> list:
    if isinstance(g, Mapping):
        return [g.get(i, 0) for i in range(1, n + 1)]
    g = list(g)
    if len(g) != n:
        raise ValueError(f"expected a vector over 1..{n}, got length {len(g)}")
    return g


def K_apply(n: int, alpha, g) -> Polynomial:
    """(K_n g)(x) = sum_i g(i) (b_{i,n}(x) + q_n(i) b_{0,n}(x))."""
    g = _as_vector(n, g)
    q = leftmost_stationary_q(n, alpha)
    c0 = sum(q[i] * g[i - 1] for i in range(1, n + 1))
    return Polynomial.from_bernstein([c0, *g])


def K_inverse(n: int, alpha, f: Polynomial) -> list:
    """Preimage of f under K_n: its degree-n Bernstein coefficients c_1..c_n."""
    if f.degree > n:
        raise NotInHError(f"not in H_{n}: degree {f.degree} exceeds {n}")
    e = eta_normalized(f, alpha)
    if e != 0:
        raise NotInHError(f"not in H: eta~(f) = {e} != 0")
    return f.to_bernstein(n)[1:]


def _vanishes(value, f: Polynomial) -> bool:
    """Exact zero test, or a roundoff-scaled one when f has float coefficients."""
    if all(isinstance(c, Rational) for c in f.coeffs) and isinstance(value, Rational):
        return value == 0
    scale = max([1.0] + [abs(float(c)) for c in f.coeffs])
    return abs(float(value)) <= 1e-9 * scale


def h_decompose(f: Polynomial, alpha) -> dict:
    """Coefficients {m: c_m} with f = c_0 h_0 + sum_{m>=2} c_m h_m.

    Leading coefficients are matched from the top degree down to 2; the
    degree-1 part of the remainder must then vanish because f is in H.
    """
    e = eta_normalized(f, alpha)
    if not _vanishes(e, f):
        raise NotInHError(f"not in H: eta~(f) = {e} != 0")
    out = {}
    rest = f
    for m in range(f.degree, 1, -1):
        h = jacobi_h(m, alpha)
        c = rest.coeff(m) / h.coeffs[m]
        if c != 0:
            out[m] = c
            rest = rest - h * c
    if not _vanishes(rest.coeff(1), f):
        raise NotInHError(f"degree-1 remainder {rest.coeff(1)} left after h-decomposition")
    out[0] = rest.coeff(0)
    return dict(sorted(out.items()))


def h_reconstruct(coeffs: Mapping, alpha) -> Polynomial:
    out = Polynomial()
    for m, c in coeffs.items():
        out = out + jacobi_h(m, alpha) * c
    return out


# -- large-n approximation ---------------------------------------------------------

def degenerate_bernstein_gap(i: int, k: int, n: int, grid_size: int = GRID_SIZE) -> float:
    """sup over the grid of |b*_{i,k,n} - b_{i,k}|."""
    xs = grid(grid_size)
    diff = degenerate_bernstein(i, k, n) - bernstein(i, k)
    return float(np.max(np.abs(diff.evaluate(xs))))


def projection_error(n: int, alpha, f: Polynomial) -> float:
    """max_j |K_n^{-1} f (j) - f(j/n)|, exact up to the final float conversion."""
    c = K_inverse(n, alpha, f)
    return max(abs(float(c[j - 1] - f(Fraction(j, n)))) for j in range(1, n + 1))


# -- exact identity checks --------------------------------------------------------------

def verify_pieri(i: int, k: int, n: int) -> SimReport:
    """b_{i,k} = sum_j b*_{i,k,n}(j/n) b_{j,n} as an exact polynomial identity."""
    report = SimReport("verify pieri", {"i": i, "k": k, "n": n})
    star = degenerate_bernstein(i, k, n)
    # b*_{0,0,0} is the constant 1, so the n = 0 grid point can be anything
    coeffs = [star(Fraction(j, n) if n else Fraction(0)) for j in range(n + 1)]
    if Polynomial.from_bernstein(coeffs) != bernstein(i, k):
        report.fail(f"Pieri expansion fails for (i, k, n) = {(i, k, n)}")
    if coeffs != bernstein(i, k).to_bernstein(n):
        report.fail(f"degree-raised coefficients disagree for (i, k, n) = {(i, k, n)}")
    return report


def verify_bernstein_identities(k: int) -> SimReport:
    """The derivative identity plus the degree-raise and x(1-x) scaling rules for all b_{i,k}."""
    report = SimReport("verify bernstein", {"k": k})
    xx = Polynomial([0, 1, -1])
    for i in range(k + 1):
        b = bernstein(i, k)
        if k >= 1 and b.derivative() != (bernstein(i - 1, k - 1) - bernstein(i, k - 1)) * k:
            report.fail(f"derivative identity fails at (i, k) = {(i, k)}")
        raised = (bernstein(i, k + 1) * Fraction(k + 1 - i, k + 1)
                  + bernstein(i + 1, k + 1) * Fraction(i + 1, k + 1))
        if b != raised:
            report.fail(f"degree-raise identity fails at (i, k) = {(i, k)}")
        scaled = bernstein(i + 1, k + 2) * Fraction((i + 1) * (k + 1 - i), (k + 1) * (k + 2))
        if xx * b != scaled:
            report.fail(f"scaling identity fails at (i, k) = {(i, k)}")
    if sum((bernstein(i, k) for i in range(k + 1)), Polynomial()) != 1:
        report.fail(f"degree-{k} Bernstein basis is not a partition of unity")
    return report


def verify_generator_on_bernstein(n: int, alpha) -> SimReport:
    """B b_{i,n} = n(n+1) sum_k (y_{k,i} - 1(k=i)) b_{k,n} for 0 <= i <= n."""
    report = SimReport("verify generator-bernstein", {"n": n, "alpha": alpha})
    for i in range(n + 1):
        lhs = generator_B(bernstein(i, n), alpha)
        if n == 0:
            rhs = Polynomial()
        else:
            coeffs = [(y(n, alpha, k, i) - (k == i)) * (n * (n + 1)) for k in range(n + 1)]
            rhs = Polynomial.from_bernstein(coeffs)
        if lhs != rhs:
            report.fail(f"B b_({i},{n}) mismatch")
    report.metric("identities_checked", n + 1)
    return report


def verify_generator_relation(n: int, alpha) -> SimReport:
    """B K_n e_i = K_n n(n+1)(Q_n - I) e_i for every basis vector e_i."""
    report = SimReport("verify generator", {"n": n, "alpha": alpha})
    q = leftmost_kernel_Q(n, alpha)
    scale = n * (n + 1)
    for i in range(1, n + 1):
        e = [int(j == i) for j in range(1, n + 1)]
        lhs = generator_B(K_apply(n, alpha, e), alpha)
        g = [(q[k, i] - (k == i)) * scale for k in range(1, n + 1)]
        rhs = K_apply(n, alpha, g)
        if lhs != rhs:
            report.fail(f"B K e_{i} != K G e_{i}")
    report.metric("columns_checked", n)
    return report


def verify_h_family(m_max: int, alpha) -> SimReport:
    """B h_m = -m(m-1) h_m and eta~(h_m) = 0 for m <= m_max; h_1 must be constant."""
    report = SimReport("verify eigenpolynomials", {"m_max": m_max, "alpha": alpha})
    for m in range(m_max + 1):
        h = jacobi_h(m, alpha)
        if generator_B(h, alpha) != h * (-m * (m - 1)):
            report.fail(f"B h_{m} != -{m * (m - 1)} h_{m}")
        if eta_normalized(h, alpha) != 0:
            report.fail(f"eta~(h_{m}) != 0")
        if m != 1 and h.degree != m:
            report.fail(f"h_{m} has degree {h.degree}")
    h1 = jacobi_h(1, alpha)
    report.metric("h1_degree", h1.degree)
    if h1.degree > 0:
        report.fail("h_1 is not constant")
    return report
