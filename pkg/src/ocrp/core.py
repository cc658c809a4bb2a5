"""Compositions and their indexing, plus the sparse kernel matrix everything builds on."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

#: Largest n for which the full composition state space may be enumerated.
ENUMERATION_CAP = 20


class EnumerationCapError(ValueError):
    pass


class Composition(tuple):
    """Ordered tuple of positive integers.

    ``str(c)`` gives the comma-separated wire format (``"2,1"``); the empty
    composition prints as the empty string.
    """

    __slots__ = ()

    def __new__(cls, parts: Iterable[int] = ()):
        parts = tuple(int(p) for p in parts)
        for p in parts:
            if p < 1:
                raise ValueError(f"composition parts must be positive, got {parts}")
        return super().__new__(cls, parts)

    @property
    def size(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def __str__(self) -> str:
        return ",".join(str(p) for p in self)

    def __repr__(self) -> str:
        return f"Composition({tuple(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "Composition":
        text = text.strip()
        if not text:
            return cls()
        return cls(int(tok) for tok in text.split(","))


EMPTY = Composition()


def prepend(i: int, sigma: Sequence[int]) -> Composition:
    """The composition ``(i, sigma_1, ..., sigma_l)``."""
    if i < 1:
        raise ValueError(f"prepended part must be positive, got {i}")
    return Composition((i, *sigma))


def leftmost_fraction(sigma: Composition) -> Fraction:
    if not sigma:
        raise ValueError("leftmost fraction of the empty composition is undefined")
    return Fraction(sigma[0], sum(sigma))


def to_breakpoints(sigma: Composition) -> list[Fraction]:
    """Right endpoints of the blocks of the interval partition of ``sigma``."""
    if not sigma:
        raise ValueError("breakpoints of the empty composition are undefined")
    n = sum(sigma)
    out, acc = [], 0
    for p in sigma:
        acc += p
        out.append(Fraction(acc, n))
    return out


# -- scalars -----------------------------------------------------------------

def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` (or an integer) into a Fraction; decimals are rejected."""
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise ValueError(f"expected a rational 'p/q', got {text!r}")
    return Fraction(text)


def parse_alpha(text: str, exact: bool = True) -> Fraction | float:
    value = parse_rational(text) if exact else _parse_number(text)
    check_alpha(value)
    return value


def _parse_number(text: str) -> Fraction | float:
    try:
        return parse_rational(text)
    except ValueError:
        return float(text)


def check_alpha(alpha) -> None:
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def is_exact(x) -> bool:
    return isinstance(x, Rational)


def format_scalar(x) -> str:
    if isinstance(x, Rational):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def rising(x, k: int):
    """Rising factorial (x)_k; the type of ``x`` is preserved."""
    out = 1 if is_exact(x) else 1.0
    for r in range(k):
        out = out * (x + r)
    return out


def falling(x, k: int):
    out = 1 if is_exact(x) else 1.0
    for r in range(k):
        out = out * (x - r)
    return out


# -- state indexing ------------------------------------------------------------

def _check_cap(n: int) -> None:
    if n > ENUMERATION_CAP:
        raise EnumerationCapError(
            f"n = {n} exceeds the enumeration cap {ENUMERATION_CAP}")


def unrank(n: int, k: int) -> Composition:
    """Composition of n whose breakpoint indicator has binary value k.

    Bit ``b`` of ``k`` is set iff ``b + 1`` is a partial sum of the parts.
    """
    if n == 0:
        if k != 0:
            raise IndexError(k)
        return EMPTY
    if not 0 <= k < 1 << (n - 1):
        raise IndexError(k)
    parts, last = [], 0
    for b in range(n - 1):
        if k >> b & 1:
            parts.append(b + 1 - last)
            last = b + 1
    parts.append(n - last)
    return Composition(parts)


def rank(sigma: Composition) -> int:
    k, acc = 0, 0
    for p in sigma[:-1]:
        acc += p
        k |= 1 << (acc - 1)
    return k


def enumerate_compositions(n: int) -> list[Composition]:
    """All compositions of n in canonical (breakpoint-binary) order."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    _check_cap(n)
    if n == 0:
        return [EMPTY]
    return [unrank(n, k) for k in range(1 << (n - 1))]


@dataclass(frozen=True)
class StateIndex:
    """Bijection between an ordered state list and 0..len-1."""

    states: tuple
    _pos: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_pos", {s: i for i, s in enumerate(self.states)})

    @classmethod
    def compositions(cls, n: int) -> "StateIndex":
        return cls(tuple(enumerate_compositions(n)))

    @classmethod
    def integers(cls, n: int) -> "StateIndex":
        return cls(tuple(range(1, n + 1)))

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __contains__(self, s) -> bool:
        return s in self._pos

    def index(self, s) -> int:
        return self._pos[s]


# -- kernels -------------------------------------------------------------------

class KernelMatrix:
    """Sparse matrix between two enumerated state sets.

    Entries are Fractions (exact mode) or floats. Rows are stored as dicts
    ``{column_state: value}`` with zeros omitted.
    """

    def __init__(self, rows: StateIndex, cols: StateIndex,
                 entries: Mapping[Hashable, Mapping[Hashable, object]]):
        self.rows = rows
        self.cols = cols
        self._entries = {}
        for r in rows:
            row = {c: v for c, v in entries.get(r, {}).items() if v != 0}
            for c in row:
                if c not in cols:
                    raise KeyError(f"column state {c!r} not in column index")
            self._entries[r] = row

    def row(self, r) -> dict:
        return self._entries[r]

    def __getitem__(self, key):
        r, c = key
        return self._entries[r].get(c, 0)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def row_sums(self) -> dict:
        return {r: sum(row.values()) for r, row in self._entries.items()}

    def is_stochastic(self, tol: float = 1e-12) -> bool:
        for r, row in self._entries.items():
            if any(v < 0 for v in row.values()):
                return False
            s = sum(row.values())
            if is_exact(s):
                if s != 1:
                    return False
            elif abs(s - 1) > tol:
                return False
        return True

    def __matmul__(self, other: "KernelMatrix") -> "KernelMatrix":
        if self.cols.states != other.rows.states:
            raise ValueError("inner state sets differ")
        out = {}
        for r, row in self._entries.items():
            acc = {}
            for mid, a in row.items():
                for c, b in other._entries[mid].items():
                    acc[c] = acc.get(c, 0) + a * b
            out[r] = acc
        return KernelMatrix(self.rows, other.cols, out)

    def apply(self, g: Mapping) -> dict:
        """Matrix-vector product: ``(K g)(r) = sum_c K(r, c) g(c)``."""
        return {r: sum(v * g[c] for c, v in row.items()) for r, row in self._entries.items()}

    def left_apply(self, mu: Mapping) -> dict:
        """Row-vector product ``mu K``."""
        out = {c: 0 for c in self.cols}
        for r, w in mu.items():
            if w == 0:
                continue
            for c, v in self._entries[r].items():
                out[c] += w * v
        return out

    def max_abs_diff(self, other: "KernelMatrix"):
        if self.rows.states != other.rows.states or self.cols.states != other.cols.states:
            raise ValueError("state sets differ")
        worst = 0
        for r in self.rows:
            a, b = self._entries[r], other._entries[r]
            for c in a.keys() | b.keys():
                d = abs(a.get(c, 0) - b.get(c, 0))
                if d > worst:
                    worst = d
        return worst

    def __eq__(self, other) -> bool:
        if not isinstance(other, KernelMatrix):
            return NotImplemented
        return (self.rows.states == other.rows.states
                and self.cols.states == other.cols.states
                and self._entries == other._entries)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for i, r in enumerate(self.rows):
            for c, v in self._entries[r].items():
                out[i, self.cols.index(c)] = float(v)
        return out

    def to_fraction_rows(self) -> list[list]:
        return [[self._entries[r].get(c, 0) for c in self.cols] for r in self.rows]

    def to_csv(self) -> str:
        """Long-format CSV ``row,col,value``; labels use the composition wire format."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row", "col", "value"])
        for r in self.rows:
            for c in self.cols:
                v = self._entries[r].get(c)
                if v is not None:
                    w.writerow([str(r), str(c), format_scalar(v)])
        return buf.getvalue()

    def __repr__(self) -> str:
        return f"KernelMatrix(shape={self.shape})"


def identity_kernel(index: StateIndex) -> KernelMatrix:
    return KernelMatrix(index, index, {s: {s: 1} for s in index})


def exact_rank(rows: Sequence[Sequence]) -> int:
    """Rank of a matrix of Fractions by Gaussian elimination."""
    m = [[Fraction(v) for v in row] for row in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            if m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def exact_solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve the square system ``a x = b`` exactly."""
    n = len(a)
    m = [[Fraction(v) for v in row] + [Fraction(bi)] for row, bi in zip(a, b)]
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [v * inv for v in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [row[n] for row in m]
