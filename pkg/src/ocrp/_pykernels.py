"""Pure-Python simulation kernels (fallback for the compiled extension).

Each function consumes pre-drawn uniforms so both backends are bit-identical.
"""

from bisect import bisect_right

import numpy as np


def _up(parts: list, size: int, alpha: float, theta: float, u: float) -> None:
    w = u * (size + theta)
    if w < theta:
        parts.insert(0, 1)
        return
    w -= theta
    for i, p in enumerate(parts):
        w -= p - alpha
        if w < 0:
            parts[i] = p + 1
            return
        w -= alpha
        if w < 0:
            parts.insert(i + 1, 1)
            return
    parts.append(1)


def _down(parts: list, size: int, u: float) -> None:
    w = u * size
    hit = len(parts) - 1
    for i, p in enumerate(parts):
        w -= p
        if w < 0:
            hit = i
            break
    parts[hit] -= 1
    if parts[hit] == 0:
        del parts[hit]


def grow(parts, alpha: float, theta: float, u) -> list:
    parts = list(parts)
    size = sum(parts)
    for v in np.asarray(u).tolist():
        _up(parts, size, alpha, theta, v)
        size += 1
    return parts


def updown_path(parts, alpha: float, theta: float, u_up, u_down):
    parts = list(parts)
    size = sum(parts)
    first = [parts[0]]
    for a, b in zip(np.asarray(u_up).tolist(), np.asarray(u_down).tolist()):
        _up(parts, size, alpha, theta, a)
        _down(parts, size + 1, b)
        first.append(parts[0])
    return parts, np.array(first, dtype=np.int64)


def q_path(i0: int, down_thr, up_thr, cumq, u) -> np.ndarray:
    down_thr = np.asarray(down_thr).tolist()
    up_thr = np.asarray(up_thr).tolist()
    cumq = np.asarray(cumq).tolist()
    n = len(cumq)
    i = int(i0)
    path = [i]
    for v in np.asarray(u).tolist():
        if v < down_thr[i]:
            if i == 1:
                i = min(bisect_right(cumq, v / down_thr[1]), n - 1) + 1
            else:
                i -= 1
        elif v < up_thr[i]:
            i += 1
        path.append(i)
    return np.array(path, dtype=np.int64)
