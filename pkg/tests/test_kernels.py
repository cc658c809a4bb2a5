"""The compiled and pure-Python kernels must agree bit for bit."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ocrp import kernels
from ocrp.montecarlo import leftmost_tables

from .strategies import compositions

compiled = kernels.compiled_backend
needs_compiled = pytest.mark.skipif(compiled is None, reason="extension not built")
py = kernels.python_backend

params = st.tuples(st.floats(0.01, 0.99), st.sampled_from([0.0, 0.5, 1.0]))
seeds = st.integers(0, 2 ** 32 - 1)


def _u(seed, k):
    return np.random.default_rng(seed).random(k)


def test_backend_flag():
    assert kernels.BACKEND in ("cython", "python")
    assert (kernels.BACKEND == "cython") == (compiled is not None)


@given(compositions(max_size=12), params, seeds, st.integers(0, 60))
def test_python_grow_keeps_size(sigma, p, seed, steps):
    out = py.grow(list(sigma), p[0], p[1], _u(seed, steps))
    assert sum(out) == sigma.size + steps and min(out, default=1) >= 1


def test_grow_from_empty_needs_theta_weight():
    # u = 0 always selects the prepend move when theta > 0
    assert py.grow([], 0.5, 0.5, np.zeros(3)) == [1, 1, 1]


@given(compositions(max_size=12), params, seeds, st.integers(0, 80))
def test_python_updown_keeps_size(sigma, p, seed, steps):
    parts, first = py.updown_path(list(sigma), p[0], p[1], _u(seed, steps), _u(seed + 1, steps))
    assert sum(parts) == sigma.size and len(first) == steps + 1
    assert first[0] == sigma[0] and first[-1] == parts[0]


@needs_compiled
@given(compositions(max_size=15), params, seeds, st.integers(0, 60))
def test_grow_agrees(sigma, p, seed, steps):
    u = _u(seed, steps)
    assert compiled.grow(list(sigma), p[0], p[1], u) == py.grow(list(sigma), p[0], p[1], u)


@needs_compiled
@given(compositions(max_size=15), params, seeds, st.integers(0, 200))
def test_updown_agrees(sigma, p, seed, steps):
    a, b = _u(seed, steps), _u(seed + 1, steps)
    pc, fc = compiled.updown_path(list(sigma), p[0], p[1], a, b)
    pp, fp = py.updown_path(list(sigma), p[0], p[1], a, b)
    assert pc == pp and np.array_equal(fc, fp)


@needs_compiled
def test_updown_many_parts_growth():
    # a long run from (n) must accumulate many parts without overrunning buffers
    u_up = np.full(500, 0.999999)
    u_down = np.full(500, 0.0)
    pc, fc = compiled.updown_path([30], 0.9, 0.0, u_up, u_down)
    pp, fp = py.updown_path([30], 0.9, 0.0, u_up, u_down)
    assert pc == pp and np.array_equal(fc, fp)
    assert sum(pc) == 30


@needs_compiled
@given(st.integers(1, 300), st.floats(0.05, 0.95), seeds, st.integers(0, 500))
def test_q_path_agrees(n, a, seed, steps):
    tab = leftmost_tables(n, a)
    i0 = 1 + seed % n
    u = _u(seed, steps)
    pc = compiled.q_path(i0, tab.down, tab.up, tab.cumq, u)
    pp = py.q_path(i0, tab.down, tab.up, tab.cumq, u)
    assert np.array_equal(pc, pp)
    assert pc.min() >= 1 and pc.max() <= n
