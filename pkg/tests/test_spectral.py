from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ocrp.chains import leftmost_stationary_q
from ocrp.spectral import (
    BernsteinForm,
    K_apply,
    K_inverse,
    NotInHError,
    Polynomial,
    bernstein,
    bernstein_membership_gap,
    degenerate_bernstein,
    degenerate_bernstein_gap,
    eigen_indices,
    eta_normalized,
    generator_B,
    grid,
    h_decompose,
    h_membership,
    h_reconstruct,
    jacobi_h,
    projection_error,
    verify_bernstein_identities,
    verify_generator_on_bernstein,
    verify_generator_relation,
    verify_h_family,
    verify_pieri,
)

from .strategies import alphas

H = Fraction(1, 2)
X = Polynomial.x()
ONE = Polynomial.constant(1)

small_rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)
polys = st.lists(small_rationals, min_size=0, max_size=7).map(Polynomial)


class TestPolynomial:
    def test_trims_and_degree(self):
        assert Polynomial([1, 2, 0, 0]).degree == 1
        assert Polynomial().degree == -1
        assert Polynomial([0]).is_zero()

    def test_arithmetic(self):
        assert (X + 1) * (X - 1) == Polynomial([-1, 0, 1])
        assert (X * X).derivative() == 2 * X
        assert (2 * X) / 2 == X
        assert X(Fraction(1, 3)) == Fraction(1, 3)

    @given(polys, polys)
    def test_ring_laws(self, f, g):
        assert f + g == g + f
        assert f * g == g * f
        assert (f - f).is_zero()

    @given(polys, st.integers(0, 4))
    def test_bernstein_round_trip(self, f, extra):
        k = max(f.degree, 0) + extra
        assert Polynomial.from_bernstein(f.to_bernstein(k)) == f
        assert BernsteinForm.of(f, k).to_polynomial() == f

    def test_bernstein_needs_enough_degree(self):
        with pytest.raises(ValueError):
            (X * X).to_bernstein(1)

    def test_partition_of_unity(self):
        assert ONE.to_bernstein(5) == [1] * 6

    def test_float_evaluation(self):
        f = Polynomial([Fraction(1, 3), 0, 2])
        xs = grid(11)
        assert np.allclose(f.evaluate(xs), 1 / 3 + 2 * xs ** 2)
        assert len(grid()) == 1001 and grid()[0] == 0 and grid()[-1] == 1


class TestBases:
    def test_bernstein_examples(self):
        assert bernstein(0, 0) == 1
        assert bernstein(1, 2) == Polynomial([0, 2, -2])
        assert bernstein(-1, 3).is_zero() and bernstein(4, 3).is_zero()

    def test_degenerate_examples(self):
        assert degenerate_bernstein(1, 1, 2) == X
        for k in range(5):
            assert degenerate_bernstein(0, k, 4)(0) == 1
        assert degenerate_bernstein(1, 2, 4)(Fraction(1, 4)) == H
        with pytest.raises(ValueError):
            degenerate_bernstein(3, 2, 4)

    def test_jacobi_examples(self):
        assert jacobi_h(0, H) == 1
        assert jacobi_h(1, H) == H and jacobi_h(1, H).degree == 0
        assert jacobi_h(2, H) == Polynomial([Fraction(-1, 8), -H, 1])

    @given(alphas)
    def test_h2_general_form(self, a):
        assert jacobi_h(2, a) == Polynomial([-a * (1 - a) / 2, -(1 - a), 1])

    def test_eigen_indices(self):
        assert eigen_indices(4) == [0, 2, 3, 4]
        assert eigen_indices(1) == [0]


class TestOperator:
    def test_eta_examples(self):
        assert eta_normalized(ONE, H) == 0
        assert eta_normalized(1 - X, H) == -1
        assert eta_normalized(jacobi_h(2, H), H) == 0

    def test_generator_examples(self):
        assert generator_B(ONE, H).is_zero()
        assert generator_B(X, H) == -H
        assert generator_B(jacobi_h(2, H), H) == -2 * jacobi_h(2, H)

    @pytest.mark.parametrize("m", range(13))
    def test_eigen_relation(self, m, alpha):
        h = jacobi_h(m, alpha)
        assert generator_B(h, alpha) == h * (-m * (m - 1))
        assert eta_normalized(h, alpha) == 0

    @given(polys, alphas)
    def test_generator_does_not_raise_degree(self, f, a):
        assert generator_B(f, a).degree <= f.degree

    def test_membership(self):
        assert h_membership(jacobi_h(3, H), H).in_H
        m = h_membership(X, H)
        assert not m.in_H and m.eta == 1

    @given(polys, alphas, st.integers(0, 3))
    def test_membership_matches_bernstein_relation(self, f, a, extra):
        n = max(f.degree, 1) + extra
        assert (eta_normalized(f, a) == 0) == (bernstein_membership_gap(f, n, a) == 0)

    @given(alphas)
    def test_K_columns_lie_in_H(self, a):
        for n in range(1, 11):
            q = leftmost_stationary_q(n, a)
            for i in range(1, n + 1):
                col = bernstein(i, n) + bernstein(0, n) * q[i]
                assert eta_normalized(col, a) == 0


class TestK:
    def test_apply_examples(self):
        for n in (1, 3, 6):
            assert K_apply(n, H, [1] * n) == 1
        assert K_apply(2, H, [1, 0]) == bernstein(1, 2) + Polynomial([1, -2, 1]) * Fraction(2, 3)
        assert K_apply(2, H, [Fraction(-3, 8), Fraction(3, 8)]) == jacobi_h(2, H)

    def test_inverse_examples(self):
        assert K_inverse(4, H, ONE) == [1] * 4
        assert K_inverse(2, H, jacobi_h(2, H)) == [Fraction(-3, 8), Fraction(3, 8)]

    def test_inverse_rejections(self):
        with pytest.raises(NotInHError, match="not in H"):
            K_inverse(3, H, X)
        with pytest.raises(NotInHError, match="degree"):
            K_inverse(2, H, jacobi_h(3, H))

    def test_apply_accepts_mapping(self):
        assert K_apply(3, H, {2: 1}) == K_apply(3, H, [0, 1, 0])

    @given(st.lists(small_rationals, min_size=1, max_size=8), alphas)
    def test_inverse_after_apply(self, g, a):
        assert K_inverse(len(g), a, K_apply(len(g), a, g)) == g

    @given(alphas, st.integers(2, 8))
    def test_apply_after_inverse(self, a, n):
        f = h_reconstruct({0: 2, **{m: Fraction(1, m) for m in range(2, n + 1)}}, a)
        assert K_apply(n, a, K_inverse(n, a, f)) == f


class TestDecompose:
    def test_examples(self):
        assert h_decompose(ONE, H) == {0: 1}
        f = jacobi_h(2, H) + 3 * jacobi_h(3, H)
        assert h_decompose(f, H) == {0: 0, 2: 1, 3: 3}
        f = K_apply(2, H, [1, 0])
        c = h_decompose(f, H)
        assert c.get(2, 0) != 0 and h_reconstruct(c, H) == f

    def test_rejects_outside_H(self):
        with pytest.raises(NotInHError):
            h_decompose(X, H)

    @given(st.dictionaries(st.sampled_from([0, 2, 3, 4, 5, 6]), small_rationals, max_size=6),
           alphas)
    def test_reconstruction(self, coeffs, a):
        f = h_reconstruct(coeffs, a)
        got = h_decompose(f, a)
        assert h_reconstruct(got, a) == f
        assert {m: c for m, c in got.items() if c} == {m: c for m, c in coeffs.items() if c}


class TestIdentitySuites:
    @pytest.mark.parametrize("case", [(1, 1, 2), (0, 3, 3), (2, 5, 9)])
    def test_pieri_examples(self, case):
        assert verify_pieri(*case).ok

    def test_pieri_spelled_out(self):
        assert X == bernstein(1, 2) * H + bernstein(2, 2)

    @pytest.mark.parametrize("k", range(0, 11))
    def test_bernstein_identities(self, k):
        assert verify_bernstein_identities(k).ok

    @pytest.mark.parametrize("n,a", [(0, H), (1, H), (6, Fraction(1, 3))])
    def test_generator_on_bernstein(self, n, a):
        assert verify_generator_on_bernstein(n, a).ok

    @pytest.mark.parametrize("n,a", [(1, H), (2, H), (7, Fraction(3, 4))])
    def test_generator_relation(self, n, a):
        assert verify_generator_relation(n, a).ok

    def test_h_family(self, alpha):
        rep = verify_h_family(12, alpha)
        assert rep.ok and rep.get("h1_degree") == 0


class TestLargeN:
    @pytest.mark.parametrize("i,k", [(0, 2), (1, 3), (2, 4)])
    def test_degenerate_convergence(self, i, k):
        gaps = [degenerate_bernstein_gap(i, k, n) for n in (10, 100, 1000, 10000)]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert all(g < 10 * k * k / n for g, n in zip(gaps, (10, 100, 1000, 10000)))

    @pytest.mark.parametrize("m", [2, 3])
    def test_projection_convergence(self, m):
        errs = [projection_error(n, H, jacobi_h(m, H)) for n in (100, 1000, 10000)]
        assert errs[0] >= errs[1] >= errs[2]
        assert errs[2] < 1e-3
