from fractions import Fraction
from math import comb, factorial

import pytest

from eqdisc.mirror import (
    change_mori_basis,
    check_identity,
    corrected_coefficients,
    g_coefficient,
    g_function,
    kahler_context,
    mirror_map,
)
from eqdisc.series import SeriesContext
from eqdisc.toric import CurveClass


def catalan(k):
    return comb(2 * k, k) // (k + 1)


def coeffs_in_q2(series, n):
    # F_2 Kähler variables are (q1, q2) = (f, b)
    return [series.coefficient((0, k)) for k in range(n + 1)]


def test_g_coefficient_formula():
    # D_2.(k b) = -2k, D_1 = D_3 = k, D_4 = 0
    for k in range(1, 8):
        c = CurveClass((k, -2 * k, k, 0))
        assert g_coefficient(c, 1) == Fraction(factorial(2 * k - 1), factorial(k) ** 2)


def test_g_coefficient_domain():
    with pytest.raises(ValueError):
        g_coefficient(CurveClass((1, 1, 1)), 0)


class TestGFunction:
    def test_p2_vanishes(self, p2):
        for i in range(3):
            assert g_function(p2, i, 5).series.is_zero()

    def test_f2_ray_v2(self, f2):
        g = g_function(f2, 1, 5).series
        assert coeffs_in_q2(g, 5) == [0, 1, Fraction(3, 2), Fraction(10, 3), Fraction(35, 4), Fraction(126, 5)]
        assert all(e[0] == 0 for e in g.terms)

    def test_f2_other_rays_vanish(self, f2):
        for i in (0, 2, 3):
            assert g_function(f2, i, 4).series.is_zero()

    def test_fano_p1p1(self, p1p1):
        assert all(g_function(p1p1, i, 4).series.is_zero() for i in range(4))


class TestMirrorMap:
    def test_p2_identity(self, p2):
        mm = mirror_map(p2, 4)
        q = kahler_context(p2, 4).var("q1")
        assert list(mm.forward) == [q] and list(mm.inverse) == [q]

    def test_f2_b_coordinate(self, f2):
        mm = mirror_map(f2, 3)
        assert coeffs_in_q2(mm.forward[1], 3) == [0, 1, 2, 5]
        assert coeffs_in_q2(mm.inverse[1], 3) == [0, 1, -2, 3]

    def test_f2_f_coordinate(self, f2):
        mm = mirror_map(f2, 3)
        ctx = mm.forward[0].ctx
        q1, q2 = ctx.var("q1"), ctx.var("q2")
        assert mm.forward[0] == q1 - q1 * q2 - q1 * q2**2
        assert mm.inverse[0] == q1 + q1 * q2

    def test_catalan_oracle(self, f2):
        # exp(g) is the Catalan series C(x) and q_b = x C(x)^2 = C(x) - 1
        n = 6
        mm = mirror_map(f2, n)
        assert coeffs_in_q2(mm.forward[1], n) == [0] + [catalan(k) for k in range(1, n + 1)]

    def test_identity_both_ways(self, f2, p1p1):
        assert check_identity(mirror_map(f2, 4))
        assert check_identity(mirror_map(p1p1, 3))

    def test_below_first_class(self, f2):
        mm = mirror_map(f2, Fraction(1, 2))
        assert all(s == mm.forward[0].ctx.var(v) for s, v in zip(mm.forward, ("q1", "q2")))

    def test_bad_sign(self, f2):
        with pytest.raises(ValueError):
            mirror_map(f2, 3, sign=2)


class TestCorrected:
    def test_p2_all_one(self, p2):
        assert all(c == 1 for c in corrected_coefficients(p2, 4))

    def test_f2_flagship(self, f2):
        cc = corrected_coefficients(f2, 3)
        assert coeffs_in_q2(cc[1], 3) == [1, 1, 0, 0]
        assert cc[1] == cc[1].ctx.one() + cc[1].ctx.var("q2")
        assert all(cc[i] == 1 for i in (0, 2, 3))

    def test_f2_higher_cutoff_integral(self, f2):
        cc = corrected_coefficients(f2, 6)
        assert coeffs_in_q2(cc[1], 6) == [1, 1, 0, 0, 0, 0, 0]
        for c in cc:
            assert all(v.denominator == 1 and v >= 0 for v in c.terms.values())

    def test_rejected_sign(self, f2):
        cc = corrected_coefficients(f2, 3, sign=+1)
        assert coeffs_in_q2(cc[1], 3) == [1, 1, 4, 22]


def test_change_mori_basis():
    old = SeriesContext.uniform(["q1", "q2"], 3)
    new = SeriesContext.uniform(["p1", "p2"], 3)
    s = old.var("q1") + old.var("q1") * old.var("q2") ** 2
    # swap the generators
    out = change_mori_basis(s, [[0, 1], [1, 0]], new)
    assert out == new.var("p2") + new.var("p2") * new.var("p1") ** 2
